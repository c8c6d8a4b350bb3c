use nalgebra::SymmetricEigen;
use rand::Rng;

use super::gates::{pauli_matrix, DenseGate};
use super::{CMatrix, C64};
use crate::stab::{Pauli, PauliString};
use crate::{Error, Result};

/// Largest state vector the oracle will allocate.
pub const MAX_AMPLITUDES: u128 = 1 << 26;

/// Single-site measurement basis.
#[derive(Clone, Debug)]
pub enum Basis {
    Computational,
    /// Orthonormal basis given by the columns of a unitary.
    Columns(CMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    d: usize,
    amps: Vec<C64>,
}

fn checked_len(n: usize, d: usize) -> Result<usize> {
    let mut len: u128 = 1;
    for _ in 0..n {
        len = len.saturating_mul(d as u128);
        if len > MAX_AMPLITUDES {
            break;
        }
    }
    if len > MAX_AMPLITUDES {
        return Err(Error::OracleTooLarge { amplitudes: len, limit: MAX_AMPLITUDES });
    }
    Ok(len as usize)
}

impl DenseState {
    /// `|0...0>` on `n` sites of dimension `d`.
    pub fn zero(n: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter("local dimension must be >= 2".into()));
        }
        let len = checked_len(n, d)?;
        let mut amps = vec![C64::new(0.0, 0.0); len];
        amps[0] = C64::new(1.0, 0.0);
        Ok(DenseState { n, d, amps })
    }

    pub fn from_amplitudes(n: usize, d: usize, amps: Vec<C64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter("local dimension must be >= 2".into()));
        }
        let len = checked_len(n, d)?;
        if amps.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: amps.len() });
        }
        Ok(DenseState { n, d, amps })
    }

    pub fn num_sites(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    /// `|<self|other>|^2` for normalised states.
    pub fn fidelity(&self, other: &DenseState) -> f64 {
        let ov: C64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        ov.norm_sqr()
    }

    fn stride(&self, site: usize) -> usize {
        self.d.pow((self.n - 1 - site) as u32)
    }

    fn digit(&self, idx: usize, site: usize) -> usize {
        (idx / self.stride(site)) % self.d
    }

    fn check_sites(&self, sites: &[usize]) -> Result<()> {
        for (i, &s) in sites.iter().enumerate() {
            if s >= self.n {
                return Err(Error::SiteOutOfRange { site: s, n: self.n });
            }
            if sites[..i].contains(&s) {
                return Err(Error::DuplicateSite(s));
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &DenseGate, sites: &[usize]) -> Result<()> {
        if gate.arity() != sites.len() {
            return Err(Error::ArityMismatch { arity: gate.arity(), sites: sites.len() });
        }
        if gate.local_dim() != self.d {
            return Err(Error::InvalidParameter(format!(
                "gate acts on dimension {}, state has {}",
                gate.local_dim(),
                self.d
            )));
        }
        self.check_sites(sites)?;
        self.apply_matrix(gate.matrix(), sites);
        Ok(())
    }

    fn apply_matrix(&mut self, m: &CMatrix, sites: &[usize]) {
        let d = self.d;
        let strides: Vec<usize> = sites.iter().map(|&s| self.stride(s)).collect();
        let k = m.nrows();
        let offsets: Vec<usize> = (0..k)
            .map(|local| {
                let mut rem = local;
                let mut off = 0;
                for st in strides.iter().rev() {
                    off += (rem % d) * st;
                    rem /= d;
                }
                off
            })
            .collect();
        let mut buf = vec![C64::new(0.0, 0.0); k];
        for base in 0..self.amps.len() {
            if sites.iter().any(|&s| self.digit(base, s) != 0) {
                continue;
            }
            for (b, off) in buf.iter_mut().zip(&offsets) {
                *b = self.amps[base + off];
            }
            for (i, off) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, b) in buf.iter().enumerate() {
                    acc += m[(i, j)] * b;
                }
                self.amps[base + off] = acc;
            }
        }
    }

    /// Projects `site` onto computational state `k` without renormalising;
    /// returns the remaining squared norm.
    pub fn project(&mut self, site: usize, k: usize) -> Result<f64> {
        self.check_sites(&[site])?;
        if k >= self.d {
            return Err(Error::InvalidParameter(format!("outcome {k} >= dimension {}", self.d)));
        }
        for idx in 0..self.amps.len() {
            if self.digit(idx, site) != k {
                self.amps[idx] = C64::new(0.0, 0.0);
            }
        }
        Ok(self.norm_sqr())
    }

    /// Born probabilities of a computational-basis measurement on `site`.
    pub fn site_probabilities(&self, site: usize) -> Result<Vec<f64>> {
        self.check_sites(&[site])?;
        let mut probs = vec![0.0; self.d];
        for (idx, a) in self.amps.iter().enumerate() {
            probs[self.digit(idx, site)] += a.norm_sqr();
        }
        let total: f64 = probs.iter().sum();
        if total > 0.0 {
            for p in &mut probs {
                *p /= total;
            }
        }
        Ok(probs)
    }

    /// Projective measurement of one site. Draws exactly one uniform number
    /// and returns the index of the basis vector obtained.
    pub fn measure_site<R: Rng + ?Sized>(&mut self, site: usize, basis: &Basis, rng: &mut R) -> Result<usize> {
        self.check_sites(&[site])?;
        if let Basis::Columns(b) = basis {
            if b.nrows() != self.d || b.ncols() != self.d {
                return Err(Error::InvalidParameter("basis matrix has wrong dimension".into()));
            }
            self.apply_matrix(&b.adjoint(), &[site]);
        }
        let probs = self.site_probabilities(site)?;
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        let mut outcome = None;
        for (k, &p) in probs.iter().enumerate() {
            cum += p;
            if u < cum && p > 0.0 {
                outcome = Some(k);
                break;
            }
        }
        let outcome = outcome.unwrap_or_else(|| probs.iter().rposition(|&p| p > 0.0).unwrap_or(0));
        self.project(site, outcome)?;
        self.normalize();
        if let Basis::Columns(b) = basis {
            self.apply_matrix(b, &[site]);
        }
        Ok(outcome)
    }

    /// Pauli-Z measurement on a qubit, reported as `+1` / `-1`.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, site: usize, rng: &mut R) -> Result<i8> {
        if self.d != 2 {
            return Err(Error::InvalidParameter("Z measurement needs qubits".into()));
        }
        let k = self.measure_site(site, &Basis::Computational, rng)?;
        Ok(if k == 0 { 1 } else { -1 })
    }

    /// `<psi|P|psi>` for a qubit state.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        if self.d != 2 {
            return Err(Error::InvalidParameter("Pauli expectation needs qubits".into()));
        }
        if p.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: p.len() });
        }
        let mut phi = self.clone();
        for s in 0..self.n {
            let q = p.get(s);
            if q != Pauli::I {
                phi.apply_matrix(&pauli_matrix(q), &[s]);
            }
        }
        let ev: C64 = self.amps.iter().zip(&phi.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(f64::from(p.sign()) * ev.re / self.norm_sqr())
    }

    /// Reduced density matrix on `region` (site order as given), normalised
    /// to unit trace.
    pub fn reduced_density_matrix(&self, region: &[usize]) -> Result<CMatrix> {
        self.check_sites(region)?;
        let rest: Vec<usize> = (0..self.n).filter(|s| !region.contains(s)).collect();
        let m = self.bipartite_matrix(region, &rest);
        let rho = &m * m.adjoint();
        let tr = rho.trace().re;
        Ok(if tr > 0.0 { rho / C64::new(tr, 0.0) } else { rho })
    }

    fn bipartite_matrix(&self, a: &[usize], b: &[usize]) -> CMatrix {
        let d = self.d;
        let rows = d.pow(a.len() as u32);
        let cols = d.pow(b.len() as u32);
        let mut m = CMatrix::zeros(rows, cols);
        for (idx, amp) in self.amps.iter().enumerate() {
            let r = a.iter().fold(0, |acc, &s| acc * d + self.digit(idx, s));
            let c = b.iter().fold(0, |acc, &s| acc * d + self.digit(idx, s));
            m[(r, c)] = *amp;
        }
        m
    }

    /// Schmidt spectrum across `region` / complement (normalised).
    pub fn entanglement_spectrum(&self, region: &[usize]) -> Result<Vec<f64>> {
        self.check_sites(region)?;
        let rest: Vec<usize> = (0..self.n).filter(|s| !region.contains(s)).collect();
        let m = self.bipartite_matrix(region, &rest);
        let rho = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
        let eig = SymmetricEigen::new(rho);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = vals.iter().sum();
        if total > 0.0 {
            for v in &mut vals {
                *v /= total;
            }
        }
        Ok(vals)
    }

    /// Renyi entropy `S_n(region)` in bits; `order == 1` is von Neumann.
    pub fn renyi_entropy(&self, region: &[usize], order: f64) -> Result<f64> {
        if !(order > 0.0) || !order.is_finite() {
            return Err(Error::InvalidParameter(format!("Renyi order {order} must be positive")));
        }
        let spectrum = self.entanglement_spectrum(region)?;
        if (order - 1.0).abs() < 1e-12 {
            Ok(-spectrum.iter().filter(|&&l| l > 1e-300).map(|&l| l * l.log2()).sum::<f64>())
        } else {
            let s: f64 = spectrum.iter().filter(|&&l| l > 0.0).map(|&l| l.powf(order)).sum();
            Ok(s.log2() / (1.0 - order))
        }
    }

    /// `<psi|^{⊗Q} X |psi>^{⊗Q}` where `X` permutes the replicas of site `x`
    /// by `perms[x]`: replica `r` of the ket is matched with replica
    /// `perms[x][r]` of the bra. The state is used as given (unnormalised
    /// states are allowed).
    pub fn permutation_trace(&self, perms: &[Vec<usize>]) -> Result<C64> {
        if perms.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: perms.len() });
        }
        let q = perms.first().map_or(0, |p| p.len());
        for p in perms {
            let mut seen = vec![false; q];
            if p.len() != q || p.iter().any(|&v| v >= q || std::mem::replace(&mut seen[v], true)) {
                return Err(Error::InvalidParameter("perms must be permutations of equal degree".into()));
            }
        }
        let len = self.amps.len();
        let work = (len as f64).powi(q as i32);
        if work > 1e8 {
            return Err(Error::GuardExceeded(format!("{work:.0} replica configurations")));
        }
        let digits: Vec<Vec<usize>> = (0..len).map(|i| (0..self.n).map(|s| self.digit(i, s)).collect()).collect();
        let strides: Vec<usize> = (0..self.n).map(|s| self.stride(s)).collect();
        let mut conf = vec![0usize; q];
        let mut total = C64::new(0.0, 0.0);
        loop {
            let mut term = C64::new(1.0, 0.0);
            for r in 0..q {
                let mut t = 0;
                for x in 0..self.n {
                    t += digits[conf[perms[x][r]]][x] * strides[x];
                }
                term *= self.amps[conf[r]] * self.amps[t].conj();
                if term.norm_sqr() == 0.0 {
                    break;
                }
            }
            total += term;
            let mut k = 0;
            loop {
                if k == q {
                    return Ok(total);
                }
                conf[k] += 1;
                if conf[k] < len {
                    break;
                }
                conf[k] = 0;
                k += 1;
            }
        }
    }
}
