use rand::Rng;

use super::clifford::CliffordGate;
use super::pauli::{anticommutes, mul_into, Pauli, PauliString};
use crate::gf2::{get_bit, set_bit, words_for, BitMatrix};
use crate::{Error, Result};

/// Outcome of a projective Pauli measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    /// +1 or -1.
    pub outcome: i8,
    pub deterministic: bool,
}

/// Stabilizer state given by `rank <= n` independent commuting generators.
///
/// Rows are bit-packed as `[x words | z words]`, one row per generator. A
/// rank-deficient generating set describes the mixed state
/// `2^-n * sum_{g in G} g`, whose entropy is `n - rank` bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerState {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    signs: Vec<bool>,
}

/// Copies with room for Gaussian elimination without touching the state.
struct Scratch {
    words: usize,
    rows: Vec<u64>,
    signs: Vec<bool>,
}

impl Scratch {
    #[inline]
    fn row_mul(&mut self, target: usize, source: usize) {
        row_mul(&mut self.rows, &mut self.signs, self.words, target, source);
    }
}

#[inline]
fn row_mul(rows: &mut [u64], signs: &mut [bool], words: usize, target: usize, source: usize) {
    debug_assert_ne!(target, source);
    let stride = 2 * words;
    let (t, s) = if target < source {
        let (a, b) = rows.split_at_mut(source * stride);
        (&mut a[target * stride..(target + 1) * stride], &b[..stride])
    } else {
        let (a, b) = rows.split_at_mut(target * stride);
        (&mut b[..stride], &a[source * stride..(source + 1) * stride])
    };
    let (tx, tz) = t.split_at_mut(words);
    let (sx, sz) = s.split_at(words);
    let ipow = mul_into(tx, tz, sx, sz) + 2 * signs[target] as u32 + 2 * signs[source] as u32;
    debug_assert_eq!(ipow % 2, 0, "generators must commute");
    signs[target] = ipow % 4 == 2;
}

impl StabilizerState {
    /// |0...0>, stabilized by `Z_i`.
    pub fn zero(n: usize) -> Self {
        let mut s = Self::maximally_mixed(n);
        for i in 0..n {
            s.push_row(&PauliString::single(n, i, Pauli::Z));
        }
        s
    }

    /// The maximally mixed state: no generators.
    pub fn maximally_mixed(n: usize) -> Self {
        StabilizerState { n, words: words_for(n), rows: Vec::new(), signs: Vec::new() }
    }

    /// Validates and wraps a generating set.
    pub fn from_generators(n: usize, generators: &[PauliString]) -> Result<Self> {
        let mut s = Self::maximally_mixed(n);
        for g in generators {
            if g.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: g.len() });
            }
            s.push_row(g);
        }
        s.validate()?;
        Ok(s)
    }

    fn push_row(&mut self, p: &PauliString) {
        self.rows.extend_from_slice(&p.x);
        self.rows.extend_from_slice(&p.z);
        self.signs.push(p.is_negative());
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.signs.len()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == self.n
    }

    /// Von Neumann (and every Renyi) entropy of the whole state, in bits.
    pub fn total_entropy(&self) -> usize {
        self.n - self.rank()
    }

    #[inline]
    fn stride(&self) -> usize {
        2 * self.words
    }

    #[inline]
    fn row_x(&self, r: usize) -> &[u64] {
        let s = self.stride();
        &self.rows[r * s..r * s + self.words]
    }

    #[inline]
    fn row_z(&self, r: usize) -> &[u64] {
        let s = self.stride();
        &self.rows[r * s + self.words..(r + 1) * s]
    }

    pub fn generator(&self, r: usize) -> PauliString {
        PauliString::from_words(self.n, self.row_x(r).to_vec(), self.row_z(r).to_vec(), self.signs[r])
    }

    pub fn generators(&self) -> Vec<PauliString> {
        (0..self.rank()).map(|r| self.generator(r)).collect()
    }

    /// Checks commutation, independence and absence of `-I`.
    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        for i in 0..r {
            for j in i + 1..r {
                if anticommutes(self.row_x(i), self.row_z(i), self.row_x(j), self.row_z(j)) {
                    return Err(Error::InvalidGenerators(format!("generators {i} and {j} anticommute")));
                }
            }
        }
        let mut m = BitMatrix::zeros(r, 2 * self.n);
        for i in 0..r {
            for q in 0..self.n {
                m.set(i, 2 * q, get_bit(self.row_x(i), q));
                m.set(i, 2 * q + 1, get_bit(self.row_z(i), q));
            }
        }
        if m.rank_in_place() != r {
            return Err(Error::InvalidGenerators("generators are linearly dependent".into()));
        }
        Ok(())
    }

    #[inline]
    fn debug_check(&self) {
        // Quadratic in the rank; only cheap enough for small states.
        #[cfg(debug_assertions)]
        if self.n <= 24 {
            self.validate().expect("stabilizer invariants violated");
        }
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n {
            Err(Error::SiteOutOfRange { site, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Conjugates every generator through `gate` acting on `sites`.
    pub fn apply_clifford(&mut self, gate: &CliffordGate, sites: &[usize]) -> Result<()> {
        if sites.len() != gate.arity() {
            return Err(Error::ArityMismatch { arity: gate.arity(), sites: sites.len() });
        }
        for &s in sites {
            self.check_site(s)?;
        }
        if sites.len() == 2 && sites[0] == sites[1] {
            return Err(Error::DuplicateSite(sites[0]));
        }
        let words = self.words;
        let stride = self.stride();
        for r in 0..self.rank() {
            let row = &mut self.rows[r * stride..(r + 1) * stride];
            let mut pattern = 0u8;
            for (k, &s) in sites.iter().enumerate() {
                pattern |= (get_bit(&row[..words], s) as u8) << (2 * k);
                pattern |= (get_bit(&row[words..], s) as u8) << (2 * k + 1);
            }
            if pattern == 0 {
                continue;
            }
            let (image, neg) = gate.lookup(pattern);
            for (k, &s) in sites.iter().enumerate() {
                set_bit(&mut row[..words], s, image >> (2 * k) & 1 == 1);
                set_bit(&mut row[words..], s, image >> (2 * k + 1) & 1 == 1);
            }
            self.signs[r] ^= neg;
        }
        self.debug_check();
        Ok(())
    }

    fn scratch(&self) -> Scratch {
        Scratch { words: self.words, rows: self.rows.clone(), signs: self.signs.clone() }
    }

    /// If `obs` (bits only) lies in the span of the generators, returns the
    /// sign `s` such that `s * |obs|` belongs to the stabilizer group.
    fn group_sign(&self, obs: &PauliString) -> Option<bool> {
        if obs.is_identity() {
            return Some(false);
        }
        let words = self.words;
        let stride = self.stride();
        let mut sc = self.scratch();
        let r = self.rank();
        // Residual starts at |obs| and is reduced by pivot rows; the product
        // of the rows used is accumulated with its phase.
        let mut res_x = obs.x.clone();
        let mut res_z = obs.z.clone();
        let mut acc_x = vec![0u64; words];
        let mut acc_z = vec![0u64; words];
        let mut acc_neg = false;
        let mut next = 0;
        for col in 0..2 * self.n {
            if res_x.iter().chain(&res_z).all(|&w| w == 0) {
                break;
            }
            let (off, bit) = if col < self.n { (0, col) } else { (words, col - self.n) };
            let w = off + (bit >> 6);
            let mask = 1u64 << (bit & 63);
            let pivot = (next..r).find(|&k| sc.rows[k * stride + w] & mask != 0);
            let res_has = if off == 0 { get_bit(&res_x, bit) } else { get_bit(&res_z, bit) };
            let Some(pivot) = pivot else {
                if res_has {
                    return None;
                }
                continue;
            };
            if pivot != next {
                for k in 0..stride {
                    sc.rows.swap(pivot * stride + k, next * stride + k);
                }
                sc.signs.swap(pivot, next);
            }
            for k in next + 1..r {
                if sc.rows[k * stride + w] & mask != 0 {
                    sc.row_mul(k, next);
                }
            }
            if res_has {
                let row = &sc.rows[next * stride..(next + 1) * stride];
                let (px, pz) = row.split_at(words);
                for k in 0..words {
                    res_x[k] ^= px[k];
                    res_z[k] ^= pz[k];
                }
                let ipow = mul_into(&mut acc_x, &mut acc_z, px, pz) + 2 * acc_neg as u32 + 2 * sc.signs[next] as u32;
                debug_assert_eq!(ipow % 2, 0);
                acc_neg = ipow % 4 == 2;
            }
            next += 1;
        }
        if res_x.iter().chain(&res_z).any(|&w| w != 0) {
            return None;
        }
        debug_assert!(acc_x == obs.x && acc_z == obs.z);
        Some(acc_neg)
    }

    /// `<obs>`: `+s` if `s*obs` is in the group up to the sign of `obs`, `0`
    /// if `obs` anticommutes with a generator or lies outside the group.
    pub fn expectation(&self, obs: &PauliString) -> Result<i8> {
        if obs.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: obs.len() });
        }
        if (0..self.rank()).any(|r| anticommutes(self.row_x(r), self.row_z(r), &obs.x, &obs.z)) {
            return Ok(0);
        }
        Ok(match self.group_sign(obs) {
            None => 0,
            Some(neg) => {
                if neg == obs.is_negative() {
                    1
                } else {
                    -1
                }
            }
        })
    }

    /// Projective measurement of a Hermitian Pauli string.
    ///
    /// Exactly one uniform variate is drawn from `rng` per call, whether or
    /// not the outcome is random, so that engines can replay each other.
    pub fn measure<R: Rng + ?Sized>(&mut self, obs: &PauliString, rng: &mut R) -> Result<Measurement> {
        if obs.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: obs.len() });
        }
        let u: f64 = rng.gen();
        let random_outcome: i8 = if u < 0.5 { 1 } else { -1 };
        let words = self.words;
        let stride = self.stride();
        let r = self.rank();
        let anti: Vec<usize> =
            (0..r).filter(|&k| anticommutes(self.row_x(k), self.row_z(k), &obs.x, &obs.z)).collect();
        if let Some((&pivot, rest)) = anti.split_first() {
            for &k in rest {
                row_mul(&mut self.rows, &mut self.signs, words, k, pivot);
            }
            let row = &mut self.rows[pivot * stride..(pivot + 1) * stride];
            row[..words].copy_from_slice(&obs.x);
            row[words..].copy_from_slice(&obs.z);
            // outcome * obs becomes a stabilizer
            self.signs[pivot] = obs.is_negative() ^ (random_outcome < 0);
            self.debug_check();
            return Ok(Measurement { outcome: random_outcome, deterministic: false });
        }
        match self.group_sign(obs) {
            Some(neg) => {
                let outcome = if neg == obs.is_negative() { 1 } else { -1 };
                Ok(Measurement { outcome, deterministic: true })
            }
            None => {
                let mut g = obs.clone();
                g.set_negative(obs.is_negative() ^ (random_outcome < 0));
                self.push_row(&g);
                self.debug_check();
                Ok(Measurement { outcome: random_outcome, deterministic: false })
            }
        }
    }

    /// Single-qubit `Z` measurement.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, site: usize, rng: &mut R) -> Result<Measurement> {
        self.check_site(site)?;
        self.measure(&PauliString::single(self.n, site, Pauli::Z), rng)
    }

    fn restricted_rank(&self, sites: &[usize]) -> usize {
        let r = self.rank();
        let mut m = BitMatrix::zeros(r, 2 * sites.len());
        for k in 0..r {
            let (x, z) = (self.row_x(k), self.row_z(k));
            let row = m.row_mut(k);
            for (j, &s) in sites.iter().enumerate() {
                if get_bit(x, s) {
                    set_bit(row, 2 * j, true);
                }
                if get_bit(z, s) {
                    set_bit(row, 2 * j + 1, true);
                }
            }
        }
        m.rank_in_place()
    }

    /// Entropy of the reduced state on `region`, in bits.
    ///
    /// With `G_B` the subgroup supported on a region `B`, `S_A = |A| - dim G_A`
    /// and `dim G_A = rank - rank(G restricted to the complement)`. For pure
    /// states this equals `rank(G restricted to A) - |A|`, which is evaluated on
    /// whichever side is smaller.
    pub fn entropy(&self, region: &[usize]) -> Result<usize> {
        let mut inside = vec![false; self.n];
        for &s in region {
            self.check_site(s)?;
            inside[s] = true;
        }
        let a: Vec<usize> = (0..self.n).filter(|&s| inside[s]).collect();
        let b: Vec<usize> = (0..self.n).filter(|&s| !inside[s]).collect();
        if a.is_empty() {
            return Ok(0);
        }
        if b.is_empty() {
            return Ok(self.total_entropy());
        }
        if self.is_pure() && a.len() <= b.len() {
            return Ok(self.restricted_rank(&a) - a.len());
        }
        Ok(a.len() + self.restricted_rank(&b) - self.rank())
    }

    /// Entropy of the contiguous block `start..end`.
    pub fn entropy_range(&self, start: usize, end: usize) -> Result<usize> {
        let region: Vec<usize> = (start..end).collect();
        self.entropy(&region)
    }

    /// Whether the two states have the same stabilizer group (signs included).
    pub fn same_state(&self, other: &StabilizerState) -> bool {
        self.n == other.n
            && self.rank() == other.rank()
            && other.generators().iter().all(|g| self.expectation(g) == Ok(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn bell() -> StabilizerState {
        let mut s = StabilizerState::zero(2);
        s.apply_clifford(&CliffordGate::hadamard(), &[0]).unwrap();
        s.apply_clifford(&CliffordGate::cnot(), &[0, 1]).unwrap();
        s
    }

    #[test]
    fn hadamard_maps_zero_to_plus() {
        let mut s = StabilizerState::zero(1);
        s.apply_clifford(&CliffordGate::hadamard(), &[0]).unwrap();
        assert_eq!(s.generators(), vec![p("+X")]);
    }

    #[test]
    fn cnot_on_z_generators() {
        let mut s = StabilizerState::zero(2);
        s.apply_clifford(&CliffordGate::cnot(), &[0, 1]).unwrap();
        assert_eq!(s.generators(), vec![p("ZI"), p("ZZ")]);
    }

    #[test]
    fn gate_site_errors() {
        let mut s = StabilizerState::zero(3);
        assert_eq!(
            s.apply_clifford(&CliffordGate::cnot(), &[0, 3]),
            Err(Error::SiteOutOfRange { site: 3, n: 3 })
        );
        assert_eq!(s.apply_clifford(&CliffordGate::cnot(), &[1, 1]), Err(Error::DuplicateSite(1)));
        assert!(matches!(s.apply_clifford(&CliffordGate::cnot(), &[1]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn gate_then_inverse_is_bit_exact() {
        let mut rng = stream(3, 0);
        let mut s = StabilizerState::zero(6);
        for q in 0..5 {
            let g = CliffordGate::sample_two_qubit(&mut rng);
            s.apply_clifford(&g, &[q, q + 1]).unwrap();
        }
        let before = s.clone();
        let g = CliffordGate::sample_two_qubit(&mut rng);
        s.apply_clifford(&g, &[4, 1]).unwrap();
        s.apply_clifford(&g.inverse(), &[4, 1]).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn measure_z_on_zero_is_deterministic() {
        let mut s = StabilizerState::zero(1);
        let m = s.measure_z(0, &mut stream(1, 0)).unwrap();
        assert_eq!(m, Measurement { outcome: 1, deterministic: true });
    }

    #[test]
    fn measure_z_on_plus_follows_born_rule() {
        let mut plus = StabilizerState::zero(1);
        plus.apply_clifford(&CliffordGate::hadamard(), &[0]).unwrap();
        let n = 10_000;
        let ups = (0..n)
            .filter(|&i| {
                let mut s = plus.clone();
                let m = s.measure_z(0, &mut stream(2024, i)).unwrap();
                assert!(!m.deterministic);
                m.outcome == 1
            })
            .count();
        let freq = ups as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn measurement_purifies_mixed_state() {
        let mut s = StabilizerState::maximally_mixed(1);
        assert_eq!(s.rank(), 0);
        let m = s.measure_z(0, &mut stream(4, 0)).unwrap();
        assert!(!m.deterministic);
        assert_eq!(s.rank(), 1);
        let again = s.measure_z(0, &mut stream(4, 1)).unwrap();
        assert_eq!(again, Measurement { outcome: m.outcome, deterministic: true });
    }

    #[test]
    fn expectation_values() {
        let zero = StabilizerState::zero(1);
        assert_eq!(zero.expectation(&p("Z")).unwrap(), 1);
        assert_eq!(zero.expectation(&p("-Z")).unwrap(), -1);
        assert_eq!(zero.expectation(&p("X")).unwrap(), 0);
        let b = bell();
        assert_eq!(b.expectation(&p("XX")).unwrap(), 1);
        assert_eq!(b.expectation(&p("YY")).unwrap(), -1);
        assert_eq!(b.expectation(&p("ZI")).unwrap(), 0);
    }

    #[test]
    fn zz_expectation_after_negative_outcome() {
        // |+>|+> : measuring ZZ is random; condition on the -1 branch.
        let mut base = StabilizerState::zero(2);
        base.apply_clifford(&CliffordGate::hadamard(), &[0]).unwrap();
        base.apply_clifford(&CliffordGate::hadamard(), &[1]).unwrap();
        let zz = p("ZZ");
        let mut seed = 0;
        loop {
            let mut s = base.clone();
            let m = s.measure(&zz, &mut stream(77, seed)).unwrap();
            if m.outcome == -1 {
                assert_eq!(s.expectation(&zz).unwrap(), -1);
                break;
            }
            seed += 1;
        }
    }

    #[test]
    fn bell_and_ghz_entropies() {
        let b = bell();
        assert_eq!(b.entropy(&[0]).unwrap(), 1);
        assert_eq!(b.entropy(&[1]).unwrap(), 1);
        let n = 7;
        let mut ghz = StabilizerState::zero(n);
        ghz.apply_clifford(&CliffordGate::hadamard(), &[0]).unwrap();
        for q in 0..n - 1 {
            ghz.apply_clifford(&CliffordGate::cnot(), &[q, q + 1]).unwrap();
        }
        for a in 0..n {
            for b in a + 1..=n {
                let expect = if b - a == n { 0 } else { 1 };
                assert_eq!(ghz.entropy_range(a, b).unwrap(), expect, "[{a},{b})");
            }
        }
    }

    #[test]
    fn entropy_edge_cases() {
        let mm = StabilizerState::maximally_mixed(5);
        assert_eq!(mm.entropy(&[]).unwrap(), 0);
        assert_eq!(mm.entropy(&[1, 3]).unwrap(), 2);
        assert_eq!(mm.entropy_range(0, 5).unwrap(), 5);
        let z = StabilizerState::zero(4);
        assert_eq!(z.entropy_range(0, 4).unwrap(), 0);
        assert!(z.entropy(&[4]).is_err());
    }

    #[test]
    fn mixed_state_entropy_with_partial_purification() {
        // Bell pair on (0,1) plus a maximally mixed third qubit.
        let s = StabilizerState::from_generators(3, &[p("XXI"), p("ZZI")]).unwrap();
        assert_eq!(s.total_entropy(), 1);
        assert_eq!(s.entropy(&[0]).unwrap(), 1);
        assert_eq!(s.entropy(&[0, 1]).unwrap(), 0);
        assert_eq!(s.entropy(&[2]).unwrap(), 1);
        assert_eq!(s.entropy(&[0, 2]).unwrap(), 2);
    }

    #[test]
    fn rejects_invalid_generators() {
        assert!(StabilizerState::from_generators(2, &[p("XI"), p("ZI")]).is_err());
        assert!(StabilizerState::from_generators(2, &[p("ZI"), p("ZI")]).is_err());
        assert!(StabilizerState::from_generators(2, &[p("-II")]).is_err());
    }
}
