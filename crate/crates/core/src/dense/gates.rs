use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{CMatrix, C64};
use crate::stab::{CliffordGate, Pauli, PauliString};
use crate::{Error, Result};

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// the triangular factor's diagonal absorbed into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Unitary acting on one or two sites of local dimension `local_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseGate {
    arity: usize,
    local_dim: usize,
    matrix: CMatrix,
}

impl DenseGate {
    pub fn new(arity: usize, local_dim: usize, matrix: CMatrix) -> Result<Self> {
        if !(arity == 1 || arity == 2) {
            return Err(Error::InvalidParameter(format!("gate arity {arity} not supported")));
        }
        let dim = local_dim.pow(arity as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DenseGate { arity, local_dim, matrix })
    }

    pub fn haar<R: Rng + ?Sized>(arity: usize, local_dim: usize, rng: &mut R) -> Result<Self> {
        let dim = local_dim.pow(arity as u32);
        Self::new(arity, local_dim, sample_haar_unitary(dim, rng))
    }

    /// Charge-conserving two-site gate on sites carrying qubit ⊗ qudit
    /// (local index `q * d_neutral + a`): independent Haar blocks on the
    /// total-charge 0, 1 and 2 sectors, of sizes `d²`, `2d²` and `d²`.
    pub fn u1_block<R: Rng + ?Sized>(d_neutral: usize, rng: &mut R) -> Result<Self> {
        if d_neutral == 0 {
            return Err(Error::InvalidParameter("d_neutral must be >= 1".into()));
        }
        let local = 2 * d_neutral;
        let dim = local * local;
        let charge = |idx: usize| (idx / local) / d_neutral + (idx % local) / d_neutral;
        let mut m = CMatrix::zeros(dim, dim);
        for q in 0..=2 {
            let sector: Vec<usize> = (0..dim).filter(|&i| charge(i) == q).collect();
            let block = sample_haar_unitary(sector.len(), rng);
            for (bi, &i) in sector.iter().enumerate() {
                for (bj, &j) in sector.iter().enumerate() {
                    m[(i, j)] = block[(bi, bj)];
                }
            }
        }
        Self::new(2, local, m)
    }

    pub fn from_clifford(gate: &CliffordGate) -> Self {
        Self::new(gate.arity(), 2, clifford_unitary(gate)).expect("Clifford matrix has gate dimensions")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `max |U†U - 1|`.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let n = prod.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

pub fn pauli_matrix(p: Pauli) -> CMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match p {
        Pauli::I => CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        Pauli::X => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Pauli::Y => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Pauli::Z => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

fn string_matrix(p: &PauliString) -> CMatrix {
    let mut m = pauli_matrix(p.get(0));
    for s in 1..p.len() {
        m = m.kronecker(&pauli_matrix(p.get(s)));
    }
    if p.is_negative() {
        m = -m;
    }
    m
}

/// Dense unitary (up to global phase) realising a Clifford tableau.
///
/// `U|0..0>` is the joint +1 eigenvector of the images of the `Z_k`, and
/// `U|x> = prod_k (U X_k U†)^{x_k} U|0..0>`.
pub fn clifford_unitary(gate: &CliffordGate) -> CMatrix {
    let k = gate.arity();
    let dim = 1usize << k;
    let images = gate.images();
    let mut proj = CMatrix::identity(dim, dim);
    for q in 0..k {
        let zi = string_matrix(&images[2 * q + 1]);
        proj = proj * (CMatrix::identity(dim, dim) + zi) * C64::new(0.5, 0.0);
    }
    let col = (0..dim)
        .max_by(|&a, &b| proj.column(a).norm().total_cmp(&proj.column(b).norm()))
        .expect("nonempty");
    let v = proj.column(col).into_owned();
    let v = &v / C64::new(v.norm(), 0.0);
    let mut u = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut w = v.clone();
        for q in 0..k {
            // site 0 is the most significant bit
            if (x >> (k - 1 - q)) & 1 == 1 {
                w = string_matrix(&images[2 * q]) * w;
            }
        }
        u.set_column(x, &w);
    }
    u
}
