use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use super::perm::{all_permutations, Permutation};
use super::weingarten::{weingarten_table, WeingartenTable};
use crate::{Error, Result};

/// Largest `Q` for which the triangle sum over `S_Q` is attempted.
pub const MAX_TRIANGLE_Q: usize = 6;

/// How a measured link is weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasuredWeight {
    /// `p·d`: the value produced by contracting a projective measurement
    /// between two permutation states.
    Literal,
    /// `p·d^Q`: the measured weight rescaled to the same order in `d` as an
    /// unmeasured identity link. Agrees with `Literal` at `Q = 1`.
    Normalized,
}

fn rat(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn check_prob(p: &BigRational) -> Result<()> {
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn same_degree(perms: &[&Permutation]) -> Result<usize> {
    let q = perms[0].degree();
    if let Some(g) = perms.iter().find(|g| g.degree() != q) {
        return Err(Error::ArityMismatch { arity: q, sites: g.degree() });
    }
    Ok(q)
}

/// Weight of a leg carrying `g₁` below and `g₂` above, measured with
/// probability `p`: `(1−p)·d^{C(g₁⁻¹g₂)} + p·d`.
pub fn link_weight(g1: &Permutation, g2: &Permutation, d: u64, p: &BigRational) -> Result<BigRational> {
    link_weight_with(g1, g2, d, p, MeasuredWeight::Literal)
}

pub fn link_weight_with(
    g1: &Permutation,
    g2: &Permutation,
    d: u64,
    p: &BigRational,
    measured: MeasuredWeight,
) -> Result<BigRational> {
    let q = same_degree(&[g1, g2])?;
    check_prob(p)?;
    let c = g1.left_divide(g2).cycle_count();
    Ok(link_weight_by_cycles(c, q, d, p, measured))
}

fn link_weight_by_cycles(c: usize, q: usize, d: u64, p: &BigRational, measured: MeasuredWeight) -> BigRational {
    let db = BigInt::from(d);
    let m = match measured {
        MeasuredWeight::Literal => db.clone(),
        MeasuredWeight::Normalized => Pow::pow(&db, q as u32),
    };
    (BigRational::one() - p) * rat(Pow::pow(&db, c as u32)) + p * rat(m)
}

/// Reusable evaluator for down-triangle weights at fixed `(Q, d, p)`.
pub struct TriangleWeights {
    q: usize,
    perms: Vec<Permutation>,
    wg: WeingartenTable,
    link_by_cycles: Vec<BigRational>,
}

impl TriangleWeights {
    pub fn new(q: usize, d: u64, p: &BigRational, measured: MeasuredWeight) -> Result<Self> {
        if q == 0 || q > MAX_TRIANGLE_Q {
            return Err(Error::GuardExceeded(format!("triangle weight needs 1 <= Q <= {MAX_TRIANGLE_Q}, got {q}")));
        }
        check_prob(p)?;
        let wg = weingarten_table(q, d * d)?;
        let link_by_cycles = (0..=q).map(|c| link_weight_by_cycles(c, q, d, p, measured)).collect();
        Ok(TriangleWeights { q, perms: all_permutations(q), wg, link_by_cycles })
    }

    /// `J = Σ_{g_l} W_p(gᵢ⁻¹g_l) W_p(gⱼ⁻¹g_l) Wg_{d²}(g_l⁻¹g_k)`.
    pub fn weight(&self, gi: &Permutation, gj: &Permutation, gk: &Permutation) -> Result<BigRational> {
        let q = same_degree(&[gi, gj, gk])?;
        if q != self.q {
            return Err(Error::ArityMismatch { arity: self.q, sites: q });
        }
        let mut total = BigRational::zero();
        for gl in &self.perms {
            let wg = self.wg.get(&gl.left_divide(gk));
            let a = &self.link_by_cycles[gi.left_divide(gl).cycle_count()];
            let b = &self.link_by_cycles[gj.left_divide(gl).cycle_count()];
            total += a * b * wg;
        }
        Ok(total)
    }

    /// Largest relative deviation of `J(gᵢ,gⱼ;e)` from the factorised
    /// percolation weight `((1−p)δ_{gᵢ,e}+p)((1−p)δ_{gⱼ,e}+p)` over all
    /// `gᵢ, gⱼ` (the weight is left-invariant, so `g_k = e` is general).
    pub fn factorization_deviation(&self, p: &BigRational) -> Result<BigRational> {
        let e = Permutation::identity(self.q);
        let one = BigRational::one();
        let pw = |g: &Permutation| if g.is_identity() { one.clone() } else { p.clone() };
        let mut worst = BigRational::zero();
        for gi in &self.perms {
            for gj in &self.perms {
                let target = pw(gi) * pw(gj);
                let j = self.weight(gi, gj, &e)?;
                let dev = if target.is_zero() {
                    if j.is_zero() { BigRational::zero() } else { j.abs() }
                } else {
                    ((j - &target) / &target).abs()
                };
                if dev > worst {
                    worst = dev;
                }
            }
        }
        Ok(worst)
    }
}

/// One-shot triangle weight with the literal measured-link convention.
pub fn triangle_weight(
    gi: &Permutation,
    gj: &Permutation,
    gk: &Permutation,
    d: u64,
    p: &BigRational,
) -> Result<BigRational> {
    let q = same_degree(&[gi, gj, gk])?;
    TriangleWeights::new(q, d, p, MeasuredWeight::Literal)?.weight(gi, gj, gk)
}

/// Simple undirected graph for the Potts/FK comparison.
#[derive(Clone, Debug)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// `rows × cols` open grid.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let at = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((at(r, c), at(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((at(r, c), at(r + 1, c)));
                }
            }
        }
        Graph { vertices: rows * cols, edges }
    }
}

const MAX_POTTS_CONFIGS: f64 = 1e7;

/// `Σ_{g ∈ S_Q^V} Π_edges ((1−p)δ_{g_a,g_b} + p)` by enumeration.
pub fn potts_partition_function(graph: &Graph, q: usize, p: &BigRational) -> Result<BigRational> {
    check_prob(p)?;
    let states = super::perm::factorial(q);
    let configs = (states as f64).powi(graph.vertices as i32);
    if configs > MAX_POTTS_CONFIGS {
        return Err(Error::GuardExceeded(format!("{configs:.0} spin configurations")));
    }
    let same = BigRational::one();
    let mut conf = vec![0usize; graph.vertices];
    let mut total = BigRational::zero();
    loop {
        let mut w = BigRational::one();
        for &(a, b) in &graph.edges {
            if conf[a] != conf[b] {
                w *= p;
            } else {
                w *= &same;
            }
        }
        total += w;
        let mut k = 0;
        loop {
            if k == graph.vertices {
                return Ok(total);
            }
            conf[k] += 1;
            if conf[k] < states {
                break;
            }
            conf[k] = 0;
            k += 1;
        }
    }
}

/// Fortuin–Kasteleyn form `Σ_{bond sets} (1−p)^{|occupied|} p^{|empty|} (Q!)^{#clusters}`.
pub fn fk_partition_function(graph: &Graph, q: usize, p: &BigRational) -> Result<BigRational> {
    check_prob(p)?;
    if graph.edges.len() > 24 {
        return Err(Error::GuardExceeded(format!("{} edges", graph.edges.len())));
    }
    let states = rat(super::perm::factorial(q));
    let one_minus = BigRational::one() - p;
    let mut total = BigRational::zero();
    for mask in 0u32..(1 << graph.edges.len()) {
        let mut parent: Vec<usize> = (0..graph.vertices).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut clusters = graph.vertices;
        let mut occupied = 0;
        for (i, &(a, b)) in graph.edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                occupied += 1;
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                    clusters -= 1;
                }
            }
        }
        let empty = graph.edges.len() - occupied;
        total += Pow::pow(&one_minus, occupied as u32) * Pow::pow(p, empty as u32) * Pow::pow(&states, clusters as u32);
    }
    Ok(total)
}
