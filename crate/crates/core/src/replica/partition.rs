use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rand::Rng;

use super::perm::{all_permutations, factorial, Permutation};
use super::weights::link_weight;
use super::weingarten::weingarten_table;
use crate::dense::{DenseGate, DenseState};
use crate::parallel::map_indexed;
use crate::rng::stream;
use crate::stats::mean_sem;
use crate::{Error, Result};

pub const MAX_FREE_SPINS: usize = 12;
const MAX_CONFIGS: f64 = 2e6;

/// A few two-site gates on a chain, applied in order to `|0…0⟩`. Gate `k`
/// acts on sites `(bricks[k], bricks[k]+1)`. After each gate, each of its two
/// output legs is measured in the computational basis with probability `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TinyCircuit {
    sites: usize,
    local_dim: usize,
    bricks: Vec<usize>,
}

/// Leg of the averaged circuit, joining the output spin `from` of one gate to
/// the input spin `to` of the next gate on that site (`None` = top boundary).
#[derive(Clone, Copy, Debug)]
struct Leg {
    from: usize,
    to: Option<usize>,
    site: usize,
}

impl TinyCircuit {
    pub fn new(sites: usize, local_dim: usize, bricks: Vec<usize>) -> Result<Self> {
        if local_dim < 2 {
            return Err(Error::InvalidParameter(format!("local dimension {local_dim} < 2")));
        }
        if let Some(&b) = bricks.iter().find(|&&b| b + 1 >= sites) {
            return Err(Error::SiteOutOfRange { site: b + 1, n: sites });
        }
        Ok(TinyCircuit { sites, local_dim, bricks })
    }

    /// Two layers of brickwork on `sites` sites, truncated to `gates` gates.
    pub fn brickwork(sites: usize, local_dim: usize, gates: usize) -> Result<Self> {
        let mut bricks = Vec::new();
        let mut t = 0;
        while bricks.len() < gates {
            let before = bricks.len();
            let mut x = t % 2;
            while x + 1 < sites && bricks.len() < gates {
                bricks.push(x);
                x += 2;
            }
            if bricks.len() == before && t > 1 {
                return Err(Error::InvalidParameter(format!("no bricks fit on {sites} sites")));
            }
            t += 1;
        }
        TinyCircuit::new(sites, local_dim, bricks)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn bricks(&self) -> &[usize] {
        &self.bricks
    }

    pub fn free_spins(&self) -> usize {
        2 * self.bricks.len()
    }

    fn legs(&self) -> Vec<Leg> {
        let mut last: Vec<Option<usize>> = vec![None; self.sites];
        let mut legs = Vec::new();
        for (k, &x) in self.bricks.iter().enumerate() {
            for site in [x, x + 1] {
                if let Some(prev) = last[site] {
                    legs.push(Leg { from: prev, to: Some(k), site });
                }
                last[site] = Some(k);
            }
        }
        for (site, l) in last.iter().enumerate() {
            if let Some(k) = l {
                legs.push(Leg { from: *k, to: None, site });
            }
        }
        legs
    }

    /// Number of legs that can carry a measurement.
    pub fn measurable_legs(&self) -> usize {
        self.legs().len()
    }
}

fn check_boundary(circuit: &TinyCircuit, q: usize, boundary: &[Permutation]) -> Result<()> {
    if boundary.len() != circuit.sites {
        return Err(Error::LengthMismatch { expected: circuit.sites, got: boundary.len() });
    }
    if let Some(g) = boundary.iter().find(|g| g.degree() != q) {
        return Err(Error::ArityMismatch { arity: q, sites: g.degree() });
    }
    Ok(())
}

/// Exact `Z = 𝔼 Σ_m tr[(⊗_x g_x) ρ̃_m^{⊗Q}]` for Haar gates, as the sum over
/// one input spin `τ` and one output spin `σ` per gate of
/// `Π_gates Wg_{d²}(σ⁻¹τ) · Π_legs W_p(σ⁻¹τ') · Π_top W_p(g_x⁻¹σ)`.
pub fn exact_partition_function(
    circuit: &TinyCircuit,
    q: usize,
    p: &BigRational,
    boundary: &[Permutation],
) -> Result<BigRational> {
    check_boundary(circuit, q, boundary)?;
    let spins = circuit.free_spins();
    let perms = all_permutations(q);
    let states = perms.len();
    let configs = (states as f64).powi(spins as i32);
    if spins > MAX_FREE_SPINS || configs > MAX_CONFIGS {
        return Err(Error::GuardExceeded(format!("{spins} free spins, {configs:.0} configurations")));
    }
    let d = circuit.local_dim as u64;
    let wg = weingarten_table(q, d * d)?;
    let pair = |f: &dyn Fn(&Permutation, &Permutation) -> Result<BigRational>| -> Result<Vec<Vec<BigRational>>> {
        perms.iter().map(|a| perms.iter().map(|b| f(a, b)).collect()).collect()
    };
    let gate_w = pair(&|s, t| Ok(wg.get(&s.left_divide(t)).clone()))?;
    let link_w = pair(&|s, t| link_weight(s, t, d, p))?;
    let legs = circuit.legs();
    let top_w: Vec<Vec<BigRational>> = boundary
        .iter()
        .map(|g| perms.iter().map(|s| link_weight(g, s, d, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let gates = circuit.bricks.len();
    // Spin 2k is τ_k, spin 2k+1 is σ_k.
    let mut conf = vec![0usize; spins];
    let mut total = BigRational::zero();
    loop {
        let mut w = BigRational::one();
        for k in 0..gates {
            w *= &gate_w[conf[2 * k + 1]][conf[2 * k]];
        }
        for leg in &legs {
            let s = conf[2 * leg.from + 1];
            match leg.to {
                Some(k) => w *= &link_w[s][conf[2 * k]],
                None => w *= &top_w[leg.site][s],
            }
        }
        total += w;
        let mut i = 0;
        loop {
            if i == spins {
                return Ok(total);
            }
            conf[i] += 1;
            if conf[i] < states {
                break;
            }
            conf[i] = 0;
            i += 1;
        }
    }
}

/// `Z_A` with `g_swap` on the sites of `region` and `e` elsewhere, and `Z_0`
/// with `e` everywhere.
pub fn boundary_pair(
    circuit: &TinyCircuit,
    q: usize,
    p: &BigRational,
    region: &[usize],
    g_swap: &Permutation,
) -> Result<(BigRational, BigRational)> {
    let e = Permutation::identity(q);
    let boundary: Vec<Permutation> =
        (0..circuit.sites).map(|x| if region.contains(&x) { g_swap.clone() } else { e.clone() }).collect();
    let za = exact_partition_function(circuit, q, p, &boundary)?;
    let z0 = exact_partition_function(circuit, q, p, &vec![e; circuit.sites])?;
    Ok((za, z0))
}

/// Value of `Z` when every leg is measured: each gate averages to
/// `Q!/Π_{i<Q}(d²+i)` and each leg contributes `d`, whatever the boundary.
pub fn fully_measured_closed_form(circuit: &TinyCircuit, q: usize) -> BigRational {
    let d = BigInt::from(circuit.local_dim);
    let dd = &d * &d;
    let denom: BigInt = (0..q).map(|i| &dd + BigInt::from(i)).product();
    let gate = BigRational::new(BigInt::from(factorial(q)), denom);
    Pow::pow(&gate, circuit.bricks.len() as u32) * BigRational::from_integer(Pow::pow(&d, circuit.measurable_legs() as u32))
}

/// Haar Monte Carlo estimate of the same `Z`: each sample draws the gates
/// and the measured legs, then sums `tr[(⊗g_x) ρ̃_m^{⊗Q}]` over every
/// measurement record `m` of unnormalised branches. Returns `(mean, sem)`.
pub fn haar_monte_carlo(
    circuit: &TinyCircuit,
    q: usize,
    p: f64,
    boundary: &[Permutation],
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<(f64, f64)> {
    check_boundary(circuit, q, boundary)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    if samples < 2 {
        return Err(Error::InsufficientStatistics("need at least two samples".into()));
    }
    let images: Vec<Vec<usize>> = boundary.iter().map(|g| g.images().to_vec()).collect();
    let values = map_indexed(samples, workers, |i| -> Result<f64> {
        let mut rng = stream(seed, i as u64);
        let mut ops = Vec::new();
        for &x in &circuit.bricks {
            ops.push(Op::Gate(DenseGate::haar(2, circuit.local_dim, &mut rng)?, x));
            for site in [x, x + 1] {
                if rng.gen::<f64>() < p {
                    ops.push(Op::Measure(site));
                }
            }
        }
        let state = DenseState::zero(circuit.sites, circuit.local_dim)?;
        branch_sum(state, &ops, &images)
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    Ok(mean_sem(&values))
}

enum Op {
    Gate(DenseGate, usize),
    Measure(usize),
}

fn branch_sum(mut state: DenseState, ops: &[Op], images: &[Vec<usize>]) -> Result<f64> {
    for (i, op) in ops.iter().enumerate() {
        match op {
            Op::Gate(g, x) => state.apply(g, &[*x, *x + 1])?,
            Op::Measure(site) => {
                let mut total = 0.0;
                for k in 0..state.local_dim() {
                    let mut branch = state.clone();
                    if branch.project(*site, k)? > 0.0 {
                        total += branch_sum(branch, &ops[i + 1..], images)?;
                    }
                }
                return Ok(total);
            }
        }
    }
    Ok(state.permutation_trace(images)?.re)
}
