//! Operator spreading in random brickwork circuits.
//!
//! The right endpoint of a Heisenberg-evolved Pauli string performs a biased
//! walk: a brick covering `(x, x+1)` leaves the identity on `x+1` with
//! probability `p_stay = (d²−1)/(d⁴−1)`, and a brick covering `(x−1, x)`
//! leaves the identity on `x` with the same probability. Each half-layer the
//! front therefore moves one half-brick right with probability `1 − p_stay`
//! and one half-brick left otherwise, giving mean `v_B t` and variance
//! `2 D t` in half-layers.
//!
//! Layer `t` has bricks on bonds `(b, b+1)` with `b ≡ t (mod 2)`; open
//! boundaries, so site 0 idles on odd layers. A front reaching `L−1` is
//! absorbed there.

use num_rational::Ratio;
use rand::Rng;

use crate::parallel::map_indexed;
use crate::rng::stream;
use crate::stab::random_two_qubit_clifford;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontParams {
    pub d: u64,
    pub p_stay: f64,
    pub v_b: f64,
    pub d_front: f64,
}

/// The same parameters as exact rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactFrontParams {
    pub p_stay: Ratio<i128>,
    pub v_b: Ratio<i128>,
    pub d_front: Ratio<i128>,
}

pub fn front_params_exact(d: u64) -> Result<ExactFrontParams> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("local dimension {d} < 2")));
    }
    if d > 100_000 {
        return Err(Error::InvalidParameter(format!("local dimension {d} too large for exact arithmetic")));
    }
    let d2 = (d as i128) * (d as i128);
    let one = Ratio::from_integer(1);
    let p_stay = Ratio::new(d2 - 1, d2 * d2 - 1);
    Ok(ExactFrontParams {
        p_stay,
        v_b: Ratio::new(d2 - 1, d2 + 1),
        d_front: Ratio::new(2 * d2, (1 + d2) * (1 + d2)),
    })
    .inspect(|e: &ExactFrontParams| debug_assert_eq!(e.v_b, one - p_stay * 2))
}

pub fn front_params(d: u64) -> Result<FrontParams> {
    let e = front_params_exact(d)?;
    let f = |r: Ratio<i128>| *r.numer() as f64 / *r.denom() as f64;
    Ok(FrontParams { d, p_stay: f(e.p_stay), v_b: f(e.v_b), d_front: f(e.d_front) })
}

/// Distribution of the front over sites `0..L` after `t` half-layers.
#[derive(Clone, Debug, PartialEq)]
pub struct RightWeightProfile {
    pub rho: Vec<f64>,
    pub t: usize,
}

impl RightWeightProfile {
    /// All weight on site `x` at time 0.
    pub fn delta(len: usize, x: usize) -> Result<Self> {
        if x >= len {
            return Err(Error::SiteOutOfRange { site: x, n: len });
        }
        let mut rho = vec![0.0; len];
        rho[x] = 1.0;
        Ok(RightWeightProfile { rho, t: 0 })
    }

    pub fn mass(&self) -> f64 {
        self.rho.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.rho.iter().enumerate().map(|(x, r)| x as f64 * r).sum::<f64>() / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.rho.iter().enumerate().map(|(x, r)| (x as f64 - m).powi(2) * r).sum::<f64>() / self.mass()
    }

    /// Weight absorbed at the right boundary.
    pub fn absorbed(&self) -> f64 {
        *self.rho.last().unwrap_or(&0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cover {
    Left,
    Right,
    Idle,
}

fn cover(x: usize, len: usize, t: usize) -> Cover {
    if x + 1 == len {
        Cover::Idle
    } else if x % 2 == t % 2 {
        Cover::Left
    } else if x >= 1 {
        Cover::Right
    } else {
        Cover::Idle
    }
}

/// Exact evolution of the front distribution by `steps` half-layers.
pub fn evolve_front(profile: &RightWeightProfile, d: u64, steps: usize) -> Result<RightWeightProfile> {
    let p = front_params(d)?.p_stay;
    let len = profile.rho.len();
    if len < 2 {
        return Err(Error::InvalidParameter("front lattice needs at least 2 sites".into()));
    }
    let mut rho = profile.rho.clone();
    let mut next = vec![0.0; len];
    for t in profile.t..profile.t + steps {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (x, &r) in rho.iter().enumerate() {
            if r == 0.0 {
                continue;
            }
            match cover(x, len, t) {
                Cover::Left => {
                    next[x + 1] += (1.0 - p) * r;
                    next[x] += p * r;
                }
                Cover::Right => {
                    next[x] += (1.0 - p) * r;
                    next[x - 1] += p * r;
                }
                Cover::Idle => next[x] += r,
            }
        }
        std::mem::swap(&mut rho, &mut next);
    }
    Ok(RightWeightProfile { rho, t: profile.t + steps })
}

/// One sampled realisation of the front walk, returning the final site.
pub fn sample_front<R: Rng + ?Sized>(len: usize, start: usize, d: u64, steps: usize, rng: &mut R) -> Result<usize> {
    let p = front_params(d)?.p_stay;
    if start >= len {
        return Err(Error::SiteOutOfRange { site: start, n: len });
    }
    let mut x = start;
    for t in 0..steps {
        let stay = rng.gen::<f64>() < p;
        match cover(x, len, t) {
            Cover::Left if !stay => x += 1,
            Cover::Right if stay => x -= 1,
            _ => {}
        }
    }
    Ok(x)
}

/// Empirical right-weight distributions of `Z_0` evolved through random
/// two-qubit Clifford brickwork circuits.
///
/// Entry `[t][x]` is the fraction of circuits whose evolved string has its
/// rightmost non-identity site at `x` after `t` half-layers.
pub fn clifford_right_weight(
    len: usize,
    depth: usize,
    n_circuits: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<Vec<f64>>> {
    if len < 2 {
        return Err(Error::InvalidParameter("need at least 2 qubits".into()));
    }
    if n_circuits == 0 {
        return Err(Error::InsufficientStatistics("no circuits requested".into()));
    }
    let ends = map_indexed(n_circuits, workers, |i| {
        let mut rng = stream(seed, i as u64);
        // local pattern per site: x | z << 1
        let mut string = vec![0u8; len];
        string[0] = 0b10;
        let mut right = 0usize;
        let mut out = Vec::with_capacity(depth + 1);
        out.push(right);
        for t in 0..depth {
            let mut b = t % 2;
            while b + 1 < len && b <= right {
                let gate = random_two_qubit_clifford(&mut rng);
                let pattern = string[b] | string[b + 1] << 2;
                let (image, _) = gate.lookup(pattern);
                string[b] = image & 0b11;
                string[b + 1] = image >> 2;
                b += 2;
            }
            right = (right + 1).min(len - 1);
            while right > 0 && string[right] == 0 {
                right -= 1;
            }
            out.push(right);
        }
        out
    });
    let mut counts = vec![vec![0u64; len]; depth + 1];
    for e in &ends {
        for (t, &x) in e.iter().enumerate() {
            counts[t][x] += 1;
        }
    }
    let n = n_circuits as f64;
    Ok(counts.into_iter().map(|row| row.into_iter().map(|c| c as f64 / n).collect()).collect())
}

/// Mean and variance of a distribution over sites.
pub fn moments(rho: &[f64]) -> (f64, f64) {
    let mass: f64 = rho.iter().sum();
    let mean = rho.iter().enumerate().map(|(x, r)| x as f64 * r).sum::<f64>() / mass;
    let var = rho.iter().enumerate().map(|(x, r)| (x as f64 - mean).powi(2) * r).sum::<f64>() / mass;
    (mean, var)
}
