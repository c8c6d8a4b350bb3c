//! Charge transport under U(1)-symmetric brickwork gates.
//!
//! Each gate averages the charge of its two sites. On bit-valued charges the
//! update is realised as a swap with probability 1/2, whose ensemble mean is
//! exactly the averaging rule. Time is counted in gate layers; layer `t`
//! carries gates on bonds `(b, b+1)` with `b ≡ t (mod 2)`.

use rand::Rng;

use crate::dense::{DenseGate, DenseState, C64};
use crate::parallel::map_indexed;
use crate::rng::stream;
use crate::stats::{linear_fit, Accumulator};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeConfig {
    pub occupation: Vec<bool>,
}

impl ChargeConfig {
    pub fn new(occupation: Vec<bool>) -> Self {
        ChargeConfig { occupation }
    }

    /// Sites `0..len/2` filled, the rest empty.
    pub fn domain_wall(len: usize) -> Self {
        ChargeConfig { occupation: (0..len).map(|x| x < len / 2).collect() }
    }

    pub fn len(&self) -> usize {
        self.occupation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupation.is_empty()
    }

    pub fn total_charge(&self) -> usize {
        self.occupation.iter().filter(|&&b| b).count()
    }

    /// Swaps the charges on `(x, x+1)` with probability 1/2. Always draws
    /// one random number.
    pub fn charge_step<R: Rng + ?Sized>(&mut self, x: usize, rng: &mut R) -> Result<()> {
        if x + 1 >= self.len() {
            return Err(Error::SiteOutOfRange { site: x + 1, n: self.len() });
        }
        if rng.gen::<bool>() {
            self.occupation.swap(x, x + 1);
        }
        Ok(())
    }

    /// One gate layer.
    pub fn layer<R: Rng + ?Sized>(&mut self, t: usize, rng: &mut R) {
        let mut b = t % 2;
        while b + 1 < self.len() {
            if rng.gen::<bool>() {
                self.occupation.swap(b, b + 1);
            }
            b += 2;
        }
    }
}

/// The deterministic averaging rule for one gate layer on a mean profile.
pub fn mean_field_layer(q: &mut [f64], t: usize) {
    let mut b = t % 2;
    while b + 1 < q.len() {
        let m = 0.5 * (q[b] + q[b + 1]);
        q[b] = m;
        q[b + 1] = m;
        b += 2;
    }
}

/// Infinite-lattice propagator of one charge from `x0` at layer 0 to `x`
/// after `t` layers. A gate leaves its charge uniformly on either of its two
/// sites, so only the left site `b` of the last brick matters; `b` takes
/// independent ±1 steps from layer to layer, giving a binomial law.
pub fn heat_kernel(x0: i64, x: i64, t: usize) -> f64 {
    if t == 0 {
        return if x == x0 { 1.0 } else { 0.0 };
    }
    let b0 = x0 - x0.rem_euclid(2);
    let steps = t as i64 - 1;
    // left site of the last brick has parity t - 1
    let b = if (x - steps).rem_euclid(2) == 0 { x } else { x - 1 };
    let shift = b - b0 + steps;
    if shift < 0 || shift % 2 != 0 || shift / 2 > steps {
        return 0.0;
    }
    0.5 * binomial_half(steps as u64, (shift / 2) as u64)
}

fn binomial_half(n: u64, k: u64) -> f64 {
    // exp(ln C(n,k) - n ln 2), via log-gamma-free summation
    let k = k.min(n - k);
    let mut ln = 0.0;
    for i in 0..k {
        ln += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    (ln - n as f64 * std::f64::consts::LN_2).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffusionProbe {
    /// Half-filled step; `Σ_x n(x)·2(x − x₀)` grows as `2 D t`.
    DomainWall,
    /// One charge on an empty chain; its squared displacement grows as `2 D t`.
    TaggedParticle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionFit {
    /// Sites² per gate layer.
    pub d_q: f64,
    pub stderr: f64,
    pub window: (usize, usize),
}

fn growth_series(len: usize, t_max: usize, probe: DiffusionProbe, rng: &mut impl Rng, times: &[usize]) -> Vec<f64> {
    let x0 = len as f64 / 2.0 - 0.5;
    let mut cfg = match probe {
        DiffusionProbe::DomainWall => ChargeConfig::domain_wall(len),
        DiffusionProbe::TaggedParticle => {
            let mut occ = vec![false; len];
            occ[len / 2] = true;
            ChargeConfig::new(occ)
        }
    };
    let total = cfg.total_charge();
    let measure = |c: &ChargeConfig| -> f64 {
        match probe {
            DiffusionProbe::DomainWall => {
                c.occupation.iter().enumerate().filter(|(_, &b)| b).map(|(x, _)| 2.0 * (x as f64 - x0)).sum()
            }
            DiffusionProbe::TaggedParticle => {
                let x = c.occupation.iter().position(|&b| b).expect("charge conserved");
                (x as f64 - (len / 2) as f64).powi(2)
            }
        }
    };
    let base = measure(&cfg);
    let mut out = Vec::with_capacity(times.len());
    let mut k = 0;
    for t in 0..=t_max {
        if k < times.len() && times[k] == t {
            out.push(measure(&cfg) - base);
            k += 1;
        }
        if t < t_max {
            cfg.layer(t, rng);
        }
    }
    assert_eq!(cfg.total_charge(), total, "charge conservation violated");
    out
}

/// Diffusion constant from `n_runs` independent runs. The growth of the
/// chosen probe is fitted linearly against `t` over `[t_max/10, t_max]`;
/// the standard error comes from the spread of per-run slopes.
pub fn fit_diffusion(
    len: usize,
    t_max: usize,
    n_runs: usize,
    seed: u64,
    probe: DiffusionProbe,
    workers: usize,
) -> Result<DiffusionFit> {
    if len < 8 || t_max < 10 {
        return Err(Error::InvalidParameter(format!("need L >= 8 and t_max >= 10 (got {len}, {t_max})")));
    }
    if n_runs < 2 {
        return Err(Error::InsufficientStatistics("need at least 2 runs".into()));
    }
    let lo = t_max / 10;
    let times: Vec<usize> = (0..=20).map(|k| lo + (t_max - lo) * k / 20).collect();
    let series = map_indexed(n_runs, workers, |i| growth_series(len, t_max, probe, &mut stream(seed, i as u64), &times));
    let ts: Vec<f64> = times.iter().map(|&t| t as f64).collect();
    let per_run: Accumulator = series.iter().filter_map(|s| linear_fit(&ts, s)).map(|f| f.slope / 2.0).collect();
    let d_q = per_run.mean();
    let stderr = per_run.sem();
    if !(d_q > 0.0) || stderr / d_q > 0.2 {
        return Err(Error::InsufficientStatistics(format!("D_q = {d_q} ± {stderr}")));
    }
    Ok(DiffusionFit { d_q, stderr, window: (lo, t_max) })
}

/// Empirical probability that `ell` sites around the central cut are all
/// equal in the product ensemble (each charge independently 0 or 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeadRegion {
    pub ell: usize,
    pub probability: f64,
    pub hits: u64,
    pub samples: u64,
}

pub fn dead_region_stats(len: usize, ells: &[usize], n_runs: u64, seed: u64) -> Result<Vec<DeadRegion>> {
    if let Some(&bad) = ells.iter().find(|&&l| l == 0 || l > len || l > 64) {
        return Err(Error::InvalidParameter(format!("region size {bad} outside 1..=min(L, 64)")));
    }
    let mut rng = stream(seed, 0);
    let mut hits = vec![0u64; ells.len()];
    for _ in 0..n_runs {
        let bits: u64 = rng.gen();
        for (h, &ell) in hits.iter_mut().zip(ells) {
            // the ell sites straddling the cut map to the low ell bits
            let mask = if ell == 64 { u64::MAX } else { (1u64 << ell) - 1 };
            let region = bits & mask;
            if region == 0 || region == mask {
                *h += 1;
            }
        }
    }
    Ok(ells
        .iter()
        .zip(hits)
        .map(|(&ell, h)| DeadRegion { ell, probability: h as f64 / n_runs as f64, hits: h, samples: n_runs })
        .collect())
}

/// Slope of `log₂ P` against `ℓ` over the entries with nonzero counts.
pub fn dead_region_slope(stats: &[DeadRegion]) -> Result<(f64, f64)> {
    let pts: Vec<&DeadRegion> = stats.iter().filter(|s| s.hits > 0).collect();
    let x: Vec<f64> = pts.iter().map(|s| s.ell as f64).collect();
    let y: Vec<f64> = pts.iter().map(|s| s.probability.log2()).collect();
    let w: Vec<f64> = pts.iter().map(|s| s.hits as f64).collect();
    let fit = crate::stats::weighted_linear_fit(&x, &y, &w)
        .ok_or_else(|| Error::InsufficientRange("need two region sizes with hits".into()))?;
    let ln2sq = std::f64::consts::LN_2.powi(2);
    // var(log2 P) ≈ 1/(hits ln²2)
    Ok((fit.slope, fit.slope_se / ln2sq.sqrt()))
}

/// Mean Renyi entropies at the half cut of a U(1) brickwork circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct RenyiProbe {
    pub t: Vec<usize>,
    pub s1: Vec<(f64, f64)>,
    pub s2: Vec<(f64, f64)>,
    /// Mean and standard error of `S₁ − S₂`.
    pub gap: Vec<(f64, f64)>,
    /// Whether `S₂ ≤ S₁` held at every time in every run.
    pub ordered: bool,
}

/// Exact evolution of `|+⟩^{⊗L}` under charge-conserving brickwork gates
/// (qubit ⊗ `d_neutral`-dimensional neutral space per site), measuring
/// `S₁` and `S₂` of the left half after every layer.
pub fn u1_renyi_probe(len: usize, d_neutral: usize, t_max: usize, n_runs: usize, seed: u64, workers: usize) -> Result<RenyiProbe> {
    if len < 2 || n_runs == 0 {
        return Err(Error::InvalidParameter("need L >= 2 and at least one run".into()));
    }
    let local = 2 * d_neutral;
    let probe = DenseState::zero(len, local)?;
    let half: Vec<usize> = (0..len / 2).collect();
    let runs = map_indexed(n_runs, workers, |i| -> Result<Vec<(f64, f64)>> {
        let mut rng = stream(seed, i as u64);
        let n = probe.amplitudes().len();
        // charge qubit in |+>, neutral qudit in |0>
        let amp = C64::new((0.5f64).powf(len as f64 / 2.0), 0.0);
        let amps: Vec<C64> = (0..n)
            .map(|idx| {
                let mut rest = idx;
                let mut ok = true;
                for _ in 0..len {
                    ok &= (rest % local).is_multiple_of(d_neutral);
                    rest /= local;
                }
                if ok {
                    amp
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut state = DenseState::from_amplitudes(len, local, amps)?;
        let mut out = Vec::with_capacity(t_max + 1);
        out.push((state.renyi_entropy(&half, 1.0)?, state.renyi_entropy(&half, 2.0)?));
        for t in 0..t_max {
            let mut b = t % 2;
            while b + 1 < len {
                state.apply(&DenseGate::u1_block(d_neutral, &mut rng)?, &[b, b + 1])?;
                b += 2;
            }
            out.push((state.renyi_entropy(&half, 1.0)?, state.renyi_entropy(&half, 2.0)?));
        }
        Ok(out)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut probe = RenyiProbe { t: (0..=t_max).collect(), s1: vec![], s2: vec![], gap: vec![], ordered: true };
    for t in 0..=t_max {
        let s1: Accumulator = runs.iter().map(|r| r[t].0).collect();
        let s2: Accumulator = runs.iter().map(|r| r[t].1).collect();
        let gap: Accumulator = runs.iter().map(|r| r[t].0 - r[t].1).collect();
        probe.ordered &= runs.iter().all(|r| r[t].1 <= r[t].0 + 1e-9);
        probe.s1.push((s1.mean(), s1.sem()));
        probe.s2.push((s2.mean(), s2.sem()));
        probe.gap.push((gap.mean(), gap.sem()));
    }
    Ok(probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_frequencies() {
        let mut rng = stream(1, 0);
        let n = 10_000;
        let mut swapped = 0;
        for _ in 0..n {
            let mut c = ChargeConfig::new(vec![true, false]);
            c.charge_step(0, &mut rng).unwrap();
            if !c.occupation[0] {
                swapped += 1;
            }
            let mut full = ChargeConfig::new(vec![true, true]);
            full.charge_step(0, &mut rng).unwrap();
            assert_eq!(full.occupation, vec![true, true]);
        }
        let f = swapped as f64 / n as f64;
        assert!((f - 0.5).abs() < 0.01, "{f}");
        assert!(ChargeConfig::new(vec![true, false]).charge_step(1, &mut rng).is_err());
    }

    #[test]
    fn mean_field_matches_heat_kernel() {
        let len = 64;
        let mut q: Vec<f64> = (0..len).map(|x| if x < len / 2 { 1.0 } else { 0.0 }).collect();
        for t in 0..24 {
            mean_field_layer(&mut q, t);
            let t1 = t + 1;
            for (x, &qx) in q.iter().enumerate() {
                let exact: f64 = (0..len as i64 / 2)
                    .chain(-40..0)
                    .map(|x0| heat_kernel(x0, x as i64, t1))
                    .sum();
                assert!((qx - exact).abs() < 1e-10, "t={t1} x={x}: {qx} vs {exact}");
            }
        }
    }

    #[test]
    fn heat_kernel_is_normalised() {
        for t in [0, 1, 5, 30] {
            let s: f64 = (-40..40).map(|x| heat_kernel(3, x, t)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stochastic_profile_matches_mean_field() {
        // 64 sites, 2 x 10^4 runs; Bonferroni-adjusted threshold for the
        // 64 x 16 simultaneous comparisons
        let len = 64;
        let t_max = 16;
        let runs = 20_000;
        let mut sums = vec![vec![0.0; len]; t_max + 1];
        let mut rng = stream(2, 0);
        for _ in 0..runs {
            let mut c = ChargeConfig::domain_wall(len);
            for t in 0..t_max {
                c.layer(t, &mut rng);
                for (x, &b) in c.occupation.iter().enumerate() {
                    sums[t + 1][x] += b as u8 as f64;
                }
            }
        }
        let mut q: Vec<f64> = (0..len).map(|x| if x < len / 2 { 1.0 } else { 0.0 }).collect();
        for t in 0..t_max {
            mean_field_layer(&mut q, t);
            for x in 0..len {
                let mean = sums[t + 1][x] / runs as f64;
                let sigma = (q[x] * (1.0 - q[x]) / runs as f64).sqrt();
                if sigma == 0.0 {
                    assert_eq!(mean, q[x]);
                } else {
                    assert!(((mean - q[x]) / sigma).abs() < 4.3, "t={} x={x}", t + 1);
                }
            }
        }
    }

    #[test]
    fn uniform_occupation_is_stationary() {
        let len = 64;
        let mut rng = stream(3, 0);
        let runs = 2000;
        let mut drift = Accumulator::new();
        for _ in 0..runs {
            let mut c = ChargeConfig::new((0..len).map(|_| rng.gen()).collect());
            let before = c.occupation.iter().enumerate().filter(|(_, &b)| b).map(|(x, _)| x as f64).sum::<f64>();
            for t in 0..50 {
                c.layer(t, &mut rng);
            }
            let after = c.occupation.iter().enumerate().filter(|(_, &b)| b).map(|(x, _)| x as f64).sum::<f64>();
            drift.push(after - before);
        }
        assert!(drift.mean().abs() < 3.0 * drift.sem());
    }

    #[test]
    fn detailed_balance_chi_square() {
        // L = 6, N = 3: all 20 configurations should be equally likely
        // after many layers from a fixed start.
        let len = 6;
        let mut counts = std::collections::HashMap::new();
        let mut rng = stream(4, 0);
        let samples = 40_000;
        for _ in 0..samples {
            let mut c = ChargeConfig::new(vec![true, true, true, false, false, false]);
            for t in 0..60 {
                c.layer(t, &mut rng);
            }
            *counts.entry(c.occupation.clone()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 20);
        let expect = samples as f64 / 20.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
        // 19 dof, p = 0.001 critical value
        assert!(chi2 < 43.8, "chi2 = {chi2}");
        let _ = len;
    }

    #[test]
    fn dead_region_exact_small_sizes() {
        let stats = dead_region_stats(32, &[1, 2, 3], 100_000, 5).unwrap();
        assert_eq!(stats[0].probability, 1.0);
        assert!((stats[1].probability - 0.5).abs() < 0.01);
        assert!((stats[2].probability - 0.25).abs() < 0.01);
        assert!(dead_region_stats(8, &[9], 10, 0).is_err());
    }

    #[test]
    fn u1_probe_starts_unentangled_and_stays_ordered() {
        let probe = u1_renyi_probe(6, 1, 6, 4, 9, 1).unwrap();
        assert!(probe.s1[0].0.abs() < 1e-9 && probe.s2[0].0.abs() < 1e-9);
        assert!(probe.ordered);
        assert!(probe.s1[6].0 > 0.5);
    }
}
