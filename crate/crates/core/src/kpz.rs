//! Minimal surface-growth model of entanglement.
//!
//! Heights `S(x)` live on the cuts between qubits. A gate on the bond at cut
//! `x` sets `S(x) ← max(S(x), min(S(x−1), S(x+1)) + 1)`, which keeps
//! `|S(x) − S(x+1)| ≤ 1` and never lowers a height.

use rand::Rng;

use crate::parallel::map_indexed;
use crate::rng::{stream, substream};
use crate::stats::{best_loglog_window, linear_fit, quantile, WindowFit};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// `L+1` cuts with `S(0) = S(L) = 0`.
    Pinned,
    /// `L` cuts on a ring.
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Uniformly random bond per update.
    RandomBond,
    /// Bonds in left-to-right order, no randomness.
    Sequential,
    /// Even bonds then odd bonds.
    Brickwork,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProfile {
    pub heights: Vec<u32>,
    pub boundary: Boundary,
    /// Sweeps elapsed.
    pub t: usize,
}

impl HeightProfile {
    pub fn flat(len: usize, boundary: Boundary) -> Self {
        let n = match boundary {
            Boundary::Pinned => len + 1,
            Boundary::Periodic => len,
        };
        HeightProfile { heights: vec![0; n], boundary, t: 0 }
    }

    /// Number of qubits `L`.
    pub fn len(&self) -> usize {
        match self.boundary {
            Boundary::Pinned => self.heights.len() - 1,
            Boundary::Periodic => self.heights.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cuts that can receive a gate.
    pub fn bonds(&self) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::Pinned => 1..self.len(),
            Boundary::Periodic => 0..self.len(),
        }
    }

    fn neighbours(&self, x: usize) -> (u32, u32) {
        let n = self.heights.len();
        match self.boundary {
            Boundary::Pinned => (self.heights[x - 1], self.heights[x + 1]),
            Boundary::Periodic => (
                self.heights[if x == 0 { n - 1 } else { x - 1 }],
                self.heights[if x + 1 == n { 0 } else { x + 1 }],
            ),
        }
    }

    /// Applies one gate at cut `x`.
    pub fn growth_step(&mut self, x: usize) -> Result<()> {
        if !self.bonds().contains(&x) {
            return Err(Error::SiteOutOfRange { site: x, n: self.heights.len() });
        }
        let (l, r) = self.neighbours(x);
        let m = l.min(r) + 1;
        if m > self.heights[x] {
            self.heights[x] = m;
        }
        Ok(())
    }

    pub fn satisfies_adjacency(&self) -> bool {
        let h = &self.heights;
        let wrap = self.boundary == Boundary::Periodic && h[0].abs_diff(h[h.len() - 1]) > 1;
        !wrap && h.windows(2).all(|w| w[0].abs_diff(w[1]) <= 1)
    }

    pub fn mean_height(&self) -> f64 {
        self.heights.iter().map(|&v| v as f64).sum::<f64>() / self.heights.len() as f64
    }

    /// Spatial variance of the heights.
    pub fn width_sq(&self) -> f64 {
        let m = self.mean_height();
        self.heights.iter().map(|&v| (v as f64 - m).powi(2)).sum::<f64>() / self.heights.len() as f64
    }

    /// `<(S(x+r) − S(x))²>` averaged over all available `x`.
    pub fn height_difference_moment(&self, r: usize) -> f64 {
        let h = &self.heights;
        let n = h.len();
        let pairs: Box<dyn Iterator<Item = (usize, usize)>> = match self.boundary {
            Boundary::Pinned => Box::new((0..n.saturating_sub(r)).map(move |x| (x, x + r))),
            Boundary::Periodic => Box::new((0..n).map(move |x| (x, (x + r) % n))),
        };
        let (mut sum, mut count) = (0.0, 0usize);
        for (a, b) in pairs {
            sum += (h[a] as f64 - h[b] as f64).powi(2);
            count += 1;
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KpzConfig {
    pub len: usize,
    pub sweeps: usize,
    pub placement: Placement,
    pub boundary: Boundary,
}

/// Runs the growth model from a flat profile, returning snapshots after the
/// sweep counts listed in `record` (sweep 0 is the initial profile).
pub fn simulate(cfg: &KpzConfig, seed: u64, record: &[usize]) -> Result<Vec<HeightProfile>> {
    simulate_run(cfg, seed, 0, record)
}

fn simulate_run(cfg: &KpzConfig, seed: u64, run: u64, record: &[usize]) -> Result<Vec<HeightProfile>> {
    if cfg.len < 4 {
        return Err(Error::InvalidParameter(format!("L = {} < 4", cfg.len)));
    }
    let mut record: Vec<usize> = record.iter().copied().filter(|&t| t <= cfg.sweeps).collect();
    record.sort_unstable();
    record.dedup();
    let mut rng = stream(seed, run);
    let mut prof = HeightProfile::flat(cfg.len, cfg.boundary);
    let mut out = Vec::with_capacity(record.len());
    let mut next = 0;
    let bonds = prof.bonds();
    let n = prof.heights.len();
    for t in 0..=cfg.sweeps {
        if next < record.len() && record[next] == t {
            prof.t = t;
            debug_assert!(prof.satisfies_adjacency());
            out.push(prof.clone());
            next += 1;
        }
        if t == cfg.sweeps || next == record.len() {
            if next == record.len() {
                break;
            }
            continue;
        }
        let h = &mut prof.heights;
        let mut update = |x: usize| {
            let l = h[if x == 0 { n - 1 } else { x - 1 }];
            let r = h[if x + 1 == n { 0 } else { x + 1 }];
            let m = l.min(r) + 1;
            if m > h[x] {
                h[x] = m;
            }
        };
        match cfg.placement {
            Placement::RandomBond => {
                for _ in 0..cfg.len {
                    update(rng.gen_range(bonds.clone()));
                }
            }
            Placement::Sequential => bonds.clone().for_each(&mut update),
            Placement::Brickwork => {
                bonds.clone().filter(|x| x % 2 == 0).for_each(&mut update);
                bonds.clone().filter(|x| x % 2 == 1).for_each(&mut update);
            }
        }
    }
    Ok(out)
}

/// Independent runs of [`simulate`], run `i` seeded from stream `i`.
pub fn simulate_ensemble(
    cfg: &KpzConfig,
    seed: u64,
    runs: usize,
    record: &[usize],
    workers: usize,
) -> Result<Vec<Vec<HeightProfile>>> {
    map_indexed(runs, workers, |i| simulate_run(cfg, seed, i as u64, record))
        .into_iter()
        .collect()
}

/// Log-spaced integer grid in `[lo, hi]`, about `per_decade` points per decade.
pub fn log_grid(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    let mut out = vec![];
    if lo == 0 || hi < lo {
        return out;
    }
    let steps = ((hi as f64 / lo as f64).log10() * per_decade as f64).ceil().max(1.0) as usize;
    for i in 0..=steps {
        let v = (lo as f64 * (hi as f64 / lo as f64).powf(i as f64 / steps as f64)).round() as usize;
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

/// An exponent from a log-log slope, with bootstrap interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub value: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    /// 95% percentile bootstrap interval over runs.
    pub ci: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KpzFit {
    pub beta: ExponentFit,
    pub alpha: ExponentFit,
    /// Mean height gained per sweep.
    pub v_e: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WidthMode {
    /// Standard deviation of `S(L/2, t)` over runs.
    Ensemble,
    /// Run-averaged spatial variance of the profile.
    Spatial,
}

const FIT_DECADES: f64 = 1.5;
const BOOTSTRAP: usize = 200;

fn widths(history: &[&Vec<HeightProfile>], mode: WidthMode) -> (Vec<f64>, Vec<f64>) {
    let n_t = history[0].len();
    let mut ts = vec![];
    let mut ws = vec![];
    for k in 0..n_t {
        let t = history[0][k].t as f64;
        let w2 = match mode {
            WidthMode::Ensemble => {
                let mid = history[0][k].len() / 2;
                let vals: Vec<f64> = history.iter().map(|run| run[k].heights[mid] as f64).collect();
                let m = vals.iter().sum::<f64>() / vals.len() as f64;
                vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len().max(2) - 1) as f64
            }
            WidthMode::Spatial => history.iter().map(|run| run[k].width_sq()).sum::<f64>() / history.len() as f64,
        };
        ts.push(t);
        ws.push(w2.sqrt());
    }
    (ts, ws)
}

fn check_history(history: &[Vec<HeightProfile>]) -> Result<()> {
    let Some(first) = history.first() else {
        return Err(Error::InsufficientStatistics("empty history".into()));
    };
    if history.iter().any(|run| run.len() != first.len() || run.iter().zip(first).any(|(a, b)| a.t != b.t)) {
        return Err(Error::InvalidParameter("runs must share snapshot times".into()));
    }
    Ok(())
}

/// Growth exponent from the log-log slope of the interface width against
/// time, fitted on the best 1.5-decade window. Times with zero width
/// (including `t = 0`) are skipped.
pub fn estimate_beta(history: &[Vec<HeightProfile>], mode: WidthMode, seed: u64) -> Result<ExponentFit> {
    check_history(history)?;
    if mode == WidthMode::Ensemble && history.len() < 2 {
        return Err(Error::InsufficientStatistics("ensemble width needs at least 2 runs".into()));
    }
    let all: Vec<&Vec<HeightProfile>> = history.iter().collect();
    let (ts, ws) = widths(&all, mode);
    let keep: Vec<usize> = (0..ts.len()).filter(|&i| ts[i] > 0.0 && ws[i] > 0.0).collect();
    let x: Vec<f64> = keep.iter().map(|&i| ts[i]).collect();
    let y: Vec<f64> = keep.iter().map(|&i| ws[i]).collect();
    let fit = best_loglog_window(&x, &y, FIT_DECADES)
        .ok_or_else(|| Error::InsufficientRange(format!("width data span less than {FIT_DECADES} decades")))?;
    let boots = bootstrap(history.len(), seed, |pick| {
        let sample: Vec<&Vec<HeightProfile>> = pick.iter().map(|&i| &history[i]).collect();
        let (_, bw) = widths(&sample, mode);
        slope_on(&keep, &fit, &x, &bw)
    });
    Ok(exponent(&fit, 1.0, &boots))
}

fn slope_on(keep: &[usize], fit: &WindowFit, x: &[f64], y_full: &[f64]) -> Option<f64> {
    let (lo, hi) = fit.span;
    let lx: Vec<f64> = x[lo..hi].iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = keep[lo..hi].iter().map(|&i| y_full[i]).collect();
    if ly.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let ly: Vec<f64> = ly.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).map(|f| f.slope)
}

fn bootstrap(n: usize, seed: u64, mut stat: impl FnMut(&[usize]) -> Option<f64>) -> Vec<f64> {
    let mut rng = substream(seed, 0, 0xB007);
    (0..BOOTSTRAP)
        .filter_map(|_| {
            let pick: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            stat(&pick)
        })
        .collect()
}

fn exponent(fit: &WindowFit, scale: f64, boots: &[f64]) -> ExponentFit {
    let ci = if boots.len() >= 10 {
        (quantile(boots, 0.025) * scale, quantile(boots, 0.975) * scale)
    } else {
        (f64::NAN, f64::NAN)
    };
    ExponentFit {
        value: fit.fit.slope * scale,
        stderr: fit.fit.slope_se * scale,
        window: fit.window,
        r_squared: fit.fit.r_squared,
        ci,
    }
}

/// Roughness exponent from saturated (or `r ≪ ξ`) profiles: the
/// height-difference second moment scales as `r^{2α}`, so `α` is half the
/// log-log slope, fitted on the best 1.5-decade window of `r ∈ [r_min, r_max]`.
pub fn estimate_alpha(profiles: &[HeightProfile], r_min: usize, r_max: usize, seed: u64) -> Result<ExponentFit> {
    if profiles.is_empty() {
        return Err(Error::InsufficientStatistics("no profiles".into()));
    }
    let rs = log_grid(r_min.max(1), r_max, 20);
    if rs.len() < 3 || (r_max as f64 / r_min.max(1) as f64).log10() < FIT_DECADES - 1e-9 {
        return Err(Error::InsufficientRange(format!("r in [{r_min}, {r_max}] spans less than {FIT_DECADES} decades")));
    }
    let per: Vec<Vec<f64>> = profiles.iter().map(|p| rs.iter().map(|&r| p.height_difference_moment(r)).collect()).collect();
    let avg = |pick: &[usize]| -> Vec<f64> {
        (0..rs.len()).map(|k| pick.iter().map(|&i| per[i][k]).sum::<f64>() / pick.len() as f64).collect()
    };
    let all: Vec<usize> = (0..profiles.len()).collect();
    let x: Vec<f64> = rs.iter().map(|&r| r as f64).collect();
    let y = avg(&all);
    let fit = best_loglog_window(&x, &y, FIT_DECADES)
        .ok_or_else(|| Error::InsufficientRange("height differences vanish on the fit range".into()))?;
    let keep: Vec<usize> = (0..x.len()).collect();
    let boots = bootstrap(profiles.len(), seed, |pick| slope_on(&keep, &fit, &x, &avg(pick)));
    Ok(exponent(&fit, 0.5, &boots))
}

/// Mean height growth per sweep, from a straight-line fit to the run-averaged
/// mean height over the second half of the recorded times.
pub fn estimate_velocity(history: &[Vec<HeightProfile>]) -> Result<f64> {
    check_history(history)?;
    let n_t = history[0].len();
    let ts: Vec<f64> = (n_t / 2..n_t).map(|k| history[0][k].t as f64).collect();
    let hs: Vec<f64> = (n_t / 2..n_t)
        .map(|k| history.iter().map(|run| run[k].mean_height()).sum::<f64>() / history.len() as f64)
        .collect();
    linear_fit(&ts, &hs)
        .map(|f| f.slope)
        .ok_or_else(|| Error::InsufficientRange("need at least two snapshot times".into()))
}
