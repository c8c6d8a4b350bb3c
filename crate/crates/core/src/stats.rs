//! Small statistics helpers shared by the estimators.

/// Running mean / variance accumulator (Welford).
#[derive(Clone, Debug, Default)]
pub struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (zero for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean: sample std / sqrt(N).
    pub fn sem(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.std() / (self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Mean and standard error of a sample.
pub fn mean_sem(xs: &[f64]) -> (f64, f64) {
    let acc: Accumulator = xs.iter().copied().collect();
    (acc.mean(), acc.sem())
}

/// Least-squares straight line `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    pub r_squared: f64,
}

/// Ordinary least squares; `slope_se` from the residual variance.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    weighted_linear_fit(x, y, &vec![1.0; x.len()]).map(|mut f| {
        // Unweighted: rescale errors by the residual variance.
        let n = x.len() as f64;
        let resid: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| (yi - f.intercept - f.slope * xi).powi(2))
            .sum();
        let s2 = if n > 2.0 { resid / (n - 2.0) } else { 0.0 };
        f.slope_se *= s2.sqrt();
        f.intercept_se *= s2.sqrt();
        f
    })
}

/// Weighted least squares with weights `w_i = 1/sigma_i^2`; standard errors
/// are the formal ones from the weights.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<LineFit> {
    if x.len() != y.len() || x.len() != w.len() || x.len() < 2 {
        return None;
    }
    let sw: f64 = w.iter().sum();
    let sx: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
    let sy: f64 = y.iter().zip(w).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| a * a * b).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| a * c * b).sum();
    let det = sw * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return None;
    }
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let ybar = sy / sw;
    let ss_tot: f64 = y.iter().zip(w).map(|(yi, wi)| wi * (yi - ybar).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((xi, yi), wi)| wi * (yi - intercept - slope * xi).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(LineFit {
        slope,
        intercept,
        slope_se: (sw / det).sqrt(),
        intercept_se: (sxx / det).sqrt(),
        r_squared,
    })
}

/// Straight-line fit of `ln y` against `ln x` over the best contiguous window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowFit {
    pub fit: LineFit,
    /// First and last abscissa of the chosen window.
    pub window: (f64, f64),
    /// Index range `lo..hi` of the chosen window.
    pub span: (usize, usize),
}

/// Log-log fit over the window spanning `decades` decades of `x` that has the
/// largest `R²`. Points with non-positive coordinates are rejected up front.
/// Returns `None` when the data cover less than `decades` decades or a
/// window holds fewer than three points.
pub fn best_loglog_window(x: &[f64], y: &[f64], decades: f64) -> Option<WindowFit> {
    if x.len() != y.len() || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let width = decades * std::f64::consts::LN_10;
    let mut best: Option<WindowFit> = None;
    for lo in 0..lx.len() {
        let Some(hi) = (lo..lx.len()).find(|&j| lx[j] - lx[lo] >= width - 1e-9) else {
            break;
        };
        if hi - lo + 1 < 3 {
            continue;
        }
        let Some(fit) = linear_fit(&lx[lo..=hi], &ly[lo..=hi]) else {
            continue;
        };
        if best.is_none_or(|b| fit.r_squared > b.fit.r_squared) {
            best = Some(WindowFit { fit, window: (x[lo], x[hi]), span: (lo, hi + 1) });
        }
    }
    best
}

/// Linear-interpolation quantile of an unsorted sample, `q` in [0, 1].
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_window_recovers_power_law() {
        let x: Vec<f64> = (0..40).map(|i| 10f64.powf(i as f64 / 10.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(0.4)).collect();
        let w = best_loglog_window(&x, &y, 1.5).unwrap();
        assert!((w.fit.slope - 0.4).abs() < 1e-12);
        assert!(w.window.1 / w.window.0 >= 10f64.powf(1.5) * (1.0 - 1e-9));
        assert!(best_loglog_window(&x[..10], &y[..10], 1.5).is_none());
    }

    #[test]
    fn line_through_exact_points() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!(f.slope_se < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sem_is_std_over_root_n() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let acc: Accumulator = xs.iter().copied().collect();
        assert!((acc.mean() - 2.5).abs() < 1e-12);
        assert!((acc.sem() - acc.std() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn quantile_endpoints() {
        let xs = [3.0, 1.0, 2.0];
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 3.0);
        assert_eq!(quantile(&xs, 0.5), 2.0);
    }
}
