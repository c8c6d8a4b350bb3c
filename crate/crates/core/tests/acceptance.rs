use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use mipt_core::charge::{dead_region_slope, dead_region_stats, fit_diffusion, u1_renyi_probe, DiffusionProbe};
use mipt_core::collapse::{collapse_fit, planted_curves, CollapseOptions, CurvePoint};
use mipt_core::dynamics::{
    find_crossing, purification_run, run_trajectory, transition_scan, ChainBoundary, CircuitConfig, EngineKind,
    TransitionPoint, TransitionScan,
};
use mipt_core::mincut::{
    brute_force_cut, estimate_nu, log_slope, minimal_cut_region, phase_scan, DilutedLattice, LatticeBoundary,
    ScanConfig,
};
use mipt_core::replica::{
    exact_partition_function, haar_monte_carlo, orthogonality_violation, weingarten_from_characters,
    weingarten_table, MeasuredWeight, Permutation, TinyCircuit, TriangleWeights,
};
use mipt_core::rng::stream;
use mipt_core::stab::{CliffordGate, TWO_QUBIT_CLIFFORD_COUNT};

use mipt_core::kpz::{estimate_alpha, estimate_beta, estimate_velocity, log_grid, simulate_ensemble, Boundary, KpzConfig, Placement, WidthMode};
use mipt_core::spreading::{clifford_right_weight, evolve_front, front_params, moments, RightWeightProfile};
use mipt_core::stats::linear_fit;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

// Criterion 4: front mean v_B t (±1 site) and variance 2Dt (±5%) for the
// exact kernel; Clifford velocity 3/5 ± 0.02 and variance slope 2D ± 15%.
fn operator_front() -> Verdict {
    let mut ok = true;
    let mut detail = String::new();
    let t = 400;
    for d in [2u64, 3, 5] {
        let fp = front_params(d).unwrap();
        let prof = evolve_front(&RightWeightProfile::delta(t + 8, 0).unwrap(), d, t).unwrap();
        let (mean, var) = (prof.mean(), prof.variance());
        let mean_ok = (mean - fp.v_b * t as f64).abs() <= 1.0;
        let var_ok = (var / (2.0 * fp.d_front * t as f64) - 1.0).abs() <= 0.05;
        ok &= mean_ok && var_ok && (prof.mass() - 1.0).abs() < 1e-12;
        detail += &format!("d={d}: mean {mean:.3} (v_B t {:.1}), var {var:.2} (2Dt {:.2}); ", fp.v_b * t as f64, 2.0 * fp.d_front * t as f64);
    }
    let (len, depth) = (512, 256);
    let hist = clifford_right_weight(len, depth, 2000, 11, 1).unwrap();
    let ts: Vec<f64> = (64..=depth).map(|t| t as f64).collect();
    let means: Vec<f64> = (64..=depth).map(|t| moments(&hist[t]).0).collect();
    let vars: Vec<f64> = (64..=depth).map(|t| moments(&hist[t]).1).collect();
    let v = linear_fit(&ts, &means).unwrap().slope;
    let dv = linear_fit(&ts, &vars).unwrap().slope;
    let fp = front_params(2).unwrap();
    ok &= (v - 0.6).abs() <= 0.02 && (dv / (2.0 * fp.d_front) - 1.0).abs() <= 0.15;
    detail += &format!("Clifford v = {v:.4}, var slope {dv:.4} (2D = {:.4})", 2.0 * fp.d_front);
    verdict(ok, detail)
}

// Criterion 5: beta = 0.33 ± 0.05 from the width growth at L = 4096 over
// t in [1e2, 1e4]; alpha = 0.50 ± 0.07 from saturated L = 4096 profiles.
fn kpz_exponents() -> Verdict {
    let len = 4096;
    let times = log_grid(100, 10_000, 12);
    let cfg = KpzConfig { len, sweeps: 10_000, placement: Placement::RandomBond, boundary: Boundary::Periodic };
    let hist = simulate_ensemble(&cfg, 5, 64, &times, 1).unwrap();
    let beta = estimate_beta(&hist, WidthMode::Spatial, 5).unwrap();
    let v_e = estimate_velocity(&hist).unwrap();
    let ok_beta = (beta.value - 1.0 / 3.0).abs() <= 0.05 && beta.ci.0 <= beta.value && beta.value <= beta.ci.1;

    // saturation sets in near t ~ L^{3/2}; sample beyond it
    let t_sat = (len as f64).powf(1.5) as usize;
    let sat_times: Vec<usize> = (0..8).map(|k| t_sat + 20_000 * k).collect();
    let sat_cfg = KpzConfig { sweeps: *sat_times.last().unwrap(), ..cfg };
    let profiles: Vec<_> = simulate_ensemble(&sat_cfg, 6, 2, &sat_times, 1).unwrap().into_iter().flatten().collect();
    let alpha = estimate_alpha(&profiles, 4, len / 8, 6).unwrap();
    let ok_alpha = (alpha.value - 0.5).abs() <= 0.07;
    verdict(
        ok_beta && ok_alpha && v_e > 0.0 && v_e < 1.0,
        format!(
            "beta {:.4} ± {:.4} on t in [{}, {}] (R² {:.4}, CI {:.3}..{:.3}); alpha {:.4} ± {:.4} on r in [{}, {}] (R² {:.4}); v_E {v_e:.4}",
            beta.value, beta.stderr, beta.window.0, beta.window.1, beta.r_squared, beta.ci.0, beta.ci.1,
            alpha.value, alpha.stderr, alpha.window.0, alpha.window.1, alpha.r_squared
        ),
    )
}

const MIPT_SIZES: [usize; 4] = [16, 32, 64, 128];
const MIPT_PS: [f64; 7] = [0.10, 0.12, 0.14, 0.16, 0.18, 0.20, 0.22];

fn mipt_scan() -> &'static Vec<TransitionPoint> {
    static SCAN: OnceLock<Vec<TransitionPoint>> = OnceLock::new();
    SCAN.get_or_init(|| {
        let scan = TransitionScan {
            sizes: MIPT_SIZES.to_vec(),
            probabilities: MIPT_PS.to_vec(),
            trajectories: 300,
            seed: 2024,
            workers: workers(),
        };
        transition_scan(&scan).expect("transition scan")
    })
}

fn workers() -> usize {
    std::env::var("MIPT_WORKERS").ok().and_then(|v| v.parse().ok()).unwrap_or(1)
}

// Criterion 1: S_R and I3 curves for L = 16..128 (300 trajectories, window
// t in [2L, 4L]) cross inside [0.14, 0.18], and within 0.02 of each other.
fn mipt_location() -> Verdict {
    let pts = mipt_scan();
    let sr: Vec<(usize, f64, f64)> = pts.iter().map(|x| (x.len, x.p, x.s_r)).collect();
    let i3: Vec<(usize, f64, f64)> = pts.iter().map(|x| (x.len, x.p, x.i3)).collect();
    match (find_crossing(&sr), find_crossing(&i3)) {
        (Ok((a, ca)), Ok((b, cb))) => {
            let ok = (0.14..=0.18).contains(&a) && (0.14..=0.18).contains(&b) && (a - b).abs() <= 0.02;
            verdict(ok, format!("S_R crossing {a:.4} (pairs {ca:.3?}); I3 crossing {b:.4} (pairs {cb:.3?})"))
        }
        (a, b) => verdict(false, format!("S_R: {a:?}; I3: {b:?}")),
    }
}

// Criterion 2: collapse of the S_R data gives nu = 1.3 ± 0.2; the planted
// self-test (p_c = 0.25, nu = 1.5, 2% noise) is recovered within ±0.01 and
// ±0.1 and inside the bootstrap intervals.
fn scaling_collapse() -> Verdict {
    let grid: Vec<f64> = (0..11).map(|i| 0.15 + 0.02 * i as f64).collect();
    let planted = planted_curves(&[16.0, 32.0, 64.0, 128.0], &grid, 0.25, 1.5, 0.02, 17);
    let popts = CollapseOptions { pc_range: (0.1, 0.4), nu_range: (0.8, 2.5), grid: 31, bootstrap: 50, seed: 5, ..Default::default() };
    let self_test = collapse_fit(&planted, &popts);
    let pts: Vec<CurvePoint> = mipt_scan()
        .iter()
        .map(|x| CurvePoint { size: x.len as f64, param: x.p, value: x.s_r, sem: x.s_r_sem.max(1.0 / x.trajectories as f64) })
        .collect();
    let opts = CollapseOptions { pc_range: (0.10, 0.22), nu_range: (0.6, 3.0), grid: 41, bootstrap: 50, seed: 6, ..Default::default() };
    let real = collapse_fit(&pts, &opts);
    match (self_test, real) {
        (Ok(st), Ok(r)) => {
            let st_ok = (st.p_c - 0.25).abs() <= 0.01
                && (st.nu - 1.5).abs() <= 0.1
                && st.p_c_interval.lo - 0.01 <= 0.25
                && 0.25 <= st.p_c_interval.hi + 0.01
                && st.nu_interval.lo - 0.1 <= 1.5
                && 1.5 <= st.nu_interval.hi + 0.1;
            let ok = st_ok && (r.nu - 1.3).abs() <= 0.2;
            verdict(
                ok,
                format!(
                    "planted: p_c {:.4} [{:.4}, {:.4}], nu {:.3} [{:.3}, {:.3}]; S_R: p_c {:.4} ± {:.4}, nu {:.3} ± {:.3} (objective {:.2})",
                    st.p_c, st.p_c_interval.lo, st.p_c_interval.hi, st.nu, st.nu_interval.lo, st.nu_interval.hi,
                    r.p_c, r.p_c_interval.stderr, r.nu, r.nu_interval.stderr, r.objective
                ),
            )
        }
        (a, b) => verdict(false, format!("planted: {:?}; S_R: {:?}", a.err(), b.err())),
    }
}

// Criterion 3: L = 128 from the maximally mixed state, 300 trajectories:
// S(4L)/L > 0.5 at p = 0.08 and < 0.02 at p = 0.30.
fn purification() -> Verdict {
    let len = 128;
    let mut out = Vec::new();
    for (k, p) in [0.08, 0.30].into_iter().enumerate() {
        let mut cfg = CircuitConfig::new(len, 4 * len, p);
        cfg.trajectories = 300;
        cfg.master_seed = 31 + k as u64;
        cfg.cuts = vec![];
        let s = purification_run(&cfg, workers()).expect("purification run");
        out.push(s.mean[4 * len] / len as f64);
    }
    verdict(out[0] > 0.5 && out[1] < 0.02, format!("S(4L)/L = {:.4} at p = 0.08, {:.5} at p = 0.30", out[0], out[1]))
}

// Criterion 6: character and Gram routes agree exactly for Q <= 5 and
// D in {4, 9, 25} (pairs with D < Q are rejected as singular), the
// convolution identity holds exactly, and the Q = 2 closed forms match.
fn weingarten_algebra() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for q in 1..=5usize {
        for dim in [4u64, 9, 25] {
            match weingarten_table(q, dim) {
                Ok(t) => {
                    let orth = orthogonality_violation(&t).is_none();
                    ok &= orth;
                    notes.push(format!("Q={q},D={dim}:{}", if orth { "ok" } else { "orthogonality FAILED" }));
                }
                Err(mipt_core::Error::SingularDimension { .. }) if dim < q as u64 => {
                    notes.push(format!("Q={q},D={dim}:singular"));
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("Q={q},D={dim}:{e}"));
                }
            }
        }
    }
    for dim in [4i64, 9, 25] {
        let t = weingarten_from_characters(2, dim as u64).expect("Q=2 table");
        let e = Permutation::identity(2);
        let s = Permutation::transposition(2, 0, 1).expect("transposition");
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        ok &= *t.get(&e) == r(1, dim * dim - 1) && *t.get(&s) == r(-1, dim * (dim * dim - 1));
    }
    verdict(ok, format!("{}; Q=2 closed forms checked at D = 4, 9, 25", notes.join(" ")))
}

// Criterion 7: exact tiny-circuit partition functions against Haar Monte
// Carlo on the dense engine, within 3 standard errors.
fn stat_mech_duality() -> Verdict {
    let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    struct Case {
        q: usize,
        circuit: TinyCircuit,
        p: (i64, i64),
        boundary: Vec<Permutation>,
        samples: usize,
    }
    let e2 = Permutation::identity(2);
    let s2 = Permutation::transposition(2, 0, 1).unwrap();
    let e3 = Permutation::identity(3);
    let c3 = Permutation::cycle(3, 3).unwrap();
    let t3 = Permutation::transposition(3, 0, 1).unwrap();
    let cases = [Case { q: 2, circuit: TinyCircuit::new(2, 2, vec![0]).unwrap(), p: (0, 1), boundary: vec![s2.clone(), e2.clone()], samples: 100_000 },
        Case { q: 2, circuit: TinyCircuit::new(3, 2, vec![0, 1]).unwrap(), p: (3, 10), boundary: vec![s2.clone(), e2.clone(), e2.clone()], samples: 100_000 },
        Case { q: 2, circuit: TinyCircuit::brickwork(4, 2, 3).unwrap(), p: (3, 10), boundary: vec![s2.clone(), s2.clone(), e2.clone(), e2.clone()], samples: 100_000 },
        Case { q: 3, circuit: TinyCircuit::new(2, 2, vec![0]).unwrap(), p: (1, 5), boundary: vec![c3.clone(), e3.clone()], samples: 50_000 },
        Case { q: 3, circuit: TinyCircuit::new(3, 2, vec![0, 1]).unwrap(), p: (3, 10), boundary: vec![c3.clone(), e3.clone(), e3.clone()], samples: 30_000 },
        Case { q: 3, circuit: TinyCircuit::new(3, 2, vec![0, 1, 0]).unwrap(), p: (3, 10), boundary: vec![t3.clone(), c3.clone(), e3.clone()], samples: 20_000 }];
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, c) in cases.iter().enumerate() {
        let p = r(c.p.0, c.p.1);
        let exact = exact_partition_function(&c.circuit, c.q, &p, &c.boundary).expect("exact Z").to_f64().unwrap();
        let (mean, sem) =
            haar_monte_carlo(&c.circuit, c.q, c.p.0 as f64 / c.p.1 as f64, &c.boundary, c.samples, 700 + k as u64, workers())
                .expect("Monte Carlo");
        let z = (mean - exact) / sem;
        ok &= z.abs() <= 3.0;
        notes.push(format!("Q={} gates={} exact {exact:.6} MC {mean:.6}±{sem:.6} (z {z:+.2})", c.q, c.circuit.bricks().len()));
    }
    verdict(ok, notes.join("; "))
}

fn percolation_rows() -> Vec<mipt_core::mincut::ScanRow> {
    // the window at L = 256 is about 0.015 wide, so a 0.01 step leaves
    // only two unsaturated points on the largest curves
    let ps: Vec<f64> = (0..13).map(|i| 0.47 + 0.005 * i as f64).collect();
    let cfg = ScanConfig {
        sizes: vec![32, 64, 128, 256],
        depth_factor: 2,
        probabilities: ps,
        samples: 1000,
        seed: 41,
        boundary: LatticeBoundary::Periodic,
        workers: workers(),
    };
    phase_scan(&cfg).expect("percolation scan")
}

/// Weighted fit of `l = s L + a L^(1/3)`, the directed-polymer form of a
/// minimal cut in the percolating phase. Returns `(s, se(s))`.
fn volume_coefficient(rows: &[mipt_core::mincut::ScanRow]) -> (f64, f64) {
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in rows {
        let w = 1.0 / r.sem.powi(2);
        let (x1, x2) = (r.len as f64, (r.len as f64).cbrt());
        a11 += w * x1 * x1;
        a12 += w * x1 * x2;
        a22 += w * x2 * x2;
        b1 += w * x1 * r.mean_ldw;
        b2 += w * x2 * r.mean_ldw;
    }
    let det = a11 * a22 - a12 * a12;
    ((a22 * b1 - a12 * b2) / det, (a22 / det).sqrt())
}

// Criterion 8: minimal-cut percolation limit. Spanning-probability collapse
// gives p_c = 0.50 ± 0.02 and nu = 1.33 ± 0.15; at p = 0.3 the fit
// E[l_DW] = s L + a L^(1/3) has s > 0.05 at 5 sigma, and at p = 0.7
// E[l_DW] stays size independent;
// at p = 0.5 the slope of E[l_DW] against ln L_A (bits at d = 2, so
// S/ln d = l_DW) is within 15% of sqrt(3)/pi.
fn percolation_limit() -> Verdict {
    let rows = percolation_rows();
    let opts = CollapseOptions { pc_range: (0.45, 0.55), nu_range: (0.8, 2.5), grid: 41, bootstrap: 50, seed: 8, ..Default::default() };
    let fit = estimate_nu(&rows, &opts);
    let law = |p: f64, sizes: Vec<usize>, seed: u64| {
        let cfg = ScanConfig {
            sizes,
            depth_factor: 2,
            probabilities: vec![p],
            samples: 200,
            seed,
            boundary: LatticeBoundary::Periodic,
            workers: workers(),
        };
        phase_scan(&cfg).expect("scan")
    };
    let vol = law(0.3, vec![64, 128, 256, 512], 42);
    let ratios: Vec<f64> = vol.iter().map(|r| r.mean_ldw / r.len as f64).collect();
    let (s_inf, s_se) = volume_coefficient(&vol);
    let vol_ok = s_inf > 0.05 && s_inf > 5.0 * s_se;
    let area = law(0.7, vec![64, 128, 256], 43);
    let spread = (area[2].mean_ldw - area[0].mean_ldw).abs();
    let area_ok = spread <= 3.0 * (area[2].sem.powi(2) + area[0].sem.powi(2)).sqrt() + 0.05;
    let crit = law(0.5, vec![32, 64, 128, 256, 512, 1024], 44);
    let slope = log_slope(&crit).expect("slope");
    let target = 3f64.sqrt() / std::f64::consts::PI;
    let slope_ok = (slope.slope / target - 1.0).abs() <= 0.15;
    match fit {
        Ok(f) => {
            let ok = (f.p_c - 0.5).abs() <= 0.02 && (f.nu - 4.0 / 3.0).abs() <= 0.15 && vol_ok && area_ok && slope_ok;
            verdict(
                ok,
                format!(
                    "p_c {:.4} ± {:.4}, nu {:.3} ± {:.3} (objective {:.2}); l/L at p=0.3: {:.4?}, s = {s_inf:.4} ± {s_se:.4}; \
                     l at p=0.7: {:.3} -> {:.3}; slope vs ln L {:.4} ± {:.4} (sqrt3/pi {target:.4}; {:.4} per log2 L)",
                    f.p_c, f.p_c_interval.stderr, f.nu, f.nu_interval.stderr, f.objective, ratios, area[0].mean_ldw,
                    area[2].mean_ldw, slope.slope, slope.slope_se, slope.slope * std::f64::consts::LN_2
                ),
            )
        }
        Err(e) => verdict(false, format!("collapse failed: {e}")),
    }
}

// Criterion 9: exact relative deviation of J_p from the factorised
// percolation weight at Q = 2, p = 0.3, strictly decreasing over
// d in {2, 4, 8, 16}, with the measured-link weight normalised as p d^Q.
fn large_d_factorization() -> Verdict {
    let p = BigRational::new(BigInt::from(3), BigInt::from(10));
    let devs = |m: MeasuredWeight| -> Vec<f64> {
        [2u64, 4, 8, 16]
            .iter()
            .map(|&d| {
                TriangleWeights::new(2, d, &p, m).unwrap().factorization_deviation(&p).unwrap().to_f64().unwrap()
            })
            .collect()
    };
    let norm = devs(MeasuredWeight::Normalized);
    let lit = devs(MeasuredWeight::Literal);
    let ok = norm.windows(2).all(|w| w[1] < w[0]);
    verdict(ok, format!("normalised {norm:.4?}; literal p*d weight {lit:.4?} (measured term vanishes as d^(1-Q))"))
}

// Criterion 10: D_q = 0.50 ± 0.05 per gate layer and dead-region
// probability slope -1.00 ± 0.05 in log2 per site.
fn charge_diffusion() -> Verdict {
    let dw = fit_diffusion(512, 4000, 400, 51, DiffusionProbe::DomainWall, workers());
    let tag = fit_diffusion(512, 4000, 2000, 52, DiffusionProbe::TaggedParticle, workers());
    let ells: Vec<usize> = (1..=16).collect();
    let dead = dead_region_stats(64, &ells, 4_000_000, 53).and_then(|s| dead_region_slope(&s));
    match (dw, tag, dead) {
        (Ok(a), Ok(b), Ok((slope, se))) => {
            let ok = (a.d_q - 0.5).abs() <= 0.05 && (b.d_q - 0.5).abs() <= 0.05 && (slope + 1.0).abs() <= 0.05;
            verdict(
                ok,
                format!(
                    "D_q domain wall {:.4} ± {:.4}, tagged {:.4} ± {:.4}; dead-region slope {slope:.4} ± {se:.4}",
                    a.d_q, a.stderr, b.d_q, b.stderr
                ),
            )
        }
        (a, b, c) => verdict(false, format!("{:?} {:?} {:?}", a.err(), b.err(), c.err())),
    }
}

// Criterion 11: desk-scale stand-ins for what cannot be reproduced. The
// sqrt(t) law of S_2 is replaced by S_2 <= S_1 at every step and a growing
// S_1 - S_2 gap at L = 10; the log prefactor at criticality is only
// required to be positive. The finite-d universality class beyond nu and
// the xi(d) crossover are not simulated.
fn desk_scale_properties() -> Verdict {
    let probe = u1_renyi_probe(10, 1, 40, 40, 61, workers());
    let crit = {
        let cfg = ScanConfig {
            sizes: vec![32, 64, 128, 256],
            depth_factor: 2,
            probabilities: vec![0.5],
            samples: 200,
            seed: 62,
            boundary: LatticeBoundary::Periodic,
            workers: workers(),
        };
        log_slope(&phase_scan(&cfg).expect("scan")).expect("slope")
    };
    match probe {
        Ok(pr) => {
            let early = pr.gap[2].0;
            let late = pr.gap[pr.gap.len() - 1].0;
            let ok = pr.ordered && late > early && crit.slope > 0.0;
            verdict(
                ok,
                format!(
                    "U(1) L=10: S2 <= S1 always: {}, gap {early:.4} -> {late:.4}; critical log prefactor {:.4} > 0; \
                     finite-d exponents beyond nu, xi(d) ~ d^(4/3) and alpha_n analytic value not reproduced",
                    pr.ordered, crit.slope
                ),
            )
        }
        Err(e) => verdict(false, format!("U(1) probe failed: {e}")),
    }
}

// Criterion 12: stabilizer and dense engines agree on outcomes and every
// cut entropy for 100 seeded circuits with L <= 10; the 0/1 search equals
// exhaustive enumeration on every lattice geometry with at most 32 legs
// (all dilution patterns up to 12 legs, 200 random ones beyond); and the
// two-qubit Clifford sampler is uniform over all 11520 elements.
fn oracle_equivalence() -> Verdict {
    let mut engine_ok = true;
    for seed in 0..100u64 {
        let len = 4 + (seed as usize % 4) * 2;
        let mut cfg = CircuitConfig::new(len, 3 * len, 0.1 + 0.002 * seed as f64);
        cfg.master_seed = 1000 + seed;
        cfg.cuts = (1..len).collect();
        cfg.boundary = if seed % 2 == 0 { ChainBoundary::Open } else { ChainBoundary::Periodic };
        let a = run_trajectory(&cfg, 0).unwrap();
        cfg.engine = EngineKind::Dense;
        let b = run_trajectory(&cfg, 0).unwrap();
        engine_ok &= a.record == b.record
            && a.cut_entropies.iter().flatten().zip(b.cut_entropies.iter().flatten()).all(|(x, y)| (x - y).abs() < 1e-9);
    }

    let mut cut_ok = true;
    let mut lattices = 0u64;
    for boundary in [LatticeBoundary::Open, LatticeBoundary::Periodic] {
        for len in [2usize, 4, 6, 8] {
            for depth in 1..=32 / len {
                let legs = len * depth;
                let patterns: Vec<Vec<bool>> = if legs <= 12 {
                    (0u32..1 << legs).map(|m| (0..legs).map(|i| m >> i & 1 == 1).collect()).collect()
                } else {
                    let mut rng = stream(77, legs as u64);
                    (0..200).map(|_| (0..legs).map(|_| rng.gen::<f64>() < 0.3).collect()).collect()
                };
                for pat in patterns {
                    let lat = DilutedLattice::from_measured(len, depth, boundary, pat).unwrap();
                    for a in 0..len {
                        for b in a + 1..=len {
                            cut_ok &= minimal_cut_region(&lat, a, b).unwrap() == brute_force_cut(&lat, a, b).unwrap();
                        }
                    }
                    lattices += 1;
                }
            }
        }
    }

    let per = 30usize;
    let n = per * TWO_QUBIT_CLIFFORD_COUNT;
    let mut counts: HashMap<u32, usize> = HashMap::new();
    let mut rng = stream(78, 0);
    for _ in 0..n {
        *counts.entry(CliffordGate::sample_two_qubit(&mut rng).canonical_key()).or_default() += 1;
    }
    let expected = per as f64;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>()
        + (TWO_QUBIT_CLIFFORD_COUNT - counts.len()) as f64 * expected;
    let dof = (TWO_QUBIT_CLIFFORD_COUNT - 1) as f64;
    let z = (chi2 - dof) / (2.0 * dof).sqrt();
    let cliff_ok = counts.len() == TWO_QUBIT_CLIFFORD_COUNT && z.abs() < 4.0;
    verdict(
        engine_ok && cut_ok && cliff_ok,
        format!(
            "engines agree on 100 circuits: {engine_ok}; min cut = brute force on {lattices} lattices: {cut_ok}; \
             Clifford sampler hit {} elements, chi2 {chi2:.0} on {dof} dof (z {z:+.2})",
            counts.len()
        ),
    )
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    type Criterion = (u32, &'static str, fn() -> Verdict);
    let criteria: Vec<Criterion> = vec![
        (1, "MIPT location", mipt_location),
        (2, "scaling collapse", scaling_collapse),
        (3, "purification phases", purification),
        (4, "operator front", operator_front),
        (5, "KPZ exponents", kpz_exponents),
        (6, "Weingarten algebra", weingarten_algebra),
        (7, "stat-mech Haar duality", stat_mech_duality),
        (8, "percolation limit", percolation_limit),
        (9, "large-d factorization", large_d_factorization),
        (10, "charge diffusion", charge_diffusion),
        (11, "desk-scale properties", desk_scale_properties),
        (12, "oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} [{status}] {name} ({:.1}s): {}", start.elapsed().as_secs_f64(), v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
