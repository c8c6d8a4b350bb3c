//! Subcommand dispatch: resolve parameters, run the owning module, emit.

use std::error::Error;
use std::path::PathBuf;
use std::time::Instant;

use mipt_core::collapse::{collapse_fit, CollapseOptions, CurvePoint};
use mipt_core::dynamics::{
    purification_run, run_ensemble, spin_glass_order, transition_scan, ChainBoundary, CircuitConfig, EngineKind,
    Layout, TransitionScan,
};
use mipt_core::kpz::{self, KpzConfig, Placement};
use mipt_core::mincut::{phase_scan, LatticeBoundary, ScanConfig};
use mipt_core::replica::weingarten_table;
use mipt_core::spreading::{clifford_right_weight, evolve_front, RightWeightProfile};
use mipt_core::{charge, stats::Accumulator};
use serde_json::Value;

use crate::config::Params;
use crate::output::{cell, emit, Manifest, Table};
use crate::{Command, Common};

type Res<T> = Result<T, Box<dyn Error>>;

/// What a subcommand hands back for emission.
struct Outcome {
    table: Table,
    seed_rule: &'static str,
}

struct Run {
    params: Params,
    seed: u64,
    workers: usize,
}

fn default_workers() -> Res<String> {
    match std::env::var("MIPT_WORKERS") {
        Ok(v) => Ok(v),
        Err(std::env::VarError::NotPresent) => {
            Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).to_string())
        }
        Err(e) => Err(format!("MIPT_WORKERS: {e}").into()),
    }
}

pub fn run(command: Command) -> Res<()> {
    let start = Instant::now();
    let (name, common, flags): (&'static str, &Common, _) = match &command {
        Command::Mrc(a) => ("mrc", &a.common, a.flags()),
        Command::Purify(a) => ("purify", &a.common, a.flags()),
        Command::Ancilla(a) => ("ancilla", &a.common, a.flags()),
        Command::Spinglass(a) => ("spinglass", &a.common, a.flags()),
        Command::Kpz(a) => ("kpz", &a.common, a.flags()),
        Command::Opspread(a) => ("opspread", &a.common, a.flags()),
        Command::Mincut(a) => ("mincut", &a.common, a.flags()),
        Command::Weingarten(a) => ("weingarten", &a.common, a.flags()),
        Command::Charge(a) => ("charge", &a.common, a.flags()),
        Command::Collapse(a) => ("collapse", &a.common, a.flags()),
    };
    let mut params = Params::load(common.config.as_deref(), &flags)?;
    let out: PathBuf = params.get::<String>("out", &format!("{name}.csv"))?.into();
    let seed = params.get("seed", "0")?;
    let workers: usize = params.get("workers", &default_workers()?)?;
    if workers == 0 {
        return Err(params.invalid("workers", "need at least one worker").into());
    }
    let mut r = Run { params, seed, workers };
    let outcome = match name {
        "mrc" => mrc(&mut r)?,
        "purify" => purify(&mut r)?,
        "ancilla" => ancilla(&mut r)?,
        "spinglass" => spinglass(&mut r)?,
        "kpz" => kpz_growth(&mut r)?,
        "opspread" => opspread(&mut r)?,
        "mincut" => mincut(&mut r)?,
        "weingarten" => weingarten(&mut r)?,
        "charge" => charge_transport(&mut r)?,
        _ => collapse(&mut r)?,
    };
    let config: serde_json::Map<String, Value> =
        r.params.resolved().iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    let manifest = Manifest {
        subcommand: name,
        config: Value::Object(config),
        master_seed: r.seed,
        seed_rule: outcome.seed_rule,
        workers: r.workers,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    emit(&out, &outcome.table, &manifest).map_err(|e| format!("{}: {e}", out.display()))?;
    Ok(())
}

fn chain_boundary(r: &mut Run) -> Res<ChainBoundary> {
    Ok(match r.params.choice("boundary", "periodic", &["periodic", "open"])?.as_str() {
        "open" => ChainBoundary::Open,
        _ => ChainBoundary::Periodic,
    })
}

fn mrc(r: &mut Run) -> Res<Outcome> {
    let len: usize = r.params.get("L", "64")?;
    let depth: usize = r.params.get("depth", &(4 * len).to_string())?;
    let p = r.params.probability("p", "0.16")?;
    let mut cfg = CircuitConfig::new(len, depth, p);
    cfg.trajectories = r.params.positive("traj", "100")?;
    cfg.layout = match r.params.choice("layout", "brickwork", &["brickwork", "random"])?.as_str() {
        "random" => Layout::RandomPair,
        _ => Layout::Brickwork,
    };
    cfg.boundary = chain_boundary(r)?;
    cfg.engine = match r.params.choice("engine", "stabilizer", &["stabilizer", "dense"])?.as_str() {
        "dense" => EngineKind::Dense,
        _ => EngineKind::Stabilizer,
    };
    cfg.cuts = r.params.list("cuts", &(len / 2).to_string())?;
    cfg.i3_stride = r.params.get("i3-stride", "0")?;
    cfg.master_seed = r.seed;
    cfg.validate().map_err(|e| r.params.invalid("L", e))?;

    let results = run_ensemble(&cfg, r.workers)?;
    let mut table = Table::new(&["trajectory", "seed", "t", "observable", "value"]);
    let labels: Vec<String> = cfg.cuts.iter().map(|c| format!("S[0:{c}]")).collect();
    for tr in &results {
        let row = |t: usize, obs: &str, v: f64| vec![cell(tr.index), cell(tr.seed), cell(t), cell(obs), cell(v)];
        for t in 0..tr.total.len() {
            for (k, s) in tr.cut_entropies.iter().enumerate() {
                table.push(row(t, &labels[k], s[t]));
            }
            table.push(row(t, "S_total", tr.total[t]));
        }
        for &(t, v) in &tr.i3 {
            table.push(row(t, "I3", v));
        }
    }
    Ok(Outcome { table, seed_rule: "trajectory i uses stream (seed, i)" })
}

fn purify(r: &mut Run) -> Res<Outcome> {
    let len: usize = r.params.get("L", "64")?;
    let depth: usize = r.params.get("depth", &(4 * len).to_string())?;
    let mut cfg = CircuitConfig::new(len, depth, r.params.probability("p", "0.3")?);
    cfg.trajectories = r.params.positive("traj", "100")?;
    cfg.boundary = chain_boundary(r)?;
    cfg.master_seed = r.seed;
    cfg.validate().map_err(|e| r.params.invalid("L", e))?;

    let s = purification_run(&cfg, r.workers)?;
    let mut table = Table::new(&["t", "entropy", "sem", "trajectories"]);
    for (t, (m, e)) in s.mean.iter().zip(&s.sem).enumerate() {
        table.push(vec![cell(t), cell(m), cell(e), cell(cfg.trajectories)]);
    }
    Ok(Outcome { table, seed_rule: "trajectory i uses stream (seed, i)" })
}

fn ancilla(r: &mut Run) -> Res<Outcome> {
    let sizes: Vec<usize> = r.params.list("sizes", "16,32,64")?;
    let probabilities: Vec<f64> = r.params.list("ps", "0.10,0.12,0.14,0.16,0.18,0.20,0.22")?;
    if let Some(&l) = sizes.iter().find(|&&l| l < 8 || l % 8 != 0) {
        return Err(r.params.invalid("sizes", format!("size {l} must be a positive multiple of 8")).into());
    }
    if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(r.params.invalid("ps", "probabilities must lie in [0, 1]").into());
    }
    let trajectories = r.params.positive("traj", "100")?;
    let scan = TransitionScan { sizes, probabilities, trajectories, seed: r.seed, workers: r.workers };
    let mut table = Table::new(&[
        "L", "p", "S_R", "S_R_sem", "I3", "I3_sem", "S_half", "S_half_sem", "trajectories", "point_seed",
    ]);
    for pt in transition_scan(&scan)? {
        table.push(vec![
            cell(pt.len),
            cell(pt.p),
            cell(pt.s_r),
            cell(pt.s_r_sem),
            cell(pt.i3),
            cell(pt.i3_sem),
            cell(pt.s_half),
            cell(pt.s_half_sem),
            cell(pt.trajectories),
            cell(pt.master_seed),
        ]);
    }
    Ok(Outcome {
        table,
        seed_rule: "point (a, b) draws point_seed from substream (seed, 0, a<<32|b); trajectory i uses stream (point_seed, i)",
    })
}

fn spinglass(r: &mut Run) -> Res<Outcome> {
    let len: usize = r.params.get("L", "64")?;
    let rs: Vec<f64> = r.params.list("rs", "0.1,0.3,0.5,0.7,0.9")?;
    let sweeps: usize = r.params.get("sweeps", &(4 * len).to_string())?;
    let traj: usize = r.params.get("traj", "50")?;
    let mut table = Table::new(&["L", "r", "chi", "sem", "trajectories", "seed"]);
    for &rate in &rs {
        let (m, e) = spin_glass_order(len, rate, sweeps, traj, r.seed, r.workers).map_err(|e| r.params.invalid("rs", e))?;
        table.push(vec![cell(len), cell(rate), cell(m), cell(e), cell(traj), cell(r.seed)]);
    }
    Ok(Outcome { table, seed_rule: "trajectory i uses stream (seed, i) at every r" })
}

fn kpz_growth(r: &mut Run) -> Res<Outcome> {
    let len: usize = r.params.get("L", "1024")?;
    let sweeps: usize = r.params.get("sweeps", "1000")?;
    let runs = r.params.positive("runs", "16")?;
    let placement = match r.params.choice("placement", "random", &["random", "brickwork", "sequential"])?.as_str() {
        "brickwork" => Placement::Brickwork,
        "sequential" => Placement::Sequential,
        _ => Placement::RandomBond,
    };
    let boundary = match r.params.choice("boundary", "periodic", &["periodic", "pinned"])?.as_str() {
        "pinned" => kpz::Boundary::Pinned,
        _ => kpz::Boundary::Periodic,
    };
    let cfg = KpzConfig { len, sweeps, placement, boundary };
    let mut record = vec![0];
    record.extend(kpz::log_grid(1, sweeps.max(1), 10));
    let history = kpz::simulate_ensemble(&cfg, r.seed, runs, &record, r.workers).map_err(|e| r.params.invalid("L", e))?;
    let mut table = Table::new(&["t", "mean_height", "mean_height_sem", "width_sq", "width_sq_sem", "runs"]);
    for k in 0..history[0].len() {
        let h: Accumulator = history.iter().map(|run| run[k].mean_height()).collect();
        let w: Accumulator = history.iter().map(|run| run[k].width_sq()).collect();
        table.push(vec![cell(history[0][k].t), cell(h.mean()), cell(h.sem()), cell(w.mean()), cell(w.sem()), cell(runs)]);
    }
    Ok(Outcome { table, seed_rule: "run i uses stream (seed, i)" })
}

fn opspread(r: &mut Run) -> Res<Outcome> {
    let len: usize = r.params.get("L", "128")?;
    let depth: usize = r.params.get("depth", "100")?;
    let d: u64 = r.params.get("d", "2")?;
    let circuits: usize = r.params.get("circuits", "0")?;
    if circuits > 0 && d != 2 {
        return Err(r.params.invalid("circuits", "Clifford circuits need d = 2").into());
    }
    let mut prof = RightWeightProfile::delta(len, 0).map_err(|e| r.params.invalid("L", e))?;
    let mut exact = vec![prof.rho.clone()];
    for _ in 0..depth {
        prof = evolve_front(&prof, d, 1).map_err(|e| r.params.invalid("d", e))?;
        exact.push(prof.rho.clone());
    }
    let empirical = if circuits > 0 { Some(clifford_right_weight(len, depth, circuits, r.seed, r.workers)?) } else { None };
    let mut table = Table::new(if empirical.is_some() { &["t", "x", "exact", "clifford"] } else { &["t", "x", "exact"] });
    for (t, rho) in exact.iter().enumerate() {
        for (x, v) in rho.iter().enumerate() {
            let mut row = vec![cell(t), cell(x), cell(v)];
            if let Some(e) = &empirical {
                row.push(cell(e[t][x]));
            }
            table.push(row);
        }
    }
    Ok(Outcome { table, seed_rule: "circuit i uses stream (seed, i)" })
}

fn mincut(r: &mut Run) -> Res<Outcome> {
    let cfg = ScanConfig {
        sizes: r.params.list("sizes", "32,64,128")?,
        depth_factor: r.params.positive("depth-factor", "2")?,
        probabilities: r.params.list("ps", "0.40,0.42,0.44,0.46,0.48,0.50,0.52,0.54,0.56,0.58,0.60")?,
        samples: r.params.positive("samples", "200")?,
        seed: r.seed,
        boundary: match r.params.choice("boundary", "periodic", &["periodic", "open"])?.as_str() {
            "open" => LatticeBoundary::Open,
            _ => LatticeBoundary::Periodic,
        },
        workers: r.workers,
    };
    let rows = phase_scan(&cfg).map_err(|e| r.params.invalid("sizes", e))?;
    let mut table = Table::new(&[
        "L",
        "T",
        "p",
        "cut_x",
        "mean_lDW",
        "sem",
        "spanning_prob",
        "spanning_sem",
        "largest_cluster",
        "n_samples",
        "seed",
    ]);
    for row in rows {
        table.push(vec![
            cell(row.len),
            cell(row.depth),
            cell(row.p),
            cell(row.cut),
            cell(row.mean_ldw),
            cell(row.sem),
            cell(row.spanning_prob),
            cell(row.spanning_sem),
            cell(row.largest_cluster),
            cell(row.samples),
            cell(row.seed),
        ]);
    }
    Ok(Outcome { table, seed_rule: "sample i at size index a, probability index b uses substream (seed, i, a<<32|b)" })
}

fn weingarten(r: &mut Run) -> Res<Outcome> {
    let q: usize = r.params.get("Q", "3")?;
    let d: u64 = r.params.get("D", "4")?;
    let table_wg = weingarten_table(q, d).map_err(|e| r.params.invalid("Q", e))?;
    let mut table = Table::new(&["cycle_type", "class_size", "wg"]);
    for (mu, v) in table_wg.values() {
        let label: Vec<String> = mu.parts().iter().map(|p| p.to_string()).collect();
        table.push(vec![label.join("+"), cell(mu.class_size()), format!("{}/{}", v.numer(), v.denom())]);
    }
    Ok(Outcome { table, seed_rule: "deterministic" })
}

fn charge_transport(r: &mut Run) -> Res<Outcome> {
    let mode = r.params.choice("mode", "diffusion", &["diffusion", "dead"])?;
    if mode == "dead" {
        let len: usize = r.params.get("L", "64")?;
        let ells: Vec<usize> = r.params.list("ells", "1,2,3,4,5,6,7,8,9,10,11,12")?;
        let samples: u64 = r.params.get("samples", "1000000")?;
        let stats = charge::dead_region_stats(len, &ells, samples, r.seed).map_err(|e| r.params.invalid("ells", e))?;
        let mut table = Table::new(&["ell", "probability", "hits", "samples", "seed"]);
        for s in stats {
            table.push(vec![cell(s.ell), cell(s.probability), cell(s.hits), cell(s.samples), cell(r.seed)]);
        }
        return Ok(Outcome { table, seed_rule: "one stream (seed, 0)" });
    }
    let len: usize = r.params.get("L", "256")?;
    let t_max: usize = r.params.get("t-max", "1000")?;
    let runs: usize = r.params.get("runs", "200")?;
    let (probe, label) = match r.params.choice("probe", "domain-wall", &["domain-wall", "tagged"])?.as_str() {
        "tagged" => (charge::DiffusionProbe::TaggedParticle, "tagged"),
        _ => (charge::DiffusionProbe::DomainWall, "domain-wall"),
    };
    let fit = charge::fit_diffusion(len, t_max, runs, r.seed, probe, r.workers).map_err(|e| r.params.invalid("L", e))?;
    let mut table = Table::new(&["probe", "L", "t_max", "runs", "D_q", "stderr", "window_lo", "window_hi", "seed"]);
    table.push(vec![
        cell(label),
        cell(len),
        cell(t_max),
        cell(runs),
        cell(fit.d_q),
        cell(fit.stderr),
        cell(fit.window.0),
        cell(fit.window.1),
        cell(r.seed),
    ]);
    Ok(Outcome { table, seed_rule: "run i uses stream (seed, i)" })
}

fn pair(r: &mut Run, key: &str, default: &str) -> Res<(f64, f64)> {
    let v: Vec<f64> = r.params.list(key, default)?;
    match v[..] {
        [lo, hi] if lo < hi => Ok((lo, hi)),
        _ => Err(r.params.invalid(key, "expected lo,hi with lo < hi").into()),
    }
}

fn collapse(r: &mut Run) -> Res<Outcome> {
    let input: String = r.params.require("input")?;
    let size_col: String = r.params.get("size-col", "L")?;
    let param_col: String = r.params.get("param-col", "p")?;
    let value_col: String = r.params.get("value-col", "value")?;
    let sem_col: String = r.params.get("sem-col", &format!("{value_col}_sem"))?;
    let opts = CollapseOptions {
        pc_range: pair(r, "pc-range", "0,1")?,
        nu_range: pair(r, "nu-range", "0.5,3")?,
        grid: r.params.get("grid", "41")?,
        bootstrap: r.params.get("bootstrap", "100")?,
        seed: r.seed,
        ..CollapseOptions::default()
    };

    let mut reader = csv::Reader::from_path(&input).map_err(|e| format!("{input}: {e}"))?;
    let header = reader.headers()?.clone();
    let col = |name: &str| -> Res<usize> {
        header.iter().position(|h| h == name).ok_or_else(|| format!("{input}: no column `{name}`").into())
    };
    let idx = [col(&size_col)?, col(&param_col)?, col(&value_col)?, col(&sem_col)?];
    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let mut v = [0.0; 4];
        for (slot, &c) in v.iter_mut().zip(&idx) {
            *slot = rec[c].trim().parse().map_err(|_| format!("{input}:{}: bad number `{}`", i + 2, &rec[c]))?;
        }
        points.push(CurvePoint { size: v[0], param: v[1], value: v[2], sem: v[3] });
    }
    let c = collapse_fit(&points, &opts)?;
    let mut table = Table::new(&[
        "p_c",
        "p_c_lo",
        "p_c_hi",
        "p_c_stderr",
        "nu",
        "nu_lo",
        "nu_hi",
        "nu_stderr",
        "objective",
        "points_used",
        "sizes",
        "bootstrap",
    ]);
    let sizes: Vec<String> = c.sizes.iter().map(|s| s.to_string()).collect();
    table.push(vec![
        cell(c.p_c),
        cell(c.p_c_interval.lo),
        cell(c.p_c_interval.hi),
        cell(c.p_c_interval.stderr),
        cell(c.nu),
        cell(c.nu_interval.lo),
        cell(c.nu_interval.hi),
        cell(c.nu_interval.stderr),
        cell(c.objective),
        cell(c.points_used),
        sizes.join(" "),
        cell(c.bootstrap_samples),
    ]);
    Ok(Outcome { table, seed_rule: "bootstrap draws from stream (seed, k)" })
}
