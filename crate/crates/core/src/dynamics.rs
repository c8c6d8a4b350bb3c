//! Monitored random Clifford circuits: trajectories, ensembles and the
//! observables used to locate the measurement-induced transition.
//!
//! One layer is a half-layer of two-qubit gates on the bonds `(x, x+1)` with
//! `x ≡ t (mod 2)` followed by a measurement round in which every qubit is
//! measured in `Z` with probability `p`. Entropies are recorded after each
//! layer, so series have `T + 1` entries (the first is the initial state).

use rand::Rng;

use crate::dense::{clifford_unitary, DenseGate, DenseState};
use crate::parallel::map_indexed;
use crate::rng::{stream, substream};
use crate::stab::{random_two_qubit_clifford, CliffordGate, Pauli, PauliString, StabilizerState};
use crate::stats::{mean_sem, Accumulator};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Alternating even/odd bonds.
    Brickwork,
    /// `⌊L/2⌋` gates per layer, each on a uniformly random bond.
    RandomPair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainBoundary {
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Stabilizer,
    Dense,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Initial {
    ProductZero,
    MaximallyMixed,
    /// Stabilizer generators (stabilizer engine only).
    Custom(Vec<PauliString>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ancilla {
    None,
    /// A reference qubit Bell-paired with site `L/2`, then `2L` layers of
    /// measurement-free brickwork on the system before monitoring starts.
    ScrambledReference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitConfig {
    pub len: usize,
    pub depth: usize,
    pub p: f64,
    pub layout: Layout,
    pub boundary: ChainBoundary,
    pub engine: EngineKind,
    pub initial: Initial,
    pub ancilla: Ancilla,
    /// Region `0..c` for each entry.
    pub cuts: Vec<usize>,
    pub master_seed: u64,
    pub trajectories: usize,
    /// Record `I₃` of the first three quarters every this many layers
    /// (0 disables it).
    pub i3_stride: usize,
}

impl CircuitConfig {
    /// Brickwork, periodic, stabilizer engine, product state, half cut.
    pub fn new(len: usize, depth: usize, p: f64) -> Self {
        CircuitConfig {
            len,
            depth,
            p,
            layout: Layout::Brickwork,
            boundary: ChainBoundary::Periodic,
            engine: EngineKind::Stabilizer,
            initial: Initial::ProductZero,
            ancilla: Ancilla::None,
            cuts: vec![len / 2],
            master_seed: 0,
            trajectories: 1,
            i3_stride: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.len < 2 {
            return Err(Error::InvalidParameter(format!("L = {} < 2", self.len)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.boundary == ChainBoundary::Periodic && self.layout == Layout::Brickwork && !self.len.is_multiple_of(2) {
            return Err(Error::InvalidParameter("periodic brickwork needs even L".into()));
        }
        if let Some(&c) = self.cuts.iter().find(|&&c| c > self.len) {
            return Err(Error::InvalidParameter(format!("cut {c} > L = {}", self.len)));
        }
        if self.i3_stride > 0 && !self.len.is_multiple_of(4) {
            return Err(Error::InvalidParameter("I3 needs L divisible by 4".into()));
        }
        if self.engine == EngineKind::Dense {
            let n = self.len + usize::from(self.ancilla == Ancilla::ScrambledReference);
            if n > 26 {
                return Err(Error::OracleTooLarge { amplitudes: 1u128 << n, limit: 1 << 26 });
            }
            if self.initial != Initial::ProductZero {
                return Err(Error::InvalidParameter("dense engine starts from |0…0>".into()));
            }
        }
        Ok(())
    }

    fn bonds(&self, t: usize) -> Vec<usize> {
        let last = match self.boundary {
            ChainBoundary::Open => self.len - 1,
            ChainBoundary::Periodic => self.len,
        };
        (0..last).filter(|x| x % 2 == t % 2).collect()
    }

    fn bond_count(&self) -> usize {
        match self.boundary {
            ChainBoundary::Open => self.len - 1,
            ChainBoundary::Periodic => self.len,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub t: usize,
    pub site: usize,
    pub outcome: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryResult {
    pub index: usize,
    pub seed: u64,
    /// `cut_entropies[k][t]` in bits for `cuts[k]`.
    pub cut_entropies: Vec<Vec<f64>>,
    pub reference: Option<Vec<f64>>,
    pub total: Vec<f64>,
    /// `(t, I₃)` samples.
    pub i3: Vec<(usize, f64)>,
    pub record: Vec<MeasurementRecord>,
}

/// Simulation backend for a trajectory.
trait Engine {
    fn apply(&mut self, gate: &CliffordGate, a: usize, b: usize) -> Result<()>;
    fn measure_z(&mut self, site: usize, rng: &mut dyn rand::RngCore) -> Result<i8>;
    fn entropy(&mut self, region: &[usize]) -> Result<f64>;
    fn total_entropy(&self) -> f64;
}

impl Engine for StabilizerState {
    fn apply(&mut self, gate: &CliffordGate, a: usize, b: usize) -> Result<()> {
        self.apply_clifford(gate, &[a, b])
    }

    fn measure_z(&mut self, site: usize, rng: &mut dyn rand::RngCore) -> Result<i8> {
        Ok(StabilizerState::measure_z(self, site, rng)?.outcome)
    }

    fn entropy(&mut self, region: &[usize]) -> Result<f64> {
        Ok(StabilizerState::entropy(self, region)? as f64)
    }

    fn total_entropy(&self) -> f64 {
        StabilizerState::total_entropy(self) as f64
    }
}

/// State-vector replay of the same Clifford circuit.
struct DenseEngine {
    state: DenseState,
    cache: Vec<(u32, DenseGate)>,
}

impl Engine for DenseEngine {
    fn apply(&mut self, gate: &CliffordGate, a: usize, b: usize) -> Result<()> {
        let key = gate.canonical_key();
        let g = match self.cache.iter().position(|(k, _)| *k == key) {
            Some(i) => &self.cache[i].1,
            None => {
                self.cache.push((key, DenseGate::new(2, 2, clifford_unitary(gate))?));
                &self.cache.last().expect("just pushed").1
            }
        };
        self.state.apply(g, &[a, b])
    }

    fn measure_z(&mut self, site: usize, rng: &mut dyn rand::RngCore) -> Result<i8> {
        self.state.measure_z(site, rng)
    }

    fn entropy(&mut self, region: &[usize]) -> Result<f64> {
        if region.is_empty() || region.len() == self.state.num_sites() {
            return Ok(0.0);
        }
        self.state.renyi_entropy(region, 1.0)
    }

    fn total_entropy(&self) -> f64 {
        0.0
    }
}

fn region(len: usize, lo: usize, hi: usize) -> Vec<usize> {
    (lo..hi.min(len)).collect()
}

fn tripartite<E: Engine + ?Sized>(e: &mut E, len: usize) -> Result<f64> {
    let q = len / 4;
    let a = region(len, 0, q);
    let b = region(len, q, 2 * q);
    let c = region(len, 2 * q, 3 * q);
    let join = |x: &[usize], y: &[usize]| x.iter().chain(y).copied().collect::<Vec<_>>();
    let abc = join(&join(&a, &b), &c);
    // S_ABC is taken on ABC itself, so a reference qubit simply joins D.
    Ok(e.entropy(&a)? + e.entropy(&b)? + e.entropy(&c)? - e.entropy(&join(&a, &b))? - e.entropy(&join(&b, &c))?
        - e.entropy(&join(&a, &c))?
        + e.entropy(&abc)?)
}

/// `I₃(A:B:C)` of contiguous quarters `A, B, C` of a stabilizer state.
pub fn tripartite_mutual_information(state: &StabilizerState) -> Result<f64> {
    let n = state.num_qubits();
    if !n.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!("{n} qubits do not split into quarters")));
    }
    let mut s = state.clone();
    tripartite(&mut s, n)
}

fn unitary_layer<E: Engine + ?Sized>(cfg: &CircuitConfig, e: &mut E, t: usize, rng: &mut dyn rand::RngCore) -> Result<()> {
    let l = cfg.len;
    match cfg.layout {
        Layout::Brickwork => {
            for x in cfg.bonds(t) {
                let g = random_two_qubit_clifford(rng);
                e.apply(g, x, (x + 1) % l)?;
            }
        }
        Layout::RandomPair => {
            for _ in 0..l / 2 {
                let x = rng.gen_range(0..cfg.bond_count());
                let g = random_two_qubit_clifford(rng);
                e.apply(g, x, (x + 1) % l)?;
            }
        }
    }
    Ok(())
}

fn run_with<E: Engine + ?Sized>(cfg: &CircuitConfig, e: &mut E, index: usize) -> Result<TrajectoryResult> {
    let l = cfg.len;
    let mut rng = stream(cfg.master_seed, index as u64);
    let reference = cfg.ancilla == Ancilla::ScrambledReference;
    if reference {
        e.apply(&bell_encoder(), l / 2, l)?;
        for t in 0..2 * l {
            let mut brick = cfg.clone();
            brick.layout = Layout::Brickwork;
            unitary_layer(&brick, e, t, &mut rng)?;
        }
    }
    let regions: Vec<Vec<usize>> = cfg.cuts.iter().map(|&c| region(l, 0, c)).collect();
    let mut cut_entropies = vec![Vec::with_capacity(cfg.depth + 1); regions.len()];
    let mut ref_series = reference.then(|| Vec::with_capacity(cfg.depth + 1));
    let mut total = Vec::with_capacity(cfg.depth + 1);
    let mut i3 = Vec::new();
    let mut record = Vec::new();
    let mut observe = |e: &mut E, t: usize| -> Result<()> {
        for (k, r) in regions.iter().enumerate() {
            cut_entropies[k].push(e.entropy(r)?);
        }
        if let Some(s) = ref_series.as_mut() {
            s.push(e.entropy(&[l])?);
        }
        total.push(e.total_entropy());
        if cfg.i3_stride > 0 && t.is_multiple_of(cfg.i3_stride) {
            i3.push((t, tripartite(e, l)?));
        }
        Ok(())
    };
    observe(e, 0)?;
    for t in 0..cfg.depth {
        unitary_layer(cfg, e, t, &mut rng)?;
        for site in 0..l {
            if rng.gen::<f64>() < cfg.p {
                let outcome = e.measure_z(site, &mut rng)?;
                record.push(MeasurementRecord { t: t + 1, site, outcome });
            }
        }
        observe(e, t + 1)?;
    }
    Ok(TrajectoryResult {
        index,
        seed: cfg.master_seed,
        cut_entropies,
        reference: ref_series,
        total,
        i3,
        record,
    })
}

/// `CNOT·(H ⊗ I)`: maps `|00⟩` to a Bell pair.
fn bell_encoder() -> CliffordGate {
    use Pauli::{I, X, Z};
    let p = |a, b| PauliString::from_paulis(&[a, b], false);
    CliffordGate::from_images(vec![p(Z, I), p(X, X), p(I, X), p(Z, Z)]).expect("Bell encoder is Clifford")
}

fn initial_state(cfg: &CircuitConfig) -> Result<StabilizerState> {
    let n = cfg.len + usize::from(cfg.ancilla == Ancilla::ScrambledReference);
    match &cfg.initial {
        Initial::ProductZero => Ok(StabilizerState::zero(n)),
        Initial::MaximallyMixed => {
            if cfg.ancilla != Ancilla::None {
                return Err(Error::InvalidParameter("reference qubit needs a pure system".into()));
            }
            Ok(StabilizerState::maximally_mixed(n))
        }
        Initial::Custom(gens) => {
            if cfg.ancilla != Ancilla::None {
                return Err(Error::InvalidParameter("reference qubit needs the product initial state".into()));
            }
            StabilizerState::from_generators(n, gens)
        }
    }
}

/// One trajectory, seeded by `stream(master_seed, index)`.
pub fn run_trajectory(cfg: &CircuitConfig, index: usize) -> Result<TrajectoryResult> {
    cfg.validate()?;
    match cfg.engine {
        EngineKind::Stabilizer => run_with(cfg, &mut initial_state(cfg)?, index),
        EngineKind::Dense => {
            let n = cfg.len + usize::from(cfg.ancilla == Ancilla::ScrambledReference);
            let mut e = DenseEngine { state: DenseState::zero(n, 2)?, cache: Vec::new() };
            run_with(cfg, &mut e, index)
        }
    }
}

/// All trajectories `0..cfg.trajectories`, in index order.
pub fn run_ensemble(cfg: &CircuitConfig, workers: usize) -> Result<Vec<TrajectoryResult>> {
    cfg.validate()?;
    map_indexed(cfg.trajectories, workers, |i| run_trajectory(cfg, i)).into_iter().collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesStats {
    pub mean: Vec<f64>,
    pub sem: Vec<f64>,
}

impl SeriesStats {
    fn from_series<'a>(series: impl Iterator<Item = &'a Vec<f64>>) -> Self {
        let mut accs: Vec<Accumulator> = Vec::new();
        for s in series {
            if accs.is_empty() {
                accs = vec![Accumulator::default(); s.len()];
            }
            for (a, &v) in accs.iter_mut().zip(s) {
                a.push(v);
            }
        }
        SeriesStats { mean: accs.iter().map(Accumulator::mean).collect(), sem: accs.iter().map(Accumulator::sem).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleStats {
    pub trajectories: usize,
    pub cuts: Vec<SeriesStats>,
    pub reference: Option<SeriesStats>,
    pub total: SeriesStats,
}

pub fn ensemble_stats(results: &[TrajectoryResult]) -> Result<EnsembleStats> {
    let first = results.first().ok_or_else(|| Error::InsufficientStatistics("no trajectories".into()))?;
    let cuts = (0..first.cut_entropies.len())
        .map(|k| SeriesStats::from_series(results.iter().map(|r| &r.cut_entropies[k])))
        .collect();
    let reference = first
        .reference
        .as_ref()
        .map(|_| SeriesStats::from_series(results.iter().filter_map(|r| r.reference.as_ref())));
    Ok(EnsembleStats {
        trajectories: results.len(),
        cuts,
        reference,
        total: SeriesStats::from_series(results.iter().map(|r| &r.total)),
    })
}

/// Mean reference entropy `𝔼[S_R](t)` with a scrambled reference qubit.
pub fn ancilla_probe(cfg: &CircuitConfig, workers: usize) -> Result<SeriesStats> {
    let mut c = cfg.clone();
    c.ancilla = Ancilla::ScrambledReference;
    c.initial = Initial::ProductZero;
    let stats = ensemble_stats(&run_ensemble(&c, workers)?)?;
    Ok(stats.reference.expect("reference enabled"))
}

/// Mean total entropy `𝔼[S](t)` from the maximally mixed state.
pub fn purification_run(cfg: &CircuitConfig, workers: usize) -> Result<SeriesStats> {
    if cfg.engine != EngineKind::Stabilizer {
        return Err(Error::InvalidParameter("purification needs the stabilizer engine".into()));
    }
    let mut c = cfg.clone();
    c.initial = Initial::MaximallyMixed;
    c.ancilla = Ancilla::None;
    Ok(ensemble_stats(&run_ensemble(&c, workers)?)?.total)
}

fn window_mean(series: &[f64], lo: usize, hi: usize) -> f64 {
    let w = &series[lo.min(series.len() - 1)..=hi.min(series.len() - 1)];
    w.iter().sum::<f64>() / w.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionPoint {
    pub len: usize,
    pub p: f64,
    /// Steady-state `S_R` averaged over `t ∈ [2L, 4L]`.
    pub s_r: f64,
    pub s_r_sem: f64,
    /// Steady-state `I₃` over the same window.
    pub i3: f64,
    pub i3_sem: f64,
    /// Half-system entropy over the same window.
    pub s_half: f64,
    pub s_half_sem: f64,
    pub trajectories: usize,
    /// Master seed of this point's trajectories.
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionScan {
    pub sizes: Vec<usize>,
    pub probabilities: Vec<f64>,
    pub trajectories: usize,
    pub seed: u64,
    pub workers: usize,
}

/// Scrambled-reference runs of depth `4L` for every `(L, p)`. Point `(a, b)`
/// draws its master seed from `substream(seed, 0, a << 32 | b)`.
pub fn transition_scan(scan: &TransitionScan) -> Result<Vec<TransitionPoint>> {
    let mut out = Vec::new();
    for (a, &len) in scan.sizes.iter().enumerate() {
        for (b, &p) in scan.probabilities.iter().enumerate() {
            let mut cfg = CircuitConfig::new(len, 4 * len, p);
            cfg.ancilla = Ancilla::ScrambledReference;
            cfg.trajectories = scan.trajectories;
            cfg.master_seed = substream(scan.seed, 0, (a as u64) << 32 | b as u64).gen();
            cfg.i3_stride = (len / 8).max(1);
            let results = run_ensemble(&cfg, scan.workers)?;
            let (lo, hi) = (2 * len, 4 * len);
            let s_r: Vec<f64> = results.iter().map(|r| window_mean(r.reference.as_ref().expect("reference"), lo, hi)).collect();
            let s_half: Vec<f64> = results.iter().map(|r| window_mean(&r.cut_entropies[0], lo, hi)).collect();
            let i3: Vec<f64> = results
                .iter()
                .map(|r| {
                    let w: Vec<f64> = r.i3.iter().filter(|(t, _)| *t >= lo && *t <= hi).map(|x| x.1).collect();
                    w.iter().sum::<f64>() / w.len().max(1) as f64
                })
                .collect();
            let (s_r, s_r_sem) = mean_sem(&s_r);
            let (i3, i3_sem) = mean_sem(&i3);
            let (s_half, s_half_sem) = mean_sem(&s_half);
            out.push(TransitionPoint {
                len,
                p,
                s_r,
                s_r_sem,
                i3,
                i3_sem,
                s_half,
                s_half_sem,
                trajectories: results.len(),
                master_seed: cfg.master_seed,
            });
        }
    }
    Ok(out)
}

/// Where successive-size curves `y_L(p)` cross, by linear interpolation of
/// `y_{L'} − y_L` between grid points. Returns the mean over size pairs and
/// the individual crossings.
pub fn find_crossing(points: &[(usize, f64, f64)]) -> Result<(f64, Vec<f64>)> {
    let mut sizes: Vec<usize> = points.iter().map(|x| x.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(Error::InsufficientRange("need at least two sizes".into()));
    }
    let curve = |l: usize| {
        let mut c: Vec<(f64, f64)> = points.iter().filter(|x| x.0 == l).map(|x| (x.1, x.2)).collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        c
    };
    let mut crossings = Vec::new();
    for w in sizes.windows(2) {
        let (small, large) = (curve(w[0]), curve(w[1]));
        let diff: Vec<(f64, f64)> = small
            .iter()
            .filter_map(|&(p, y)| large.iter().find(|q| q.0 == p).map(|q| (p, q.1 - y)))
            .collect();
        let found = diff.windows(2).find(|d| d[0].1 == 0.0 || d[0].1.signum() != d[1].1.signum());
        let Some(d) = found else {
            return Err(Error::NoCrossing(format!("sizes {} and {} do not cross on the grid", w[0], w[1])));
        };
        let (p0, y0, p1, y1) = (d[0].0, d[0].1, d[1].0, d[1].1);
        crossings.push(if y0 == y1 { p0 } else { p0 + (p1 - p0) * y0 / (y0 - y1) });
    }
    let mean = crossings.iter().sum::<f64>() / crossings.len() as f64;
    Ok((mean, crossings))
}

/// Edwards–Anderson order `χ⁽²⁾ = 𝔼 ⟨Z_i Z_j⟩²` under measurement-only
/// dynamics on a ring: each step picks a site `i`, measures `Z_i Z_{i+1}`
/// with probability `r` and `X_i` otherwise. The state starts in `|+…+⟩`,
/// runs `sweeps·L` steps and is averaged over pairs with
/// `|i − j| ∈ [L/4, L/2]`. Returns `(mean, sem)` over trajectories.
pub fn spin_glass_order(len: usize, r: f64, sweeps: usize, trajectories: usize, seed: u64, workers: usize) -> Result<(f64, f64)> {
    if len < 4 || !(0.0..=1.0).contains(&r) || trajectories < 2 {
        return Err(Error::InvalidParameter("need L >= 4, r in [0, 1] and two trajectories".into()));
    }
    let values = map_indexed(trajectories, workers, |k| -> Result<f64> {
        let mut rng = stream(seed, k as u64);
        let plus: Vec<PauliString> = (0..len).map(|i| PauliString::single(len, i, Pauli::X)).collect();
        let mut s = StabilizerState::from_generators(len, &plus)?;
        for _ in 0..sweeps * len {
            let i = rng.gen_range(0..len);
            let obs = if rng.gen::<f64>() < r {
                PauliString::zz(len, i, (i + 1) % len)
            } else {
                PauliString::single(len, i, Pauli::X)
            };
            s.measure(&obs, &mut rng)?;
        }
        let mut acc = Accumulator::default();
        for i in 0..len {
            for sep in len / 4..=len / 2 {
                let v = s.expectation(&PauliString::zz(len, i, (i + sep) % len))?;
                acc.push(f64::from(v * v));
            }
        }
        Ok(acc.mean())
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    Ok(mean_sem(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fully_measured_stays_unentangled() {
        let mut cfg = CircuitConfig::new(16, 20, 1.0);
        cfg.cuts = vec![4, 8, 12];
        let r = run_trajectory(&cfg, 3).unwrap();
        assert!(r.cut_entropies.iter().flatten().all(|&s| s == 0.0));
        assert!(r.record.iter().all(|m| m.outcome == 1 || m.outcome == -1));
        assert_eq!(r.record.len(), 16 * 20);
    }

    #[test]
    fn unitary_saturation_is_near_maximal() {
        let mut cfg = CircuitConfig::new(32, 64, 0.0);
        cfg.trajectories = 200;
        let stats = ensemble_stats(&run_ensemble(&cfg, 1).unwrap()).unwrap();
        let last = *stats.cuts[0].mean.last().unwrap();
        assert!(last >= 0.9 * 15.0, "{last}");
        assert_eq!(stats.cuts[0].mean.len(), 65);
    }

    #[test]
    fn replay_is_identical() {
        let mut cfg = CircuitConfig::new(12, 30, 0.2);
        cfg.master_seed = 77;
        cfg.i3_stride = 5;
        assert_eq!(run_trajectory(&cfg, 4).unwrap(), run_trajectory(&cfg, 4).unwrap());
    }

    #[test]
    fn unmeasured_reference_keeps_one_bit() {
        let mut cfg = CircuitConfig::new(16, 64, 0.0);
        cfg.trajectories = 5;
        let s = ancilla_probe(&cfg, 1).unwrap();
        assert!(s.mean.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn purification_limits() {
        let mut cfg = CircuitConfig::new(12, 10, 1.0);
        cfg.trajectories = 3;
        let s = purification_run(&cfg, 1).unwrap();
        assert_eq!(s.mean[0], 12.0);
        assert_eq!(s.mean[1], 0.0);
        cfg.p = 0.0;
        let s = purification_run(&cfg, 1).unwrap();
        assert!(s.mean.iter().all(|&v| v == 12.0));
    }

    #[test]
    fn tripartite_examples() {
        assert_eq!(tripartite_mutual_information(&StabilizerState::zero(8)).unwrap(), 0.0);
        // GHZ on four qubits, one per quarter.
        let ghz = StabilizerState::from_generators(
            4,
            &[
                PauliString::from_paulis(&[Pauli::X; 4], false),
                PauliString::zz(4, 0, 1),
                PauliString::zz(4, 1, 2),
                PauliString::zz(4, 2, 3),
            ],
        )
        .unwrap();
        assert_eq!(tripartite_mutual_information(&ghz).unwrap(), 1.0);
    }

    #[test]
    fn spin_glass_extremes() {
        assert_eq!(spin_glass_order(16, 1.0, 64, 3, 1, 1).unwrap().0, 1.0);
        assert_eq!(spin_glass_order(16, 0.0, 64, 3, 1, 1).unwrap().0, 0.0);
    }

    #[test]
    fn engines_agree() {
        for seed in 0..20u64 {
            let mut cfg = CircuitConfig::new(6 + (seed as usize % 3) * 2, 12, 0.25);
            cfg.master_seed = seed;
            cfg.cuts = (1..cfg.len).collect();
            cfg.boundary = if seed % 2 == 0 { ChainBoundary::Open } else { ChainBoundary::Periodic };
            if seed % 5 == 0 {
                cfg.ancilla = Ancilla::ScrambledReference;
                cfg.depth = 4;
            }
            let stab = run_trajectory(&cfg, 0).unwrap();
            cfg.engine = EngineKind::Dense;
            let dense = run_trajectory(&cfg, 0).unwrap();
            assert_eq!(stab.record, dense.record, "seed {seed}");
            for (a, b) in stab.cut_entropies.iter().flatten().zip(dense.cut_entropies.iter().flatten()) {
                assert!((a - b).abs() < 1e-8, "seed {seed}: {a} vs {b}");
            }
            if let (Some(a), Some(b)) = (&stab.reference, &dense.reference) {
                for (x, y) in a.iter().zip(b) {
                    assert!((x - y).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn local_averages_are_featureless() {
        let len = 12;
        let mut cfg = CircuitConfig::new(len, 48, 0.3);
        cfg.master_seed = 5;
        let n = 600;
        let mut accs = vec![Accumulator::default(); len];
        for i in 0..n {
            let mut s = StabilizerState::zero(len);
            let r = run_with(&cfg, &mut s, i).unwrap();
            assert_eq!(r.total.len(), 49);
            for (x, a) in accs.iter_mut().enumerate() {
                a.push(f64::from(s.expectation(&PauliString::single(len, x, Pauli::Z)).unwrap()));
            }
        }
        for a in &accs {
            assert!(a.mean().abs() < 3.0 * a.sem().max(1.0 / n as f64), "{} ± {}", a.mean(), a.sem());
        }
    }

    #[test]
    fn crossing_finder() {
        let pts: Vec<(usize, f64, f64)> = [8usize, 16]
            .iter()
            .flat_map(|&l| (0..5).map(move |i| (l, 0.1 * i as f64, (0.2 - 0.1 * i as f64) * l as f64)))
            .collect();
        let (pc, _) = find_crossing(&pts).unwrap();
        assert!((pc - 0.2).abs() < 1e-12);
        let flat: Vec<(usize, f64, f64)> = pts.iter().map(|&(l, p, _)| (l, p, l as f64)).collect();
        assert!(matches!(find_crossing(&flat), Err(Error::NoCrossing(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn entropy_profile_is_lipschitz_and_purification_monotone(seed in any::<u64>(), p in 0.0f64..0.5) {
            let mut cfg = CircuitConfig::new(10, 20, p);
            cfg.master_seed = seed;
            cfg.cuts = (0..=10).collect();
            cfg.boundary = ChainBoundary::Open;
            let r = run_trajectory(&cfg, 0).unwrap();
            for t in 0..=20 {
                for x in 0..10 {
                    prop_assert!((r.cut_entropies[x][t] - r.cut_entropies[x + 1][t]).abs() <= 1.0);
                }
            }
            cfg.initial = Initial::MaximallyMixed;
            let r = run_trajectory(&cfg, 0).unwrap();
            prop_assert!(r.total.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}
