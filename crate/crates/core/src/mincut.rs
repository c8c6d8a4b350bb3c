//! Infinite-local-dimension limit: brickwork circuits whose legs are
//! measured independently, minimal cuts through the unmeasured legs, and
//! the bond-percolation picture of the transition.
//!
//! Geometry. Site `x` carries one leg per layer: leg `(x, t)` sits just above
//! layer `t` and is measured with probability `p`. Layer `t` has gates on the
//! bonds `(x, x+1)` with `x ≡ t (mod 2)`. The dual graph has a node for each
//! gap `g` (between sites `g−1` and `g`) in each slot `s = 0..=T`; slot `s`
//! lies above layer `s−1`, slot 0 is the initial product state and slot `T`
//! the top. Moving sideways in slot `s ≥ 1` crosses leg `(g, s−1)` and costs
//! one unless that leg is measured; moving down from slot `s` is blocked when
//! layer `s−1` has a gate on that gap.

use std::collections::VecDeque;

use rand::Rng;

use crate::collapse::{collapse_fit, CollapseOptions, CollapseResult, CurvePoint};
use crate::parallel::map_indexed;
use crate::rng::substream;
use crate::stats::{linear_fit, mean_sem, LineFit};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeBoundary {
    /// Open chain; both side edges are free cut terminations.
    Open,
    /// Ring with a gate on bond `(L−1, 0)` in odd layers.
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DilutedLattice {
    len: usize,
    depth: usize,
    boundary: LatticeBoundary,
    measured: Vec<bool>,
}

impl DilutedLattice {
    /// Every leg measured independently with probability `p`.
    pub fn sample<R: Rng + ?Sized>(
        len: usize,
        depth: usize,
        p: f64,
        boundary: LatticeBoundary,
        rng: &mut R,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
        }
        let measured = (0..len * depth).map(|_| rng.gen::<f64>() < p).collect();
        DilutedLattice::from_measured(len, depth, boundary, measured)
    }

    /// `measured[t·L + x]` marks leg `(x, t)`.
    pub fn from_measured(len: usize, depth: usize, boundary: LatticeBoundary, measured: Vec<bool>) -> Result<Self> {
        if len < 2 || !len.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("L = {len} must be even and at least 2")));
        }
        if depth == 0 {
            return Err(Error::InvalidParameter("T must be at least 1".into()));
        }
        if measured.len() != len * depth {
            return Err(Error::LengthMismatch { expected: len * depth, got: measured.len() });
        }
        Ok(DilutedLattice { len, depth, boundary, measured })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn boundary(&self) -> LatticeBoundary {
        self.boundary
    }

    pub fn legs(&self) -> usize {
        self.measured.len()
    }

    pub fn is_measured(&self, x: usize, t: usize) -> bool {
        self.measured[t * self.len + x]
    }

    pub fn set_measured(&mut self, x: usize, t: usize, value: bool) {
        self.measured[t * self.len + x] = value;
    }

    pub fn measured_count(&self) -> usize {
        self.measured.iter().filter(|&&m| m).count()
    }

    /// Whether layer `t` has a gate on the bond to the left of gap `g`'s
    /// right site, i.e. on sites `(g−1, g)`.
    pub fn gate_on_gap(&self, g: usize, t: usize) -> bool {
        match self.boundary {
            LatticeBoundary::Open => g >= 1 && g < self.len && (g - 1) % 2 == t % 2,
            LatticeBoundary::Periodic => ((g + self.len - 1) % self.len) % 2 == t % 2,
        }
    }

    fn gaps(&self) -> usize {
        match self.boundary {
            LatticeBoundary::Open => self.len + 1,
            LatticeBoundary::Periodic => self.len,
        }
    }

    fn is_terminal(&self, g: usize, s: usize) -> bool {
        s == 0 || (self.boundary == LatticeBoundary::Open && (g == 0 || g == self.len))
    }

    /// 0/1 breadth-first distances from top gap `start` to every dual node.
    fn distances(&self, start: usize) -> Vec<u32> {
        let gaps = self.gaps();
        let idx = |g: usize, s: usize| s * gaps + g;
        let mut dist = vec![u32::MAX; gaps * (self.depth + 1)];
        let mut queue = VecDeque::new();
        dist[idx(start, self.depth)] = 0;
        queue.push_back((start, self.depth));
        while let Some((g, s)) = queue.pop_front() {
            let here = dist[idx(g, s)];
            if self.is_terminal(g, s) && !(g == start && s == self.depth) {
                continue;
            }
            let mut relax = |g2: usize, s2: usize, w: u32, queue: &mut VecDeque<(usize, usize)>| {
                let nd = here + w;
                if nd < dist[idx(g2, s2)] {
                    dist[idx(g2, s2)] = nd;
                    if w == 0 {
                        queue.push_front((g2, s2));
                    } else {
                        queue.push_back((g2, s2));
                    }
                }
            };
            if s >= 1 && !self.gate_on_gap(g, s - 1) {
                relax(g, s - 1, 0, &mut queue);
            }
            if s < self.depth && !self.gate_on_gap(g, s) {
                relax(g, s + 1, 0, &mut queue);
            }
            if s >= 1 {
                let cost = |x: usize| u32::from(!self.is_measured(x, s - 1));
                match self.boundary {
                    LatticeBoundary::Open => {
                        if g < self.len {
                            relax(g + 1, s, cost(g), &mut queue);
                        }
                        if g > 0 {
                            relax(g - 1, s, cost(g - 1), &mut queue);
                        }
                    }
                    LatticeBoundary::Periodic => {
                        relax((g + 1) % self.len, s, cost(g), &mut queue);
                        let left = (g + self.len - 1) % self.len;
                        relax(left, s, cost(left), &mut queue);
                    }
                }
            }
        }
        dist
    }

    fn terminal_distance(&self, dist: &[u32]) -> u32 {
        let gaps = self.gaps();
        (0..dist.len()).filter(|&i| self.is_terminal(i % gaps, i / gaps)).map(|i| dist[i]).min().unwrap_or(u32::MAX)
    }
}

/// Minimal number of unmeasured legs a domain wall must cross to separate
/// the top legs of sites `a..b` from the rest. On the open chain a gap of
/// 0 or `L` is itself a side boundary.
pub fn minimal_cut_region(lattice: &DilutedLattice, a: usize, b: usize) -> Result<u32> {
    let max_gap = match lattice.boundary {
        LatticeBoundary::Open => lattice.len,
        LatticeBoundary::Periodic => lattice.len - 1,
    };
    if a >= b || b > max_gap + usize::from(lattice.boundary == LatticeBoundary::Periodic) {
        return Err(Error::InvalidParameter(format!("region {a}..{b} invalid for L = {}", lattice.len)));
    }
    let b = if b == lattice.len && lattice.boundary == LatticeBoundary::Periodic { 0 } else { b };
    if a == b {
        return Ok(0);
    }
    let gaps = lattice.gaps();
    let da = lattice.distances(a);
    let db = lattice.distances(b);
    let direct = da[lattice.depth * gaps + b];
    let split = lattice.terminal_distance(&da).saturating_add(lattice.terminal_distance(&db));
    Ok(direct.min(split))
}

/// Half-system cut: region `0..cut_x`.
pub fn minimal_cut(lattice: &DilutedLattice, cut_x: usize) -> Result<u32> {
    if cut_x == 0 || cut_x >= lattice.len {
        return Err(Error::InvalidParameter(format!("cut position {cut_x} not inside 1..{}", lattice.len)));
    }
    minimal_cut_region(lattice, 0, cut_x)
}

/// `S = ℓ_DW · log₂ d` bits, the same for every Renyi index.
pub fn entropy_estimate(ell_dw: u32, d: u32) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("local dimension {d} < 2")));
    }
    Ok(f64::from(ell_dw) * f64::from(d).log2())
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
            self.parent[small] = big;
            self.size[big] += self.size[small];
        }
    }
}

/// Circuit-side graph: node `(x, t)` is the gate covering site `x` in layer
/// `t` (shared by both its sites) or an idle wire point; row `T` holds one
/// top node per site. Unmeasured leg `(x, t)` joins `(x, t)` to `(x, t+1)`.
struct Primal {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    top: Vec<usize>,
    bottom: Vec<usize>,
}

fn primal(lattice: &DilutedLattice) -> Primal {
    let (l, depth) = (lattice.len, lattice.depth);
    let mut id = vec![usize::MAX; l * (depth + 1)];
    let mut nodes = 0;
    for t in 0..depth {
        for x in 0..l {
            if id[t * l + x] != usize::MAX {
                continue;
            }
            id[t * l + x] = nodes;
            let right = (x + 1) % l;
            let covers = lattice.gate_on_gap(x + 1, t) && (x + 1 < l || lattice.boundary == LatticeBoundary::Periodic);
            if covers {
                id[t * l + right] = nodes;
            }
            nodes += 1;
        }
    }
    for x in 0..l {
        id[depth * l + x] = nodes;
        nodes += 1;
    }
    let mut edges = Vec::new();
    for t in 0..depth {
        for x in 0..l {
            if !lattice.is_measured(x, t) {
                edges.push((id[t * l + x], id[(t + 1) * l + x]));
            }
        }
    }
    Primal { nodes, edges, top: id[depth * l..].to_vec(), bottom: id[..l].to_vec() }
}

/// Largest number of unmeasured legs the exhaustive oracle will enumerate.
pub const MAX_BRUTE_LINKS: usize = 32;

/// Exhaustive oracle for [`minimal_cut_region`]: the smallest set of
/// unmeasured legs whose removal disconnects the top legs of `a..b` from
/// the other top legs, found by trying all subsets in order of size.
pub fn brute_force_cut(lattice: &DilutedLattice, a: usize, b: usize) -> Result<u32> {
    let g = primal(lattice);
    if g.edges.len() > MAX_BRUTE_LINKS {
        return Err(Error::GuardExceeded(format!("{} unmeasured legs", g.edges.len())));
    }
    let inside: Vec<bool> = (0..lattice.len).map(|x| x >= a && x < b).collect();
    let separated = |removed: &[usize]| {
        let mut uf = UnionFind::new(g.nodes + 2);
        let (src, dst) = (g.nodes, g.nodes + 1);
        for (x, &n) in g.top.iter().enumerate() {
            uf.union(n, if inside[x] { src } else { dst });
        }
        let mut r = 0;
        for (i, &(u, v)) in g.edges.iter().enumerate() {
            if r < removed.len() && removed[r] == i {
                r += 1;
                continue;
            }
            uf.union(u, v);
        }
        uf.find(src) != uf.find(dst)
    };
    let m = g.edges.len();
    for k in 0..=m {
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            if separated(&comb) {
                return Ok(k as u32);
            }
            let mut i = k;
            while i > 0 && comb[i - 1] == m - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    Ok(m as u32)
}

/// Cluster statistics of the unmeasured-leg bond configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterStats {
    /// Some cluster joins the initial-state row to the top row.
    pub spanning: bool,
    /// Size of the largest cluster over the number of nodes.
    pub largest_fraction: f64,
    pub clusters: usize,
}

pub fn cluster_stats(lattice: &DilutedLattice) -> ClusterStats {
    let g = primal(lattice);
    let mut uf = UnionFind::new(g.nodes);
    for &(u, v) in &g.edges {
        uf.union(u, v);
    }
    let mut bottom_roots: Vec<usize> = g.bottom.iter().map(|&n| uf.find(n)).collect();
    bottom_roots.sort_unstable();
    let spanning = g.top.iter().any(|&n| bottom_roots.binary_search(&uf.find(n)).is_ok());
    let mut clusters = 0;
    let mut largest = 0;
    for n in 0..g.nodes {
        if uf.find(n) == n {
            clusters += 1;
            largest = largest.max(uf.size[n]);
        }
    }
    ClusterStats { spanning, largest_fraction: largest as f64 / g.nodes as f64, clusters }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub sizes: Vec<usize>,
    /// `T = depth_factor · L`.
    pub depth_factor: usize,
    pub probabilities: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub boundary: LatticeBoundary,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub len: usize,
    pub depth: usize,
    pub p: f64,
    /// Region is `0..cut` (half system).
    pub cut: usize,
    pub mean_ldw: f64,
    pub sem: f64,
    pub spanning_prob: f64,
    pub spanning_sem: f64,
    pub largest_cluster: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sample `i` at size index `a` and probability index `b` uses
/// `substream(seed, i, a << 32 | b)`.
pub fn phase_scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    if cfg.sizes.is_empty() || cfg.probabilities.is_empty() || cfg.samples < 2 || cfg.depth_factor == 0 {
        return Err(Error::InvalidParameter("scan needs sizes, probabilities, depth factor and at least two samples".into()));
    }
    let mut rows = Vec::new();
    for (a, &len) in cfg.sizes.iter().enumerate() {
        let depth = cfg.depth_factor * len;
        for (b, &p) in cfg.probabilities.iter().enumerate() {
            let purpose = (a as u64) << 32 | b as u64;
            let results = map_indexed(cfg.samples, cfg.workers, |i| -> Result<(f64, ClusterStats)> {
                let mut rng = substream(cfg.seed, i as u64, purpose);
                let lat = DilutedLattice::sample(len, depth, p, cfg.boundary, &mut rng)?;
                Ok((f64::from(minimal_cut(&lat, len / 2)?), cluster_stats(&lat)))
            });
            let results: Vec<(f64, ClusterStats)> = results.into_iter().collect::<Result<_>>()?;
            let ells: Vec<f64> = results.iter().map(|r| r.0).collect();
            let spans: Vec<f64> = results.iter().map(|r| f64::from(u8::from(r.1.spanning))).collect();
            let (mean_ldw, sem) = mean_sem(&ells);
            let (spanning_prob, _) = mean_sem(&spans);
            let spanning_sem = beta_sem(spans.iter().filter(|&&s| s > 0.0).count(), spans.len());
            let largest_cluster = results.iter().map(|r| r.1.largest_fraction).sum::<f64>() / results.len() as f64;
            rows.push(ScanRow {
                len,
                depth,
                p,
                cut: len / 2,
                mean_ldw,
                sem,
                spanning_prob,
                spanning_sem,
                largest_cluster,
                samples: cfg.samples,
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}

/// Standard deviation of the uniform-prior Beta posterior for `k` successes
/// in `n` trials; stays positive when `k` is 0 or `n`.
fn beta_sem(k: usize, n: usize) -> f64 {
    let (a, b) = ((k + 1) as f64, (n - k + 1) as f64);
    (a * b / ((a + b) * (a + b) * (a + b + 1.0))).sqrt()
}

/// Collapse of the spanning probability.
pub fn estimate_nu(rows: &[ScanRow], opts: &CollapseOptions) -> Result<CollapseResult> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.len).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::InsufficientRange(format!("{} system sizes, need at least 3", sizes.len())));
    }
    let points: Vec<CurvePoint> = rows
        .iter()
        .map(|r| CurvePoint {
            size: r.len as f64,
            param: r.p,
            value: r.spanning_prob,
            sem: r.spanning_sem,
        })
        .collect();
    collapse_fit(&points, opts)
}

/// Least-squares slope of mean `ℓ_DW` against `ln L` (natural log).
pub fn log_slope(rows: &[ScanRow]) -> Result<LineFit> {
    let x: Vec<f64> = rows.iter().map(|r| (r.len as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean_ldw).collect();
    linear_fit(&x, &y).ok_or_else(|| Error::InsufficientRange("need two distinct sizes".into()))
}
