//! Marcinkiewicz-Zygmund cycles on `S²`.
//!
//! Pipeline: zonal equal-area partition → doubled adjacency multigraph →
//! Euler tour from patch 0 → one point pair per patch inside its inner cap →
//! geodesic cycle following the tour. [`mz_test`] compares `L^p` norms of
//! random polynomials along the cycle with their norms on the sphere.

use crate::design::sample_seed;
use crate::error::{Error, Result};
use crate::harmonics::{harmonic_count, polish_max, random_harmonic, HarmonicBasis, SphereGrid};
use crate::quadrature::GaussLegendre;
use crate::sphere::{distance, GeodesicCycle, SpherePoint};
use ndarray::{Array2, ArrayView2};
use serde::{Serialize, Serializer};
use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

/// Angular tolerance for closure intersection and membership tests.
pub const ADJACENCY_TOL: f64 = 1e-9;

/// Default constant in `n = ceil(C_n t²)`.
pub const DEFAULT_CN: f64 = 4.0;

/// One region of the partition: a polar cap or a latitude-longitude rectangle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Patch {
    pub id: usize,
    /// Zone index: 0 is the north cap, the last zone the south cap.
    pub zone: usize,
    /// Colatitude range `[θ₀, θ₁]`.
    pub theta: [f64; 2],
    /// Longitude range `[φ₀, φ₁]`; `[0, 2π]` for caps and full rings.
    pub phi: [f64; 2],
    pub area: f64,
    pub center: SpherePoint,
    pub inner_cap_radius: f64,
    pub diameter: f64,
}

impl Patch {
    fn full_longitude(&self) -> bool {
        self.phi[1] - self.phi[0] >= TAU - 1e-12
    }

    /// Closed-set membership with tolerance [`ADJACENCY_TOL`].
    pub fn contains(&self, p: &[f64]) -> bool {
        let (theta, phi) = spherical(p);
        if theta < self.theta[0] - ADJACENCY_TOL || theta > self.theta[1] + ADJACENCY_TOL {
            return false;
        }
        // longitude is irrelevant at the poles and for full rings
        if self.full_longitude() || theta.sin() < ADJACENCY_TOL {
            return true;
        }
        let width = self.phi[1] - self.phi[0];
        let offset = (phi - self.phi[0]).rem_euclid(TAU);
        offset <= width + ADJACENCY_TOL || offset >= TAU - ADJACENCY_TOL
    }

    /// Local east direction at the center; fixed tangents at the poles.
    pub fn east(&self) -> [f64; 3] {
        let c = self.center.coords();
        if c[2] > 1.0 - 1e-15 {
            [0.0, 1.0, 0.0]
        } else if c[2] < -1.0 + 1e-15 {
            [1.0, 0.0, 0.0]
        } else {
            let phi = c[1].atan2(c[0]);
            [-phi.sin(), phi.cos(), 0.0]
        }
    }
}

/// Colatitude and longitude of a unit vector.
pub fn spherical(p: &[f64]) -> (f64, f64) {
    let theta = p[2].clamp(-1.0, 1.0).acos();
    let phi = p[1].atan2(p[0]).rem_euclid(TAU);
    (theta, phi)
}

fn from_spherical(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    pub n: usize,
    pub patches: Vec<Patch>,
    /// Patch ids per zone, north to south.
    pub zones: Vec<Vec<usize>>,
    /// Largest patch diameter `‖R‖`.
    pub size: f64,
}

impl Partition {
    /// `‖R‖ √n`.
    pub fn c_diam(&self) -> f64 {
        self.size * (self.n as f64).sqrt()
    }

    pub fn min_inner_radius(&self) -> f64 {
        self.patches.iter().map(|p| p.inner_cap_radius).fold(f64::INFINITY, f64::min)
    }

    /// `min_j r_j √n`.
    pub fn c_in(&self) -> f64 {
        self.min_inner_radius() * (self.n as f64).sqrt()
    }

    pub fn max_area_error(&self) -> f64 {
        let target = 1.0 / self.n as f64;
        self.patches.iter().map(|p| (p.area - target).abs()).fold(0.0, f64::max)
    }
}

/// Distance from a point at colatitude `theta` to the two meridians bounding
/// a wedge of longitude width `width` centred on it.
fn wedge_distance(theta: f64, width: f64) -> f64 {
    if width >= TAU - 1e-12 {
        f64::INFINITY
    } else if width <= PI {
        (theta.sin() * (0.5 * width).sin()).asin()
    } else {
        theta.min(PI - theta)
    }
}

/// Boundary sample points of a patch, used for the diameter search.
fn boundary_samples(theta: [f64; 2], phi: [f64; 2], per_edge: usize) -> Vec<[f64; 3]> {
    let mut pts = Vec::with_capacity(4 * per_edge);
    let lerp = |a: f64, b: f64, k: usize| a + (b - a) * k as f64 / (per_edge - 1) as f64;
    for k in 0..per_edge {
        let ph = lerp(phi[0], phi[1], k);
        pts.push(from_spherical(theta[0], ph));
        pts.push(from_spherical(theta[1], ph));
        let th = lerp(theta[0], theta[1], k);
        pts.push(from_spherical(th, phi[0]));
        pts.push(from_spherical(th, phi[1]));
    }
    pts
}

fn max_pairwise_distance(pts: &[[f64; 3]]) -> f64 {
    let mut best: f64 = 1.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.min(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
        }
    }
    best.clamp(-1.0, 1.0).acos()
}

/// Patch counts per collar by the collar-rounding recipe.
fn collar_counts(n: usize) -> Vec<usize> {
    let nf = n as f64;
    let theta_cap = (1.0 - 2.0 / nf).acos();
    let ideal_angle = (4.0 * PI / nf).sqrt();
    let collars = (((PI - 2.0 * theta_cap) / ideal_angle).round() as usize).max(1);
    let fitting = (PI - 2.0 * theta_cap) / collars as f64;
    let mut counts = Vec::with_capacity(collars);
    let mut carry = 0.0;
    let mut assigned = 0usize;
    for i in 0..collars {
        let t0 = theta_cap + i as f64 * fitting;
        let t1 = t0 + fitting;
        let ideal = nf * (t0.cos() - t1.cos()) / 2.0;
        let m = if i + 1 == collars {
            n - 2 - assigned
        } else {
            let m = (ideal + carry).round().max(0.0) as usize;
            m.min(n - 2 - assigned)
        };
        carry += ideal - m as f64;
        assigned += m;
        counts.push(m);
    }
    counts.retain(|&m| m > 0);
    counts
}

/// Zonal equal-area partition of `S²` into `n ≥ 2` patches: two polar caps
/// and latitude collars split into equal longitude sectors. Zone boundaries
/// satisfy `cos θ = 1 − 2c/n` for cumulative patch counts `c`, so every
/// patch has normalized area exactly `1/n`.
pub fn equal_area_partition(n: usize) -> Result<Partition> {
    if n < 2 {
        return Err(Error::ParameterOutOfRange(format!("partition needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    let counts: Vec<usize> = if n == 2 { Vec::new() } else { collar_counts(n) };
    let boundary = |c: usize| (1.0 - 2.0 * c as f64 / nf).clamp(-1.0, 1.0).acos();

    let mut patches = Vec::with_capacity(n);
    let mut zones = Vec::new();
    let cap = |id: usize, zone: usize, theta: [f64; 2], north: bool| -> Result<Patch> {
        let radius = if north { theta[1] } else { PI - theta[0] };
        let center = SpherePoint::new(vec![0.0, 0.0, if north { 1.0 } else { -1.0 }])?;
        Ok(Patch {
            id,
            zone,
            theta,
            phi: [0.0, TAU],
            area: (theta[0].cos() - theta[1].cos()) / 2.0,
            center,
            inner_cap_radius: radius,
            diameter: (2.0 * radius).min(PI),
        })
    };
    let first = boundary(1);
    patches.push(cap(0, 0, [0.0, first], true)?);
    zones.push(vec![0]);
    let mut cumulative = 1;
    for (z, &m) in counts.iter().enumerate() {
        let theta = [boundary(cumulative), boundary(cumulative + m)];
        cumulative += m;
        let width = TAU / m as f64;
        let theta_mid = 0.5 * (theta[0] + theta[1]);
        let radius = (theta_mid - theta[0])
            .min(theta[1] - theta_mid)
            .min(wedge_distance(theta_mid, width));
        let diameter = max_pairwise_distance(&boundary_samples(theta, [0.0, width], 16));
        let mut ids = Vec::with_capacity(m);
        for k in 0..m {
            let phi = [k as f64 * width, (k + 1) as f64 * width];
            let id = patches.len();
            ids.push(id);
            patches.push(Patch {
                id,
                zone: z + 1,
                theta,
                phi,
                area: (theta[0].cos() - theta[1].cos()) / 2.0 / m as f64,
                center: SpherePoint::new(from_spherical(theta_mid, 0.5 * (phi[0] + phi[1])).to_vec())?,
                inner_cap_radius: radius,
                diameter,
            });
        }
        zones.push(ids);
    }
    let last = patches.len();
    patches.push(cap(last, zones.len(), [boundary(n - 1), PI], false)?);
    zones.push(vec![last]);
    debug_assert_eq!(patches.len(), n);
    let size = patches.iter().map(|p| p.diameter).fold(0.0, f64::max);
    Ok(Partition { n, patches, zones, size })
}

fn arcs_touch(a: [f64; 2], b: [f64; 2]) -> bool {
    if a[1] - a[0] >= TAU - 1e-12 || b[1] - b[0] >= TAU - 1e-12 {
        return true;
    }
    (-1..=1).any(|k: i32| {
        let s = k as f64 * TAU;
        b[0] + s <= a[1] + ADJACENCY_TOL && a[0] <= b[1] + s + ADJACENCY_TOL
    })
}

/// Adjacency multigraph: every pair of patches with intersecting closures is
/// joined by two parallel edges.
#[derive(Debug, Clone, Serialize)]
pub struct PatchGraph {
    pub n: usize,
    /// Undirected adjacencies `(j, k)`, `j < k`, sorted.
    pub adjacencies: Vec<(usize, usize)>,
    /// Edge `e` joins `adjacencies[e / 2]`.
    pub edge_count: usize,
    /// Sorted neighbour lists.
    pub neighbors: Vec<Vec<usize>>,
}

impl PatchGraph {
    /// `#M_j`: patches other than `R_j` whose closure meets `R̄_j`.
    pub fn kissing(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn max_kissing(&self) -> usize {
        self.kissing().into_iter().max().unwrap_or(0)
    }

    pub fn degree(&self, v: usize) -> usize {
        2 * self.neighbors[v].len()
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        self.adjacencies[e / 2]
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Adjacency from the zone structure: neighbours within a collar, patches of
/// consecutive zones with touching longitude intervals, and caps with their
/// whole neighbouring zone.
pub fn build_graph(partition: &Partition) -> Result<PatchGraph> {
    let mut pairs = BTreeSet::new();
    let zones = &partition.zones;
    let patches = &partition.patches;
    for ids in zones {
        let m = ids.len();
        if m >= 2 {
            for k in 0..m {
                let (a, b) = (ids[k], ids[(k + 1) % m]);
                pairs.insert((a.min(b), a.max(b)));
            }
        }
    }
    for w in zones.windows(2) {
        for &a in &w[0] {
            for &b in &w[1] {
                if arcs_touch(patches[a].phi, patches[b].phi) {
                    pairs.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    let adjacencies: Vec<(usize, usize)> = pairs.into_iter().collect();
    let mut neighbors = vec![Vec::new(); partition.n];
    for &(a, b) in &adjacencies {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    neighbors.iter_mut().for_each(|v| v.sort_unstable());
    let graph = PatchGraph {
        n: partition.n,
        edge_count: 2 * adjacencies.len(),
        adjacencies,
        neighbors,
    };
    if !graph.is_connected() {
        return Err(Error::Graph("patch graph is disconnected".into()));
    }
    Ok(graph)
}

/// Closed walk traversing every multi-edge once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerTour {
    /// Visited patches `v_0 = 0, v_1, …, v_E = 0`.
    pub vertices: Vec<usize>,
    /// Edge ids, `edges[i]` joining `vertices[i]` and `vertices[i+1]`.
    pub edges: Vec<usize>,
}

/// Hierholzer's algorithm from patch 0, always taking the unused edge to
/// the smallest neighbour id first.
pub fn euler_cycle(graph: &PatchGraph) -> Result<EulerTour> {
    if graph.n == 0 {
        return Err(Error::Graph("empty graph".into()));
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph.n];
    for (i, &(a, b)) in graph.adjacencies.iter().enumerate() {
        for e in [2 * i, 2 * i + 1] {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
    }
    for (v, list) in adj.iter_mut().enumerate() {
        if list.len() % 2 == 1 {
            return Err(Error::Graph(format!("vertex {v} has odd degree")));
        }
        list.sort_unstable();
    }
    let mut used = vec![false; graph.edge_count];
    let mut next = vec![0usize; graph.n];
    let mut stack: Vec<(usize, Option<usize>)> = vec![(0, None)];
    let mut circuit: Vec<(usize, Option<usize>)> = Vec::with_capacity(graph.edge_count + 1);
    while let Some(&(v, _)) = stack.last() {
        while next[v] < adj[v].len() && used[adj[v][next[v]].1] {
            next[v] += 1;
        }
        if next[v] < adj[v].len() {
            let (w, e) = adj[v][next[v]];
            used[e] = true;
            stack.push((w, Some(e)));
        } else {
            circuit.push(stack.pop().expect("stack is non-empty"));
        }
    }
    if used.iter().any(|u| !u) {
        return Err(Error::Graph("graph is disconnected; no Euler cycle".into()));
    }
    circuit.reverse();
    // each stack entry carries the edge used to reach it; after reversal the
    // edge of entry i+1 joins vertices i and i+1
    let vertices: Vec<usize> = circuit.iter().map(|(v, _)| *v).collect();
    let edges: Vec<usize> = circuit[1..].iter().map(|(_, e)| e.expect("edge recorded")).collect();
    Ok(EulerTour { vertices, edges })
}

/// Per-patch point pair `(x_{2j−1}, x_{2j})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointPair {
    pub odd: SpherePoint,
    pub even: SpherePoint,
}

/// Points at distance `r/2` on either side of each patch center along its
/// east direction, `r = min_j inner_cap_radius_j`.
pub fn select_pairs(partition: &Partition) -> Result<Vec<PointPair>> {
    let spacing = partition.min_inner_radius();
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::Degenerate);
    }
    let (s, c) = (0.5 * spacing).sin_cos();
    partition
        .patches
        .iter()
        .map(|p| {
            let x = p.center.coords();
            let e = p.east();
            let at = |sign: f64| SpherePoint::new((0..3).map(|i| c * x[i] + sign * s * e[i]).collect());
            Ok(PointPair {
                odd: at(-1.0)?,
                even: at(1.0)?,
            })
        })
        .collect()
}

/// Control points following the tour: on the first visit of a patch the
/// cycle arrives at its odd point and crosses to the even point; on later
/// visits it arrives at the odd point and moves on. The cycle has
/// `n + E` arcs.
pub fn assemble_cycle(partition: &Partition, tour: &EulerTour, pairs: &[PointPair]) -> Result<GeodesicCycle> {
    let n = partition.n;
    if pairs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pairs.len(),
        });
    }
    let v = &tour.vertices;
    if v.first() != Some(&0) || v.last() != Some(&0) {
        return Err(Error::Graph("tour must start and end at patch 0".into()));
    }
    let mut visited = vec![false; n];
    let mut points = Vec::with_capacity(n + tour.edges.len());
    for &j in &v[..v.len() - 1] {
        points.push(pairs[j].odd.clone());
        if !visited[j] {
            visited[j] = true;
            points.push(pairs[j].even.clone());
        }
    }
    if visited.iter().any(|s| !s) {
        return Err(Error::Graph("tour misses a patch".into()));
    }
    debug_assert_eq!(points.len(), n + tour.edges.len());
    GeodesicCycle::new(points)
}

/// Summary of one pipeline run.
#[derive(Debug, Clone, Serialize)]
pub struct MzConstruction {
    pub t: usize,
    pub n: usize,
    pub c_n: f64,
    pub c_diam: f64,
    pub c_in: f64,
    pub max_kissing: usize,
    pub edge_count: usize,
    pub arc_count: usize,
    pub length: f64,
    pub length_over_t: f64,
    pub max_area_error: f64,
    #[serde(skip)]
    pub partition: Partition,
    #[serde(skip)]
    pub graph: PatchGraph,
    #[serde(skip)]
    pub tour: EulerTour,
    #[serde(skip)]
    pub pairs: Vec<PointPair>,
    #[serde(skip)]
    pub cycle: GeodesicCycle,
}

pub fn patch_count(t: usize, c_n: f64) -> usize {
    ((c_n * (t * t) as f64).ceil() as usize).max(2)
}

/// Runs the pipeline with `n = ceil(C_n t²)` patches.
pub fn build_mz_cycle(t: usize, c_n: f64) -> Result<MzConstruction> {
    if t == 0 || !(c_n > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("need t >= 1 and C_n > 0, got t={t}, C_n={c_n}")));
    }
    let n = patch_count(t, c_n);
    let partition = equal_area_partition(n)?;
    let graph = build_graph(&partition)?;
    let tour = euler_cycle(&graph)?;
    let pairs = select_pairs(&partition)?;
    let cycle = assemble_cycle(&partition, &tour, &pairs)?;
    Ok(MzConstruction {
        t,
        n,
        c_n,
        c_diam: partition.c_diam(),
        c_in: partition.c_in(),
        max_kissing: graph.max_kissing(),
        edge_count: graph.edge_count,
        arc_count: cycle.len(),
        length: cycle.length(),
        length_over_t: cycle.length() / t as f64,
        max_area_error: partition.max_area_error(),
        partition,
        graph,
        tour,
        pairs,
        cycle,
    })
}

/// Exponent of an `L^p` norm, `1 ≤ p ≤ ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpNorm {
    Finite(f64),
    Infinity,
}

impl LpNorm {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(LpNorm::Infinity)
        } else if p >= 1.0 {
            Ok(LpNorm::Finite(p))
        } else {
            Err(Error::ParameterOutOfRange(format!("p must satisfy 1 <= p <= inf, got {p}")))
        }
    }
}

impl FromStr for LpNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(LpNorm::Infinity),
            v => LpNorm::new(v.parse().map_err(|_| Error::Parse(format!("invalid p '{v}'")))?),
        }
    }
}

impl fmt::Display for LpNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpNorm::Finite(p) => write!(f, "{p}"),
            LpNorm::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for LpNorm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MzReport {
    pub t: usize,
    pub p: LpNorm,
    pub num_samples: usize,
    pub seed: u64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_mean: f64,
    pub curve_length: f64,
    pub length_over_t: f64,
    pub arc_count: usize,
}

/// Nodes and weights (summing to the cycle length) along the cycle.
fn curve_nodes(cycle: &GeodesicCycle, t: usize, p: LpNorm) -> (Vec<[f64; 3]>, Vec<f64>) {
    let mut pts = Vec::new();
    let mut weights = Vec::new();
    let mut buf = [0.0; 3];
    match p {
        LpNorm::Finite(_) => {
            // composite 8-point rule with pieces no longer than 1/t
            let rule = GaussLegendre::new(8);
            for arc in cycle.arcs().iter().filter(|a| !a.is_degenerate()) {
                let pieces = (arc.length() * t as f64).ceil().max(1.0) as usize;
                for (s, w) in rule.composite(pieces) {
                    arc.eval_into(s, &mut buf);
                    pts.push(buf);
                    weights.push(w * arc.length());
                }
            }
        }
        LpNorm::Infinity => {
            // each undirected arc once, sampled with step at most 0.01/t
            let step = 0.01 / t as f64;
            let mut seen = BTreeSet::new();
            for arc in cycle.arcs().iter().filter(|a| !a.is_degenerate()) {
                let key = |p: &SpherePoint| p.coords().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
                let (a, b) = (key(arc.start()), key(arc.end()));
                if !seen.insert(if a <= b { (a, b) } else { (b, a) }) {
                    continue;
                }
                let count = (arc.length() / step).ceil().max(1.0) as usize;
                for k in 0..=count {
                    arc.eval_into(k as f64 / count as f64, &mut buf);
                    pts.push(buf);
                    weights.push(0.0);
                }
            }
        }
    }
    (pts, weights)
}

const CHUNK: usize = 4096;

/// Visits basis values at `points` chunk by chunk as a `chunk × K` matrix.
fn for_each_chunk<F: FnMut(usize, ArrayView2<'_, f64>)>(basis: &HarmonicBasis, points: &[[f64; 3]], mut f: F) {
    let k = basis.len();
    let mut block = Array2::<f64>::zeros((CHUNK.min(points.len().max(1)), k));
    for (c, chunk) in points.chunks(CHUNK).enumerate() {
        for (i, p) in chunk.iter().enumerate() {
            basis.eval_into(p, block.row_mut(i).as_slice_mut().expect("contiguous row"));
        }
        f(c * CHUNK, block.slice(ndarray::s![..chunk.len(), ..]));
    }
}

/// Ratios `‖f‖_{L^p(γ)} / ‖f‖_{L^p(S²)}` for the polynomials whose harmonic
/// coefficients are the columns of `coeffs` (`(t+1)² × S`).
pub fn lp_ratios(cycle: &GeodesicCycle, t: usize, p: LpNorm, coeffs: &Array2<f64>) -> Result<Vec<f64>> {
    if cycle.ambient_dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: cycle.ambient_dim(),
        });
    }
    let k = harmonic_count(t);
    if coeffs.nrows() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: coeffs.nrows(),
        });
    }
    let samples = coeffs.ncols();
    let basis = HarmonicBasis::new(t);
    let (nodes, weights) = curve_nodes(cycle, t, p);
    let length: f64 = match p {
        LpNorm::Finite(_) => weights.iter().sum(),
        LpNorm::Infinity => 1.0,
    };
    let mut curve_acc = vec![0.0; samples];
    let mut argmax = vec![[0.0; 3]; samples];
    for_each_chunk(&basis, &nodes, |offset, block| {
        let values = block.dot(coeffs);
        for (i, row) in values.outer_iter().enumerate() {
            for (s, v) in row.iter().enumerate() {
                match p {
                    LpNorm::Finite(q) => curve_acc[s] += weights[offset + i] * v.abs().powf(q),
                    LpNorm::Infinity => {
                        if v.abs() > curve_acc[s] {
                            curve_acc[s] = v.abs();
                            argmax[s] = nodes[offset + i];
                        }
                    }
                }
            }
        }
    });
    let curve_norm: Vec<f64> = match p {
        LpNorm::Finite(q) => curve_acc.iter().map(|v| (v / length).powf(1.0 / q)).collect(),
        LpNorm::Infinity => curve_acc.clone(),
    };
    let sphere_norm: Vec<f64> = match p {
        LpNorm::Finite(2.0) => coeffs
            .columns()
            .into_iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect(),
        LpNorm::Finite(q) => {
            let grid = SphereGrid::new(2 * t + 4);
            let mut acc = vec![0.0; samples];
            for_each_chunk(&basis, grid.points(), |offset, block| {
                let values = block.dot(coeffs);
                for (i, row) in values.outer_iter().enumerate() {
                    let w = grid.weights()[offset + i];
                    for (s, v) in row.iter().enumerate() {
                        acc[s] += w * v.abs().powf(q);
                    }
                }
            });
            acc.into_iter().map(|v| v.powf(1.0 / q)).collect()
        }
        LpNorm::Infinity => sphere_sup(&basis, coeffs, &argmax, &curve_norm),
    };
    Ok(curve_norm.iter().zip(&sphere_norm).map(|(c, s)| c / s).collect())
}

/// Grid maximum polished by local search, seeded with the best grid points
/// and the maximizer along the curve.
fn sphere_sup(basis: &HarmonicBasis, coeffs: &Array2<f64>, curve_argmax: &[[f64; 3]], curve_max: &[f64]) -> Vec<f64> {
    let t = basis.degree();
    let grid = SphereGrid::new(2 * t + 4);
    let samples = coeffs.ncols();
    let mut top: Vec<Vec<([f64; 3], f64)>> = vec![Vec::new(); samples];
    for_each_chunk(basis, grid.points(), |offset, block| {
        let values = block.dot(coeffs);
        for (i, row) in values.outer_iter().enumerate() {
            for (s, v) in row.iter().enumerate() {
                let list = &mut top[s];
                let v = v.abs();
                if list.len() < 8 || v > list[list.len() - 1].1 {
                    list.push((grid.points()[offset + i], v));
                    list.sort_by(|a, b| b.1.total_cmp(&a.1));
                    list.truncate(8);
                }
            }
        }
    });
    let step = PI / grid.n_theta() as f64;
    (0..samples)
        .map(|s| {
            let c = coeffs.column(s);
            let f = |x: &[f64]| {
                let mut y = vec![0.0; basis.len()];
                basis.eval_into(x, &mut y);
                y.iter().zip(c.iter()).map(|(a, b)| a * b).sum::<f64>().abs()
            };
            let seeds = top[s].iter().copied().chain([(curve_argmax[s], curve_max[s])]);
            seeds
                .map(|(x, v)| polish_max(&f, x, v, step))
                .fold(curve_max[s], f64::max)
        })
        .collect()
}

/// Random polynomials in `Π_t` as columns of a coefficient matrix; samples
/// with `L²` norm below `1e−14` are redrawn.
pub fn random_coefficients(t: usize, num_samples: usize, seed: u64) -> Array2<f64> {
    let k = harmonic_count(t);
    let mut m = Array2::zeros((k, num_samples));
    for s in 0..num_samples {
        let mut attempt = 0u64;
        let f = loop {
            let f = random_harmonic(t, sample_seed(seed, s as u64 + attempt * num_samples as u64));
            if f.l2_norm() >= 1e-14 {
                break f;
            }
            attempt += 1;
        };
        m.column_mut(s).assign(&ndarray::ArrayView1::from(f.coeffs()));
    }
    m
}

/// Empirical Marcinkiewicz-Zygmund ratios of `num_samples` random
/// polynomials of degree `≤ t`.
pub fn mz_test(cycle: &GeodesicCycle, t: usize, p: LpNorm, num_samples: usize, seed: u64) -> Result<MzReport> {
    if t == 0 {
        return Err(Error::ParameterOutOfRange("t must be at least 1".into()));
    }
    if num_samples == 0 {
        return Err(Error::ParameterOutOfRange("need at least one sample".into()));
    }
    let coeffs = random_coefficients(t, num_samples, seed);
    let ratios = lp_ratios(cycle, t, p, &coeffs)?;
    Ok(MzReport {
        t,
        p,
        num_samples,
        seed,
        ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        ratio_max: ratios.iter().copied().fold(0.0, f64::max),
        ratio_mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
        curve_length: cycle.length(),
        length_over_t: cycle.length() / t as f64,
        arc_count: cycle.len(),
    })
}

/// Largest distance of sampled points of an inner arc from its patch, or
/// `None` if every sample lies in the patch.
pub fn inner_arc_outside(patch: &Patch, pair: &PointPair, samples: usize) -> Result<Option<f64>> {
    let arc = crate::sphere::GeodesicArc::new(pair.odd.clone(), pair.even.clone())?;
    for k in 0..=samples {
        let p = arc.eval(k as f64 / samples as f64);
        if !patch.contains(p.coords()) {
            return Ok(Some(distance(&p, &patch.center)?));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_hemispheres() {
        let p = equal_area_partition(2).unwrap();
        assert_eq!(p.patches.len(), 2);
        for patch in &p.patches {
            assert!((patch.area - 0.5).abs() < 1e-15);
        }
        let g = build_graph(&p).unwrap();
        assert_eq!(g.adjacencies, vec![(0, 1)]);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 2);
        let tour = euler_cycle(&g).unwrap();
        assert_eq!(tour.vertices, vec![0, 1, 0]);
        let pairs = select_pairs(&p).unwrap();
        let c = assemble_cycle(&p, &tour, &pairs).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn areas_are_exact() {
        for n in [3, 5, 10, 17, 100, 1000] {
            let p = equal_area_partition(n).unwrap();
            assert_eq!(p.patches.len(), n);
            assert!(p.max_area_error() < 1e-12, "n={n}");
            let total: f64 = p.patches.iter().map(|q| q.area).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for q in &p.patches {
                assert!(q.inner_cap_radius > 0.0);
                assert!(q.contains(q.center.coords()));
            }
        }
        assert!(equal_area_partition(1).is_err());
    }

    #[test]
    fn diameter_constant() {
        let p = equal_area_partition(100).unwrap();
        assert!(p.c_diam() <= 7.0, "{}", p.c_diam());
    }

    #[test]
    fn graph_degrees_even_and_connected() {
        for n in [10, 50, 200] {
            let p = equal_area_partition(n).unwrap();
            let g = build_graph(&p).unwrap();
            assert!(g.is_connected());
            assert!((0..n).all(|v| g.degree(v).is_multiple_of(2)));
            let tour = euler_cycle(&g).unwrap();
            assert_eq!(tour.edges.len(), g.edge_count);
            let mut e = tour.edges.clone();
            e.sort_unstable();
            assert_eq!(e, (0..g.edge_count).collect::<Vec<_>>());
            for (i, &edge) in tour.edges.iter().enumerate() {
                let (a, b) = g.edge_endpoints(edge);
                let (u, v) = (tour.vertices[i], tour.vertices[i + 1]);
                assert!((a, b) == (u.min(v), u.max(v)));
            }
            assert_eq!(euler_cycle(&g).unwrap(), tour);
        }
    }

    #[test]
    fn pairs_have_common_spacing_and_stay_inside() {
        let p = equal_area_partition(64).unwrap();
        let pairs = select_pairs(&p).unwrap();
        let r = p.min_inner_radius();
        for (patch, pair) in p.patches.iter().zip(&pairs) {
            assert!((distance(&pair.odd, &pair.even).unwrap() - r).abs() < 1e-12);
            assert!(patch.contains(pair.odd.coords()) && patch.contains(pair.even.coords()));
            assert!(inner_arc_outside(patch, pair, 50).unwrap().is_none());
        }
        // the pole pair straddles the pole symmetrically
        let north = &pairs[0];
        assert!((north.odd.coords()[2] - north.even.coords()[2]).abs() < 1e-15);
        assert!((north.odd.coords()[1] + north.even.coords()[1]).abs() < 1e-15);
    }

    #[test]
    fn cycle_arc_count() {
        let c = build_mz_cycle(3, DEFAULT_CN).unwrap();
        assert_eq!(c.n, 36);
        assert_eq!(c.arc_count, c.n + c.edge_count);
    }

    #[test]
    fn constant_polynomial_ratio_is_one() {
        let c = build_mz_cycle(2, DEFAULT_CN).unwrap();
        let mut coeffs = Array2::zeros((harmonic_count(2), 1));
        coeffs[[0, 0]] = 1.7;
        for p in [LpNorm::Finite(1.0), LpNorm::Finite(2.0), LpNorm::Finite(3.5), LpNorm::Infinity] {
            let r = lp_ratios(&c.cycle, 2, p, &coeffs).unwrap();
            assert!((r[0] - 1.0).abs() < 1e-13, "{p}: {}", r[0]);
        }
    }

    #[test]
    fn sup_ratio_is_at_most_one() {
        let c = build_mz_cycle(3, DEFAULT_CN).unwrap();
        let r = mz_test(&c.cycle, 3, LpNorm::Infinity, 20, 1).unwrap();
        assert!(r.ratio_max <= 1.0 + 1e-9);
        assert!(r.ratio_min > 0.0);
    }

    #[test]
    fn norm_parsing() {
        assert_eq!("inf".parse::<LpNorm>().unwrap(), LpNorm::Infinity);
        assert_eq!("2".parse::<LpNorm>().unwrap(), LpNorm::Finite(2.0));
        assert!("0.5".parse::<LpNorm>().is_err());
        assert!("x".parse::<LpNorm>().is_err());
    }
}
