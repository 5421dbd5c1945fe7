//! Nielsen path search for rotationless train track maps.
//!
//! Endpoints of Nielsen paths are fixed points, which need not be vertices.
//! In the eigenmetric every fixed point in the interior of an edge `e` sits
//! in an occurrence of `e` (same orientation) inside `g(e)`; occurrences of
//! `e'` give fixed points whose two directions are swapped, and those cannot
//! end a Nielsen path of a rotationless map. The search therefore first
//! subdivides at the same-orientation interior occurrences, which keeps the
//! map combinatorial, and then looks only at paths between vertices.
//!
//! An indivisible Nielsen path has the form `α' β` with legal legs meeting at
//! one illegal turn and `g(α) = ν α`, `g(β) = ν β` for the common prefix `ν`.
//! In the eigenmetric that pins the leg length to `L(ν) / (λ - 1)`, which
//! bounds the leg-growth search below. A search that finishes without ever
//! hitting the edge bound is exhaustive.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{compose, Edge, EdgePair, EdgePath, GraphMap, MarkedGraph, Turn, Vertex, VertexId};
use crate::spectral::{pf_data, transition_matrix, PfData};
use crate::halfint::HalfInt;
use crate::traintrack::{gates, is_rotationless, periodic_structure, require_train_track, GateStructure};

pub const DEFAULT_BOUND: usize = 40;
/// The brute-force cross-check runs when the bound is at most this.
pub const BRUTE_FORCE_MAX: usize = 12;
const METRIC_TOL: f64 = 1e-9;

/// A self-map subdivided at its interior fixed points, with the matching
/// eigenmetric.
#[derive(Clone, Debug)]
pub struct FixedPointSubdivision {
    pub map: GraphMap,
    pub lengths: Vec<f64>,
    pub lambda: f64,
    /// For every new edge pair: the original edge pair and piece index.
    pub pieces: Vec<(usize, usize)>,
    /// Vertices below this index are the original ones.
    pub original_vertices: usize,
}

pub fn subdivide_at_fixed_points(g: &GraphMap, pf: &PfData) -> Result<FixedPointSubdivision> {
    let graph = g.graph();
    let lambda = pf.lambda;
    if !(lambda > 1.0) {
        return Err(Error::Precondition("map is not expanding".into()));
    }
    let ell = &pf.edge_lengths;
    // interior same-orientation occurrences of each edge in its own image
    let occurrences: Vec<Vec<usize>> = g
        .images()
        .iter()
        .enumerate()
        .map(|(i, img)| {
            let n = img.len();
            (1..n.saturating_sub(1)).filter(|&j| img.edges()[j] == Edge::forward(i)).collect()
        })
        .collect();
    let mut vertices: Vec<Vertex> = graph.vertices().to_vec();
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    let mut pieces = Vec::new();
    // first new pair index of every original pair
    let mut first_piece = Vec::with_capacity(graph.edge_count());
    for (i, pair) in graph.edge_pairs().iter().enumerate() {
        first_piece.push(edges.len());
        let occ = &occurrences[i];
        if occ.is_empty() {
            edges.push(pair.clone());
            lengths.push(ell[i]);
            pieces.push((i, 0));
            continue;
        }
        let img = &g.images()[i];
        let prefix: Vec<f64> = std::iter::once(0.0)
            .chain(img.edges().iter().scan(0.0, |acc, e| {
                *acc += ell[e.pair()];
                Some(*acc)
            }))
            .collect();
        let offsets: Vec<f64> = occ.iter().map(|&j| prefix[j]).collect();
        let cuts: Vec<f64> = offsets.iter().map(|o| o / (lambda - 1.0)).collect();
        let mut prev_vertex = pair.init;
        let mut prev_cut = 0.0;
        for (m, &t) in cuts.iter().enumerate() {
            let v = VertexId(vertices.len());
            vertices.push(Vertex { name: format!("{}@{}", pair.name, m + 1), subdivision: true });
            edges.push(EdgePair { name: format!("{}.{}", pair.name, m), init: prev_vertex, term: v });
            lengths.push(t - prev_cut);
            pieces.push((i, m));
            prev_vertex = v;
            prev_cut = t;
        }
        edges.push(EdgePair { name: format!("{}.{}", pair.name, occ.len()), init: prev_vertex, term: pair.term });
        lengths.push(ell[i] - prev_cut);
        pieces.push((i, occ.len()));
    }
    if lengths.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Precondition("eigenmetric does not separate fixed points".into()));
    }
    let piece_count = |i: usize| occurrences[i].len() + 1;
    let subdivided = |e: Edge| -> Vec<Edge> {
        let base = first_piece[e.pair()];
        let k = piece_count(e.pair());
        if e.is_reversed() {
            (0..k).rev().map(|m| Edge::new(base + m, true)).collect()
        } else {
            (0..k).map(|m| Edge::forward(base + m)).collect()
        }
    };
    let mut images = Vec::with_capacity(edges.len());
    for (i, img) in g.images().iter().enumerate() {
        let mut full = Vec::new();
        let mut offset = Vec::with_capacity(img.len());
        for &e in img.edges() {
            offset.push(full.len());
            full.extend(subdivided(e));
        }
        let occ = &occurrences[i];
        let mut bounds = vec![0];
        bounds.extend(occ.iter().enumerate().map(|(m, &j)| offset[j] + m + 1));
        bounds.push(full.len());
        for w in bounds.windows(2) {
            images.push(EdgePath::from(full[w[0]..w[1]].to_vec()));
        }
    }
    let mut vertex_map: Vec<VertexId> = g.vertex_map().to_vec();
    vertex_map.extend((graph.vertex_count()..vertices.len()).map(VertexId));
    let new_graph = MarkedGraph::with_auto_subdivision(vertices, edges)?;
    let map = GraphMap::new(new_graph.clone(), new_graph, vertex_map, images)?;
    Ok(FixedPointSubdivision { map, lengths, lambda, pieces, original_vertices: graph.vertex_count() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NielsenPath {
    #[serde(skip)]
    pub path: EdgePath,
    pub label: String,
    pub indivisible: bool,
    pub closed: bool,
    pub start: String,
    pub end: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub max_edges: usize,
    pub paths_found: usize,
}

#[derive(Clone, Debug)]
pub struct NielsenPathReport {
    pub paths: Vec<NielsenPath>,
    pub search_bound: usize,
    pub exhaustive: bool,
    /// The subdivided map the paths live in.
    pub subdivision: FixedPointSubdivision,
    pub oracle: Option<OracleCheck>,
    pub search_nodes: usize,
}

impl NielsenPathReport {
    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Original vertices that are endpoints of a reported path.
    pub fn endpoint_vertices(&self) -> Vec<VertexId> {
        let g = self.subdivision.map.graph();
        let original = self.subdivision.original_vertices;
        let mut out = BTreeSet::new();
        for np in &self.paths {
            for v in [g.init(np.path.first().expect("nonempty")), g.term(np.path.last().expect("nonempty"))] {
                if v.0 < original {
                    out.insert(v);
                }
            }
        }
        out.into_iter().collect()
    }
}

/// A leg under construction with its image, kept incrementally. Legs are
/// legal, so images need no tightening.
#[derive(Default)]
struct Leg {
    path: Vec<Edge>,
    /// `path_len[i]` is the length of `path[..i]`.
    path_len: Vec<f64>,
    image: Vec<Edge>,
    /// `image_len[i]` is the length of `image[..i]`.
    image_len: Vec<f64>,
}

impl Leg {
    fn new() -> Self {
        Leg { path_len: vec![0.0], image_len: vec![0.0], ..Default::default() }
    }

    fn mark(&self) -> (usize, usize) {
        (self.path.len(), self.image.len())
    }

    fn undo(&mut self, (p, i): (usize, usize)) {
        self.path.truncate(p);
        self.path_len.truncate(p + 1);
        self.image.truncate(i);
        self.image_len.truncate(i + 1);
    }

    fn push(&mut self, e: Edge, h: &GraphMap, lengths: &[f64]) {
        self.path.push(e);
        self.path_len.push(self.path_len.last().unwrap() + lengths[e.pair()]);
        let img = h.images()[e.pair()].edges();
        let mut add = |x: Edge| {
            self.image.push(x);
            self.image_len.push(self.image_len.last().unwrap() + lengths[x.pair()]);
        };
        if e.is_reversed() {
            img.iter().rev().for_each(|x| add(x.reverse()));
        } else {
            img.iter().copied().for_each(add);
        }
    }

    fn len(&self) -> f64 {
        *self.path_len.last().unwrap()
    }
}

fn prefix_compatible(a: &[Edge], b: &[Edge]) -> bool {
    let n = a.len().min(b.len());
    a[..n] == b[..n]
}

struct LegSearch<'a> {
    h: &'a GraphMap,
    gates: &'a GateStructure,
    stars: Vec<Vec<Edge>>,
    lengths: &'a [f64],
    lambda: f64,
    /// Bound on cancellation, `λ` times the volume.
    cancellation: f64,
    bound: usize,
    alpha: Leg,
    beta: Leg,
    found: BTreeSet<EdgePath>,
    truncated: bool,
    nodes: usize,
}

impl LegSearch<'_> {
    fn leg(&mut self, first: bool) -> &mut Leg {
        if first {
            &mut self.alpha
        } else {
            &mut self.beta
        }
    }

    fn continuations(&self, first: bool) -> Vec<Edge> {
        let g = self.h.graph();
        let leg = if first { &self.alpha } else { &self.beta };
        let last = *leg.path.last().expect("legs are nonempty");
        self.stars[g.term(last).0]
            .iter()
            .copied()
            .filter(|&e| e != last.reverse() && self.gates.is_legal(Turn::new(last.reverse(), e)))
            .collect()
    }

    fn extend(&mut self, first: bool, edges: &[Edge], c: usize) {
        let (h, lengths) = (self.h, self.lengths);
        let mark = self.leg(first).mark();
        for &e in edges {
            self.leg(first).push(e, h, lengths);
        }
        self.grow(c);
        self.leg(first).undo(mark);
    }

    fn branch(&mut self, first: bool, c: usize) {
        for e in self.continuations(first) {
            self.extend(first, &[e], c);
        }
    }

    /// `c` is a lower bound for the common prefix of the two images.
    fn grow(&mut self, c: usize) {
        self.nodes += 1;
        if self.alpha.path.len() > self.bound || self.beta.path.len() > self.bound {
            self.truncated = true;
            return;
        }
        let (ga, gb) = (&self.alpha.image, &self.beta.image);
        let c = c + ga[c..].iter().zip(&gb[c..]).take_while(|(x, y)| x == y).count();
        let cancelled = self.alpha.image_len[c];
        if cancelled > self.cancellation + METRIC_TOL {
            return;
        }
        if c == ga.len() || c == gb.len() {
            // the common image prefix is not settled yet
            self.branch(c == ga.len(), c);
            return;
        }
        let target = cancelled / (self.lambda - 1.0);
        let (ra, rb) = (&ga[c..], &gb[c..]);
        if !prefix_compatible(&self.alpha.path, ra) || !prefix_compatible(&self.beta.path, rb) {
            return;
        }
        let (la, lb) = (self.alpha.len(), self.beta.len());
        if la > target + METRIC_TOL || lb > target + METRIC_TOL {
            return;
        }
        if ra == self.alpha.path && rb == self.beta.path {
            let p = EdgePath::from(self.alpha.path.clone()).reversed().concat(&EdgePath::from(self.beta.path.clone()));
            self.found.insert(p);
            return;
        }
        let more_a: Vec<Edge> = ra.get(self.alpha.path.len()..).unwrap_or(&[]).to_vec();
        let more_b: Vec<Edge> = rb.get(self.beta.path.len()..).unwrap_or(&[]).to_vec();
        if !more_a.is_empty() || !more_b.is_empty() {
            let (h, lengths) = (self.h, self.lengths);
            let mark = self.beta.mark();
            for &e in &more_b {
                self.beta.push(e, h, lengths);
            }
            self.extend(true, &more_a, c);
            self.beta.undo(mark);
            return;
        }
        if la < target - METRIC_TOL {
            self.branch(true, c);
        } else if lb < target - METRIC_TOL {
            self.branch(false, c);
        }
    }
}

fn canonical_orientation(p: EdgePath) -> EdgePath {
    let r = p.reversed();
    if r < p {
        r
    } else {
        p
    }
}

fn is_fixed(h: &GraphMap, v: VertexId) -> bool {
    h.vertex_image(v) == v
}

/// All Nielsen paths of at most `max_edges` edges between fixed vertices of
/// `h`, found by enumerating tight paths. Each path is reported once, in the
/// orientation that is smaller as a word.
pub fn brute_force_nielsen_paths(h: &GraphMap, max_edges: usize) -> Vec<EdgePath> {
    let g = h.graph();
    let star = g.stars();
    let mut out = BTreeSet::new();
    let mut stack: Vec<EdgePath> = Vec::new();
    for v in g.vertex_ids().filter(|&v| is_fixed(h, v)) {
        for &d in &star[v.0] {
            stack.push(EdgePath::from(vec![d]));
        }
    }
    while let Some(p) = stack.pop() {
        let last = p.last().expect("nonempty");
        if is_fixed(h, g.term(last)) && h.image_of_path(&p).tighten() == p {
            out.insert(canonical_orientation(p.clone()));
        }
        if p.len() < max_edges {
            for &e in &star[g.term(last).0] {
                if e != last.reverse() {
                    let mut q = p.clone();
                    q.push(e);
                    stack.push(q);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// True when the path splits at an interior fixed vertex into two Nielsen
/// paths.
pub fn is_divisible(h: &GraphMap, p: &EdgePath) -> bool {
    let g = h.graph();
    (1..p.len()).any(|s| {
        let v = g.term(p.edges()[s - 1]);
        if !is_fixed(h, v) {
            return false;
        }
        let (a, b) = (p.slice(0, s), p.slice(s, p.len()));
        h.image_of_path(&a).tighten() == a && h.image_of_path(&b).tighten() == b
    })
}

fn describe(h: &GraphMap, p: EdgePath, indivisible: bool) -> NielsenPath {
    let g = h.graph();
    let (s, e) = (g.init(p.first().expect("nonempty")), g.term(p.last().expect("nonempty")));
    NielsenPath {
        label: g.path_label(&p),
        indivisible,
        closed: s == e,
        start: g.vertex(s).name.clone(),
        end: g.vertex(e).name.clone(),
        path: p,
    }
}

/// Indivisible Nielsen paths of a rotationless train track map with legs of
/// at most `bound` edges. When `bound <= 12` the answer is cross-checked
/// against [`brute_force_nielsen_paths`]; divisible paths the brute force
/// finds are reported as well.
pub fn find_nielsen_paths(g: &GraphMap, bound: usize) -> Result<NielsenPathReport> {
    require_train_track(g)?;
    if !is_rotationless(g)? {
        return Err(Error::Precondition("Nielsen path search needs a rotationless map".into()));
    }
    search(g, bound)
}

fn search(g: &GraphMap, bound: usize) -> Result<NielsenPathReport> {
    if bound == 0 {
        return Err(Error::Precondition("search bound must be positive".into()));
    }
    let pf = pf_data(&transition_matrix(g))?;
    let sub = subdivide_at_fixed_points(g, &pf)?;
    let h = &sub.map;
    let gs = gates(h)?;
    let mut search = LegSearch {
        h,
        gates: &gs,
        stars: h.graph().stars(),
        lengths: &sub.lengths,
        lambda: sub.lambda,
        cancellation: sub.lambda * sub.lengths.iter().sum::<f64>(),
        bound,
        alpha: Leg::new(),
        beta: Leg::new(),
        found: BTreeSet::new(),
        truncated: false,
        nodes: 0,
    };
    for t in &gs.illegal_turns {
        search.alpha = Leg::new();
        search.beta = Leg::new();
        search.alpha.push(t.0, h, &sub.lengths);
        search.beta.push(t.1, h, &sub.lengths);
        search.grow(0);
    }
    let LegSearch { found, truncated, nodes, .. } = search;
    let iterative: BTreeSet<EdgePath> = found.into_iter().map(canonical_orientation).collect();
    for p in &iterative {
        if h.image_of_path(p).tighten() != *p {
            return Err(Error::OracleMismatch(format!("leg search produced a non-Nielsen path {}", h.graph().path_label(p))));
        }
    }
    let mut paths: Vec<NielsenPath> = iterative.iter().map(|p| describe(h, p.clone(), true)).collect();
    let mut oracle = None;
    if bound <= BRUTE_FORCE_MAX {
        let brute = brute_force_nielsen_paths(h, bound);
        let brute_indivisible: BTreeSet<EdgePath> =
            brute.iter().filter(|p| !is_divisible(h, p)).cloned().collect();
        let iterative_short: BTreeSet<EdgePath> = iterative.iter().filter(|p| p.len() <= bound).cloned().collect();
        if brute_indivisible != iterative_short {
            return Err(Error::OracleMismatch(format!(
                "leg search found {} indivisible Nielsen paths of at most {bound} edges, brute force found {}",
                iterative_short.len(),
                brute_indivisible.len()
            )));
        }
        for p in &brute {
            if !brute_indivisible.contains(p) {
                paths.push(describe(h, p.clone(), false));
            }
        }
        oracle = Some(OracleCheck { max_edges: bound, paths_found: brute.len() });
    }
    paths.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(NielsenPathReport {
        paths,
        search_bound: bound,
        exhaustive: !truncated,
        subdivision: sub,
        oracle,
        search_nodes: nodes,
    })
}

/// Powers whose images are longer than this in total are not searched.
pub const MAX_SWEEP_IMAGE_LENGTH: usize = 20_000;

/// Every periodic Nielsen path of `g` is a Nielsen path of `g^q` for some
/// `q <= 2J`, where `J` bounds the number of indivisible ones: `g` permutes
/// them, possibly reversing orientation. In a rotationless power a Nielsen
/// class with `j` indivisible paths has index `sum (1 - #gates/2) - j/2` over
/// its points, and interior points have two gates, so `J/2 <= i_v - (1 - r)`
/// with `i_v` the sum of `1 - #gates/2` over principal vertices.
pub fn period_bound(g: &GraphMap) -> Result<usize> {
    require_train_track(g)?;
    let gs = gates(g)?;
    let ps = periodic_structure(g)?;
    let i_v: HalfInt = ps.principal_vertices.iter().map(|&v| HalfInt::one_minus_half(gs.gate_count_at(v))).sum();
    let j = 2 * g.graph().rank() as i64 - 2 + i_v.halves();
    Ok((2 * j).max(1) as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodCheck {
    pub period: usize,
    pub paths: Vec<NielsenPath>,
    pub exhaustive: bool,
    /// The power was too large to search.
    pub skipped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodicSweep {
    pub max_period: usize,
    pub periods: Vec<PeriodCheck>,
}

impl PeriodicSweep {
    pub fn stability(&self) -> Stability {
        if self.periods.iter().any(|p| !p.paths.is_empty()) {
            Stability::NotFullyStable
        } else if self.periods.iter().all(|p| p.exhaustive && !p.skipped) {
            Stability::FullyStable
        } else {
            Stability::UnknownAtBound
        }
    }

    /// Least period carrying a Nielsen path.
    pub fn first_period_with_paths(&self) -> Option<usize> {
        self.periods.iter().find(|p| !p.paths.is_empty()).map(|p| p.period)
    }
}

/// Looks for periodic Nielsen paths of any period by searching `g^q` for
/// `q = 1, ..., period_bound(g)`. Unlike [`find_nielsen_paths`] the input
/// need not be rotationless, and legs are not bounded by edge count: the
/// cancellation bound alone keeps the search finite. Stops at the first
/// period with paths.
pub fn periodic_nielsen_sweep(g: &GraphMap) -> Result<PeriodicSweep> {
    let max_period = period_bound(g)?;
    let mut periods = Vec::new();
    let mut gq = g.clone();
    for q in 1..=max_period {
        if q > 1 {
            gq = compose(g, &gq)?;
        }
        if gq.total_image_length() > MAX_SWEEP_IMAGE_LENGTH {
            periods.push(PeriodCheck { period: q, paths: Vec::new(), exhaustive: false, skipped: true });
            break;
        }
        let report = search(&gq, usize::MAX)?;
        let found = !report.is_empty();
        periods.push(PeriodCheck { period: q, paths: report.paths, exhaustive: report.exhaustive, skipped: false });
        if found {
            break;
        }
    }
    Ok(PeriodicSweep { max_period, periods })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    FullyStable,
    NotFullyStable,
    UnknownAtBound,
}

/// Fully stable here means free of Nielsen paths, certified by an
/// exhaustive search.
pub fn is_fully_stable(g: &GraphMap, bound: usize) -> Result<Stability> {
    let report = find_nielsen_paths(g, bound)?;
    Ok(stability_of(&report))
}

pub fn stability_of(report: &NielsenPathReport) -> Stability {
    if !report.is_empty() {
        Stability::NotFullyStable
    } else if report.exhaustive {
        Stability::FullyStable
    } else {
        Stability::UnknownAtBound
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ageometricity {
    Ageometric,
    NotAgeometric,
    Unknown,
}

/// Ageometric iff the rotationless representative has no Nielsen paths at
/// all. An ageometric answer is cross-checked against the index bound
/// `i > 1 - r`.
pub fn ageometric_certificate(g: &GraphMap, bound: usize) -> Result<Ageometricity> {
    match is_fully_stable(g, bound)? {
        Stability::NotFullyStable => Ok(Ageometricity::NotAgeometric),
        Stability::UnknownAtBound => Ok(Ageometricity::Unknown),
        Stability::FullyStable => {
            let report = crate::whitehead::index_report_unchecked(g)?;
            let floor = crate::HalfInt::from_int(1 - g.graph().rank() as i64);
            if report.index_sum <= floor {
                return Err(Error::OracleMismatch(format!(
                    "NP-free map has index {} <= 1 - r = {floor}",
                    report.index_sum
                )));
            }
            Ok(Ageometricity::Ageometric)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::power;

    fn map(names: &[&str], rules: &[(&str, &str)]) -> GraphMap {
        GraphMap::from_words(MarkedGraph::rose(names).unwrap(), rules).unwrap()
    }

    fn fib() -> GraphMap {
        map(&["a", "b"], &[("a", "a b"), ("b", "a")])
    }

    fn h() -> GraphMap {
        map(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a b")])
    }

    #[test]
    fn sweep_finds_paths_of_period_two() {
        let g = map(&["a", "b", "c"], &[("a", "c b b"), ("b", "c b c b b"), ("c", "c b b a")]);
        assert!(is_rotationless(&g).unwrap());
        assert_eq!(is_fully_stable(&g, 40).unwrap(), Stability::FullyStable);
        let sweep = periodic_nielsen_sweep(&g).unwrap();
        assert_eq!(sweep.max_period, 8);
        assert_eq!(sweep.stability(), Stability::NotFullyStable);
        assert_eq!(sweep.first_period_with_paths(), Some(2));
    }

    #[test]
    fn sweep_certifies_h() {
        let sweep = periodic_nielsen_sweep(&h()).unwrap();
        assert_eq!(sweep.max_period, 2);
        assert_eq!(sweep.periods.len(), 2);
        assert_eq!(sweep.stability(), Stability::FullyStable);
        let h12 = power(&h(), 12).unwrap();
        assert_eq!(period_bound(&h12).unwrap(), 2);
        let f = periodic_nielsen_sweep(&fib()).unwrap();
        assert_eq!(f.stability(), Stability::NotFullyStable);
    }

    #[test]
    fn period_bounds_follow_the_vertex_index() {
        assert_eq!(period_bound(&h()).unwrap(), 2);
        assert_eq!(period_bound(&fib()).unwrap(), 2);
        let g = map(&["a", "b", "c"], &[("a", "c b b"), ("b", "c b c b b"), ("c", "c b b a")]);
        assert_eq!(period_bound(&g).unwrap(), 8);
    }

    #[test]
    fn unbounded_search_terminates() {
        let h24 = power(&h(), 24).unwrap();
        assert!(!find_nielsen_paths(&h24, 640).unwrap().exhaustive);
        let report = find_nielsen_paths(&h24, usize::MAX).unwrap();
        assert!(report.exhaustive && report.is_empty());
    }

    #[test]
    fn fibonacci_square_has_a_closed_nielsen_path() {
        let f2 = power(&fib(), 2).unwrap();
        let report = find_nielsen_paths(&f2, 30).unwrap();
        assert!(report.exhaustive);
        let labels: Vec<&str> = report.paths.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels, vec!["a' b' a b"]);
        assert!(report.paths[0].closed && report.paths[0].indivisible);
        assert_eq!(is_fully_stable(&f2, 30).unwrap(), Stability::NotFullyStable);
        assert_eq!(ageometric_certificate(&f2, 30).unwrap(), Ageometricity::NotAgeometric);
    }

    #[test]
    fn h_sixth_power_is_nielsen_path_free() {
        let h6 = power(&h(), 6).unwrap();
        let report = find_nielsen_paths(&h6, 30).unwrap();
        assert!(report.paths.is_empty());
        assert!(report.exhaustive);
        assert_eq!(ageometric_certificate(&h6, 30).unwrap(), Ageometricity::Ageometric);
    }

    #[test]
    fn oracle_runs_at_small_bounds() {
        let f2 = power(&fib(), 2).unwrap();
        let report = find_nielsen_paths(&f2, 8).unwrap();
        assert!(report.oracle.is_some());
        // a' b' a b twice around is divisible
        assert!(report.paths.iter().any(|p| !p.indivisible));
    }

    #[test]
    fn rejects_non_rotationless() {
        assert!(matches!(find_nielsen_paths(&h(), 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn tiny_bound_is_inconclusive() {
        let h6 = power(&h(), 6).unwrap();
        assert_eq!(is_fully_stable(&h6, 1).unwrap(), Stability::UnknownAtBound);
        assert_eq!(ageometric_certificate(&h6, 1).unwrap(), Ageometricity::Unknown);
    }

    #[test]
    fn subdivision_preserves_the_map_up_to_homotopy() {
        let h6 = power(&h(), 6).unwrap();
        let pf = pf_data(&transition_matrix(&h6)).unwrap();
        let sub = subdivide_at_fixed_points(&h6, &pf).unwrap();
        // affine: image length is lambda times edge length on every piece
        for (i, img) in sub.map.images().iter().enumerate() {
            let l: f64 = img.edges().iter().map(|e| sub.lengths[e.pair()]).sum();
            assert!((l - sub.lambda * sub.lengths[i]).abs() < 1e-9);
        }
        assert!((sub.lengths.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
