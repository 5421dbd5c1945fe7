//! Stallings fold decompositions and the periodic fold lines they span.
//!
//! A train track map `g: Γ -> Γ` factors as subdivisions and folds followed
//! by a homeomorphism. Each stage keeps the map from the current graph to
//! `Γ`; a fold picks a turn whose two images share a first edge, subdivides
//! so the common prefix is a whole edge on both sides, and identifies those
//! edges.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{compose, Edge, EdgePair, EdgePath, GraphMap, MarkedGraph, Turn, Vertex, VertexId};
use crate::iso::{are_isometric, suppress_valence_two};
use crate::spectral::{matrix_class, pf_data, transition_matrix, MatrixClass};
use crate::traintrack::require_train_track;

/// Tolerance for comparing metric graphs along a fold line.
pub const METRIC_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FoldMove {
    /// Split `edge` after `at` edges of its image.
    Subdivide { edge: String, at: usize },
    /// Identify the initial segments of the two directions of `turn`, whose
    /// common image is `folded`.
    Fold { turn: String, folded: String, length: usize },
    /// The last graph maps edge-for-edge onto the original one.
    Homeomorphism,
}

/// The state just before a fold.
#[derive(Clone, Debug)]
pub struct FoldStage {
    /// Index into [`FoldSequence::graphs`].
    pub graph: usize,
    /// Oriented edges being identified; both start at the same vertex.
    pub a: Edge,
    pub b: Edge,
    /// Common image of `a` and `b` in the original graph.
    pub folded: EdgePath,
    /// Stage map images (per edge pair) into the original graph.
    pub images: Vec<EdgePath>,
}

#[derive(Clone, Debug)]
pub struct FoldSequence {
    pub source: GraphMap,
    /// `graphs[0]` is the domain; every move goes from `graphs[i]` to
    /// `graphs[i + 1]`, the last one back to the original graph.
    pub graphs: Vec<MarkedGraph>,
    pub moves: Vec<FoldMove>,
    pub maps: Vec<GraphMap>,
    pub folds: Vec<FoldStage>,
}

struct Work {
    vertices: Vec<Vertex>,
    edges: Vec<EdgePair>,
    images: Vec<EdgePath>,
    names: HashSet<String>,
    counter: usize,
}

impl Work {
    fn new(g: &GraphMap) -> Self {
        let dom = g.domain();
        let mut names: HashSet<String> = dom.vertices().iter().map(|v| v.name.clone()).collect();
        names.extend(dom.edge_pairs().iter().map(|p| p.name.clone()));
        Work {
            vertices: dom.vertices().to_vec(),
            edges: dom.edge_pairs().to_vec(),
            images: g.images().to_vec(),
            names,
            counter: 0,
        }
    }

    fn graph(&self) -> Result<MarkedGraph> {
        MarkedGraph::with_auto_subdivision(self.vertices.clone(), self.edges.clone())
            .map_err(|e| Error::Fold(format!("intermediate graph is invalid: {e}")))
    }

    fn fresh(&mut self, base: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("{base}.{}", self.counter);
            if self.names.insert(name.clone()) {
                return name;
            }
        }
    }

    fn image(&self, e: Edge) -> EdgePath {
        let img = &self.images[e.pair()];
        if e.is_reversed() {
            img.reversed()
        } else {
            img.clone()
        }
    }

    fn init(&self, e: Edge) -> VertexId {
        let p = &self.edges[e.pair()];
        if e.is_reversed() {
            p.term
        } else {
            p.init
        }
    }

    fn term(&self, e: Edge) -> VertexId {
        self.init(e.reverse())
    }

    /// Splits `e` after `k` image edges; returns the two oriented pieces
    /// (`e = first second`) and the subdivision map.
    fn split(&mut self, e: Edge, k: usize) -> Result<(Edge, Edge, GraphMap, FoldMove)> {
        let before = self.graph()?;
        let p = e.pair();
        let full = self.images[p].clone();
        let n = full.len();
        let cut = if e.is_reversed() { n - k } else { k };
        let base = self.edges[p].name.clone();
        let vname = self.fresh("w");
        let w = VertexId(self.vertices.len());
        self.vertices.push(Vertex { name: vname, subdivision: true });
        let qname = self.fresh(&base);
        let q = self.edges.len();
        let old_term = self.edges[p].term;
        self.edges[p].term = w;
        self.edges.push(EdgePair { name: qname, init: w, term: old_term });
        self.images[p] = full.slice(0, cut);
        self.images.push(full.slice(cut, n));
        let after = self.graph()?;
        let mut imgs: Vec<EdgePath> = (0..before.edge_count()).map(|i| vec![Edge::forward(i)].into()).collect();
        imgs[p] = vec![Edge::forward(p), Edge::forward(q)].into();
        let map = GraphMap::from_images(before.clone(), after, imgs)?;
        let mv = FoldMove::Subdivide { edge: before.edge_label(e), at: k };
        let pieces = if e.is_reversed() {
            (Edge::new(q, true), Edge::new(p, true))
        } else {
            (Edge::forward(p), Edge::forward(q))
        };
        Ok((pieces.0, pieces.1, map, mv))
    }

    /// Identifies `b` with `a`; both must have equal images and distinct
    /// terminal vertices.
    fn fold(&mut self, a: Edge, b: Edge) -> Result<GraphMap> {
        let before = self.graph()?;
        let (ta, tb) = (self.term(a), self.term(b));
        if ta == tb {
            return Err(Error::Fold(format!(
                "folding {} would identify two edges with the same endpoints; the map is not a homotopy equivalence",
                Turn::new(a, b).label(&before)
            )));
        }
        let removed = b.pair();
        let (keep, drop) = (ta.min(tb), ta.max(tb));
        let new_pair = |i: usize| if i > removed { i - 1 } else { i };
        let new_vertex = |v: VertexId| {
            let v = if v == drop { keep } else { v };
            VertexId(if v.0 > drop.0 { v.0 - 1 } else { v.0 })
        };
        let vertex_map: Vec<VertexId> = before.vertex_ids().map(new_vertex).collect();
        let edge_images: Vec<EdgePath> = (0..before.edge_count())
            .map(|i| {
                if i == removed {
                    let target = if b.is_reversed() { a.reverse() } else { a };
                    vec![Edge::new(new_pair(target.pair()), target.is_reversed())].into()
                } else {
                    vec![Edge::forward(new_pair(i))].into()
                }
            })
            .collect();
        self.edges.remove(removed);
        self.images.remove(removed);
        for p in &mut self.edges {
            p.init = new_vertex(p.init);
            p.term = new_vertex(p.term);
        }
        self.vertices.remove(drop.0);
        let after = self.graph()?;
        GraphMap::new(before, after, vertex_map, edge_images)
    }

    /// Least turn (in edge order) whose two images start with the same edge.
    fn foldable_turn(&self, g: &MarkedGraph) -> Option<Turn> {
        let mut best: Option<Turn> = None;
        for v in g.vertex_ids() {
            let dirs = g.directions_at(v);
            for (i, &d1) in dirs.iter().enumerate() {
                for &d2 in &dirs[i + 1..] {
                    if self.image(d1).first() == self.image(d2).first() {
                        let t = Turn::new(d1, d2);
                        if best.map_or(true, |b| t < b) {
                            best = Some(t);
                        }
                    }
                }
            }
        }
        best
    }
}

/// Factors a train track map into subdivisions, folds and a final
/// homeomorphism, and checks that the factors recompose to the map.
pub fn stallings_decomposition(g: &GraphMap) -> Result<FoldSequence> {
    require_train_track(g)?;
    if !g.is_self_map() {
        return Err(Error::Precondition("fold decomposition needs a self-map".into()));
    }
    let target = g.codomain().clone().without_lengths();
    let mut work = Work::new(g);
    let max_len = g.images().iter().map(EdgePath::len).max().unwrap_or(1);
    let cap = 10 * g.domain().edge_count() * max_len;
    let mut graphs = vec![work.graph()?];
    let mut moves = Vec::new();
    let mut maps = Vec::new();
    let mut folds = Vec::new();
    loop {
        if moves.len() > cap {
            return Err(Error::Fold(format!("no homeomorphism reached after {cap} moves")));
        }
        let current = graphs.last().expect("nonempty").clone();
        let Some(turn) = work.foldable_turn(&current) else { break };
        let (d1, d2) = (turn.0, turn.1);
        let m = work.image(d1).common_prefix_len(&work.image(d2));
        let (a, b) = if d2 == d1.reverse() {
            let n = work.image(d1).len();
            let (alpha, rest, map, mv) = work.split(d1, m)?;
            graphs.push(work.graph()?);
            maps.push(map);
            moves.push(mv);
            let (_, beta, map, mv) = work.split(rest, n - 2 * m)?;
            graphs.push(work.graph()?);
            maps.push(map);
            moves.push(mv);
            (alpha, beta.reverse())
        } else {
            let mut pieces = [d1, d2];
            for piece in &mut pieces {
                if work.image(*piece).len() > m {
                    let (first, _, map, mv) = work.split(*piece, m)?;
                    *piece = first;
                    graphs.push(work.graph()?);
                    maps.push(map);
                    moves.push(mv);
                }
            }
            (pieces[0], pieces[1])
        };
        let before = graphs.len() - 1;
        let folded = work.image(a);
        folds.push(FoldStage { graph: before, a, b, folded: folded.clone(), images: work.images.clone() });
        let label = Turn::new(a, b).label(&graphs[before]);
        let map = work.fold(a, b)?;
        graphs.push(work.graph()?);
        maps.push(map);
        moves.push(FoldMove::Fold { turn: label, folded: target.path_label(&folded), length: m });
    }
    let last = graphs.last().expect("nonempty").clone();
    let mut hit = vec![false; target.edge_count()];
    for img in &work.images {
        if img.len() != 1 || std::mem::replace(&mut hit[img.edges()[0].pair()], true) {
            return Err(Error::Fold("folding stopped before reaching a homeomorphism".into()));
        }
    }
    if hit.iter().any(|h| !h) || last.vertex_count() != target.vertex_count() {
        return Err(Error::Fold("folding stopped before reaching a homeomorphism".into()));
    }
    let homeo = GraphMap::from_images(last, target, work.images.clone())?;
    maps.push(homeo);
    moves.push(FoldMove::Homeomorphism);
    let seq = FoldSequence { source: g.clone(), graphs, moves, maps, folds };
    let total = seq.recompose()?;
    if total.images() != g.images() || total.vertex_map() != g.vertex_map() {
        return Err(Error::Fold("the moves do not recompose to the original map".into()));
    }
    Ok(seq)
}

impl FoldSequence {
    pub fn fold_count(&self) -> usize {
        self.folds.len()
    }

    /// The composite of all moves.
    pub fn recompose(&self) -> Result<GraphMap> {
        let mut total = self.maps[0].clone();
        for m in &self.maps[1..] {
            total = compose(m, &total)?;
        }
        Ok(total)
    }

    /// The map `graphs[0] -> graphs[i]` (identity for `i = 0`).
    fn prefix(&self, i: usize) -> Result<GraphMap> {
        let mut total = GraphMap::identity(self.graphs[0].clone());
        for m in &self.maps[..i] {
            total = compose(m, &total)?;
        }
        Ok(total)
    }

    /// The map `graphs[i] -> Γ` given by the remaining moves.
    fn suffix(&self, i: usize) -> Result<GraphMap> {
        let mut total = self.maps[i].clone();
        for m in &self.maps[i + 1..] {
            total = compose(m, &total)?;
        }
        Ok(total)
    }

    /// The self-map of `graphs[i]` obtained by running the remaining moves
    /// and then the first `i` moves again.
    pub fn induced_representative(&self, i: usize) -> Result<GraphMap> {
        if i >= self.graphs.len() {
            return Err(Error::Fold(format!("no stage {i}")));
        }
        compose(&self.prefix(i)?, &self.suffix(i)?)
    }

    /// The induced self-map on the last graph, which starts the next period.
    pub fn end_representative(&self) -> Result<GraphMap> {
        self.induced_representative(self.graphs.len() - 1)
    }
}

/// A metric graph on the fold line at time `t`, with valence-2 vertices
/// suppressed and volume one.
#[derive(Clone, Debug)]
pub struct FoldLineSample {
    pub t: f64,
    pub period: usize,
    pub graph: MarkedGraph,
}

#[derive(Clone, Debug)]
pub struct FoldLine {
    pub lambda: f64,
    /// Translation length `log λ`.
    pub period_length: f64,
    pub samples_per_period: usize,
    pub samples: Vec<FoldLineSample>,
}

impl FoldLine {
    /// One row per sample and edge: `step,t,edge,length`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,t,edge,length\n");
        for (i, s) in self.samples.iter().enumerate() {
            let lengths = s.graph.lengths().expect("samples carry lengths");
            for (p, l) in s.graph.edge_pairs().iter().zip(lengths) {
                out.push_str(&format!("{i},{},{},{}\n", s.t, p.name, l));
            }
        }
        out
    }

    /// Whether each sample is isometric to the one a full period later.
    pub fn is_periodic(&self, tol: f64) -> bool {
        let k = self.samples_per_period;
        k > 0
            && self.samples.len() > k
            && self.samples.windows(k + 1).all(|w| are_isometric(&w[0].graph, &w[k].graph, tol).is_some())
    }
}

fn partial_fold(g: &MarkedGraph, lengths: &[f64], stage: &FoldStage, x: f64) -> Result<MarkedGraph> {
    let delta = lengths[stage.a.pair()];
    if x <= 0.0 {
        return g.clone().with_lengths(lengths.to_vec());
    }
    let mut vertices = g.vertices().to_vec();
    let z = VertexId(vertices.len());
    let mut taken: HashSet<&str> = vertices.iter().map(|v| v.name.as_str()).collect();
    taken.extend(g.edge_pairs().iter().map(|p| p.name.as_str()));
    let fresh = |base: &str| (1..).map(|i| format!("{base}.{i}")).find(|n| !taken.contains(n.as_str())).expect("infinite");
    let (zname, cname) = (fresh("z"), fresh("c"));
    vertices.push(Vertex { name: zname, subdivision: false });
    let mut edges = Vec::new();
    let mut ls = Vec::new();
    for (i, p) in g.edge_pairs().iter().enumerate() {
        if i != stage.a.pair() && i != stage.b.pair() {
            edges.push(p.clone());
            ls.push(lengths[i]);
        }
    }
    let v = g.init(stage.a);
    edges.push(EdgePair { name: cname, init: v, term: z });
    ls.push(x);
    for e in [stage.a, stage.b] {
        edges.push(EdgePair { name: g.edge_pairs()[e.pair()].name.clone(), init: z, term: g.term(e) });
        ls.push(delta - x);
    }
    MarkedGraph::with_auto_subdivision(vertices, edges)?.with_lengths(ls)
}

fn normalized_shape(g: &MarkedGraph) -> Result<MarkedGraph> {
    Ok(suppress_valence_two(g)?.graph.normalized())
}

/// Samples the periodic fold line of a primitive train track map:
/// `samples_per_period` evenly spaced times per period plus the endpoint,
/// each normalized to volume one. Time is `log λ - log(volume)` before
/// normalization, so one period has length `log λ`.
pub fn fold_line(g: &GraphMap, periods: usize, samples_per_period: usize) -> Result<FoldLine> {
    require_train_track(g)?;
    if matrix_class(&transition_matrix(g)) != MatrixClass::Primitive {
        return Err(Error::Precondition("fold lines need a primitive transition matrix".into()));
    }
    let lambda = pf_data(&transition_matrix(g))?.lambda;
    let period_length = lambda.ln();
    let mut samples = Vec::new();
    let mut rho = g.clone();
    let mut carried: Option<Vec<f64>> = None;
    for p in 0..periods {
        let pf = pf_data(&transition_matrix(&rho))?;
        let scale = lambda.powi(-(p as i32));
        let metric: Vec<f64> = pf.edge_lengths.iter().map(|l| l * scale).collect();
        let start: Vec<f64> = metric.iter().map(|l| l * pf.lambda).collect();
        if let Some(prev) = &carried {
            if prev.iter().zip(&start).any(|(a, b)| (a - b).abs() > METRIC_TOL * scale) {
                return Err(Error::Spectral("eigenmetric of the next period does not match the fold line".into()));
            }
        }
        let target = rho.codomain().clone().with_lengths(metric.clone())?;
        let seq = stallings_decomposition(&rho)?;
        let len_of = |img: &EdgePath| target.path_length(img).expect("metric present");
        let start_volume: f64 = start.iter().sum();
        for j in 0..samples_per_period {
            let dt = period_length * j as f64 / samples_per_period as f64;
            let folded = start_volume * (1.0 - (-dt).exp());
            let mut done = 0.0;
            let mut graph = None;
            for stage in &seq.folds {
                let delta = len_of(&stage.folded);
                if folded < done + delta {
                    let lens: Vec<f64> = stage.images.iter().map(len_of).collect();
                    graph = Some(partial_fold(&seq.graphs[stage.graph], &lens, stage, folded - done)?);
                    break;
                }
                done += delta;
            }
            let graph = match graph {
                Some(gr) => gr,
                None => end_graph(&seq, &target)?,
            };
            samples.push(FoldLineSample { t: p as f64 * period_length + dt, period: p, graph: normalized_shape(&graph)? });
        }
        let end = end_graph(&seq, &target)?;
        carried = end.lengths().map(<[f64]>::to_vec);
        if p + 1 == periods {
            samples.push(FoldLineSample { t: periods as f64 * period_length, period: periods, graph: normalized_shape(&end)? });
        }
        rho = seq.end_representative()?;
    }
    if periods == 0 {
        let pf = pf_data(&transition_matrix(g))?;
        let g0 = g.domain().clone().with_lengths(pf.edge_lengths)?;
        samples.push(FoldLineSample { t: 0.0, period: 0, graph: normalized_shape(&g0)? });
    }
    Ok(FoldLine { lambda, period_length, samples_per_period, samples })
}

fn end_graph(seq: &FoldSequence, target: &MarkedGraph) -> Result<MarkedGraph> {
    let homeo = seq.maps.last().expect("homeomorphism");
    let lens = homeo.images().iter().map(|img| target.path_length(img).expect("metric")).collect();
    homeo.domain().clone().with_lengths(lens)
}
