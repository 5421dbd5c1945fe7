//! Marked graphs, oriented edges, tight edge paths and graph maps.
//!
//! Every unoriented edge is stored once as an [`EdgePair`]; the two
//! orientations are addressed through [`Edge`], whose low bit selects the
//! reversed orientation. Reversal is therefore a fixed-point-free involution
//! by construction.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance used for every length comparison.
pub const LENGTH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

/// An oriented edge. `Edge::new(i, false)` is the edge pair `i` in its stored
/// orientation, `Edge::new(i, true)` its reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(u32);

impl Edge {
    pub fn new(pair: usize, reversed: bool) -> Self {
        Edge((pair as u32) << 1 | reversed as u32)
    }

    pub fn forward(pair: usize) -> Self {
        Edge::new(pair, false)
    }

    pub fn pair(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_reversed(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn reverse(self) -> Self {
        Edge(self.0 ^ 1)
    }

    /// Dense index in `0..2 * edge_pairs`.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        Edge(i as u32)
    }
}

/// A direction is the germ of an oriented edge at its initial vertex, so it is
/// identified with that edge.
pub type Direction = Edge;

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub name: String,
    /// Valence-2 vertices are only allowed when flagged.
    pub subdivision: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgePair {
    pub name: String,
    pub init: VertexId,
    pub term: VertexId,
}

/// A finite connected graph with oriented edge pairs and optional lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedGraph {
    vertices: Vec<Vertex>,
    edges: Vec<EdgePair>,
    lengths: Option<Vec<f64>>,
}

impl MarkedGraph {
    /// Builds and validates a graph: unique names, existing endpoints,
    /// connectivity, and valence at least three except at flagged subdivision
    /// vertices (which must have valence exactly two).
    pub fn new(vertices: Vec<Vertex>, edges: Vec<EdgePair>) -> Result<Self> {
        let g = MarkedGraph { vertices, edges, lengths: None };
        g.validate(true)?;
        Ok(g)
    }

    /// Like [`MarkedGraph::new`] but flags every valence-2 vertex as a
    /// subdivision vertex and clears the flag elsewhere. Used for the
    /// intermediate graphs of fold sequences.
    pub fn with_auto_subdivision(mut vertices: Vec<Vertex>, edges: Vec<EdgePair>) -> Result<Self> {
        let mut valence = vec![0usize; vertices.len()];
        for e in &edges {
            if e.init.0 < valence.len() {
                valence[e.init.0] += 1;
            }
            if e.term.0 < valence.len() {
                valence[e.term.0] += 1;
            }
        }
        for (v, val) in vertices.iter_mut().zip(valence) {
            v.subdivision = val == 2;
        }
        MarkedGraph::new(vertices, edges)
    }

    /// The rose with one vertex `v0` and one loop per name.
    pub fn rose(names: &[&str]) -> Result<Self> {
        // a single loop leaves a valence-2 vertex, which is allowed when flagged
        let vertices = vec![Vertex { name: "v0".into(), subdivision: names.len() == 1 }];
        let edges = names
            .iter()
            .map(|n| EdgePair { name: n.to_string(), init: VertexId(0), term: VertexId(0) })
            .collect();
        MarkedGraph::new(vertices, edges)
    }

    fn validate(&self, check_valence: bool) -> Result<()> {
        let mut names = HashSet::new();
        for v in &self.vertices {
            if !names.insert(v.name.as_str()) {
                return Err(Error::Graph(format!("duplicate vertex label `{}`", v.name)));
            }
        }
        let mut enames = HashSet::new();
        for e in &self.edges {
            if !enames.insert(e.name.as_str()) {
                return Err(Error::Graph(format!("duplicate edge label `{}`", e.name)));
            }
            for end in [e.init, e.term] {
                if end.0 >= self.vertices.len() {
                    return Err(Error::Graph(format!("edge `{}` has a dangling endpoint", e.name)));
                }
            }
        }
        if self.vertices.is_empty() {
            return Err(Error::Graph("graph has no vertices".into()));
        }
        if !self.is_connected() {
            return Err(Error::Graph("graph is not connected".into()));
        }
        if check_valence {
            let mut valence = vec![0usize; self.vertices.len()];
            for e in &self.edges {
                valence[e.init.0] += 1;
                valence[e.term.0] += 1;
            }
            for (v, &val) in self.vertices.iter().zip(&valence) {
                let ok = if v.subdivision { val == 2 } else { val >= 3 };
                if !ok {
                    return Err(Error::Graph(format!(
                        "vertex `{}` has valence {val}{}",
                        v.name,
                        if v.subdivision { " but is flagged as a subdivision vertex" } else { "" }
                    )));
                }
            }
        }
        if let Some(ls) = &self.lengths {
            if ls.len() != self.edges.len() || ls.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                return Err(Error::Graph("edge lengths must be positive and finite".into()));
            }
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([VertexId(0)]);
        seen[0] = true;
        let star = self.stars();
        while let Some(v) = queue.pop_front() {
            for &d in &star[v.0] {
                let w = self.term(d);
                if !seen[w.0] {
                    seen[w.0] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of unoriented edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Rank of the fundamental group, `E - V + 1`.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edge_pairs(&self) -> &[EdgePair] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    /// All oriented edges, in index order.
    pub fn oriented_edges(&self) -> impl Iterator<Item = Edge> {
        (0..2 * self.edges.len()).map(Edge::from_index)
    }

    pub fn contains(&self, e: Edge) -> bool {
        e.pair() < self.edges.len()
    }

    pub fn init(&self, e: Edge) -> VertexId {
        let p = &self.edges[e.pair()];
        if e.is_reversed() {
            p.term
        } else {
            p.init
        }
    }

    pub fn term(&self, e: Edge) -> VertexId {
        self.init(e.reverse())
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.edges.iter().map(|e| (e.init == v) as usize + (e.term == v) as usize).sum()
    }

    /// Directions based at `v`, in edge index order.
    pub fn directions_at(&self, v: VertexId) -> Vec<Direction> {
        self.oriented_edges().filter(|&e| self.init(e) == v).collect()
    }

    /// Directions at every vertex, indexed by vertex.
    pub fn stars(&self) -> Vec<Vec<Direction>> {
        let mut star = vec![Vec::new(); self.vertices.len()];
        for e in self.oriented_edges() {
            star[self.init(e).0].push(e);
        }
        star
    }

    /// Label of an oriented edge; reversed edges carry a trailing apostrophe.
    pub fn edge_label(&self, e: Edge) -> String {
        let name = &self.edges[e.pair()].name;
        if e.is_reversed() {
            format!("{name}'")
        } else {
            name.clone()
        }
    }

    pub fn edge_by_label(&self, label: &str) -> Option<Edge> {
        let (name, rev) = match label.strip_suffix('\'') {
            Some(n) => (n, true),
            None => (label, false),
        };
        self.edges.iter().position(|e| e.name == name).map(|i| Edge::new(i, rev))
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.name == name).map(VertexId)
    }

    /// Parses a whitespace-separated word such as `"a b' c"` into a path.
    /// The path is not tightened.
    pub fn parse_path(&self, word: &str) -> Result<EdgePath> {
        let edges = word
            .split_whitespace()
            .map(|tok| {
                self.edge_by_label(tok).ok_or_else(|| Error::Graph(format!("unknown edge `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let path = EdgePath::from(edges);
        if !path.is_consistent(self) {
            return Err(Error::Graph(format!("path `{word}` is not endpoint-consistent")));
        }
        Ok(path)
    }

    pub fn path_label(&self, p: &EdgePath) -> String {
        p.edges().iter().map(|&e| self.edge_label(e)).collect::<Vec<_>>().join(" ")
    }

    pub fn lengths(&self) -> Option<&[f64]> {
        self.lengths.as_deref()
    }

    /// Length of an edge pair, if the graph is metric.
    pub fn length(&self, e: Edge) -> Option<f64> {
        self.lengths.as_ref().map(|l| l[e.pair()])
    }

    pub fn with_lengths(mut self, lengths: Vec<f64>) -> Result<Self> {
        self.lengths = Some(lengths);
        self.validate(false)?;
        Ok(self)
    }

    pub fn without_lengths(mut self) -> Self {
        self.lengths = None;
        self
    }

    /// Sum of the lengths of the unoriented edges.
    pub fn volume(&self) -> Option<f64> {
        self.lengths.as_ref().map(|l| l.iter().sum())
    }

    pub fn is_normalized(&self) -> bool {
        self.volume().map_or(false, |v| (v - 1.0).abs() <= 1e-12)
    }

    /// Rescales the metric to volume one.
    pub fn normalized(mut self) -> Self {
        if let Some(ls) = &mut self.lengths {
            let vol: f64 = ls.iter().sum();
            ls.iter_mut().for_each(|l| *l /= vol);
        }
        self
    }

    pub fn path_length(&self, p: &EdgePath) -> Option<f64> {
        let ls = self.lengths.as_ref()?;
        Some(p.edges().iter().map(|e| ls[e.pair()]).sum())
    }

    /// Same combinatorial graph, ignoring lengths and labels.
    pub fn same_shape(&self, other: &MarkedGraph) -> bool {
        self.vertices.len() == other.vertices.len()
            && self.edges.len() == other.edges.len()
            && self.edges.iter().zip(&other.edges).all(|(a, b)| a.init == b.init && a.term == b.term)
    }
}

/// A finite edge path. Consistency (`term(e_i) = init(e_{i+1})`) is checked
/// against a graph where it matters; the type itself is just a word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePath(Vec<Edge>);

impl From<Vec<Edge>> for EdgePath {
    fn from(v: Vec<Edge>) -> Self {
        EdgePath(v)
    }
}

impl EdgePath {
    pub fn empty() -> Self {
        EdgePath(Vec::new())
    }

    pub fn edges(&self) -> &[Edge] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Edge> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Edge> {
        self.0.last().copied()
    }

    pub fn reversed(&self) -> EdgePath {
        EdgePath(self.0.iter().rev().map(|e| e.reverse()).collect())
    }

    pub fn concat(&self, other: &EdgePath) -> EdgePath {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        EdgePath(v)
    }

    pub fn push(&mut self, e: Edge) {
        self.0.push(e);
    }

    pub fn slice(&self, from: usize, to: usize) -> EdgePath {
        EdgePath(self.0[from..to].to_vec())
    }

    pub fn starts_with(&self, prefix: &EdgePath) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn common_prefix_len(&self, other: &EdgePath) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }

    pub fn is_consistent(&self, g: &MarkedGraph) -> bool {
        self.0.iter().all(|&e| g.contains(e))
            && self.0.windows(2).all(|w| g.term(w[0]) == g.init(w[1]))
    }

    /// A path is tight when it has no subword `e e'`.
    pub fn is_tight(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].reverse())
    }

    /// Free reduction: the unique tight path homotopic rel endpoints.
    pub fn tighten(&self) -> EdgePath {
        let mut out: Vec<Edge> = Vec::with_capacity(self.0.len());
        for &e in &self.0 {
            if out.last() == Some(&e.reverse()) {
                out.pop();
            } else {
                out.push(e);
            }
        }
        EdgePath(out)
    }

    /// Turns crossed by the path, as (incoming reversed, outgoing) pairs.
    pub fn turns(&self) -> impl Iterator<Item = Turn> + '_ {
        self.0.windows(2).map(|w| Turn::new(w[0].reverse(), w[1]))
    }
}

/// Free reduction as a free function, mirroring [`EdgePath::tighten`].
pub fn tighten(path: &EdgePath) -> EdgePath {
    path.tighten()
}

/// An unordered pair of directions at a common vertex, stored sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Turn(pub Direction, pub Direction);

impl Turn {
    pub fn new(a: Direction, b: Direction) -> Self {
        if a <= b {
            Turn(a, b)
        } else {
            Turn(b, a)
        }
    }

    pub fn is_degenerate(self) -> bool {
        self.0 == self.1
    }

    pub fn label(self, g: &MarkedGraph) -> String {
        format!("{{{},{}}}", g.edge_label(self.0), g.edge_label(self.1))
    }
}

/// A topological representative: vertices to vertices, oriented edges to
/// tight edge paths, equivariant under reversal.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphMap {
    domain: MarkedGraph,
    codomain: MarkedGraph,
    vertex_map: Vec<VertexId>,
    /// Image of each edge pair in its stored orientation.
    images: Vec<EdgePath>,
}

impl GraphMap {
    /// Validates tightness and endpoint compatibility of every image.
    pub fn new(
        domain: MarkedGraph,
        codomain: MarkedGraph,
        vertex_map: Vec<VertexId>,
        images: Vec<EdgePath>,
    ) -> Result<Self> {
        if vertex_map.len() != domain.vertex_count() || images.len() != domain.edge_count() {
            return Err(Error::Map("vertex map or edge map has the wrong size".into()));
        }
        if vertex_map.iter().any(|v| v.0 >= codomain.vertex_count()) {
            return Err(Error::Map("vertex map leaves the codomain".into()));
        }
        for (i, img) in images.iter().enumerate() {
            let name = &domain.edge_pairs()[i].name;
            if !img.is_consistent(&codomain) {
                return Err(Error::Map(format!("image of `{name}` is not a path in the codomain")));
            }
            if !img.is_tight() {
                return Err(Error::Map(format!("image of `{name}` is not tight")));
            }
            let e = Edge::forward(i);
            let (a, b) = (vertex_map[domain.init(e).0], vertex_map[domain.term(e).0]);
            let ok = match (img.first(), img.last()) {
                (Some(f), Some(l)) => codomain.init(f) == a && codomain.term(l) == b,
                _ => a == b,
            };
            if !ok {
                return Err(Error::Map(format!(
                    "image of `{name}` does not respect the vertex map on endpoints"
                )));
            }
        }
        Ok(GraphMap { domain, codomain, vertex_map, images })
    }

    /// Infers the vertex map from the endpoints of nonempty images.
    pub fn from_images(domain: MarkedGraph, codomain: MarkedGraph, images: Vec<EdgePath>) -> Result<Self> {
        if images.len() != domain.edge_count() {
            return Err(Error::Map("edge map has the wrong size".into()));
        }
        let mut vm: Vec<Option<VertexId>> = vec![None; domain.vertex_count()];
        for (i, img) in images.iter().enumerate() {
            let (Some(f), Some(l)) = (img.first(), img.last()) else { continue };
            if !codomain.contains(f) || !codomain.contains(l) {
                return Err(Error::Map(format!(
                    "image of `{}` uses an edge outside the codomain",
                    domain.edge_pairs()[i].name
                )));
            }
            let e = Edge::forward(i);
            for (v, w) in [(domain.init(e), codomain.init(f)), (domain.term(e), codomain.term(l))] {
                match vm[v.0] {
                    None => vm[v.0] = Some(w),
                    Some(x) if x != w => {
                        return Err(Error::Map(format!(
                            "images disagree on where vertex `{}` goes",
                            domain.vertex(v).name
                        )))
                    }
                    _ => {}
                }
            }
        }
        let vertex_map = vm
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| {
                    Error::Map(format!("cannot infer image of vertex `{}`", domain.vertices()[i].name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GraphMap::new(domain, codomain, vertex_map, images)
    }

    /// Self-map of `graph` given by `(edge label, image word)` rules.
    pub fn from_words(graph: MarkedGraph, rules: &[(&str, &str)]) -> Result<Self> {
        let mut images = vec![None; graph.edge_count()];
        for (lhs, rhs) in rules {
            let e = graph.edge_by_label(lhs).ok_or_else(|| Error::Map(format!("unknown edge `{lhs}`")))?;
            let img = graph.parse_path(rhs)?;
            images[e.pair()] = Some(if e.is_reversed() { img.reversed() } else { img });
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| {
                img.ok_or_else(|| Error::Map(format!("no image for `{}`", graph.edge_pairs()[i].name)))
            })
            .collect::<Result<Vec<_>>>()?;
        GraphMap::from_images(graph.clone(), graph, images)
    }

    /// Identity self-map.
    pub fn identity(graph: MarkedGraph) -> Self {
        let images = (0..graph.edge_count()).map(|i| EdgePath(vec![Edge::forward(i)])).collect();
        let vertex_map = graph.vertex_ids().collect();
        GraphMap { codomain: graph.clone(), domain: graph, vertex_map, images }
    }

    pub fn domain(&self) -> &MarkedGraph {
        &self.domain
    }

    pub fn codomain(&self) -> &MarkedGraph {
        &self.codomain
    }

    /// The underlying graph of a self-map.
    pub fn graph(&self) -> &MarkedGraph {
        &self.domain
    }

    pub fn is_self_map(&self) -> bool {
        self.domain.same_shape(&self.codomain)
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.0]
    }

    pub fn vertex_map(&self) -> &[VertexId] {
        &self.vertex_map
    }

    /// Image of an oriented edge.
    pub fn image(&self, e: Edge) -> EdgePath {
        let img = &self.images[e.pair()];
        if e.is_reversed() {
            img.reversed()
        } else {
            img.clone()
        }
    }

    pub fn images(&self) -> &[EdgePath] {
        &self.images
    }

    /// Image of a path without tightening.
    pub fn image_of_path(&self, path: &EdgePath) -> EdgePath {
        let mut out = Vec::new();
        for &e in path.edges() {
            let img = &self.images[e.pair()];
            if e.is_reversed() {
                out.extend(img.edges().iter().rev().map(|x| x.reverse()));
            } else {
                out.extend_from_slice(img.edges());
            }
        }
        EdgePath(out)
    }

    /// `g#`: the tightened image of a path.
    pub fn apply(&self, path: &EdgePath) -> Result<EdgePath> {
        if let Some(&bad) = path.edges().iter().find(|e| !self.domain.contains(**e)) {
            return Err(Error::Map(format!("edge index {} is not in the domain", bad.pair())));
        }
        Ok(self.image_of_path(path).tighten())
    }

    /// Replaces the metric on the domain (and codomain, for self-maps).
    pub fn with_metric(mut self, lengths: Vec<f64>) -> Result<Self> {
        let self_map = self.is_self_map() && self.domain == self.codomain;
        self.domain = self.domain.with_lengths(lengths.clone())?;
        if self_map {
            self.codomain = self.codomain.with_lengths(lengths)?;
        }
        Ok(self)
    }

    /// Renames edge pairs on both sides; labels missing from `names` are kept.
    pub fn relabel(&self, names: &HashMap<String, String>) -> Result<GraphMap> {
        let rename = |g: &MarkedGraph| -> Result<MarkedGraph> {
            let edges = g
                .edge_pairs()
                .iter()
                .map(|p| EdgePair {
                    name: names.get(&p.name).cloned().unwrap_or_else(|| p.name.clone()),
                    ..p.clone()
                })
                .collect();
            let mut out = MarkedGraph::new(g.vertices().to_vec(), edges)?;
            out.lengths = g.lengths.clone();
            Ok(out)
        };
        GraphMap::new(
            rename(&self.domain)?,
            rename(&self.codomain)?,
            self.vertex_map.clone(),
            self.images.clone(),
        )
    }

    /// Total number of edges in the images.
    pub fn total_image_length(&self) -> usize {
        self.images.iter().map(EdgePath::len).sum()
    }
}

/// `g#(path)`.
pub fn apply_map(g: &GraphMap, path: &EdgePath) -> Result<EdgePath> {
    g.apply(path)
}

/// The composite `g ∘ h` (apply `h` first), with tightened edge images.
pub fn compose(g: &GraphMap, h: &GraphMap) -> Result<GraphMap> {
    if !h.codomain.same_shape(&g.domain) {
        return Err(Error::Map("codomain of the inner map differs from the domain of the outer map".into()));
    }
    let images = h.images.iter().map(|img| g.image_of_path(img).tighten()).collect();
    let vertex_map = h.vertex_map.iter().map(|v| g.vertex_map[v.0]).collect();
    Ok(GraphMap { domain: h.domain.clone(), codomain: g.codomain.clone(), vertex_map, images })
}

/// `g^k` for a self-map, by repeated squaring.
pub fn power(g: &GraphMap, k: u32) -> Result<GraphMap> {
    if k == 0 {
        return Err(Error::Map("power exponent must be positive".into()));
    }
    if !g.is_self_map() {
        return Err(Error::Map("power of a map that is not a self-map".into()));
    }
    let mut result: Option<GraphMap> = None;
    let mut base = g.clone();
    let mut k = k;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => compose(&base, &r)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = compose(&base, &base)?;
    }
    Ok(result.expect("k >= 1"))
}

impl fmt::Display for GraphMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.domain.edge_pairs().iter().enumerate() {
            writeln!(f, "{} -> {}", p.name, self.codomain.path_label(&self.images[i]))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> GraphMap {
        GraphMap::from_words(MarkedGraph::rose(&["a", "b"]).unwrap(), &[("a", "a b"), ("b", "a")]).unwrap()
    }

    fn word(g: &GraphMap, w: &str) -> EdgePath {
        g.graph().parse_path(w).unwrap()
    }

    #[test]
    fn tighten_examples() {
        let f = fib();
        assert_eq!(word(&f, "a a' b").tighten(), word(&f, "b"));
        assert_eq!(word(&f, "a b").tighten(), word(&f, "a b"));
        let w = word(&f, "a b b a' b'");
        assert!(w.concat(&w.reversed()).tighten().is_empty());
    }

    #[test]
    fn apply_map_examples() {
        let f = fib();
        assert_eq!(f.apply(&word(&f, "b a")).unwrap(), word(&f, "a a b"));
        assert!(f.apply(&word(&f, "a' a")).unwrap().is_empty());
        assert_eq!(f.apply(&word(&f, "b a'")).unwrap(), word(&f, "a b' a'"));
        assert!(f.apply(&EdgePath::from(vec![Edge::forward(7)])).is_err());
    }

    #[test]
    fn power_examples() {
        let f = fib();
        let f2 = power(&f, 2).unwrap();
        assert_eq!(f2.image(Edge::forward(0)), word(&f, "a b a"));
        assert_eq!(f2.image(Edge::forward(1)), word(&f, "a b"));
        assert_eq!(power(&f, 1).unwrap(), f);
        let f3 = power(&f, 3).unwrap();
        for e in f.graph().oriented_edges() {
            assert_eq!(f3.image(e), f.apply(&f2.image(e)).unwrap());
        }
    }

    #[test]
    fn rejects_bad_graphs_and_maps() {
        let v = |n: &str, s| Vertex { name: n.into(), subdivision: s };
        let e = |n: &str, a, b| EdgePair { name: n.into(), init: VertexId(a), term: VertexId(b) };
        assert!(MarkedGraph::new(vec![v("x", false)], vec![e("a", 0, 0)]).is_err());
        assert!(MarkedGraph::new(vec![v("x", false), v("x", false)], vec![]).is_err());
        assert!(MarkedGraph::new(vec![v("x", false)], vec![e("a", 0, 3)]).is_err());
        // theta graph is fine, a flagged subdivision vertex of valence 2 too
        let theta = MarkedGraph::new(
            vec![v("p", false), v("q", false)],
            vec![e("a", 0, 1), e("b", 0, 1), e("c", 0, 1)],
        );
        assert!(theta.is_ok());
        let sub = MarkedGraph::new(
            vec![v("p", false), v("s", true)],
            vec![e("a", 0, 1), e("b", 1, 0), e("c", 0, 0)],
        );
        assert!(sub.is_ok());
        let rose = MarkedGraph::rose(&["a", "b"]).unwrap();
        assert!(GraphMap::from_words(rose.clone(), &[("a", "a a'"), ("b", "b")]).is_err());
        assert!(GraphMap::from_words(rose, &[("a", "a")]).is_err());
    }

    #[test]
    fn reversal_is_fixed_point_free_involution() {
        for i in 0..20 {
            let e = Edge::from_index(i);
            assert_ne!(e, e.reverse());
            assert_eq!(e, e.reverse().reverse());
            assert_eq!(e.pair(), e.reverse().pair());
        }
    }
}
