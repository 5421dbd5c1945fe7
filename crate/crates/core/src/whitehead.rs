//! Local, stable and ideal Whitehead graphs, the rotationless index and cut
//! vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphMap, Turn, VertexId};
use crate::halfint::HalfInt;
use crate::nielsen::{find_nielsen_paths, stability_of, Stability};
use crate::traintrack::{gate_index_sum, gates, is_rotationless, periodic_structure, taken_turns};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Local,
    Stable,
    Ideal,
}

/// A finite simple graph; vertex `i` is labelled `labels[i]`, edges are
/// stored as sorted pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WhiteheadGraph {
    pub flavor: Flavor,
    pub labels: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl WhiteheadGraph {
    pub fn new(flavor: Flavor, labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        WhiteheadGraph { flavor, labels, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.labels.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.neighbors();
        let mut seen = vec![false; self.labels.len()];
        let mut out = Vec::new();
        for s in 0..self.labels.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &w in &adj[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Keeps only the given vertices, renumbered in increasing order.
    pub fn induced(&self, keep: &[usize]) -> WhiteheadGraph {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let index: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|(a, b)| Some((*index.get(a)?, *index.get(b)?)));
        WhiteheadGraph::new(self.flavor, labels, edges)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "graph {:?} {{", format!("{:?}", self.flavor).to_lowercase());
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label={l:?}];");
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -- n{b};");
        }
        s.push_str("}\n");
        s
    }
}

/// Vertices are the directions at `v`; edges are the taken turns at `v`.
pub fn local_whitehead_graph(g: &GraphMap, v: VertexId) -> Result<WhiteheadGraph> {
    let taken = taken_turns(g)?;
    let graph = g.graph();
    let dirs = graph.directions_at(v);
    let labels = dirs.iter().map(|&d| graph.edge_label(d)).collect();
    let pos = |d| dirs.iter().position(|&x| x == d);
    let edges = taken
        .iter()
        .filter_map(|t| Some((pos(t.0)?, pos(t.1)?)))
        .collect::<Vec<_>>();
    Ok(WhiteheadGraph::new(Flavor::Local, labels, edges))
}

/// Vertices are the gates at `v`, labelled by their periodic direction;
/// edges are taken turns at `v` pushed to gate pairs.
pub fn stable_whitehead_graph(g: &GraphMap, v: VertexId) -> Result<WhiteheadGraph> {
    if !is_rotationless(g)? {
        return Err(Error::Precondition("stable Whitehead graph needs a rotationless map".into()));
    }
    if g.vertex_image(v) != v {
        return Err(Error::Precondition(format!("vertex `{}` is not fixed", g.graph().vertex(v).name)));
    }
    let taken = taken_turns(g)?;
    stable_graph_from(g, v, &taken, Flavor::Stable, "")
}

fn stable_graph_from(
    g: &GraphMap,
    v: VertexId,
    taken: &BTreeSet<Turn>,
    flavor: Flavor,
    prefix: &str,
) -> Result<WhiteheadGraph> {
    let graph = g.graph();
    let gs = gates(g)?;
    let here: Vec<usize> = (0..gs.gates.len()).filter(|&i| gs.gates[i].vertex == v).collect();
    let labels = here
        .iter()
        .map(|&i| {
            let gate = &gs.gates[i];
            let rep = gate.directions.iter().copied().find(|&d| gs.is_periodic(d)).unwrap_or(gate.directions[0]);
            format!("{prefix}{}", graph.edge_label(rep))
        })
        .collect();
    let pos = |d: crate::graph::Direction| here.iter().position(|&i| i == gs.gate_of[d.index()]);
    let edges = taken
        .iter()
        .filter_map(|t| Some((pos(t.0)?, pos(t.1)?)))
        .collect::<Vec<_>>();
    Ok(WhiteheadGraph::new(flavor, labels, edges))
}

fn require_nielsen_free(g: &GraphMap, bound: usize) -> Result<()> {
    let report = find_nielsen_paths(g, bound)?;
    match stability_of(&report) {
        Stability::FullyStable => Ok(()),
        Stability::NotFullyStable => Err(Error::NielsenPathPresent(format!(
            "{} Nielsen path(s), e.g. {}",
            report.paths.len(),
            report.paths[0].label
        ))),
        Stability::UnknownAtBound => Err(Error::UnknownAtBound { bound }),
    }
}

/// Disjoint union of the stable Whitehead graphs at principal vertices,
/// keeping components with at least three vertices. Only defined here for
/// representatives certified free of Nielsen paths.
pub fn ideal_whitehead_graph(g: &GraphMap, bound: usize) -> Result<WhiteheadGraph> {
    require_nielsen_free(g, bound)?;
    ideal_whitehead_graph_unchecked(g)
}

pub(crate) fn ideal_whitehead_graph_unchecked(g: &GraphMap) -> Result<WhiteheadGraph> {
    if !is_rotationless(g)? {
        return Err(Error::Precondition("ideal Whitehead graph needs a rotationless map".into()));
    }
    let ps = periodic_structure(g)?;
    let taken = taken_turns(g)?;
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    for &v in &ps.principal_vertices {
        let prefix = format!("{}:", g.graph().vertex(v).name);
        let sw = stable_graph_from(g, v, &taken, Flavor::Ideal, &prefix)?;
        let base = labels.len();
        labels.extend(sw.labels);
        edges.extend(sw.edges.iter().map(|&(a, b)| (a + base, b + base)));
    }
    let union = WhiteheadGraph::new(Flavor::Ideal, labels, edges);
    let keep: Vec<usize> = union.components().into_iter().filter(|c| c.len() >= 3).flatten().collect();
    Ok(union.induced(&keep))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub index_list: Vec<HalfInt>,
    pub index_sum: HalfInt,
    /// (vertex name, number of gates) for each principal vertex.
    pub gate_counts: Vec<(String, usize)>,
    pub rank: usize,
    pub gate_index_sum: HalfInt,
}

/// Index list `1 - #gates/2` over principal vertices, sorted by increasing
/// absolute value, and its sum `i(φ)`.
pub fn index_report(g: &GraphMap, bound: usize) -> Result<IndexReport> {
    require_nielsen_free(g, bound)?;
    index_report_unchecked(g)
}

pub(crate) fn index_report_unchecked(g: &GraphMap) -> Result<IndexReport> {
    if !is_rotationless(g)? {
        return Err(Error::Precondition("index needs a rotationless map".into()));
    }
    let ps = periodic_structure(g)?;
    let gs = gates(g)?;
    let graph = g.graph();
    let gate_counts: Vec<(String, usize)> = ps
        .principal_vertices
        .iter()
        .map(|&v| (graph.vertex(v).name.clone(), gs.gate_count_at(v)))
        .collect();
    let mut index_list: Vec<HalfInt> = gate_counts.iter().map(|&(_, k)| HalfInt::one_minus_half(k)).collect();
    index_list.sort_by_key(|x| x.abs());
    let index_sum = index_list.iter().copied().sum();
    let gi = gate_index_sum(g)?;
    if gi > index_sum {
        return Err(Error::OracleMismatch(format!("GI = {gi} exceeds the index {index_sum}")));
    }
    Ok(IndexReport { index_list, index_sum, gate_counts, rank: graph.rank(), gate_index_sum: gi })
}

/// Index computed over Nielsen classes of principal points: points joined
/// by indivisible Nielsen paths form one class, and a class with `V` points,
/// `E` paths and `K` gates in total contributes `V - (K + E)/2`. Without
/// Nielsen paths this is the gate formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NielsenClassIndex {
    pub contributions: Vec<HalfInt>,
    pub index_sum: HalfInt,
    pub classes: usize,
}

pub fn nielsen_class_index(g: &GraphMap, bound: usize) -> Result<NielsenClassIndex> {
    let report = find_nielsen_paths(g, bound)?;
    if !report.exhaustive {
        return Err(Error::UnknownAtBound { bound });
    }
    let h = &report.subdivision.map;
    let gs = gates(h)?;
    let ps = periodic_structure(g)?;
    let mut nodes: BTreeSet<usize> = ps.principal_vertices.iter().map(|v| v.0).collect();
    let mut links = Vec::new();
    for np in report.paths.iter().filter(|p| p.indivisible) {
        let (first, last) = (np.path.first().expect("nonempty"), np.path.last().expect("nonempty"));
        let (u, w) = (h.graph().init(first).0, h.graph().term(last).0);
        nodes.insert(u);
        nodes.insert(w);
        links.push((u, w));
    }
    let mut parent: BTreeMap<usize, usize> = nodes.iter().map(|&v| (v, v)).collect();
    fn find(parent: &mut BTreeMap<usize, usize>, v: usize) -> usize {
        let p = parent[&v];
        if p == v {
            return v;
        }
        let root = find(parent, p);
        parent.insert(v, root);
        root
    }
    for &(u, w) in &links {
        let (ru, rw) = (find(&mut parent, u), find(&mut parent, w));
        parent.insert(ru, rw);
    }
    // twice the contribution: 2V - K - E per class
    let mut halves: BTreeMap<usize, i64> = BTreeMap::new();
    for &v in &nodes {
        let r = find(&mut parent, v);
        *halves.entry(r).or_default() += 2 - gs.gate_count_at(VertexId(v)) as i64;
    }
    for &(u, _) in &links {
        let r = find(&mut parent, u);
        *halves.entry(r).or_default() -= 1;
    }
    let mut contributions: Vec<HalfInt> = halves.values().map(|&x| HalfInt::from_halves(x)).collect();
    contributions.sort_by_key(|x| x.abs());
    Ok(NielsenClassIndex { index_sum: contributions.iter().copied().sum(), classes: contributions.len(), contributions })
}

/// Articulation points, by the low-link depth-first search.
pub fn cut_vertices(w: &WhiteheadGraph) -> BTreeSet<usize> {
    let adj = w.neighbors();
    let n = adj.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut out = BTreeSet::new();
    let mut time = 0;
    fn dfs(
        u: usize,
        parent: Option<usize>,
        adj: &[Vec<usize>],
        disc: &mut [usize],
        low: &mut [usize],
        time: &mut usize,
        out: &mut BTreeSet<usize>,
    ) {
        disc[u] = *time;
        low[u] = *time;
        *time += 1;
        let mut children = 0;
        for &v in &adj[u] {
            if disc[v] == usize::MAX {
                children += 1;
                dfs(v, Some(u), adj, disc, low, time, out);
                low[u] = low[u].min(low[v]);
                if parent.is_some() && low[v] >= disc[u] {
                    out.insert(u);
                }
            } else if Some(v) != parent {
                low[u] = low[u].min(disc[v]);
            }
        }
        if parent.is_none() && children > 1 {
            out.insert(u);
        }
    }
    for s in 0..n {
        if disc[s] == usize::MAX {
            dfs(s, None, &adj, &mut disc, &mut low, &mut time, &mut out);
        }
    }
    out
}
