//! Isomorphism and canonical forms for small marked graphs.
//!
//! Both searches backtrack over vertex bijections restricted to classes of
//! equal (valence, loop count); edges between a matched pair of vertices are
//! interchangeable, so the edge bijection is read off afterwards.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Direction, Edge, EdgePair, MarkedGraph, Turn, Vertex, VertexId, LENGTH_TOL};

/// A graph isomorphism: `vertices[v]` is the image of vertex `v`, `edges[i]`
/// the oriented image of edge pair `i` in its stored orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<Edge>,
}

impl Isomorphism {
    pub fn map_edge(&self, e: Edge) -> Edge {
        let img = self.edges[e.pair()];
        if e.is_reversed() {
            img.reverse()
        } else {
            img
        }
    }
}

fn multiplicities(g: &MarkedGraph) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let mut m = vec![vec![0u32; n]; n];
    for p in g.edge_pairs() {
        m[p.init.0][p.term.0] += 1;
        if p.init != p.term {
            m[p.term.0][p.init.0] += 1;
        }
    }
    m
}

fn invariants(g: &MarkedGraph, mult: &[Vec<u32>]) -> Vec<(usize, u32)> {
    g.vertex_ids().map(|v| (g.valence(v), mult[v.0][v.0])).collect()
}

struct Matcher<'a> {
    g1: &'a MarkedGraph,
    g2: &'a MarkedGraph,
    m1: Vec<Vec<u32>>,
    m2: Vec<Vec<u32>>,
    inv1: Vec<(usize, u32)>,
    inv2: Vec<(usize, u32)>,
    order: Vec<usize>,
    assign: Vec<Option<usize>>,
    used: Vec<bool>,
    tolerance: Option<f64>,
}

impl Matcher<'_> {
    fn search(&mut self, depth: usize) -> Option<Isomorphism> {
        if depth == self.order.len() {
            return self.edge_bijection();
        }
        let u = self.order[depth];
        for w in 0..self.g2.vertex_count() {
            if self.used[w] || self.inv1[u] != self.inv2[w] {
                continue;
            }
            let consistent = self.order[..depth].iter().all(|&x| {
                let y = self.assign[x].expect("assigned");
                self.m1[u][x] == self.m2[w][y]
            });
            if !consistent {
                continue;
            }
            self.assign[u] = Some(w);
            self.used[w] = true;
            if let Some(iso) = self.search(depth + 1) {
                return Some(iso);
            }
            self.assign[u] = None;
            self.used[w] = false;
        }
        None
    }

    fn edge_bijection(&self) -> Option<Isomorphism> {
        let vmap: Vec<usize> = self.assign.iter().map(|a| a.expect("complete")).collect();
        // group oriented edges of g2 by (init, term), normalized so init <= term
        let mut pool: HashMap<(usize, usize), Vec<Edge>> = HashMap::new();
        for (i, p) in self.g2.edge_pairs().iter().enumerate() {
            let e = if p.init.0 <= p.term.0 { Edge::forward(i) } else { Edge::new(i, true) };
            pool.entry((self.g2.init(e).0, self.g2.term(e).0)).or_default().push(e);
        }
        let mut wanted: HashMap<(usize, usize), Vec<Edge>> = HashMap::new();
        for (i, p) in self.g1.edge_pairs().iter().enumerate() {
            let (a, b) = (vmap[p.init.0], vmap[p.term.0]);
            let e = if a <= b { Edge::forward(i) } else { Edge::new(i, true) };
            wanted.entry((a.min(b), a.max(b))).or_default().push(e);
        }
        let mut edges = vec![Edge::forward(0); self.g1.edge_count()];
        for (key, mut src) in wanted {
            let mut dst = pool.get(&key)?.clone();
            if dst.len() != src.len() {
                return None;
            }
            if let Some(tol) = self.tolerance {
                let len1 = |e: &Edge| self.g1.length(*e).unwrap_or(0.0);
                let len2 = |e: &Edge| self.g2.length(*e).unwrap_or(0.0);
                src.sort_by(|a, b| len1(a).total_cmp(&len1(b)));
                dst.sort_by(|a, b| len2(a).total_cmp(&len2(b)));
                if src.iter().zip(&dst).any(|(a, b)| (len1(a) - len2(b)).abs() > tol) {
                    return None;
                }
            }
            for (s, d) in src.into_iter().zip(dst) {
                edges[s.pair()] = if s.is_reversed() { d.reverse() } else { d };
            }
        }
        Some(Isomorphism { vertices: vmap.into_iter().map(VertexId).collect(), edges })
    }
}

/// Finds an isomorphism `g1 -> g2` commuting with reversal and endpoints,
/// matching lengths within `1e-9` when `respect_lengths` is set. The search
/// order is fixed, so the answer is deterministic.
pub fn are_isomorphic(g1: &MarkedGraph, g2: &MarkedGraph, respect_lengths: bool) -> Option<Isomorphism> {
    match_graphs(g1, g2, respect_lengths.then_some(LENGTH_TOL))
}

/// An isomorphism matching edge lengths within `tol`.
pub fn are_isometric(g1: &MarkedGraph, g2: &MarkedGraph, tol: f64) -> Option<Isomorphism> {
    match_graphs(g1, g2, Some(tol))
}

fn match_graphs(g1: &MarkedGraph, g2: &MarkedGraph, tolerance: Option<f64>) -> Option<Isomorphism> {
    if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    if tolerance.is_some() && (g1.lengths().is_none() || g2.lengths().is_none()) {
        return None;
    }
    let (m1, m2) = (multiplicities(g1), multiplicities(g2));
    let (inv1, inv2) = (invariants(g1, &m1), invariants(g2, &m2));
    let (mut s1, mut s2) = (inv1.clone(), inv2.clone());
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return None;
    }
    let order = search_order(&m1);
    let n = g1.vertex_count();
    let mut matcher = Matcher {
        g1,
        g2,
        m1,
        m2,
        inv1,
        inv2,
        order,
        assign: vec![None; n],
        used: vec![false; n],
        tolerance,
    };
    matcher.search(0)
}

/// Breadth-first order from vertex 0, so each vertex after the first is
/// adjacent to an earlier one and the adjacency check prunes early.
fn search_order(mult: &[Vec<u32>]) -> Vec<usize> {
    let n = mult.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        order.push(start);
        let mut i = order.len() - 1;
        while i < order.len() {
            let u = order[i];
            for w in 0..n {
                if !seen[w] && mult[u][w] > 0 {
                    seen[w] = true;
                    order.push(w);
                }
            }
            i += 1;
        }
    }
    order
}

/// Canonical string for a graph decorated with a list of turns, invariant
/// under graph isomorphism (including relabeling of edges and vertices).
/// Intended for the small graphs met along fold lines.
pub fn canonical_code(g: &MarkedGraph, marked: &[Turn]) -> String {
    let mult = multiplicities(g);
    let inv = invariants(g, &mult);
    let n = g.vertex_count();
    // vertices sorted by invariant; permutations only within equal classes
    let mut by_inv: Vec<usize> = (0..n).collect();
    by_inv.sort_by_key(|&v| inv[v]);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in by_inv {
        match classes.last_mut() {
            Some(c) if inv[c[0]] == inv[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best: Option<Vec<u64>> = None;
    let mut label = vec![0usize; n];
    enumerate_class_perms(&classes, 0, &mut Vec::new(), &mut |slots: &[usize]| {
        // slots[k] is the vertex receiving label k
        for (k, &v) in slots.iter().enumerate() {
            label[v] = k;
        }
        let mut code: Vec<u64> = Vec::with_capacity(n * n + 4 * marked.len() + 2);
        code.push(n as u64);
        code.push(g.edge_count() as u64);
        for &v in slots {
            code.push(inv[v].0 as u64);
        }
        for &a in slots {
            for &b in slots {
                code.push(mult[a][b] as u64);
            }
        }
        let mut decor: Vec<[u64; 5]> = marked
            .iter()
            .map(|t| {
                let d = |x: Direction| {
                    let (a, b) = (label[g.init(x).0] as u64, label[g.term(x).0] as u64);
                    (a, b)
                };
                let (x, y) = (d(t.0), d(t.1));
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                [x.0, x.1, y.0, y.1, (t.1 == t.0.reverse()) as u64]
            })
            .collect();
        decor.sort();
        code.extend(decor.into_iter().flatten());
        if best.as_ref().map_or(true, |b| code < *b) {
            best = Some(code);
        }
    });
    let best = best.unwrap_or_default();
    best.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
}

fn enumerate_class_perms(
    classes: &[Vec<usize>],
    idx: usize,
    prefix: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if idx == classes.len() {
        visit(prefix);
        return;
    }
    let class = &classes[idx];
    let mut perm = class.clone();
    permute(&mut perm, 0, &mut |p: &[usize]| {
        let base = prefix.len();
        prefix.extend_from_slice(p);
        enumerate_class_perms(classes, idx + 1, prefix, visit);
        prefix.truncate(base);
    });
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Result of erasing valence-2 vertices.
#[derive(Clone, Debug)]
pub struct Suppressed {
    pub graph: MarkedGraph,
    /// For each direction of the original graph based at a surviving vertex,
    /// the corresponding direction of the new graph.
    pub directions: HashMap<Direction, Direction>,
}

/// Erases every valence-2 vertex, merging the two edges through it (and
/// adding lengths when present).
pub fn suppress_valence_two(g: &MarkedGraph) -> Result<Suppressed> {
    let keep: Vec<bool> = g.vertex_ids().map(|v| g.valence(v) != 2).collect();
    if !keep.iter().any(|&k| k) {
        return Err(Error::Graph("graph is a circle; nothing to keep".into()));
    }
    let mut new_index = vec![usize::MAX; g.vertex_count()];
    let mut vertices = Vec::new();
    for v in g.vertex_ids() {
        if keep[v.0] {
            new_index[v.0] = vertices.len();
            vertices.push(Vertex { name: g.vertex(v).name.clone(), subdivision: false });
        }
    }
    let star = g.stars();
    let mut visited = vec![false; 2 * g.edge_count()];
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    let mut directions = HashMap::new();
    for d in g.oriented_edges() {
        if !keep[g.init(d).0] || visited[d.index()] {
            continue;
        }
        let mut walk = vec![d];
        let mut cur = d;
        while !keep[g.term(cur).0] {
            let w = g.term(cur);
            let next = star[w.0]
                .iter()
                .copied()
                .find(|&x| x != cur.reverse())
                .expect("valence-2 vertex has a second direction");
            walk.push(next);
            cur = next;
        }
        let last = *walk.last().expect("nonempty");
        visited[d.index()] = true;
        visited[last.reverse().index()] = true;
        let pair = edges.len();
        edges.push(EdgePair {
            name: g.edge_pairs()[d.pair()].name.clone(),
            init: VertexId(new_index[g.init(d).0]),
            term: VertexId(new_index[g.term(last).0]),
        });
        if let Some(ls) = g.lengths() {
            lengths.push(walk.iter().map(|e| ls[e.pair()]).sum());
        }
        directions.insert(d, Edge::forward(pair));
        directions.insert(last.reverse(), Edge::new(pair, true));
    }
    let mut graph = MarkedGraph::with_auto_subdivision(vertices, edges)?;
    if g.lengths().is_some() {
        graph = graph.with_lengths(lengths)?;
    }
    Ok(Suppressed { graph, directions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> MarkedGraph {
        let v = |n: &str| Vertex { name: n.into(), subdivision: false };
        let e = |n: &str, a, b| EdgePair { name: n.into(), init: VertexId(a), term: VertexId(b) };
        MarkedGraph::new(vec![v("p"), v("q")], vec![e("a", 0, 1), e("b", 1, 0), e("c", 0, 1)]).unwrap()
    }

    #[test]
    fn roses_are_isomorphic() {
        let r1 = MarkedGraph::rose(&["a", "b"]).unwrap();
        let r2 = MarkedGraph::rose(&["x", "y"]).unwrap();
        assert!(are_isomorphic(&r1, &r2, false).is_some());
        assert!(are_isomorphic(&r1, &theta(), false).is_none());
    }

    #[test]
    fn lengths_matter_when_requested() {
        let r1 = MarkedGraph::rose(&["a", "b"]).unwrap().with_lengths(vec![0.25, 0.75]).unwrap();
        let r2 = MarkedGraph::rose(&["x", "y"]).unwrap().with_lengths(vec![0.75, 0.25]).unwrap();
        let r3 = MarkedGraph::rose(&["x", "y"]).unwrap().with_lengths(vec![0.5, 0.5]).unwrap();
        let iso = are_isomorphic(&r1, &r2, true).unwrap();
        assert_eq!(iso.edges[0].pair(), 1);
        assert!(are_isomorphic(&r1, &r3, true).is_none());
        assert!(are_isomorphic(&r1, &r3, false).is_some());
    }

    #[test]
    fn theta_isomorphism_respects_orientation() {
        let t = theta();
        let iso = are_isomorphic(&t, &t, false).unwrap();
        for e in t.oriented_edges() {
            let f = iso.map_edge(e);
            assert_eq!(iso.vertices[t.init(e).0], t.init(f));
            assert_eq!(iso.vertices[t.term(e).0], t.term(f));
        }
    }

    #[test]
    fn canonical_code_sees_decoration() {
        let r = MarkedGraph::rose(&["a", "b"]).unwrap();
        let t1 = Turn::new(Edge::forward(0), Edge::forward(1));
        let t2 = Turn::new(Edge::forward(0), Edge::new(0, true));
        assert_eq!(canonical_code(&r, &[t1]), canonical_code(&r, &[Turn::new(Edge::new(1, true), Edge::forward(0))]));
        assert_ne!(canonical_code(&r, &[t1]), canonical_code(&r, &[t2]));
        let t = theta();
        assert_ne!(canonical_code(&r, &[]), canonical_code(&t, &[]));
    }

    #[test]
    fn suppression_merges_chains() {
        let v = |n: &str, s| Vertex { name: n.into(), subdivision: s };
        let e = |n: &str, a, b| EdgePair { name: n.into(), init: VertexId(a), term: VertexId(b) };
        let g = MarkedGraph::new(
            vec![v("p", false), v("s", true)],
            vec![e("a", 0, 1), e("b", 1, 0), e("c", 0, 0)],
        )
        .unwrap()
        .with_lengths(vec![0.2, 0.3, 0.5])
        .unwrap();
        let s = suppress_valence_two(&g).unwrap();
        assert_eq!(s.graph.vertex_count(), 1);
        assert_eq!(s.graph.edge_count(), 2);
        assert!((s.graph.volume().unwrap() - 1.0).abs() < 1e-12);
        assert!(are_isomorphic(&s.graph, &MarkedGraph::rose(&["x", "y"]).unwrap(), false).is_some());
        assert_eq!(s.directions.len(), 4);
    }
}
