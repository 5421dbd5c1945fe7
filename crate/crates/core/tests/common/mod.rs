#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use traintrack_axis::graph::{Direction, Edge, EdgePath, GraphMap, MarkedGraph, VertexId};
use traintrack_axis::whitehead::WhiteheadGraph;

pub const CORPUS_SEED: u64 = 0x7a11_70ad;

const LETTERS: [&str; 4] = ["a", "b", "c", "d"];

/// Random positive automorphism of a rose: a product of transvections
/// `x -> xy`, `x -> yx` and letter permutations. Positive words never
/// cancel and positive and negative directions never share a gate, so
/// every such map is a train track map.
pub fn random_positive_automorphism(rng: &mut ChaCha8Rng, rank: usize, moves: usize) -> GraphMap {
    let mut words: Vec<Vec<usize>> = (0..rank).map(|i| vec![i]).collect();
    for _ in 0..moves {
        match rng.gen_range(0..5) {
            0 => {
                let mut perm: Vec<usize> = (0..rank).collect();
                perm.shuffle(rng);
                words = perm.iter().map(|&i| words[i].clone()).collect();
            }
            k => {
                let x = rng.gen_range(0..rank);
                let mut y = rng.gen_range(0..rank - 1);
                if y >= x {
                    y += 1;
                }
                let wy = words[y].clone();
                if k % 2 == 0 {
                    words[x].extend(wy);
                } else {
                    words[x].splice(0..0, wy);
                }
            }
        }
    }
    let graph = MarkedGraph::rose(&LETTERS[..rank]).unwrap();
    let images = words
        .iter()
        .map(|w| EdgePath::from(w.iter().map(|&i| Edge::forward(i)).collect::<Vec<_>>()))
        .collect();
    GraphMap::from_images(graph.clone(), graph, images).unwrap()
}

/// The fixed corpus shared by the property and acceptance tests: `n` maps
/// of ranks 2 to 4 with short images.
pub fn corpus(n: usize) -> Vec<GraphMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..n)
        .map(|_| {
            let rank = rng.gen_range(2..=4);
            let moves = rng.gen_range(1..=8);
            random_positive_automorphism(&mut rng, rank, moves)
        })
        .collect()
}

/// Worked examples in the document format.
pub const H: &str = include_str!("../../data/h.tt");
pub const H_RELABELED: &str = include_str!("../../data/h_relabeled.tt");
pub const H_SQUARED: &str = include_str!("../../data/h_squared.tt");
pub const F: &str = include_str!("../../data/fibonacci.tt");
pub const NOT_TRAIN_TRACK: &str = include_str!("../../data/not_train_track.tt");

pub fn load(text: &str) -> GraphMap {
    traintrack_axis::document::parse_document(text).unwrap().map
}

/// First direction of every edge image, read straight off the images.
pub fn naive_direction_map(g: &GraphMap) -> Vec<Direction> {
    g.graph()
        .oriented_edges()
        .map(|e| g.image(e).first().expect("nonempty image"))
        .collect()
}

/// Gates by simulation: two directions at a vertex share a gate iff their
/// images under `Dg^depth` agree.
pub fn simulated_gates(g: &GraphMap, depth: usize) -> BTreeSet<BTreeSet<Direction>> {
    let dg = naive_direction_map(g);
    let graph = g.graph();
    let iterate = |mut d: Direction| {
        for _ in 0..depth {
            d = dg[d.index()];
        }
        d
    };
    let mut out = BTreeSet::new();
    for v in graph.vertex_ids() {
        let dirs = graph.directions_at(v);
        for &d in &dirs {
            let gate: BTreeSet<Direction> = dirs.iter().copied().filter(|&e| iterate(e) == iterate(d)).collect();
            out.insert(gate);
        }
    }
    out
}

/// Number of connected components of a simple graph given by adjacency
/// lists, ignoring the vertices in `removed`.
pub fn component_count(adj: &[Vec<usize>], removed: Option<usize>) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] || Some(s) == removed {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] && Some(w) != removed {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Cut vertices by deleting each vertex in turn.
pub fn cut_vertices_by_removal(w: &WhiteheadGraph) -> BTreeSet<usize> {
    let adj = w.neighbors();
    let base = component_count(&adj, None);
    (0..adj.len())
        .filter(|&v| component_count(&adj, Some(v)) > base)
        .collect()
}

/// Isomorphism of small simple graphs by trying every vertex bijection.
pub fn simple_graphs_isomorphic(a: &WhiteheadGraph, b: &WhiteheadGraph) -> bool {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let (ea, eb) = (&a.edges, &b.edges);
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        ea.iter().all(|&(x, y)| {
            let (u, v) = (p[x].min(p[y]), p[x].max(p[y]));
            eb.contains(&(u, v))
        })
    })
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return f(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations(p, k + 1, f) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}

/// Random simple graph on at most `max_n` vertices.
pub fn random_simple_graph(rng: &mut ChaCha8Rng, max_n: usize) -> WhiteheadGraph {
    use traintrack_axis::whitehead::Flavor;
    let n = rng.gen_range(1..=max_n);
    let p: f64 = rng.gen_range(0.1..0.6);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    WhiteheadGraph::new(Flavor::Ideal, (0..n).map(|i| format!("v{i}")).collect(), edges)
}

pub fn vertex_named(g: &MarkedGraph, name: &str) -> VertexId {
    g.vertex_by_name(name).unwrap()
}
