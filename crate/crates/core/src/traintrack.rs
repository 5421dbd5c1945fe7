//! Direction maps, gates, train track verification, periodic structure,
//! taken turns and the gate index sum.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Direction, Edge, GraphMap, MarkedGraph, Turn, VertexId};
use crate::halfint::HalfInt;
use crate::spectral::{matrix_class, transition_matrix, MatrixClass};

/// `Dg`: each direction goes to the initial direction of its edge image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionMap {
    images: Vec<Direction>,
}

impl DirectionMap {
    pub fn apply(&self, d: Direction) -> Direction {
        self.images[d.index()]
    }

    pub fn iterate(&self, d: Direction, k: usize) -> Direction {
        (0..k).fold(d, |x, _| self.apply(x))
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `Dg` on turns; may produce a degenerate turn.
    pub fn apply_turn(&self, t: Turn) -> Turn {
        Turn::new(self.apply(t.0), self.apply(t.1))
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.images.len()];
        self.images.iter().all(|d| !std::mem::replace(&mut seen[d.index()], true))
    }
}

pub fn direction_map(g: &GraphMap) -> Result<DirectionMap> {
    if !g.is_self_map() {
        return Err(Error::Precondition("direction map needs a self-map".into()));
    }
    let images = g
        .graph()
        .oriented_edges()
        .map(|e| {
            g.image(e).first().ok_or_else(|| {
                Error::Map(format!("edge `{}` has an empty image", g.graph().edge_label(e)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectionMap { images })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub vertex: VertexId,
    pub directions: Vec<Direction>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateStructure {
    pub gates: Vec<Gate>,
    /// Gate index of every direction.
    pub gate_of: Vec<usize>,
    pub illegal_turns: Vec<Turn>,
    /// `Some(p)` when the direction is periodic of least period `p`.
    pub direction_period: Vec<Option<usize>>,
}

impl GateStructure {
    pub fn gates_at(&self, v: VertexId) -> impl Iterator<Item = &Gate> {
        self.gates.iter().filter(move |g| g.vertex == v)
    }

    pub fn gate_count_at(&self, v: VertexId) -> usize {
        self.gates_at(v).count()
    }

    pub fn is_legal(&self, t: Turn) -> bool {
        t.0 != t.1 && self.gate_of[t.0.index()] != self.gate_of[t.1.index()]
    }

    pub fn is_periodic(&self, d: Direction) -> bool {
        self.direction_period[d.index()].is_some()
    }
}

/// Gates from the direction map: two directions at a vertex share a gate iff
/// some iterate `Dg^k` identifies them. Identification is monotone in `k`
/// and happens by `k = n`, the number of directions, since `Dg` is injective
/// on its cycles; so it suffices to compare under one iterate past `n`.
pub fn gates(g: &GraphMap) -> Result<GateStructure> {
    let dg = direction_map(g)?;
    Ok(gates_from(g.graph(), &dg))
}

/// Period of each direction lying on a cycle of `Dg`, `None` elsewhere.
fn cycle_lengths(dg: &DirectionMap) -> Vec<Option<usize>> {
    let n = dg.len();
    let mut period = vec![None; n];
    // 0 unvisited, 1 on the current walk, 2 done
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut walk = Vec::new();
        let mut x = start;
        while state[x] == 0 {
            state[x] = 1;
            walk.push(x);
            x = dg.apply(Edge::from_index(x)).index();
        }
        if state[x] == 1 {
            let pos = walk.iter().position(|&y| y == x).expect("x is on the walk");
            let len = walk.len() - pos;
            for &y in &walk[pos..] {
                period[y] = Some(len);
            }
        }
        for &y in &walk {
            state[y] = 2;
        }
    }
    period
}

pub fn gates_from(graph: &MarkedGraph, dg: &DirectionMap) -> GateStructure {
    let n = dg.len();
    // Dg^(2^m) with 2^m >= n, by repeated squaring
    let mut deep: Vec<Direction> = (0..n).map(|i| dg.apply(Edge::from_index(i))).collect();
    let mut depth = 1;
    while depth < n {
        deep = deep.iter().map(|x| deep[x.index()]).collect();
        depth *= 2;
    }
    let mut gates: Vec<Gate> = Vec::new();
    let mut gate_of = vec![usize::MAX; n];
    let stars = graph.stars();
    for v in graph.vertex_ids() {
        let dirs = stars[v.0].iter().copied();
        let first = gates.len();
        for d in dirs {
            let hit = (first..gates.len()).find(|&gi| deep[gates[gi].directions[0].index()] == deep[d.index()]);
            match hit {
                Some(gi) => {
                    gates[gi].directions.push(d);
                    gate_of[d.index()] = gi;
                }
                None => {
                    gate_of[d.index()] = gates.len();
                    gates.push(Gate { vertex: v, directions: vec![d] });
                }
            }
        }
    }
    let mut illegal_turns = Vec::new();
    for gate in &gates {
        for (i, &a) in gate.directions.iter().enumerate() {
            for &b in &gate.directions[i + 1..] {
                illegal_turns.push(Turn::new(a, b));
            }
        }
    }
    illegal_turns.sort();
    let direction_period = cycle_lengths(dg);
    GateStructure { gates, gate_of, illegal_turns, direction_period }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Witness {
    EmptyImage { edge: String },
    NonTightImage { edge: String },
    IllegalTurn { edge: String, turn: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(Witness),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }
}

/// A self-map is a train track map iff every edge image is nonempty, tight,
/// and crosses only legal turns (legal turns map to legal turns under `Dg`,
/// so this one-step check covers every iterate).
pub fn is_train_track(g: &GraphMap) -> Result<Verdict> {
    if !g.is_self_map() {
        return Err(Error::Precondition("train track check needs a self-map".into()));
    }
    let graph = g.graph();
    for (i, img) in g.images().iter().enumerate() {
        let edge = graph.edge_pairs()[i].name.clone();
        if img.is_empty() {
            return Ok(Verdict::No(Witness::EmptyImage { edge }));
        }
        if !img.is_tight() {
            return Ok(Verdict::No(Witness::NonTightImage { edge }));
        }
    }
    let gs = gates(g)?;
    for (i, img) in g.images().iter().enumerate() {
        if let Some(t) = img.turns().find(|&t| !gs.is_legal(t)) {
            return Ok(Verdict::No(Witness::IllegalTurn {
                edge: graph.edge_pairs()[i].name.clone(),
                turn: t.label(graph),
            }));
        }
    }
    Ok(Verdict::Yes)
}

pub(crate) fn require_train_track(g: &GraphMap) -> Result<()> {
    match is_train_track(g)? {
        Verdict::Yes => Ok(()),
        Verdict::No(w) => Err(Error::Precondition(format!("not a train track map: {w:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicStructure {
    pub periodic_vertices: Vec<(VertexId, usize)>,
    pub periodic_directions: Vec<(Direction, usize)>,
    /// Periodic vertices with at least three periodic directions (one per
    /// gate). Endpoints of Nielsen paths are not included; see
    /// `np_endpoints_pending`.
    pub principal_vertices: Vec<VertexId>,
    pub rotationless_exponent: u64,
    /// Always true here: principal vertices that are only principal as
    /// Nielsen path endpoints must be added by the Nielsen path search.
    pub np_endpoints_pending: bool,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn periodic_structure(g: &GraphMap) -> Result<PeriodicStructure> {
    require_train_track(g)?;
    let graph = g.graph();
    let gs = gates(g)?;
    let nv = graph.vertex_count();
    let vertex_period = |v: VertexId| -> Option<usize> {
        let mut x = g.vertex_image(v);
        for p in 1..=nv {
            if x == v {
                return Some(p);
            }
            x = g.vertex_image(x);
        }
        None
    };
    let periodic_vertices: Vec<(VertexId, usize)> =
        graph.vertex_ids().filter_map(|v| vertex_period(v).map(|p| (v, p))).collect();
    let periodic_directions: Vec<(Direction, usize)> = graph
        .oriented_edges()
        .filter_map(|d| gs.direction_period[d.index()].map(|p| (d, p)))
        .collect();
    let mut principal_vertices = Vec::new();
    let mut exponent = 1u64;
    for &(v, p) in &periodic_vertices {
        let here: Vec<usize> =
            periodic_directions.iter().filter(|(d, _)| graph.init(*d) == v).map(|&(_, q)| q).collect();
        if here.len() >= 3 {
            principal_vertices.push(v);
            exponent = lcm(exponent, p as u64);
            for q in here {
                exponent = lcm(exponent, q as u64);
            }
        }
    }
    Ok(PeriodicStructure {
        periodic_vertices,
        periodic_directions,
        principal_vertices,
        rotationless_exponent: exponent,
        np_endpoints_pending: true,
    })
}

pub fn is_rotationless(g: &GraphMap) -> Result<bool> {
    Ok(periodic_structure(g)?.rotationless_exponent == 1)
}

/// The smallest set of turns containing every turn crossed by an edge image
/// and closed under `Dg`: the turns taken by the attracting lamination.
pub fn taken_turns(g: &GraphMap) -> Result<BTreeSet<Turn>> {
    require_train_track(g)?;
    if matrix_class(&transition_matrix(g)) != MatrixClass::Primitive {
        return Err(Error::Precondition("transition matrix is not primitive".into()));
    }
    let dg = direction_map(g)?;
    let mut taken = BTreeSet::new();
    let mut queue: VecDeque<Turn> = g.images().iter().flat_map(|img| img.turns().collect::<Vec<_>>()).collect();
    while let Some(t) = queue.pop_front() {
        if taken.insert(t) {
            queue.push_back(dg.apply_turn(t));
        }
    }
    Ok(taken)
}

/// `GI(g)`: the sum over vertices of `1 - #gates/2`. Valence-2 vertices with
/// two gates contribute zero on their own.
pub fn gate_index_sum(g: &GraphMap) -> Result<HalfInt> {
    require_train_track(g)?;
    let gs = gates(g)?;
    Ok(g.graph().vertex_ids().map(|v| HalfInt::one_minus_half(gs.gate_count_at(v))).sum())
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

    fn d(g: &GraphMap, l: &str) -> Direction {
        g.graph().edge_by_label(l).unwrap()
    }

    fn turn(g: &GraphMap, a: &str, b: &str) -> Turn {
        Turn::new(d(g, a), d(g, b))
    }

    #[test]
    fn direction_maps() {
        let f = fib();
        let dg = direction_map(&f).unwrap();
        for (x, y) in [("a", "a"), ("b", "a"), ("a'", "b'"), ("b'", "a'")] {
            assert_eq!(dg.apply(d(&f, x)), d(&f, y));
        }
        let h = h();
        let dg = direction_map(&h).unwrap();
        for (x, y) in [("a", "b"), ("b", "c"), ("c", "a"), ("c'", "b'"), ("b'", "c'"), ("a'", "b'")] {
            assert_eq!(dg.apply(d(&h, x)), d(&h, y));
        }
        let perm = map(&["a", "b"], &[("a", "b"), ("b", "a'")]);
        assert!(direction_map(&perm).unwrap().is_bijection());
    }

    #[test]
    fn gate_examples() {
        let f = fib();
        let gs = gates(&f).unwrap();
        assert_eq!(gs.gates.len(), 3);
        assert_eq!(gs.illegal_turns, vec![turn(&f, "a", "b")]);
        let h = h();
        let gs = gates(&h).unwrap();
        assert_eq!(gs.gates.len(), 5);
        assert_eq!(gs.illegal_turns, vec![turn(&h, "a'", "c'")]);
        let perm = map(&["a", "b"], &[("a", "b"), ("b", "a'")]);
        let gs = gates(&perm).unwrap();
        assert_eq!(gs.gates.len(), 4);
        assert!(gs.illegal_turns.is_empty());
    }

    #[test]
    fn train_track_verdicts() {
        assert!(is_train_track(&fib()).unwrap().is_yes());
        assert!(is_train_track(&h()).unwrap().is_yes());
        let bad = map(&["a", "b"], &[("a", "a b"), ("b", "a' b")]);
        match is_train_track(&bad).unwrap() {
            Verdict::No(Witness::IllegalTurn { edge, turn }) => {
                assert_eq!(edge, "a");
                assert_eq!(turn, "{a',b}");
            }
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    #[test]
    fn periodic_examples() {
        let f = fib();
        let ps = periodic_structure(&f).unwrap();
        let periods: Vec<(String, usize)> =
            ps.periodic_directions.iter().map(|&(x, p)| (f.graph().edge_label(x), p)).collect();
        assert_eq!(periods, vec![("a".into(), 1), ("a'".into(), 2), ("b'".into(), 2)]);
        assert_eq!(ps.rotationless_exponent, 2);
        let h = h();
        let ps = periodic_structure(&h).unwrap();
        assert_eq!(ps.periodic_directions.len(), 5);
        assert_eq!(ps.rotationless_exponent, 6);
        assert!(!is_rotationless(&h).unwrap());
        assert!(is_rotationless(&power(&h, 6).unwrap()).unwrap());
        assert!(!is_rotationless(&f).unwrap());
        assert!(is_rotationless(&power(&f, 2).unwrap()).unwrap());
    }

    #[test]
    fn taken_turn_examples() {
        let f = fib();
        let want: BTreeSet<Turn> =
            [turn(&f, "a'", "b"), turn(&f, "b'", "a"), turn(&f, "a'", "a")].into_iter().collect();
        assert_eq!(taken_turns(&f).unwrap(), want);
        let h = h();
        let want: BTreeSet<Turn> = [
            ("a'", "b"),
            ("b'", "c"),
            ("c'", "a"),
            ("b'", "b"),
            ("c'", "c"),
            ("b'", "a"),
            ("c'", "b"),
        ]
        .iter()
        .map(|(x, y)| turn(&h, x, y))
        .collect();
        assert_eq!(taken_turns(&h).unwrap(), want);
        let perm = map(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert!(taken_turns(&perm).is_err());
    }

    #[test]
    fn gate_index_examples() {
        assert_eq!(gate_index_sum(&fib()).unwrap(), HalfInt::from_halves(-1));
        assert_eq!(gate_index_sum(&h()).unwrap(), HalfInt::from_halves(-3));
    }
}
