//! Line-oriented text format for graph self-maps.
//!
//! ```text
//! # the map H
//! name H
//! graph
//! vertex v0
//! edge a v0 v0
//! edge b v0 v0
//! edge c v0 v0
//! map
//! a -> b
//! b -> c
//! c -> a b
//! lengths
//! length a 1/3
//! assert fully-irreducible
//! ```
//!
//! Vertices of valence two are declared `vertex w subdivision`. A map line
//! `vertex v -> w` fixes a vertex image; otherwise vertex images are read
//! off the edge images. Lengths accept decimals and fractions `p/q`.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgePair, EdgePath, GraphMap, MarkedGraph, Vertex, VertexId};

#[derive(Clone, Debug, PartialEq)]
pub struct GraphMapDocument {
    pub name: Option<String>,
    pub map: GraphMap,
    pub fully_irreducible_asserted: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Graph,
    Map,
    Lengths,
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '@' | '-'))
}

/// 1-based column of the `n`-th token on the line.
fn column_of(raw: &str, n: usize) -> usize {
    let mut count = 0;
    let mut in_token = false;
    for (i, c) in raw.char_indices() {
        if c.is_whitespace() {
            in_token = false;
        } else if !in_token {
            if count == n {
                return i + 1;
            }
            count += 1;
            in_token = true;
        }
    }
    raw.len() + 1
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

fn semantic(line: usize, check: &'static str, message: impl Into<String>) -> Error {
    Error::Semantic { line, check, message: message.into() }
}

pub fn parse_length(s: &str) -> Option<f64> {
    let v = match s.split_once('/') {
        Some((p, q)) => p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?,
        None => s.parse::<f64>().ok()?,
    };
    (v.is_finite() && v > 0.0).then_some(v)
}

struct Pending {
    vertices: Vec<(Vertex, usize)>,
    edges: Vec<(String, String, String, usize)>,
    rules: Vec<(String, Vec<String>, usize, String)>,
    vertex_rules: Vec<(String, String, usize)>,
    lengths: Vec<(String, String, usize, String)>,
}

pub fn parse_document(text: &str) -> Result<GraphMapDocument> {
    let mut section = Section::Preamble;
    let mut name = None;
    let mut asserted = false;
    let mut seen_sections = HashSet::new();
    let mut p = Pending { vertices: vec![], edges: vec![], rules: vec![], vertex_rules: vec![], lengths: vec![] };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let col = |n| column_of(raw, n);
        let header = match toks[0] {
            "graph" => Some(Section::Graph),
            "map" => Some(Section::Map),
            "lengths" => Some(Section::Lengths),
            _ => None,
        };
        if let Some(s) = header {
            if toks.len() != 1 {
                return Err(syntax(line, col(1), "section header takes no arguments"));
            }
            if !seen_sections.insert(toks[0]) {
                return Err(syntax(line, 1, format!("section `{}` appears twice", toks[0])));
            }
            section = s;
            continue;
        }
        match toks[0] {
            "name" => {
                if toks.len() != 2 || !is_identifier(toks[1]) {
                    return Err(syntax(line, col(1), "expected `name IDENT`"));
                }
                name = Some(toks[1].to_string());
                continue;
            }
            "assert" => {
                if toks.len() != 2 || toks[1] != "fully-irreducible" {
                    return Err(syntax(line, col(1), "expected `assert fully-irreducible`"));
                }
                asserted = true;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Preamble => return Err(syntax(line, 1, "expected a `graph` section first")),
            Section::Graph => match toks[0] {
                "vertex" => {
                    let ok = (toks.len() == 2 || (toks.len() == 3 && toks[2] == "subdivision")) && is_identifier(toks[1]);
                    if !ok {
                        return Err(syntax(line, col(1), "expected `vertex NAME [subdivision]`"));
                    }
                    p.vertices.push((Vertex { name: toks[1].into(), subdivision: toks.len() == 3 }, line));
                }
                "edge" => {
                    if toks.len() != 4 {
                        return Err(syntax(line, col(toks.len().min(4)), "expected `edge NAME FROM TO`"));
                    }
                    if let Some(bad) = (1..4).find(|&i| !is_identifier(toks[i])) {
                        return Err(syntax(line, col(bad), format!("`{}` is not an identifier", toks[bad])));
                    }
                    p.edges.push((toks[1].into(), toks[2].into(), toks[3].into(), line));
                }
                other => return Err(syntax(line, 1, format!("unknown graph statement `{other}`"))),
            },
            Section::Map => {
                let arrow = toks.iter().position(|t| *t == "->");
                match (toks[0], arrow) {
                    ("vertex", Some(2)) if toks.len() == 4 => {
                        p.vertex_rules.push((toks[1].into(), toks[3].into(), line));
                    }
                    (_, Some(1)) => {
                        let image = toks[2..].iter().map(|s| s.to_string()).collect();
                        p.rules.push((toks[0].into(), image, line, raw.to_string()));
                    }
                    (_, Some(i)) => return Err(syntax(line, col(i), "expected `EDGE -> WORD`")),
                    (_, None) => return Err(syntax(line, col(toks.len().min(1)), "missing `->`")),
                }
            }
            Section::Lengths => {
                if toks[0] != "length" || toks.len() != 3 {
                    return Err(syntax(line, 1, "expected `length EDGE VALUE`"));
                }
                p.lengths.push((toks[1].into(), toks[2].into(), line, raw.to_string()));
            }
        }
    }
    build(p, name, asserted)
}

fn build(p: Pending, name: Option<String>, asserted: bool) -> Result<GraphMapDocument> {
    if p.vertices.is_empty() {
        return Err(semantic(1, "nonempty-graph", "no vertices declared"));
    }
    let mut vindex = HashMap::new();
    for (i, (v, line)) in p.vertices.iter().enumerate() {
        if vindex.insert(v.name.clone(), i).is_some() {
            return Err(semantic(*line, "duplicate-label", format!("vertex `{}` declared twice", v.name)));
        }
    }
    let mut eindex = HashMap::new();
    let mut edges = Vec::new();
    for (i, (n, a, b, line)) in p.edges.iter().enumerate() {
        if eindex.insert(n.clone(), i).is_some() {
            return Err(semantic(*line, "duplicate-label", format!("edge `{n}` declared twice")));
        }
        let end = |v: &String| {
            vindex
                .get(v)
                .map(|&i| VertexId(i))
                .ok_or_else(|| semantic(*line, "dangling-endpoint", format!("edge `{n}` ends at undeclared vertex `{v}`")))
        };
        edges.push(EdgePair { name: n.clone(), init: end(a)?, term: end(b)? });
    }
    let last_graph_line = p.edges.iter().map(|e| e.3).chain(p.vertices.iter().map(|v| v.1)).max().unwrap_or(1);
    let vertices: Vec<Vertex> = p.vertices.into_iter().map(|(v, _)| v).collect();
    let graph = MarkedGraph::new(vertices, edges).map_err(|e| {
        let check = match &e {
            Error::Graph(m) if m.contains("connected") => "connected",
            Error::Graph(m) if m.contains("valence") => "valence",
            _ => "graph",
        };
        semantic(last_graph_line, check, e.to_string())
    })?;
    let mut images: Vec<Option<EdgePath>> = vec![None; graph.edge_count()];
    let mut rule_line = vec![0; graph.edge_count()];
    for (lhs, word, line, raw) in &p.rules {
        let e = graph
            .edge_by_label(lhs)
            .ok_or_else(|| semantic(*line, "unknown-edge", format!("no edge `{lhs}`")))?;
        let mut path = Vec::new();
        for (k, tok) in word.iter().enumerate() {
            let f = graph.edge_by_label(tok).ok_or_else(|| {
                if is_identifier(tok.trim_end_matches('\'')) {
                    semantic(*line, "unknown-edge", format!("no edge `{tok}` in the image of `{lhs}`"))
                } else {
                    syntax(*line, column_of(raw, k + 2), format!("bad token `{tok}`"))
                }
            })?;
            path.push(f);
        }
        let path = EdgePath::from(path);
        if !path.is_consistent(&graph) {
            return Err(semantic(*line, "consistent-image", format!("image of `{lhs}` is not a path")));
        }
        if !path.is_tight() {
            return Err(semantic(*line, "tight-image", format!("image of `{lhs}` is not tight")));
        }
        let path = if e.is_reversed() { path.reversed() } else { path };
        if images[e.pair()].replace(path).is_some() {
            return Err(semantic(*line, "duplicate-rule", format!("edge `{lhs}` has two images")));
        }
        rule_line[e.pair()] = *line;
    }
    let map_line = p.rules.iter().map(|r| r.2).max().unwrap_or(last_graph_line);
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, img)| {
            img.ok_or_else(|| semantic(map_line, "missing-image", format!("no image for edge `{}`", graph.edge_pairs()[i].name)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut vmap: Vec<Option<VertexId>> = vec![None; graph.vertex_count()];
    for (v, w, line) in &p.vertex_rules {
        let (Some(a), Some(b)) = (graph.vertex_by_name(v), graph.vertex_by_name(w)) else {
            return Err(semantic(*line, "unknown-vertex", format!("vertex rule `{v} -> {w}` names an undeclared vertex")));
        };
        vmap[a.0] = Some(b);
    }
    for (i, img) in images.iter().enumerate() {
        let (Some(f), Some(l)) = (img.first(), img.last()) else { continue };
        let e = Edge::forward(i);
        for (v, w) in [(graph.init(e), graph.init(f)), (graph.term(e), graph.term(l))] {
            match vmap[v.0] {
                None => vmap[v.0] = Some(w),
                Some(x) if x != w => {
                    return Err(semantic(
                        rule_line[i],
                        "vertex-map",
                        format!("image of `{}` disagrees with the image of vertex `{}`", graph.edge_pairs()[i].name, graph.vertex(v).name),
                    ))
                }
                _ => {}
            }
        }
    }
    let vertex_map = vmap
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| semantic(map_line, "vertex-map", format!("image of vertex `{}` is not determined", graph.vertices()[i].name)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut map = GraphMap::new(graph.clone(), graph.clone(), vertex_map, images).map_err(|e| semantic(map_line, "graph-map", e.to_string()))?;
    if !p.lengths.is_empty() {
        let mut ls = vec![None; graph.edge_count()];
        for (edge, value, line, raw) in &p.lengths {
            let e = graph
                .edge_by_label(edge)
                .filter(|e| !e.is_reversed())
                .ok_or_else(|| semantic(*line, "unknown-edge", format!("no edge `{edge}`")))?;
            let v = parse_length(value).ok_or_else(|| syntax(*line, column_of(raw, 2), format!("`{value}` is not a positive length")))?;
            if ls[e.pair()].replace(v).is_some() {
                return Err(semantic(*line, "duplicate-length", format!("edge `{edge}` has two lengths")));
            }
        }
        let line = p.lengths.last().map_or(1, |l| l.2);
        let ls = ls
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| semantic(line, "missing-length", format!("no length for `{}`", graph.edge_pairs()[i].name))))
            .collect::<Result<Vec<_>>>()?;
        map = map.with_metric(ls)?;
    }
    Ok(GraphMapDocument { name, map, fully_irreducible_asserted: asserted })
}

impl GraphMapDocument {
    pub fn new(map: GraphMap) -> Self {
        GraphMapDocument { name: None, map, fully_irreducible_asserted: false }
    }

    /// Text form; `parse_document(doc.to_text())` gives back `doc`.
    pub fn to_text(&self) -> String {
        let g = self.map.graph();
        let mut out = String::new();
        if let Some(n) = &self.name {
            out.push_str(&format!("name {n}\n"));
        }
        out.push_str("graph\n");
        for v in g.vertices() {
            let flag = if v.subdivision { " subdivision" } else { "" };
            out.push_str(&format!("vertex {}{flag}\n", v.name));
        }
        for p in g.edge_pairs() {
            out.push_str(&format!("edge {} {} {}\n", p.name, g.vertex(p.init).name, g.vertex(p.term).name));
        }
        out.push_str("map\n");
        for v in g.vertex_ids() {
            let w = self.map.vertex_image(v);
            let implied = g
                .oriented_edges()
                .any(|e| g.init(e) == v && !self.map.image(e).is_empty());
            if !implied {
                out.push_str(&format!("vertex {} -> {}\n", g.vertex(v).name, g.vertex(w).name));
            }
        }
        for (i, p) in g.edge_pairs().iter().enumerate() {
            let img = g.path_label(&self.map.images()[i]);
            if img.is_empty() {
                out.push_str(&format!("{} ->\n", p.name));
            } else {
                out.push_str(&format!("{} -> {img}\n", p.name));
            }
        }
        if let Some(ls) = g.lengths() {
            out.push_str("lengths\n");
            for (p, l) in g.edge_pairs().iter().zip(ls) {
                out.push_str(&format!("length {} {l:?}\n", p.name));
            }
        }
        if self.fully_irreducible_asserted {
            out.push_str("assert fully-irreducible\n");
        }
        out
    }
}
