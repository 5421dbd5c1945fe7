//! The `ttaxis` command line: argument parsing, subcommand dispatch and
//! reports.
//!
//! Exit codes: 0 affirmative, 1 negative verdict, 2 unknown at the search
//! bound, 3 input error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::axes::{axis_signature, conjugate_power_check, lone_axis_decision, ConjugacyVerdict, Overall};
use crate::document::{parse_document, GraphMapDocument};
use crate::error::{Error, Result};
use crate::folds::{fold_line, stallings_decomposition, METRIC_TOL};
use crate::graph::{power, GraphMap};
use crate::nielsen::{find_nielsen_paths, period_bound, periodic_nielsen_sweep, stability_of, Stability, DEFAULT_BOUND};
use crate::spectral::{matrix_class, pf_data, transition_matrix, MatrixClass};
use crate::traintrack::{direction_map, gates, is_train_track, periodic_structure, Verdict};
use crate::whitehead::{
    cut_vertices, ideal_whitehead_graph, index_report, local_whitehead_graph, stable_whitehead_graph, WhiteheadGraph,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_POWER: usize = 6;

pub const EXIT_AFFIRMATIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ttaxis", version, about = "Train track maps, Whitehead graphs and lone axes")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Local,
    Stable,
    Ideal,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// Train track verdict with a witness when negative.
    Check { file: PathBuf },
    /// Transition matrix, dilatation and eigenmetric.
    Spectral { file: PathBuf },
    /// Gates, illegal turns and the direction map.
    Gates { file: PathBuf },
    /// Nielsen paths of the rotationless power.
    Pnp {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Local, stable or ideal Whitehead graphs.
    Whitehead {
        file: PathBuf,
        #[arg(long, value_enum)]
        flavor: FlavorArg,
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Index list and rotationless index.
    Index {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// The lone-axis decision.
    LoneAxis {
        file: PathBuf,
        #[arg(long)]
        assert_fully_irreducible: bool,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Samples of the periodic fold line.
    FoldLine {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        periods: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Canonical axis signature.
    Signature {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Looks for conjugate powers of two lone-axis maps.
    ConjugatePower {
        file: PathBuf,
        file2: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_POWER)]
        max_power: usize,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
}

/// A subcommand with its documents loaded.
#[derive(Clone, Debug)]
pub enum Command {
    Check,
    Spectral,
    Gates,
    Pnp { bound: usize },
    Whitehead { flavor: FlavorArg, vertex: Option<String>, dot: Option<PathBuf>, bound: usize },
    Index { bound: usize },
    LoneAxis { assert_fully_irreducible: bool, bound: usize },
    FoldLine { periods: usize, samples: usize, csv: Option<PathBuf> },
    Signature { bound: usize },
    ConjugatePower { other: Box<GraphMapDocument>, max_power: usize, bound: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Spectral => "spectral",
            Command::Gates => "gates",
            Command::Pnp { .. } => "pnp",
            Command::Whitehead { .. } => "whitehead",
            Command::Index { .. } => "index",
            Command::LoneAxis { .. } => "lone-axis",
            Command::FoldLine { .. } => "fold-line",
            Command::Signature { .. } => "signature",
            Command::ConjugatePower { .. } => "conjugate-power",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub input: Option<String>,
    pub verdict: String,
    pub exit_code: i32,
    /// Search bounds and other limits the answer depends on.
    pub bounds: Value,
    pub data: Value,
}

fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64"));
            if let Some(m) = serde_json::Number::from_f64(x) {
                *n = m;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

impl Report {
    fn new(command: &str, input: Option<String>, verdict: &str, exit_code: i32, bounds: Value, data: Value) -> Self {
        let mut data = data;
        round_floats(&mut data);
        Report { schema_version: SCHEMA_VERSION, command: command.into(), input, verdict: verdict.into(), exit_code, bounds, data }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.verdict);
        if let Some(n) = &self.input {
            out.push_str(&format!("input: {n}\n"));
        }
        if let Value::Object(b) = &self.bounds {
            for (k, v) in b {
                out.push_str(&format!("{k}: {}\n", scalar(v)));
            }
        }
        render(&self.data, 0, &mut out);
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Short one-line form for scalars, arrays of inline values and flat
/// objects.
fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Array(items) => {
            let parts = items.iter().map(inline).collect::<Option<Vec<_>>>()?;
            Some(format!("[{}]", parts.join(", ")))
        }
        Value::Object(map) => {
            if map.values().any(|x| x.is_object() || x.is_array()) {
                return None;
            }
            let parts: Vec<String> = map.iter().map(|(k, x)| format!("{k}: {}", scalar(x))).collect();
            Some(format!("{{{}}}", parts.join(", ")))
        }
        other => Some(scalar(other)),
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match (x, inline(x)) {
                    (Value::Object(_), _) | (_, None) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, depth + 1, out);
                    }
                    (_, Some(s)) => out.push_str(&format!("{pad}{k}: {s}\n")),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match inline(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(item, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

/// Exit code for an error that escaped a subcommand.
pub fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::UnknownAtBound { .. } => EXIT_UNKNOWN,
        Error::NielsenPathPresent(_) | Error::NotLoneAxis(_) => EXIT_NEGATIVE,
        Error::Stage { source, .. } => exit_code_of(source),
        _ => EXIT_INPUT,
    }
}

fn verdict_of_error(e: &Error) -> &'static str {
    match exit_code_of(e) {
        EXIT_UNKNOWN => "unknown-at-bound",
        EXIT_NEGATIVE => match e {
            Error::NotLoneAxis(_) => "not-lone-axis",
            _ => "nielsen-path-present",
        },
        _ => "error",
    }
}

fn rotationless_power(g: &GraphMap) -> Result<(u32, GraphMap)> {
    let exp = periodic_structure(g)?.rotationless_exponent;
    let k = u32::try_from(exp).map_err(|_| Error::Precondition(format!("rotationless exponent {exp} is too large")))?;
    Ok((k, power(g, k)?))
}

fn graph_json(w: &WhiteheadGraph) -> Value {
    let cuts: Vec<&str> = cut_vertices(w).into_iter().map(|v| w.labels[v].as_str()).collect();
    let edges: Vec<String> = w.edges.iter().map(|&(a, b)| format!("{}-{}", w.labels[a], w.labels[b])).collect();
    json!({
        "flavor": w.flavor,
        "vertices": w.labels,
        "edges": edges,
        "vertex_count": w.vertex_count(),
        "edge_count": w.edge_count(),
        "components": w.components().len(),
        "cut_vertices": cuts,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

/// Runs one subcommand on a parsed document.
pub fn run_subcommand(cmd: &Command, doc: &GraphMapDocument) -> Result<Report> {
    let g = &doc.map;
    let graph = g.graph();
    let name = cmd.name();
    let input = doc.name.clone();
    let report = |verdict: &str, code: i32, bounds: Value, data: Value| Report::new(name, input.clone(), verdict, code, bounds, data);
    match cmd {
        Command::Check => {
            let v = is_train_track(g)?;
            Ok(match v {
                Verdict::Yes => report("train-track", EXIT_AFFIRMATIVE, json!({}), json!({ "train_track": true })),
                Verdict::No(w) => report("not-train-track", EXIT_NEGATIVE, json!({}), json!({ "train_track": false, "witness": w })),
            })
        }
        Command::Spectral => {
            let m = transition_matrix(g);
            let class = matrix_class(&m);
            if class == MatrixClass::Reducible {
                return Ok(report("reducible", EXIT_NEGATIVE, json!({}), json!({ "matrix": m.rows(), "class": class })));
            }
            let pf = pf_data(&m)?;
            let metric: Vec<Value> = graph
                .edge_pairs()
                .iter()
                .zip(&pf.edge_lengths)
                .map(|(p, l)| json!({ "edge": p.name, "length": l }))
                .collect();
            Ok(report(
                "computed",
                EXIT_AFFIRMATIVE,
                json!({ "max_iterations": crate::spectral::MAX_ITERATIONS }),
                json!({
                    "matrix": m.rows(),
                    "class": class,
                    "lambda": pf.lambda,
                    "eigenmetric": metric,
                    "residual": pf.residual,
                    "iterations": pf.iterations,
                }),
            ))
        }
        Command::Gates => {
            let gs = gates(g)?;
            let dg = direction_map(g)?;
            let per_vertex: Vec<Value> = graph
                .vertex_ids()
                .map(|v| {
                    let gl: Vec<Vec<String>> = gs
                        .gates_at(v)
                        .map(|gate| gate.directions.iter().map(|&d| graph.edge_label(d)).collect())
                        .collect();
                    json!({ "vertex": graph.vertex(v).name, "gates": gl })
                })
                .collect();
            let illegal: Vec<String> = gs.illegal_turns.iter().map(|t| t.label(graph)).collect();
            let dmap: Vec<Value> = graph
                .oriented_edges()
                .map(|d| json!({ "direction": graph.edge_label(d), "image": graph.edge_label(dg.apply(d)) }))
                .collect();
            Ok(report(
                "computed",
                EXIT_AFFIRMATIVE,
                json!({}),
                json!({ "gate_count": gs.gates.len(), "gates": per_vertex, "illegal_turns": illegal, "direction_map": dmap }),
            ))
        }
        Command::Pnp { bound } => {
            let (k, gk) = rotationless_power(g)?;
            let r = find_nielsen_paths(&gk, *bound)?;
            let mut stability = stability_of(&r);
            let sweep = if stability == Stability::FullyStable {
                let sweep = periodic_nielsen_sweep(g)?;
                stability = sweep.stability();
                Some(sweep)
            } else {
                None
            };
            let (verdict, code) = match stability {
                Stability::FullyStable => ("nielsen-free", EXIT_AFFIRMATIVE),
                Stability::NotFullyStable => ("nielsen-paths", EXIT_NEGATIVE),
                Stability::UnknownAtBound => ("unknown-at-bound", EXIT_UNKNOWN),
            };
            Ok(report(
                verdict,
                code,
                json!({
                    "bound": bound,
                    "brute_force_max": crate::nielsen::BRUTE_FORCE_MAX,
                    "max_period": period_bound(g)?,
                }),
                json!({
                    "rotationless_power": k,
                    "paths": r.paths,
                    "exhaustive": r.exhaustive,
                    "oracle": r.oracle,
                    "search_nodes": r.search_nodes,
                    "periodic_sweep": sweep,
                }),
            ))
        }
        Command::Whitehead { flavor, vertex, dot, bound } => {
            let pick = |gr: &crate::graph::MarkedGraph| -> Result<Option<crate::graph::VertexId>> {
                match vertex {
                    None => Ok(None),
                    Some(n) => gr
                        .vertex_by_name(n)
                        .map(Some)
                        .ok_or_else(|| Error::Precondition(format!("no vertex `{n}`"))),
                }
            };
            let (graphs, power_used) = match flavor {
                FlavorArg::Local => {
                    let vs: Vec<_> = match pick(graph)? {
                        Some(v) => vec![v],
                        None => graph.vertex_ids().collect(),
                    };
                    (vs.into_iter().map(|v| local_whitehead_graph(g, v)).collect::<Result<Vec<_>>>()?, 1)
                }
                FlavorArg::Stable => {
                    let (k, gk) = rotationless_power(g)?;
                    let vs: Vec<_> = match pick(gk.graph())? {
                        Some(v) => vec![v],
                        None => periodic_structure(&gk)?.periodic_vertices.iter().map(|p| p.0).collect(),
                    };
                    (vs.into_iter().map(|v| stable_whitehead_graph(&gk, v)).collect::<Result<Vec<_>>>()?, k)
                }
                FlavorArg::Ideal => {
                    let (k, gk) = rotationless_power(g)?;
                    (vec![ideal_whitehead_graph(&gk, *bound)?], k)
                }
            };
            if let Some(path) = dot {
                let text: String = graphs.iter().map(WhiteheadGraph::to_dot).collect();
                write_file(path, &text)?;
            }
            let gj: Vec<Value> = graphs.iter().map(graph_json).collect();
            Ok(report(
                "computed",
                EXIT_AFFIRMATIVE,
                json!({ "bound": bound }),
                json!({ "rotationless_power": power_used, "graphs": gj }),
            ))
        }
        Command::Index { bound } => {
            let (k, gk) = rotationless_power(g)?;
            let r = index_report(&gk, *bound)?;
            let rank = graph.rank() as i64;
            Ok(report(
                "computed",
                EXIT_AFFIRMATIVE,
                json!({ "bound": bound }),
                json!({
                    "rotationless_power": k,
                    "index_list": r.index_list,
                    "index_sum": r.index_sum,
                    "gate_counts": r.gate_counts,
                    "rank": r.rank,
                    "gate_index_sum": r.gate_index_sum,
                    "one_minus_rank": crate::HalfInt::from_int(1 - rank),
                    "three_halves_minus_rank": crate::HalfInt::from_halves(3 - 2 * rank),
                }),
            ))
        }
        Command::LoneAxis { assert_fully_irreducible, bound } => {
            let asserted = *assert_fully_irreducible || doc.fully_irreducible_asserted;
            let r = lone_axis_decision(g, *bound, asserted)?;
            let (verdict, code) = match r.overall {
                Overall::LoneAxis => ("lone-axis", EXIT_AFFIRMATIVE),
                Overall::Conditional => ("conditional", EXIT_AFFIRMATIVE),
                Overall::NotLoneAxis => ("not-lone-axis", EXIT_NEGATIVE),
                Overall::Unknown => ("unknown", EXIT_UNKNOWN),
            };
            Ok(report(verdict, code, json!({ "bound": bound }), serde_json::to_value(&r).expect("serializable")))
        }
        Command::FoldLine { periods, samples, csv } => {
            let line = fold_line(g, *periods, *samples)?;
            if let Some(path) = csv {
                write_file(path, &line.to_csv())?;
            }
            let seq = stallings_decomposition(g)?;
            let pts: Vec<Value> = line
                .samples
                .iter()
                .map(|s| {
                    let lens = s.graph.lengths().expect("metric");
                    let edges: Vec<Value> =
                        s.graph.edge_pairs().iter().zip(lens).map(|(p, l)| json!({ "edge": p.name, "length": l })).collect();
                    json!({ "t": s.t, "period": s.period, "edges": edges })
                })
                .collect();
            let periodic = (*periods > 0 && *samples > 0).then(|| line.is_periodic(METRIC_TOL));
            Ok(report(
                "computed",
                EXIT_AFFIRMATIVE,
                json!({ "periods": periods, "samples_per_period": samples, "tolerance": METRIC_TOL }),
                json!({
                    "lambda": line.lambda,
                    "period_length": line.period_length,
                    "periodic": periodic,
                    "moves": seq.moves,
                    "samples": pts,
                }),
            ))
        }
        Command::Signature { bound } => {
            let s = axis_signature(g, *bound)?;
            let seq = stallings_decomposition(g)?;
            Ok(report(
                "computed",
                EXIT_AFFIRMATIVE,
                json!({ "bound": bound }),
                json!({ "signature": s, "moves": seq.moves }),
            ))
        }
        Command::ConjugatePower { other, max_power, bound } => {
            let v = conjugate_power_check(g, &other.map, *max_power, *bound)?;
            let (verdict, code) = match &v {
                ConjugacyVerdict::ConjugatePowers { .. } => ("conjugate-powers", EXIT_AFFIRMATIVE),
                ConjugacyVerdict::NotDetected { .. } => ("not-detected", EXIT_NEGATIVE),
                ConjugacyVerdict::Inapplicable { .. } => ("inapplicable", EXIT_NEGATIVE),
            };
            Ok(report(
                verdict,
                code,
                json!({ "bound": bound, "max_power": max_power }),
                json!({
                    "result": v,
                    "other": other.name,
                    "note": "signature equality detects conjugate powers; a mismatch is not a proof of non-conjugacy",
                }),
            ))
        }
    }
}

fn load(path: &Path) -> Result<GraphMapDocument> {
    let text = std::fs::read_to_string(path)?;
    parse_document(&text)
}

fn into_command(sub: Sub) -> Result<(PathBuf, Command)> {
    Ok(match sub {
        Sub::Check { file } => (file, Command::Check),
        Sub::Spectral { file } => (file, Command::Spectral),
        Sub::Gates { file } => (file, Command::Gates),
        Sub::Pnp { file, bound } => (file, Command::Pnp { bound }),
        Sub::Whitehead { file, flavor, vertex, dot, bound } => (file, Command::Whitehead { flavor, vertex, dot, bound }),
        Sub::Index { file, bound } => (file, Command::Index { bound }),
        Sub::LoneAxis { file, assert_fully_irreducible, bound } => (file, Command::LoneAxis { assert_fully_irreducible, bound }),
        Sub::FoldLine { file, periods, samples, csv } => (file, Command::FoldLine { periods, samples, csv }),
        Sub::Signature { file, bound } => (file, Command::Signature { bound }),
        Sub::ConjugatePower { file, file2, max_power, bound } => {
            let other = load(&file2).map_err(|e| e.at_stage("second input"))?;
            (file, Command::ConjugatePower { other: Box::new(other), max_power, bound })
        }
    })
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return EXIT_INPUT;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return EXIT_AFFIRMATIVE;
        }
    };
    let json = cli.json;
    let mut command_name = "";
    let result = into_command(cli.command).and_then(|(file, cmd)| {
        command_name = cmd.name();
        let doc = load(&file)?;
        run_subcommand(&cmd, &doc)
    });
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            let code = exit_code_of(&e);
            Report::new(command_name, None, verdict_of_error(&e), code, json!({}), json!({ "error": e.to_string() }))
        }
    };
    let text = if json { report.to_json() + "\n" } else { report.to_text() };
    let _ = out.write_all(text.as_bytes());
    report.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(1.324717957244746), 1.32471795724);
        assert_eq!(round12(0.1 + 0.2), 0.3);
        let mut v = json!({ "x": [1.0 / 3.0, 2] });
        round_floats(&mut v);
        assert_eq!(v.to_string(), r#"{"x":[0.333333333333,2]}"#);
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code_of(&Error::UnknownAtBound { bound: 3 }), EXIT_UNKNOWN);
        assert_eq!(exit_code_of(&Error::NielsenPathPresent("x".into()).at_stage("s")), EXIT_NEGATIVE);
        assert_eq!(exit_code_of(&Error::Graph("x".into())), EXIT_INPUT);
    }
}
