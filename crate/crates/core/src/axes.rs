//! The lone-axis decision, axis signatures and conjugate-power detection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::folds::{stallings_decomposition, FoldSequence};
use crate::graph::{power, GraphMap, Turn};
use crate::halfint::HalfInt;
use crate::iso::{canonical_code, suppress_valence_two};
use crate::nielsen::{find_nielsen_paths, period_bound, periodic_nielsen_sweep, stability_of, Stability, DEFAULT_BOUND};
use crate::spectral::{matrix_class, pf_data, transition_matrix, MatrixClass};
use crate::traintrack::{gates, is_train_track, periodic_structure, Verdict};
use crate::whitehead::{cut_vertices, ideal_whitehead_graph_unchecked, index_report_unchecked, IndexReport, WhiteheadGraph};

/// Tolerance on `k log λ1 - l log λ2`.
pub const LOG_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overall {
    LoneAxis,
    NotLoneAxis,
    /// Every computable condition holds but full irreducibility was not
    /// asserted.
    Conditional,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct LoneAxisReport {
    pub rank: usize,
    pub train_track: bool,
    pub primitive: bool,
    pub lambda: f64,
    pub rotationless_exponent: u64,
    pub nielsen_bound: usize,
    pub nielsen: Stability,
    pub nielsen_paths: Vec<String>,
    /// Periods of `g` searched for periodic Nielsen paths.
    pub nielsen_max_period: usize,
    /// Least period at which a periodic Nielsen path was found.
    pub nielsen_period: Option<usize>,
    pub index: Option<IndexReport>,
    /// `3/2 - r`.
    pub index_target: HalfInt,
    pub index_condition: Option<bool>,
    pub ideal_whitehead_graph: Option<WhiteheadGraph>,
    pub cut_vertices: Option<Vec<String>>,
    pub cut_vertex_condition: Option<bool>,
    /// Illegal turns of the rotationless power and of each induced
    /// representative along the fold decomposition.
    pub illegal_turn_counts: Option<Vec<usize>>,
    pub unique_illegal_turn: Option<bool>,
    pub fully_irreducible_asserted: bool,
    pub overall: Overall,
    pub reason: String,
}

/// Whether `i = 3/2 - r`.
pub fn index_condition(index: HalfInt, rank: usize) -> bool {
    index == HalfInt::from_halves(3 - 2 * rank as i64)
}

/// Combines the sub-verdicts. Any failed condition is decisive; otherwise a
/// missing answer makes the result unknown, and a complete affirmative
/// answer is only a lone axis when full irreducibility is asserted.
pub fn overall_verdict(
    nielsen: Stability,
    index_ok: Option<bool>,
    no_cut_vertex: Option<bool>,
    unique_illegal_turn: Option<bool>,
    asserted: bool,
) -> Overall {
    if nielsen == Stability::NotFullyStable || index_ok == Some(false) || no_cut_vertex == Some(false) {
        return Overall::NotLoneAxis;
    }
    if unique_illegal_turn == Some(false) {
        return Overall::NotLoneAxis;
    }
    if nielsen == Stability::UnknownAtBound || index_ok.is_none() || no_cut_vertex.is_none() || unique_illegal_turn.is_none() {
        return Overall::Unknown;
    }
    if asserted {
        Overall::LoneAxis
    } else {
        Overall::Conditional
    }
}

fn stage<T>(r: Result<T>, name: &'static str) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

/// Runs the full pipeline: train track check, primitivity, rotationless
/// power, Nielsen path search, index and ideal Whitehead graph, and the
/// illegal turn count along the fold decomposition.
pub fn lone_axis_decision(g: &GraphMap, np_bound: usize, fully_irreducible_asserted: bool) -> Result<LoneAxisReport> {
    let rank = g.graph().rank();
    if rank < 2 {
        return Err(Error::Precondition(format!("rank {rank} is below 2")).at_stage("input"));
    }
    if let Verdict::No(w) = stage(is_train_track(g), "train-track")? {
        return Err(Error::Precondition(format!("not a train track map: {w:?}")).at_stage("train-track"));
    }
    let m = transition_matrix(g);
    if matrix_class(&m) != MatrixClass::Primitive {
        return Err(Error::Precondition("transition matrix is not primitive".into()).at_stage("primitivity"));
    }
    let lambda = stage(pf_data(&m), "primitivity")?.lambda;
    let exponent = stage(periodic_structure(g), "rotationless-power")?.rotationless_exponent;
    let k = u32::try_from(exponent)
        .map_err(|_| Error::Precondition(format!("rotationless exponent {exponent} is too large")).at_stage("rotationless-power"))?;
    let gk = stage(power(g, k), "rotationless-power")?;
    let report = stage(find_nielsen_paths(&gk, np_bound), "nielsen")?;
    let mut nielsen = stability_of(&report);
    let mut labels: Vec<String> = report.paths.iter().map(|p| p.label.clone()).collect();
    let mut nielsen_period = (!labels.is_empty()).then_some(exponent as usize);
    let nielsen_max_period = stage(period_bound(g), "nielsen")?;
    if nielsen == Stability::FullyStable {
        let sweep = stage(periodic_nielsen_sweep(g), "nielsen")?;
        nielsen = sweep.stability();
        nielsen_period = sweep.first_period_with_paths();
        labels = sweep.periods.iter().flat_map(|p| p.paths.iter().map(|x| x.label.clone())).collect();
    }
    let mut out = LoneAxisReport {
        rank,
        train_track: true,
        primitive: true,
        lambda,
        rotationless_exponent: exponent,
        nielsen_bound: np_bound,
        nielsen,
        nielsen_paths: labels,
        nielsen_max_period,
        nielsen_period,
        index: None,
        index_target: HalfInt::from_halves(3 - 2 * rank as i64),
        index_condition: None,
        ideal_whitehead_graph: None,
        cut_vertices: None,
        cut_vertex_condition: None,
        illegal_turn_counts: None,
        unique_illegal_turn: None,
        fully_irreducible_asserted,
        overall: Overall::Unknown,
        reason: String::new(),
    };
    match nielsen {
        Stability::NotFullyStable => {
            out.overall = Overall::NotLoneAxis;
            out.reason = match nielsen_period {
                Some(q) if q as u64 != exponent => {
                    format!("a periodic Nielsen path of period {q}, e.g. {}", out.nielsen_paths[0])
                }
                _ => format!("the rotationless power carries Nielsen paths, e.g. {}", out.nielsen_paths[0]),
            };
            return Ok(out);
        }
        Stability::UnknownAtBound => {
            out.overall = Overall::Unknown;
            out.reason = format!("Nielsen path search inconclusive at bound {np_bound}");
            return Ok(out);
        }
        Stability::FullyStable => {}
    }
    let index = stage(index_report_unchecked(&gk), "index")?;
    let index_ok = index_condition(index.index_sum, rank);
    let ideal = stage(ideal_whitehead_graph_unchecked(&gk), "ideal-whitehead")?;
    let cuts: Vec<String> = cut_vertices(&ideal).into_iter().map(|v| ideal.labels[v].clone()).collect();
    out.index_condition = Some(index_ok);
    out.cut_vertex_condition = Some(cuts.is_empty());
    out.cut_vertices = Some(cuts);
    out.ideal_whitehead_graph = Some(ideal);
    let index_sum = index.index_sum;
    out.index = Some(index);
    if index_ok {
        let mut counts = vec![stage(gates(&gk), "illegal-turns")?.illegal_turns.len()];
        let seq = stage(stallings_decomposition(g), "folds")?;
        for i in 0..seq.graphs.len() {
            let rho = stage(seq.induced_representative(i), "folds")?;
            counts.push(stage(gates(&rho), "illegal-turns")?.illegal_turns.len());
        }
        let unique = counts.iter().all(|&c| c == 1);
        if !unique {
            return Err(Error::OracleMismatch(format!(
                "index is 3/2 - r but illegal turn counts are {counts:?}"
            ))
            .at_stage("illegal-turns"));
        }
        out.illegal_turn_counts = Some(counts);
        out.unique_illegal_turn = Some(true);
    } else {
        out.unique_illegal_turn = Some(gates(&gk)?.illegal_turns.len() == 1);
    }
    out.overall = overall_verdict(nielsen, out.index_condition, out.cut_vertex_condition, out.unique_illegal_turn, fully_irreducible_asserted);
    out.reason = match out.overall {
        Overall::NotLoneAxis if !index_ok => format!("index {index_sum} differs from 3/2 - r = {}", out.index_target),
        Overall::NotLoneAxis => "the ideal Whitehead graph has a cut vertex".into(),
        Overall::Conditional => "all conditions hold; full irreducibility was not asserted".into(),
        Overall::LoneAxis => "all conditions hold".into(),
        Overall::Unknown => "undecided".into(),
    };
    Ok(out)
}

/// Canonical cyclic word of fold records along the periodic fold line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisSignature {
    /// Primitive root of the record sequence in least rotation.
    pub records: Vec<String>,
    /// How many copies of the primitive root one period contains.
    pub repetitions: usize,
    pub lambda: f64,
    /// `log λ`.
    pub period: f64,
}

/// One record per fold: the graph before the fold with valence-2 vertices
/// suppressed, decorated with the folded turn, in canonical form.
pub fn fold_records(seq: &FoldSequence) -> Result<Vec<String>> {
    seq.folds
        .iter()
        .map(|f| {
            let sup = suppress_valence_two(&seq.graphs[f.graph])?;
            let dir = |d| {
                sup.directions
                    .get(&d)
                    .copied()
                    .ok_or_else(|| Error::Fold("folded turn sits at a valence-2 vertex".into()))
            };
            Ok(canonical_code(&sup.graph, &[Turn::new(dir(f.a)?, dir(f.b)?)]))
        })
        .collect()
}

/// Smallest `p` such that the word is `(w[..p])^(n/p)`.
fn primitive_period<T: PartialEq>(w: &[T]) -> usize {
    let n = w.len();
    (1..=n).find(|&p| n % p == 0 && (p..n).all(|i| w[i] == w[i - p])).unwrap_or(n)
}

fn least_rotation<T: Ord + Clone>(w: &[T]) -> Vec<T> {
    (0..w.len().max(1))
        .map(|r| w[r..].iter().chain(&w[..r]).cloned().collect::<Vec<T>>())
        .min()
        .unwrap_or_default()
}

/// Reduces a fold record word to its signature.
pub fn signature_from_records(records: &[String], lambda: f64) -> AxisSignature {
    let p = primitive_period(records);
    AxisSignature {
        records: least_rotation(&records[..p]),
        repetitions: if p == 0 { 0 } else { records.len() / p },
        lambda,
        period: lambda.ln(),
    }
}

/// The axis signature of a map whose lone-axis decision is affirmative or
/// conditional.
pub fn axis_signature(g: &GraphMap, np_bound: usize) -> Result<AxisSignature> {
    let decision = lone_axis_decision(g, np_bound, false)?;
    match decision.overall {
        Overall::LoneAxis | Overall::Conditional => {}
        Overall::NotLoneAxis => return Err(Error::NotLoneAxis(decision.reason)),
        Overall::Unknown => return Err(Error::UnknownAtBound { bound: np_bound }),
    }
    let seq = stallings_decomposition(g)?;
    Ok(signature_from_records(&fold_records(&seq)?, decision.lambda))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConjugacyVerdict {
    /// `g1^k` and `g2^l` give the same periodic fold line.
    ConjugatePowers { k: usize, l: usize },
    NotDetected { reason: String },
    Inapplicable { reason: String },
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Compares two signatures; `(k, l)` is the least pair with matching
/// repetition counts, accepted when `k, l <= max_power` and the dilatations
/// agree.
pub fn compare_signatures(s1: &AxisSignature, s2: &AxisSignature, max_power: usize) -> ConjugacyVerdict {
    if s1.records != s2.records {
        return ConjugacyVerdict::NotDetected { reason: "primitive fold words differ".into() };
    }
    let d = gcd(s1.repetitions, s2.repetitions).max(1);
    let (k, l) = (s2.repetitions / d, s1.repetitions / d);
    if k > max_power || l > max_power {
        return ConjugacyVerdict::NotDetected { reason: format!("powers ({k},{l}) exceed {max_power}") };
    }
    if (k as f64 * s1.period - l as f64 * s2.period).abs() > LOG_TOL {
        return ConjugacyVerdict::NotDetected {
            reason: format!("dilatations disagree: {k} log λ1 != {l} log λ2"),
        };
    }
    ConjugacyVerdict::ConjugatePowers { k, l }
}

/// Detects powers of `g1` and `g2` that are conjugate, by comparing axis
/// signatures. A mismatch is reported as not detected, not as a proof of
/// non-conjugacy.
pub fn conjugate_power_check(g1: &GraphMap, g2: &GraphMap, max_power: usize, np_bound: usize) -> Result<ConjugacyVerdict> {
    let mut sigs = Vec::new();
    for (name, g) in [("first", g1), ("second", g2)] {
        match axis_signature(g, np_bound) {
            Ok(s) => sigs.push(s),
            Err(Error::NotLoneAxis(reason)) => {
                return Ok(ConjugacyVerdict::Inapplicable { reason: format!("{name} map is not lone-axis: {reason}") })
            }
            Err(Error::UnknownAtBound { bound }) => {
                return Ok(ConjugacyVerdict::Inapplicable {
                    reason: format!("{name} map is undecided at Nielsen bound {bound}"),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(compare_signatures(&sigs[0], &sigs[1], max_power))
}

/// Default Nielsen bound used by the decision when none is given.
pub const DEFAULT_NP_BOUND: usize = DEFAULT_BOUND;
