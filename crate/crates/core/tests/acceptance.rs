//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use common::*;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;
use traintrack_axis::axes::{axis_signature, conjugate_power_check, lone_axis_decision, ConjugacyVerdict, Overall};
use traintrack_axis::folds::{fold_line, stallings_decomposition, METRIC_TOL};
use traintrack_axis::graph::{power, EdgePath, GraphMap, Turn};
use traintrack_axis::iso::are_isometric;
use traintrack_axis::nielsen::{brute_force_nielsen_paths, find_nielsen_paths, is_divisible, is_fully_stable, periodic_nielsen_sweep, Stability};
use traintrack_axis::spectral::{matrix_class, pf_data, transition_matrix, MatrixClass};
use traintrack_axis::traintrack::{gate_index_sum, gates, periodic_structure};
use traintrack_axis::whitehead::{cut_vertices, ideal_whitehead_graph, index_report, nielsen_class_index};
use traintrack_axis::HalfInt;

const NP_BOUND: usize = 40;
const LAMBDA_TOL: f64 = 1e-9;
const CORPUS_SIZE: usize = 100;
const INDEX_CORPUS_SIZE: usize = 400;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Real root of a polynomial with a sign change on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn rank_of(g: &GraphMap) -> i64 {
    g.graph().rank() as i64
}

fn illegal_pairs(g: &GraphMap) -> usize {
    simulated_gates(g, 20).iter().map(|gate| gate.len() * (gate.len() - 1) / 2).sum()
}

/// Least common multiple of the periods of periodic directions, read off
/// the direction map by following orbits.
fn simulated_rotationless_exponent(g: &GraphMap) -> u64 {
    let dg = naive_direction_map(g);
    let n = dg.len();
    let mut exp = 1u64;
    for start in 0..n {
        let mut d = start;
        for _ in 0..n {
            d = dg[d].index();
        }
        let mut period = 1;
        let mut e = dg[d].index();
        while e != d {
            e = dg[e].index();
            period += 1;
        }
        let gcd = |mut a: u64, mut b: u64| {
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        };
        exp = exp / gcd(exp, period) * period;
    }
    exp
}

fn indivisible_brute(h: &GraphMap, bound: usize) -> BTreeSet<EdgePath> {
    brute_force_nielsen_paths(h, bound).into_iter().filter(|p| !is_divisible(h, p)).collect()
}

fn np_agreement(g: &GraphMap, bound: usize) -> Result<usize, String> {
    let report = find_nielsen_paths(g, bound).map_err(|e| e.to_string())?;
    let ours: BTreeSet<EdgePath> = report
        .paths
        .iter()
        .filter(|p| p.indivisible && p.path.len() <= bound)
        .map(|p| p.path.clone())
        .collect();
    let brute = indivisible_brute(&report.subdivision.map, bound);
    ensure!(ours == brute, "leg search {} paths, brute force {} paths at bound {bound}", ours.len(), brute.len());
    Ok(ours.len())
}

fn crossed_turns_of_powers(g: &GraphMap, k: u32) -> BTreeSet<Turn> {
    (1..=k)
        .flat_map(|i| power(g, i).unwrap().images().iter().flat_map(|p| p.turns().collect::<Vec<_>>()).collect::<Vec<_>>())
        .collect()
}

fn euler_gate_identity() -> Outcome {
    for g in corpus(CORPUS_SIZE) {
        let lhs = HalfInt::from_int(1 - rank_of(&g)) - gate_index_sum(&g).map_err(|e| e.to_string())?;
        let rhs: HalfInt = simulated_gates(&g, 20).iter().map(|gate| HalfInt::from_halves(1 - gate.len() as i64)).sum();
        ensure!(lhs == rhs, "{g}: (1-r) - GI = {lhs}, gate sum = {rhs}");
    }
    Ok(format!("{CORPUS_SIZE} maps"))
}

fn unique_illegal_turn() -> Outcome {
    let (mut unique, mut other) = (0, 0);
    for g in corpus(CORPUS_SIZE) {
        let gi = gate_index_sum(&g).map_err(|e| e.to_string())?;
        let target = HalfInt::from_halves(3 - 2 * rank_of(&g));
        let count = gates(&g).map_err(|e| e.to_string())?.illegal_turns.len();
        ensure!(count == illegal_pairs(&g), "{g}: illegal turn count {count} disagrees with simulation");
        ensure!((gi == target) == (count == 1), "{g}: GI = {gi}, illegal turns = {count}");
        if count == 1 {
            unique += 1;
        } else {
            other += 1;
        }
    }
    ensure!(unique > 0 && other > 0, "corpus does not exercise both sides: {unique} vs {other}");
    Ok(format!("{unique} with one illegal turn, {other} without"))
}

/// Nielsen-free maps of the corpus together with their rotationless
/// powers. A map counts when the period-one search on the rotationless
/// power and the periodic sweep on the map itself both finish empty.
fn index_inequality() -> Outcome {
    let mut bases: Vec<GraphMap> = corpus(INDEX_CORPUS_SIZE)
        .into_iter()
        .filter(|g| matrix_class(&transition_matrix(g)) == MatrixClass::Primitive)
        .collect();
    bases.push(load(H));
    let (mut checked, mut periodic, mut unknown) = (0, 0, 0);
    for g in &bases {
        match periodic_nielsen_sweep(g).map_err(|e| e.to_string())?.stability() {
            Stability::FullyStable => {}
            Stability::NotFullyStable => {
                periodic += 1;
                continue;
            }
            Stability::UnknownAtBound => {
                unknown += 1;
                continue;
            }
        }
        let k = periodic_structure(g).map_err(|e| e.to_string())?.rotationless_exponent as u32;
        let gk = power(g, k).unwrap();
        let stability = is_fully_stable(&gk, NP_BOUND).map_err(|e| e.to_string())?;
        ensure!(
            stability != Stability::NotFullyStable,
            "{g}: periodic sweep is Nielsen-free but the rotationless power is not"
        );
        let bound = if stability == Stability::FullyStable { NP_BOUND } else { usize::MAX };
        let report = index_report(&gk, bound).map_err(|e| e.to_string())?;
        let r = rank_of(g);
        ensure!(
            HalfInt::from_int(1 - r) <= report.index_sum && report.index_sum < HalfInt::from_int(0),
            "{g}: index {} outside [1-r, 0)",
            report.index_sum
        );
        for &x in &report.index_list {
            ensure!(x <= HalfInt::from_halves(-1), "{g}: index entry {x} above -1/2");
        }
        checked += 1;
    }
    ensure!(checked >= 10, "only {checked} Nielsen-free examples");
    Ok(format!(
        "{checked} Nielsen-free maps of {}, {periodic} with periodic Nielsen paths, {unknown} undecided",
        bases.len()
    ))
}

fn worked_example_h() -> Outcome {
    let h = load(H);
    let lambda = pf_data(&transition_matrix(&h)).map_err(|e| e.to_string())?.lambda;
    let root = bisect(|x| x * x * x - x - 1.0, 1.0, 2.0);
    ensure!((lambda - 1.3247179572).abs() < LAMBDA_TOL && (lambda - root).abs() < LAMBDA_TOL, "λ = {lambda}");

    let gs = gates(&h).map_err(|e| e.to_string())?;
    let ours: BTreeSet<BTreeSet<_>> = gs.gates.iter().map(|g| g.directions.iter().copied().collect()).collect();
    ensure!(ours == simulated_gates(&h, 20), "gates disagree with simulation");
    ensure!(gs.gates.len() == 5, "{} gates", gs.gates.len());
    let g = h.graph();
    let expected = Turn::new(g.edge_by_label("a'").unwrap(), g.edge_by_label("c'").unwrap());
    ensure!(gs.illegal_turns == vec![expected], "illegal turns {:?}", gs.illegal_turns);

    let exponent = periodic_structure(&h).map_err(|e| e.to_string())?.rotationless_exponent;
    ensure!(exponent == 6 && simulated_rotationless_exponent(&h) == 6, "rotationless exponent {exponent}");

    let h6 = power(&h, 6).unwrap();
    let report = find_nielsen_paths(&h6, NP_BOUND).map_err(|e| e.to_string())?;
    ensure!(report.exhaustive && report.is_empty(), "H^6 Nielsen search: {} paths", report.paths.len());
    ensure!(indivisible_brute(&report.subdivision.map, 8).is_empty(), "brute force finds a Nielsen path");

    let index = index_report(&h6, NP_BOUND).map_err(|e| e.to_string())?;
    ensure!(index.index_sum == HalfInt::from_halves(-3), "i = {}", index.index_sum);
    let gate_oracle: HalfInt = [simulated_gates(&h6, 20).len()].iter().map(|&k| HalfInt::one_minus_half(k)).sum();
    ensure!(index.index_sum == gate_oracle, "index disagrees with simulated gates");

    let iw = ideal_whitehead_graph(&h6, NP_BOUND).map_err(|e| e.to_string())?;
    ensure!(iw.vertex_count() == 5 && iw.edge_count() == 6, "IW has {} vertices, {} edges", iw.vertex_count(), iw.edge_count());
    ensure!(iw.components().len() == 1, "IW has {} components", iw.components().len());
    ensure!(cut_vertices(&iw).is_empty() && cut_vertices_by_removal(&iw).is_empty(), "IW has a cut vertex");
    let gate_of = |d| simulated_gates(&h6, 20).into_iter().position(|gate| gate.contains(&d)).unwrap();
    let projected: BTreeSet<(usize, usize)> = crossed_turns_of_powers(&h, 12)
        .into_iter()
        .map(|t| (gate_of(t.0).min(gate_of(t.1)), gate_of(t.0).max(gate_of(t.1))))
        .filter(|(x, y)| x != y)
        .collect();
    ensure!(projected.len() == iw.edge_count(), "IW has {} edges, taken turns give {}", iw.edge_count(), projected.len());

    let decision = lone_axis_decision(&h, NP_BOUND, true).map_err(|e| e.to_string())?;
    ensure!(decision.overall == Overall::LoneAxis, "verdict {:?}: {}", decision.overall, decision.reason);
    Ok(format!("λ = {lambda:.10}, i = {}, IW 5 vertices 6 edges", index.index_sum))
}

fn worked_example_f() -> Outcome {
    let f = load(F);
    let lambda = pf_data(&transition_matrix(&f)).map_err(|e| e.to_string())?.lambda;
    let root = bisect(|x| x * x - x - 1.0, 1.0, 2.0);
    ensure!((lambda - 1.6180339887).abs() < LAMBDA_TOL && (lambda - root).abs() < LAMBDA_TOL, "λ = {lambda}");
    let exponent = periodic_structure(&f).map_err(|e| e.to_string())?.rotationless_exponent;
    ensure!(exponent == 2 && simulated_rotationless_exponent(&f) == 2, "rotationless exponent {exponent}");
    let f2 = power(&f, 2).unwrap();
    let report = find_nielsen_paths(&f2, NP_BOUND).map_err(|e| e.to_string())?;
    ensure!(report.paths.iter().any(|p| p.indivisible), "leg search finds no Nielsen path");
    let found = np_agreement(&f2, 12)?;
    ensure!(found > 0, "brute force finds no Nielsen path");
    let decision = lone_axis_decision(&f, NP_BOUND, true).map_err(|e| e.to_string())?;
    ensure!(decision.overall == Overall::NotLoneAxis, "verdict {:?}", decision.overall);
    let index = nielsen_class_index(&f2, NP_BOUND).map_err(|e| e.to_string())?;
    ensure!(index.index_sum == HalfInt::from_int(-1) && index.index_sum == HalfInt::from_int(1 - rank_of(&f)), "i = {}", index.index_sum);
    Ok(format!("λ = {lambda:.10}, {found} indivisible Nielsen path, i = -1"))
}

fn fold_recomposition() -> Outcome {
    let mut maps = corpus(CORPUS_SIZE);
    maps.extend([load(H), load(F), load(H_SQUARED), power(&load(H), 6).unwrap()]);
    let mut folds = 0;
    for g in &maps {
        let seq = stallings_decomposition(g).map_err(|e| format!("{g}: {e}"))?;
        let back = seq.recompose().map_err(|e| e.to_string())?;
        ensure!(back.images() == g.images() && back.vertex_map() == g.vertex_map(), "{g}: recomposition differs");
        folds += seq.fold_count();
    }
    Ok(format!("{} maps, {folds} folds", maps.len()))
}

fn sorted_lengths(g: &traintrack_axis::MarkedGraph) -> Vec<f64> {
    let mut v = g.lengths().unwrap().to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn fold_line_periodicity() -> Outcome {
    let mut pairs = 0;
    for (name, g) in [("H", load(H)), ("F", load(F))] {
        let samples = 8;
        let line = fold_line(&g, 2, samples).map_err(|e| e.to_string())?;
        ensure!(line.samples.len() == 2 * samples + 1, "{name}: {} samples", line.samples.len());
        for w in line.samples.windows(samples + 1) {
            let (a, b) = (&w[0].graph, &w[samples].graph);
            ensure!(((w[samples].t - w[0].t) - line.period_length).abs() < METRIC_TOL, "{name}: t offset");
            ensure!(a.is_normalized() && b.is_normalized(), "{name}: sample not normalized");
            let (la, lb) = (sorted_lengths(a), sorted_lengths(b));
            ensure!(la.len() == lb.len() && la.iter().zip(&lb).all(|(x, y)| (x - y).abs() <= 1e-8), "{name}: length multisets differ at t = {}", w[0].t);
            ensure!(are_isometric(a, b, 1e-8).is_some(), "{name}: no isometry at t = {}", w[0].t);
            pairs += 1;
        }
    }
    Ok(format!("{pairs} sample pairs"))
}

fn power_invariance() -> Outcome {
    let h = load(H);
    let (h6, h12) = (power(&h, 6).unwrap(), power(&h, 12).unwrap());
    let (i6, i12) = (index_report(&h6, NP_BOUND).map_err(|e| e.to_string())?, index_report(&h12, NP_BOUND).map_err(|e| e.to_string())?);
    ensure!(i6.index_sum == i12.index_sum && i6.index_list == i12.index_list, "indices {} vs {}", i6.index_sum, i12.index_sum);
    let (w6, w12) = (ideal_whitehead_graph(&h6, NP_BOUND).map_err(|e| e.to_string())?, ideal_whitehead_graph(&h12, NP_BOUND).map_err(|e| e.to_string())?);
    ensure!(simple_graphs_isomorphic(&w6, &w12), "ideal Whitehead graphs differ");
    let (s6, s12) = (axis_signature(&h6, NP_BOUND).map_err(|e| e.to_string())?, axis_signature(&h12, NP_BOUND).map_err(|e| e.to_string())?);
    ensure!(s6.records == s12.records, "primitive signatures differ");
    ensure!(s6.repetitions * 2 == s12.repetitions, "repetitions {} vs {}", s6.repetitions, s12.repetitions);
    Ok(format!("i = {}, IW isomorphic, signature repetitions {} and {}", i6.index_sum, s6.repetitions, s12.repetitions))
}

fn conjugacy_detection() -> Outcome {
    let h = load(H);
    let cases = [
        (load(H_RELABELED), ConjugacyVerdict::ConjugatePowers { k: 1, l: 1 }),
        (load(H_SQUARED), ConjugacyVerdict::ConjugatePowers { k: 2, l: 1 }),
    ];
    for (other, expected) in cases {
        let v = conjugate_power_check(&h, &other, 6, NP_BOUND).map_err(|e| e.to_string())?;
        ensure!(v == expected, "expected {expected:?}, got {v:?}");
    }
    let v = conjugate_power_check(&load(F), &h, 6, NP_BOUND).map_err(|e| e.to_string())?;
    ensure!(matches!(v, ConjugacyVerdict::Inapplicable { .. }), "F vs H gave {v:?}");
    Ok("(1,1), (2,1), inapplicable".into())
}

fn oracle_agreement() -> Outcome {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0xc07);
    for _ in 0..200 {
        let w = random_simple_graph(&mut rng, 12);
        ensure!(cut_vertices(&w) == cut_vertices_by_removal(&w), "cut vertices differ on {:?}", w.edges);
    }
    let mut np_checks = 0;
    for bound in 1..=12 {
        np_agreement(&power(&load(F), 2).unwrap(), bound)?;
        np_checks += 1;
    }
    for bound in 1..=8 {
        np_agreement(&power(&load(H), 6).unwrap(), bound)?;
        np_checks += 1;
    }
    for g in corpus(CORPUS_SIZE).iter().filter(|g| g.graph().rank() == 2) {
        let Ok(ps) = periodic_structure(g) else { continue };
        let gk = power(g, ps.rotationless_exponent as u32).unwrap();
        if gk.total_image_length() > 60 || matrix_class(&transition_matrix(&gk)) != MatrixClass::Primitive {
            continue;
        }
        np_agreement(&gk, 10)?;
        np_checks += 1;
    }
    let mut gate_checks = 0;
    for g in corpus(CORPUS_SIZE) {
        let gs = gates(&g).map_err(|e| e.to_string())?;
        let ours: BTreeSet<BTreeSet<_>> = gs.gates.iter().map(|gt| gt.directions.iter().copied().collect()).collect();
        ensure!(ours == simulated_gates(&g, 20), "{g}: gates disagree with simulation");
        gate_checks += 1;
    }
    Ok(format!("200 cut-vertex graphs, {np_checks} Nielsen searches, {gate_checks} gate structures"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("euler-gate identity", euler_gate_identity),
        ("unique illegal turn", unique_illegal_turn),
        ("index inequality", index_inequality),
        ("worked example H", worked_example_h),
        ("worked example F", worked_example_f),
        ("fold recomposition", fold_recomposition),
        ("fold line periodicity", fold_line_periodicity),
        ("power invariance", power_invariance),
        ("conjugacy detection", conjugacy_detection),
        ("oracle agreement", oracle_agreement),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}; {ms} ms)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
