// Stallings folds and the periodic fold line, exported as CSV.

use traintrack_axis::folds::{fold_line, stallings_decomposition, METRIC_TOL};
use traintrack_axis::graph::{GraphMap, MarkedGraph};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let h = GraphMap::from_words(MarkedGraph::rose(&["a", "b", "c"])?, &[("a", "b"), ("b", "c"), ("c", "a b")])?;
    let seq = stallings_decomposition(&h)?;
    for m in &seq.moves {
        println!("{m:?}");
    }
    assert_eq!(seq.recompose()?.images(), h.images());

    let line = fold_line(&h, 2, 4)?;
    println!("period log(lambda) = {:.10}", line.period_length);
    println!("periodic within {METRIC_TOL}: {}", line.is_periodic(METRIC_TOL));
    print!("{}", line.to_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fold line example");
}
