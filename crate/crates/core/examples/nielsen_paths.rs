// Nielsen paths of rotationless powers, with the brute-force cross-check.

use traintrack_axis::graph::{power, GraphMap, MarkedGraph};
use traintrack_axis::nielsen::{ageometric_certificate, find_nielsen_paths, is_fully_stable, periodic_nielsen_sweep};
use traintrack_axis::whitehead::nielsen_class_index;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = GraphMap::from_words(MarkedGraph::rose(&["a", "b"])?, &[("a", "a b"), ("b", "a")])?;
    let f2 = power(&f, 2)?;
    let report = find_nielsen_paths(&f2, 10)?;
    for np in &report.paths {
        println!(
            "F^2: {} (indivisible {}, closed {}, {} -> {})",
            np.label, np.indivisible, np.closed, np.start, np.end
        );
    }
    println!("exhaustive {}, brute force {:?}", report.exhaustive, report.oracle);
    println!("F^2 is {:?}", ageometric_certificate(&f2, 30)?);
    println!("index over Nielsen classes: {}", nielsen_class_index(&f2, 30)?.index_sum);

    let h = GraphMap::from_words(MarkedGraph::rose(&["a", "b", "c"])?, &[("a", "b"), ("b", "c"), ("c", "a b")])?;
    let h6 = power(&h, 6)?;
    let report = find_nielsen_paths(&h6, 30)?;
    println!(
        "H^6: {} Nielsen paths, exhaustive {} after {} search nodes",
        report.paths.len(),
        report.exhaustive,
        report.search_nodes
    );
    println!("H^6 is {:?}", ageometric_certificate(&h6, 30)?);

    // Rotationless on vertices and directions, free of Nielsen paths, yet its
    // square has two.
    let g = GraphMap::from_words(
        MarkedGraph::rose(&["a", "b", "c"])?,
        &[("a", "c b b"), ("b", "c b c b b"), ("c", "c b b a")],
    )?;
    println!("G at period 1: {:?}", is_fully_stable(&g, 40)?);
    let sweep = periodic_nielsen_sweep(&g)?;
    for p in &sweep.periods {
        let labels: Vec<&str> = p.paths.iter().map(|x| x.label.as_str()).collect();
        println!("G^{}: {:?}", p.period, labels);
    }
    println!("periods up to {} cover every periodic Nielsen path: {:?}", sweep.max_period, sweep.stability());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("nielsen example");
}
