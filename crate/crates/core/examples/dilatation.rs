// Transition matrices, Perron-Frobenius eigenvalues and eigenmetrics.

use traintrack_axis::graph::{power, GraphMap, MarkedGraph};
use traintrack_axis::spectral::{eigenmetric, matrix_class, pf_data, transition_matrix};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rose = MarkedGraph::rose(&["a", "b", "c"])?;
    let h = GraphMap::from_words(rose, &[("a", "b"), ("b", "c"), ("c", "a b")])?;
    let m = transition_matrix(&h);
    println!("M = {:?} ({:?})", m.rows(), matrix_class(&m));
    let pf = pf_data(&m)?;
    println!("lambda = {:.10} after {} iterations", pf.lambda, pf.iterations);
    assert!((pf.lambda.powi(3) - pf.lambda - 1.0).abs() < 1e-9);

    let metric = eigenmetric(&h)?;
    for e in metric.oriented_edges().filter(|e| !e.is_reversed()) {
        let img = h.image(e);
        println!(
            "{}: length {:.6}, image {} of length {:.6}",
            metric.edge_label(e),
            metric.length(e).unwrap_or_default(),
            metric.path_label(&img),
            metric.path_length(&img).unwrap_or_default(),
        );
    }

    let h6 = power(&h, 6)?;
    let l6 = pf_data(&transition_matrix(&h6))?.lambda;
    println!("lambda(H^6) = {l6:.10} = lambda^6");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("dilatation example");
}
