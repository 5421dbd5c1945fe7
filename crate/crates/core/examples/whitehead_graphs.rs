// Local, stable and ideal Whitehead graphs, the index and cut vertices.

use traintrack_axis::graph::{power, GraphMap, MarkedGraph, VertexId};
use traintrack_axis::whitehead::{
    cut_vertices, ideal_whitehead_graph, index_report, local_whitehead_graph, stable_whitehead_graph,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let h = GraphMap::from_words(MarkedGraph::rose(&["a", "b", "c"])?, &[("a", "b"), ("b", "c"), ("c", "a b")])?;
    let v = VertexId(0);

    let local = local_whitehead_graph(&h, v)?;
    println!("local: {} vertices, {} edges", local.vertex_count(), local.edge_count());

    let h6 = power(&h, 6)?;
    let stable = stable_whitehead_graph(&h6, v)?;
    println!("stable: {} vertices, {} edges", stable.vertex_count(), stable.edge_count());

    let ideal = ideal_whitehead_graph(&h6, 30)?;
    println!(
        "ideal: {} component(s), cut vertices {:?}",
        ideal.components().len(),
        cut_vertices(&ideal)
    );
    print!("{}", ideal.to_dot());

    let index = index_report(&h6, 30)?;
    let list: Vec<String> = index.index_list.iter().map(|x| x.to_string()).collect();
    println!("index list ({}), i = {}, GI = {}", list.join(", "), index.index_sum, index.gate_index_sum);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("whitehead example");
}
