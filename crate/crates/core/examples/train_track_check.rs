// Parse a map, check the train track property and print its gates.

use traintrack_axis::document::parse_document;
use traintrack_axis::traintrack::{gates, is_train_track, periodic_structure, Verdict};

const H: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/h.tt"));
const BAD: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/not_train_track.tt"));

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let doc = parse_document(H)?;
    let g = &doc.map;
    println!("{g}");
    assert!(is_train_track(g)?.is_yes());

    let gs = gates(g)?;
    let graph = g.graph();
    for gate in &gs.gates {
        let dirs: Vec<String> = gate.directions.iter().map(|&d| graph.edge_label(d)).collect();
        println!("gate {{{}}}", dirs.join(","));
    }
    for t in &gs.illegal_turns {
        println!("illegal turn {}", t.label(graph));
    }
    let ps = periodic_structure(g)?;
    println!("rotationless exponent {}", ps.rotationless_exponent);

    let bad = parse_document(BAD)?;
    match is_train_track(&bad.map)? {
        Verdict::Yes => return Err("expected a witness".into()),
        Verdict::No(w) => println!("{} is not a train track map: {w:?}", bad.name.unwrap_or_default()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("train track example");
}
