// Axis signatures and conjugate-power detection.

use traintrack_axis::axes::{axis_signature, conjugate_power_check};
use traintrack_axis::document::parse_document;

const H: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/h.tt"));
const H_RELABELED: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/h_relabeled.tt"));
const H_SQUARED: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/h_squared.tt"));
const F: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/fibonacci.tt"));

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let h = parse_document(H)?.map;
    let sig = axis_signature(&h, 40)?;
    println!("signature of H: {:?} x{} (log lambda {:.10})", sig.records, sig.repetitions, sig.period);

    for (name, other) in [("relabeled H", H_RELABELED), ("H^2", H_SQUARED), ("F", F)] {
        let g = parse_document(other)?.map;
        println!("H vs {name}: {:?}", conjugate_power_check(&h, &g, 6, 40)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("conjugate powers example");
}
