// The lone-axis decision on H (yes) and on the Fibonacci map (no).

use traintrack_axis::axes::{lone_axis_decision, Overall};
use traintrack_axis::document::parse_document;

const H: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/h.tt"));
const F: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/fibonacci.tt"));

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for text in [H, F] {
        let doc = parse_document(text)?;
        let r = lone_axis_decision(&doc.map, 40, doc.fully_irreducible_asserted)?;
        println!("{}: {:?} ({})", doc.name.unwrap_or_default(), r.overall, r.reason);
        if let Some(index) = &r.index {
            println!("  i = {}, 3/2 - r = {}", index.index_sum, r.index_target);
        }
        if r.overall == Overall::LoneAxis {
            println!("  illegal turns along the folds: {:?}", r.illegal_turn_counts.unwrap_or_default());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("lone axis example");
}
