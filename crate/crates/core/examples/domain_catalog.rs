//! Generates each standard domain for four objects and prints its size and
//! whether it satisfies the top-two condition.

use ttc_lab::domains::{self, LinearOrderSpec, PartialOrderSpec};
use ttc_lab::richness::check_top_two;

fn main() -> ttc_lab::Result<()> {
    let n = 4;
    let axis = LinearOrderSpec::identity(n, false);
    let cycle = LinearOrderSpec::identity(n, true);
    let catalog = [
        ("unrestricted", domains::unrestricted(n)?),
        ("single-peaked", domains::single_peaked(n, &axis)?),
        ("two adjacent peaks (p=2)", domains::single_peaked_two_adjacent(n, &axis, 2)?),
        ("single-dipped", domains::single_dipped(n, &axis)?),
        ("circular", domains::circular(n, &cycle)?),
        ("partial agreement 1>3,2>4", domains::partial_agreement(n, &PartialOrderSpec::parse(n, "1>3,2>4")?)?),
    ];
    for (name, d) in &catalog {
        let report = check_top_two(d);
        println!("{name:<28} {:>3} orders  top-two: {}", d.len(), report.satisfied);
    }
    Ok(())
}
