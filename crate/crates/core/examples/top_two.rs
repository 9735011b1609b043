//! Lists every top-two failure of a small domain and the largest failing subset.

use ttc_lab::domains;
use ttc_lab::richness::{check_top_k, check_top_two, maximal_failing_subset};

fn main() -> ttc_lab::Result<()> {
    let d3 = domains::example_d3();
    let report = check_top_two(&d3);
    println!("domain {{1234, 1324, 2143, 2431}} satisfies top-two: {}", report.satisfied);
    for f in &report.failures {
        println!("  within {}: nothing ranks {} first and {} second", f.subset, f.a, f.b);
    }
    if let Some(s) = maximal_failing_subset(&d3) {
        println!("largest failing subset: {s}");
    }

    let sd = domains::single_dipped(4, &domains::LinearOrderSpec::identity(4, false))?;
    let top3 = check_top_k(&sd, 3)?;
    println!("single-dipped(4) top-three: {} ({} failures)", top3.satisfied, top3.failures.len());
    Ok(())
}
