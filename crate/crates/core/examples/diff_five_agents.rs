//! Above four agents the Diff construction stops being strategyproof. This
//! builds it on a five-object domain and prints a manipulation.
//!
//! Run with `cargo run --example diff_five_agents --features oversize-diff`.

use ttc_lab::axioms::{all_strategyproofness_violations, AxiomViolation};
use ttc_lab::mechanisms::build_diff_mechanism_oversize;
use ttc_lab::model::Domain;

fn main() -> ttc_lab::Result<()> {
    let d = Domain::parse_list(&["23451", "24351", "12345", "25341", "15342"])?;
    let mech = build_diff_mechanism_oversize(&d)?;
    let doms = vec![d; 5];
    let violations = all_strategyproofness_violations(&mech, &doms)?;
    println!("{} profitable misreports", violations.len());
    for v in violations.iter().take(10) {
        if let AxiomViolation::Sp { profile, agent, misreport, truthful, deviated } = v {
            println!("{profile}: agent {} reports {misreport}, gets {} instead of {}", agent.get(), deviated.of(*agent), truthful.of(*agent));
        }
    }
    Ok(())
}
