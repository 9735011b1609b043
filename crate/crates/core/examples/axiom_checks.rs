//! Checks TTC and the endowment mechanism against every axiom on the
//! unrestricted three-object domain.

use ttc_lab::axioms::{check_mechanism, Axiom};
use ttc_lab::domains;
use ttc_lab::mechanisms::{endowment_mechanism, Mechanism};

fn main() -> ttc_lab::Result<()> {
    let d = domains::unrestricted(3)?;
    let doms = vec![d.clone(), d.clone(), d];
    for mech in [Mechanism::Ttc, endowment_mechanism()] {
        let report = check_mechanism(&mech, &doms, &Axiom::ALL)?;
        println!("{} over {} profiles", report.mechanism, report.profiles);
        for r in &report.results {
            match &r.violation {
                None => println!("  {:<6} holds", r.axiom.to_string()),
                Some(v) => println!("  {:<6} fails: {}", r.axiom.to_string(), serde_json::to_string(v).unwrap()),
            }
        }
    }
    Ok(())
}
