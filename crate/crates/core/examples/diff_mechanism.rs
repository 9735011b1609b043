//! Builds the Diff mechanism on {123, 231, 132} and shows where it departs
//! from TTC.

use ttc_lab::axioms::{check_mechanism, Axiom};
use ttc_lab::domains;
use ttc_lab::mechanisms::{build_diff_mechanism, Mechanism};
use ttc_lab::model::ProfileSpace;
use ttc_lab::ttc::ttc;

fn main() -> ttc_lab::Result<()> {
    let d = domains::example_d2();
    let mech = build_diff_mechanism(&d)?;
    let Mechanism::Diff(diff) = &mech else { unreachable!() };
    for p in ProfileSpace::homogeneous(&d).iter().filter(|p| diff.contains(p)) {
        println!("{p}: diff {}  ttc {}", mech.evaluate(&p)?, ttc(&p));
    }
    let report = check_mechanism(&mech, &vec![d.clone(); 3], &[Axiom::Ir, Axiom::Pareto, Axiom::Sp])?;
    println!("IR, Pareto, SP all hold: {}", report.clean);
    Ok(())
}
