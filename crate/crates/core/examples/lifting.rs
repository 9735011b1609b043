//! Lifts a three-object counterexample to the four-object domain
//! {1234, 1324, 2143, 2431}.

use ttc_lab::axioms::{check_mechanism, Axiom};
use ttc_lab::domains;
use ttc_lab::mechanisms::{build_diff_mechanism, build_necessity_counterexample, lift_mechanism, Counterexample};
use ttc_lab::model::{ProfileSpace, SubsetO};
use ttc_lab::ttc::ttc;

fn main() -> ttc_lab::Result<()> {
    let d3 = domains::example_d3();
    let s = SubsetO::from_indices(&[1, 3, 4], 4)?;
    let inner = build_diff_mechanism(&d3.restricted(&s)?)?;
    let mech = lift_mechanism(&d3, &s, inner)?;
    let report = check_mechanism(&mech, &vec![d3.clone(); 4], &[Axiom::Ir, Axiom::Pair, Axiom::Sp])?;
    println!("lifted on {s}: IR, pair efficiency, SP hold: {}", report.clean);
    for p in ProfileSpace::homogeneous(&d3).iter() {
        let x = mech.evaluate(&p)?;
        if x != ttc(&p) {
            println!("  {p}: {x} (ttc {})", ttc(&p));
        }
    }
    // the same mechanism, found automatically
    if let Counterexample::Lifted(m) = build_necessity_counterexample(&d3) {
        println!("automatic construction agrees: {}", m == mech);
    }
    Ok(())
}
