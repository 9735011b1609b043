//! Decides, by exhaustive search, whether TTC is the only IR, pair-efficient
//! and strategyproof mechanism on a few domains.

use ttc_lab::domains::{self, LinearOrderSpec};
use ttc_lab::model::Domain;
use ttc_lab::verifier::{classify, Efficiency, SearchBudget};

fn main() -> ttc_lab::Result<()> {
    let axis = LinearOrderSpec::identity(4, false);
    let cases = [
        ("{123, 231, 213}", domains::example_d1()),
        ("{123, 231, 132}", domains::example_d2()),
        ("single-dipped(4)", domains::single_dipped(4, &axis)?),
        ("single-peaked(4)", domains::single_peaked(4, &axis)?),
    ];
    for (name, d) in &cases {
        let c = classify(&vec![d.clone(); d.n()], Efficiency::Pair, SearchBudget::default())?;
        println!("{name:<18} {:<10} {} profiles, {} nodes", c.status_name(), c.stats.profiles, c.stats.nodes);
    }

    // per-agent domains: one profile, and keeping endowments is a second mechanism
    let hetero = vec![
        Domain::parse_list(&["213"])?,
        Domain::parse_list(&["321"])?,
        Domain::parse_list(&["132"])?,
    ];
    let c = classify(&hetero, Efficiency::Pair, SearchBudget::default())?;
    let w = c.witness().expect("another mechanism");
    println!("heterogeneous: {} with witness {}", c.status_name(), w.entries()[0].1);
    Ok(())
}
