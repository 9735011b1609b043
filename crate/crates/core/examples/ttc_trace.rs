//! Runs top trading cycles round by round.

use ttc_lab::model::Profile;
use ttc_lab::ttc::ttc_trace;

fn main() -> ttc_lab::Result<()> {
    let profile = Profile::parse_list(&["2143", "1234", "4312", "3421"])?;
    let trace = ttc_trace(&profile);
    for (k, round) in trace.rounds.iter().enumerate() {
        let cycles: Vec<String> = round
            .cycles
            .iter()
            .map(|c| c.iter().map(|a| a.get().to_string()).collect::<Vec<_>>().join("->"))
            .collect();
        println!("round {}: {}", k + 1, cycles.join("  "));
    }
    println!("allocation {}", trace.result);
    Ok(())
}
