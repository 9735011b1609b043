//! Sweeps the n = 3 domains and the n = 4 catalog, printing one row per domain.

use ttc_lab::verifier::{verify_corollary, SearchBudget};

fn main() -> ttc_lab::Result<()> {
    for n in [3, 4] {
        let report = verify_corollary(n, None, SearchBudget::default())?;
        println!("n = {n}: {} domains, all consistent: {}", report.rows.len(), report.all_consistent);
        for row in &report.rows {
            println!(
                "  {:<40} top-two {:<5} pair {:?} pareto {:?}",
                row.label, row.top_two, row.pair, row.pareto
            );
        }
    }
    Ok(())
}
