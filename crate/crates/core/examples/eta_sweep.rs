//! Class counts across an η grid, with the nearest exceptional mass condition.
//!
//! `cargo run --release --example eta_sweep -- 1,2,3,4 10000`

use bclab::model::validate_masses;
use bclab::solver::{sweep_eta, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let masses: Vec<f64> = match args.first() {
        Some(s) => s.split(',').map(|m| m.trim().parse()).collect::<Result<_, _>>()?,
        None => vec![1.0, 2.0, 3.0, 4.0],
    };
    let n_starts = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let masses = validate_masses(&masses)?;
    let grid: Vec<f64> = (1..=5).map(|i| 0.02 * i as f64).collect();
    let opts = SolverOptions { n_starts, ..SolverOptions::default() };

    let report = sweep_eta(&masses, &grid, &opts, false)?;
    println!("first exceptional η: {:?}", report.exceptional_eta_first);
    println!("{:>6} {:>7} {:>8} {:>8} {:>10} {:>10}", "eta", "classes", "min r", "max r", "nearest", "gap");
    for r in &report.rows {
        println!(
            "{:6.3} {:7} {:8.4} {:8.4} {:>10} {:10.3e}",
            r.eta,
            r.n_classes,
            r.min_rij,
            r.max_rij,
            r.nearest_condition.map(|c| c.to_string()).unwrap_or_default(),
            r.nearest_residual.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
