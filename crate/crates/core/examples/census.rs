//! Multistart census of balanced configurations.
//!
//! `cargo run --release --example census -- 1,2,3,4 0.05 5000`

use bclab::model::{validate_masses, ShapeParam};
use bclab::report::alignment;
use bclab::solver::{multistart_report, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let masses: Vec<f64> = args
        .first()
        .map(|s| s.split(',').map(|m| m.trim().parse()).collect::<Result<_, _>>())
        .transpose()?
        .unwrap_or_else(|| vec![1.0, 1.0, 1.0]);
    let eta: f64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(0.1);
    let n_starts: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(2000);

    let masses = validate_masses(&masses)?;
    let shape = ShapeParam::new(eta)?;
    let opts = SolverOptions { n_starts, ..SolverOptions::default() };
    let report = multistart_report(&masses, shape, &opts)?;

    println!(
        "{} starts: {} converged, {} rejected, failures {:?}",
        report.n_starts, report.converged, report.rejected, report.failures
    );
    println!("{} classes modulo {:?}", report.classes.len(), shape.symmetry_mode());
    for (i, c) in report.classes.iter().enumerate() {
        println!(
            "{i:3} {:<7} hits {:5} min r {:.4} cond {:9.3e} |F| {:.1e}  {:?}",
            format!("{:?}", alignment(&c.canonical)).to_lowercase(),
            c.hits,
            c.min_rij,
            c.jacobian_condition,
            c.residual_norm,
            c.canonical.positions()
        );
    }
    Ok(())
}
