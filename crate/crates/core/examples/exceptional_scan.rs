//! Mass-condition polynomials and the exceptional η values for given masses.
//!
//! `cargo run --example exceptional_scan -- 1,1,1,1`

use bclab::massconds::{condition_gap, infeasible_for_positive, scan_exceptional, MassConditionId};
use bclab::model::validate_masses;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let raw: Vec<f64> = match std::env::args().nth(1) {
        Some(s) => s.split(',').map(|m| m.trim().parse()).collect::<Result<_, _>>()?,
        None => vec![1.0, 1.0, 1.0, 1.0],
    };
    let masses = validate_masses(&raw)?;
    let scan = scan_exceptional(&masses, 0.0, 0.999, 2000, false)?;
    println!("masses {raw:?}");
    for r in &scan.roots {
        println!("  {:<5} vanishes at η = {:.12}", r.condition.to_string(), r.eta);
    }
    for (id, status) in &scan.eta_free {
        println!("  {id:<5} η-free part: {status:?}");
    }
    println!("first exceptional η: {:?} (whole range: {})", scan.eta_first, scan.eta_first_at_boundary);
    for id in MassConditionId::ALL {
        let (infeasible, why) = infeasible_for_positive(id);
        if infeasible {
            println!("  {id} cannot hold for positive masses: {why}");
        }
    }
    let eta = scan.eta_first.unwrap_or(0.5);
    println!("gaps at η = {eta:.4}:");
    for id in MassConditionId::MEMBERSHIP {
        println!("  {id:<5} {:.3e}", condition_gap(id, &masses, eta)?);
    }
    Ok(())
}
