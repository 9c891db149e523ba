//! Check a solution against the identities every balanced configuration obeys.

use bclab::equations::{complex_lift, complex_norm, complex_residual, InvariantReport, InvariantThresholds};
use bclab::model::{validate_masses, ShapeParam};
use bclab::solver::{multistart, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let masses = validate_masses(&[1.0, 2.0, 3.0, 4.0])?;
    let shape = ShapeParam::new(0.05)?;
    let classes = multistart(&masses, shape, &SolverOptions { n_starts: 1000, ..SolverOptions::default() })?;
    let th = InvariantThresholds::default();
    for (i, c) in classes.iter().enumerate() {
        let r = InvariantReport::compute(&c.canonical, &masses, shape)?;
        let lift = complex_lift(&c.canonical, &masses, shape)?;
        let lifted = complex_norm(&complex_residual(&lift, &masses, shape)?);
        println!(
            "{i:3}  I_S {:.6}  |I_S-U| {:.1e}  |Σm xy| {:.1e}  lift {:.1e} (constraints {:.1e})  violations {:?}",
            r.moment,
            r.is_minus_u,
            r.xy_moment,
            lifted,
            lift.constraint_residual(),
            r.violations(shape, &th)
        );
    }
    Ok(())
}
