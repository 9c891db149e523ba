//! Track the Euler collinear configuration as the anisotropy grows.
//!
//! On the x-axis the solution only rescales, by `(1 + η)^{-1/3}`.

use bclab::model::{validate_masses, PlanarConfig};
use bclab::solver::{continue_eta, PathStatus, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let masses = validate_masses(&[1.0, 1.0, 1.0])?;
    let a = 1.25f64.cbrt();
    let base = PlanarConfig::new(vec![[-a, 0.0], [0.0, 0.0], [a, 0.0]]);

    for (label, start) in [("x-axis", base.clone()), ("y-axis", base.rotated(std::f64::consts::FRAC_PI_2))] {
        let path = continue_eta(&start, &masses, 0.0, 0.9, 18, &SolverOptions::default())?;
        println!("{label}: {} samples, {:?}", path.eta_samples.len(), path.status);
        for (eta, q) in path.eta_samples.iter().zip(&path.configs).step_by(3) {
            let law = if label == "x-axis" { 1.0 + eta } else { 1.0 - eta };
            let want = start.scaled(law.powf(-1.0 / 3.0));
            println!("  η = {eta:.2}  diameter {:.6}  deviation from scaling law {:.1e}", q.diameter(), q.max_abs_diff(&want));
        }
        assert_eq!(path.status, PathStatus::Completed);
    }

    // A Lagrange triangle is not a balanced configuration once η > 0; the
    // corrector pulls it onto a nearby branch instead.
    let s = 3f64.cbrt() / 3f64.sqrt();
    let tri = PlanarConfig::new(vec![[0.0, s], [-s * 0.75f64.sqrt(), -s / 2.0], [s * 0.75f64.sqrt(), -s / 2.0]]);
    let path = continue_eta(&tri, &masses, 0.0, 0.5, 10, &SolverOptions::default())?;
    if let Some((eta, q)) = path.last() {
        println!("triangle: reached η = {eta:.2} ({:?}), positions {:?}", path.status, q.positions());
    }
    Ok(())
}
