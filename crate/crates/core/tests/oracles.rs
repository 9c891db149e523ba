mod common;

use bclab::equations::{residual_norm, InvariantReport, InvariantThresholds};
use bclab::model::{orbit_distance, validate_masses, ShapeParam, SymmetryGroupMode};
use bclab::report::{alignment, Alignment};
use bclab::solver::{multistart, SolverOptions};
use common::{collinear_fixture, lagrange_fixture, triangle_roots};

#[test]
fn analytic_fixtures_are_exact() {
    let eta0 = ShapeParam::new(0.0).unwrap();
    for (m, q) in [lagrange_fixture(), collinear_fixture()] {
        assert!(residual_norm(&q, &m, eta0).unwrap() < 1e-12);
        let inv = InvariantReport::compute(&q, &m, eta0).unwrap();
        assert!(inv.violations(eta0, &InvariantThresholds::default()).is_empty());
    }
}

#[test]
fn triangle_oracle_roots_are_balanced() {
    let masses = [1.0, 1.0, 1.0];
    let mv = validate_masses(&masses).unwrap();
    let shape = ShapeParam::new(0.1).unwrap();
    let roots = triangle_roots(&masses, 0.1);
    assert_eq!(roots.len(), 6);
    for r in &roots {
        let q = r.config(&masses);
        assert!(residual_norm(&q, &mv, shape).unwrap() < 1e-10, "{r:?}");
    }
}

#[test]
fn triangle_oracle_tends_to_lagrange() {
    // Without anisotropy the only non-collinear shape is equilateral, so
    // weak anisotropy keeps every root close to it.
    let roots = triangle_roots(&[1.0, 1.0, 1.0], 0.01);
    assert_eq!(roots.len(), 6);
    for r in roots {
        assert!((r.u - 0.5).abs() < 0.05 && (r.v - 0.75f64.sqrt()).abs() < 0.05, "{r:?}");
    }
}

#[test]
fn solver_triangles_match_oracle_one_to_one() {
    let masses = [1.0, 1.0, 1.0];
    let mv = validate_masses(&masses).unwrap();
    let shape = ShapeParam::new(0.1).unwrap();
    let classes = multistart(&mv, shape, &SolverOptions::default()).unwrap();
    let planar: Vec<_> = classes.iter().filter(|c| alignment(&c.canonical) == Alignment::Planar).collect();
    let roots = triangle_roots(&masses, 0.1);
    assert_eq!(planar.len(), roots.len());
    for r in &roots {
        let q = r.config(&masses);
        let hits = planar
            .iter()
            .filter(|c| orbit_distance(&c.canonical, &q, SymmetryGroupMode::KleinFour, 1e-9) < 1e-8)
            .count();
        assert_eq!(hits, 1, "oracle root {r:?}");
    }
}
