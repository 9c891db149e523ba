//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use bclab::model::{validate_masses, MassVector, PlanarConfig};
use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

/// Equal unit masses on an equilateral triangle of side `3^{1/3}`.
pub fn lagrange_fixture() -> (MassVector, PlanarConfig) {
    let s = 3f64.cbrt();
    let r = s / 3f64.sqrt();
    let pts = (0..3)
        .map(|k| {
            let a = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            [r * a.cos(), r * a.sin()]
        })
        .collect();
    (validate_masses(&[1.0, 1.0, 1.0]).unwrap(), PlanarConfig::new(pts))
}

/// Equal unit masses at `(-a, 0), (0, 0), (a, 0)` with `a³ = 5/4`.
pub fn collinear_fixture() -> (MassVector, PlanarConfig) {
    let a = 1.25f64.cbrt();
    (
        validate_masses(&[1.0, 1.0, 1.0]).unwrap(),
        PlanarConfig::new(vec![[-a, 0.0], [0.0, 0.0], [a, 0.0]]),
    )
}

/// A balanced triangle found in shape space: labeled vertices at
/// `(0,0), (1,0), (u,v)` before centering, rotation `theta` and scale `c^{1/3}`.
#[derive(Debug, Clone, Copy)]
pub struct TriangleRoot {
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub c: f64,
}

impl TriangleRoot {
    pub fn config(&self, masses: &[f64]) -> PlanarConfig {
        centered(masses, self.u, self.v).rotated(self.theta).scaled(self.c.cbrt())
    }
}

fn centered(masses: &[f64], u: f64, v: f64) -> PlanarConfig {
    PlanarConfig::new(vec![[0.0, 0.0], [1.0, 0.0], [u, v]]).recentered_by(masses)
}

trait Recenter {
    fn recentered_by(&self, masses: &[f64]) -> PlanarConfig;
}

impl Recenter for PlanarConfig {
    fn recentered_by(&self, masses: &[f64]) -> PlanarConfig {
        let total: f64 = masses.iter().sum();
        let mut c = Vector2::zeros();
        for (j, m) in masses.iter().enumerate() {
            c += self.point(j) * *m;
        }
        c /= total;
        self.map(|p| p - c)
    }
}

/// Force tensor `Σ m_j q_j f_jᵀ` and inertia tensor `Σ m_j q_j q_jᵀ`.
fn tensors(masses: &[f64], cfg: &PlanarConfig) -> (Matrix2<f64>, Matrix2<f64>) {
    let n = cfg.len();
    let mut f = Matrix2::zeros();
    let mut i = Matrix2::zeros();
    for j in 0..n {
        let qj = cfg.point(j);
        let mut fj = Vector2::zeros();
        for k in 0..n {
            if k != j {
                let d = cfg.point(k) - qj;
                fj += d * (masses[k] / d.norm().powi(3));
            }
        }
        f += qj * fj.transpose() * masses[j];
        i += qj * qj.transpose() * masses[j];
    }
    (f, i)
}

/// `F + c·I·RᵀSR` flattened; zero exactly at balanced triangles.
fn shape_equations(masses: &[f64], eta: f64, p: &Vector4<f64>) -> Vector4<f64> {
    let cfg = centered(masses, p[0], p[1]);
    let (f, i) = tensors(masses, &cfg);
    let (s, c) = p[2].sin_cos();
    let r = Matrix2::new(c, -s, s, c);
    let sm = Matrix2::new(1.0 + eta, 0.0, 0.0, 1.0 - eta);
    let g = f + i * (r.transpose() * sm * r) * p[3];
    Vector4::new(g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)])
}

fn wrap_pi(t: f64) -> f64 {
    t.rem_euclid(std::f64::consts::PI)
}

/// Balanced non-collinear three-body configurations modulo similarity and
/// reflection, found by Newton multistart on the tensor equations.
///
/// Three bodies that are not collinear are balanced iff the center of mass
/// is at the origin and `F = −I·S` (the residuals are spanned by the six
/// mass-weighted moments). This oracle shares no code with the solver.
pub fn triangle_roots(masses: &[f64], eta: f64) -> Vec<TriangleRoot> {
    let mut roots: Vec<TriangleRoot> = Vec::new();
    let h = 1e-7;
    for iu in 0..13 {
        for iv in 0..12 {
            for it in 0..4 {
                let mut p = Vector4::new(
                    -1.0 + 3.0 * iu as f64 / 12.0,
                    0.2 + 2.2 * iv as f64 / 11.0,
                    std::f64::consts::FRAC_PI_4 * it as f64,
                    1.0,
                );
                let mut ok = false;
                for _ in 0..80 {
                    let g = shape_equations(masses, eta, &p);
                    if !g.iter().all(|x| x.is_finite()) {
                        break;
                    }
                    if g.norm() < 1e-13 {
                        ok = true;
                        break;
                    }
                    let mut jac = Matrix4::zeros();
                    for k in 0..4 {
                        let mut a = p;
                        let mut b = p;
                        a[k] += h;
                        b[k] -= h;
                        jac.set_column(k, &((shape_equations(masses, eta, &a) - shape_equations(masses, eta, &b)) / (2.0 * h)));
                    }
                    let Some(step) = jac.lu().solve(&(-g)) else { break };
                    let scale = (step.norm() / 0.25).max(1.0);
                    p += step / scale;
                }
                if !ok || p[1] < 1e-3 || p[3] <= 0.0 {
                    continue;
                }
                let cand = TriangleRoot { u: p[0], v: p[1], theta: wrap_pi(p[2]), c: p[3] };
                let dup = roots.iter().any(|r| {
                    let dt = (r.theta - cand.theta).abs();
                    (r.u - cand.u).abs() < 1e-6
                        && (r.v - cand.v).abs() < 1e-6
                        && dt.min(std::f64::consts::PI - dt) < 1e-6
                });
                if !dup {
                    roots.push(cand);
                }
            }
        }
    }
    roots
}
