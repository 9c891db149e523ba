//! Residuals, Jacobians and invariants of the balanced-configuration system
//!
//! ```text
//!     Σ_{k≠j} m_k (q_k − q_j) / r_kj³ + S q_j = 0,   j = 1..N
//! ```
//!
//! i.e. `λ S q_j = Σ m_k (q_k − q_j)/r³` with the multiplier fixed at
//! `λ = −1`. This fixes the dilation, makes the system square, and by Euler
//! homogeneity gives `I_S = U` at every solution.
//!
//! The complex lift `z = x + iy`, `w = x − iy` with pair variables
//! `Z_ij = r⁻³ z_ij`, `W_ij = r⁻³ w_ij` is used as an independent verifier.
//! A real solution at `λ = −1` maps to an exact solution of the lifted
//! system through `z' = −z`, `w' = −w`, `Z'_ij = r⁻³(z_i − z_j)`,
//! `W'_ij = r⁻³(w_i − w_j)`: then `z'_j + η w'_j = Σ m_k Z'_kj` follows from
//! the real equation, and `(z'_i − z'_j)(w'_i − w'_j)³ Z'_ij² = z_ij³ w_ij³ r⁻⁶ = 1`.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{MassVector, ModelError, PlanarConfig, ShapeParam};

/// Pairs closer than this fraction of the configuration diameter count as a
/// collision.
pub const COLLISION_RELATIVE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquationError {
    #[error("bodies {0} and {1} collide")]
    Collision(usize, usize),
    #[error("center of mass is {0:e} away from the origin")]
    CenterOfMassNotZero(f64),
    #[error("residual norm {0:e} too large for the complex lift")]
    NotASolution(f64),
    #[error("eta = {0} outside [0, 1)")]
    EtaOutOfRange(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn check_collisions(config: &PlanarConfig) -> Result<(), EquationError> {
    let floor = COLLISION_RELATIVE * config.diameter();
    for (i, j, r) in config.pair_distances() {
        if !(r > floor) || r == 0.0 {
            return Err(EquationError::Collision(i, j));
        }
    }
    Ok(())
}

fn prepare(config: &PlanarConfig, masses: &MassVector) -> Result<(), EquationError> {
    config.check_against(masses)?;
    check_collisions(config)
}

/// Residual vector of length `2N`, entries `(2j, 2j+1)` for body `j`.
pub fn residual(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> Result<Vec<f64>, EquationError> {
    prepare(config, masses)?;
    Ok(residual_unchecked(config, masses, shape))
}

pub(crate) fn residual_unchecked(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> Vec<f64> {
    let n = config.len();
    let mut out = vec![0.0; 2 * n];
    for j in 0..n {
        let qj = config.point(j);
        let mut f = shape.apply(&qj);
        for k in 0..n {
            if k == j {
                continue;
            }
            let d = config.point(k) - qj;
            let r = d.norm();
            f += d * (masses.get(k) / (r * r * r));
        }
        out[2 * j] = f.x;
        out[2 * j + 1] = f.y;
    }
    out
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn residual_norm(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> Result<f64, EquationError> {
    residual(config, masses, shape).map(|r| norm(&r))
}

/// `∂/∂d (d / |d|³) = (I − 3 d dᵀ/|d|²) / |d|³`
fn kernel(d: &Vector2<f64>) -> Matrix2<f64> {
    let r2 = d.norm_squared();
    let r = r2.sqrt();
    (Matrix2::identity() - d * d.transpose() * (3.0 / r2)) / (r2 * r)
}

/// Analytic Jacobian of [`residual`], `2N × 2N`.
pub fn jacobian(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> Result<DMatrix<f64>, EquationError> {
    prepare(config, masses)?;
    Ok(jacobian_unchecked(config, masses, shape))
}

pub(crate) fn jacobian_unchecked(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> DMatrix<f64> {
    let n = config.len();
    let [sx, sy] = shape.diag();
    let mut jac = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        jac[(2 * j, 2 * j)] += sx;
        jac[(2 * j + 1, 2 * j + 1)] += sy;
        for k in 0..n {
            if k == j {
                continue;
            }
            let d = config.point(k) - config.point(j);
            let block = kernel(&d) * masses.get(k);
            for a in 0..2 {
                for b in 0..2 {
                    jac[(2 * j + a, 2 * k + b)] += block[(a, b)];
                    jac[(2 * j + a, 2 * j + b)] -= block[(a, b)];
                }
            }
        }
    }
    jac
}

/// Derivative of the residual with respect to `η`: `(x_j, −y_j)` per body.
pub fn residual_eta_derivative(config: &PlanarConfig) -> Vec<f64> {
    config.positions().iter().flat_map(|p| [p[0], -p[1]]).collect()
}

/// Force function `U = Σ_{i<j} m_i m_j / r_ij`.
pub fn potential_u(config: &PlanarConfig, masses: &MassVector) -> Result<f64, EquationError> {
    prepare(config, masses)?;
    Ok(potential_unchecked(config, masses))
}

pub(crate) fn potential_unchecked(config: &PlanarConfig, masses: &MassVector) -> f64 {
    config
        .pair_distances()
        .iter()
        .map(|&(i, j, r)| masses.get(i) * masses.get(j) / r)
        .sum()
}

/// S-weighted moment of inertia `Σ m_j ((1+η) x_j² + (1−η) y_j²)`.
pub fn moment_is(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> f64 {
    let [sx, sy] = shape.diag();
    config
        .positions()
        .iter()
        .zip(masses.as_slice())
        .map(|(p, m)| m * (sx * p[0] * p[0] + sy * p[1] * p[1]))
        .sum()
}

fn center_tolerance(config: &PlanarConfig, masses: &MassVector) -> f64 {
    1e-8 * masses.total() * config.diameter().max(f64::MIN_POSITIVE)
}

/// Same moment computed from coordinate differences only,
/// `(1/M) Σ_{i<k} m_i m_k ((1+η) x_ik² + (1−η) y_ik²)`. Requires a centered
/// configuration.
pub fn moment_is_pairform(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> Result<f64, EquationError> {
    config.check_against(masses)?;
    let com = config.center_of_mass(masses) * masses.total();
    if com.norm() > center_tolerance(config, masses) {
        return Err(EquationError::CenterOfMassNotZero(com.norm()));
    }
    Ok(pairform_unchecked(config, masses, shape))
}

pub(crate) fn pairform_unchecked(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> f64 {
    let [sx, sy] = shape.diag();
    let n = config.len();
    let mut acc = 0.0;
    for i in 0..n {
        for k in i + 1..n {
            let d = config.point(i) - config.point(k);
            acc += masses.get(i) * masses.get(k) * (sx * d.x * d.x + sy * d.y * d.y);
        }
    }
    acc / masses.total()
}

/// `Σ m_j x_j y_j`, the real form of `Σ m_j (z_j² − w_j²) = 0`
/// (`z² − w² = 4i x y`). Vanishes at every balanced configuration with `η > 0`.
pub fn identity_zw_weight(config: &PlanarConfig, masses: &MassVector) -> f64 {
    config
        .positions()
        .iter()
        .zip(masses.as_slice())
        .map(|(p, m)| m * p[0] * p[1])
        .sum()
}

/// Variables of the algebraic system. Pair quantities are stored for
/// `i < j` in lexicographic order; `Z_ji = −Z_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexLift {
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub zp: Vec<Complex64>,
    pub wp: Vec<Complex64>,
    pub r: Vec<f64>,
}

impl ComplexLift {
    pub fn bodies(&self) -> usize {
        self.z.len()
    }

    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        pair_index(self.bodies(), i, j)
    }

    /// `Z_ij` with the antisymmetry convention applied.
    pub fn big_z(&self, i: usize, j: usize) -> Complex64 {
        if i < j {
            self.zp[self.pair_index(i, j)]
        } else {
            -self.zp[self.pair_index(j, i)]
        }
    }

    pub fn big_w(&self, i: usize, j: usize) -> Complex64 {
        if i < j {
            self.wp[self.pair_index(i, j)]
        } else {
            -self.wp[self.pair_index(j, i)]
        }
    }

    /// Largest deviation among the pair constraints
    /// `(z_i−z_j)(w_i−w_j)³ Z_ij² = 1`, `(w_i−w_j)(z_i−z_j)³ W_ij² = 1`
    /// and the relative gap of `Z_ij W_ij = r_ij⁻⁴`.
    pub fn constraint_residual(&self) -> f64 {
        let n = self.bodies();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let p = self.pair_index(i, j);
                let dz = self.z[i] - self.z[j];
                let dw = self.w[i] - self.w[j];
                let c1 = dz * dw.powu(3) * self.zp[p].powu(2) - 1.0;
                let c2 = dw * dz.powu(3) * self.wp[p].powu(2) - 1.0;
                let r4 = self.r[p].powi(-4);
                let c3 = (self.zp[p] * self.wp[p] - r4).norm() / r4;
                worst = worst.max(c1.norm()).max(c2.norm()).max(c3);
            }
        }
        worst
    }
}

pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    // pairs (0,1),(0,2),..,(0,n-1),(1,2),..
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Sign-flipped lift of a solution; see the module docs for the branch.
pub fn complex_lift(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> Result<ComplexLift, EquationError> {
    let r = residual_norm(config, masses, shape)?;
    if !(r < 1e-8) {
        return Err(EquationError::NotASolution(r));
    }
    Ok(lift_unchecked(config))
}

pub(crate) fn lift_unchecked(config: &PlanarConfig) -> ComplexLift {
    let n = config.len();
    let zs: Vec<Complex64> = config.positions().iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let ws: Vec<Complex64> = zs.iter().map(|z| z.conj()).collect();
    let mut zp = Vec::new();
    let mut wp = Vec::new();
    let mut rs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dz = zs[i] - zs[j];
            let dw = ws[i] - ws[j];
            let r = dz.norm();
            let inv3 = r.powi(-3);
            zp.push(dz * inv3);
            wp.push(dw * inv3);
            rs.push(r);
        }
    }
    ComplexLift {
        z: zs.iter().map(|z| -z).collect(),
        w: ws.iter().map(|w| -w).collect(),
        zp,
        wp,
        r: rs,
    }
}

/// Residual of the lifted system, `[z-equations…, w-equations…]`:
/// `z_j − (Σ m_k Z_kj − η Σ m_k W_kj)/(1−η²)` and its mirror.
pub fn complex_residual(lift: &ComplexLift, masses: &MassVector, shape: ShapeParam) -> Result<Vec<Complex64>, EquationError> {
    let eta = shape.eta();
    if !(0.0..1.0).contains(&eta) {
        return Err(EquationError::EtaOutOfRange(eta));
    }
    let n = lift.bodies();
    if masses.len() != n {
        return Err(ModelError::BodyCountMismatch { expected: masses.len(), got: n }.into());
    }
    let denom = 1.0 - eta * eta;
    let mut zs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for j in 0..n {
        let mut sz = Complex64::new(0.0, 0.0);
        let mut sw = Complex64::new(0.0, 0.0);
        for k in 0..n {
            if k != j {
                sz += lift.big_z(k, j) * masses.get(k);
                sw += lift.big_w(k, j) * masses.get(k);
            }
        }
        zs.push(lift.z[j] - (sz - sw * eta) / denom);
        ws.push(lift.w[j] - (sw - sz * eta) / denom);
    }
    zs.extend(ws);
    Ok(zs)
}

pub fn complex_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Per-solution invariant diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub residual_norm: f64,
    /// `|Σ m_j q_j|`
    pub com_norm: f64,
    /// `|Σ m_j x_j y_j|`
    pub xy_moment: f64,
    /// `|I_S − U|`
    pub is_minus_u: f64,
    /// `|I_S − I_S(pair form)|`
    pub pairform_gap: f64,
    /// Max of the lifted-system residual norm and the pair-constraint gap.
    pub lift_residual: f64,
    pub potential: f64,
    pub moment: f64,
}

/// Thresholds a solution must meet before it is reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantThresholds {
    pub residual: f64,
    pub relative: f64,
    pub com: f64,
    pub lift: f64,
    pub pairform_relative: f64,
}

impl Default for InvariantThresholds {
    fn default() -> Self {
        InvariantThresholds {
            residual: 1e-10,
            relative: 1e-9,
            com: 1e-9,
            lift: 1e-9,
            pairform_relative: 1e-10,
        }
    }
}

impl InvariantReport {
    pub fn compute(config: &PlanarConfig, masses: &MassVector, shape: ShapeParam) -> Result<Self, EquationError> {
        prepare(config, masses)?;
        let res = residual_unchecked(config, masses, shape);
        let com = config.center_of_mass(masses) * masses.total();
        let u = potential_unchecked(config, masses);
        let is = moment_is(config, masses, shape);
        let lift = lift_unchecked(config);
        let lift_res = complex_norm(&complex_residual(&lift, masses, shape)?);
        Ok(InvariantReport {
            residual_norm: norm(&res),
            com_norm: com.norm(),
            xy_moment: identity_zw_weight(config, masses).abs(),
            is_minus_u: (is - u).abs(),
            pairform_gap: (is - pairform_unchecked(config, masses, shape)).abs(),
            lift_residual: lift_res.max(lift.constraint_residual()),
            potential: u,
            moment: is,
        })
    }

    /// Names of the invariants this report violates.
    pub fn violations(&self, shape: ShapeParam, th: &InvariantThresholds) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.residual_norm < th.residual) {
            out.push("residual");
        }
        if !(self.is_minus_u < th.relative * self.potential) {
            out.push("moment_equals_potential");
        }
        if !(self.com_norm < th.com) {
            out.push("center_of_mass");
        }
        if shape.eta() > 0.0 && !(self.xy_moment < th.relative * self.moment) {
            out.push("zw_weight_identity");
        }
        if !(self.pairform_gap <= th.pairform_relative * self.moment.max(f64::MIN_POSITIVE)) {
            out.push("moment_pair_form");
        }
        if !(self.lift_residual < th.lift) {
            out.push("complex_lift");
        }
        out
    }
}
