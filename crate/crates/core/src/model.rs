//! Domain types shared by every other module: masses, the shape parameter,
//! planar configurations, and the discrete/continuous symmetry actions used
//! to deduplicate solutions.
//!
//! Only diagonal `S = diag(1+η, 1−η)` is modelled. Any symmetric positive
//! definite `S` can be brought to this form by a rotation of the plane, so
//! the restriction loses no generality.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported body count.
pub const MAX_BODIES: usize = 8;
/// Smallest supported body count.
pub const MIN_BODIES: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("mass at index {0} is not strictly positive")]
    NonPositiveMass(usize),
    #[error("body count {0} outside [{MIN_BODIES}, {MAX_BODIES}]")]
    BodyCountOutOfRange(usize),
    #[error("eta = {0} outside [0, 1)")]
    EtaOutOfRange(f64),
    #[error("configuration has {got} bodies, expected {expected}")]
    BodyCountMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate for body {0}")]
    NonFiniteCoordinate(usize),
}

/// Positive masses `m_1..m_N` with their cached total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassVector {
    masses: Vec<f64>,
    total: f64,
}

impl MassVector {
    pub fn new(raw: &[f64]) -> Result<Self, ModelError> {
        validate_masses(raw)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn get(&self, j: usize) -> f64 {
        self.masses[j]
    }

    /// Every mass multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self, ModelError> {
        let raw: Vec<f64> = self.masses.iter().map(|m| m * s).collect();
        validate_masses(&raw)
    }
}

/// Checks positivity and the body-count range, then caches `M = Σ m_j`.
pub fn validate_masses(raw: &[f64]) -> Result<MassVector, ModelError> {
    if let Some(idx) = raw.iter().position(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(ModelError::NonPositiveMass(idx));
    }
    if raw.len() < MIN_BODIES || raw.len() > MAX_BODIES {
        return Err(ModelError::BodyCountOutOfRange(raw.len()));
    }
    Ok(MassVector {
        masses: raw.to_vec(),
        total: raw.iter().sum(),
    })
}

/// `η ∈ [0, 1)`, encoding `S = diag(1+η, 1−η)` with `tr S = 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ShapeParam {
    eta: f64,
}

impl ShapeParam {
    pub const IDENTITY: ShapeParam = ShapeParam { eta: 0.0 };

    pub fn new(eta: f64) -> Result<Self, ModelError> {
        if !(0.0..1.0).contains(&eta) {
            return Err(ModelError::EtaOutOfRange(eta));
        }
        Ok(ShapeParam { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Diagonal entries of `S`.
    pub fn diag(&self) -> [f64; 2] {
        [1.0 + self.eta, 1.0 - self.eta]
    }

    pub fn trace(&self) -> f64 {
        let [a, b] = self.diag();
        a + b
    }

    pub fn apply(&self, q: &Vector2<f64>) -> Vector2<f64> {
        let [a, b] = self.diag();
        Vector2::new(a * q.x, b * q.y)
    }

    pub fn is_central(&self) -> bool {
        self.eta == 0.0
    }

    pub fn symmetry_mode(&self) -> SymmetryGroupMode {
        if self.is_central() {
            SymmetryGroupMode::ContinuousRotation
        } else {
            SymmetryGroupMode::KleinFour
        }
    }
}

/// Planar positions of N bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarConfig {
    positions: Vec<[f64; 2]>,
}

impl PlanarConfig {
    pub fn new(positions: Vec<[f64; 2]>) -> Self {
        PlanarConfig { positions }
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        PlanarConfig {
            positions: flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect(),
        }
    }

    pub fn check_against(&self, masses: &MassVector) -> Result<(), ModelError> {
        if self.len() != masses.len() {
            return Err(ModelError::BodyCountMismatch {
                expected: masses.len(),
                got: self.len(),
            });
        }
        if let Some(j) = self
            .positions
            .iter()
            .position(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(ModelError::NonFiniteCoordinate(j));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn point(&self, j: usize) -> Vector2<f64> {
        Vector2::new(self.positions[j][0], self.positions[j][1])
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.positions.iter().flat_map(|p| [p[0], p[1]]).collect()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        (self.point(i) - self.point(j)).norm()
    }

    /// `(i, j, r_ij)` for all `i < j`.
    pub fn pair_distances(&self) -> Vec<(usize, usize, f64)> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push((i, j, self.distance(i, j)));
            }
        }
        out
    }

    pub fn min_distance(&self) -> f64 {
        self.pair_distances()
            .iter()
            .map(|p| p.2)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        self.pair_distances().iter().map(|p| p.2).fold(0.0, f64::max)
    }

    pub fn max_abs_coordinate(&self) -> f64 {
        self.positions
            .iter()
            .flat_map(|p| [p[0].abs(), p[1].abs()])
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|p| p * s)
    }

    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        self.map(|p| Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y))
    }

    pub fn map(&self, f: impl Fn(Vector2<f64>) -> Vector2<f64>) -> Self {
        PlanarConfig {
            positions: self
                .positions
                .iter()
                .map(|p| {
                    let v = f(Vector2::new(p[0], p[1]));
                    [v.x, v.y]
                })
                .collect(),
        }
    }

    /// Mass-weighted mean position.
    pub fn center_of_mass(&self, masses: &MassVector) -> Vector2<f64> {
        let mut acc = Vector2::zeros();
        for (j, m) in masses.as_slice().iter().enumerate() {
            acc += self.point(j) * *m;
        }
        acc / masses.total()
    }

    pub fn recentered(&self, masses: &MassVector) -> Self {
        let c = self.center_of_mass(masses);
        self.map(|p| p - c)
    }

    /// Largest coordinate gap to `other` (same body count assumed).
    pub fn max_abs_diff(&self, other: &PlanarConfig) -> f64 {
        self.positions
            .iter()
            .zip(&other.positions)
            .flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
            .fold(0.0, f64::max)
    }
}

/// Residual symmetry group of the balanced-configuration equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryGroupMode {
    /// `η > 0`: identity, the two axis reflections and the half-turn.
    KleinFour,
    /// `η = 0`: the full rotation group, fixed by a gauge on one body.
    ContinuousRotation,
}

impl SymmetryGroupMode {
    /// Order of the finite quotient actually enumerated by `canonicalize`.
    /// For the rotation group the gauge leaves a single representative.
    pub fn finite_order(&self) -> usize {
        match self {
            SymmetryGroupMode::KleinFour => 4,
            SymmetryGroupMode::ContinuousRotation => 1,
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match self {
            SymmetryGroupMode::KleinFour => !matches!(g, GroupElement::Rotate(_)),
            SymmetryGroupMode::ContinuousRotation => {
                matches!(g, GroupElement::Identity | GroupElement::RotatePi | GroupElement::Rotate(_))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GroupElement {
    Identity,
    /// `(x, y) ↦ (x, −y)`
    ReflectX,
    /// `(x, y) ↦ (−x, y)`
    ReflectY,
    /// `(x, y) ↦ (−x, −y)`
    RotatePi,
    /// Counter-clockwise rotation by the given angle (central case only).
    Rotate(f64),
}

impl GroupElement {
    pub const KLEIN_FOUR: [GroupElement; 4] = [
        GroupElement::Identity,
        GroupElement::ReflectX,
        GroupElement::ReflectY,
        GroupElement::RotatePi,
    ];
}

pub fn apply_symmetry(config: &PlanarConfig, g: GroupElement) -> PlanarConfig {
    match g {
        GroupElement::Identity => config.clone(),
        GroupElement::ReflectX => config.map(|p| Vector2::new(p.x, -p.y)),
        GroupElement::ReflectY => config.map(|p| Vector2::new(-p.x, p.y)),
        GroupElement::RotatePi => config.map(|p| -p),
        GroupElement::Rotate(theta) => config.rotated(theta),
    }
}

/// Rotates `config` so the gauge body lies on the non-negative x-axis.
///
/// The gauge body is body 0 unless it sits within `origin_tol` of the
/// origin, in which case the lowest-index body away from the origin is used.
pub fn rotation_gauge(config: &PlanarConfig, origin_tol: f64) -> PlanarConfig {
    let Some(anchor) = (0..config.len()).find(|&j| config.point(j).norm() > origin_tol) else {
        return config.clone();
    };
    let p = config.point(anchor);
    let theta = -p.y.atan2(p.x);
    let mut out = config.rotated(theta);
    out.positions[anchor] = [p.norm(), 0.0];
    out
}

fn grid_key(config: &PlanarConfig, grid: f64) -> Vec<i64> {
    config
        .to_flat()
        .iter()
        .map(|v| {
            let k = (v / grid).round();
            // -0 and 0 share a key
            if k == 0.0 {
                0
            } else {
                k as i64
            }
        })
        .collect()
}

/// Canonical image before rounding, together with its rounded key.
#[derive(Debug, Clone)]
pub struct CanonicalImage {
    pub image: PlanarConfig,
    pub element: GroupElement,
    pub key: Vec<i64>,
}

/// Lexicographically least orbit image after rounding to multiples of
/// `grid`; the image itself is returned unrounded.
pub fn canonical_image(config: &PlanarConfig, mode: SymmetryGroupMode, grid: f64) -> CanonicalImage {
    match mode {
        SymmetryGroupMode::KleinFour => GroupElement::KLEIN_FOUR
            .iter()
            .map(|&g| {
                let image = apply_symmetry(config, g);
                let key = grid_key(&image, grid);
                CanonicalImage { image, element: g, key }
            })
            .min_by(|a, b| a.key.cmp(&b.key))
            .expect("non-empty group"),
        SymmetryGroupMode::ContinuousRotation => {
            let image = rotation_gauge(config, grid);
            let key = grid_key(&image, grid);
            let element = {
                let a = (0..config.len())
                    .find(|&j| config.point(j).norm() > grid)
                    .map(|j| -config.point(j).y.atan2(config.point(j).x))
                    .unwrap_or(0.0);
                GroupElement::Rotate(a.rem_euclid(2.0 * PI))
            };
            CanonicalImage { image, element, key }
        }
    }
}

/// Canonical representative of the orbit of `config`, coordinates rounded
/// to multiples of `grid`.
pub fn canonicalize(config: &PlanarConfig, mode: SymmetryGroupMode, grid: f64) -> PlanarConfig {
    assert!(grid > 0.0, "grid must be positive");
    let c = canonical_image(config, mode, grid);
    PlanarConfig::from_flat(&c.key.iter().map(|&k| k as f64 * grid).collect::<Vec<_>>())
}

/// Lexicographic comparison of two rounded canonical keys.
pub fn compare_keys(a: &[i64], b: &[i64]) -> Ordering {
    a.cmp(b)
}

/// Distance between the orbits of `a` and `b`: smallest coordinate-wise
/// gap over group images of `a`.
pub fn orbit_distance(a: &PlanarConfig, b: &PlanarConfig, mode: SymmetryGroupMode, origin_tol: f64) -> f64 {
    match mode {
        SymmetryGroupMode::KleinFour => GroupElement::KLEIN_FOUR
            .iter()
            .map(|&g| apply_symmetry(a, g).max_abs_diff(b))
            .fold(f64::INFINITY, f64::min),
        SymmetryGroupMode::ContinuousRotation => {
            rotation_gauge(a, origin_tol).max_abs_diff(&rotation_gauge(b, origin_tol))
        }
    }
}

/// Number of distinct images of `config` under the enumerated group.
pub fn orbit_size(config: &PlanarConfig, mode: SymmetryGroupMode, grid: f64) -> usize {
    match mode {
        SymmetryGroupMode::KleinFour => {
            let mut keys: Vec<Vec<i64>> = GroupElement::KLEIN_FOUR
                .iter()
                .map(|&g| grid_key(&apply_symmetry(config, g), grid))
                .collect();
            keys.sort();
            keys.dedup();
            keys.len()
        }
        SymmetryGroupMode::ContinuousRotation => 1,
    }
}
