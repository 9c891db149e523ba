//! Four-body mass conditions attached to the equal-order singular diagrams,
//! and a scan of `η` for membership in the exceptional mass set.
//!
//! Residuals are `LHS − RHS` in the order the conditions are usually
//! displayed, with bodies numbered 1..4 mapped to indices 0..3.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equations;
use crate::model::{MassVector, PlanarConfig};

/// Relative threshold below which a residual counts as satisfied.
pub const NEAR_MEMBERSHIP: f64 = 1e-8;
/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MassCondError {
    #[error("mass conditions need exactly 4 bodies, got {0}")]
    WrongBodyCount(usize),
    #[error("bad eta range [{lo}, {hi}] with {steps} steps")]
    BadRange { lo: f64, hi: f64, steps: usize },
    #[error("unknown mass condition '{0}'")]
    UnknownId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MassConditionId {
    I,
    II,
    III,
    IV,
    V1,
    V2,
    V3,
    VI,
    VII,
    VIII,
}

impl MassConditionId {
    pub const ALL: [MassConditionId; 10] = [
        MassConditionId::I,
        MassConditionId::II,
        MassConditionId::III,
        MassConditionId::IV,
        MassConditionId::V1,
        MassConditionId::V2,
        MassConditionId::V3,
        MassConditionId::VI,
        MassConditionId::VII,
        MassConditionId::VIII,
    ];

    /// Conditions defining the exceptional set (V3 is opt-in).
    pub const MEMBERSHIP: [MassConditionId; 6] = [
        MassConditionId::II,
        MassConditionId::III,
        MassConditionId::IV,
        MassConditionId::V2,
        MassConditionId::VI,
        MassConditionId::VIII,
    ];

    pub fn name(self) -> &'static str {
        use MassConditionId::*;
        match self {
            I => "I",
            II => "II",
            III => "III",
            IV => "IV",
            V1 => "V1",
            V2 => "V2",
            V3 => "V3",
            VI => "VI",
            VII => "VII",
            VIII => "VIII",
        }
    }

    /// Number of residual components. For VIII the three components are
    /// alternatives, any one of which satisfies the condition.
    pub fn arity(self) -> usize {
        use MassConditionId::*;
        match self {
            I | IV | V1 | V3 | VII => 2,
            VIII => 3,
            _ => 1,
        }
    }

    /// Weighted-homogeneity degree of each component in the masses.
    pub fn degrees(self) -> &'static [f64] {
        use MassConditionId::*;
        match self {
            I | IV => &[2.0, 3.0],
            II => &[4.0],
            III | VI => &[2.0],
            V1 | V3 => &[2.0, 4.0],
            V2 => &[3.0],
            VII => &[1.0, 1.0],
            VIII => &[-0.5, -0.5, -0.5],
        }
    }

    pub fn is_alternative(self) -> bool {
        self == MassConditionId::VIII
    }

    /// Which components depend on `η`.
    pub fn eta_dependent(self) -> &'static [bool] {
        use MassConditionId::*;
        match self {
            I | VII => &[false, false],
            IV | V1 | V3 => &[false, true],
            II | III | V2 | VI => &[true],
            VIII => &[false, false, false],
        }
    }
}

impl fmt::Display for MassConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MassConditionId {
    type Err = MassCondError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase().replace(['-', '_'], "");
        MassConditionId::ALL
            .into_iter()
            .find(|id| id.name() == t)
            .ok_or_else(|| MassCondError::UnknownId(s.to_string()))
    }
}

fn four(masses: &MassVector) -> Result<[f64; 4], MassCondError> {
    masses
        .as_slice()
        .try_into()
        .map_err(|_| MassCondError::WrongBodyCount(masses.len()))
}

/// Residual vector of condition `id` at `(masses, η)`.
pub fn eval_condition(id: MassConditionId, masses: &MassVector, eta: f64) -> Result<Vec<f64>, MassCondError> {
    let [m1, m2, m3, m4] = four(masses)?;
    let e2 = eta * eta;
    let total = m1 + m2 + m3 + m4;
    use MassConditionId::*;
    Ok(match id {
        I => vec![
            m3 * (m1 + m2) + (m3 + m4) * m1,
            (m1 + m2) * m3 * m3 + m1 * m1 * (m3 + m4),
        ],
        II => {
            let a = m1 * m4 - m2 * m3;
            vec![a * a - e2 * (m1 + m2) * (m3 + m4) * (m1 + m3) * (m2 + m4)]
        }
        III => vec![e2 * (m1 + m2) * (m2 + m3) - m1 * m3],
        IV => vec![
            m2 * m4 - m3 * m1,
            m1 * m4 * m4 + m4 * m1 * m1 - e2 * ((m1 + m2) * m4 * m4 + (m3 + m4) * m1 * m1),
        ],
        V1 => {
            let a = m3 + m4;
            let b = m2 + m3 + m4;
            let c = m1 + m2;
            vec![m1 * a - b * c, e2 * a * c * total - (m1 * a * a + b * c * c)]
        }
        V3 => {
            let a = m1 + m2;
            let b = m1 + m2 + m3;
            let c = m3 + m4;
            let d = m2 + m4;
            vec![m4 * a - b * c, e2 * a * c * total - (m4 * a * a + b * d * d)]
        }
        V2 => {
            let a = m1 + m2;
            let b = m3 + m4;
            let c = m1 * m3 - m2 * m4;
            vec![m1 * b * b + m4 * a * a + c * c / (m2 + m3) - e2 * (a * b * b + b * a * a)]
        }
        VI => vec![m1 * (m2 + m4) - e2 * (m1 + m3) * (m2 + m3 + m4)],
        VII => vec![m1 + m2, m3 + m4],
        VIII => {
            let s = [m1, m2, m3].map(|m| 1.0 / m.sqrt());
            [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
                .iter()
                .map(|&(j, k, l)| s[j] - s[k] - s[l])
                .collect()
        }
    })
}

/// Residuals divided by `M^degree`, so that thresholds are scale-free.
pub fn normalized_residuals(id: MassConditionId, masses: &MassVector, eta: f64) -> Result<Vec<f64>, MassCondError> {
    let total = masses.total();
    let raw = eval_condition(id, masses, eta)?;
    Ok(raw
        .iter()
        .zip(id.degrees())
        .map(|(r, d)| r / total.powf(*d))
        .collect())
}

/// Distance of `(masses, η)` from satisfying `id`: the largest normalized
/// component, or the smallest alternative for VIII.
pub fn condition_gap(id: MassConditionId, masses: &MassVector, eta: f64) -> Result<f64, MassCondError> {
    let n = normalized_residuals(id, masses, eta)?;
    let abs = n.iter().map(|r| r.abs());
    Ok(if id.is_alternative() {
        abs.fold(f64::INFINITY, f64::min)
    } else {
        abs.fold(0.0, f64::max)
    })
}

/// Whether a condition can never hold for positive masses, with the
/// inequality behind the answer.
pub fn infeasible_for_positive(id: MassConditionId) -> (bool, &'static str) {
    use MassConditionId::*;
    match id {
        I => (true, "m3(m1+m2) + (m3+m4)m1 > 0 for positive masses"),
        V1 => (true, "(m2+m3+m4)(m1+m2) > m1(m3+m4) since (m2+m3+m4) > (m3+m4) and (m1+m2) > m1"),
        V3 => (true, "(m1+m2+m3)(m3+m4) > m4(m1+m2) since (m1+m2+m3) > (m1+m2) and (m3+m4) > m4"),
        VII => (true, "m1+m2 > 0 for positive masses"),
        II => (false, "holds e.g. when (m1m4-m2m3)^2 equals the eta-weighted product"),
        III => (false, "holds for equal masses at eta = 1/2"),
        IV => (false, "holds for equal masses at eta = 1/sqrt(2)"),
        V2 => (false, "holds for equal masses at eta = 1/sqrt(2)"),
        VI => (false, "holds for equal masses at eta = 1/sqrt(3)"),
        VIII => (false, "holds e.g. for (1, 1, 1/4, m4)"),
    }
}

pub fn infeasible_list() -> Vec<MassConditionId> {
    MassConditionId::ALL
        .into_iter()
        .filter(|id| infeasible_for_positive(*id).0)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRoot {
    pub condition: MassConditionId,
    pub eta: f64,
}

/// How an `η`-free condition behaves on the scanned range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EtaFreeStatus {
    Always,
    Never,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub eta: f64,
    /// Normalized residuals, one entry per scanned condition in report order.
    pub gaps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalScanReport {
    pub masses: Vec<f64>,
    pub eta_lo: f64,
    pub eta_hi: f64,
    pub steps: usize,
    pub conditions: Vec<MassConditionId>,
    /// Residuals of every condition at `eta_lo`.
    pub residuals_at_lo: Vec<(MassConditionId, Vec<f64>)>,
    pub grid: Vec<GridRow>,
    pub roots: Vec<ConditionRoot>,
    pub eta_free: Vec<(MassConditionId, EtaFreeStatus)>,
    pub eta_first: Option<f64>,
    /// Set when `eta_first` comes from a condition holding on the whole range.
    pub eta_first_at_boundary: bool,
    pub infeasible_list: Vec<MassConditionId>,
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    while b - a > BISECTION_TOL {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fa.signum() == fm.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Scan `[eta_lo, eta_hi]` for roots of the membership conditions.
pub fn scan_exceptional(
    masses: &MassVector,
    eta_lo: f64,
    eta_hi: f64,
    steps: usize,
    include_v3: bool,
) -> Result<ExceptionalScanReport, MassCondError> {
    four(masses)?;
    if !(0.0 <= eta_lo && eta_lo < eta_hi && eta_hi < 1.0) || steps < 2 {
        return Err(MassCondError::BadRange { lo: eta_lo, hi: eta_hi, steps });
    }
    let mut conditions = MassConditionId::MEMBERSHIP.to_vec();
    if include_v3 {
        conditions.push(MassConditionId::V3);
        conditions.sort();
    }
    let grid_eta: Vec<f64> = (0..steps)
        .map(|i| eta_lo + (eta_hi - eta_lo) * i as f64 / (steps - 1) as f64)
        .collect();

    let mut roots = Vec::new();
    let mut eta_free = Vec::new();
    let mut always = false;
    for &id in &conditions {
        let dependent = id.eta_dependent();
        let fixed = normalized_residuals(id, masses, 0.0)?;
        let fixed_ok: Vec<bool> = fixed
            .iter()
            .zip(dependent)
            .filter(|(_, d)| !**d)
            .map(|(r, _)| r.abs() < NEAR_MEMBERSHIP)
            .collect();
        let Some(k) = dependent.iter().position(|d| *d) else {
            // no eta dependence at all
            let holds = if id.is_alternative() {
                fixed_ok.iter().any(|b| *b)
            } else {
                fixed_ok.iter().all(|b| *b)
            };
            let status = if holds { EtaFreeStatus::Always } else { EtaFreeStatus::Never };
            always |= holds;
            eta_free.push((id, status));
            continue;
        };
        if !fixed_ok.iter().all(|b| *b) {
            continue;
        }
        let f = |eta: f64| normalized_residuals(id, masses, eta).map(|v| v[k]).unwrap_or(f64::NAN);
        let values: Vec<f64> = grid_eta.iter().map(|&e| f(e)).collect();
        for i in 0..steps {
            let (e0, v0) = (grid_eta[i], values[i]);
            if v0 == 0.0 {
                if e0 > 0.0 {
                    roots.push(ConditionRoot { condition: id, eta: e0 });
                }
                continue;
            }
            if i + 1 < steps {
                let (e1, v1) = (grid_eta[i + 1], values[i + 1]);
                if v1 != 0.0 && v0.signum() != v1.signum() {
                    roots.push(ConditionRoot { condition: id, eta: bisect(f, e0, e1) });
                }
            }
        }
    }
    roots.sort_by(|a, b| a.eta.total_cmp(&b.eta).then(a.condition.cmp(&b.condition)));

    let eta_first = if always {
        Some(eta_lo)
    } else {
        roots.first().map(|r| r.eta)
    };

    let grid = grid_eta
        .iter()
        .map(|&eta| GridRow {
            eta,
            gaps: conditions
                .iter()
                .map(|&id| condition_gap(id, masses, eta).unwrap_or(f64::NAN))
                .collect(),
        })
        .collect();
    let residuals_at_lo = MassConditionId::ALL
        .iter()
        .map(|&id| Ok((id, eval_condition(id, masses, eta_lo)?)))
        .collect::<Result<_, MassCondError>>()?;

    Ok(ExceptionalScanReport {
        masses: masses.as_slice().to_vec(),
        eta_lo,
        eta_hi,
        steps,
        conditions,
        residuals_at_lo,
        grid,
        roots,
        eta_free,
        eta_first,
        eta_first_at_boundary: always,
        infeasible_list: infeasible_list(),
    })
}

/// Membership condition closest to holding at `(masses, η)`.
pub fn nearest_condition(masses: &MassVector, eta: f64, include_v3: bool) -> Result<(MassConditionId, f64), MassCondError> {
    let mut ids = MassConditionId::MEMBERSHIP.to_vec();
    if include_v3 {
        ids.push(MassConditionId::V3);
    }
    let mut best = (ids[0], f64::INFINITY);
    for id in ids {
        let g = condition_gap(id, masses, eta)?;
        if g < best.1 {
            best = (id, g);
        }
    }
    Ok(best)
}

/// `Σ m_j x_j y_j`; see [`equations::identity_zw_weight`].
pub fn identity_residual(config: &PlanarConfig, masses: &MassVector) -> f64 {
    equations::identity_zw_weight(config, masses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_masses;

    fn m(v: &[f64]) -> MassVector {
        validate_masses(v).unwrap()
    }

    #[test]
    fn plug_in_values() {
        let ones = m(&[1.0; 4]);
        let ii = eval_condition(MassConditionId::II, &ones, 0.1).unwrap();
        assert!((ii[0] + 0.16).abs() < 1e-15);
        assert_eq!(eval_condition(MassConditionId::III, &ones, 0.5).unwrap(), vec![0.0]);
        let viii = eval_condition(MassConditionId::VIII, &m(&[1.0, 1.0, 0.25, 3.0]), 0.3).unwrap();
        assert!(viii.contains(&0.0));
        let vii = eval_condition(MassConditionId::VII, &m(&[0.5, 0.25, 2.0, 1.0]), 0.2).unwrap();
        assert_eq!(vii, vec![0.75, 3.0]);
    }

    #[test]
    fn arity_matches_eval() {
        let ms = m(&[1.0, 2.0, 3.0, 4.0]);
        for id in MassConditionId::ALL {
            let r = eval_condition(id, &ms, 0.3).unwrap();
            assert_eq!(r.len(), id.arity(), "{id}");
            assert_eq!(id.degrees().len(), id.arity());
            assert_eq!(id.eta_dependent().len(), id.arity());
        }
    }

    #[test]
    fn wrong_body_count() {
        let three = m(&[1.0; 3]);
        assert_eq!(
            eval_condition(MassConditionId::II, &three, 0.1),
            Err(MassCondError::WrongBodyCount(3))
        );
    }

    #[test]
    fn ids_parse() {
        assert_eq!("v-2".parse::<MassConditionId>().unwrap(), MassConditionId::V2);
        assert_eq!("VIII".parse::<MassConditionId>().unwrap(), MassConditionId::VIII);
        assert!("IX".parse::<MassConditionId>().is_err());
    }

    #[test]
    fn infeasibility_table() {
        assert_eq!(
            infeasible_list(),
            vec![MassConditionId::I, MassConditionId::V1, MassConditionId::V3, MassConditionId::VII]
        );
        assert!(!infeasible_for_positive(MassConditionId::III).0);
    }

    #[test]
    fn equal_mass_scan() {
        let r = scan_exceptional(&m(&[1.0; 4]), 0.0, 0.999, 1000, false).unwrap();
        assert!((r.eta_first.unwrap() - 0.5).abs() < 1e-10);
        let find = |id| r.roots.iter().find(|x| x.condition == id).map(|x| x.eta);
        assert!((find(MassConditionId::VI).unwrap() - 3f64.sqrt().recip()).abs() < 1e-10);
        assert!((find(MassConditionId::IV).unwrap() - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((find(MassConditionId::V2).unwrap() - 0.5f64.sqrt()).abs() < 1e-10);
        assert!(find(MassConditionId::II).is_none());
        assert!(!r.eta_first_at_boundary);
    }

    #[test]
    fn eta_free_condition_always_holds() {
        let r = scan_exceptional(&m(&[1.0, 1.0, 0.25, 2.0]), 0.01, 0.2, 10, false).unwrap();
        assert_eq!(r.eta_first, Some(0.01));
        assert!(r.eta_first_at_boundary);
        assert!(r.eta_free.contains(&(MassConditionId::VIII, EtaFreeStatus::Always)));
    }

    #[test]
    fn bad_range() {
        let ones = m(&[1.0; 4]);
        assert!(scan_exceptional(&ones, 0.5, 0.2, 10, false).is_err());
        assert!(scan_exceptional(&ones, 0.0, 1.0, 10, false).is_err());
        assert!(scan_exceptional(&ones, 0.0, 0.5, 1, false).is_err());
    }

    #[test]
    fn v3_opt_in() {
        let ones = m(&[1.0; 4]);
        let a = scan_exceptional(&ones, 0.0, 0.9, 50, false).unwrap();
        let b = scan_exceptional(&ones, 0.0, 0.9, 50, true).unwrap();
        assert!(!a.conditions.contains(&MassConditionId::V3));
        assert!(b.conditions.contains(&MassConditionId::V3));
        // first component of V3 never vanishes, so no extra roots
        assert_eq!(a.roots, b.roots);
    }
}
