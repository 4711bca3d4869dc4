//! The quadratic equation family: coefficients, presets and the
//! coefficient-condition predicates gating each analytical result.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Absolute tolerance for coefficient equality checks. Coefficients are
/// user-entered rationals, not computed quantities, so a tight absolute
/// tolerance is appropriate.
pub const COEFF_TOL: f64 = 1e-12;

/// The six real coefficients of the quadratic family
/// `u_t + l1 u^2 + l2 u u_x + G*(l3 u^2 + l4 u_x^2) + dx G*(l5 u^2 + l6 u_x^2) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub lambda5: f64,
    pub lambda6: f64,
}

impl LambdaParams {
    pub fn new(
        lambda1: f64,
        lambda2: f64,
        lambda3: f64,
        lambda4: f64,
        lambda5: f64,
        lambda6: f64,
    ) -> crate::Result<Self> {
        let p = Self {
            lambda1,
            lambda2,
            lambda3,
            lambda4,
            lambda5,
            lambda6,
        };
        if p.as_array().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("lambda coefficients {p}")));
        }
        Ok(p)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.lambda1,
            self.lambda2,
            self.lambda3,
            self.lambda4,
            self.lambda5,
            self.lambda6,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> crate::Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }
}

impl fmt::Display for LambdaParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {}, {})",
            self.lambda1, self.lambda2, self.lambda3, self.lambda4, self.lambda5, self.lambda6
        )
    }
}

/// Catalog of named equations inside the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PresetName {
    CamassaHolm,
    DegasperisProcesi,
    XiaQiao,
    BFamily(f64),
}

impl FromStr for PresetName {
    type Err = Error;

    /// Parses the CLI spelling: `camassa-holm`, `degasperis-procesi`,
    /// `xia-qiao` or `b-family:<real>`.
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "camassa-holm" => Ok(Self::CamassaHolm),
            "degasperis-procesi" => Ok(Self::DegasperisProcesi),
            "xia-qiao" => Ok(Self::XiaQiao),
            other => {
                if let Some(b) = other.strip_prefix("b-family:") {
                    let b: f64 = b
                        .parse()
                        .map_err(|_| Error::Config(format!("invalid b-family parameter {b:?}")))?;
                    if !b.is_finite() {
                        return Err(Error::Config("b-family parameter must be finite".into()));
                    }
                    Ok(Self::BFamily(b))
                } else {
                    Err(Error::Config(format!("unknown preset {other:?}")))
                }
            }
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CamassaHolm => write!(f, "camassa-holm"),
            Self::DegasperisProcesi => write!(f, "degasperis-procesi"),
            Self::XiaQiao => write!(f, "xia-qiao"),
            Self::BFamily(b) => write!(f, "b-family:{b}"),
        }
    }
}

/// Coefficient tuple of the named equation in nonlocal form.
///
/// The b-family `m_t + m_x u + b m u_x = 0` rewritten through the Helmholtz
/// inverse carries `(0, 1, 0, 0, b/2, (3-b)/2)`; b = 2 recovers Camassa-Holm
/// and b = 3 Degasperis-Procesi.
pub fn preset(name: PresetName) -> LambdaParams {
    let a = match name {
        PresetName::CamassaHolm => [0.0, 1.0, 0.0, 0.0, 1.0, 0.5],
        PresetName::DegasperisProcesi => [0.0, 1.0, 0.0, 0.0, 1.5, 0.0],
        PresetName::XiaQiao => [0.5, 1.0, 0.5, 1.0, 0.5, 1.0],
        PresetName::BFamily(b) => [0.0, 1.0, 0.0, 0.0, b / 2.0, (3.0 - b) / 2.0],
    };
    LambdaParams::from_array(a).expect("preset coefficients are finite")
}

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= COEFF_TOL
}

/// N-peakon admissibility: `l3 = l1`, `l4 = 2 l1`, `l5 = 3/2 l2 - l6`.
/// Only under these relations does the peakon ansatz reduce the PDE to the
/// amplitude/position ODE system.
pub fn check_peakon_admissible(p: &LambdaParams) -> bool {
    admissibility_violation(p).is_none()
}

/// Names the first violated admissibility relation, if any.
pub fn admissibility_violation(p: &LambdaParams) -> Option<String> {
    if !eq(p.lambda3, p.lambda1) {
        return Some(format!(
            "lambda3 = lambda1 fails: lambda3 = {}, lambda1 = {}",
            p.lambda3, p.lambda1
        ));
    }
    if !eq(p.lambda4, 2.0 * p.lambda1) {
        return Some(format!(
            "lambda4 = 2*lambda1 fails: lambda4 = {}, 2*lambda1 = {}",
            p.lambda4,
            2.0 * p.lambda1
        ));
    }
    if !eq(p.lambda5, 1.5 * p.lambda2 - p.lambda6) {
        return Some(format!(
            "lambda5 = 3/2*lambda2 - lambda6 fails: lambda5 = {}, 3/2*lambda2 - lambda6 = {}",
            p.lambda5,
            1.5 * p.lambda2 - p.lambda6
        ));
    }
    None
}

/// Single peakon traveling waves exist iff `l1 = l3 = l4 = 0` and
/// `l2 - 2 l5 / 3 - 2 l6 / 3 = 0`.
pub fn check_single_peakon_traveling(p: &LambdaParams) -> bool {
    eq(p.lambda1, 0.0)
        && eq(p.lambda3, 0.0)
        && eq(p.lambda4, 0.0)
        && eq(p.lambda2 - 2.0 * p.lambda5 / 3.0 - 2.0 * p.lambda6 / 3.0, 0.0)
}

/// H^1 conservation law holds under `l1 + l3 = 0`, `2 l1 + l4 = 0`,
/// `l2 = 2 l6`.
pub fn check_h1_conservative(p: &LambdaParams) -> bool {
    eq(p.lambda1 + p.lambda3, 0.0)
        && eq(2.0 * p.lambda1 + p.lambda4, 0.0)
        && eq(p.lambda2, 2.0 * p.lambda6)
}

/// Sign classification of the initial momentum density `m0 = u0 - u0_xx`,
/// supplied by the caller (e.g. from `pde_solver::compute_momentum`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumSign {
    Nonnegative,
    Nonpositive,
    Mixed,
    Unknown,
}

/// Outcome of the global-existence condition checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlobalExistence {
    /// `l1 + l3 = 0`, `2 l1 + l4 = 0`, `l2 = l6 = 0`: global for any data.
    GlobalByGe,
    /// Peakon-admissible with `l2 != 0` and a signed-momentum condition
    /// compatible with `l1` dominating `|1/2 (5/2 l2 - 2 l6)|`.
    GlobalByGe1,
    NoGuarantee,
}

/// Applies the two sufficient global-existence conditions in order.
pub fn check_global_existence(p: &LambdaParams, m0_sign: MomentumSign) -> GlobalExistence {
    if eq(p.lambda1 + p.lambda3, 0.0)
        && eq(2.0 * p.lambda1 + p.lambda4, 0.0)
        && eq(p.lambda2, 0.0)
        && eq(p.lambda6, 0.0)
    {
        return GlobalExistence::GlobalByGe;
    }
    let half_comp = 0.5 * (2.5 * p.lambda2 - 2.0 * p.lambda6);
    if check_peakon_admissible(p) && !eq(p.lambda2, 0.0) {
        let ok = match m0_sign {
            MomentumSign::Nonnegative => p.lambda1 >= half_comp.abs() - COEFF_TOL,
            MomentumSign::Nonpositive => p.lambda1 <= -half_comp.abs() + COEFF_TOL,
            MomentumSign::Mixed | MomentumSign::Unknown => false,
        };
        if ok {
            return GlobalExistence::GlobalByGe1;
        }
    }
    GlobalExistence::NoGuarantee
}
