//! Quantitative bounds: Riccati blow-up times, the wave-breaking time
//! estimate with its explicit constants, the critical Besov norm of peakon
//! superpositions, and the norm-inflation pair construction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{LambdaParams, COEFF_TOL};
use crate::peakon_dynamics::PeakonState;
use crate::quadrature;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSource {
    RiccatiLower,
    RiccatiUpper,
    WaveBreakingT1,
    WaveBreakingT2,
}

/// A finite-time blow-up bound together with the constants that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlowupCertificate {
    pub source: CertificateSource,
    /// Upper bound on the blow-up time.
    pub bound: f64,
    pub constants: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiccatiBranch {
    /// `y' >= C y^2 - K`, blow-up to `+inf` when `y0 > sqrt(K/C)`.
    Lower,
    /// `y' <= -C y^2 + K`, blow-up to `-inf` when `y0 < -sqrt(K/C)`.
    Upper,
}

/// Blow-up time bound for the Riccati comparison inequalities:
/// `1/(2 sqrt(CK)) ln((y0 + sqrt(K/C))/(y0 - sqrt(K/C)))`, with the `K = 0`
/// case taken as the limit `1/(C y0)`. `None` when the initial datum does not
/// clear the threshold.
pub fn riccati_blowup_time(
    c: f64,
    k: f64,
    y0: f64,
    branch: RiccatiBranch,
) -> crate::Result<Option<f64>> {
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("Riccati coefficient C = {c} must be positive")));
    }
    if k < 0.0 || !k.is_finite() {
        return Err(Error::InvalidParams(format!("Riccati constant K = {k} must be nonnegative")));
    }
    // The upper branch is the lower branch of -y.
    let y0 = match branch {
        RiccatiBranch::Lower => y0,
        RiccatiBranch::Upper => -y0,
    };
    let r = (k / c).sqrt();
    if !(y0 > r) {
        return Ok(None);
    }
    if k == 0.0 {
        return Ok(Some(1.0 / (c * y0)));
    }
    Ok(Some(((y0 + r) / (y0 - r)).ln() / (2.0 * (c * k).sqrt())))
}

/// Wave-breaking time bound. Requires the coefficient relations
/// `l1 + l3 = 0`, `2 l1 + l4 = 0`, `l2 = 2 l6` and `l2 != l6`. The slope
/// functional is `u0x - l1/(l6 - l2) u0`; the caller supplies its extrema
/// over x (from the grid or a closed form) together with the `H^1` norm of
/// the data. Returns `None` when the breaking criterion fails.
pub fn wave_breaking_bound(
    params: &LambdaParams,
    u0_h1: f64,
    slope_functional_min: f64,
    slope_functional_max: f64,
) -> crate::Result<Option<BlowupCertificate>> {
    let relations = [
        ("lambda1 + lambda3 = 0", params.lambda1 + params.lambda3),
        ("2 lambda1 + lambda4 = 0", 2.0 * params.lambda1 + params.lambda4),
        ("lambda2 = 2 lambda6", params.lambda2 - 2.0 * params.lambda6),
    ];
    for (name, residual) in relations {
        if residual.abs() > COEFF_TOL {
            return Err(Error::InvalidParams(format!(
                "wave-breaking bound needs {name} (off by {residual:e})"
            )));
        }
    }
    if (params.lambda2 - params.lambda6).abs() <= COEFF_TOL {
        return Err(Error::InvalidParams(
            "wave-breaking bound excludes lambda2 = lambda6 (the slope equation degenerates; \
             note lambda2 = 2 lambda6 then forces lambda6 = 0)"
                .into(),
        ));
    }
    if !(u0_h1 >= 0.0) {
        return Err(Error::InvalidParams(format!("H^1 norm {u0_h1} must be nonnegative")));
    }

    let d = params.lambda6 - params.lambda2;
    let c1 = 0.5
        * (params.lambda3.abs()
            + params.lambda5.abs()
            + (params.lambda1 * params.lambda3 / d).abs()
            + (params.lambda1 * params.lambda5 / d).abs());
    let c2 = 0.5
        * (params.lambda4.abs()
            + params.lambda6.abs()
            + (params.lambda1 * params.lambda4 / d).abs()
            + (params.lambda1 * params.lambda6 / d).abs());
    let k0 = (0.5 * params.lambda5.abs() + c1.max(c2)) * u0_h1 * u0_h1;

    let mut constants = BTreeMap::new();
    constants.insert("K0".to_string(), k0);
    constants.insert("C1".to_string(), c1);
    constants.insert("C2".to_string(), c2);

    // Both branches are the lower Riccati inequality for +/- the slope
    // functional with C = |lambda2 - lambda6| and K = K0.
    let (source, key, y0) = if params.lambda6 < params.lambda2 {
        (CertificateSource::WaveBreakingT1, "T1", -slope_functional_min)
    } else {
        (CertificateSource::WaveBreakingT2, "T2", slope_functional_max)
    };
    match riccati_blowup_time((params.lambda2 - params.lambda6).abs(), k0, y0, RiccatiBranch::Lower)? {
        Some(bound) => {
            constants.insert(key.to_string(), bound);
            Ok(Some(BlowupCertificate { source, bound, constants }))
        }
        None => Ok(None),
    }
}

/// A Besov `B^{3/2}_{2,inf}` norm value with the truncation tail estimate
/// for the dropped dyadic blocks.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BesovNorm {
    pub norm: f64,
    /// Upper bound on any dropped block's squared contribution.
    pub tail_estimate: f64,
}

/// Critical Besov norm of a peakon superposition: the max over the low
/// frequency block `|xi| <= 1` and the dyadic blocks `2^j <= |xi| <= 2^{j+1}`
/// up to `q_max` of the weighted spectral mass, using the exact transform
/// `u_hat(xi) = sum_i 2 p_i e^{-i xi q_i}/(1 + xi^2)`. Block integrals by
/// adaptive quadrature to relative 1e-9.
pub fn besov_32_norm(state: &PeakonState, q_max: u32) -> crate::Result<BesovNorm> {
    if q_max < 8 {
        return Err(Error::InvalidParams(format!("q_max = {q_max} must be at least 8")));
    }
    let n = state.p.len();
    if n == 0 {
        return Ok(BesovNorm { norm: 0.0, tail_estimate: 0.0 });
    }
    // (1 + xi^2)^{3/2} |u_hat|^2 = 4 sum_{i,j} p_i p_j cos(xi (q_i - q_j))
    //                              / sqrt(1 + xi^2);
    // even in xi, so each block over [a, b] and [-b, -a] doubles.
    let integrand = |xi: f64| {
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                sum += state.p[i] * state.p[j] * (xi * (state.q[i] - state.q[j])).cos();
            }
        }
        4.0 * sum / (1.0 + xi * xi).sqrt()
    };
    let block = |a: f64, b: f64| 2.0 * quadrature::integrate(integrand, a, b, 1e-300, 1e-9);

    let mut max_sq = block(0.0, 1.0).max(0.0);
    for j in 0..=q_max {
        let a = (2.0f64).powi(j as i32);
        max_sq = max_sq.max(block(a, 2.0 * a));
    }
    let mass: f64 = state.p.iter().map(|p| 2.0 * p.abs()).sum();
    // |u_hat|^2 <= mass^2/(1+xi^2)^2; a block past 2^{q_max} contributes at
    // most mass^2 int_{2^q}^inf dxi/(1+xi^2) < mass^2 2^{-q_max} per side.
    let tail = 2.0 * mass * mass * (2.0f64).powi(-(q_max as i32));
    Ok(BesovNorm { norm: max_sq.sqrt(), tail_estimate: tail })
}

/// The norm-inflation pair: two single-peakon amplitudes whose initial
/// critical-Besov distance shrinks as `q` grows while the separation of the
/// corresponding solutions at time `T` stays at least `1/(2 l1^2)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IllposedPair {
    pub c1: f64,
    pub c2: f64,
    pub initial_distance: f64,
    pub final_separation_lower_bound: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub t: f64,
    pub q: u32,
}

impl IllposedPair {
    fn evolved(&self, c: f64) -> crate::Result<PeakonState> {
        let den = 2.0 * self.lambda1 * c * self.t - 1.0;
        PeakonState::new(
            vec![c / den],
            vec![self.lambda2 / (2.0 * self.lambda1) * den.abs().ln()],
            self.t,
        )
    }

    /// The two single-peakon solutions at time `T`.
    pub fn final_states(&self) -> crate::Result<(PeakonState, PeakonState)> {
        Ok((self.evolved(self.c1)?, self.evolved(self.c2)?))
    }

    /// Their difference as a two-peakon state, ready for [`besov_32_norm`].
    pub fn final_difference_state(&self) -> crate::Result<PeakonState> {
        let (a, b) = self.final_states()?;
        PeakonState::new(vec![b.p[0], -a.p[0]], vec![b.q[0], a.q[0]], self.t)
    }
}

/// Constructs the pair `c1 = 1/(2 l1 (1+T))`,
/// `c2 = (1 + T - E)/(2 l1 (1+T) T)` with `E = exp(2^{-q+1} |l1/l2| pi)`.
/// `q` must be large enough that `1 + T > E`.
pub fn illposed_pair(lambda1: f64, lambda2: f64, t: f64, q: u32) -> crate::Result<IllposedPair> {
    if lambda1 == 0.0 || lambda2 == 0.0 {
        return Err(Error::InvalidParams(
            "the pair construction needs lambda1 != 0 and lambda2 != 0".into(),
        ));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParams(format!("time horizon T = {t} must be positive")));
    }
    let phase = (2.0f64).powi(1 - q as i32) * (lambda1 / lambda2).abs() * std::f64::consts::PI;
    let e = phase.exp();
    if !(1.0 + t - e > 0.0) {
        return Err(Error::InvalidParams(format!(
            "q = {q} too small: need 1 + T > exp(2^(-q+1) |l1/l2| pi) = {e}"
        )));
    }
    let c1 = 1.0 / (2.0 * lambda1 * (1.0 + t));
    let c2 = (1.0 + t - e) / (2.0 * lambda1 * (1.0 + t) * t);
    let dc = c2 - c1;
    let initial_distance = (8.0 * dc * dc * (1.0 + std::f64::consts::SQRT_2).ln()).sqrt();
    Ok(IllposedPair {
        c1,
        c2,
        initial_distance,
        final_separation_lower_bound: 1.0 / (2.0 * lambda1 * lambda1),
        lambda1,
        lambda2,
        t,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{preset, PresetName};
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn riccati_examples() {
        let t = riccati_blowup_time(1.0, 1.0, 2.0, RiccatiBranch::Lower).unwrap().unwrap();
        assert!((t - 0.5 * 3.0f64.ln()).abs() < 1e-12);
        assert!(riccati_blowup_time(1.0, 1.0, 1.0, RiccatiBranch::Lower).unwrap().is_none());
        let t = riccati_blowup_time(2.0, 0.0, 1.0, RiccatiBranch::Lower).unwrap().unwrap();
        assert_eq!(t, 0.5);
        // Mirror branch.
        let t = riccati_blowup_time(1.0, 1.0, -2.0, RiccatiBranch::Upper).unwrap().unwrap();
        assert!((t - 0.5 * 3.0f64.ln()).abs() < 1e-12);
        assert!(riccati_blowup_time(1.0, 1.0, 2.0, RiccatiBranch::Upper).unwrap().is_none());
        assert!(riccati_blowup_time(0.0, 1.0, 2.0, RiccatiBranch::Lower).is_err());
        assert!(riccati_blowup_time(1.0, -1.0, 2.0, RiccatiBranch::Lower).is_err());
    }

    /// Integrates y' = C y^2 - K until y > 1e10, returning the time.
    fn riccati_equality_blowup(c: f64, k: f64, y0: f64) -> f64 {
        let mut y = y0;
        let mut t = 0.0;
        while y < 1e10 {
            let h = 0.02 / (c * y.abs().max(1.0));
            let f = |y: f64| c * y * y - k;
            let k1 = f(y);
            let k2 = f(y + 0.5 * h * k1);
            let k3 = f(y + 0.5 * h * k2);
            let k4 = f(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
        }
        t
    }

    #[test]
    fn riccati_bound_is_sharp_for_equality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let c: f64 = rng.gen_range(0.5..3.0);
            let k: f64 = rng.gen_range(0.0..4.0);
            let y0 = (k / c).sqrt() + rng.gen_range(0.1..3.0);
            let bound = riccati_blowup_time(c, k, y0, RiccatiBranch::Lower).unwrap().unwrap();
            let t = riccati_equality_blowup(c, k, y0);
            assert!((t - bound).abs() < 1e-4, "C={c} K={k} y0={y0}: {t} vs {bound}");
        }
    }

    #[test]
    fn riccati_monotonicity() {
        let at = |c: f64, k: f64, y0: f64| {
            riccati_blowup_time(c, k, y0, RiccatiBranch::Lower).unwrap().unwrap()
        };
        assert!(at(1.0, 1.0, 3.0) < at(1.0, 1.0, 2.0));
        assert!(at(2.0, 1.0, 2.0) < at(1.0, 1.0, 2.0));
        assert!(at(1.0, 2.0, 2.0) > at(1.0, 1.0, 2.0));
    }

    #[test]
    fn ch_wave_breaking_constants() {
        let ch = preset(PresetName::CamassaHolm);
        let cert = wave_breaking_bound(&ch, 1.7, -10.0, 0.3).unwrap().unwrap();
        assert_eq!(cert.source, CertificateSource::WaveBreakingT1);
        assert!((cert.constants["C1"] - 0.5).abs() < 1e-15);
        assert!((cert.constants["C2"] - 0.25).abs() < 1e-15);
        assert!((cert.constants["K0"] - 1.7 * 1.7).abs() < 1e-12);
        assert!(cert.bound > 0.0 && cert.bound.is_finite());
    }

    #[test]
    fn ch_steep_data_certificate_and_shallow_refusal() {
        // u0 = -a x e^{-(x/w)^2}; slope minimum is -a at x = 0 (the functional
        // is just u0x for CH since lambda1 = 0). The profile must be narrow:
        // for w = 0.2 the H1 norm is about 0.44 a, so the steepness condition
        // a > sqrt(2) ||u0||_{H1} holds for any amplitude.
        let ch = preset(PresetName::CamassaHolm);
        let a = 10.0;
        let w = 0.2;
        let h1_sq = quadrature::integrate(
            |x: f64| {
                let u = -a * x * (-(x / w) * (x / w)).exp();
                let ux = -a * (1.0 - 2.0 * x * x / (w * w)) * (-(x / w) * (x / w)).exp();
                u * u + ux * ux
            },
            -20.0,
            20.0,
            1e-12,
            1e-12,
        );
        let h1 = h1_sq.sqrt();
        // Breaking condition: -a <= -sqrt(K0 / (l2 - l6)) = -sqrt(2) h1.
        assert!(a > 2.0f64.sqrt() * h1, "test data not steep enough: {a} vs {h1}");
        let cert = wave_breaking_bound(&ch, h1, -a, a).unwrap().unwrap();
        assert!(cert.bound > 0.0);

        // A shallow positive bump has slope min well above the threshold.
        let shallow = wave_breaking_bound(&ch, 1.0, -0.5, 0.5).unwrap();
        assert!(shallow.is_none());
    }

    #[test]
    fn wave_breaking_refuses_bad_coefficients() {
        let xq = preset(PresetName::XiaQiao);
        assert!(wave_breaking_bound(&xq, 1.0, -1.0, 1.0).is_err());
        // lambda2 = lambda6 = 0 passes the relations but hits the exclusion.
        let degenerate = LambdaParams::new(1.0, 0.0, -1.0, -2.0, 0.5, 0.0).unwrap();
        let err = wave_breaking_bound(&degenerate, 1.0, -1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("lambda2 = lambda6"));
    }

    #[test]
    fn besov_colocated_difference() {
        let dc = 0.37;
        let state = PeakonState::new(vec![dc], vec![0.0], 0.0).unwrap();
        let got = besov_32_norm(&state, 16).unwrap();
        let want_sq = 8.0 * dc * dc * (1.0 + std::f64::consts::SQRT_2).ln();
        assert!(
            (got.norm * got.norm - want_sq).abs() / want_sq < 1e-6,
            "{} vs {}",
            got.norm * got.norm,
            want_sq
        );
    }

    #[test]
    fn besov_empty_and_single() {
        let empty = PeakonState::new(vec![], vec![], 0.0).unwrap();
        assert_eq!(besov_32_norm(&empty, 8).unwrap().norm, 0.0);

        let single = PeakonState::new(vec![1.0], vec![0.0], 0.0).unwrap();
        let got = besov_32_norm(&single, 12).unwrap();
        let want_sq = 8.0 * 1.0f64.asinh();
        assert!((got.norm * got.norm - want_sq).abs() / want_sq < 1e-8);
    }

    #[test]
    fn besov_tail_converges() {
        let state =
            PeakonState::new(vec![1.0, -0.6], vec![0.3, 1.1], 0.0).unwrap();
        let a = besov_32_norm(&state, 12).unwrap();
        let b = besov_32_norm(&state, 16).unwrap();
        assert!((a.norm - b.norm).abs() / b.norm < 1e-9);
        assert!(b.tail_estimate < a.tail_estimate);
    }

    #[test]
    fn besov_requires_enough_blocks() {
        let state = PeakonState::new(vec![1.0], vec![0.0], 0.0).unwrap();
        assert!(besov_32_norm(&state, 7).is_err());
    }

    #[test]
    fn illposed_pair_example() {
        let pair = illposed_pair(0.5, 1.0, 1.0, 12).unwrap();
        assert!((pair.final_separation_lower_bound - 2.0).abs() < 1e-15);
        let e = ((2.0f64).powi(-11) * 0.5 * std::f64::consts::PI).exp();
        let want_c2 = (2.0 - e) / 2.0;
        assert!((pair.c2 - want_c2).abs() < 1e-14);
        assert!((pair.c1 - 0.5).abs() < 1e-15);
        let dc = pair.c2 - pair.c1;
        let want_dist_sq = 8.0 * dc * dc * (1.0 + std::f64::consts::SQRT_2).ln();
        assert!((pair.initial_distance.powi(2) - want_dist_sq).abs() < 1e-14);
    }

    #[test]
    fn illposed_initial_distance_shrinks_with_q() {
        let mut prev = f64::INFINITY;
        for q in [8, 10, 12, 16, 20] {
            let pair = illposed_pair(0.5, 1.0, 1.0, q).unwrap();
            assert!(pair.initial_distance < prev);
            assert!((pair.final_separation_lower_bound - 2.0).abs() < 1e-15);
            prev = pair.initial_distance;
        }
    }

    #[test]
    fn illposed_final_separation_verified_by_norm() {
        for q in [8, 10, 12] {
            let pair = illposed_pair(0.5, 1.0, 1.0, q).unwrap();
            let diff = pair.final_difference_state().unwrap();
            let norm = besov_32_norm(&diff, 14).unwrap().norm;
            // The separation stays bounded away from zero as q grows while
            // the initial distance vanishes.
            assert!(norm > 0.5, "q = {q}: final separation {norm}");
            assert!(pair.initial_distance < 0.35 * norm);
        }
    }

    #[test]
    fn illposed_pair_rejects_small_q() {
        // q = 1 with l1/l2 huge: exp(2^0 * 50 * pi) >> 1 + T.
        assert!(illposed_pair(50.0, 1.0, 1.0, 1).is_err());
        assert!(illposed_pair(0.0, 1.0, 1.0, 12).is_err());
        assert!(illposed_pair(0.5, 1.0, -1.0, 12).is_err());
    }

    #[test]
    fn certificate_serializes_with_named_constants() {
        let ch = preset(PresetName::CamassaHolm);
        let cert = wave_breaking_bound(&ch, 1.7, -10.0, 0.3).unwrap().unwrap();
        let v = serde_json::to_value(&cert).unwrap();
        let consts = v.get("constants").unwrap();
        for key in ["K0", "C1", "C2", "T1"] {
            assert!(consts.get(key).is_some(), "missing {key}");
        }
        let pair = illposed_pair(0.5, 1.0, 1.0, 12).unwrap();
        let v = serde_json::to_value(pair).unwrap();
        assert!(v.get("c1").is_some() && v.get("c2").is_some());
    }
}
