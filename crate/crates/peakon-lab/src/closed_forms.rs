//! Exact solution formulas: traveling and non-traveling single peakons, the
//! two-peakon family of the Xia-Qiao-type equation, constant fitting from
//! initial data, crest separation and singular-time prediction.

use serde::{Deserialize, Serialize};

use crate::model::LambdaParams;
use crate::peakon_dynamics::PeakonState;
use crate::Error;

/// Integration constants of the two-peakon family. The time shift is
/// `s = (C1 + C2) t + C3`; `alpha = C1/(C1+C2)`, `beta = C2/(C1+C2)`;
/// `(mu1, mu2)` is a projective pair, not simultaneously zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPeakonConstants {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl TwoPeakonConstants {
    pub fn sum(&self) -> f64 {
        self.c1 + self.c2
    }

    /// `s` at physical time `t`.
    pub fn s_of_t(&self, t: f64) -> f64 {
        self.sum() * t + self.c3
    }

    /// Physical time at shift `s`.
    pub fn t_of_s(&self, s: f64) -> f64 {
        (s - self.c3) / self.sum()
    }
}

/// Constants of the non-traveling single peakon
/// `u = 1/(2 l1 t - A) exp(-|x - l2/(2 l1) ln|2 l1 t - A| - B|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonTravelingConstants {
    pub a: f64,
    pub b: f64,
}

/// Traveling single peakon `c exp(-|x - l2 c t|)`.
pub fn single_peakon_traveling(c: f64, lambda2: f64, x: f64, t: f64) -> f64 {
    c * (-(x - lambda2 * c * t).abs()).exp()
}

/// Non-traveling single peakon, defined wherever `2 l1 t - A != 0`.
pub fn single_peakon_nontraveling(
    consts: &NonTravelingConstants,
    params: &LambdaParams,
    x: f64,
    t: f64,
) -> crate::Result<f64> {
    if params.lambda1 == 0.0 {
        return Err(Error::InvalidParams(
            "non-traveling peakon needs lambda1 != 0".into(),
        ));
    }
    let den = 2.0 * params.lambda1 * t - consts.a;
    if den == 0.0 {
        return Err(Error::Singular(format!("2 lambda1 t - A vanishes at t = {t}")));
    }
    let crest = params.lambda2 / (2.0 * params.lambda1) * den.abs().ln() + consts.b;
    Ok((-(x - crest).abs()).exp() / den)
}

/// Amplitude and crest of the non-traveling peakon at time `t`, without
/// forming the exponential.
pub fn nontraveling_amplitude_crest(
    consts: &NonTravelingConstants,
    params: &LambdaParams,
    t: f64,
) -> crate::Result<(f64, f64)> {
    if params.lambda1 == 0.0 {
        return Err(Error::InvalidParams(
            "non-traveling peakon needs lambda1 != 0".into(),
        ));
    }
    let den = 2.0 * params.lambda1 * t - consts.a;
    if den == 0.0 {
        return Err(Error::Singular(format!("2 lambda1 t - A vanishes at t = {t}")));
    }
    let crest = params.lambda2 / (2.0 * params.lambda1) * den.abs().ln() + consts.b;
    Ok((1.0 / den, crest))
}

/// Inverts the non-traveling formula for the constants that put amplitude
/// `p0` and crest `q0` at time `t0`.
pub fn fit_nontraveling(
    p0: f64,
    q0: f64,
    t0: f64,
    params: &LambdaParams,
) -> crate::Result<NonTravelingConstants> {
    if params.lambda1 == 0.0 {
        return Err(Error::InvalidParams(
            "non-traveling peakon needs lambda1 != 0".into(),
        ));
    }
    if p0 == 0.0 {
        return Err(Error::DegenerateData("amplitude p0 must be nonzero".into()));
    }
    let a = 2.0 * params.lambda1 * t0 - 1.0 / p0;
    let b = q0 - params.lambda2 / (2.0 * params.lambda1) * (1.0 / p0).abs().ln();
    Ok(NonTravelingConstants { a, b })
}

fn denominators(consts: &TwoPeakonConstants, s: f64) -> crate::Result<(f64, f64)> {
    if s <= 0.0 {
        return Err(Error::Singular(format!("shift variable s = {s} must be positive")));
    }
    let TwoPeakonConstants { mu1, mu2, alpha, beta, .. } = *consts;
    let big = mu1 * s.powf(alpha) + mu2 * s.powf(beta);
    let small = mu1 * alpha * s.powf(-beta) + mu2 * beta * s.powf(-alpha);
    if big == 0.0 {
        return Err(Error::Singular(format!(
            "mu1 s^alpha + mu2 s^beta vanishes at s = {s}"
        )));
    }
    if small == 0.0 {
        return Err(Error::Singular(format!(
            "mu1 alpha s^-beta + mu2 beta s^-alpha vanishes at s = {s}"
        )));
    }
    Ok((big, small))
}

/// The two-peakon family at shift `s`:
///
/// ```text
/// p1 = (C1 + C2) (mu1 a s^-b + mu2 b s^-a) / (mu1 s^a + mu2 s^b)
/// p2 = C2 / s
/// q1 = ln( C1/(C1+C2) (mu1 s^a + mu2 s^b) / (mu1 a s^-b + mu2 b s^-a) )
/// q2 = ln s
/// ```
///
/// (`a = alpha`, `b = beta`). Physical time is `t = (s - C3)/(C1 + C2)`.
pub fn two_peakon_state(consts: &TwoPeakonConstants, s: f64) -> crate::Result<PeakonState> {
    let (big, small) = denominators(consts, s)?;
    let p1 = consts.sum() * small / big;
    let p2 = consts.c2 / s;
    let q1_arg = consts.alpha * big / small;
    if q1_arg <= 0.0 {
        return Err(Error::Singular(format!(
            "crest argument alpha (mu1 s^a + mu2 s^b)/(mu1 a s^-b + mu2 b s^-a) = {q1_arg} \
             is not positive at s = {s}"
        )));
    }
    let q1 = q1_arg.ln();
    let q2 = s.ln();
    PeakonState::new(vec![p1, p2], vec![q1, q2], consts.t_of_s(s))
}

/// Crest separation `q1 - q2` without forming the states.
pub fn two_peakon_separation(consts: &TwoPeakonConstants, s: f64) -> crate::Result<f64> {
    if s <= 0.0 {
        return Err(Error::Singular(format!("shift variable s = {s} must be positive")));
    }
    let TwoPeakonConstants { mu1, mu2, alpha, beta, .. } = *consts;
    let num = mu1 * s.powf(alpha) + mu2 * s.powf(beta);
    let den = mu1 * alpha * s.powf(alpha) + mu2 * beta * s.powf(beta);
    if den == 0.0 {
        return Err(Error::Singular(format!(
            "mu1 alpha s^alpha + mu2 beta s^beta vanishes at s = {s}"
        )));
    }
    let arg = alpha * num / den;
    if arg <= 0.0 {
        return Err(Error::Singular(format!(
            "separation argument {arg} is not positive at s = {s}"
        )));
    }
    Ok(arg.ln())
}

/// Fits the integration constants to two-peakon initial data
/// `u(x, t0) = xi1 exp(-|x - eta1|) + xi2 exp(-|x - eta2|)`, `eta1 < eta2`.
///
/// Uses the identities `p1 e^{q1} = C1`, `p2 e^{q2} = C2` hidden in the
/// displayed formulas, the time convention `s0 = e^{eta2}` from
/// `q2(s) = ln s`, and the single homogeneous linear equation the crest
/// condition `q1(s0) = eta1` imposes on `(mu1, mu2)`.
pub fn fit_two_peakon(
    xi1: f64,
    xi2: f64,
    eta1: f64,
    eta2: f64,
    t0: f64,
) -> crate::Result<TwoPeakonConstants> {
    if !(eta1 < eta2) {
        return Err(Error::DegenerateData(format!(
            "initial crests must be ordered eta1 < eta2 (got {eta1}, {eta2})"
        )));
    }
    if xi2 == 0.0 {
        return Err(Error::DegenerateData("xi2 must be nonzero".into()));
    }
    if xi1 == 0.0 {
        return Err(Error::DegenerateData(
            "xi1 = 0 is single-peakon data; use the single-peakon formulas".into(),
        ));
    }
    let c1 = xi1 * eta1.exp();
    let c2 = xi2 * eta2.exp();
    let sum = c1 + c2;
    if sum == 0.0 {
        return Err(Error::DegenerateData(
            "xi1 e^{eta1} + xi2 e^{eta2} must be nonzero".into(),
        ));
    }
    let s0 = eta2.exp();
    let c3 = s0 - sum * t0;
    let alpha = c1 / sum;
    let beta = c2 / sum;
    // Crest condition at s0, one homogeneous equation in (mu1, mu2).
    let k = eta1.exp() * sum / c1;
    let coef1 = s0.powf(alpha) - k * alpha * s0.powf(-beta);
    let coef2 = s0.powf(beta) - k * beta * s0.powf(-alpha);
    let (mu1, mu2) = if coef2 != 0.0 {
        (1.0, -coef1 / coef2)
    } else if coef1 != 0.0 {
        (0.0, 1.0)
    } else {
        (1.0, 0.0)
    };
    Ok(TwoPeakonConstants { c1, c2, c3, mu1, mu2, alpha, beta })
}

/// Earliest forward-time singularity of the two-peakon formulas, scanning
/// from `s0` in the direction `sign(C1 + C2)`: a zero of either mu-weighted
/// denominator, or (for decreasing `s`) the moment `s` reaches 0. `None` when
/// no singularity is reached in forward time.
///
/// Roots are located by a log-spaced bracketing scan followed by bisection to
/// `1e-12` in `s`.
pub fn singular_time(consts: &TwoPeakonConstants, s0: f64) -> Option<f64> {
    let sum = consts.sum();
    if sum == 0.0 || s0 <= 0.0 {
        return None;
    }
    let TwoPeakonConstants { mu1, mu2, alpha, beta, .. } = *consts;
    let big = |s: f64| mu1 * s.powf(alpha) + mu2 * s.powf(beta);
    let small = |s: f64| mu1 * alpha * s.powf(-beta) + mu2 * beta * s.powf(-alpha);

    let bisect = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| -> f64 {
        // lo is closer to s0 in scan order; keep the invariant of a sign change.
        let flo = f(lo);
        for _ in 0..200 {
            if (hi - lo).abs() < 1e-12 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if f(mid) == 0.0 {
                return mid;
            }
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    // Log-spaced scan away from s0 in the direction s moves.
    let steps = 4000;
    let (log_from, log_to) = if sum > 0.0 {
        (s0.ln(), s0.ln() + 20.0)
    } else {
        (s0.ln(), s0.ln() - 30.0)
    };
    let mut first_root: Option<f64> = None;
    let mut prev_s = s0;
    let mut prev_big = big(s0);
    let mut prev_small = small(s0);
    for k in 1..=steps {
        let s = (log_from + (log_to - log_from) * k as f64 / steps as f64).exp();
        let b = big(s);
        let m = small(s);
        if b == 0.0 || (b > 0.0) != (prev_big > 0.0) {
            first_root = Some(bisect(&big, prev_s, s));
            break;
        }
        if m == 0.0 || (m > 0.0) != (prev_small > 0.0) {
            first_root = Some(bisect(&small, prev_s, s));
            break;
        }
        prev_s = s;
        prev_big = b;
        prev_small = m;
    }

    match (first_root, sum > 0.0) {
        (Some(s_star), _) => Some(consts.t_of_s(s_star)),
        // Decreasing s with no denominator zero: s = 0 is reached at finite t.
        (None, false) => Some(consts.t_of_s(0.0)),
        (None, true) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{preset, PresetName};

    const E3: f64 = 20.085536923187668; // e^3

    fn fig1() -> TwoPeakonConstants {
        fit_two_peakon(2.0, 1.0, -3.0, 0.0, 1.0).unwrap()
    }

    fn fig2() -> TwoPeakonConstants {
        fit_two_peakon(1.0, -2.0, -3.0, 0.0, 1.0).unwrap()
    }

    fn fig3() -> TwoPeakonConstants {
        fit_two_peakon(-1.0, 2.0, -3.0, 0.0, 1.0).unwrap()
    }

    fn fig4() -> TwoPeakonConstants {
        fit_two_peakon(-2.0, -1.0, -3.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn traveling_formula() {
        assert_eq!(single_peakon_traveling(1.0, 1.0, 0.0, 0.0), 1.0);
        // Crest height is constant in time.
        for t in [0.0, 1.0, 7.5] {
            let c = 8.0 / 9.0;
            assert_eq!(single_peakon_traveling(c, 1.5, 1.5 * c * t, t), c);
        }
        assert_eq!(single_peakon_traveling(2.0, 1.0, 4.0, 2.0), 2.0);
    }

    #[test]
    fn nontraveling_at_origin() {
        let xq = preset(PresetName::XiaQiao);
        let consts = NonTravelingConstants { a: -1.0, b: 0.0 };
        let v = single_peakon_nontraveling(&consts, &xq, 0.0, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nontraveling_singular_time_refused() {
        let xq = preset(PresetName::XiaQiao);
        let consts = NonTravelingConstants { a: -1.0, b: 0.0 };
        // 2 l1 t - A = t + 1 = 0 at t = -1.
        assert!(matches!(
            single_peakon_nontraveling(&consts, &xq, 0.0, -1.0),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn nontraveling_amplitude_satisfies_riccati() {
        // p(t) = 1/(2 l1 t - A) satisfies p' = -2 l1 p^2.
        let xq = preset(PresetName::XiaQiao);
        let consts = NonTravelingConstants { a: -1.0, b: 0.25 };
        let h = 1e-6;
        for t in [0.0, 0.5, 3.0] {
            let (p, _) = nontraveling_amplitude_crest(&consts, &xq, t).unwrap();
            let (pp, _) = nontraveling_amplitude_crest(&consts, &xq, t + h).unwrap();
            let (pm, _) = nontraveling_amplitude_crest(&consts, &xq, t - h).unwrap();
            let dp = (pp - pm) / (2.0 * h);
            assert!((dp + 2.0 * xq.lambda1 * p * p).abs() < 1e-6);
        }
    }

    #[test]
    fn fit_nontraveling_examples() {
        let xq = preset(PresetName::XiaQiao);
        let c = fit_nontraveling(1.0, 0.0, 0.0, &xq).unwrap();
        assert!((c.a + 1.0).abs() < 1e-15);
        assert!(c.b.abs() < 1e-15);
        let c = fit_nontraveling(-1.0, 0.0, 0.0, &xq).unwrap();
        assert!((c.a - 1.0).abs() < 1e-15);
        assert!(c.b.abs() < 1e-15);
        assert!(fit_nontraveling(0.0, 0.0, 0.0, &xq).is_err());
    }

    #[test]
    fn fit_nontraveling_round_trip() {
        let xq = preset(PresetName::XiaQiao);
        for (p0, q0, t0) in [(0.7, -1.3, 0.2), (-2.5, 4.0, 1.7), (3.0, 0.0, -0.5)] {
            let c = fit_nontraveling(p0, q0, t0, &xq).unwrap();
            let (p, q) = nontraveling_amplitude_crest(&c, &xq, t0).unwrap();
            assert!((p - p0).abs() < 1e-12, "amplitude {p} vs {p0}");
            assert!((q - q0).abs() < 1e-12, "crest {q} vs {q0}");
        }
    }

    #[test]
    fn figure1_constants_match_caption() {
        let c = fig1();
        assert!((c.mu1 - 1.0).abs() < 1e-12);
        assert!((c.mu2 - (-2.0 * (1.0 - 1.0 / E3))).abs() < 1e-12);
        assert!((c.alpha - 2.0 / (E3 + 2.0)).abs() < 1e-12);
        assert!((c.beta - E3 / (E3 + 2.0)).abs() < 1e-12);
        assert!((c.sum() - (1.0 + 2.0 / E3)).abs() < 1e-12);
    }

    #[test]
    fn figure2_constants_match_caption() {
        let c = fig2();
        assert!((c.mu2 - (1.0 / E3 - 1.0) / 3.0).abs() < 1e-12);
        assert!((c.alpha - 1.0 / (1.0 - 2.0 * E3)).abs() < 1e-12);
        assert!((c.beta - 2.0 * E3 / (2.0 * E3 - 1.0)).abs() < 1e-12);
        assert!((c.sum() - (1.0 / E3 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn figure3_and_4_sums_match_captions() {
        assert!((fig3().sum() - (2.0 - 1.0 / E3)).abs() < 1e-12);
        assert!((fig4().sum() - (-1.0 - 2.0 / E3)).abs() < 1e-12);
    }

    #[test]
    fn figure_states_at_unit_shift() {
        let st = two_peakon_state(&fig1(), 1.0).unwrap();
        assert!((st.p[0] - 2.0).abs() < 1e-12);
        assert!((st.p[1] - 1.0).abs() < 1e-12);
        assert!((st.q[0] + 3.0).abs() < 1e-12);
        assert!(st.q[1].abs() < 1e-12);

        let st = two_peakon_state(&fig2(), 1.0).unwrap();
        assert!((st.p[0] - 1.0).abs() < 1e-12);
        assert!((st.p[1] + 2.0).abs() < 1e-12);
        assert!((st.q[0] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn second_crest_tracks_log_s() {
        let c = fig1();
        let st = two_peakon_state(&c, std::f64::consts::E).unwrap();
        assert!((st.q[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fit_round_trip() {
        for (xi1, xi2, eta1, eta2, t0) in [
            (2.0, 1.0, -3.0, 0.0, 1.0),
            (1.0, -2.0, -3.0, 0.0, 1.0),
            (0.4, 0.9, -1.2, 0.7, 0.0),
            (-1.5, 0.3, 0.1, 2.0, -2.0),
        ] {
            let c = fit_two_peakon(xi1, xi2, eta1, eta2, t0).unwrap();
            let s0 = eta2.exp();
            let st = two_peakon_state(&c, s0).unwrap();
            assert!((st.p[0] - xi1).abs() < 1e-12, "p1 {} vs {xi1}", st.p[0]);
            assert!((st.p[1] - xi2).abs() < 1e-12);
            assert!((st.q[0] - eta1).abs() < 1e-12);
            assert!((st.q[1] - eta2).abs() < 1e-12);
            assert!((st.t - t0).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_refuses_degenerate_data() {
        assert!(fit_two_peakon(1.0, 0.0, -1.0, 0.0, 0.0).is_err());
        assert!(fit_two_peakon(0.0, 1.0, -1.0, 0.0, 0.0).is_err());
        assert!(fit_two_peakon(1.0, 1.0, 2.0, 0.0, 0.0).is_err());
        // C1 + C2 = 0: xi1 e^{eta1} = -xi2 e^{eta2}
        assert!(fit_two_peakon(-1.0, 1.0f64.exp().recip(), -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn mu_pair_is_projective() {
        let c = fig1();
        for scale in [2.0, -0.5, 1e3] {
            let scaled = TwoPeakonConstants { mu1: c.mu1 * scale, mu2: c.mu2 * scale, ..c };
            for s in [0.7, 1.0, 1.9] {
                let a = two_peakon_state(&c, s).unwrap();
                let b = two_peakon_state(&scaled, s).unwrap();
                for i in 0..2 {
                    assert!((a.p[i] - b.p[i]).abs() < 1e-12);
                    assert!((a.q[i] - b.q[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn separation_matches_state_difference() {
        for c in [fig1(), fig2(), fig4()] {
            for k in 0..100 {
                let s = 0.6 + 0.008 * k as f64;
                let st = match two_peakon_state(&c, s) {
                    Ok(st) => st,
                    Err(_) => continue,
                };
                let sep = two_peakon_separation(&c, s).unwrap();
                assert!((sep - (st.q[0] - st.q[1])).abs() < 1e-11, "s = {s}");
            }
        }
    }

    #[test]
    fn ode_consistency_with_corollary_system() {
        // d/ds of the closed form matches the Xia-Qiao two-peakon system
        // rescaled by ds/dt = C1 + C2.
        let xq = preset(PresetName::XiaQiao);
        let h = 1e-6;
        for c in [fig1(), fig2(), fig3(), fig4()] {
            for k in 0..20 {
                let s = 0.85 + 0.025 * k as f64;
                let st = two_peakon_state(&c, s).unwrap();
                let plus = two_peakon_state(&c, s + h).unwrap();
                let minus = two_peakon_state(&c, s - h).unwrap();
                let (dp, dq) = crate::peakon_dynamics::rhs(&xq, &st).unwrap();
                for i in 0..2 {
                    let ds_p = (plus.p[i] - minus.p[i]) / (2.0 * h);
                    let ds_q = (plus.q[i] - minus.q[i]) / (2.0 * h);
                    let want_p = dp[i] / c.sum();
                    let want_q = dq[i] / c.sum();
                    let scale_p = want_p.abs().max(1e-3);
                    let scale_q = want_q.abs().max(1e-3);
                    assert!(
                        (ds_p - want_p).abs() / scale_p < 1e-6,
                        "dp{i} at s = {s}: {ds_p} vs {want_p}"
                    );
                    assert!(
                        (ds_q - want_q).abs() / scale_q < 1e-6,
                        "dq{i} at s = {s}: {ds_q} vs {want_q}"
                    );
                }
            }
        }
    }

    #[test]
    fn singular_time_cases() {
        // Figure 1: s grows without bound, no singularity forward in time.
        assert_eq!(singular_time(&fig1(), 1.0), None);

        // Figure 2: s decreases to 0 with no earlier denominator zero.
        let c = fig2();
        let t_star = singular_time(&c, 1.0).unwrap();
        assert!((t_star - c.t_of_s(0.0)).abs() < 1e-9);
        assert!(t_star > 1.0);

        // Figure 4: the mu-denominator has a positive root before s = 0.
        let c = fig4();
        let t_star = singular_time(&c, 1.0).unwrap();
        assert!(t_star < c.t_of_s(0.0));
        let s_star = c.s_of_t(t_star);
        let big = c.mu1 * s_star.powf(c.alpha) + c.mu2 * s_star.powf(c.beta);
        assert!(big.abs() < 1e-9, "denominator at root: {big}");
    }

    #[test]
    fn constants_serialize_with_paper_field_names() {
        let v = serde_json::to_value(fig1()).unwrap();
        for key in ["C1", "C2", "C3", "mu1", "mu2", "alpha", "beta"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
