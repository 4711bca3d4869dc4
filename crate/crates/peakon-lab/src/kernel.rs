//! Helmholtz-kernel convolution in two regimes: exact closed-form identities
//! for peakon superpositions, and the spectral multiplier `1/(1 + xi^2)` for
//! periodic grid fields.

use crate::grid::SpectralOps;
use crate::model::LambdaParams;
use crate::peakon_dynamics::PeakonState;
use crate::pde_solver::GridField;
use crate::Error;

/// Guard band around a peak position inside which pointwise ansatz
/// derivatives are refused.
pub const PEAK_GUARD: f64 = 1e-14;

/// Sign convention used throughout: `sgn(0) = 0`, so sigma terms vanish
/// exactly at a peak and self-pairs carry no sign weight.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Closed expansion over the function basis generated by a peakon pair
/// `(i, j)`:
///
/// ```text
/// [ Ei Ej, Ei, Ej, si Ei Ej, sj Ei Ej, si Ei, sj Ej, si sj Ei Ej ]
/// ```
///
/// with `El = exp(-|x - q_l|)` and `sl = sgn(x - q_l)`. The basis is closed
/// under convolution with `G` and under differentiation away from the peaks,
/// which is what makes the exact peakon calculus possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakonTermBasis {
    pub i: usize,
    pub j: usize,
    pub qi: f64,
    pub qj: f64,
    /// Coefficients in the basis order documented above.
    pub coef: [f64; 8],
}

impl PeakonTermBasis {
    fn zero(i: usize, j: usize, qi: f64, qj: f64) -> Self {
        Self { i, j, qi, qj, coef: [0.0; 8] }
    }

    /// Pointwise value. Continuous in x between peak positions; the sigma
    /// factors switch sign across `qi` and `qj`.
    pub fn eval(&self, x: f64) -> f64 {
        let ei = (-(x - self.qi).abs()).exp();
        let ej = (-(x - self.qj).abs()).exp();
        let si = sgn(x - self.qi);
        let sj = sgn(x - self.qj);
        let c = &self.coef;
        c[0] * ei * ej
            + c[1] * ei
            + c[2] * ej
            + c[3] * si * ei * ej
            + c[4] * sj * ei * ej
            + c[5] * si * ei
            + c[6] * sj * ej
            + c[7] * si * sj * ei * ej
    }

    /// Derivative expansion, valid off the peaks (`si^2 = sj^2 = 1` there).
    pub fn derivative(&self) -> Self {
        let c = &self.coef;
        let mut d = [0.0; 8];
        // d(Ei Ej) = -(si + sj) Ei Ej
        d[3] -= c[0];
        d[4] -= c[0];
        // d(Ei) = -si Ei, d(Ej) = -sj Ej
        d[5] -= c[1];
        d[6] -= c[2];
        // d(si Ei Ej) = -Ei Ej - si sj Ei Ej, same for sj Ei Ej
        d[0] -= c[3] + c[4];
        d[7] -= c[3] + c[4];
        // d(si Ei) = -Ei, d(sj Ej) = -Ej
        d[1] -= c[5];
        d[2] -= c[6];
        // d(si sj Ei Ej) = -(si + sj) si sj Ei Ej = -sj Ei Ej - si Ei Ej
        d[3] -= c[7];
        d[4] -= c[7];
        Self { coef: d, ..*self }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut coef = self.coef;
        for c in &mut coef {
            *c *= a;
        }
        Self { coef, ..*self }
    }

    /// Sum of two expansions over the same pair.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.qi, self.qj), (other.qi, other.qj));
        let mut coef = self.coef;
        for (c, o) in coef.iter_mut().zip(other.coef) {
            *c += o;
        }
        Self { coef, ..*self }
    }
}

/// Exact convolution of `G` with the pair product `Ei Ej`
/// (`with_sign_pair = false`) or `si sj Ei Ej` (`with_sign_pair = true`):
///
/// ```text
/// G*(Ei Ej)       = 1/3 (-Ei Ej + Eij Ei + Eij Ej)
///                 + 2 sij / 3 (sj Ei Ej - si Ei Ej + Eij si Ei - Eij sj Ej)
/// G*(si sj Ei Ej) = 1/3 (-Ei Ej + Eij Ei + Eij Ej)
///                 -   sij / 3 (sj Ei Ej - si Ei Ej + Eij si Ei - Eij sj Ej)
/// ```
///
/// with `Eij = exp(-|qi - qj|)` and `sij = sgn(qi - qj)`. For `i = j` both
/// reduce to `G*(Ei^2) = 1/3 (-Ei^2 + 2 Ei)`.
pub fn convolve_peakon_product(
    i: usize,
    j: usize,
    state: &PeakonState,
    with_sign_pair: bool,
) -> crate::Result<PeakonTermBasis> {
    let n = state.len();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, len: n });
        }
    }
    let (qi, qj) = (state.q[i], state.q[j]);
    let eij = (-(qi - qj).abs()).exp();
    let sij = sgn(qi - qj);

    let mut out = PeakonTermBasis::zero(i, j, qi, qj);
    // Shared symmetric part.
    out.coef[0] += -1.0 / 3.0;
    out.coef[1] += eij / 3.0;
    out.coef[2] += eij / 3.0;
    // Sign-weighted bracket, weight 2 sij / 3 or -sij / 3.
    let w = if with_sign_pair { -sij / 3.0 } else { 2.0 * sij / 3.0 };
    out.coef[4] += w;
    out.coef[3] -= w;
    out.coef[5] += w * eij;
    out.coef[6] -= w * eij;
    Ok(out)
}

/// Value of the two nonlocal terms of the evolution equation,
/// `G*(l3 u^2 + l4 u_x^2) + dx G*(l5 u^2 + l6 u_x^2)`, for the peakon
/// superposition `u = sum_i p_i Ei`, assembled pair by pair from the exact
/// convolution identities.
///
/// The point must be off-peak: the ansatz derivative is undefined at the
/// crests.
pub fn eval_nonlocal_terms(
    params: &LambdaParams,
    state: &PeakonState,
    x: f64,
) -> crate::Result<f64> {
    for &q in &state.q {
        if (x - q).abs() <= PEAK_GUARD {
            return Err(Error::EvaluationAtPeak { x, q, guard: PEAK_GUARD });
        }
    }
    let mut total = 0.0;
    for i in 0..state.len() {
        for j in 0..state.len() {
            let pp = state.p[i] * state.p[j];
            if pp == 0.0 {
                continue;
            }
            let conv_sq = convolve_peakon_product(i, j, state, false)?;
            let conv_dsq = convolve_peakon_product(i, j, state, true)?;
            let smooth = conv_sq
                .scaled(params.lambda3)
                .add(&conv_dsq.scaled(params.lambda4));
            let fluxed = conv_sq
                .scaled(params.lambda5)
                .add(&conv_dsq.scaled(params.lambda6))
                .derivative();
            total += pp * (smooth.eval(x) + fluxed.eval(x));
        }
    }
    Ok(total)
}

/// Inverse Helmholtz operator on a periodic grid field: divides every
/// discrete Fourier coefficient by `1 + xi_k^2`.
pub fn helmholtz_convolve_grid(field: &GridField) -> crate::Result<GridField> {
    field.validate()?;
    let ops = SpectralOps::new(field.n, field.l);
    let values = ops.helmholtz(&field.values);
    Ok(GridField { values, ..field.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_line;

    fn state(p: &[f64], q: &[f64]) -> PeakonState {
        PeakonState::new(p.to_vec(), q.to_vec(), 0.0).unwrap()
    }

    /// Quadrature oracle for G * (Ei Ej) and G * (si sj Ei Ej).
    fn conv_oracle(qi: f64, qj: f64, x: f64, with_sign_pair: bool) -> f64 {
        integrate_line(
            |y: f64| {
                let g = 0.5 * (-(x - y).abs()).exp();
                let prod = (-(y - qi).abs()).exp() * (-(y - qj).abs()).exp();
                let s = if with_sign_pair {
                    sgn(y - qi) * sgn(y - qj)
                } else {
                    1.0
                };
                g * s * prod
            },
            &[x, qi, qj],
            1e-12,
            1e-12,
        )
    }

    #[test]
    fn self_pair_at_crest_is_one_third() {
        let st = state(&[1.0], &[0.0]);
        let b = convolve_peakon_product(0, 0, &st, false).unwrap();
        assert!((b.eval(0.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn decays_at_infinity() {
        let st = state(&[1.0], &[0.0]);
        let b = convolve_peakon_product(0, 0, &st, false).unwrap();
        assert!(b.eval(80.0).abs() < 1e-30);
        assert!(b.eval(-80.0).abs() < 1e-30);
    }

    #[test]
    fn matches_quadrature_for_distinct_pair() {
        let st = state(&[1.0, 1.0], &[0.0, 1.0]);
        let b = convolve_peakon_product(0, 1, &st, false).unwrap();
        let oracle = conv_oracle(0.0, 1.0, 2.0, false);
        assert!((b.eval(2.0) - oracle).abs() < 1e-10, "{} vs {}", b.eval(2.0), oracle);
    }

    #[test]
    fn sign_pair_matches_quadrature() {
        let st = state(&[1.0, 1.0], &[-0.7, 1.3]);
        for &x in &[-2.0, -0.2, 0.5, 2.4, 6.0] {
            let b = convolve_peakon_product(0, 1, &st, true).unwrap();
            let oracle = conv_oracle(-0.7, 1.3, x, true);
            assert!((b.eval(x) - oracle).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn pair_symmetry() {
        let st = state(&[1.0, 1.0], &[-1.2, 0.4]);
        for &x in &[-3.0, -0.5, 0.1, 2.0] {
            for &sp in &[false, true] {
                let bij = convolve_peakon_product(0, 1, &st, sp).unwrap();
                let bji = convolve_peakon_product(1, 0, &st, sp).unwrap();
                assert!((bij.eval(x) - bji.eval(x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn index_out_of_range() {
        let st = state(&[1.0], &[0.0]);
        assert!(matches!(
            convolve_peakon_product(0, 1, &st, false),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let st = state(&[1.0, 1.0], &[0.0, 1.0]);
        let b = convolve_peakon_product(0, 1, &st, false).unwrap();
        let d = b.derivative();
        let h = 1e-6;
        for &x in &[-2.0, 0.5, 3.0] {
            let fd = (b.eval(x + h) - b.eval(x - h)) / (2.0 * h);
            assert!((d.eval(x) - fd).abs() < 1e-7, "x = {x}");
        }
    }

    /// Quadrature oracle for the full nonlocal terms of the equation.
    fn nonlocal_oracle(params: &LambdaParams, st: &PeakonState, x: f64) -> f64 {
        let u = |y: f64| st.field_eval(y);
        let ux = |y: f64| -> f64 {
            st.p
                .iter()
                .zip(&st.q)
                .map(|(&p, &q)| -p * sgn(y - q) * (-(y - q).abs()).exp())
                .sum()
        };
        let mut centers = st.q.clone();
        centers.push(x);
        let smooth = integrate_line(
            |y| {
                0.5 * (-(x - y).abs()).exp()
                    * (params.lambda3 * u(y).powi(2) + params.lambda4 * ux(y).powi(2))
            },
            &centers,
            1e-12,
            1e-12,
        );
        let fluxed = integrate_line(
            |y| {
                -0.5 * sgn(x - y) * (-(x - y).abs()).exp()
                    * (params.lambda5 * u(y).powi(2) + params.lambda6 * ux(y).powi(2))
            },
            &centers,
            1e-12,
            1e-12,
        );
        smooth + fluxed
    }

    #[test]
    fn nonlocal_terms_single_peakon_vs_quadrature() {
        let params = crate::model::preset(crate::model::PresetName::CamassaHolm);
        let st = state(&[1.0], &[0.0]);
        let v = eval_nonlocal_terms(&params, &st, 1.0).unwrap();
        let oracle = nonlocal_oracle(&params, &st, 1.0);
        assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
    }

    #[test]
    fn nonlocal_terms_two_peakons_vs_quadrature() {
        let params = crate::model::preset(crate::model::PresetName::XiaQiao);
        let st = state(&[2.0, 1.0], &[-3.0, 0.0]);
        for &x in &[-4.0, -1.0, 1.0, 2.5] {
            let v = eval_nonlocal_terms(&params, &st, x).unwrap();
            let oracle = nonlocal_oracle(&params, &st, x);
            assert!((v - oracle).abs() < 1e-9, "x = {x}: {v} vs {oracle}");
        }
    }

    #[test]
    fn nonlocal_terms_empty_state() {
        let params = crate::model::preset(crate::model::PresetName::CamassaHolm);
        let st = state(&[], &[]);
        assert_eq!(eval_nonlocal_terms(&params, &st, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn nonlocal_terms_refuses_on_peak() {
        let params = crate::model::preset(crate::model::PresetName::CamassaHolm);
        let st = state(&[1.0], &[0.5]);
        assert!(matches!(
            eval_nonlocal_terms(&params, &st, 0.5),
            Err(Error::EvaluationAtPeak { .. })
        ));
    }
}
