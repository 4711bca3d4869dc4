//! Acceptance gate: one test per criterion, each printing a single
//! `PASS`/`FAIL` line with the measured value and its pinned tolerance.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use peakon_lab::analysis::{
    besov_32_norm, illposed_pair, riccati_blowup_time, wave_breaking_bound, RiccatiBranch,
};
use peakon_lab::closed_forms::{self, fit_two_peakon};
use peakon_lab::model::{preset, PresetName};
use peakon_lab::pde_solver::{
    compute_momentum, evolve, evolve_with_snapshots, mollify, trace_characteristic, GridField,
    PdeStatus,
};
use peakon_lab::peakon_dynamics::{self, h1_norm_peakon, PeakonState};
use peakon_lab::quadrature;
use peakon_lab::verify::{run_suite, SuiteName};

const E3: f64 = 20.085536923187668; // e^3

fn report(criterion: u32, label: &str, measured: f64, tol: f64, pass: bool) {
    println!(
        "{} criterion {criterion:2} [{label}]: measured {measured:.3e}, tolerance {tol:.1e}",
        if pass { "PASS" } else { "FAIL" },
    );
    assert!(pass, "criterion {criterion} failed: {label} measured {measured:e} vs {tol:e}");
}

fn suite_worst(name: SuiteName) -> (f64, f64, bool) {
    // Worst margin across the suite's checks: max of measured/threshold for
    // "below" checks, threshold/measured for "above" checks. Pass when every
    // check passes.
    let rep = run_suite(name).unwrap();
    let mut worst_ratio = 0.0f64;
    let mut worst = (0.0, 1.0);
    for c in &rep.checks {
        let ratio = if c.measured <= c.threshold {
            c.measured / c.threshold
        } else {
            c.threshold / c.measured
        };
        // For contrast checks passing means measured > threshold; invert.
        let ratio = if c.pass { ratio.abs() } else { 2.0 + ratio.abs() };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst = (c.measured, c.threshold);
        }
    }
    (worst.0, worst.1, rep.passed())
}

/// 1. The four figure-caption constant sets are reproduced to 1e-12.
#[test]
fn criterion_01_figure_caption_constants() {
    let cases = [
        // (xi1, xi2, [mu2, alpha, beta, C1+C2])
        (
            2.0,
            1.0,
            vec![
                -2.0 * (1.0 - 1.0 / E3),
                2.0 / (E3 + 2.0),
                E3 / (E3 + 2.0),
                1.0 + 2.0 / E3,
            ],
        ),
        (
            1.0,
            -2.0,
            vec![
                (1.0 / E3 - 1.0) / 3.0,
                1.0 / (1.0 - 2.0 * E3),
                2.0 * E3 / (2.0 * E3 - 1.0),
                1.0 / E3 - 2.0,
            ],
        ),
        // Negating both amplitudes fixes mu2, alpha, beta and negates the
        // total momentum; the third and fourth sets mirror the second and
        // first.
        (
            -1.0,
            2.0,
            vec![
                (1.0 / E3 - 1.0) / 3.0,
                1.0 / (1.0 - 2.0 * E3),
                2.0 * E3 / (2.0 * E3 - 1.0),
                2.0 - 1.0 / E3,
            ],
        ),
        (
            -2.0,
            -1.0,
            vec![
                -2.0 * (1.0 - 1.0 / E3),
                2.0 / (E3 + 2.0),
                E3 / (E3 + 2.0),
                -1.0 - 2.0 / E3,
            ],
        ),
    ];
    let mut worst = 0.0f64;
    for (xi1, xi2, want) in &cases {
        let c = fit_two_peakon(*xi1, *xi2, -3.0, 0.0, 1.0).unwrap();
        let got = [c.mu2 / c.mu1, c.alpha, c.beta, c.sum()];
        for (g, w) in got.iter().zip(want) {
            worst = worst.max((g - w).abs());
        }
    }
    report(1, "figure caption constants", worst, 1e-12, worst < 1e-12);
}

/// 2. Both convolution identities match adaptive quadrature at 200 random
///    (qi, qj, x) triples, absolute error < 1e-9.
#[test]
fn criterion_02_convolution_identities_vs_quadrature() {
    let (m, t, pass) = suite_worst(SuiteName::Lemma1Quadrature);
    report(2, "convolution identities vs quadrature", m, t, pass);
}

/// 3. Residual < 1e-9 with exact rates for every preset; breaking any one
///    admissibility condition by 0.1 raises the residual above 1e-3.
#[test]
fn criterion_03_residual_contrast() {
    let (m, t, pass) = suite_worst(SuiteName::Theorem1Residual);
    report(3, "ansatz residual and contrast", m, t, pass);
}

/// 4. Adaptive ODE integration matches the exact two-peakon family over
///    s in [1, 3] for all four figure constant sets (max deviation < 1e-6)
///    and the non-traveling single peakon to 1e-8.
#[test]
fn criterion_04_ode_vs_closed_form() {
    let (m, t, pass) = suite_worst(SuiteName::OdeVsClosedform);
    report(4, "ODE vs closed forms", m, t, pass);
}

/// 5. H^1 conservation: relative drift < 1e-8 for a 3-peakon ODE run over
///    [0, 5], and < 1e-6 for a PDE run with mollified peakon data at n = 4096.
#[test]
fn criterion_05_h1_conservation() {
    let ch = preset(PresetName::CamassaHolm);
    let state0 =
        PeakonState::new(vec![0.9, 0.4, 0.7], vec![-4.0, -0.5, 3.0], 0.0).unwrap();
    let h0 = h1_norm_peakon(&state0);
    let traj = peakon_dynamics::integrate(&ch, &state0, 5.0, 1e-10, 1e-12).unwrap();
    let ode_drift = traj
        .snapshots
        .iter()
        .map(|s| (h1_norm_peakon(s) - h0).abs() / h0)
        .fold(0.0, f64::max);

    let field0 = mollify(
        &GridField::from_fn(40.0, 4096, 0.0, |x| (-x.abs()).exp()).unwrap(),
        0.25,
    )
    .unwrap();
    let dt = 0.2 * field0.dx();
    let out = evolve(&ch, &field0, 1.0, dt).unwrap();
    assert_eq!(out.status, PdeStatus::ReachedTEnd);
    let h0 = out.monitors.records[0].h1_norm;
    let pde_drift = out
        .monitors
        .records
        .iter()
        .map(|r| (r.h1_norm - h0).abs() / h0)
        .fold(0.0, f64::max);

    let pass = ode_drift < 1e-8 && pde_drift < 1e-6;
    report(5, "H1 conservation (ODE and PDE)", ode_drift.max(pde_drift), 1e-6, pass);
}

/// Numerical blow-up time of the equality ODE y' = C y^2 - K from y0,
/// integrated in the regular variable z = 1/y (z' = -(C - K z^2), blow-up
/// when z crosses 0) with fixed-step RK4 and linear root interpolation.
fn riccati_equality_blowup(c: f64, k: f64, y0: f64) -> f64 {
    let f = |z: f64| -(c - k * z * z);
    let mut z = 1.0 / y0;
    let mut t = 0.0;
    let h = 1e-6 * (1.0 / (c * y0)).min(1.0);
    loop {
        let k1 = f(z);
        let k2 = f(z + 0.5 * h * k1);
        let k3 = f(z + 0.5 * h * k2);
        let k4 = f(z + h * k3);
        let zn = z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if zn <= 0.0 {
            return t + h * z / (z - zn);
        }
        z = zn;
        t += h;
    }
}

/// 6. Riccati bound sharpness: on 20 random (C, K, y0) with y0 above
///    threshold, the equality ODE blows up within 1e-4 of the bound; the
///    mirrored branch agrees likewise.
#[test]
fn criterion_06_riccati_sharpness() {
    // Deterministic spread of parameters; y0 clears sqrt(K/C) by 1.2x-4x.
    let mut worst = 0.0f64;
    for i in 0..20 {
        let c = 0.3 + 0.17 * i as f64;
        let k = if i % 5 == 0 { 0.0 } else { 0.05 + 0.21 * i as f64 };
        let y0 = (k / c).sqrt().max(0.4) * (1.2 + 0.14 * i as f64);
        let bound = riccati_blowup_time(c, k, y0, RiccatiBranch::Lower)
            .unwrap()
            .expect("datum above threshold");
        let numeric = riccati_equality_blowup(c, k, y0);
        worst = worst.max((numeric - bound).abs());
        // Mirror: y' <= -C y^2 + K from -y0 blows down at the same time.
        let mirror = riccati_blowup_time(c, k, -y0, RiccatiBranch::Upper)
            .unwrap()
            .expect("mirrored datum below threshold");
        worst = worst.max((mirror - bound).abs());
    }
    report(6, "Riccati bound sharpness", worst, 1e-4, worst < 1e-4);
}

/// 7. Wave-breaking coherence: steep antisymmetric data yields a certificate
///    and the PDE halts on slope blow-up no later than the certified time;
///    data missing the criterion by a factor 2 yields no certificate.
#[test]
fn criterion_07_wave_breaking_bound() {
    let ch = preset(PresetName::CamassaHolm);
    let (a, w) = (10.0, 0.2);
    let u0 = |x: f64| -a * x * (-(x / w) * (x / w)).exp();
    let h1 = quadrature::integrate(
        |x: f64| {
            let u = u0(x);
            let ux = -a * (1.0 - 2.0 * x * x / (w * w)) * (-(x / w) * (x / w)).exp();
            u * u + ux * ux
        },
        -20.0,
        20.0,
        1e-12,
        1e-12,
    )
    .sqrt();
    let cert = wave_breaking_bound(&ch, h1, -a, a)
        .unwrap()
        .expect("steep data must certify breaking");

    // The certificate upper-bounds the breaking time. On a finite grid the
    // dealiased scheme saturates the slope at the resolvable limit instead of
    // producing non-finite values, so breaking is read off the monitors as
    // slope runaway (3x the initial max slope) with the amplitude staying
    // bounded -- the bounded-u / unbounded-slope signature.
    let field0 = GridField::from_fn(10.0, 4096, 0.0, u0).unwrap();
    let dt = 0.1 * field0.dx();
    let out = evolve(&ch, &field0, cert.bound, dt).unwrap();
    let ux0 = out.monitors.records[0].linf_ux;
    let halt_t = out
        .monitors
        .records
        .iter()
        .find(|r| r.linf_ux >= 3.0 * ux0)
        .map(|r| r.t)
        .unwrap_or(f64::INFINITY);
    let amp_bounded = out.monitors.records.iter().all(|r| r.linf_u <= h1);
    let halted = halt_t <= cert.bound && amp_bounded;

    // Factor-2 margin on the shallow side: slope functional extremum at half
    // the breaking threshold sqrt(2) ||u0||_{H^1}.
    let shallow = 0.5 * 2.0f64.sqrt() * h1;
    let refused = wave_breaking_bound(&ch, h1, -shallow, shallow).unwrap().is_none();

    let pass = halted && halt_t <= cert.bound && refused;
    report(7, "wave-breaking certificate vs PDE halt", halt_t, cert.bound, pass);
}

/// 8. Critical Besov norm formula on the co-located difference, and the
///    norm-inflation pair: initial distance decreasing in q toward 0 while
///    the time-T separation bound stays 1/(2 lambda1^2).
#[test]
fn criterion_08_besov_and_illposedness() {
    let (c1, c2) = (0.6, 1.7);
    let st = PeakonState::new(vec![c2, -c1], vec![0.0, 0.0], 0.0).unwrap();
    let b = besov_32_norm(&st, 16).unwrap();
    let exact_sq = 8.0 * (c2 - c1) * (c2 - c1) * (1.0 + 2.0f64.sqrt()).ln();
    let rel = (b.norm * b.norm - exact_sq).abs() / exact_sq;

    let (l1, l2, t) = (0.5, 1.0, 1.0);
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut bound_ok = true;
    for q in [8u32, 10, 12, 14, 16] {
        let pair = illposed_pair(l1, l2, t, q).unwrap();
        monotone &= pair.initial_distance < prev;
        prev = pair.initial_distance;
        bound_ok &=
            (pair.final_separation_lower_bound - 1.0 / (2.0 * l1 * l1)).abs() < 1e-12;
    }
    let shrinks = prev < 1e-3;
    let pass = rel < 1e-6 && monotone && shrinks && bound_ok;
    report(8, "Besov formula and norm inflation", rel, 1e-6, pass);
}

fn dp_peakon_l2_error(n: usize) -> f64 {
    let dp = preset(PresetName::DegasperisProcesi);
    let l = 40.0;
    let field0 = GridField::from_fn(l, n, 0.0, |x| (-x.abs()).exp()).unwrap();
    let dt = 0.25 * field0.dx();
    let out = evolve(&dp, &field0, 1.0, dt).unwrap();
    assert_eq!(out.status, PdeStatus::ReachedTEnd);
    let coords = out.field.coords();
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, u) in coords.iter().zip(&out.field.values) {
        let exact = closed_forms::single_peakon_traveling(1.0, dp.lambda2, *x, 1.0);
        num += (u - exact) * (u - exact);
        den += exact * exact;
    }
    (num / den).sqrt()
}

/// 9. Traveling-peakon fidelity: unit-speed peakon under the b = 3 preset,
///    L = 40, n = 4096, t = 1: relative L^2 error < 5e-2, and the error
///    halves (ratio < 0.6) when n doubles.
#[test]
fn criterion_09_pde_traveling_peakon() {
    let e4096 = dp_peakon_l2_error(4096);
    let e8192 = dp_peakon_l2_error(8192);
    let ratio = e8192 / e4096;
    let pass = e4096 < 5e-2 && ratio < 0.6;
    report(9, "traveling peakon PDE fidelity", e4096, 5e-2, pass);
}

/// 10. Characteristics invariant: smooth-data run, 8 characteristics,
///     relative invariant drift < 1e-4 over [0, 1]; the momentum along each
///     path stays above -1e-6 max|m0|.
#[test]
fn criterion_10_characteristics_invariant() {
    let ch = preset(PresetName::CamassaHolm);
    let field0 = mollify(
        &GridField::from_fn(40.0, 4096, 0.0, |x| (-x.abs()).exp()).unwrap(),
        0.5,
    )
    .unwrap();
    let dt = 0.25 * field0.dx();
    let out = evolve_with_snapshots(&ch, &field0, 1.0, dt, 1).unwrap();
    assert_eq!(out.status, PdeStatus::ReachedTEnd);

    let m0 = compute_momentum(&field0).unwrap();
    let m0_max = m0.values.iter().cloned().fold(0.0, f64::max);

    let mut worst_drift = 0.0f64;
    let mut m_min = f64::INFINITY;
    // Seed the characteristics where the momentum is well above roundoff so
    // the relative drift of the invariant is meaningful.
    for k in 0..8 {
        let x0 = -1.4 + 0.4 * k as f64;
        let trace = trace_characteristic(&ch, &out.snapshots, x0).unwrap();
        worst_drift = worst_drift.max(trace.invariant_drift());
        m_min = m_min.min(trace.min_momentum());
    }
    let pass = worst_drift < 1e-4 && m_min > -1e-6 * m0_max;
    report(10, "characteristics invariant drift", worst_drift, 1e-4, pass);
}
