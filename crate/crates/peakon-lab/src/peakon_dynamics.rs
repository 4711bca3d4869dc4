//! The N-peakon ODE reduction: right-hand side, adaptive integration with
//! event detection, field evaluation, pointwise residual verification and the
//! closed-form H^1 norm.

use serde::{Deserialize, Serialize};

use crate::kernel::{self, sgn};
use crate::model::{self, LambdaParams};
use crate::Error;

/// Amplitude magnitude beyond which a trajectory is declared blown up.
/// Closed forms show amplitudes growing like `1/(s - s*)` near a collision,
/// so this threshold localizes the singular time to roughly `1e-12 / |ds/dt|`.
pub const BLOWUP_AMPLITUDE: f64 = 1e12;

/// Crest distance below which two approaching peakons with growing
/// amplitudes count as collided. The ODE system is not defined through a
/// crossing.
pub const COLLISION_TOL: f64 = 1e-10;

/// Amplitudes `p`, positions `q` and the current time of the ODE reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakonState {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub t: f64,
}

impl PeakonState {
    pub fn new(p: Vec<f64>, q: Vec<f64>, t: f64) -> crate::Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DegenerateData(format!(
                "amplitude/position length mismatch: {} vs {}",
                p.len(),
                q.len()
            )));
        }
        if p.iter().chain(q.iter()).any(|v| !v.is_finite()) || !t.is_finite() {
            return Err(Error::NonFinite("peakon state entries".into()));
        }
        Ok(Self { p, q, t })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Superposition value `sum_i p_i exp(-|x - q_i|)`.
    pub fn field_eval(&self, x: f64) -> f64 {
        self.p
            .iter()
            .zip(&self.q)
            .map(|(&p, &q)| p * (-(x - q).abs()).exp())
            .sum()
    }

    /// Slope of the superposition, valid off the crests.
    pub fn slope_eval(&self, x: f64) -> f64 {
        self.p
            .iter()
            .zip(&self.q)
            .map(|(&p, &q)| -p * sgn(x - q) * (-(x - q).abs()).exp())
            .sum()
    }
}

/// Free-function spelling of [`PeakonState::field_eval`].
pub fn peakon_field_eval(state: &PeakonState, x: f64) -> f64 {
    state.field_eval(x)
}

/// Closed-form `H^1` norm of the superposition,
/// `||u||_{H1}^2 = 2 sum_{i,j} p_i p_j exp(-|q_i - q_j|)`.
pub fn h1_norm_peakon(state: &PeakonState) -> f64 {
    let mut sq = 0.0;
    for i in 0..state.len() {
        for j in 0..state.len() {
            sq += state.p[i] * state.p[j] * (-(state.q[i] - state.q[j]).abs()).exp();
        }
    }
    (2.0 * sq).max(0.0).sqrt()
}

/// Right-hand side of the peakon system
///
/// ```text
/// p_i' = 2 sum_j ((2 l5 - l6)/3 sij - l1) p_i p_j Eij
/// q_i' = 2 sum_j (l5 + l6)/3 p_j Eij
/// ```
///
/// with `sii = 0` and `Eii = 1`. Refuses non-admissible coefficients: outside
/// the admissibility relations the ansatz does not solve the PDE, so the
/// system below would integrate something meaningless.
pub fn rhs(params: &LambdaParams, state: &PeakonState) -> crate::Result<(Vec<f64>, Vec<f64>)> {
    if let Some(condition) = model::admissibility_violation(params) {
        return Err(Error::NotAdmissible { condition });
    }
    let n = state.len();
    let amp_coef = (2.0 * params.lambda5 - params.lambda6) / 3.0;
    let pos_coef = (params.lambda5 + params.lambda6) / 3.0;
    let mut dp = vec![0.0; n];
    let mut dq = vec![0.0; n];
    for i in 0..n {
        let mut dpi = 0.0;
        let mut dqi = 0.0;
        for j in 0..n {
            let eij = (-(state.q[i] - state.q[j]).abs()).exp();
            let sij = sgn(state.q[i] - state.q[j]);
            dpi += (amp_coef * sij - params.lambda1) * state.p[i] * state.p[j] * eij;
            dqi += pos_coef * state.p[j] * eij;
        }
        dp[i] = 2.0 * dpi;
        dq[i] = 2.0 * dqi;
    }
    Ok((dp, dq))
}

/// Pointwise residual of the evolution equation at `x`, with `u_t` computed
/// from the supplied rates through the ansatz chain rule. Near zero exactly
/// when the rates come from [`rhs`] and the coefficients are admissible.
pub fn peakon_residual(
    params: &LambdaParams,
    state: &PeakonState,
    rates: (&[f64], &[f64]),
    x: f64,
) -> crate::Result<f64> {
    let (dp, dq) = rates;
    let nonlocal = kernel::eval_nonlocal_terms(params, state, x)?;
    let mut u_t = 0.0;
    for i in 0..state.len() {
        let e = (-(x - state.q[i]).abs()).exp();
        let s = sgn(x - state.q[i]);
        u_t += dp[i] * e + state.p[i] * s * e * dq[i];
    }
    let u = state.field_eval(x);
    let ux = state.slope_eval(x);
    Ok(u_t + params.lambda1 * u * u + params.lambda2 * u * ux + nonlocal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationStatus {
    ReachedTEnd,
    BlowUpDetected,
    CollisionDetected,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    BlowUp,
    Collision,
    StepUnderflow,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub indices: Vec<usize>,
}

/// Time-ordered snapshots plus the reason integration stopped.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<PeakonState>,
    pub status: TerminationStatus,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn initial(&self) -> &PeakonState {
        self.snapshots.first().expect("trajectory has a first snapshot")
    }

    pub fn last(&self) -> &PeakonState {
        self.snapshots.last().expect("trajectory has a last snapshot")
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive integration of the peakon system from `state0.t` to `t_end`,
/// recording snapshots exactly at `output_times` (strictly increasing, all in
/// `(t0, t_end]`). The initial state is always the first snapshot.
///
/// Embedded Dormand-Prince 5(4) with a PI step controller; steps are clamped
/// so output times are hit exactly. Halts early on amplitude overflow, step
/// underflow, or a peakon collision.
pub fn integrate_with_output(
    params: &LambdaParams,
    state0: &PeakonState,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    output_times: &[f64],
) -> crate::Result<Trajectory> {
    for (name, tol) in [("rel_tol", rel_tol), ("abs_tol", abs_tol)] {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidTolerance(format!("{name} = {tol} not in (0, 1)")));
        }
    }
    if !(t_end > state0.t) {
        return Err(Error::InvalidTolerance(format!(
            "t_end = {t_end} must exceed initial time {}",
            state0.t
        )));
    }
    if output_times.windows(2).any(|w| w[0] >= w[1])
        || output_times.iter().any(|&t| t <= state0.t || t > t_end)
    {
        return Err(Error::InvalidTolerance(
            "output times must be strictly increasing inside (t0, t_end]".into(),
        ));
    }

    let n = state0.len();
    let dim = 2 * n;
    let pack = |s: &PeakonState| -> Vec<f64> {
        s.p.iter().chain(s.q.iter()).cloned().collect()
    };
    let unpack = |y: &[f64], t: f64| PeakonState {
        p: y[..n].to_vec(),
        q: y[n..].to_vec(),
        t,
    };
    let f = |y: &[f64]| -> crate::Result<Vec<f64>> {
        let st = unpack(y, 0.0);
        let (dp, dq) = rhs(params, &st)?;
        Ok(dp.into_iter().chain(dq).collect())
    };

    let mut snapshots = vec![state0.clone()];
    let mut events = Vec::new();
    let mut t = state0.t;
    let mut y = pack(state0);
    let mut k1 = f(&y)?;
    let mut h = ((t_end - t) / 100.0).min(0.1).max(1e-8);
    let mut err_prev: f64 = 1.0;
    let mut next_out = 0usize;
    let mut prev_abs_p: Vec<f64> = y[..n].iter().map(|p| p.abs()).collect();

    let mut status = TerminationStatus::ReachedTEnd;

    'outer: while t < t_end {
        // Clamp the step to the next output time and the horizon.
        let mut target = t_end;
        if next_out < output_times.len() {
            target = target.min(output_times[next_out]);
        }
        if t + h > target {
            h = target - t;
        }

        // Stage evaluations.
        let mut ks: Vec<Vec<f64>> = Vec::with_capacity(7);
        ks.push(k1.clone());
        for (si, row) in A.iter().enumerate() {
            let mut ys = y.clone();
            for (d, yv) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (ki, &a) in ks.iter().zip(row.iter().take(si + 1)) {
                    acc += a * ki[d];
                }
                *yv += h * acc;
            }
            ks.push(f(&ys)?);
        }
        // Fifth-order solution uses the last A row (FSAL form).
        let mut y5 = y.clone();
        let mut y4 = y.clone();
        for d in 0..dim {
            let mut acc5 = 0.0;
            for (ki, &a) in ks.iter().zip(A[5].iter()) {
                acc5 += a * ki[d];
            }
            y5[d] += h * acc5;
            let mut acc4 = 0.0;
            for (ki, &b) in ks.iter().zip(B4.iter()) {
                acc4 += b * ki[d];
            }
            y4[d] += h * acc4;
        }

        // Weighted RMS error norm.
        let mut err = 0.0;
        for d in 0..dim {
            let sc = abs_tol + rel_tol * y[d].abs().max(y5[d].abs());
            let e = (y5[d] - y4[d]) / sc;
            err += e * e;
        }
        err = (err / dim as f64).sqrt().max(1e-30);

        if err <= 1.0 || !err.is_finite() {
            if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
                // Overflow inside the step: treat as blow-up at the step start.
                events.push(Event { kind: EventKind::BlowUp, t, indices: vec![] });
                status = TerminationStatus::BlowUpDetected;
                break 'outer;
            }
            // Accept.
            t += h;
            y = y5;
            k1 = ks.pop().expect("seven stages");

            // Events.
            let max_p = y[..n].iter().fold(0.0f64, |m, p| m.max(p.abs()));
            if max_p > BLOWUP_AMPLITUDE {
                let idx = (0..n).filter(|&i| y[i].abs() > BLOWUP_AMPLITUDE).collect();
                events.push(Event { kind: EventKind::BlowUp, t, indices: idx });
                status = TerminationStatus::BlowUpDetected;
                snapshots.push(unpack(&y, t));
                break 'outer;
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let growing = y[i].abs() + y[j].abs()
                        > prev_abs_p[i] + prev_abs_p[j] + COLLISION_TOL;
                    if (y[n + i] - y[n + j]).abs() < COLLISION_TOL && growing {
                        events.push(Event {
                            kind: EventKind::Collision,
                            t,
                            indices: vec![i, j],
                        });
                        status = TerminationStatus::CollisionDetected;
                        snapshots.push(unpack(&y, t));
                        break 'outer;
                    }
                }
            }
            prev_abs_p = y[..n].iter().map(|p| p.abs()).collect();

            if next_out < output_times.len()
                && t >= output_times[next_out] - 1e-12 * (1.0 + t.abs())
            {
                snapshots.push(unpack(&y, output_times[next_out]));
                next_out += 1;
            }

            // PI step control.
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }

        if h < 1e-14 * t.abs().max(1.0) {
            let max_p = y[..n].iter().fold(0.0f64, |m, p| m.max(p.abs()));
            let kind = if max_p > 1e8 {
                status = TerminationStatus::BlowUpDetected;
                EventKind::BlowUp
            } else {
                status = TerminationStatus::StepUnderflow;
                EventKind::StepUnderflow
            };
            events.push(Event { kind, t, indices: vec![] });
            snapshots.push(unpack(&y, t));
            break 'outer;
        }
    }

    if status == TerminationStatus::ReachedTEnd
        && snapshots.last().map(|s| s.t) != Some(t_end)
    {
        snapshots.push(unpack(&y, t));
    }
    Ok(Trajectory { snapshots, status, events })
}

/// [`integrate_with_output`] with 100 uniform output times.
pub fn integrate(
    params: &LambdaParams,
    state0: &PeakonState,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> crate::Result<Trajectory> {
    let t0 = state0.t;
    let times: Vec<f64> = (1..=100).map(|k| t0 + (t_end - t0) * k as f64 / 100.0).collect();
    integrate_with_output(params, state0, t_end, rel_tol, abs_tol, &times)
}

/// Trajectory CSV: header `t,p_1..p_N,q_1..q_N,h1`, 17 significant digits.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.initial().len();
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",p_{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",q_{i}"));
    }
    out.push_str(",h1\n");
    for s in &traj.snapshots {
        out.push_str(&format!("{:.17e}", s.t));
        for v in s.p.iter().chain(s.q.iter()) {
            out.push_str(&format!(",{v:.17e}"));
        }
        out.push_str(&format!(",{:.17e}\n", h1_norm_peakon(s)));
    }
    out
}

/// Sidecar JSON with the termination status and event log.
pub fn events_json(traj: &Trajectory) -> serde_json::Value {
    serde_json::json!({
        "status": traj.status,
        "events": traj.events,
    })
}
