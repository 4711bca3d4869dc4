//! Pseudospectral evolution of the nonlocal equation on a periodic domain
//! `[-L, L)`, with per-step monitors (H^1 norm, sup norms, the pointwise
//! blow-up functional, momentum extrema) and characteristics tracking.

use serde::{Deserialize, Serialize};

use crate::grid::SpectralOps;
use crate::model::LambdaParams;
use crate::Error;

/// Threshold on `max|u_x|` past which the run halts with blow-up status.
pub const SLOPE_BLOWUP_THRESHOLD: f64 = 1e8;

/// Periodic uniform-grid sample of `u` on `[-L, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    /// Domain half-length.
    pub l: f64,
    /// Grid size; a power of two, at least 16.
    pub n: usize,
    pub values: Vec<f64>,
    pub t: f64,
}

impl GridField {
    pub fn new(l: f64, n: usize, values: Vec<f64>, t: f64) -> crate::Result<Self> {
        let field = Self { l, n, values, t };
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.l > 0.0) || !self.l.is_finite() {
            return Err(Error::InvalidGrid(format!("domain half-length L = {}", self.l)));
        }
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "grid size n = {} must be a power of two >= 16",
                self.n
            )));
        }
        if self.values.len() != self.n {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match n = {}",
                self.values.len(),
                self.n
            )));
        }
        if !self.t.is_finite() {
            return Err(Error::NonFinite(format!("field time t = {}", self.t)));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value {v}")));
        }
        Ok(())
    }

    /// Samples `f` on the grid.
    pub fn from_fn<F: Fn(f64) -> f64>(l: f64, n: usize, t: f64, f: F) -> crate::Result<Self> {
        let ops = SpectralOps::new(n, l);
        Self::new(l, n, ops.coords().iter().map(|&x| f(x)).collect(), t)
    }

    pub fn coords(&self) -> Vec<f64> {
        let dx = 2.0 * self.l / self.n as f64;
        (0..self.n).map(|j| -self.l + dx * j as f64).collect()
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

/// Gaussian mollification by the spectral filter `exp(-(xi w)^2 / 2)`.
pub fn mollify(field: &GridField, width: f64) -> crate::Result<GridField> {
    field.validate()?;
    if !(width > 0.0) {
        return Err(Error::InvalidParams(format!("mollifier width {width} must be positive")));
    }
    let ops = SpectralOps::new(field.n, field.l);
    let mut spec = ops.forward(&field.values);
    for (k, c) in spec.iter_mut().enumerate() {
        let xi = ops.wavenumber(k);
        *c *= (-0.5 * xi * xi * width * width).exp();
    }
    GridField::new(field.l, field.n, ops.inverse(&spec), field.t)
}

/// One monitor record; written every time step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonitorRecord {
    pub t: f64,
    pub h1_norm: f64,
    pub linf_u: f64,
    pub linf_ux: f64,
    pub blowup_functional: f64,
    pub momentum_min: f64,
    pub momentum_max: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MonitorSeries {
    pub records: Vec<MonitorRecord>,
}

impl MonitorSeries {
    pub fn csv(&self) -> String {
        let mut out = String::from(
            "t,h1_norm,linf_u,linf_ux,blowup_functional,momentum_min,momentum_max\n",
        );
        for r in &self.records {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                r.t, r.h1_norm, r.linf_u, r.linf_ux, r.blowup_functional, r.momentum_min,
                r.momentum_max
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdeStatus {
    ReachedTEnd,
    BlowUpDetected,
    CflHalt,
}

/// Evolution output: final field, per-step monitors, halt status, and the
/// recorded field snapshots (always includes the initial and final fields).
#[derive(Debug)]
pub struct EvolveResult {
    pub field: GridField,
    pub monitors: MonitorSeries,
    pub status: PdeStatus,
    pub snapshots: Vec<GridField>,
}

struct Stepper<'a> {
    params: &'a LambdaParams,
    ops: SpectralOps,
}

impl<'a> Stepper<'a> {
    fn new(params: &'a LambdaParams, field: &GridField) -> Self {
        Self { params, ops: SpectralOps::new(field.n, field.l) }
    }

    /// `u_t = -[l1 u^2 + l2 u u_x + G*(l3 u^2 + l4 u_x^2)
    ///          + dx G*(l5 u^2 + l6 u_x^2)]`
    /// with quadratic products dealiased by the 2/3 rule.
    fn tendency(&self, u: &[f64]) -> Vec<f64> {
        let p = self.params;
        let ux = self.ops.derivative(u);
        let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
        let ux2: Vec<f64> = ux.iter().map(|v| v * v).collect();
        let uux: Vec<f64> = u.iter().zip(&ux).map(|(a, b)| a * b).collect();
        let u2 = self.ops.dealias(&u2);
        let ux2 = self.ops.dealias(&ux2);
        let uux = self.ops.dealias(&uux);

        let sym: Vec<f64> = u2
            .iter()
            .zip(&ux2)
            .map(|(a, b)| p.lambda3 * a + p.lambda4 * b)
            .collect();
        let anti: Vec<f64> = u2
            .iter()
            .zip(&ux2)
            .map(|(a, b)| p.lambda5 * a + p.lambda6 * b)
            .collect();
        let conv = self.ops.helmholtz(&sym);
        let conv_dx = self.ops.helmholtz_dx(&anti);

        (0..u.len())
            .map(|j| -(p.lambda1 * u2[j] + p.lambda2 * uux[j] + conv[j] + conv_dx[j]))
            .collect()
    }

    fn monitor(&self, u: &[f64], t: f64) -> MonitorRecord {
        let p = self.params;
        let ux = self.ops.derivative(u);
        let m = self.ops.momentum(u);
        let coeff = 2.5 * p.lambda2 - 2.0 * p.lambda6;
        let functional = u
            .iter()
            .zip(&ux)
            .map(|(v, dv)| 2.0 * p.lambda1 * v + coeff * dv)
            .fold(f64::INFINITY, f64::min);
        MonitorRecord {
            t,
            h1_norm: self.ops.h1_norm(u),
            linf_u: u.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            linf_ux: ux.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            blowup_functional: functional,
            momentum_min: m.iter().cloned().fold(f64::INFINITY, f64::min),
            momentum_max: m.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Right-hand side of the evolution at the field's instant.
pub fn spectral_rhs(params: &LambdaParams, field: &GridField) -> crate::Result<GridField> {
    field.validate()?;
    let stepper = Stepper::new(params, field);
    GridField::new(field.l, field.n, stepper.tendency(&field.values), field.t)
}

fn cfl_limit(params: &LambdaParams, field: &GridField) -> f64 {
    0.5 * field.dx() / (params.lambda2.abs() * field.linf()).max(1.0)
}

/// Fixed-step RK4 evolution to `t_end`, recording monitors every step and a
/// field snapshot every `snapshot_stride` steps (0 records only the initial
/// and final fields). Halts early when `max|u_x|` exceeds the slope threshold
/// or any value turns non-finite (blow-up), or when the advective CFL bound
/// `dt <= 0.5 dx / max(1, |lambda2| max|u|)` fails mid-run.
pub fn evolve_with_snapshots(
    params: &LambdaParams,
    field0: &GridField,
    t_end: f64,
    dt: f64,
    snapshot_stride: usize,
) -> crate::Result<EvolveResult> {
    field0.validate()?;
    if !(t_end > field0.t) {
        return Err(Error::InvalidParams(format!(
            "t_end = {t_end} must exceed the initial time {}",
            field0.t
        )));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParams(format!("time step dt = {dt}")));
    }
    let limit = cfl_limit(params, field0);
    if dt > limit {
        return Err(Error::CflViolation { dt, limit });
    }

    let steps = ((t_end - field0.t) / dt).ceil().max(1.0) as usize;
    let dt = (t_end - field0.t) / steps as f64;
    let stepper = Stepper::new(params, field0);

    let mut u = field0.values.clone();
    let mut t = field0.t;
    let mut monitors = MonitorSeries::default();
    monitors.records.push(stepper.monitor(&u, t));
    let mut snapshots = vec![field0.clone()];
    let mut status = PdeStatus::ReachedTEnd;

    for step in 1..=steps {
        let k1 = stepper.tendency(&u);
        let u2: Vec<f64> = u.iter().zip(&k1).map(|(v, k)| v + 0.5 * dt * k).collect();
        let k2 = stepper.tendency(&u2);
        let u3: Vec<f64> = u.iter().zip(&k2).map(|(v, k)| v + 0.5 * dt * k).collect();
        let k3 = stepper.tendency(&u3);
        let u4: Vec<f64> = u.iter().zip(&k3).map(|(v, k)| v + dt * k).collect();
        let k4 = stepper.tendency(&u4);
        for j in 0..u.len() {
            u[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t = field0.t + dt * step as f64;

        let finite = u.iter().all(|v| v.is_finite());
        let record = if finite {
            stepper.monitor(&u, t)
        } else {
            MonitorRecord {
                t,
                h1_norm: f64::NAN,
                linf_u: f64::NAN,
                linf_ux: f64::INFINITY,
                blowup_functional: f64::NEG_INFINITY,
                momentum_min: f64::NAN,
                momentum_max: f64::NAN,
            }
        };
        monitors.records.push(record);

        if !finite || record.linf_ux > SLOPE_BLOWUP_THRESHOLD {
            status = PdeStatus::BlowUpDetected;
            break;
        }
        // Re-check the advective CFL bound against the evolving amplitude.
        let linf_u = record.linf_u;
        if dt > 0.5 * field0.dx() / (params.lambda2.abs() * linf_u).max(1.0) {
            status = PdeStatus::CflHalt;
            break;
        }
        if snapshot_stride > 0 && step % snapshot_stride == 0 && step < steps {
            snapshots.push(GridField { l: field0.l, n: field0.n, values: u.clone(), t });
        }
    }

    let sanitized: Vec<f64> = u.iter().map(|v| if v.is_finite() { *v } else { 0.0 }).collect();
    let finite = u.iter().all(|v| v.is_finite());
    let final_field = GridField {
        l: field0.l,
        n: field0.n,
        values: if finite { u } else { sanitized },
        t,
    };
    snapshots.push(final_field.clone());
    Ok(EvolveResult { field: final_field, monitors, status, snapshots })
}

/// [`evolve_with_snapshots`] keeping only the initial and final fields.
pub fn evolve(
    params: &LambdaParams,
    field0: &GridField,
    t_end: f64,
    dt: f64,
) -> crate::Result<EvolveResult> {
    evolve_with_snapshots(params, field0, t_end, dt, 0)
}

/// Momentum density `m = u - u_xx` via the multiplier `1 + xi^2`.
pub fn compute_momentum(field: &GridField) -> crate::Result<GridField> {
    field.validate()?;
    let ops = SpectralOps::new(field.n, field.l);
    GridField::new(field.l, field.n, ops.momentum(&field.values), field.t)
}

/// `inf_x [2 l1 u + (5/2 l2 - 2 l6) u_x]` over the grid, slope spectral.
pub fn blowup_functional(params: &LambdaParams, field: &GridField) -> crate::Result<f64> {
    field.validate()?;
    let ops = SpectralOps::new(field.n, field.l);
    let ux = ops.derivative(&field.values);
    let coeff = 2.5 * params.lambda2 - 2.0 * params.lambda6;
    Ok(field
        .values
        .iter()
        .zip(&ux)
        .map(|(u, du)| 2.0 * params.lambda1 * u + coeff * du)
        .fold(f64::INFINITY, f64::min))
}

/// Periodic 4-point Lagrange interpolation on the uniform grid.
fn cubic_interp(values: &[f64], l: f64, x: f64) -> f64 {
    let n = values.len();
    let dx = 2.0 * l / n as f64;
    let span = 2.0 * l;
    let pos = (x + l).rem_euclid(span) / dx;
    let j = pos.floor() as usize % n;
    let theta = pos - pos.floor();
    let idx = |k: i64| values[((j as i64 + k).rem_euclid(n as i64)) as usize];
    let (fm, f0, f1, f2) = (idx(-1), idx(0), idx(1), idx(2));
    // Lagrange weights on nodes -1, 0, 1, 2 in units of dx.
    let wm = -theta * (theta - 1.0) * (theta - 2.0) / 6.0;
    let w0 = (theta + 1.0) * (theta - 1.0) * (theta - 2.0) / 2.0;
    let w1 = -(theta + 1.0) * theta * (theta - 2.0) / 2.0;
    let w2 = (theta + 1.0) * theta * (theta - 1.0) / 6.0;
    wm * fm + w0 * f0 + w1 * f1 + w2 * f2
}

/// One characteristic traced through a snapshot sequence: the path, the
/// stretching factor `q_x`, the momentum along the path, and the conserved
/// expression `exp(2 l1 / l2 q) m q_x^{(3 l2 - 2 l6)/l2}` at snapshot times.
#[derive(Debug, Clone)]
pub struct CharacteristicTrace {
    pub times: Vec<f64>,
    pub q: Vec<f64>,
    pub qx: Vec<f64>,
    pub m_along: Vec<f64>,
    pub invariant: Vec<f64>,
}

impl CharacteristicTrace {
    /// Max relative deviation of the invariant from its initial value.
    pub fn invariant_drift(&self) -> f64 {
        let i0 = self.invariant[0];
        let scale = i0.abs().max(1e-300);
        self.invariant
            .iter()
            .map(|i| (i - i0).abs() / scale)
            .fold(0.0, f64::max)
    }

    pub fn min_momentum(&self) -> f64 {
        self.m_along.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Integrates `dq/dt = l2 u(q,t)`, `dq_x/dt = l2 u_x(q,t) q_x` from `x0`
/// through the snapshot sequence, with cubic interpolation in space and
/// linear interpolation in time, 8 RK4 substeps per snapshot interval.
pub fn trace_characteristic(
    params: &LambdaParams,
    snapshots: &[GridField],
    x0: f64,
) -> crate::Result<CharacteristicTrace> {
    if params.lambda2 == 0.0 {
        return Err(Error::InvalidParams(
            "characteristics need lambda2 != 0".into(),
        ));
    }
    if snapshots.len() < 2 {
        return Err(Error::DegenerateData(
            "characteristic tracing needs at least two snapshots".into(),
        ));
    }
    for s in snapshots {
        s.validate()?;
    }
    let l = snapshots[0].l;
    let n = snapshots[0].n;
    if snapshots.iter().any(|s| s.l != l || s.n != n) {
        return Err(Error::InvalidGrid("snapshots use different grids".into()));
    }
    let ops = SpectralOps::new(n, l);
    let slopes: Vec<Vec<f64>> = snapshots.iter().map(|s| ops.derivative(&s.values)).collect();
    let momenta: Vec<Vec<f64>> = snapshots.iter().map(|s| ops.momentum(&s.values)).collect();

    let seam_guard = |q: f64| -> crate::Result<()> {
        if q.abs() > l - 2.0 {
            return Err(Error::InvalidGrid(format!(
                "characteristic reached x = {q}, within 2 of the periodic seam"
            )));
        }
        Ok(())
    };
    seam_guard(x0)?;

    let exponent = (3.0 * params.lambda2 - 2.0 * params.lambda6) / params.lambda2;
    let weight = 2.0 * params.lambda1 / params.lambda2;

    let mut trace = CharacteristicTrace {
        times: Vec::with_capacity(snapshots.len()),
        q: Vec::with_capacity(snapshots.len()),
        qx: Vec::with_capacity(snapshots.len()),
        m_along: Vec::with_capacity(snapshots.len()),
        invariant: Vec::with_capacity(snapshots.len()),
    };
    let mut q = x0;
    let mut qx = 1.0;
    let record =
        |trace: &mut CharacteristicTrace, k: usize, q: f64, qx: f64| -> crate::Result<()> {
            if qx <= 0.0 {
                return Err(Error::Singular(format!(
                    "characteristic stretching q_x = {qx} is not positive"
                )));
            }
            let m = cubic_interp(&momenta[k], l, q);
            trace.times.push(snapshots[k].t);
            trace.q.push(q);
            trace.qx.push(qx);
            trace.m_along.push(m);
            trace.invariant.push((weight * q).exp() * m * qx.powf(exponent));
            Ok(())
        };
    record(&mut trace, 0, q, qx)?;

    for k in 0..snapshots.len() - 1 {
        let (t0, t1) = (snapshots[k].t, snapshots[k + 1].t);
        if !(t1 > t0) {
            return Err(Error::DegenerateData("snapshot times must increase".into()));
        }
        // Velocity field at (x, t), linear in time between snapshots.
        let eval = |x: f64, t: f64| -> (f64, f64) {
            let w = (t - t0) / (t1 - t0);
            let u = (1.0 - w) * cubic_interp(&snapshots[k].values, l, x)
                + w * cubic_interp(&snapshots[k + 1].values, l, x);
            let ux = (1.0 - w) * cubic_interp(&slopes[k], l, x)
                + w * cubic_interp(&slopes[k + 1], l, x);
            (u, ux)
        };
        let substeps = 8;
        let h = (t1 - t0) / substeps as f64;
        for s in 0..substeps {
            let t = t0 + h * s as f64;
            let f = |q: f64, qx: f64, t: f64| -> (f64, f64) {
                let (u, ux) = eval(q, t);
                (params.lambda2 * u, params.lambda2 * ux * qx)
            };
            let (k1q, k1x) = f(q, qx, t);
            let (k2q, k2x) = f(q + 0.5 * h * k1q, qx + 0.5 * h * k1x, t + 0.5 * h);
            let (k3q, k3x) = f(q + 0.5 * h * k2q, qx + 0.5 * h * k2x, t + 0.5 * h);
            let (k4q, k4x) = f(q + h * k3q, qx + h * k3x, t + h);
            q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            qx += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            seam_guard(q)?;
        }
        record(&mut trace, k + 1, q, qx)?;
    }
    Ok(trace)
}

/// Relative drift of the characteristics invariant started at `x0`.
pub fn characteristics_invariant_drift(
    params: &LambdaParams,
    snapshots: &[GridField],
    x0: f64,
) -> crate::Result<f64> {
    Ok(trace_characteristic(params, snapshots, x0)?.invariant_drift())
}

/// Field snapshot as `x,u` CSV.
pub fn field_csv(field: &GridField) -> String {
    let mut out = String::from("x,u\n");
    for (x, u) in field.coords().iter().zip(&field.values) {
        out.push_str(&format!("{x:.17e},{u:.17e}\n"));
    }
    out
}

const PKLB_MAGIC: &[u8; 4] = b"PKLB";
const PKLB_VERSION: u32 = 1;

/// Compact binary snapshot: magic "PKLB", version, n, L, t, then n values,
/// all little-endian.
pub fn write_pklb<W: std::io::Write>(field: &GridField, mut w: W) -> crate::Result<()> {
    field.validate()?;
    w.write_all(PKLB_MAGIC)?;
    w.write_all(&PKLB_VERSION.to_le_bytes())?;
    w.write_all(&(field.n as u32).to_le_bytes())?;
    w.write_all(&field.l.to_le_bytes())?;
    w.write_all(&field.t.to_le_bytes())?;
    for v in &field.values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_pklb<R: std::io::Read>(mut r: R) -> crate::Result<GridField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != PKLB_MAGIC {
        return Err(Error::Config("not a PKLB snapshot (bad magic)".into()));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != PKLB_VERSION {
        return Err(Error::Config(format!("unsupported PKLB version {version}")));
    }
    r.read_exact(&mut u32buf)?;
    let n = u32::from_le_bytes(u32buf) as usize;
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf)?;
    let l = f64::from_le_bytes(f64buf);
    r.read_exact(&mut f64buf)?;
    let t = f64::from_le_bytes(f64buf);
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut f64buf)?;
        values.push(f64::from_le_bytes(f64buf));
    }
    GridField::new(l, n, values, t)
}
