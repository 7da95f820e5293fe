//! Brute-force time integration of the full master equation.
//!
//! This is the reference the linear-response solver is checked against. It
//! shares nothing with [`crate::floquet`] except the generator matrices:
//! steady states come from long-time integration, and the probe response is
//! extracted by demodulating `ρ13(t)` against `e^{+i(δt−Φ)}`.
//!
//! Alongside the reduced state the integrator carries the eliminated ground
//! population as an extra variable, driven by its own rate equation. Its
//! distance from `1 − Σ ρkk` measures how well the generator conserves trace.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::ComplexVector;
use crate::liouvillian::{build_for, el, LiouvillianSet};
use crate::params::{SystemKind, SystemParams};
use crate::C64;

#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub t_max: f64,
    pub dt: f64,
    pub initial: ComplexVector,
    /// Probe-pump detuning δ of the time-dependent probe terms.
    pub demod_delta: Option<f64>,
    /// Keep every n-th step.
    pub record_every: usize,
    /// Do not record before this time.
    pub record_from: f64,
}

impl TrajectoryConfig {
    pub fn new(t_max: f64, dt: f64, initial: ComplexVector) -> Self {
        TrajectoryConfig { t_max, dt, initial, demod_delta: None, record_every: 1, record_from: 0.0 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexVector>,
    /// Final state, always present even when not recorded.
    pub last: ComplexVector,
    pub max_hermiticity_defect: f64,
    pub max_trace_defect: f64,
}

impl Trajectory {
    pub fn component(&self, k: usize) -> Vec<C64> {
        self.states.iter().map(|s| s[k]).collect()
    }
}

/// Largest step accepted by [`integrate_full`].
pub fn max_stable_step(liouv: &LiouvillianSet, omega1: f64) -> f64 {
    let probe = liouv.m1.max_abs().max(liouv.m_minus1.max_abs());
    0.02 / (liouv.m0.max_abs() + omega1 * probe)
}

/// Rate of the eliminated population, written directly from the master equation.
fn ground_rate(p: &SystemParams, l: &LiouvillianSet, x: &[C64], phase: f64) -> C64 {
    let g = |r, c| x[l.index_of(el(r, c)).unwrap()];
    let i = C64::new(0.0, 1.0);
    match p.kind() {
        SystemKind::YFourLevel => 2.0 * p.gamma3() * g(3, 3) + i * p.omega3() * (g(3, 4) - g(4, 3)),
        SystemKind::VThreeLevel => {
            let plus = C64::from_polar(p.omega1(), -phase);
            let minus = C64::from_polar(p.omega1(), phase);
            2.0 * p.gamma1() * g(1, 1)
                + 2.0 * p.gamma2() * g(2, 2)
                + 2.0 * p.gamma12() * (g(1, 2) + g(2, 1))
                + i * (minus * g(1, 3) - plus * g(3, 1))
                + i * p.omega2() * (g(2, 3) - g(3, 2))
        }
    }
}

fn populations(l: &LiouvillianSet, x: &[C64]) -> C64 {
    (1..l.levels() as u8).map(|k| x[l.index_of(el(k, k)).unwrap()]).sum()
}

/// RK4 integration of `dR/dt = M(t)·R − Σ(t)` with the probe strength and
/// relative phase taken from `params`.
pub fn integrate_full(liouv: &LiouvillianSet, params: &SystemParams, config: &TrajectoryConfig) -> Result<Trajectory> {
    let n = liouv.dim();
    if config.initial.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: config.initial.len() });
    }
    let omega1 = params.omega1();
    let max_dt = max_stable_step(liouv, omega1);
    let dt = config.dt;
    if !(dt > 0.0) || dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, max_dt });
    }
    if !(config.t_max >= 0.0 && config.t_max.is_finite()) {
        return Err(Error::validation("t_max", format!("must be finite and >= 0, got {}", config.t_max)));
    }
    let delta = config.demod_delta.unwrap_or(0.0);
    let phi = params.phi();
    let phase = |t: f64| delta * t - phi;

    let steps = (config.t_max / dt).round() as usize;
    let every = config.record_every.max(1);

    // state plus the separately integrated ground population
    let mut x = config.initial.0.clone();
    let mut ground = C64::new(1.0, 0.0) - populations(liouv, &x);
    let mut traj = Trajectory::default();
    let record = |t: f64, x: &[C64], ground: C64, traj: &mut Trajectory| {
        traj.max_hermiticity_defect = traj.max_hermiticity_defect.max(liouv.hermiticity_defect(x));
        let trace = (ground + populations(liouv, x) - 1.0).norm();
        traj.max_trace_defect = traj.max_trace_defect.max(trace);
        if t >= config.record_from - 0.5 * dt {
            traj.times.push(t);
            traj.states.push(ComplexVector(x.to_vec()));
        }
    };
    record(0.0, &x, ground, &mut traj);

    let mut k = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    let mut kg = [C64::new(0.0, 0.0); 4];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    for step in 0..steps {
        let t = step as f64 * dt;
        let stages = [(0.0, 0.0), (0.5, 0.5), (0.5, 0.5), (1.0, 1.0)];
        for s in 0..4 {
            let (tf, w) = stages[s];
            if s == 0 {
                tmp.copy_from_slice(&x);
            } else {
                for i in 0..n {
                    tmp[i] = x[i] + w * dt * k[s - 1][i];
                }
            }
            let ph = phase(t + tf * dt);
            liouv.derivative(&tmp, omega1, ph, &mut k[s]);
            kg[s] = ground_rate(params, liouv, &tmp, ph);
        }
        for i in 0..n {
            x[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        ground += dt / 6.0 * (kg[0] + 2.0 * kg[1] + 2.0 * kg[2] + kg[3]);

        if !x.iter().all(|z| z.is_finite()) {
            return Err(Error::NonFinite { t: t + dt, step: step + 1 });
        }
        if (step + 1) % every == 0 || step + 1 == steps {
            record((step + 1) as f64 * dt, &x, ground, &mut traj);
        } else {
            traj.max_hermiticity_defect = traj.max_hermiticity_defect.max(liouv.hermiticity_defect(&x));
        }
    }
    traj.last = ComplexVector(x);
    Ok(traj)
}

/// Coefficient of `Ω1·e^{−i(δt−Φ)}` in a sampled signal.
///
/// Returns `(1/T)∫ (s(t) − baseline)·e^{+i(δt−Φ)} dt / Ω1` over `window`
/// by the trapezoidal rule. The window should cover a whole number of
/// periods `2π/δ`. At `δ = 0` this is the mean deviation from `baseline`
/// (times `e^{−iΦ}`), which then also contains the `e^{+i(δt−Φ)}` term.
pub fn demodulate(
    times: &[f64],
    signal: &[C64],
    delta: f64,
    phi: f64,
    omega1: f64,
    window: (f64, f64),
    baseline: C64,
) -> Result<C64> {
    if times.len() != signal.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: signal.len() });
    }
    let (t0, t1) = window;
    let length = t1 - t0;
    let period = if delta != 0.0 { TAU / delta.abs() } else { 0.0 };
    if !(length > 0.0) || length < period * (1.0 - 1e-9) {
        return Err(Error::WindowTooShort { length, period });
    }
    if omega1 == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let tol = 1e-9 * (1.0 + t1.abs());
    let pts: Vec<(f64, C64)> = times
        .iter()
        .zip(signal)
        .filter(|(t, _)| **t >= t0 - tol && **t <= t1 + tol)
        .map(|(&t, &s)| (t, (s - baseline) * C64::from_polar(1.0, delta * t - phi)))
        .collect();
    if pts.len() < 2 {
        return Err(Error::WindowTooShort { length: 0.0, period });
    }
    let mut acc = C64::new(0.0, 0.0);
    for w in pts.windows(2) {
        acc += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
    }
    let span = pts.last().unwrap().0 - pts[0].0;
    Ok(acc / span / omega1)
}

/// All-ground initial state: every stored component zero.
pub fn ground_state(liouv: &LiouvillianSet) -> ComplexVector {
    ComplexVector::zeros(liouv.dim())
}

/// Slowest decay constant, the natural relaxation time scale.
fn min_gamma(p: &SystemParams) -> f64 {
    match p.kind() {
        SystemKind::YFourLevel => p.gamma1().min(p.gamma2()).min(p.gamma3()),
        SystemKind::VThreeLevel => p.gamma1().min(p.gamma2()),
    }
}

/// Pump-only steady state by integrating from the ground state for
/// `relax_factor / min(γ)`.
pub fn steady_state_by_integration(params: &SystemParams, relax_factor: f64) -> Result<Trajectory> {
    let q = params.with(|r| r.omega1 = 0.0)?;
    let l = build_for(&q);
    let dt = max_stable_step(&l, 0.0);
    let t_max = relax_factor / min_gamma(&q);
    let mut cfg = TrajectoryConfig::new(t_max, dt, ground_state(&l));
    cfg.record_every = usize::MAX;
    cfg.record_from = f64::INFINITY;
    integrate_full(&l, &q, &cfg)
}

#[derive(Debug, Clone)]
pub struct OracleProbe {
    /// Estimate of `[R+]ρ13` (per unit Ω1).
    pub r_plus: C64,
    pub max_hermiticity_defect: f64,
    pub max_trace_defect: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Transient discarded before demodulation, in units of `1/min(γ)`.
    pub discard_factor: f64,
    /// Minimum demodulation window length (1/γ2 units); rounded up to whole periods.
    pub min_window: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { discard_factor: 20.0, min_window: 20.0 }
    }
}

fn demodulated_run(
    l: &LiouvillianSet,
    q: &SystemParams,
    start: &ComplexVector,
    baseline: C64,
    delta: f64,
    opts: OracleOptions,
) -> Result<(C64, f64, f64)> {
    let max_dt = max_stable_step(l, q.omega1());
    let discard = opts.discard_factor / min_gamma(q);
    let (dt, window) = if delta != 0.0 {
        let period = TAU / delta.abs();
        let per_period = (period / max_dt).ceil();
        let periods = (opts.min_window / period).ceil().max(1.0);
        (period / per_period, periods * period)
    } else {
        (max_dt, opts.min_window)
    };
    let t0 = (discard / dt).ceil() * dt;
    let mut cfg = TrajectoryConfig::new(t0 + window, dt, start.clone());
    cfg.demod_delta = Some(delta);
    cfg.record_from = t0;
    let traj = integrate_full(l, q, &cfg)?;
    let k = l.probe_index();
    let value = demodulate(&traj.times, &traj.component(k), delta, q.phi(), q.omega1(), (t0, t0 + window), baseline)?;
    Ok((value, traj.max_hermiticity_defect, traj.max_trace_defect))
}

/// Probe response by brute force: relax the pump-only atom by integration,
/// switch on a probe of strength `omega1`, discard the transient and
/// demodulate `ρ13`. At `δ = 0` two runs with `Φ` and `Φ + π/2` separate
/// the two first-order harmonics.
pub fn probe_response_by_integration(
    params: &SystemParams,
    delta1: f64,
    omega1: f64,
    opts: OracleOptions,
) -> Result<OracleProbe> {
    let relaxed = steady_state_by_integration(params, 50.0)?;
    let mut out = probe_response_from(params, &relaxed.last, delta1, omega1, opts)?;
    out.max_hermiticity_defect = out.max_hermiticity_defect.max(relaxed.max_hermiticity_defect);
    out.max_trace_defect = out.max_trace_defect.max(relaxed.max_trace_defect);
    Ok(out)
}

/// As [`probe_response_by_integration`], starting from an already relaxed
/// pump-only state.
pub fn probe_response_from(
    params: &SystemParams,
    start: &ComplexVector,
    delta1: f64,
    omega1: f64,
    opts: OracleOptions,
) -> Result<OracleProbe> {
    let q = params.with(|r| r.omega1 = omega1)?;
    let l = build_for(&q);
    if start.len() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: start.len() });
    }
    let start = start.clone();
    let baseline = start[l.probe_index()];
    let delta = q.delta_for(delta1);
    let mut herm = 0.0f64;
    let mut trace = 0.0f64;
    let r_plus = if delta.abs() > 1e-9 {
        let (v, h, t) = demodulated_run(&l, &q, &start, baseline, delta, opts)?;
        herm = herm.max(h);
        trace = trace.max(t);
        v
    } else {
        // mean deviation at phase Φ is R+·e^{iΦ} + R−·e^{−iΦ}, returned times e^{−iΦ}
        let phi = q.phi();
        let q2 = q.with(|r| r.phi = phi + std::f64::consts::FRAC_PI_2)?;
        let (a, h1, t1) = demodulated_run(&l, &q, &start, baseline, 0.0, opts)?;
        let (b, h2, t2) = demodulated_run(&l, &q2, &start, baseline, 0.0, opts)?;
        herm = herm.max(h1).max(h2);
        trace = trace.max(t1).max(t2);
        // a = R+ + R−·e^{−2iΦ}, b = R+ − R−·e^{−2iΦ}
        (a + b) / 2.0
    };
    Ok(OracleProbe { r_plus, max_hermiticity_defect: herm, max_trace_defect: trace })
}
