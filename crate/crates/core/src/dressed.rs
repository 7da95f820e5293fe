//! Dressed-state picture of the pump-only atom.
//!
//! At zero pump detunings the pump Hamiltonian on {|2>,|3>,|4>} has a dark
//! state `|d> ∝ Ω3|2> − Ω2|4>` with eigenvalue 0 and two bright states
//! `|±> ∝ Ω2|2> − λ±|3> + Ω3|4>` with `λ± = ±√(Ω2² + Ω3²)`. With
//! `Ω2 = Ω3` and `W12 = −√(Ω2² + Ω3²)` the bare excited state |1> is
//! degenerate with |−>, and in the strong-drive limit the populations of
//! {|1>, |+>, |−>, |d>} together with the real coherence `ρ1− = ρ−1`
//! obey a closed set of five linear rate equations.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, Lu};
use crate::params::SystemParams;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DressedLabel {
    D,
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedState {
    pub label: DressedLabel,
    pub eigenvalue: f64,
    /// Coefficients over the bare states (|2>, |3>, |4>).
    pub amplitudes: [f64; 3],
    /// The same before normalisation, with their squared norm.
    pub components: [f64; 3],
    pub norm_sq: f64,
}

impl DressedState {
    pub fn dot(&self, other: &DressedState) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum()
    }

    /// Amplitude on bare state `|k>`, `k` in 1..=4 (zero for |1>).
    pub fn bare(&self, k: usize) -> f64 {
        match k {
            2..=4 => self.amplitudes[k - 2],
            _ => 0.0,
        }
    }
}

/// Returns `(|d>, |+>, |−>)`.
pub fn dressed_states(omega2: f64, omega3: f64) -> Result<(DressedState, DressedState, DressedState)> {
    let s = omega2 * omega2 + omega3 * omega3;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::validation("Omega2, Omega3", "at least one Rabi frequency must be non-zero"));
    }
    let lambda = s.sqrt();
    let state = |label, eigenvalue, components: [f64; 3], norm_sq: f64| {
        let n = norm_sq.sqrt();
        DressedState { label, eigenvalue, amplitudes: components.map(|c| c / n), components, norm_sq }
    };
    let d = state(DressedLabel::D, 0.0, [omega3, 0.0, -omega2], s);
    // Ω2² + λ² + Ω3² = 2λ², written so the |3> weight is exactly 1/2
    let bright = |label, l: f64| state(label, l, [omega2, -l, omega3], 2.0 * (l * l));
    Ok((d, bright(DressedLabel::Plus, lambda), bright(DressedLabel::Minus, -lambda)))
}

/// Population or coherence index of the secular equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    P11,
    PlusPlus,
    MinusMinus,
    Dd,
    /// `ρ1−`.
    OneMinus,
    /// `ρ−1`; only ever a source.
    MinusOne,
}

impl Channel {
    pub const SOURCES: [Channel; 6] =
        [Channel::P11, Channel::PlusPlus, Channel::MinusMinus, Channel::Dd, Channel::OneMinus, Channel::MinusOne];
    pub const TARGETS: [Channel; 5] = [Channel::P11, Channel::PlusPlus, Channel::MinusMinus, Channel::Dd, Channel::OneMinus];
    pub const POPULATIONS: [Channel; 4] = [Channel::P11, Channel::PlusPlus, Channel::MinusMinus, Channel::Dd];

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::P11 => "11",
            Channel::PlusPlus => "++",
            Channel::MinusMinus => "--",
            Channel::Dd => "dd",
            Channel::OneMinus => "1-",
            Channel::MinusOne => "-1",
        })
    }
}

/// The thirty transfer rates `Γ_source^target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTable {
    rates: [[f64; 5]; 6],
}

impl GammaTable {
    pub fn get(&self, source: Channel, target: Channel) -> f64 {
        assert!(target != Channel::MinusOne, "ρ−1 has no equation of its own");
        self.rates[source.slot()][target.slot()]
    }

    /// Net rate from `source` into all populations: the outflows first, then the loss.
    pub fn column_sum(&self, source: Channel) -> f64 {
        let own = if Channel::POPULATIONS.contains(&source) { self.get(source, source) } else { 0.0 };
        outflow(&self.rates, source) + own
    }

    pub fn max_abs(&self) -> f64 {
        self.rates.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// 5×5 generator over `(ρ11, ρ++, ρ−−, ρdd, ρ1−)`, folding `ρ−1 = ρ1−`.
    pub fn generator(&self) -> [[f64; 5]; 5] {
        let mut g = [[0.0; 5]; 5];
        for (t, row) in g.iter_mut().enumerate() {
            for s in 0..5 {
                row[s] = self.rates[s][t];
            }
            row[4] += self.rates[Channel::MinusOne.slot()][t];
        }
        g
    }
}

fn outflow(rates: &[[f64; 5]; 6], source: Channel) -> f64 {
    Channel::POPULATIONS.iter().filter(|&&t| t != source).map(|t| rates[source.slot()][t.slot()]).sum()
}

pub fn gamma_table(gamma1: f64, gamma2: f64, gamma3: f64, gamma12: f64) -> GammaTable {
    use Channel::*;
    let mut r = [[0.0; 5]; 6];
    let mut set = |s: Channel, t: Channel, v: f64| r[s.slot()][t.slot()] = v;

    set(P11, P11, -2.0 * gamma1);
    set(OneMinus, P11, -gamma12 / 2.0);
    set(MinusOne, P11, -gamma12 / 2.0);

    set(P11, PlusPlus, gamma1);
    set(Dd, PlusPlus, gamma2 / 2.0);
    set(MinusMinus, PlusPlus, (gamma2 + gamma3) / 4.0);
    set(OneMinus, PlusPlus, gamma12 / 2.0);
    set(MinusOne, PlusPlus, gamma12 / 2.0);

    set(P11, MinusMinus, gamma1);
    set(Dd, MinusMinus, gamma2 / 2.0);
    set(PlusPlus, MinusMinus, (gamma2 + gamma3) / 4.0);

    set(Dd, Dd, -gamma2);
    set(PlusPlus, Dd, gamma3 / 2.0);
    set(MinusMinus, Dd, gamma3 / 2.0);

    set(P11, OneMinus, -gamma12 / 2.0);
    set(MinusMinus, OneMinus, -gamma12 / 2.0);
    set(OneMinus, OneMinus, -(4.0 * gamma1 + gamma2 + 2.0 * gamma3) / 4.0);

    // −(γ2 + 3γ3)/4, taken as the total outflow so each column balances exactly
    for pop in [PlusPlus, MinusMinus] {
        let outflow = outflow(&r, pop);
        r[pop.slot()][pop.slot()] = -outflow;
    }

    GammaTable { rates: r }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedPopulations {
    pub rho11: f64,
    pub rho_pp: f64,
    pub rho_mm: f64,
    pub rho_dd: f64,
    pub rho_1m: f64,
}

impl DressedPopulations {
    fn to_array(self) -> [f64; 5] {
        [self.rho11, self.rho_pp, self.rho_mm, self.rho_dd, self.rho_1m]
    }

    fn from_array(a: [f64; 5]) -> Self {
        DressedPopulations { rho11: a[0], rho_pp: a[1], rho_mm: a[2], rho_dd: a[3], rho_1m: a[4] }
    }

    pub fn trace(&self) -> f64 {
        self.rho11 + self.rho_pp + self.rho_mm + self.rho_dd
    }
}

/// Secular rate model, available only at the degeneracy point
/// `Δ2 = Δ3 = 0`, `Ω2 = Ω3`, `W12 = −√(Ω2² + Ω3²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularModel {
    pub table: GammaTable,
    pub states: (DressedState, DressedState, DressedState),
}

const LOCK_TOLERANCE: f64 = 1e-9;

impl SecularModel {
    pub fn new(p: &SystemParams) -> Result<Self> {
        if p.kind() != crate::params::SystemKind::YFourLevel {
            return Err(Error::WrongSystemKind { expected: "Y_FOUR_LEVEL" });
        }
        let scale = 1.0 + p.omega2().abs() + p.omega3().abs();
        if p.delta2().abs() > LOCK_TOLERANCE * scale {
            return Err(Error::LockViolation { param: "Delta2", reason: format!("must be 0, got {}", p.delta2()) });
        }
        if p.delta3().abs() > LOCK_TOLERANCE * scale {
            return Err(Error::LockViolation { param: "Delta3", reason: format!("must be 0, got {}", p.delta3()) });
        }
        if (p.omega2() - p.omega3()).abs() > LOCK_TOLERANCE * scale {
            return Err(Error::LockViolation {
                param: "Omega3",
                reason: format!("must equal Omega2 = {}, got {}", p.omega2(), p.omega3()),
            });
        }
        let lambda = (p.omega2().powi(2) + p.omega3().powi(2)).sqrt();
        if (p.w12() + lambda).abs() > LOCK_TOLERANCE * scale {
            return Err(Error::LockViolation {
                param: "W12",
                reason: format!("must equal -sqrt(Omega2^2 + Omega3^2) = {}, got {}", -lambda, p.w12()),
            });
        }
        Ok(SecularModel {
            table: gamma_table(p.gamma1(), p.gamma2(), p.gamma3(), p.gamma12()),
            states: dressed_states(p.omega2(), p.omega3())?,
        })
    }

    /// Dressed-basis image of a bare 4×4 density matrix; coherences between
    /// dressed states other than `ρ1−` are discarded.
    pub fn project(&self, rho: &ComplexMatrix) -> Result<DressedPopulations> {
        project_bare(&self.states, rho)
    }
}

fn padded(x: &[f64; 3]) -> [f64; 4] {
    [0.0, x[0], x[1], x[2]]
}

pub fn project_bare(
    states: &(DressedState, DressedState, DressedState),
    rho: &ComplexMatrix,
) -> Result<DressedPopulations> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: rho.rows() });
    }
    let expect = |a: &[f64; 4], b: &[f64; 4]| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += a[i] * rho[(i, j)] * b[j];
            }
        }
        acc
    };
    let population = |s: &DressedState| {
        let c = padded(&s.components);
        expect(&c, &c).re / s.norm_sq
    };
    let one = [1.0, 0.0, 0.0, 0.0];
    Ok(DressedPopulations {
        rho11: rho[(0, 0)].re,
        rho_pp: population(&states.1),
        rho_mm: population(&states.2),
        rho_dd: population(&states.0),
        rho_1m: expect(&one, &padded(&states.2.amplitudes)).re,
    })
}

fn rate(g: &[[f64; 5]; 5], x: &[f64; 5]) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (o, row) in out.iter_mut().zip(g) {
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    out
}

/// Integrate the secular equations with classical RK4, recording every
/// `record_every`-th step (and always the first and last).
pub fn evolve_secular_sampled(
    table: &GammaTable,
    initial: DressedPopulations,
    t_max: f64,
    dt: f64,
    record_every: usize,
) -> Result<Vec<(f64, DressedPopulations)>> {
    let max_dt = 0.01 / table.max_abs();
    if !(dt > 0.0) || dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, max_dt });
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::validation("t_max", format!("must be finite and >= 0, got {t_max}")));
    }
    if (initial.trace() - 1.0).abs() > 1e-12 {
        return Err(Error::validation("initial", format!("populations sum to {}, not 1", initial.trace())));
    }
    let every = record_every.max(1);
    let g = table.generator();
    let steps = (t_max / dt).round() as usize;
    let mut x = initial.to_array();
    let mut out = vec![(0.0, initial)];
    let add = |a: &[f64; 5], b: &[f64; 5], s: f64| {
        let mut r = *a;
        for i in 0..5 {
            r[i] += s * b[i];
        }
        r
    };
    for step in 1..=steps {
        let k1 = rate(&g, &x);
        let k2 = rate(&g, &add(&x, &k1, dt / 2.0));
        let k3 = rate(&g, &add(&x, &k2, dt / 2.0));
        let k4 = rate(&g, &add(&x, &k3, dt));
        for i in 0..5 {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if step % every == 0 || step == steps {
            out.push((step as f64 * dt, DressedPopulations::from_array(x)));
        }
    }
    Ok(out)
}

pub fn evolve_secular(
    table: &GammaTable,
    initial: DressedPopulations,
    t_max: f64,
    dt: f64,
) -> Result<Vec<(f64, DressedPopulations)>> {
    evolve_secular_sampled(table, initial, t_max, dt, 1)
}

/// Stationary point of the secular equations; the `ρdd` equation is
/// replaced by the trace condition.
pub fn secular_steady_state(table: &GammaTable) -> Result<DressedPopulations> {
    let g = table.generator();
    let mut a = ComplexMatrix::from_fn(5, 5, |i, j| C64::new(g[i][j], 0.0));
    let mut b = ComplexVector::zeros(5);
    for j in 0..5 {
        a[(3, j)] = C64::new(if j < 4 { 1.0 } else { 0.0 }, 0.0);
    }
    b[3] = C64::new(1.0, 0.0);
    let x = Lu::factor(&a)?.solve(&b)?;
    Ok(DressedPopulations::from_array([x[0].re, x[1].re, x[2].re, x[3].re, x[4].re]))
}

/// `Re ρ23 = Re ρ34 ≈ (ρ−− − ρ++)/(2√2)`.
pub fn coherence_from_populations(rho_mm: f64, rho_pp: f64) -> f64 {
    (rho_mm - rho_pp) / (2.0 * 2f64.sqrt())
}

/// Closed-form steady pump coherence at full interference, rates in units of γ2.
pub fn pump_coherence_analytic(gamma1: f64, gamma3: f64) -> f64 {
    let num = 2f64.sqrt() * gamma1;
    let den = 2.0 * gamma1 * (gamma3 + 2.0) * (4.0 * gamma3 + 1.0)
        + (2.0 * gamma3 + 1.0) * (2.0 * gamma3 * (gamma3 + 2.0) + 1.0);
    num / den
}
