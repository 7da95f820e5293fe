//! Weak-probe linear response.
//!
//! The solution is expanded to first order in the probe,
//! `R = R0 + Ω1·R+·e^{−i(δt−Φ)} + Ω1·R−·e^{+i(δt−Φ)}`, which gives
//!
//! ```text
//! R0 = M0⁻¹·Σ
//! R+ = −(M0 + iδ)⁻¹·(M1·R0 − Σ+)
//! R− = −(M0 − iδ)⁻¹·(M−1·R0 − Σ−)
//! ```
//!
//! `Σ±` is zero for the four-level system. The susceptibility in units of
//! `N|d13|²/ε0ħγ2` is `γ2·[R+]ρ13`, and the dispersion slope is reported in
//! units of the propagation constant `K`, so `c/vg = 1 + K·slope`.
//! The relative phase `Φ` never enters: it only multiplies the harmonics.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{matvec, ComplexVector, Lu};
use crate::liouvillian::{build_for, build_liouvillian, el, LiouvillianSet};
use crate::params::{Grid, ProbeGrid, SystemParams};

/// Default central-difference step for the dispersion slope.
pub const DEFAULT_SLOPE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSolution {
    pub r0: ComplexVector,
    /// First-order response per unit Ω1 at `e^{−i(δt−Φ)}`.
    pub r_plus: ComplexVector,
    /// First-order response per unit Ω1 at `e^{+i(δt−Φ)}`.
    pub r_minus: ComplexVector,
    pub delta: f64,
}

/// Pump-only steady state `M0⁻¹·Σ`.
pub fn steady_state(liouv: &LiouvillianSet) -> Result<ComplexVector> {
    Lu::factor(&liouv.m0)?.solve(&liouv.sigma)
}

fn drive(liouv: &LiouvillianSet, r0: &ComplexVector) -> Result<(ComplexVector, ComplexVector)> {
    let plus = &matvec(&liouv.m1, r0)? - &liouv.sigma_plus;
    let minus = &matvec(&liouv.m_minus1, r0)? - &liouv.sigma_minus;
    Ok((plus, minus))
}

pub fn solve_floquet(liouv: &LiouvillianSet, delta: f64) -> Result<FloquetSolution> {
    let r0 = steady_state(liouv)?;
    let (dp, dm) = drive(liouv, &r0)?;
    let r_plus = Lu::factor(&liouv.m0.shifted(C64::new(0.0, delta)))?.solve(&dp)?.scale(C64::new(-1.0, 0.0));
    let r_minus = Lu::factor(&liouv.m0.shifted(C64::new(0.0, -delta)))?.solve(&dm)?.scale(C64::new(-1.0, 0.0));
    Ok(FloquetSolution { r0, r_plus, r_minus, delta })
}

/// Probe response for one parameter set, with `R0` cached across detunings.
#[derive(Debug, Clone)]
pub struct ProbeResponse {
    params: SystemParams,
    liouv: LiouvillianSet,
    r0: ComplexVector,
    drive_plus: ComplexVector,
}

impl ProbeResponse {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let liouv = build_for(params);
        let r0 = steady_state(&liouv)?;
        let (drive_plus, _) = drive(&liouv, &r0)?;
        Ok(ProbeResponse { params: *params, liouv, r0, drive_plus })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn liouvillian(&self) -> &LiouvillianSet {
        &self.liouv
    }

    pub fn r0(&self) -> &ComplexVector {
        &self.r0
    }

    /// `R+` at probe-pump detuning `delta`.
    pub fn r_plus(&self, delta: f64) -> Result<ComplexVector> {
        let lu = Lu::factor(&self.liouv.m0.shifted(C64::new(0.0, delta)))?;
        Ok(lu.solve(&self.drive_plus)?.scale(C64::new(-1.0, 0.0)))
    }

    /// Scaled susceptibility at probe detuning `Δ1`.
    pub fn chi(&self, delta1: f64) -> Result<C64> {
        let r = self.r_plus(self.params.delta_for(delta1))?;
        Ok(r[self.liouv.probe_index()] * self.params.gamma2())
    }

    /// `∂Re χ/∂Δ1` by central difference with step `h`.
    pub fn slope(&self, delta1: f64, h: f64) -> Result<f64> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::validation("h", format!("step must be positive, got {h}")));
        }
        let up = self.chi(delta1 + h)?.re;
        let down = self.chi(delta1 - h)?.re;
        Ok((up - down) / (2.0 * h))
    }
}

pub fn susceptibility(params: &SystemParams, delta1: f64) -> Result<C64> {
    ProbeResponse::new(params)?.chi(delta1)
}

pub fn dispersion_slope(params: &SystemParams, delta1: f64, h: f64) -> Result<f64> {
    ProbeResponse::new(params)?.slope(delta1, h)
}

/// `c/vg = 1 + K·slope`. Above 1 is subluminal, below 1 superluminal, below 0 a negative group velocity.
pub fn group_velocity_ratio(slope_normalized: f64, k: f64) -> f64 {
    1.0 + k * slope_normalized
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub delta1: f64,
    pub chi: C64,
    pub slope: Option<f64>,
}

/// Susceptibility (and optionally the slope) over a probe-detuning grid.
pub fn probe_spectrum(params: &SystemParams, grid: &ProbeGrid, slope_step: Option<f64>) -> Result<Vec<SpectrumPoint>> {
    let resp = ProbeResponse::new(params)?;
    grid.grid()
        .points()
        .map(|delta1| {
            let chi = resp.chi(delta1)?;
            let slope = slope_step.map(|h| resp.slope(delta1, h)).transpose()?;
            Ok(SpectrumPoint { delta1, chi, slope })
        })
        .collect()
}

/// Slope at `Δ1 = 0` as a function of `p = cos θ`.
pub fn interference_sweep(params: &SystemParams, p_values: &[f64], h: f64) -> Result<Vec<(f64, f64)>> {
    p_values
        .iter()
        .map(|&p| {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::validation("p", format!("must lie in [0, 1], got {p}")));
            }
            // acos(0) would be 89.99999999999999°; keep p = 0 exactly perpendicular.
            let theta = if p == 0.0 { 90.0 } else { p.acos().to_degrees().min(90.0) };
            let q = params.with(|r| r.theta_deg = theta)?;
            Ok((p, dispersion_slope(&q, 0.0, h)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationPoint {
    pub delta2: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePoint {
    pub delta2: f64,
    pub rho23: C64,
    pub rho34: C64,
}

/// Pump-only steady state at `Δ2`, with `Ω1 = 0` and `Δ3 = −Δ2`.
pub fn pump_steady_state(params: &SystemParams, delta2: f64) -> Result<(LiouvillianSet, ComplexVector)> {
    let q = params.with(|r| {
        r.omega1 = 0.0;
        r.delta2 = delta2;
        r.delta3 = -delta2;
    })?;
    let l = build_liouvillian(&q)?;
    let r0 = steady_state(&l)?;
    Ok((l, r0))
}

pub fn pump_population_sweep(params: &SystemParams, delta2_grid: &Grid) -> Result<Vec<PopulationPoint>> {
    delta2_grid
        .points()
        .map(|d2| {
            let (l, r0) = pump_steady_state(params, d2)?;
            let pop = |k: u8| r0[l.index_of(el(k, k)).unwrap()].re;
            Ok(PopulationPoint { delta2: d2, rho11: pop(1), rho22: pop(2), rho33: pop(3) })
        })
        .collect()
}

pub fn pump_coherence_sweep(params: &SystemParams, delta2_grid: &Grid) -> Result<Vec<CoherencePoint>> {
    delta2_grid
        .points()
        .map(|d2| {
            let (l, r0) = pump_steady_state(params, d2)?;
            let rho23 = r0[l.index_of(el(2, 3)).unwrap()];
            let rho34 = r0[l.index_of(el(3, 4)).unwrap()];
            Ok(CoherencePoint { delta2: d2, rho23, rho34 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn empty_atom_has_no_response() {
        let p = preset("fig2b").unwrap().params.with(|r| r.omega3 = 0.0).unwrap();
        let l = build_liouvillian(&p).unwrap();
        let s = solve_floquet(&l, 0.7).unwrap();
        assert_eq!(s.r0.max_norm(), 0.0);
        assert_eq!(s.r_plus.max_norm(), 0.0);
        assert_eq!(s.r_minus.max_norm(), 0.0);
    }

    #[test]
    fn no_interference_leaves_excited_state_empty() {
        let p = preset("fig2a").unwrap().params;
        let s = solve_floquet(&build_liouvillian(&p).unwrap(), 0.0).unwrap();
        assert!(s.r0[0].norm() < 1e-14);
    }

    #[test]
    fn steady_state_satisfies_generator() {
        let p = preset("fig2b").unwrap().params;
        let l = build_liouvillian(&p).unwrap();
        let s = solve_floquet(&l, -4.0).unwrap();
        assert!(crate::linalg::residual(&l.m0, &s.r0, &l.sigma).unwrap() < 1e-12);
        let rho = l.reconstruct(&s.r0).unwrap();
        for k in 0..4 {
            assert!(rho[(k, k)].im.abs() < 1e-12);
            assert!((-1e-12..=1.0 + 1e-12).contains(&rho[(k, k)].re));
        }
        assert!(l.hermiticity_defect(&s.r0) < 1e-12);
    }

    #[test]
    fn response_matches_direct_floquet() {
        let p = preset("fig3").unwrap().params;
        let resp = ProbeResponse::new(&p).unwrap();
        let s = solve_floquet(resp.liouvillian(), p.delta_for(0.3)).unwrap();
        assert!((resp.chi(0.3).unwrap() - s.r_plus[4]).norm() < 1e-14);
    }

    #[test]
    fn group_velocity_examples() {
        assert_eq!(group_velocity_ratio(0.0, 3.0), 1.0);
        assert!(group_velocity_ratio(0.2, 1.0) > 1.0);
        assert!(group_velocity_ratio(-2.0, 1.0) < 0.0);
    }

    #[test]
    fn slope_step_must_be_positive() {
        let p = preset("fig2a").unwrap().params;
        assert!(dispersion_slope(&p, 0.0, 0.0).is_err());
        assert!(dispersion_slope(&p, 0.0, -1e-3).is_err());
    }

    #[test]
    fn slope_converges_quadratically() {
        for name in ["fig2a", "fig2b", "fig3"] {
            let p = preset(name).unwrap().params;
            let r = ProbeResponse::new(&p).unwrap();
            let h = 1e-2;
            let a = r.slope(0.1, h).unwrap();
            let b = r.slope(0.1, h / 2.0).unwrap();
            let c = r.slope(0.1, h / 4.0).unwrap();
            // Richardson: successive differences shrink by ~4.
            let ratio = (a - b) / (b - c);
            assert!((ratio - 4.0).abs() < 0.2, "{name}: ratio {ratio}");
        }
    }

    #[test]
    fn phase_does_not_change_response() {
        let base = preset("fig2b").unwrap().params;
        let chi0 = susceptibility(&base, 1.3).unwrap();
        for phi in [std::f64::consts::FRAC_PI_3, std::f64::consts::PI] {
            let q = base.with(|r| r.phi = phi).unwrap();
            assert_eq!(susceptibility(&q, 1.3).unwrap(), chi0);
        }
    }

    #[test]
    fn pump_sweep_enforces_two_photon_resonance() {
        let p = preset("fig6").unwrap().params;
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        for pt in pump_population_sweep(&p, &g).unwrap() {
            let (l, r0) = pump_steady_state(&p, pt.delta2).unwrap();
            let rho = l.reconstruct(&r0).unwrap();
            assert!((rho[(3, 3)].re + pt.rho11 + pt.rho22 + pt.rho33 - 1.0).abs() < 1e-14);
            assert!(rho[(3, 3)].re >= -1e-12);
        }
    }

    #[test]
    fn p_outside_unit_interval_is_rejected() {
        let p = preset("fig3").unwrap().params;
        assert!(interference_sweep(&p, &[1.2], 1e-3).is_err());
        assert!(interference_sweep(&p, &[-0.1], 1e-3).is_err());
    }
}
