//! Physical parameter records.
//!
//! Every frequency-like quantity is dimensionless and measured in units of
//! the decay constant `gamma2`. Decay constants are stored as half-rates: a
//! level quoted with a population decay rate `2γ` is stored as `γ`. Rabi
//! frequencies are likewise stored as half Rabi frequencies `Ω`.
//!
//! The cross-damping constant `gamma12` is never an input. It is derived
//! from the dipole alignment angle as `sqrt(gamma1 * gamma2) * cos(theta)`
//! using the exact cosine (so `theta = 15°` gives `0.9659 sqrt(γ1γ2)`, not
//! a rounded `0.97`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemKind {
    /// Four levels: excited doublet |1>,|2>, middle |3>, ground |4>.
    #[default]
    #[serde(rename = "Y_FOUR_LEVEL")]
    YFourLevel,
    /// Three levels: |4> removed, |3> becomes the ground state.
    #[serde(rename = "V_THREE_LEVEL")]
    VThreeLevel,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::YFourLevel => "Y_FOUR_LEVEL",
            SystemKind::VThreeLevel => "V_THREE_LEVEL",
        }
    }
}

/// Raw, unvalidated parameter record. This is the JSON schema.
///
/// `gamma12` is informational: it is emitted when a validated record is
/// serialized and, if supplied on input, must agree with the value derived
/// from `theta_deg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsRecord {
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(default)]
    pub gamma3: f64,
    pub theta_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma12: Option<f64>,
    #[serde(rename = "W12")]
    pub w12: f64,
    #[serde(rename = "Omega1", default)]
    pub omega1: f64,
    #[serde(rename = "Omega2")]
    pub omega2: f64,
    #[serde(rename = "Omega3", default)]
    pub omega3: f64,
    #[serde(rename = "Delta2", default)]
    pub delta2: f64,
    #[serde(rename = "Delta3", default)]
    pub delta3: f64,
    #[serde(rename = "Phi", default)]
    pub phi: f64,
    #[serde(default)]
    pub system_kind: SystemKind,
}

/// Validated, immutable parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    record: ParamsRecord,
    gamma12: f64,
}

fn finite(field: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::validation(field, format!("must be finite, got {x}")))
    }
}

fn positive(field: &'static str, x: f64) -> Result<f64> {
    finite(field, x)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::validation(field, format!("must be > 0, got {x}")))
    }
}

fn non_negative(field: &'static str, x: f64) -> Result<f64> {
    finite(field, x)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(Error::validation(field, format!("must be >= 0, got {x}")))
    }
}

/// `sqrt(gamma1 * gamma2) * cos(theta)`, the strength of decay-induced interference.
pub fn interference_parameter(gamma1: f64, gamma2: f64, theta_deg: f64) -> Result<f64> {
    positive("gamma1", gamma1)?;
    positive("gamma2", gamma2)?;
    finite("theta_deg", theta_deg)?;
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(Error::validation(
            "theta_deg",
            format!("must lie in [0, 90], got {theta_deg}"),
        ));
    }
    // cos(pi/2) is 6e-17 in floating point; perpendicular dipoles must give exactly zero.
    let c = if theta_deg == 90.0 { 0.0 } else { theta_deg.to_radians().cos() };
    Ok((gamma1 * gamma2).sqrt() * c)
}

/// Probe-pump detuning `δ = Δ1 − Δ2 + W12`.
pub fn delta_from_delta1(delta1: f64, delta2: f64, w12: f64) -> f64 {
    delta1 - delta2 + w12
}

/// Inverse of [`delta_from_delta1`]: `Δ1 = Δ2 + δ − W12`.
pub fn delta1_from_delta(delta: f64, delta2: f64, w12: f64) -> f64 {
    delta2 + delta - w12
}

impl SystemParams {
    pub fn new(record: ParamsRecord) -> Result<Self> {
        let r = record;
        positive("gamma1", r.gamma1)?;
        positive("gamma2", r.gamma2)?;
        finite("W12", r.w12)?;
        non_negative("Omega1", r.omega1)?;
        non_negative("Omega2", r.omega2)?;
        finite("Delta2", r.delta2)?;
        finite("Phi", r.phi)?;
        if r.system_kind == SystemKind::YFourLevel {
            positive("gamma3", r.gamma3)?;
            non_negative("Omega3", r.omega3)?;
            finite("Delta3", r.delta3)?;
        }
        let gamma12 = interference_parameter(r.gamma1, r.gamma2, r.theta_deg)?;
        if let Some(given) = r.gamma12 {
            if (given - gamma12).abs() > 1e-12 * (1.0 + gamma12.abs()) {
                return Err(Error::validation(
                    "gamma12",
                    format!("derived from theta_deg as {gamma12}, but {given} was supplied"),
                ));
            }
        }
        let mut record = r;
        record.gamma12 = None;
        Ok(SystemParams { record, gamma12 })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: ParamsRecord = serde_json::from_str(text)?;
        Self::new(record)
    }

    /// The record with `gamma12` filled in, suitable for serialization.
    pub fn to_record(&self) -> ParamsRecord {
        ParamsRecord { gamma12: Some(self.gamma12), ..self.record }
    }

    /// Copy with modified inputs; the result is re-validated.
    pub fn with(&self, edit: impl FnOnce(&mut ParamsRecord)) -> Result<Self> {
        let mut r = self.record;
        edit(&mut r);
        Self::new(r)
    }

    pub fn kind(&self) -> SystemKind {
        self.record.system_kind
    }
    pub fn gamma1(&self) -> f64 {
        self.record.gamma1
    }
    pub fn gamma2(&self) -> f64 {
        self.record.gamma2
    }
    pub fn gamma3(&self) -> f64 {
        self.record.gamma3
    }
    pub fn gamma12(&self) -> f64 {
        self.gamma12
    }
    pub fn theta_deg(&self) -> f64 {
        self.record.theta_deg
    }
    pub fn w12(&self) -> f64 {
        self.record.w12
    }
    pub fn omega1(&self) -> f64 {
        self.record.omega1
    }
    pub fn omega2(&self) -> f64 {
        self.record.omega2
    }
    pub fn omega3(&self) -> f64 {
        self.record.omega3
    }
    pub fn delta2(&self) -> f64 {
        self.record.delta2
    }
    pub fn delta3(&self) -> f64 {
        self.record.delta3
    }
    pub fn phi(&self) -> f64 {
        self.record.phi
    }

    /// Probe-pump detuning for a given probe detuning.
    pub fn delta_for(&self, delta1: f64) -> f64 {
        delta_from_delta1(delta1, self.record.delta2, self.record.w12)
    }
}

/// Uniform grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, n_points: usize) -> Result<Self> {
        finite("grid min", min)?;
        finite("grid max", max)?;
        if n_points == 1 && min == max {
            return Ok(Grid { min, max, n_points });
        }
        if n_points < 2 {
            return Err(Error::validation("n_points", format!("need at least 2 points, got {n_points}")));
        }
        if min >= max {
            return Err(Error::validation("grid", format!("min {min} must be < max {max}")));
        }
        Ok(Grid { min, max, n_points })
    }

    /// Single-point grid.
    pub fn single(x: f64) -> Result<Self> {
        finite("grid point", x)?;
        Ok(Grid { min: x, max: x, n_points: 1 })
    }

    pub fn point(&self, i: usize) -> f64 {
        if self.n_points == 1 {
            return self.min;
        }
        if i + 1 == self.n_points {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    pub fn step(&self) -> f64 {
        if self.n_points < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.n_points - 1) as f64
        }
    }
}

/// Probe detuning grid over `Δ1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeGrid(Grid);

impl ProbeGrid {
    pub fn new(delta1_min: f64, delta1_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::validation("n_points", format!("need at least 2 points, got {n_points}")));
        }
        Grid::new(delta1_min, delta1_max, n_points).map(ProbeGrid)
    }

    pub fn grid(&self) -> &Grid {
        &self.0
    }

    pub fn delta1_min(&self) -> f64 {
        self.0.min
    }
    pub fn delta1_max(&self) -> f64 {
        self.0.max
    }
    pub fn n_points(&self) -> usize {
        self.0.n_points
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record() -> ParamsRecord {
        ParamsRecord {
            gamma1: 0.01,
            gamma2: 1.0,
            gamma3: 0.01,
            theta_deg: 15.0,
            gamma12: None,
            w12: -4.0,
            omega1: 0.0,
            omega2: 4.0 / 2f64.sqrt(),
            omega3: 4.0 / 2f64.sqrt(),
            delta2: 0.0,
            delta3: 0.0,
            phi: 0.0,
            system_kind: SystemKind::YFourLevel,
        }
    }

    #[test]
    fn interference_parameter_examples() {
        assert_eq!(interference_parameter(0.01, 1.0, 90.0).unwrap(), 0.0);
        // sqrt(0.01) cos 15° = 0.1 * 0.96592583 = 0.096592583
        let g = interference_parameter(0.01, 1.0, 15.0).unwrap();
        assert!((g - 0.096_592_582_628_906_83).abs() < 1e-15);
        // sqrt(5) cos 10° = 2.2360680 * 0.98480775 = 2.2020965
        let g = interference_parameter(5.0, 1.0, 10.0).unwrap();
        assert!((g - 2.202_096_5).abs() < 1e-6);
        assert_eq!(interference_parameter(0.04, 1.0, 0.0).unwrap(), 0.2);
    }

    #[test]
    fn interference_parameter_rejects_bad_input() {
        assert!(interference_parameter(0.01, 1.0, 91.0).is_err());
        assert!(interference_parameter(0.01, 1.0, -1.0).is_err());
        assert!(interference_parameter(0.0, 1.0, 10.0).is_err());
        assert!(interference_parameter(0.1, -1.0, 10.0).is_err());
    }

    #[test]
    fn detuning_examples() {
        assert_eq!(delta_from_delta1(0.0, 0.0, -4.0), -4.0);
        assert_eq!(delta_from_delta1(4.0, 0.0, -4.0), 0.0);
        assert_eq!(delta_from_delta1(-0.75, 0.0, -0.75), -1.5);
    }

    #[test]
    fn gamma12_is_derived() {
        let p = SystemParams::new(record()).unwrap();
        assert!((p.gamma12() - 0.1 * 15f64.to_radians().cos()).abs() < 1e-15);
        let out = p.to_record();
        assert_eq!(out.gamma12, Some(p.gamma12()));
        // Round trip through JSON accepts the emitted gamma12.
        let json = serde_json::to_string(&out).unwrap();
        assert_eq!(SystemParams::from_json(&json).unwrap(), p);
    }

    #[test]
    fn inconsistent_gamma12_is_rejected() {
        let mut r = record();
        r.gamma12 = Some(0.05);
        assert!(matches!(SystemParams::new(r), Err(Error::Validation { field: "gamma12", .. })));
    }

    #[test]
    fn unknown_json_keys_are_rejected() {
        let json = r#"{"gamma1":0.01,"gamma2":1,"gamma3":0.01,"theta_deg":15,"W12":-4,
                       "Omega2":2,"Omega3":2,"Omgea1":0.1}"#;
        assert!(matches!(SystemParams::from_json(json), Err(Error::Json(_))));
    }

    #[test]
    fn json_field_names() {
        let json = r#"{"gamma1":0.01,"gamma2":1,"gamma3":0.01,"theta_deg":90,"W12":-4,
                       "Omega1":0.001,"Omega2":2,"Omega3":3,"Delta2":0.5,"Delta3":-0.5,
                       "Phi":1.0,"system_kind":"Y_FOUR_LEVEL"}"#;
        let p = SystemParams::from_json(json).unwrap();
        assert_eq!(p.omega3(), 3.0);
        assert_eq!(p.delta3(), -0.5);
        assert_eq!(p.phi(), 1.0);
        assert_eq!(p.gamma12(), 0.0);
    }

    #[test]
    fn v_mode_ignores_ground_fields() {
        let json = r#"{"gamma1":0.01,"gamma2":1,"theta_deg":15,"W12":-4,"Omega2":4,
                       "system_kind":"V_THREE_LEVEL"}"#;
        let p = SystemParams::from_json(json).unwrap();
        assert_eq!(p.kind(), SystemKind::VThreeLevel);
        // gamma3 = 0 would be invalid for the four-level system.
        assert!(p.with(|r| r.system_kind = SystemKind::YFourLevel).is_err());
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(SystemParams::new(ParamsRecord { gamma1: 0.0, ..record() }).is_err());
        assert!(SystemParams::new(ParamsRecord { omega2: -1.0, ..record() }).is_err());
        assert!(SystemParams::new(ParamsRecord { omega1: -1e-3, ..record() }).is_err());
        assert!(SystemParams::new(ParamsRecord { w12: f64::NAN, ..record() }).is_err());
    }

    #[test]
    fn grids() {
        assert!(ProbeGrid::new(-10.0, 10.0, 1).is_err());
        assert!(ProbeGrid::new(1.0, -1.0, 10).is_err());
        let g = ProbeGrid::new(-10.0, 10.0, 2001).unwrap();
        let pts: Vec<f64> = g.grid().points().collect();
        assert_eq!(pts.len(), 2001);
        assert_eq!(pts[0], -10.0);
        assert_eq!(pts[1000], 0.0);
        assert_eq!(pts[2000], 10.0);
        assert!(Grid::single(0.3).is_ok());
    }

    proptest! {
        #[test]
        fn interference_parameter_decreases_with_angle(a in 0.0f64..90.0, b in 0.0f64..90.0,
                                                       g1 in 1e-3f64..10.0, g2 in 1e-3f64..10.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let glo = interference_parameter(g1, g2, lo).unwrap();
            let ghi = interference_parameter(g1, g2, hi).unwrap();
            prop_assert!(glo >= ghi);
            prop_assert!(ghi >= 0.0 && glo <= (g1 * g2).sqrt() * (1.0 + 1e-15));
        }

        #[test]
        fn detuning_maps_are_inverse(d1 in -1e3f64..1e3, d2 in -1e3f64..1e3, w in -1e3f64..1e3) {
            let back = delta1_from_delta(delta_from_delta1(d1, d2, w), d2, w);
            prop_assert!((back - d1).abs() <= 1e-12 * (1.0 + d1.abs() + d2.abs() + w.abs()));
        }
    }
}
