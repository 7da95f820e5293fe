//! Named parameter sets reproducing each published dataset.
//!
//! | name       | system | γ1   | γ3   | Ω2 = Ω3   | W12     | θ    |
//! |------------|--------|------|------|-----------|---------|------|
//! | fig2a      | Y      | 0.01 | 0.01 | 4/√2      | −4      | 90°  |
//! | fig2b      | Y      | 0.01 | 0.01 | 4/√2      | −4      | 15°  |
//! | fig3/fig4  | Y      | 0.01 | 0.01 | 0.75/√2   | −0.75   | 15°  |
//! | fig5b      | V      | 0.01 | –    | Ω2 = 4    | −4      | 15°  |
//! | fig5c      | V      | 0.01 | –    | Ω2 = 2    | −2      | 15°  |
//! | fig6/fig7  | Y      | as fig2b                                   |
//! | fig8       | Y      | 5    | 0.01 | 30/√2     | −30     | 10°  |
//! | fig8-perp  | Y      | 5    | 0.01 | 30/√2     | −30     | 90°  |
//!
//! All sets use γ2 = 1, zero pump detunings and Φ = 0.

use crate::error::{Error, Result};
use crate::params::{ParamsRecord, SystemKind, SystemParams};

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub params: SystemParams,
}

pub const PRESET_NAMES: [&str; 11] = [
    "fig2a", "fig2b", "fig3", "fig4", "fig5b", "fig5c", "fig6", "fig7", "fig8", "fig8-perp", "fig8-weak",
];

fn y(gamma1: f64, omega: f64, theta_deg: f64) -> ParamsRecord {
    let rabi = omega / 2f64.sqrt();
    ParamsRecord {
        gamma1,
        gamma2: 1.0,
        gamma3: 0.01,
        theta_deg,
        gamma12: None,
        w12: -(2.0 * rabi * rabi).sqrt(),
        omega1: 0.0,
        omega2: rabi,
        omega3: rabi,
        delta2: 0.0,
        delta3: 0.0,
        phi: 0.0,
        system_kind: SystemKind::YFourLevel,
    }
}

fn v(omega2: f64) -> ParamsRecord {
    ParamsRecord {
        gamma1: 0.01,
        gamma2: 1.0,
        gamma3: 0.0,
        theta_deg: 15.0,
        gamma12: None,
        w12: -omega2,
        omega1: 0.0,
        omega2,
        omega3: 0.0,
        delta2: 0.0,
        delta3: 0.0,
        phi: 0.0,
        system_kind: SystemKind::VThreeLevel,
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    let (name, description, record) = match name {
        "fig2a" => ("fig2a", "Autler-Townes doublet without interference", y(0.01, 4.0, 90.0)),
        "fig2b" => ("fig2b", "gain doublet with interference", y(0.01, 4.0, 15.0)),
        "fig3" => ("fig3", "closely spaced gain doublet", y(0.01, 0.75, 15.0)),
        "fig4" => ("fig4", "interference sweep base (fig3 parameters)", y(0.01, 0.75, 15.0)),
        "fig5b" => ("fig5b", "V system, Omega2 = 4", v(4.0)),
        "fig5c" => ("fig5c", "V system, Omega2 = 2", v(2.0)),
        "fig6" => ("fig6", "pump-only populations (fig2b parameters)", y(0.01, 4.0, 15.0)),
        "fig7" => ("fig7", "secular dressed-state dynamics (fig2b parameters)", y(0.01, 4.0, 15.0)),
        "fig8" => ("fig8", "pump coherence with interference", y(5.0, 30.0, 10.0)),
        "fig8-perp" => ("fig8-perp", "pump coherence without interference", y(5.0, 30.0, 90.0)),
        "fig8-weak" => ("fig8-weak", "pump coherence at a weaker pump, Omega = 20", y(5.0, 20.0, 10.0)),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(Preset { name, description, params: SystemParams::new(record)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_resolves() {
        for name in PRESET_NAMES {
            let p = preset(name).unwrap();
            assert_eq!(p.name, name);
        }
        assert!(matches!(preset("fig9"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn caption_values() {
        let p = preset("fig2b").unwrap().params;
        assert!((p.w12() + 4.0).abs() < 1e-14);
        assert!((p.omega2() - 4.0 / 2f64.sqrt()).abs() < 1e-15);
        let p = preset("fig3").unwrap().params;
        assert!((p.w12() + 0.75).abs() < 1e-14);
        let p = preset("fig5c").unwrap().params;
        assert_eq!((p.w12(), p.omega2(), p.kind()), (-2.0, 2.0, SystemKind::VThreeLevel));
        let p = preset("fig8").unwrap().params;
        assert!((p.w12() + 30.0).abs() < 1e-12);
        assert_eq!(p.gamma1(), 5.0);
    }
}
