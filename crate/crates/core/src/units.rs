//! Conversion between wall units and SI.
//!
//! For a Robin wall lengths are measured in `|Lambda|`. Dirichlet and Neumann
//! walls have no intrinsic length, and the reduced Compton wavelength
//! `hbar / (m c)` is used instead. In both cases the energy unit is
//! `hbar^2 / (2 m L^2)` and the field unit `hbar^2 / (2 e m L^3)`, which keeps
//! the dimensionless Hamiltonian `-d^2/dx^2 - F x`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::BoundarySpec;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical scales of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitScale {
    /// `|Lambda|` in metres; `None` selects the Compton-wavelength convention.
    pub lambda_abs: Option<f64>,
    /// Particle mass in kg.
    pub mass: f64,
    /// Gravity instead of an electric field: `-e F` becomes `-m g`, fields
    /// are accelerations and dipoles are plain lengths.
    pub gravity: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    ToDimensionless,
    ToPhysical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuantityKind {
    Length,
    Energy,
    Field,
    Dipole,
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(QuantityKind::Length),
            "energy" => Ok(QuantityKind::Energy),
            "field" => Ok(QuantityKind::Field),
            "dipole" => Ok(QuantityKind::Dipole),
            other => Err(Error::Invalid(format!("unknown kind '{other}', expected length|energy|field|dipole"))),
        }
    }
}

impl UnitScale {
    /// Electron against a Robin wall with `|Lambda|` in metres.
    pub fn electron(lambda_abs: f64) -> Self {
        UnitScale { lambda_abs: Some(lambda_abs), mass: ELECTRON_MASS, gravity: false }
    }

    /// Electron in the Compton convention, for Dirichlet and Neumann walls.
    pub fn electron_compton() -> Self {
        UnitScale { lambda_abs: None, mass: ELECTRON_MASS, gravity: false }
    }

    fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || self.lambda_abs.is_some_and(|l| !(l > 0.0)) {
            return Err(Error::Invalid("mass and |Lambda| must be positive".into()));
        }
        Ok(())
    }

    /// Length unit in metres.
    pub fn length_unit(&self) -> f64 {
        self.lambda_abs.unwrap_or(HBAR / (self.mass * SPEED_OF_LIGHT))
    }

    /// Energy unit in joules.
    pub fn energy_unit(&self) -> f64 {
        let l = self.length_unit();
        HBAR * HBAR / (2.0 * self.mass * l * l)
    }

    /// Field unit in V/m, or m/s^2 in gravity mode.
    pub fn field_unit(&self) -> f64 {
        let charge = if self.gravity { self.mass } else { ELEMENTARY_CHARGE };
        self.energy_unit() / (charge * self.length_unit())
    }

    /// Dipole unit in C m, or m in gravity mode.
    pub fn dipole_unit(&self) -> f64 {
        if self.gravity {
            self.length_unit()
        } else {
            ELEMENTARY_CHARGE * self.length_unit()
        }
    }

    pub fn unit(&self, kind: QuantityKind) -> f64 {
        match kind {
            QuantityKind::Length => self.length_unit(),
            QuantityKind::Energy => self.energy_unit(),
            QuantityKind::Field => self.field_unit(),
            QuantityKind::Dipole => self.dipole_unit(),
        }
    }
}

/// Convert `value` of the given kind for a problem with boundary `bc`.
///
/// Robin walls need `|Lambda|`; Dirichlet and Neumann walls need the Compton
/// convention, since they carry no length of their own.
pub fn convert_units(
    scale: &UnitScale,
    bc: BoundarySpec,
    direction: Direction,
    value: f64,
    kind: QuantityKind,
) -> Result<f64> {
    scale.validate()?;
    match (bc.is_robin(), scale.lambda_abs.is_some()) {
        (true, false) => {
            return Err(Error::Invalid(format!("{bc} wall units are set by |Lambda|; give --lambda")))
        }
        (false, true) => {
            return Err(Error::Invalid(format!(
                "{bc} wall has no extrapolation length; use the Compton convention"
            )))
        }
        _ => {}
    }
    let unit = scale.unit(kind);
    Ok(match direction {
        Direction::ToPhysical => value * unit,
        Direction::ToDimensionless => value / unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nanometre_field_unit() {
        let u = UnitScale::electron(1e-9);
        assert!((u.field_unit() / 3.81e7 - 1.0).abs() < 1e-3, "{}", u.field_unit());
        let one = convert_units(&u, BoundarySpec::RobinMinus, Direction::ToDimensionless, 1e-9, QuantityKind::Length)
            .unwrap();
        assert!((one - 1.0).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let scales = [UnitScale::electron(2.5e-9), UnitScale::electron_compton()];
        let bcs = [BoundarySpec::RobinPlus, BoundarySpec::Dirichlet];
        for (u, bc) in scales.iter().zip(bcs) {
            for kind in [QuantityKind::Length, QuantityKind::Energy, QuantityKind::Field, QuantityKind::Dipole] {
                let x = 0.731;
                let p = convert_units(u, bc, Direction::ToPhysical, x, kind).unwrap();
                let back = convert_units(u, bc, Direction::ToDimensionless, p, kind).unwrap();
                assert!((back - x).abs() < 1e-12 * x);
            }
        }
    }

    #[test]
    fn compton_convention_required_for_dirichlet() {
        let u = UnitScale::electron(1e-9);
        assert!(convert_units(&u, BoundarySpec::Neumann, Direction::ToPhysical, 1.0, QuantityKind::Energy).is_err());
        let c = UnitScale::electron_compton();
        assert!(convert_units(&c, BoundarySpec::RobinMinus, Direction::ToPhysical, 1.0, QuantityKind::Energy).is_err());
        // hbar^2 / (2 m lambdabar^2) = m c^2 / 2
        let mc2 = ELECTRON_MASS * SPEED_OF_LIGHT * SPEED_OF_LIGHT;
        assert!((c.energy_unit() / (0.5 * mc2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gravity_mode_uses_mass() {
        let g = UnitScale { lambda_abs: Some(1e-6), mass: 1.674_927_498e-27, gravity: true };
        let expected = HBAR * HBAR / (2.0 * g.mass * g.mass * 1e-18);
        assert!((g.field_unit() / expected - 1.0).abs() < 1e-12);
    }
}
