//! Array configuration and the conversion between the dimensionless core
//! (lengths in `1/omega0`, times in `1/gamma0`) and SI units.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernels::{Phase, PhaseReducer};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// `N` atoms on a line with spacing `d = beta * lambda0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    n_atoms: u64,
    beta: f64,
}

impl ArrayGeometry {
    pub fn new(n_atoms: u64, beta: f64) -> Result<Self> {
        if n_atoms < 2 {
            return Err(invalid(format!("an array needs at least two atoms, got N = {n_atoms}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(invalid(format!("spacing ratio beta must be positive and finite, got {beta}")));
        }
        Ok(ArrayGeometry { n_atoms, beta })
    }

    /// Like [`ArrayGeometry::new`] but also admits a single atom, which has no
    /// pairs and therefore zero shape factors.
    pub fn with_single(n_atoms: u64, beta: f64) -> Result<Self> {
        if n_atoms == 1 && beta.is_finite() && beta > 0.0 {
            return Ok(ArrayGeometry { n_atoms, beta });
        }
        Self::new(n_atoms, beta)
    }

    pub fn n_atoms(&self) -> u64 {
        self.n_atoms
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `x_m = 2*pi*beta*|m|`, reduced exactly when `beta` is rational.
    pub fn pair_phase(&self, m: i64) -> Phase {
        PhaseReducer::new(self.beta).phase(m.unsigned_abs())
    }

    pub fn reducer(&self) -> PhaseReducer {
        PhaseReducer::new(self.beta)
    }
}

pub fn make_array(n_atoms: u64, beta: f64) -> Result<ArrayGeometry> {
    ArrayGeometry::new(n_atoms, beta)
}

/// Whether a quoted "frequency" is angular (rad/s) or ordinary (Hz).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyConvention {
    #[default]
    Angular,
    Ordinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicTransition {
    omega0: f64,
    gamma0: f64,
    lambda0: f64,
}

impl AtomicTransition {
    /// `omega0` in rad/s, `gamma0` in 1/s.
    pub fn new(omega0: f64, gamma0: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(invalid(format!("transition frequency must be positive, got {omega0}")));
        }
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(invalid(format!("spontaneous rate must be positive, got {gamma0}")));
        }
        let lambda0 = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega0;
        Ok(AtomicTransition { omega0, gamma0, lambda0 })
    }

    /// Transition specified by its vacuum wavelength in meters.
    pub fn from_wavelength(lambda0: f64, gamma0: f64) -> Result<Self> {
        if !(lambda0.is_finite() && lambda0 > 0.0) {
            return Err(invalid(format!("wavelength must be positive, got {lambda0}")));
        }
        let omega0 = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / lambda0;
        Self::new(omega0, gamma0).map(|t| AtomicTransition { lambda0, ..t })
    }

    /// Angular transition frequency, rad/s.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `omega0` expressed in the requested convention.
    pub fn frequency(&self, convention: FrequencyConvention) -> f64 {
        match convention {
            FrequencyConvention::Angular => self.omega0,
            FrequencyConvention::Ordinary => self.omega0 / (2.0 * std::f64::consts::PI),
        }
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Coupling constant implied by `gamma0 = g^2 omega0 / (8 pi)`.
    pub fn coupling(&self) -> f64 {
        (8.0 * std::f64::consts::PI * self.gamma0 / self.omega0).sqrt()
    }
}

/// `omega / omega0` for a GW angular frequency `gw_freq`.
pub fn omega_bar_of(tr: &AtomicTransition, gw_freq: f64) -> Result<f64> {
    omega_bar_with(tr, gw_freq, FrequencyConvention::Angular)
}

/// `omega / omega0` with `gw_freq` quoted in `convention` and compared to the
/// transition frequency in the same convention.
pub fn omega_bar_with(tr: &AtomicTransition, gw_freq: f64, convention: FrequencyConvention) -> Result<f64> {
    let ratio = gw_freq / tr.frequency(convention);
    if !(gw_freq > 0.0 && ratio < 1.0) {
        return Err(Error::OutsidePerturbativeRegime { omega_bar: ratio });
    }
    Ok(ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GwSignal {
    h_plus: f64,
    omega_bar: f64,
}

impl GwSignal {
    pub fn new(h_plus: f64, omega_bar: f64) -> Result<Self> {
        if !(h_plus.is_finite() && h_plus >= 0.0) {
            return Err(invalid(format!("strain amplitude must be nonnegative, got {h_plus}")));
        }
        check_omega_bar(omega_bar)?;
        Ok(GwSignal { h_plus, omega_bar })
    }

    pub fn h_plus(&self) -> f64 {
        self.h_plus
    }

    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }
}

pub(crate) fn check_omega_bar(omega_bar: f64) -> Result<()> {
    if omega_bar > 0.0 && omega_bar < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsidePerturbativeRegime { omega_bar })
    }
}

/// Bloch angles of the identical single-atom initial states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    theta0: f64,
    phi0: f64,
}

impl InitialState {
    pub fn new(theta0: f64, phi0: f64) -> Result<Self> {
        check_theta0(theta0)?;
        Ok(InitialState { theta0, phi0 })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }
}

pub(crate) fn check_theta0(theta0: f64) -> Result<()> {
    if (0.0..std::f64::consts::PI).contains(&theta0) {
        Ok(())
    } else {
        Err(invalid(format!("theta0 must lie in [0, pi), got {theta0}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalArray {
    /// End-to-end length `(N - 1) d`, meters.
    pub length: f64,
    /// Retardation parameter `L gamma0 / c`.
    pub xi: f64,
    /// Bath correlation time `L / c`, seconds.
    pub bath_time: f64,
}

pub fn to_physical(geom: &ArrayGeometry, tr: &AtomicTransition) -> PhysicalArray {
    let length = (geom.n_atoms() - 1) as f64 * geom.beta() * tr.lambda0();
    PhysicalArray { length, xi: length * tr.gamma0() / SPEED_OF_LIGHT, bath_time: length / SPEED_OF_LIGHT }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_arrays() {
        assert!(make_array(1, 1.0).is_err());
        assert!(make_array(2, 0.0).is_err());
        assert!(make_array(2, f64::NAN).is_err());
        assert!(ArrayGeometry::with_single(1, 1.0).is_ok());
    }

    #[test]
    fn pair_phases() {
        let g = make_array(3, 1.0).unwrap();
        assert_eq!(g.pair_phase(1).value(), 2.0 * PI);
        assert_eq!(g.pair_phase(2).value(), 4.0 * PI);
        assert_eq!(g.pair_phase(-2).value(), 4.0 * PI);
        let g = make_array(2, 0.25).unwrap();
        assert_eq!(g.pair_phase(1).value(), PI / 2.0);
        let g = make_array(5, 0.33).unwrap();
        assert!((g.pair_phase(4).value() - 2.64 * PI).abs() < 1e-14);
    }

    #[test]
    fn omega_bar_examples() {
        let tr = AtomicTransition::new(1e14, 1.0).unwrap();
        assert!((omega_bar_of(&tr, 1e2).unwrap() - 1e-12).abs() < 1e-26);
        assert!((omega_bar_of(&tr, 1e6).unwrap() - 1e-8).abs() < 1e-22);
        assert_eq!(omega_bar_of(&tr, 0.5e14).unwrap(), 0.5);
        assert!(omega_bar_of(&tr, 1e14).is_err());
        let hz = omega_bar_with(&tr, 1e2, FrequencyConvention::Ordinary).unwrap();
        assert!((hz / 1e-12 - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn wavelength_roundtrip() {
        let tr = AtomicTransition::from_wavelength(791e-9, 2.5e4).unwrap();
        assert_eq!(tr.lambda0(), 791e-9);
        assert!((tr.omega0() - 2.3813e15).abs() / 2.38e15 < 1e-3);
        let g2 = tr.coupling().powi(2) * tr.omega0() / (8.0 * PI);
        assert!((g2 - 2.5e4).abs() < 1e-9);
    }

    #[test]
    fn theta_range() {
        assert!(InitialState::new(0.8 * PI, 0.0).is_ok());
        assert!(InitialState::new(PI, 0.0).is_err());
        assert!(GwSignal::new(1e-21, 1.0).is_err());
    }
}
