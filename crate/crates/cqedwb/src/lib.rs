//! Circuit-QED numerical workbench.
//!
//! A desk-scale calculator library for superconducting-qubit physics:
//! transmon/Cooper-pair-box spectra and flux tuning, qubit-cavity
//! Hamiltonians and dispersive quantities, dispersive/high-power readout,
//! flux-bias-line design math (Biot-Savart coupling, image-current
//! screening, circuit-admittance relaxation), single-qubit pulse-error
//! diagnostics (AllXY), joint-readout state and process tomography, the
//! three-qubit repetition code with entanglement witnesses, and
//! Kerr-cavity quantum optics.
//!
//! Conventions used throughout:
//! - energies and couplings are linear frequencies in GHz, times in ns;
//!   propagators carry the phase `exp(-i 2π H t)`;
//! - circuit and electromagnetic quantities are SI, with angular
//!   frequencies `ω = 2π f` inside all impedance/admittance formulas;
//! - all values are immutable after construction and every operation is
//!   a pure function.

pub mod cavity;
pub mod cqedspec;
pub mod error;
pub mod fluxdesign;
pub mod numkit;
pub mod pulsectl;
pub mod qec;
pub mod readout;
pub mod tomo;
pub mod transmon;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Physical constants pinned for reproducibility.
pub mod constants {
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = 1.054571817e-34;
    /// Planck constant, J s (2π ħ, exact SI value).
    pub const H_PLANCK: f64 = 6.62607015e-34;
    /// Magnetic flux quantum h/2e, Wb.
    pub const PHI0: f64 = 2.067833848e-15;
    /// Boltzmann constant, J/K.
    pub const K_BOLTZMANN: f64 = 1.380649e-23;
    /// Vacuum permeability, H/m (exactly 4π × 10⁻⁷ here).
    pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
}
