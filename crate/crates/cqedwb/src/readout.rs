//! Dispersive measurement response, SNR estimation, and the semiclassical
//! bright-state equation of the driven Jaynes-Cummings cavity.
//!
//! Inputs are linear frequencies (GHz); formula internals use angular
//! frequencies ω = 2πf, so κ enters as an angular rate.

use num_complex::Complex64;

use crate::constants::{HBAR, K_BOLTZMANN};
use crate::{Error, Result};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Dispersive-readout operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutParams {
    /// Intracavity drive amplitude ε_rf (angular units, rad/ns · √photons).
    pub eps_rf: f64,
    /// Drive detuning δ_rf from the reference cavity frequency, GHz.
    pub delta_rf_ghz: f64,
    /// Dispersive shift χ, GHz.
    pub chi_ghz: f64,
    pub kappa_in_ghz: f64,
    pub kappa_out_ghz: f64,
    /// Usable integration window, seconds (of order the qubit T1).
    pub t1_s: f64,
    /// Mean cavity photon number during measurement.
    pub n_bar: f64,
    /// Amplifier chain noise temperature, kelvin.
    pub tn_k: f64,
    /// Cavity frequency, GHz.
    pub omega_r_ghz: f64,
}

impl ReadoutParams {
    pub fn validate(&self) -> Result<()> {
        if self.kappa_in_ghz < 0.0 || self.kappa_out_ghz < 0.0 {
            return Err(Error::InvalidInput("κ must be >= 0".into()));
        }
        if !(self.t1_s > 0.0) {
            return Err(Error::InvalidInput("T1 must be > 0".into()));
        }
        if self.n_bar < 0.0 {
            return Err(Error::InvalidInput("n̄ must be >= 0".into()));
        }
        Ok(())
    }

    fn kappa_tot_angular(&self) -> f64 {
        TAU * (self.kappa_in_ghz + self.kappa_out_ghz)
    }
}

/// Steady-state coherent amplitude α± = ε_rf / (κ_tot/2 + i(δ_rf ± χ)) for
/// qubit state ±1 (angular internals).
pub fn dispersive_alpha(p: &ReadoutParams, qubit: i8) -> Complex64 {
    let sign = if qubit >= 0 { 1.0 } else { -1.0 };
    let denom = Complex64::new(
        p.kappa_tot_angular() / 2.0,
        TAU * (p.delta_rf_ghz + sign * p.chi_ghz),
    );
    Complex64::new(p.eps_rf, 0.0) / denom
}

/// Gaussian-overlap distinguishability D = e^{-|α₊ - α₋|²} ∈ (0, 1].
pub fn distinguishability(p: &ReadoutParams) -> f64 {
    let d2 = (dispersive_alpha(p, 1) - dispersive_alpha(p, -1)).norm_sqr();
    (-d2).exp()
}

/// Dispersive-measurement signal-to-noise ratio
/// SNR = ⟨n⟩ ħω_r sin²θ T₁ κ / (k_B T_N) with θ = atan(2χ/κ).
///
/// ω_r and κ are converted to angular rad/s internally. The source
/// arithmetic for this estimate is schematic, so absolute values carry
/// order-of-magnitude meaning; ratios in ⟨n⟩, T₁ and 1/T_N are exact.
pub fn measurement_snr(p: &ReadoutParams) -> Result<f64> {
    p.validate()?;
    let kappa = p.kappa_tot_angular() * 1e9; // rad/s
    let omega_r = TAU * p.omega_r_ghz * 1e9; // rad/s
    let theta = if kappa > 0.0 {
        (2.0 * TAU * p.chi_ghz * 1e9 / kappa).atan()
    } else {
        std::f64::consts::FRAC_PI_2
    };
    let e_signal = p.n_bar * HBAR * omega_r * theta.sin().powi(2) * p.t1_s * kappa;
    Ok(e_signal / (K_BOLTZMANN * p.tn_k))
}

/// Semiclassical bright-state model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightStateParams {
    pub g_ghz: f64,
    /// Qubit-cavity detuning δ, GHz.
    pub delta_ghz: f64,
    /// Cavity linewidth κ, GHz.
    pub kappa_ghz: f64,
    pub omega_r_ghz: f64,
    /// Qubit state: +1 or -1.
    pub sigma_z: i8,
}

impl BrightStateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g_ghz > 0.0) {
            return Err(Error::InvalidInput("g must be > 0".into()));
        }
        if self.sigma_z != 1 && self.sigma_z != -1 {
            return Err(Error::InvalidInput("σz must be ±1".into()));
        }
        Ok(())
    }
}

/// Amplitude-dependent dispersive shift
/// χ(A) = σz g² / √(2g²(A² + σz) + δ²), returned in GHz.
///
/// For σz = -1 the square-root argument crosses zero at
/// A² = 1 - δ²/2g²; inputs below that bound are a domain error (reported,
/// never NaN).
pub fn chi_of_amplitude(b: &BrightStateParams, a2: f64) -> Result<f64> {
    b.validate()?;
    if a2 < 0.0 {
        return Err(Error::InvalidInput("A² must be >= 0".into()));
    }
    let g = TAU * b.g_ghz;
    let delta = TAU * b.delta_ghz;
    let sz = b.sigma_z as f64;
    let arg = 2.0 * g * g * (a2 + sz) + delta * delta;
    if arg <= 0.0 {
        return Err(Error::DomainError(format!(
            "χ(A) undefined: 2g²(A²+σz)+δ² = {arg:.3e} <= 0"
        )));
    }
    Ok(sz * g * g / arg.sqrt() / TAU)
}

/// One steady-state solution of the bright-state equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightRoot {
    /// Photon amplitude squared A².
    pub a2: f64,
    /// Fixed-point residual |A² - rhs(A²)|.
    pub residual: f64,
    /// Of three coexisting roots the middle one is dynamically unstable
    /// (standard Duffing convention).
    pub stable: bool,
}

/// Default search ceiling for A².
pub const A2_MAX_DEFAULT: f64 = 1e4;

fn bright_rhs(b: &BrightStateParams, xi: f64, omega_d_ghz: f64, a2: f64) -> Result<f64> {
    let wr = TAU * b.omega_r_ghz;
    let wd = TAU * omega_d_ghz;
    let kappa = TAU * b.kappa_ghz;
    let chi = TAU * chi_of_amplitude(b, a2)?;
    let bracket = wd * wd - (wr - chi) * (wr - chi);
    Ok(wr * wr * xi * xi / (bracket * bracket + kappa * kappa * wd * wd))
}

/// All real nonnegative steady-state amplitudes A² of
/// A² = ω_r²ξ² / ({ω_d² - [ω_r - χ(A)]²}² + κ²ω_d²).
///
/// Roots are located by a sign-change scan of the fixed-point residual
/// over 2000 log-spaced points in (0, a2_max] followed by bisection;
/// multiple roots mark a bistable drive condition. ξ is the drive in the
/// same angular units as ω (rad/ns).
pub fn bright_state_solve(
    b: &BrightStateParams,
    xi: f64,
    omega_d_ghz: f64,
    a2_max: f64,
) -> Result<Vec<BrightRoot>> {
    b.validate()?;
    if xi < 0.0 {
        return Err(Error::InvalidInput("drive ξ must be >= 0".into()));
    }
    let g = TAU * b.g_ghz;
    let delta = TAU * b.delta_ghz;
    // domain floor for σz = -1: need 2g²(A²+σz)+δ² > 0
    let a2_floor = if b.sigma_z < 0 {
        (1.0 - delta * delta / (2.0 * g * g)).max(0.0) * (1.0 + 1e-9)
    } else {
        0.0
    };
    let resid = |a2: f64| -> Result<f64> { Ok(a2 - bright_rhs(b, xi, omega_d_ghz, a2)?) };

    if xi == 0.0 {
        let a2 = a2_floor;
        return Ok(vec![BrightRoot {
            a2,
            residual: resid(a2)?.abs(),
            stable: true,
        }]);
    }

    const SCAN: usize = 2000;
    let lo = (a2_floor + 1e-12).max(1e-12);
    let hi = a2_max.max(lo * 10.0);
    let grid: Vec<f64> = (0..=SCAN)
        .map(|i| lo * (hi / lo).powf(i as f64 / SCAN as f64))
        .collect();
    let mut roots: Vec<f64> = Vec::new();
    let mut prev = resid(grid[0])?;
    for w in grid.windows(2) {
        let cur = resid(w[1])?;
        if prev == 0.0 {
            roots.push(w[0]);
        } else if prev * cur < 0.0 {
            roots.push(bisect(&resid, w[0], w[1])?);
        }
        prev = cur;
    }
    if roots.is_empty() {
        // the residual never changed sign on the grid; the single root sits
        // below the first grid point (rhs tiny) — refine from the floor
        roots.push(bisect(&resid, a2_floor, grid[0].max(a2_floor + 1e-9))?);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-9 * (1.0 + y.abs()));
    let n = roots.len();
    let out: Vec<BrightRoot> = roots
        .into_iter()
        .enumerate()
        .map(|(i, a2)| {
            let residual = resid(a2).map(|r| r.abs()).unwrap_or(f64::NAN);
            BrightRoot {
                a2,
                residual,
                stable: !(n == 3 && i == 1),
            }
        })
        .collect();
    for r in &out {
        if !r.residual.is_finite() || r.residual > 1e-10 * (1.0 + r.a2) {
            return Err(Error::NoConvergence {
                residual: r.residual,
            });
        }
    }
    Ok(out)
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid)?;
        if fmid == 0.0 {
            return Ok(mid);
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    Ok(0.5 * (lo + hi))
}
