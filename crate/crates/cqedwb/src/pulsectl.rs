//! Single-qubit rotations, pulse-error models, and the AllXY diagnostic.
//!
//! Pulses are instantaneous ideal rotations R = cos(θ/2)I - i sin(θ/2) n̂·σ⃗.
//! The error model covers amplitude (dB power), detuning (a fixed σz
//! generator addition per pulse), axis skew and x/y amplitude imbalance.

use num_complex::Complex64;

use crate::numkit::{sigma_x, sigma_y, sigma_z, ComplexMatrix, StateVector};
use crate::{Error, Result};

/// Rotation by `angle_rad` about the unit axis `axis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub axis: [f64; 3],
    pub angle_rad: f64,
}

impl Rotation {
    pub fn new(axis: [f64; 3], angle_rad: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !norm.is_finite() || norm < 1e-12 || !angle_rad.is_finite() {
            return Err(Error::InvalidInput("rotation axis/angle invalid".into()));
        }
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "axis norm {norm} deviates from 1 by more than 1e-12"
            )));
        }
        Ok(Rotation { axis, angle_rad })
    }

    /// Normalizes the axis for you.
    pub fn about(axis: [f64; 3], angle_rad: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::InvalidInput("zero rotation axis".into()));
        }
        Self::new(
            [axis[0] / norm, axis[1] / norm, axis[2] / norm],
            angle_rad,
        )
    }

    pub fn x(angle_rad: f64) -> Self {
        Rotation {
            axis: [1.0, 0.0, 0.0],
            angle_rad,
        }
    }

    pub fn y(angle_rad: f64) -> Self {
        Rotation {
            axis: [0.0, 1.0, 0.0],
            angle_rad,
        }
    }

    pub fn z(angle_rad: f64) -> Self {
        Rotation {
            axis: [0.0, 0.0, 1.0],
            angle_rad,
        }
    }
}

/// (cos θ/2, sin θ/2) with exact values at θ ∈ {0, ±π/2, ±π, ±2π}.
fn half_angle_trig(theta: f64) -> (f64, f64) {
    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
    if theta == 0.0 {
        (1.0, 0.0)
    } else if theta == std::f64::consts::FRAC_PI_2 {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else if theta == -std::f64::consts::FRAC_PI_2 {
        (FRAC_1_SQRT_2, -FRAC_1_SQRT_2)
    } else if theta == std::f64::consts::PI {
        (0.0, 1.0)
    } else if theta == -std::f64::consts::PI {
        (0.0, -1.0)
    } else if theta == 2.0 * std::f64::consts::PI {
        (-1.0, 0.0)
    } else {
        ((theta / 2.0).cos(), (theta / 2.0).sin())
    }
}

/// Rotation unitary cos(θ/2)I - i sin(θ/2)(n̂·σ⃗).
pub fn rotation_unitary(r: &Rotation) -> ComplexMatrix {
    let (c, s) = half_angle_trig(r.angle_rad);
    let ns = &(&sigma_x().scale_re(r.axis[0]) + &sigma_y().scale_re(r.axis[1]))
        + &sigma_z().scale_re(r.axis[2]);
    &ComplexMatrix::identity(2).scale_re(c) + &ns.scale(Complex64::new(0.0, -s))
}

/// Excited-state probability P_e(t) = sin²(πΩt) of a resonant Rabi drive
/// H = (Ω/2)σx in the exp(-i2πHt) phase convention.
pub fn rabi_trace(omega_ghz: f64, t_grid_ns: &[f64]) -> Vec<f64> {
    t_grid_ns
        .iter()
        .map(|t| (std::f64::consts::PI * omega_ghz * t).sin().powi(2))
        .collect()
}

/// Single-qubit pulse-error model.
///
/// - `power_db`: amplitude error; every rotation angle is scaled by
///   10^(power_db/20).
/// - `detuning_frac`: the dimensionless detuning-duration product ε; each
///   pulse's generator gains a fixed (π/2)·ε·σz term, the static-axis
///   approximation of driving off resonance at fixed gate duration.
/// - `skew_rad`: y-axis tilt toward x (mixer quadrature skew).
/// - `amp_imbalance`: multiplicative scale on x-rotation angles only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseErrorModel {
    pub power_db: f64,
    pub detuning_frac: f64,
    pub skew_rad: f64,
    pub amp_imbalance: f64,
}

impl PulseErrorModel {
    pub fn none() -> Self {
        PulseErrorModel {
            power_db: 0.0,
            detuning_frac: 0.0,
            skew_rad: 0.0,
            amp_imbalance: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.power_db, self.detuning_frac, self.skew_rad, self.amp_imbalance]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidInput("non-finite pulse error".into()));
        }
        Ok(())
    }

    fn is_none(&self) -> bool {
        self.power_db == 0.0
            && self.detuning_frac == 0.0
            && self.skew_rad == 0.0
            && self.amp_imbalance == 1.0
    }
}

fn is_x_axis(axis: &[f64; 3]) -> bool {
    axis[1] == 0.0 && axis[2] == 0.0
}

fn is_y_axis(axis: &[f64; 3]) -> bool {
    axis[0] == 0.0 && axis[2] == 0.0
}

/// The erroneous unitary for a base rotation under an error model.
///
/// Power scales θ, imbalance scales x-pulses, skew tilts y-pulses toward
/// x, and detuning adds a fixed (π/2)·ε σz term to the pulse generator;
/// the summed generator is renormalized (axis and angle together) and
/// exponentiated exactly. Rotations already along z commute with the
/// detuning term and are unaffected by it.
pub fn apply_error(r: &Rotation, e: &PulseErrorModel) -> ComplexMatrix {
    if e.is_none() {
        return rotation_unitary(r);
    }
    let mut theta = r.angle_rad * 10f64.powf(e.power_db / 20.0);
    let mut axis = r.axis;
    if is_x_axis(&axis) {
        theta *= e.amp_imbalance;
    } else if is_y_axis(&axis) && e.skew_rad != 0.0 {
        let sign = axis[1].signum();
        axis = [sign * e.skew_rad.sin(), sign * e.skew_rad.cos(), 0.0];
    }
    // generator vector G = θ·n̂ + (π/2)ε ẑ; zero-length pulses stay ideal
    // so a bare identity slot is immune to detuning
    let mut g = [axis[0] * theta, axis[1] * theta, axis[2] * theta];
    if theta != 0.0 {
        g[2] += std::f64::consts::FRAC_PI_2 * e.detuning_frac;
    }
    let angle = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    if angle < 1e-300 {
        return ComplexMatrix::identity(2);
    }
    rotation_unitary(&Rotation {
        axis: [g[0] / angle, g[1] / angle, g[2] / angle],
        angle_rad: angle,
    })
}

/// The five pulses appearing in the AllXY sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllXyPulse {
    /// Identity (no pulse).
    Id,
    /// X(π).
    Xp,
    /// X(π/2).
    X9,
    /// Y(π).
    Yp,
    /// Y(π/2).
    Y9,
}

impl AllXyPulse {
    pub fn label(&self) -> &'static str {
        match self {
            AllXyPulse::Id => "Id",
            AllXyPulse::Xp => "Xp",
            AllXyPulse::X9 => "X9",
            AllXyPulse::Yp => "Yp",
            AllXyPulse::Y9 => "Y9",
        }
    }

    pub fn rotation(&self) -> Option<Rotation> {
        match self {
            AllXyPulse::Id => None,
            AllXyPulse::Xp => Some(Rotation::x(std::f64::consts::PI)),
            AllXyPulse::X9 => Some(Rotation::x(std::f64::consts::FRAC_PI_2)),
            AllXyPulse::Yp => Some(Rotation::y(std::f64::consts::PI)),
            AllXyPulse::Y9 => Some(Rotation::y(std::f64::consts::FRAC_PI_2)),
        }
    }
}

/// The 21 AllXY pulse pairs in table order: ground-state block, equator
/// block ordered by over-rotation sensitivity, excited-state block.
pub const ALLXY_SEQUENCE: [(AllXyPulse, AllXyPulse); 21] = {
    use AllXyPulse::*;
    [
        (Id, Id),
        (Xp, Xp),
        (Yp, Yp),
        (Xp, Yp),
        (Yp, Xp),
        (X9, Id),
        (Y9, Id),
        (X9, Y9),
        (Y9, X9),
        (X9, Yp),
        (Y9, Xp),
        (Xp, Y9),
        (Yp, X9),
        (X9, Xp),
        (Xp, X9),
        (Y9, Yp),
        (Yp, Y9),
        (Xp, Id),
        (Yp, Id),
        (X9, X9),
        (Y9, Y9),
    ]
};

/// Ideal ⟨z⟩ per sequence: five +1, twelve 0, four -1.
pub const ALLXY_IDEAL: [f64; 21] = [
    1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0,
    -1.0, -1.0, -1.0,
];

/// Leading power-error slope d⟨z⟩/dε per sequence (ε = π/2-pulse
/// over-rotation angle). Rows without a linear term are 0.
pub const ALLXY_POWER_SLOPES: [f64; 21] = [
    0.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 3.0, 0.0,
    0.0, 0.0, 0.0,
];

/// Leading detuning-error slope d⟨z⟩/dε per sequence (ε = 2πΔδt).
pub const ALLXY_DETUNING_SLOPES: [f64; 21] = [
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -2.0, 2.0, -1.0, 1.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
    0.0, 0.0, 0.0,
];

/// Result of one AllXY batch.
#[derive(Debug, Clone, PartialEq)]
pub struct AllXyResult {
    /// "first,second" labels in table order.
    pub labels: Vec<String>,
    pub z: Vec<f64>,
    pub ideal: Vec<f64>,
}

impl AllXyResult {
    /// Deviation from the ideal column.
    pub fn deviation(&self) -> Vec<f64> {
        self.z.iter().zip(self.ideal.iter()).map(|(a, b)| a - b).collect()
    }
}

/// Runs all 21 sequences on |0⟩ with the given error model and returns
/// ⟨z⟩ per sequence.
pub fn allxy_simulate(e: &PulseErrorModel) -> Result<AllXyResult> {
    e.validate()?;
    let ground = StateVector::basis(2, 0);
    let sz = sigma_z();
    let mut labels = Vec::with_capacity(21);
    let mut z = Vec::with_capacity(21);
    for (first, second) in ALLXY_SEQUENCE {
        let mut psi = ground.clone();
        for pulse in [first, second] {
            if let Some(rot) = pulse.rotation() {
                psi = psi.apply(&apply_error(&rot, e));
            }
        }
        labels.push(format!("{},{}", first.label(), second.label()));
        z.push(psi.expectation(&sz));
    }
    Ok(AllXyResult {
        labels,
        z,
        ideal: ALLXY_IDEAL.to_vec(),
    })
}

/// Least-squares decomposition of an AllXY deviation onto the analytic
/// power and detuning syndrome directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyndromeFit {
    /// Coefficient in units of ε (power).
    pub power: f64,
    /// Coefficient in units of ε (detuning).
    pub detuning: f64,
    /// L2 norm of the residual after the projection.
    pub residual: f64,
}

/// Projects the deviation-from-ideal onto the precomputed unit syndrome
/// vectors generated from the table's analytic derivatives.
pub fn allxy_syndrome_fit(result: &AllXyResult) -> Result<SyndromeFit> {
    if result.z.len() != 21 || result.ideal.len() != 21 {
        return Err(Error::DimMismatch {
            expected: 21,
            got: result.z.len(),
        });
    }
    let dev = result.deviation();
    let vp = ALLXY_POWER_SLOPES;
    let vd = ALLXY_DETUNING_SLOPES;
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let (gpp, gdd, gpd) = (dot(&vp, &vp), dot(&vd, &vd), dot(&vp, &vd));
    let det = gpp * gdd - gpd * gpd;
    if det.abs() < 1e-6 * gpp * gdd {
        return Err(Error::DegenerateBasis);
    }
    let (bp, bd) = (dot(&dev, &vp), dot(&dev, &vd));
    let power = (gdd * bp - gpd * bd) / det;
    let detuning = (gpp * bd - gpd * bp) / det;
    let residual = dev
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let fit = power * vp[i] + detuning * vd[i];
            (d - fit) * (d - fit)
        })
        .sum::<f64>()
        .sqrt();
    Ok(SyndromeFit {
        power,
        detuning,
        residual,
    })
}

/// Maps a power ε (π/2-pulse over-rotation, radians) to the equivalent dB
/// error: θ → θ(1 + 2ε/π).
pub fn power_eps_to_db(eps: f64) -> f64 {
    20.0 * (1.0 + eps / std::f64::consts::FRAC_PI_2).log10()
}
