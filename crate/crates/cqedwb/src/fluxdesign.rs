//! Flux-bias-line engineering math: Biot-Savart coupling of a finite wire
//! segment to a rectangular loop, image-current screening between
//! superconducting plates, and qubit relaxation through the line's circuit
//! admittance.
//!
//! Geometry is SI (meters, amperes, webers); circuit formulas take angular
//! frequency ω = 2πf in rad/s.

use num_complex::Complex64;

use crate::constants::{MU0, PHI0};
use crate::{Error, Result};

/// Wire-segment/pickup-loop geometry.
///
/// A segment of length L carries current I along x; the W×H loop sits at
/// in-plane distance D (near edge), optionally at altitude A out of plane
/// and lateral offset O. `plate_gap_w_m` is the superconducting plate
/// separation used for image screening (`f64::INFINITY` = no walls).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FblGeometry {
    pub seg_len_l_m: f64,
    pub dist_d_m: f64,
    pub width_w_m: f64,
    pub height_h_m: f64,
    pub altitude_a_m: f64,
    pub offset_o_m: f64,
    pub current_i_a: f64,
    pub plate_gap_w_m: f64,
}

impl FblGeometry {
    pub fn new(
        seg_len_l_m: f64,
        dist_d_m: f64,
        width_w_m: f64,
        height_h_m: f64,
        current_i_a: f64,
    ) -> Result<Self> {
        let g = FblGeometry {
            seg_len_l_m,
            dist_d_m,
            width_w_m,
            height_h_m,
            altitude_a_m: 0.0,
            offset_o_m: 0.0,
            current_i_a,
            plate_gap_w_m: f64::INFINITY,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("L", self.seg_len_l_m),
            ("D", self.dist_d_m),
            ("W", self.width_w_m),
            ("H", self.height_h_m),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be > 0")));
            }
        }
        if self.altitude_a_m < 0.0 || self.offset_o_m < 0.0 {
            return Err(Error::InvalidInput("A and O must be >= 0".into()));
        }
        if !self.current_i_a.is_finite() {
            return Err(Error::InvalidInput("current must be finite".into()));
        }
        if !(self.plate_gap_w_m > 0.0) {
            return Err(Error::InvalidInput("plate gap must be > 0".into()));
        }
        Ok(())
    }

    pub fn with_altitude(mut self, a_m: f64) -> Self {
        self.altitude_a_m = a_m;
        self
    }

    pub fn with_offset(mut self, o_m: f64) -> Self {
        self.offset_o_m = o_m;
        self
    }

    pub fn with_plate_gap(mut self, w_m: f64) -> Self {
        self.plate_gap_w_m = w_m;
        self
    }
}

/// Out-of-plane field of the finite segment at (x, y), tesla:
/// B = (μ₀I/4πy)[(L/2-x)/√((L/2-x)²+y²) + (L/2+x)/√((L/2+x)²+y²)].
pub fn segment_field(g: &FblGeometry, x_m: f64, y_m: f64) -> Result<f64> {
    if y_m.abs() < 1e-12 {
        return Err(Error::OnWire);
    }
    let l2 = g.seg_len_l_m / 2.0;
    let t1 = (l2 - x_m) / ((l2 - x_m).powi(2) + y_m * y_m).sqrt();
    let t2 = (l2 + x_m) / ((l2 + x_m).powi(2) + y_m * y_m).sqrt();
    Ok(MU0 * g.current_i_a / (4.0 * std::f64::consts::PI * y_m) * (t1 + t2))
}

/// Antiderivative of √(u²+y²)/y in y, symmetric in u.
fn antiderivative(u: f64, y: f64) -> f64 {
    let r = (u * u + y * y).sqrt();
    if u == 0.0 {
        // u·ln(u² + ur) → 0 in the u → 0 limit
        return r;
    }
    r + u * y.ln() - u * (u * u + u * r).ln()
}

/// Evaluates the closed-form double difference of [`antiderivative`] for
/// arbitrary u-limits (both may be negative; the integrand is even in u).
fn flux_closed_form(l: f64, d: f64, w: f64, h: f64, i: f64) -> f64 {
    // ∫ dy/y [√(u²+y²)]_{u1}^{u2} with u = L/2 ± x over the loop; the
    // antiderivative's log form needs u > 0, so use evenness |u|
    let u1 = (l - w) / 2.0;
    let u2 = (l + w) / 2.0;
    let term = |u: f64, y: f64| antiderivative(u.abs(), y);
    let val = (term(u2, d + h) - term(u2, d)) - (term(u1, d + h) - term(u1, d));
    MU0 * i / (2.0 * std::f64::consts::PI) * val
}

/// Closed-form loop flux f(L, D, W, H), webers.
pub fn flux_f(g: &FblGeometry) -> Result<f64> {
    g.validate()?;
    Ok(flux_closed_form(
        g.seg_len_l_m,
        g.dist_d_m,
        g.width_w_m,
        g.height_h_m,
        g.current_i_a,
    ))
}

/// Loop flux with the loop at altitude A below the wire plane:
/// g(L,D,W,H,A) = f(L, √(D²+A²), W, √((D+H)²+A²) - √(D²+A²)).
pub fn flux_g_altitude(g: &FblGeometry) -> Result<f64> {
    g.validate()?;
    let a = g.altitude_a_m;
    let d_eff = (g.dist_d_m * g.dist_d_m + a * a).sqrt();
    let h_eff = ((g.dist_d_m + g.height_h_m).powi(2) + a * a).sqrt() - d_eff;
    Ok(flux_closed_form(
        g.seg_len_l_m,
        d_eff,
        g.width_w_m,
        h_eff,
        g.current_i_a,
    ))
}

/// Loop flux with lateral offset O:
/// W < 2O: ½[f(W+2O) + f(W-2O)]; otherwise ½[f(W+2O) - f(2O-W)].
///
/// (f is even in its width argument, so the two branches are one formula;
/// both printed forms are kept for fidelity to the derivation.)
pub fn flux_h_offset(g: &FblGeometry) -> Result<f64> {
    g.validate()?;
    let o = g.offset_o_m;
    let f_w = |w: f64| flux_closed_form(g.seg_len_l_m, g.dist_d_m, w, g.height_h_m, g.current_i_a);
    let wide = g.width_w_m + 2.0 * o;
    if g.width_w_m < 2.0 * o {
        Ok(0.5 * (f_w(wide) + f_w(g.width_w_m - 2.0 * o)))
    } else {
        Ok(0.5 * (f_w(wide) - f_w(2.0 * o - g.width_w_m)))
    }
}

/// Screening evaluation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreeningMethod {
    /// Alternating image sum Σ (-1)ⁿ / ((n·w/d)² + 1), grouped pairwise
    /// for numerical stability, truncated by the alternating-series bound.
    Sum,
    /// Fit 1/cosh²(d/(2wσ)) with σ = 0.955·π²/24.
    Fit,
}

/// Field-screening ratio G(d) ∈ (0, 1] between plates a gap w apart.
///
/// The sum form is the image-current series; the cosh fit tracks it to a
/// few absolute 1e-3 over d/w ≲ 10, though its relative error grows past
/// d/w ≈ 2 where both are already tiny.
pub fn screening_g(d_m: f64, w_m: f64, method: ScreeningMethod) -> Result<f64> {
    if !(d_m > 0.0) || !(w_m > 0.0) {
        return Err(Error::InvalidInput("screening needs d, w > 0".into()));
    }
    if w_m.is_infinite() {
        return Ok(1.0);
    }
    match method {
        ScreeningMethod::Fit => {
            let sigma = 0.955 * std::f64::consts::PI.powi(2) / 24.0;
            Ok(1.0 / (d_m / (2.0 * w_m * sigma)).cosh().powi(2))
        }
        ScreeningMethod::Sum => {
            let r = w_m / d_m;
            // pairwise grouping: G = 1 - 2 Σ_m [f((2m-1)r) - f(2m·r)] with
            // f(x) = 1/(x²+1); each grouped term is positive and O(r/x³),
            // so the alternating-series remainder bound applies per pair.
            // Kahan compensation keeps the cancellation floor near machine
            // epsilon — G itself can be ~1e-12 at d/w ≈ 10.
            let f = |x: f64| 1.0 / (x * x + 1.0);
            let mut s = 0.0f64;
            let mut comp = 0.0f64;
            let mut m: u64 = 1;
            let min_m = 25; // at least 50 image currents
            loop {
                let x = (2 * m - 1) as f64 * r;
                let term = f(x) - f(x + r);
                let y = term - comp;
                let t = s + y;
                comp = (t - s) - y;
                s = t;
                let next = f(x + 2.0 * r) - f(x + 3.0 * r);
                if m >= min_m && next < 1e-10 {
                    break;
                }
                m += 1;
                if m > 500_000_000 {
                    break;
                }
            }
            // Euler-Maclaurin tail of the remaining alternating series,
            // starting at the odd image k = 2m+1: Σ(-1)^j g(j) ≈ g/2 - g'/4
            let x_tail = (2 * m + 1) as f64 * r;
            let tail = f(x_tail) / 2.0 + (r / 2.0) * x_tail / (1.0 + x_tail * x_tail).powi(2);
            Ok(1.0 - 2.0 * (s + tail))
        }
    }
}

/// Current needed to thread `target_phi0` flux quanta through the loop,
/// amperes: I = target·Φ₀ / (flux per ampere × screening at the loop
/// centroid distance D + H/2).
pub fn required_current(g: &FblGeometry, target_phi0: f64) -> Result<f64> {
    g.validate()?;
    let mut unit = *g;
    unit.current_i_a = 1.0;
    let flux_per_ampere = flux_f(&unit)?;
    let centroid = g.dist_d_m + g.height_h_m / 2.0;
    let screen = screening_g(centroid, g.plate_gap_w_m, ScreeningMethod::Sum)?;
    let denom = flux_per_ampere * screen;
    if !(denom > 0.0) {
        return Err(Error::DomainError(
            "flux per ampere × screening must be > 0".into(),
        ));
    }
    Ok(target_phi0 * PHI0 / denom)
}

/// Lumped FBL circuit: coupling caps, qubit cap, shorting and filter
/// elements, line impedance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FblCircuit {
    pub cc_f: f64,
    pub csigma_f: f64,
    pub ls_h: f64,
    pub cg_f: f64,
    pub cs_f: f64,
    pub lf_h: f64,
    pub z0_ohm: f64,
}

impl FblCircuit {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("C_c", self.cc_f),
            ("C_Σ", self.csigma_f),
            ("L_s", self.ls_h),
            ("C_g", self.cg_f),
            ("C_s", self.cs_f),
            ("L_f", self.lf_h),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be >= 0")));
            }
        }
        if !(self.z0_ohm > 0.0) {
            return Err(Error::InvalidInput("Z0 must be > 0".into()));
        }
        Ok(())
    }
}

/// Qubit lifetime from the admittance seen by the qubit: T₁ = C_Σ/Re[Y].
///
/// `infinite` flags Re[Y] < 1e-30 S, where the estimate saturates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeEstimate {
    pub t1_s: f64,
    pub infinite: bool,
}

pub fn t1_from_admittance(csigma_f: f64, re_y_s: f64) -> Result<LifetimeEstimate> {
    if !(csigma_f > 0.0) {
        return Err(Error::InvalidInput("C_Σ must be > 0".into()));
    }
    if re_y_s < 0.0 {
        return Err(Error::InvalidInput("Re[Y] must be >= 0".into()));
    }
    if re_y_s < 1e-30 {
        return Ok(LifetimeEstimate {
            t1_s: f64::INFINITY,
            infinite: true,
        });
    }
    Ok(LifetimeEstimate {
        t1_s: csigma_f / re_y_s,
        infinite: false,
    })
}

fn checked_re_y(z: Complex64) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1e30 {
        return Err(Error::SingularNetwork);
    }
    let y = 1.0 / z;
    if !y.re.is_finite() || y.norm() > 1e30 {
        return Err(Error::SingularNetwork);
    }
    Ok(y.re)
}

/// Unfiltered line admittances (Re[Y_com], Re[Y_dif]) in siemens at angular
/// frequency ω (rad/s).
///
/// Common mode: Re[Y_com] = (2/Z₀)·ω²/(ω² + ω_c0²) with ω_c0 = 1/(Z₀C_c).
/// Differential mode: the full Z_dif = 2[(1/Z₀ + 2/(iωL_s))⁻¹ + 1/(iωC_c)]
/// is inverted exactly (not the low-frequency approximation).
pub fn fbl_unfiltered_y(c: &FblCircuit, omega_rad_s: f64) -> Result<(f64, f64)> {
    c.validate()?;
    if !(omega_rad_s > 0.0) {
        return Err(Error::InvalidInput("ω must be > 0".into()));
    }
    let w = omega_rad_s;
    let wc0 = 1.0 / (c.z0_ohm * c.cc_f);
    let re_y_com = (2.0 / c.z0_ohm) * w * w / (w * w + wc0 * wc0);

    let i = Complex64::new(0.0, 1.0);
    let shunt = Complex64::new(1.0 / c.z0_ohm, 0.0) + 1.0 / (i * w * c.ls_h / 2.0);
    let z_dif = 2.0 * (1.0 / shunt + 1.0 / (i * w * c.cc_f));
    Ok((re_y_com, checked_re_y(z_dif)?))
}

/// Filtered line admittances (Re[Y_com], Re[Y_dif]) in siemens at angular
/// frequency ω (rad/s).
///
/// Z_com = ½[(1/Z₀ + iωC_g)⁻¹ + iωL_f + 1/(iωC_c)];
/// Z_dif = 2[((1/Z₀ + iω(C_g+2C_s))⁻¹ + iωL_f)⁻¹ + 2/(iωL_s)]⁻¹ + 2/(iωC_c).
pub fn fbl_filtered_y(c: &FblCircuit, omega_rad_s: f64) -> Result<(f64, f64)> {
    c.validate()?;
    if !(omega_rad_s > 0.0) {
        return Err(Error::InvalidInput("ω must be > 0".into()));
    }
    let w = omega_rad_s;
    let i = Complex64::new(0.0, 1.0);
    let line = Complex64::new(1.0 / c.z0_ohm, 0.0);

    let z_com = 0.5
        * (1.0 / (line + i * w * c.cg_f) + i * w * c.lf_h + 1.0 / (i * w * c.cc_f));

    let inner = 1.0 / (line + i * w * (c.cg_f + 2.0 * c.cs_f)) + i * w * c.lf_h;
    let z_dif = 2.0 / (1.0 / inner + 1.0 / (i * w * c.ls_h / 2.0)) + 2.0 / (i * w * c.cc_f);

    Ok((checked_re_y(z_com)?, checked_re_y(z_dif)?))
}

/// Single-mode Purcell decay rate γ = (g/Δ)²κ (any consistent rate units).
///
/// This single-mode estimate is known to deviate substantially from
/// multi-mode transmission-line models at large detuning; no multi-mode
/// correction is applied here.
pub fn purcell_single_mode(g: f64, delta: f64, kappa: f64) -> Result<f64> {
    if delta.abs() < 1e-300 {
        return Err(Error::Divergent("Δ = 0 in Purcell rate".into()));
    }
    Ok((g / delta).powi(2) * kappa)
}
