//! Cooper-pair-box/transmon spectra, flux tuning, and flux-noise dephasing.
//!
//! The qubit Hamiltonian is diagonalized in the charge basis,
//! H = 4 E_C Σ (j - n_g)² |j⟩⟨j| - (E_J/2) Σ (|j+1⟩⟨j| + h.c.),
//! truncated at charge number ±N. Energies are linear frequencies in GHz.

use num_complex::Complex64;

use crate::constants::{HBAR, H_PLANCK, PHI0};
use crate::numkit::{eig_hermitian, ComplexMatrix};
use crate::{Error, Result};

/// Split-junction transmon parameters. Energies are E/h in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams {
    pub ej1_ghz: f64,
    pub ej2_ghz: f64,
    pub ec_ghz: f64,
    /// Gate charge in Cooper pairs.
    pub ng: f64,
    /// Loop flux Φ/Φ₀.
    pub flux_phi0: f64,
    /// Charge-basis cutoff N (states -N..N).
    pub charge_cutoff: usize,
}

impl TransmonParams {
    pub fn new(
        ej1_ghz: f64,
        ej2_ghz: f64,
        ec_ghz: f64,
        ng: f64,
        flux_phi0: f64,
        charge_cutoff: usize,
    ) -> Result<Self> {
        if !(ej1_ghz.is_finite() && ej2_ghz.is_finite() && ec_ghz.is_finite())
            || !ng.is_finite()
            || !flux_phi0.is_finite()
        {
            return Err(Error::InvalidInput("non-finite transmon parameter".into()));
        }
        if ec_ghz <= 0.0 {
            return Err(Error::InvalidInput("E_C must be positive".into()));
        }
        if ej1_ghz + ej2_ghz <= 0.0 {
            return Err(Error::InvalidInput("E_J1 + E_J2 must be positive".into()));
        }
        if charge_cutoff < 10 {
            return Err(Error::InvalidInput("charge cutoff must be >= 10".into()));
        }
        Ok(TransmonParams {
            ej1_ghz,
            ej2_ghz,
            ec_ghz,
            ng,
            flux_phi0,
            charge_cutoff,
        })
    }

    /// Symmetric split-junction transmon (total E_J) at zero flux with the
    /// default cutoff N = 15.
    pub fn symmetric(ej_ghz: f64, ec_ghz: f64, ng: f64) -> Result<Self> {
        Self::new(ej_ghz / 2.0, ej_ghz / 2.0, ec_ghz, ng, 0.0, 15)
    }

    pub fn with_cutoff(&self, n: usize) -> Self {
        TransmonParams {
            charge_cutoff: n,
            ..*self
        }
    }

    pub fn with_flux(&self, flux_phi0: f64) -> Self {
        TransmonParams { flux_phi0, ..*self }
    }

    pub fn with_ng(&self, ng: f64) -> Self {
        TransmonParams { ng, ..*self }
    }
}

/// 1/f flux noise with RMS amplitude A in units of Φ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxNoiseParams {
    pub a_phi0: f64,
}

impl FluxNoiseParams {
    pub fn new(a_phi0: f64) -> Result<Self> {
        if !(a_phi0 > 0.0) || !a_phi0.is_finite() {
            return Err(Error::InvalidInput(
                "flux-noise amplitude must be > 0".into(),
            ));
        }
        Ok(FluxNoiseParams { a_phi0 })
    }
}

/// Effective Josephson energy magnitude and asymmetry parameter d.
///
/// E_J^eff = (E_J1+E_J2)|cos(πΦ/Φ₀)|·√(1 + d² tan²(πΦ/Φ₀)) with
/// d = (E_J1-E_J2)/(E_J1+E_J2). Only the magnitude is used downstream; the
/// junction-asymmetry phase offset is eliminated by a variable change.
pub fn ej_effective(p: &TransmonParams) -> (f64, f64) {
    let ej_sum = p.ej1_ghz + p.ej2_ghz;
    let d = (p.ej1_ghz - p.ej2_ghz) / ej_sum;
    let phase = std::f64::consts::PI * p.flux_phi0;
    let (s, c) = phase.sin_cos();
    // |cosφ|·√(1 + d²tan²φ) in the form √(cos² + d²sin²), regular at cos = 0
    let magnitude = ej_sum * (c * c + d * d * s * s).sqrt();
    (magnitude, d)
}

/// Charge-basis CPB Hamiltonian for the flux-effective E_J.
///
/// (2N+1)×(2N+1), real symmetric: diagonal 4E_C(j - n_g)², first
/// off-diagonals -E_J/2.
pub fn cpb_hamiltonian(p: &TransmonParams) -> ComplexMatrix {
    let n = p.charge_cutoff as isize;
    let dim = 2 * p.charge_cutoff + 1;
    let (ej_eff, _) = ej_effective(p);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (row, j) in (-n..=n).enumerate() {
        let q = j as f64 - p.ng;
        h[(row, row)] = Complex64::new(4.0 * p.ec_ghz * q * q, 0.0);
        if row + 1 < dim {
            h[(row, row + 1)] = Complex64::new(-ej_eff / 2.0, 0.0);
            h[(row + 1, row)] = Complex64::new(-ej_eff / 2.0, 0.0);
        }
    }
    h
}

/// Lowest `count` eigenfrequencies of the CPB Hamiltonian, GHz.
pub fn cpb_levels(p: &TransmonParams, count: usize) -> Result<Vec<f64>> {
    let (vals, _) = eig_hermitian(&cpb_hamiltonian(p))?;
    Ok(vals.into_iter().take(count).collect())
}

/// Qubit frequency f01 and anharmonicity α from exact diagonalization.
///
/// The charge cutoff is escalated in steps of 5 until the lowest three
/// levels move by less than 1e-6 GHz.
pub fn transmon_f01_anharmonicity(p: &TransmonParams) -> Result<(f64, f64)> {
    const MAX_CUTOFF: usize = 200;
    let mut n = p.charge_cutoff;
    let mut prev = cpb_levels(&p.with_cutoff(n), 3)?;
    loop {
        let next_n = n + 5;
        let next = cpb_levels(&p.with_cutoff(next_n), 3)?;
        let residual = prev
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if residual < 1e-6 {
            let f01 = next[1] - next[0];
            let alpha = (next[2] - next[1]) - (next[1] - next[0]);
            return Ok((f01, alpha));
        }
        if next_n > MAX_CUTOFF {
            return Err(Error::TruncationNotConverged {
                reached: next_n,
                residual,
            });
        }
        prev = next;
        n = next_n;
    }
}

/// WKB charge dispersion ε_m of level m, GHz.
///
/// ε_m = (-1)^m E_C 2^(4m+5)/m! √(2/π) (E_J/2E_C)^(m/2+3/4) e^(-√(8E_J/E_C)).
/// Requires E_J/E_C > 10. The exponent is the single-√ form; the source
/// footnote's extra factor 8 in the exponent disagrees with both the
/// surrounding text and exact diagonalization and is not used.
pub fn charge_dispersion_wkb(m: u32, p: &TransmonParams) -> Result<f64> {
    let (ej, _) = ej_effective(p);
    let ratio = ej / p.ec_ghz;
    if ratio <= 10.0 {
        return Err(Error::OutOfRegime(format!(
            "WKB dispersion needs E_J/E_C > 10 (got {ratio:.2})"
        )));
    }
    let m_f = m as f64;
    let factorial: f64 = (1..=m).map(|k| k as f64).product::<f64>().max(1.0);
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign
        * p.ec_ghz
        * 2f64.powf(4.0 * m_f + 5.0)
        / factorial
        * (2.0 / std::f64::consts::PI).sqrt()
        * (ej / (2.0 * p.ec_ghz)).powf(m_f / 2.0 + 0.75)
        * (-(8.0 * ratio).sqrt()).exp())
}

/// One sample of the flux-tuning curve.
#[derive(Debug, Clone, Copy)]
pub struct FluxTunePoint {
    pub flux_phi0: f64,
    /// √(8 E_C E_J^eff) - E_C, or `None` where E_J^eff is so small that the
    /// asymptotic formula leaves its domain (f01 ≤ 0).
    pub f01_asymptotic_ghz: Option<f64>,
    /// Exact-diagonalization f01.
    pub f01_exact_ghz: f64,
}

/// f01 versus flux: asymptotic formula and exact diagonalization per point.
pub fn f01_vs_flux(p: &TransmonParams, flux_grid: &[f64]) -> Result<Vec<FluxTunePoint>> {
    let mut out = Vec::with_capacity(flux_grid.len());
    for &phi in flux_grid {
        if !phi.is_finite() {
            return Err(Error::InvalidInput("non-finite flux point".into()));
        }
        let pp = p.with_flux(phi);
        let (ej, _) = ej_effective(&pp);
        let f = (8.0 * p.ec_ghz * ej).sqrt() - p.ec_ghz;
        let levels = cpb_levels(&pp, 2)?;
        out.push(FluxTunePoint {
            flux_phi0: phi,
            f01_asymptotic_ghz: (f > 0.0).then_some(f),
            f01_exact_ghz: levels[1] - levels[0],
        });
    }
    Ok(out)
}

/// Pure-dephasing time from 1/f flux noise, seconds.
///
/// Away from a sweet spot the first-order formula
/// T_φ = (ħ/A)(Φ₀/π)(2 E_C E_J^max |sin(πΦ/Φ₀) tan(πΦ/Φ₀)|)^(-1/2)
/// applies; exactly at Φ = nΦ₀ the second-order sweet-spot form
/// T_φ = ħΦ₀²/(A²π⁴√(2 E_J^max E_C)) is used. Energies enter in joules.
/// Requires symmetric junctions (d = 0); fails within 1e-6 Φ₀ of the
/// half-flux divergence where E01 → 0.
pub fn tphi_flux_noise(p: &TransmonParams, noise: &FluxNoiseParams, flux_phi0: f64) -> Result<f64> {
    let (_, d) = ej_effective(p);
    if d.abs() > 1e-9 {
        return Err(Error::OutOfRegime(
            "flux-noise closed forms assume symmetric junctions (d = 0)".into(),
        ));
    }
    let frac = flux_phi0 - flux_phi0.round();
    if (frac.abs() - 0.5).abs() < 1e-6 {
        return Err(Error::OutOfRegime(
            "within 1e-6 Φ₀ of the half-flux divergence".into(),
        ));
    }
    let ej_max_j = (p.ej1_ghz + p.ej2_ghz) * 1e9 * H_PLANCK;
    let ec_j = p.ec_ghz * 1e9 * H_PLANCK;
    let a_wb = noise.a_phi0 * PHI0;
    let pi = std::f64::consts::PI;

    if frac.abs() < 1e-12 {
        // integer-flux sweet spot: second-order sensitivity
        return Ok(
            HBAR * PHI0 * PHI0 / (a_wb * a_wb * pi.powi(4) * (2.0 * ej_max_j * ec_j).sqrt())
        );
    }
    let phase = pi * flux_phi0;
    let st = (phase.sin() * phase.tan()).abs();
    Ok((HBAR / a_wb) * (PHI0 / pi) / (2.0 * ec_j * ej_max_j * st).sqrt())
}
