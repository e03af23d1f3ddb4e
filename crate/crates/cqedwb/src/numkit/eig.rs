use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Relative hermiticity tolerance accepted by the eigensolver.
const HERMITICITY_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues ascending and the matrix whose columns are the
/// corresponding orthonormal eigenvectors. Ordering is deterministic: after
/// the ascending sort, each eigenvector's global phase is fixed so that its
/// first component of significant magnitude is real and positive.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::DimMismatch {
            expected: h.rows(),
            got: h.cols(),
        });
    }
    h.check_finite()?;
    if !h.is_hermitian(HERMITICITY_TOL) {
        return Err(Error::NotHermitian {
            max_dev: h.hermiticity_deviation(),
        });
    }
    let n = h.rows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }

    // symmetrize exactly so the backend sees a clean Hermitian input
    let sym = ComplexMatrix::from_fn(n, n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    let na = DMatrix::from_fn(n, n, |r, c| {
        let z = sym[(r, c)];
        Complex::new(z.re, z.im)
    });
    let decomp = na.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomp.eigenvalues[a].partial_cmp(&decomp.eigenvalues[b]).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &idx) in order.iter().enumerate() {
        values.push(decomp.eigenvalues[idx]);
        let col = decomp.eigenvectors.column(idx);
        // fix the global phase: first component above threshold becomes
        // real positive (also breaks degenerate-pair sign ties)
        let mut phase = Complex64::new(1.0, 0.0);
        let maxmag = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in col.iter() {
            if z.norm() > 1e-8 * maxmag.max(1e-300) {
                phase = Complex64::new(z.re, z.im).conj() / z.norm();
                break;
            }
        }
        for r in 0..n {
            let z = Complex64::new(col[r].re, col[r].im);
            vectors[(r, k)] = z * phase;
        }
    }
    Ok((values, vectors))
}

/// Propagator U = exp(-i 2π H t) via eigendecomposition.
///
/// `h` carries linear frequencies in GHz and `t_ns` is in ns, so one unit
/// of `h·t` is a full phase cycle.
pub fn evolve_unitary(h: &ComplexMatrix, t_ns: f64) -> Result<ComplexMatrix> {
    if !t_ns.is_finite() {
        return Err(Error::InvalidInput("non-finite evolution time".into()));
    }
    let (values, vectors) = eig_hermitian(h)?;
    let phases: Vec<Complex64> = values
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * lambda * t_ns))
        .collect();
    let d = ComplexMatrix::diag_complex(&phases);
    Ok(&(&vectors * &d) * &vectors.dagger())
}
