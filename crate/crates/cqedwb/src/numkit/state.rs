use num_complex::Complex64;

use super::eig::eig_hermitian;
use super::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Pure quantum state |ψ⟩ as a normalized complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Normalizes the given amplitudes; rejects NaN/non-finite input and
    /// the zero vector.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(StateVector { amplitudes })
    }

    /// Computational basis state |k⟩ in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        StateVector { amplitudes }
    }

    pub fn apply(&self, u: &ComplexMatrix) -> StateVector {
        StateVector {
            amplitudes: u.matvec(&self.amplitudes),
        }
    }

    /// ⟨ψ|O|ψ⟩ for Hermitian O (real part returned).
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        let ov = op.matvec(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(ov.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        let n = self.dim();
        let mat = ComplexMatrix::from_fn(n, n, |r, c| {
            self.amplitudes[r] * self.amplitudes[c].conj()
        });
        DensityMatrix { mat }
    }
}

/// Mixed quantum state ρ: unit trace, Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates trace = 1 and hermiticity within 1e-10; rejects NaN.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.check_finite()?;
        if !mat.is_square() {
            return Err(Error::DimMismatch {
                expected: mat.rows(),
                got: mat.cols(),
            });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "density matrix trace {:.12} + {:.2e}i != 1",
                tr.re, tr.im
            )));
        }
        if !mat.is_hermitian(1e-10) {
            return Err(Error::NotHermitian {
                max_dev: mat.hermiticity_deviation(),
            });
        }
        Ok(DensityMatrix { mat })
    }

    /// Wraps without validation; for internal construction of states that
    /// are exact by algebra.
    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        DensityMatrix { mat }
    }

    pub fn pure(psi: &StateVector) -> Self {
        psi.to_density()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            mat: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// tr(ρ O), real part.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        (&self.mat * op).trace().re
    }

    /// min eigenvalue; physical states have min ≥ -1e-8.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = eig_hermitian(&self.mat)?;
        Ok(vals[0])
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &ComplexMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: self.mat.conjugate_by(u),
        }
    }

    /// State purity tr(ρ²) and von Neumann entropy in bits.
    ///
    /// Eigenvalues at or below 1e-12 contribute zero entropy (continuity
    /// limit of λ log λ).
    pub fn purity_entropy(&self) -> Result<(f64, f64)> {
        let purity = (&self.mat * &self.mat).trace().re;
        let (vals, _) = eig_hermitian(&self.mat)?;
        let entropy = -vals
            .iter()
            .filter(|&&l| l > 1e-12)
            .map(|&l| l * l.log2())
            .sum::<f64>();
        // clamp the -0.0 that a pure state produces
        Ok((purity, if entropy.abs() < 1e-15 { 0.0 } else { entropy }))
    }
}

/// Partial trace of `rho` over every subsystem not listed in `keep`.
///
/// `dims` are the subsystem dimensions in tensor order (first factor is
/// the most significant index); `keep` lists the subsystem indices to
/// retain, in ascending order.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: total,
        });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidInput(
            "keep indices must be ascending and in range".into(),
        ));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&t| dims[t]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product::<usize>().max(1);

    // composite index helpers over the original tensor ordering
    let strides: Vec<usize> = {
        let mut s = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * dims[i + 1];
        }
        s
    };
    let unflatten = |mut idx: usize, ds: &[usize]| -> Vec<usize> {
        let mut out = vec![0; ds.len()];
        for i in (0..ds.len()).rev() {
            out[i] = idx % ds[i];
            idx /= ds[i];
        }
        out
    };

    let mut out = ComplexMatrix::zeros(kept_total, kept_total);
    for kr in 0..kept_total {
        let kr_parts = unflatten(kr, &kept_dims);
        for kc in 0..kept_total {
            let kc_parts = unflatten(kc, &kept_dims);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_total {
                let t_parts = unflatten(t, &traced_dims);
                let mut row = 0usize;
                let mut col = 0usize;
                for (pos, &sub) in keep.iter().enumerate() {
                    row += kr_parts[pos] * strides[sub];
                    col += kc_parts[pos] * strides[sub];
                }
                for (pos, &sub) in traced.iter().enumerate() {
                    row += t_parts[pos] * strides[sub];
                    col += t_parts[pos] * strides[sub];
                }
                acc += rho.mat[(row, col)];
            }
            out[(kr, kc)] = acc;
        }
    }
    Ok(DensityMatrix { mat: out })
}
