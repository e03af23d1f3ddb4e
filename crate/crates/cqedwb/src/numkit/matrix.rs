use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex matrix, row-major storage.
///
/// The workhorse carrier for Hamiltonians, unitaries and operators.
/// Dimensions stay modest (≲ 1000) so naive O(n³) products are fine.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for c in 0..self.cols.min(8) {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let nr = rows.len();
        let nc = if nr > 0 { rows[0].len() } else { 0 };
        let mut m = Self::zeros(nr, nc);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), nc, "ragged row in from_rows");
            for (c, z) in row.iter().enumerate() {
                m[(r, c)] = *z;
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        m
    }

    /// Complex diagonal matrix.
    pub fn diag_complex(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Fails on any non-finite entry.
    pub fn check_finite(&self) -> Result<()> {
        if self.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= s;
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |A - A†| over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian within `tol` relative to the largest entry.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(1e-300);
        self.hermiticity_deviation() <= rel_tol * scale
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for r in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..self.cols {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// U A U† for square A.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> ComplexMatrix {
        u * &(self * &u.dagger())
    }

    /// max |A - B| entrywise; panics on shape mismatch.
    pub fn max_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ‖U†U − I‖_max, a cheap unitarity figure of merit.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.dagger() * self).max_diff(&ComplexMatrix::identity(self.rows))
    }

    /// Distance to `other` minimized over a global phase.
    pub fn phase_invariant_distance(&self, other: &ComplexMatrix) -> f64 {
        // align on the largest entry of self
        let (mut br, mut bc, mut best) = (0, 0, 0.0);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self[(r, c)].norm() > best {
                    best = self[(r, c)].norm();
                    br = r;
                    bc = c;
                }
            }
        }
        if best == 0.0 {
            return other.max_abs();
        }
        let phase = other[(br, bc)] / self[(br, bc)];
        let phase = if phase.norm() > 0.0 {
            phase / phase.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.scale(phase).max_diff(other)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (z, w) in out.data.iter_mut().zip(rhs.data.iter()) {
            *z += w;
        }
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (z, w) in out.data.iter_mut().zip(rhs.data.iter()) {
            *z -= w;
        }
        out
    }
}

/// Kronecker product a ⊗ b.
///
/// Satisfies (a⊗b)(x⊗y) = (ax)⊗(by); dimensions multiply.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ar in 0..a.rows() {
        for ac in 0..a.cols() {
            let av = a[(ar, ac)];
            if av.norm_sqr() == 0.0 {
                continue;
            }
            for br in 0..b.rows() {
                for bc in 0..b.cols() {
                    out[(ar * b.rows() + br, ac * b.cols() + bc)] = av * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left to right.
pub(crate) fn kron_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for m in ms {
        out = kron(&out, m);
    }
    out
}
