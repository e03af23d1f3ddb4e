use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::pauli::{sigma_x, sigma_y, sigma_z};
use super::state::DensityMatrix;
use crate::{Error, Result};

/// The three standard single-qubit noise channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Dephasing,
    AmplitudeDamping,
    Depolarizing,
}

/// Quantum channel in Kraus form: ρ → Σ M_μ ρ M_μ†.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    kind: Option<ChannelKind>,
}

impl KrausChannel {
    /// Builds a channel from raw operators, checking the completeness
    /// relation Σ M†M = I within 1e-10.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidInput("empty Kraus set".into()));
        }
        let d = operators[0].rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for m in &operators {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    got: m.rows(),
                });
            }
            m.check_finite()?;
            sum = &sum + &(&m.dagger() * m);
        }
        if sum.max_diff(&ComplexMatrix::identity(d)) > 1e-10 {
            return Err(Error::InvalidInput(
                "Kraus operators do not satisfy ΣM†M = I".into(),
            ));
        }
        Ok(KrausChannel {
            operators,
            kind: None,
        })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn kind(&self) -> Option<ChannelKind> {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    /// Applies the channel: Σ M ρ M†.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
        for m in &self.operators {
            out = &out + &rho.matrix().conjugate_by(m);
        }
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// Composition: `other` after `self`.
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel> {
        let mut ops = Vec::with_capacity(self.operators.len() * other.operators.len());
        for b in &other.operators {
            for a in &self.operators {
                ops.push(b * a);
            }
        }
        KrausChannel::new(ops)
    }
}

/// Standard single-qubit channel with probability parameter `p`.
///
/// Kraus sets:
/// - dephasing: {√(1-p) I, √p |0⟩⟨0|, √p |1⟩⟨1|} — off-diagonals shrink by (1-p);
/// - amplitude damping: {[[1,0],[0,√(1-p)]], √p |0⟩⟨1|} — λz → p + (1-p)λz;
/// - depolarizing: {√(1-p) I, √(p/3) σx, √(p/3) σy, √(p/3) σz} — λ⃗ → (1-4p/3)λ⃗.
pub fn make_channel(kind: ChannelKind, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidProbability(p));
    }
    let z = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let ops = match kind {
        ChannelKind::Dephasing => vec![
            ComplexMatrix::identity(2).scale_re((1.0 - p).sqrt()),
            ComplexMatrix::from_rows(&[vec![re(p.sqrt()), z], vec![z, z]]),
            ComplexMatrix::from_rows(&[vec![z, z], vec![z, re(p.sqrt())]]),
        ],
        ChannelKind::AmplitudeDamping => vec![
            ComplexMatrix::from_rows(&[vec![re(1.0), z], vec![z, re((1.0 - p).sqrt())]]),
            ComplexMatrix::from_rows(&[vec![z, re(p.sqrt())], vec![z, z]]),
        ],
        ChannelKind::Depolarizing => vec![
            ComplexMatrix::identity(2).scale_re((1.0 - p).sqrt()),
            sigma_x().scale_re((p / 3.0).sqrt()),
            sigma_y().scale_re((p / 3.0).sqrt()),
            sigma_z().scale_re((p / 3.0).sqrt()),
        ],
    };
    let mut ch = KrausChannel::new(ops)?;
    ch.kind = Some(kind);
    Ok(ch)
}
