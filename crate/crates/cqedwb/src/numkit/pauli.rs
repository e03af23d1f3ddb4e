use num_complex::Complex64;

use super::matrix::{kron, ComplexMatrix};
use super::state::DensityMatrix;
use crate::{Error, Result};

pub fn sigma_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn sigma_x() -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    ComplexMatrix::from_rows(&[vec![z, one], vec![one, z]])
}

pub fn sigma_y() -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_rows(&[
        vec![z, Complex64::new(0.0, -1.0)],
        vec![Complex64::new(0.0, 1.0), z],
    ])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[1.0, -1.0])
}

pub fn sigma_plus() -> ComplexMatrix {
    // raises |0> to |1> in the (|0>, |1>) = (ground, excited) ordering
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_rows(&[vec![z, z], vec![Complex64::new(1.0, 0.0), z]])
}

pub fn sigma_minus() -> ComplexMatrix {
    sigma_plus().dagger()
}

fn single_pauli(code: usize) -> ComplexMatrix {
    match code {
        0 => sigma_i(),
        1 => sigma_x(),
        2 => sigma_y(),
        3 => sigma_z(),
        _ => unreachable!(),
    }
}

/// n-qubit Pauli string from per-qubit codes (0 = I, 1 = X, 2 = Y, 3 = Z),
/// first code most significant.
pub fn pauli_string_matrix(codes: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for &c in codes {
        out = kron(&out, &single_pauli(c));
    }
    out
}

fn index_to_codes(index: usize, n_qubits: usize) -> Vec<usize> {
    let mut codes = vec![0; n_qubits];
    let mut idx = index;
    for q in (0..n_qubits).rev() {
        codes[q] = idx % 4;
        idx /= 4;
    }
    codes
}

/// Label like "ZZI" for the Pauli string at `index` in the lexicographic
/// {I,X,Y,Z}^n ordering (qubit 1 most significant).
pub fn pauli_label(index: usize, n_qubits: usize) -> String {
    index_to_codes(index, n_qubits)
        .iter()
        .map(|c| ['I', 'X', 'Y', 'Z'][*c])
        .collect()
}

/// The 4^n - 1 non-identity Pauli expectations of an n-qubit state, in
/// fixed lexicographic {I,X,Y,Z}^n order with the identity dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliVector {
    pub n_qubits: usize,
    pub values: Vec<f64>,
}

impl PauliVector {
    /// Value of a named string like "ZZI"; panics on bad labels.
    pub fn get(&self, label: &str) -> f64 {
        assert_eq!(label.len(), self.n_qubits);
        let mut index = 0usize;
        for ch in label.chars() {
            let code = match ch {
                'I' => 0,
                'X' => 1,
                'Y' => 2,
                'Z' => 3,
                _ => panic!("bad Pauli label {label}"),
            };
            index = index * 4 + code;
        }
        assert!(index > 0, "identity is not stored");
        self.values[index - 1]
    }

    pub fn labels(&self) -> Vec<String> {
        (1..4usize.pow(self.n_qubits as u32))
            .map(|i| pauli_label(i, self.n_qubits))
            .collect()
    }
}

/// All 4^n - 1 Pauli expectations of `rho`.
pub fn pauli_expectations(rho: &DensityMatrix, n_qubits: usize) -> Result<PauliVector> {
    let dim = 1usize << n_qubits;
    if rho.dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            got: rho.dim(),
        });
    }
    let total = 4usize.pow(n_qubits as u32);
    let mut values = Vec::with_capacity(total - 1);
    for index in 1..total {
        let op = pauli_string_matrix(&index_to_codes(index, n_qubits));
        values.push(rho.expectation(&op));
    }
    Ok(PauliVector { n_qubits, values })
}

/// Rebuilds ρ = (1/2^n) Σ ⟨O⟩ O from a Pauli vector (identity term carried
/// implicitly as ⟨I..I⟩ = 1).
pub fn reconstruct_from_pauli(pv: &PauliVector) -> DensityMatrix {
    let n = pv.n_qubits;
    let dim = 1usize << n;
    let mut mat = ComplexMatrix::identity(dim);
    for (i, &v) in pv.values.iter().enumerate() {
        let op = pauli_string_matrix(&index_to_codes(i + 1, n));
        mat = &mat + &op.scale_re(v);
    }
    DensityMatrix::from_matrix_unchecked(mat.scale_re(1.0 / dim as f64))
}
