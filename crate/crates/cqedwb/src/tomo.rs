//! Joint-readout state tomography with β-calibrated voltages, and
//! χ-matrix process tomography.
//!
//! The joint readout measures one voltage per pre-rotation setting,
//! V = β_I + Σ_s β_s ⟨U† P_s U⟩ over the Z-type Pauli strings P_s. The
//! identity coefficient β_I is always carried explicitly. Pauli strings
//! are ordered lexicographically in {I,X,Y,Z}^n (qubit 1 most
//! significant); Z-type strings use the same convention over {I,Z}^n.

use num_complex::Complex64;

use crate::numkit::{
    eig_hermitian, kron, pauli_string_matrix, reconstruct_from_pauli, ComplexMatrix,
    DensityMatrix, KrausChannel, PauliVector, StateVector,
};
use crate::pulsectl::{rotation_unitary, Rotation};
use crate::{Error, Result};

/// Joint-readout calibration: one voltage coefficient per Z-type Pauli
/// string (index = bitmask over qubits, qubit 1 most significant; index 0
/// is the identity coefficient).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    pub n_qubits: usize,
    pub beta: Vec<f64>,
}

impl MeasurementModel {
    pub fn new(n_qubits: usize, beta: Vec<f64>) -> Result<Self> {
        if beta.len() != 1 << n_qubits {
            return Err(Error::DimMismatch {
                expected: 1 << n_qubits,
                got: beta.len(),
            });
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("non-finite β coefficient".into()));
        }
        Ok(MeasurementModel { n_qubits, beta })
    }

    /// The ideal ground-state-projector readout: every β = 1/2^n.
    pub fn ideal(n_qubits: usize) -> Self {
        MeasurementModel {
            n_qubits,
            beta: vec![1.0 / (1 << n_qubits) as f64; 1 << n_qubits],
        }
    }
}

/// Z-type Pauli string for a qubit bitmask (bit set = Z on that qubit).
fn z_string_matrix(mask: usize, n_qubits: usize) -> ComplexMatrix {
    let codes: Vec<usize> = (0..n_qubits)
        .map(|q| {
            if mask & (1 << (n_qubits - 1 - q)) != 0 {
                3
            } else {
                0
            }
        })
        .collect();
    pauli_string_matrix(&codes)
}

/// Measured voltage V = Σ_s β_s ⟨U† P_s U⟩_ρ for one pre-rotation setting
/// (one rotation per qubit).
pub fn joint_measurement_voltage(
    rho: &DensityMatrix,
    m: &MeasurementModel,
    prerotations: &[Rotation],
) -> Result<f64> {
    let dim = 1usize << m.n_qubits;
    if rho.dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            got: rho.dim(),
        });
    }
    if prerotations.len() != m.n_qubits {
        return Err(Error::DimMismatch {
            expected: m.n_qubits,
            got: prerotations.len(),
        });
    }
    let mut u = ComplexMatrix::identity(1);
    for r in prerotations {
        u = kron(&u, &rotation_unitary(r));
    }
    let rotated = rho.evolve(&u);
    let mut v = 0.0;
    for mask in 0..dim {
        if m.beta[mask] == 0.0 {
            continue;
        }
        v += m.beta[mask] * rotated.expectation(&z_string_matrix(mask, m.n_qubits));
    }
    Ok(v)
}

/// Recovers β from the voltages of the 2^n computational basis
/// preparations (index = basis state, qubit 1 most significant).
///
/// The design matrix is the ±1 parity matrix H[k][s] = (-1)^popcount(k&s);
/// it is its own inverse up to 1/2^n, so β = H·V/2^n round-trips exactly.
pub fn beta_calibration(voltages: &[f64]) -> Result<MeasurementModel> {
    let count = voltages.len();
    if !count.is_power_of_two() || count < 2 {
        return Err(Error::SingularDesign {
            expected: count.next_power_of_two().max(2),
            got: count,
        });
    }
    let n_qubits = count.trailing_zeros() as usize;
    if voltages.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite calibration voltage".into()));
    }
    let mut beta = vec![0.0; count];
    for (s, b) in beta.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, v) in voltages.iter().enumerate() {
            let sign = if (k & s).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * v;
        }
        *b = acc / count as f64;
    }
    MeasurementModel::new(n_qubits, beta)
}

/// Basis-state voltages predicted by a measurement model (the inverse of
/// [`beta_calibration`]).
pub fn basis_voltages(m: &MeasurementModel) -> Vec<f64> {
    let count = 1usize << m.n_qubits;
    (0..count)
        .map(|k| {
            (0..count)
                .map(|s| {
                    let sign = if (k & s).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    sign * m.beta[s]
                })
                .sum()
        })
        .collect()
}

/// The four single-qubit tomography gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TomoGate {
    /// Identity: measures +Z.
    I,
    /// R_x^{π/2}: measures +Y.
    X90,
    /// R_y^{π/2}: measures -X.
    Y90,
    /// R_x^{π}: measures -Z.
    X180,
}

impl TomoGate {
    pub fn rotation(&self) -> Rotation {
        match self {
            TomoGate::I => Rotation::x(0.0),
            TomoGate::X90 => Rotation::x(std::f64::consts::FRAC_PI_2),
            TomoGate::Y90 => Rotation::y(std::f64::consts::FRAC_PI_2),
            TomoGate::X180 => Rotation::x(std::f64::consts::PI),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TomoGate::I => "I",
            TomoGate::X90 => "Rx90",
            TomoGate::Y90 => "Ry90",
            TomoGate::X180 => "Rx180",
        }
    }

    /// The Pauli that U†ZU maps to: (code, sign) with 1 = X, 2 = Y, 3 = Z.
    fn z_maps_to(&self) -> (usize, f64) {
        match self {
            TomoGate::I => (3, 1.0),
            TomoGate::X90 => (2, 1.0),
            TomoGate::Y90 => (1, -1.0),
            TomoGate::X180 => (3, -1.0),
        }
    }
}

const GATE_CYCLE: [TomoGate; 4] = [TomoGate::I, TomoGate::X90, TomoGate::Y90, TomoGate::X180];

/// The pre-rotation table: 3 / 15 / 63 rows of per-qubit gates for 1–3
/// qubits, enumerating all gate combinations except the fully redundant
/// all-Rx180 row. Row order: all-identity first, then gates cycling
/// {I, Rx90, Ry90, Rx180} with the last qubit fastest.
pub fn prerotation_table(n_qubits: usize) -> Result<Vec<Vec<TomoGate>>> {
    if !(1..=3).contains(&n_qubits) {
        return Err(Error::Unsupported(format!(
            "pre-rotation tables cover 1-3 qubits, not {n_qubits}"
        )));
    }
    let total = 4usize.pow(n_qubits as u32);
    let mut rows = Vec::with_capacity(total - 1);
    for idx in 0..total {
        let mut row = Vec::with_capacity(n_qubits);
        let mut rem = idx;
        for _ in 0..n_qubits {
            row.push(GATE_CYCLE[rem % 4]);
            rem /= 4;
        }
        row.reverse(); // qubit 1 in the slowest position
        if row.iter().all(|g| *g == TomoGate::X180) {
            continue; // redundant with the identity row
        }
        rows.push(row);
    }
    // single-qubit convention: only {I, Rx90, Ry90} are needed
    if n_qubits == 1 {
        rows.retain(|row| row[0] != TomoGate::X180);
    }
    Ok(rows)
}

/// Simulated voltages for every row of the pre-rotation table.
pub fn simulate_table_voltages(rho: &DensityMatrix, m: &MeasurementModel) -> Result<Vec<f64>> {
    let table = prerotation_table(m.n_qubits)?;
    table
        .iter()
        .map(|row| {
            let rots: Vec<Rotation> = row.iter().map(TomoGate::rotation).collect();
            joint_measurement_voltage(rho, m, &rots)
        })
        .collect()
}

/// Design matrix mapping the 4^n - 1 Pauli expectations to the table
/// voltages (after the β_identity offset is subtracted).
fn design_matrix(table: &[Vec<TomoGate>], m: &MeasurementModel) -> Vec<Vec<f64>> {
    let n = m.n_qubits;
    let unknowns = 4usize.pow(n as u32) - 1;
    let mut a = vec![vec![0.0; unknowns]; table.len()];
    for (r, row) in table.iter().enumerate() {
        for mask in 1..(1usize << n) {
            let beta = m.beta[mask];
            if beta == 0.0 {
                continue;
            }
            // U†(Z-type string)U = sign · mapped Pauli string
            let mut sign = 1.0;
            let mut pauli_index = 0usize;
            for (q, gate) in row.iter().enumerate() {
                let code = if mask & (1 << (n - 1 - q)) != 0 {
                    let (code, s) = gate.z_maps_to();
                    sign *= s;
                    code
                } else {
                    0
                };
                pauli_index = pauli_index * 4 + code;
            }
            a[r][pauli_index - 1] += beta * sign;
        }
    }
    a
}

fn solve_real_system(a: &[Vec<f64>], b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = a.len();
    let na = nalgebra::DMatrix::from_fn(n, n, |r, c| a[r][c]);
    let nb = nalgebra::DVector::from_column_slice(b);
    let svd = na.svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if cond > 1e6 {
        return Err(Error::IllConditioned { cond });
    }
    let x = svd
        .solve(&nb, 0.0)
        .map_err(|_| Error::IllConditioned { cond })?;
    Ok((x.iter().cloned().collect(), cond))
}

/// State reconstruction output.
#[derive(Debug, Clone)]
pub struct ReconstructedState {
    pub pauli: PauliVector,
    /// Linear-inversion ρ (Hermitian, unit trace, possibly unphysical).
    pub rho: DensityMatrix,
    /// Smallest eigenvalue of the linear-inversion ρ.
    pub min_eigenvalue: f64,
    /// Condition number of the design system.
    pub condition: f64,
}

/// Solves the linear design system of the full pre-rotation table for all
/// 4^n - 1 Pauli expectations and assembles ρ.
pub fn reconstruct_state(voltages: &[f64], m: &MeasurementModel) -> Result<ReconstructedState> {
    let table = prerotation_table(m.n_qubits)?;
    if voltages.len() != table.len() {
        return Err(Error::DimMismatch {
            expected: table.len(),
            got: voltages.len(),
        });
    }
    let a = design_matrix(&table, m);
    let b: Vec<f64> = voltages.iter().map(|v| v - m.beta[0]).collect();
    let (values, condition) = solve_real_system(&a, &b)?;
    let pauli = PauliVector {
        n_qubits: m.n_qubits,
        values,
    };
    let rho = reconstruct_from_pauli(&pauli);
    let min_eigenvalue = rho.min_eigenvalue()?;
    Ok(ReconstructedState {
        pauli,
        rho,
        min_eigenvalue,
        condition,
    })
}

/// Constant-offset fit for population outside the computational space:
/// the offset c minimizing the reconstructed squared Pauli amplitude of
/// V - c·1 (reconstruction is affine in the voltages, so the optimum is
/// closed-form).
pub fn fit_voltage_offset(voltages: &[f64], m: &MeasurementModel) -> Result<f64> {
    let base = reconstruct_state(voltages, m)?;
    let shifted: Vec<f64> = voltages.iter().map(|v| v - 1.0).collect();
    let unit = reconstruct_state(&shifted, m)?;
    let dir: Vec<f64> = base
        .pauli
        .values
        .iter()
        .zip(unit.pauli.values.iter())
        .map(|(a, b)| a - b)
        .collect();
    let num: f64 = base.pauli.values.iter().zip(dir.iter()).map(|(p, d)| p * d).sum();
    let den: f64 = dir.iter().map(|d| d * d).sum();
    if den < 1e-30 {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// Eigenvalue clipping to a physical state: negative eigenvalues are set
/// to zero and the spectrum renormalized to trace 1. Deterministic and
/// idempotent.
pub fn physicality_project(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let (vals, vecs) = eig_hermitian(rho.matrix())?;
    let clipped: Vec<f64> = vals.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidInput("state clipped to zero trace".into()));
    }
    let d = ComplexMatrix::diag(&clipped.iter().map(|l| l / total).collect::<Vec<_>>());
    Ok(DensityMatrix::from_matrix_unchecked(
        &(&vecs * &d) * &vecs.dagger(),
    ))
}

/// Process matrix χ in the n-qubit Pauli operator basis (lexicographic
/// {I,X,Y,Z}^n order): ε(ρ) = Σ_{mn} χ_mn P_m ρ P_n†.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix {
    pub n_qubits: usize,
    pub mat: ComplexMatrix,
}

impl ChiMatrix {
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// χ of a unitary: rank-1 vv† with v the Pauli expansion coefficients
    /// v_m = tr(P_m† U)/d.
    pub fn of_unitary(u: &ComplexMatrix, n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let d2 = d * d;
        let mut v = Vec::with_capacity(d2);
        for idx in 0..d2 {
            let p = pauli_index_matrix(idx, n_qubits);
            v.push((&p.dagger() * u).trace() / d as f64);
        }
        let mat = ComplexMatrix::from_fn(d2, d2, |r, c| v[r] * v[c].conj());
        ChiMatrix { n_qubits, mat }
    }

    /// Identity-process χ: a single 1 at the (I…I, I…I) entry.
    pub fn identity(n_qubits: usize) -> Self {
        Self::of_unitary(&ComplexMatrix::identity(1 << n_qubits), n_qubits)
    }

    /// Applies the process to a state: ε(ρ) = Σ χ_mn P_m ρ P_n†.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let d = 1usize << self.n_qubits;
        if rho.dim() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: rho.dim(),
            });
        }
        let d2 = d * d;
        let mut out = ComplexMatrix::zeros(d, d);
        for m in 0..d2 {
            let pm = pauli_index_matrix(m, self.n_qubits);
            let pm_rho = &pm * rho.matrix();
            for n in 0..d2 {
                let w = self.mat[(m, n)];
                if w.norm_sqr() < 1e-300 {
                    continue;
                }
                let pn = pauli_index_matrix(n, self.n_qubits);
                out = &out + &(&pm_rho * &pn.dagger()).scale(w);
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// Smallest eigenvalue (physical processes are PSD within tolerance).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = eig_hermitian(&self.mat)?;
        Ok(vals[0])
    }
}

fn pauli_index_matrix(index: usize, n_qubits: usize) -> ComplexMatrix {
    let mut codes = vec![0usize; n_qubits];
    let mut idx = index;
    for q in (0..n_qubits).rev() {
        codes[q] = idx % 4;
        idx /= 4;
    }
    pauli_string_matrix(&codes)
}

/// The 4^n spanning preparations {|0⟩, |1⟩, |+⟩, |+i⟩}^⊗n as pure states,
/// qubit 1 slowest.
pub fn spanning_preparations(n_qubits: usize) -> Vec<DensityMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let singles: [StateVector; 4] = [
        StateVector::basis(2, 0),
        StateVector::basis(2, 1),
        StateVector::new(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]).unwrap(),
        StateVector::new(vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)]).unwrap(),
    ];
    let total = 4usize.pow(n_qubits as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut choice = vec![0usize; n_qubits];
        for q in (0..n_qubits).rev() {
            choice[q] = rem % 4;
            rem /= 4;
        }
        let mut psi = singles[choice[0]].clone();
        for c in &choice[1..] {
            psi = psi.tensor(&singles[*c]);
        }
        out.push(DensityMatrix::pure(&psi));
    }
    out
}

/// Reconstructs χ from (input, output) density-matrix pairs.
///
/// Builds the β tensor from the Pauli expansions of P_m ρ_j P_n†, checks
/// the preparation set spans the operator space (Gram rank d²), and
/// solves Σ_mn β_{jk,mn} χ_mn = λ_jk with λ_jk = tr(P_k ε(ρ_j))/d.
pub fn process_tomography(preps: &[DensityMatrix], outputs: &[DensityMatrix]) -> Result<ChiMatrix> {
    if preps.is_empty() || preps.len() != outputs.len() {
        return Err(Error::DimMismatch {
            expected: preps.len(),
            got: outputs.len(),
        });
    }
    let d = preps[0].dim();
    let n_qubits = d.trailing_zeros() as usize;
    if d != 1 << n_qubits {
        return Err(Error::InvalidInput("dimension must be a power of 2".into()));
    }
    let d2 = d * d;
    if preps.len() != d2 {
        return Err(Error::RankDeficientPreps {
            rank: preps.len().min(d2),
            need: d2,
        });
    }
    // Gram rank check of the vectorized preparations
    {
        let gram = nalgebra::DMatrix::from_fn(d2, d2, |j, k| {
            let m = &preps[j].matrix().dagger() * preps[k].matrix();
            let t = m.trace();
            nalgebra::Complex::new(t.re, t.im)
        });
        let svd = gram.svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let rank = svd
            .singular_values
            .iter()
            .filter(|s| **s > 1e-9 * smax)
            .count();
        if rank < d2 {
            return Err(Error::RankDeficientPreps { rank, need: d2 });
        }
    }

    let paulis: Vec<ComplexMatrix> = (0..d2).map(|i| pauli_index_matrix(i, n_qubits)).collect();
    let rows = d2 * d2;
    let mut b = nalgebra::DMatrix::from_element(rows, rows, nalgebra::Complex::new(0.0, 0.0));
    let mut lam = nalgebra::DVector::from_element(rows, nalgebra::Complex::new(0.0, 0.0));
    for j in 0..d2 {
        let pm_rho: Vec<ComplexMatrix> = (0..d2).map(|m| &paulis[m] * preps[j].matrix()).collect();
        for k in 0..d2 {
            let row = j * d2 + k;
            let l = (&paulis[k] * outputs[j].matrix()).trace() / d as f64;
            lam[row] = nalgebra::Complex::new(l.re, l.im);
            for m in 0..d2 {
                let pk_pm_rho = &paulis[k] * &pm_rho[m];
                for n in 0..d2 {
                    let beta = (&pk_pm_rho * &paulis[n].dagger()).trace() / d as f64;
                    b[(row, m * d2 + n)] = nalgebra::Complex::new(beta.re, beta.im);
                }
            }
        }
    }
    let chi_vec = b
        .lu()
        .solve(&lam)
        .ok_or(Error::RankDeficientPreps { rank: 0, need: d2 })?;
    let mat = ComplexMatrix::from_fn(d2, d2, |m, n| {
        let z = chi_vec[m * d2 + n];
        Complex64::new(z.re, z.im)
    });
    Ok(ChiMatrix { n_qubits, mat })
}

/// Runs a channel over the spanning preparations and reconstructs its χ.
pub fn process_tomography_of_channel(ch: &KrausChannel, n_qubits: usize) -> Result<ChiMatrix> {
    let preps = spanning_preparations(n_qubits);
    let outputs: Vec<DensityMatrix> = preps
        .iter()
        .map(|rho| ch.apply(rho))
        .collect::<Result<_>>()?;
    process_tomography(&preps, &outputs)
}

/// Process fidelity Re tr(a·b) between two χ matrices normalized to unit
/// trace.
pub fn process_fidelity(a: &ChiMatrix, b: &ChiMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok((&a.mat * &b.mat).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{make_channel, pauli_expectations, ChannelKind};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_physical_rho(n: usize, rng: &mut StdRng) -> DensityMatrix {
        let dim = 1usize << n;
        let amp: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let pure = DensityMatrix::pure(&StateVector::new(amp).unwrap());
        let w = rng.gen_range(0.3..1.0);
        let mat = &pure.matrix().scale_re(w)
            + &DensityMatrix::maximally_mixed(dim).matrix().scale_re(1.0 - w);
        DensityMatrix::new(mat).unwrap()
    }

    #[test]
    fn ground_state_ideal_voltage_is_one() {
        let m = MeasurementModel::ideal(2);
        let rho = DensityMatrix::pure(&StateVector::basis(4, 0));
        let v =
            joint_measurement_voltage(&rho, &m, &[Rotation::x(0.0), Rotation::x(0.0)]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pi_pulse_equals_flipped_preparation() {
        let mut rng = StdRng::seed_from_u64(11);
        let beta: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let m = MeasurementModel::new(2, beta).unwrap();
        let rho00 = DensityMatrix::pure(&StateVector::basis(4, 0));
        let rho10 = DensityMatrix::pure(&StateVector::basis(4, 2));
        let v_rotated = joint_measurement_voltage(
            &rho00,
            &m,
            &[Rotation::x(std::f64::consts::PI), Rotation::x(0.0)],
        )
        .unwrap();
        let v_prepared =
            joint_measurement_voltage(&rho10, &m, &[Rotation::x(0.0), Rotation::x(0.0)]).unwrap();
        assert!((v_rotated - v_prepared).abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed_reads_beta_identity() {
        let m = MeasurementModel::new(2, vec![0.7, 0.2, -0.1, 0.05]).unwrap();
        let rho = DensityMatrix::maximally_mixed(4);
        let v =
            joint_measurement_voltage(&rho, &m, &[Rotation::x(0.0), Rotation::x(0.0)]).unwrap();
        assert!((v - 0.7).abs() < 1e-12);
    }

    #[test]
    fn beta_calibration_examples() {
        // V = (1,0,0,0) → β = (1,1,1,1)/4
        let m = beta_calibration(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        for b in &m.beta {
            assert!((b - 0.25).abs() < 1e-12);
        }
        // all V equal → only β_identity nonzero
        let m = beta_calibration(&[0.42, 0.42, 0.42, 0.42]).unwrap();
        assert!((m.beta[0] - 0.42).abs() < 1e-12);
        assert!(m.beta[1..].iter().all(|b| b.abs() < 1e-12));
        assert!(matches!(
            beta_calibration(&[1.0, 2.0, 3.0]),
            Err(Error::SingularDesign { .. })
        ));
    }

    #[test]
    fn beta_round_trips() {
        let mut rng = StdRng::seed_from_u64(3);
        for n in 1..=3usize {
            let beta: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m = MeasurementModel::new(n, beta.clone()).unwrap();
            let v = basis_voltages(&m);
            let back = beta_calibration(&v).unwrap();
            for (a, b) in beta.iter().zip(back.beta.iter()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn prerotation_table_shapes() {
        assert_eq!(prerotation_table(1).unwrap().len(), 3);
        assert_eq!(prerotation_table(2).unwrap().len(), 15);
        assert_eq!(prerotation_table(3).unwrap().len(), 63);
        assert!(matches!(prerotation_table(4), Err(Error::Unsupported(_))));
        let t1 = prerotation_table(1).unwrap();
        assert_eq!(t1[0], vec![TomoGate::I]);
        assert_eq!(t1[1], vec![TomoGate::X90]);
        assert_eq!(t1[2], vec![TomoGate::Y90]);
        // 2-qubit row 10 (1-indexed): (Ry90, Ry90)
        let t2 = prerotation_table(2).unwrap();
        assert_eq!(t2[9], vec![TomoGate::Y90, TomoGate::Y90]);
    }

    #[test]
    fn design_matrix_full_rank_three_qubits() {
        let m = MeasurementModel::ideal(3);
        let table = prerotation_table(3).unwrap();
        let a = design_matrix(&table, &m);
        let na = nalgebra::DMatrix::from_fn(63, 63, |r, c| a[r][c]);
        let svd = na.svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let rank = svd
            .singular_values
            .iter()
            .filter(|s| **s > 1e-9 * smax)
            .count();
        assert_eq!(rank, 63);
    }

    #[test]
    fn reconstruction_round_trips_random_states() {
        let mut rng = StdRng::seed_from_u64(21);
        for n in 1..=3usize {
            let beta: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let m = MeasurementModel::new(n, beta).unwrap();
            let rho = random_physical_rho(n, &mut rng);
            let v = simulate_table_voltages(&rho, &m).unwrap();
            let rec = reconstruct_state(&v, &m).unwrap();
            let want = pauli_expectations(&rho, n).unwrap();
            let max_dev = rec
                .pauli
                .values
                .iter()
                .zip(want.values.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(max_dev < 1e-9, "n = {n}: max Pauli deviation {max_dev}");
            assert!(rec.rho.matrix().max_diff(rho.matrix()) < 1e-9);
        }
    }

    #[test]
    fn reconstruction_ground_state_pattern() {
        let m = MeasurementModel::ideal(3);
        let rho = DensityMatrix::pure(&StateVector::basis(8, 0));
        let v = simulate_table_voltages(&rho, &m).unwrap();
        let rec = reconstruct_state(&v, &m).unwrap();
        for label in ["ZII", "IZI", "IIZ", "ZZI", "ZIZ", "IZZ", "ZZZ"] {
            assert!((rec.pauli.get(label) - 1.0).abs() < 1e-10, "{label}");
        }
        let ones = rec
            .pauli
            .values
            .iter()
            .filter(|v| (v.abs() - 1.0).abs() < 1e-10)
            .count();
        assert_eq!(ones, 7, "seven unit-height bars");
    }

    #[test]
    fn reconstruction_bell_pair_pattern() {
        // Bell pair on qubits 2 and 3 of a 3-qubit register
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ])
        .unwrap();
        let psi = StateVector::basis(2, 0).tensor(&bell);
        let m = MeasurementModel::ideal(3);
        let v = simulate_table_voltages(&DensityMatrix::pure(&psi), &m).unwrap();
        let rec = reconstruct_state(&v, &m).unwrap();
        assert!((rec.pauli.get("IXX") - 1.0).abs() < 1e-10);
        assert!((rec.pauli.get("IYY") + 1.0).abs() < 1e-10);
        assert!((rec.pauli.get("IZZ") - 1.0).abs() < 1e-10);
        for label in ["IXI", "IIX", "IYI", "IIY", "IZI", "IIZ"] {
            assert!(rec.pauli.get(label).abs() < 1e-10, "{label}");
        }
    }

    #[test]
    fn reconstruction_noise_scales_linearly() {
        let mut rng = StdRng::seed_from_u64(31);
        let m = MeasurementModel::ideal(2);
        let rho = random_physical_rho(2, &mut rng);
        let clean = simulate_table_voltages(&rho, &m).unwrap();
        let want = pauli_expectations(&rho, 2).unwrap();
        let mut errs = Vec::new();
        for sigma in [1e-4, 1e-3, 1e-2] {
            let mut acc = 0.0;
            let draws = 40;
            for _ in 0..draws {
                let noisy: Vec<f64> = clean
                    .iter()
                    .map(|v| {
                        // Box-Muller
                        let u1: f64 = rng.gen_range(1e-12..1.0);
                        let u2: f64 = rng.gen_range(0.0..1.0);
                        let z =
                            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                        v + sigma * z
                    })
                    .collect();
                let rec = reconstruct_state(&noisy, &m).unwrap();
                let err: f64 = rec
                    .pauli
                    .values
                    .iter()
                    .zip(want.values.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                acc += err;
            }
            errs.push(acc / draws as f64);
        }
        // regression slope of log(err) vs log(sigma) ≈ 1 within 20%
        let slope = (errs[2] / errs[0]).log10() / 2.0;
        assert!((slope - 1.0).abs() < 0.2, "slope {slope}, errs {errs:?}");
    }

    #[test]
    fn physicality_projection() {
        let mut rng = StdRng::seed_from_u64(41);
        let rho = random_physical_rho(2, &mut rng);
        let p = physicality_project(&rho).unwrap();
        assert!(p.matrix().max_diff(rho.matrix()) < 1e-12);

        // eigenvalues (1.1, -0.1) → (1, 0)
        let bad = ComplexMatrix::diag(&[1.1, -0.1]);
        let fixed = physicality_project(&DensityMatrix::from_matrix_unchecked(bad)).unwrap();
        assert!((fixed.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(fixed.matrix()[(1, 1)].norm() < 1e-12);

        let again = physicality_project(&fixed).unwrap();
        assert!(again.matrix().max_diff(fixed.matrix()) < 1e-12);
        assert!(fixed.min_eigenvalue().unwrap() >= -1e-12);
    }

    #[test]
    fn identity_process_chi() {
        let chi = process_tomography_of_channel(
            &KrausChannel::new(vec![ComplexMatrix::identity(2)]).unwrap(),
            1,
        )
        .unwrap();
        assert!((chi.mat[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        let total: f64 = chi.mat.data().iter().map(|z| z.norm()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cphase_chi_structure() {
        use crate::cqedspec::PhaseGateSpec;
        let u = PhaseGateSpec::cphase(std::f64::consts::PI).to_unitary();
        let chi = ChiMatrix::of_unitary(&u, 2);
        // support on {II, ZI, IZ, ZZ} with the (1,1,1,-1)/2 pattern
        let (ii, zi, iz, zz) = (0usize, 12usize, 3usize, 15usize);
        for (idx, sign) in [(ii, 1.0), (zi, 1.0), (iz, 1.0), (zz, -1.0)] {
            let want = 0.25 * sign;
            assert!(
                (chi.mat[(ii, idx)] - Complex64::new(want, 0.0)).norm() < 1e-12,
                "entry (II, {idx})"
            );
        }
        for m in 0..16 {
            for n in 0..16 {
                let support = [ii, zi, iz, zz];
                if !(support.contains(&m) && support.contains(&n)) {
                    assert!(chi.mat[(m, n)].norm() < 1e-12);
                }
            }
        }
        // rank 1
        let (vals, _) = eig_hermitian(&chi.mat).unwrap();
        let big = vals.iter().filter(|l| l.abs() > 1e-10).count();
        assert_eq!(big, 1);
        // reconstructed from simulated process tomography: same matrix
        let preps = spanning_preparations(2);
        let outs: Vec<DensityMatrix> = preps.iter().map(|r| r.evolve(&u)).collect();
        let rec = process_tomography(&preps, &outs).unwrap();
        assert!(rec.mat.max_diff(&chi.mat) < 1e-9);
    }

    #[test]
    fn process_fidelity_basics() {
        let id = ChiMatrix::identity(1);
        assert!((process_fidelity(&id, &id).unwrap() - 1.0).abs() < 1e-12);
        let x = ChiMatrix::of_unitary(&crate::numkit::sigma_x(), 1);
        assert!(process_fidelity(&id, &x).unwrap().abs() < 1e-12);
        // depolarized identity: fidelity decreases monotonically in p
        let mut last = 2.0;
        for k in 0..6 {
            let p = k as f64 * 0.15;
            let ch = make_channel(ChannelKind::Depolarizing, p).unwrap();
            let chi = process_tomography_of_channel(&ch, 1).unwrap();
            let f = process_fidelity(&chi, &id).unwrap();
            assert!(f < last + 1e-12);
            last = f;
        }
    }

    #[test]
    fn chi_of_simulated_channels_is_psd_and_action_equivalent() {
        for kind in [
            ChannelKind::Dephasing,
            ChannelKind::AmplitudeDamping,
            ChannelKind::Depolarizing,
        ] {
            let ch = make_channel(kind, 0.3).unwrap();
            let chi = process_tomography_of_channel(&ch, 1).unwrap();
            assert!(chi.min_eigenvalue().unwrap() > -1e-8, "{kind:?}");
            for rho in spanning_preparations(1) {
                let via_chi = chi.apply(&rho).unwrap();
                let direct = ch.apply(&rho).unwrap();
                assert!(via_chi.matrix().max_diff(direct.matrix()) < 1e-8);
            }
        }
    }

    #[test]
    fn chi_of_composition_equals_composed_channels() {
        let a = make_channel(ChannelKind::Dephasing, 0.2).unwrap();
        let b = make_channel(ChannelKind::AmplitudeDamping, 0.4).unwrap();
        let composed = a.then(&b).unwrap();
        let chi = process_tomography_of_channel(&composed, 1).unwrap();
        for rho in spanning_preparations(1) {
            let via_chi = chi.apply(&rho).unwrap();
            let direct = b.apply(&a.apply(&rho).unwrap()).unwrap();
            assert!(via_chi.matrix().max_diff(direct.matrix()) < 1e-8);
        }
    }

    #[test]
    fn rank_deficient_preps_rejected() {
        let preps = vec![DensityMatrix::pure(&StateVector::basis(2, 0)); 4];
        let outs = preps.clone();
        assert!(matches!(
            process_tomography(&preps, &outs),
            Err(Error::RankDeficientPreps { .. })
        ));
    }

    #[test]
    fn trace_preservation_constraint_of_physical_chi() {
        let ch = make_channel(ChannelKind::AmplitudeDamping, 0.37).unwrap();
        let chi = process_tomography_of_channel(&ch, 1).unwrap();
        // Σ_mn χ_mn P_n†P_m = I
        let mut acc = ComplexMatrix::zeros(2, 2);
        for m in 0..4 {
            for n in 0..4 {
                let pm = pauli_index_matrix(m, 1);
                let pn = pauli_index_matrix(n, 1);
                acc = &acc + &(&pn.dagger() * &pm).scale(chi.mat[(m, n)]);
            }
        }
        assert!(acc.max_diff(&ComplexMatrix::identity(2)) < 1e-6);
    }

    #[test]
    fn voltage_offset_fit_recovers_injected_offset() {
        let m = MeasurementModel::ideal(2);
        let rho = DensityMatrix::maximally_mixed(4);
        let clean = simulate_table_voltages(&rho, &m).unwrap();
        let injected = 0.07;
        let offset_v: Vec<f64> = clean.iter().map(|v| v + injected).collect();
        let fitted = fit_voltage_offset(&offset_v, &m).unwrap();
        assert!(
            (fitted - injected).abs() < 1e-9,
            "fitted {fitted} vs injected {injected}"
        );
    }
}
