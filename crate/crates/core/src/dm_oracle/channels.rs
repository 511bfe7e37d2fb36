//! Noisy gate and measurement channels acting on [`DensityMatrix`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::DensityMatrix;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub mod gates {
    use super::*;

    pub fn identity() -> DMatrix<Complex64> {
        DMatrix::identity(2, 2)
    }

    pub fn pauli_x() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    pub fn pauli_z() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
    }

    pub fn hadamard() -> DMatrix<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])
    }

    /// CNOT with the first local qubit as control.
    pub fn cnot() -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(4, 4, c(0.0));
        m[(0, 0)] = c(1.0);
        m[(1, 1)] = c(1.0);
        m[(2, 3)] = c(1.0);
        m[(3, 2)] = c(1.0);
        m
    }
}

fn mix(a: &DensityMatrix, b: &DensityMatrix, weight_a: f64) -> DensityMatrix {
    DensityMatrix::from_unchecked(a.matrix() * c(weight_a) + b.matrix() * c(1.0 - weight_a))
}

/// p1·UρU† + (1 − p1)·tr_t(ρ) ⊗ I/2 on qubit `target`.
///
/// # Panics
/// If `target` is out of range or `ideal_op` is not 2×2.
pub fn apply_one_qubit_noisy(
    rho: &DensityMatrix,
    target: usize,
    ideal_op: &DMatrix<Complex64>,
    p1: f64,
) -> DensityMatrix {
    assert!(target < rho.qubits(), "qubit {target} out of range");
    assert_eq!(ideal_op.shape(), (2, 2), "one-qubit operator must be 2x2");
    let ideal = rho.conjugate(ideal_op, &[target]);
    if p1 == 1.0 {
        return ideal;
    }
    mix(&ideal, &rho.depolarize(&[target]), p1)
}

/// p2·UρU† + (1 − p2)·tr_ij(ρ) ⊗ I/4 on the ordered pair `targets`.
///
/// # Panics
/// If the targets coincide or are out of range, or `ideal_op` is not 4×4.
pub fn apply_two_qubit_noisy(
    rho: &DensityMatrix,
    targets: (usize, usize),
    ideal_op: &DMatrix<Complex64>,
    p2: f64,
) -> DensityMatrix {
    let (i, j) = targets;
    assert!(i != j, "two-qubit operation needs distinct qubits");
    assert!(i < rho.qubits() && j < rho.qubits(), "qubits ({i}, {j}) out of range");
    assert_eq!(ideal_op.shape(), (4, 4), "two-qubit operator must be 4x4");
    let ideal = rho.conjugate(ideal_op, &[i, j]);
    if p2 == 1.0 {
        return ideal;
    }
    mix(&ideal, &rho.depolarize(&[i, j]), p2)
}

/// One outcome of a noisy measurement.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    pub outcome: u8,
    pub probability: f64,
    /// Renormalized post-measurement state; the measured qubit stays in the
    /// register.
    pub state: DensityMatrix,
}

/// Branches with probability below this are dropped.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;

/// Z-basis readout with reliability `eta`: effects
/// P0 = η|0⟩⟨0| + (1−η)|1⟩⟨1| and P1 = η|1⟩⟨1| + (1−η)|0⟩⟨0|.
///
/// The instrument projects and then misreports with probability 1 − η, so a
/// post state is the matching mixture of projected states.
pub fn measure_noisy(rho: &DensityMatrix, target: usize, eta: f64) -> Vec<MeasurementBranch> {
    assert!(target < rho.qubits(), "qubit {target} out of range");
    let projected = [rho.project(target, 0), rho.project(target, 1)];
    (0..2u8)
        .filter_map(|outcome| {
            let k = outcome as usize;
            let unnorm = &projected[k] * c(eta) + &projected[1 - k] * c(1.0 - eta);
            let probability = unnorm.trace().re;
            (probability > NEGLIGIBLE_PROBABILITY).then(|| MeasurementBranch {
                outcome,
                probability,
                state: DensityMatrix::from_unchecked(unnorm / c(probability)),
            })
        })
        .collect()
}
