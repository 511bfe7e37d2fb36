use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::werner::Fidelity;

pub const MAX_QUBITS: usize = 4;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Density matrix on at most four qubits. Qubit 0 is the most significant
/// bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    data: DMatrix<Complex64>,
}

/// Numerical health of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
}

impl Invariants {
    pub fn holds(&self) -> bool {
        self.hermiticity_deviation <= HERMITIAN_TOL
            && self.trace_deviation <= TRACE_TOL
            && self.min_eigenvalue >= PSD_TOL
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() || dim > 1 << MAX_QUBITS {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a power of two up to {}",
            1 << MAX_QUBITS
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

#[inline]
fn bit(index: usize, qubit: usize, qubits: usize) -> usize {
    (index >> (qubits - 1 - qubit)) & 1
}

#[inline]
fn mask(qubit: usize, qubits: usize) -> usize {
    1 << (qubits - 1 - qubit)
}

/// Spreads the bits of `local` (MSB first) onto the positions of `targets`.
#[inline]
fn scatter(local: usize, targets: &[usize], qubits: usize) -> usize {
    let m = targets.len();
    targets
        .iter()
        .enumerate()
        .filter(|(k, _)| (local >> (m - 1 - k)) & 1 == 1)
        .fold(0, |acc, (_, &q)| acc | mask(q, qubits))
}

/// Inverse of [`scatter`].
#[inline]
fn gather(index: usize, targets: &[usize], qubits: usize) -> usize {
    targets
        .iter()
        .fold(0, |acc, &q| (acc << 1) | bit(index, q, qubits))
}

impl DensityMatrix {
    /// Validates shape and the Hermitian / unit-trace / PSD invariants.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        let qubits = qubits_for_dim(data.nrows())?;
        let rho = DensityMatrix { qubits, data };
        rho.check()?;
        Ok(rho)
    }

    pub(crate) fn from_unchecked(data: DMatrix<Complex64>) -> Self {
        let qubits = data.nrows().trailing_zeros() as usize;
        DensityMatrix { qubits, data }
    }

    /// |ψ⟩⟨ψ| for a state vector, normalized on the way in.
    pub fn pure(state: &DVector<Complex64>) -> Result<Self> {
        let norm = state.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi = state / Complex64::new(norm, 0.0);
        DensityMatrix::new(&psi * psi.adjoint())
    }

    /// Computational basis state |index⟩.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        qubits_for_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} out of range")));
        }
        let mut data = DMatrix::from_element(dim, dim, ZERO);
        data[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { qubits, data })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        qubits_for_dim(dim)?;
        let data = DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        Ok(DensityMatrix { qubits, data })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// ρ ⊗ σ, with `self` on the leading qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(Error::InvalidState(format!("{qubits} qubits exceed the oracle limit")));
        }
        Ok(DensityMatrix {
            qubits,
            data: self.data.kronecker(&other.data),
        })
    }

    pub fn invariants(&self) -> Invariants {
        let adjoint = self.data.adjoint();
        let hermiticity_deviation = (&self.data - &adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let trace_deviation = (self.trace() - Complex64::new(1.0, 0.0)).norm();
        let symmetric = (&self.data + &adjoint) * Complex64::new(0.5, 0.0);
        let min_eigenvalue = symmetric
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Invariants {
            hermiticity_deviation,
            trace_deviation,
            min_eigenvalue,
        }
    }

    pub fn check(&self) -> Result<()> {
        let inv = self.invariants();
        if inv.holds() {
            Ok(())
        } else {
            Err(Error::InvalidState(format!(
                "hermiticity deviation {:.3e}, trace deviation {:.3e}, min eigenvalue {:.3e}",
                inv.hermiticity_deviation, inv.trace_deviation, inv.min_eigenvalue
            )))
        }
    }

    /// Embeds an operator acting on `targets` (first target = most
    /// significant local bit) into the full register.
    pub(crate) fn embed(&self, op: &DMatrix<Complex64>, targets: &[usize]) -> DMatrix<Complex64> {
        let dim = self.dim();
        let target_mask = targets.iter().fold(0, |acc, &q| acc | mask(q, self.qubits));
        DMatrix::from_fn(dim, dim, |i, j| {
            if i & !target_mask != j & !target_mask {
                ZERO
            } else {
                op[(gather(i, targets, self.qubits), gather(j, targets, self.qubits))]
            }
        })
    }

    /// U ρ U† with U acting on `targets`.
    pub fn conjugate(&self, op: &DMatrix<Complex64>, targets: &[usize]) -> Self {
        let full = self.embed(op, targets);
        DensityMatrix {
            qubits: self.qubits,
            data: &full * &self.data * full.adjoint(),
        }
    }

    /// tr_T(ρ) ⊗ I_T / 2^|T|: the targets are traced out and replaced by the
    /// maximally mixed state, in place.
    pub fn depolarize(&self, targets: &[usize]) -> Self {
        let dim = self.dim();
        let local = 1usize << targets.len();
        let target_mask = targets.iter().fold(0, |acc, &q| acc | mask(q, self.qubits));
        let weight = Complex64::new(1.0 / local as f64, 0.0);
        let data = DMatrix::from_fn(dim, dim, |i, j| {
            if i & target_mask != j & target_mask {
                return ZERO;
            }
            let (ri, rj) = (i & !target_mask, j & !target_mask);
            let sum: Complex64 = (0..local)
                .map(|t| {
                    let s = scatter(t, targets, self.qubits);
                    self.data[(ri | s, rj | s)]
                })
                .sum();
            sum * weight
        });
        DensityMatrix {
            qubits: self.qubits,
            data,
        }
    }

    /// Reduced state on `keep`, in the given order.
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Self {
        let traced: Vec<usize> = (0..self.qubits).filter(|q| !keep.contains(q)).collect();
        let out_dim = 1usize << keep.len();
        let data = DMatrix::from_fn(out_dim, out_dim, |a, b| {
            let (ia, ib) = (scatter(a, keep, self.qubits), scatter(b, keep, self.qubits));
            (0..1usize << traced.len())
                .map(|t| {
                    let s = scatter(t, &traced, self.qubits);
                    self.data[(ia | s, ib | s)]
                })
                .sum()
        });
        DensityMatrix {
            qubits: keep.len(),
            data,
        }
    }

    /// Π ρ Π for the projector onto `outcome` of `target`; unnormalized.
    pub(crate) fn project(&self, target: usize, outcome: usize) -> DMatrix<Complex64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |i, j| {
            if bit(i, target, self.qubits) == outcome && bit(j, target, self.qubits) == outcome {
                self.data[(i, j)]
            } else {
                ZERO
            }
        })
    }
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    pub fn vector(self) -> DVector<Complex64> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let (a, b, c, d) = match self {
            BellKind::PhiPlus => (h, ZERO, ZERO, h),
            BellKind::PhiMinus => (h, ZERO, ZERO, -h),
            BellKind::PsiPlus => (ZERO, h, h, ZERO),
            BellKind::PsiMinus => (ZERO, h, -h, ZERO),
        };
        DVector::from_vec(vec![a, b, c, d])
    }

    pub fn projector(self) -> DMatrix<Complex64> {
        let v = self.vector();
        &v * v.adjoint()
    }
}

/// F·|φ+⟩⟨φ+| + (1 − F)/3 · (other three Bell projectors).
pub fn werner_state(f: Fidelity) -> DensityMatrix {
    let rest = f.complement();
    let mut data = BellKind::PhiPlus.projector() * Complex64::new(f.value(), 0.0);
    for kind in [BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus] {
        data += kind.projector() * Complex64::new(rest, 0.0);
    }
    DensityMatrix::from_unchecked(data)
}

/// ⟨bell|ρ|bell⟩ for a two-qubit state.
///
/// # Panics
/// If `rho` is not a two-qubit state.
pub fn fidelity_to_bell(rho: &DensityMatrix, kind: BellKind) -> Fidelity {
    assert_eq!(rho.qubits(), 2, "Bell fidelity needs a two-qubit state");
    let v = kind.vector();
    let overlap = (v.adjoint() * rho.matrix() * &v)[(0, 0)];
    Fidelity::from_formula(overlap.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_eigenvalues_handle_complex_entries() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn werner_examples() {
        let pure = werner_state(Fidelity::ONE);
        assert!((pure.matrix() - BellKind::PhiPlus.projector()).norm() < 1e-15);

        let mixed = werner_state(Fidelity::MIXED);
        let quarter = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((mixed.matrix() - quarter.matrix()).norm() < 1e-15);

        let w = werner_state(Fidelity::new(0.8).unwrap());
        w.check().unwrap();
        let mut ev: Vec<f64> = w.matrix().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for e in &ev[..3] {
            assert!((e - 1.0 / 15.0).abs() < 1e-14);
        }
        assert!((ev[3] - 0.8).abs() < 1e-14);
        assert!((fidelity_to_bell(&w, BellKind::PhiPlus).value() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn bell_fidelity_examples() {
        let phi = DensityMatrix::pure(&BellKind::PhiPlus.vector()).unwrap();
        assert!((fidelity_to_bell(&phi, BellKind::PhiPlus).value() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        for kind in BellKind::ALL {
            assert!((fidelity_to_bell(&mixed, kind).value() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = werner_state(Fidelity::new(0.7).unwrap());
        let b = DensityMatrix::basis(1, 1).unwrap();
        let joint = a.tensor(&b).unwrap();
        let back = joint.partial_trace_keep(&[0, 1]);
        assert!((back.matrix() - a.matrix()).norm() < 1e-15);
        let single = joint.partial_trace_keep(&[2]);
        assert!((single.matrix() - b.matrix()).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_respects_order() {
        // |01⟩ on qubits (0, 1): keeping (1, 0) gives |10⟩.
        let rho = DensityMatrix::basis(2, 0b01).unwrap();
        let swapped = rho.partial_trace_keep(&[1, 0]);
        assert_eq!(swapped.matrix()[(0b10, 0b10)], c(1.0, 0.0));
    }

    #[test]
    fn depolarize_replaces_marginal() {
        let rho = DensityMatrix::basis(3, 0b101).unwrap();
        let out = rho.depolarize(&[1, 2]);
        out.check().unwrap();
        let marginal = out.partial_trace_keep(&[1, 2]);
        let quarter = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((marginal.matrix() - quarter.matrix()).norm() < 1e-15);
        let kept = out.partial_trace_keep(&[0]);
        assert_eq!(kept.matrix()[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(DensityMatrix::new(DMatrix::from_element(3, 3, c(1.0 / 3.0, 0.0))).is_err());
        let not_unit = DMatrix::from_diagonal_element(2, 2, c(1.0, 0.0));
        assert!(DensityMatrix::new(not_unit).is_err());
        let negative = DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(DensityMatrix::new(negative).is_err());
        assert!(DensityMatrix::maximally_mixed(5).is_err());
    }
}
