//! Swapping and purification circuits, simulated exactly on four qubits.

use super::channels::{apply_one_qubit_noisy, apply_two_qubit_noisy, gates, measure_noisy};
use super::state::{fidelity_to_bell, werner_state, BellKind, DensityMatrix};
use crate::werner::{Fidelity, GateNoiseParams};

/// Where one-qubit noise enters the swapping circuit.
///
/// The default treats the Hadamard before readout as a noiseless basis
/// change and applies the two outcome-conditioned corrections (Z on the left
/// end, X on the right end) as noisy one-qubit operations, which yields the
/// p1² factor of the closed form. `hadamard_noise()` instead makes the
/// Hadamard noisy and the corrections ideal; that variant scales the Werner
/// weight by (1 + 2·p1)/3 rather than p1².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EsConvention {
    pub noisy_hadamard: bool,
    pub noisy_corrections: bool,
}

impl Default for EsConvention {
    fn default() -> Self {
        EsConvention {
            noisy_hadamard: false,
            noisy_corrections: true,
        }
    }
}

impl EsConvention {
    pub fn hadamard_noise() -> Self {
        EsConvention {
            noisy_hadamard: true,
            noisy_corrections: false,
        }
    }
}

/// One readout branch of the swap.
#[derive(Debug, Clone)]
pub struct SwapBranch {
    /// Readouts of photons 2 and 3.
    pub outcome: (u8, u8),
    pub probability: f64,
    /// Corrected state of photons 1 and 4.
    pub state: DensityMatrix,
    pub fidelity: Fidelity,
}

#[derive(Debug, Clone)]
pub struct SwapOutcome {
    pub branches: Vec<SwapBranch>,
    /// Probability-weighted fidelity over all branches.
    pub fidelity: Fidelity,
}

impl SwapOutcome {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }
}

fn pauli_power(base: nalgebra::DMatrix<num_complex::Complex64>, bit: u8) -> nalgebra::DMatrix<num_complex::Complex64> {
    if bit == 1 {
        base
    } else {
        gates::identity()
    }
}

/// Swaps (1,2) and (3,4) into (1,4): CNOT 2→3, Hadamard on 2, read out 2
/// and 3, then correct. Photons 1..4 are qubits 0..3.
pub fn es_circuit(f_a: Fidelity, f_b: Fidelity, g: &GateNoiseParams, convention: EsConvention) -> SwapOutcome {
    let rho = werner_state(f_a)
        .tensor(&werner_state(f_b))
        .expect("two pairs fit in the register");
    let rho = apply_two_qubit_noisy(&rho, (1, 2), &gates::cnot(), g.p2());
    let p_h = if convention.noisy_hadamard { g.p1() } else { 1.0 };
    let rho = apply_one_qubit_noisy(&rho, 1, &gates::hadamard(), p_h);

    let p_corr = if convention.noisy_corrections { g.p1() } else { 1.0 };
    let mut branches = Vec::with_capacity(4);
    for first in measure_noisy(&rho, 1, g.eta()) {
        for second in measure_noisy(&first.state, 2, g.eta()) {
            let (m_phase, m_parity) = (first.outcome, second.outcome);
            let corrected = if convention.noisy_corrections {
                let s = apply_one_qubit_noisy(&second.state, 0, &pauli_power(gates::pauli_z(), m_phase), p_corr);
                apply_one_qubit_noisy(&s, 3, &pauli_power(gates::pauli_x(), m_parity), p_corr)
            } else {
                let fix = pauli_power(gates::pauli_z(), m_phase) * pauli_power(gates::pauli_x(), m_parity);
                second.state.conjugate(&fix, &[3])
            };
            let state = corrected.partial_trace_keep(&[0, 3]);
            let fidelity = fidelity_to_bell(&state, BellKind::PhiPlus);
            branches.push(SwapBranch {
                outcome: (m_phase, m_parity),
                probability: first.probability * second.probability,
                state,
                fidelity,
            });
        }
    }
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    let weighted: f64 = branches.iter().map(|b| b.probability * b.fidelity.value()).sum();
    SwapOutcome {
        branches,
        fidelity: Fidelity::from_formula(weighted / total),
    }
}

/// Fidelity of the swapped pair under the default noise convention.
pub fn es_oracle(f_a: Fidelity, f_b: Fidelity, g: &GateNoiseParams) -> Fidelity {
    es_circuit(f_a, f_b, g, EsConvention::default()).fidelity
}

#[derive(Debug, Clone)]
pub struct PurifyOutcome {
    pub success_probability: f64,
    pub fidelity: Fidelity,
    /// Kept pair before twirling.
    pub kept_state: DensityMatrix,
    /// Kept pair after twirling back to Werner form at the same fidelity.
    pub werner_state: DensityMatrix,
}

/// One recurrence step on pairs (A1,B1) = qubits (0,1) and (A2,B2) =
/// qubits (2,3): bilateral CNOT from pair 1 onto pair 2, read out A2 and B2,
/// keep pair 1 when the readouts agree.
pub fn epp_circuit(f: Fidelity, g: &GateNoiseParams) -> PurifyOutcome {
    let pair = werner_state(f);
    let rho = pair.tensor(&pair).expect("two pairs fit in the register");
    let rho = apply_two_qubit_noisy(&rho, (0, 2), &gates::cnot(), g.p2());
    let rho = apply_two_qubit_noisy(&rho, (1, 3), &gates::cnot(), g.p2());

    let mut kept = nalgebra::DMatrix::zeros(16, 16);
    let mut success = 0.0;
    for a in measure_noisy(&rho, 2, g.eta()) {
        for b in measure_noisy(&a.state, 3, g.eta()) {
            if a.outcome == b.outcome {
                let p = a.probability * b.probability;
                success += p;
                kept += b.state.matrix() * num_complex::Complex64::new(p, 0.0);
            }
        }
    }
    let kept = DensityMatrix::from_unchecked(kept / num_complex::Complex64::new(success, 0.0)).partial_trace_keep(&[0, 1]);
    let fidelity = fidelity_to_bell(&kept, BellKind::PhiPlus);
    PurifyOutcome {
        success_probability: success,
        fidelity,
        kept_state: kept,
        werner_state: werner_state(fidelity),
    }
}

/// Keep probability and output fidelity of one purification step.
pub fn epp_oracle(f: Fidelity, g: &GateNoiseParams) -> (f64, Fidelity) {
    let out = epp_circuit(f, g);
    (out.success_probability, out.fidelity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::werner::{
        purify_ideal, purify_ideal_success_probability, purify_noisy, purify_noisy_success_probability,
        swap_chain_fidelity, werner_weight,
    };

    fn fid(x: f64) -> Fidelity {
        Fidelity::new(x).unwrap()
    }

    #[test]
    fn perfect_swap() {
        let out = es_circuit(Fidelity::ONE, Fidelity::ONE, &GateNoiseParams::ideal(), EsConvention::default());
        assert!((out.fidelity.value() - 1.0).abs() < 1e-14);
        assert_eq!(out.branches.len(), 4);
        for b in &out.branches {
            assert!((b.probability - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn ideal_swap_of_werner_pairs() {
        for x in [0.3, 0.6, 0.8, 0.95] {
            let w = werner_weight(fid(x));
            let f = es_oracle(fid(x), fid(x), &GateNoiseParams::ideal()).value();
            assert!((f - (0.25 + 0.75 * w * w)).abs() < 1e-13);
        }
    }

    #[test]
    fn noisy_swap_matches_closed_form() {
        let g = GateNoiseParams::new(0.99, 0.98, 0.985).unwrap();
        let f = es_oracle(fid(0.95), fid(0.95), &g).value();
        assert!((f - swap_chain_fidelity(fid(0.95), 2, &g).value()).abs() < 1e-9);
        assert!((f - 0.852_612_603_208).abs() < 1e-9);
    }

    #[test]
    fn unequal_inputs_multiply_weights() {
        let g = GateNoiseParams::new(0.99, 0.97, 0.98).unwrap();
        let f = es_oracle(fid(0.9), fid(0.7), &g).value();
        let expected = 0.25 + 0.75 * g.swap_factor() * werner_weight(fid(0.9)) * werner_weight(fid(0.7));
        assert!((f - expected).abs() < 1e-12);
    }

    #[test]
    fn hadamard_noise_convention_has_different_power() {
        // With exact readout the noisy Hadamard scales the weight by (1 + 2·p1)/3.
        let g = GateNoiseParams::new(0.95, 0.98, 1.0).unwrap();
        let out = es_circuit(fid(0.9), fid(0.9), &g, EsConvention::hadamard_noise());
        let w = werner_weight(fid(0.9));
        let expected = 0.25 + 0.75 * w * w * g.p2() * (1.0 + 2.0 * g.p1()) / 3.0;
        assert!((out.fidelity.value() - expected).abs() < 1e-12);

        let g = GateNoiseParams::new(0.95, 0.98, 0.99).unwrap();
        let out = es_circuit(fid(0.9), fid(0.9), &g, EsConvention::hadamard_noise());
        assert!((out.fidelity.value() - swap_chain_fidelity(fid(0.9), 2, &g).value()).abs() > 1e-3);
    }

    #[test]
    fn swap_branch_probabilities_sum_to_one() {
        let g = GateNoiseParams::new(0.97, 0.96, 0.93).unwrap();
        let out = es_circuit(fid(0.85), fid(0.6), &g, EsConvention::default());
        assert!((out.total_probability() - 1.0).abs() < 1e-12);
        for b in &out.branches {
            b.state.check().unwrap();
        }
    }

    #[test]
    fn ideal_purification_matches_recurrence() {
        for x in [0.3, 0.5, 0.7, 0.8, 0.99] {
            let (p, f) = epp_oracle(fid(x), &GateNoiseParams::ideal());
            assert!((f.value() - purify_ideal(fid(x)).value()).abs() < 1e-12);
            assert!((p - purify_ideal_success_probability(fid(x))).abs() < 1e-12);
        }
        let (p, _) = epp_oracle(fid(0.7), &GateNoiseParams::ideal());
        assert!((p - 0.68).abs() < 1e-12);
    }

    #[test]
    fn noisy_purification_matches_closed_form() {
        let g = GateNoiseParams::new(1.0, 0.98, 0.99).unwrap();
        let out = epp_circuit(fid(0.9), &g);
        assert!((out.fidelity.value() - purify_noisy(fid(0.9), &g).value()).abs() < 1e-9);
        assert!((out.success_probability - purify_noisy_success_probability(fid(0.9), &g)).abs() < 1e-12);
        out.kept_state.check().unwrap();
        out.werner_state.check().unwrap();
        assert!((fidelity_to_bell(&out.werner_state, BellKind::PhiPlus).value() - out.fidelity.value()).abs() < 1e-15);
    }

    #[test]
    fn measurement_noise_alone_spares_perfect_pairs() {
        let g = GateNoiseParams::new(1.0, 1.0, 0.95).unwrap();
        let (_, f) = epp_oracle(Fidelity::ONE, &g);
        assert!((f.value() - 1.0).abs() < 1e-12);
        assert!((purify_noisy(Fidelity::ONE, &g).value() - 1.0).abs() < 1e-15);
    }
}
