//! Grid comparison of the closed-form maps against the circuit simulation.

use std::io::{self, Write};

use qrepeater_core::dm_oracle::{epp_oracle, es_oracle};
use qrepeater_core::werner::{purify_noisy, purify_noisy_success_probability, swap_chain_fidelity};
use qrepeater_core::{Fidelity, GateNoiseParams};

use crate::CliError;

pub const TOLERANCE: f64 = 1e-9;

/// The maps under test. Swappable so a corrupted map can be checked to fail.
#[derive(Clone, Copy)]
pub struct ClosedForms {
    pub swap_two_links: fn(Fidelity, &GateNoiseParams) -> Fidelity,
    pub purify: fn(Fidelity, &GateNoiseParams) -> Fidelity,
    pub purify_success: fn(Fidelity, &GateNoiseParams) -> f64,
}

impl Default for ClosedForms {
    fn default() -> Self {
        ClosedForms {
            swap_two_links: |f, g| swap_chain_fidelity(f, 2, g),
            purify: purify_noisy,
            purify_success: purify_noisy_success_probability,
        }
    }
}

pub struct Grid {
    pub fidelities: Vec<Fidelity>,
    pub gates: Vec<GateNoiseParams>,
}

/// `points` fidelities over [0.3, 1] against eight noise triples built from
/// {1, 0.99, 0.95}, plus `extra`.
pub fn grid(points: usize, extra: &GateNoiseParams) -> Grid {
    let triples = [
        (1.0, 1.0, 1.0),
        (0.99, 0.99, 0.99),
        (0.95, 0.95, 0.95),
        (1.0, 0.99, 0.95),
        (0.99, 0.95, 1.0),
        (0.95, 1.0, 0.99),
        (0.99, 1.0, 0.95),
        (0.95, 0.99, 1.0),
    ];
    let mut gates: Vec<GateNoiseParams> = triples
        .iter()
        .map(|&(p1, p2, eta)| GateNoiseParams::new(p1, p2, eta).expect("grid triple in range"))
        .collect();
    if !gates.contains(extra) {
        gates.push(*extra);
    }
    let fidelities = (0..points)
        .map(|i| {
            let x = 0.3 + 0.7 * i as f64 / (points - 1) as f64;
            Fidelity::new(x).expect("grid fidelity in range")
        })
        .collect();
    Grid { fidelities, gates }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub swap_max_deviation: f64,
    pub purify_max_deviation: f64,
    pub success_max_deviation: f64,
    pub fidelities: usize,
    pub triples: usize,
}

pub fn oracle_check(maps: &ClosedForms, grid: &Grid) -> OracleReport {
    let mut report = OracleReport {
        swap_max_deviation: 0.0,
        purify_max_deviation: 0.0,
        success_max_deviation: 0.0,
        fidelities: grid.fidelities.len(),
        triples: grid.gates.len(),
    };
    for g in &grid.gates {
        for &f in &grid.fidelities {
            let swapped = es_oracle(f, f, g).value();
            let (p, purified) = epp_oracle(f, g);
            let dev = |a: f64, b: f64| if (a - b).is_nan() { f64::INFINITY } else { (a - b).abs() };
            report.swap_max_deviation = report.swap_max_deviation.max(dev(swapped, (maps.swap_two_links)(f, g).value()));
            report.purify_max_deviation = report.purify_max_deviation.max(dev(purified.value(), (maps.purify)(f, g).value()));
            report.success_max_deviation = report.success_max_deviation.max(dev(p, (maps.purify_success)(f, g)));
        }
    }
    report
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        [self.swap_max_deviation, self.purify_max_deviation, self.success_max_deviation]
            .iter()
            .all(|d| *d <= TOLERANCE)
    }

    pub fn write<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "grid={}x{}", self.fidelities, self.triples)?;
        writeln!(w, "swap_max_deviation={:.3e}", self.swap_max_deviation)?;
        writeln!(w, "purify_max_deviation={:.3e}", self.purify_max_deviation)?;
        writeln!(w, "success_max_deviation={:.3e}", self.success_max_deviation)?;
        writeln!(w, "status={}", if self.passed() { "ok" } else { "deviation" })
    }

    pub fn verdict(&self) -> Result<(), CliError> {
        if self.passed() {
            Ok(())
        } else {
            Err(CliError::Analysis(format!(
                "closed-form maps deviate from the circuit simulation by more than {TOLERANCE:e}"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn true_maps_pass_and_ideal_grid_is_tight() {
        let ideal = GateNoiseParams::ideal();
        let g = grid(12, &ideal);
        assert_eq!(g.gates.len(), 8);
        let report = oracle_check(&ClosedForms::default(), &g);
        assert!(report.passed(), "{report:?}");

        let ideal_only = Grid {
            fidelities: g.fidelities.clone(),
            gates: vec![ideal],
        };
        let r = oracle_check(&ClosedForms::default(), &ideal_only);
        assert!(r.swap_max_deviation < 1e-12 && r.purify_max_deviation < 1e-12);
    }

    #[test]
    fn corrupted_map_fails() {
        let corrupted = ClosedForms {
            // Drops the measurement factor from the swap weight.
            swap_two_links: |f, g| {
                let w = qrepeater_core::werner::werner_weight(f);
                Fidelity::new(0.25 + 0.75 * g.p1() * g.p1() * g.p2() * w * w).unwrap()
            },
            ..ClosedForms::default()
        };
        let report = oracle_check(&corrupted, &grid(10, &GateNoiseParams::ideal()));
        assert!(!report.passed());
        assert!(report.swap_max_deviation > 1e-4);
        assert_eq!(report.verdict().unwrap_err().exit_code(), 1);
    }
}
