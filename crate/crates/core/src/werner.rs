//! Closed-form fidelity algebra for Werner pairs.
//!
//! A Werner pair is fully described by its overlap `F` with |φ+⟩. The maps in
//! this module take fidelities to fidelities: recurrence purification with and
//! without gate noise, the L-fold swap formula, and the fixed points of the
//! noisy purification map that bound the range where purification helps.

use crate::error::{Error, Result};

/// Slack accepted on either side of [0, 1] before a value is rejected.
const FIDELITY_SLACK: f64 = 1e-12;

/// Overlap of a two-qubit state with the target Bell state, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fidelity(f64);

impl Fidelity {
    /// The maximally mixed point.
    pub const MIXED: Fidelity = Fidelity(0.25);
    pub const ONE: Fidelity = Fidelity(1.0);

    /// Rejects values more than 1e-12 outside [0, 1], then clamps.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(-FIDELITY_SLACK..=1.0 + FIDELITY_SLACK).contains(&value) {
            return Err(Error::InvalidFidelity(value));
        }
        Ok(Fidelity(value.clamp(0.0, 1.0)))
    }

    /// Wraps the output of a closed-form map. The maps are algebraically
    /// bounded to [0, 1]; a violation is a formula bug, not an input error.
    pub(crate) fn from_formula(value: f64) -> Self {
        debug_assert!(
            value.is_finite() && (-FIDELITY_SLACK..=1.0 + FIDELITY_SLACK).contains(&value),
            "formula produced fidelity {value}"
        );
        Fidelity(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// F̄ = (1 − F)/3, the weight of each non-target Bell state.
    pub fn complement(self) -> f64 {
        (1.0 - self.0) / 3.0
    }
}

impl From<Fidelity> for f64 {
    fn from(f: Fidelity) -> f64 {
        f.0
    }
}

/// Reliabilities of one-qubit operations, two-qubit operations and
/// measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateNoiseParams {
    p1: f64,
    p2: f64,
    eta: f64,
}

impl GateNoiseParams {
    pub fn new(p1: f64, p2: f64, eta: f64) -> Result<Self> {
        let unit = |name, value: f64| {
            if value > 0.0 && value <= 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must lie in (0, 1]",
                })
            }
        };
        unit("p1", p1)?;
        unit("p2", p2)?;
        if !(eta > 0.5 && eta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
                reason: "must lie in (1/2, 1]",
            });
        }
        Ok(GateNoiseParams { p1, p2, eta })
    }

    pub fn ideal() -> Self {
        GateNoiseParams {
            p1: 1.0,
            p2: 1.0,
            eta: 1.0,
        }
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Werner-weight factor contributed by one noisy swap:
    /// p1²·p2·(4η² − 1)/3.
    pub fn swap_factor(&self) -> f64 {
        self.p1 * self.p1 * self.p2 * (4.0 * self.eta * self.eta - 1.0) / 3.0
    }
}

/// The two non-trivial fixed points of the noisy purification map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoints {
    pub f_min: Fidelity,
    pub f_max: Fidelity,
    /// Set when the residual only touches zero (`f_min == f_max`).
    pub marginal: bool,
}

impl FixedPoints {
    pub fn contains(&self, f: Fidelity) -> bool {
        self.f_min <= f && f <= self.f_max
    }

    pub fn width(&self) -> f64 {
        self.f_max.value() - self.f_min.value()
    }
}

/// Werner weight w = (4F − 1)/3, so that F = 1/4 + 3w/4.
pub fn werner_weight(f: Fidelity) -> f64 {
    (4.0 * f.value() - 1.0) / 3.0
}

/// Inverse of [`werner_weight`].
pub fn fidelity_from_weight(w: f64) -> Result<Fidelity> {
    Fidelity::new(0.25 + 0.75 * w)
}

fn phi(f: f64, fb: f64) -> f64 {
    f * f + fb * fb
}

fn lambda(f: f64, fb: f64) -> f64 {
    f * f + 2.0 * f * fb + 5.0 * fb * fb
}

/// Recurrence purification of two equal Werner pairs with perfect operations.
pub fn purify_ideal(f: Fidelity) -> Fidelity {
    let (x, xb) = (f.value(), f.complement());
    Fidelity::from_formula(phi(x, xb) / lambda(x, xb))
}

/// Keep probability of the ideal recurrence step (the denominator Λ).
pub fn purify_ideal_success_probability(f: Fidelity) -> f64 {
    lambda(f.value(), f.complement())
}

/// Recurrence purification under two-qubit gate noise p2 and readout
/// reliability η. One-qubit noise does not enter.
pub fn purify_noisy(f: Fidelity, g: &GateNoiseParams) -> Fidelity {
    let (x, xb) = (f.value(), f.complement());
    let eta = g.eta;
    let eta_bar = 1.0 - eta;
    let theta = eta * eta + eta_bar * eta_bar;
    let xi = x * xb + xb * xb;
    let pi = (1.0 - g.p2 * g.p2) / (8.0 * g.p2 * g.p2);
    let cross = 2.0 * eta * eta_bar * xi;
    let num = theta * phi(x, xb) + cross + pi;
    let den = theta * lambda(x, xb) + 4.0 * (cross + pi);
    Fidelity::from_formula(num / den)
}

/// Keep probability of the noisy recurrence step: the denominator of
/// [`purify_noisy`] rescaled by p2² (the noisy branches agree half the time).
pub fn purify_noisy_success_probability(f: Fidelity, g: &GateNoiseParams) -> f64 {
    let (x, xb) = (f.value(), f.complement());
    let eta = g.eta;
    let eta_bar = 1.0 - eta;
    let theta = eta * eta + eta_bar * eta_bar;
    let xi = x * xb + xb * xb;
    let pi = (1.0 - g.p2 * g.p2) / (8.0 * g.p2 * g.p2);
    g.p2 * g.p2 * (theta * lambda(x, xb) + 4.0 * (2.0 * eta * eta_bar * xi + pi))
}

/// Fidelity after linking `links` equal-fidelity pairs with `links − 1` swaps.
///
/// # Panics
/// If `links` is zero.
pub fn swap_chain_fidelity(f: Fidelity, links: u32, g: &GateNoiseParams) -> Fidelity {
    assert!(links >= 1, "a swap chain links at least one pair");
    let gate = g.swap_factor().powi(links as i32 - 1);
    let weight = werner_weight(f).powi(links as i32);
    Fidelity::from_formula(0.25 + 0.75 * gate * weight)
}

/// Swaps a cohort of pairs. The closed form only covers equal inputs, so a
/// cohort with differing fidelities is rejected.
pub fn swap_cohort(cohort: &[Fidelity], g: &GateNoiseParams) -> Result<Fidelity> {
    let first = *cohort.first().ok_or(Error::InvalidParameter {
        name: "cohort",
        value: 0.0,
        reason: "at least one pair is required",
    })?;
    if let Some(other) = cohort
        .iter()
        .find(|f| (f.value() - first.value()).abs() > 1e-15)
    {
        return Err(Error::UnequalCohort(first.value(), other.value()));
    }
    Ok(swap_chain_fidelity(first, cohort.len() as u32, g))
}

const SCAN_START: f64 = 0.25 + 1e-6;
const SCAN_STEP: f64 = 1e-4;
const BISECT_WIDTH: f64 = 1e-12;
const TANGENCY_TOL: f64 = 1e-12;

fn residual(x: f64, g: &GateNoiseParams) -> f64 {
    purify_noisy(Fidelity::from_formula(x), g).value() - x
}

fn bisect(mut lo: f64, mut hi: f64, g: &GateNoiseParams) -> f64 {
    let mut r_lo = residual(lo, g);
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let r_mid = residual(mid, g);
        if r_mid == 0.0 {
            return mid;
        }
        if (r_mid > 0.0) == (r_lo > 0.0) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the residual maximum on [lo, hi].
fn refine_max(mut lo: f64, mut hi: f64, g: &GateNoiseParams) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut ra, mut rb) = (residual(a, g), residual(b, g));
    while hi - lo > BISECT_WIDTH {
        if ra < rb {
            lo = a;
            a = b;
            ra = rb;
            b = lo + inv_phi * (hi - lo);
            rb = residual(b, g);
        } else {
            hi = b;
            b = a;
            rb = ra;
            a = hi - inv_phi * (hi - lo);
            ra = residual(a, g);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, residual(x, g))
}

/// All roots of `purify_noisy(F) − F` on (1/4, 1], excluding the trivial
/// fixed point at 1/4, in ascending order.
pub fn purification_roots(g: &GateNoiseParams) -> Vec<f64> {
    let steps = ((1.0 - SCAN_START) / SCAN_STEP).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps)
        .map(|i| SCAN_START + i as f64 * SCAN_STEP)
        .filter(|&x| x < 1.0)
        .collect();
    grid.push(1.0);

    let values: Vec<f64> = grid.iter().map(|&x| residual(x, g)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
        } else if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] > 0.0) != (values[i + 1] > 0.0) {
            roots.push(bisect(grid[i], grid[i + 1], g));
        }
    }
    roots
}

/// Locates `f_min` and `f_max`, the fixed points of the noisy purification
/// map besides 1/4. Purification raises fidelity exactly on [f_min, f_max].
pub fn purification_fixed_points(g: &GateNoiseParams) -> Result<FixedPoints> {
    let roots = purification_roots(g);
    match roots.as_slice() {
        [] => {
            // No crossing: check for a tangency hidden between grid points.
            let steps = ((1.0 - SCAN_START) / SCAN_STEP).floor() as usize;
            let (best_i, _) = (0..=steps)
                .map(|i| (i, residual((SCAN_START + i as f64 * SCAN_STEP).min(1.0), g)))
                .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
            let lo = (SCAN_START + (best_i as f64 - 1.0) * SCAN_STEP).max(SCAN_START);
            let hi = (SCAN_START + (best_i as f64 + 1.0) * SCAN_STEP).min(1.0);
            let (x, r) = refine_max(lo, hi, g);
            if r >= -TANGENCY_TOL {
                let f = Fidelity::from_formula(x);
                Ok(FixedPoints {
                    f_min: f,
                    f_max: f,
                    marginal: true,
                })
            } else {
                Err(Error::NoValidRange)
            }
        }
        [only] => {
            let f = Fidelity::from_formula(*only);
            Ok(FixedPoints {
                f_min: f,
                f_max: f,
                marginal: true,
            })
        }
        [first, .., last] => Ok(FixedPoints {
            f_min: Fidelity::from_formula(*first),
            f_max: Fidelity::from_formula(*last),
            marginal: last - first < BISECT_WIDTH,
        }),
    }
}
