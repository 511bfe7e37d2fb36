//! Bit-rate curves over distance and their asymptotic classification.
//!
//! Two yields are reported for the repeater. The resource-normalized rate is
//! end-to-end pairs per elementary pair, s(F)/R. The time-normalized rate is
//! end-to-end pairs per second of protocol latency, s(F)/T. Here s(F) is a
//! usefulness weight that drops once the delivered pair falls below a
//! configured fidelity.

use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;

use crate::chain::{resource_count, simulate_chain, ChainConfig, Stage};
use crate::error::{Error, Result};
use crate::format::sig12;
use crate::noise::{transmission_probability, LinkModel, MemoryModel};
use crate::werner::{purification_fixed_points, werner_weight, Fidelity, GateNoiseParams};

pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Direct,
    /// Repeater with gate noise only.
    RepeaterNoMemoryNoise,
    /// Repeater whose stored pairs decay while waiting.
    RepeaterMemoryNoise,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Direct => "direct",
            Regime::RepeaterNoMemoryNoise => "repeater_no_memory_noise",
            Regime::RepeaterMemoryNoise => "repeater_memory_noise",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Regime::Direct),
            "repeater_no_memory_noise" => Ok(Regime::RepeaterNoMemoryNoise),
            "repeater_memory_noise" => Ok(Regime::RepeaterMemoryNoise),
            other => Err(Error::Csv(format!("unknown regime `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateMetric {
    ResourceNormalized,
    TimeNormalized,
}

impl RateMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            RateMetric::ResourceNormalized => "resource_normalized",
            RateMetric::TimeNormalized => "time_normalized",
        }
    }
}

impl fmt::Display for RateMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RateMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resource_normalized" => Ok(RateMetric::ResourceNormalized),
            "time_normalized" => Ok(RateMetric::TimeNormalized),
            other => Err(Error::Csv(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub distance_km: f64,
    pub rate: f64,
}

/// Rates at strictly increasing distances, all positive.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    regime: Regime,
    metric: RateMetric,
    points: Vec<RatePoint>,
}

impl RateCurve {
    pub fn new(regime: Regime, metric: RateMetric, points: Vec<RatePoint>) -> Result<Self> {
        for p in &points {
            if !(p.rate > 0.0 && p.rate.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "rate",
                    value: p.rate,
                    reason: "curve rates must be positive and finite",
                });
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[1].distance_km <= w[0].distance_km) {
            return Err(Error::InvalidParameter {
                name: "distance_km",
                value: w[1].distance_km,
                reason: "curve distances must strictly increase",
            });
        }
        Ok(RateCurve { regime, metric, points })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn metric(&self) -> RateMetric {
        self.metric
    }

    pub fn points(&self) -> &[RatePoint] {
        &self.points
    }

    /// Points with `min_km < D ≤ max_km`.
    pub fn window(&self, min_km: f64, max_km: f64) -> impl Iterator<Item = &RatePoint> {
        self.points
            .iter()
            .filter(move |p| p.distance_km > min_km && p.distance_km <= max_km)
    }
}

pub const CURVE_HEADER: [&str; 4] = ["distance_km", "rate", "metric", "regime"];

pub fn write_curves_csv<W: io::Write>(curves: &[RateCurve], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CURVE_HEADER)?;
    for curve in curves {
        for p in &curve.points {
            w.write_record([
                sig12(p.distance_km),
                sig12(p.rate),
                curve.metric.to_string(),
                curve.regime.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

/// Reads curves back, grouped by (regime, metric) in order of first
/// appearance.
pub fn read_curves_csv<R: io::Read>(reader: R) -> Result<Vec<RateCurve>> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CURVE_HEADER {
        return Err(Error::Csv(format!("unexpected curve header {header:?}")));
    }
    let mut groups: Vec<(Regime, RateMetric, Vec<RatePoint>)> = Vec::new();
    for record in r.records() {
        let rec = record?;
        if rec.len() != 4 {
            return Err(Error::Csv(format!("expected 4 fields, got {}", rec.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Csv(format!("`{s}`: {e}")));
        let point = RatePoint {
            distance_km: num(&rec[0])?,
            rate: num(&rec[1])?,
        };
        let (metric, regime): (RateMetric, Regime) = (rec[2].parse()?, rec[3].parse()?);
        match groups.iter_mut().find(|g| g.0 == regime && g.1 == metric) {
            Some(g) => g.2.push(point),
            None => groups.push((regime, metric, vec![point])),
        }
    }
    groups
        .into_iter()
        .map(|(regime, metric, points)| RateCurve::new(regime, metric, points))
        .collect()
}

/// Pairs per attempt without repeaters: 10^(−αD/10).
pub fn direct_transmission_rate(distance_km: f64, link: &LinkModel) -> f64 {
    transmission_probability(distance_km, link.alpha_db_per_km)
}

pub fn direct_curve(distances_km: &[f64], link: &LinkModel) -> Result<RateCurve> {
    let points = distances_km
        .iter()
        .map(|&d| RatePoint {
            distance_km: d,
            rate: direct_transmission_rate(d, link),
        })
        .filter(|p| p.rate > 0.0)
        .collect();
    RateCurve::new(Regime::Direct, RateMetric::ResourceNormalized, points)
}

/// Fidelity above which a delivered pair counts fully.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Usefulness {
    /// f_min of the purification map at the configured gate noise.
    #[default]
    PurificationFloor,
    Threshold(Fidelity),
}

impl Usefulness {
    pub fn resolve(&self, g: &GateNoiseParams) -> Result<Fidelity> {
        match *self {
            Usefulness::PurificationFloor => Ok(purification_fixed_points(g)?.f_min),
            Usefulness::Threshold(f) => Ok(f),
        }
    }
}

/// s(F): 1 at or above `f_useful`, otherwise (w(F)/w(f_useful))² with
/// w = max(0, (4F − 1)/3). Continuous at `f_useful` and zero at F = 1/4.
pub fn usefulness_weight(f: Fidelity, f_useful: Fidelity) -> f64 {
    if f >= f_useful {
        return 1.0;
    }
    let reference = werner_weight(f_useful);
    if reference <= 0.0 {
        return 1.0;
    }
    (werner_weight(f).max(0.0) / reference).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeaterRate {
    pub distance_km: f64,
    /// s(F)/R.
    pub rate_resource: f64,
    /// s(F)/T; infinite when the schedule has no levels.
    pub rate_time: f64,
    /// `None` when the run degenerated.
    pub final_fidelity: Option<Fidelity>,
    pub elapsed_s: f64,
    pub resources: u64,
}

/// Rates of one repeater configuration. A degenerate run yields rate 0.
pub fn repeater_rate(
    cfg: &ChainConfig,
    g: &GateNoiseParams,
    mem: &MemoryModel,
    usefulness: Usefulness,
) -> Result<RepeaterRate> {
    let f_useful = usefulness.resolve(g)?;
    let resources = resource_count(cfg)?;
    let trace = simulate_chain(cfg, g, mem);
    let elapsed_s = trace.total_time();
    let (s, final_fidelity) = match trace.final_fidelity() {
        Ok(f) => (usefulness_weight(f, f_useful), Some(f)),
        Err(Error::DegenerateFidelity { .. }) => (0.0, None),
        Err(e) => return Err(e),
    };
    let rate_time = if s == 0.0 {
        0.0
    } else if elapsed_s > 0.0 {
        s / elapsed_s
    } else {
        f64::INFINITY
    };
    Ok(RepeaterRate {
        distance_km: cfg.distance_km(),
        rate_resource: s / resources as f64,
        rate_time,
        final_fidelity,
        elapsed_s,
        resources,
    })
}

/// Evaluates many configurations in parallel; output order follows input.
pub fn sweep(
    configs: &[ChainConfig],
    g: &GateNoiseParams,
    mem: &MemoryModel,
    usefulness: Usefulness,
) -> Result<Vec<RepeaterRate>> {
    configs
        .par_iter()
        .map(|cfg| repeater_rate(cfg, g, mem, usefulness))
        .collect()
}

/// Configurations with depth n for each entry of `depths`.
pub fn depth_family(base: &ChainConfig, depths: &[u32]) -> Result<Vec<ChainConfig>> {
    depths.iter().map(|&n| base.with_depth(n)).collect()
}

/// Configurations with each spacing in `spacings_km`, depth fixed.
pub fn spacing_family(base: &ChainConfig, spacings_km: &[f64]) -> Result<Vec<ChainConfig>> {
    spacings_km
        .iter()
        .map(|&d| Ok(base.with_link(base.link.with_spacing(d)?)))
        .collect()
}

/// Curve of one metric; points with zero or non-finite rate are dropped.
pub fn curve_from_rates(rates: &[RepeaterRate], regime: Regime, metric: RateMetric) -> Result<RateCurve> {
    let mut points: Vec<RatePoint> = rates
        .iter()
        .map(|r| RatePoint {
            distance_km: r.distance_km,
            rate: match metric {
                RateMetric::ResourceNormalized => r.rate_resource,
                RateMetric::TimeNormalized => r.rate_time,
            },
        })
        .filter(|p| p.rate > 0.0 && p.rate.is_finite())
        .collect();
    points.sort_by(|a, b| a.distance_km.total_cmp(&b.distance_km));
    RateCurve::new(regime, metric, points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite { distance_km: f64, level: u32 },
    Infinite,
}

impl Threshold {
    pub fn distance_km(&self) -> f64 {
        match *self {
            Threshold::Finite { distance_km, .. } => distance_km,
            Threshold::Infinite => f64::INFINITY,
        }
    }
}

/// Smallest pair length L^x·d at which the fidelity entering purification
/// (after the swap and the memory wait) is below f_min, searching levels
/// 1..=`n_max` of `base`'s family.
pub fn threshold_distance(
    base: &ChainConfig,
    n_max: u32,
    g: &GateNoiseParams,
    mem: &MemoryModel,
) -> Result<Threshold> {
    if mem.is_none() {
        return Ok(Threshold::Infinite);
    }
    let f_min = purification_fixed_points(g)?.f_min;
    // Levels up to x are identical for every depth ≥ x, so the deepest run
    // covers the whole family.
    let trace = simulate_chain(&base.with_depth(n_max)?, g, mem);
    for x in 1..=n_max {
        let entering = trace
            .steps
            .iter()
            .find(|s| s.level == x && s.stage == Stage::AfterMemory)
            .map(|s| s.fidelity);
        let crossed = match entering {
            Some(f) => f < f_min,
            // The run stopped at or before this level's memory stage.
            None => trace.degenerate.is_some_and(|d| d.level <= x),
        };
        if crossed {
            return Ok(Threshold::Finite {
                distance_km: base.span_km(x),
                level: x,
            });
        }
        if trace.degenerate.is_some() && trace.degenerate.unwrap().level < x {
            break;
        }
    }
    Ok(Threshold::Infinite)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    Polynomial,
    Exponential,
}

impl FitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FitKind::Polynomial => "polynomial",
            FitKind::Exponential => "exponential",
        }
    }
}

impl fmt::Display for FitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordinary least squares line y = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    // Rounding in the mean leaves a few ulps of spread on constant data.
    let scale = ys.iter().map(|y| y * y).sum::<f64>().max(f64::MIN_POSITIVE);
    if ss_tot <= 1e-24 * scale {
        return LineFit {
            slope: 0.0,
            intercept: my,
            r_squared: 1.0,
        };
    }
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    LineFit {
        slope,
        intercept,
        r_squared: (1.0 - ss_res / ss_tot).clamp(0.0, 1.0),
    }
}

/// Best of the two scaling hypotheses, with both fits kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub kind: FitKind,
    /// Degree p of rate ∝ D^(−p), or decay constant κ (per km) of
    /// rate ∝ e^(−κD).
    pub parameter: f64,
    pub goodness: f64,
    /// log rate against log D.
    pub polynomial: LineFit,
    /// log rate against D.
    pub exponential: LineFit,
    pub points: usize,
}

/// Fits log(rate) against log(D) and against D on `min_km < D ≤ max_km`.
pub fn scaling_fit(curve: &RateCurve, min_km: f64, max_km: f64) -> Result<ScalingFit> {
    let pts: Vec<&RatePoint> = curve.window(min_km, max_km).collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            found: pts.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let log_rate: Vec<f64> = pts.iter().map(|p| p.rate.ln()).collect();
    let dist: Vec<f64> = pts.iter().map(|p| p.distance_km).collect();
    let log_dist: Vec<f64> = dist.iter().map(|d| d.ln()).collect();
    let polynomial = least_squares(&log_dist, &log_rate);
    let exponential = least_squares(&dist, &log_rate);
    let (kind, line) = if polynomial.r_squared >= exponential.r_squared {
        (FitKind::Polynomial, polynomial)
    } else {
        (FitKind::Exponential, exponential)
    };
    Ok(ScalingFit {
        kind,
        parameter: -line.slope,
        goodness: line.r_squared,
        polynomial,
        exponential,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::MemoryModel;

    fn synthetic(f: impl Fn(f64) -> f64, distances: impl Iterator<Item = f64>) -> RateCurve {
        let points = distances
            .map(|d| RatePoint {
                distance_km: d,
                rate: f(d),
            })
            .collect();
        RateCurve::new(Regime::RepeaterNoMemoryNoise, RateMetric::ResourceNormalized, points).unwrap()
    }

    fn baseline_gates() -> GateNoiseParams {
        GateNoiseParams::new(0.999, 0.99, 0.995).unwrap()
    }

    #[test]
    fn direct_rate_examples() {
        let link = LinkModel::default();
        assert!((direct_transmission_rate(1e-12, &link) - 1.0).abs() < 1e-12);
        assert!((direct_transmission_rate(100.0, &link) - 0.01).abs() < 1e-15);
        let half = LinkModel::new(25.0, link.f0, 0.1, 2e5).unwrap();
        let full = direct_transmission_rate(300.0, &link);
        assert!((direct_transmission_rate(300.0, &half) - full.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn synthetic_polynomial_fit() {
        let curve = synthetic(|d| d.powi(-2), (1..=20).map(|i| 10.0 * i as f64));
        let fit = scaling_fit(&curve, 0.0, f64::INFINITY).unwrap();
        assert_eq!(fit.kind, FitKind::Polynomial);
        assert!((fit.parameter - 2.0).abs() < 0.01);
        assert!(fit.goodness >= 0.999);
    }

    #[test]
    fn synthetic_exponential_fit() {
        let curve = synthetic(|d| (-d / 50.0).exp(), (1..=20).map(|i| 25.0 * i as f64));
        let fit = scaling_fit(&curve, 0.0, f64::INFINITY).unwrap();
        assert_eq!(fit.kind, FitKind::Exponential);
        assert!((fit.parameter - 0.02).abs() < 0.0002);
    }

    #[test]
    fn constant_curve_fits_degree_zero() {
        let curve = synthetic(|_| 1.0 / 16.0, (1..=10).map(|i| 10.0 * i as f64));
        let fit = scaling_fit(&curve, 0.0, f64::INFINITY).unwrap();
        assert_eq!((fit.kind, fit.goodness), (FitKind::Polynomial, 1.0));
        assert_eq!(fit.parameter, 0.0);
    }

    #[test]
    fn fit_needs_five_points() {
        let curve = synthetic(|d| 1.0 / d, (1..=4).map(|i| i as f64));
        assert_eq!(
            scaling_fit(&curve, 0.0, f64::INFINITY),
            Err(Error::InsufficientPoints { found: 4, required: 5 })
        );
    }

    #[test]
    fn curve_invariants() {
        let p = |d, r| RatePoint { distance_km: d, rate: r };
        let bad = RateCurve::new(Regime::Direct, RateMetric::TimeNormalized, vec![p(2.0, 1.0), p(1.0, 1.0)]);
        assert!(bad.is_err());
        let zero = RateCurve::new(Regime::Direct, RateMetric::TimeNormalized, vec![p(1.0, 0.0)]);
        assert!(zero.is_err());
    }

    #[test]
    fn usefulness_gate() {
        let fu = Fidelity::new(0.6).unwrap();
        assert_eq!(usefulness_weight(Fidelity::new(0.9).unwrap(), fu), 1.0);
        assert_eq!(usefulness_weight(fu, fu), 1.0);
        let just_below = usefulness_weight(Fidelity::new(0.6 - 1e-12).unwrap(), fu);
        assert!((just_below - 1.0).abs() < 1e-10);
        assert_eq!(usefulness_weight(Fidelity::MIXED, fu), 0.0);
        assert_eq!(usefulness_weight(Fidelity::new(0.1).unwrap(), fu), 0.0);
    }

    #[test]
    fn ideal_rate_is_inverse_resource_count() {
        let base = ChainConfig::new(2, 1, 2, LinkModel::default(), 2).unwrap();
        for n in 1..=10 {
            let cfg = base.with_depth(n).unwrap();
            let r = repeater_rate(&cfg, &GateNoiseParams::ideal(), &MemoryModel::None, Usefulness::default()).unwrap();
            assert_eq!(r.rate_resource * r.resources as f64, 1.0);
            assert_eq!(r.rate_resource, 1.0 / 4f64.powi(n as i32));
            // L = M = 2: rate = (d/D)².
            assert!((r.rate_resource - (25.0 / cfg.distance_km()).powi(2)).abs() < 1e-18);
        }
    }

    #[test]
    fn degenerate_run_has_zero_rate() {
        let cfg = ChainConfig::new(2, 3, 2, LinkModel::default(), 1).unwrap();
        let mem = MemoryModel::exponential(0.0).unwrap();
        let r = repeater_rate(&cfg, &baseline_gates(), &mem, Usefulness::default()).unwrap();
        assert_eq!((r.rate_resource, r.rate_time, r.final_fidelity), (0.0, 0.0, None));
    }

    #[test]
    fn rate_propagates_no_valid_range() {
        let cfg = ChainConfig::new(2, 3, 2, LinkModel::default(), 1).unwrap();
        let g = GateNoiseParams::new(1.0, 0.5, 0.6).unwrap();
        assert_eq!(
            repeater_rate(&cfg, &g, &MemoryModel::None, Usefulness::default()),
            Err(Error::NoValidRange)
        );
        let fixed = Usefulness::Threshold(Fidelity::new(0.5).unwrap());
        assert!(repeater_rate(&cfg, &g, &MemoryModel::None, fixed).is_ok());
    }

    #[test]
    fn threshold_examples() {
        let base = ChainConfig::new(2, 1, 2, LinkModel::default(), 1).unwrap();
        let g = baseline_gates();
        assert_eq!(threshold_distance(&base, 12, &g, &MemoryModel::None).unwrap(), Threshold::Infinite);
        let instant = MemoryModel::exponential(0.0).unwrap();
        assert_eq!(
            threshold_distance(&base, 12, &g, &instant).unwrap(),
            Threshold::Finite { distance_km: 50.0, level: 1 }
        );
        // Independent hand-run of the composed maps: the fidelity entering
        // purification is 0.8140, 0.5875, 0.3360 at levels 1..3 against
        // f_min = 0.53522.
        let mem = MemoryModel::exponential(0.005).unwrap();
        assert_eq!(
            threshold_distance(&base, 12, &g, &mem).unwrap(),
            Threshold::Finite { distance_km: 200.0, level: 3 }
        );
        let slow = MemoryModel::exponential(1e6).unwrap();
        assert_eq!(threshold_distance(&base, 3, &GateNoiseParams::ideal(), &slow).unwrap(), Threshold::Infinite);
    }

    #[test]
    fn threshold_monotone_in_tau_and_spacing() {
        let g = baseline_gates();
        let taus = [1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 0.1];
        let spacings = [5.0, 10.0, 25.0, 50.0, 100.0];
        for k in [1, 2] {
            let base = ChainConfig::new(2, 1, 2, LinkModel::default(), k).unwrap();
            for &d in &spacings {
                let cfg = base.with_link(base.link.with_spacing(d).unwrap());
                let by_tau: Vec<f64> = taus
                    .iter()
                    .map(|&t| {
                        threshold_distance(&cfg, 14, &g, &MemoryModel::exponential(t).unwrap())
                            .unwrap()
                            .distance_km()
                    })
                    .collect();
                assert!(by_tau.windows(2).all(|w| w[1] >= w[0]), "d={d}: {by_tau:?}");
            }
            for &t in &taus {
                let mem = MemoryModel::exponential(t).unwrap();
                let levels: Vec<u32> = spacings
                    .iter()
                    .map(|&d| {
                        let cfg = base.with_link(base.link.with_spacing(d).unwrap());
                        match threshold_distance(&cfg, 14, &g, &mem).unwrap() {
                            Threshold::Finite { level, .. } => level,
                            Threshold::Infinite => u32::MAX,
                        }
                    })
                    .collect();
                assert!(levels.windows(2).all(|w| w[1] <= w[0]), "tau={t}: {levels:?}");
            }
        }
    }

    #[test]
    fn curves_round_trip_through_csv() {
        let link = LinkModel::default();
        let a = direct_curve(&[50.0, 100.0, 200.0], &link).unwrap();
        let b = synthetic(|d| 1.0 / (d * d), [50.0, 100.0, 200.0].into_iter());
        let mut buf = Vec::new();
        write_curves_csv(&[a.clone(), b.clone()], &mut buf).unwrap();
        let back = read_curves_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        for (orig, read) in [a, b].iter().zip(&back) {
            assert_eq!((orig.regime(), orig.metric()), (read.regime(), read.metric()));
            for (p, q) in orig.points().iter().zip(read.points()) {
                assert!((p.distance_km - q.distance_km).abs() < 1e-9);
                assert!((p.rate - q.rate).abs() <= 1e-11 * p.rate);
            }
        }
    }
}
