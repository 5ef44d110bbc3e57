//! Phase classification, exponent fits and Monte Carlo gates.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{domain, Error, Result};
use crate::exact_engine::asymptotic_constant;
use crate::sum::compensated_sum;
use crate::walkers::ModelParams;

/// Default half-width, in standard errors, of Monte Carlo vs exact gates.
pub const DEFAULT_Z_LEVEL: f64 = 4.0;

/// Minimum `Xi_{n_lo}` for a trajectory to count as growing.
pub const GROWTH_PROXY_MIN: u64 = 10;

/// Tolerance on `|mean - exact|` when every replicate is identical.
pub const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    NegativeBeta,
    ZeroBeta,
    SubCriticalPositive,
    Critical,
    Localized,
}

impl Regime {
    pub const ALL: [Regime; 5] =
        [Regime::NegativeBeta, Regime::ZeroBeta, Regime::SubCriticalPositive, Regime::Critical, Regime::Localized];

    /// Whether `M_n` is bounded in `L^2` in this regime.
    pub fn l2_bounded(self) -> bool {
        matches!(self, Regime::NegativeBeta | Regime::ZeroBeta | Regime::SubCriticalPositive)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::NegativeBeta => "negative_beta",
            Regime::ZeroBeta => "zero_beta",
            Regime::SubCriticalPositive => "sub_critical_positive",
            Regime::Critical => "critical",
            Regime::Localized => "localized",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == key)
            .ok_or_else(|| Error::Domain(format!("unknown regime {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseLabel {
    pub regime: Regime,
    /// `p(beta+1) - beta`, below the critical line.
    pub growth_exponent: Option<f64>,
    /// `C(p, beta)`, below the critical line.
    pub constant: Option<f64>,
}

pub fn classify_phase(params: &ModelParams) -> PhaseLabel {
    let beta = params.beta();
    let regime = if params.is_critical() {
        Regime::Critical
    } else if beta > params.critical_beta() {
        Regime::Localized
    } else if beta < 0.0 {
        Regime::NegativeBeta
    } else if beta == 0.0 {
        Regime::ZeroBeta
    } else {
        Regime::SubCriticalPositive
    };
    let below = regime.l2_bounded();
    PhaseLabel {
        regime,
        growth_exponent: below.then(|| params.growth_exponent()),
        constant: if below { asymptotic_constant(params).ok() } else { None },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
    pub points: usize,
}

/// Least squares of `ln value` on `ln n` over points with `n` in the
/// inclusive window.
pub fn fit_exponent(points: &[(u64, f64)], window: (u64, u64)) -> Result<ExponentFit> {
    let sel: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, _)| *n >= window.0 && *n <= window.1)
        .map(|&(n, v)| (n as f64, v))
        .collect();
    if sel.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "exponent fit needs >= 5 points in [{}, {}], got {}",
            window.0,
            window.1,
            sel.len()
        )));
    }
    if let Some((n, v)) = sel.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return domain(format!("exponent fit needs positive values, got {v} at n = {n}"));
    }
    let xs: Vec<f64> = sel.iter().map(|(n, _)| n.ln()).collect();
    let ys: Vec<f64> = sel.iter().map(|(_, v)| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = compensated_sum(xs.iter().copied()) / k;
    let my = compensated_sum(ys.iter().copied()) / k;
    let sxx = compensated_sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    if sxx == 0.0 {
        return Err(Error::InsufficientData("exponent fit needs distinct n".into()));
    }
    let sxy = compensated_sum(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = compensated_sum(xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)));
    Ok(ExponentFit {
        slope,
        intercept,
        stderr: (sse / (k - 2.0) / sxx).sqrt(),
        residual: (sse / k).sqrt(),
        points: xs.len(),
    })
}

/// Mean, unbiased variance and a normal-theory confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub ci_half_width: f64,
}

impl SampleStats {
    pub fn from_values(values: &[f64], confidence: f64) -> Self {
        let count = values.len() as u64;
        let k = values.len() as f64;
        let mean = if count == 0 { f64::NAN } else { compensated_sum(values.iter().copied()) / k };
        let variance = if count < 2 {
            0.0
        } else {
            compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (k - 1.0)
        };
        Self { count, mean, variance, ci_half_width: z_for(confidence) * (variance / k).sqrt() }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

/// Two-sided normal quantile for a confidence level in `(0, 1)`.
pub fn z_for(confidence: f64) -> f64 {
    let normal = Normal::standard();
    normal.inverse_cdf(0.5 + confidence / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStats {
    pub n: u64,
    pub xi: SampleStats,
    pub m: SampleStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StagnationWindow {
    pub lo: u64,
    pub hi: u64,
    /// Fraction of replicates with `Xi_lo == Xi_hi`.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub params: ModelParams,
    pub n_replicates: u64,
    pub confidence: f64,
    pub checkpoints: Vec<CheckpointStats>,
    /// Fit of `ln E[Xi_n]` (sample mean) over the upper part of the run.
    pub exponent_fit: Option<ExponentFit>,
    /// Fit of the mean of `ln Xi_n` over replicates with
    /// `Xi_{n_lo} >= GROWTH_PROXY_MIN`.
    pub path_exponent_fit: Option<ExponentFit>,
    pub growth_proxy_fraction: f64,
    pub stagnation: Vec<StagnationWindow>,
}

impl EnsembleReport {
    /// `checkpoints` is shared by all trajectories; `xi[r][j]` and `m[r][j]`
    /// belong to replicate `r` at `checkpoints[j]`.
    pub fn build(
        params: ModelParams,
        checkpoints: &[u64],
        xi: &[Vec<u64>],
        m: &[Vec<f64>],
        confidence: f64,
    ) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InsufficientData("ensemble has no replicates".into()));
        }
        let width = checkpoints.len();
        if xi.len() != m.len() || xi.iter().any(|t| t.len() != width) || m.iter().any(|t| t.len() != width) {
            return Err(Error::Consistency("trajectory lengths do not match checkpoints".into()));
        }
        let stats: Vec<CheckpointStats> = checkpoints
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let xs: Vec<f64> = xi.iter().map(|t| t[j] as f64).collect();
                let ms: Vec<f64> = m.iter().map(|t| t[j]).collect();
                CheckpointStats { n, xi: SampleStats::from_values(&xs, confidence), m: SampleStats::from_values(&ms, confidence) }
            })
            .collect();

        let n_max = *checkpoints.last().unwrap_or(&1);
        let n_lo = (n_max / 100).max(10);
        let window = (n_lo, n_max);
        let means: Vec<(u64, f64)> = stats.iter().map(|s| (s.n, s.xi.mean)).collect();
        let exponent_fit = fit_exponent(&means, window).ok();

        let (path_exponent_fit, growth_proxy_fraction) = match checkpoints.iter().position(|&n| n >= n_lo) {
            Some(j0) => {
                let grown: Vec<&Vec<u64>> = xi.iter().filter(|t| t[j0] >= GROWTH_PROXY_MIN).collect();
                let frac = grown.len() as f64 / xi.len() as f64;
                let fit = if grown.is_empty() {
                    None
                } else {
                    let pts: Vec<(u64, f64)> = checkpoints[j0..]
                        .iter()
                        .enumerate()
                        .map(|(i, &n)| {
                            let ln_mean = compensated_sum(grown.iter().map(|t| (t[j0 + i] as f64).ln()));
                            (n, (ln_mean / grown.len() as f64).exp())
                        })
                        .collect();
                    fit_exponent(&pts, window).ok()
                };
                (fit, frac)
            }
            None => (None, 0.0),
        };

        let windows = doubling_windows(checkpoints);
        let stagnation = stagnation_profile(checkpoints, xi, &windows)?;
        Ok(Self {
            params,
            n_replicates: xi.len() as u64,
            confidence,
            checkpoints: stats,
            exponent_fit,
            path_exponent_fit,
            growth_proxy_fraction,
            stagnation,
        })
    }

    pub fn at(&self, n: u64) -> Option<&CheckpointStats> {
        self.checkpoints.iter().find(|s| s.n == n)
    }
}

/// Windows `[n, n']` with `n'` the first checkpoint at or past `2n`.
pub fn doubling_windows(checkpoints: &[u64]) -> Vec<(u64, u64)> {
    checkpoints
        .iter()
        .filter_map(|&n| checkpoints.iter().find(|&&h| h >= 2 * n).map(|&h| (n, h)))
        .collect()
}

/// Fraction of replicates whose `Xi` does not move on each window. Window
/// endpoints must be checkpoints.
pub fn stagnation_profile(checkpoints: &[u64], xi: &[Vec<u64>], windows: &[(u64, u64)]) -> Result<Vec<StagnationWindow>> {
    let pos = |n: u64| {
        checkpoints
            .iter()
            .position(|&c| c == n)
            .ok_or_else(|| Error::InsufficientData(format!("no checkpoint at n = {n}")))
    };
    windows
        .iter()
        .map(|&(lo, hi)| {
            if lo > hi {
                return domain(format!("empty window [{lo}, {hi}]"));
            }
            let (a, b) = (pos(lo)?, pos(hi)?);
            let frozen = xi.iter().filter(|t| t[a] == t[b]).count();
            Ok(StagnationWindow { lo, hi, fraction: frozen as f64 / xi.len().max(1) as f64 })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Comparison {
    ZScore { z: f64, level: f64, pass: bool },
    /// All replicates agreed, so the means are compared directly.
    DegenerateVariance { mc_mean: f64, exact: f64, tolerance: f64, pass: bool },
}

impl Comparison {
    pub fn pass(&self) -> bool {
        match *self {
            Comparison::ZScore { pass, .. } | Comparison::DegenerateVariance { pass, .. } => pass,
        }
    }
}

pub fn compare_stats(stats: &SampleStats, exact: f64, level: f64) -> Result<Comparison> {
    if !stats.variance.is_finite() || stats.count == 0 {
        return Err(Error::DegenerateVariance(format!("variance {} over {} replicates", stats.variance, stats.count)));
    }
    if stats.variance == 0.0 {
        let tolerance = DEGENERATE_TOL * exact.abs().max(1.0);
        return Ok(Comparison::DegenerateVariance {
            mc_mean: stats.mean,
            exact,
            tolerance,
            pass: (stats.mean - exact).abs() <= tolerance,
        });
    }
    let z = (stats.mean - exact) / stats.std_error();
    Ok(Comparison::ZScore { z, level, pass: z.abs() <= level })
}

/// Gate on `E[Xi_n]` at checkpoint `n`.
pub fn compare_mc_exact(report: &EnsembleReport, exact: f64, n: u64, level: f64) -> Result<Comparison> {
    let s = report
        .at(n)
        .ok_or_else(|| Error::InsufficientData(format!("ensemble has no checkpoint at n = {n}")))?;
    compare_stats(&s.xi, exact, level)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    /// `(observed, expected)` after pooling.
    pub bins: Vec<(u64, f64)>,
}

/// Pearson goodness of fit. Adjacent categories are pooled until every
/// expected count is at least 5.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != probs.len() {
        return domain(format!("{} observed categories vs {} probabilities", observed.len(), probs.len()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InsufficientData("no observations".into()));
    }
    let mut bins: Vec<(u64, f64)> = Vec::new();
    let (mut o, mut e) = (0u64, 0.0);
    let mut stray = 0u64;
    for (&obs, &q) in observed.iter().zip(probs) {
        if q <= 0.0 {
            stray += obs;
            continue;
        }
        o += obs;
        e += q * total as f64;
        if e >= 5.0 {
            bins.push((o, e));
            (o, e) = (0, 0.0);
        }
    }
    if e > 0.0 || o > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    if bins.len() < 2 {
        return Err(Error::InsufficientData("fewer than two categories after pooling".into()));
    }
    let dof = bins.len() as u64 - 1;
    if stray > 0 {
        return Ok(ChiSquareTest { statistic: f64::INFINITY, dof, p_value: 0.0, bins });
    }
    let statistic = compensated_sum(bins.iter().map(|&(o, e)| (o as f64 - e).powi(2) / e));
    let dist = ChiSquared::new(dof as f64).map_err(|err| Error::Domain(err.to_string()))?;
    Ok(ChiSquareTest { statistic, dof, p_value: dist.sf(statistic), bins })
}

/// Pearson test that two samples share one categorical law. Adjacent
/// categories are pooled until both expected counts are at least 5.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareTest> {
    if a.len() != b.len() {
        return domain(format!("{} vs {} categories", a.len(), b.len()));
    }
    let (ta, tb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if ta == 0.0 || tb == 0.0 {
        return Err(Error::InsufficientData("an empty sample".into()));
    }
    let share = ta.min(tb) / (ta + tb);
    let mut pooled: Vec<(u64, u64)> = Vec::new();
    let (mut x, mut y) = (0u64, 0u64);
    for (&u, &v) in a.iter().zip(b) {
        x += u;
        y += v;
        if (x + y) as f64 * share >= 5.0 {
            pooled.push((x, y));
            (x, y) = (0, 0);
        }
    }
    if x + y > 0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += x;
                last.1 += y;
            }
            None => pooled.push((x, y)),
        }
    }
    if pooled.len() < 2 {
        return Err(Error::InsufficientData("fewer than two categories after pooling".into()));
    }
    let (ra, rb) = ((tb / ta).sqrt(), (ta / tb).sqrt());
    let statistic = compensated_sum(
        pooled.iter().map(|&(u, v)| (u as f64 * ra - v as f64 * rb).powi(2) / (u + v) as f64),
    );
    let dof = pooled.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|err| Error::Domain(err.to_string()))?;
    let bins = pooled.iter().map(|&(u, v)| (u, (u + v) as f64 * ta / (ta + tb))).collect();
    Ok(ChiSquareTest { statistic, dof, p_value: dist.sf(statistic), bins })
}

/// Histogram of `values` over `1..=n`; values outside are ignored.
pub fn counts_1_to_n(values: impl IntoIterator<Item = u64>, n: u64) -> Vec<u64> {
    let mut out = vec![0u64; n as usize];
    for v in values {
        if (1..=n).contains(&v) {
            out[v as usize - 1] += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_engine::exact_mean_xi;

    fn params(p: f64, beta: f64) -> ModelParams {
        ModelParams::new(p, beta).unwrap()
    }

    #[test]
    fn phase_examples() {
        assert_eq!(classify_phase(&params(0.5, 1.0)).regime, Regime::Critical);
        assert_eq!(classify_phase(&params(0.5, 2.0)).regime, Regime::Localized);
        let neg = classify_phase(&params(0.5, -0.5));
        assert_eq!(neg.regime, Regime::NegativeBeta);
        assert!((neg.growth_exponent.unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(classify_phase(&params(0.3, 0.0)).regime, Regime::ZeroBeta);
        let sub = classify_phase(&params(0.5, 0.5));
        assert_eq!(sub.regime, Regime::SubCriticalPositive);
        assert!((sub.constant.unwrap() - 2.892_818_169_264_154).abs() < 1e-12);
        assert!(classify_phase(&params(0.5, 1.0)).growth_exponent.is_none());
        assert_eq!(classify_phase(&params(0.5, 1.0 + 1e-13)).regime, Regime::Critical);
        assert_eq!("Localized".parse::<Regime>().unwrap(), Regime::Localized);
        assert!("nowhere".parse::<Regime>().is_err());
    }

    #[test]
    fn every_parameter_set_has_exactly_one_regime() {
        for p in [0.05, 0.3, 0.5, 0.75, 0.95] {
            for beta in [-0.9, -0.1, 0.0, 0.01, p / (1.0 - p), p / (1.0 - p) + 0.01, 10.0] {
                let pr = params(p, beta);
                let label = classify_phase(&pr);
                assert_eq!(label.regime.l2_bounded(), beta < pr.critical_beta() && !pr.is_critical());
                assert_eq!(label.growth_exponent.is_some(), label.regime.l2_bounded());
            }
        }
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let pts: Vec<(u64, f64)> = (1..=20).map(|j| (10 * j * j, 3.0 * ((10 * j * j) as f64).powf(0.7))).collect();
        let fit = fit_exponent(&pts, (1, 10_000)).unwrap();
        assert!((fit.slope - 0.7).abs() < 1e-10);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-9);
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn fit_on_exact_means() {
        let pr = params(0.5, 0.0);
        let pts: Vec<(u64, f64)> = (0..=20)
            .map(|j| {
                let n = (1000.0 * 10f64.powf(j as f64 / 10.0)).round() as u64;
                (n, exact_mean_xi(n, &pr))
            })
            .collect();
        let fit = fit_exponent(&pts, (1000, 100_000)).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.02);

        let crit = params(0.5, 1.0);
        let ns = [1_000u64, 10_000, 100_000, 1_000_000, 10_000_000];
        let pts: Vec<(u64, f64)> = ns.iter().map(|&n| (n, exact_mean_xi(n, &crit))).collect();
        let fit = fit_exponent(&pts, (1, u64::MAX)).unwrap();
        assert!(fit.slope < 0.2);
        let last = exact_mean_xi(10_000_000, &crit) / (1e7f64).ln();
        assert!((last - 1.0).abs() < 0.05);
    }

    #[test]
    fn fit_errors() {
        let pts: Vec<(u64, f64)> = (1..=4).map(|n| (n, n as f64)).collect();
        assert!(matches!(fit_exponent(&pts, (1, 10)), Err(Error::InsufficientData(_))));
        let mut pts: Vec<(u64, f64)> = (1..=6).map(|n| (n, n as f64)).collect();
        pts[2].1 = 0.0;
        assert!(fit_exponent(&pts, (1, 10)).is_err());
    }

    #[test]
    fn comparison_gate() {
        let s = SampleStats { count: 100, mean: 2.0, variance: 1.0, ci_half_width: 0.0 };
        let c = compare_stats(&s, 2.0, DEFAULT_Z_LEVEL).unwrap();
        assert_eq!(c, Comparison::ZScore { z: 0.0, level: 4.0, pass: true });
        let biased = SampleStats { mean: 2.0 + 10.0 * s.std_error(), ..s };
        assert!(!compare_stats(&biased, 2.0, DEFAULT_Z_LEVEL).unwrap().pass());
        let frozen = SampleStats { variance: 0.0, ..s };
        match compare_stats(&frozen, 2.0, DEFAULT_Z_LEVEL).unwrap() {
            Comparison::DegenerateVariance { pass, .. } => assert!(pass),
            other => panic!("{other:?}"),
        }
        assert!(!compare_stats(&frozen, 2.5, DEFAULT_Z_LEVEL).unwrap().pass());
        let bad = SampleStats { variance: f64::NAN, ..s };
        assert!(matches!(compare_stats(&bad, 2.0, 4.0), Err(Error::DegenerateVariance(_))));
    }

    #[test]
    fn sample_stats() {
        let s = SampleStats::from_values(&[1.0, 2.0, 3.0, 4.0], 0.95);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((z_for(0.95) - 1.959_963_984_540_054).abs() < 1e-9);
    }

    #[test]
    fn stagnation_windows() {
        let cps = [1u64, 2, 4, 8];
        let xi = vec![vec![1, 1, 1, 2], vec![1, 2, 2, 2]];
        assert_eq!(doubling_windows(&cps), vec![(1, 2), (2, 4), (4, 8)]);
        let prof = stagnation_profile(&cps, &xi, &doubling_windows(&cps)).unwrap();
        let fr: Vec<f64> = prof.iter().map(|w| w.fraction).collect();
        assert_eq!(fr, vec![0.5, 1.0, 0.5]);
        assert!(stagnation_profile(&cps, &xi, &[(3, 8)]).is_err());
    }

    #[test]
    fn chi_square_pools_and_tests() {
        let probs = [0.5, 0.3, 0.19, 0.01];
        let obs = [500, 300, 190, 10];
        let t = chi_square_gof(&obs, &probs).unwrap();
        assert!(t.statistic < 1e-12);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let t = chi_square_gof(&[0, 0, 10, 5], &[0.0001, 0.0001, 0.5, 0.4998]).unwrap();
        assert_eq!(t.bins.len(), 2);
        let skewed = chi_square_gof(&[700, 100, 190, 10], &probs).unwrap();
        assert!(skewed.p_value < 1e-10);
        assert_eq!(chi_square_gof(&[1, 50, 50], &[0.0, 0.5, 0.5]).unwrap().p_value, 0.0);
        assert!(chi_square_gof(&[1], &[1.0]).is_err());
    }

    #[test]
    fn two_sample_chi_square() {
        let a = [100, 200, 300, 400];
        let t = chi_square_two_sample(&a, &[200, 400, 600, 800]).unwrap();
        assert!(t.statistic < 1e-12 && t.dof == 3);
        let t = chi_square_two_sample(&a, &[400, 300, 200, 100]).unwrap();
        assert!(t.p_value < 1e-10);
        assert!(chi_square_two_sample(&[1, 2], &[1]).is_err());
        assert!(chi_square_two_sample(&[0, 0], &[1, 1]).is_err());
    }
}
