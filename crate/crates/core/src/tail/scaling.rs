//! Extreme-value scaling of per-run maxima against agent count.

use serde::Serialize;

use crate::observables::{ExtremeSample, Observable};

use super::zeta::ols;
use super::TailError;

/// One aggregated point of the <x_max> vs N curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: u32,
    pub mean_x_max: f64,
    /// 95% band on the mean.
    pub lo: f64,
    pub hi: f64,
    pub runs: u32,
}

/// Fitted extreme-value scaling: slope of log <x_max> vs log N, with the
/// theoretical exponent 1/(alpha - 1) when alpha is available.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub observable: Observable,
    pub gamma_hat: f64,
    pub gamma_th: Option<f64>,
    pub r: f64,
    pub points: Vec<ScalingPoint>,
}

/// OLS fit of log mean maxima against log N. Requires at least three
/// distinct N values with at least three runs each.
pub fn fit_extreme_scaling(
    extremes: &[ExtremeSample],
    observable: Observable,
    alpha_hat: Option<f64>,
) -> Result<ScalingFit, TailError> {
    let mut by_n: std::collections::BTreeMap<u32, Vec<u64>> = std::collections::BTreeMap::new();
    for e in extremes.iter().filter(|e| e.observable == observable) {
        by_n.entry(e.n).or_default().push(e.x_max);
    }
    by_n.retain(|_, v| v.len() >= 3);
    if by_n.len() < 3 {
        return Err(TailError::InsufficientScales {
            distinct_n: by_n.len() as u32,
        });
    }

    let mut points = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&n, maxima) in &by_n {
        let runs = maxima.len() as f64;
        let mean = maxima.iter().map(|&m| m as f64).sum::<f64>() / runs;
        let var = maxima
            .iter()
            .map(|&m| (m as f64 - mean) * (m as f64 - mean))
            .sum::<f64>()
            / (runs - 1.0).max(1.0);
        let half = 1.96 * (var / runs).sqrt();
        points.push(ScalingPoint {
            n,
            mean_x_max: mean,
            lo: mean - half,
            hi: mean + half,
            runs: runs as u32,
        });
        xs.push((n as f64).ln());
        ys.push(mean.ln());
    }
    let (gamma_hat, _, r) = ols(&xs, &ys);
    let gamma_th = alpha_hat.filter(|a| *a > 1.0).map(|a| 1.0 / (a - 1.0));
    Ok(ScalingFit {
        observable,
        gamma_hat,
        gamma_th,
        r,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: u32, x_max: u64, run: &str) -> ExtremeSample {
        ExtremeSample {
            n,
            observable: Observable::Tce,
            x_max,
            run_id: run.to_string(),
        }
    }

    #[test]
    fn exact_power_law_growth_is_recovered() {
        // <x_max> = 5 * N^0.5 lands on integers for N in {4, 16, 64}, so the
        // log-linear data is exact and the slope comes back to 1e-9.
        let mut extremes = Vec::new();
        for n in [4u32, 16, 64] {
            let x = (5.0 * (n as f64).sqrt()).round() as u64;
            for r in 0..3 {
                extremes.push(sample(n, x, &format!("r{n}-{r}")));
            }
        }
        let fit = fit_extreme_scaling(&extremes, Observable::Tce, Some(2.22)).unwrap();
        assert!((fit.gamma_hat - 0.5).abs() < 1e-9, "{}", fit.gamma_hat);
        let gamma_th = fit.gamma_th.unwrap();
        assert!((gamma_th - 1.0 / 1.22).abs() < 1e-12);
    }

    #[test]
    fn too_few_scales_is_an_error() {
        let extremes = vec![sample(8, 10, "a"), sample(16, 12, "b")];
        assert!(matches!(
            fit_extreme_scaling(&extremes, Observable::Tce, None),
            Err(TailError::InsufficientScales { .. })
        ));
    }
}
