//! Maximum-likelihood fitting and KS-based x_min selection.

use serde::Serialize;

use super::families::{cdf_at, log_normalizer, Family, Params};
use super::zeta::{golden_max, hurwitz_zeta};
use super::TailError;

/// Histogrammed tail data: distinct ascending values with counts, plus the
/// sufficient statistics every family needs.
#[derive(Debug, Clone)]
pub struct TailData {
    pub x_min: u64,
    pub values: Vec<u64>,
    pub counts: Vec<u64>,
    pub n: u64,
    pub sum_log_x: f64,
    pub sum_x: f64,
    pub max: u64,
}

impl TailData {
    /// Collects samples >= x_min into a histogram.
    pub fn from_samples(samples: &[u64], x_min: u64) -> Self {
        let mut tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
        tail.sort_unstable();
        let mut values = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for x in tail {
            if values.last() == Some(&x) {
                *counts.last_mut().unwrap() += 1;
            } else {
                values.push(x);
                counts.push(1);
            }
        }
        let n: u64 = counts.iter().sum();
        let mut sum_log_x = 0.0;
        let mut sum_x = 0.0;
        for (&v, &c) in values.iter().zip(&counts) {
            sum_log_x += c as f64 * (v as f64).ln();
            sum_x += (c * v) as f64;
        }
        TailData {
            x_min,
            max: values.last().copied().unwrap_or(0),
            values,
            counts,
            n,
            sum_log_x,
            sum_x,
        }
    }

    pub fn distinct(&self) -> u64 {
        self.values.len() as u64
    }

    /// Log-likelihood of the data under the given parameters.
    pub fn loglik(&self, params: &Params) -> f64 {
        let log_z = log_normalizer(params, self.x_min);
        match *params {
            Params::PowerLaw { alpha } => -alpha * self.sum_log_x - self.n as f64 * log_z,
            Params::TruncatedPowerLaw { alpha, xc } => {
                -alpha * self.sum_log_x - self.sum_x / xc - self.n as f64 * log_z
            }
            Params::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                let mut ll = 0.0;
                for (&v, &c) in self.values.iter().zip(&self.counts) {
                    let lx = (v as f64).ln();
                    let d = lx - mu;
                    ll += c as f64 * (-d * d / (2.0 * s2) - lx);
                }
                ll - self.n as f64 * log_z
            }
            Params::Exponential { rate } => {
                let exceed = self.sum_x - (self.n * self.x_min) as f64;
                -rate * exceed - self.n as f64 * log_z
            }
        }
    }
}

/// A fitted tail model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    pub params: Params,
    pub x_min: u64,
    pub n_tail: u64,
    /// Count of distinct tail values (reported as metadata only).
    pub distinct_tail: u64,
    /// KS distance between the empirical tail CDF and the fitted model.
    pub ks: f64,
    pub loglik: f64,
}

impl TailFit {
    pub fn family(&self) -> Family {
        self.params.family()
    }

    pub fn alpha_hat(&self) -> Option<f64> {
        self.params.alpha()
    }

    pub fn xc_hat(&self) -> Option<f64> {
        self.params.xc()
    }
}

/// Minimum tail size for any fit.
pub const MIN_TAIL: u64 = 10;
/// Minimum distinct tail values for x_min selection.
pub const MIN_DISTINCT_SCAN: u64 = 10;
/// Optimization bounds and budget (coarse grid + coordinate refinement,
/// tolerance 1e-6 in log-likelihood).
const ALPHA_GRID: (f64, f64, usize) = (1.05, 4.5, 12);
const ALPHA_BOUNDS: (f64, f64) = (1.02, 8.0);
const LOGLIK_TOL: f64 = 1e-6;
const MAX_ROUNDS: usize = 40;

/// Fits one family on the tail x >= x_min by maximum likelihood.
pub fn fit_family(samples: &[u64], family: Family, x_min: u64) -> Result<TailFit, TailError> {
    let data = TailData::from_samples(samples, x_min);
    fit_data(&data, family)
}

pub(crate) fn fit_data(data: &TailData, family: Family) -> Result<TailFit, TailError> {
    if data.n < MIN_TAIL || data.distinct() < 2 {
        return Err(TailError::InsufficientTail {
            n_tail: data.n,
            distinct: data.distinct(),
        });
    }
    let params = match family {
        Family::PowerLaw => fit_power_law(data),
        Family::Exponential => fit_exponential(data),
        Family::TruncatedPowerLaw => fit_tpl(data)?,
        Family::LogNormal => fit_lognormal(data)?,
    };
    let loglik = data.loglik(&params);
    Ok(TailFit {
        ks: ks_statistic(data, &params),
        params,
        x_min: data.x_min,
        n_tail: data.n,
        distinct_tail: data.distinct(),
        loglik,
    })
}

fn fit_power_law(data: &TailData) -> Params {
    let f = |alpha: f64| -alpha * data.sum_log_x - data.n as f64 * hurwitz_zeta(alpha, data.x_min).ln();
    let (alpha, _) = golden_max(f, 1.000_1, 24.0, 1e-9);
    Params::PowerLaw { alpha }
}

fn fit_exponential(data: &TailData) -> Params {
    // Geometric MLE: rate = ln(1 + 1/mean exceedance).
    let mean_exceed = data.sum_x / data.n as f64 - data.x_min as f64;
    Params::Exponential {
        rate: (1.0 + 1.0 / mean_exceed).ln(),
    }
}

fn fit_tpl(data: &TailData) -> Result<Params, TailError> {
    let xc_lo = (data.x_min as f64).max(1.0);
    let xc_hi = (10.0 * data.max as f64).max(xc_lo * 4.0);
    // Hard cap far beyond the data range; past it the exponential factor is
    // indistinguishable from 1 over the support.
    let xc_cap = (1e4 * data.max as f64).max(1e6);
    let ll = |alpha: f64, xc: f64| data.loglik(&Params::TruncatedPowerLaw { alpha, xc });

    let (a_lo, a_hi, a_steps) = ALPHA_GRID;
    let xc_steps = 14usize;
    let mut best = (f64::NEG_INFINITY, a_lo, xc_lo);
    for i in 0..a_steps {
        let alpha = a_lo + (a_hi - a_lo) * i as f64 / (a_steps - 1) as f64;
        for j in 0..xc_steps {
            let xc = (xc_lo.ln() + (xc_hi.ln() - xc_lo.ln()) * j as f64 / (xc_steps - 1) as f64).exp();
            let v = ll(alpha, xc);
            if v > best.0 {
                best = (v, alpha, xc);
            }
        }
    }
    let a_step = (a_hi - a_lo) / (a_steps - 1) as f64;
    let xc_factor = ((xc_hi.ln() - xc_lo.ln()) / (xc_steps - 1) as f64).exp();

    let (mut cur_ll, mut alpha, mut xc) = best;
    for round in 0..MAX_ROUNDS {
        let (na, _) = golden_max(
            |a| ll(a, xc),
            (alpha - 1.5 * a_step).max(ALPHA_BOUNDS.0),
            (alpha + 1.5 * a_step).min(ALPHA_BOUNDS.1),
            1e-7,
        );
        alpha = na;
        let (lx, _) = golden_max(
            |l| ll(alpha, l.exp()),
            (xc / xc_factor.powi(2)).max(0.5).ln(),
            (xc * xc_factor.powi(2)).min(xc_cap).ln(),
            1e-7,
        );
        xc = lx.exp();
        let now = ll(alpha, xc);
        if (now - cur_ll).abs() < LOGLIK_TOL {
            return Ok(Params::TruncatedPowerLaw { alpha, xc });
        }
        cur_ll = now;
        if round + 1 == MAX_ROUNDS {
            return Err(TailError::NonConvergence);
        }
    }
    Ok(Params::TruncatedPowerLaw { alpha, xc })
}

fn fit_lognormal(data: &TailData) -> Result<Params, TailError> {
    let ll = |mu: f64, sigma: f64| data.loglik(&Params::LogNormal { mu, sigma });
    let mu_lo = (data.x_min as f64).ln() - 12.0;
    let mu_hi = (data.max as f64).ln() + 2.0;
    let sig_lo: f64 = 0.05;
    let sig_hi: f64 = 12.0;

    let mut best = (f64::NEG_INFINITY, mu_lo, 1.0);
    let (mu_steps, sig_steps) = (14usize, 12usize);
    for i in 0..mu_steps {
        let mu = mu_lo + (mu_hi - mu_lo) * i as f64 / (mu_steps - 1) as f64;
        for j in 0..sig_steps {
            let sigma =
                (sig_lo.ln() + (sig_hi.ln() - sig_lo.ln()) * j as f64 / (sig_steps - 1) as f64).exp();
            let v = ll(mu, sigma);
            if v > best.0 {
                best = (v, mu, sigma);
            }
        }
    }
    let mu_step = (mu_hi - mu_lo) / (mu_steps - 1) as f64;
    let sig_factor = ((sig_hi.ln() - sig_lo.ln()) / (sig_steps - 1) as f64).exp();

    let (mut cur_ll, mut mu, mut sigma) = best;
    for round in 0..MAX_ROUNDS {
        let (nm, _) = golden_max(|m| ll(m, sigma), mu - 1.5 * mu_step, mu + 1.5 * mu_step, 1e-7);
        mu = nm;
        let (ls, _) = golden_max(
            |s| ll(mu, s.exp()),
            (sigma / sig_factor.powi(2)).max(0.02).ln(),
            (sigma * sig_factor.powi(2)).min(40.0).ln(),
            1e-7,
        );
        sigma = ls.exp();
        let now = ll(mu, sigma);
        if (now - cur_ll).abs() < LOGLIK_TOL {
            return Ok(Params::LogNormal { mu, sigma });
        }
        cur_ll = now;
        if round + 1 == MAX_ROUNDS {
            return Err(TailError::NonConvergence);
        }
    }
    Ok(Params::LogNormal { mu, sigma })
}

/// KS distance over the distinct tail values between the empirical CDF and
/// the model CDF, both conditioned on x >= x_min.
pub fn ks_statistic(data: &TailData, params: &Params) -> f64 {
    let model = cdf_at(params, data.x_min, &data.values);
    let mut cum = 0u64;
    let mut d = 0.0;
    for ((&c, &m), _) in data.counts.iter().zip(&model).zip(&data.values) {
        cum += c;
        let emp = cum as f64 / data.n as f64;
        let gap = (emp - m).abs();
        if gap > d {
            d = gap;
        }
    }
    d
}

/// Scans candidate x_min over the distinct sample values and returns the one
/// whose fit minimizes the KS distance. Candidates must keep at least
/// [`MIN_TAIL`] samples and [`MIN_DISTINCT_SCAN`] distinct values in the
/// tail; when more than 120 candidates exist, the scan is thinned evenly.
pub fn select_xmin(samples: &[u64], family: Family) -> Result<(u64, TailFit), TailError> {
    if samples.len() < 50 {
        return Err(TailError::InsufficientTail {
            n_tail: samples.len() as u64,
            distinct: 0,
        });
    }
    let mut distinct: Vec<u64> = samples.to_vec();
    distinct.sort_unstable();
    distinct.dedup();

    let mut candidates: Vec<u64> = distinct
        .iter()
        .copied()
        .filter(|&v| {
            let n_tail = samples.iter().filter(|&&x| x >= v).count() as u64;
            let d_tail = distinct.iter().filter(|&&x| x >= v).count() as u64;
            n_tail >= MIN_TAIL && d_tail >= MIN_DISTINCT_SCAN
        })
        .collect();
    if candidates.is_empty() {
        return Err(TailError::InsufficientTail {
            n_tail: samples.len() as u64,
            distinct: distinct.len() as u64,
        });
    }
    if candidates.len() > 120 {
        let step = candidates.len() as f64 / 120.0;
        candidates = (0..120)
            .map(|i| candidates[(i as f64 * step) as usize])
            .collect();
        candidates.dedup();
    }

    let mut best: Option<(u64, TailFit)> = None;
    for &x_min in &candidates {
        let data = TailData::from_samples(samples, x_min);
        let Ok(fit) = fit_data(&data, family) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((_, b)) => fit.ks < b.ks,
        };
        if better {
            best = Some((x_min, fit));
        }
    }
    best.ok_or(TailError::InsufficientTail {
        n_tail: samples.len() as u64,
        distinct: distinct.len() as u64,
    })
}

/// Empirical complementary CDF: (x, P(X >= x)) at each distinct value,
/// strictly decreasing in x, starting at 1.
pub fn ccdf(samples: &[u64]) -> Result<Vec<(u64, f64)>, TailError> {
    if samples.is_empty() {
        return Err(TailError::EmptySamples);
    }
    let data = TailData::from_samples(samples, samples.iter().copied().min().unwrap());
    let n = data.n as f64;
    let mut seen = 0u64;
    let mut out = Vec::with_capacity(data.values.len());
    for (&v, &c) in data.values.iter().zip(&data.counts) {
        out.push((v, (data.n - seen) as f64 / n));
        seen += c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ccdf_counts_directly() {
        let out = ccdf(&[1, 1, 2]).unwrap();
        assert_eq!(out, vec![(1, 1.0), (2, 1.0 / 3.0)]);
        assert_eq!(ccdf(&[5]).unwrap(), vec![(5, 1.0)]);
        assert!(matches!(ccdf(&[]), Err(TailError::EmptySamples)));
    }

    #[test]
    fn constant_samples_are_rejected() {
        let samples = vec![7u64; 100];
        assert!(matches!(
            fit_family(&samples, Family::PowerLaw, 7),
            Err(TailError::InsufficientTail { .. })
        ));
        assert!(matches!(
            select_xmin(&samples, Family::PowerLaw),
            Err(TailError::InsufficientTail { .. })
        ));
    }

    #[test]
    fn exponential_mle_is_closed_form() {
        // Mean exceedance 3 -> rate = ln(4/3).
        let samples: Vec<u64> = (0..100).map(|i| 5 + (i % 7)).collect();
        let data = TailData::from_samples(&samples, 5);
        let m = data.sum_x / data.n as f64 - 5.0;
        let fit = fit_family(&samples, Family::Exponential, 5).unwrap();
        if let Params::Exponential { rate } = fit.params {
            assert!((rate - (1.0 + 1.0 / m).ln()).abs() < 1e-12);
        } else {
            panic!("wrong family");
        }
    }

    #[test]
    fn tpl_with_infinite_cutoff_matches_pure_power_law_loglik() {
        // Small values keep sum_x / xc below the tolerance.
        let samples: Vec<u64> = (0..60).map(|i| 5 + (i % 12)).collect();
        let data = TailData::from_samples(&samples, 5);
        let alpha = 2.5;
        let ll_tpl = data.loglik(&Params::TruncatedPowerLaw { alpha, xc: 1e9 });
        let ll_pl = data.loglik(&Params::PowerLaw { alpha });
        assert!(
            (ll_tpl - ll_pl).abs() < 1e-6,
            "tpl {ll_tpl} vs pl {ll_pl}"
        );
    }
}
