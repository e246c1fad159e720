//! Candidate tail families on integer support x >= x_min.
//!
//! All four families are discrete: the power law normalizes by Hurwitz zeta,
//! the truncated power law and log-normal by direct summation with analytic
//! tail remainders (residual mass below 1e-12), and the exponential reduces
//! to a geometric with closed forms throughout.

use serde::{Deserialize, Serialize};

use super::zeta::{hurwitz_zeta, upper_gamma_small_z};

/// Candidate family labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PowerLaw,
    TruncatedPowerLaw,
    LogNormal,
    Exponential,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::PowerLaw,
        Family::TruncatedPowerLaw,
        Family::LogNormal,
        Family::Exponential,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::PowerLaw => "power_law",
            Family::TruncatedPowerLaw => "truncated_power_law",
            Family::LogNormal => "log_normal",
            Family::Exponential => "exponential",
        }
    }
}

/// Fitted parameters, one variant per family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Params {
    PowerLaw { alpha: f64 },
    TruncatedPowerLaw { alpha: f64, xc: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
}

impl Params {
    pub fn family(&self) -> Family {
        match self {
            Params::PowerLaw { .. } => Family::PowerLaw,
            Params::TruncatedPowerLaw { .. } => Family::TruncatedPowerLaw,
            Params::LogNormal { .. } => Family::LogNormal,
            Params::Exponential { .. } => Family::Exponential,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Params::PowerLaw { alpha } | Params::TruncatedPowerLaw { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }

    pub fn xc(&self) -> Option<f64> {
        match self {
            Params::TruncatedPowerLaw { xc, .. } => Some(*xc),
            _ => None,
        }
    }
}

/// Log normalizing constant of the unnormalized mass over x >= x_min.
pub fn log_normalizer(params: &Params, x_min: u64) -> f64 {
    match *params {
        Params::PowerLaw { alpha } => hurwitz_zeta(alpha, x_min).ln(),
        Params::TruncatedPowerLaw { alpha, xc } => tpl_z(alpha, xc, x_min).ln(),
        Params::LogNormal { mu, sigma } => lognormal_z(mu, sigma, x_min).ln(),
        // Geometric: sum_{x>=x_min} e^{-r(x-x_min)} = 1/(1-e^-r).
        Params::Exponential { rate } => -(-(-rate).exp_m1()).ln(),
    }
}

/// Log of the unnormalized mass at integer x.
fn log_mass(params: &Params, x: u64, x_min: u64) -> f64 {
    let xf = x as f64;
    match *params {
        Params::PowerLaw { alpha } => -alpha * xf.ln(),
        Params::TruncatedPowerLaw { alpha, xc } => -alpha * xf.ln() - xf / xc,
        Params::LogNormal { mu, sigma } => {
            let d = xf.ln() - mu;
            -d * d / (2.0 * sigma * sigma) - xf.ln()
        }
        Params::Exponential { rate } => -rate * (xf - x_min as f64),
    }
}

/// Log pmf at integer x >= x_min.
pub fn log_pmf(params: &Params, x: u64, x_min: u64, log_z: f64) -> f64 {
    log_mass(params, x, x_min) - log_z
}

/// Model CDF P(X <= v) at each requested ascending value, by cumulative
/// summation of the pmf from x_min.
pub fn cdf_at(params: &Params, x_min: u64, values: &[u64]) -> Vec<f64> {
    if let Params::Exponential { rate } = *params {
        // Closed form: P(X <= v) = 1 - e^{-r (v + 1 - x_min)}.
        return values
            .iter()
            .map(|&v| 1.0 - (-rate * (v + 1 - x_min) as f64).exp())
            .collect();
    }
    let log_z = log_normalizer(params, x_min);
    let mut out = Vec::with_capacity(values.len());
    let mut cum = 0.0;
    let mut x = x_min;
    for &v in values {
        while x <= v {
            cum += log_pmf(params, x, x_min, log_z).exp();
            x += 1;
        }
        out.push(cum.min(1.0));
    }
    out
}

const XC_SPLIT: f64 = 1e5;

/// Truncated power-law normalizer Z(alpha, xc, x_min) = sum x^-a e^{-x/xc}.
pub fn tpl_z(alpha: f64, xc: f64, x_min: u64) -> f64 {
    if xc < XC_SPLIT || (x_min as f64) * 4.0 > 65536.0 {
        tpl_z_direct(alpha, xc, x_min)
    } else {
        tpl_z_split(alpha, xc, x_min)
    }
}

fn tpl_z_direct(alpha: f64, xc: f64, x_min: u64) -> f64 {
    let mut sum = 0.0;
    let mut x = x_min as f64;
    loop {
        let term = (-alpha * x.ln() - x / xc).exp();
        sum += term;
        // Past the cutoff the series is nearly geometric with ratio
        // e^{-1/xc}; the residual is bounded by term * xc.
        if x > xc && term * xc < sum * 1e-15 {
            break;
        }
        x += 1.0;
        if x > 60.0 * xc + x_min as f64 + 1e4 {
            break;
        }
    }
    sum
}

/// Large-cutoff route: direct sum to X0, then an Euler-Maclaurin tail whose
/// integral is xc^{1-a} Gamma(1-a, X0/xc).
fn tpl_z_split(alpha: f64, xc: f64, x_min: u64) -> f64 {
    let x0 = 65536u64.max(x_min * 4);
    let mut sum = 0.0;
    for x in x_min..x0 {
        let xf = x as f64;
        sum += (-alpha * xf.ln() - xf / xc).exp();
    }
    let xf = x0 as f64;
    let g = (-alpha * xf.ln() - xf / xc).exp();
    let h1 = -alpha / xf - 1.0 / xc;
    let h2 = alpha / (xf * xf);
    let h3 = -2.0 * alpha / (xf * xf * xf);
    let g1 = g * h1;
    let g3 = g * (h1 * h1 * h1 + 3.0 * h1 * h2 + h3);
    let integral = xc.powf(1.0 - alpha) * upper_gamma_small_z(1.0 - alpha, xf / xc);
    sum + integral + g / 2.0 - g1 / 12.0 + g3 / 720.0
}

/// Discrete log-normal normalizer: sum over x >= lower of
/// exp(-(ln x - mu)^2 / (2 sigma^2)) / x, with an erfc tail.
pub fn lognormal_z(mu: f64, sigma: f64, lower: u64) -> f64 {
    let s2 = sigma * sigma;
    let f = |x: f64| {
        let d = x.ln() - mu;
        (-d * d / (2.0 * s2) - x.ln()).exp()
    };
    let mut sum = 0.0;
    let mut x = lower as f64;
    let switch = loop {
        // Switch to the analytic tail once the summand varies slowly.
        let hp = ((x.ln() - mu) / s2 + 1.0) / x;
        if (x >= lower as f64 + 1024.0 && hp.abs() < 0.02) || x > 2e6 {
            break x;
        }
        sum += f(x);
        x += 1.0;
    };
    // Euler-Maclaurin from `switch`: integral (exact via erfc) + corrections.
    let x = switch;
    let integral = sigma * (std::f64::consts::PI / 2.0).sqrt()
        * libm::erfc((x.ln() - mu) / (sigma * std::f64::consts::SQRT_2));
    let g = f(x);
    let h1 = -((x.ln() - mu) / s2 + 1.0) / x;
    let d = x.ln() - mu;
    let h2 = (d / s2 + 1.0 - 1.0 / s2) / (x * x);
    let h3 = (3.0 / s2 - 2.0 * d / s2 - 2.0) / (x * x * x);
    let g1 = g * h1;
    let g3 = g * (h1 * h1 * h1 + 3.0 * h1 * h2 + h3);
    sum + integral + g / 2.0 - g1 / 12.0 + g3 / 720.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tpl_split_agrees_with_direct_summation() {
        let alpha = 2.3;
        let x_min = 5u64;
        for xc in [9e4, 2e5, 1e6] {
            let direct = tpl_z_direct(alpha, xc, x_min);
            let split = tpl_z_split(alpha, xc, x_min);
            assert!(
                (direct - split).abs() / direct < 1e-10,
                "xc={xc}: direct {direct} vs split {split}"
            );
        }
    }

    #[test]
    fn tpl_with_huge_cutoff_approaches_pure_power_law() {
        let alpha = 2.5;
        let x_min = 5u64;
        let z_tpl = tpl_z(alpha, 1e9, x_min);
        let z_pl = hurwitz_zeta(alpha, x_min);
        assert!((z_tpl - z_pl).abs() / z_pl < 1e-7);
    }

    #[test]
    fn lognormal_normalizer_matches_brute_force() {
        // Small sigma keeps the brute force feasible.
        let (mu, sigma, lower) = (2.0, 0.6, 1u64);
        let s2 = sigma * sigma;
        let mut brute = 0.0;
        for x in lower..2_000_000u64 {
            let xf = x as f64;
            let d = xf.ln() - mu;
            brute += (-d * d / (2.0 * s2) - xf.ln()).exp();
        }
        let z = lognormal_z(mu, sigma, lower);
        assert!((z - brute).abs() / brute < 1e-9, "z={z} brute={brute}");
    }

    #[test]
    fn pmfs_sum_to_one() {
        let cases = [
            Params::PowerLaw { alpha: 2.4 },
            Params::TruncatedPowerLaw { alpha: 1.6, xc: 40.0 },
            Params::LogNormal { mu: 1.2, sigma: 0.9 },
            Params::Exponential { rate: 0.25 },
        ];
        for params in cases {
            let x_min = 3u64;
            let log_z = log_normalizer(&params, x_min);
            let mut total = 0.0;
            for x in x_min..4_000_000 {
                let p = log_pmf(&params, x, x_min, log_z).exp();
                total += p;
                if x > x_min + 100 && p < 1e-16 {
                    break;
                }
            }
            assert!(
                (total - 1.0).abs() < 1e-6,
                "{:?} sums to {total}",
                params.family()
            );
        }
    }

    #[test]
    fn cdf_is_monotone_and_reaches_the_tail() {
        let params = Params::TruncatedPowerLaw { alpha: 2.0, xc: 30.0 };
        let values: Vec<u64> = (2..400).collect();
        let cdf = cdf_at(&params, 2, &values);
        for w in cdf.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(cdf.last().unwrap() > &0.999999);
    }
}
