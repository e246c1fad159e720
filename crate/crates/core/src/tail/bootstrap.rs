//! Nonparametric bootstrap confidence intervals for tail-fit parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::families::{Family, Params};
use super::fit::fit_family;
use super::TailError;

/// Percentile 95% interval for one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamInterval {
    pub lo: f64,
    pub hi: f64,
}

/// Bootstrap intervals, one entry per parameter of the family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapCi {
    pub family: Family,
    pub point: Params,
    pub resamples: u32,
    /// Parameter name -> percentile interval.
    pub intervals: Vec<(String, ParamInterval)>,
}

/// Resamples the tail with replacement `resamples` times, refits the family
/// at the same x_min, and reports percentile 95% intervals per parameter.
/// Fails when more than 20% of the resample fits fail.
pub fn bootstrap_ci(
    samples: &[u64],
    family: Family,
    x_min: u64,
    resamples: u32,
    seed: u64,
) -> Result<BootstrapCi, TailError> {
    let point = fit_family(samples, family, x_min)?;
    let tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut draws: Vec<Params> = Vec::with_capacity(resamples as usize);
    let mut failures = 0u32;
    let mut scratch = vec![0u64; tail.len()];
    for _ in 0..resamples {
        for slot in scratch.iter_mut() {
            *slot = tail[rng.gen_range(0..tail.len())];
        }
        match fit_family(&scratch, family, x_min) {
            Ok(fit) => draws.push(fit.params),
            Err(_) => failures += 1,
        }
    }
    if failures * 5 > resamples {
        return Err(TailError::BootstrapFailures {
            failed: failures,
            total: resamples,
        });
    }

    let intervals = param_names(family)
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut vals: Vec<f64> = draws.iter().map(|p| param_value(p, i)).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let pick = |q: f64| {
                let idx = ((vals.len() as f64 - 1.0) * q).round() as usize;
                vals[idx]
            };
            (
                name.to_string(),
                ParamInterval {
                    lo: pick(0.025),
                    hi: pick(0.975),
                },
            )
        })
        .collect();

    Ok(BootstrapCi {
        family,
        point: point.params,
        resamples,
        intervals,
    })
}

fn param_names(family: Family) -> &'static [&'static str] {
    match family {
        Family::PowerLaw => &["alpha"],
        Family::TruncatedPowerLaw => &["alpha", "xc"],
        Family::LogNormal => &["mu", "sigma"],
        Family::Exponential => &["rate"],
    }
}

fn param_value(p: &Params, i: usize) -> f64 {
    match (p, i) {
        (Params::PowerLaw { alpha }, 0) => *alpha,
        (Params::TruncatedPowerLaw { alpha, .. }, 0) => *alpha,
        (Params::TruncatedPowerLaw { xc, .. }, 1) => *xc,
        (Params::LogNormal { mu, .. }, 0) => *mu,
        (Params::LogNormal { sigma, .. }, 1) => *sigma,
        (Params::Exponential { rate }, 0) => *rate,
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail::sample::sample_power_law;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_resample_gives_a_degenerate_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs = sample_power_law(2.2, 3, 500, &mut rng);
        let ci = bootstrap_ci(&xs, Family::PowerLaw, 3, 1, 9).unwrap();
        let (_, interval) = &ci.intervals[0];
        assert_eq!(interval.lo, interval.hi);
    }
}
