use crate::trace::TraceBundle;

use super::{run_simulation, SimConfig};

/// Result of running a batch of configurations.
#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub bundles: Vec<(SimConfig, TraceBundle)>,
    /// Configs that failed, with the failure message.
    pub failures: Vec<(SimConfig, String)>,
}

/// Runs every config, collecting bundles and a partial-failure report.
pub fn run_sweep(configs: &[SimConfig]) -> SweepOutcome {
    let mut outcome = SweepOutcome::default();
    for config in configs {
        match run_simulation(config) {
            Ok(bundle) => outcome.bundles.push((config.clone(), bundle)),
            Err(e) => outcome.failures.push((config.clone(), e.to_string())),
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{TaskFamily, Topology};

    #[test]
    fn duplicate_configs_give_identical_bundles() {
        let c = SimConfig::defaults(8, Topology::Chain, TaskFamily::Qa, 7);
        let out = run_sweep(&[c.clone(), c]);
        assert_eq!(out.bundles.len(), 2);
        assert!(out.failures.is_empty());
        assert_eq!(out.bundles[0].1, out.bundles[1].1);
    }

    #[test]
    fn invalid_configs_land_in_the_failure_report() {
        let mut bad = SimConfig::defaults(8, Topology::Chain, TaskFamily::Qa, 7);
        bad.n = 1;
        let good = SimConfig::defaults(8, Topology::Star, TaskFamily::Qa, 7);
        let out = run_sweep(&[bad, good]);
        assert_eq!(out.bundles.len(), 1);
        assert_eq!(out.failures.len(), 1);
    }
}
