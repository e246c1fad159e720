use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Synthetic workload parameters: K seed tasks, each expanded into
/// M = ceil(N / (K * A)) related tasks for a target of A agents per task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    pub seeds_k: u32,
    pub target_agents_per_task_a: u32,
    pub dependency_density: f64,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        WorkloadConfig {
            seeds_k: 5,
            target_agents_per_task_a: 5,
            dependency_density: 0.15,
        }
    }
}

impl WorkloadConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.seeds_k == 0 || self.target_agents_per_task_a == 0 {
            return Err("workload K and A must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.dependency_density) {
            return Err("dependency_density must lie in [0, 1]".into());
        }
        Ok(())
    }

    /// Expanded tasks per seed.
    pub fn expansions_per_seed(&self, n: u32) -> u32 {
        let denom = (self.seeds_k * self.target_agents_per_task_a) as f64;
        ((n as f64 / denom).ceil() as u32).max(1)
    }
}

/// A shallow acyclic task graph: tasks 0..tasks, edges (prerequisite, task).
/// Carries workload only; no coordination structure is encoded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDag {
    pub tasks: u32,
    pub deps: Vec<(u32, u32)>,
}

impl TaskDag {
    pub fn prerequisites(&self, task: u32) -> Vec<u32> {
        self.deps
            .iter()
            .filter(|(_, t)| *t == task)
            .map(|(p, _)| *p)
            .collect()
    }
}

/// Generates K * M task nodes with sparse dependency edges sampled at the
/// configured density against a short window of earlier tasks (keeps the DAG
/// shallow and acyclic by construction).
pub fn generate_workload(config: &WorkloadConfig, n: u32, seed: u64) -> TaskDag {
    let m = config.expansions_per_seed(n);
    let tasks = config.seeds_k * m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7461_736b);
    let mut deps = Vec::new();
    for t in 1..tasks {
        let window_start = t.saturating_sub(5);
        for p in window_start..t {
            if rng.gen::<f64>() < config.dependency_density {
                deps.push((p, t));
            }
        }
    }
    TaskDag { tasks, deps }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_count_follows_the_ceiling_formula() {
        let cfg = WorkloadConfig {
            seeds_k: 5,
            target_agents_per_task_a: 5,
            dependency_density: 0.2,
        };
        // M = ceil(128 / 25) = 6 -> 30 tasks.
        assert_eq!(cfg.expansions_per_seed(128), 6);
        assert_eq!(generate_workload(&cfg, 128, 1).tasks, 30);
    }

    #[test]
    fn degenerate_single_agent_workload_floors_at_one_task() {
        let cfg = WorkloadConfig {
            seeds_k: 1,
            target_agents_per_task_a: 1,
            dependency_density: 0.0,
        };
        assert_eq!(generate_workload(&cfg, 1, 0).tasks, 1);
    }

    #[test]
    fn zero_density_means_no_edges() {
        let cfg = WorkloadConfig {
            seeds_k: 4,
            target_agents_per_task_a: 2,
            dependency_density: 0.0,
        };
        let dag = generate_workload(&cfg, 64, 3);
        assert!(dag.deps.is_empty());
    }

    #[test]
    fn dependencies_always_point_backward() {
        let dag = generate_workload(&WorkloadConfig::default(), 256, 9);
        assert!(dag.deps.iter().all(|(p, t)| p < t));
    }
}
