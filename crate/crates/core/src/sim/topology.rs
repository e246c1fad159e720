use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::trace::Topology;

use super::SimError;

/// Undirected adjacency lists, sorted per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    pub n: u32,
    pub neighbors: Vec<Vec<u32>>,
}

impl Adjacency {
    fn empty(n: u32) -> Self {
        Adjacency {
            n,
            neighbors: vec![Vec::new(); n as usize],
        }
    }

    fn add_edge(&mut self, a: u32, b: u32) {
        if a == b || self.neighbors[a as usize].contains(&b) {
            return;
        }
        self.neighbors[a as usize].push(b);
        self.neighbors[b as usize].push(a);
    }

    fn sort(&mut self) {
        for nb in &mut self.neighbors {
            nb.sort_unstable();
        }
    }

    pub fn degree(&self, a: u32) -> usize {
        self.neighbors[a as usize].len()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n as usize];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(cur) = stack.pop() {
            for &nb in &self.neighbors[cur as usize] {
                if !seen[nb as usize] {
                    seen[nb as usize] = true;
                    count += 1;
                    stack.push(nb);
                }
            }
        }
        count == self.n
    }
}

/// Builds the adjacency for a topology. Chain = path, star = single hub,
/// tree = balanced binary, hierarchical = 3-level balanced hierarchy,
/// sparse mesh = connected Erdos-Renyi with mean degree 4, and dynamic
/// reputation starts from a sparse mesh (rewiring happens at runtime).
pub fn build_topology(kind: Topology, n: u32, seed: u64) -> Result<Adjacency, SimError> {
    if n < 2 {
        return Err(SimError::InvalidN(n));
    }
    let mut adj = Adjacency::empty(n);
    match kind {
        Topology::Chain => {
            for i in 0..n - 1 {
                adj.add_edge(i, i + 1);
            }
        }
        Topology::Star => {
            for i in 1..n {
                adj.add_edge(0, i);
            }
        }
        Topology::Tree => {
            for i in 1..n {
                adj.add_edge(i, (i - 1) / 2);
            }
        }
        Topology::Hierarchical => {
            // Root 0, ~sqrt(n-1) branch nodes, workers spread evenly.
            let branches = ((n as f64 - 1.0).sqrt().round() as u32).max(1).min(n - 1);
            for b in 1..=branches {
                adj.add_edge(0, b);
            }
            for w in branches + 1..n {
                let b = 1 + (w - branches - 1) % branches;
                adj.add_edge(w, b);
            }
        }
        Topology::FullyConnected => {
            for i in 0..n {
                for j in i + 1..n {
                    adj.add_edge(i, j);
                }
            }
        }
        Topology::SparseMesh | Topology::DynamicReputation => {
            adj = sparse_mesh(n, seed);
        }
    }
    adj.sort();
    Ok(adj)
}

/// Erdos-Renyi with mean degree 4, resampled until connected.
fn sparse_mesh(n: u32, seed: u64) -> Adjacency {
    let p = (4.0 / (n as f64 - 1.0)).min(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d65_7368);
    for _ in 0..10_000 {
        let mut adj = Adjacency::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < p {
                    adj.add_edge(i, j);
                }
            }
        }
        if adj.is_connected() {
            return adj;
        }
    }
    // Pathological small n: fall back to a ring.
    let mut adj = Adjacency::empty(n);
    for i in 0..n {
        adj.add_edge(i, (i + 1) % n);
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_of_four_is_a_path() {
        let adj = build_topology(Topology::Chain, 4, 0).unwrap();
        assert_eq!(adj.neighbors[0], vec![1]);
        assert_eq!(adj.neighbors[1], vec![0, 2]);
        assert_eq!(adj.neighbors[2], vec![1, 3]);
        assert_eq!(adj.neighbors[3], vec![2]);
    }

    #[test]
    fn star_of_four_has_hub_degree_three() {
        let adj = build_topology(Topology::Star, 4, 0).unwrap();
        let mut degrees: Vec<usize> = (0..4).map(|i| adj.degree(i)).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![1, 1, 1, 3]);
    }

    #[test]
    fn sparse_mesh_is_connected_and_deterministic() {
        let a = build_topology(Topology::SparseMesh, 64, 42).unwrap();
        let b = build_topology(Topology::SparseMesh, 64, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.is_connected());
        let c = build_topology(Topology::SparseMesh, 64, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn n_below_two_is_rejected() {
        assert!(matches!(
            build_topology(Topology::Chain, 1, 0),
            Err(SimError::InvalidN(1))
        ));
    }
}
