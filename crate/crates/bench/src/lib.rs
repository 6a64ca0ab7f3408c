//! Fixed-seed inputs shared by the benchmarks.

use kcover::generators::{gen_random, gen_tight_r4sp, gen_unit_u, GeneratedInstance};
use kcover::matching::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random 3-set instance over `n` elements.
pub fn random3(n: usize, seed: u64) -> GeneratedInstance {
    gen_random(n, 3, n, 0.7, seed).expect("valid parameters")
}

/// Random instance with sets of size at most `k`.
pub fn random_k(n: usize, k: usize, seed: u64) -> GeneratedInstance {
    gen_random(n, k, n, 0.7, seed).expect("valid parameters")
}

pub fn example_unit() -> GeneratedInstance {
    gen_unit_u(13).expect("valid parameters")
}

/// Certified restricted 4-packing fixed point with `units` chained units.
pub fn tight4(units: usize) -> GeneratedInstance {
    gen_tight_r4sp(units, 8, 3, 1).expect("certified instance")
}

/// Erdős–Rényi graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::new(n, edges).expect("simple graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_stable() {
        assert_eq!(random3(12, 1).to_text(), random3(12, 1).to_text());
        assert_eq!(random_graph(20, 0.3, 2), random_graph(20, 0.3, 2));
        assert_eq!(example_unit().instance.n(), 116);
    }
}
