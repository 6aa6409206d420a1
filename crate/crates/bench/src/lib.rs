//! Benchmark fixtures shared by the criterion targets.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rnmatrix::gen::{atoms, random_formula_of_size};
use rnmatrix::{Formula, Logic};

pub const EXAMPLE: &str = "((p & ~p) & ~(p & ~p)) -> ~~p";

/// `count` seeded formulas over {p, q, r} with exactly `size` connectives.
pub fn corpus(logic: Logic, size: u32, count: usize, seed: u64) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pqr = atoms(&["p", "q", "r"]);
    (0..count).map(|_| random_formula_of_size(&mut rng, logic, &pqr, size)).collect()
}
