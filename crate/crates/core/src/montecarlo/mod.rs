//! Desk-scale Monte Carlo checks of the landscape theory.
//!
//! Everything here is a pure function of its inputs and a seed. Each
//! replica, chain or degree draws from its own ChaCha stream, so results do
//! not depend on how work is split across threads.

pub mod critical;
pub mod experiments;
pub mod gibbs;
pub mod goe;
pub mod hamiltonian;
pub mod path;
pub mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use critical::{find_q_critical, CriticalPoint};
pub use gibbs::{chaos_experiment, gibbs_experiment, GibbsConfig, OverlapHistogram};
pub use goe::goe_check;
pub use hamiltonian::{sample_hamiltonian, Evaluation, HamiltonianInstance};
pub use path::{track_critical_path, CriticalPath, PathStatus};

/// Independent RNG stream for `(seed, tag, index)`.
pub fn rng_stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index);
    rng
}

/// Overlap `R(x, y) = ⟨x, y⟩ / N`.
pub fn overlap(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / x.len() as f64
}

/// Uniform point on the sphere of radius `radius` in dimension `n`.
pub fn uniform_sphere<R: rand::Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a * radius / norm).collect()
}
