//! GOE log-determinants against the semicircle log-potential.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::rng_stream;
use super::stats::{mean_se, MeanSe};
use crate::error::{GlassError, Result};
use crate::semicircle::omega;

const GOE_TAG: u64 = 0x676f_65;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoeCheck {
    /// Mean over replicas of `(1/n) Σ log|λ_i − x|`.
    pub mean_log_det_per_n: f64,
    pub standard_error: f64,
    pub omega_x: f64,
}

/// GOE matrix with off-diagonal variance `1/n` and diagonal variance `2/n`.
pub fn sample_goe<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let s = (1.0 / n as f64).sqrt();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = d * s * 2f64.sqrt();
        for j in i + 1..n {
            let z: f64 = rng.sample(StandardNormal);
            m[(i, j)] = z * s;
            m[(j, i)] = z * s;
        }
    }
    m
}

pub fn goe_check(n_matrix: usize, x: f64, replicas: usize, seed: u64) -> Result<GoeCheck> {
    if x.abs() <= 2.1 {
        return Err(GlassError::Precondition(format!("|x| = {} must exceed 2.1", x.abs())));
    }
    if n_matrix < 2 || replicas < 2 {
        return Err(GlassError::Domain("need n ≥ 2 and at least two replicas".into()));
    }
    let samples: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_stream(seed, GOE_TAG, r as u64);
            let m = sample_goe(&mut rng, n_matrix);
            let eig = SymmetricEigen::new(m).eigenvalues;
            eig.iter().map(|l| (l - x).abs().ln()).sum::<f64>() / n_matrix as f64
        })
        .collect();
    let MeanSe { mean, se, .. } = mean_se(&samples);
    Ok(GoeCheck {
        mean_log_det_per_n: mean,
        standard_error: se,
        omega_x: omega(x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_goe_is_close_to_omega() {
        let c = goe_check(60, 3.0, 20, 9).unwrap();
        assert!((c.mean_log_det_per_n - c.omega_x).abs() < 0.05);
    }

    #[test]
    fn edge_is_rejected() {
        assert!(matches!(goe_check(10, 2.05, 5, 1), Err(GlassError::Precondition(_))));
    }
}
