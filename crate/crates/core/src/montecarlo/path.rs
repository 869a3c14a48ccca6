//! Continuation of a local minimum in the radius `q`.

use nalgebra::SymmetricEigen;

use super::critical::{newton_polish, spherical_state, CriticalPoint, DEFAULT_TOL};
use super::hamiltonian::HamiltonianInstance;
use crate::error::{GlassError, Result};

/// Step in `q` between consecutive path points.
pub const PATH_STEP: f64 = 1e-3;

/// Spherical Hessian condition number beyond which tracking stops.
pub const MAX_PATH_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathStatus {
    Completed,
    IllConditioned { q: f64, condition: f64 },
    CorrectorFailed { q: f64 },
}

impl PathStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathStatus::Completed => "completed",
            PathStatus::IllConditioned { .. } => "ill_conditioned",
            PathStatus::CorrectorFailed { .. } => "corrector_failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriticalPath {
    /// Points ordered from `q = 1` downwards.
    pub points: Vec<CriticalPoint>,
    pub status: PathStatus,
}

impl CriticalPath {
    /// Largest `‖Δσ‖/(√N Δq)` between consecutive points.
    pub fn max_speed(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let n = w[0].sigma.len() as f64;
                let d: f64 = w[0].sigma.iter().zip(&w[1].sigma).map(|(a, b)| (a - b) * (a - b)).sum();
                d.sqrt() / n.sqrt() / (w[0].q - w[1].q).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Follow `cp` (a local minimum at `q = 1`) down to `q_min` with a radial
/// predictor and a Newton corrector.
pub fn track_critical_path(h: &HamiltonianInstance, cp: &CriticalPoint, q_min: f64) -> Result<CriticalPath> {
    if (cp.q - 1.0).abs() > 1e-12 || cp.index != 0 {
        return Err(GlassError::Precondition("path must start at a local minimum with q = 1".into()));
    }
    if !(q_min > 0.0 && q_min < 1.0) {
        return Err(GlassError::Domain(format!("q_min = {q_min} outside (0, 1)")));
    }
    let steps = ((1.0 - q_min) / PATH_STEP).round() as usize;
    let mut points = vec![cp.clone()];
    for k in 1..=steps {
        let q = (1.0 - k as f64 * PATH_STEP).max(q_min);
        let prev = points.last().expect("path is never empty");
        let guess: Vec<f64> = prev.sigma.iter().map(|a| a * q / prev.q).collect();
        let next = match newton_polish(h, &guess, q, DEFAULT_TOL, 30) {
            Ok(p) => p,
            Err(_) => {
                return Ok(CriticalPath {
                    points,
                    status: PathStatus::CorrectorFailed { q },
                })
            }
        };
        let st = spherical_state(h, &next.sigma)?;
        let eig = SymmetricEigen::new(st.hess).eigenvalues;
        let big = eig.iter().fold(0.0f64, |a, l| a.max(l.abs()));
        let small = eig.iter().fold(f64::INFINITY, |a, l| a.min(l.abs()));
        let condition = big / small;
        points.push(next);
        if !(condition <= MAX_PATH_CONDITION) {
            return Ok(CriticalPath {
                points,
                status: PathStatus::IllConditioned { q, condition },
            });
        }
    }
    Ok(CriticalPath {
        points,
        status: PathStatus::Completed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{find_q_critical, sample_hamiltonian};
    use crate::Mixture;

    #[test]
    fn path_starts_at_the_minimum_and_stays_critical() {
        let m = Mixture::new([(3, 0.96), (4, 0.04)]).unwrap();
        let h = sample_hamiltonian(&m, 10, 6).unwrap();
        let cp = find_q_critical(&h, 1.0, 10, DEFAULT_TOL).unwrap().remove(0);
        let path = track_critical_path(&h, &cp, 0.95).unwrap();
        assert_eq!(path.points[0], cp);
        assert_eq!(path.status, PathStatus::Completed);
        assert_eq!(path.points.len(), 51);
        for p in &path.points {
            assert!(p.grad_residual <= DEFAULT_TOL * (10f64).sqrt());
        }
        assert!(path.max_speed().is_finite());
    }

    #[test]
    fn path_rejects_non_minima() {
        let m = Mixture::pure(3).unwrap();
        let h = sample_hamiltonian(&m, 6, 1).unwrap();
        let mut cp = find_q_critical(&h, 1.0, 4, DEFAULT_TOL).unwrap().remove(0);
        cp.index = 2;
        assert!(matches!(track_critical_path(&h, &cp, 0.9), Err(GlassError::Precondition(_))));
    }
}
