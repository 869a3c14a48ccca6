//! Replica experiments: covariance law, ground state, Kac-Rice counts and
//! the band decomposition.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::critical::{find_q_critical, tangent_basis, CriticalPoint, DEFAULT_TOL};
use super::hamiltonian::{multiplicity, sample_hamiltonian, sorted_tuples};
use super::stats::{mean_se, MeanSe};
use super::{rng_stream, uniform_sphere};
use crate::complexity::ThetaSurface;
use crate::error::{GlassError, Result};
use crate::mixture::Mixture;
use crate::optimize::grid_then_golden;
use crate::thermo::alpha_k;

const PROBE_TAG: u64 = 0x7072_6f62;
const REPLICA_TAG: u64 = 0x7265_706c;

/// Seed of replica `i` of an experiment seeded with `seed`.
pub fn replica_seed(seed: u64, i: usize) -> u64 {
    use rand::RngCore;
    rng_stream(seed, REPLICA_TAG, i as u64).next_u64()
}

/// Point at overlap `r` with `base`, both on the sphere of radius `√N`.
pub fn point_at_overlap(base: &[f64], r: f64, seed: u64) -> Vec<f64> {
    let n = base.len();
    let mut rng = rng_stream(seed, PROBE_TAG, 1);
    let mut w = uniform_sphere(&mut rng, n, 1.0);
    let proj: f64 = w.iter().zip(base).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    w.iter_mut().zip(base).for_each(|(a, b)| *a -= proj * b);
    let wn = w.iter().map(|a| a * a).sum::<f64>().sqrt();
    let s = (1.0 - r * r).max(0.0).sqrt() * (n as f64).sqrt() / wn;
    base.iter().zip(&w).map(|(b, a)| r * b + s * a).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceProbe {
    pub overlap: f64,
    /// Replica statistics of `H(σ)H(σ′)/N`.
    pub stats: MeanSe,
    pub target: f64,
}

impl CovarianceProbe {
    pub fn z(&self) -> f64 {
        self.stats.z_score(self.target)
    }
}

/// Replica mean of `H(σ)H(σ′)/N` at fixed probe pairs with the given
/// overlaps, against `ν(R)`.
pub fn covariance_law(m: &Mixture, n: usize, overlaps: &[f64], replicas: usize, seed: u64) -> Result<Vec<CovarianceProbe>> {
    let mut rng = rng_stream(seed, PROBE_TAG, 0);
    let base = uniform_sphere(&mut rng, n, (n as f64).sqrt());
    let partners: Vec<Vec<f64>> = overlaps.iter().map(|&r| point_at_overlap(&base, r, seed)).collect();
    let products: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let h = sample_hamiltonian(m, n, replica_seed(seed, i))?;
            let hb = h.value(&base);
            Ok(partners.iter().map(|p| hb * h.value(p) / n as f64).collect())
        })
        .collect::<Result<_>>()?;
    Ok(overlaps
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let xs: Vec<f64> = products.iter().map(|row| row[k]).collect();
            CovarianceProbe {
                overlap: r,
                stats: mean_se(&xs),
                target: m.nu(r),
            }
        })
        .collect())
}

/// Critical points found in one replica.
#[derive(Debug, Clone)]
pub struct ReplicaSearch {
    pub n: usize,
    pub q: f64,
    pub replica: usize,
    pub points: Vec<CriticalPoint>,
}

impl ReplicaSearch {
    pub fn min_energy(&self) -> Option<f64> {
        self.points.first().map(|p| p.energy_per_site)
    }
}

/// Multi-start searches over `replicas` independent instances.
pub fn search_replicas(m: &Mixture, n: usize, q: f64, replicas: usize, n_starts: usize, seed: u64) -> Result<Vec<ReplicaSearch>> {
    (0..replicas)
        .map(|i| {
            let h = sample_hamiltonian(m, n, replica_seed(seed ^ n as u64, i))?;
            Ok(ReplicaSearch {
                n,
                q,
                replica: i,
                points: find_q_critical(&h, q, n_starts, DEFAULT_TOL)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateRow {
    pub n: usize,
    /// Replica statistics of the lowest energy per site found.
    pub min_energy: MeanSe,
    pub e0: f64,
    /// `|mean min energy + E₀|`.
    pub discrepancy: f64,
}

pub fn ground_state_row(searches: &[ReplicaSearch], e0: f64) -> Result<GroundStateRow> {
    let mins: Vec<f64> = searches.iter().filter_map(|s| s.min_energy()).collect();
    if mins.is_empty() {
        return Err(GlassError::NumericFailure("no replica produced a critical point".into()));
    }
    let stats = mean_se(&mins);
    Ok(GroundStateRow {
        n: searches[0].n,
        min_energy: stats,
        e0,
        discrepancy: (stats.mean + e0).abs(),
    })
}

/// `sup` of `Θ_{ν,q}` over the rectangle `B × D`.
pub fn theta_sup(m: &Mixture, q: f64, b: (f64, f64), d: (f64, f64)) -> Result<f64> {
    let surf = ThetaSurface::new(m, q)?;
    let inner = |u: f64| grid_then_golden(|x| surf.eval(u, x), d.0, d.1, 32, 1e-12).1;
    Ok(grid_then_golden(inner, b.0, b.1, 32, 1e-12).1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrtCount {
    pub n: usize,
    pub counts: Vec<usize>,
    pub mean_count: f64,
    /// `(1/N) log(mean count)`; `−∞` when nothing was found.
    pub log_mean_count_per_n: f64,
    pub theta_sup: f64,
    pub zero_fraction: f64,
}

/// Count found critical points with energy per site in `b` and radial
/// derivative per `√N` in `d`.
pub fn crt_count_from(m: &Mixture, searches: &[ReplicaSearch], b: (f64, f64), d: (f64, f64)) -> Result<CrtCount> {
    if !(b.0 < b.1 && d.0 < d.1) || searches.is_empty() {
        return Err(GlassError::Domain("windows must be nonempty finite intervals".into()));
    }
    let n = searches[0].n;
    let q = searches[0].q;
    let counts: Vec<usize> = searches
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|p| {
                    p.energy_per_site >= b.0
                        && p.energy_per_site <= b.1
                        && p.radial_per_sqrt >= d.0
                        && p.radial_per_sqrt <= d.1
                })
                .count()
        })
        .collect();
    let mean_count = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    Ok(CrtCount {
        n,
        mean_count,
        log_mean_count_per_n: mean_count.ln() / n as f64,
        theta_sup: theta_sup(m, q, b, d)?,
        zero_fraction: counts.iter().filter(|&&c| c == 0).count() as f64 / counts.len() as f64,
        counts,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn crt_count_experiment(
    m: &Mixture,
    n: usize,
    q: f64,
    b: (f64, f64),
    d: (f64, f64),
    replicas: usize,
    n_starts: usize,
    seed: u64,
) -> Result<CrtCount> {
    let searches = search_replicas(m, n, q, replicas, n_starts, seed)?;
    crt_count_from(m, &searches, b, d)
}

/// Variance of `H` at a point of the band of `q n̂`, conditioned on
/// `H(q√N n̂)` and the tangent gradient there. Computed exactly from the
/// coefficient covariance. Returns `(conditional, N Σ_{k≥2} α_k(q)²)`.
pub fn band_conditional_variance(m: &Mixture, n: usize, q: f64, seed: u64) -> Result<(f64, f64)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(GlassError::Domain(format!("q = {q} outside (0, 1)")));
    }
    let nf = n as f64;
    let mut rng = rng_stream(seed, PROBE_TAG, 2);
    let dir = uniform_sphere(&mut rng, n, nf.sqrt());
    let center: Vec<f64> = dir.iter().map(|a| a * q).collect();
    let band = point_at_overlap(&dir, q, seed);
    let basis = tangent_basis(&center);

    // Covariance is Σ_p Σ_t mult(t) f_t g_t for functionals with
    // coefficients f, g on the stored tuples.
    let k = n;
    let mut gram: DMatrix<f64> = DMatrix::zeros(k, k);
    let mut cross: DVector<f64> = DVector::zeros(k);
    let mut var = 0.0;
    let mut feats = vec![0.0; k];
    for &(p, c) in m.terms() {
        let p = p as usize;
        let scale = c.sqrt() / nf.powf((p as f64 - 1.0) / 2.0);
        for t in sorted_tuples(n, p).chunks_exact(p) {
            let w = multiplicity(t) * scale * scale;
            let target: f64 = t.iter().map(|&i| band[i as usize]).product();
            feats[0] = t.iter().map(|&i| center[i as usize]).product();
            for j in 0..n - 1 {
                let mut s = 0.0;
                for a in 0..p {
                    let mut prod = basis[(t[a] as usize, j)];
                    for (b, &i) in t.iter().enumerate() {
                        if b != a {
                            prod *= center[i as usize];
                        }
                    }
                    s += prod;
                }
                feats[j + 1] = s;
            }
            var += w * target * target;
            for a in 0..k {
                cross[a] += w * feats[a] * target;
                for b in 0..k {
                    gram[(a, b)] += w * feats[a] * feats[b];
                }
            }
        }
    }
    let chol = gram
        .cholesky()
        .ok_or_else(|| GlassError::DegenerateCovariance("conditioning Gram matrix".into()))?;
    let explained: f64 = cross.dot(&chol.solve(&cross));
    let tail: f64 = (2..=m.max_degree()).map(|k| alpha_k(m, q, k).powi(2)).sum();
    Ok((var - explained, nf * tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_points_have_requested_overlap() {
        let mut rng = rng_stream(3, PROBE_TAG, 0);
        let base = uniform_sphere(&mut rng, 16, 4.0);
        for r in [-0.5, 0.0, 0.9] {
            let p = point_at_overlap(&base, r, 3);
            assert!((crate::montecarlo::overlap(&base, &p) - r).abs() < 1e-12);
            assert!((crate::montecarlo::overlap(&p, &p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_law_small() {
        let m = Mixture::new([(2, 0.3), (3, 0.7)]).unwrap();
        let probes = covariance_law(&m, 8, &[1.0, 0.5, -0.5], 400, 12).unwrap();
        for p in &probes {
            assert!(p.z().abs() < 4.0, "R={} z={}", p.overlap, p.z());
        }
    }

    #[test]
    fn band_variance_is_the_tail_of_the_decomposition() {
        let m = Mixture::new([(2, 0.2), (3, 0.5), (4, 0.3)]).unwrap();
        for q in [0.5, 0.8, 0.95] {
            let (cond, target) = band_conditional_variance(&m, 7, q, 4).unwrap();
            assert!((cond - target).abs() < 1e-9 * target, "q={q}: {cond} vs {target}");
        }
    }

    #[test]
    fn theta_sup_at_ground_state_corner() {
        let m = Mixture::new([(3, 0.96), (4, 0.04)]).unwrap();
        let gs = crate::complexity::ground_state_solution(&m, 1.0).unwrap();
        let v = theta_sup(&m, 1.0, (-gs.e0 - 1e-9, -gs.e0), (-gs.x0 - 0.05, -gs.x0 + 0.05)).unwrap();
        assert!(v.abs() < 1e-6);
    }
}
