//! Critical points of `H` restricted to the sphere of radius `q√N`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::hamiltonian::HamiltonianInstance;
use super::{rng_stream, uniform_sphere};
use crate::error::{GlassError, Result};

/// Default gradient tolerance, relative to `√N`.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Points with `|R|/q² > 1 − DEDUP_GAP` are merged.
pub const DEDUP_GAP: f64 = 1e-6;

const START_TAG: u64 = 0x7374_6172;
const MAX_ITER: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub sigma: Vec<f64>,
    pub q: f64,
    /// `H(σ)/N`.
    pub energy_per_site: f64,
    /// `⟨∇H(σ), σ/‖σ‖⟩/√N`.
    pub radial_per_sqrt: f64,
    /// Norm of the spherical gradient.
    pub grad_residual: f64,
    pub hess_min_abs_eig: f64,
    /// Number of negative eigenvalues of the spherical Hessian.
    pub index: usize,
}

/// Everything about `H` at a point that the sphere sees, in an orthonormal
/// basis of the tangent space.
#[derive(Debug, Clone)]
pub struct SphericalState {
    pub value: f64,
    /// `⟨∇H, x/‖x‖⟩`.
    pub radial: f64,
    pub basis: DMatrix<f64>,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

/// Columns of a Householder reflector that span `x^⊥`.
pub fn tangent_basis(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut v = DVector::from_iterator(n, x.iter().map(|a| a / norm));
    let s = if v[n - 1] >= 0.0 { 1.0 } else { -1.0 };
    v[n - 1] += s;
    let vv = v.dot(&v);
    let mut refl = DMatrix::identity(n, n);
    refl.ger(-2.0 / vv, &v, &v, 1.0);
    refl.columns(0, n - 1).into_owned()
}

pub fn spherical_state(h: &HamiltonianInstance, x: &[f64]) -> Result<SphericalState> {
    let ev = h.evaluate(x, 2)?;
    let g = ev.gradient.expect("order 2 has a gradient");
    let hess = ev.hessian.expect("order 2 has a Hessian");
    let xv = DVector::from_column_slice(x);
    let rho = xv.norm();
    let radial = g.dot(&xv) / rho;
    let basis = tangent_basis(x);
    let grad = basis.tr_mul(&g);
    let mut ht = basis.tr_mul(&(&hess * &basis));
    for i in 0..ht.nrows() {
        ht[(i, i)] -= radial / rho;
    }
    let ht = (&ht + ht.transpose()) * 0.5;
    Ok(SphericalState {
        value: ev.value,
        radial,
        basis,
        grad,
        hess: ht,
    })
}

fn to_point(x: Vec<f64>, st: &SphericalState, q: f64) -> CriticalPoint {
    let n = x.len() as f64;
    let eig = SymmetricEigen::new(st.hess.clone());
    let index = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
    let min_abs = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &l| a.min(l.abs()));
    CriticalPoint {
        sigma: x,
        q,
        energy_per_site: st.value / n,
        radial_per_sqrt: st.radial / n.sqrt(),
        grad_residual: st.grad.norm(),
        hess_min_abs_eig: min_abs,
        index,
    }
}

/// Minimiser of `gᵀs + ½sᵀHs` over `‖s‖ ≤ Δ`, from the eigendecomposition.
fn trust_region_step(eig: &SymmetricEigen<f64, nalgebra::Dyn>, g: &DVector<f64>, delta: f64) -> DVector<f64> {
    let a = eig.eigenvectors.tr_mul(g);
    let lam = &eig.eigenvalues;
    let lmin = lam.min();
    let step = |shift: f64| -> DVector<f64> {
        DVector::from_iterator(a.len(), a.iter().zip(lam.iter()).map(|(ai, li)| {
            let d = li + shift;
            if d.abs() < 1e-300 {
                0.0
            } else {
                -ai / d
            }
        }))
    };
    if lmin > 0.0 {
        let s = step(0.0);
        if s.norm() <= delta {
            return &eig.eigenvectors * s;
        }
    }
    let lo = (-lmin).max(0.0);
    let probe = step(lo + 1e-12 * (1.0 + lo));
    if lmin <= 0.0 && probe.norm() < delta {
        // Hard case: fill the boundary along the lowest eigenvector.
        let mut s = DVector::from_iterator(a.len(), a.iter().zip(lam.iter()).map(|(ai, li)| {
            let d = li + lo;
            if d.abs() < 1e-10 * (1.0 + lo) {
                0.0
            } else {
                -ai / d
            }
        }));
        let imin = lam.imin();
        let tau = (delta * delta - s.norm_squared()).max(0.0).sqrt();
        s[imin] += tau;
        return &eig.eigenvectors * s;
    }
    let mut a_lo = lo;
    let mut a_hi = lo + a.norm() / delta + 1e-12;
    for _ in 0..200 {
        let mid = 0.5 * (a_lo + a_hi);
        if step(mid).norm() > delta {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
        if a_hi - a_lo <= 1e-15 * a_hi.max(1.0) {
            break;
        }
    }
    &eig.eigenvectors * step(a_hi)
}

fn retract(x: &[f64], basis: &DMatrix<f64>, s: &DVector<f64>, rho: f64) -> Vec<f64> {
    let moved = DVector::from_column_slice(x) + basis * s;
    let norm = moved.norm();
    moved.iter().map(|a| a * rho / norm).collect()
}

/// Trust-region Riemannian Newton descent from `x0`, projected onto the
/// sphere of radius `q√N`. Returns `None` if it does not converge.
pub fn minimize_from(h: &HamiltonianInstance, x0: &[f64], q: f64, tol: f64) -> Result<Option<CriticalPoint>> {
    let n = h.n();
    let rho = q * (n as f64).sqrt();
    let norm0 = x0.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut x: Vec<f64> = x0.iter().map(|a| a * rho / norm0).collect();
    let mut st = spherical_state(h, &x)?;
    let mut delta = 0.1 * rho;
    let threshold = tol * (n as f64).sqrt();
    for _ in 0..MAX_ITER {
        if st.grad.norm() <= threshold {
            return Ok(Some(to_point(x, &st, q)));
        }
        let eig = SymmetricEigen::new(st.hess.clone());
        let s = trust_region_step(&eig, &st.grad, delta);
        let pred = -(st.grad.dot(&s) + 0.5 * s.dot(&(&st.hess * &s)));
        let cand = retract(&x, &st.basis, &s, rho);
        let cand_value = h.value(&cand);
        let actual = st.value - cand_value;
        let noise = 1e-12 * st.value.abs().max(1.0);
        let ratio = if pred <= noise { 1.0 } else { actual / pred };
        let snorm = s.norm();
        if ratio < 0.25 {
            delta = 0.25 * snorm.max(1e-3 * delta);
        } else if ratio > 0.75 && snorm >= 0.99 * delta {
            delta = (2.0 * delta).min(0.5 * rho);
        }
        if ratio > 0.1 || (pred <= noise && actual >= -noise) {
            x = cand;
            st = spherical_state(h, &x)?;
        }
        if delta < 1e-14 * rho {
            break;
        }
    }
    if st.grad.norm() <= threshold {
        return Ok(Some(to_point(x, &st, q)));
    }
    Ok(None)
}

/// Plain Newton iteration for `grad = 0` on the sphere of radius `q√N`.
/// Converges to whichever critical point is nearby, regardless of index.
pub fn newton_polish(h: &HamiltonianInstance, x0: &[f64], q: f64, tol: f64, max_iter: usize) -> Result<CriticalPoint> {
    let n = h.n();
    let rho = q * (n as f64).sqrt();
    let norm0 = x0.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut x: Vec<f64> = x0.iter().map(|a| a * rho / norm0).collect();
    let threshold = tol * (n as f64).sqrt();
    for _ in 0..max_iter {
        let st = spherical_state(h, &x)?;
        if st.grad.norm() <= threshold {
            return Ok(to_point(x, &st, q));
        }
        let s = st
            .hess
            .clone()
            .lu()
            .solve(&(-&st.grad))
            .ok_or_else(|| GlassError::NumericFailure("singular spherical Hessian".into()))?;
        x = retract(&x, &st.basis, &s, rho);
    }
    let st = spherical_state(h, &x)?;
    if st.grad.norm() <= threshold {
        return Ok(to_point(x, &st, q));
    }
    Err(GlassError::NumericFailure(format!(
        "Newton did not converge (residual {:.3e})",
        st.grad.norm()
    )))
}

/// Merge near-duplicates, keeping the smaller residual, and order by energy.
pub fn deduplicate(points: Vec<CriticalPoint>) -> Vec<CriticalPoint> {
    let mut kept: Vec<CriticalPoint> = Vec::new();
    for p in points {
        let n = p.sigma.len() as f64;
        let r2 = p.q * p.q * n;
        match kept.iter_mut().find(|k| {
            let dot: f64 = k.sigma.iter().zip(&p.sigma).map(|(a, b)| a * b).sum();
            (dot / r2).abs() > 1.0 - DEDUP_GAP
        }) {
            Some(k) => {
                if p.grad_residual < k.grad_residual {
                    *k = p;
                }
            }
            None => kept.push(p),
        }
    }
    kept.sort_by(|a, b| a.energy_per_site.total_cmp(&b.energy_per_site));
    kept
}

fn with_partners(h: &HamiltonianInstance, mut points: Vec<CriticalPoint>) -> Vec<CriticalPoint> {
    if h.mixture().is_even() {
        let partners: Vec<CriticalPoint> = points
            .iter()
            .map(|p| CriticalPoint {
                sigma: p.sigma.iter().map(|a| -a).collect(),
                ..p.clone()
            })
            .collect();
        points.extend(partners);
        points.sort_by(|a, b| a.energy_per_site.total_cmp(&b.energy_per_site));
    }
    points
}

/// Critical points reached by descent from the given starting points.
pub fn find_q_critical_from(h: &HamiltonianInstance, q: f64, starts: &[Vec<f64>], tol: f64) -> Result<Vec<CriticalPoint>> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(GlassError::Domain(format!("q = {q} outside (0, 1]")));
    }
    let found: Vec<Option<CriticalPoint>> = starts
        .par_iter()
        .map(|s| minimize_from(h, s, q, tol))
        .collect::<Result<_>>()?;
    Ok(with_partners(h, deduplicate(found.into_iter().flatten().collect())))
}

/// Multi-start search from uniform points on the sphere. Starts are drawn
/// from streams keyed by the instance seed and `q`, so the result is
/// reproducible.
pub fn find_q_critical(h: &HamiltonianInstance, q: f64, n_starts: usize, tol: f64) -> Result<Vec<CriticalPoint>> {
    let n = h.n();
    let starts: Vec<Vec<f64>> = (0..n_starts)
        .map(|i| {
            let mut rng = rng_stream(h.seed() ^ q.to_bits(), START_TAG, i as u64);
            uniform_sphere(&mut rng, n, 1.0)
        })
        .collect();
    find_q_critical_from(h, q, &starts, tol)
}
