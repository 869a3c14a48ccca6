//! Sampled mixed p-spin Hamiltonians.
//!
//! `H(x) = Σ_p γ_p N^{−(p−1)/2} Σ_{i₁..i_p} J_{i₁..i_p} x_{i₁}⋯x_{i_p}` with
//! i.i.d. standard Gaussian `J`. The full array is drawn, then folded onto
//! sorted index tuples, since only the symmetrised coefficients enter `H`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::rng_stream;
use crate::error::{GlassError, Result};
use crate::mixture::Mixture;

/// Largest full array (entries per degree) that will be sampled.
pub const MAX_ARRAY_ENTRIES: u64 = 1 << 31;

const TENSOR_TAG: u64 = 0x7465_6e73;

/// Coefficients of one degree, stored on nondecreasing index tuples with
/// the prefactor `γ_p N^{−(p−1)/2}` folded in.
#[derive(Debug, Clone)]
pub(crate) struct DegreeBlock {
    pub(crate) p: usize,
    pub(crate) idx: Vec<u16>,
    pub(crate) coef: Vec<f64>,
}

impl DegreeBlock {
    pub(crate) fn tuples(&self) -> impl Iterator<Item = (&[u16], f64)> {
        self.idx.chunks_exact(self.p).zip(self.coef.iter().copied())
    }
}

/// A realisation of the Hamiltonian in dimension `n`.
#[derive(Debug, Clone)]
pub struct HamiltonianInstance {
    n: usize,
    mixture: Mixture,
    seed: u64,
    pub(crate) blocks: Vec<DegreeBlock>,
}

/// Value, Euclidean gradient and Euclidean Hessian at a point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub gradient: Option<DVector<f64>>,
    pub hessian: Option<DMatrix<f64>>,
}

fn binomial_table(n: usize, k: usize) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; k + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1;
        for j in 1..=k.min(i) {
            c[i][j] = c[i - 1][j - 1] + if j <= i - 1 { c[i - 1][j] } else { 0 };
        }
    }
    c
}

/// Colex rank of a sorted tuple among multisets of its size.
fn rank(sorted: &[usize], binom: &[Vec<u64>]) -> usize {
    sorted
        .iter()
        .enumerate()
        .map(|(k, &i)| binom[i + k][k + 1] as usize)
        .sum()
}

/// All nondecreasing p-tuples over `0..n`, laid out by colex rank.
pub(crate) fn sorted_tuples(n: usize, p: usize) -> Vec<u16> {
    let binom = binomial_table(n + p, p);
    let count = binom[n + p - 1][p] as usize;
    let mut out = vec![0u16; count * p];
    let mut t = vec![0usize; p];
    loop {
        let r = rank(&t, &binom);
        for (k, &i) in t.iter().enumerate() {
            out[r * p + k] = i as u16;
        }
        let mut k = p;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if t[k] + 1 < n {
                let v = t[k] + 1;
                for s in t.iter_mut().skip(k) {
                    *s = v;
                }
                break;
            }
        }
    }
}

/// Number of distinct orderings of a sorted tuple.
pub(crate) fn multiplicity(t: &[u16]) -> f64 {
    let mut m = 1.0;
    let mut fact = 1.0;
    let mut run = 1.0;
    for k in 1..t.len() {
        fact *= (k + 1) as f64;
        if t[k] == t[k - 1] {
            run += 1.0;
            m *= run;
        } else {
            run = 1.0;
        }
    }
    fact / m
}

/// Draw an instance. Entries of the degree-p array come from the RNG
/// stream keyed by `(seed, p)` in lexicographic order of the multi-index.
pub fn sample_hamiltonian(m: &Mixture, n: usize, seed: u64) -> Result<HamiltonianInstance> {
    if n < 2 || n > u16::MAX as usize {
        return Err(GlassError::Domain(format!("dimension {n} outside 2..=65535")));
    }
    for &(p, _) in m.terms() {
        let entries = (n as f64).powi(p as i32);
        if entries > MAX_ARRAY_ENTRIES as f64 {
            return Err(GlassError::Resource(format!(
                "degree {p} at N = {n} needs {entries:.3e} entries (cap {MAX_ARRAY_ENTRIES})"
            )));
        }
    }
    let nf = n as f64;
    let mut blocks = Vec::new();
    for &(p, c) in m.terms() {
        let p = p as usize;
        let idx = sorted_tuples(n, p);
        let binom = binomial_table(n + p, p);
        let mut coef = vec![0.0; idx.len() / p];
        let mut rng = rng_stream(seed, TENSOR_TAG, p as u64);
        let mut full = vec![0usize; p];
        let mut sorted = vec![0usize; p];
        loop {
            let z: f64 = rng.sample(StandardNormal);
            sorted.copy_from_slice(&full);
            sorted.sort_unstable();
            coef[rank(&sorted, &binom)] += z;
            let mut k = p;
            let mut done = true;
            while k > 0 {
                k -= 1;
                full[k] += 1;
                if full[k] < n {
                    done = false;
                    break;
                }
                full[k] = 0;
            }
            if done {
                break;
            }
        }
        let scale = c.sqrt() / nf.powf((p as f64 - 1.0) / 2.0);
        coef.iter_mut().for_each(|a| *a *= scale);
        blocks.push(DegreeBlock { p, idx, coef });
    }
    Ok(HamiltonianInstance {
        n,
        mixture: m.clone(),
        seed,
        blocks,
    })
}

impl HamiltonianInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mixture(&self) -> &Mixture {
        &self.mixture
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of stored coefficients over all degrees.
    pub fn stored_coefficients(&self) -> usize {
        self.blocks.iter().map(|b| b.coef.len()).sum()
    }

    /// `H(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.blocks.iter().map(|b| block_value(b, x)).sum()
    }

    /// Degree-p part of `H(x)`, zero if the degree is absent.
    pub fn value_of_degree(&self, p: usize, x: &[f64]) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.p == p)
            .map(|b| block_value(b, x))
            .sum()
    }

    /// Exact contractions up to the requested order (0, 1 or 2).
    pub fn evaluate(&self, x: &[f64], order: usize) -> Result<Evaluation> {
        if order > 2 {
            return Err(GlassError::UnsupportedOrder(order));
        }
        if x.len() != self.n {
            return Err(GlassError::Domain(format!("point has length {}, expected {}", x.len(), self.n)));
        }
        if order == 0 {
            return Ok(Evaluation {
                value: self.value(x),
                gradient: None,
                hessian: None,
            });
        }
        let n = self.n;
        let mut value = 0.0;
        let mut g = vec![0.0; n];
        // Upper triangle only; the Hessian is U + Uᵀ.
        let mut upper = if order == 2 { vec![0.0; n * n] } else { Vec::new() };
        for b in &self.blocks {
            value += match (b.p, order) {
                (3, _) => kernel3(b, x, &mut g, &mut upper, n),
                (4, _) => kernel4(b, x, &mut g, &mut upper, n),
                _ => kernel_generic(b, x, &mut g, &mut upper, n),
            };
        }
        let hessian = (order == 2).then(|| {
            let u = DMatrix::from_row_slice(n, n, &upper);
            &u + u.transpose()
        });
        Ok(Evaluation {
            value,
            gradient: Some(DVector::from_vec(g)),
            hessian,
        })
    }
}

fn kernel3(b: &DegreeBlock, x: &[f64], g: &mut [f64], upper: &mut [f64], n: usize) -> f64 {
    let hess = !upper.is_empty();
    let mut v = 0.0;
    for (t, &c) in b.idx.chunks_exact(3).zip(&b.coef) {
        let (i, j, k) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let (xi, xj, xk) = (x[i], x[j], x[k]);
        let cxk = c * xk;
        v += cxk * xi * xj;
        g[i] += cxk * xj;
        g[j] += cxk * xi;
        g[k] += c * xi * xj;
        if hess {
            upper[i * n + j] += cxk;
            upper[i * n + k] += c * xj;
            upper[j * n + k] += c * xi;
        }
    }
    v
}

fn kernel4(b: &DegreeBlock, x: &[f64], g: &mut [f64], upper: &mut [f64], n: usize) -> f64 {
    let hess = !upper.is_empty();
    let mut v = 0.0;
    for (t, &c) in b.idx.chunks_exact(4).zip(&b.coef) {
        let (i, j, k, l) = (t[0] as usize, t[1] as usize, t[2] as usize, t[3] as usize);
        let (xi, xj, xk, xl) = (x[i], x[j], x[k], x[l]);
        let ij = c * xi * xj;
        let kl = xk * xl;
        v += ij * kl;
        let ckl = c * kl;
        g[i] += ckl * xj;
        g[j] += ckl * xi;
        g[k] += ij * xl;
        g[l] += ij * xk;
        if hess {
            upper[i * n + j] += ckl;
            upper[k * n + l] += ij;
            upper[i * n + k] += c * xj * xl;
            upper[i * n + l] += c * xj * xk;
            upper[j * n + k] += c * xi * xl;
            upper[j * n + l] += c * xi * xk;
        }
    }
    v
}

fn kernel_generic(b: &DegreeBlock, x: &[f64], g: &mut [f64], upper: &mut [f64], n: usize) -> f64 {
    let p = b.p;
    let hess = !upper.is_empty();
    let mut pre = vec![0.0; p + 1];
    let mut suf = vec![0.0; p + 1];
    let mut v = 0.0;
    for (t, c) in b.tuples() {
        pre[0] = 1.0;
        for k in 0..p {
            pre[k + 1] = pre[k] * x[t[k] as usize];
        }
        suf[p] = 1.0;
        for k in (0..p).rev() {
            suf[k] = suf[k + 1] * x[t[k] as usize];
        }
        v += c * pre[p];
        for k in 0..p {
            g[t[k] as usize] += c * pre[k] * suf[k + 1];
        }
        if hess {
            for k in 0..p {
                let mut mid = 1.0;
                for l in k + 1..p {
                    upper[t[k] as usize * n + t[l] as usize] += c * pre[k] * mid * suf[l + 1];
                    mid *= x[t[l] as usize];
                }
            }
        }
    }
    v
}

fn block_value(b: &DegreeBlock, x: &[f64]) -> f64 {
    match b.p {
        2 => b
            .idx
            .chunks_exact(2)
            .zip(&b.coef)
            .map(|(t, c)| c * x[t[0] as usize] * x[t[1] as usize])
            .sum(),
        3 => b
            .idx
            .chunks_exact(3)
            .zip(&b.coef)
            .map(|(t, c)| c * x[t[0] as usize] * x[t[1] as usize] * x[t[2] as usize])
            .sum(),
        4 => b
            .idx
            .chunks_exact(4)
            .zip(&b.coef)
            .map(|(t, c)| c * x[t[0] as usize] * x[t[1] as usize] * x[t[2] as usize] * x[t[3] as usize])
            .sum(),
        _ => b
            .tuples()
            .map(|(t, c)| t.iter().fold(c, |acc, &i| acc * x[i as usize]))
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mix() -> Mixture {
        Mixture::new([(2, 0.2), (3, 0.5), (4, 0.3)]).unwrap()
    }

    fn probe(n: usize, phase: f64) -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7 + phase).sin()).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter().map(|a| a / norm * (n as f64).sqrt()).collect()
    }

    #[test]
    fn tuple_layout_is_a_bijection() {
        let t = sorted_tuples(5, 3);
        assert_eq!(t.len() / 3, 35);
        let mut seen = std::collections::HashSet::new();
        for c in t.chunks_exact(3) {
            assert!(c[0] <= c[1] && c[1] <= c[2]);
            assert!(seen.insert(c.to_vec()));
        }
        let total: f64 = t.chunks_exact(3).map(multiplicity).sum();
        assert_eq!(total, 125.0);
    }

    #[test]
    fn regeneration_is_deterministic() {
        let a = sample_hamiltonian(&mix(), 8, 17).unwrap();
        let b = sample_hamiltonian(&mix(), 8, 17).unwrap();
        let c = sample_hamiltonian(&mix(), 8, 18).unwrap();
        let x = probe(8, 0.3);
        assert_eq!(a.value(&x).to_bits(), b.value(&x).to_bits());
        assert_ne!(a.value(&x), c.value(&x));
    }

    #[test]
    fn folded_coefficients_match_full_array() {
        // Redraw the full array from the same stream and sum it directly.
        let n = 4;
        let m = Mixture::pure(3).unwrap();
        let h = sample_hamiltonian(&m, n, 5).unwrap();
        let mut rng = rng_stream(5, TENSOR_TAG, 3);
        let x = probe(n, 1.1);
        let mut direct = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    direct += z * x[i] * x[j] * x[k];
                }
            }
        }
        direct /= n as f64;
        assert!((direct - h.value(&x)).abs() < 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn gradient_and_hessian_match_differences() {
        let n = 7;
        let x = probe(n, 0.2);
        let v = probe(n, 2.9);
        let shift = |s: f64| -> Vec<f64> { x.iter().zip(&v).map(|(a, b)| a + s * b).collect() };
        let eps = 1e-5;
        for m in [mix(), Mixture::new([(2, 0.5), (5, 0.5)]).unwrap()] {
            let h = sample_hamiltonian(&m, n, 3).unwrap();
            let ev = h.evaluate(&x, 2).unwrap();
            let g = ev.gradient.unwrap();
            let hess = ev.hessian.unwrap();
            let fd = (h.value(&shift(eps)) - h.value(&shift(-eps))) / (2.0 * eps);
            let exact = g.dot(&DVector::from_column_slice(&v));
            assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0));
            let gp = h.evaluate(&shift(eps), 1).unwrap().gradient.unwrap();
            let gm = h.evaluate(&shift(-eps), 1).unwrap().gradient.unwrap();
            let fd_h = (gp - gm) / (2.0 * eps);
            let exact_h = &hess * DVector::from_column_slice(&v);
            assert!((fd_h - &exact_h).amax() < 1e-5 * exact_h.amax().max(1.0));
            assert!((&hess - hess.transpose()).amax() < 1e-12);
            assert!((ev.value - h.value(&x)).abs() < 1e-12 * ev.value.abs().max(1.0));
        }
    }

    #[test]
    fn euler_identity_per_degree() {
        let n = 6;
        let x = probe(n, 0.9);
        for p in [2u32, 3, 4, 5] {
            let h = sample_hamiltonian(&Mixture::pure(p).unwrap(), n, 11).unwrap();
            let ev = h.evaluate(&x, 1).unwrap();
            let lhs = ev.gradient.unwrap().dot(&DVector::from_column_slice(&x));
            let rhs = p as f64 * ev.value;
            assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "p={p}");
        }
    }

    #[test]
    fn memory_cap_is_a_resource_error() {
        let m = Mixture::pure(8).unwrap();
        assert!(matches!(sample_hamiltonian(&m, 64, 1), Err(GlassError::Resource(_))));
        assert!(matches!(
            sample_hamiltonian(&mix(), 4, 1).unwrap().evaluate(&[0.0; 4], 3),
            Err(GlassError::UnsupportedOrder(3))
        ));
    }
}
