//! Independent check of the two-point covariance blocks.
//!
//! The Hamiltonian is a centred Gaussian field on R^N with kernel
//! `N·ν(⟨x, y⟩/N)`. Covariances of its derivatives at two points follow
//! from differentiating the kernel, and conditioning is plain Gaussian
//! regression. Nothing here depends on the closed forms under test.

use glasscape::paircomplexity::assemble;
use glasscape::Mixture;
use nalgebra::{DMatrix, DVector};

const N: usize = 5;

/// One term `coef · ∂_{dirs} H(point)`.
#[derive(Clone)]
struct Term {
    coef: f64,
    dirs: Vec<DVector<f64>>,
    point: usize,
}

type Observable = Vec<Term>;

fn nu_k(m: &Mixture, s: f64, k: usize) -> f64 {
    m.eval(s, k).unwrap()
}

/// `∂^A_x ∂^B_y [N ν(⟨x,y⟩/N)]` by summing over partial matchings of A with B.
fn kernel_derivative(m: &Mixture, x: &DVector<f64>, a: &[DVector<f64>], y: &DVector<f64>, b: &[DVector<f64>]) -> f64 {
    let n = N as f64;
    let s = x.dot(y) / n;
    let mut total = 0.0;
    // Enumerate injective partial maps from A to B.
    let na = a.len();
    let nb = b.len();
    let mut stack: Vec<(usize, Vec<Option<usize>>)> = vec![(0, vec![])];
    while let Some((i, assign)) = stack.pop() {
        if i == na {
            let matched: Vec<usize> = assign.iter().flatten().copied().collect();
            let mut prod = 1.0;
            for (ia, t) in assign.iter().enumerate() {
                prod *= match t {
                    Some(jb) => a[ia].dot(&b[*jb]) / n,
                    None => a[ia].dot(y) / n,
                };
            }
            for (jb, bv) in b.iter().enumerate() {
                if !matched.contains(&jb) {
                    prod *= x.dot(bv) / n;
                }
            }
            let blocks = na + nb - matched.len();
            total += n * nu_k(m, s, blocks) * prod;
            continue;
        }
        let mut none = assign.clone();
        none.push(None);
        stack.push((i + 1, none));
        for jb in 0..nb {
            if !assign.contains(&Some(jb)) {
                let mut with = assign.clone();
                with.push(Some(jb));
                stack.push((i + 1, with));
            }
        }
    }
    total
}

fn covariance(m: &Mixture, pts: &[DVector<f64>; 2], obs: &[Observable]) -> DMatrix<f64> {
    let k = obs.len();
    let mut c = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut v = 0.0;
            for s in &obs[i] {
                for t in &obs[j] {
                    v += s.coef * t.coef * kernel_derivative(m, &pts[s.point], &s.dirs, &pts[t.point], &t.dirs);
                }
            }
            c[(i, j)] = v;
        }
    }
    c
}

fn unit(i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(N);
    v[i] = 1.0;
    v
}

struct Oracle {
    sigma_ux: DMatrix<f64>,
    sigma_z: DMatrix<f64>,
    sigma_q: DMatrix<f64>,
}

fn oracle(m: &Mixture, r: f64, q1: f64, q2: f64) -> Oracle {
    let n = N as f64;
    let c = (1.0 - r * r).sqrt();
    let radial = [unit(N - 1), unit(N - 2) * c + unit(N - 1) * r];
    let pts = [radial[0].clone() * (q1 * n.sqrt()), radial[1].clone() * (q2 * n.sqrt())];
    let frame = |a: usize, i: usize| -> DVector<f64> {
        if i < N - 2 || a == 0 {
            unit(i)
        } else {
            unit(N - 2) * r - unit(N - 1) * c
        }
    };
    let qs = [q1, q2];
    let term = |coef: f64, dirs: Vec<DVector<f64>>, point: usize| Term { coef, dirs, point };

    let mut grads: Vec<Observable> = Vec::new();
    for a in 0..2 {
        for i in 0..N - 1 {
            grads.push(vec![term(1.0, vec![frame(a, i)], a)]);
        }
    }
    let us: Vec<Observable> = (0..2).map(|a| vec![term(1.0 / n.sqrt(), vec![], a)]).collect();
    let xs: Vec<Observable> = (0..2).map(|a| vec![term(1.0, vec![radial[a].clone()], a)]).collect();
    let zs: Vec<Observable> = (0..2)
        .map(|a| {
            let h = m.d2(qs[a] * qs[a]).sqrt();
            vec![term(n.sqrt() / h, vec![frame(a, 0), frame(a, N - 2)], a)]
        })
        .collect();
    let qq: Vec<Observable> = (0..2)
        .map(|a| {
            let h = m.d2(qs[a] * qs[a]).sqrt();
            vec![
                term(n.sqrt() / h, vec![frame(a, N - 2), frame(a, N - 2)], a),
                term(-1.0 / (qs[a] * h), vec![radial[a].clone()], a),
            ]
        })
        .collect();

    let condition = |targets: &[Observable], given: &[Observable]| -> DMatrix<f64> {
        let mut all: Vec<Observable> = targets.to_vec();
        all.extend_from_slice(given);
        let c = covariance(m, &pts, &all);
        let k = targets.len();
        let g = given.len();
        let caa = c.view((0, 0), (k, k)).into_owned();
        let cab = c.view((0, k), (k, g)).into_owned();
        let cbb = c.view((k, k), (g, g)).into_owned();
        let inv = cbb.try_inverse().unwrap();
        caa - &cab * inv * cab.transpose()
    };

    let mut ux: Vec<Observable> = us.clone();
    ux.extend(xs.clone());
    let sigma_ux = condition(&ux, &grads);
    let sigma_z = condition(&zs, &grads);
    let mut given_q = grads.clone();
    given_q.extend(ux.clone());
    let sigma_q = condition(&qq, &given_q);
    Oracle {
        sigma_ux,
        sigma_z,
        sigma_q,
    }
}

fn mixtures() -> Vec<Mixture> {
    vec![
        Mixture::new([(3, 0.96), (4, 0.04)]).unwrap(),
        Mixture::new([(2, 0.2), (3, 0.5), (4, 0.3)]).unwrap(),
        Mixture::new([(3, 0.4), (5, 0.6)]).unwrap(),
    ]
}

fn max_abs_diff(a: &DMatrix<f64>, b: &[f64], n: usize) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            d = d.max((a[(i, j)] - b[i * n + j]).abs());
        }
    }
    d
}

const CASES: [(f64, f64, f64); 6] = [
    (0.3, 1.0, 1.0),
    (-0.6, 1.0, 1.0),
    (0.5, 0.9, 0.7),
    (-0.2, 0.8, 1.0),
    (0.85, 1.0, 0.95),
    (0.0, 0.75, 0.6),
];

#[test]
fn sigma_ux_matches_kernel_regression() {
    for m in mixtures() {
        for &(r, q1, q2) in &CASES {
            let cov = assemble(&m, r, q1, q2).unwrap();
            let o = oracle(&m, r, q1, q2);
            let flat: Vec<f64> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| cov.sigma_ux[(i, j)]).collect();
            let d = max_abs_diff(&o.sigma_ux, &flat, 4);
            assert!(d < 1e-9, "Σ_UX mismatch {d:.3e} for {m} at r={r}, q=({q1},{q2})");
        }
    }
}

#[test]
fn sigma_z_matches_kernel_regression() {
    for m in mixtures() {
        for &(r, q1, q2) in &CASES {
            let cov = assemble(&m, r, q1, q2).unwrap();
            let o = oracle(&m, r, q1, q2);
            let flat = [cov.sigma_z[(0, 0)], cov.sigma_z[(0, 1)], cov.sigma_z[(1, 0)], cov.sigma_z[(1, 1)]];
            let d = max_abs_diff(&o.sigma_z, &flat, 2);
            assert!(d < 1e-9, "Σ_Z mismatch {d:.3e} for {m} at r={r}: {} vs {:?}", o.sigma_z, flat);
        }
    }
}

#[test]
fn sigma_q_matches_kernel_regression() {
    for m in mixtures() {
        for &(r, q1, q2) in &CASES {
            let cov = assemble(&m, r, q1, q2).unwrap();
            let o = oracle(&m, r, q1, q2);
            let flat = [cov.sigma_q[(0, 0)], cov.sigma_q[(0, 1)], cov.sigma_q[(1, 0)], cov.sigma_q[(1, 1)]];
            let d = max_abs_diff(&o.sigma_q, &flat, 2);
            assert!(d < 1e-8, "Σ_Q mismatch {d:.3e} for {m} at r={r}: {} vs {:?}", o.sigma_q, flat);
        }
    }
}
