//! One line per acceptance criterion: status, runtime and the measured
//! quantities. Exits nonzero if any of criteria 1 to 13 fails; the Gibbs
//! geometry criterion runs in exploratory mode and is only reported.
//!
//! cargo test --release --test acceptance

use std::time::{Duration, Instant};

use glasscape::complexity::ground_state_solution;
use glasscape::montecarlo::experiments::{
    covariance_law, crt_count_from, ground_state_row, search_replicas, ReplicaSearch,
};
use glasscape::montecarlo::gibbs::{chaos_experiment, gibbs_experiment, GibbsConfig};
use glasscape::montecarlo::{goe_check, sample_hamiltonian};
use glasscape::paircomplexity::{assemble, check_condition_m, psi, theta_sum, CondMClause};
use glasscape::semicircle::{density, omega};
use glasscape::thermo::{
    alpha_k, lambda_f_2minus, lambda_f_2minus_expanded, lambda_z, lambda_z_series, phase_summary, q_c,
};
use glasscape::Mixture;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GAP_REL: f64 = 0.15;
const LINE_TOL: f64 = 1e-12;
const C_STABILITY: f64 = 0.1;
const GROUND_TOL: f64 = 0.1;
const CRT_TOL: f64 = 0.2;
const ZERO_FRACTION: f64 = 0.9;
const BAND_MASS: f64 = 0.8;
const CHAOS_MASS: f64 = 0.7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn near_pure3() -> Mixture {
    Mixture::new([(3, 0.96), (4, 0.04)]).unwrap()
}

fn even24() -> Mixture {
    Mixture::new([(2, 0.1), (4, 0.9)]).unwrap()
}

fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let h = 1.0 / 64.0;
    let mut sum = 0.0;
    for k in -(6 * 64)..=(6 * 64) {
        let t = k as f64 * h;
        let s = std::f64::consts::FRAC_PI_2 * t.sinh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / s.cosh().powi(2);
        let gap = 2.0 / (1.0 + (2.0 * s.abs()).exp());
        if gap == 0.0 {
            continue;
        }
        let x = if s < 0.0 { a + half * gap } else { b - half * gap };
        let v = f(x);
        if v.is_finite() {
            sum += w * v;
        }
    }
    sum * half * h
}

fn c1_omega() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..97 {
        let x = -4.0 + 8.0 * i as f64 / 96.0;
        let f = |l: f64| (l - x).abs().ln() * density(l);
        let quad = if x.abs() < 2.0 {
            tanh_sinh(f, -2.0, x) + tanh_sinh(f, x, 2.0)
        } else {
            tanh_sinh(f, -2.0, 2.0)
        };
        worst = worst.max((omega(x) - quad).abs());
    }
    Outcome { pass: worst <= 1e-8, detail: format!("max error {worst:.2e}") }
}

fn random_mixture(rng: &mut ChaCha8Rng) -> Mixture {
    let k = rng.random_range(2..=4);
    let mut degrees: Vec<u32> = (2..=8).collect();
    let mut terms = Vec::new();
    for _ in 0..k {
        let p = degrees.remove(rng.random_range(0..degrees.len()));
        terms.push((p, rng.random_range(0.05..1.0)));
    }
    Mixture::normalized(terms).unwrap()
}

/// `(u, x)` within two standard deviations under their joint law at
/// radius `q`, where `Θ` is of order one.
fn typical_point(m: &Mixture, q: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let q2 = q * q;
    let (c11, c12, c22) = (m.nu(q2), q * m.d1(q2), q2 * m.d2(q2) + m.d1(q2));
    let z1: f64 = rng.random_range(-2.0..2.0);
    let z2: f64 = rng.random_range(-2.0..2.0);
    let s = c11.sqrt();
    (s * z1, c12 / s * z1 + (c22 - c12 * c12 / c11).sqrt() * z2)
}

fn c2_psi_split() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = random_mixture(&mut rng);
        let q1 = rng.random_range(0.3..=1.0);
        let q2 = rng.random_range(0.3..=1.0);
        let (u1, x1) = typical_point(&m, q1, &mut rng);
        let (u2, x2) = typical_point(&m, q2, &mut rng);
        let a = psi(&m, q1, q2, 0.0, u1, u2, x1, x2).unwrap();
        let b = theta_sum(&m, q1, q2, u1, u2, x1, x2).unwrap();
        worst = worst.max((a - b).abs());
    }
    Outcome { pass: worst <= 1e-10, detail: format!("max |psi - theta1 - theta2| {worst:.2e}") }
}

fn c3_positive_definite() -> Outcome {
    let m = near_pure3();
    let mut min = f64::INFINITY;
    for i in 0..=38 {
        let r = -0.95 + 0.05 * i as f64;
        for q1 in [0.8, 0.9, 1.0] {
            for q2 in [0.8, 0.9, 1.0] {
                min = min.min(assemble(&m, r, q1, q2).unwrap().min_eigenvalue);
            }
        }
    }
    Outcome { pass: min > 0.0, detail: format!("min eigenvalue {min:.3e}") }
}

fn c4_condition_m() -> Outcome {
    let a = check_condition_m(&near_pure3(), 0.005).unwrap();
    let b = check_condition_m(&even24(), 0.005).unwrap();
    let c = check_condition_m(&Mixture::pure(3).unwrap(), 0.005).unwrap();
    let ok = |v: &glasscape::paircomplexity::CondMVerdict| v.holds && v.d2_psi0_at_zero < 0.0 && v.max_margin > 0.0;
    Outcome {
        pass: ok(&a) && ok(&b) && b.endpoint_minus.is_finite() && c.failed_clause == Some(CondMClause::NotMixed),
        detail: format!(
            "near-pure-3 margin {:.3e} d2 {:.3}; even margin {:.3e} d2 {:.3} psi0(-1) {:.4}; x^3 {}",
            a.max_margin,
            a.d2_psi0_at_zero,
            b.max_margin,
            b.d2_psi0_at_zero,
            b.endpoint_minus,
            c.failed_clause.map(|c| c.as_str()).unwrap_or("holds")
        ),
    }
}

fn c5_de0_dq() -> Outcome {
    let m = near_pure3();
    let h = 1e-4;
    let mut worst = 0.0f64;
    for q in [0.97, 0.98, 0.99] {
        let fd = (ground_state_solution(&m, q + h).unwrap().e0 - ground_state_solution(&m, q - h).unwrap().e0) / (2.0 * h);
        worst = worst.max((fd - ground_state_solution(&m, q).unwrap().x0).abs());
    }
    Outcome { pass: worst <= 1e-4, detail: format!("max |FD - x0| {worst:.2e}") }
}

fn c6_phase() -> Outcome {
    let m = near_pure3();
    let mut dc = Vec::new();
    let mut dm = Vec::new();
    let mut ordered = true;
    let (mut tc, mut tm) = (0.0, 0.0);
    for beta in [20.0, 40.0, 80.0] {
        let s = phase_summary(&m, beta).unwrap();
        ordered &= s.q_star_star < s.q_c && s.q_c < s.q_star;
        dc.push((beta * (1.0 - s.q_c) - s.t_c).abs());
        dm.push((beta * (1.0 - s.q_star) - s.t_minus).abs());
        tc = s.t_c;
        tm = s.t_minus;
    }
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    Outcome {
        pass: ordered && decreasing(&dc) && decreasing(&dm) && dc[2] <= 0.05 * tc && dm[2] <= 0.1 * tm,
        detail: format!(
            "|b(1-q_c)-t_c| {:.2e} {:.2e} {:.2e} (t_c {tc:.4}); |b(1-q*)-t_-| {:.2e} {:.2e} {:.2e} (t_- {tm:.4}); ordered {ordered}",
            dc[0], dc[1], dc[2], dm[0], dm[1], dm[2]
        ),
    }
}

fn c7_gap() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for m in [near_pure3(), even24()] {
        let s = phase_summary(&m, 160.0).unwrap();
        let rel = (s.gap_finite - s.gap_limit).abs() / s.gap_limit;
        pass &= s.gap_limit > 0.0 && rel <= GAP_REL;
        detail.push(format!("{m}: limit {:.5e} rel dev {rel:.2e}", s.gap_limit));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn c8_lambda() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = random_mixture(&mut rng);
        let beta = rng.random_range(1.0..200.0);
        let e = rng.random_range(-2.0..0.0);
        let q = rng.random_range(0.5..0.999);
        let a = lambda_z(&m, beta, e, q);
        let b = lambda_z_series(&m, beta, e, q);
        let c = lambda_f_2minus(&m, beta, e, q, true).unwrap();
        let d = lambda_f_2minus_expanded(&m, beta, e, q);
        worst = worst.max((a - b).abs() / a.abs().max(1.0)).max((c - d).abs() / c.abs().max(1.0));
    }
    let m = near_pure3();
    let cs: Vec<f64> = [20.0, 40.0, 80.0]
        .iter()
        .map(|&beta| {
            let qc = q_c(&m, beta).unwrap();
            let e = -ground_state_solution(&m, qc).unwrap().e0;
            beta * (lambda_f_2minus(&m, beta, e, qc, true).unwrap() - lambda_z(&m, beta, e, qc))
        })
        .collect();
    let max = cs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let min = cs.iter().map(|c| c.abs()).fold(f64::INFINITY, f64::min);
    let spread = (max - min) / max;
    Outcome {
        pass: worst <= LINE_TOL && spread <= C_STABILITY,
        detail: format!(
            "line disagreement {worst:.2e}; C(beta) {:.5} {:.5} {:.5}, spread {spread:.3}",
            cs[0], cs[1], cs[2]
        ),
    }
}

fn c9_alpha() -> Outcome {
    let m = near_pure3();
    let mut worst = 0.0f64;
    for q in [0.0, 0.3, 0.6, 0.9, 0.99] {
        for rho in [-1.0f64, -0.5, 0.0, 0.5, 1.0] {
            let s: f64 = (0..=m.max_degree()).map(|k| alpha_k(&m, q, k).powi(2) * rho.powi(k as i32)).sum();
            worst = worst.max((s - m.nu(q * q + (1.0 - q * q) * rho)).abs());
        }
    }
    Outcome { pass: worst <= 1e-12, detail: format!("max error {worst:.2e}") }
}

fn c10_goe() -> Outcome {
    let a = goe_check(200, 3.0, 100, 10).unwrap();
    let b = goe_check(200, -3.0, 100, 11).unwrap();
    let da = a.mean_log_det_per_n - a.omega_x;
    let db = b.mean_log_det_per_n - b.omega_x;
    Outcome {
        pass: da.abs() <= 0.05 && db.abs() <= 0.05,
        detail: format!("x=3 diff {da:+.2e} (se {:.1e}); x=-3 diff {db:+.2e}", a.standard_error),
    }
}

fn c11_covariance() -> Outcome {
    let probes = covariance_law(&near_pure3(), 32, &[1.0, 0.8, 0.5, 0.0], 500, 11).unwrap();
    let z: Vec<f64> = probes.iter().map(|p| p.z()).collect();
    Outcome {
        pass: z.iter().all(|z| z.abs() <= 3.0),
        detail: format!("z at R=1,0.8,0.5,0: {:+.2} {:+.2} {:+.2} {:+.2}", z[0], z[1], z[2], z[3]),
    }
}

fn c12_ground_state(searches: &[Vec<ReplicaSearch>], e0: f64) -> Outcome {
    let rows: Vec<_> = searches.iter().map(|s| ground_state_row(s, e0).unwrap()).collect();
    let d: Vec<f64> = rows.iter().map(|r| r.discrepancy).collect();
    Outcome {
        pass: d[2] <= GROUND_TOL && d.windows(2).all(|w| w[1] <= w[0]),
        detail: format!(
            "mean min energy {:.4} {:.4} {:.4} vs -E0 {:.4}; discrepancy {:.4} {:.4} {:.4}",
            rows[0].min_energy.mean, rows[1].min_energy.mean, rows[2].min_energy.mean, -e0, d[0], d[1], d[2]
        ),
    }
}

fn c13_kac_rice(searches: &[ReplicaSearch], m: &Mixture) -> Outcome {
    let gs = ground_state_solution(m, 1.0).unwrap();
    let w = 0.05;
    let near = crt_count_from(m, searches, (-gs.e0 - w, -gs.e0 + w), (-gs.x0 - w, -gs.x0 + w)).unwrap();
    let deep = crt_count_from(m, searches, (-gs.e0 - 0.35, -gs.e0 - 0.25), (-gs.x0 - 0.5, -gs.x0 + 0.5)).unwrap();
    let d = (near.log_mean_count_per_n - near.theta_sup).abs();
    Outcome {
        pass: d <= CRT_TOL && deep.theta_sup < 0.0 && deep.zero_fraction >= ZERO_FRACTION,
        detail: format!(
            "(1/N)log mean count {:.4} vs sup Theta {:.4}; deep window sup Theta {:.3}, zero fraction {:.2}",
            near.log_mean_count_per_n, near.theta_sup, deep.theta_sup, deep.zero_fraction
        ),
    }
}

fn c14_gibbs() -> Outcome {
    let h = sample_hamiltonian(&near_pure3(), 32, 5).unwrap();
    let cfg = GibbsConfig::default();
    let g = gibbs_experiment(&h, 20.0, &cfg, 3).unwrap();
    let c = chaos_experiment(&h, 20.0, 30.0, &cfg, 0.2, 3).unwrap();
    Outcome {
        pass: g.same_band_mass >= BAND_MASS && g.cross_band_mass >= BAND_MASS && c.mass_near_zero >= CHAOS_MASS,
        detail: format!(
            "centres {}; same-band mass {:.3} over {} pairs (z {:+.2}); cross-band mass {:.3} over {} pairs (z {:+.2}); chaos mass {:.3} (z {:+.2}); acceptance {:.3}",
            g.centers.len(),
            g.same_band_mass,
            g.same_band_pairs,
            g.same_band_z,
            g.cross_band_mass,
            g.cross_band_pairs,
            g.cross_band_z,
            c.mass_near_zero,
            c.z,
            g.min_acceptance.min(c.min_acceptance)
        ),
    }
}

fn report(id: usize, budget: Duration, f: impl FnOnce() -> Outcome, failures: &mut Vec<usize>) {
    let t = Instant::now();
    let o = f();
    let el = t.elapsed();
    let pass = o.pass && el <= budget;
    if !pass {
        failures.push(id);
    }
    println!(
        "criterion {id:>2}: {}  {:>8.2}s (budget {}s)  {}",
        if pass { "PASS" } else { "FAIL" },
        el.as_secs_f64(),
        budget.as_secs(),
        o.detail
    );
}

fn main() {
    let s = |x| Duration::from_secs(x);
    let mut failures = Vec::new();
    report(1, s(1), c1_omega, &mut failures);
    report(2, s(5), c2_psi_split, &mut failures);
    report(3, s(5), c3_positive_definite, &mut failures);
    report(4, s(60), c4_condition_m, &mut failures);
    report(5, s(20), c5_de0_dq, &mut failures);
    report(6, s(60), c6_phase, &mut failures);
    report(7, s(60), c7_gap, &mut failures);
    report(8, s(60), c8_lambda, &mut failures);
    report(9, s(1), c9_alpha, &mut failures);
    report(10, s(60), c10_goe, &mut failures);
    report(11, s(120), c11_covariance, &mut failures);

    let m = near_pure3();
    let e0 = ground_state_solution(&m, 1.0).unwrap().e0;
    // The searches are shared with criterion 13 and timed under 12.
    let mut searches: Vec<Vec<ReplicaSearch>> = Vec::new();
    report(12, s(600), || {
        searches = [16, 24, 32]
            .iter()
            .map(|&n| search_replicas(&m, n, 1.0, 50, 5 * n, 12).unwrap())
            .collect();
        c12_ground_state(&searches, e0)
    }, &mut failures);
    report(13, s(600), || c13_kac_rice(&searches[2], &m), &mut failures);
    // Exploratory-mode criterion: reported with z-scores, never fatal.
    let mut exploratory = Vec::new();
    report(14, s(1200), c14_gibbs, &mut exploratory);

    if !exploratory.is_empty() {
        println!("exploratory criteria failing (reported only): {exploratory:?}");
    }
    if failures.is_empty() {
        println!("criteria 1-13 pass");
    } else {
        println!("failing criteria: {failures:?}");
        std::process::exit(1);
    }
}
