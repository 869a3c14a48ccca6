//! Band decomposition and the low-temperature phase quantities.
//!
//! Around a point `q n̂` the Hamiltonian splits into independent pure k-spin
//! pieces with variances `α_k(q)²`. The band free energy
//! `Λ_{Z,β}(−E₀(q), q)` then has a local minimum `q**` and a local maximum
//! `q*` near 1, and the replica-symmetric threshold `q_c` sits between them.

use crate::complexity::{ground_state_near, ground_state_solution, GroundStateSolution};
use crate::error::{GlassError, Result};
use crate::mixture::Mixture;
use crate::optimize;

fn binomial(p: u32, k: u32) -> f64 {
    if k > p {
        return 0.0;
    }
    let k = k.min(p - k);
    (0..k).fold(1.0, |acc, i| acc * (p - i) as f64 / (i + 1) as f64)
}

/// `α_k(q) = (1−q²)^{k/2} (Σ_{p≥k} γ_p² C(p,k) q^{2(p−k)})^{1/2}`.
pub fn alpha_k(m: &Mixture, q: f64, k: u32) -> f64 {
    let q2 = q * q;
    let inner: f64 = m
        .terms()
        .iter()
        .filter(|&&(p, _)| p >= k)
        .map(|&(p, c)| c * binomial(p, k) * q2.powi((p - k) as i32))
        .sum();
    (1.0 - q2).max(0.0).powf(k as f64 / 2.0) * inner.sqrt()
}

/// `Λ_{Z,β}(E, q) = −βE + ½log(1−q²) + ½β²(ν(1) − ν(q²) − (1−q²)ν'(q²))`.
pub fn lambda_z(m: &Mixture, beta: f64, e: f64, q: f64) -> f64 {
    let q2 = q * q;
    -beta * e + 0.5 * (1.0 - q2).ln() + 0.5 * beta * beta * (m.nu(1.0) - m.nu(q2) - (1.0 - q2) * m.d1(q2))
}

/// `Λ_{Z,β}` with the variance term written as `Σ_{k≥2} α_k(q)²`.
pub fn lambda_z_series(m: &Mixture, beta: f64, e: f64, q: f64) -> f64 {
    let tail: f64 = (2..=m.max_degree()).map(|k| alpha_k(m, q, k).powi(2)).sum();
    -beta * e + 0.5 * (1.0 - q * q).ln() + 0.5 * beta * beta * tail
}

/// `Λ^{2−}_{F,β}(E, q) = −βE + √2βα₂(q) − ¼log(β²ν''(q²)) − ¾`, valid when
/// `βα₂(q) ≥ 1/√2`. With `allow_out_of_regime` the formula is returned
/// outside that range too.
pub fn lambda_f_2minus(m: &Mixture, beta: f64, e: f64, q: f64, allow_out_of_regime: bool) -> Result<f64> {
    let a2 = alpha_k(m, q, 2);
    if !allow_out_of_regime && beta * a2 < std::f64::consts::FRAC_1_SQRT_2 * (1.0 - 1e-12) {
        return Err(GlassError::Precondition(format!(
            "βα₂(q) = {:.6} below 1/√2 at q = {q}",
            beta * a2
        )));
    }
    Ok(-beta * e + 2f64.sqrt() * beta * a2 - 0.25 * (beta * beta * m.d2(q * q)).ln() - 0.75)
}

/// The unsimplified form
/// `−βE + ½log(1−q²) + √2βα₂ − ½log(βα₂) − ¾ − ¼log2`.
pub fn lambda_f_2minus_expanded(m: &Mixture, beta: f64, e: f64, q: f64) -> f64 {
    let a2 = alpha_k(m, q, 2);
    -beta * e + 0.5 * (1.0 - q * q).ln() + 2f64.sqrt() * beta * a2 - 0.5 * (beta * a2).ln() - 0.75 - 0.25 * 2f64.ln()
}

/// `t_c = 1/(2√ν''(1))`, the limit of `β(1 − q_c)`.
pub fn t_c(m: &Mixture) -> f64 {
    0.5 / m.d2(1.0).sqrt()
}

/// `t_± = (x₀ ± √(x₀² − 4ν''(1)))/(4ν''(1))`, the limits of `β(1 − q**)`
/// and `β(1 − q*)`.
pub fn t_pm(m: &Mixture, gs: &GroundStateSolution) -> Result<(f64, f64)> {
    let h = m.d2(1.0);
    let disc = gs.x0 * gs.x0 - 4.0 * h;
    if !(disc > 0.0) {
        return Err(GlassError::Precondition(format!(
            "x₀² − 4ν''(1) = {disc:.3e} is not positive"
        )));
    }
    let root = disc.sqrt();
    Ok(((gs.x0 - root) / (4.0 * h), (gs.x0 + root) / (4.0 * h)))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(GlassError::Domain(format!("β = {beta} must be positive")));
    }
    Ok(())
}

/// The largest `q ∈ (0, 1)` with `α₂(q) = 1/(β√2)`.
pub fn q_c(m: &Mixture, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let target = 1.0 / (beta * 2f64.sqrt());
    let f = |q: f64| alpha_k(m, q, 2) - target;
    // Walk down from 1 on a grid that is fine near 1, where the root lives
    // for large β.
    let mut hi: f64 = 1.0;
    let mut step: f64 = 1e-6;
    loop {
        let lo = (hi - step).max(0.0);
        if f(lo) > 0.0 {
            return optimize::bisect(|q| Ok(f(q)), lo, hi, 1e-15);
        }
        if lo <= 0.0 {
            return Err(GlassError::Precondition(format!(
                "β = {beta} is too small: α₂(q) = 1/(β√2) has no root"
            )));
        }
        hi = lo;
        step = (step * 1.25).min(1e-2);
    }
}

/// Band free-energy curve `q ↦ Λ_{Z,β}(−E₀(q), q)` and its derivative.
#[derive(Clone, Debug)]
pub struct BandCurve<'a> {
    pub mixture: &'a Mixture,
    pub beta: f64,
}

impl<'a> BandCurve<'a> {
    pub fn new(mixture: &'a Mixture, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(BandCurve { mixture, beta })
    }

    pub fn ground(&self, q: f64, guess: Option<f64>) -> Result<GroundStateSolution> {
        ground_state_near(self.mixture, q, guess)
    }

    /// `Λ_{Z,β}(−E₀(q), q)`.
    pub fn lambda(&self, q: f64) -> Result<f64> {
        let gs = ground_state_solution(self.mixture, q)?;
        Ok(lambda_z(self.mixture, self.beta, -gs.e0, q))
    }

    /// `g(q) = βx₀(q) − q/(1−q²) − β²(1−q²)Σ_p γ_p² p(p−1) q^{2p−3}`, the
    /// q-derivative of [`Self::lambda`].
    pub fn g_with(&self, q: f64, gs: &GroundStateSolution) -> f64 {
        let b = self.beta;
        let m = self.mixture;
        let sum: f64 = m
            .terms()
            .iter()
            .map(|&(p, c)| c * (p * (p - 1)) as f64 * q.powi(2 * p as i32 - 3))
            .sum();
        b * gs.x0 - q / (1.0 - q * q) - b * b * (1.0 - q * q) * sum
    }

    pub fn g(&self, q: f64) -> Result<f64> {
        let gs = ground_state_solution(self.mixture, q)?;
        Ok(self.g_with(q, &gs))
    }
}

/// Number of grid points scanned for the roots of `g`.
pub const Q_STAR_GRID: usize = 2048;

/// `(q*, q**)`: the local maximum and minimum of the band free-energy curve
/// in `[1 − log β/β, 1 − 1e−4/β]`.
pub fn q_star(m: &Mixture, beta: f64) -> Result<(f64, f64)> {
    let curve = BandCurve::new(m, beta)?;
    let lo = 1.0 - beta.ln().max(1.0) / beta;
    let hi = 1.0 - 1e-4 / beta;
    if !(lo > 0.0 && lo < hi) {
        return Err(GlassError::Precondition(format!(
            "β = {beta} leaves no scan window for q*"
        )));
    }
    let n = Q_STAR_GRID;
    let mut qs = Vec::with_capacity(n);
    let mut gs = Vec::with_capacity(n);
    let mut guess = None;
    for i in (0..n).rev() {
        let q = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let sol = curve.ground(q, guess)?;
        guess = Some(sol.e0);
        qs.push(q);
        gs.push(curve.g_with(q, &sol));
    }
    // qs runs downward from hi. q* is where g changes from − (above) to +
    // (below); q** the next change back to − further down.
    let mut star = None;
    let mut star_star = None;
    for i in 0..n - 1 {
        let (above, below) = (gs[i], gs[i + 1]);
        if star.is_none() {
            if above < 0.0 && below >= 0.0 {
                star = Some((qs[i + 1], qs[i]));
            }
        } else if above >= 0.0 && below < 0.0 {
            star_star = Some((qs[i + 1], qs[i]));
            break;
        }
    }
    let (Some(a), Some(b)) = (star, star_star) else {
        return Err(GlassError::Precondition(format!(
            "β = {beta}: fewer than two sign changes of dΛ/dq in the scan window"
        )));
    };
    let root = |(l, h): (f64, f64)| optimize::bisect(|q| curve.g(q), l, h, 1e-15);
    Ok((root(a)?, root(b)?))
}

/// `F_β = sup_{q ∈ [q_c, 1)} Λ_{Z,β}(−E₀(q), q)` and its argmax, found by a
/// direct maximization independent of the root scan in [`q_star`].
pub fn free_energy(m: &Mixture, beta: f64) -> Result<(f64, f64)> {
    let curve = BandCurve::new(m, beta)?;
    let lo = q_c(m, beta)?;
    let hi = 1.0 - 1e-4 / beta;
    let mut err = None;
    let mut f = |q: f64| match curve.lambda(q) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let (q, v) = optimize::grid_then_golden(&mut f, lo, hi, 256, 1e-10);
    if let Some(e) = err {
        return Err(e);
    }
    Ok((v, q))
}

/// `(finite, limit)` gap between the band free energy at `q*` and at `q_c`.
pub fn gap(m: &Mixture, beta: f64) -> Result<(f64, f64)> {
    let s = phase_summary(m, beta)?;
    Ok((s.gap_finite, s.gap_limit))
}

/// `(t_c − t_−)x₀(1) + ½log(t_−/t_c) + ν''(1)(t_−² − t_c²)`.
pub fn gap_limit(m: &Mixture, gs: &GroundStateSolution) -> Result<f64> {
    let (tm, _) = t_pm(m, gs)?;
    let tc = t_c(m);
    Ok(gap_limit_at(m, gs.x0, tm, tc))
}

fn gap_limit_at(m: &Mixture, x0: f64, tm: f64, tc: f64) -> f64 {
    (tc - tm) * x0 + 0.5 * (tm / tc).ln() + m.d2(1.0) * (tm * tm - tc * tc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSummary {
    pub beta: f64,
    pub q_c: f64,
    pub q_star: f64,
    pub q_star_star: f64,
    pub e_star: f64,
    pub f_beta: f64,
    pub t_minus: f64,
    pub t_plus: f64,
    pub t_c: f64,
    pub gap_finite: f64,
    pub gap_limit: f64,
}

/// All phase quantities at inverse temperature `β`.
pub fn phase_summary(m: &Mixture, beta: f64) -> Result<PhaseSummary> {
    check_beta(beta)?;
    let gs1 = ground_state_solution(m, 1.0)?;
    let (t_minus, t_plus) = t_pm(m, &gs1)?;
    let tc = t_c(m);
    let qc = q_c(m, beta)?;
    let (qs, qss) = q_star(m, beta)?;
    let e_star = ground_state_solution(m, qs)?.e0;
    let f_beta = lambda_z(m, beta, -e_star, qs);
    let at_qc = lambda_z(m, beta, -ground_state_solution(m, qc)?.e0, qc);
    Ok(PhaseSummary {
        beta,
        q_c: qc,
        q_star: qs,
        q_star_star: qss,
        e_star,
        f_beta,
        t_minus,
        t_plus,
        t_c: tc,
        gap_finite: f_beta - at_qc,
        gap_limit: gap_limit_at(m, gs1.x0, t_minus, tc),
    })
}
