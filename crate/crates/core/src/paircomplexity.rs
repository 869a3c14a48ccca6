//! Pair complexity of q-critical points at overlap `r` and Condition M.
//!
//! For two points at radii `q₁√N`, `q₂√N` with overlap `r`, the vector
//! `w = (u₁, u₂, x₁, x₂)` of normalized energies and radial derivatives has,
//! conditionally on both spherical gradients vanishing, the covariance
//! `Σ_{U,X}(r, q₁, q₂)` assembled below. The pair complexity `Ψ` is the
//! two-point analogue of `Θ`, and its profile `Ψ⁰(r)` at the ground-state
//! parameters decides Condition M.

use std::fmt;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen, Vector4};
use rayon::prelude::*;

use crate::complexity::{ground_state_solution, GroundStateSolution, ThetaSurface};
use crate::error::{GlassError, Result};
use crate::mixture::{classify, Mixture, MixtureKind};
use crate::optimize;
use crate::semicircle::omega;

/// Largest condition number accepted for `Σ_{U,X}`.
pub const MAX_CONDITION: f64 = 1e12;

/// Shorthand for the values of `ν` and its derivatives used at `(r, q₁, q₂)`.
#[derive(Clone, Copy, Debug)]
struct Point {
    r: f64,
    q1: f64,
    q2: f64,
    s: f64,
    /// `ν^{(k)}(q₁q₂r)` for k = 0..4.
    z: [f64; 5],
    /// `ν^{(k)}(q₁²)` for k = 0..2.
    n1: [f64; 3],
    /// `ν^{(k)}(q₂²)` for k = 0..2.
    n2: [f64; 3],
}

impl Point {
    fn new(m: &Mixture, r: f64, q1: f64, q2: f64) -> Self {
        let z = q1 * q2 * r;
        let (a, b) = (q1 * q1, q2 * q2);
        Point {
            r,
            q1,
            q2,
            s: 1.0 - r * r,
            z: [m.nu(z), m.d1(z), m.d2(z), m.d3(z), m.d4(z)],
            n1: [m.nu(a), m.d1(a), m.d2(a)],
            n2: [m.nu(b), m.d1(b), m.d2(b)],
        }
    }

    fn swapped(&self) -> Self {
        Point {
            q1: self.q2,
            q2: self.q1,
            n1: self.n2,
            n2: self.n1,
            ..*self
        }
    }

    fn d1(&self) -> f64 {
        self.n1[1] * self.n2[1] - self.z[1] * self.z[1]
    }

    fn c(&self) -> f64 {
        self.r * self.z[1] - self.q1 * self.q2 * self.z[2] * self.s
    }

    fn d2(&self) -> f64 {
        let c = self.c();
        self.n1[1] * self.n2[1] - c * c
    }

    fn a1(&self) -> f64 {
        self.n2[1] / self.d1()
    }

    fn a2(&self) -> f64 {
        self.n2[1] / self.d2()
    }

    fn a3(&self) -> f64 {
        -self.z[1] / self.d1()
    }

    fn a4(&self) -> f64 {
        -self.c() / self.d2()
    }

    fn v1(&self) -> f64 {
        self.q1 * self.q2 * self.r * self.z[2] + self.z[1]
    }

    fn v2(&self) -> f64 {
        -self.q1 * self.q2 * self.q2 * self.z[3] * self.s + 2.0 * self.r * self.q2 * self.z[2]
    }

    fn v3(&self) -> f64 {
        self.q1 * self.q1 * self.q2 * self.r * self.z[3] + 2.0 * self.q1 * self.z[2]
    }
}

/// The scalar helpers `a₁..a₄` at `(r, q₁, q₂)`.
pub fn a_coeffs(m: &Mixture, r: f64, q1: f64, q2: f64) -> [f64; 4] {
    let p = Point::new(m, r, q1, q2);
    [p.a1(), p.a2(), p.a3(), p.a4()]
}

/// The scalar helpers `υ₁..υ₃` at `(r, q₁, q₂)`.
pub fn v_coeffs(m: &Mixture, r: f64, q1: f64, q2: f64) -> [f64; 3] {
    let p = Point::new(m, r, q1, q2);
    [p.v1(), p.v2(), p.v3()]
}

/// The scalar helpers `b₁..b₄` at `(r, 1, 1)`.
pub fn b_coeffs(m: &Mixture, r: f64) -> [f64; 4] {
    let p = Point::new(m, r, 1.0, 1.0);
    let (a2, a4, v1, v2) = (p.a2(), p.a4(), p.v1(), p.v2());
    let (n1r, s) = (p.z[1], p.s);
    [
        -m.d1(1.0) + a2 * s * n1r * v1,
        -r * n1r - a4 * s * n1r * v1,
        a2 * s * n1r * v2,
        p.z[2] * s - a4 * s * n1r * v2,
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCovariance {
    pub r: f64,
    pub q1: f64,
    pub q2: f64,
    pub a: [f64; 4],
    pub v: [f64; 3],
    /// Only defined for `q₁ = q₂ = 1`; computed at `(r, 1, 1)` regardless.
    pub b: [f64; 4],
    pub sigma_u: Matrix2<f64>,
    pub sigma_x: Matrix2<f64>,
    /// `Σ_b[i][j]` is the covariance of `u_i` with `x_j`.
    pub sigma_b: Matrix2<f64>,
    pub sigma_ux: Matrix4<f64>,
    pub sigma_z: Matrix2<f64>,
    pub sigma_q: Matrix2<f64>,
    pub varsigma1: Vector4<f64>,
    pub varsigma2: Vector4<f64>,
    /// `Σ_{U,X}⁻¹`.
    pub sigma_ux_inv: Matrix4<f64>,
    pub min_eigenvalue: f64,
    pub condition: f64,
}

fn check_args(r: f64, q1: f64, q2: f64) -> Result<()> {
    if !(r.abs() < 1.0) {
        return Err(GlassError::Domain(format!("overlap r = {r} must satisfy |r| < 1")));
    }
    for q in [q1, q2] {
        if !(q > 0.0 && q <= 1.0) {
            return Err(GlassError::Domain(format!("radius q = {q} outside (0, 1]")));
        }
    }
    Ok(())
}

/// Assembles every block of the two-point covariance structure.
pub fn assemble(m: &Mixture, r: f64, q1: f64, q2: f64) -> Result<PairCovariance> {
    check_args(r, q1, q2)?;
    if m.is_pure() {
        return Err(GlassError::DegenerateCovariance(
            "pure mixture: the two-point covariance is singular".into(),
        ));
    }
    let p = Point::new(m, r, q1, q2);
    let ps = p.swapped();
    let s = p.s;
    let (z0, z1, z2, z3, z4) = (p.z[0], p.z[1], p.z[2], p.z[3], p.z[4]);
    let (a1, a2, a3, a4) = (p.a1(), p.a2(), p.a3(), p.a4());
    let (a1s, a2s) = (ps.a1(), ps.a2());
    let (v1, v2, v3) = (p.v1(), p.v2(), p.v3());
    let (v2s, v3s) = (ps.v2(), ps.v3());
    let (nu1, nu2) = (p.n1, p.n2);

    let u11 = nu1[0] - q1 * q1 * a2s * z1 * z1 * s;
    let u22 = nu2[0] - q2 * q2 * a2 * z1 * z1 * s;
    let u12 = z0 + q1 * q2 * a4 * z1 * z1 * s;

    let x11 = q1 * q1 * nu1[2] + nu1[1] - v1 * v1 * s * a2s;
    let x22 = q2 * q2 * nu2[2] + nu2[1] - v1 * v1 * s * a2;
    let x12 = q1 * q2 * r * r * z2 + r * z1 + v1 * v1 * s * a4;

    let b11 = q1 * nu1[1] - q1 * s * z1 * v1 * a2s;
    let b22 = q2 * nu2[1] - q2 * s * z1 * v1 * a2;
    let b12 = q1 * r * z1 + q1 * s * z1 * v1 * a4;
    let b21 = q2 * r * z1 + q2 * s * z1 * v1 * a4;

    let sigma_u = Matrix2::new(u11, u12, u12, u22);
    let sigma_x = Matrix2::new(x11, x12, x12, x22);
    let sigma_b = Matrix2::new(b11, b12, b21, b22);
    let mut sigma_ux = Matrix4::zeros();
    sigma_ux.fixed_view_mut::<2, 2>(0, 0).copy_from(&sigma_u);
    sigma_ux.fixed_view_mut::<2, 2>(0, 2).copy_from(&sigma_b);
    sigma_ux.fixed_view_mut::<2, 2>(2, 0).copy_from(&sigma_b.transpose());
    sigma_ux.fixed_view_mut::<2, 2>(2, 2).copy_from(&sigma_x);

    let (inv, min_eig, cond) = invert_spd(&sigma_ux)?;

    let (h1, h2) = (nu1[2], nu2[2]);
    let zz11 = 1.0 - q2 * q2 * s * z2 * z2 * a1s / h1;
    let zz22 = 1.0 - q1 * q1 * s * z2 * z2 * a1 / h2;
    let zz12 = (-q1 * q2 * s * z3 + r * z2 + q1 * q2 * s * z2 * z2 * a3) / (h1 * h2).sqrt();
    let sigma_z = Matrix2::new(zz11, zz12, zz12, zz22);

    let varsigma1 = Vector4::new(
        q1 * z1 * v2 * a2s,
        q2 * q2 * z2 - q2 * z1 * v2 * a4,
        v1 * v2 * a2s,
        v3s - v1 * v2 * a4,
    ) / h1.sqrt();
    let varsigma2 = Vector4::new(
        q1 * q1 * z2 - q1 * z1 * v2s * a4,
        q2 * z1 * v2s * a2,
        v3 - v1 * v2s * a4,
        v1 * v2s * a2,
    ) / h2.sqrt();
    let proj = |x: &Vector4<f64>, y: &Vector4<f64>| s * s * x.dot(&(inv * y));
    let q11 = 2.0 - s / h1 * a2s * v2 * v2 - proj(&varsigma1, &varsigma1);
    let q22 = 2.0 - s / h2 * a2 * v2s * v2s - proj(&varsigma2, &varsigma2);
    let q12 = (q1 * q1 * q2 * q2 * z4 * s * s - 4.0 * q1 * q2 * s * r * z3
        + 2.0 * r * r * z2
        + s * v2 * v2s * a4)
        / (h1 * h2).sqrt()
        - proj(&varsigma1, &varsigma2);
    let sigma_q = Matrix2::new(q11, q12, q12, q22);

    Ok(PairCovariance {
        r,
        q1,
        q2,
        a: [a1, a2, a3, a4],
        v: [v1, v2, v3],
        b: b_coeffs(m, r),
        sigma_u,
        sigma_x,
        sigma_b,
        sigma_ux,
        sigma_z,
        sigma_q,
        varsigma1,
        varsigma2,
        sigma_ux_inv: inv,
        min_eigenvalue: min_eig,
        condition: cond,
    })
}

fn invert_spd(a: &Matrix4<f64>) -> Result<(Matrix4<f64>, f64, f64)> {
    let eig = SymmetricEigen::new(*a);
    let min = eig.eigenvalues.min();
    let max = eig.eigenvalues.max();
    if !(min > 0.0) || max / min > MAX_CONDITION {
        return Err(GlassError::DegenerateCovariance(format!(
            "Σ_UX eigenvalues in [{min:.3e}, {max:.3e}]"
        )));
    }
    let chol = a.cholesky().ok_or_else(|| {
        GlassError::DegenerateCovariance("Σ_UX Cholesky factorization failed".into())
    })?;
    Ok((chol.inverse(), min, max / min))
}

/// The pair complexity `Ψ(r, q₁, q₂, u₁, u₂, x₁, x₂)`.
#[allow(clippy::too_many_arguments)]
pub fn psi(m: &Mixture, q1: f64, q2: f64, r: f64, u1: f64, u2: f64, x1: f64, x2: f64) -> Result<f64> {
    let cov = assemble(m, r, q1, q2)?;
    Ok(psi_with(m, &cov, u1, u2, x1, x2))
}

/// `Ψ` for an already assembled covariance.
pub fn psi_with(m: &Mixture, cov: &PairCovariance, u1: f64, u2: f64, x1: f64, x2: f64) -> f64 {
    let (q1, q2, r) = (cov.q1, cov.q2, cov.r);
    let z = q1 * q2 * r;
    let (h1, h2) = (m.d2(q1 * q1), m.d2(q2 * q2));
    let d1 = m.d1(q1 * q1) * m.d1(q2 * q2) - m.d1(z).powi(2);
    let w = Vector4::new(u1, u2, x1, x2);
    let quad = w.dot(&(cov.sigma_ux_inv * w));
    1.0 + 0.5 * ((1.0 - r * r) * q1 * q1 * q2 * q2 * h1 * h2 / d1).ln() - 0.5 * quad
        + omega(x1 / (q1 * h1.sqrt()))
        + omega(x2 / (q2 * h2.sqrt()))
}

/// Extrapolated endpoint value of `Ψ⁰`, or a divergence flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Endpoint {
    Finite(f64),
    MinusInfinity,
}

impl Endpoint {
    pub fn value(&self) -> f64 {
        match self {
            Endpoint::Finite(v) => *v,
            Endpoint::MinusInfinity => f64::NEG_INFINITY,
        }
    }
}

/// The profile `Ψ⁰(r) = Ψ_{ν,1,1}(r, −E₀, −E₀, −x₀, −x₀)`.
///
/// With both points on the unit sphere and `w` symmetric under the swap of
/// the two points, the quadratic form only sees the symmetric 2×2 block
/// `[Σ_U11+Σ_U12, Σ_b11+Σ_b12; ·, Σ_X11+Σ_X12]`, which stays well
/// conditioned as `r → ±1`.
#[derive(Clone, Debug)]
pub struct Psi0Profile {
    mixture: Mixture,
    pub ground: GroundStateSolution,
    nu: [f64; 3],
    omega_term: f64,
}

impl Psi0Profile {
    pub fn new(m: &Mixture) -> Result<Self> {
        if m.is_pure() {
            return Err(GlassError::DegenerateCovariance(
                "pure mixture: Ψ⁰ needs a mixed model".into(),
            ));
        }
        let ground = ground_state_solution(m, 1.0)?;
        let nu = [m.nu(1.0), m.d1(1.0), m.d2(1.0)];
        Ok(Psi0Profile {
            mixture: m.clone(),
            omega_term: 2.0 * omega(-ground.x0 / nu[2].sqrt()),
            ground,
            nu,
        })
    }

    pub fn mixture(&self) -> &Mixture {
        &self.mixture
    }

    /// `Ψ⁰(r)` for `|r| < 1`.
    pub fn interior(&self, r: f64) -> Result<f64> {
        if !(r.abs() < 1.0) {
            return Err(GlassError::Domain(format!("overlap r = {r} must satisfy |r| < 1")));
        }
        let m = &self.mixture;
        let [n0, n1, n2] = self.nu;
        let (zr0, zr1, zr2) = (m.nu(r), m.d1(r), m.d2(r));
        let s = 1.0 - r * r;
        let c = r * zr1 - zr2 * s;
        // a₂ − a₄ at q₁ = q₂ = 1.
        let g = s / (n1 - c);
        let v1 = r * zr2 + zr1;
        let su = n0 + zr0 - zr1 * zr1 * g;
        let sb = n1 + r * zr1 - zr1 * v1 * g;
        let sx = n2 + n1 + r * r * zr2 + r * zr1 - v1 * v1 * g;
        let schur = sx - sb * sb / su;
        if !(su > 0.0 && schur > 0.0) {
            return Err(GlassError::DegenerateCovariance(format!(
                "symmetric block not positive at r = {r}"
            )));
        }
        let (u, x) = (-self.ground.e0, -self.ground.x0);
        let dx = x - sb / su * u;
        let log_term = 0.5 * (s * n2 * n2 / ((n1 - zr1) * (n1 + zr1))).ln();
        Ok(1.0 + log_term - u * u / su - dx * dx / schur + self.omega_term)
    }

    /// `Ψ⁰(r)` on `[−1, 1]`; the endpoints are limits.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r == 1.0 || r == -1.0 {
            Ok(self.endpoint(r > 0.0)?.value())
        } else {
            self.interior(r)
        }
    }

    /// `lim_{r→±1} Ψ⁰(r)`.
    ///
    /// At `r → −1` the limit is finite only for even mixtures. Otherwise the
    /// profile is sampled at `1 − 2^{−k}`, k = 6..16: log-divergence shows up
    /// as increments that stop shrinking, in which case `−∞` is reported, and
    /// a finite limit is Richardson-extrapolated.
    pub fn endpoint(&self, plus: bool) -> Result<Endpoint> {
        if !plus && !self.mixture.is_even() {
            return Ok(Endpoint::MinusInfinity);
        }
        let sign = if plus { 1.0 } else { -1.0 };
        let ks: Vec<i32> = (6..=16).collect();
        let vals: Vec<f64> = ks
            .iter()
            .map(|&k| self.interior(sign * (1.0 - 2f64.powi(-k))))
            .collect::<Result<_>>()?;
        let n = vals.len();
        let last = vals[n - 1] - vals[n - 2];
        let prev = vals[n - 2] - vals[n - 3];
        if last.abs() > 1e-6 && (last / prev) > 0.75 {
            return Ok(Endpoint::MinusInfinity);
        }
        Ok(Endpoint::Finite(richardson_geometric(&vals[n - 6..])))
    }

    /// `d²Ψ⁰/dr²(0)` from central differences at `h ∈ {1e−2, 5e−3, 2.5e−3}`
    /// with two Richardson steps.
    pub fn second_derivative_at_zero(&self) -> Result<f64> {
        let f0 = self.interior(0.0)?;
        let dd = |h: f64| -> Result<f64> {
            Ok((self.interior(h)? - 2.0 * f0 + self.interior(-h)?) / (h * h))
        };
        let (d1, d2, d3) = (dd(1e-2)?, dd(5e-3)?, dd(2.5e-3)?);
        let r1 = (4.0 * d2 - d1) / 3.0;
        let r2 = (4.0 * d3 - d2) / 3.0;
        Ok((16.0 * r2 - r1) / 15.0)
    }
}

/// Extrapolates `f(ε)` to `ε = 0` from samples at `ε, ε/2, ε/4, …` assuming
/// an expansion in integer powers of `ε`.
fn richardson_geometric(vals: &[f64]) -> f64 {
    let mut t: Vec<f64> = vals.to_vec();
    let mut factor = 2.0;
    for _ in 1..vals.len() {
        for i in 0..t.len() - 1 {
            t[i] = (factor * t[i + 1] - t[i]) / (factor - 1.0);
        }
        t.pop();
        factor *= 2.0;
    }
    t[0]
}

/// `Ψ⁰(r)` computed from scratch; see [`Psi0Profile`] for repeated use.
pub fn psi0(m: &Mixture, r: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&r) {
        return Err(GlassError::Domain(format!("overlap r = {r} outside [-1, 1]")));
    }
    Psi0Profile::new(m)?.eval(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CondMClause {
    NotMixed,
    NotPureLike,
    SecondDerivativeNonnegative,
    MaxNotUniqueAtZero,
}

impl CondMClause {
    pub fn as_str(&self) -> &'static str {
        match self {
            CondMClause::NotMixed => "not_mixed",
            CondMClause::NotPureLike => "not_pure_like",
            CondMClause::SecondDerivativeNonnegative => "second_derivative_nonnegative",
            CondMClause::MaxNotUniqueAtZero => "max_not_unique_at_zero",
        }
    }
}

impl fmt::Display for CondMClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CondMVerdict {
    pub holds: bool,
    pub failed_clause: Option<CondMClause>,
    pub psi0_at_zero: f64,
    pub d2_psi0_at_zero: f64,
    /// `Ψ⁰(0)` minus the largest value of `Ψ⁰` away from 0, endpoints
    /// included.
    pub max_margin: f64,
    pub endpoint_plus: f64,
    /// `−∞` when the limit diverges.
    pub endpoint_minus: f64,
}

impl CondMVerdict {
    fn failed(clause: CondMClause) -> Self {
        CondMVerdict {
            holds: false,
            failed_clause: Some(clause),
            psi0_at_zero: f64::NAN,
            d2_psi0_at_zero: f64::NAN,
            max_margin: f64::NAN,
            endpoint_plus: f64::NAN,
            endpoint_minus: f64::NAN,
        }
    }
}

/// Checks Condition M: the mixture is mixed and pure-like, and `Ψ⁰` has a
/// strict nondegenerate maximum at `r = 0` which is unique on `[−1, 1]`.
pub fn check_condition_m(m: &Mixture, grid_step: f64) -> Result<CondMVerdict> {
    if !(grid_step > 0.0 && grid_step < 0.1) {
        return Err(GlassError::Domain(format!("grid step {grid_step} outside (0, 0.1)")));
    }
    if m.is_pure() {
        return Ok(CondMVerdict::failed(CondMClause::NotMixed));
    }
    if classify(m)?.kind != MixtureKind::PureLike {
        return Ok(CondMVerdict::failed(CondMClause::NotPureLike));
    }
    let prof = Psi0Profile::new(m)?;
    let at_zero = prof.interior(0.0)?;
    let d2 = prof.second_derivative_at_zero()?;
    let plus = prof.endpoint(true)?.value();
    let minus = prof.endpoint(false)?.value();

    let n = (1.0 / grid_step).floor() as i64;
    let ks: Vec<i64> = (-n..=n).filter(|&k| k != 0 && (k as f64 * grid_step).abs() < 1.0).collect();
    let vals: Vec<(f64, f64)> = ks
        .par_iter()
        .map(|&k| {
            let r = k as f64 * grid_step;
            prof.interior(r).map(|v| (r, v))
        })
        .collect::<Result<_>>()?;
    let inner = 10.0 * grid_step;
    let mut best = f64::NEG_INFINITY;
    let mut inner_violation = false;
    for &(r, v) in &vals {
        if r.abs() < inner {
            inner_violation |= v >= at_zero;
        } else if v > best {
            best = v;
        }
    }
    // Refine around every outer grid point close to the running maximum.
    for (i, &(r, v)) in vals.iter().enumerate() {
        if r.abs() < inner || v < best - 1e-6 {
            continue;
        }
        let lo = if i > 0 { vals[i - 1].0 } else { r - grid_step };
        let hi = if i + 1 < vals.len() { vals[i + 1].0 } else { r + grid_step };
        let (lo, hi) = (lo.max(-1.0 + 1e-12), hi.min(1.0 - 1e-12));
        let (_, refined) = optimize::golden_max(
            |t| prof.interior(t).unwrap_or(f64::NEG_INFINITY),
            lo,
            hi,
            1e-9,
        );
        best = best.max(refined);
    }
    let margin = at_zero - best.max(plus).max(minus);

    let clause = if d2 >= -1e-8 {
        Some(CondMClause::SecondDerivativeNonnegative)
    } else if margin <= 0.0 || inner_violation {
        Some(CondMClause::MaxNotUniqueAtZero)
    } else {
        None
    };
    Ok(CondMVerdict {
        holds: clause.is_none(),
        failed_clause: clause,
        psi0_at_zero: at_zero,
        d2_psi0_at_zero: d2,
        max_margin: margin,
        endpoint_plus: plus,
        endpoint_minus: minus,
    })
}

/// `Θ₁ + Θ₂` at the two radii, the value `Ψ` takes at `r = 0`.
pub fn theta_sum(m: &Mixture, q1: f64, q2: f64, u1: f64, u2: f64, x1: f64, x2: f64) -> Result<f64> {
    Ok(ThetaSurface::new(m, q1)?.eval(u1, x1) + ThetaSurface::new(m, q2)?.eval(u2, x2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::theta;

    fn near_pure3() -> Mixture {
        Mixture::new([(3, 0.96), (4, 0.04)]).unwrap()
    }

    #[test]
    fn r_zero_blocks_without_two_spin() {
        let m = Mixture::new([(3, 0.5), (5, 0.5)]).unwrap();
        let q = 0.8;
        let cov = assemble(&m, 0.0, q, q).unwrap();
        let nq = m.nu(q * q);
        assert!((cov.sigma_u[(0, 0)] - nq).abs() < 1e-15);
        assert!((cov.sigma_u[(1, 1)] - nq).abs() < 1e-15);
        assert_eq!(cov.sigma_u[(0, 1)], 0.0);
    }

    #[test]
    fn r_zero_sigma_z_identity() {
        // ν''(0) and ν'''(0) vanish once p = 2 and p = 3 are absent.
        let m = Mixture::new([(4, 0.5), (6, 0.5)]).unwrap();
        let cov = assemble(&m, 0.0, 0.9, 0.7).unwrap();
        assert!((cov.sigma_z - Matrix2::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn r_zero_sigma_z_off_identity_with_cubic_term() {
        let m = Mixture::new([(3, 0.5), (4, 0.5)]).unwrap();
        let cov = assemble(&m, 0.0, 1.0, 1.0).unwrap();
        assert!((cov.sigma_z[(0, 1)] + 3.0 / m.d2(1.0)).abs() < 1e-14);
    }

    #[test]
    fn positive_definite_at_half() {
        let cov = assemble(&near_pure3(), 0.5, 1.0, 1.0).unwrap();
        assert!(cov.min_eigenvalue > 0.0);
    }

    #[test]
    fn block_swap_symmetry() {
        let m = Mixture::new([(2, 0.1), (3, 0.6), (5, 0.3)]).unwrap();
        for &(r, q1, q2) in &[(0.3, 0.9, 0.6), (-0.7, 0.5, 1.0), (0.95, 1.0, 0.8)] {
            let a = assemble(&m, r, q1, q2).unwrap();
            let b = assemble(&m, r, q2, q1).unwrap();
            let swap = |x: &Matrix2<f64>| Matrix2::new(x[(1, 1)], x[(1, 0)], x[(0, 1)], x[(0, 0)]);
            assert!((a.sigma_u - swap(&b.sigma_u)).abs().max() < 1e-13);
            assert!((a.sigma_x - swap(&b.sigma_x)).abs().max() < 1e-13);
            assert!((a.sigma_b - swap(&b.sigma_b)).abs().max() < 1e-13);
            assert!((a.sigma_z - swap(&b.sigma_z)).abs().max() < 1e-13);
            assert!((a.sigma_q - swap(&b.sigma_q)).abs().max() < 1e-12);
        }
    }

    #[test]
    fn psi_at_zero_is_theta_sum() {
        let m = near_pure3();
        let (q1, q2, u1, u2, x1, x2) = (0.9, 0.7, -1.2, -0.4, -3.0, 0.5);
        let v = psi(&m, q1, q2, 0.0, u1, u2, x1, x2).unwrap();
        let t = theta(&m, q1, u1, x1).unwrap() + theta(&m, q2, u2, x2).unwrap();
        assert!((v - t).abs() < 1e-10);
    }

    #[test]
    fn reduced_profile_matches_full() {
        let m = near_pure3();
        let prof = Psi0Profile::new(&m).unwrap();
        let (e, x) = (prof.ground.e0, prof.ground.x0);
        for i in 0..=38 {
            let r = -0.95 + 0.05 * i as f64;
            let full = psi(&m, 1.0, 1.0, r, -e, -e, -x, -x).unwrap();
            let red = prof.interior(r).unwrap();
            assert!((full - red).abs() < 1e-9 * (1.0 + full.abs()), "r={r}: {full} vs {red}");
        }
    }

    #[test]
    fn psi0_zero_at_origin() {
        let v = psi0(&near_pure3(), 0.0).unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn psi0_even_symmetry() {
        let m = Mixture::new([(4, 0.5), (6, 0.5)]).unwrap();
        let prof = Psi0Profile::new(&m).unwrap();
        for i in 1..20 {
            let r = 0.049 * i as f64;
            assert!((prof.interior(r).unwrap() - prof.interior(-r).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn psi0_endpoints_near_pure3() {
        let prof = Psi0Profile::new(&near_pure3()).unwrap();
        let plus = prof.endpoint(true).unwrap();
        assert!(matches!(plus, Endpoint::Finite(v) if v < 0.0));
        assert_eq!(prof.endpoint(false).unwrap(), Endpoint::MinusInfinity);
    }

    #[test]
    fn richardson_linear_plus_quadratic() {
        let f = |e: f64| 1.5 + 2.0 * e - 3.0 * e * e;
        let vals: Vec<f64> = (0..5).map(|k| f(0.1 / 2f64.powi(k))).collect();
        assert!((richardson_geometric(&vals) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn pure_fails_not_mixed() {
        let v = check_condition_m(&Mixture::pure(3).unwrap(), 1e-3).unwrap();
        assert!(!v.holds);
        assert_eq!(v.failed_clause, Some(CondMClause::NotMixed));
    }

    #[test]
    fn domain_errors() {
        let m = near_pure3();
        assert!(matches!(assemble(&m, 1.0, 1.0, 1.0), Err(GlassError::Domain(_))));
        assert!(matches!(
            assemble(&Mixture::pure(3).unwrap(), 0.2, 1.0, 1.0),
            Err(GlassError::DegenerateCovariance(_))
        ));
    }
}
