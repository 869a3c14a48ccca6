//! One-point complexity `Θ_{ν,q}(u, x)` of q-critical points, the threshold
//! `E∞(q)` and the ground-state solvers `E₀(q)`, `x₀(q)`.
//!
//! `u` is the normalized energy `H/N` and `x` the normalized radial derivative
//! `(d/dR H)/√N` at a point of the sphere of radius `q√N`.

use crate::error::{GlassError, Result};
use crate::mixture::{Mixture, CRITICAL_BAND};
use crate::optimize;
use crate::semicircle::{omega, omega_prime};

/// The matrix `[ν(q²), q²ν'(q²); q²ν'(q²), q⁴ν''(q²) + q²ν'(q²)]`.
///
/// It is the covariance of `(H/N, q·(d/dR H)/√N)`, hence `Θ` pairs it with
/// the vector `(u, q·x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaQ {
    pub q: f64,
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl SigmaQ {
    pub fn new(m: &Mixture, q: f64) -> Self {
        let q2 = q * q;
        let (n0, n1, n2) = (m.nu(q2), m.d1(q2), m.d2(q2));
        SigmaQ {
            q,
            m11: n0,
            m12: q2 * n1,
            m22: q2 * q2 * n2 + q2 * n1,
        }
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m12
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let tr = self.m11 + self.m22;
        let disc = ((self.m11 - self.m22).powi(2) + 4.0 * self.m12 * self.m12).sqrt();
        // Smaller root through the product to avoid cancellation.
        let big = 0.5 * (tr + disc);
        self.det() / big
    }
}

/// `Θ_{ν,q}` with every `(ν, q)`-dependent constant precomputed.
#[derive(Clone, Copy, Debug)]
pub struct ThetaSurface {
    pub q: f64,
    /// Covariance of `(u, x)`: `[ν, qν'; qν', q²ν'' + ν']` at `q²`.
    c11: f64,
    c12: f64,
    c22: f64,
    det: f64,
    /// `q√ν''(q²)`, the half-width of the Hessian bulk in `x` units.
    scale: f64,
    constant: f64,
}

impl ThetaSurface {
    pub fn new(m: &Mixture, q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(GlassError::Domain(format!("q = {q} outside (0, 1]")));
        }
        if m.is_pure() {
            return Err(GlassError::DegenerateCovariance(
                "pure mixture: use theta_pure".into(),
            ));
        }
        let q2 = q * q;
        let (n0, n1, n2) = (m.nu(q2), m.d1(q2), m.d2(q2));
        let c11 = n0;
        let c12 = q * n1;
        let c22 = q2 * n2 + n1;
        let det = c11 * c22 - c12 * c12;
        if !(det > 1e-14 * c11 * c22) {
            return Err(GlassError::DegenerateCovariance(format!(
                "covariance of (u, x) is singular at q = {q}"
            )));
        }
        Ok(ThetaSurface {
            q,
            c11,
            c12,
            c22,
            det,
            scale: q * n2.sqrt(),
            constant: 0.5 + 0.5 * (q2 * n2 / n1).ln(),
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn quad(&self, u: f64, x: f64) -> f64 {
        (self.c22 * u * u - 2.0 * self.c12 * u * x + self.c11 * x * x) / self.det
    }

    pub fn eval(&self, u: f64, x: f64) -> f64 {
        self.constant - 0.5 * self.quad(u, x) + omega(x / self.scale)
    }

    /// `∂Θ/∂u`.
    pub fn d_u(&self, u: f64, x: f64) -> f64 {
        -(self.c22 * u - self.c12 * x) / self.det
    }

    /// `∂Θ/∂x`.
    pub fn d_x(&self, u: f64, x: f64) -> f64 {
        -(self.c11 * x - self.c12 * u) / self.det + omega_prime(x / self.scale) / self.scale
    }

    /// `(value, argmax)` of `x ↦ Θ(u, x)`.
    ///
    /// Since `|Ω'| ≤ 1`, every stationary point lies within `c/s` of the
    /// conditional mean of `x` given `u`, where `c` is the conditional
    /// variance and `s` the scale; the search is confined there.
    pub fn sup_x(&self, u: f64) -> Result<(f64, f64)> {
        if !u.is_finite() {
            return Err(GlassError::Domain(format!("u = {u} is not finite")));
        }
        let mean = self.c12 / self.c11 * u;
        let var = self.det / self.c11;
        let half = var / self.scale * (1.0 + 1e-9) + 1e-12;
        let (x, v) = optimize::grid_then_golden(
            |x| self.eval(u, x),
            mean - half,
            mean + half,
            257,
            1e-11 * (1.0 + mean.abs()),
        );
        if !v.is_finite() {
            return Err(GlassError::NumericFailure(format!(
                "sup over x not finite at u = {u}"
            )));
        }
        // Value comparisons resolve the argmax only to about √ε; polish on
        // the analytic derivative.
        let h = 1e-6 * (1.0 + x.abs());
        let (lo, hi) = (x - h, x + h);
        if self.d_x(u, lo) > 0.0 && self.d_x(u, hi) < 0.0 {
            if let Ok(xr) = optimize::bisect(|t| Ok(self.d_x(u, t)), lo, hi, 1e-15 * (1.0 + x.abs())) {
                let vr = self.eval(u, xr);
                if vr >= v - 1e-15 * (1.0 + v.abs()) {
                    return Ok((vr.max(v), xr));
                }
            }
        }
        Ok((v, x))
    }
}

/// `Θ_{ν,q}(u, x)`.
pub fn theta(m: &Mixture, q: f64, u: f64, x: f64) -> Result<f64> {
    Ok(ThetaSurface::new(m, q)?.eval(u, x))
}

/// `Θ` at `q = 1` through the conditional-Gaussian split
/// `u²/ν + (x − ν'u/ν)²/(ν'' + ν' − ν'²/ν)`.
pub fn theta_conditional(m: &Mixture, u: f64, x: f64) -> Result<f64> {
    if m.is_pure() {
        return Err(GlassError::DegenerateCovariance(
            "pure mixture: use theta_pure".into(),
        ));
    }
    let (n0, n1, n2) = (m.nu(1.0), m.d1(1.0), m.d2(1.0));
    let cond = n2 + n1 - n1 * n1 / n0;
    let dx = x - n1 / n0 * u;
    Ok(0.5 + 0.5 * (n2 / n1).ln() - 0.5 * u * u / n0 - 0.5 * dx * dx / cond + omega(x / n2.sqrt()))
}

/// `Θ_p(u) = ½ + ½log(p−1) − u²/2 + Ω(u√(p/(p−1)))` for the pure p-spin
/// model, where the radial derivative is tied to the energy.
pub fn theta_pure(p: u32, u: f64) -> Result<f64> {
    if p < 2 {
        return Err(GlassError::Domain(format!("pure degree {p} must be >= 2")));
    }
    let pf = p as f64;
    Ok(0.5 + 0.5 * (pf - 1.0).ln() - 0.5 * u * u + omega(u * (pf / (pf - 1.0)).sqrt()))
}

/// `E∞(p) = 2√((p−1)/p)`.
pub fn e_infinity_pure(p: u32) -> f64 {
    let pf = p as f64;
    2.0 * ((pf - 1.0) / pf).sqrt()
}

/// `E∞(q)`, the threshold energy of `ν_q(x) = ν(q²x)`:
/// `(ν''ν + ν'² − ν'ν)/(ν'√ν'')` with all derivatives of `ν_q` at 1.
pub fn e_infinity(m: &Mixture, q: f64) -> f64 {
    let q2 = q * q;
    let n0 = m.nu(q2);
    let n1 = q2 * m.d1(q2);
    let n2 = q2 * q2 * m.d2(q2);
    (n2 * n0 + n1 * n1 - n1 * n0) / (n1 * n2.sqrt())
}

/// `sup_x Θ_{ν,q}(u, x)` and its argmax.
pub fn sup_theta_x(m: &Mixture, q: f64, u: f64) -> Result<(f64, f64)> {
    ThetaSurface::new(m, q)?.sup_x(u)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundStateSolution {
    pub q: f64,
    pub e0: f64,
    pub x0: f64,
    pub e_inf: f64,
    /// `sup_x Θ(−e0, x)`, zero up to solver tolerance.
    pub residual: f64,
}

/// Tolerance of the `E₀` root in energy units.
pub const E0_TOL: f64 = 1e-12;

/// `E₀(q)` and `x₀(q)` for a mixture whose rescaling `ν_q` is pure-like.
pub fn ground_state_solution(m: &Mixture, q: f64) -> Result<GroundStateSolution> {
    ground_state_near(m, q, None)
}

/// As [`ground_state_solution`], bracketing from a nearby estimate of `E₀`
/// when one is available.
pub fn ground_state_near(m: &Mixture, q: f64, guess: Option<f64>) -> Result<GroundStateSolution> {
    let surf = ThetaSurface::new(m, q)?;
    let e_inf = e_infinity(m, q);
    let sup_at = |e: f64| -> Result<f64> { Ok(surf.sup_x(-e)?.0) };
    let at_threshold = sup_at(e_inf)?;
    if at_threshold <= CRITICAL_BAND {
        return Err(GlassError::Precondition(format!(
            "rescaled mixture at q = {q} is not pure-like (sup Θ(-E∞) = {at_threshold:.3e})"
        )));
    }
    let mut lo = e_inf;
    let mut hi = match guess {
        Some(g) if g > e_inf => g,
        _ => 2.0 * e_inf.max(1e-3),
    };
    if let Some(g) = guess {
        let lower = g - 1e-3 * (1.0 + g.abs());
        if lower > e_inf && sup_at(lower)? > 0.0 {
            lo = lower;
        }
    }
    let mut step = hi - lo;
    let mut tries = 0;
    while sup_at(hi)? > 0.0 {
        lo = hi;
        step *= 2.0;
        hi += step.max(1e-3);
        tries += 1;
        if tries > 200 || !hi.is_finite() {
            return Err(GlassError::NumericFailure(
                "could not bracket E0 from above".into(),
            ));
        }
    }
    // d/dE sup_x Θ(−E, x) = −∂_uΘ at the argmax.
    let e0 = optimize::newton_bracketed(
        |e| {
            let (v, x) = surf.sup_x(-e)?;
            Ok((v, -surf.d_u(-e, x)))
        },
        lo,
        hi,
        E0_TOL,
    )?;
    let (residual, argmax) = surf.sup_x(-e0)?;
    Ok(GroundStateSolution {
        q,
        e0,
        x0: -argmax,
        e_inf,
        residual,
    })
}

/// `E₀(p)` for the pure p-spin model: the root of `Θ_p(−E) = 0` above
/// `E∞(p)`.
pub fn e0_pure(p: u32) -> Result<f64> {
    let e_inf = e_infinity_pure(p);
    if theta_pure(p, -e_inf)? <= 0.0 {
        return Ok(e_inf);
    }
    let mut hi = 2.0 * e_inf;
    while theta_pure(p, -hi)? > 0.0 {
        hi *= 2.0;
    }
    optimize::bisect(|e| theta_pure(p, -e), e_inf, hi, 1e-14)
}
