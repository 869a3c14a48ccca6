//! Mixtures `ν(x) = Σ_p γ_p² x^p` and their classification.
//!
//! A [`Mixture`] is a sparse list of `(p, γ_p²)` pairs with `p ≥ 2`. All the
//! landscape quantities of the crate are functions of a mixture and its first
//! four derivatives, so evaluation is exact polynomial arithmetic.

use std::fmt;
use std::str::FromStr;

use log::warn;

use crate::complexity;
use crate::error::{GlassError, Result};

/// Largest degree a mixture may carry.
pub const DEGREE_CAP: u32 = 64;

/// Tolerance on `|ν(1) − 1|` for a mixture flagged as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Band around zero inside which `sup_x Θ(−E∞, x)` is reported as critical.
pub const CRITICAL_BAND: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    /// `(p, γ_p²)` sorted by degree, zero coefficients dropped.
    terms: Vec<(u32, f64)>,
    max_degree: u32,
    normalized: bool,
}

impl Mixture {
    /// Builds a mixture from `(p, γ_p²)` pairs without rescaling.
    pub fn new<I: IntoIterator<Item = (u32, f64)>>(terms: I) -> Result<Self> {
        let mut collected: Vec<(u32, f64)> = Vec::new();
        for (p, c) in terms {
            if p < 2 {
                return Err(GlassError::InvalidMixture(format!(
                    "degree {p} is below 2"
                )));
            }
            if p > DEGREE_CAP {
                return Err(GlassError::InvalidMixture(format!(
                    "degree {p} exceeds the cap {DEGREE_CAP}"
                )));
            }
            if !c.is_finite() || c < 0.0 {
                return Err(GlassError::InvalidMixture(format!(
                    "coefficient for p={p} must be finite and nonnegative, got {c}"
                )));
            }
            if collected.iter().any(|&(q, _)| q == p) {
                return Err(GlassError::InvalidMixture(format!("duplicate degree {p}")));
            }
            collected.push((p, c));
        }
        collected.retain(|&(_, c)| c > 0.0);
        if collected.is_empty() {
            return Err(GlassError::InvalidMixture(
                "at least one coefficient must be positive".into(),
            ));
        }
        collected.sort_by_key(|&(p, _)| p);
        let max_degree = collected.last().map(|&(p, _)| p).unwrap_or(2);
        Ok(Mixture {
            terms: collected,
            max_degree,
            normalized: false,
        })
    }

    /// Builds a mixture and rescales it so that `ν(1) = 1`.
    pub fn normalized<I: IntoIterator<Item = (u32, f64)>>(terms: I) -> Result<Self> {
        Ok(Self::new(terms)?.normalize())
    }

    /// The pure mixture `x^p`.
    pub fn pure(p: u32) -> Result<Self> {
        let mut m = Self::new([(p, 1.0)])?;
        m.normalized = true;
        Ok(m)
    }

    /// Truncates an infinite mixture `Σ_p f(p) x^p` at `max_degree`.
    ///
    /// Logs a warning when the dropped tail (estimated over the next
    /// `3·max_degree` degrees) exceeds `1e-12·ν(1)`.
    pub fn from_series<F: Fn(u32) -> f64>(f: F, max_degree: u32, normalize: bool) -> Result<Self> {
        if max_degree < 2 || max_degree > DEGREE_CAP {
            return Err(GlassError::InvalidMixture(format!(
                "truncation degree {max_degree} outside [2, {DEGREE_CAP}]"
            )));
        }
        let m = Self::new((2..=max_degree).map(|p| (p, f(p))))?;
        let tail: f64 = (max_degree + 1..=4 * max_degree).map(|p| f(p).max(0.0)).sum();
        let head = m.nu(1.0);
        if tail > 1e-12 * head {
            warn!(
                "mixture truncated at degree {max_degree} drops a tail of {tail:.3e} (ν(1) = {head:.6})"
            );
        }
        Ok(if normalize { m.normalize() } else { m })
    }

    /// Returns a copy rescaled to `ν(1) = 1`.
    pub fn normalize(&self) -> Self {
        let total = self.nu(1.0);
        Mixture {
            terms: self.terms.iter().map(|&(p, c)| (p, c / total)).collect(),
            max_degree: self.max_degree,
            normalized: true,
        }
    }

    /// The rescaled mixture `ν_q(x) = ν(q²x) = Σ γ_p² q^{2p} x^p`.
    pub fn scaled(&self, q: f64) -> Self {
        let q2 = q * q;
        Mixture {
            terms: self
                .terms
                .iter()
                .map(|&(p, c)| (p, c * q2.powi(p as i32)))
                .collect(),
            max_degree: self.max_degree,
            normalized: (q - 1.0).abs() == 0.0 && self.normalized,
        }
    }

    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    /// `γ_p²`, zero when the degree is absent.
    pub fn coeff(&self, p: u32) -> f64 {
        self.terms
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, c)| c)
            .unwrap_or(0.0)
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_pure(&self) -> bool {
        self.terms.len() == 1
    }

    /// The degree of a pure mixture.
    pub fn pure_degree(&self) -> Option<u32> {
        if self.is_pure() {
            Some(self.terms[0].0)
        } else {
            None
        }
    }

    /// True when only even degrees are present, so that `H(−σ) = H(σ)`.
    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|&(p, _)| p % 2 == 0)
    }

    /// `ν^{(k)}(x)` for `k ≤ 4`.
    pub fn eval(&self, x: f64, k: usize) -> Result<f64> {
        if k > 4 {
            return Err(GlassError::UnsupportedOrder(k));
        }
        Ok(self.deriv(x, k))
    }

    /// Sparse Horner evaluation of the k-th derivative; `k ≤ 4` is the
    /// caller's responsibility.
    fn deriv(&self, x: f64, k: usize) -> f64 {
        let k = k as u32;
        let mut acc = 0.0;
        let mut prev: Option<u32> = None;
        for &(p, c) in self.terms.iter().rev() {
            if p < k {
                break;
            }
            let e = p - k;
            let ff = falling_factorial(p, k);
            if let Some(pe) = prev {
                acc *= x.powi((pe - e) as i32);
            }
            acc += c * ff;
            prev = Some(e);
        }
        match prev {
            Some(e) => acc * x.powi(e as i32),
            None => 0.0,
        }
    }

    pub fn nu(&self, x: f64) -> f64 {
        self.deriv(x, 0)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.deriv(x, 1)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.deriv(x, 2)
    }

    pub fn d3(&self, x: f64) -> f64 {
        self.deriv(x, 3)
    }

    pub fn d4(&self, x: f64) -> f64 {
        self.deriv(x, 4)
    }

    /// Serializes to the line-oriented mixture file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::from("# p gamma_p^2\n");
        out.push_str(if self.normalized {
            "normalize true\n"
        } else {
            "normalize false\n"
        });
        for &(p, c) in &self.terms {
            out.push_str(&format!("{p} {c:.17e}\n"));
        }
        out
    }
}

fn falling_factorial(p: u32, k: u32) -> f64 {
    (0..k).map(|i| (p - i) as f64).product()
}

impl fmt::Display for Mixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(p, c)| format!("{c}x^{p}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Parses the mixture file format.
///
/// Comment lines start with `#`; data lines are `p value`; an optional
/// `normalize true|false` directive requests rescaling to `ν(1) = 1`.
impl FromStr for Mixture {
    type Err = GlassError;

    fn from_str(text: &str) -> Result<Self> {
        let mut terms: Vec<(u32, f64)> = Vec::new();
        let mut normalize = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(GlassError::Parse {
                    line: line_no,
                    msg: format!("expected two fields, got {}", fields.len()),
                });
            }
            if fields[0] == "normalize" {
                normalize = match fields[1] {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(GlassError::Parse {
                            line: line_no,
                            msg: format!("normalize expects true|false, got {other}"),
                        })
                    }
                };
                continue;
            }
            let p: u32 = fields[0].parse().map_err(|_| GlassError::Parse {
                line: line_no,
                msg: format!("bad degree {:?}", fields[0]),
            })?;
            let c: f64 = fields[1].parse().map_err(|_| GlassError::Parse {
                line: line_no,
                msg: format!("bad coefficient {:?}", fields[1]),
            })?;
            if p < 2 {
                return Err(GlassError::Parse {
                    line: line_no,
                    msg: format!("degree {p} is below 2"),
                });
            }
            if !(c >= 0.0) || !c.is_finite() {
                return Err(GlassError::Parse {
                    line: line_no,
                    msg: format!("coefficient {c} is negative or not finite"),
                });
            }
            if terms.iter().any(|&(q, _)| q == p) {
                return Err(GlassError::Parse {
                    line: line_no,
                    msg: format!("duplicate degree {p}"),
                });
            }
            terms.push((p, c));
        }
        let mut m = Mixture::new(terms)?;
        if normalize {
            m = m.normalize();
        } else if (m.nu(1.0) - 1.0).abs() <= NORMALIZATION_TOL {
            m.normalized = true;
        }
        Ok(m)
    }
}

/// `Σ_p |γ_p²(a) − γ_p²(b)| p⁴`, the distance controlling the first four
/// derivatives on `[−1, 1]`.
pub fn norm_distance(a: &Mixture, b: &Mixture) -> f64 {
    let top = a.max_degree.max(b.max_degree);
    (2..=top)
        .map(|p| (a.coeff(p) - b.coeff(p)).abs() * (p as f64).powi(4))
        .sum()
}

/// `(1 − eps)·x^p + eps·x^partner`.
pub fn perturb_pure(p: u32, eps: f64, partner_degree: u32) -> Result<Mixture> {
    if p < 3 {
        return Err(GlassError::Domain(format!("base degree {p} must be ≥ 3")));
    }
    if partner_degree < 2 || partner_degree == p {
        return Err(GlassError::Domain(format!(
            "partner degree {partner_degree} must be ≥ 2 and differ from {p}"
        )));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(GlassError::Domain(format!("eps {eps} outside [0, 1)")));
    }
    let mut m = Mixture::new([(p, 1.0 - eps), (partner_degree, eps)])?;
    m.normalized = true;
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixtureKind {
    Pure,
    PureLike,
    Critical,
    Full,
}

impl MixtureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MixtureKind::Pure => "pure",
            MixtureKind::PureLike => "pure_like",
            MixtureKind::Critical => "critical",
            MixtureKind::Full => "full",
        }
    }
}

impl fmt::Display for MixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub kind: MixtureKind,
    /// The closed-form classifier evaluated at 1.
    pub g_literal: f64,
    /// `sup_x Θ_{ν,1}(−E∞, x)`.
    pub g_via_theta: f64,
    /// Whether the two values have the same sign.
    pub agree: bool,
}

/// `log(ν''/ν') − (ν''+ν')(ν''ν + ν'² − ν'ν)/(ν''ν'²)` at 1.
pub fn g_literal(m: &Mixture) -> f64 {
    let (n0, n1, n2) = (m.nu(1.0), m.d1(1.0), m.d2(1.0));
    (n2 / n1).ln() - (n2 + n1) * (n2 * n0 + n1 * n1 - n1 * n0) / (n2 * n1 * n1)
}

/// Classifies a mixture as pure, pure-like, critical or full.
///
/// The kind of a non-pure mixture follows the sign of `sup_x Θ(−E∞, x)`;
/// the closed-form value is reported alongside.
pub fn classify(m: &Mixture) -> Result<Classification> {
    let g_lit = g_literal(m);
    let (kind, g_theta) = match m.pure_degree() {
        Some(p) => {
            let e_inf = complexity::e_infinity_pure(p);
            (MixtureKind::Pure, complexity::theta_pure(p, -e_inf)?)
        }
        None => {
            let e_inf = complexity::e_infinity(m, 1.0);
            let (value, _) = complexity::sup_theta_x(m, 1.0, -e_inf)?;
            let kind = if value.abs() <= CRITICAL_BAND {
                MixtureKind::Critical
            } else if value > 0.0 {
                MixtureKind::PureLike
            } else {
                MixtureKind::Full
            };
            (kind, value)
        }
    };
    let agree = sign(g_lit) == sign(g_theta);
    Ok(Classification {
        kind,
        g_literal: g_lit,
        g_via_theta: g_theta,
        agree,
    })
}

fn sign(v: f64) -> i8 {
    if v.abs() <= CRITICAL_BAND {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}
