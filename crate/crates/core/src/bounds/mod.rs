//! Closed-form calculators: the dimensional threshold `δ(d)`, the `p₊`/`q₊`
//! lower bounds, `σ` and `Φ`, the Hölder-exponent constant `c(α,d,ε)` and the
//! complex interpolation family.

mod family;

pub use family::{build_family, family_matrix, InterpolationFamily};

use std::fmt;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::optimize::{bisect, bisect_newton};

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_infinite(self) -> bool {
        matches!(self, Self::PosInfinity)
    }

    /// `f64::INFINITY` for `+∞`.
    pub fn to_f64(self) -> f64 {
        match self {
            Self::Finite(x) => x,
            Self::PosInfinity => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(x) => Some(x),
            Self::PosInfinity => None,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x:.11e}"),
            Self::PosInfinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(x) => s.serialize_f64(*x),
            Self::PosInfinity => s.serialize_str("inf"),
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 3 {
        return Err(invalid("d", format!("dimension must be >= 3, got {d}")));
    }
    Ok(())
}

fn check_dist(dist: f64) -> Result<()> {
    if !(0.0..1.0).contains(&dist) {
        return Err(invalid("dist", format!("must lie in [0, 1), got {dist}")));
    }
    Ok(())
}

/// `δ(d) = (1 + (d−2)²/(d−1))^{−1/2}`.
pub fn delta(d: usize) -> Result<f64> {
    check_dim(d)?;
    let d = d as f64;
    Ok((1.0 + (d - 2.0).powi(2) / (d - 1.0)).sqrt().recip())
}

/// Ellipticity ratio `ρ` at which a Hermitian field has `dist = δ(d)`.
pub fn rho_for_delta(d: usize) -> Result<f64> {
    let delta = delta(d)?;
    Ok((1.0 - delta) / (1.0 + delta))
}

/// `2* = 2d/(d−2)`.
pub fn sobolev_conjugate(d: usize) -> Result<f64> {
    check_dim(d)?;
    Ok(2.0 * d as f64 / (d as f64 - 2.0))
}

/// Lower bound for `p₊(L)`: `+∞` when `dist ≤ δ(d)`, otherwise
/// `2*/(1 − ln dist / ln δ(d))`.
pub fn p_plus_lower(dist: f64, d: usize) -> Result<ExtendedReal> {
    check_dist(dist)?;
    let delta = delta(d)?;
    if dist <= delta {
        return Ok(ExtendedReal::PosInfinity);
    }
    let denom = 1.0 - dist.ln() / delta.ln();
    Ok(ExtendedReal::Finite(sobolev_conjugate(d)? / denom))
}

fn sigma_equation(s: f64) -> f64 {
    (2.0 * s - 2.0).ln() - s * (s - 2.0) / (2.0 * (s - 1.0))
}

fn sigma_equation_derivative(s: f64) -> f64 {
    1.0 / (s - 1.0) - (s * s - 2.0 * s + 2.0) / (2.0 * (s - 1.0).powi(2))
}

/// Residual of `ln(2σ−2) = σ(σ−2)/(2(σ−1))`.
pub fn sigma_residual(s: f64) -> f64 {
    sigma_equation(s)
}

/// Unique root of `ln(2σ−2) = σ(σ−2)/(2(σ−1))`, `σ ≈ 5.69061`.
pub fn sigma() -> f64 {
    static SIGMA: OnceLock<f64> = OnceLock::new();
    *SIGMA.get_or_init(|| {
        bisect_newton(sigma_equation, sigma_equation_derivative, 2.01, 20.0, 1e-6)
            .expect("sigma equation changes sign on [2.01, 20]")
    })
}

/// `Φ(p)`, a continuous bijection `[2, ∞) → [1, ∞)` majorizing the Riesz constant.
pub fn phi(p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(invalid("p", format!("must be >= 2, got {p}")));
    }
    let s = sigma();
    Ok(if p <= s {
        (s * s / (s - 1.0) * (0.5 - 1.0 / p)).exp()
    } else {
        2.0 * (p - 1.0)
    })
}

/// The `p ≥ 2` with `Φ(p) = y`.
pub fn phi_inverse(y: f64) -> Result<f64> {
    if !(y >= 1.0) {
        return Err(invalid("y", format!("must be >= 1, got {y}")));
    }
    let s = sigma();
    Ok(if y <= 2.0 * (s - 1.0) {
        2.0 / (1.0 - 2.0 * (s - 1.0) * y.ln() / (s * s))
    } else {
        y / 2.0 + 1.0
    })
}

/// Branch point `1/(4(σ−1)²)` of [`q_plus_lower`].
pub fn q_plus_branch_point() -> f64 {
    let s = sigma();
    1.0 / (4.0 * (s - 1.0).powi(2))
}

/// Lower bound for `q₊(L)`; equals `Φ⁻¹(1/√dist)`.
pub fn q_plus_lower(dist: f64) -> Result<f64> {
    if !(dist > 0.0 && dist < 1.0) {
        return Err(invalid("dist", format!("must lie in (0, 1), got {dist}")));
    }
    let s = sigma();
    Ok(if dist >= q_plus_branch_point() {
        2.0 / (1.0 + (s - 1.0) / (s * s) * dist.ln())
    } else {
        1.0 / (2.0 * dist.sqrt()) + 1.0
    })
}

/// `c(α,d,ε) = (1 + α(d−2)/(d−1) + ε)^{1/2} / (1 − α(α−(d−2))/(2(d−1)) − ε)`.
pub fn koshelev_constant(alpha: f64, d: usize, eps: f64) -> Result<f64> {
    check_dim(d)?;
    let dm = d as f64;
    if !(alpha > dm - 2.0) {
        return Err(invalid("alpha", format!("must exceed d-2 = {}, got {alpha}", dm - 2.0)));
    }
    if !(eps > 0.0) {
        return Err(invalid("eps", format!("must be > 0, got {eps}")));
    }
    let denom = 1.0 - alpha * (alpha - (dm - 2.0)) / (2.0 * (dm - 1.0)) - eps;
    if !(denom > 0.0) {
        return Err(invalid(
            "alpha",
            format!("(alpha, eps) = ({alpha}, {eps}) leaves the admissible window (denominator {denom:e})"),
        ));
    }
    Ok((1.0 + alpha * (dm - 2.0) / (dm - 1.0) + eps).sqrt() / denom)
}

pub const HOLDER_EPS: f64 = 1e-3;
pub const HOLDER_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    pub eps: f64,
    pub c_alpha: f64,
    pub mu: f64,
    pub margin: f64,
}

/// Largest `α ∈ (d−2, d]` with `dist·c(α,d,ε) ≤ 1 − margin` at `ε = 10⁻³`.
pub fn choose_alpha(d: usize, dist: f64, margin: f64) -> Result<HolderEstimate> {
    check_dist(dist)?;
    let delta = delta(d)?;
    if dist >= delta {
        return Err(invalid("dist", format!("{dist} >= delta({d}) = {delta}: absorption impossible")));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(invalid("margin", format!("must lie in (0, 1), got {margin}")));
    }
    let eps = HOLDER_EPS;
    let dm = d as f64;
    let lo = dm - 2.0;
    // positive root of the denominator, pulled slightly inside
    let b = dm - 2.0;
    let window = 0.5 * (b + (b * b + 8.0 * (dm - 1.0) * (1.0 - eps)).sqrt());
    let hi = (window - 1e-9 * window).min(dm);
    let excess = |a: f64| match koshelev_constant(a, d, eps) {
        Ok(c) => dist * c - (1.0 - margin),
        Err(_) => f64::INFINITY,
    };
    let floor = lo + 1e-14 * lo.max(1.0);
    if excess(floor) > 0.0 {
        return Err(invalid(
            "dist",
            format!("{dist} is too close to delta({d}) = {delta} for margin {margin} at eps = {eps}"),
        ));
    }
    let alpha = if excess(hi) <= 0.0 {
        hi
    } else {
        let root = bisect(excess, floor, hi, 1e-14).ok_or_else(|| Error::NoBracket("choose_alpha".into()))?;
        // stay on the feasible side
        if excess(root) > 0.0 {
            root - 1e-14
        } else {
            root
        }
    };
    let c_alpha = koshelev_constant(alpha, d, eps)?;
    Ok(HolderEstimate {
        alpha,
        eps,
        c_alpha,
        mu: (alpha - dm + 2.0) / 2.0,
        margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `dist < δ(d)`
    Subcritical,
    /// `dist ≥ δ(d)`
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub d: usize,
    pub dist: f64,
    pub delta_d: f64,
    pub sobolev_conjugate: f64,
    pub regime: Regime,
    pub p_plus_lower: ExtendedReal,
    /// `+∞` only for `dist = 0`.
    pub q_plus_lower: ExtendedReal,
    pub sigma: f64,
}

pub fn certificate(d: usize, dist: f64) -> Result<BoundCertificate> {
    check_dist(dist)?;
    let delta_d = delta(d)?;
    let q = if dist == 0.0 {
        ExtendedReal::PosInfinity
    } else {
        ExtendedReal::Finite(q_plus_lower(dist)?)
    };
    Ok(BoundCertificate {
        d,
        dist,
        delta_d,
        sobolev_conjugate: sobolev_conjugate(d)?,
        regime: if dist < delta_d {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        },
        p_plus_lower: p_plus_lower(dist, d)?,
        q_plus_lower: q,
        sigma: sigma(),
    })
}
