//! Calibrated constants, the smallness condition and the quadratic root `Λ`.

use serde::{Deserialize, Serialize};

use crate::besov::{besov_norm, lp_norm, BesovIndex, Exponent, TimeExponent};
use crate::error::{Error, Result};
use crate::spectral::{LittlewoodPaley, SpectralField};

const EPS_MATCH: f64 = 1e-12;

/// Constants attached to one value of `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsConstants {
    pub eps: f64,
    /// Constant of the existence bilinear estimate in `Z^{-1+ε}_{∞,∞}`.
    pub a_phi: f64,
    /// `‖u‖_{Y_{ε/2}(T)} ≤ Ã_ε T^{ε/4} ‖u‖_{Z^{-1+ε}_{∞,∞}(T)}`.
    pub a_tilde: f64,
    /// `‖S[f]‖_{Z^{-1+ε}_{∞,∞}(T)} ≤ H₀ ‖f‖_{Ḃ^{-1+ε}_{∞,∞}}`.
    pub heat_z: f64,
    /// `T^{ε/4} ‖S[f]‖_{Y_{ε/2}(T)} ≤ H₁ T^{1/2} ‖f‖_{L^∞}`.
    pub heat_y: f64,
    /// `C_φ = 4 A_φ H₀`.
    pub c_phi: f64,
    /// `C̃_{φ,ε} = 4 A_φ Ã_ε H₁ / ε`.
    pub c_tilde: f64,
    /// Corpus maxima the four measured entries were scaled from.
    pub observed: ObservedMaxima,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedMaxima {
    pub a_phi: f64,
    pub a_tilde: f64,
    pub heat_z: f64,
    pub heat_y: f64,
}

impl EpsConstants {
    /// Scales corpus maxima by `safety` and assembles `C_φ` and `C̃_{φ,ε}`.
    pub fn from_observed(eps: f64, observed: ObservedMaxima, safety: f64) -> Self {
        let a_phi = safety * observed.a_phi;
        let a_tilde = safety * observed.a_tilde;
        let heat_z = safety * observed.heat_z;
        let heat_y = safety * observed.heat_y;
        Self {
            eps,
            a_phi,
            a_tilde,
            heat_z,
            heat_y,
            c_phi: 4.0 * a_phi * heat_z,
            c_tilde: 4.0 * a_phi * a_tilde * heat_y / eps,
            observed,
        }
    }

    /// Prefactor of `T^{ε/2} ‖u‖_{Z^{-1+ε}_{∞,∞}}` in the `V⁰` norm.
    pub fn v0_factor(&self, horizon: f64) -> f64 {
        self.a_phi / (self.eps * (1.0 - self.eps)) * horizon.powf(self.eps / 2.0)
    }

    /// Prefactor of `‖u‖_{Y_{ε/2}}` in the `V¹` norm.
    pub fn v1_factor(&self, horizon: f64) -> f64 {
        self.a_phi * self.a_tilde / self.eps * horizon.powf(self.eps / 4.0)
    }
}

/// Constant of the uniqueness-class bilinear estimate for one `(α, ℓ, ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessConstant {
    pub alpha: TimeExponent,
    pub ell: Exponent,
    pub eps: f64,
    pub constant: f64,
    pub observed: f64,
}

/// Constant of the persistence bilinear estimate for one `(s, p, q, ε, λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceConstant {
    pub index: BesovIndex,
    pub eps: f64,
    pub lambda: f64,
    pub constant: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub dim: usize,
    pub size: usize,
    pub safety: f64,
    pub horizons: Vec<f64>,
    pub steps: usize,
    /// SHA-256 of the corpus specification and generated coefficients.
    pub corpus_digest: String,
    pub corpus: Vec<String>,
    pub eps: Vec<EpsConstants>,
    pub uniqueness: Vec<UniquenessConstant>,
    pub persistence: Vec<PersistenceConstant>,
}

impl CalibrationTable {
    pub fn for_eps(&self, eps: f64) -> Result<&EpsConstants> {
        self.eps
            .iter()
            .find(|c| (c.eps - eps).abs() <= EPS_MATCH)
            .ok_or_else(|| Error::MissingCalibration(format!("no constants for eps = {eps}; run calibrate with this eps")))
    }

    pub fn uniqueness_for(&self, alpha: TimeExponent, ell: Exponent, eps: f64) -> Option<&UniquenessConstant> {
        self.uniqueness.iter().find(|c| c.alpha == alpha && c.ell == ell && (c.eps - eps).abs() <= EPS_MATCH)
    }

    pub fn persistence_for(&self, index: BesovIndex, eps: f64, lambda: f64) -> Option<&PersistenceConstant> {
        self.persistence.iter().find(|c| {
            c.index.p == index.p
                && c.index.q == index.q
                && (c.index.s - index.s).abs() <= EPS_MATCH
                && (c.eps - eps).abs() <= EPS_MATCH
                && (c.lambda - lambda).abs() <= EPS_MATCH
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(text)?;
        let positive = table.eps.iter().all(|c| {
            [c.a_phi, c.a_tilde, c.heat_z, c.heat_y, c.c_phi, c.c_tilde].iter().all(|v| *v > 0.0 && v.is_finite())
        });
        if !positive {
            return Err(Error::MissingCalibration("table has a nonpositive entry".into()));
        }
        Ok(table)
    }
}

/// The two clauses of the smallness condition and the horizon they guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Smallness {
    pub horizon: f64,
    /// `C_φ/(ε(1−ε)) T^{ε/2} ‖f‖_{Ḃ^{-1+ε}_{∞,∞}}`.
    pub besov_clause: f64,
    /// `C̃_{φ,ε} T^{1/2} ‖f‖_{L^∞}`.
    pub linf_clause: f64,
    /// `ρ = min` of the clauses.
    pub rho: f64,
    pub holds: bool,
    /// `1 − ρ`.
    pub margin: f64,
    /// Supremum horizon of each clause; `∞` for `f = 0`.
    #[serde(with = "crate::io::json_f64")]
    pub besov_horizon: f64,
    #[serde(with = "crate::io::json_f64")]
    pub linf_horizon: f64,
    #[serde(with = "crate::io::json_f64")]
    pub guaranteed_t: f64,
}

/// `ρ(T, f)` and the guaranteed horizon from precomputed data norms.
pub fn smallness_from_norms(besov: f64, linf: f64, horizon: f64, c: &EpsConstants) -> Smallness {
    let eps = c.eps;
    let k1 = c.c_phi / (eps * (1.0 - eps));
    let besov_clause = k1 * horizon.powf(eps / 2.0) * besov;
    let linf_clause = c.c_tilde * horizon.sqrt() * linf;
    let rho = besov_clause.min(linf_clause);
    let besov_horizon = if besov > 0.0 { (1.0 / (k1 * besov)).powf(2.0 / eps) } else { f64::INFINITY };
    let linf_horizon = if linf > 0.0 { (1.0 / (c.c_tilde * linf)).powi(2) } else { f64::INFINITY };
    Smallness {
        horizon,
        besov_clause,
        linf_clause,
        rho,
        holds: rho < 1.0,
        margin: 1.0 - rho,
        besov_horizon,
        linf_horizon,
        guaranteed_t: besov_horizon.max(linf_horizon),
    }
}

/// `‖f‖_{Ḃ^{-1+ε}_{∞,∞}}` and `‖f‖_{L^∞}`.
pub fn data_norms(lp: &LittlewoodPaley, f: &SpectralField, eps: f64) -> Result<(f64, f64)> {
    let besov = besov_norm(lp, f, BesovIndex::sup(-1.0 + eps))?.value;
    Ok((besov, lp_norm(f, Exponent::INFINITY)))
}

pub fn smallness_condition(
    lp: &LittlewoodPaley,
    f: &SpectralField,
    horizon: f64,
    eps: f64,
    calib: &CalibrationTable,
) -> Result<Smallness> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsilonRange(eps));
    }
    let c = calib.for_eps(eps)?;
    let (besov, linf) = data_norms(lp, f, eps)?;
    Ok(smallness_from_norms(besov, linf, horizon, c))
}

/// Roots `Λ ≤ Γ` of `x = g₀ + x²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRoots {
    pub lambda: f64,
    pub gamma: f64,
}

pub fn lambda_root(g0: f64) -> Result<LambdaRoots> {
    if !(g0 >= 0.0) {
        return Err(Error::InvalidIndex(format!("g0 must be nonnegative, got {g0}")));
    }
    if g0 > 0.25 {
        return Err(Error::NoRealRoot(g0));
    }
    let disc = (1.0 - 4.0 * g0).sqrt();
    // Smaller root in the cancellation-free form 2g₀/(1 + √(1−4g₀)).
    Ok(LambdaRoots { lambda: 2.0 * g0 / (1.0 + disc), gamma: (1.0 + disc) / 2.0 })
}
