//! The persistence recursion for `Z^s_{p,q}` along stored Picard iterates.
//!
//! With `u^{-1} = 0`:
//! `α_m = ‖u^m − u^{m-1}‖_{Z^s_{p,q}}`, `N_m = Σ_{k≤m} α_k`,
//! `β_m = sup_{k≤m} T^{ε/2}‖u^k‖_{Z^{-1+ε}_{∞,∞}}`, `γ_m = T^{ε/2}‖u^m − u^{m-1}‖_{Z^{-1+ε}_{∞,∞}}`,
//! and the recursion `α_{m+1} ≤ ½α_m + Kγ_m N_m (1 + β_∞^{1/λ−1})`.

use serde::{Deserialize, Serialize};

use super::calibration::CalibrationTable;
use crate::besov::{z_norm, BesovIndex, Exponent, TimeSeriesField};
use crate::error::{Error, Result};
use crate::spectral::LittlewoodPaley;

/// Trailing increments `α_m ≤ PLATEAU_TOLERANCE · N_m` count as a plateau.
pub const PLATEAU_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceTrace {
    pub index: BesovIndex,
    pub eps: f64,
    pub lambda: f64,
    pub alpha: Vec<f64>,
    pub n: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Smallest `K` for which every step of the recursion holds.
    pub k_required: f64,
    /// `K` derived from the calibrated persistence estimate, when available.
    pub k_calibrated: Option<f64>,
    /// Every step satisfies the recursion with `k_calibrated`.
    pub bound_holds: Option<bool>,
    pub n_monotone: bool,
    pub n_plateaus: bool,
    /// `‖u‖_{Z^s_{p,q}}` of the last iterate.
    pub limit_norm: f64,
}

/// `λ ∈ (0,1)` with `λ(s + 1 − ε) < 1 − ε`.
pub fn check_lambda(lambda: f64, s: f64, eps: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 && lambda * (s + 1.0 - eps) < 1.0 - eps {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda))
    }
}

/// `K = max(C', λη^{-1/λ} C'^{1/λ})` with `C' = 2C` and `η = (2(1−λ))^{λ−1}`,
/// from Young's inequality applied to the two-term persistence estimate.
pub fn recursion_constant(persistence_constant: f64, lambda: f64) -> f64 {
    let c = 2.0 * persistence_constant;
    let eta = (2.0 * (1.0 - lambda)).powf(lambda - 1.0);
    c.max(lambda * eta.powf(-1.0 / lambda) * c.powf(1.0 / lambda))
}

pub fn persistence_check(
    lp: &LittlewoodPaley,
    iterates: &[TimeSeriesField],
    index: BesovIndex,
    eps: f64,
    lambda: f64,
    calib: Option<&CalibrationTable>,
) -> Result<PersistenceTrace> {
    check_lambda(lambda, index.s, eps)?;
    let first = iterates.first().ok_or_else(|| Error::IncompleteRecord("no stored iterates".into()))?;
    let scale = first.time().horizon().powf(eps / 2.0);
    let inf = Exponent::INFINITY;
    let (mut alpha, mut n, mut beta, mut gamma) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut prev: Option<&TimeSeriesField> = None;
    for u in iterates {
        let d = match prev {
            Some(p) => u.sub(p)?,
            None => u.clone(),
        };
        alpha.push(z_norm(lp, &d, index.s, index.p, index.q)?.value);
        n.push(n.last().copied().unwrap_or(0.0) + alpha.last().unwrap());
        gamma.push(scale * z_norm(lp, &d, -1.0 + eps, inf, inf)?.value);
        let own = scale * z_norm(lp, u, -1.0 + eps, inf, inf)?.value;
        beta.push(beta.last().copied().unwrap_or(0.0f64).max(own));
        prev = Some(u);
    }
    let beta_inf = *beta.last().unwrap();
    let growth = 1.0 + beta_inf.powf(1.0 / lambda - 1.0);
    let mut k_required = 0.0f64;
    for m in 0..alpha.len() - 1 {
        let excess = alpha[m + 1] - 0.5 * alpha[m];
        if excess > 0.0 {
            let denom = gamma[m] * n[m] * growth;
            k_required = k_required.max(if denom > 0.0 { excess / denom } else { f64::INFINITY });
        }
    }
    let k_calibrated = calib
        .and_then(|c| c.persistence_for(index, eps, lambda))
        .map(|c| recursion_constant(c.constant, lambda));
    let bound_holds = k_calibrated.map(|k| k_required <= k);
    let last = *n.last().unwrap();
    let n_plateaus = alpha.len() < 2 || *alpha.last().unwrap() <= PLATEAU_TOLERANCE * last.max(f64::MIN_POSITIVE);
    Ok(PersistenceTrace {
        index,
        eps,
        lambda,
        n_monotone: n.windows(2).all(|w| w[1] >= w[0]),
        n_plateaus,
        limit_norm: z_norm(lp, iterates.last().unwrap(), index.s, index.p, index.q)?.value,
        alpha,
        n,
        beta,
        gamma,
        k_required,
        k_calibrated,
        bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_admissibility() {
        assert!(check_lambda(0.5, 0.0, 0.5).is_ok());
        // λ(s + 1 − ε) = 0.9·1.5 ≥ 0.5
        assert!(check_lambda(0.9, 1.0, 0.5).is_err());
        assert!(check_lambda(1.0, -0.9, 0.5).is_err());
    }

    #[test]
    fn recursion_constant_dominates_both_terms() {
        for (c, l) in [(0.1, 0.3), (2.0, 0.5), (10.0, 0.9)] {
            let k = recursion_constant(c, l);
            assert!(k >= 2.0 * c);
        }
    }
}
