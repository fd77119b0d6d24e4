//! Path-space norms `X^α_{ℓ,ε}`, `Y_{ε/2}` and `Z^s_{p,q}`, and the admissibility
//! test for `(α, ℓ, ε)`. Intersection norms are the max of their constituents.

use serde::{Deserialize, Serialize};

use super::index::{Exponent, TimeExponent};
use super::norms::{NormIndex, NormReport};
use super::time::{lebesgue_time_norm, time_norm, ShellNormTable, TimeSeriesField};
use crate::error::{Error, Result};
use crate::spectral::LittlewoodPaley;

const CRITICAL_TOLERANCE: f64 = 1e-12;

/// Accepted `(α, ℓ, ε)` with the derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AleVerdict {
    pub alpha: TimeExponent,
    pub ell: Exponent,
    pub eps: f64,
    /// `s_ℓ = −1 + n/ℓ`.
    pub s_ell: f64,
    /// `s_ℓ + ε + 2/α`; zero in the critical case.
    pub x_regularity: f64,
    pub critical: bool,
    /// `p_{α,ε} = n (1 − ε − 2/α)^{-1}`, infinite when `ε + 2/α = 1`.
    pub p_alpha_eps: f64,
    /// The bilinear operator uses the blockwise Bony form iff `ℓ < p_{α,ε}`.
    pub uses_btilde: bool,
}

fn s_index(n: usize, ell: Exponent) -> f64 {
    -1.0 + n as f64 * ell.reciprocal()
}

/// Checks the admissibility conditions on `(α, ℓ, ε)` in dimension `n`.
pub fn check_ale(alpha: TimeExponent, ell: Exponent, eps: f64, n: usize) -> Result<AleVerdict> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::EpsilonRange(eps));
    }
    let a = eps + 2.0 * alpha.reciprocal();
    let s_ell = s_index(n, ell);
    let s_2 = s_index(n, Exponent::TWO);
    let x_regularity = s_ell + a;
    let critical = x_regularity.abs() <= CRITICAL_TOLERANCE;
    if critical {
        if a < -s_2 - CRITICAL_TOLERANCE || a > 1.0 + CRITICAL_TOLERANCE {
            return Err(Error::AleViolation(format!(
                "critical case needs -s_2 <= eps + 2/alpha <= 1, got eps + 2/alpha = {a} with s_2 = {s_2}"
            )));
        }
    } else if x_regularity > 0.0 {
        if !(a > -s_2 && a < 1.0) {
            return Err(Error::AleViolation(format!(
                "subcritical case needs -s_2 < eps + 2/alpha < 1, got eps + 2/alpha = {a} with s_2 = {s_2}"
            )));
        }
    } else {
        return Err(Error::AleViolation(format!(
            "s_l + eps + 2/alpha = {x_regularity} is negative"
        )));
    }
    let p_alpha_eps = if a >= 1.0 { f64::INFINITY } else { n as f64 / (1.0 - a) };
    Ok(AleVerdict {
        alpha,
        ell,
        eps,
        s_ell,
        x_regularity: if critical { 0.0 } else { x_regularity },
        critical,
        p_alpha_eps,
        uses_btilde: !critical,
    })
}

/// `‖u‖_{X^α_{ℓ,ε}(T)}`: `L^α_T L^ℓ` in the critical case, else `L̃^α_T Ḃ^{s_ℓ+ε+2/α}_{ℓ,∞}`.
pub fn x_norm(lp: &LittlewoodPaley, ts: &TimeSeriesField, alpha: TimeExponent, ell: Exponent, eps: f64) -> Result<NormReport> {
    let verdict = check_ale(alpha, ell, eps, ts.grid().dim())?;
    let mut report = if verdict.critical {
        lebesgue_time_norm(ts, alpha, ell)
    } else {
        ShellNormTable::new(lp, ts, ell)?.chemin_lerner(alpha, verdict.x_regularity, Exponent::INFINITY)
    };
    report.norm_kind = "x".into();
    report.index = NormIndex { alpha: Some(alpha), ell: Some(ell), eps: Some(eps), s: Some(verdict.x_regularity), ..NormIndex::default() };
    Ok(report)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::EpsilonRange(eps))
    }
}

/// `Y_{ε/2}` from a `p = ∞` shell table and per-node `L^∞` norms.
pub fn y_from_table(table: &ShellNormTable, linf: &[f64], eps: f64) -> Result<NormReport> {
    check_eps(eps)?;
    debug_assert!(table.p.is_infinite());
    let cl = table.chemin_lerner(TimeExponent::finite(4.0 / (2.0 + eps))?, eps, Exponent::INFINITY);
    let alpha = TimeExponent::finite(4.0 / (2.0 - eps))?;
    let per_time = table.time.nodes().into_iter().zip(linf.iter().copied()).collect();
    let index = NormIndex { p: Some(Exponent::INFINITY), alpha: Some(alpha), ..NormIndex::default() };
    let leb = NormReport::from_times("lebesgue_time", index, alpha, table.time.horizon(), per_time);
    debug_assert!((leb.value - time_norm(linf, table.time.horizon(), alpha)).abs() <= 1e-12 * leb.value.max(1.0));
    Ok(NormReport::max_of("y", NormIndex { eps: Some(eps), ..NormIndex::default() }, vec![cl, leb]))
}

/// `‖u‖_{Y_{ε/2}(T)} = max(‖u‖_{L̃^{4/(2+ε)}_T Ḃ^ε_{∞,∞}}, ‖u‖_{L^{4/(2−ε)}_T L^∞})`.
pub fn y_norm(lp: &LittlewoodPaley, ts: &TimeSeriesField, eps: f64) -> Result<NormReport> {
    check_eps(eps)?;
    let table = ShellNormTable::new(lp, ts, Exponent::INFINITY)?;
    let linf = super::time::lp_series(ts, Exponent::INFINITY);
    y_from_table(&table, &linf, eps)
}

/// `Z^s_{p,q}` from a shell table with spatial exponent `p`.
pub fn z_from_table(table: &ShellNormTable, s: f64, q: Exponent) -> Result<NormReport> {
    if !(s > -1.0) {
        return Err(Error::InvalidIndex(format!("Z norm needs s > -1, got {s}")));
    }
    let smooth = table.chemin_lerner(TimeExponent::finite(1.0)?, s + 2.0, q);
    let sup = table.chemin_lerner(TimeExponent::SupBar, s, q);
    let index = NormIndex { s: Some(s), p: Some(table.p), q: Some(q), ..NormIndex::default() };
    Ok(NormReport::max_of("z", index, vec![smooth, sup]))
}

/// `‖u‖_{Z^s_{p,q}(T)} = max(‖u‖_{L̃^1_T Ḃ^{s+2}_{p,q}}, ‖u‖_{L̃^∞̄_T Ḃ^s_{p,q}})`.
pub fn z_norm(lp: &LittlewoodPaley, ts: &TimeSeriesField, s: f64, p: Exponent, q: Exponent) -> Result<NormReport> {
    let table = ShellNormTable::new(lp, ts, p)?;
    z_from_table(&table, s, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_alpha_eps_arithmetic() {
        let v = check_ale(TimeExponent::INFINITY, Exponent::new(4.5).unwrap(), 1.0 / 3.0, 3).unwrap();
        assert!((v.p_alpha_eps - 4.5).abs() < 1e-12);
        assert!(v.critical);
        assert!(!v.uses_btilde);
    }

    #[test]
    fn linf_critical_case() {
        for alpha in [3.0, 4.0, 10.0] {
            let eps = 1.0 - 2.0 / alpha;
            let v = check_ale(TimeExponent::finite(alpha).unwrap(), Exponent::INFINITY, eps, 3).unwrap();
            assert!(v.critical);
            assert!(v.p_alpha_eps.is_infinite());
        }
    }

    #[test]
    fn rejects_negative_regularity_and_bad_eps() {
        // n = 3, ℓ = 2: s_2 = 1/2, and ε + 2/α must stay below 1.
        assert!(check_ale(TimeExponent::finite(2.0).unwrap(), Exponent::TWO, 0.5, 3).is_err());
        assert!(matches!(check_ale(TimeExponent::INFINITY, Exponent::TWO, 1.5, 3), Err(Error::EpsilonRange(_))));
        // s_ℓ + ε + 2/α < 0: ℓ = ∞, α = ∞, ε = 0.5 gives −0.5.
        assert!(check_ale(TimeExponent::INFINITY, Exponent::INFINITY, 0.5, 3).is_err());
    }
}
