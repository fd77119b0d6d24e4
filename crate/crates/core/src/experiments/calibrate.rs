//! Empirical constants: corpus maxima of each estimate's left side over its
//! right-side structure, scaled by a safety factor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{corpus_digest, generate_all, CorpusSpec};
use crate::besov::{
    besov_norm, check_ale, lp_norm, x_norm, z_norm, BesovIndex, ConstantKind, Exponent, InequalityEntry, TimeExponent,
    TimeGrid, TimeSeriesField,
};
use crate::error::{Error, Result};
use crate::solver::picard::path_norms;
use crate::solver::{
    bilinear_ale, bilinear_b, check_lambda, heat_source, CalibrationTable, EpsConstants, ObservedMaxima,
    PersistenceConstant, UniquenessConstant,
};
use crate::spectral::{LittlewoodPaley, SpectralField};

pub const DEFAULT_SAFETY: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    pub eps: Vec<f64>,
    pub horizons: Vec<f64>,
    pub steps: usize,
    pub safety: f64,
    /// Extra persistence indices; `(−1+ε, ∞, ∞)` is always included.
    pub persistence: Vec<BesovIndex>,
    pub lambdas: Vec<f64>,
    /// Calibrate the uniqueness-class estimates for the default `(α, ℓ)` tuples.
    pub uniqueness: bool,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            eps: vec![0.25, 0.5, 0.75],
            horizons: vec![0.01, 0.1, 1.0],
            steps: 16,
            safety: DEFAULT_SAFETY,
            persistence: vec![BesovIndex::new(0.0, Exponent::TWO, Exponent::TWO)],
            lambdas: vec![0.5],
            uniqueness: true,
        }
    }
}

/// Admissible `(α, ℓ)` pairs probed for each `ε`: a subcritical and, for `ε < 1/2`,
/// a critical pair at `ℓ = 2n`, and `(∞, n)`.
pub fn default_class_tuples(dim: usize, eps: f64) -> Vec<(TimeExponent, Exponent)> {
    let ell_2n = Exponent::new(2.0 * dim as f64).expect("finite exponent");
    let ell_n = Exponent::new(dim as f64).expect("finite exponent");
    let top = eps.max(0.5);
    let sub = top + (1.0 - top) / 2.0;
    let mut out = Vec::new();
    if let Ok(alpha) = TimeExponent::finite(2.0 / (sub - eps)) {
        out.push((alpha, ell_2n));
    }
    if eps < 0.5 {
        if let Ok(alpha) = TimeExponent::finite(2.0 / (0.5 - eps)) {
            out.push((alpha, ell_2n));
        }
    }
    out.push((TimeExponent::INFINITY, ell_n));
    out.retain(|&(a, l)| check_ale(a, l, eps, dim).is_ok());
    out
}

/// Calibrated table plus the per-estimate ratio distributions behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub table: CalibrationTable,
    pub ratios: Vec<InequalityEntry>,
}

impl Calibration {
    pub fn entry(&self, name: &str, description: &str) -> Option<&InequalityEntry> {
        self.ratios.iter().find(|e| e.name == name && e.description == description)
    }
}

/// Heat flows of the corpus and the nonlinear outputs `B[S f_i, S f_i]` on one horizon.
struct HorizonSeries {
    horizon: f64,
    heat: Vec<TimeSeriesField>,
    nonlinear: Vec<TimeSeriesField>,
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

fn checked_ratio(lhs: f64, rhs: f64, what: &str) -> Result<f64> {
    if rhs > 0.0 && rhs.is_finite() {
        Ok(lhs / rhs)
    } else {
        Err(Error::DegenerateCorpus(format!("{what}: right side is {rhs}")))
    }
}

/// Pairs `(i, i+1)`; a one-element corpus pairs with itself.
fn neighbour_pairs(len: usize) -> Vec<(usize, usize)> {
    if len == 1 {
        vec![(0, 0)]
    } else {
        (0..len - 1).map(|i| (i, i + 1)).collect()
    }
}

pub fn calibrate_constants(specs: &[CorpusSpec], settings: &CalibrationSettings) -> Result<Calibration> {
    let (grid, sets) = generate_all(specs)?;
    let digest = corpus_digest(specs, &sets)?;
    let fields: Vec<SpectralField> = sets.into_iter().flatten().collect();
    if let Some(e) = settings.eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::EpsilonRange(*e));
    }
    if settings.eps.is_empty() || settings.horizons.is_empty() {
        return Err(Error::DegenerateCorpus("calibration needs at least one eps and one horizon".into()));
    }
    if !(settings.safety >= 1.0) {
        return Err(Error::InvalidIndex(format!("safety factor must be at least 1, got {}", settings.safety)));
    }
    let lp = LittlewoodPaley::standard(grid);
    let series = settings
        .horizons
        .iter()
        .map(|&horizon| {
            let time = TimeGrid::new(horizon, settings.steps)?;
            let heat = fields.par_iter().map(|f| heat_source(f, time)).collect::<Result<Vec<_>>>()?;
            let nonlinear = heat.par_iter().map(|u| bilinear_b(u, u)).collect::<Result<Vec<_>>>()?;
            Ok(HorizonSeries { horizon, heat, nonlinear })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ratios = Vec::new();
    let mut eps_constants = Vec::new();
    let mut uniqueness = Vec::new();
    let mut persistence = Vec::new();
    for &eps in &settings.eps {
        let observed = existence_ratios(&lp, &fields, &series, eps, &mut ratios)?;
        eps_constants.push(EpsConstants::from_observed(eps, observed, settings.safety));
        if settings.uniqueness {
            for (alpha, ell) in default_class_tuples(grid.dim(), eps) {
                let r = uniqueness_ratios(&lp, &series, alpha, ell, eps)?;
                let observed = max_of(&r);
                uniqueness.push(UniquenessConstant { alpha, ell, eps, constant: settings.safety * observed, observed });
                ratios.push(InequalityEntry::new(
                    "uniqueness_bilinear",
                    format!("alpha={alpha} ell={ell} eps={eps}"),
                    ConstantKind::Implicit,
                    r,
                ));
            }
        }
        let mut indices = vec![BesovIndex::sup(-1.0 + eps)];
        indices.extend(settings.persistence.iter().copied().filter(|i| *i != BesovIndex::sup(-1.0 + eps)));
        for index in indices {
            for &lambda in settings.lambdas.iter().filter(|l| check_lambda(**l, index.s, eps).is_ok()) {
                let r = persistence_ratios(&lp, &series, index, eps, lambda)?;
                let observed = max_of(&r);
                persistence.push(PersistenceConstant { index, eps, lambda, constant: settings.safety * observed, observed });
                ratios.push(InequalityEntry::new(
                    "persistence_bilinear",
                    format!("s={} p={} q={} eps={eps} lambda={lambda}", index.s, index.p, index.q),
                    ConstantKind::Implicit,
                    r,
                ));
            }
        }
    }
    let table = CalibrationTable {
        dim: grid.dim(),
        size: grid.size(),
        safety: settings.safety,
        horizons: settings.horizons.clone(),
        steps: settings.steps,
        corpus_digest: digest,
        corpus: specs.iter().map(|s| format!("{} x{} seed {}", s.data.kind, s.count, s.data.seed)).collect(),
        eps: eps_constants,
        uniqueness,
        persistence,
    };
    Ok(Calibration { table, ratios })
}

/// Heat-flow, embedding and existence-bilinear ratios for one `ε`.
fn existence_ratios(
    lp: &LittlewoodPaley,
    fields: &[SpectralField],
    series: &[HorizonSeries],
    eps: f64,
    out: &mut Vec<InequalityEntry>,
) -> Result<ObservedMaxima> {
    let data = fields
        .par_iter()
        .map(|f| Ok((besov_norm(lp, f, BesovIndex::sup(-1.0 + eps))?.value, lp_norm(f, Exponent::INFINITY))))
        .collect::<Result<Vec<_>>>()?;
    let (mut heat_z, mut heat_y, mut a_tilde, mut a_phi) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for hs in series {
        let t = hs.horizon;
        let heat = hs.heat.par_iter().map(|u| path_norms(lp, u, eps)).collect::<Result<Vec<_>>>()?;
        let nonlinear = hs.nonlinear.par_iter().map(|u| path_norms(lp, u, eps)).collect::<Result<Vec<_>>>()?;
        for (n, (besov, linf)) in heat.iter().zip(&data) {
            heat_z.push(checked_ratio(n.z, *besov, "heat flow in Z")?);
            heat_y.push(checked_ratio(t.powf(eps / 4.0) * n.y, t.sqrt() * linf, "heat flow in Y")?);
        }
        for n in heat.iter().chain(nonlinear.iter()) {
            a_tilde.push(checked_ratio(n.y, t.powf(eps / 4.0) * n.z, "Y by Z")?);
        }
        let structure = |a: &crate::solver::picard::PathNorms, b: &crate::solver::picard::PathNorms| {
            (a.y * b.y).min(t.powf(eps / 2.0) / (1.0 - eps) * a.z * b.z) / eps
        };
        let pairs = neighbour_pairs(hs.heat.len());
        let heat_pairs = pairs
            .par_iter()
            .map(|&(i, k)| {
                let lhs = path_norms(lp, &bilinear_b(&hs.heat[i], &hs.heat[k])?, eps)?.z;
                checked_ratio(lhs, structure(&heat[i], &heat[k]), "existence bilinear")
            })
            .collect::<Result<Vec<_>>>()?;
        let mixed_pairs = pairs
            .par_iter()
            .map(|&(i, k)| {
                let lhs = path_norms(lp, &bilinear_b(&hs.heat[i], &hs.nonlinear[k])?, eps)?.z;
                checked_ratio(lhs, structure(&heat[i], &nonlinear[k]), "existence bilinear")
            })
            .collect::<Result<Vec<_>>>()?;
        a_phi.extend(heat_pairs);
        a_phi.extend(mixed_pairs);
    }
    let observed = ObservedMaxima { a_phi: max_of(&a_phi), a_tilde: max_of(&a_tilde), heat_z: max_of(&heat_z), heat_y: max_of(&heat_y) };
    let d = format!("eps={eps}");
    out.push(InequalityEntry::new("heat_z", d.clone(), ConstantKind::Implicit, heat_z));
    out.push(InequalityEntry::new("heat_y", d.clone(), ConstantKind::Implicit, heat_y));
    out.push(InequalityEntry::new("y_by_z", d.clone(), ConstantKind::Implicit, a_tilde));
    out.push(InequalityEntry::new("existence_bilinear", d, ConstantKind::Implicit, a_phi));
    Ok(observed)
}

/// `‖B_{α,ℓ,ε}[u,v]‖_X / (T^{ε/2} ‖u‖_X ‖v‖_X)` over heat-flow pairs.
fn uniqueness_ratios(
    lp: &LittlewoodPaley,
    series: &[HorizonSeries],
    alpha: TimeExponent,
    ell: Exponent,
    eps: f64,
) -> Result<Vec<f64>> {
    let verdict = check_ale(alpha, ell, eps, lp.grid().dim())?;
    let mut out = Vec::new();
    for hs in series {
        let x = hs.heat.par_iter().map(|u| Ok(x_norm(lp, u, alpha, ell, eps)?.value)).collect::<Result<Vec<_>>>()?;
        let scale = hs.horizon.powf(eps / 2.0);
        let r = neighbour_pairs(hs.heat.len())
            .par_iter()
            .map(|&(i, k)| {
                let lhs = x_norm(lp, &bilinear_ale(lp, &verdict, &hs.heat[i], &hs.heat[k])?, alpha, ell, eps)?.value;
                checked_ratio(lhs, scale * x[i] * x[k], "uniqueness bilinear")
            })
            .collect::<Result<Vec<_>>>()?;
        out.extend(r);
    }
    Ok(out)
}

/// `(‖B[u,v]‖_{Z^s} + ‖B[v,u]‖_{Z^s}) / (T^{ε/2}(‖u‖_{Zε}‖v‖_{Z^s}
/// + ‖u‖_{Zε}^λ ‖u‖_{Z^s}^{1−λ} ‖v‖_{Zε}^{1−λ} ‖v‖_{Z^s}^λ))` over heat-flow pairs.
fn persistence_ratios(
    lp: &LittlewoodPaley,
    series: &[HorizonSeries],
    index: BesovIndex,
    eps: f64,
    lambda: f64,
) -> Result<Vec<f64>> {
    let inf = Exponent::INFINITY;
    let mut out = Vec::new();
    for hs in series {
        let norms = hs
            .heat
            .par_iter()
            .map(|u| Ok((z_norm(lp, u, -1.0 + eps, inf, inf)?.value, z_norm(lp, u, index.s, index.p, index.q)?.value)))
            .collect::<Result<Vec<_>>>()?;
        let scale = hs.horizon.powf(eps / 2.0);
        let r = neighbour_pairs(hs.heat.len())
            .par_iter()
            .map(|&(i, k)| {
                let zs = |w: &TimeSeriesField| Ok::<_, Error>(z_norm(lp, w, index.s, index.p, index.q)?.value);
                let lhs = zs(&bilinear_b(&hs.heat[i], &hs.heat[k])?)? + zs(&bilinear_b(&hs.heat[k], &hs.heat[i])?)?;
                let ((ze_u, zs_u), (ze_v, zs_v)) = (norms[i], norms[k]);
                let rhs = ze_u * zs_v
                    + ze_u.powf(lambda) * zs_u.powf(1.0 - lambda) * ze_v.powf(1.0 - lambda) * zs_v.powf(lambda);
                checked_ratio(lhs, scale * rhs, "persistence bilinear")
            })
            .collect::<Result<Vec<_>>>()?;
        out.extend(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::data::DataKind;

    fn quick() -> CalibrationSettings {
        CalibrationSettings { eps: vec![0.5], horizons: vec![0.1], steps: 8, uniqueness: false, ..Default::default() }
    }

    #[test]
    fn zero_corpus_is_rejected() {
        let mut spec = CorpusSpec::new(2, 2, 16, DataKind::RandomSmooth { decay: 1.0 }, 1);
        spec.data.amplitude = 0.0;
        assert!(matches!(calibrate_constants(&[spec], &quick()), Err(Error::DegenerateCorpus(_))));
    }

    #[test]
    fn doubling_the_corpus_leaves_ratios_unchanged() {
        let spec = CorpusSpec::new(3, 2, 16, DataKind::RandomSmooth { decay: 1.0 }, 4);
        let mut doubled = spec.clone();
        doubled.data.amplitude = 2.0;
        let a = calibrate_constants(&[spec], &quick()).unwrap();
        let b = calibrate_constants(&[doubled], &quick()).unwrap();
        for (x, y) in a.ratios.iter().zip(&b.ratios) {
            assert!((x.worst / y.worst - 1.0).abs() < 1e-10, "{} {}: {} vs {}", x.name, x.description, x.worst, y.worst);
        }
    }

    #[test]
    fn default_tuples_are_admissible() {
        for dim in [2, 3] {
            for eps in [0.25, 0.5, 0.75] {
                let t = default_class_tuples(dim, eps);
                assert!(t.len() >= 2, "n={dim} eps={eps}");
            }
        }
    }
}
