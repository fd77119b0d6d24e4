//! Seeded initial-data generators.
//!
//! Random content lives in a box `|k| ≤ max_wavenumber` fixed independently of
//! the grid, and modes are drawn in lexicographic box order, so one seed yields
//! the same field on every grid large enough to hold the box.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::besov::{lp_norm, Exponent};
use crate::error::{Error, Result};
use crate::spectral::{gradient, leray_project, CutoffPair, Grid, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataKind {
    /// `(cos x sin y, −sin x cos y)`; needs `n = 2`.
    TaylorGreen2d,
    /// Random content on the plateau of shell `shell`, where `Δ̇_shell` is the identity.
    SingleShell { shell: i32 },
    /// Shell plateaus with `2^{jσ}‖Δ̇_j f‖_{L^p}` equal to the amplitude on every populated shell.
    RandomBesov { sigma: f64, p: Exponent },
    /// `∇g` for a random scalar `g` with Besov profile `σ + 1` in `L^∞`.
    GradientField { sigma: f64 },
    /// Every box mode populated with Gaussian amplitude `∝ (1 + |k|²)^{-decay/2}`.
    RandomSmooth { decay: f64 },
}

impl DataKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TaylorGreen2d => "taylor_green_2d",
            Self::SingleShell { .. } => "single_shell",
            Self::RandomBesov { .. } => "random_besov",
            Self::GradientField { .. } => "gradient_field",
            Self::RandomSmooth { .. } => "random_smooth",
        }
    }
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a kind name with default parameters: shell 1, `σ = −1/2`, `p = ∞`, decay 2.
impl FromStr for DataKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor_green_2d" => Ok(Self::TaylorGreen2d),
            "single_shell" => Ok(Self::SingleShell { shell: 1 }),
            "random_besov" => Ok(Self::RandomBesov { sigma: -0.5, p: Exponent::INFINITY }),
            "gradient_field" => Ok(Self::GradientField { sigma: -0.5 }),
            "random_smooth" => Ok(Self::RandomSmooth { decay: 2.0 }),
            other => Err(Error::UnknownDataKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataParams {
    pub kind: DataKind,
    pub seed: u64,
    pub amplitude: f64,
    /// Radius of the content box.
    pub max_wavenumber: f64,
    pub divergence_free: bool,
    /// Component count; defaults to the dimension.
    pub components: Option<usize>,
}

impl DataParams {
    pub fn new(kind: DataKind, seed: u64) -> Self {
        Self { kind, seed, amplitude: 1.0, max_wavenumber: 6.0, divergence_free: false, components: None }
    }
}

/// Box frequencies `|k_i| ≤ K` in lexicographic order, one representative per `±k` pair.
fn half_box(dim: usize, radius: f64) -> Vec<[i64; 3]> {
    let k = radius.floor() as i64;
    let mut out = Vec::new();
    let range = |active: bool| if active { -k..=k } else { 0..=0 };
    for a in -k..=k {
        for b in range(dim >= 2) {
            for c in range(dim >= 3) {
                let v = [a, b, c];
                let first = v.iter().copied().find(|x| *x != 0);
                if first.is_some_and(|x| x > 0) && norm(v) <= radius {
                    out.push(v);
                }
            }
        }
    }
    out
}

fn norm(k: [i64; 3]) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}

fn check_box(grid: Grid, radius: f64) -> Result<()> {
    if radius >= grid.nyquist() as f64 {
        return Err(Error::InvalidGrid(format!(
            "content radius {radius} does not fit below the Nyquist frequency {} of N = {}",
            grid.nyquist(),
            grid.size()
        )));
    }
    Ok(())
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random field on the box modes accepted by `keep`, with weights `weight(|k|)`.
fn random_modes(
    grid: Grid,
    components: usize,
    radius: f64,
    rng: &mut ChaCha8Rng,
    keep: impl Fn(f64) -> bool,
    weight: impl Fn(f64) -> f64,
) -> SpectralField {
    let mut u = SpectralField::zeros(grid, components, true);
    for k in half_box(grid.dim(), radius) {
        let r = norm(k);
        if !keep(r) {
            continue;
        }
        for c in 0..components {
            let z = gaussian(rng) * weight(r);
            u.set_real_mode(c, &k[..grid.dim()], z);
        }
    }
    u
}

fn shell_plateau(j: i32) -> (f64, f64) {
    CutoffPair::shell_core(j)
}

fn project_if(u: SpectralField, divergence_free: bool) -> Result<SpectralField> {
    if divergence_free {
        leray_project(&u)
    } else {
        Ok(u)
    }
}

pub fn taylor_green_2d(grid: Grid) -> Result<SpectralField> {
    if grid.dim() != 2 {
        return Err(Error::InvalidGrid("Taylor-Green data needs n = 2".into()));
    }
    // cos x sin y has coefficient −i·sgn(k_y)/4 at (±1, ±1); −sin x cos y has i·sgn(k_x)/4.
    SpectralField::from_modes(grid, 2, true, |c, k| {
        if k[0].abs() != 1 || k[1].abs() != 1 {
            return Complex64::new(0.0, 0.0);
        }
        match c {
            0 => Complex64::new(0.0, -0.25 * k[1] as f64),
            _ => Complex64::new(0.0, 0.25 * k[0] as f64),
        }
    })
}

/// Shells whose plateau fits inside the box.
pub fn populated_shells(grid: Grid, radius: f64) -> Vec<i32> {
    (-1..=12)
        .filter(|&j| {
            let (lo, hi) = shell_plateau(j);
            hi <= radius && half_box(grid.dim(), radius).iter().any(|&k| (lo..=hi).contains(&norm(k)))
        })
        .collect()
}

pub fn make_initial_data(grid: Grid, params: &DataParams) -> Result<SpectralField> {
    let n = grid.dim();
    let components = params.components.unwrap_or(n);
    let radius = params.max_wavenumber;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    if params.divergence_free && components != n {
        return Err(Error::ComponentCount { expected: n, got: components });
    }
    let field = match params.kind {
        DataKind::TaylorGreen2d => taylor_green_2d(grid)?.scaled(params.amplitude),
        DataKind::SingleShell { shell } => {
            let (lo, hi) = shell_plateau(shell);
            check_box(grid, hi)?;
            let u = random_modes(grid, components, hi, &mut rng, |r| r >= lo && r <= hi, |_| 1.0);
            let u = project_if(u, params.divergence_free)?;
            if u.max_coeff() == 0.0 {
                return Err(Error::InvalidIndex(format!("shell {shell} plateau holds no lattice points")));
            }
            let scale = params.amplitude / lp_norm(&u, Exponent::INFINITY);
            u.scaled(scale)
        }
        DataKind::RandomBesov { sigma, p } => {
            check_box(grid, radius)?;
            let shells = populated_shells(grid, radius);
            if shells.is_empty() {
                return Err(Error::InvalidIndex(format!("no shell plateau fits in radius {radius}")));
            }
            let mut acc = SpectralField::zeros(grid, components, true);
            for j in shells {
                let (lo, hi) = shell_plateau(j);
                let piece = random_modes(grid, components, hi, &mut rng, |r| r >= lo && r <= hi, |_| 1.0);
                let piece = project_if(piece, params.divergence_free)?;
                let size = lp_norm(&piece, p);
                if size > 0.0 {
                    acc.axpy(params.amplitude * 2f64.powf(-(j as f64) * sigma) / size, &piece)?;
                }
            }
            acc
        }
        DataKind::GradientField { sigma } => {
            let scalar = DataParams {
                kind: DataKind::RandomBesov { sigma: sigma + 1.0, p: Exponent::INFINITY },
                components: Some(1),
                divergence_free: false,
                ..params.clone()
            };
            let g = make_initial_data(grid, &scalar)?;
            return gradient(&g);
        }
        DataKind::RandomSmooth { decay } => {
            check_box(grid, radius)?;
            let u = random_modes(grid, components, radius, &mut rng, |r| r > 0.0, |r| (1.0 + r * r).powf(-decay / 2.0));
            let u = project_if(u, params.divergence_free)?;
            let size = lp_norm(&u, Exponent::INFINITY);
            if size == 0.0 {
                return Err(Error::DegenerateCorpus("random_smooth produced a zero field".into()));
            }
            u.scaled(params.amplitude / size)
        }
    };
    Ok(field)
}
