use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use besov_core::besov::{besov_norm, chemin_lerner_norm, lp_norm, BesovIndex, Exponent, TimeExponent, TimeGrid, TimeSeriesField};
use besov_core::experiments::{make_initial_data, DataKind, DataParams};
use besov_core::io::{decode_snapshot, encode_snapshot};
use besov_core::paraproduct::{energy_outside_annulus, paraproduct_summands};
use besov_core::solver::{duhamel, lambda_root, smallness_from_norms, EpsConstants, ObservedMaxima};
use besov_core::spectral::{bernstein_ratio, heat_flow, pdiv, CutoffPair, Grid, LittlewoodPaley, SpectralField};

fn field(dim: usize, size: usize, seed: u64, components: usize, radius: f64) -> SpectralField {
    let mut p = DataParams::new(DataKind::RandomBesov { sigma: -0.5, p: Exponent::INFINITY }, seed);
    p.components = Some(components);
    p.max_wavenumber = radius;
    make_initial_data(Grid::new(dim, size).unwrap(), &p).unwrap()
}

fn smooth(size: usize, seed: u64, components: usize, radius: f64) -> SpectralField {
    let mut p = DataParams::new(DataKind::RandomSmooth { decay: 1.0 }, seed);
    p.components = Some(components);
    p.max_wavenumber = radius;
    make_initial_data(Grid::new(2, size).unwrap(), &p).unwrap()
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm().max(1e-300)
}

fn grid_case() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2usize, 16usize)), Just((2, 32)), Just((3, 8)), Just((3, 16))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_of_unity_at_grid_frequencies((dim, size) in grid_case()) {
        let grid = Grid::new(dim, size).unwrap();
        let pair = CutoffPair::default();
        for r in grid.wavenumbers().into_iter().filter(|r| *r > 0.0) {
            let sum: f64 = (-20..=20).map(|j| pair.phi(r / 2f64.powi(j))).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12, "r = {r}: {sum}");
        }
    }

    #[test]
    fn blocks_reconstruct_the_field((dim, size) in grid_case(), seed in 0u64..10_000) {
        let u = field(dim, size, seed, dim, (size / 2 - 1) as f64);
        let lp = LittlewoodPaley::standard(u.grid());
        let mut sum = SpectralField::zeros(u.grid(), dim, true);
        for (_, b) in lp.blocks(&u).unwrap() {
            sum.axpy(1.0, &b).unwrap();
        }
        prop_assert!(rel(&sum, &u) < 1e-10);
    }

    #[test]
    fn distant_blocks_are_orthogonal(seed in 0u64..10_000) {
        let u = field(2, 64, seed, 1, 31.0);
        let lp = LittlewoodPaley::standard(u.grid());
        let shells: Vec<i32> = lp.range().iter().collect();
        for &j in &shells {
            let bj = lp.block(&u, j).unwrap();
            for &k in shells.iter().filter(|k| (**k - j).abs() >= 2) {
                prop_assert_eq!(lp.block(&bj, k).unwrap().max_coeff(), 0.0);
            }
        }
    }

    #[test]
    fn heat_flow_is_a_semigroup(seed in 0u64..10_000, s in 0.0f64..0.5, t in 0.0f64..0.5) {
        let u = field(2, 32, seed, 2, 15.0);
        let twice = heat_flow(&heat_flow(&u, s).unwrap(), t).unwrap();
        prop_assert!(rel(&twice, &heat_flow(&u, s + t).unwrap()) < 1e-12);
    }

    #[test]
    fn pdiv_output_is_divergence_free((dim, size) in grid_case(), seed in 0u64..10_000) {
        let w = field(dim, size, seed, dim * dim, (size / 2 - 1) as f64);
        prop_assert!(pdiv(&w).unwrap().relative_divergence().unwrap() < 1e-12);
    }

    #[test]
    fn l2_bernstein_ratio_stays_in_the_annulus(seed in 0u64..10_000) {
        let u = field(2, 64, seed, 1, 31.0);
        let lp = LittlewoodPaley::standard(u.grid());
        for j in lp.range().iter() {
            if lp.block(&u, j).unwrap().l2_norm() == 0.0 {
                continue;
            }
            let r = bernstein_ratio(&lp, &u, j, Exponent::TWO, Exponent::TWO, 1).unwrap();
            prop_assert!((0.75 - 1e-12..=8.0 / 3.0 + 1e-12).contains(&r), "j = {j}: {r}");
        }
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(seed in 0u64..10_000, a in -3.0f64..3.0, s in -1.0f64..1.0) {
        let u = field(2, 32, seed, 2, 15.0);
        let v = field(2, 32, seed + 20_000, 2, 15.0);
        let lp = LittlewoodPaley::standard(u.grid());
        for idx in [BesovIndex::sup(s), BesovIndex::new(s, Exponent::TWO, Exponent::TWO), BesovIndex::new(s, Exponent::new(1.0).unwrap(), Exponent::new(1.0).unwrap())] {
            let nu = besov_norm(&lp, &u, idx).unwrap().value;
            let nv = besov_norm(&lp, &v, idx).unwrap().value;
            let scaled = besov_norm(&lp, &u.scaled(a), idx).unwrap().value;
            prop_assert!((scaled - a.abs() * nu).abs() <= 1e-12 * nu.max(1.0));
            let mut w = u.clone();
            w.axpy(1.0, &v).unwrap();
            prop_assert!(besov_norm(&lp, &w, idx).unwrap().value <= (nu + nv) * (1.0 + 1e-12));
        }
        for p in [Exponent::new(1.0).unwrap(), Exponent::TWO, Exponent::INFINITY] {
            prop_assert!((lp_norm(&u.scaled(a), p) - a.abs() * lp_norm(&u, p)).abs() <= 1e-12 * lp_norm(&u, p));
        }
    }

    #[test]
    fn besov_l2_factor_is_bounded(seed in 0u64..10_000) {
        let u = field(2, 64, seed, 1, 31.0);
        let lp = LittlewoodPaley::standard(u.grid());
        let ratio = besov_norm(&lp, &u, BesovIndex::new(0.0, Exponent::TWO, Exponent::TWO)).unwrap().value / lp_norm(&u, Exponent::TWO);
        prop_assert!(ratio >= std::f64::consts::FRAC_1_SQRT_2 * (1.0 - 1e-9) && ratio <= 1.0 + 1e-9, "{ratio}");
    }

    #[test]
    fn chemin_lerner_of_constant_series(seed in 0u64..10_000, horizon in 0.1f64..2.0, alpha in 1.0f64..8.0) {
        let u = field(2, 32, seed, 2, 15.0);
        let lp = LittlewoodPaley::standard(u.grid());
        let idx = BesovIndex::sup(-0.5);
        let series = TimeSeriesField::constant(TimeGrid::new(horizon, 8).unwrap(), &u);
        let cl = chemin_lerner_norm(&lp, &series, TimeExponent::finite(alpha).unwrap(), idx).unwrap().value;
        let expected = horizon.powf(1.0 / alpha) * besov_norm(&lp, &u, idx).unwrap().value;
        prop_assert!((cl - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn duhamel_is_exact_on_affine_sources(seed in 0u64..10_000, steps in 2usize..24) {
        let a = smooth(16, seed, 1, 7.0);
        let b = smooth(16, seed + 1, 1, 7.0);
        let time = TimeGrid::new(0.8, steps).unwrap();
        let values = time.nodes().iter().map(|t| { let mut w = a.clone(); w.axpy(*t, &b).unwrap(); w }).collect();
        let g = duhamel(&TimeSeriesField::new(time, values).unwrap()).unwrap();
        let wn = a.grid().wavenumbers();
        for m in 0..=steps {
            let t = time.node(m);
            // ∫₀ᵗ e^{-λ(t-s)} (a + s b) ds with λ = |k|².
            let mut exact = a.apply_radial(&wn, |r| if r == 0.0 { 0.0 } else { (1.0 - (-r * r * t).exp()) / (r * r) });
            exact.axpy(1.0, &b.apply_radial(&wn, |r| {
                let l = r * r;
                if l == 0.0 { 0.0 } else { (l * t - 1.0 + (-l * t).exp()) / (l * l) }
            })).unwrap();
            prop_assert!(g.at(m).sub(&exact).unwrap().l2_norm() <= 1e-12 * (a.l2_norm() + b.l2_norm()));
        }
    }

    #[test]
    fn paraproduct_summands_live_in_their_annulus(seed in 0u64..10_000) {
        let u = smooth(64, seed, 1, 20.0);
        let v = smooth(64, seed + 1, 1, 20.0);
        let lp = LittlewoodPaley::standard(u.grid());
        for (j, w) in paraproduct_summands(&lp, &u, &v).unwrap() {
            prop_assert!(energy_outside_annulus(&lp, &w, j) < 1e-12, "shell {j}");
        }
    }

    #[test]
    fn lambda_root_solves_the_quadratic(g0 in 0.0f64..=0.25) {
        let r = lambda_root(g0).unwrap();
        prop_assert!((r.lambda - g0 - r.lambda * r.lambda).abs() < 1e-12);
        prop_assert!(r.lambda <= 0.5 + 1e-12 && r.lambda <= r.gamma);
    }

    #[test]
    fn guaranteed_horizon_scales_as_lambda_power(eps in 0.05f64..0.95, lambda in 0.1f64..10.0, b in 0.01f64..10.0, l in 0.01f64..10.0) {
        let c = EpsConstants::from_observed(eps, ObservedMaxima { a_phi: 0.2, a_tilde: 1.5, heat_z: 1.0, heat_y: 1.1 }, 1.5);
        let base = smallness_from_norms(b, l, 1.0, &c).besov_horizon;
        let scaled = smallness_from_norms(lambda * b, lambda * l, 1.0, &c).besov_horizon;
        prop_assert!((scaled / (base * lambda.powf(-2.0 / eps)) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn snapshot_roundtrip_is_exact((dim, size) in grid_case(), seed in 0u64..10_000, components in 1usize..4) {
        let u = field(dim, size, seed, components, (size / 2 - 1) as f64);
        let back = decode_snapshot(&encode_snapshot(&u)).unwrap();
        prop_assert_eq!(back.homogeneous(), u.homogeneous());
        prop_assert!(u.coeffs().iter().zip(back.coeffs()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }
}

#[test]
fn single_mode_heat_decay_matches_the_exponential() {
    let grid = Grid::new(3, 16).unwrap();
    let mut u = SpectralField::zeros(grid, 1, true);
    u.set_real_mode(0, &[2, -1, 3], Complex64::new(0.5, -0.25));
    let t = 0.05;
    let flowed = heat_flow(&u, t).unwrap();
    assert_relative_eq!(flowed.l2_norm(), (-14.0 * t).exp() * u.l2_norm(), max_relative = 1e-14);
}
