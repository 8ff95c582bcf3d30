mod common;

use centropy::information::{
    conditional_mutual_information as cmi, entropy, mutual_information as mi, EstimatorSpec, SampleBlock,
};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

const HALF_LN_2PIE: f64 = 1.4189385332046727;

fn one(c: &[f64]) -> SampleBlock<'_> {
    SampleBlock::single(c)
}

#[test]
fn bivariate_gaussian_mi_matches_closed_form() {
    let (x, y) = common::correlated_pair(1, 10_000, 0.7);
    let truth = -0.5 * (1.0_f64 - 0.49).ln();
    assert!((truth - 0.33667).abs() < 1e-5);
    let g = mi(&one(&x), &one(&y), &EstimatorSpec::gaussian()).unwrap();
    assert!((g - truth).abs() < 0.02, "{g}");
    let k = mi(&one(&x), &one(&y), &EstimatorSpec::knn(4)).unwrap();
    assert!((k - truth).abs() < 0.05, "{k}");
}

#[test]
fn geometric_knn_and_kde_track_the_same_dependence() {
    let (x, y) = common::correlated_pair(2, 4000, 0.7);
    let truth = -0.5 * (1.0_f64 - 0.49).ln();
    let geo = mi(&one(&x), &one(&y), &EstimatorSpec::geometric_knn(4)).unwrap();
    assert!((geo - truth).abs() < 0.05, "{geo}");
    let kde = mi(&one(&x), &one(&y), &EstimatorSpec::kde()).unwrap();
    assert!(kde > 0.15 && kde < truth + 0.05, "{kde}");
}

/// Near-degenerate joint density: the local ellipsoids follow the ridge.
#[test]
fn geometric_knn_on_elongated_density() {
    let (x, y) = common::correlated_pair(9, 4000, 0.995);
    let truth = -0.5 * (1.0_f64 - 0.995 * 0.995).ln();
    let geo = mi(&one(&x), &one(&y), &EstimatorSpec::geometric_knn(4)).unwrap();
    let gauss = mi(&one(&x), &one(&y), &EstimatorSpec::gaussian()).unwrap();
    assert!((gauss - truth).abs() < 0.05, "{gauss}");
    assert!((geo - truth).abs() < 0.15, "{geo} vs {truth}");
}

#[test]
fn uniform_entropy_is_zero() {
    let mut g = common::rng(3);
    let u: Vec<f64> = (0..50_000).map(|_| g.random::<f64>()).collect();
    let h = entropy(&one(&u), &EstimatorSpec::knn(4)).unwrap();
    assert!(h.abs() < 0.02, "{h}");
}

#[test]
fn standard_normal_entropy() {
    let mut g = common::rng(4);
    let x = common::normals(&mut g, 20_000);
    let gauss = entropy(&one(&x), &EstimatorSpec::gaussian()).unwrap();
    assert!((gauss - HALF_LN_2PIE).abs() < 0.02, "{gauss}");
    let knn = entropy(&one(&x), &EstimatorSpec::knn(4)).unwrap();
    assert!((knn - HALF_LN_2PIE).abs() < 0.03, "{knn}");
    let geo = entropy(&one(&x), &EstimatorSpec::geometric_knn(4)).unwrap();
    assert!((geo - HALF_LN_2PIE).abs() < 0.03, "{geo}");
    let kde = entropy(&one(&x), &EstimatorSpec::kde()).unwrap();
    assert!((kde - HALF_LN_2PIE).abs() < 0.05, "{kde}");
}

#[test]
fn independent_columns_have_zero_mi() {
    let mut g = common::rng(5);
    let x = common::normals(&mut g, 10_000);
    let y = common::normals(&mut g, 10_000);
    for spec in [EstimatorSpec::gaussian(), EstimatorSpec::knn(4), EstimatorSpec::geometric_knn(4), EstimatorSpec::kde()] {
        let v = mi(&one(&x), &one(&y), &spec).unwrap();
        assert!(v.abs() < 0.02, "{:?}: {v}", spec.kind);
    }
}

/// `X -> Z -> Y` with `Z = 0.8 X + e`, `Y = 0.8 Z + e`. From the covariance,
/// `corr(X, Y)^2 = 0.4096 / 2.0496`, so `I(X;Y) = 0.11141` nats and
/// `I(X;Y|Z) = 0`.
#[test]
fn markov_chain_conditional_independence() {
    let mut g = common::rng(6);
    let n = 10_000;
    let x = common::normals(&mut g, n);
    let ez = common::normals(&mut g, n);
    let ey = common::normals(&mut g, n);
    let z: Vec<f64> = x.iter().zip(&ez).map(|(a, e)| 0.8 * a + e).collect();
    let y: Vec<f64> = z.iter().zip(&ey).map(|(a, e)| 0.8 * a + e).collect();
    let truth = -0.5 * (1.0 - 0.4096_f64 / 2.0496).ln();
    assert!((truth - 0.11141).abs() < 1e-4);
    for spec in [EstimatorSpec::gaussian(), EstimatorSpec::knn(4)] {
        let m = mi(&one(&x), &one(&y), &spec).unwrap();
        assert!((m - truth).abs() < 0.03 && m > 0.05, "{:?}: {m}", spec.kind);
        let c = cmi(&one(&x), &one(&y), &one(&z), &spec).unwrap();
        assert!(c.abs() < 0.02, "{:?}: {c}", spec.kind);
    }
}

#[test]
fn poisson_counts_independent_and_dependent() {
    let mut g = common::rng(7);
    let d = Poisson::new(3.0).unwrap();
    let x: Vec<f64> = (0..5000).map(|_| d.sample(&mut g)).collect();
    let y: Vec<f64> = (0..5000).map(|_| d.sample(&mut g)).collect();
    let ind = mi(&one(&x), &one(&y), &EstimatorSpec::poisson()).unwrap();
    assert!((0.0..=0.02).contains(&ind), "{ind}");
    let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
    let dep = mi(&one(&x), &one(&sum), &EstimatorSpec::poisson()).unwrap();
    assert!(dep > 0.2, "{dep}");
}

#[test]
fn entropy_grows_with_regularization() {
    let c = vec![2.0; 50];
    let mut last = f64::NEG_INFINITY;
    for eps in [1e-12, 1e-10, 1e-6, 1e-2, 1.0] {
        let h = entropy(&one(&c), &EstimatorSpec::gaussian().with_regularization(eps)).unwrap();
        assert!((h - (HALF_LN_2PIE + 0.5 * eps.ln())).abs() < 1e-9);
        assert!(h > last);
        last = h;
    }
}

fn pair(seed: u64, n: usize, r: f64) -> (Vec<f64>, Vec<f64>) {
    common::correlated_pair(seed, n, r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mi_is_symmetric(seed in 0u64..1000, r in -0.9f64..0.9) {
        let (x, y) = pair(seed, 300, r);
        for spec in [EstimatorSpec::gaussian(), EstimatorSpec::knn(4), EstimatorSpec::kde()] {
            let a = mi(&one(&x), &one(&y), &spec).unwrap();
            let b = mi(&one(&y), &one(&x), &spec).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{:?}: {} vs {}", spec.kind, a, b);
        }
    }

    #[test]
    fn row_permutation_invariance(seed in 0u64..1000, r in -0.9f64..0.9) {
        let (x, y) = pair(seed, 300, r);
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut g = common::rng(seed ^ 0xABCD);
        for i in (1..order.len()).rev() {
            order.swap(i, g.random_range(0..=i));
        }
        let px: Vec<f64> = order.iter().map(|&i| x[i]).collect();
        let py: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        for spec in [EstimatorSpec::gaussian(), EstimatorSpec::knn(4), EstimatorSpec::geometric_knn(4), EstimatorSpec::kde()] {
            let a = mi(&one(&x), &one(&y), &spec).unwrap();
            let b = mi(&one(&px), &one(&py), &spec).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{:?}: {} vs {}", spec.kind, a, b);
        }
    }

    #[test]
    fn gaussian_mi_affine_invariant(seed in 0u64..1000, r in -0.9f64..0.9, a in 0.1f64..50.0, b in -100.0f64..100.0) {
        let (x, y) = pair(seed, 300, r);
        let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let before = mi(&one(&x), &one(&y), &EstimatorSpec::gaussian()).unwrap();
        let after = mi(&one(&ax), &one(&y), &EstimatorSpec::gaussian()).unwrap();
        prop_assert!((before - after).abs() < 1e-8);
    }

    #[test]
    fn cmi_with_empty_conditioning_is_mi(seed in 0u64..1000, r in -0.9f64..0.9) {
        let (x, y) = pair(seed, 200, r);
        for spec in [EstimatorSpec::gaussian(), EstimatorSpec::knn(4)] {
            let a = mi(&one(&x), &one(&y), &spec).unwrap();
            let c = cmi(&one(&x), &one(&y), &SampleBlock::empty(200), &spec).unwrap();
            prop_assert_eq!(a.to_bits(), c.to_bits());
        }
    }
}
