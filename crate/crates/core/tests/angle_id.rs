mod common;

use abid::angle_id::{
    abid, abid_from_rabid, abid_via_fixed_point, cosine_square_stats, rabid, rabid_unclamped,
};
use abid::estimate::{estimate_point, estimate_table};
use abid::neighbors::DirectionBundle;
use abid::synth::{offset_disc, random_orthogonal, rotate, sample_ball};
use abid::{seeded_rng, DataMatrix, Estimator, Query};
use common::{
    cosine_matrix, mean, naive_off_diagonal, population_variance, random_bundle, reflected_cosines,
    subspace_bundle,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn fast_path_matches_naive_double_loop() {
    let mut rng = seeded_rng(1);
    for _ in 0..500 {
        let k = rng.random_range(1..=50);
        let dim = rng.random_range(1..=60);
        let b = random_bundle(&mut rng, k, dim);
        let s = cosine_square_stats(&b);
        let (sq, lin) = naive_off_diagonal(&b);
        assert!((s.off_diag_sq_sum - sq).abs() < 1e-10, "k={k} D={dim}");
        if k > 1 {
            assert!((s.mean_cosine - lin / (k * k - k) as f64).abs() < 1e-10);
        }
    }
}

#[test]
fn fixed_point_on_random_bundles() {
    let mut rng = seeded_rng(2);
    for _ in 0..1000 {
        let k = rng.random_range(2..=40);
        let dim = rng.random_range(1..=8);
        let s = cosine_square_stats(&random_bundle(&mut rng, k, dim));
        let fp = abid_via_fixed_point(&s).unwrap();
        assert!((fp - abid(&s).value).abs() < 1e-9);
    }
}

/// The bound argument: `C₁` has rank `d` and trace `k`, so `‖C₁‖² = Σλ² ≥ k²/d`.
#[test]
fn eigenvalues_certify_the_upper_bound() {
    let mut rng = seeded_rng(3);
    for d in 1..=6 {
        for &k in &[d + 2, 2 * d + 5, 40] {
            let b = subspace_bundle(&mut rng, k, d, d + 3);
            let c = cosine_matrix(&b);
            let m = DMatrix::from_fn(k, k, |i, j| c[i][j]);
            let eig = m.symmetric_eigen().eigenvalues;
            let mut lambdas: Vec<f64> = eig.iter().copied().collect();
            lambdas.sort_by(|a, b| b.total_cmp(a));
            assert!(lambdas[d..].iter().all(|l| l.abs() < 1e-9), "rank exceeds {d}");
            assert!((lambdas.iter().sum::<f64>() - k as f64).abs() < 1e-9);
            let sq: f64 = lambdas.iter().map(|l| l * l).sum();
            let s = cosine_square_stats(&b);
            assert!((sq - (s.off_diag_sq_sum + k as f64)).abs() < 1e-8);
            assert!(sq >= (k * k) as f64 / d as f64 - 1e-9);
            assert!(abid(&s).value <= d as f64 + 1e-9);
            assert!(rabid_unclamped(&s).unwrap() <= (k as f64 - 1.0) / (k - d) as f64 * d as f64 + 1e-9);
        }
    }
}

#[test]
fn estimate_never_exceeds_k() {
    let mut rng = seeded_rng(4);
    for _ in 0..300 {
        let k = rng.random_range(1..=30);
        let dim = rng.random_range(1..=50);
        let b = random_bundle(&mut rng, k, dim);
        let s = cosine_square_stats(&b);
        let a = abid(&s);
        assert!(a.value <= k as f64 + 1e-12 && a.value > 0.0);
        assert!(a.flags.is_empty());
        if k >= 2 {
            assert!(rabid(&s).unwrap().value <= k as f64);
        }
    }
}

#[test]
fn raw_and_regularized_converge_with_k() {
    let ks = [25usize, 50, 100, 200, 400];
    let mut gaps = vec![0.0; ks.len()];
    for seed in 0..5u64 {
        let data = sample_ball(4000, 3, 50 + seed).unwrap();
        for (g, &k) in gaps.iter_mut().zip(&ks) {
            let mut acc = 0.0;
            for q in 0..40 {
                let r = estimate_point(&data, Query::Index(q), k, &[Estimator::Abid, Estimator::Rabid]).unwrap();
                let (a, raw) = (r.value(Estimator::Abid).unwrap(), r.value(Estimator::Rabid).unwrap());
                acc += (raw - a).abs() / a;
            }
            *g += acc / 40.0;
        }
    }
    // the relative gap shrinks like 1/k
    assert!(gaps.windows(2).all(|w| (0.4..0.6).contains(&(w[1] / w[0]))), "{gaps:?}");
    assert!(gaps[4] < 0.03, "{gaps:?}");
}

fn rows(data: &DataMatrix) -> Vec<Vec<f64>> {
    data.rows().map(<[f64]>::to_vec).collect()
}

fn angle_values(data: &DataMatrix, k: usize) -> Vec<(f64, f64)> {
    let t = estimate_table(data, k, &[Estimator::Abid, Estimator::Rabid], None, &Default::default()).unwrap();
    t.column(Estimator::Abid)
        .unwrap()
        .into_iter()
        .zip(t.column(Estimator::Rabid).unwrap())
        .collect()
}

#[test]
fn power_of_two_scaling_is_bit_identical() {
    let data = sample_ball(400, 5, 9).unwrap();
    let base = angle_values(&data, 30);
    for s in [0.125, 2.0, 1024.0] {
        let scaled = DataMatrix::from_rows(
            &rows(&data).into_iter().map(|r| r.into_iter().map(|x| x * s).collect::<Vec<_>>()).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(angle_values(&scaled, 30), base);
    }
}

#[test]
fn arbitrary_scaling_is_invariant_to_rounding() {
    let data = sample_ball(400, 5, 9).unwrap();
    let base = angle_values(&data, 30);
    for s in [0.37, 3.0, 1e5] {
        let scaled = data.map_rows(|r| r.iter().map(|x| x * s).collect()).unwrap();
        for (a, b) in angle_values(&scaled, 30).iter().zip(&base) {
            assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
        }
    }
}

#[test]
fn rotation_invariance() {
    let data = sample_ball(400, 4, 10).unwrap();
    let q = random_orthogonal(4, &mut seeded_rng(11));
    let rotated = rotate(&data, &q).unwrap();
    for (a, b) in angle_values(&rotated, 30).iter().zip(&angle_values(&data, 30)) {
        assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
    }
}

#[test]
fn disc_interior_is_two_dimensional() {
    let data = sample_ball(5000, 2, 12).unwrap();
    // points near the center
    let interior: Vec<usize> = data
        .rows()
        .enumerate()
        .filter(|(_, r)| r[0].hypot(r[1]) < 0.3)
        .map(|(i, _)| i)
        .take(20)
        .collect();
    for q in interior {
        let v = estimate_point(&data, Query::Index(q), 100, &[Estimator::Abid]).unwrap();
        let a = v.value(Estimator::Abid).unwrap();
        assert!((1.6..=2.4).contains(&a), "{a}");
    }
}

#[test]
fn offset_disc_scenarios() {
    let (data, q) = offset_disc(200, 0.0, 13).unwrap();
    let r = estimate_point(&data, Query::Point(&q), 200, &[Estimator::Abid]).unwrap();
    assert!((r.value(Estimator::Abid).unwrap() - 2.0).abs() < 0.4);

    let (data, q) = offset_disc(200, 20.0, 13).unwrap();
    let r = estimate_point(&data, Query::Point(&q), 200, &[Estimator::Abid, Estimator::Mle]).unwrap();
    assert!(r.mean_cosine.unwrap() > 0.99);
    assert!(r.value(Estimator::Abid).unwrap() < 1.5);
    assert!(r.value(Estimator::Mle).unwrap() > 5.0);
}

fn bundle_strategy() -> impl Strategy<Value = DirectionBundle> {
    (2usize..25, 1usize..8).prop_flat_map(|(k, dim)| {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), k)
            .prop_filter("non-zero vectors", |vs| {
                vs.iter().all(|v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
            })
            .prop_map(|vs| DirectionBundle::from_vectors(&vs).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn diagonal_identity(b in bundle_strategy()) {
        let s = cosine_square_stats(&b);
        let k = s.k as f64;
        let lhs = s.mean_sq_with_diagonal();
        let rhs = ((k - 1.0) * s.mean_sq().unwrap() + 1.0) / k;
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!((abid_from_rabid(rabid_unclamped(&s).unwrap(), s.k) - abid(&s).value).abs() < 1e-12);
    }

    #[test]
    fn reflection_centers_the_cosines(b in bundle_strategy()) {
        let s = cosine_square_stats(&b);
        let c = reflected_cosines(&b);
        prop_assert!(mean(&c).abs() < 1e-12);
        prop_assert!((population_variance(&c) - s.mean_sq().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn stats_stay_in_range(b in bundle_strategy()) {
        let s = cosine_square_stats(&b);
        let k = s.k as f64;
        prop_assert!(s.off_diag_sq_sum >= 0.0 && s.off_diag_sq_sum <= k * k - k);
        let m = s.mean_sq_with_diagonal();
        prop_assert!(m > 0.0 && m <= 1.0);
    }
}
