use abid::neighbors::{direction_bundle, knn, NeighborList};
use abid::synth::sample_ball;
use abid::{DataMatrix, Query};
use proptest::prelude::*;

/// Full pairwise-distance sort, independent of the selection path.
fn brute_force(data: &DataMatrix, q: usize, k: usize) -> Option<NeighborList> {
    let query = data.row(q);
    let mut all: Vec<(f64, usize)> = (0..data.n())
        .map(|j| {
            let d = data
                .row(j)
                .iter()
                .zip(query)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            (d, j)
        })
        .filter(|&(d, _)| d != 0.0)
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    if all.len() < k {
        return None;
    }
    all.truncate(k);
    Some(NeighborList {
        query: Some(q),
        indices: all.iter().map(|p| p.1).collect(),
        distances: all.iter().map(|p| p.0).collect(),
    })
}

#[test]
fn matches_full_sort_on_random_data() {
    let data = sample_ball(200, 3, 42).unwrap();
    for k in [1, 5, 50] {
        for q in 0..data.n() {
            assert_eq!(knn(&data, Query::Index(q), k).unwrap(), brute_force(&data, q, k).unwrap());
        }
    }
}

#[test]
fn bundles_have_unit_norm() {
    let data = sample_ball(300, 6, 3).unwrap();
    let mut worst: f64 = 0.0;
    for q in 0..data.n() {
        let nl = knn(&data, Query::Index(q), 25).unwrap();
        let b = direction_bundle(&data, Query::Index(q), &nl).unwrap();
        assert_eq!(b.k(), nl.k());
        for v in b.iter() {
            worst = worst.max((v.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs());
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

fn small_grid_data() -> impl Strategy<Value = DataMatrix> {
    // integer coordinates produce many exact ties and duplicates
    (1usize..4, 2usize..60).prop_flat_map(|(dim, n)| {
        prop::collection::vec(-3i32..4, n * dim).prop_map(move |v| {
            DataMatrix::from_flat(v.into_iter().map(f64::from).collect(), dim).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn agrees_with_oracle_including_ties(data in small_grid_data(), k in 1usize..20, q_frac in 0.0f64..1.0) {
        let q = ((data.n() as f64 * q_frac) as usize).min(data.n() - 1);
        match brute_force(&data, q, k) {
            Some(expected) => {
                let got = knn(&data, Query::Index(q), k).unwrap();
                prop_assert!(got.distances.windows(2).all(|w| w[0] <= w[1]));
                prop_assert!(got.distances.iter().all(|&d| d > 0.0));
                prop_assert!(!got.indices.contains(&q));
                prop_assert_eq!(got, expected);
            }
            None => prop_assert!(knn(&data, Query::Index(q), k).is_err()),
        }
    }

    #[test]
    fn smaller_k_is_a_prefix(data in small_grid_data(), k in 1usize..15) {
        if let (Ok(a), Ok(b)) = (knn(&data, Query::Index(0), k), knn(&data, Query::Index(0), k + 1)) {
            prop_assert_eq!(b.prefix(k), a);
        }
    }

    #[test]
    fn matches_oracle_on_continuous_data(seed in any::<u64>(), n in 10usize..500, k in 1usize..9) {
        let data = sample_ball(n, 3, seed).unwrap();
        let q = seed as usize % n;
        prop_assert_eq!(knn(&data, Query::Index(q), k).unwrap(), brute_force(&data, q, k).unwrap());
    }
}
