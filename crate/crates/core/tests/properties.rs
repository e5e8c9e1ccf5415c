use proptest::prelude::*;

use gwknn::bootstrap::{hamamoto_bootstrap, BootstrapConfig};
use gwknn::classifiers::{
    argmax_set, estimate_posteriors, gaussian_weight, gwknn_classify, knnc_classify, nnc_classify, wknnc_classify,
    wknnc_weights, GaussianWeightParams,
};
use gwknn::data::{
    apply_normalization, compute_normalization, load_csv, random_split, write_csv, ClassId, CsvOptions,
    LabelRegistry, LabeledDataset, PatternSet,
};
use gwknn::evaluation::{
    classification_accuracy, cross_validate, mean_and_sample_std, per_pattern_outcomes, resample_accuracies,
    ClassifierConfig, ClassifierKind, CvGrid,
};
use gwknn::neighbors::{knn_search, Neighbor, NeighborList};

fn dataset(dim: usize, classes: usize, max_n: usize) -> impl Strategy<Value = LabeledDataset> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(-10.0f64..10.0, n * dim),
            prop::collection::vec(0..classes, n),
        )
            .prop_map(move |(values, labels)| {
                let registry = LabelRegistry::from_names((0..classes).map(|c| format!("c{c}")));
                let labels = labels.into_iter().map(ClassId::from).collect();
                LabeledDataset::new(PatternSet::new(dim, values).unwrap(), labels, registry).unwrap()
            })
    })
}

/// Integer coordinates on a small grid, so exact distance ties are common.
fn gridded(dim: usize, classes: usize, max_n: usize) -> impl Strategy<Value = LabeledDataset> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(-3i32..=3, n * dim),
            prop::collection::vec(0..classes, n),
        )
            .prop_map(move |(values, labels)| {
                let registry = LabelRegistry::from_names((0..classes).map(|c| format!("c{c}")));
                let labels = labels.into_iter().map(ClassId::from).collect();
                let values = values.into_iter().map(f64::from).collect();
                LabeledDataset::new(PatternSet::new(dim, values).unwrap(), labels, registry).unwrap()
            })
    })
}

fn neighbor_list(max_k: usize, classes: usize) -> impl Strategy<Value = NeighborList> {
    (1..=max_k).prop_flat_map(move |len| {
        (
            prop::collection::vec(0.0f64..6.0, len),
            prop::collection::vec(0..classes, len),
            len..=max_k + 3,
        )
            .prop_map(|(mut h, labels, k)| {
                h.sort_by(f64::total_cmp);
                let entries = h
                    .into_iter()
                    .zip(labels)
                    .enumerate()
                    .map(|(index, (distance, l))| Neighbor {
                        index,
                        distance,
                        label: ClassId::from(l),
                    })
                    .collect();
                NeighborList::new(entries, k).unwrap()
            })
    })
}

fn full_sort(train: &LabeledDataset, q: &[f64], k: usize) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = (0..train.len())
        .map(|i| {
            let d2: f64 = train.pattern(i).iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, i)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, i)| i).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn search_matches_full_sort_on_tied_grids(train in gridded(3, 3, 60), q in prop::collection::vec(-3i32..=3, 3), k in 1usize..12) {
        let q: Vec<f64> = q.into_iter().map(f64::from).collect();
        let got: Vec<usize> = knn_search(&train, &q, k).unwrap().entries().iter().map(|e| e.index).collect();
        prop_assert_eq!(got, full_sort(&train, &q, k));
    }

    #[test]
    fn neighbor_lists_are_prefix_monotone(train in dataset(4, 3, 80), q in prop::collection::vec(-10.0f64..10.0, 4), k in 1usize..20) {
        let a = knn_search(&train, &q, k).unwrap();
        let b = knn_search(&train, &q, k + 1).unwrap();
        prop_assert_eq!(a.entries(), &b.entries()[..a.len()]);
        prop_assert_eq!(a.len(), k.min(train.len()));
        prop_assert!(a.entries().windows(2).all(|w| w[0].distance <= w[1].distance));
        prop_assert!(a.entries().iter().all(|e| e.distance >= 0.0));
        prop_assert_eq!(&b.truncated(k), &a);
    }

    #[test]
    fn gaussian_weight_is_bounded_and_decreasing(mut h in prop::collection::vec(0.0f64..10.0, 2..40), sigma in 0.3f64..3.0) {
        // h / sigma stays below 34, so exp(-h^2 / 2 sigma^2) never underflows.
        let p = GaussianWeightParams::new(sigma).unwrap();
        h.sort_by(f64::total_cmp);
        let w: Vec<f64> = h.iter().map(|&x| gaussian_weight(x, p)).collect();
        prop_assert!(w.iter().all(|&v| v > 0.0 && v <= 1.0));
        prop_assert_eq!(gaussian_weight(0.0, p), 1.0);
        for (hp, wp) in h.windows(2).zip(w.windows(2)) {
            prop_assert!(wp[0] >= wp[1]);
            if hp[1] - hp[0] > 1e-3 {
                prop_assert!(wp[0] > wp[1]);
            }
        }
    }

    #[test]
    fn cumulative_weight_bounded_by_vote_count(nl in neighbor_list(25, 5)) {
        let p = GaussianWeightParams::default();
        let w = gwknn_classify(&nl, p, 5).unwrap().scores;
        let votes = knnc_classify(&nl, 5).unwrap().scores;
        for (wi, ki) in w.iter().zip(&votes) {
            prop_assert!(*wi >= 0.0 && wi <= ki);
        }
        prop_assert!(votes.iter().sum::<f64>() as usize <= nl.k());
    }

    #[test]
    fn dudani_endpoints(nl in neighbor_list(25, 4)) {
        let w = wknnc_weights(&nl);
        let (h1, hk) = (nl.first().unwrap().distance, nl.last().unwrap().distance);
        prop_assert_eq!(w[0], 1.0);
        if hk != h1 {
            prop_assert_eq!(*w.last().unwrap(), 0.0);
        } else {
            prop_assert!(w.iter().all(|&x| x == 1.0));
        }
        prop_assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn posterior_argmax_matches_gwknn(nl in neighbor_list(25, 6), d in 1usize..=20) {
        let p = GaussianWeightParams::default();
        let dec = gwknn_classify(&nl, p, 6).unwrap();
        let post = estimate_posteriors(&nl, p, nl.k(), d, 6).unwrap();
        let set = argmax_set(&post);
        prop_assert_eq!(set[0], dec.predicted);
        prop_assert_eq!(set, argmax_set(&dec.scores));
    }

    #[test]
    fn all_rules_agree_for_one_neighbor(h in 0.0f64..20.0, label in 0usize..4) {
        let nl = NeighborList::new(vec![Neighbor { index: 0, distance: h, label: ClassId::from(label) }], 1).unwrap();
        let p = GaussianWeightParams::default();
        let expect = ClassId::from(label);
        prop_assert_eq!(nnc_classify(&nl, 4).unwrap().predicted, expect);
        prop_assert_eq!(knnc_classify(&nl, 4).unwrap().predicted, expect);
        prop_assert_eq!(wknnc_classify(&nl, 4).unwrap().predicted, expect);
        prop_assert_eq!(gwknn_classify(&nl, p, 4).unwrap().predicted, expect);
    }

    #[test]
    fn relabeling_permutes_scores(nl in neighbor_list(15, 4), perm in Just([2usize, 0, 3, 1])) {
        let p = GaussianWeightParams::default();
        let mapped = NeighborList::new(
            nl.entries().iter().map(|e| Neighbor { label: ClassId::from(perm[e.label.index()]), ..*e }).collect(),
            nl.k(),
        ).unwrap();
        for (a, b) in [
            (knnc_classify(&nl, 4).unwrap(), knnc_classify(&mapped, 4).unwrap()),
            (wknnc_classify(&nl, 4).unwrap(), wknnc_classify(&mapped, 4).unwrap()),
            (gwknn_classify(&nl, p, 4).unwrap(), gwknn_classify(&mapped, p, 4).unwrap()),
        ] {
            for c in 0..4 {
                prop_assert_eq!(a.scores[c], b.scores[perm[c]]);
            }
            if !a.tie {
                prop_assert_eq!(ClassId::from(perm[a.predicted.index()]), b.predicted);
            }
        }
    }

    #[test]
    fn pooled_normalization_standardizes(a in dataset(3, 2, 40), b in dataset(3, 2, 40)) {
        let stats = compute_normalization(&[&a, &b]).unwrap();
        let (za, zb) = (apply_normalization(&a, &stats).unwrap(), apply_normalization(&b, &stats).unwrap());
        let n = (za.len() + zb.len()) as f64;
        for j in 0..3 {
            let col: Vec<f64> = za.patterns().rows().chain(zb.patterns().rows()).map(|r| r[j]).collect();
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            if stats.std[j] == 0.0 {
                prop_assert!(col.iter().all(|&v| v == 0.0));
            } else {
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((var - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn csv_round_trip(ds in dataset(3, 3, 30), header in any::<bool>()) {
        let f = tempfile::NamedTempFile::new().unwrap();
        write_csv(&ds, f.path(), b',', header).unwrap();
        let opts = CsvOptions { has_header: header, ..CsvOptions::default() };
        let back = load_csv(f.path(), &opts).unwrap();
        // ids are re-derived by first appearance, so compare label text.
        prop_assert_eq!(back.patterns(), ds.patterns());
        for i in 0..ds.len() {
            prop_assert_eq!(back.registry().name(back.label(i)), ds.registry().name(ds.label(i)));
        }
    }

    #[test]
    fn split_conserves_the_multiset(ds in dataset(2, 2, 60), seed in any::<u64>()) {
        prop_assume!(ds.len() >= 2);
        let train_count = 1 + (seed as usize) % (ds.len() - 1);
        let (a, b) = random_split(&ds, train_count, seed).unwrap();
        prop_assert_eq!(a.len() + b.len(), ds.len());
        let key = |d: &LabeledDataset| {
            let mut v: Vec<(Vec<u64>, u32)> = (0..d.len())
                .map(|i| (d.pattern(i).iter().map(|x| x.to_bits()).collect(), d.label(i).0))
                .collect();
            v.sort();
            v
        };
        let mut joined = key(&a);
        joined.extend(key(&b));
        joined.sort();
        prop_assert_eq!(joined, key(&ds));
    }

    #[test]
    fn bootstrap_conservation_and_hull(ds in dataset(3, 3, 50), r in 1usize..8, include_self in any::<bool>()) {
        let counts = ds.class_counts();
        prop_assume!(include_self || counts.iter().all(|&c| c != 1));
        let out = hamamoto_bootstrap(&ds, &BootstrapConfig::new(r, include_self).unwrap()).unwrap();
        prop_assert_eq!(out.class_counts(), counts);
        prop_assert_eq!(out.labels(), ds.labels());
        for (c, members) in ds.class_members().iter().enumerate() {
            for j in 0..3 {
                let lo = members.iter().map(|&i| ds.pattern(i)[j]).fold(f64::INFINITY, f64::min);
                let hi = members.iter().map(|&i| ds.pattern(i)[j]).fold(f64::NEG_INFINITY, f64::max);
                for &i in members {
                    let v = out.pattern(i)[j];
                    prop_assert!(lo <= v && v <= hi, "class {c} feature {j}: {v} not in [{lo}, {hi}]");
                }
            }
        }
    }

    #[test]
    fn bootstrap_with_full_class_gives_centroid(ds in dataset(2, 2, 30)) {
        let n_max = *ds.class_counts().iter().max().unwrap();
        let out = hamamoto_bootstrap(&ds, &BootstrapConfig::new(n_max, true).unwrap()).unwrap();
        for members in ds.class_members().iter().filter(|m| m.len() == n_max) {
            for j in 0..2 {
                let centroid = members.iter().map(|&i| ds.pattern(i)[j]).sum::<f64>() / members.len() as f64;
                let lo = members.iter().map(|&i| ds.pattern(i)[j]).fold(f64::INFINITY, f64::min);
                let hi = members.iter().map(|&i| ds.pattern(i)[j]).fold(f64::NEG_INFINITY, f64::max);
                for &i in members {
                    prop_assert_eq!(out.pattern(i)[j], centroid.clamp(lo, hi));
                }
            }
        }
    }

    #[test]
    fn bootstrap_is_deterministic(ds in dataset(2, 2, 30), r in 1usize..5) {
        let cfg = BootstrapConfig::new(r, true).unwrap();
        prop_assert_eq!(hamamoto_bootstrap(&ds, &cfg).unwrap(), hamamoto_bootstrap(&ds, &cfg).unwrap());
    }

    #[test]
    fn resample_statistics(outcomes in prop::collection::vec(any::<bool>(), 1..200), seed in any::<u64>()) {
        let ca = resample_accuracies(&outcomes, 10, seed).unwrap();
        let (mean, std) = mean_and_sample_std(&ca);
        let lo = ca.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ca.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo - 1e-9 <= mean && mean <= hi + 1e-9);
        prop_assert!(ca.iter().all(|&c| (0.0..=100.0).contains(&c)));
        if outcomes.iter().all(|&o| o == outcomes[0]) {
            prop_assert_eq!(std, 0.0);
        }
        prop_assert_eq!(resample_accuracies(&outcomes, 10, seed).unwrap(), ca);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cached_outcomes_equal_reclassification(train in dataset(2, 3, 40), test in dataset(2, 3, 20), k in 1usize..6) {
        let cfg = ClassifierConfig::new(ClassifierKind::Gwknnc).with_k(k);
        let outcomes = per_pattern_outcomes(&cfg, &train, &test).unwrap();
        let fitted = cfg.fit(&train).unwrap();
        for i in 0..test.len() {
            let fresh = fitted.classify(test.pattern(i)).unwrap().predicted == test.label(i);
            prop_assert_eq!(outcomes[i], fresh);
        }
        let ca = classification_accuracy(&cfg, &train, &test).unwrap();
        prop_assert_eq!(ca, 100.0 * outcomes.iter().filter(|&&o| o).count() as f64 / test.len() as f64);
    }

    #[test]
    fn cv_selection_ignores_grid_order(train in dataset(2, 2, 40), seed in any::<u64>()) {
        prop_assume!(train.len() >= 3);
        let base = ClassifierConfig::new(ClassifierKind::KnncHbs).with_include_self(true);
        let a = cross_validate(&train, &CvGrid::new(vec![1, 3, 5, 7], vec![1, 2, 3]).unwrap(), &base, 3, seed).unwrap();
        let b = cross_validate(&train, &CvGrid::new(vec![7, 5, 3, 1], vec![3, 1, 2]).unwrap(), &base, 3, seed).unwrap();
        prop_assert_eq!((a.k, a.r), (b.k, b.r));
        prop_assert_eq!(a, cross_validate(&train, &CvGrid::new(vec![1, 3, 5, 7], vec![1, 2, 3]).unwrap(), &base, 3, seed).unwrap());
    }
}
