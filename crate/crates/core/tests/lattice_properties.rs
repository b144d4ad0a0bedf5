use proptest::prelude::*;

use rumourlab::lattice::{firework_counts, realize, reverse_membership, CoverageField};
use rumourlab::{Dimension, LatticeConfig, Model, Site, TailDistribution};

fn dists() -> impl Strategy<Value = TailDistribution> {
    prop_oneof![
        (0.5f64..5.0).prop_map(|a| TailDistribution::pareto(a).unwrap()),
        (0.3f64..2.5).prop_map(|b| TailDistribution::power(b).unwrap()),
        (0.1f64..0.9).prop_map(|q| TailDistribution::geometric(q).unwrap()),
    ]
}

fn dims() -> impl Strategy<Value = (Dimension, u64)> {
    prop_oneof![(1u64..200).prop_map(|n| (Dimension::One, n)), (1u64..25).prop_map(|n| (Dimension::Two, n))]
}

fn sites(field: &CoverageField) -> Vec<Site> {
    let (lo, hi) = (field.origin(), field.last());
    match field.dimension() {
        Dimension::One => (lo..=hi).map(Site::Line).collect(),
        Dimension::Two => (lo..=hi).flat_map(|i| (lo..=hi).map(move |j| Site::Grid(i, j))).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn raising_p_never_lowers_firework_counts((dim, n) in dims(), dist in dists(), p in 0.0f64..0.9, dp in 0.0f64..0.1, seed in any::<u64>()) {
        let lo = LatticeConfig { p, n, seed, ..LatticeConfig::new(dim, Model::Firework, dist) };
        let hi = LatticeConfig { p: p + dp, ..lo.clone() };
        let a = firework_counts(&realize(&lo).unwrap());
        let b = firework_counts(&realize(&hi).unwrap());
        prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x <= y));
    }

    #[test]
    fn raising_p_never_shrinks_reverse_membership((dim, n) in dims(), dist in dists(), p in 0.0f64..0.9, dp in 0.0f64..0.1, k in 0u32..4, seed in any::<u64>()) {
        let lo = LatticeConfig { p, n, cushion: 3, k, seed, ..LatticeConfig::new(dim, Model::Reverse, dist) };
        let hi = LatticeConfig { p: p + dp, ..lo.clone() };
        let a = reverse_membership(&realize(&lo).unwrap(), k);
        let b = reverse_membership(&realize(&hi).unwrap(), k);
        prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x <= y));
    }

    #[test]
    fn reverse_membership_is_nested_in_k((dim, n) in dims(), dist in dists(), p in 0.0f64..1.0, initiators in any::<bool>(), seed in any::<u64>()) {
        let config = LatticeConfig { p, n, cushion: 3, include_initiators: initiators, seed, ..LatticeConfig::new(dim, Model::Reverse, dist) };
        let r = realize(&config).unwrap();
        let fields: Vec<CoverageField> = (0..4).map(|k| reverse_membership(&r, k)).collect();
        for w in fields.windows(2) {
            prop_assert!(w[1].values().iter().zip(w[0].values()).all(|(hi, lo)| hi <= lo));
        }
    }

    #[test]
    fn initiators_only_reach_their_radius((dim, n) in dims(), dist in dists(), p in 0.0f64..1.0, seed in any::<u64>()) {
        let without = LatticeConfig { p, n, seed, ..LatticeConfig::new(dim, Model::Firework, dist) };
        let with = LatticeConfig { include_initiators: true, ..without.clone() };
        let rw = realize(&with).unwrap();
        let reach = rw.initiator_radii().unwrap().into_iter().max().unwrap() as i64;
        let a = firework_counts(&realize(&without).unwrap());
        let b = firework_counts(&rw);
        for s in sites(&a) {
            let far = match s {
                Site::Line(x) => x > reach,
                Site::Grid(i, j) => i.max(j) > reach,
            };
            if far {
                prop_assert_eq!(a.get(s), b.get(s), "site {}", s);
            } else {
                prop_assert!(a.get(s) <= b.get(s));
            }
        }
    }
}
