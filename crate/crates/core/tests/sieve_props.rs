use gls_core::modgroup::crt_order_check;
use gls_core::modgroup::DEFAULT_BUDGET;
use gls_core::sieve::{
    chebyshev_bound, default_family, gls_certify_with, ChebyshevStats, SieveConfig, Status,
};
use gls_core::GenSet;
use proptest::prelude::*;

/// Event membership bits on a weighted finite space.
fn space() -> impl Strategy<Value = (Vec<u32>, Vec<Vec<bool>>)> {
    (1usize..=4096, 1usize..=8).prop_flat_map(|(points, events)| {
        (
            prop::collection::vec(1u32..=50, points),
            prop::collection::vec(prop::collection::vec(any::<bool>(), points), events),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn chebyshev_bounds_the_miss_probability((weights, member) in space()) {
        let total: f64 = weights.iter().map(|&w| w as f64).sum();
        let l = member.len();
        let n = weights.len();
        let mass = |f: &dyn Fn(usize) -> bool| {
            (0..n).filter(|&x| f(x)).map(|x| weights[x] as f64).sum::<f64>() / total
        };
        let p: Vec<f64> = (0..l).map(|i| mass(&|x| member[i][x])).collect();
        let joint: Vec<Vec<f64>> = (0..l)
            .map(|i| (0..l).map(|j| mass(&|x| member[i][x] && member[j][x])).collect())
            .collect();
        let miss = mass(&|x| (0..l).all(|i| !member[i][x]));
        let stats = ChebyshevStats::from_probabilities(&p, &joint).unwrap();
        prop_assert!(stats.delta >= 0.0);
        for i in 0..l {
            for j in 0..l {
                prop_assert!(stats.w[i][j].abs() <= 1.0);
                prop_assert_eq!(stats.w[i][j], stats.w[j][i]);
            }
        }
        if let Ok(bound) = chebyshev_bound(&stats) {
            prop_assert!(miss <= bound + 1e-12);
        }
    }
}

#[test]
fn crt_law_on_default_family_pairs() {
    let gens = GenSet::sl2z_standard();
    let fam = default_family(2, 2, 11).unwrap();
    for (i, &p) in fam.primes.iter().enumerate() {
        for &q in &fam.primes[i + 1..] {
            let c = crt_order_check(gens.generators(), p, q, DEFAULT_BUDGET).unwrap();
            assert!(c.holds, "{p}*{q}");
        }
    }
}

#[test]
fn certify_m3_family_passes_all_conditions() {
    let fam = default_family(2, 3, 14).unwrap();
    let cfg = SieveConfig {
        empirical_samples: 200,
        pair_spectrum: false,
        ..SieveConfig::new(3, vec![0, 10, 20, 40])
    };
    let r = gls_certify_with(&GenSet::sl2z_standard(), &fam, &cfg).unwrap();
    assert!(r.all_conditions_pass);
    assert!(r.conditions.iter().all(|c| c.status == Status::Pass));
    for p in &r.primes {
        assert!(12 * p.census <= 11 * p.order);
    }
    assert!(r.chebyshev.iter().all(|c| c.holds != Some(false)));
    assert_eq!(r.empirical_curve.len(), 4);
    let json = serde_json::to_value(&r).unwrap();
    for key in [
        "delta",
        "d",
        "c",
        "conditions",
        "bound_curve",
        "empirical_curve",
    ] {
        assert!(json.get(key).is_some(), "{key}");
    }
}
