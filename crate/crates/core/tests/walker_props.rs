use gls_core::exactmat::is_mth_power_sl2z;
use gls_core::modgroup::{power_image_mask, QuotientGroup, DEFAULT_BUDGET};
use gls_core::spectral::{build_cayley, exact_walk_distribution, WalkMode};
use gls_core::walker::{estimate_series, run_walk, sample_rng, Event, Walker};
use gls_core::GenSet;
use proptest::prelude::*;
use rayon::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trajectories_are_determined_by_seed(seed in any::<u64>(), k in 0u64..80) {
        let sigma = GenSet::sl2z_standard();
        let a = run_walk(&sigma, k, seed, &[7, 30]).unwrap();
        let b = run_walk(&sigma, k, seed, &[7, 30]).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.shadows_consistent());
    }

    #[test]
    fn shadows_stay_consistent(seed in any::<u64>()) {
        let w = Walker::new(&GenSet::sanov(), &[3, 11, 1_000_000_007]).unwrap();
        let mut ok = true;
        w.run(200, &mut sample_rng(seed, 0), |s| {
            if s.k % 10 == 0 {
                ok &= s.shadows_consistent();
            }
        });
        prop_assert!(ok);
    }
}

#[test]
fn exact_powers_have_power_shadows() {
    let primes = [5u64, 7, 13];
    let groups: Vec<_> = primes
        .iter()
        .map(|&p| QuotientGroup::enumerate_sl2(p, DEFAULT_BUDGET).unwrap())
        .collect();
    let w = Walker::new(&GenSet::sl2z_standard(), &primes).unwrap();
    for m in [2u64, 3] {
        let masks: Vec<_> = groups.iter().map(|g| power_image_mask(g, m)).collect();
        let mut powers_seen = 0;
        for sample in 0..400 {
            let s = w.run(20, &mut sample_rng(11, sample), |_| {});
            if is_mth_power_sl2z(&s.exact, m).unwrap() {
                powers_seen += 1;
                for (g, (mask, shadow)) in groups.iter().zip(masks.iter().zip(&s.shadows)) {
                    assert!(mask[g.index_of(shadow).unwrap()]);
                }
            }
        }
        assert!(powers_seen > 0);
    }
}

#[test]
fn monte_carlo_matches_exact_distribution() {
    let p = 5;
    let k = 6;
    let samples = 100_000u64;
    let sigma = GenSet::sl2z_standard();
    let g = QuotientGroup::enumerate_sl2(p, DEFAULT_BUDGET).unwrap();
    let x = build_cayley(&g, &sigma).unwrap();
    let subset: Vec<usize> = (0..g.order())
        .filter(|&i| {
            let e = g.entries(i);
            (e[0] + e[3]) % p == 2 || e[1] == 0
        })
        .collect();
    let exact = exact_walk_distribution(&x, k, WalkMode::Exact).mass(&subset);
    let mut member = vec![false; g.order()];
    subset.iter().for_each(|&i| member[i] = true);
    let w = Walker::new(&sigma, &[p]).unwrap();
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = w.run(k, &mut sample_rng(21, i), |_| {});
            u64::from(member[g.index_of(&s.shadows[0]).unwrap()])
        })
        .sum();
    let p_hat = hits as f64 / samples as f64;
    let sd = (exact * (1.0 - exact) / samples as f64).sqrt();
    assert!(
        (p_hat - exact).abs() <= 3.0 * sd,
        "p_hat {p_hat} exact {exact}"
    );
}

#[test]
fn estimates_bracket_their_point_value() {
    let sigma = GenSet::sl2z_standard();
    let est = estimate_series(&sigma, Event::VirtuallyUnipotent, &[0, 2, 4, 8], 500, 3).unwrap();
    for e in est {
        assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
        assert_eq!(e.failures, 0);
    }
}
