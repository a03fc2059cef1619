use gls_core::exactmat::presets;
use gls_core::modgroup::{QuotientGroup, DEFAULT_BUDGET};
use gls_core::spectral::{
    build_cayley, exact_walk_distribution, min_eig_floor, spectrum, WalkEvolution, WalkMode,
};
use gls_core::{BigMatrix, GenSet};

fn graphs(sigma: &GenSet) -> Vec<gls_core::CayleyGraph> {
    [3u64, 5, 7, 11]
        .into_iter()
        .map(|p| {
            let g = QuotientGroup::enumerate_sl2(p, DEFAULT_BUDGET).unwrap();
            build_cayley(&g, sigma).unwrap()
        })
        .collect()
}

#[test]
fn smallest_eigenvalue_respects_floor() {
    let sets = [
        GenSet::sl2z_standard(),
        GenSet::sanov(),
        GenSet::new(vec![
            presets::s(),
            presets::s_inv(),
            presets::t(),
            presets::t_inv(),
        ]),
    ];
    for sigma in &sets {
        let gens: Vec<_> = sigma.generators().to_vec();
        for p in [3u64, 5, 7, 11] {
            let reduced: Vec<_> = gens
                .iter()
                .map(|m| gls_core::modgroup::reduce(m, p))
                .collect();
            let g = QuotientGroup::generate(&reduced, p, DEFAULT_BUDGET).unwrap();
            let x = build_cayley(&g, sigma).unwrap();
            let r = spectrum(&x).unwrap();
            assert!(r.lambda_min <= r.lambda2 + 1e-12 && r.lambda2 <= 1.0 + 1e-9);
            if let Some(l) = x.odd_girth() {
                let floor = min_eig_floor(sigma.len(), l as u32);
                assert!(r.lambda_min >= floor - 1e-8, "p={p} l={l}");
            }
        }
    }
}

#[test]
fn distributions_are_stochastic() {
    for x in graphs(&GenSet::sl2z_standard()).iter().take(3) {
        for k in [0, 1, 7, 25] {
            assert!(exact_walk_distribution(x, k, WalkMode::Exact).is_stochastic());
            assert!(exact_walk_distribution(x, k, WalkMode::Float).is_stochastic());
        }
    }
}

#[test]
fn distance_to_uniform_decays_with_alpha() {
    for x in graphs(&GenSet::sl2z_standard()) {
        let alpha = spectrum(&x).unwrap().alpha;
        assert!(alpha < 1.0);
        let n = x.order() as f64;
        let mut evo = WalkEvolution::new(&x);
        for k in 0..=150u64 {
            let dist = evo
                .probabilities()
                .iter()
                .map(|p| (p - 1.0 / n).abs())
                .fold(0.0, f64::max);
            assert!(dist <= n.sqrt() * alpha.powi(k as i32) + 1e-9, "k={k}");
            evo.step();
        }
    }
}

#[test]
fn bipartite_quotient_without_identity() {
    // without a lazy step, an odd closed walk exists exactly when the
    // graph is not bipartite
    let sigma = GenSet::sl2z_standard().without_identity();
    for p in [3u64, 5, 7] {
        let g = QuotientGroup::enumerate_sl2(p, DEFAULT_BUDGET).unwrap();
        let x = build_cayley(&g, &sigma).unwrap();
        let r = spectrum(&x).unwrap();
        if x.odd_girth().is_none() {
            assert!((r.lambda_min + 1.0).abs() < 1e-8, "p={p}");
        } else {
            assert!(r.lambda_min > -1.0 + 1e-8, "p={p}");
        }
    }
    // T^{+-1} modulo 4 walks on a 4-cycle
    let sigma = GenSet::new(vec![
        BigMatrix::from_i64(2, &[1, 1, 0, 1]),
        BigMatrix::from_i64(2, &[1, -1, 0, 1]),
    ]);
    let g = QuotientGroup::generate(
        &[gls_core::modgroup::reduce(&sigma.generators()[0], 4)],
        4,
        DEFAULT_BUDGET,
    )
    .unwrap();
    let x = build_cayley(&g, &sigma).unwrap();
    assert_eq!(x.odd_girth(), None);
    assert!((spectrum(&x).unwrap().lambda_min + 1.0).abs() < 1e-10);
}
