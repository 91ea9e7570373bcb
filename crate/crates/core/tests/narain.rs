mod common;

use narain_lab::lattice::{lo_gram, LambdaKind};
use narain_lab::narain::{
    derived_moduli, momenta_basis, momenta_map, momenta_product, period_line, random_triplet, verify_momenta_gram,
    verify_period_line, HeteroticTriplet,
};
use narain_lab::period::{fiber_coordinate, narain_section, Convention};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kind(g16: bool) -> LambdaKind {
    if g16 {
        LambdaKind::Gamma16
    } else {
        LambdaKind::E8E8
    }
}

#[test]
fn trivial_triplet_gram() {
    for k in LambdaKind::ALL {
        let rep = verify_momenta_gram(&HeteroticTriplet::trivial(k), 1e-12).unwrap();
        assert!(rep.pass, "{}", rep.max_error);
    }
}

#[test]
fn degenerate_metric_rejected() {
    let mut h = HeteroticTriplet::trivial(LambdaKind::E8E8);
    h.metric = [[1.0, 1.0], [1.0, 1.0]];
    assert!(verify_momenta_gram(&h, 1e-12).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn images_have_integer_coordinates(seed in any::<u64>(), g16 in any::<bool>()) {
        let k = kind(g16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_triplet(&mut rng, k);
        let basis = momenta_basis(&h).unwrap();
        let cols: Vec<Vec<f64>> = (0..20).map(|r| basis.iter().map(|b| b[r]).collect()).collect();
        let w = [rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
        let p = [rng.gen_range(-3..=3), rng.gen_range(-3..=3)];
        let l: Vec<i64> = (0..16).map(|_| rng.gen_range(-2..=2)).collect();
        let img = momenta_map(&h, w, p, &l).unwrap();
        let x = common::solve(&cols, &img);
        let want: Vec<i64> = [-w[0], -w[1], p[0], p[1]].into_iter().chain(l.iter().copied()).collect();
        for (a, &b) in x.iter().zip(&want) {
            prop_assert!((a - b as f64).abs() < 1e-8, "{a} vs {b}");
        }
        // the R^{2,18} product of images is the lattice form on coordinates
        let g = lo_gram(k);
        let norm: i64 = (0..20).map(|i| (0..20).map(|j| want[i] * g[(i, j)] * want[j]).sum::<i64>()).sum();
        prop_assert!((momenta_product(k, &img, &img) - norm as f64).abs() < 1e-8 * (1.0 + norm.abs() as f64));
    }

    #[test]
    fn gram_is_lo(seed in any::<u64>(), g16 in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_triplet(&mut rng, kind(g16));
        let rep = verify_momenta_gram(&h, 1e-11).unwrap();
        prop_assert!(rep.pass, "{}", rep.max_error);
    }

    #[test]
    fn period_line_is_positive_and_matches_section(seed in any::<u64>(), g16 in any::<bool>()) {
        let k = kind(g16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_triplet(&mut rng, k);
        let rep = verify_period_line(&h, 1e-9).unwrap();
        prop_assert!(rep.pass, "{rep:?}");
        let m = derived_moduli(&h).unwrap();
        let sec = narain_section(k, m.tau, &m.z, m.u, Convention::Appendix).unwrap();
        let (lam, mu) = fiber_coordinate(&period_line(&h).unwrap(), &sec).unwrap();
        prop_assert!(lam.norm() < 1e-9 && (mu - 1.0).norm() < 1e-9);
    }
}
