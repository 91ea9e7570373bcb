mod common;

use narain_lab::lattice::{
    build_lattice, count_by_norm, enumerate_by_norm, reflection_matrix, simple_roots, weyl_reflect, LambdaKind,
    Lattice, LatticeLabel, SignedPermutation,
};
use narain_lab::linalg::{inertia, IMat};
use narain_lab::ExecMode;
use proptest::prelude::*;

#[test]
fn e8_counts_match_box_oracle() {
    let fp = count_by_norm(&build_lattice(LatticeLabel::E8), 8, ExecMode::default()).unwrap();
    let oracle = common::dn_plus_counts_box(8, 8);
    assert_eq!(fp, oracle);
    assert_eq!(oracle.values().copied().collect::<Vec<_>>(), vec![1, 240, 2160, 6720, 17520]);
}

#[test]
fn rank16_counts_match_box_oracle() {
    let d16 = common::dn_plus_counts_box(16, 6);
    let d8 = common::dn_plus_counts_box(8, 6);
    let e8e8 = common::convolve(&d8, &d8, 6);
    for (label, want) in [(LatticeLabel::Gamma16, &d16), (LatticeLabel::E8E8, &e8e8)] {
        let got = count_by_norm(&build_lattice(label), 6, ExecMode::default()).unwrap();
        assert_eq!(&got, want, "{label:?}");
    }
}

#[test]
fn classification() {
    for (label, sig) in [
        (LatticeLabel::E8, (8, 0)),
        (LatticeLabel::E8E8, (16, 0)),
        (LatticeLabel::Gamma16, (16, 0)),
        (LatticeLabel::LoE8E8, (2, 18)),
        (LatticeLabel::LoGamma16, (2, 18)),
    ] {
        let c = build_lattice(label).classify();
        assert!(c.even && c.unimodular && c.signature == sig, "{label:?}");
    }
    let h = build_lattice(LatticeLabel::Hyperbolic).classify();
    assert_eq!(h.signature, (1, 1));
    assert!(h.even && h.unimodular);
}

#[test]
fn roots_of_norm_two_are_reflections() {
    for k in LambdaKind::ALL {
        let d = k.data();
        let shells = enumerate_by_norm(&d.lattice, 2).unwrap();
        let roots = &shells[&2].vectors;
        assert_eq!(roots.len(), 480);
        for r in roots.iter().step_by(37) {
            let m = reflection_matrix(&d.lattice, r.coords()).unwrap();
            assert!(d.is_isometry(&m));
        }
    }
}

fn small_gram() -> impl Strategy<Value = IMat> {
    (2usize..=3).prop_flat_map(|n| {
        proptest::collection::vec(-2i64..=2, n * n).prop_map(move |v| {
            let l = IMat::from_fn(n, n, |i, j| if j < i { v[i * n + j] } else if i == j { 1 + v[i * n + j].abs() } else { 0 });
            l.mul(&l.transpose())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fincke_pohst_matches_box(g in small_gram(), max_norm in 1i64..12) {
        let l = Lattice::new(g.clone(), None).unwrap();
        let seq = count_by_norm(&l, max_norm, ExecMode::Sequential).unwrap();
        let par = count_by_norm(&l, max_norm, ExecMode::Parallel).unwrap();
        prop_assert_eq!(&seq, &par);
        prop_assert_eq!(seq, common::box_counts(&g, max_norm));
    }

    #[test]
    fn inertia_invariant_under_congruence(g in small_gram(), seed in proptest::collection::vec(-2i64..=2, 9), neg in any::<bool>()) {
        let n = g.rows();
        let mut p = IMat::from_fn(n, n, |i, j| if i == j { 1 } else if j > i { seed[i * 3 + j] } else { 0 });
        if neg { p = p.neg(); }
        let h = p.transpose().mul(&g.neg()).mul(&p);
        prop_assert_eq!(inertia(&h), (0, n, 0));
        prop_assert_eq!(inertia(&g), (n, 0, 0));
    }

    #[test]
    fn weyl_reflections_preserve_norm(idx in 0usize..16, coords in proptest::collection::vec(-3i64..=3, 16), gamma16 in any::<bool>()) {
        let k = if gamma16 { LambdaKind::Gamma16 } else { LambdaKind::E8E8 };
        let l = &k.data().lattice;
        let root = simple_roots(k).roots[idx].clone();
        let v = l.vector(coords).unwrap();
        let w = weyl_reflect(&root, &v).unwrap();
        prop_assert_eq!(w.norm(), v.norm());
        prop_assert_eq!(weyl_reflect(&root, &w).unwrap(), v);
    }

    #[test]
    fn signed_permutations_act_as_isometries(perm in Just((0..16).collect::<Vec<usize>>()).prop_shuffle(), flips in proptest::collection::vec(any::<bool>(), 16)) {
        let mut signs: Vec<i8> = flips.iter().map(|&f| if f { -1 } else { 1 }).collect();
        if signs.iter().filter(|&&s| s < 0).count() % 2 == 1 {
            signs[0] = -signs[0];
        }
        let w = SignedPermutation::new(perm, signs).unwrap();
        let m = w.gamma16_isometry();
        prop_assert!(LambdaKind::Gamma16.data().is_isometry(&m));
        prop_assert_eq!(w.compose(&w.inverse()), SignedPermutation::identity(16));
    }
}
