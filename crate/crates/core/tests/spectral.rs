mod common;

use proptest::prelude::*;
use rand::Rng;

use scf_core::group::{fourier, Group, GroupFunction};
use scf_core::spectral::{
    is_coordinated, is_sufficient, partial_sum, splitting_union, u_norm, AdmissibleFamily, BlockOrder, SufficientPair,
    SummationBasis,
};
use scf_core::{Error, IndexSet};

fn random_function(orders: &[usize], seed: u64) -> GroupFunction<f64> {
    let g = Group::new(orders).unwrap();
    let mut rng = common::rng(seed);
    GroupFunction::from_complex(
        &g,
        (0..g.len()).map(|_| num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_sums_are_idempotent_projections(n in 2usize..=40, seed in any::<u64>(), mask in any::<u64>()) {
        let f = random_function(&[n], seed);
        let b = IndexSet::from_predicate(n, |i| mask >> (i % 64) & 1 == 1);
        let once = partial_sum(&f, &b);
        let twice = partial_sum(&once, &b);
        prop_assert!((&once - &twice).norm_sup() <= 1e-12);
        let rest = partial_sum(&f, &b.complement());
        prop_assert!((&(&once + &rest) - &f).norm_sup() <= 1e-12);
        prop_assert!(fourier(&once).support(1e-12).is_subset(&b));
    }

    #[test]
    fn splitting_union_matches_definition(n in 2usize..=48, seed in any::<u64>()) {
        let g = Group::<f64>::new(&[n]).unwrap();
        let mut rng = common::rng(seed);
        let basis = SummationBasis::SymmetricInterval.enumerate(&g).unwrap();
        let e = IndexSet::from_predicate(n, |_| rng.gen_bool(0.15));
        let got = splitting_union(&e, &basis);
        // E_B for nested intervals is the largest member that splits E
        let mags: Vec<usize> = (0..n).map(|i| common::max_abs_coord(&[n], i)).collect();
        let lo = e.iter().map(|i| mags[i]).min();
        let hi = e.iter().map(|i| mags[i]).max();
        let expect = match (lo, hi) {
            (Some(lo), Some(hi)) if lo < hi => IndexSet::from_predicate(n, |i| mags[i] < hi),
            _ => IndexSet::empty(n),
        };
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn u_norm_dominates_sup_and_l1(n in 2usize..=32, seed in any::<u64>()) {
        let f = random_function(&[n], seed);
        let g = f.group().clone();
        let basis = SummationBasis::SymmetricInterval.enumerate(&g).unwrap();
        let (u, idx) = u_norm(&f, &basis);
        prop_assert!(idx.is_some());
        // the last member is all of Γ
        prop_assert!(u + 1e-12 >= f.norm_sup() + f.norm_l1());
        prop_assert!(u <= fourier(&f).norm_l1() + f.norm_l1() + 1e-12);
    }
}

#[test]
fn walsh_prefixes_are_paley_ordered() {
    let o = [2, 2, 2, 2, 2];
    let g = Group::<f64>::new(&o).unwrap();
    let basis = SummationBasis::WalshPrefix.enumerate(&g).unwrap();
    assert_eq!(basis.members.len(), 32);
    for (m, b) in basis.members.iter().enumerate() {
        let expect = IndexSet::from_predicate(32, |i| common::paley_rank(&o, i) <= m);
        assert_eq!(b, &expect);
    }
}

#[test]
fn basis_errors() {
    let g = Group::<f64>::new(&[8]).unwrap();
    let partial = SummationBasis::Explicit { sets: vec![vec![0, 1]] };
    assert!(matches!(partial.enumerate(&g), Err(Error::InvalidBasis(_))));
    let big = Group::<f64>::new(&[2; 10]).unwrap();
    assert!(matches!(
        SummationBasis::WalshPrefix.enumerate_with_cap(&big, 100),
        Err(Error::BasisNotEnumerable { cap: 100 })
    ));
}

#[test]
fn whole_dual_group_is_sufficient_and_coordinated() {
    let g = Group::<f64>::new(&[16]).unwrap();
    let all = IndexSet::full(16);
    let family = AdmissibleFamily::uniform(&g, 2);
    let pair = SufficientPair::new(all.clone(), all, family.clone());
    let rep = is_sufficient(&g, &pair);
    assert!(rep.sufficient);
    assert!(rep.first_failure().is_none());
    let basis = SummationBasis::SymmetricInterval.enumerate(&g).unwrap();
    let near = AdmissibleFamily::uniform(&g, 1).with_center_radius(0);
    assert!(is_coordinated(&g, &basis, &pair, &near).coordinated);
    // a probe far from 0 is split by every small interval, which strips the pair bare
    let far = is_coordinated(&g, &basis, &pair, &family);
    assert!(!far.coordinated);
    assert!(far.counterexample.is_some());
}

#[test]
fn narrow_gapped_pair_fails_with_a_witness_box() {
    let g = Group::<f64>::new(&[64]).unwrap();
    let pair = SufficientPair::gapped(&*g, &[(10, 12)], BlockOrder::Index, AdmissibleFamily::uniform(&g, 3));
    let rep = is_sufficient(&g, &pair);
    assert!(!rep.sufficient);
    let bad = rep.first_failure().expect("failing box");
    let e = bad.to_set(&*g);
    // no shift γ puts E − γ in R and E + γ in S
    for gm in 0..64 {
        let fits = e.iter().all(|x| pair.r.contains(g.sub(x, gm)) && pair.s.contains(g.add(x, gm)));
        assert!(!fits);
    }
}

#[test]
fn gapped_pair_is_symmetric() {
    let g = Group::<f64>::new(&[100]).unwrap();
    let pair = SufficientPair::gapped(&*g, &[(10, 20), (40, 45)], BlockOrder::Index, AdmissibleFamily::default_for(&g));
    assert_eq!(pair.r, g.negate_set(&pair.s));
    assert_eq!(pair.s.len(), 15);
}
