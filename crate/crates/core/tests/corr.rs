mod common;

use common::*;
use lgh::corr::{
    compose, distortion, heuristic_min_distortion, lgh_certificate, min_distortion, Correspondence, Distortion, HeuristicConfig,
    MatchingSource, Scheduled, SearchMode, EXACT_CAP,
};
use lgh::nets::{greedy_net, DiamondNet};
use lgh::Error;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn pair(v: f64) -> lgh::FiniteLorentzSpace {
    sparse(2, &[(0, 1, v)]).unwrap()
}

#[test]
fn identity_has_zero_distortion() {
    let mut r = rng(1);
    let s = dag_space(&mut r, 9, 0.5);
    let id = Correspondence::identity(&(0..9).collect::<Vec<_>>());
    assert_eq!(distortion(&id, &s, &s), Distortion::Finite(0.0));
}

#[test]
fn two_point_gaps() {
    let id = Correspondence::identity(&[0, 1]);
    let d = distortion(&id, &pair(1.0), &pair(1.2)).value();
    assert!((d - 0.2).abs() < 1e-15);
    let unrelated = sparse(2, &[]).unwrap();
    assert_eq!(distortion(&id, &pair(1.0), &unrelated), Distortion::InfGap);
    assert_eq!(serde_json::to_string(&Distortion::InfGap).unwrap(), "\"inf_gap\"");
}

#[test]
fn compose_with_identity() {
    let r = Correspondence::new(vec![(0, 1), (1, 0), (2, 0)]);
    let id = Correspondence::identity(&[0, 1]);
    assert_eq!(compose(&r, &id).unwrap(), r);
    assert_eq!(compose(&Correspondence::identity(&[0, 1, 2]), &r).unwrap(), r);
}

#[test]
fn exact_minimum_on_two_points() {
    let m = min_distortion(&pair(1.0), &pair(1.2), SearchMode::Exact).unwrap();
    assert!((m.distortion.value() - 0.2).abs() < 1e-15);
    assert_eq!(m.correspondence.pairs(), &[(0, 0), (1, 1)]);
    let same = min_distortion(&chain3(), &chain3(), SearchMode::Exact).unwrap();
    assert_eq!(same.distortion, Distortion::Finite(0.0));
}

#[test]
fn exact_cap() {
    let mut r = rng(2);
    let big = dag_space(&mut r, EXACT_CAP + 1, 0.5);
    let err = min_distortion(&big, &chain3(), SearchMode::Exact).unwrap_err();
    assert_eq!(err, Error::ExactCapExceeded(EXACT_CAP + 1, EXACT_CAP));
    assert!(err.to_string().starts_with("exact mode size cap exceeded"));
    assert!(min_distortion(&big, &chain3(), SearchMode::Heuristic { seed: 0 }).is_ok());
}

#[test]
fn heuristic_is_seed_deterministic() {
    let mut r = rng(3);
    let a = dag_space(&mut r, 12, 0.4);
    let b = dag_space(&mut r, 10, 0.4);
    let cfg = HeuristicConfig { seed: 9, ..Default::default() };
    assert_eq!(heuristic_min_distortion(&a, &b, &cfg, None), heuristic_min_distortion(&a, &b, &cfg, None));
}

fn schedule(space: &lgh::FiniteLorentzSpace) -> Vec<DiamondNet> {
    let all: Vec<usize> = (0..space.len()).collect();
    [2.0, 1.0].iter().map(|&e| greedy_net(space, &all, e, None).unwrap()).collect()
}

#[test]
fn constant_sequence_certificate() {
    let s = chain3();
    let nets = schedule(&s);
    let member = Scheduled { space: &s, nets: &nets };
    let seq = vec![member; 4];
    let rep = lgh_certificate(&seq, &member, &MatchingSource::Canonical, 1e-12).unwrap();
    assert!(rep.stages.iter().all(|st| st.distortion == Distortion::Finite(0.0)));
    assert!(rep.strong && rep.distortion_monotone && rep.extension_ok);
}

#[test]
fn cardinality_mismatch() {
    let s = chain3();
    let nets = schedule(&s);
    let mut bad = nets.clone();
    bad[1].pairs.pop();
    let limit = Scheduled { space: &s, nets: &nets };
    let seq = vec![limit, Scheduled { space: &s, nets: &bad }];
    let err = lgh_certificate(&seq, &limit, &MatchingSource::Canonical, 1e-12).unwrap_err();
    assert_eq!(err, Error::CardinalityMismatch { l: 1, n: 1 });
}

fn random_corr(r: &mut impl Rng, n: usize, m: usize) -> Correspondence {
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|x| (x, r.gen_range(0..m))).collect();
    pairs.extend((0..m).map(|y| (r.gen_range(0..n), y)));
    Correspondence::new(pairs)
}

/// Distortion straight from its definition.
fn oracle(c: &Correspondence, a: &lgh::FiniteLorentzSpace, b: &lgh::FiniteLorentzSpace) -> f64 {
    let mut worst = 0.0f64;
    for &(x, y) in c.pairs() {
        for &(x2, y2) in c.pairs() {
            let (u, v) = (a.ell(x, x2), b.ell(y, y2));
            worst = worst.max(match (u.value(), v.value()) {
                (Some(p), Some(q)) => (p - q).abs(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            });
        }
    }
    worst
}

use lgh::LorentzSpace;

proptest! {
    #[test]
    fn distortion_matches_definition_and_inverse(seed in any::<u64>(), n in 1usize..8, m in 1usize..8) {
        let mut r = rng(seed);
        let a = dag_space(&mut r, n, 0.6);
        let b = dag_space(&mut r, m, 0.6);
        let c = random_corr(&mut r, n, m);
        let d = distortion(&c, &a, &b);
        prop_assert_eq!(d.value(), oracle(&c, &a, &b));
        prop_assert_eq!(d, distortion(&c.inverse(), &b, &a));
    }

    #[test]
    fn exact_is_a_lower_bound(seed in any::<u64>(), n in 1usize..6, m in 1usize..6) {
        let mut r = rng(seed);
        let a = dag_space(&mut r, n, 0.6);
        let b = dag_space(&mut r, m, 0.6);
        let exact = min_distortion(&a, &b, SearchMode::Exact).unwrap();
        prop_assert_eq!(exact.distortion, distortion(&exact.correspondence, &a, &b));
        let heur = min_distortion(&a, &b, SearchMode::Heuristic { seed }).unwrap();
        prop_assert!(exact.distortion.value() <= heur.distortion.value());
        for _ in 0..10 {
            prop_assert!(exact.distortion.value() <= distortion(&random_corr(&mut r, n, m), &a, &b).value());
        }
    }

    #[test]
    fn isometric_copies_match_exactly(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let a = dag_space(&mut r, n, 0.6);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let b = a.restrict(&perm).unwrap();
        prop_assert_eq!(min_distortion(&a, &b, SearchMode::Exact).unwrap().distortion, Distortion::Finite(0.0));
    }
}
