mod common;

use common::*;
use lgh::causet::{chain_ell, faithful_embed_check, hauptvermutung_trial, sprinkle, CausalSet, EmbedMode};
use lgh::geometry::{sample_points, FiniteMetricFiber, ProductGenerator, SamplePoint};
use lgh::time::{Finite, NegInf};
use lgh::{Error, LorentzSpace};
use proptest::prelude::*;

fn poset(n: usize, covers: &[(usize, usize)]) -> CausalSet {
    CausalSet::new((0..n).map(|i| format!("c{i}")).collect(), covers.to_vec()).unwrap()
}

#[test]
fn chain_lengths() {
    let s = chain_ell(&poset(3, &[(0, 1), (1, 2)])).unwrap();
    assert_eq!((s.ell(0, 1), s.ell(1, 2), s.ell(0, 2)), (Finite(1.0), Finite(1.0), Finite(2.0)));
    assert_eq!(s.ell(2, 0), NegInf);

    let anti = chain_ell(&poset(4, &[])).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(anti.ell(i, j), if i == j { Finite(0.0) } else { NegInf });
        }
    }

    let diamond = chain_ell(&poset(4, &[(0, 1), (0, 2), (1, 3), (2, 3)])).unwrap();
    assert_eq!(diamond.ell(0, 3), Finite(2.0));
    assert_eq!(diamond.ell(1, 2), NegInf);
}

#[test]
fn cycles_are_rejected() {
    let err = CausalSet::new(vec!["a".into(), "b".into()], vec![(0, 1), (1, 0)]).unwrap_err();
    assert!(matches!(err, Error::CycleDetected(_)));
}

fn unit_minkowski() -> ProductGenerator {
    ProductGenerator::new(FiniteMetricFiber::line(21, 0.05).unwrap(), 1.0, (0.0, 1.0)).unwrap()
}

#[test]
fn single_sprinkle() {
    let s = sprinkle(&unit_minkowski(), (0.0, 1.0), 1, 0).unwrap();
    assert_eq!(s.causet.len(), 1);
    assert!(s.causet.covers.is_empty());
    assert_eq!(sprinkle(&unit_minkowski(), (1.0, 1.0), 3, 0).unwrap_err(), Error::EmptyRegion);
}

fn density(c: &CausalSet) -> f64 {
    let up = c.up_sets().unwrap();
    let n = c.len();
    let related: usize = (0..n).map(|x| up[x].ones().filter(|&y| y != x).count()).sum();
    related as f64 / (n * (n - 1) / 2) as f64
}

#[test]
fn sprinkle_density_and_seeds() {
    let g = unit_minkowski();
    let a = sprinkle(&g, (0.0, 1.0), 500, 1).unwrap();
    let d = density(&a.causet);
    assert!(d > 0.0 && d < 1.0, "{d}");
    let again = sprinkle(&g, (0.0, 1.0), 500, 1).unwrap();
    assert_eq!(a.causet, again.causet);
    assert_eq!(a.sites, again.sites);
    let other = sprinkle(&g, (0.0, 1.0), 500, 2).unwrap();
    assert_eq!(other.causet.len(), 500);
    assert_ne!(a.causet.covers, other.causet.covers);
}

#[test]
fn sprinkled_order_embeds_faithfully() {
    let g = unit_minkowski();
    let sp = sprinkle(&g, (0.0, 1.0), 120, 3).unwrap();
    let s = sample_points(&g, sp.sites.clone()).unwrap().space;
    let id: Vec<usize> = (0..120).collect();
    assert!(faithful_embed_check(&sp.causet, &s, &id, EmbedMode::Bidirectional).unwrap().faithful);
}

#[test]
fn collapsing_map_breaks_reverse_direction() {
    // Elements 0 and 1 are incomparable but land on causally related points.
    let c = poset(2, &[]);
    let g = ProductGenerator::new(line_fiber(&[0.0]), 1.0, (0.0, 1.0)).unwrap();
    let s = sample_points(&g, vec![SamplePoint { t: 0.0, site: 0 }, SamplePoint { t: 1.0, site: 0 }]).unwrap().space;
    let rep = faithful_embed_check(&c, &s, &[0, 1], EmbedMode::Bidirectional).unwrap();
    assert!(rep.forward.is_empty());
    assert_eq!(rep.reverse, vec![(0, 1)]);
    assert!(!rep.faithful);
    assert!(faithful_embed_check(&c, &s, &[0, 1], EmbedMode::OneDirectional).unwrap().faithful);
}

#[test]
fn antichain_into_antichain() {
    let c = poset(3, &[]);
    let g = ProductGenerator::new(line_fiber(&[0.0, 1.0, 2.0]), 1.0, (0.0, 1.0)).unwrap();
    let pts = (0..3).map(|site| SamplePoint { t: 0.0, site }).collect();
    let s = sample_points(&g, pts).unwrap().space;
    assert!(faithful_embed_check(&c, &s, &[0, 1, 2], EmbedMode::Bidirectional).unwrap().faithful);
}

#[test]
fn trial_rows() {
    let g = unit_minkowski();
    let same = hauptvermutung_trial(&g, &g, (0.0, 1.0), &[40], 5).unwrap();
    assert_eq!(same.rows.len(), 1);
    assert!(same.rows[0].distortion.value() <= 1e-9 && same.rows[0].faithful_in_b);
    let wide = ProductGenerator::new(g.fiber.scaled(1.1).unwrap(), 1.0, g.t_range).unwrap();
    let rep = hauptvermutung_trial(&g, &wide, (0.0, 1.0), &[200], 5).unwrap();
    assert!(rep.rows[0].transport_distortion.value() >= 0.02);
    let short = ProductGenerator::new(FiniteMetricFiber::line(3, 0.05).unwrap(), 1.0, (0.0, 1.0)).unwrap();
    assert!(matches!(hauptvermutung_trial(&g, &short, (0.0, 1.0), &[5], 0), Err(Error::SizeMismatch(21, 3))));
}

/// Longest chain by depth-first enumeration of every chain.
fn longest(covers: &[(usize, usize)], from: usize, to: usize) -> Option<usize> {
    if from == to {
        return Some(0);
    }
    covers.iter().filter(|&&(a, _)| a == from).filter_map(|&(_, b)| longest(covers, b, to).map(|l| l + 1)).max()
}

proptest! {
    #[test]
    fn chain_ell_matches_enumeration(seed in any::<u64>(), n in 1usize..9, density in 0.0f64..0.8) {
        let mut r = rng(seed);
        let c = random_causet(&mut r, n, density);
        let s = chain_ell(&c).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(s.ell(i, j).value(), longest(&c.covers, i, j).map(|l| l as f64));
            }
        }
    }

    #[test]
    fn sprinkled_covers_are_irreducible(seed in any::<u64>(), count in 1usize..60) {
        let sp = sprinkle(&unit_minkowski(), (0.0, 1.0), count, seed).unwrap();
        let s = chain_ell(&sp.causet).unwrap();
        for &(a, b) in &sp.causet.covers {
            prop_assert_eq!(s.ell(a, b), Finite(1.0));
        }
    }
}
