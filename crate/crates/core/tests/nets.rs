mod common;

use common::*;
use lgh::geometry::{sample_points, sample_spacetime, FiniteMetricFiber, ProductGenerator, SamplePlan, SamplePoint};
use lgh::nets::{doubling_constant, greedy_net, net_growth_profile, verify_net, CandidateFilter, DiamondNet};
use lgh::{CoveredFiniteSpace, Error, FiniteLorentzSpace, LorentzSpace};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn verify_single_diamond() {
    let s = chain3();
    let ok = verify_net(&s, &[1], &DiamondNet::new(2.0, vec![(0, 2)]));
    assert!(ok.ok && ok.uncovered.is_empty() && ok.oversized.is_empty());
    let small = verify_net(&s, &[1], &DiamondNet::new(1.0, vec![(0, 2)]));
    assert!(!small.ok);
    assert_eq!(small.oversized, vec![(0, 2)]);
}

#[test]
fn greedy_on_chain_and_point() {
    assert_eq!(greedy_net(&chain3(), &[0, 1, 2], 2.0, None).unwrap().pairs, vec![(0, 2)]);
    let point = sparse(1, &[]).unwrap();
    assert_eq!(greedy_net(&point, &[0], 0.3, None).unwrap().pairs, vec![(0, 0)]);
}

#[test]
fn greedy_reports_uncoverable_points() {
    let s = chain3();
    let err = greedy_net(&s, &[2], 1.0, Some(&[(0, 1)])).unwrap_err();
    assert_eq!(err, Error::Uncoverable(vec![2]));
}

/// Smallest number of admissible diamonds covering `subset`, by exhaustion.
fn optimum(space: &FiniteLorentzSpace, subset: &[usize], eps: f64) -> usize {
    let n = space.len();
    let masks: Vec<u32> = (0..n)
        .flat_map(|p| (0..n).map(move |q| (p, q)))
        .filter(|&(p, q)| space.causal(p, q) && space.tau(p, q) <= eps + 1e-12)
        .map(|(p, q)| subset.iter().enumerate().filter(|&(_, &x)| space.in_diamond(p, q, x)).fold(0, |m, (b, _)| m | 1 << b))
        .collect();
    let full = (1u32 << subset.len()) - 1;
    let mut best = vec![usize::MAX; 1 << subset.len()];
    best[0] = 0;
    for m in 0..=full as usize {
        if best[m] == usize::MAX {
            continue;
        }
        for &d in &masks {
            let t = m | d as usize;
            best[t] = best[t].min(best[m] + 1);
        }
    }
    best[full as usize]
}

#[test]
fn greedy_within_four_times_optimum_on_small_slabs() {
    let mut r = rng(11);
    for _ in 0..20 {
        let g = minkowski(4, 0.125, (0.0, 1.0));
        let pts: Vec<SamplePoint> =
            (0..r.gen_range(6..=12)).map(|_| SamplePoint { t: dyadic(&mut r, 8, 3), site: r.gen_range(0..4) }).collect();
        let Ok(s) = sample_points(&g, pts) else { continue };
        let all: Vec<usize> = (0..s.space.len()).collect();
        let net = greedy_net(&s.space, &all, 0.25, None).unwrap();
        let opt = optimum(&s.space, &all, 0.25);
        assert!(net.len() <= 4 * opt, "{} vs optimum {opt}", net.len());
        assert!(verify_net(&s.space, &all, &net).ok);
    }
}

#[test]
fn doubling_of_chain_and_point() {
    let d = doubling_constant(&chain3(), &[0, 1, 2]).unwrap();
    assert_eq!((d.constant, d.exact), (2, true));
    assert_eq!(doubling_constant(&sparse(1, &[]).unwrap(), &[0]).unwrap().constant, 1);
}

fn minkowski_diamond(sites: usize, step: f64) -> FiniteLorentzSpace {
    let g = minkowski(sites, step, (0.0, 1.0));
    let s = sample_spacetime(&g, &SamplePlan::grid(step)).unwrap();
    let mid = sites / 2;
    let find = |t: f64| s.points.iter().position(|p| p.site == mid && p.t == t).unwrap();
    let inside: Vec<usize> = s.space.diamond(find(0.0), find(1.0)).ones().collect();
    s.space.restrict(&inside).unwrap()
}

#[test]
fn doubling_stable_across_densities() {
    let coarse = minkowski_diamond(5, 0.25);
    let fine = minkowski_diamond(9, 0.125);
    let a = doubling_constant(&coarse, &(0..coarse.len()).collect::<Vec<_>>()).unwrap();
    let b = doubling_constant(&fine, &(0..fine.len()).collect::<Vec<_>>()).unwrap();
    assert!(a.constant.abs_diff(b.constant) <= 1, "{a:?} vs {b:?}");
}

#[test]
fn single_cover_gives_one_row_per_scale() {
    let c = CoveredFiniteSpace::trivial(chain3(), 1).unwrap();
    let t = net_growth_profile(&c, &[2.0, 1.0, 0.5], CandidateFilter::All).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert_eq!(t.rows.iter().map(|r| r.cardinality).collect::<Vec<_>>(), vec![1, 2, 3]);
}

#[test]
fn product_slab_growth_tracks_grid_estimate() {
    let fiber = FiniteMetricFiber::circle(8, 0.4).unwrap();
    let g = ProductGenerator::new(fiber.clone(), 1.0, (-2.0, 2.0)).unwrap();
    let s = sample_spacetime(&g, &SamplePlan::grid(0.125)).unwrap();
    let cover: Vec<Vec<usize>> =
        [1.0, 2.0].iter().map(|&k| (0..s.points.len()).filter(|&i| s.points[i].t.abs() <= k).collect()).collect();
    let base = s.points.iter().position(|p| p.t == 0.0 && p.site == 0).unwrap();
    let c = CoveredFiniteSpace::new(s.space, base, cover).unwrap();
    let eps = [1.0, 0.5];
    let t = net_growth_profile(&c, &eps, CandidateFilter::All).unwrap();
    // A sample point on the edge of U_k is covered only by a diamond with a
    // vertex there, so each boundary slice costs one diamond per site; a
    // column of diamonds per site is always enough.
    for row in &t.rows {
        let k = (row.k + 1) as f64;
        let column = ((2.0 * k) / row.epsilon).ceil() as usize * fiber.len();
        assert!(2 * fiber.len() <= row.cardinality && row.cardinality <= 2 * column, "{row:?} vs column bound {column}");
    }
}

proptest! {
    #[test]
    fn greedy_nets_verify(seed in any::<u64>(), n in 1usize..10, eps in 0.0f64..4.0) {
        let mut r = rng(seed);
        let s = dag_space(&mut r, n, 0.5);
        let all: Vec<usize> = (0..n).collect();
        let net = greedy_net(&s, &all, eps, None).unwrap();
        prop_assert!(verify_net(&s, &all, &net).ok);
    }

    #[test]
    fn halving_never_shrinks_nets(seed in any::<u64>(), n in 1usize..10) {
        let mut r = rng(seed);
        let s = dag_space(&mut r, n, 0.5);
        let c = CoveredFiniteSpace::trivial(s, 0).unwrap();
        let t = net_growth_profile(&c, &[4.0, 2.0, 1.0, 0.5, 0.25], CandidateFilter::All).unwrap();
        prop_assert!(t.rows.windows(2).all(|w| w[0].cardinality <= w[1].cardinality));
        for (e, per_k) in t.nets.iter().enumerate() {
            prop_assert!(verify_net(&c.space, &c.cover[0], &per_k[0]).ok);
            prop_assert_eq!(per_k[0].epsilon, [4.0, 2.0, 1.0, 0.5, 0.25][e]);
        }
    }
}
