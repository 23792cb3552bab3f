#![allow(dead_code, clippy::needless_range_loop)]

use lgh::causet::CausalSet;
use lgh::geometry::{FiniteMetricFiber, ProductGenerator};
use lgh::time::{Finite, NegInf};
use lgh::{ExtendedTime, FiniteLorentzSpace};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `k / 2^bits` for a random `k` in `0..=max`.
pub fn dyadic(rng: &mut ChaCha8Rng, max: u32, bits: i32) -> f64 {
    f64::from(rng.gen_range(0..=max)) * 2f64.powi(-bits)
}

/// Longest-path closure of a random DAG on `0..n` with dyadic edge weights.
pub fn dag_matrix(rng: &mut ChaCha8Rng, n: usize, density: f64, bits: i32) -> Vec<Vec<ExtendedTime>> {
    let mut best: Vec<Vec<Option<f64>>> = vec![vec![None; n]; n];
    for (i, row) in best.iter_mut().enumerate() {
        row[i] = Some(0.0);
    }
    let mut edges = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges[i][j] = Some(dyadic(rng, 16, bits));
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            if let Some(w) = edges[k][j] {
                for i in 0..=k {
                    if let Some(b) = best[i][k] {
                        let cand = b + w;
                        if best[i][j].is_none_or(|c| cand > c) {
                            best[i][j] = Some(cand);
                        }
                    }
                }
            }
        }
    }
    best.into_iter().map(|r| r.into_iter().map(|v| v.map_or(NegInf, Finite)).collect()).collect()
}

pub fn dag_space(rng: &mut ChaCha8Rng, n: usize, density: f64) -> FiniteLorentzSpace {
    FiniteLorentzSpace::new(FiniteLorentzSpace::default_labels(n), dag_matrix(rng, n, density, 3)).unwrap()
}

/// Totally ordered points at increasing dyadic times.
pub fn chain_matrix(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<ExtendedTime>> {
    let mut t = vec![0.0];
    for _ in 1..n {
        let last = *t.last().unwrap();
        t.push(last + dyadic(rng, 8, 2));
    }
    (0..n).map(|i| (0..n).map(|j| if j >= i { Finite(t[j] - t[i]) } else { NegInf }).collect()).collect()
}

pub fn random_causet(rng: &mut ChaCha8Rng, n: usize, density: f64) -> CausalSet {
    let covers = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(density)).collect();
    CausalSet::new((0..n).map(|i| format!("c{i}")).collect(), covers).unwrap()
}

/// Fiber made of points on a line at the given coordinates.
pub fn line_fiber(xs: &[f64]) -> FiniteMetricFiber {
    let d = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
    FiniteMetricFiber::new((0..xs.len()).map(|i| format!("s{i}")).collect(), d).unwrap()
}

/// 1+1 Minkowski restricted to a line fiber with `sites` points `spacing` apart.
pub fn minkowski(sites: usize, spacing: f64, t_range: (f64, f64)) -> ProductGenerator {
    ProductGenerator::new(FiniteMetricFiber::line(sites, spacing).unwrap(), 1.0, t_range).unwrap()
}

/// Closed-form proper time of `−C²dt² + dx²` between `(t, x)` and `(t', x')`.
pub fn flat_tau(c: f64, p: (f64, f64), q: (f64, f64)) -> Option<f64> {
    let dt = q.0 - p.0;
    let d = (q.1 - p.1).abs();
    (dt >= 0.0 && d <= c * dt + 1e-9).then(|| (c * c * dt * dt - d * d).max(0.0).sqrt())
}

/// Space on `n` points with zero diagonal, the listed finite entries and
/// `-inf` elsewhere.
pub fn sparse(n: usize, entries: &[(usize, usize, f64)]) -> lgh::Result<FiniteLorentzSpace> {
    let mut m = vec![vec![NegInf; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Finite(0.0);
    }
    for &(i, j, v) in entries {
        m[i][j] = Finite(v);
    }
    FiniteLorentzSpace::new(FiniteLorentzSpace::default_labels(n), m)
}

/// `a ≪ b ≪ c` with `ℓ(a,b) = ℓ(b,c) = 1`, `ℓ(a,c) = 2`.
pub fn chain3() -> FiniteLorentzSpace {
    sparse(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]).unwrap()
}
