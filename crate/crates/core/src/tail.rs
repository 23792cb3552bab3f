//! Limit extraction from the tail of a finite sequence.
//!
//! A value is declared convergent along a residue class `j ≡ s (mod r)`
//! when the last `window` members of that class agree within `tol`. Moduli
//! are tried in increasing order, then residues, so alternating sequences
//! pick up their convergent branch.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailConfig {
    pub window: usize,
    pub tol: f64,
    pub max_modulus: usize,
    /// Fit `a + b/n` over the window and report `a`; otherwise report the
    /// last member.
    pub extrapolate: bool,
}

impl Default for TailConfig {
    fn default() -> Self {
        TailConfig { window: 5, tol: 1e-6, max_modulus: 4, extrapolate: true }
    }
}

/// Which subsequence produced a limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subsequence {
    pub modulus: usize,
    pub residue: usize,
    /// Sequence parameters of the window members.
    pub members: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extracted<T> {
    pub value: T,
    pub subsequence: Subsequence,
}

/// Least-squares intercept of `v ≈ a + b/n`.
fn intercept(values: &[f64], params: &[f64]) -> f64 {
    let k = values.len() as f64;
    let xs: Vec<f64> = params.iter().map(|n| 1.0 / n).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = values.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) || !sxx.is_finite() {
        return *values.last().expect("non-empty window");
    }
    let sxy: f64 = xs.iter().zip(values).map(|(x, y)| (x - mx) * (y - my)).sum();
    my - sxy / sxx * mx
}

/// Indices of the last `window` members of each residue class, in the
/// order classes are tried.
fn classes(len: usize, cfg: &TailConfig) -> impl Iterator<Item = (usize, usize, Vec<usize>)> + '_ {
    (1..=cfg.max_modulus.max(1)).flat_map(move |r| {
        (0..r).filter_map(move |s| {
            let mut idx: Vec<usize> = (0..len).rev().filter(|j| j % r == s).take(cfg.window).collect();
            idx.reverse();
            (idx.len() == cfg.window.max(1)).then_some((r, s, idx))
        })
    })
}

/// Limit of a real sequence; `params[j]` is the sequence parameter of
/// member `j` (used for the `a + b/n` fit).
pub fn extract(values: &[f64], params: &[f64], cfg: &TailConfig) -> Option<Extracted<f64>> {
    assert_eq!(values.len(), params.len());
    for (modulus, residue, idx) in classes(values.len(), cfg) {
        let w: Vec<f64> = idx.iter().map(|&j| values[j]).collect();
        let p: Vec<f64> = idx.iter().map(|&j| params[j]).collect();
        let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if hi - lo <= cfg.tol {
            let value = if cfg.extrapolate { intercept(&w, &p) } else { *w.last().unwrap() };
            return Some(Extracted { value, subsequence: Subsequence { modulus, residue, members: p } });
        }
    }
    None
}

/// As [`extract`] for values that may be absent (`None` = `−∞`). A window
/// that is entirely absent converges to `None`.
pub fn extract_optional(values: &[Option<f64>], params: &[f64], cfg: &TailConfig) -> Option<Extracted<Option<f64>>> {
    assert_eq!(values.len(), params.len());
    for (modulus, residue, idx) in classes(values.len(), cfg) {
        let p: Vec<f64> = idx.iter().map(|&j| params[j]).collect();
        let w: Vec<Option<f64>> = idx.iter().map(|&j| values[j]).collect();
        if w.iter().all(Option::is_none) {
            return Some(Extracted { value: None, subsequence: Subsequence { modulus, residue, members: p } });
        }
        if w.iter().all(Option::is_some) {
            let f: Vec<f64> = w.into_iter().flatten().collect();
            let (lo, hi) = f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            if hi - lo <= cfg.tol {
                let value = if cfg.extrapolate { intercept(&f, &p) } else { *f.last().unwrap() };
                return Some(Extracted { value: Some(value), subsequence: Subsequence { modulus, residue, members: p } });
            }
        }
    }
    None
}
