//! Atomic measures, the measure induced on net vertices, pushforwards and
//! the measured limit builder.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nets::{verify_net, DiamondNet};
use crate::space::{FiniteLorentzSpace, LorentzSpace};
use crate::tail::{extract, Subsequence, TailConfig};

/// Finitely many point masses.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AtomicMeasure {
    weights: BTreeMap<usize, f64>,
}

impl AtomicMeasure {
    /// Zero weights are dropped.
    pub fn new(weights: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (x, w) in weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidValue(format!("weight {w} at atom {x}")));
            }
            if w > 0.0 {
                *out.entry(x).or_insert(0.0) += w;
            }
        }
        Ok(AtomicMeasure { weights: out })
    }

    /// Mass `w` on every point of `points`.
    pub fn uniform(points: &[usize], w: f64) -> Result<Self> {
        Self::new(points.iter().map(|&p| (p, w)))
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights.get(&x).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &BTreeMap<usize, f64> {
        &self.weights
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn mass_of(&self, subset: &[usize]) -> f64 {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        set.iter().map(|&x| self.weight(x)).sum()
    }

    /// Restriction to `subset`.
    pub fn restrict(&self, subset: &[usize]) -> AtomicMeasure {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        AtomicMeasure { weights: self.weights.iter().filter(|(x, _)| set.contains(x)).map(|(&x, &w)| (x, w)).collect() }
    }

    /// `{"weights": {"label": w, ...}}` keyed by point labels.
    pub fn to_json(&self, space: &FiniteLorentzSpace) -> MeasureJson {
        MeasureJson { weights: self.weights.iter().map(|(&x, &w)| (space.labels()[x].clone(), w)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub weights: BTreeMap<String, f64>,
}

impl MeasureJson {
    pub fn into_measure(self, space: &FiniteLorentzSpace) -> Result<AtomicMeasure> {
        let mut pairs = Vec::with_capacity(self.weights.len());
        for (label, w) in self.weights {
            let x = space.index_of(&label).ok_or_else(|| Error::InvalidValue(format!("unknown label {label}")))?;
            pairs.push((x, w));
        }
        AtomicMeasure::new(pairs)
    }
}

/// A net together with the measure it induces on its vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredNet {
    pub net: DiamondNet,
    pub induced: AtomicMeasure,
}

/// Each diamond in turn takes the mass of the part of `A` it covers first
/// and splits it evenly between its two vertices.
pub fn induce_net_measure(
    space: &FiniteLorentzSpace,
    m: &AtomicMeasure,
    subset: &[usize],
    net: &DiamondNet,
) -> Result<MeasuredNet> {
    for &x in subset {
        space.check_index(x)?;
    }
    let check = verify_net(space, subset, net);
    if !check.uncovered.is_empty() {
        return Err(Error::NetDoesNotCover(check.uncovered));
    }
    let mut left: BTreeSet<usize> = subset.iter().copied().collect();
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    for &(p, q) in &net.pairs {
        let taken: Vec<usize> = left.iter().copied().filter(|&x| space.in_diamond(p, q, x)).collect();
        let mass: f64 = taken.iter().map(|&x| m.weight(x)).sum();
        for x in &taken {
            left.remove(x);
        }
        if mass > 0.0 {
            *weights.entry(p).or_insert(0.0) += mass / 2.0;
            *weights.entry(q).or_insert(0.0) += mass / 2.0;
        }
    }
    Ok(MeasuredNet { net: net.clone(), induced: AtomicMeasure { weights } })
}

/// Transport every atom along `f`.
pub fn pushforward(f: impl Fn(usize) -> Option<usize>, m: &AtomicMeasure) -> Result<AtomicMeasure> {
    let mut out: BTreeMap<usize, f64> = BTreeMap::new();
    for (&x, &w) in &m.weights {
        let y = f(x).ok_or(Error::UnmappedAtom(x))?;
        *out.entry(y).or_insert(0.0) += w;
    }
    Ok(AtomicMeasure { weights: out })
}

/// `max_x |μ(x) − ν(x)|` over `universe`.
pub fn weak_gap(mu: &AtomicMeasure, nu: &AtomicMeasure, universe: &[usize]) -> Result<f64> {
    let set: BTreeSet<usize> = universe.iter().copied().collect();
    if let Some(&x) = mu.weights.keys().chain(nu.weights.keys()).find(|x| !set.contains(x)) {
        return Err(Error::SupportMismatch(x));
    }
    Ok(set.iter().map(|&x| (mu.weight(x) - nu.weight(x)).abs()).fold(0.0, f64::max))
}

/// Measures on the limit space indexed `[k][l][j]` for cover level `k`,
/// scale `l` and sequence member `j`.
#[derive(Clone, Debug)]
pub struct MeasureSchedule {
    /// Sequence parameter of each member.
    pub params: Vec<f64>,
    pub measures: Vec<Vec<Vec<AtomicMeasure>>>,
    /// Limit-space cover sets `U_k`.
    pub cover: Vec<Vec<usize>>,
    /// Mass bounds `C_k`: every total mass at level `k` must lie in `[1/C_k, C_k]`.
    pub mass_bounds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomLog {
    pub k: usize,
    pub atom: usize,
    pub subsequence: Subsequence,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredLimit {
    /// Limit measure per cover level; level `k` restricted to `U_{k-1}` is level `k-1`.
    pub levels: Vec<AtomicMeasure>,
    pub log: Vec<AtomLog>,
}

/// Per-atom limits of the deepest scale at each cover level. Atoms of
/// `U_{k-1}` keep the value found at level `k-1`.
pub fn measured_limit_builder(s: &MeasureSchedule, cfg: &TailConfig) -> Result<MeasuredLimit> {
    if s.measures.len() != s.cover.len() || s.mass_bounds.len() != s.cover.len() {
        return Err(Error::ShapeMismatch("measures, cover and mass bounds need one entry per level".into()));
    }
    let mut levels: Vec<AtomicMeasure> = Vec::new();
    let mut log = Vec::new();
    for (k, per_l) in s.measures.iter().enumerate() {
        let c = s.mass_bounds[k];
        for per_n in per_l {
            if per_n.len() != s.params.len() {
                return Err(Error::ShapeMismatch(format!("level {k} has {} members, expected {}", per_n.len(), s.params.len())));
            }
            if per_n.iter().any(|m| !(m.total() >= 1.0 / c && m.total() <= c)) {
                return Err(Error::UnboundedWeights(k));
            }
        }
        let deepest = per_l.last().ok_or_else(|| Error::ShapeMismatch(format!("level {k} has no scales")))?;
        let inner: BTreeSet<usize> = if k == 0 { BTreeSet::new() } else { s.cover[k - 1].iter().copied().collect() };
        let atoms: BTreeSet<usize> = deepest.iter().flat_map(|m| m.weights.keys().copied()).collect();
        let mut weights: BTreeMap<usize, f64> = match levels.last() {
            Some(prev) => prev.weights.clone(),
            None => BTreeMap::new(),
        };
        for &x in atoms.iter().filter(|x| !inner.contains(x)) {
            let seq: Vec<f64> = deepest.iter().map(|m| m.weight(x)).collect();
            let e = extract(&seq, &s.params, cfg).ok_or(Error::NonCauchy(k, x, s.params.len()))?;
            if e.value > 0.0 {
                weights.insert(x, e.value);
            }
            log.push(AtomLog { k, atom: x, subsequence: e.subsequence });
        }
        levels.push(AtomicMeasure::new(weights)?);
    }
    Ok(MeasuredLimit { levels, log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::{Finite, NegInf};

    fn chain3() -> FiniteLorentzSpace {
        let z = Finite(0.0);
        FiniteLorentzSpace::new(
            FiniteLorentzSpace::default_labels(3),
            vec![vec![z, Finite(1.0), Finite(2.0)], vec![NegInf, z, Finite(1.0)], vec![NegInf, NegInf, z]],
        )
        .unwrap()
    }

    #[test]
    fn two_diamond_split() {
        let s = chain3();
        let m = AtomicMeasure::new([(0, 0.25), (1, 0.35), (2, 0.4)]).unwrap();
        let net = DiamondNet::new(1.0, vec![(0, 1), (1, 2)]);
        let r = induce_net_measure(&s, &m, &[0, 1, 2], &net).unwrap();
        // residuals {0,1} (0.6) and {2} (0.4)
        assert!((r.induced.weight(0) - 0.3).abs() < 1e-15);
        assert!((r.induced.weight(1) - 0.5).abs() < 1e-15);
        assert!((r.induced.weight(2) - 0.2).abs() < 1e-15);
        assert!((r.induced.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_diamond_halves() {
        let s = chain3();
        let m = AtomicMeasure::uniform(&[0, 1, 2], 1.0).unwrap();
        let r = induce_net_measure(&s, &m, &[0, 1, 2], &DiamondNet::new(2.0, vec![(0, 2)])).unwrap();
        assert_eq!(r.induced.weights().clone(), BTreeMap::from([(0, 1.5), (2, 1.5)]));
        let e = induce_net_measure(&s, &m, &[0, 1, 2], &DiamondNet::new(1.0, vec![(0, 1)])).unwrap_err();
        assert_eq!(e, Error::NetDoesNotCover(vec![2]));
    }

    #[test]
    fn pushforward_and_gap() {
        let m = AtomicMeasure::new([(0, 0.5), (1, 0.25)]).unwrap();
        assert_eq!(pushforward(Some, &m).unwrap(), m);
        let merged = pushforward(|_| Some(7), &m).unwrap();
        assert_eq!(merged.weight(7), 0.75);
        assert_eq!(pushforward(|x| (x == 0).then_some(0), &m).unwrap_err(), Error::UnmappedAtom(1));
        let n = AtomicMeasure::new([(0, 0.5), (1, 0.35)]).unwrap();
        assert!((weak_gap(&m, &n, &[0, 1]).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(weak_gap(&m, &m, &[0, 1]).unwrap(), 0.0);
        assert_eq!(weak_gap(&m, &n, &[0]).unwrap_err(), Error::SupportMismatch(1));
    }

    #[test]
    fn limit_of_alternating_weight() {
        let params: Vec<f64> = (2..=400).map(f64::from).collect();
        let measures: Vec<AtomicMeasure> = params
            .iter()
            .map(|&n| {
                let sign = if (n as u64).is_multiple_of(2) { 1.0 } else { -1.0 };
                AtomicMeasure::new([(0, 1.0 + sign / n)]).unwrap()
            })
            .collect();
        let s = MeasureSchedule { params, measures: vec![vec![measures]], cover: vec![vec![0]], mass_bounds: vec![3.0] };
        let lim = measured_limit_builder(&s, &TailConfig { tol: 1e-4, ..TailConfig::default() }).unwrap();
        assert!((lim.levels[0].weight(0) - 1.0).abs() < 1e-9);
        assert_eq!(lim.log[0].subsequence.modulus, 2);
    }

    #[test]
    fn mass_bound_violation() {
        let m = AtomicMeasure::new([(0, 5.0)]).unwrap();
        let s = MeasureSchedule { params: vec![1.0], measures: vec![vec![vec![m]]], cover: vec![vec![0]], mass_bounds: vec![2.0] };
        assert_eq!(measured_limit_builder(&s, &TailConfig::default()).unwrap_err(), Error::UnboundedWeights(0));
    }
}
