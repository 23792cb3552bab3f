//! Finite Lorentzian pre-length spaces.
//!
//! A [`FiniteLorentzSpace`] is a labeled point set with a dense `ℓ`-matrix.
//! Both axioms (non-negative diagonal, reverse triangle inequality) are
//! checked at construction, and the causal/chronological relation tables
//! are cached as bitsets so that downstream code only does lookups.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{AxiomViolation, Error, Result};
use crate::time::{ExtendedTime, NegInf};

/// Default tolerance for spaces whose entries come from floating-point sampling.
pub const SAMPLED_TOL: f64 = 1e-9;

/// Read access to a time separation function on `0..len()`.
///
/// Implemented by the dense [`FiniteLorentzSpace`] and by lazy views
/// (e.g. product samples too large to tabulate).
pub trait LorentzSpace {
    fn len(&self) -> usize;
    fn ell(&self, i: usize, j: usize) -> ExtendedTime;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn tau(&self, i: usize, j: usize) -> f64 {
        self.ell(i, j).tau()
    }
    fn causal(&self, i: usize, j: usize) -> bool {
        self.ell(i, j).is_causal()
    }
    fn chronological(&self, i: usize, j: usize) -> bool {
        self.ell(i, j).is_timelike()
    }
    /// `x ∈ J(p, q)`.
    fn in_diamond(&self, p: usize, q: usize, x: usize) -> bool {
        self.causal(p, x) && self.causal(x, q)
    }
}

#[derive(Clone, Debug)]
pub struct FiniteLorentzSpace {
    labels: Vec<String>,
    ell: Vec<ExtendedTime>,
    tol: f64,
    j_plus: Vec<FixedBitSet>,
    j_minus: Vec<FixedBitSet>,
    i_plus: Vec<FixedBitSet>,
    i_minus: Vec<FixedBitSet>,
}

impl LorentzSpace for FiniteLorentzSpace {
    fn len(&self) -> usize {
        self.labels.len()
    }
    fn ell(&self, i: usize, j: usize) -> ExtendedTime {
        self.ell[i * self.labels.len() + j]
    }
    fn causal(&self, i: usize, j: usize) -> bool {
        self.j_plus[i].contains(j)
    }
    fn chronological(&self, i: usize, j: usize) -> bool {
        self.i_plus[i].contains(j)
    }
}

impl FiniteLorentzSpace {
    /// Build with exact comparisons.
    pub fn new(labels: Vec<String>, ell: Vec<Vec<ExtendedTime>>) -> Result<Self> {
        Self::with_tolerance(labels, ell, 0.0)
    }

    /// Build with an absolute tolerance used by the reverse triangle check
    /// and by every later equality test on `ℓ`-values.
    pub fn with_tolerance(labels: Vec<String>, ell: Vec<Vec<ExtendedTime>>, tol: f64) -> Result<Self> {
        let n = labels.len();
        if ell.len() != n || ell.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "{} labels but matrix rows have lengths {:?}",
                n,
                ell.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        let flat = ell.into_iter().flatten().collect();
        Self::from_flat(labels, flat, tol)
    }

    /// Build from a row-major `n*n` vector.
    pub fn from_flat(labels: Vec<String>, ell: Vec<ExtendedTime>, tol: f64) -> Result<Self> {
        let n = labels.len();
        if ell.len() != n * n {
            return Err(Error::ShapeMismatch(format!("{} labels but {} matrix entries", n, ell.len())));
        }
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidValue(format!("tolerance {tol}")));
        }
        for v in &ell {
            if let ExtendedTime::Finite(x) = v {
                if !(x.is_finite() && *x >= 0.0) {
                    return Err(Error::InvalidValue(format!("time value {x} outside [0, inf)")));
                }
            }
        }
        let mut space = FiniteLorentzSpace {
            labels,
            ell,
            tol,
            j_plus: Vec::new(),
            j_minus: Vec::new(),
            i_plus: Vec::new(),
            i_minus: Vec::new(),
        };
        space.build_tables();
        if let Some(v) = space.first_violation() {
            return Err(v.into());
        }
        Ok(space)
    }

    /// Default labels `x0, x1, ...`.
    pub fn default_labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    fn build_tables(&mut self) {
        let n = self.labels.len();
        let mut j_plus = vec![FixedBitSet::with_capacity(n); n];
        let mut j_minus = vec![FixedBitSet::with_capacity(n); n];
        let mut i_plus = vec![FixedBitSet::with_capacity(n); n];
        let mut i_minus = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in 0..n {
                let v = self.ell[i * n + j];
                if v.is_causal() {
                    j_plus[i].insert(j);
                    j_minus[j].insert(i);
                }
                if v.is_timelike() {
                    i_plus[i].insert(j);
                    i_minus[j].insert(i);
                }
            }
        }
        self.j_plus = j_plus;
        self.j_minus = j_minus;
        self.i_plus = i_plus;
        self.i_minus = i_minus;
    }

    /// First axiom violation in scan order, if any.
    fn first_violation(&self) -> Option<AxiomViolation> {
        let n = self.len();
        for i in 0..n {
            if self.ell(i, i).is_neg_inf() {
                return Some(AxiomViolation::Diagonal { index: i });
            }
        }
        for x in 0..n {
            for y in self.j_plus[x].ones() {
                let xy = self.ell(x, y);
                for z in self.j_plus[y].ones() {
                    if !(xy + self.ell(y, z)).le_tol(self.ell(x, z), self.tol) {
                        return Some(AxiomViolation::ReverseTriangle { x, y, z });
                    }
                }
            }
        }
        None
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn row(&self, i: usize) -> &[ExtendedTime] {
        let n = self.len();
        &self.ell[i * n..(i + 1) * n]
    }

    pub fn matrix(&self) -> Vec<Vec<ExtendedTime>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn j_plus(&self, i: usize) -> &FixedBitSet {
        &self.j_plus[i]
    }
    pub fn j_minus(&self, i: usize) -> &FixedBitSet {
        &self.j_minus[i]
    }
    pub fn i_plus(&self, i: usize) -> &FixedBitSet {
        &self.i_plus[i]
    }
    pub fn i_minus(&self, i: usize) -> &FixedBitSet {
        &self.i_minus[i]
    }

    /// `J(p, q) = J⁺(p) ∩ J⁻(q)`.
    pub fn diamond(&self, p: usize, q: usize) -> FixedBitSet {
        let mut d = self.j_plus[p].clone();
        d.intersect_with(&self.j_minus[q]);
        d
    }

    /// `I(p, q) = I⁺(p) ∩ I⁻(q)`.
    pub fn chrono_diamond(&self, p: usize, q: usize) -> FixedBitSet {
        let mut d = self.i_plus[p].clone();
        d.intersect_with(&self.i_minus[q]);
        d
    }

    /// Subspace on `points` (in the given order), keeping labels and tolerance.
    pub fn restrict(&self, points: &[usize]) -> Result<Self> {
        for &p in points {
            self.check_index(p)?;
        }
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        let ell = points.iter().flat_map(|&i| points.iter().map(move |&j| (i, j))).map(|(i, j)| self.ell(i, j)).collect();
        Self::from_flat(labels, ell, self.tol)
    }

    /// Same points with `ℓ` multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidValue(format!("scale {lambda}")));
        }
        let ell = self.ell.iter().map(|v| v.scale(lambda)).collect();
        Self::from_flat(self.labels.clone(), ell, self.tol * lambda.max(1.0))
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.len() })
        }
    }

    pub fn to_json(&self) -> SpaceJson {
        SpaceJson { labels: self.labels.clone(), ell: self.matrix() }
    }
}

/// `{"labels":[...], "ell":[[...]]}` with `-inf` written as the string `"-inf"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpaceJson {
    pub labels: Vec<String>,
    pub ell: Vec<Vec<ExtendedTime>>,
}

impl SpaceJson {
    pub fn into_space(self, tol: f64) -> Result<FiniteLorentzSpace> {
        FiniteLorentzSpace::with_tolerance(self.labels, self.ell, tol)
    }
}

/// Witness of a failed causality condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CausalityWitness {
    /// `ℓ(i,i) > 0`.
    NotChronological { point: usize },
    /// `a ≤ b ≤ a` with `a ≠ b`.
    CausalCycle { a: usize, b: usize },
    /// Distinct points with identical rows and columns.
    Indistinguishable { a: usize, b: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CausalityReport {
    pub chronological: bool,
    pub causal: bool,
    pub pdp: bool,
    pub witnesses: Vec<CausalityWitness>,
}

fn indistinguishable(space: &FiniteLorentzSpace, a: usize, b: usize, tol: f64) -> bool {
    (0..space.len()).all(|z| {
        space.ell(a, z).approx_eq(space.ell(b, z), tol) && space.ell(z, a).approx_eq(space.ell(z, b), tol)
    })
}

/// Exhaustive scan of the chronological, causal and point-distinction conditions.
pub fn causality_class(space: &FiniteLorentzSpace) -> CausalityReport {
    let n = space.len();
    let mut witnesses = Vec::new();
    for i in 0..n {
        if space.ell(i, i).is_timelike() {
            witnesses.push(CausalityWitness::NotChronological { point: i });
        }
    }
    let chronological = witnesses.is_empty();
    let mut causal = true;
    for a in 0..n {
        for b in space.j_plus(a).ones().filter(|&b| b > a) {
            if space.causal(b, a) {
                causal = false;
                witnesses.push(CausalityWitness::CausalCycle { a, b });
            }
        }
    }
    let mut pdp = true;
    for a in 0..n {
        for b in a + 1..n {
            if indistinguishable(space, a, b, space.tolerance()) {
                pdp = false;
                witnesses.push(CausalityWitness::Indistinguishable { a, b });
            }
        }
    }
    CausalityReport { chronological, causal, pdp, witnesses }
}

/// Quotient by `τ`-indistinguishability.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: FiniteLorentzSpace,
    /// Original point → class index.
    pub projection: Vec<usize>,
    /// Class index → representative (lowest original index).
    pub representatives: Vec<usize>,
}

impl Quotient {
    pub fn is_identity(&self) -> bool {
        self.projection.iter().enumerate().all(|(i, &c)| i == c)
    }
}

/// Identify points with identical `ℓ`-rows and `ℓ`-columns.
///
/// Classes are scanned in index order; the lowest index of each class is its
/// representative and supplies the quotient's `ℓ`-values.
pub fn quotient_tau_indistinguishable(space: &FiniteLorentzSpace) -> Quotient {
    let n = space.len();
    let tol = space.tolerance();
    let mut projection = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    for i in 0..n {
        if projection[i] != usize::MAX {
            continue;
        }
        let class = representatives.len();
        representatives.push(i);
        projection[i] = class;
        for j in i + 1..n {
            if projection[j] == usize::MAX && indistinguishable(space, i, j, tol) {
                projection[j] = class;
            }
        }
    }
    // Restriction of a valid space is valid, so this cannot fail.
    let quotient = space.restrict(&representatives).expect("restriction of a valid space");
    Quotient { space: quotient, projection, representatives }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SpecialPoints {
    /// Spacelike boundary: unrelated to every other point.
    pub i0: Option<usize>,
    /// Future null infinity: `ℓ(x, n) = 0`, `ℓ(n, x) = -inf` for all other `x`.
    pub n_plus: Option<usize>,
    /// Past null infinity, the time dual of `n_plus`.
    pub n_minus: Option<usize>,
}

pub fn classify_special_points(space: &FiniteLorentzSpace) -> Result<SpecialPoints> {
    if !causality_class(space).pdp {
        return Err(Error::PrePdpRequired);
    }
    let n = space.len();
    let zero = ExtendedTime::ZERO;
    let tol = space.tolerance();
    let is = |p: usize, into: ExtendedTime, out: ExtendedTime| {
        space.ell(p, p).approx_eq(zero, tol)
            && (0..n).filter(|&x| x != p).all(|x| space.ell(x, p).approx_eq(into, tol) && space.ell(p, x).approx_eq(out, tol))
    };
    let find = |into, out| (0..n).find(|&p| is(p, into, out));
    Ok(SpecialPoints { i0: find(NegInf, NegInf), n_plus: find(zero, NegInf), n_minus: find(NegInf, zero) })
}

/// `sup_{x,y ∈ subset} τ(x, y)`.
pub fn timelike_diameter<S: LorentzSpace + ?Sized>(space: &S, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut best = 0.0f64;
    for &x in subset {
        for &y in subset {
            best = best.max(space.tau(x, y));
        }
    }
    Ok(best)
}

/// Result of [`isometry_search`].
#[derive(Clone, Debug, PartialEq)]
pub enum IsometryOutcome {
    /// Exhaustive search ran: `Some(f)` maps point `i` of `a` to `f[i]` of `b`.
    Exact(Option<Vec<usize>>),
    /// Spaces exceed the cap; the heuristic min-distortion correspondence is
    /// reported instead (distortion 0 is evidence of an isometry).
    Evidence { pairs: Vec<(usize, usize)>, distortion: crate::corr::Distortion },
}

/// Search for an `ℓ`-preserving bijection between equal-size spaces.
pub fn isometry_search(a: &FiniteLorentzSpace, b: &FiniteLorentzSpace, cap: usize) -> Result<IsometryOutcome> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    if a.len() > cap {
        let m = crate::corr::min_distortion(a, b, crate::corr::SearchMode::Heuristic { seed: 0 })?;
        return Ok(IsometryOutcome::Evidence { pairs: m.correspondence.pairs().to_vec(), distortion: m.distortion });
    }
    Ok(IsometryOutcome::Exact(exact_isometry(a, b)))
}

fn signature(space: &FiniteLorentzSpace, i: usize) -> (Vec<ExtendedTime>, Vec<ExtendedTime>) {
    let n = space.len();
    let mut row: Vec<_> = (0..n).map(|j| space.ell(i, j)).collect();
    let mut col: Vec<_> = (0..n).map(|j| space.ell(j, i)).collect();
    row.sort_by(ExtendedTime::total_cmp);
    col.sort_by(ExtendedTime::total_cmp);
    (row, col)
}

fn sig_match(a: &(Vec<ExtendedTime>, Vec<ExtendedTime>), b: &(Vec<ExtendedTime>, Vec<ExtendedTime>), tol: f64) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| x.approx_eq(*y, tol)) && a.1.iter().zip(&b.1).all(|(x, y)| x.approx_eq(*y, tol))
}

fn exact_isometry(a: &FiniteLorentzSpace, b: &FiniteLorentzSpace) -> Option<Vec<usize>> {
    let n = a.len();
    let tol = a.tolerance().max(b.tolerance());
    let sa: Vec<_> = (0..n).map(|i| signature(a, i)).collect();
    let sb: Vec<_> = (0..n).map(|i| signature(b, i)).collect();
    let candidates: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| sig_match(&sa[i], &sb[j], tol)).collect()).collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    // Most constrained points first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (candidates[i].len(), i));
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    #[allow(clippy::too_many_arguments)]
    fn extend(
        depth: usize,
        order: &[usize],
        candidates: &[Vec<usize>],
        a: &FiniteLorentzSpace,
        b: &FiniteLorentzSpace,
        tol: f64,
        image: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&x) = order.get(depth) else { return true };
        for &y in &candidates[x] {
            if used[y] {
                continue;
            }
            let consistent = order[..depth].iter().all(|&x2| {
                let y2 = image[x2];
                a.ell(x, x2).approx_eq(b.ell(y, y2), tol) && a.ell(x2, x).approx_eq(b.ell(y2, y), tol)
            }) && a.ell(x, x).approx_eq(b.ell(y, y), tol);
            if !consistent {
                continue;
            }
            image[x] = y;
            used[y] = true;
            if extend(depth + 1, order, candidates, a, b, tol, image, used) {
                return true;
            }
            used[y] = false;
            image[x] = usize::MAX;
        }
        false
    }

    extend(0, &order, &candidates, a, b, tol, &mut image, &mut used).then_some(image)
}

/// A pointed space with an increasing cover `U_0 ⊆ U_1 ⊆ ...` exhausting it.
#[derive(Clone, Debug)]
pub struct CoveredFiniteSpace {
    pub space: FiniteLorentzSpace,
    pub basepoint: usize,
    pub cover: Vec<Vec<usize>>,
}

impl CoveredFiniteSpace {
    pub fn new(space: FiniteLorentzSpace, basepoint: usize, cover: Vec<Vec<usize>>) -> Result<Self> {
        space.check_index(basepoint)?;
        if cover.is_empty() {
            return Err(Error::InvalidValue("cover has no sets".into()));
        }
        let mut cover: Vec<Vec<usize>> = cover
            .into_iter()
            .map(|mut u| {
                u.sort_unstable();
                u.dedup();
                u
            })
            .collect();
        for (k, u) in cover.iter().enumerate() {
            for &p in u {
                space.check_index(p)?;
            }
            if u.binary_search(&basepoint).is_err() {
                return Err(Error::InvalidValue(format!("basepoint missing from cover set {k}")));
            }
            if k > 0 && !cover[k - 1].iter().all(|p| u.binary_search(p).is_ok()) {
                return Err(Error::InvalidValue(format!("cover set {} not contained in set {k}", k - 1)));
            }
        }
        if cover.last().map(Vec::len) != Some(space.len()) {
            return Err(Error::InvalidValue("cover does not exhaust the space".into()));
        }
        cover.shrink_to_fit();
        Ok(CoveredFiniteSpace { space, basepoint, cover })
    }

    /// Single cover set equal to the whole space.
    pub fn trivial(space: FiniteLorentzSpace, basepoint: usize) -> Result<Self> {
        let all = (0..space.len()).collect();
        Self::new(space, basepoint, vec![all])
    }

    pub fn to_json(&self) -> CoveredJson {
        CoveredJson { space: self.space.to_json(), basepoint: self.basepoint, cover: self.cover.clone() }
    }
}

/// `{"space": {...}, "basepoint": o, "cover": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveredJson {
    pub space: SpaceJson,
    pub basepoint: usize,
    pub cover: Vec<Vec<usize>>,
}

impl CoveredJson {
    pub fn into_covered(self, tol: f64) -> Result<CoveredFiniteSpace> {
        CoveredFiniteSpace::new(self.space.into_space(tol)?, self.basepoint, self.cover)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Finite;

    fn labels(n: usize) -> Vec<String> {
        FiniteLorentzSpace::default_labels(n)
    }

    pub(crate) fn chain3(ac: f64) -> Result<FiniteLorentzSpace> {
        let z = Finite(0.0);
        FiniteLorentzSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![z, Finite(1.0), Finite(ac)], vec![NegInf, z, Finite(1.0)], vec![NegInf, NegInf, z]],
        )
    }

    #[test]
    fn chain_saturating_reverse_triangle_is_valid() {
        let s = chain3(2.0).unwrap();
        assert!(s.causal(0, 2) && s.chronological(0, 1) && !s.causal(2, 0));
        assert_eq!(s.diamond(0, 2).ones().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn short_long_side_is_rejected_with_triple() {
        let err = chain3(1.5).unwrap_err();
        assert_eq!(err, Error::Axiom(AxiomViolation::ReverseTriangle { x: 0, y: 1, z: 2 }));
    }

    #[test]
    fn neg_inf_plus_finite_is_neg_inf() {
        let z = Finite(0.0);
        let s = FiniteLorentzSpace::new(
            labels(3),
            vec![vec![z, NegInf, NegInf], vec![NegInf, z, Finite(3.0)], vec![NegInf, NegInf, z]],
        );
        assert!(s.is_ok());
    }

    #[test]
    fn negative_diagonal_and_shape_errors() {
        let e = FiniteLorentzSpace::new(labels(1), vec![vec![NegInf]]).unwrap_err();
        assert_eq!(e, Error::Axiom(AxiomViolation::Diagonal { index: 0 }));
        let e = FiniteLorentzSpace::new(labels(2), vec![vec![Finite(0.0)]]).unwrap_err();
        assert!(matches!(e, Error::ShapeMismatch(_)));
    }

    #[test]
    fn causality_of_chain_and_symmetric_pair() {
        let r = causality_class(&chain3(2.0).unwrap());
        assert!(r.chronological && r.causal && r.pdp && r.witnesses.is_empty());

        let z = Finite(0.0);
        let s = FiniteLorentzSpace::new(labels(2), vec![vec![z, z], vec![z, z]]).unwrap();
        let r = causality_class(&s);
        assert!(!r.causal);
        assert!(r.witnesses.contains(&CausalityWitness::CausalCycle { a: 0, b: 1 }));
    }

    #[test]
    fn duplicated_point_breaks_pdp_and_quotients_away() {
        let z = Finite(0.0);
        // a < b, b' a copy of b
        let s = FiniteLorentzSpace::new(
            vec!["a".into(), "b".into(), "b'".into()],
            vec![vec![z, Finite(1.0), Finite(1.0)], vec![NegInf, z, z], vec![NegInf, z, z]],
        )
        .unwrap();
        let r = causality_class(&s);
        assert!(!r.pdp && !r.causal);
        assert!(r.witnesses.contains(&CausalityWitness::Indistinguishable { a: 1, b: 2 }));
        let q = quotient_tau_indistinguishable(&s);
        assert_eq!(q.space.len(), 2);
        assert_eq!(q.projection, vec![0, 1, 1]);
        let rq = causality_class(&q.space);
        assert!(rq.pdp && rq.causal);
        assert!(quotient_tau_indistinguishable(&q.space).is_identity());
    }

    #[test]
    fn quotient_of_pdp_space_is_identity() {
        let q = quotient_tau_indistinguishable(&chain3(2.0).unwrap());
        assert!(q.is_identity());
    }

    #[test]
    fn special_points() {
        let z = Finite(0.0);
        // 0, 1, 2 pairwise unrelated, 3 reached by null from all.
        let s = FiniteLorentzSpace::new(
            labels(4),
            vec![
                vec![z, NegInf, NegInf, z],
                vec![NegInf, z, NegInf, z],
                vec![NegInf, NegInf, z, z],
                vec![NegInf, NegInf, NegInf, z],
            ],
        )
        .unwrap();
        let sp = classify_special_points(&s).unwrap();
        assert_eq!(sp.i0, None);
        assert_eq!(sp.n_plus, Some(3));
        assert_eq!(sp.n_minus, None);

        let iso = FiniteLorentzSpace::new(labels(2), vec![vec![z, NegInf], vec![NegInf, z]]).unwrap();
        // Two isolated points are distinguishable by their diagonals; both look like i0
        // but only the first is reported.
        assert_eq!(classify_special_points(&iso).unwrap().i0, Some(0));
        let dup = FiniteLorentzSpace::new(labels(2), vec![vec![z, z], vec![z, z]]).unwrap();
        assert_eq!(classify_special_points(&dup), Err(Error::PrePdpRequired));
    }

    #[test]
    fn diameter() {
        let s = chain3(2.0).unwrap();
        assert_eq!(timelike_diameter(&s, &[0, 1, 2]).unwrap(), 2.0);
        assert_eq!(timelike_diameter(&s, &[1]).unwrap(), 0.0);
        assert_eq!(timelike_diameter(&s, &[]), Err(Error::EmptySubset));
    }

    #[test]
    fn isometry_finds_permutation_and_rejects_scaled() {
        let s = chain3(2.0).unwrap();
        let perm = [2usize, 0, 1];
        let mut m = vec![vec![NegInf; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[perm[i]][perm[j]] = s.ell(i, j);
            }
        }
        let t = FiniteLorentzSpace::new(labels(3), m).unwrap();
        assert_eq!(isometry_search(&s, &t, 10).unwrap(), IsometryOutcome::Exact(Some(perm.to_vec())));

        let z = Finite(0.0);
        let one = FiniteLorentzSpace::new(labels(2), vec![vec![z, Finite(1.0)], vec![NegInf, z]]).unwrap();
        let two = FiniteLorentzSpace::new(labels(2), vec![vec![z, Finite(2.0)], vec![NegInf, z]]).unwrap();
        assert_eq!(isometry_search(&one, &two, 10).unwrap(), IsometryOutcome::Exact(None));
        assert_eq!(isometry_search(&one, &s, 10), Err(Error::SizeMismatch(2, 3)));
    }

    #[test]
    fn covered_space_checks_nesting() {
        let s = chain3(2.0).unwrap();
        assert!(CoveredFiniteSpace::new(s.clone(), 1, vec![vec![1], vec![0, 1, 2]]).is_ok());
        assert!(CoveredFiniteSpace::new(s.clone(), 1, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(CoveredFiniteSpace::new(s.clone(), 0, vec![vec![1], vec![0, 1, 2]]).is_err());
        assert!(CoveredFiniteSpace::new(s, 1, vec![vec![1, 2]]).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let z = Finite(0.0);
        let v = 0.1f64 + 0.2;
        let s = FiniteLorentzSpace::new(labels(2), vec![vec![z, Finite(v)], vec![NegInf, z]]).unwrap();
        let text = serde_json::to_string(&s.to_json()).unwrap();
        assert!(text.contains("\"-inf\""));
        let back: SpaceJson = serde_json::from_str(&text).unwrap();
        let t = back.into_space(0.0).unwrap();
        assert_eq!(t.ell(0, 1).value().unwrap().to_bits(), v.to_bits());
    }
}
