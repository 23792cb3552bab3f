//! Diagonal limits of covered sequences at finite truncation, forward
//! completeness, blow-ups and tangent experiments.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nets::{doubling_constant, net_growth_profile, CandidateFilter, DiamondNet, Doubling};
use crate::space::{timelike_diameter, CoveredFiniteSpace, FiniteLorentzSpace, LorentzSpace};
use crate::tail::{extract_optional, Subsequence, TailConfig};
use crate::time::{Finite, NegInf};

/// A covered space with nets `nets[l][k]` for scale `l` and cover set `k`.
#[derive(Clone, Debug)]
pub struct ScheduledMember {
    pub covered: CoveredFiniteSpace,
    pub nets: Vec<Vec<DiamondNet>>,
}

impl ScheduledMember {
    /// Greedy nets for every cover set at each of `epsilons`.
    pub fn greedy(covered: CoveredFiniteSpace, epsilons: &[f64], filter: CandidateFilter) -> Result<Self> {
        let nets = net_growth_profile(&covered, epsilons, filter)?.nets;
        Ok(ScheduledMember { covered, nets })
    }
}

/// A sequence of scheduled members that may be produced on demand.
pub trait SequenceSource {
    fn len(&self) -> usize;
    fn member(&self, j: usize) -> Result<ScheduledMember>;
    /// Sequence parameter of member `j` (used by the tail fit).
    fn parameter(&self, j: usize) -> f64 {
        (j + 1) as f64
    }
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Members held in memory.
#[derive(Clone, Debug)]
pub struct VecSource {
    pub members: Vec<ScheduledMember>,
    pub params: Option<Vec<f64>>,
}

impl SequenceSource for VecSource {
    fn len(&self) -> usize {
        self.members.len()
    }
    fn member(&self, j: usize) -> Result<ScheduledMember> {
        Ok(self.members[j].clone())
    }
    fn parameter(&self, j: usize) -> f64 {
        self.params.as_ref().map_or((j + 1) as f64, |p| p[j])
    }
}

/// Members built by a closure.
pub struct FnSource<F> {
    pub len: usize,
    pub build: F,
}

impl<F: Fn(usize) -> Result<ScheduledMember>> SequenceSource for FnSource<F> {
    fn len(&self) -> usize {
        self.len
    }
    fn member(&self, j: usize) -> Result<ScheduledMember> {
        (self.build)(j)
    }
}

/// Truncation: cover sets `k < levels`, scales `l < scales`, members `j < members`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Depth {
    pub levels: usize,
    pub scales: usize,
    pub members: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitConfig {
    pub tail: TailConfig,
    /// Tolerance of the validation run on the limit space.
    pub validate_tol: f64,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig { tail: TailConfig::default(), validate_tol: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Past,
    Future,
}

/// Where a limit point comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Slot {
    Basepoint,
    Vertex { l: usize, k: usize, i: usize, end: End },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryLog {
    pub i: usize,
    pub j: usize,
    pub subsequence: Subsequence,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    /// Slots merged into each limit point.
    pub slots: Vec<Vec<Slot>>,
    /// Member indices whose values entered the tail.
    pub tail_members: Vec<usize>,
    pub entries: Vec<EntryLog>,
}

#[derive(Clone, Debug)]
pub struct DiagonalLimit {
    pub covered: CoveredFiniteSpace,
    pub provenance: Provenance,
}

fn slot_label(s: &Slot) -> String {
    match s {
        Slot::Basepoint => "o".into(),
        Slot::Vertex { l, k, i, end } => {
            format!("v{l}.{k}.{i}{}", if *end == End::Past { "-" } else { "+" })
        }
    }
}

fn check_schedule(members: &[(usize, ScheduledMember)], depth: &Depth) -> Result<()> {
    let (j0, first) = &members[0];
    for (j, m) in members {
        if m.nets.len() < depth.scales {
            return Err(Error::ScheduleViolation(format!("member {j} has {} scales, need {}", m.nets.len(), depth.scales)));
        }
        for l in 0..depth.scales {
            if m.nets[l].len() < depth.levels || m.covered.cover.len() < depth.levels {
                return Err(Error::ScheduleViolation(format!("member {j} has fewer than {} cover levels", depth.levels)));
            }
            for k in 0..depth.levels {
                let here = &m.nets[l][k];
                if here.len() != first.nets[l][k].len() {
                    return Err(Error::ScheduleViolation(format!(
                        "net ({l},{k}) has {} diamonds in member {j} but {} in member {j0}",
                        here.len(),
                        first.nets[l][k].len()
                    )));
                }
                if k > 0 && !m.nets[l][k - 1].pairs.iter().all(|p| here.pairs.contains(p)) {
                    return Err(Error::ScheduleViolation(format!("nets ({l},{}) and ({l},{k}) of member {j} not nested", k - 1)));
                }
                let n = m.covered.space.len();
                if here.pairs.iter().any(|&(p, q)| p >= n || q >= n) {
                    return Err(Error::ScheduleViolation(format!("net ({l},{k}) of member {j} has an out-of-range vertex")));
                }
            }
        }
    }
    Ok(())
}

/// Limit points are the net vertices and the basepoint; slots that name the
/// same member point throughout the tail are merged. Each `ℓ` entry is the
/// tail limit of the corresponding member entries.
pub fn diagonal_limit<S: SequenceSource + ?Sized>(seq: &S, depth: Depth, cfg: &LimitConfig) -> Result<DiagonalLimit> {
    let n = depth.members.min(seq.len());
    if n == 0 || depth.levels == 0 || depth.scales == 0 {
        return Err(Error::ScheduleViolation("empty truncation".into()));
    }
    let span = cfg.tail.window.max(1) * cfg.tail.max_modulus.max(1);
    let start = n.saturating_sub(span);
    let members: Vec<(usize, ScheduledMember)> =
        (start..n).map(|j| seq.member(j).map(|m| (j, m))).collect::<Result<_>>()?;
    check_schedule(&members, &depth)?;

    let mut slots = vec![Slot::Basepoint];
    let first = &members[0].1;
    for l in 0..depth.scales {
        for k in 0..depth.levels {
            for i in 0..first.nets[l][k].len() {
                for end in [End::Past, End::Future] {
                    slots.push(Slot::Vertex { l, k, i, end });
                }
            }
        }
    }
    let resolve = |m: &ScheduledMember, s: &Slot| match *s {
        Slot::Basepoint => m.covered.basepoint,
        Slot::Vertex { l, k, i, end } => {
            let (p, q) = m.nets[l][k].pairs[i];
            if end == End::Past { p } else { q }
        }
    };
    let mut by_key: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut merged: Vec<Vec<Slot>> = Vec::new();
    let mut points: Vec<Vec<usize>> = Vec::new();
    for s in &slots {
        let key: Vec<usize> = members.iter().map(|(_, m)| resolve(m, s)).collect();
        match by_key.get(&key) {
            Some(&idx) => merged[idx].push(*s),
            None => {
                by_key.insert(key.clone(), merged.len());
                merged.push(vec![*s]);
                points.push(key);
            }
        }
    }

    let params: Vec<f64> = members.iter().map(|(j, _)| seq.parameter(*j)).collect();
    let np = points.len();
    let mut ell = vec![NegInf; np * np];
    let mut entries = Vec::with_capacity(np * np);
    for a in 0..np {
        for b in 0..np {
            let values: Vec<Option<f64>> =
                members.iter().enumerate().map(|(t, (_, m))| m.covered.space.ell(points[a][t], points[b][t]).value()).collect();
            let e = extract_optional(&values, &params, &cfg.tail).ok_or(Error::NonCauchy(a, b, n))?;
            ell[a * np + b] = e.value.map_or(NegInf, Finite);
            entries.push(EntryLog { i: a, j: b, subsequence: e.subsequence });
        }
    }
    let labels = merged.iter().map(|s| slot_label(&s[0])).collect();
    let space = FiniteLorentzSpace::from_flat(labels, ell, cfg.validate_tol)?;

    let level = |s: &[Slot]| {
        s.iter()
            .map(|x| match x {
                Slot::Basepoint => 0,
                Slot::Vertex { k, .. } => *k,
            })
            .min()
            .unwrap_or(0)
    };
    let cover = (0..depth.levels).map(|k| (0..np).filter(|&p| level(&merged[p]) <= k).collect()).collect();
    let covered = CoveredFiniteSpace::new(space, 0, cover)?;
    Ok(DiagonalLimit {
        covered,
        provenance: Provenance { slots: merged, tail_members: members.iter().map(|(j, _)| *j).collect(), entries },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForwardCompleteness {
    pub complete: bool,
    /// `x ≤ y ≤ x` with `x ≠ y`.
    pub witness: Option<(usize, usize)>,
}

/// On a finite discrete space every monotone bounded sequence stabilises
/// unless it can alternate along a nontrivial causal cycle.
pub fn forward_complete_check(space: &FiniteLorentzSpace) -> ForwardCompleteness {
    let n = space.len();
    for x in 0..n {
        for y in space.j_plus(x).ones() {
            if y != x && space.causal(y, x) {
                return ForwardCompleteness { complete: false, witness: Some((x.min(y), x.max(y))) };
            }
        }
    }
    ForwardCompleteness { complete: true, witness: None }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowupSpec {
    pub o: usize,
    pub o_minus: usize,
    pub o_plus: usize,
    pub lambda: f64,
}

#[derive(Clone, Debug)]
pub struct BlowUp {
    pub covered: CoveredFiniteSpace,
    /// Host index of each blow-up point.
    pub points: Vec<usize>,
}

/// `I(o⁻, o⁺)` with `ℓ` scaled by `λ`.
pub fn blow_up(covered: &CoveredFiniteSpace, spec: &BlowupSpec) -> Result<BlowUp> {
    let s = &covered.space;
    for p in [spec.o, spec.o_minus, spec.o_plus] {
        s.check_index(p)?;
    }
    if !(spec.lambda > 0.0 && spec.lambda.is_finite()) {
        return Err(Error::SpecViolated(format!("lambda {} is not a positive real", spec.lambda)));
    }
    if !s.chronological(spec.o_minus, spec.o) {
        return Err(Error::SpecViolated("o_minus is not in the chronological past of o".into()));
    }
    if !s.chronological(spec.o, spec.o_plus) {
        return Err(Error::SpecViolated("o_plus is not in the chronological future of o".into()));
    }
    let tau = s.tau(spec.o_minus, spec.o_plus);
    if !(tau < 1.0 / spec.lambda) {
        return Err(Error::SpecViolated(format!("tau(o_minus, o_plus) = {tau} is not below 1/lambda")));
    }
    let points: Vec<usize> = s.chrono_diamond(spec.o_minus, spec.o_plus).ones().collect();
    restrict_scaled(covered, &points, spec.o, spec.lambda)
}

fn restrict_scaled(covered: &CoveredFiniteSpace, points: &[usize], o: usize, lambda: f64) -> Result<BlowUp> {
    let space = covered.space.restrict(points)?.scaled(lambda)?;
    let local: BTreeMap<usize, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let cover = covered.cover.iter().map(|u| u.iter().filter_map(|p| local.get(p).copied()).chain([local[&o]]).collect()).collect();
    Ok(BlowUp { covered: CoveredFiniteSpace::new(space, local[&o], cover)?, points: points.to_vec() })
}

/// Admissible pair with the largest `τ(o⁻, o⁺) < 1/λ`; ties go to the larger
/// diamond, then to the smaller indices. `Ok(None)` when `o` has no
/// chronological past or future at all.
pub fn select_basepoints(space: &FiniteLorentzSpace, o: usize, lambda: f64) -> Result<Option<(usize, usize)>> {
    space.check_index(o)?;
    let past: Vec<usize> = space.i_minus(o).ones().collect();
    let future: Vec<usize> = space.i_plus(o).ones().collect();
    if past.is_empty() || future.is_empty() {
        return Ok(None);
    }
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for &a in &past {
        for &b in &future {
            let t = space.tau(a, b);
            if !(t < 1.0 / lambda) {
                continue;
            }
            let size = space.chrono_diamond(a, b).count_ones(..);
            let better = match best {
                None => true,
                Some((bt, bs, _, _)) => t > bt || (t == bt && size > bs),
            };
            if better {
                best = Some((t, size, a, b));
            }
        }
    }
    match best {
        Some((_, _, a, b)) => Ok(Some((a, b))),
        None => Err(Error::NoAdmissibleBasepoints(lambda)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentConfig {
    /// Net scales `1, 1/2, ..., 2^{1-halvings}`.
    pub halvings: usize,
    pub limit: LimitConfig,
}

impl Default for TangentConfig {
    fn default() -> Self {
        TangentConfig {
            halvings: 3,
            limit: LimitConfig { tail: TailConfig { window: 3, tol: 1e-6, max_modulus: 1, extrapolate: false }, validate_tol: 1e-6 },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentRow {
    pub lambda: f64,
    pub o_minus: Option<usize>,
    pub o_plus: Option<usize>,
    pub size: usize,
    pub diameter: f64,
    pub doubling: Doubling,
    /// `cardinalities[l][k]` for scale `2^{-l}` and cover set `k`.
    pub cardinalities: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct TangentReport {
    pub rows: Vec<TangentRow>,
    pub limit: Option<DiagonalLimit>,
    /// Why no limit candidate was formed.
    pub limit_note: Option<String>,
}

/// Resampled host at scale `λ` and the basepoint to blow up around.
pub type Resample<'a> = &'a dyn Fn(f64) -> Result<(CoveredFiniteSpace, usize)>;

/// Blow up around `o` for each `λ`, with halving nets on every blow-up.
/// The blow-ups are fed to [`diagonal_limit`] when their schedules agree.
pub fn tangent_experiment(
    space: &CoveredFiniteSpace,
    o: usize,
    lambdas: &[f64],
    resample: Option<Resample<'_>>,
    cfg: &TangentConfig,
) -> Result<TangentReport> {
    if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidValue("lambdas must be strictly increasing".into()));
    }
    let epsilons: Vec<f64> = (0..cfg.halvings.max(1)).map(|h| 0.5f64.powi(h as i32)).collect();
    let mut rows = Vec::new();
    let mut members = Vec::new();
    for &lambda in lambdas {
        let (host, base) = match resample {
            Some(f) => f(lambda)?,
            None => (space.clone(), o),
        };
        let pick = select_basepoints(&host.space, base, lambda)?;
        let blown = match pick {
            Some((a, b)) => blow_up(&host, &BlowupSpec { o: base, o_minus: a, o_plus: b, lambda })?,
            None => restrict_scaled(&host, &[base], base, lambda)?,
        };
        let all: Vec<usize> = (0..blown.covered.space.len()).collect();
        let member = ScheduledMember::greedy(blown.covered, &epsilons, CandidateFilter::All)?;
        rows.push(TangentRow {
            lambda,
            o_minus: pick.map(|p| p.0),
            o_plus: pick.map(|p| p.1),
            size: all.len(),
            diameter: timelike_diameter(&member.covered.space, &all)?,
            doubling: doubling_constant(&member.covered.space, &all)?,
            cardinalities: member.nets.iter().map(|per_k| per_k.iter().map(DiamondNet::len).collect()).collect(),
        });
        members.push(member);
    }
    let (limit, limit_note) = if resample.is_none() {
        (None, Some("no resampling generator; blow-ups of one finite sample do not form a sequence".into()))
    } else if members.len() < cfg.limit.tail.window {
        (None, Some(format!("{} blow-ups, tail window needs {}", members.len(), cfg.limit.tail.window)))
    } else {
        let levels = members.iter().map(|m| m.covered.cover.len()).min().unwrap_or(1);
        let source = VecSource { members, params: Some(lambdas.to_vec()) };
        let depth = Depth { levels, scales: epsilons.len(), members: source.len() };
        match diagonal_limit(&source, depth, &cfg.limit) {
            Ok(l) => (Some(l), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    Ok(TangentReport { rows, limit, limit_note })
}

/// `ℓ` entries of `space` scaled by `1/diameter` (identity when the
/// diameter is zero).
pub fn normalized(space: &FiniteLorentzSpace) -> Result<FiniteLorentzSpace> {
    let all: Vec<usize> = (0..space.len()).collect();
    let d = timelike_diameter(space, &all)?;
    if d > 0.0 { space.scaled(1.0 / d) } else { Ok(space.clone()) }
}
