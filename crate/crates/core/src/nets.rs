//! Causal-diamond ε-nets: verification, greedy construction, doubling
//! constants and nested growth profiles.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{CoveredFiniteSpace, FiniteLorentzSpace, LorentzSpace};

/// Relative slack on the `τ ≤ ε` size test; diamond sizes computed from
/// closed forms can overshoot by a few ulps.
pub const SIZE_TOL: f64 = 1e-9;

fn within(tau: f64, epsilon: f64) -> bool {
    tau <= epsilon + SIZE_TOL * epsilon.max(1.0)
}

/// Ordered list of diamonds `J(p, q)` with a common size bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondNet {
    pub epsilon: f64,
    pub pairs: Vec<(usize, usize)>,
}

impl DiamondNet {
    pub fn new(epsilon: f64, pairs: Vec<(usize, usize)>) -> Self {
        DiamondNet { epsilon, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Sorted, deduplicated vertex set.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pairs.iter().flat_map(|&(p, q)| [p, q]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Relabel vertices through `map`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> DiamondNet {
        DiamondNet { epsilon: self.epsilon, pairs: self.pairs.iter().map(|&(p, q)| (map(p), map(q))).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetCheck {
    pub ok: bool,
    pub uncovered: Vec<usize>,
    pub oversized: Vec<(usize, usize)>,
}

/// Check that every point of `subset` lies in some diamond of the net and
/// that every diamond is causal with `τ ≤ ε`.
pub fn verify_net<S: LorentzSpace + ?Sized>(space: &S, subset: &[usize], net: &DiamondNet) -> NetCheck {
    let oversized: Vec<_> = net
        .pairs
        .iter()
        .copied()
        .filter(|&(p, q)| !space.causal(p, q) || !within(space.tau(p, q), net.epsilon))
        .collect();
    let uncovered: Vec<_> =
        subset.iter().copied().filter(|&x| !net.pairs.iter().any(|&(p, q)| space.in_diamond(p, q, x))).collect();
    NetCheck { ok: uncovered.is_empty() && oversized.is_empty(), uncovered, oversized }
}

/// Which diamonds are admissible by default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateFilter {
    /// Every causal pair with `τ ≤ ε`, degenerate `(x, x)` included.
    #[default]
    All,
    /// Only chronological pairs (`τ > 0`).
    Chronological,
}

/// Admissible diamonds with both vertices in `vertices`, in `(p, q)` order.
pub fn candidate_pairs(
    space: &FiniteLorentzSpace,
    vertices: &[usize],
    epsilon: f64,
    filter: CandidateFilter,
) -> Vec<(usize, usize)> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::new();
    for &p in &sorted {
        for &q in &sorted {
            let v = space.ell(p, q);
            let ok = match filter {
                CandidateFilter::All => v.is_causal(),
                CandidateFilter::Chronological => v.is_timelike(),
            };
            if ok && within(v.tau(), epsilon) {
                out.push((p, q));
            }
        }
    }
    out
}

fn subset_mask(n: usize, subset: &[usize]) -> FixedBitSet {
    let mut m = FixedBitSet::with_capacity(n);
    for &x in subset {
        m.insert(x);
    }
    m
}

/// Greedy cover of `target` by the diamonds `cands`, after the diamonds in
/// `seed` have been taken. Ties go to the earliest candidate.
fn greedy_cover(
    space: &FiniteLorentzSpace,
    target: &FixedBitSet,
    seed: &[(usize, usize)],
    cands: &[(usize, usize)],
) -> std::result::Result<Vec<(usize, usize)>, Vec<usize>> {
    let mut uncovered = target.clone();
    let mut chosen = Vec::new();
    for &(p, q) in seed {
        uncovered.difference_with(&space.diamond(p, q));
        chosen.push((p, q));
    }
    let sets: Vec<FixedBitSet> = cands
        .iter()
        .map(|&(p, q)| {
            let mut d = space.diamond(p, q);
            d.intersect_with(target);
            d
        })
        .collect();
    let mut reach = FixedBitSet::with_capacity(space.len());
    for s in &sets {
        reach.union_with(s);
    }
    let missing: Vec<usize> = uncovered.difference(&reach).collect();
    if !missing.is_empty() {
        return Err(missing);
    }
    // Lazy greedy: gains only shrink, so a stale upper bound that still
    // beats every other bound is exact.
    let mut bound: Vec<usize> = sets.iter().map(|s| s.intersection_count(&uncovered)).collect();
    while !uncovered.is_clear() {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..sets.len() {
            if bound[i] == 0 || best.is_some_and(|(_, g)| bound[i] <= g) {
                continue;
            }
            let g = sets[i].intersection_count(&uncovered);
            bound[i] = g;
            if g > 0 && best.is_none_or(|(_, bg)| g > bg) {
                best = Some((i, g));
            }
        }
        let (i, _) = best.expect("reachable points always leave a positive gain");
        uncovered.difference_with(&sets[i]);
        chosen.push(cands[i]);
    }
    Ok(chosen)
}

/// Greedy ε-net of `subset`.
///
/// Candidates default to every admissible diamond with vertices anywhere in
/// the space.
pub fn greedy_net(
    space: &FiniteLorentzSpace,
    subset: &[usize],
    epsilon: f64,
    candidates: Option<&[(usize, usize)]>,
) -> Result<DiamondNet> {
    greedy_net_seeded(space, subset, epsilon, candidates, &[])
}

/// As [`greedy_net`], but the diamonds of `seed` are kept first.
pub fn greedy_net_seeded(
    space: &FiniteLorentzSpace,
    subset: &[usize],
    epsilon: f64,
    candidates: Option<&[(usize, usize)]>,
    seed: &[(usize, usize)],
) -> Result<DiamondNet> {
    for &x in subset {
        space.check_index(x)?;
    }
    let owned;
    let cands = match candidates {
        Some(c) => {
            for &(p, q) in c {
                space.check_index(p)?;
                space.check_index(q)?;
            }
            c
        }
        None => {
            let all: Vec<usize> = (0..space.len()).collect();
            owned = candidate_pairs(space, &all, epsilon, CandidateFilter::All);
            &owned
        }
    };
    let mut admissible: Vec<(usize, usize)> =
        cands.iter().copied().filter(|&(p, q)| space.causal(p, q) && within(space.tau(p, q), epsilon)).collect();
    admissible.sort_unstable();
    admissible.dedup();
    let target = subset_mask(space.len(), subset);
    let pairs = greedy_cover(space, &target, seed, &admissible).map_err(Error::Uncoverable)?;
    Ok(DiamondNet { epsilon, pairs })
}

/// Doubling estimate: the largest minimal half-size cover over all diamonds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Doubling {
    pub constant: usize,
    /// False when some diamond was too large for the exhaustive cover and
    /// the greedy count was used instead.
    pub exact: bool,
}

/// Diamonds with at most this many points get an exhaustive minimal cover.
pub const EXACT_DOUBLING_MAX: usize = 12;

fn exact_min_cover(points: &[usize], sets: &[FixedBitSet]) -> Option<usize> {
    let k = points.len();
    let full = (1u32 << k) - 1;
    let mut masks: Vec<u32> = sets
        .iter()
        .map(|s| points.iter().enumerate().filter(|(_, &p)| s.contains(p)).fold(0u32, |m, (i, _)| m | (1 << i)))
        .filter(|&m| m != 0)
        .collect();
    masks.sort_unstable();
    masks.dedup();
    let mut dist = vec![u8::MAX; 1 << k];
    dist[0] = 0;
    let mut frontier = vec![0u32];
    let mut depth = 0u8;
    while !frontier.is_empty() {
        if dist[full as usize] != u8::MAX {
            return Some(dist[full as usize] as usize);
        }
        depth += 1;
        let mut next = Vec::new();
        for &m in &frontier {
            for &s in &masks {
                let t = (m | s) as usize;
                if dist[t] == u8::MAX {
                    dist[t] = depth;
                    next.push(t as u32);
                }
            }
        }
        frontier = next;
    }
    (dist[full as usize] != u8::MAX).then(|| dist[full as usize] as usize)
}

/// Smallest `N` such that each diamond `J(x, y)` with `x, y ∈ subset` is
/// covered (inside `subset`) by `N` diamonds of `τ ≤ τ(x, y) / 2` with
/// vertices in `subset`.
pub fn doubling_constant(space: &FiniteLorentzSpace, subset: &[usize]) -> Result<Doubling> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    for &x in subset {
        space.check_index(x)?;
    }
    let mut verts = subset.to_vec();
    verts.sort_unstable();
    verts.dedup();
    let mask = subset_mask(space.len(), &verts);
    let mut all = candidate_pairs(space, &verts, f64::INFINITY, CandidateFilter::All);
    all.sort_by(|a, b| space.tau(a.0, a.1).total_cmp(&space.tau(b.0, b.1)).then(a.cmp(b)));
    let sets: Vec<FixedBitSet> = all
        .iter()
        .map(|&(p, q)| {
            let mut d = space.diamond(p, q);
            d.intersect_with(&mask);
            d
        })
        .collect();

    let mut constant = 1;
    let mut exact = true;
    for &(x, y) in &all {
        let mut target = space.diamond(x, y);
        target.intersect_with(&mask);
        let half = space.tau(x, y) / 2.0;
        let end = all.partition_point(|&(p, q)| within(space.tau(p, q), half));
        let relevant: Vec<usize> = (0..end).filter(|&i| !sets[i].is_disjoint(&target)).collect();
        let points: Vec<usize> = target.ones().collect();
        let n = if points.len() <= EXACT_DOUBLING_MAX {
            let local: Vec<FixedBitSet> = relevant.iter().map(|&i| sets[i].clone()).collect();
            exact_min_cover(&points, &local).ok_or_else(|| Error::Uncoverable(uncovered(&target, &local)))?
        } else {
            exact = false;
            let local: Vec<(usize, usize)> = relevant.iter().map(|&i| all[i]).collect();
            greedy_cover(space, &target, &[], &local).map_err(Error::Uncoverable)?.len()
        };
        constant = constant.max(n);
    }
    Ok(Doubling { constant, exact })
}

fn uncovered(target: &FixedBitSet, sets: &[FixedBitSet]) -> Vec<usize> {
    let mut left = target.clone();
    for s in sets {
        left.difference_with(s);
    }
    left.ones().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub k: usize,
    pub epsilon: f64,
    pub cardinality: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NetGrowthTable {
    pub rows: Vec<GrowthRow>,
    /// `nets[e][k]` is the net for `epsilons[e]` on cover set `k`.
    #[serde(skip)]
    pub nets: Vec<Vec<DiamondNet>>,
}

/// Greedy nets for every cover set and scale; the net of `U_k` starts from
/// the net of `U_{k-1}` so vertex sets are nested in `k`.
pub fn net_growth_profile(
    covered: &CoveredFiniteSpace,
    epsilons: &[f64],
    filter: CandidateFilter,
) -> Result<NetGrowthTable> {
    let space = &covered.space;
    let mut rows = Vec::new();
    let mut nets = Vec::new();
    for &eps in epsilons {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidValue(format!("epsilon {eps}")));
        }
        let mut per_k: Vec<DiamondNet> = Vec::new();
        for u in &covered.cover {
            let cands = candidate_pairs(space, u, eps, filter);
            let seed = per_k.last().map(|n| n.pairs.clone()).unwrap_or_default();
            let net = greedy_net_seeded(space, u, eps, Some(&cands), &seed)?;
            per_k.push(net);
        }
        nets.push(per_k);
    }
    // A finer net is also a coarser one; reuse it wherever greedy did worse,
    // column by column so the nesting in k survives.
    let mut order: Vec<usize> = (0..epsilons.len()).collect();
    order.sort_by(|&a, &b| epsilons[a].total_cmp(&epsilons[b]));
    for w in 1..order.len() {
        let (fine, coarse) = (order[w - 1], order[w]);
        if nets[coarse].iter().zip(&nets[fine]).any(|(c, f)| c.len() > f.len()) {
            nets[coarse] = nets[fine].iter().map(|f| DiamondNet::new(epsilons[coarse], f.pairs.clone())).collect();
        }
    }
    for (e, per_k) in nets.iter().enumerate() {
        for (k, net) in per_k.iter().enumerate() {
            rows.push(GrowthRow { k, epsilon: epsilons[e], cardinality: net.len() });
        }
    }
    Ok(NetGrowthTable { rows, nets })
}
