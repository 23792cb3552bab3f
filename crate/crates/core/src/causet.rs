//! Causal sets: longest-chain time separation, sprinkling into product
//! spacetimes, embedding checks and isometry trials between two products.

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corr::{distortion, heuristic_min_distortion, Correspondence, Distortion, HeuristicConfig};
use crate::error::{Error, Result};
use crate::geometry::{product_tau, sample_points, ProductGenerator, SamplePoint};
use crate::space::{FiniteLorentzSpace, LorentzSpace};
use crate::time::{Finite, NegInf};

/// A finite poset given by a generating relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausalSet {
    pub elements: Vec<String>,
    pub covers: Vec<(usize, usize)>,
}

impl CausalSet {
    /// Rejects out-of-range pairs and cycles (a self-pair is a cycle).
    pub fn new(elements: Vec<String>, covers: Vec<(usize, usize)>) -> Result<Self> {
        let c = CausalSet { elements, covers };
        c.check()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn check(&self) -> Result<()> {
        let n = self.len();
        for &(a, b) in &self.covers {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::IndexOutOfRange { index: x, len: n });
                }
            }
        }
        self.topological_order().map(|_| ())
    }

    /// Kahn's algorithm, smallest available index first.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        let succ = self.successors();
        for s in &succ {
            for &b in s {
                indeg[b] += 1;
            }
        }
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&x| indeg[x] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(x) = ready.pop_first() {
            order.push(x);
            for &y in &succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.insert(y);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&x| indeg[x] > 0).expect("some element left");
            return Err(Error::CycleDetected(stuck));
        }
        Ok(order)
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.len()];
        for &(a, b) in &self.covers {
            succ[a].push(b);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        succ
    }

    /// `up[x]` = elements `y` with `x ≤ y` (reflexive).
    pub fn up_sets(&self) -> Result<Vec<FixedBitSet>> {
        let order = self.topological_order()?;
        let succ = self.successors();
        let n = self.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for &x in order.iter().rev() {
            up[x].insert(x);
            for &y in &succ[x] {
                let s = up[y].clone();
                up[x].union_with(&s);
            }
        }
        Ok(up)
    }
}

/// Longest chain length in relation steps; `−∞` when unrelated.
pub fn chain_ell(c: &CausalSet) -> Result<FiniteLorentzSpace> {
    let order = c.topological_order()?;
    let n = c.len();
    let mut preds = vec![Vec::new(); n];
    for &(a, b) in &c.covers {
        preds[b].push(a);
    }
    let mut ell = vec![NegInf; n * n];
    let mut best = vec![-1i64; n];
    for &x in &order {
        best.iter_mut().for_each(|v| *v = -1);
        best[x] = 0;
        for &y in &order {
            for &p in &preds[y] {
                if best[p] >= 0 {
                    best[y] = best[y].max(best[p] + 1);
                }
            }
        }
        for y in 0..n {
            if best[y] >= 0 {
                ell[x * n + y] = Finite(best[y] as f64);
            }
        }
    }
    FiniteLorentzSpace::from_flat(c.elements.clone(), ell, 0.0)
}

#[derive(Clone, Debug)]
pub struct Sprinkling {
    pub causet: CausalSet,
    /// Spacetime point of each element.
    pub sites: Vec<SamplePoint>,
}

/// `count` uniform points of `[t−, t+] × fiber`, ordered by time, with the
/// covering relation of the induced causal order.
pub fn sprinkle(gen: &ProductGenerator, region: (f64, f64), count: usize, seed: u64) -> Result<Sprinkling> {
    let (lo, hi) = region;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || gen.fiber.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if count == 0 {
        return Err(Error::InvalidValue("sprinkle count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites: Vec<SamplePoint> =
        (0..count).map(|_| SamplePoint { t: rng.gen_range(lo..hi), site: rng.gen_range(0..gen.fiber.len()) }).collect();
    sites.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.site.cmp(&b.site)));
    let n = sites.len();
    let mut succ = vec![FixedBitSet::with_capacity(n); n];
    for i in 0..n {
        for j in i + 1..n {
            if product_tau(gen, sites[i], sites[j]).is_causal() {
                succ[i].insert(j);
            }
        }
    }
    let mut covers = Vec::new();
    for i in 0..n {
        let mut reach = FixedBitSet::with_capacity(n);
        for k in succ[i].ones() {
            reach.union_with(&succ[k]);
        }
        covers.extend(succ[i].difference(&reach).map(|j| (i, j)));
    }
    let elements = (0..n).map(|i| format!("e{i}")).collect();
    Ok(Sprinkling { causet: CausalSet::new(elements, covers)?, sites })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedMode {
    /// `x ≤ y ⇔ φ(x) ≤ φ(y)`.
    Bidirectional,
    /// Only `x ≤ y ⇒ φ(x) ≤ φ(y)`.
    OneDirectional,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbedReport {
    pub faithful: bool,
    /// `x ≤ y` in the causet but not between the images.
    pub forward: Vec<(usize, usize)>,
    /// Images related while `x ≰ y`.
    pub reverse: Vec<(usize, usize)>,
}

pub fn faithful_embed_check(c: &CausalSet, space: &FiniteLorentzSpace, map: &[usize], mode: EmbedMode) -> Result<EmbedReport> {
    if map.len() != c.len() {
        return Err(Error::InvalidValue(format!("map has {} entries for {} elements", map.len(), c.len())));
    }
    for &p in map {
        space.check_index(p)?;
    }
    let up = c.up_sets()?;
    let mut forward = Vec::new();
    let mut reverse = Vec::new();
    for x in 0..c.len() {
        for y in 0..c.len() {
            if x == y {
                continue;
            }
            let ordered = up[x].contains(y);
            let images = space.causal(map[x], map[y]);
            if ordered && !images {
                forward.push((x, y));
            }
            if images && !ordered {
                reverse.push((x, y));
            }
        }
    }
    let faithful = forward.is_empty() && (mode == EmbedMode::OneDirectional || reverse.is_empty());
    Ok(EmbedReport { faithful, forward, reverse })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub count: usize,
    pub seed: u64,
    /// Related pairs over all unordered pairs.
    pub relation_density: f64,
    /// Longest chain in the sprinkled causet.
    pub height: usize,
    /// Whether the causet order is also the order induced in `B`.
    pub faithful_in_b: bool,
    /// Distortion of the site-transport correspondence.
    pub transport_distortion: Distortion,
    pub distortion: Distortion,
    /// `max |τ_A − τ_B|` over pairs causal in both.
    pub finite_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub rows: Vec<TrialRow>,
}

/// Counts at or below this also run the heuristic min-distortion search.
pub const TRIAL_SEARCH_MAX: usize = 64;

pub fn trial_seed(master: u64, index: usize) -> u64 {
    master ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Sprinkle into `a`, carry the same sites to `b`, and compare the two
/// sampled restrictions.
pub fn hauptvermutung_trial(
    a: &ProductGenerator,
    b: &ProductGenerator,
    region: (f64, f64),
    counts: &[usize],
    seed: u64,
) -> Result<TrialReport> {
    if a.fiber.len() != b.fiber.len() {
        return Err(Error::SizeMismatch(a.fiber.len(), b.fiber.len()));
    }
    // Counts run on their own threads; seeds depend only on the position.
    let rows: Vec<Result<TrialRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = counts
            .iter()
            .enumerate()
            .map(|(idx, &count)| scope.spawn(move || trial_row(a, b, region, count, trial_seed(seed, idx))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial thread panicked")).collect()
    });
    Ok(TrialReport { rows: rows.into_iter().collect::<Result<_>>()? })
}

fn trial_row(a: &ProductGenerator, b: &ProductGenerator, region: (f64, f64), count: usize, s: u64) -> Result<TrialRow> {
    let sp = sprinkle(a, region, count, s)?;
    let sa = sample_points(a, sp.sites.clone())?.space;
    let sb = sample_points(b, sp.sites.clone())?.space;
    let chain = chain_ell(&sp.causet)?;
    let n = sa.len();
    let mut related = 0usize;
    let mut height = 0usize;
    let mut finite_gap = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j && sa.causal(i, j) {
                related += 1;
            }
            if let Some(h) = chain.ell(i, j).value() {
                height = height.max(h as usize);
            }
            if let (Some(x), Some(y)) = (sa.ell(i, j).value(), sb.ell(i, j).value()) {
                finite_gap = finite_gap.max((x - y).abs());
            }
        }
    }
    let pairs = n * (n - 1) / 2;
    let all: Vec<usize> = (0..n).collect();
    let identity = Correspondence::identity(&all);
    let transport = distortion(&identity, &sa, &sb);
    let mut best = transport;
    if n <= TRIAL_SEARCH_MAX && transport.value() > 0.0 {
        let cfg = HeuristicConfig { seed: s, ..HeuristicConfig::default() };
        let h = heuristic_min_distortion(&sa, &sb, &cfg, Some((all.clone(), all.clone())));
        if h.distortion.value() < best.value() {
            best = h.distortion;
        }
    }
    let faithful_in_b = faithful_embed_check(&sp.causet, &sb, &all, EmbedMode::Bidirectional)?.faithful;
    Ok(TrialRow {
        count,
        seed: s,
        relation_density: if pairs == 0 { 0.0 } else { related as f64 / pairs as f64 },
        height,
        faithful_in_b,
        transport_distortion: transport,
        distortion: best,
        finite_gap,
    })
}
