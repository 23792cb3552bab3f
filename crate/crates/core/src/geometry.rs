//! Product spacetimes `[t-, t+] × Σ` over finite metric fibers with the
//! cone metric `-C² dt² + d²`, their samples and explicit grid nets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nets::DiamondNet;
use crate::space::{FiniteLorentzSpace, LorentzSpace, SAMPLED_TOL};
use crate::time::{ExtendedTime, Finite, NegInf};

/// Slack on the causality test `d ≤ C Δt`, so exactly null pairs built
/// from rounded coordinates stay causal.
pub const CAUSAL_SLACK: f64 = 1e-9;

const METRIC_TOL: f64 = 1e-12;

/// A finite metric space.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricFiber {
    labels: Vec<String>,
    d: Vec<Vec<f64>>,
}

impl FiniteMetricFiber {
    pub fn new(labels: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySubset);
        }
        if d.len() != n || d.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!("fiber with {n} labels has a non-square distance matrix")));
        }
        for i in 0..n {
            if d[i][i] != 0.0 {
                return Err(Error::InvalidValue(format!("fiber distance d({i},{i}) = {}", d[i][i])));
            }
            for j in 0..n {
                let v = d[i][j];
                if !(v.is_finite() && v >= 0.0) || v != d[j][i] {
                    return Err(Error::InvalidValue(format!("fiber distance d({i},{j}) = {v}")));
                }
                for k in 0..n {
                    if d[i][k] > d[i][j] + d[j][k] + METRIC_TOL {
                        return Err(Error::InvalidValue(format!("fiber triangle inequality fails at ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(FiniteMetricFiber { labels, d })
    }

    /// `n` equally spaced sites on a circle of the given circumference.
    pub fn circle(n: usize, circumference: f64) -> Result<Self> {
        let step = circumference / n as f64;
        let d = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let k = i.abs_diff(j);
                        k.min(n - k) as f64 * step
                    })
                    .collect()
            })
            .collect();
        Self::new((0..n).map(|i| format!("s{i}")).collect(), d)
    }

    /// `n` sites on a line with the given spacing.
    pub fn line(n: usize, spacing: f64) -> Result<Self> {
        let d = (0..n).map(|i| (0..n).map(|j| i.abs_diff(j) as f64 * spacing).collect()).collect();
        Self::new((0..n).map(|i| format!("s{i}")).collect(), d)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    /// All distances multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidValue(format!("fiber scale {factor}")));
        }
        Ok(FiniteMetricFiber {
            labels: self.labels.clone(),
            d: self.d.iter().map(|r| r.iter().map(|v| v * factor).collect()).collect(),
        })
    }

    /// Sites farther than `radius` from every site of `net`.
    pub fn net_misses(&self, net: &[usize], radius: f64) -> Vec<usize> {
        (0..self.len()).filter(|&x| !net.iter().any(|&s| self.d[x][s] <= radius + METRIC_TOL)).collect()
    }

    pub fn to_json(&self) -> FiberJson {
        FiberJson { labels: self.labels.clone(), d: self.d.clone() }
    }
}

/// `{"labels": [...], "d": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberJson {
    pub labels: Vec<String>,
    pub d: Vec<Vec<f64>>,
}

impl FiberJson {
    pub fn into_fiber(self) -> Result<FiniteMetricFiber> {
        FiniteMetricFiber::new(self.labels, self.d)
    }
}

/// `[t-, t+] × Σ` with `ℓ = sqrt(C² Δt² − d²)` on causal pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductGenerator {
    pub fiber: FiniteMetricFiber,
    pub cone_scale: f64,
    pub t_range: (f64, f64),
}

impl ProductGenerator {
    pub fn new(fiber: FiniteMetricFiber, cone_scale: f64, t_range: (f64, f64)) -> Result<Self> {
        if !(cone_scale > 0.0 && cone_scale.is_finite()) {
            return Err(Error::InvalidValue(format!("cone scale {cone_scale}")));
        }
        if !(t_range.0 <= t_range.1 && t_range.0.is_finite() && t_range.1.is_finite()) {
            return Err(Error::InvalidValue(format!("time range {t_range:?}")));
        }
        Ok(ProductGenerator { fiber, cone_scale, t_range })
    }
}

/// A point `(t, site)` of a product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub t: f64,
    pub site: usize,
}

/// Closed-form time separation of the product.
pub fn product_tau(gen: &ProductGenerator, p: SamplePoint, q: SamplePoint) -> ExtendedTime {
    let dt = q.t - p.t;
    let d = gen.fiber.dist(p.site, q.site);
    let reach = gen.cone_scale * dt;
    if dt < 0.0 || d > reach + CAUSAL_SLACK {
        return NegInf;
    }
    // Null pairs of a grid land a few ulps off the cone; the square root
    // would inflate that to ~1e-9.
    if reach - d <= 8.0 * f64::EPSILON * reach {
        return Finite(0.0);
    }
    Finite(((reach - d) * (reach + d)).sqrt())
}

/// The nested-cone family `Y_n`: cone scale `1 + 1/n` and fiber distances
/// `d / (1 + rate/n²)`; `n = None` is the limit member. Both changes widen
/// the cones, so `ℓ_n` decreases in `n` towards `ℓ_∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductFamily {
    pub fiber: FiniteMetricFiber,
    pub fiber_rate: f64,
    pub t_range: (f64, f64),
}

impl ProductFamily {
    pub fn member(&self, n: Option<u64>) -> Result<ProductGenerator> {
        match n {
            None => ProductGenerator::new(self.fiber.clone(), 1.0, self.t_range),
            Some(0) => Err(Error::InvalidValue("family index starts at 1".into())),
            Some(n) => {
                let nf = n as f64;
                let fiber = self.fiber.scaled(1.0 / (1.0 + self.fiber_rate / (nf * nf)))?;
                ProductGenerator::new(fiber, 1.0 + 1.0 / nf, self.t_range)
            }
        }
    }
}

/// Lazily evaluated product sample; nothing is tabulated.
#[derive(Clone, Debug)]
pub struct ProductPoints<'a> {
    pub gen: &'a ProductGenerator,
    pub points: Vec<SamplePoint>,
}

impl LorentzSpace for ProductPoints<'_> {
    fn len(&self) -> usize {
        self.points.len()
    }
    fn ell(&self, i: usize, j: usize) -> ExtendedTime {
        product_tau(self.gen, self.points[i], self.points[j])
    }
}

/// Time grid and fiber sites to sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub time_step: f64,
    /// `None` samples every site.
    #[serde(default)]
    pub fiber_sites: Option<Vec<usize>>,
    /// Sample window; defaults to the generator's range.
    #[serde(default)]
    pub t_window: Option<(f64, f64)>,
    /// With a seed, each grid time is shifted by a uniform amount in
    /// `[0, jitter·time_step)`, clipped to the window.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub jitter: f64,
}

impl SamplePlan {
    pub fn grid(time_step: f64) -> Self {
        SamplePlan { time_step, fiber_sites: None, t_window: None, seed: None, jitter: 0.0 }
    }
}

/// A sampled product with its coordinates.
#[derive(Clone, Debug)]
pub struct Sample {
    pub space: FiniteLorentzSpace,
    pub points: Vec<SamplePoint>,
}

/// Grid times `lo, lo + step, ...` up to `hi` (inclusive up to rounding).
pub fn time_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| lo + i as f64 * step).collect()
}

pub fn plan_points(gen: &ProductGenerator, plan: &SamplePlan) -> Result<Vec<SamplePoint>> {
    if !(plan.time_step > 0.0 && plan.time_step.is_finite()) {
        return Err(Error::InvalidValue(format!("time step {}", plan.time_step)));
    }
    let (lo, hi) = plan.t_window.unwrap_or(gen.t_range);
    if lo > hi || lo < gen.t_range.0 - 1e-12 || hi > gen.t_range.1 + 1e-12 {
        return Err(Error::InvalidValue(format!("sample window [{lo}, {hi}] outside the generator range")));
    }
    let sites: Vec<usize> = match &plan.fiber_sites {
        None => (0..gen.fiber.len()).collect(),
        Some(s) => s.clone(),
    };
    if let Some(&bad) = sites.iter().find(|&&s| s >= gen.fiber.len()) {
        return Err(Error::IndexOutOfRange { index: bad, len: gen.fiber.len() });
    }
    if sites.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let mut times = time_grid(lo, hi, plan.time_step);
    if let Some(seed) = plan.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in &mut times {
            *t = (*t + rng.gen::<f64>() * plan.jitter * plan.time_step).min(hi);
        }
    }
    Ok(times.iter().flat_map(|&t| sites.iter().map(move |&site| SamplePoint { t, site })).collect())
}

/// Tabulate the product on explicit points.
pub fn sample_points(gen: &ProductGenerator, points: Vec<SamplePoint>) -> Result<Sample> {
    if points.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let labels = points.iter().map(|p| format!("{}@{}", p.t, gen.fiber.labels()[p.site])).collect();
    let ell = points.iter().flat_map(|&p| points.iter().map(move |&q| (p, q))).map(|(p, q)| product_tau(gen, p, q)).collect();
    let space = FiniteLorentzSpace::from_flat(labels, ell, SAMPLED_TOL)?;
    Ok(Sample { space, points })
}

pub fn sample_spacetime(gen: &ProductGenerator, plan: &SamplePlan) -> Result<Sample> {
    sample_points(gen, plan_points(gen, plan)?)
}

/// Explicit diamond net of a product slab built on a fiber net.
#[derive(Clone, Debug)]
pub struct GridNet {
    /// Diamonds indexing into `vertices`; the size bound is `C·ε`.
    pub net: DiamondNet,
    pub vertices: Vec<SamplePoint>,
    /// Number of time layers per fiber site.
    pub layers: usize,
    /// `⌈(t+ − t-)/(3ε)⌉ · |fiber net|`.
    pub layer_bound: usize,
}

/// Diamonds `J(x_{i-1,j}, x_{i+2,j})` with `x_{i,j} = (t- + iε/3, s_j)`.
///
/// A diamond spanning `ε` in time covers the layer `[t- + iε/3, t- + (i+1)ε/3]`
/// out to fiber radius `Cε/3`, so `⌈3(t+ − t-)/ε⌉` layers are needed to
/// reach `t+`.
pub fn grid_net_product(
    gen: &ProductGenerator,
    t_minus: f64,
    t_plus: f64,
    epsilon: f64,
    fiber_net: &[usize],
) -> Result<GridNet> {
    if !(epsilon > 0.0 && epsilon.is_finite()) || t_plus < t_minus {
        return Err(Error::InvalidValue(format!("epsilon {epsilon} on [{t_minus}, {t_plus}]")));
    }
    let step = epsilon / 3.0;
    let first = t_minus - step;
    if first < gen.t_range.0 - 1e-12 {
        return Err(Error::EpsilonTooLarge { epsilon, first, lower: gen.t_range.0 });
    }
    if let Some(&bad) = fiber_net.iter().find(|&&s| s >= gen.fiber.len()) {
        return Err(Error::IndexOutOfRange { index: bad, len: gen.fiber.len() });
    }
    if fiber_net.is_empty() {
        return Err(Error::EmptyPlan);
    }
    if let Some(&miss) = gen.fiber.net_misses(fiber_net, gen.cone_scale * step).first() {
        return Err(Error::NotAFiberNet(miss));
    }
    let span = t_plus - t_minus;
    let layers = ((3.0 * span / epsilon) - 1e-9).ceil().max(1.0) as usize;
    let layer_bound = ((span / (3.0 * epsilon)) - 1e-9).ceil().max(0.0) as usize * fiber_net.len();
    let rows = layers + 3;
    let mut vertices = Vec::with_capacity(rows * fiber_net.len());
    for &site in fiber_net {
        for r in 0..rows {
            vertices.push(SamplePoint { t: t_minus + (r as f64 - 1.0) * step, site });
        }
    }
    let mut pairs = Vec::with_capacity(layers * fiber_net.len());
    for j in 0..fiber_net.len() {
        for i in 0..layers {
            pairs.push((j * rows + i, j * rows + i + 3));
        }
    }
    Ok(GridNet { net: DiamondNet::new(gen.cone_scale * epsilon, pairs), vertices, layers, layer_bound })
}

/// A coefficient of the warped family, constant or sampled.
#[derive(Clone, Copy)]
pub enum Profile<'a> {
    Constant(f64),
    /// Value at `(t, site)`.
    Function(&'a dyn Fn(f64, usize) -> f64),
}

impl Profile<'_> {
    fn at(&self, t: f64, site: usize) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Function(f) => f(t, site),
        }
    }
}

/// `g = −β dt² + ω(t)² h₀`.
#[derive(Clone, Copy)]
pub struct WarpedFamily<'a> {
    pub beta: Profile<'a>,
    pub omega: Profile<'a>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeCertificate {
    Analytic,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeWitness {
    pub t: f64,
    pub site: usize,
    /// Spatial speed as a fraction of the coarse cone speed `C`.
    pub direction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeReport {
    pub holds: bool,
    pub certificate: ConeCertificate,
    pub witness: Option<ConeWitness>,
}

fn check_coefficients(beta: f64, omega: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::UnsupportedMetricFamily(format!("beta = {beta} outside (0, 1]")));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::UnsupportedMetricFamily(format!("omega = {omega} not positive")));
    }
    Ok(())
}

/// Check that every vector causal for `−C² dt² + d²` is causal for the
/// warped metric: with `v_t = 1` and `|v_x| = uC`, `β ≥ ω² C² u²` for all
/// `u ∈ [0, 1]`.
pub fn cone_dominates(
    cone_scale: f64,
    fiber: &FiniteMetricFiber,
    fine: &WarpedFamily,
    t_samples: &[f64],
    direction_samples: usize,
    seed: u64,
) -> Result<ConeReport> {
    let tol = 1e-12;
    let c2 = cone_scale * cone_scale;
    if let (Profile::Constant(beta), Profile::Constant(omega)) = (fine.beta, fine.omega) {
        check_coefficients(beta, omega)?;
        let holds = beta - omega * omega * c2 >= -tol;
        let witness = (!holds).then(|| ConeWitness { t: t_samples.first().copied().unwrap_or(0.0), site: 0, direction: 1.0 });
        return Ok(ConeReport { holds, certificate: ConeCertificate::Analytic, witness });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = vec![1.0];
    directions.extend((0..direction_samples).map(|_| rng.gen::<f64>()));
    for &t in t_samples {
        for site in 0..fiber.len() {
            let beta = fine.beta.at(t, site);
            let omega = fine.omega.at(t, site);
            check_coefficients(beta, omega)?;
            for &u in &directions {
                if beta - omega * omega * c2 * u * u < -tol {
                    return Ok(ConeReport {
                        holds: false,
                        certificate: ConeCertificate::Sampled,
                        witness: Some(ConeWitness { t, site, direction: u }),
                    });
                }
            }
        }
    }
    Ok(ConeReport { holds: true, certificate: ConeCertificate::Sampled, witness: None })
}

/// Generator description accepted on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub fiber: FiberJson,
    /// Explicit cone scale; ignored when `member` is given.
    #[serde(default = "one")]
    pub cone_scale: f64,
    /// Family index `n` (cone scale `1 + 1/n`).
    #[serde(default)]
    pub member: Option<u64>,
    #[serde(default)]
    pub fiber_rate: f64,
    /// Extra factor on fiber distances.
    #[serde(default = "one")]
    pub fiber_scale: f64,
    pub t_range: (f64, f64),
}

fn one() -> f64 {
    1.0
}

impl GeneratorJson {
    pub fn into_generator(self) -> Result<ProductGenerator> {
        let fiber = self.fiber.into_fiber()?.scaled(self.fiber_scale)?;
        match self.member {
            Some(n) => ProductFamily { fiber, fiber_rate: self.fiber_rate, t_range: self.t_range }.member(Some(n)),
            None => ProductGenerator::new(fiber, self.cone_scale, self.t_range),
        }
    }
}
