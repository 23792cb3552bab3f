//! Two-dimensional constant-curvature model spaces and the timelike
//! four-point comparison.
//!
//! Charts, with `r = 1/sqrt|K|`:
//! - `K = 0`: Minkowski `−dt² + dx²`.
//! - `K < 0`: universal cover of anti-de Sitter, `−cosh²(x/r) dt² + dx²`.
//! - `K > 0`: universal cover of de Sitter, `−dt² + cosh²(t/r) dx²`.
//!
//! Time separations come from the bilinear form of the standard quadric
//! embeddings, rewritten in half-angle form so that short separations keep
//! full relative precision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{FiniteLorentzSpace, LorentzSpace};
use crate::time::{ExtendedTime, Finite, NegInf};

/// Residual bound on squared realized sides.
pub const SOLVER_TOL: f64 = 1e-10;
/// Default slack tolerance of the four-point inequality.
pub const CHECK_TOL: f64 = 1e-9;

const CAUSAL_EPS: f64 = 1e-12;

/// Gudermannian.
fn gd(x: f64) -> f64 {
    x.sinh().atan()
}

/// Timelike diameter bound `π/sqrt(−K)` for `K < 0`, infinite otherwise.
pub fn diameter_bound(k: f64) -> f64 {
    if k < 0.0 {
        std::f64::consts::PI / (-k).sqrt()
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub k: f64,
    pub t: f64,
    pub x: f64,
}

impl ModelPoint {
    pub fn new(k: f64, t: f64, x: f64) -> Self {
        ModelPoint { k, t, x }
    }
}

/// Causal relation of the model chart.
fn model_causal(k: f64, p: ModelPoint, q: ModelPoint) -> bool {
    let dt = q.t - p.t;
    if dt < -CAUSAL_EPS {
        return false;
    }
    if k == 0.0 {
        return dt + CAUSAL_EPS >= (q.x - p.x).abs();
    }
    let r = 1.0 / k.abs().sqrt();
    if k < 0.0 {
        dt + CAUSAL_EPS >= r * (gd(q.x / r) - gd(p.x / r)).abs()
    } else {
        (q.x - p.x).abs() <= r * (gd(q.t / r) - gd(p.t / r)) + CAUSAL_EPS
    }
}

/// `ℓ` of the model space `𝕃²(K)`.
///
/// For `K < 0`, points causally beyond the refocusing point of `p` are
/// rejected: their separation is not attained by a geodesic and exceeds
/// the diameter bound.
pub fn model_tau(k: f64, p: ModelPoint, q: ModelPoint) -> Result<ExtendedTime> {
    if p.k != k || q.k != k {
        return Err(Error::InvalidValue(format!("model points for curvature {} and {} used with {k}", p.k, q.k)));
    }
    if ![p.t, p.x, q.t, q.x].iter().all(|v| v.is_finite()) || !k.is_finite() {
        return Err(Error::ChartDomain(format!("{p:?} -> {q:?}")));
    }
    if !model_causal(k, p, q) {
        return Ok(NegInf);
    }
    let dt = q.t - p.t;
    let dx = q.x - p.x;
    if k == 0.0 {
        return Ok(Finite(((dt - dx.abs()) * (dt + dx.abs())).max(0.0).sqrt()));
    }
    let r = 1.0 / k.abs().sqrt();
    if k < 0.0 {
        // Refocusing point of p is (t + πr, −x).
        let beyond = p.t + std::f64::consts::PI * r - q.t + CAUSAL_EPS < r * (gd(p.x / r) + gd(q.x / r)).abs();
        if beyond {
            return Err(Error::ChartDomain(format!("{q:?} lies beyond the refocusing point of {p:?}")));
        }
        let s = (p.x / r).cosh() * (q.x / r).cosh() * (dt / (2.0 * r)).sin().powi(2) - (dx / (2.0 * r)).sinh().powi(2);
        Ok(Finite(2.0 * r * s.clamp(0.0, 1.0).sqrt().asin()))
    } else {
        let s = (dt / (2.0 * r)).sinh().powi(2) - (p.t / r).cosh() * (q.t / r).cosh() * (dx / (2.0 * r)).sin().powi(2);
        Ok(Finite(2.0 * r * s.max(0.0).sqrt().asinh()))
    }
}

/// Five measured sides of a four-point configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sides {
    pub yx: f64,
    pub yz1: f64,
    pub yz2: f64,
    pub xz1: f64,
    pub xz2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub y: ModelPoint,
    pub x: ModelPoint,
    pub z1: ModelPoint,
    pub z2: ModelPoint,
    /// Largest mismatch of a squared realized side.
    pub residual: f64,
}

/// Place `z̄` with `τ̄(ȳ, z̄) = from_y`, `τ̄(x̄, z̄) = from_x`, `ȳ = (0, 0)`,
/// `x̄ = (a, 0)`, on the side `sign` of the time axis.
fn place(k: f64, a: f64, from_y: f64, from_x: f64, sign: f64) -> Result<ModelPoint> {
    let tol = 1e-9;
    if k == 0.0 {
        let t = (from_y * from_y - from_x * from_x + a * a) / (2.0 * a);
        let x2 = t * t - from_y * from_y;
        if x2 < -tol * t.abs().max(1.0).powi(2) {
            return Err(Error::Unrealizable(format!("flat triangle ({a}, {from_x}, {from_y})")));
        }
        // Collinear placement when the spatial offset vanishes.
        let x = if x2 <= 1e-15 * t * t { 0.0 } else { x2.sqrt() };
        return Ok(ModelPoint::new(k, t, sign * x));
    }
    let r = 1.0 / k.abs().sqrt();
    let alpha = a / r;
    if k < 0.0 {
        let cy = (from_y / r).cos();
        let cx = (from_x / r).cos();
        let u = cy;
        let v = (cx - cy * alpha.cos()) / alpha.sin();
        let c = u.hypot(v);
        if c < 1.0 - tol {
            return Err(Error::Unrealizable(format!("anti-de Sitter triangle ({a}, {from_x}, {from_y})")));
        }
        let theta = v.atan2(u);
        let x = if c <= 1.0 + 1e-15 { 0.0 } else { r * c.acosh() };
        Ok(ModelPoint::new(k, r * theta, sign * x))
    } else {
        let cy = (from_y / r).cosh();
        let cx = (from_x / r).cosh();
        let sh = (alpha.cosh() * cy - cx) / alpha.sinh();
        let ch = sh.asinh().cosh();
        let c = cy / ch;
        if c > 1.0 + tol {
            return Err(Error::Unrealizable(format!("de Sitter triangle ({a}, {from_x}, {from_y})")));
        }
        let x = if c >= 1.0 - 1e-15 { 0.0 } else { r * c.acos() };
        Ok(ModelPoint::new(k, r * sh.asinh(), sign * x))
    }
}

fn side_residual(k: f64, p: ModelPoint, q: ModelPoint, target: f64) -> Result<f64> {
    let got = model_tau(k, p, q)?;
    Ok(match got {
        NegInf => f64::INFINITY,
        Finite(v) => (v * v - target * target).abs() / target.max(1.0).powi(2),
    })
}

/// Comparison configuration in `𝕃²(K)` with `ȳ` at the origin, `x̄` on the
/// positive time axis, `z̄₁` at `x ≥ 0` and `z̄₂` at `x ≤ 0`.
pub fn comparison_config(k: f64, sides: Sides) -> Result<Comparison> {
    let Sides { yx, yz1, yz2, xz1, xz2 } = sides;
    let all = [yx, yz1, yz2, xz1, xz2];
    if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Unrealizable(format!("sides {all:?} must be finite and non-negative")));
    }
    if yx <= 0.0 {
        return Err(Error::Unrealizable("τ(y, x) must be positive".into()));
    }
    if yz1 < yx || yz2 < yx {
        return Err(Error::Unrealizable(format!("τ(y, z) below τ(y, x) = {yx}")));
    }
    let bound = diameter_bound(k);
    if let Some(v) = all.iter().find(|&&v| v >= bound) {
        return Err(Error::Unrealizable(format!("side {v} reaches the diameter bound {bound}")));
    }
    let y = ModelPoint::new(k, 0.0, 0.0);
    let x = ModelPoint::new(k, yx, 0.0);
    let z1 = place(k, yx, yz1, xz1, 1.0)?;
    let z2 = place(k, yx, yz2, xz2, -1.0)?;
    let mut residual = 0.0f64;
    for (p, q, s) in [(y, x, yx), (y, z1, yz1), (y, z2, yz2), (x, z1, xz1), (x, z2, xz2)] {
        residual = residual.max(side_residual(k, p, q, s)?);
    }
    if !(residual <= SOLVER_TOL) {
        return Err(Error::SolverDiverged(residual));
    }
    Ok(Comparison { y, x, z1, z2, residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigKind {
    /// `y ≪ x ≪ z₁ ≤ z₂`.
    Future,
    /// `z₂ ≤ z₁ ≪ x ≪ y`.
    Past,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourPointConfig {
    pub kind: ConfigKind,
    pub y: usize,
    pub x: usize,
    pub z1: usize,
    pub z2: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourPointResult {
    pub holds: bool,
    /// `τ(z₁, z₂) − τ̄(z̄₁, z̄₂)`, time-reversed for past configurations.
    pub slack: f64,
    pub comparison: Comparison,
}

/// `ℓ` read forwards or backwards in time.
fn oriented(space: &FiniteLorentzSpace, kind: ConfigKind, a: usize, b: usize) -> ExtendedTime {
    match kind {
        ConfigKind::Future => space.ell(a, b),
        ConfigKind::Past => space.ell(b, a),
    }
}

pub fn four_point_check(space: &FiniteLorentzSpace, config: FourPointConfig, k: f64) -> Result<FourPointResult> {
    four_point_check_tol(space, config, k, CHECK_TOL)
}

pub fn four_point_check_tol(
    space: &FiniteLorentzSpace,
    config: FourPointConfig,
    k: f64,
    tol: f64,
) -> Result<FourPointResult> {
    let FourPointConfig { kind, y, x, z1, z2 } = config;
    for i in [y, x, z1, z2] {
        space.check_index(i)?;
    }
    let l = |a, b| oriented(space, kind, a, b);
    if !l(y, x).is_timelike() || !l(x, z1).is_timelike() || !l(z1, z2).is_causal() {
        return Err(Error::InvalidConfiguration(format!("{config:?} does not have the required causal pattern")));
    }
    let tau = |a, b| l(a, b).tau();
    if tau(y, z2) >= diameter_bound(k) {
        return Err(Error::InvalidConfiguration(format!("τ(y, z₂) = {} reaches the diameter bound", tau(y, z2))));
    }
    let sides = Sides { yx: tau(y, x), yz1: tau(y, z1), yz2: tau(y, z2), xz1: tau(x, z1), xz2: tau(x, z2) };
    let comparison = comparison_config(k, sides)?;
    let bar = match model_tau(k, comparison.z1, comparison.z2) {
        Ok(v) => v.tau(),
        // z̄₂ beyond the refocusing point of z̄₁: separation exceeds every side.
        Err(Error::ChartDomain(_)) => diameter_bound(k),
        Err(e) => return Err(e),
    };
    let slack = tau(z1, z2) - bar;
    Ok(FourPointResult { holds: slack >= -tol, slack, comparison })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub config: FourPointConfig,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub tested: usize,
    /// Configurations the comparison could not realize (reported, not tested).
    pub skipped: usize,
    /// True when every admissible configuration was tested.
    pub exhaustive: bool,
    pub violations: Vec<Violation>,
}

/// All admissible configurations of one kind, in index order.
fn enumerate(space: &FiniteLorentzSpace, kind: ConfigKind, out: &mut Vec<FourPointConfig>) {
    let n = space.len();
    for y in 0..n {
        let xs = match kind {
            ConfigKind::Future => space.i_plus(y),
            ConfigKind::Past => space.i_minus(y),
        };
        for x in xs.ones() {
            let z1s = match kind {
                ConfigKind::Future => space.i_plus(x),
                ConfigKind::Past => space.i_minus(x),
            };
            for z1 in z1s.ones() {
                let z2s = match kind {
                    ConfigKind::Future => space.j_plus(z1),
                    ConfigKind::Past => space.j_minus(z1),
                };
                out.extend(z2s.ones().map(|z2| FourPointConfig { kind, y, x, z1, z2 }));
            }
        }
    }
}

fn config_count(space: &FiniteLorentzSpace) -> u128 {
    let n = space.len();
    let mut total = 0u128;
    for x in 0..n {
        let below = space.i_minus(x).count_ones(..) as u128;
        let above = space.i_plus(x).count_ones(..) as u128;
        let fut: u128 = space.i_plus(x).ones().map(|z| space.j_plus(z).count_ones(..) as u128).sum();
        let past: u128 = space.i_minus(x).ones().map(|z| space.j_minus(z).count_ones(..) as u128).sum();
        total += below * fut + above * past;
    }
    total
}

/// Test up to `budget` admissible configurations of both kinds. When all of
/// them fit in the budget they are enumerated; otherwise they are drawn
/// (seeded) by choosing a chronological pair, then `z₁`, then `z₂`,
/// alternating future and past.
pub fn curvature_bound_scan(space: &FiniteLorentzSpace, k: f64, budget: usize, seed: u64) -> ScanReport {
    curvature_bound_scan_tol(space, k, budget, seed, CHECK_TOL)
}

/// Scan with an explicit slack tolerance. Sampled spaces need more than the
/// default: nearly null sides turn round-off into `~1e-7` slack.
pub fn curvature_bound_scan_tol(space: &FiniteLorentzSpace, k: f64, budget: usize, seed: u64, tol: f64) -> ScanReport {
    let mut report = ScanReport { tested: 0, skipped: 0, exhaustive: false, violations: Vec::new() };
    let run = |c: FourPointConfig, report: &mut ScanReport| match four_point_check_tol(space, c, k, tol) {
        Ok(r) => {
            report.tested += 1;
            if !r.holds {
                report.violations.push(Violation { config: c, slack: r.slack });
            }
        }
        Err(_) => report.skipped += 1,
    };
    if config_count(space) <= budget as u128 {
        let mut all = Vec::new();
        enumerate(space, ConfigKind::Future, &mut all);
        enumerate(space, ConfigKind::Past, &mut all);
        for c in all {
            run(c, &mut report);
        }
        report.exhaustive = true;
        return report;
    }
    let n = space.len();
    let starts = |kind| -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for y in 0..n {
            match kind {
                ConfigKind::Future => {
                    v.extend(space.i_plus(y).ones().filter(|&x| !space.i_plus(x).is_clear()).map(|x| (y, x)))
                }
                ConfigKind::Past => {
                    v.extend(space.i_minus(y).ones().filter(|&x| !space.i_minus(x).is_clear()).map(|x| (y, x)))
                }
            }
        }
        v
    };
    let future = starts(ConfigKind::Future);
    let past = starts(ConfigKind::Past);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |set: &fixedbitset::FixedBitSet, rng: &mut ChaCha8Rng| {
        let items: Vec<usize> = set.ones().collect();
        items[rng.gen_range(0..items.len())]
    };
    for i in 0..budget {
        let kind = if i % 2 == 0 { ConfigKind::Future } else { ConfigKind::Past };
        let pool = match kind {
            ConfigKind::Future if !future.is_empty() => &future,
            ConfigKind::Past if !past.is_empty() => &past,
            _ if !future.is_empty() => &future,
            _ => &past,
        };
        let kind = if std::ptr::eq(pool, &future) { ConfigKind::Future } else { ConfigKind::Past };
        let (y, x) = pool[rng.gen_range(0..pool.len())];
        let (z1, z2) = match kind {
            ConfigKind::Future => {
                let z1 = pick(space.i_plus(x), &mut rng);
                (z1, pick(space.j_plus(z1), &mut rng))
            }
            ConfigKind::Past => {
                let z1 = pick(space.i_minus(x), &mut rng);
                (z1, pick(space.j_minus(z1), &mut rng))
            }
        };
        run(FourPointConfig { kind, y, x, z1, z2 }, &mut report);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(k: f64, t: f64, x: f64) -> ModelPoint {
        ModelPoint::new(k, t, x)
    }

    #[test]
    fn flat_examples() {
        assert_eq!(model_tau(0.0, mp(0.0, 0.0, 0.0), mp(0.0, 1.0, 0.0)).unwrap(), Finite(1.0));
        assert_eq!(model_tau(0.0, mp(0.0, 0.0, 0.0), mp(0.0, 1.0, 2.0)).unwrap(), NegInf);
        assert!(model_tau(0.0, mp(1.0, 0.0, 0.0), mp(0.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn axis_separation_is_coordinate_time() {
        for k in [-1.0, -0.25, 0.5, 2.0] {
            let v = model_tau(k, mp(k, 0.0, 0.0), mp(k, 0.7, 0.0)).unwrap().tau();
            assert!((v - 0.7).abs() < 1e-14, "{k}: {v}");
        }
    }

    #[test]
    fn anti_de_sitter_refocusing_is_rejected() {
        let k = -1.0;
        let far = model_tau(k, mp(k, 0.0, 0.0), mp(k, 3.5, 0.0));
        assert!(matches!(far, Err(Error::ChartDomain(_))));
        let v = model_tau(k, mp(k, 0.0, 0.3), mp(k, 1.0, -0.2)).unwrap().tau();
        assert!(v > 0.0 && v < std::f64::consts::PI);
    }

    #[test]
    fn collinear_flat_chain() {
        let c = comparison_config(0.0, Sides { yx: 1.0, yz1: 2.0, yz2: 3.0, xz1: 1.0, xz2: 2.0 }).unwrap();
        assert_eq!((c.z1.x, c.z2.x), (0.0, 0.0));
        let bar = model_tau(0.0, c.z1, c.z2).unwrap().tau();
        assert!((bar - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_configuration_is_reproduced() {
        let pts: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.5), (3.0, 0.2)];
        let tau = |i: usize, j: usize| {
            let (a, b) = (pts[i], pts[j]);
            ((b.0 - a.0) * (b.0 - a.0) - (b.1 - a.1) * (b.1 - a.1)).sqrt()
        };
        let s = Sides { yx: tau(0, 1), yz1: tau(0, 2), yz2: tau(0, 3), xz1: tau(1, 2), xz2: tau(1, 3) };
        let c = comparison_config(0.0, s).unwrap();
        assert!(c.residual <= 1e-10);
        assert!(c.z1.x >= 0.0 && c.z2.x <= 0.0);
    }

    #[test]
    fn short_side_is_unrealizable() {
        let e = comparison_config(0.0, Sides { yx: 2.0, yz1: 1.0, yz2: 3.0, xz1: 0.5, xz2: 1.0 });
        assert!(matches!(e, Err(Error::Unrealizable(_))));
    }

    #[test]
    fn curved_configurations_solve() {
        for k in [-1.0, -0.3, 0.3, 0.5] {
            let s = Sides { yx: 0.4, yz1: 0.9, yz2: 1.1, xz1: 0.3, xz2: 0.5 };
            let c = comparison_config(k, s).unwrap();
            assert!(c.residual <= 1e-10, "{k}");
        }
    }
}
