mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lgh::causet::{chain_ell, faithful_embed_check, hauptvermutung_trial, sprinkle, EmbedMode};
use lgh::corr::{distortion, lgh_certificate, min_distortion, CorrespondenceJson, MatchingSource, Scheduled, SearchMode};
use lgh::curvature::{curvature_bound_scan_tol, four_point_check_tol, ConfigKind, FourPointConfig};
use lgh::geometry::{cone_dominates, grid_net_product, sample_spacetime, Profile, SamplePlan, WarpedFamily};
use lgh::limits::{
    blow_up, diagonal_limit, forward_complete_check, select_basepoints, tangent_experiment, BlowupSpec, Depth, LimitConfig,
    ScheduledMember, TangentConfig, VecSource,
};
use lgh::measured::{induce_net_measure, weak_gap, MeasureJson};
use lgh::nets::{doubling_constant, greedy_net, net_growth_profile, verify_net, CandidateFilter, DiamondNet};
use lgh::space::{
    causality_class, classify_special_points, quotient_tau_indistinguishable, CoveredJson, SpaceJson, SAMPLED_TOL,
};
use lgh::{CoveredFiniteSpace, LorentzSpace};
use serde::{Deserialize, Serialize};
use serde_json::json;

use io::{load_causet, load_covered, load_generator, load_net, load_space, read_json, CliError, CliResult, Sink};

#[derive(Parser)]
#[command(name = "lgh", version, about = "Finite Lorentzian pre-length spaces: validation, nets, distortion, limits")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numerical tolerance for validation and comparisons.
    #[arg(long, global = true, default_value_t = SAMPLED_TOL)]
    tol: f64,
    /// Number of sequence members to use.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Configuration budget for curvature scans.
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Filter {
    All,
    Chronological,
}

impl From<Filter> for CandidateFilter {
    fn from(f: Filter) -> Self {
        match f {
            Filter::All => CandidateFilter::All,
            Filter::Chronological => CandidateFilter::Chronological,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Matching {
    Canonical,
    Search,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a space.
    Validate {
        #[arg(long)]
        space: PathBuf,
    },
    /// Causality conditions, special points and forward completeness.
    Class {
        #[arg(long)]
        space: PathBuf,
    },
    /// Quotient by indistinguishable points.
    Quotient {
        #[arg(long)]
        space: PathBuf,
    },
    /// Greedy net at one scale, or a growth profile over several.
    Net {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, conflicts_with = "epsilons")]
        epsilon: Option<f64>,
        /// Scales for a growth profile over the cover sets.
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Filter::All)]
        filter: Filter,
    },
    /// Check a net against a space.
    VerifyNet {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        net: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
    },
    /// Doubling constant of a subset.
    Doubling {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
    },
    /// Distortion of a given correspondence.
    Distort {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        corr: PathBuf,
    },
    /// Minimal-distortion correspondence.
    Match {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Heuristic)]
        mode: Mode,
    },
    /// Convergence certificate for a scheduled sequence.
    Certify {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_enum, default_value_t = Matching::Canonical)]
        matching: Matching,
    },
    /// Sample a product spacetime.
    Sample {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long, conflicts_with = "step")]
        plan: Option<PathBuf>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Explicit grid net of a product slab.
    GridNet {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t_minus: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_plus: f64,
        #[arg(long)]
        epsilon: f64,
        /// Fiber sites; defaults to a greedy net at radius Cε/3.
        #[arg(long, value_delimiter = ',')]
        fiber_net: Option<Vec<usize>>,
    },
    /// Cone domination of a warped metric by a product.
    Cones {
        #[arg(long)]
        generator: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        omega: f64,
        /// ω(t) = omega + slope·t; a nonzero slope switches to sampling.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        omega_slope: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t_samples: Option<Vec<f64>>,
        #[arg(long, default_value_t = 64)]
        directions: usize,
    },
    /// Four-point condition: one configuration, or a seeded scan.
    Fourpoint {
        #[arg(long)]
        space: PathBuf,
        #[arg(long = "K", allow_hyphen_values = true)]
        k: f64,
        /// y,x,z1,z2
        #[arg(long, value_delimiter = ',')]
        config: Option<Vec<usize>>,
        #[arg(long, requires = "config")]
        past: bool,
    },
    /// Curvature scans over several K.
    Scan {
        #[arg(long)]
        space: PathBuf,
        #[arg(long = "K", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        ks: Vec<f64>,
    },
    /// Net-induced measure, optionally compared with another measure.
    Measure {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        net: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Diagonal limit of a sequence of covered spaces.
    Converge {
        #[arg(long)]
        sequence: PathBuf,
        #[arg(long, value_enum, default_value_t = Filter::All)]
        filter: Filter,
        /// Allowed spread of each entry over the tail window.
        #[arg(long, default_value_t = 1e-6)]
        tail_tol: f64,
        #[arg(long, default_value_t = 5)]
        window: usize,
    },
    /// Rescaled chronological diamond around a point.
    Blowup {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        o: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, requires = "o_plus")]
        o_minus: Option<usize>,
        #[arg(long, requires = "o_minus")]
        o_plus: Option<usize>,
    },
    /// Blow-ups at increasing λ.
    Tangent {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        o: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 8.0])]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        halvings: usize,
    },
    /// Causal set tools.
    Causet {
        #[command(subcommand)]
        op: CausetOp,
    },
}

#[derive(Subcommand)]
enum CausetOp {
    /// Chain-length time separation.
    Ell {
        #[arg(long)]
        causet: PathBuf,
    },
    /// Seeded sprinkling into a product.
    Sprinkle {
        #[arg(long)]
        generator: PathBuf,
        /// t-,t+
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        region: Vec<f64>,
        #[arg(long)]
        count: usize,
    },
    /// Order embedding check.
    Embed {
        #[arg(long)]
        causet: PathBuf,
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_delimiter = ',')]
        map: Vec<usize>,
        #[arg(long)]
        one_directional: bool,
    },
    /// Sprinkle into A, transport to B, compare.
    Trial {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// t-,t+
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        region: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
    },
}

#[derive(Deserialize)]
struct ScheduledJson {
    space: SpaceJson,
    nets: Vec<DiamondNet>,
}

#[derive(Deserialize)]
struct ScheduleFile {
    members: Vec<ScheduledJson>,
    limit: ScheduledJson,
}

#[derive(Deserialize)]
struct SequenceFile {
    members: Vec<CoveredJson>,
    epsilons: Vec<f64>,
    #[serde(default)]
    params: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct StageCsv {
    level: usize,
    member: usize,
    distortion: String,
    extension_at: Option<usize>,
}

#[derive(Serialize)]
struct ScanRow {
    k: f64,
    tested: usize,
    skipped: usize,
    exhaustive: bool,
    violations: usize,
    min_slack: Option<f64>,
}

#[derive(Serialize)]
struct TangentCsv {
    lambda: f64,
    o_minus: Option<usize>,
    o_plus: Option<usize>,
    size: usize,
    diameter: f64,
    doubling: usize,
    doubling_exact: bool,
    finest_net: usize,
}

#[derive(Serialize)]
struct TrialCsv {
    count: usize,
    seed: u64,
    relation_density: f64,
    height: usize,
    faithful_in_b: bool,
    transport_distortion: String,
    distortion: String,
    finite_gap: f64,
}

fn subset_or_all(subset: Option<Vec<usize>>, n: usize) -> Vec<usize> {
    subset.unwrap_or_else(|| (0..n).collect())
}

fn distortion_text(d: lgh::corr::Distortion) -> String {
    serde_json::to_value(d).map(|v| v.to_string().trim_matches('"').to_string()).unwrap_or_default()
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", g.tol)));
    }
    let sink = Sink { out: g.out.clone(), csv: g.format == Format::Csv };
    let tol = g.tol;
    match cli.command {
        Command::Validate { space } => {
            let s = load_space(&space, tol)?;
            sink.json(&json!({ "ok": true, "points": s.len() }))
        }
        Command::Class { space } => {
            let s = load_space(&space, tol)?;
            let report = causality_class(&s);
            let special = if report.pdp { Some(classify_special_points(&s)?) } else { None };
            sink.json(&json!({
                "causality": report,
                "special_points": special,
                "forward_completeness": forward_complete_check(&s),
            }))
        }
        Command::Quotient { space } => {
            let q = quotient_tau_indistinguishable(&load_space(&space, tol)?);
            sink.json(&json!({
                "space": q.space.to_json(),
                "projection": q.projection,
                "representatives": q.representatives,
            }))
        }
        Command::Net { space, epsilon, epsilons, subset, filter } => match epsilon {
            Some(eps) => {
                let s = load_space(&space, tol)?;
                let subset = subset_or_all(subset, s.len());
                let net = match filter {
                    Filter::All => greedy_net(&s, &subset, eps, None)?,
                    Filter::Chronological => {
                        let all: Vec<usize> = (0..s.len()).collect();
                        let cands = lgh::nets::candidate_pairs(&s, &all, eps, CandidateFilter::Chronological);
                        greedy_net(&s, &subset, eps, Some(&cands))?
                    }
                };
                sink.json(&net)
            }
            None if epsilons.is_empty() => Err(CliError::Usage("net needs --epsilon or --epsilons".into())),
            None => {
                if subset.is_some() {
                    return Err(CliError::Usage("--subset applies to single-scale nets only".into()));
                }
                let c = load_covered(&space, tol, None)?;
                let table = net_growth_profile(&c, &epsilons, filter.into())?;
                let nets: Vec<Vec<DiamondNet>> = table.nets.clone();
                sink.table(&json!({ "rows": table.rows, "nets": nets }), &table.rows)
            }
        },
        Command::VerifyNet { space, net, subset } => {
            let s = load_space(&space, tol)?;
            let net = load_net(&net)?;
            sink.json(&verify_net(&s, &subset_or_all(subset, s.len()), &net))
        }
        Command::Doubling { space, subset } => {
            let s = load_space(&space, tol)?;
            sink.json(&doubling_constant(&s, &subset_or_all(subset, s.len()))?)
        }
        Command::Distort { a, b, corr } => {
            let (sa, sb) = (load_space(&a, tol)?, load_space(&b, tol)?);
            let raw: CorrespondenceJson = read_json(&corr)?;
            let left: Vec<usize> = (0..sa.len()).collect();
            let right: Vec<usize> = (0..sb.len()).collect();
            let c = lgh::corr::Correspondence::with_points(&left, &right, raw.pairs)?;
            sink.json(&json!({ "distortion": distortion(&c, &sa, &sb) }))
        }
        Command::Match { a, b, mode } => {
            let (sa, sb) = (load_space(&a, tol)?, load_space(&b, tol)?);
            let mode = match mode {
                Mode::Exact => SearchMode::Exact,
                Mode::Heuristic => SearchMode::Heuristic { seed: g.seed },
            };
            let m = min_distortion(&sa, &sb, mode)?;
            sink.json(&json!({ "correspondence": m.correspondence.to_json(), "distortion": m.distortion }))
        }
        Command::Certify { schedule, matching } => {
            let file: ScheduleFile = read_json(&schedule)?;
            let spaces = file.members.iter().map(|m| m.space.clone().into_space(tol)).collect::<lgh::Result<Vec<_>>>()?;
            let limit_space = file.limit.space.clone().into_space(tol)?;
            let take = g.depth.unwrap_or(spaces.len()).min(spaces.len());
            let seq: Vec<Scheduled> =
                spaces.iter().zip(&file.members).take(take).map(|(s, m)| Scheduled { space: s, nets: &m.nets }).collect();
            let limit = Scheduled { space: &limit_space, nets: &file.limit.nets };
            let source = match matching {
                Matching::Canonical => MatchingSource::Canonical,
                Matching::Search => MatchingSource::Search { seed: g.seed },
            };
            let report = lgh_certificate(&seq, &limit, &source, tol)?;
            let rows: Vec<StageCsv> = report
                .stages
                .iter()
                .map(|s| StageCsv { level: s.l, member: s.n, distortion: distortion_text(s.distortion), extension_at: s.extension_at })
                .collect();
            sink.table(&report, &rows)
        }
        Command::Sample { generator, plan, step } => {
            let gen = load_generator(&generator)?;
            let plan = match (plan, step) {
                (Some(p), None) => read_json::<SamplePlan>(&p)?,
                (None, Some(s)) => SamplePlan::grid(s),
                _ => return Err(CliError::Usage("sample needs --plan or --step".into())),
            };
            let s = sample_spacetime(&gen, &plan)?;
            sink.json(&json!({ "space": s.space.to_json(), "points": s.points }))
        }
        Command::GridNet { generator, t_minus, t_plus, epsilon, fiber_net } => {
            let gen = load_generator(&generator)?;
            let fnet = fiber_net.unwrap_or_else(|| {
                let r = gen.cone_scale * epsilon / 3.0;
                let mut net: Vec<usize> = Vec::new();
                for s in 0..gen.fiber.len() {
                    if net.iter().all(|&c| gen.fiber.dist(c, s) > r) {
                        net.push(s);
                    }
                }
                net
            });
            let grid = grid_net_product(&gen, t_minus, t_plus, epsilon, &fnet)?;
            sink.json(&json!({
                "net": grid.net,
                "vertices": grid.vertices,
                "layers": grid.layers,
                "layer_bound": grid.layer_bound,
                "fiber_net": fnet,
            }))
        }
        Command::Cones { generator, beta, omega, omega_slope, t_samples, directions } => {
            let gen = load_generator(&generator)?;
            let ts = t_samples.unwrap_or_else(|| {
                let (a, b) = gen.t_range;
                (0..=8).map(|i| a + (b - a) * f64::from(i) / 8.0).collect()
            });
            let varying = move |t: f64, _site: usize| omega + omega_slope * t;
            let fam = WarpedFamily {
                beta: Profile::Constant(beta),
                omega: if omega_slope == 0.0 { Profile::Constant(omega) } else { Profile::Function(&varying) },
            };
            sink.json(&cone_dominates(gen.cone_scale, &gen.fiber, &fam, &ts, directions, g.seed)?)
        }
        Command::Fourpoint { space, k, config, past } => {
            let s = load_space(&space, tol)?;
            match config {
                Some(c) if c.len() != 4 => Err(CliError::Usage(format!("--config takes y,x,z1,z2; got {} values", c.len()))),
                Some(c) => {
                    let kind = if past { ConfigKind::Past } else { ConfigKind::Future };
                    let cfg = FourPointConfig { kind, y: c[0], x: c[1], z1: c[2], z2: c[3] };
                    sink.json(&four_point_check_tol(&s, cfg, k, tol)?)
                }
                None => sink.json(&curvature_bound_scan_tol(&s, k, g.budget, g.seed, tol)),
            }
        }
        Command::Scan { space, ks } => {
            let s = load_space(&space, tol)?;
            let reports: Vec<_> = ks.iter().map(|&k| (k, curvature_bound_scan_tol(&s, k, g.budget, g.seed, tol))).collect();
            let rows: Vec<ScanRow> = reports
                .iter()
                .map(|(k, r)| ScanRow {
                    k: *k,
                    tested: r.tested,
                    skipped: r.skipped,
                    exhaustive: r.exhaustive,
                    violations: r.violations.len(),
                    min_slack: r.violations.iter().map(|v| v.slack).reduce(f64::min),
                })
                .collect();
            let full: Vec<_> = reports.iter().map(|(k, r)| json!({ "k": k, "report": r })).collect();
            sink.table(&json!({ "scans": full }), &rows)
        }
        Command::Measure { space, measure, net, subset, compare } => {
            let s = load_space(&space, tol)?;
            let m = read_json::<MeasureJson>(&measure)?.into_measure(&s)?;
            let net = load_net(&net)?;
            let subset = subset_or_all(subset, s.len());
            let out = induce_net_measure(&s, &m, &subset, &net)?;
            let gap = match compare {
                Some(p) => {
                    let other = read_json::<MeasureJson>(&p)?.into_measure(&s)?;
                    let mut universe = out.induced.support();
                    universe.extend(other.support());
                    universe.sort_unstable();
                    universe.dedup();
                    Some(weak_gap(&out.induced, &other, &universe)?)
                }
                None => None,
            };
            sink.json(&json!({
                "mass": m.mass_of(&subset),
                "induced": out.induced.to_json(&s),
                "total": out.induced.total(),
                "weak_gap": gap,
            }))
        }
        Command::Converge { sequence, filter, tail_tol, window } => {
            let file: SequenceFile = read_json(&sequence)?;
            let members = file
                .members
                .into_iter()
                .map(|c| ScheduledMember::greedy(c.into_covered(tol)?, &file.epsilons, filter.into()))
                .collect::<lgh::Result<Vec<_>>>()?;
            let levels = members.iter().map(|m| m.covered.cover.len()).min().unwrap_or(0);
            let len = members.len();
            let source = VecSource { members, params: file.params };
            let depth = Depth { levels, scales: file.epsilons.len(), members: g.depth.unwrap_or(len) };
            let mut cfg = LimitConfig::default();
            cfg.tail.tol = tail_tol;
            cfg.tail.window = window;
            let lim = diagonal_limit(&source, depth, &cfg)?;
            sink.json(&json!({ "limit": lim.covered.to_json(), "provenance": lim.provenance }))
        }
        Command::Blowup { space, o, lambda, o_minus, o_plus } => {
            let c: CoveredFiniteSpace = load_covered(&space, tol, Some(o))?;
            let (a, b) = match (o_minus, o_plus) {
                (Some(a), Some(b)) => (a, b),
                _ => select_basepoints(&c.space, o, lambda)?
                    .ok_or(CliError::Domain(lgh::Error::NoAdmissibleBasepoints(lambda)))?,
            };
            let bu = blow_up(&c, &BlowupSpec { o, o_minus: a, o_plus: b, lambda })?;
            sink.json(&json!({
                "spec": BlowupSpec { o, o_minus: a, o_plus: b, lambda },
                "covered": bu.covered.to_json(),
                "points": bu.points,
            }))
        }
        Command::Tangent { space, o, lambdas, halvings } => {
            let c = load_covered(&space, tol, Some(o))?;
            let cfg = TangentConfig { halvings, ..TangentConfig::default() };
            let rep = tangent_experiment(&c, o, &lambdas, None, &cfg)?;
            let rows: Vec<TangentCsv> = rep
                .rows
                .iter()
                .map(|r| TangentCsv {
                    lambda: r.lambda,
                    o_minus: r.o_minus,
                    o_plus: r.o_plus,
                    size: r.size,
                    diameter: r.diameter,
                    doubling: r.doubling.constant,
                    doubling_exact: r.doubling.exact,
                    finest_net: r.cardinalities.last().and_then(|k| k.last()).copied().unwrap_or(0),
                })
                .collect();
            sink.table(&json!({ "rows": rep.rows, "limit_note": rep.limit_note }), &rows)
        }
        Command::Causet { op } => causet(op, g, &sink),
    }
}

fn region(v: &[f64]) -> CliResult<(f64, f64)> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::Usage(format!("--region takes two values t-,t+; got {}", v.len()))),
    }
}

fn causet(op: CausetOp, g: &Global, sink: &Sink) -> CliResult<()> {
    match op {
        CausetOp::Ell { causet } => sink.json(&chain_ell(&load_causet(&causet)?)?.to_json()),
        CausetOp::Sprinkle { generator, region: r, count } => {
            let gen = load_generator(&generator)?;
            let sp = sprinkle(&gen, region(&r)?, count, g.seed)?;
            sink.json(&json!({ "causet": sp.causet, "sites": sp.sites }))
        }
        CausetOp::Embed { causet, space, map, one_directional } => {
            let c = load_causet(&causet)?;
            let s = load_space(&space, g.tol)?;
            let map = if map.is_empty() { (0..c.len()).collect() } else { map };
            let mode = if one_directional { EmbedMode::OneDirectional } else { EmbedMode::Bidirectional };
            sink.json(&faithful_embed_check(&c, &s, &map, mode)?)
        }
        CausetOp::Trial { a, b, region: r, counts } => {
            let (ga, gb) = (load_generator(&a)?, load_generator(&b)?);
            let rep = hauptvermutung_trial(&ga, &gb, region(&r)?, &counts, g.seed)?;
            let rows: Vec<TrialCsv> = rep
                .rows
                .iter()
                .map(|r| TrialCsv {
                    count: r.count,
                    seed: r.seed,
                    relation_density: r.relation_density,
                    height: r.height,
                    faithful_in_b: r.faithful_in_b,
                    transport_distortion: distortion_text(r.transport_distortion),
                    distortion: distortion_text(r.distortion),
                    finite_gap: r.finite_gap,
                })
                .collect();
            sink.table(&rep, &rows)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
