use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use lgh::causet::CausalSet;
use lgh::geometry::{GeneratorJson, ProductGenerator};
use lgh::nets::DiamondNet;
use lgh::space::{CoveredJson, SpaceJson};
use lgh::{CoveredFiniteSpace, FiniteLorentzSpace};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag combination not caught by the parser.
    Usage(String),
    Domain(lgh::Error),
    Io { path: PathBuf, message: String },
}

impl From<lgh::Error> for CliError {
    fn from(e: lgh::Error) -> Self {
        CliError::Domain(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn kind(e: &lgh::Error) -> &'static str {
    use lgh::Error::*;
    match e {
        Axiom(_) => "axiom_violation",
        ShapeMismatch(_) => "shape_mismatch",
        InvalidValue(_) => "invalid_value",
        EmptySubset => "empty_subset",
        IndexOutOfRange { .. } => "index_out_of_range",
        PrePdpRequired => "pre_pdp_required",
        SizeMismatch(..) => "size_mismatch",
        Uncoverable(_) => "uncoverable",
        NetDoesNotCover(_) => "net_does_not_cover",
        NotACorrespondence(_) => "not_a_correspondence",
        MiddleMismatch => "middle_mismatch",
        ExactCapExceeded(..) => "exact_cap_exceeded",
        CardinalityMismatch { .. } => "cardinality_mismatch",
        EpsilonTooLarge { .. } => "epsilon_too_large",
        NotAFiberNet(_) => "not_a_fiber_net",
        EmptyPlan => "empty_plan",
        UnsupportedMetricFamily(_) => "unsupported_metric_family",
        ChartDomain(_) => "chart_domain",
        Unrealizable(_) => "unrealizable",
        SolverDiverged(_) => "solver_diverged",
        InvalidConfiguration(_) => "invalid_configuration",
        UnmappedAtom(_) => "unmapped_atom",
        SupportMismatch(_) => "support_mismatch",
        UnboundedWeights(_) => "unbounded_weights",
        NonCauchy(..) => "non_cauchy",
        ScheduleViolation(_) => "schedule_violation",
        SpecViolated(_) => "spec_violated",
        NoAdmissibleBasepoints(_) => "no_admissible_basepoints",
        CycleDetected(_) => "cycle_detected",
        EmptyRegion => "empty_region",
        Json(_) => "json",
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        let (k, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Domain(e) => (kind(e), e.to_string()),
            CliError::Io { path, message } => ("io", format!("{}: {message}", path.display())),
        };
        serde_json::json!({ "error": k, "message": message }).to_string()
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| CliError::Domain(lgh::Error::Json(format!("{}: {e}", path.display()))))
}

/// Unwrap `{"space": ...}` and `{"covered": ...}` envelopes written by
/// other subcommands.
fn find_space(v: &Value) -> Option<&Value> {
    match v {
        Value::Object(m) if m.contains_key("labels") && m.contains_key("ell") => Some(v),
        Value::Object(m) => m.get("space").or_else(|| m.get("covered")).or_else(|| m.get("limit")).and_then(find_space),
        _ => None,
    }
}

pub fn load_space(path: &Path, tol: f64) -> CliResult<FiniteLorentzSpace> {
    let v: Value = read_json(path)?;
    let inner = find_space(&v)
        .ok_or_else(|| CliError::Domain(lgh::Error::Json(format!("{}: no space object found", path.display()))))?;
    let sj: SpaceJson = serde_json::from_value(inner.clone()).map_err(lgh::Error::from)?;
    Ok(sj.into_space(tol)?)
}

/// A covered space file, or a plain space with a trivial cover at `basepoint`.
pub fn load_covered(path: &Path, tol: f64, basepoint: Option<usize>) -> CliResult<CoveredFiniteSpace> {
    let v: Value = read_json(path)?;
    let covered = match &v {
        Value::Object(m) if m.contains_key("cover") => v.clone(),
        Value::Object(m) => m.get("covered").or_else(|| m.get("limit")).cloned().unwrap_or(Value::Null),
        _ => Value::Null,
    };
    if covered.is_object() {
        let cj: CoveredJson = serde_json::from_value(covered).map_err(lgh::Error::from)?;
        let mut c = cj.into_covered(tol)?;
        if let Some(o) = basepoint {
            c = CoveredFiniteSpace::new(c.space, o, c.cover)?;
        }
        return Ok(c);
    }
    let space = load_space(path, tol)?;
    Ok(CoveredFiniteSpace::trivial(space, basepoint.unwrap_or(0))?)
}

pub fn load_net(path: &Path) -> CliResult<DiamondNet> {
    let v: Value = read_json(path)?;
    let inner = match v.get("net") {
        Some(n) if n.is_object() => n.clone(),
        _ => v,
    };
    Ok(serde_json::from_value(inner).map_err(lgh::Error::from)?)
}

pub fn load_generator(path: &Path) -> CliResult<ProductGenerator> {
    Ok(read_json::<GeneratorJson>(path)?.into_generator()?)
}

pub fn load_causet(path: &Path) -> CliResult<CausalSet> {
    let v: Value = read_json(path)?;
    let inner = match v.get("causet") {
        Some(c) if c.is_object() => c.clone(),
        _ => v,
    };
    let raw: CausalSet = serde_json::from_value(inner).map_err(lgh::Error::from)?;
    Ok(CausalSet::new(raw.elements, raw.covers)?)
}

/// Where and how a report is written.
pub struct Sink {
    pub out: Option<PathBuf>,
    pub csv: bool,
}

impl Sink {
    fn write(&self, bytes: &[u8]) -> CliResult<()> {
        match &self.out {
            Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io { path: p.clone(), message: e.to_string() }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                })
            }
        }
    }

    /// JSON report; CSV is refused for non-tabular output.
    pub fn json<T: Serialize>(&self, value: &T) -> CliResult<()> {
        if self.csv {
            return Err(CliError::Usage("csv output is only available for tabular reports".into()));
        }
        let mut text = serde_json::to_string_pretty(value).map_err(lgh::Error::from)?;
        text.push('\n');
        self.write(text.as_bytes())
    }

    /// Tabular report: rows as CSV, or the full JSON value.
    pub fn table<T: Serialize, R: Serialize>(&self, value: &T, rows: &[R]) -> CliResult<()> {
        if !self.csv {
            return Sink { out: self.out.clone(), csv: false }.json(value);
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Domain(lgh::Error::Json(e.to_string())))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Domain(lgh::Error::Json(e.to_string())))?;
        self.write(&bytes)
    }
}
