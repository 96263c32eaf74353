//! Command-line front end: configuration, dispatch and the JSON report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{filtration_report, formal_character, probe, splitting_test, SplitVerdict};
use crate::boundary::{boundary_map, verify_bv, BoundaryValueResult};
use crate::cache::{Cache, CacheKey, CacheStatus};
use crate::enveloping::{is_weyl_invariant, select_invariants, InvariantData, Pbw};
use crate::error::{JacquetError, Result};
use crate::lie::{catalog_json, load_algebra, LieAlgebraData, Weight, CATALOG};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::spherical::{build_module_with, SphericalModule};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TRUNCATION: u32 = 8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "jacquet", version, about = "Jacquet-module generators for spherical principal series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Catalog entry (sl2r, sl3r, sp4r, sl2c).
    #[arg(long, global = true)]
    pub algebra: Option<String>,
    /// Lambda in simple-root coordinates, comma separated, e.g. "5/2,7/3".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Truncation height K.
    #[arg(long, short = 'k', global = true)]
    pub truncation: Option<u32>,
    /// Filtration step for split-test (1-based).
    #[arg(long, global = true)]
    pub step: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Catalog,
    Invariants,
    BoundaryMap,
    Verify,
    Certificates,
    Filtration,
    Character,
    SplitTest,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Catalog => "catalog",
            Command::Invariants => "invariants",
            Command::BoundaryMap => "boundary-map",
            Command::Verify => "verify",
            Command::Certificates => "certificates",
            Command::Filtration => "filtration",
            Command::Character => "character",
            Command::SplitTest => "split-test",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    algebra: Option<String>,
    lambda: Option<LambdaValue>,
    truncation: Option<u32>,
    step: Option<usize>,
    out: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
    verbosity: Option<u8>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LambdaValue {
    Text(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub command: Command,
    pub algebra: Option<String>,
    pub lambda: Option<Vec<Rational>>,
    pub truncation: u32,
    pub step: usize,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub verbosity: u8,
}

pub fn parse_lambda(text: &str) -> Result<Vec<Rational>> {
    let parts: Vec<&str> = text.split([',', ' ']).filter(|s| !s.is_empty()).collect();
    if parts.is_empty() {
        return Err(JacquetError::Configuration("empty lambda".into()));
    }
    parts.into_iter().map(parse_rational).collect()
}

impl SessionConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| JacquetError::Configuration(format!("{}: {e}", p.display())))?;
                toml::from_str::<ConfigFile>(&text).map_err(|e| JacquetError::Configuration(e.to_string()))?
            }
            None => ConfigFile::default(),
        };
        let lambda = match (&cli.lambda, &file.lambda) {
            (Some(t), _) => Some(parse_lambda(t)?),
            (None, Some(LambdaValue::Text(t))) => Some(parse_lambda(t)?),
            (None, Some(LambdaValue::List(v))) => Some(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?),
            (None, None) => None,
        };
        let truncation = cli.truncation.or(file.truncation).unwrap_or(DEFAULT_TRUNCATION);
        if truncation < 1 {
            return Err(JacquetError::Configuration("truncation must be at least 1".into()));
        }
        let step = cli.step.or(file.step).unwrap_or(1);
        if step < 1 {
            return Err(JacquetError::Configuration("step is 1-based".into()));
        }
        Ok(SessionConfig {
            command: cli.command,
            algebra: cli.algebra.clone().or(file.algebra),
            lambda,
            truncation,
            step,
            out: cli.out.clone().or(file.out),
            cache_dir: cli.cache_dir.clone().or(file.cache_dir),
            verbosity: cli.verbose.max(file.verbosity.unwrap_or(0)),
        })
    }

    fn algebra(&self) -> Result<Arc<LieAlgebraData>> {
        let name = self
            .algebra
            .as_deref()
            .ok_or_else(|| JacquetError::Configuration("--algebra is required".into()))?;
        Ok(Arc::new(load_algebra(name)?))
    }

    fn lambda(&self, alg: &LieAlgebraData) -> Result<Weight> {
        let l = self
            .lambda
            .clone()
            .ok_or_else(|| JacquetError::Configuration("--lambda is required".into()))?;
        if l.len() != alg.rank {
            return Err(JacquetError::Configuration(format!(
                "{} has rank {}, lambda has {} coordinates",
                alg.name,
                alg.rank,
                l.len()
            )));
        }
        Ok(Weight::new(l))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub input: serde_json::Value,
    pub sections: BTreeMap<String, serde_json::Value>,
    /// Seconds per section; excluded from determinism comparisons.
    pub timing: BTreeMap<String, f64>,
    pub horizons: BTreeMap<String, i64>,
    pub exit_code: i32,
    pub error: Option<ErrorInfo>,
}

impl ReportDocument {
    fn new(cfg: &SessionConfig) -> Self {
        ReportDocument {
            schema_version: REPORT_SCHEMA_VERSION,
            input: serde_json::json!({
                "command": cfg.command.name(),
                "algebra": cfg.algebra,
                "lambda": cfg.lambda.as_ref().map(|l| l.iter().map(format_rational).collect::<Vec<_>>()),
                "truncation": cfg.truncation,
                "step": cfg.step,
            }),
            sections: BTreeMap::new(),
            timing: BTreeMap::new(),
            horizons: BTreeMap::new(),
            exit_code: EXIT_OK,
            error: None,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| JacquetError::Parse(e.to_string()))
    }

    /// Copy with timing removed, for determinism checks.
    pub fn without_timing(&self) -> Self {
        let mut d = self.clone();
        d.timing.clear();
        d
    }
}

pub fn exit_code_for(e: &JacquetError) -> i32 {
    match e {
        JacquetError::TruncationTooSmall { .. } | JacquetError::ResourceExhausted { .. } | JacquetError::Io(_) => EXIT_TRUNCATION,
        JacquetError::UnknownAlgebra(_)
        | JacquetError::Configuration(_)
        | JacquetError::Parse(_)
        | JacquetError::Dimension { .. }
        | JacquetError::SingularParameter { .. }
        | JacquetError::UnsupportedParameter(_) => EXIT_USAGE,
        _ => EXIT_VERIFICATION,
    }
}

pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Option<ReportDocument>,
    /// Human-readable summary.
    pub text: String,
}

struct Session<'a> {
    cfg: &'a SessionConfig,
    cache: Cache,
    doc: ReportDocument,
    text: String,
    failed: bool,
}

/// Invariants for `alg`, through the cache.
pub fn cached_invariants(cache: &Cache, pbw: &Pbw) -> Result<(InvariantData, CacheStatus)> {
    let key = CacheKey::new(&pbw.alg.name, "invariants", serde_json::json!({}));
    let (v, status) = cache.get_or_compute(&key, || Ok(select_invariants(pbw)?.to_json(&pbw.alg)))?;
    match InvariantData::from_json(&v) {
        Ok(d) => Ok((d, status)),
        Err(e) => {
            log::warn!("cached invariants unusable ({e}); recomputing");
            Ok((select_invariants(pbw)?, CacheStatus::Recovered))
        }
    }
}

impl Session<'_> {
    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f(self);
        self.doc.timing.insert(name.into(), t.elapsed().as_secs_f64());
        out
    }

    fn catalog(&mut self) -> Result<()> {
        let mut entries = Vec::new();
        for name in CATALOG {
            let alg = load_algebra(name)?;
            let key = CacheKey::new(name, "structure_constants", serde_json::json!({}));
            let (constants, _) = self.cache.get_or_compute(&key, || Ok(catalog_json(&alg)))?;
            if constants != catalog_json(&alg) {
                return Err(JacquetError::Consistency(format!("cached structure constants for {name} differ")));
            }
            self.text.push_str(&format!(
                "{name:6} rank {} dim {:2} |W| {:2} degrees {:?}\n",
                alg.rank,
                alg.dim(),
                alg.weyl_order(),
                alg.fundamental_degrees
            ));
            entries.push(serde_json::json!({
                "name": name,
                "rank": alg.rank,
                "dim": alg.dim(),
                "weyl_order": alg.weyl_order(),
                "root_multiplicities": alg.positive_roots.iter().map(|(w, m)| serde_json::json!([w, m])).collect::<Vec<_>>(),
                "fundamental_degrees": alg.fundamental_degrees,
                "structure_constants_key": key.digest(),
            }));
        }
        self.doc.sections.insert("catalog".into(), entries.into());
        Ok(())
    }

    fn invariants(&mut self, pbw: &Pbw) -> Result<InvariantData> {
        let (inv, status) = cached_invariants(&self.cache, pbw)?;
        let alg = &pbw.alg;
        let w_inv: Vec<bool> = inv.chi_images.iter().map(|p| is_weyl_invariant(alg, p)).collect();
        if w_inv.iter().any(|b| !b) {
            self.failed = true;
        }
        self.text.push_str(&format!("invariants: degrees {:?}, shift {:?}, cache {:?}\n", inv.degrees, inv.shift, status));
        for c in &inv.chi_images {
            self.text.push_str(&format!("  chi = {c}\n"));
        }
        self.doc.sections.insert(
            "invariants".into(),
            serde_json::json!({
                "data": inv.to_json(alg),
                "weyl_invariant": w_inv,
                "cache": status,
            }),
        );
        Ok(inv)
    }

    fn module(&mut self, alg: Arc<LieAlgebraData>) -> Result<SphericalModule> {
        let pbw = Arc::new(Pbw::new(alg.clone()));
        let inv = self.timed("invariants", |s| s.invariants(&pbw))?;
        let lambda = self.cfg.lambda(&alg)?;
        let module = self.timed("spherical", |_| build_module_with(pbw, inv, lambda))?;
        self.doc
            .sections
            .insert("spherical".into(), serde_json::to_value(module.summary()).expect("summaries serialize"));
        let coroots: Vec<String> = (0..alg.rank).map(|j| format_rational(&alg.eval_coroot(&module.lambda, j))).collect();
        self.doc.input["lambda_on_coroots"] = coroots.clone().into();
        self.text.push_str(&format!("lambda(h_i) = {coroots:?}, dim Harm = {}\n", module.rank()));
        Ok(module)
    }

    fn boundary(&mut self, module: &SphericalModule, emit: bool) -> Result<BoundaryValueResult> {
        let k = self.cfg.truncation;
        let res = self.timed("boundary", |_| boundary_map(module, k))?;
        let rep = self.timed("verify", |_| verify_bv(module, &res))?;
        self.doc.horizons.insert("boundary".into(), k as i64);
        if !rep.passed() {
            self.failed = true;
        }
        for c in &rep.checks {
            self.text.push_str(&format!("{} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name));
        }
        if emit {
            self.text.push_str(&res.summary_table(module.alg()));
            self.doc.sections.insert("boundary".into(), res.to_json(module.alg()));
        }
        self.doc
            .sections
            .insert("verification".into(), serde_json::to_value(&rep).expect("reports serialize"));
        Ok(res)
    }

    fn relations(&mut self, module: &SphericalModule, res: &BoundaryValueResult, cmd: Command) -> Result<()> {
        let (filt, certs) = self.timed("filtration", |_| filtration_report(module, res))?;
        let alg = module.alg();
        let all_passed = certs.iter().all(|c| c.passed);
        if !all_passed {
            self.failed = true;
        }
        if matches!(cmd, Command::Certificates | Command::All) {
            self.text.push_str(&format!(
                "certificates: {} of {} verified\n",
                certs.iter().filter(|c| c.passed).count(),
                certs.len()
            ));
            self.doc.sections.insert(
                "relations".into(),
                serde_json::json!({
                    "certificates": certs.iter().map(|c| c.to_json(alg)).collect::<Vec<_>>(),
                    "all_passed": all_passed,
                }),
            );
        }
        if matches!(cmd, Command::Filtration | Command::All) {
            self.text.push_str(&format!("filtration: {}\n", filt.conclusion));
            self.doc
                .sections
                .insert("filtration".into(), serde_json::to_value(&filt).expect("reports serialize"));
        }
        Ok(())
    }

    fn character(&mut self, module: &SphericalModule, res: &BoundaryValueResult) {
        let table = formal_character(module, res, self.cfg.truncation);
        if !table.agree {
            self.failed = true;
        }
        self.text.push_str(&format!("character: {} weights, tables agree: {}\n", table.rows.len(), table.agree));
        self.doc
            .sections
            .insert("character".into(), serde_json::to_value(&table).expect("reports serialize"));
    }

    fn split(&mut self, module: &SphericalModule, res: &BoundaryValueResult) -> Result<()> {
        let i = self.cfg.step - 1;
        let s = self.timed("splitting", |_| splitting_test(module, res, i))?;
        self.text.push_str(&format!("split-test step {}: {:?} ({})\n", i + 1, s.verdict, s.reason));
        self.doc.horizons.insert("splitting".into(), s.ranks[0].horizon);
        let mut section = serde_json::to_value(&s).expect("reports serialize");
        if module.alg().rank == 1 {
            let p = probe(module, &s)?;
            self.text.push_str(&format!("probe: discrepancy flagged = {}\n", p.discrepancy));
            section["probe"] = serde_json::to_value(&p).expect("reports serialize");
        }
        if s.verdict == SplitVerdict::Inconclusive {
            self.doc.horizons.insert("splitting_inconclusive".into(), 1);
        }
        self.doc.sections.insert("splitting".into(), section);
        Ok(())
    }

    fn dispatch(&mut self) -> Result<()> {
        let cmd = self.cfg.command;
        if cmd == Command::Catalog {
            return self.catalog();
        }
        let alg = self.cfg.algebra()?;
        if cmd == Command::Invariants {
            let pbw = Pbw::new(alg);
            return self.timed("invariants", |s| s.invariants(&pbw)).map(|_| ());
        }
        let module = self.module(alg)?;
        let emit = matches!(cmd, Command::BoundaryMap | Command::All);
        let res = self.boundary(&module, emit)?;
        match cmd {
            Command::BoundaryMap | Command::Verify => {}
            Command::Certificates | Command::Filtration => self.relations(&module, &res, cmd)?,
            Command::Character => self.character(&module, &res),
            Command::SplitTest => self.split(&module, &res)?,
            Command::All => {
                self.relations(&module, &res, cmd)?;
                self.timed("character", |s| {
                    s.character(&module, &res);
                    Ok(())
                })?;
                self.split(&module, &res)?;
            }
            Command::Catalog | Command::Invariants => unreachable!(),
        }
        Ok(())
    }
}

/// Runs a configured session. Errors are recorded in the report.
pub fn run_session(cfg: &SessionConfig) -> RunOutcome {
    let mut s = Session {
        cfg,
        cache: Cache::from_env_or(cfg.cache_dir.as_deref()),
        doc: ReportDocument::new(cfg),
        text: String::new(),
        failed: false,
    };
    let result = s.dispatch();
    let code = match &result {
        Ok(()) if s.failed => EXIT_VERIFICATION,
        Ok(()) => EXIT_OK,
        Err(e) => {
            s.text.push_str(&format!("error [{}]: {e}\n", e.code()));
            s.doc.error = Some(ErrorInfo {
                code: e.code().into(),
                message: e.to_string(),
            });
            exit_code_for(e)
        }
    };
    s.doc.exit_code = code;
    RunOutcome {
        exit_code: code,
        report: Some(s.doc),
        text: s.text,
    }
}

fn write_report(path: &Path, doc: &ReportDocument) -> Result<()> {
    std::fs::write(path, doc.to_json_string())?;
    Ok(())
}

/// Full entry point: parses `argv`, runs, writes the report to `--out`.
pub fn run<I, T>(argv: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return RunOutcome {
                exit_code: code,
                report: None,
                text: e.to_string(),
            };
        }
    };
    let cfg = match SessionConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(e) => {
            return RunOutcome {
                exit_code: exit_code_for(&e),
                report: None,
                text: format!("error [{}]: {e}\n", e.code()),
            }
        }
    };
    let mut outcome = run_session(&cfg);
    if let (Some(path), Some(doc)) = (&cfg.out, &outcome.report) {
        if let Err(e) = write_report(path, doc) {
            outcome.text.push_str(&format!("error [{}]: {e}\n", e.code()));
            outcome.exit_code = EXIT_TRUNCATION;
        }
    }
    outcome
}
