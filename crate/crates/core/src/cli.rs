//! Job runner behind the `opembed` binary.
//!
//! Each command writes one report file into the output directory: a
//! structured text body followed by a JSON footer after [`FOOTER_MARKER`].
//! Reports contain no timings or absolute paths beyond what was passed in,
//! so the same spec and seed produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::corpus::{self, RESCALED_CASES, RESCALE_OFFSETS};
use crate::embed::{
    embed, rescale, EmbedOptions, EmbeddabilityVerdict, EmbeddingMethod, RealizationSummary,
    SemigroupRealization,
};
use crate::error::Error;
use crate::opcore::{kernel_defect, CMatrix, CardinalDim, StructuredOperator};
use crate::specfile::{SpecError, SpecFile};
use crate::verify::{
    check_embedding, continuity_steps, continuity_sweep, default_generator_steps,
    generator_convergence, random_unit_vectors, Tolerances, TimeSamples, VerificationReport,
};
use crate::wold::{wold_decompose, wold_verify, WoldDecomposition, WoldVerification};

pub const FOOTER_MARKER: &str = "---- machine-readable ----";
pub const CSV_HEADER: &str = "h,continuity_sup";
pub const DEFAULT_SEED: u64 = 7;
const SWEEP_LEVELS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Embed,
    Verify,
    Sweep,
    Demo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Embed => "embed",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::Demo => "demo",
        }
    }
}

/// One invocation. `None` fields fall back to the spec file's `[options]`
/// and `[contour]` tables, then to the library defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub tol: Option<f64>,
    pub nodes: Option<usize>,
    pub grid: Option<usize>,
    pub branch: Option<Vec<i64>>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

impl JobConfig {
    pub fn new(command: Command, input: Option<PathBuf>, out: impl Into<PathBuf>) -> Self {
        JobConfig {
            command,
            input,
            tol: None,
            nodes: None,
            grid: None,
            branch: None,
            depth: None,
            seed: None,
            out: out.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Ok = 0,
    VerificationFailed = 1,
    ParseError = 2,
    NumericFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub files: Vec<PathBuf>,
    /// One line for the terminal.
    pub summary: String,
}

pub fn run(config: &JobConfig) -> RunOutcome {
    if let Err(e) = fs::create_dir_all(&config.out) {
        return RunOutcome {
            status: ExitStatus::NumericFailure,
            files: Vec::new(),
            summary: format!("cannot create {}: {e}", config.out.display()),
        };
    }
    if config.command == Command::Demo {
        return run_demo(config);
    }
    let Some(input) = &config.input else {
        return RunOutcome {
            status: ExitStatus::ParseError,
            files: Vec::new(),
            summary: format!("{} needs an input spec file", config.command.name()),
        };
    };
    let parsed = SpecFile::load(input).and_then(|spec| {
        let op = spec.to_operator()?;
        Ok((spec, op))
    });
    let (spec, op) = match parsed {
        Ok(p) => p,
        Err(e) => return parse_failure(config, input, &e),
    };
    let settings = Settings::resolve(config, &spec);
    let job = Job {
        config,
        input,
        op: &op,
        settings: &settings,
    };
    match config.command {
        Command::Classify => job.classify(),
        Command::Embed => job.embed(false),
        Command::Verify => job.embed(true),
        Command::Sweep => job.sweep(),
        Command::Demo => unreachable!("handled above"),
    }
}

/// Effective numerical parameters after merging flags over the spec file.
#[derive(Debug, Clone, Serialize)]
struct Settings {
    #[serde(skip)]
    opts: EmbedOptions,
    nodes: usize,
    clearance: f64,
    grid: usize,
    depth: usize,
    branch_offsets: Option<Vec<i64>>,
    cluster_radius: Option<f64>,
    tol_override: Option<f64>,
    seed: u64,
}

impl Settings {
    fn resolve(config: &JobConfig, spec: &SpecFile) -> Settings {
        let d = EmbedOptions::default();
        let opts = EmbedOptions {
            nodes: config.nodes.or(spec.contour.nodes).unwrap_or(d.nodes),
            clearance: spec.contour.clearance.unwrap_or(d.clearance),
            grid: config.grid.or(spec.options.grid).unwrap_or(d.grid),
            depth: config.depth.or(spec.options.depth).unwrap_or(d.depth),
            branch_offsets: config.branch.clone().or_else(|| spec.options.branch.clone()),
            cluster_radius: spec.options.cluster_radius,
            dense_cap: d.dense_cap,
        };
        Settings::from_options(
            opts,
            config.tol.or(spec.options.tol),
            config.seed.or(spec.options.seed).unwrap_or(DEFAULT_SEED),
        )
    }

    fn from_options(opts: EmbedOptions, tol_override: Option<f64>, seed: u64) -> Settings {
        Settings {
            nodes: opts.nodes,
            clearance: opts.clearance,
            grid: opts.grid,
            depth: opts.depth,
            branch_offsets: opts.branch_offsets.clone(),
            cluster_radius: opts.cluster_radius,
            opts,
            tol_override,
            seed,
        }
    }

    fn samples(&self) -> TimeSamples {
        TimeSamples {
            seed: self.seed,
            ..TimeSamples::default()
        }
    }
}

#[derive(Debug, Serialize)]
struct WoldSummary {
    applied_to: &'static str,
    multiplicity: CardinalDim,
    multiplicity_note: Option<&'static str>,
    depth: usize,
    unitary_dim: usize,
    wandering_dim: usize,
    orthogonality: f64,
    invariance: f64,
    verification: WoldVerification,
    /// Columns of the wandering subspace and the unitary part, `[re, im]`.
    wandering_basis: Vec<Vec<[f64; 2]>>,
    unitary_basis: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
struct JobReport<'a> {
    command: &'static str,
    input: String,
    operator: String,
    dimension: Option<usize>,
    kernel_dim: CardinalDim,
    cokernel_dim: CardinalDim,
    settings: &'a Settings,
    verdict: &'a EmbeddabilityVerdict,
    realization: Option<RealizationSummary>,
    verification: Option<&'a VerificationReport>,
    generator_convergence: Option<Vec<(f64, f64)>>,
    wold: Option<WoldSummary>,
    status: ExitStatus,
    error: Option<String>,
}

struct Job<'a> {
    config: &'a JobConfig,
    input: &'a Path,
    op: &'a StructuredOperator,
    settings: &'a Settings,
}

impl Job<'_> {
    fn stem(&self) -> String {
        self.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "spec".into())
    }

    fn report_path(&self, ext: &str) -> PathBuf {
        self.config
            .out
            .join(format!("{}.{}.{ext}", self.stem(), self.config.command.name()))
    }

    fn base_report<'r>(&'r self, verdict: &'r EmbeddabilityVerdict) -> JobReport<'r> {
        let (kernel_dim, cokernel_dim) = kernel_defect(self.op);
        JobReport {
            command: self.config.command.name(),
            input: self.input.display().to_string(),
            operator: self.op.to_string(),
            dimension: self.op.dim(),
            kernel_dim,
            cokernel_dim,
            settings: self.settings,
            verdict,
            realization: None,
            verification: None,
            generator_convergence: None,
            wold: None,
            status: ExitStatus::Ok,
            error: None,
        }
    }

    fn classify(&self) -> RunOutcome {
        let verdict = crate::embed::classify(self.op);
        let report = self.base_report(&verdict);
        self.finish(report, "txt")
    }

    fn embed(&self, full: bool) -> RunOutcome {
        let outcome = match embed(self.op, &self.settings.opts) {
            Ok(o) => o,
            Err(e) => return self.numeric_failure(&e),
        };
        let mut report = self.base_report(&outcome.verdict);
        let mut verification = None;
        if let Some(s) = &outcome.realization {
            match verify_realization(self.op, s, self.settings) {
                Ok(v) => verification = Some(v),
                Err(e) => return self.numeric_failure(&e),
            }
            if full && s.generator.is_some() {
                match generator_convergence(s, &default_generator_steps()) {
                    Ok(g) => report.generator_convergence = Some(g),
                    Err(e) => return self.numeric_failure(&e),
                }
            }
            report.realization = Some(s.summary());
        }
        if full {
            report.wold = wold_summary(self.op, self.settings.opts.depth);
        }
        report.verification = verification.as_ref();
        if verification.as_ref().is_some_and(|v| !v.pass) {
            report.status = ExitStatus::VerificationFailed;
        }
        self.finish(report, "txt")
    }

    fn sweep(&self) -> RunOutcome {
        let outcome = match embed(self.op, &self.settings.opts) {
            Ok(o) => o,
            Err(e) => return self.numeric_failure(&e),
        };
        let mut csv = format!("{CSV_HEADER}\n");
        let summary = match &outcome.realization {
            Some(s) => {
                let n = s.dim();
                let random = TimeSamples::default().random_vectors;
                let mut vectors = CMatrix::identity(n, n + random);
                vectors
                    .view_mut((0, n), (n, random))
                    .copy_from(&random_unit_vectors(n, random, self.settings.seed));
                let hs = continuity_steps(s.admissible, SWEEP_LEVELS);
                let profile = match continuity_sweep(s, &vectors, &hs) {
                    Ok(p) => p,
                    Err(e) => return self.numeric_failure(&e),
                };
                for p in &profile {
                    let _ = writeln!(csv, "{},{}", p.h, p.sup);
                }
                format!("{} points, verdict {}", profile.len(), outcome.verdict)
            }
            None => format!("no realization to sweep, verdict {}", outcome.verdict),
        };
        let path = self.report_path("csv");
        if let Err(e) = fs::write(&path, csv) {
            return io_failure(&path, e);
        }
        RunOutcome {
            status: ExitStatus::Ok,
            files: vec![path],
            summary,
        }
    }

    fn numeric_failure(&self, e: &Error) -> RunOutcome {
        let verdict = crate::embed::classify(self.op);
        let mut report = self.base_report(&verdict);
        report.status = ExitStatus::NumericFailure;
        report.error = Some(e.to_string());
        self.finish(report, "txt")
    }

    fn finish(&self, report: JobReport<'_>, ext: &str) -> RunOutcome {
        let path = self.report_path(ext);
        let body = render_job(&report);
        if let Err(e) = fs::write(&path, body) {
            return io_failure(&path, e);
        }
        let summary = match &report.error {
            Some(err) => format!("{}: {err}", report.verdict),
            None => match report.verification {
                Some(v) => format!("{} (pass = {})", report.verdict, v.pass),
                None => report.verdict.to_string(),
            },
        };
        RunOutcome {
            status: report.status,
            files: vec![path],
            summary,
        }
    }
}

fn verify_realization(
    op: &StructuredOperator,
    s: &SemigroupRealization,
    settings: &Settings,
) -> crate::Result<VerificationReport> {
    let target = op.materialize_with_cap(settings.opts.dense_cap)?;
    let tol = Tolerances::for_realization(s).with_override(settings.tol_override);
    check_embedding(s, &target, &tol, &settings.samples())
}

/// Wold data for isometries, or for co-isometries through the adjoint.
fn wold_summary(op: &StructuredOperator, depth: usize) -> Option<WoldSummary> {
    let attempt = |v: &StructuredOperator, applied_to: &'static str| -> Option<WoldSummary> {
        let w = wold_decompose(v, depth).ok()?;
        let verification = wold_verify(v, &w).ok()?;
        Some(summarize_wold(&w, verification, applied_to))
    };
    attempt(op, "operator").or_else(|| attempt(&op.adjoint()?, "adjoint"))
}

fn summarize_wold(w: &WoldDecomposition, verification: WoldVerification, applied_to: &'static str) -> WoldSummary {
    let columns = |m: &CMatrix| -> Vec<Vec<[f64; 2]>> {
        m.column_iter()
            .map(|c| c.iter().map(|z| [z.re, z.im]).collect())
            .collect()
    };
    WoldSummary {
        applied_to,
        multiplicity: w.multiplicity,
        multiplicity_note: w.multiplicity_note,
        depth: w.depth_used,
        unitary_dim: w.unitary_dim(),
        wandering_dim: w.wandering_dim(),
        orthogonality: w.residuals.orthogonality,
        invariance: w.residuals.invariance,
        verification,
        wandering_basis: columns(&w.wandering),
        unitary_basis: columns(&w.unitary_part),
    }
}

fn parse_failure(config: &JobConfig, input: &Path, e: &SpecError) -> RunOutcome {
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spec".into());
    let path = config.out.join(format!("{stem}.{}.txt", config.command.name()));
    let mut body = format!("# opembed {}\ninput      {}\nstatus     2\nparse error: {e}\n", config.command.name(), input.display());
    let footer = serde_json::json!({
        "command": config.command.name(),
        "input": input.display().to_string(),
        "status": ExitStatus::ParseError,
        "error": {
            "message": e.message,
            "line": e.line,
            "column": e.column,
            "field": e.field,
        },
    });
    push_footer(&mut body, &footer);
    let mut files = Vec::new();
    if fs::write(&path, body).is_ok() {
        files.push(path);
    }
    RunOutcome {
        status: ExitStatus::ParseError,
        files,
        summary: format!("parse error: {e}"),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> RunOutcome {
    RunOutcome {
        status: ExitStatus::NumericFailure,
        files: Vec::new(),
        summary: format!("cannot write {}: {e}", path.display()),
    }
}

fn push_footer(body: &mut String, value: &impl Serialize) {
    body.push('\n');
    body.push_str(FOOTER_MARKER);
    body.push('\n');
    body.push_str(&serde_json::to_string_pretty(value).expect("report serializes"));
    body.push('\n');
}

/// Parses the JSON footer of a report file.
pub fn read_footer(report: &str) -> Option<serde_json::Value> {
    let (_, json) = report.split_once(FOOTER_MARKER)?;
    serde_json::from_str(json.trim()).ok()
}

fn render_job(r: &JobReport<'_>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# opembed {}", r.command);
    let _ = writeln!(s, "input      {}", r.input);
    let _ = writeln!(s, "operator   {}", r.operator);
    match r.dimension {
        Some(n) => {
            let _ = writeln!(s, "dimension  {n}");
        }
        None => s.push_str("dimension  overflow\n"),
    }
    let _ = writeln!(s, "kernel     {}", r.kernel_dim);
    let _ = writeln!(s, "cokernel   {}", r.cokernel_dim);
    let _ = writeln!(s, "verdict    {}", r.verdict);
    let _ = writeln!(s, "status     {}", r.status.code());
    if let Some(err) = &r.error {
        let _ = writeln!(s, "error      {err}");
    }

    if let Some(real) = &r.realization {
        s.push_str("\n## realization\n");
        let _ = writeln!(s, "method       {}", real.method);
        let comps: Vec<String> = real.components.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(s, "components   {}", comps.join(", "));
        let _ = writeln!(s, "family       {}", real.family);
        let _ = writeln!(s, "admissible   {}", admissible_label(real));
        match real.generator_norm {
            Some(g) => {
                let _ = writeln!(s, "generator    bounded, norm {g:.6e}");
            }
            None => s.push_str("generator    not materialized\n"),
        }
        if let Some(b) = &real.branch_offsets {
            let _ = writeln!(s, "branch       {b:?}");
        }
        for note in &real.notes {
            let _ = writeln!(s, "note         {note}");
        }
    }

    if let Some(v) = r.verification {
        let t = &v.tolerances;
        s.push_str("\n## verification\n");
        let _ = writeln!(s, "identity     {:.3e}  (tol {:e})", v.identity_residual, t.identity);
        let _ = writeln!(s, "endpoint     {:.3e}  (tol {:e})", v.endpoint_residual, t.endpoint);
        let _ = writeln!(
            s,
            "cocycle      {:.3e}  (tol {:e}, worst at s={}, t={})",
            v.cocycle_residual_max, t.cocycle, v.cocycle_worst.0, v.cocycle_worst.1
        );
        if let Some(g) = v.generator_residual {
            let _ = writeln!(s, "generator    {g:.3e}  (tol {:e})", t.generator);
        }
        let continuity = match (v.continuity_assessed, v.continuity_monotone && v.continuity_decays) {
            (false, _) => "not assessed on a lattice",
            (true, true) => "decaying",
            (true, false) => "NOT decaying",
        };
        let _ = writeln!(s, "continuity   {continuity}");
        for p in &v.continuity_profile {
            let _ = writeln!(s, "  h = {:<12e} sup = {:.3e}", p.h, p.sup);
        }
        let _ = writeln!(s, "samples      {}", v.samples_used);
        let failures = v.failures();
        if failures.is_empty() {
            s.push_str("pass         true\n");
        } else {
            let _ = writeln!(s, "pass         false ({})", failures.join(", "));
        }
    }

    if let Some(g) = &r.generator_convergence {
        s.push_str("\n## generator convergence\n");
        for (h, res) in g {
            let _ = writeln!(s, "  h = {h:<12e} residual = {res:.3e}");
        }
    }

    if let Some(w) = &r.wold {
        s.push_str("\n## wold decomposition\n");
        let _ = writeln!(s, "applied to   {}", w.applied_to);
        let _ = writeln!(s, "multiplicity {}", w.multiplicity);
        if let Some(note) = w.multiplicity_note {
            let _ = writeln!(s, "note         {note}");
        }
        let _ = writeln!(s, "depth        {}", w.depth);
        let _ = writeln!(s, "unitary dim  {}", w.unitary_dim);
        let _ = writeln!(s, "wandering    {}", w.wandering_dim);
        let _ = writeln!(s, "residual     {:.3e}", w.verification.max_residual());
        s.push_str("bases        columns in the footer\n");
    }

    push_footer(&mut s, r);
    s
}

fn admissible_label(r: &RealizationSummary) -> String {
    match r.admissible {
        crate::embed::AdmissibleTimes::Continuous => "all t >= 0".into(),
        crate::embed::AdmissibleTimes::Grid { per_unit } => format!("grid t in (1/{per_unit})N"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoRow {
    pub name: String,
    pub verdict: String,
    pub expected_match: bool,
    pub tags: Vec<EmbeddingMethod>,
    pub endpoint_residual: Option<f64>,
    pub cocycle_residual_max: Option<f64>,
    pub identity_residual: Option<f64>,
    pub pass: Option<bool>,
    pub error: Option<String>,
}

/// Runs the built-in corpus. Rows come back in corpus order, followed by
/// the rescaled variants.
pub fn demo_rows(seed: u64, opts: &EmbedOptions, tol_override: Option<f64>) -> Vec<DemoRow> {
    let settings = Settings::from_options(opts.clone(), tol_override, seed);
    let mut rows = Vec::new();
    let mut rescaled = Vec::new();
    for case in corpus::demo_corpus(seed) {
        let mut row = DemoRow {
            name: case.name.to_string(),
            verdict: String::new(),
            expected_match: false,
            tags: Vec::new(),
            endpoint_residual: None,
            cocycle_residual_max: None,
            identity_residual: None,
            pass: None,
            error: None,
        };
        match embed(&case.op, opts) {
            Ok(outcome) => {
                row.verdict = outcome.verdict.to_string();
                row.expected_match = case.expected.matches(&outcome.verdict);
                row.tags = outcome.verdict.tags();
                if let Some(s) = &outcome.realization {
                    record(&mut row, verify_realization(&case.op, s, &settings));
                    if RESCALED_CASES.contains(&case.name) {
                        for n in RESCALE_OFFSETS.into_iter().filter(|&n| n != 0) {
                            let r = rescale(s, n);
                            let mut sub = row.clone();
                            sub.name = format!("{}@{n:+}", case.name);
                            sub.tags = vec![r.method];
                            record(&mut sub, verify_realization(&case.op, &r, &settings));
                            rescaled.push(sub);
                        }
                    }
                }
            }
            Err(e) => {
                row.verdict = crate::embed::classify(&case.op).to_string();
                row.error = Some(e.to_string());
            }
        }
        rows.push(row);
    }
    rows.extend(rescaled);
    rows
}

fn record(row: &mut DemoRow, v: crate::Result<VerificationReport>) {
    match v {
        Ok(v) => {
            row.endpoint_residual = Some(v.endpoint_residual);
            row.cocycle_residual_max = Some(v.cocycle_residual_max);
            row.identity_residual = Some(v.identity_residual);
            row.pass = Some(v.pass);
            row.error = None;
        }
        Err(e) => {
            row.pass = Some(false);
            row.error = Some(e.to_string());
        }
    }
}

fn run_demo(config: &JobConfig) -> RunOutcome {
    let d = EmbedOptions::default();
    let opts = EmbedOptions {
        nodes: config.nodes.unwrap_or(d.nodes),
        grid: config.grid.unwrap_or(d.grid),
        depth: config.depth.unwrap_or(d.depth),
        branch_offsets: None,
        ..d
    };
    let seed = config.seed.unwrap_or(DEFAULT_SEED);
    let rows = demo_rows(seed, &opts, config.tol);

    let mut covered: Vec<EmbeddingMethod> = rows.iter().flat_map(|r| r.tags.iter().copied()).collect();
    covered.sort();
    covered.dedup();
    let missing: Vec<EmbeddingMethod> = EmbeddingMethod::ALL
        .into_iter()
        .filter(|m| !covered.contains(m))
        .collect();
    let mismatches = rows.iter().filter(|r| !r.expected_match).count();
    let failures = rows.iter().filter(|r| r.pass == Some(false)).count();
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    let status = if errors > 0 {
        ExitStatus::NumericFailure
    } else if mismatches > 0 || failures > 0 || !missing.is_empty() {
        ExitStatus::VerificationFailed
    } else {
        ExitStatus::Ok
    };

    let mut s = String::from("# opembed demo\n");
    let _ = writeln!(s, "seed       {seed}");
    let _ = writeln!(s, "cases      {}", rows.len());
    let _ = writeln!(s, "status     {}\n", status.code());
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "-".into());
    let _ = writeln!(
        s,
        "{:<32} {:<6} {:<10} {:<10} {:<10} {:<5} verdict",
        "case", "match", "endpoint", "cocycle", "identity", "pass"
    );
    for r in &rows {
        let pass = match r.pass {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "-",
        };
        let _ = writeln!(
            s,
            "{:<32} {:<6} {:<10} {:<10} {:<10} {:<5} {}",
            r.name,
            if r.expected_match { "yes" } else { "NO" },
            opt(r.endpoint_residual),
            opt(r.cocycle_residual_max),
            opt(r.identity_residual),
            pass,
            r.verdict
        );
        if let Some(e) = &r.error {
            let _ = writeln!(s, "    error: {e}");
        }
    }
    let tags: Vec<String> = covered.iter().map(|m| m.to_string()).collect();
    let _ = writeln!(s, "\nmethods covered: {}", tags.join(", "));
    if !missing.is_empty() {
        let tags: Vec<String> = missing.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(s, "methods missing: {}", tags.join(", "));
    }
    let footer = serde_json::json!({
        "command": "demo",
        "seed": seed,
        "status": status,
        "methods_covered": covered,
        "rows": rows,
    });
    push_footer(&mut s, &footer);

    let path = config.out.join("demo.summary.txt");
    if let Err(e) = fs::write(&path, s) {
        return io_failure(&path, e);
    }
    RunOutcome {
        status,
        files: vec![path],
        summary: format!(
            "{} cases, {mismatches} verdict mismatches, {failures} verification failures",
            rows.len()
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_spec(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn scratch(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("opembed-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn jordan_classify_reports_kernel() {
        let dir = scratch("jordan");
        let spec = write_spec(&dir, "jordan.toml", "[operator]\nkind = \"dense\"\nrows = [[0, 1], [0, 0]]\n");
        let out = run(&JobConfig::new(Command::Classify, Some(spec), &dir));
        assert_eq!(out.status, ExitStatus::Ok);
        let text = fs::read_to_string(&out.files[0]).unwrap();
        assert!(text.contains("verdict    NotEmbeddable(kernel Finite(1), cokernel Finite(1))"));
        let json = read_footer(&text).unwrap();
        assert_eq!(json["verdict"]["NotEmbeddable"]["NecessaryConditionViolated"]["kernel_dim"], 1);
    }

    #[test]
    fn missing_input_is_a_parse_error() {
        let dir = scratch("missing");
        let out = run(&JobConfig::new(Command::Embed, None, &dir));
        assert_eq!(out.status, ExitStatus::ParseError);
        let out = run(&JobConfig::new(Command::Embed, Some(dir.join("absent.toml")), &dir));
        assert_eq!(out.status, ExitStatus::ParseError);
    }

    #[test]
    fn sweep_on_diagonal_writes_csv() {
        let dir = scratch("sweep");
        let spec = write_spec(
            &dir,
            "diag.toml",
            "[operator]\nkind = \"diagonal\"\neigenvalues = [2.0, [0.0, 1.0], 0.5]\n",
        );
        let out = run(&JobConfig::new(Command::Sweep, Some(spec), &dir));
        assert_eq!(out.status, ExitStatus::Ok);
        let csv = fs::read_to_string(&out.files[0]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let rows: Vec<(f64, f64)> = lines
            .map(|l| {
                let (h, v) = l.split_once(',').unwrap();
                (h.parse().unwrap(), v.parse().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), SWEEP_LEVELS as usize);
        // sup ‖T(h)x − x‖ ≈ h·max|log λ| = h·π/2 for small h
        let (h, sup) = rows[rows.len() - 1];
        let expect = h * std::f64::consts::FRAC_PI_2;
        assert!((sup - expect).abs() < 0.01 * expect, "{sup} vs {expect}");
    }
}
