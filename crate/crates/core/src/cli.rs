//! Batch front end: JSON run configurations, command dispatch and table
//! output.
//!
//! A configuration is a JSON object with three keys:
//!
//! ```json
//! {
//!   "command": "spectrum",
//!   "params": { "centers": [[0, 0, 0]], "strengths": [-2], "profile": { "kind": "indicator", "b": 1 } },
//!   "output": { "path": "spectrum.csv", "format": "csv" }
//! }
//! ```
//!
//! `command` is one of `spectrum`, `resolvent`, `merge-scan`, `critical`,
//! `form-probe`, `verify`; `output` is optional (stdout, CSV). Unknown keys
//! anywhere are rejected. CSV output starts with `# key = value` metadata
//! lines (command, version, seed, extras), then a header row; reals carry 17
//! significant digits. JSON output holds the same metadata and one object
//! per row.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::criticality::{gamma_c_bosons, gamma_hat_c, gamma_hat_extrema, geometric_grid};
use crate::error::{Error, Result};
use crate::kernels::{g_lambda, green_free_kernel, macdonald_k, macdonald_k_general_path, MacdonaldOrder, MassModel, ThetaKind, ThetaProfile};
use crate::limits::{g_shift_norm, g_shift_norm_momentum, g_shift_norm_position, merge_scan_with, merge_probe_source, verify_identity, Identity};
use crate::manybody::{phi_form_estimate, GaussianCharge};
use crate::pointop::{boundary_probe, default_probe_radii, resolvent_apply, CenterConfig, GaussianSource};
use crate::quadrature::QuadSpec;
use crate::spectral::bound_states;
use crate::Vec3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ZERORANGE_THREADS";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub centers: Vec<[f64; 3]>,
    pub strengths: Vec<f64>,
    pub profile: ThetaProfile,
    #[serde(default = "one")]
    pub lambda_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub center: [f64; 3],
    #[serde(default = "one")]
    pub width: f64,
}

impl Default for SourceSpec {
    fn default() -> Self {
        SourceSpec {
            amplitude: 1.0,
            center: [0.0; 3],
            width: 1.0,
        }
    }
}

impl SourceSpec {
    fn build(&self) -> GaussianSource {
        GaussianSource::new(self.amplitude, Vec3::from(self.center), self.width)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolventParams {
    pub centers: Vec<[f64; 3]>,
    pub strengths: Vec<f64>,
    pub profile: ThetaProfile,
    pub lambda: f64,
    #[serde(default)]
    pub source: SourceSpec,
    #[serde(default)]
    pub probes: Vec<[f64; 3]>,
    #[serde(default)]
    pub quad: QuadSpec,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeScanParams {
    pub alphas: [f64; 2],
    pub profile: ThetaProfile,
    pub radii: Vec<f64>,
    #[serde(default = "one")]
    pub lambda_probe: f64,
    /// Defaults to the unit Gaussian at `(1/2, 0, 0)`.
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub quad: QuadSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalParams {
    pub n_values: Vec<u64>,
    pub eta_grid: EtaGrid,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormProbeParams {
    pub charges: [GaussianCharge; 2],
    pub alphas: [f64; 2],
    pub gamma: f64,
    pub profile: ThetaProfile,
    pub eta: f64,
    #[serde(default = "half")]
    pub m_light: f64,
    pub lambda: f64,
    pub samples: u64,
    pub seed: u64,
    #[serde(default)]
    pub quad: QuadSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    #[serde(default)]
    pub quad: QuadSpec,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Spectrum(SpectrumParams),
    Resolvent(ResolventParams),
    MergeScan(MergeScanParams),
    Critical(CriticalParams),
    FormProbe(FormProbeParams),
    Verify(VerifyParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Resolvent(_) => "resolvent",
            Command::MergeScan(_) => "merge-scan",
            Command::Critical(_) => "critical",
            Command::FormProbe(_) => "form-probe",
            Command::Verify(_) => "verify",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::FormProbe(p) => Some(p.seed),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output: OutputSpec,
}

fn constraint(key: impl Into<String>, constraint: impl Into<String>) -> Error {
    Error::ConfigConstraint {
        key: key.into(),
        constraint: constraint.into(),
    }
}

fn typed<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let mut key = e.path().to_string();
        let message = e.inner().to_string();
        // unknown fields are reported at the parent path
        if let Some(name) = message.strip_prefix("unknown field `").and_then(|m| m.split('`').next()) {
            if key == "." {
                key = name.to_string();
            } else if !key.ends_with(name) {
                key = format!("{key}.{name}");
            }
        }
        if key == "." {
            key = prefix.trim_end_matches('.').to_string();
        } else {
            key = format!("{prefix}{key}");
        }
        constraint(key, message)
    })
}

/// Parses and validates a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::ConfigSyntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(mut top) = value else {
        return Err(constraint("(document)", "must be a JSON object"));
    };
    if let Some(key) = top.keys().find(|k| !matches!(k.as_str(), "command" | "params" | "output")) {
        return Err(constraint(key.clone(), "unknown key"));
    }
    let name = match top.remove("command") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(constraint("command", "must be a string")),
        None => return Err(constraint("command", "is required")),
    };
    let params = top.remove("params").unwrap_or_else(|| json!({}));
    let command = match name.as_str() {
        "spectrum" => Command::Spectrum(typed(params, "")?),
        "resolvent" => Command::Resolvent(typed(params, "")?),
        "merge-scan" => Command::MergeScan(typed(params, "")?),
        "critical" => Command::Critical(typed(params, "")?),
        "form-probe" => Command::FormProbe(typed(params, "")?),
        "verify" => Command::Verify(typed(params, "")?),
        _ => return Err(Error::UnknownCommand(name)),
    };
    let output = match top.remove("output") {
        Some(v) => typed(v, "output.")?,
        None => OutputSpec::default(),
    };
    let cfg = RunConfig { command, output };
    validate(&cfg)?;
    Ok(cfg)
}

fn check_positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(constraint(key, format!("must be positive and finite, got {v}")))
    }
}

fn check_profile(key: &str, p: &ThetaProfile) -> Result<()> {
    if p.kind != ThetaKind::LocalZero {
        check_positive(&format!("{key}.b"), p.b)?;
    }
    Ok(())
}

fn check_quad(q: &QuadSpec) -> Result<()> {
    check_positive("quad.abs_tol", q.abs_tol)?;
    check_positive("quad.rel_tol", q.rel_tol)?;
    if q.max_subdivisions == 0 {
        return Err(constraint("quad.max_subdivisions", "must be positive"));
    }
    Ok(())
}

fn build_centers(centers: &[[f64; 3]], strengths: &[f64], profile: ThetaProfile) -> Result<CenterConfig> {
    if centers.len() != strengths.len() {
        return Err(constraint("strengths", "needs one entry per center"));
    }
    CenterConfig::new(centers.iter().map(|c| Vec3::from(*c)).collect(), strengths.to_vec(), profile)
        .map_err(|e| constraint("centers", e.to_string()))
}

fn check_source(key: &str, s: &SourceSpec) -> Result<()> {
    if !s.amplitude.is_finite() || s.center.iter().any(|c| !c.is_finite()) {
        return Err(constraint(key, "must be finite"));
    }
    check_positive(&format!("{key}.width"), s.width)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    match &cfg.command {
        Command::Spectrum(p) => {
            check_profile("profile", &p.profile)?;
            check_positive("lambda_max", p.lambda_max)?;
            if p.centers.is_empty() {
                return Err(constraint("centers", "at least one center required"));
            }
            build_centers(&p.centers, &p.strengths, p.profile)?;
        }
        Command::Resolvent(p) => {
            check_profile("profile", &p.profile)?;
            check_positive("lambda", p.lambda)?;
            check_quad(&p.quad)?;
            check_source("source", &p.source)?;
            build_centers(&p.centers, &p.strengths, p.profile)?;
            if p.probes.iter().flatten().any(|v| !v.is_finite()) {
                return Err(constraint("probes", "must be finite"));
            }
        }
        Command::MergeScan(p) => {
            check_profile("profile", &p.profile)?;
            check_positive("lambda_probe", p.lambda_probe)?;
            check_quad(&p.quad)?;
            if let Some(s) = &p.source {
                check_source("source", s)?;
            }
            if p.alphas.iter().any(|a| !a.is_finite()) {
                return Err(constraint("alphas", "must be finite"));
            }
            if p.radii.is_empty()
                || p.radii.iter().any(|&r| !(r > 0.0 && r.is_finite()))
                || p.radii.windows(2).any(|w| w[1] >= w[0])
            {
                return Err(constraint("radii", "must be nonempty, positive and strictly decreasing"));
            }
        }
        Command::Critical(p) => {
            if p.n_values.is_empty() || p.n_values.iter().any(|&n| n < 2) {
                return Err(constraint("n_values", "each N must be at least 2"));
            }
            check_positive("eta_grid.lo", p.eta_grid.lo)?;
            check_positive("eta_grid.hi", p.eta_grid.hi)?;
            if p.eta_grid.hi <= p.eta_grid.lo {
                return Err(constraint("eta_grid.hi", "must exceed eta_grid.lo"));
            }
            if p.eta_grid.points < 2 {
                return Err(constraint("eta_grid.points", "must be at least 2"));
            }
        }
        Command::FormProbe(p) => {
            check_profile("profile", &p.profile)?;
            check_positive("eta", p.eta)?;
            check_positive("m_light", p.m_light)?;
            check_positive("lambda", p.lambda)?;
            check_quad(&p.quad)?;
            if !(p.gamma >= 0.0 && p.gamma.is_finite()) {
                return Err(constraint("gamma", "must be nonnegative"));
            }
            if p.alphas.iter().any(|a| !a.is_finite()) {
                return Err(constraint("alphas", "must be finite"));
            }
            for (i, c) in p.charges.iter().enumerate() {
                GaussianCharge::new(c.amplitude, c.width_p, c.width_big_p)
                    .map_err(|e| constraint(format!("charges[{i}]"), e.to_string()))?;
            }
            if p.samples < 10_000 {
                return Err(constraint("samples", "must be at least 10000"));
            }
        }
        Command::Verify(p) => check_quad(&p.quad)?,
    }
    Ok(())
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(v) => format_real(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(_) | Cell::Empty => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// A command's output: metadata plus homogeneous rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub command: String,
    pub seed: Option<u64>,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Table {
            command: command.to_string(),
            seed: None,
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Value of a metadata entry.
    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn header(&self) -> Vec<(String, String)> {
        let mut h = vec![
            ("command".to_string(), self.command.clone()),
            ("version".to_string(), VERSION.to_string()),
            ("seed".to_string(), self.seed.map_or("none".to_string(), |s| s.to_string())),
        ];
        h.extend(self.metadata.iter().cloned());
        h
    }
}

/// Serializes a table.
pub fn render_table(table: &Table, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in table.header() {
                let _ = writeln!(out, "# {k} = {v}");
            }
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let io = |e: csv::Error| Error::domain("render_table", e.to_string());
            w.write_record(&table.columns).map_err(io)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::domain("render_table", e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
            Ok(out)
        }
        Format::Json => {
            let meta: Map<String, Value> = table.header().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| Value::Object(table.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect()))
                .collect();
            let doc = json!({ "metadata": meta, "columns": table.columns, "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes a table to `path`, or to stdout when `path` is `None`.
pub fn emit_table(table: &Table, format: Format, path: Option<&Path>) -> Result<()> {
    let text = render_table(table, format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Metadata, header and raw string cells of a CSV table written by
/// [`render_table`].
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn read_csv_table(text: &str) -> Result<CsvTable> {
    let metadata = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l[1..].split_once(" = ").map(|(k, v)| (k.trim().to_string(), v.to_string())))
        .collect();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let io = |e: csv::Error| Error::domain("read_csv_table", e.to_string());
    let columns = r.headers().map_err(io)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()).map_err(io))
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok(CsvTable {
        metadata,
        columns,
        rows,
    })
}

/// Runs the configured command and returns its table. Honors
/// [`THREADS_ENV`].
pub fn run_command(cfg: &RunConfig) -> Result<Table> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| constraint(THREADS_ENV, "must be a positive integer"))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| constraint(THREADS_ENV, e.to_string()))?;
            pool.install(|| dispatch(cfg))
        }
        Err(_) => dispatch(cfg),
    }
}

fn dispatch(cfg: &RunConfig) -> Result<Table> {
    let mut table = match &cfg.command {
        Command::Spectrum(p) => run_spectrum(p),
        Command::Resolvent(p) => run_resolvent(p),
        Command::MergeScan(p) => run_merge_scan(p),
        Command::Critical(p) => run_critical(p),
        Command::FormProbe(p) => run_form_probe(p),
        Command::Verify(p) => run_verify(p),
    }?;
    table.seed = cfg.command.seed();
    Ok(table)
}

fn run_spectrum(p: &SpectrumParams) -> Result<Table> {
    let config = build_centers(&p.centers, &p.strengths, p.profile)?;
    let sp = bound_states(&config, p.lambda_max)?;
    let mut cols = vec!["index".to_string(), "energy".to_string()];
    cols.extend((0..config.len()).map(|i| format!("q{i}")));
    let mut t = Table::new("spectrum", &[]);
    t.columns = cols;
    t.meta("lambda0", format_real(sp.lambda0));
    t.meta("bound_states", sp.len());
    for (i, (e, v)) in sp.energies.iter().zip(&sp.charge_vectors).enumerate() {
        let mut row = vec![Cell::from(i), Cell::from(*e)];
        row.extend(v.iter().map(|&x| Cell::from(x)));
        t.push(row);
    }
    Ok(t)
}

fn run_resolvent(p: &ResolventParams) -> Result<Table> {
    let config = build_centers(&p.centers, &p.strengths, p.profile)?;
    let source = p.source.build();
    let out = resolvent_apply(&config, p.lambda, &source, &p.quad)?;
    let mut t = Table::new("resolvent", &["x", "y", "z", "field", "smooth_part", "singular_part"]);
    t.meta("lambda", format_real(p.lambda));
    for (i, q) in out.charges.iter().enumerate() {
        t.meta(&format!("charge_{i}"), format_real(*q));
    }
    if !config.is_empty() {
        let radii = default_probe_radii(&config);
        for i in 0..config.len() {
            let fit = boundary_probe(&out, &config, i, &radii)?;
            t.meta(&format!("probe_{i}_singular"), format_real(fit.singular));
            t.meta(&format!("probe_{i}_regular"), format_real(fit.regular));
        }
    }
    for x in &p.probes {
        let x = Vec3::from(*x);
        let smooth = out.smooth_part(&x)?;
        let singular = out.singular_part(&x)?;
        t.push(vec![x[0].into(), x[1].into(), x[2].into(), (smooth + singular).into(), smooth.into(), singular.into()]);
    }
    Ok(t)
}

fn run_merge_scan(p: &MergeScanParams) -> Result<Table> {
    let source = p.source.map_or_else(merge_probe_source, |s| s.build());
    let r = merge_scan_with(p.alphas[0], p.alphas[1], p.profile, &p.radii, p.lambda_probe, &source, &p.quad)?;
    let mut t = Table::new(
        "merge-scan",
        &[
            "radius",
            "ground_energy",
            "limit_energy",
            "bound_states",
            "charge_sum",
            "reference_charge_sum",
            "predicted_energy",
            "energy_error",
        ],
    );
    t.meta("predicted_alpha", serde_json::to_string(&r.predicted_alpha).expect("serializable"));
    t.meta("lambda_probe", format_real(r.lambda_probe));
    for i in 0..r.radii.len() {
        let limit = r.limit_energies[i];
        let error = match (limit, r.predicted_energy) {
            (Some(e), Some(pe)) => Some((e - pe).abs()),
            _ => None,
        };
        t.push(vec![
            r.radii[i].into(),
            r.ground_energies[i].into(),
            limit.into(),
            r.bound_state_counts[i].into(),
            r.charge_sums[i].into(),
            r.reference_charge_sum.into(),
            r.predicted_energy.into(),
            error.into(),
        ]);
    }
    Ok(t)
}

fn run_critical(p: &CriticalParams) -> Result<Table> {
    let grid = geometric_grid(p.eta_grid.lo, p.eta_grid.hi, p.eta_grid.points);
    let mut t = Table::new("critical", &["n", "eta", "gamma_hat_c", "gamma_c"]);
    let wide = (p.eta_grid.hi / p.eta_grid.lo).log10() >= 12.0;
    for &n in &p.n_values {
        if wide {
            let ext = gamma_hat_extrema(n, &grid)?;
            t.meta(&format!("n{n}_inf_est"), format_real(ext.inf_est));
            t.meta(&format!("n{n}_sup_est"), format_real(ext.sup_est));
        }
        let gc = if n >= 3 { Some(gamma_c_bosons(n)?) } else { None };
        for &eta in &grid {
            t.push(vec![Cell::Int(n as i64), eta.into(), gamma_hat_c(n, eta)?.into(), gc.into()]);
        }
    }
    Ok(t)
}

fn run_form_probe(p: &FormProbeParams) -> Result<Table> {
    let model = MassModel::with_mass(p.m_light, p.eta)?;
    let est = phi_form_estimate(
        (&p.charges[0], &p.charges[1]),
        (p.alphas[0], p.alphas[1]),
        p.gamma,
        &p.profile,
        &model,
        p.lambda,
        p.samples,
        p.seed,
        &p.quad,
    )?;
    let mut t = Table::new(
        "form-probe",
        &["value", "stderr", "sample_count", "diagonal", "offdiagonal", "b_alpha", "b_theta"],
    );
    t.push(vec![
        est.value.into(),
        est.stderr.into(),
        Cell::Int(est.sample_count as i64),
        est.diagonal.into(),
        est.offdiagonal.into(),
        est.b_alpha.into(),
        est.b_theta.into(),
    ]);
    Ok(t)
}

/// Integral identities plus spot checks of the core invariants.
fn run_verify(p: &VerifyParams) -> Result<Table> {
    let mut t = Table::new("verify", &["check", "reference", "computed", "rel_error", "tolerance", "passed"]);
    let mut push = |name: &str, reference: f64, computed: f64, tol: f64, bound: bool| {
        let rel = (computed - reference).abs() / reference.abs();
        let passed = if bound { computed <= reference } else { rel <= tol };
        t.push(vec![name.into(), reference.into(), computed.into(), rel.into(), tol.into(), passed.into()]);
    };
    let q = &p.quad;
    for (name, k_prime) in [("MomentumDouble", [1.0, 0.0, 0.0]), ("MomentumDouble", [0.0, 2.0, 0.0]), ("MomentumDouble", [0.3, -0.4, 0.0])] {
        let c = verify_identity(&Identity::MomentumDouble { k: [0.0; 3], k_prime }, q)?;
        push(name, c.reference, c.computed, 1e-3, false);
    }
    let c = verify_identity(&Identity::LogIntegral { a: 1.0 }, q)?;
    push("LogIntegral", c.reference, c.computed, 1e-6, false);
    for eta in [1.0, 1e-2, 1e-4] {
        let c = verify_identity(&Identity::EtaSqrtBound { eta, lambda: 1.0 }, q)?;
        push("EtaSqrtBound", c.reference, c.computed, 0.0, true);
    }
    let exact = g_shift_norm(1.0, 1.0)?;
    push("GShiftNormMomentum", exact, g_shift_norm_momentum(1.0, 1.0, q)?, 1e-8, false);
    push("GShiftNormPosition", exact, g_shift_norm_position(1.0, 1.0, q)?, 1e-8, false);
    let nu = 5.5;
    push(
        "MacdonaldHalfVsGeneral",
        macdonald_k(&MacdonaldOrder::new(nu)?, 3.0)?,
        macdonald_k_general_path(nu, 3.0)?,
        1e-12,
        false,
    );
    push(
        "GreenFreeOneBody",
        g_lambda(1.3, 2.0)? / (4.0 * std::f64::consts::PI),
        green_free_kernel(&[0.0; 3], &[1.3, 0.0, 0.0], 2.0)?,
        1e-12,
        false,
    );
    let single = bound_states(&CenterConfig::single(-2.0, ThetaProfile::indicator(1.0)?), 1.0)?;
    push("SingleCenterEnergy", -4.0, single.ground_energy().unwrap_or(f64::NAN), 1e-10, false);
    Ok(t)
}

/// True when every `passed` cell of a table (if any) reads `true`.
pub fn all_passed(table: &Table) -> bool {
    match table.columns.iter().position(|c| c == "passed") {
        Some(i) => table.rows.iter().all(|r| r[i] == Cell::Text("true".into())),
        None => true,
    }
}

/// Process exit status: 1 for configuration problems, 2 for numerical
/// failures.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        2
    } else {
        1
    }
}

/// Table describing a failure, written in place of the normal artifact.
pub fn error_table(command: &str, err: &Error) -> Table {
    let mut t = Table::new(command, &["error_kind", "message"]);
    t.push(vec![error_kind(err).into(), Cell::Text(err.to_string())]);
    t
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Domain { .. } => "domain",
        Error::Overflow { .. } => "overflow",
        Error::Underflow { .. } => "underflow",
        Error::SingularBoundaryMatrix { .. } => "singular_boundary_matrix",
        Error::IllConditioned { .. } => "ill_conditioned",
        Error::Quadrature { .. } => "quadrature",
        Error::MaxExpansionExceeded { .. } => "max_expansion_exceeded",
        Error::FitResidual { .. } => "fit_residual",
        Error::ConfigSyntax { .. } => "config_syntax",
        Error::ConfigConstraint { .. } => "config_constraint",
        Error::UnknownCommand(_) => "unknown_command",
        Error::Io { .. } => "io",
    }
}

/// Parse, run and write; returns the process exit status. Failures after
/// parsing are written to the configured output as an error table; a
/// failed `verify` check exits with 2.
pub fn execute(text: &str, output_override: Option<&Path>) -> (i32, Option<Error>) {
    let cfg = match parse_config(text) {
        Ok(c) => c,
        Err(e) => return (exit_code(&e), Some(e)),
    };
    let path = output_override.map(Path::to_path_buf).or_else(|| cfg.output.path.clone());
    let name = cfg.command.name();
    match run_command(&cfg) {
        Ok(table) => {
            let status = if all_passed(&table) { 0 } else { 2 };
            match emit_table(&table, cfg.output.format, path.as_deref()) {
                Ok(()) => (status, None),
                Err(e) => (1, Some(e)),
            }
        }
        Err(e) => {
            let _ = emit_table(&error_table(name, &e), cfg.output.format, path.as_deref());
            (exit_code(&e), Some(e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, -3.999999999999773, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(format_real(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn defaults_are_filled_in() {
        let cfg = parse_config(
            r#"{"command": "spectrum", "params": {"centers": [[0,0,0]], "strengths": [-1],
               "profile": {"kind": "local_zero"}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.output.format, Format::Csv);
        assert!(cfg.output.path.is_none());
        match cfg.command {
            Command::Spectrum(p) => assert_eq!(p.lambda_max, 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constraint_errors_name_the_key() {
        let key = |text: &str| match parse_config(text) {
            Err(Error::ConfigConstraint { key, .. }) => key,
            other => panic!("{other:?}"),
        };
        assert_eq!(key(r#"{"command": "critical", "params": {"n_values": [1], "eta_grid": {"lo": 1e-8, "hi": 1e8, "points": 10}}}"#), "n_values");
        assert_eq!(key(r#"{"command": "verify", "output": {"format": "xml"}}"#), "output.format");
        assert_eq!(key(r#"{"command": "verify", "extra": 1}"#), "extra");
        assert_eq!(key(r#"{"params": {}}"#), "command");
    }

    #[test]
    fn error_table_shape() {
        let t = error_table("spectrum", &Error::MaxExpansionExceeded { lambda: 1e18 });
        assert_eq!(t.columns, ["error_kind", "message"]);
        assert_eq!(t.rows.len(), 1);
        assert_eq!(exit_code(&Error::MaxExpansionExceeded { lambda: 1e18 }), 2);
        assert_eq!(exit_code(&Error::UnknownCommand("x".into())), 1);
    }
}
