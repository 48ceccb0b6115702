//! Command-line front end: tables of φ, φ̂ and ψ̂(m), the oracle comparison
//! suite, asymptotic diagnostics and kernel reconstruction, written as CSV or
//! JSON.

use crate::fourier::{ft_asymptotic, ft_closed, ft_oracle};
use crate::quadrature::QuadratureConfig;
use crate::result::{EvalResult, Method};
use crate::schoenberg::{
    coeff_asymptotic, coeff_oracle_linkup, coeff_oracle_projection, reconstruct_kernel, CapGeometry,
    SchoenbergTable, MAX_DEGREE,
};
use crate::wendland::{self, polynomial_closed_form, WendlandFunction, WendlandParams};
use clap::Parser;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

/// Tolerances of the `verify` suite.
pub const VERIFY_FT_TOL: f64 = 1e-8;
pub const VERIFY_PROJECTION_TOL: f64 = 1e-7;
pub const VERIFY_LINKUP_TOL: f64 = 1e-5;
/// Largest degree compared against the Bessel-square route in `verify`.
pub const VERIFY_LINKUP_MAX_M: usize = 10;
const VERIFY_DEFAULT_MAX_M: usize = 10;
const VERIFY_DEFAULT_Z: [f64; 4] = [0.1, 1.0, 5.0, 20.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Ft,
    Coeffs,
    Verify,
    Asymptotics,
    Reconstruct,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Ft => "ft",
            Command::Coeffs => "coeffs",
            Command::Verify => "verify",
            Command::Asymptotics => "asymptotics",
            Command::Reconstruct => "reconstruct",
        }
    }

    /// Name of the grid variable (--r, --z or --t), if the command takes one.
    fn variable(self) -> Option<&'static str> {
        match self {
            Command::Eval => Some("r"),
            Command::Ft | Command::Verify | Command::Asymptotics => Some("z"),
            Command::Reconstruct => Some("t"),
            Command::Coeffs => None,
        }
    }
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "eval" => Command::Eval,
            "ft" => Command::Ft,
            "coeffs" => Command::Coeffs,
            "verify" => Command::Verify,
            "asymptotics" => Command::Asymptotics,
            "reconstruct" => Command::Reconstruct,
            _ => return Err(CliError::Config(format!("unknown command `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Config(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Breach(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::Breach(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Numerical(s) => write!(f, "numerical failure: {s}"),
            CliError::Breach(s) => write!(f, "tolerance breach: {s}"),
            CliError::Io(e) => write!(f, "output error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn numerical(e: crate::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Everything one run needs, after flags and config file are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub params: WendlandParams,
    /// Points of the command's grid variable (r, z or t).
    pub points: Option<Vec<f64>>,
    pub max_m: Option<usize>,
    pub format: Format,
    pub quadrature: QuadratureConfig,
    pub threads: usize,
}

#[derive(Parser, Debug, Default)]
#[command(name = "gwendland", version, about = "Generalized Wendland functions, transforms and Schoenberg coefficients")]
pub struct Args {
    /// eval | ft | coeffs | verify | asymptotics | reconstruct
    pub command: Option<String>,
    /// Dimension d ≥ 1.
    #[arg(long)]
    pub d: Option<String>,
    /// Smoothness α > 0.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Exponent μ.
    #[arg(long)]
    pub mu: Option<String>,
    /// Scale ε; the support is [0, 1/ε] (default 1).
    #[arg(long)]
    pub eps: Option<String>,
    /// Largest degree m for coeffs, verify and reconstruct.
    #[arg(long = "max-m")]
    pub max_m: Option<String>,
    /// Distance(s), comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    /// Frequency value(s), comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Inner product(s) t = cos θ, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// n equispaced points a..b (inclusive), as a:b:n.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// csv (default) or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Relative tolerance of the quadrature routes.
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<String>,
    /// Absolute tolerance of the quadrature routes.
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<String>,
    /// Worker threads (default 1).
    #[arg(long)]
    pub threads: Option<String>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long)]
    pub config: Option<String>,
}

const KEYS: [&str; 14] = [
    "command", "d", "alpha", "mu", "eps", "max-m", "r", "z", "t", "grid", "format", "rel-tol", "abs-tol", "threads",
];
const POINT_KEYS: [&str; 4] = ["r", "z", "t", "grid"];

/// Parses `key = value` lines; `#` starts a comment. Keys may use `_` for `-`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("config line {}: expected `key = value`", n + 1)));
        };
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("config line {}: unknown key `{}`", n + 1, k.trim())));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("config line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(map)
}

fn flag_layer(args: &Args) -> BTreeMap<String, String> {
    let pairs = [
        ("command", &args.command),
        ("d", &args.d),
        ("alpha", &args.alpha),
        ("mu", &args.mu),
        ("eps", &args.eps),
        ("max-m", &args.max_m),
        ("r", &args.r),
        ("z", &args.z),
        ("t", &args.t),
        ("grid", &args.grid),
        ("format", &args.format),
        ("rel-tol", &args.rel_tol),
        ("abs-tol", &args.abs_tol),
        ("threads", &args.threads),
    ];
    pairs.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))).collect()
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',').map(|s| parse_num::<f64>(key, s)).collect()
}

/// a:b:n → n equispaced points from a to b.
pub fn parse_grid(v: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("grid `{v}` is not of the form a:b:n")));
    }
    let a: f64 = parse_num("grid", parts[0])?;
    let b: f64 = parse_num("grid", parts[1])?;
    let n: usize = parse_num("grid", parts[2])?;
    if n == 0 {
        return Err(CliError::Config("grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|k| if k == n - 1 { b } else { a + h * k as f64 }).collect())
}

fn check_points(points: &[f64]) -> Result<(), CliError> {
    if points.is_empty() {
        return Err(CliError::Config("grid is empty".into()));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Config("grid points must be finite".into()));
    }
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Config("grid points must be strictly increasing".into()));
    }
    Ok(())
}

impl JobConfig {
    /// Merges flags over the config file (if any) and validates the result.
    pub fn from_args(args: &Args) -> Result<JobConfig, CliError> {
        let flags = flag_layer(args);
        let mut merged = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config file {path}: {e}")))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        // grid points are one setting: any of them on the command line
        // replaces all of them from the file
        if flags.keys().any(|k| POINT_KEYS.contains(&k.as_str())) {
            merged.retain(|k, _| !POINT_KEYS.contains(&k.as_str()));
        }
        merged.extend(flags);
        JobConfig::from_map(&merged)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<JobConfig, CliError> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let command: Command = get("command").ok_or_else(|| CliError::Config("no command given".into()))?.parse()?;
        let need = |k: &str| get(k).ok_or_else(|| CliError::Config(format!("missing --{k}")));
        let d: usize = parse_num("d", need("d")?)?;
        let alpha: f64 = parse_num("alpha", need("alpha")?)?;
        let mu: f64 = parse_num("mu", need("mu")?)?;
        let eps: f64 = get("eps").map(|v| parse_num("eps", v)).transpose()?.unwrap_or(1.0);
        let params = WendlandParams::new(mu, alpha, eps, d).map_err(|e| CliError::Config(e.to_string()))?;

        let mut quadrature = QuadratureConfig::default();
        if let Some(v) = get("rel-tol") {
            quadrature.rel_tol = parse_num("rel-tol", v)?;
        }
        if let Some(v) = get("abs-tol") {
            quadrature.abs_tol = parse_num("abs-tol", v)?;
        }
        quadrature.validate().map_err(|e| CliError::Config(e.to_string()))?;

        let threads: usize = get("threads").map(|v| parse_num("threads", v)).transpose()?.unwrap_or(1);
        if threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        let format = get("format").map(str::parse).transpose()?.unwrap_or(Format::Csv);

        let max_m: Option<usize> = get("max-m").map(|v| parse_num("max-m", v)).transpose()?;
        if let Some(m) = max_m {
            if m > MAX_DEGREE {
                return Err(CliError::Config(format!("--max-m {m} exceeds {MAX_DEGREE}")));
            }
        }

        let var = command.variable();
        for k in ["r", "z", "t"] {
            if get(k).is_some() && var != Some(k) {
                return Err(CliError::Config(format!("--{k} does not apply to `{}`", command.as_str())));
            }
        }
        let points = match (var.and_then(get), get("grid")) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(format!("give either --{} or --grid, not both", var.unwrap())));
            }
            (Some(list), None) => Some(parse_list(var.unwrap(), list)?),
            (None, Some(g)) => {
                if var.is_none() {
                    return Err(CliError::Config(format!("--grid does not apply to `{}`", command.as_str())));
                }
                Some(parse_grid(g)?)
            }
            (None, None) => None,
        };
        if let Some(p) = &points {
            check_points(p)?;
        }

        let job = JobConfig { command, params, points, max_m, format, quadrature, threads };
        job.validate()?;
        Ok(job)
    }

    fn validate(&self) -> Result<(), CliError> {
        let sphere = || {
            CapGeometry::new(&self.params).map(|_| ()).map_err(|e| CliError::Config(e.to_string()))
        };
        let points = self.points.as_deref();
        match self.command {
            Command::Eval => {
                let p = points.ok_or_else(|| CliError::Config("eval needs --r or --grid".into()))?;
                if p[0] < 0.0 {
                    return Err(CliError::Config("distances r must be nonnegative".into()));
                }
            }
            Command::Ft => {
                let p = points.ok_or_else(|| CliError::Config("ft needs --z or --grid".into()))?;
                if p[0] < 0.0 {
                    return Err(CliError::Config("frequencies z must be nonnegative".into()));
                }
            }
            Command::Coeffs => {
                self.max_m.ok_or_else(|| CliError::Config("coeffs needs --max-m".into()))?;
                sphere()?;
            }
            Command::Verify => {
                if points.is_some_and(|p| p[0] <= 0.0) {
                    return Err(CliError::Config("verify frequencies z must be positive".into()));
                }
            }
            Command::Asymptotics => {
                if self.max_m.is_none() && points.is_none() {
                    return Err(CliError::Config("asymptotics needs --max-m and/or --z/--grid".into()));
                }
                if self.max_m.is_some() {
                    sphere()?;
                }
                if points.is_some_and(|p| p[0] <= 0.0) {
                    return Err(CliError::Config("asymptotic frequencies z must be positive".into()));
                }
            }
            Command::Reconstruct => {
                self.max_m.ok_or_else(|| CliError::Config("reconstruct needs --max-m".into()))?;
                let p = points.ok_or_else(|| CliError::Config("reconstruct needs --t or --grid".into()))?;
                if p[0] < -1.0 || p[p.len() - 1] > 1.0 {
                    return Err(CliError::Config("t must lie in [−1, 1]".into()));
                }
                sphere()?;
            }
        }
        Ok(())
    }
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> Result<String, CliError> {
        Ok(match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x)
                .ok_or_else(|| CliError::Numerical(format!("non-finite value {x} in output")))?
                .to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        })
    }

    fn json(&self) -> Result<serde_json::Value, CliError> {
        Ok(match self {
            Cell::Num(x) => serde_json::Value::Number(
                serde_json::Number::from_f64(*x)
                    .ok_or_else(|| CliError::Numerical(format!("non-finite value {x} in output")))?,
            ),
            Cell::Int(n) => serde_json::Value::from(*n),
            Cell::Text(s) => serde_json::Value::from(s.clone()),
            Cell::Bool(b) => serde_json::Value::from(*b),
        })
    }
}

/// The result of a run before serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Set by `verify` when some comparison exceeded its tolerance.
    pub breaches: usize,
}

impl Report {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut text = String::new();
                for (k, v) in &self.meta {
                    text += &format!("# {k} = {}\n", v.render()?);
                }
                text += &self.columns.join(",");
                text.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::render).collect::<Result<_, _>>()?;
                    text += &cells.join(",");
                    text.push('\n');
                }
                out.write_all(text.as_bytes())?;
            }
            Format::Json => {
                let mut meta = serde_json::Map::new();
                for (k, v) in &self.meta {
                    meta.insert(k.clone(), v.json()?);
                }
                let mut records = Vec::with_capacity(self.rows.len());
                for row in &self.rows {
                    let mut rec = serde_json::Map::new();
                    for (c, v) in self.columns.iter().zip(row) {
                        rec.insert(c.to_string(), v.json()?);
                    }
                    records.push(serde_json::Value::Object(rec));
                }
                let doc = serde_json::json!({ "meta": meta, "records": records });
                serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Io(e.into()))?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

fn finite(r: EvalResult, what: &str) -> Result<EvalResult, CliError> {
    if r.is_finite() {
        Ok(r)
    } else {
        Err(CliError::Numerical(format!("non-finite result for {what}")))
    }
}

fn result_cells(r: &EvalResult) -> [Cell; 3] {
    [Cell::Num(r.value), Cell::Num(r.abs_error_estimate), Cell::Text(r.method.as_str().into())]
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)
}

fn metadata(job: &JobConfig) -> Vec<(String, Cell)> {
    let p = &job.params;
    let mut meta = vec![
        ("command".to_string(), Cell::Text(job.command.as_str().into())),
        ("d".into(), Cell::Int(p.d() as u64)),
        ("alpha".into(), Cell::Num(p.alpha())),
        ("mu".into(), Cell::Num(p.mu())),
        ("eps".into(), Cell::Num(p.epsilon())),
        ("lambda".into(), Cell::Num(p.lambda())),
        ("support_radius".into(), Cell::Num(p.support_radius())),
        ("pd_euclidean".into(), Cell::Bool(p.pd_euclidean())),
        ("sphere_ok".into(), Cell::Bool(p.sphere_ok())),
    ];
    if let Ok(cap) = CapGeometry::new(p) {
        meta.push(("cap_radius".into(), Cell::Num(cap.theta_support)));
    }
    if let Some(m) = job.max_m {
        meta.push(("max_m".into(), Cell::Int(m as u64)));
    }
    meta.push(("rel_tol".into(), Cell::Num(job.quadrature.rel_tol)));
    meta.push(("abs_tol".into(), Cell::Num(job.quadrature.abs_tol)));
    meta.push(("threads".into(), Cell::Int(job.threads as u64)));
    meta.push(("version".into(), Cell::Text(env!("CARGO_PKG_VERSION").into())));
    meta
}

/// Maps f over the points in parallel, keeping grid order; the first error
/// by index wins.
fn par_rows<T: Sync, F>(items: &[T], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(&T) -> Result<Vec<Cell>, CliError> + Sync + Send,
{
    items.par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
}

fn phi_at(r: f64, params: &WendlandParams, cfg: &QuadratureConfig) -> Result<EvalResult, CliError> {
    let out = match polynomial_closed_form(params) {
        Ok(poly) => {
            let v = poly.evaluate(r);
            let err = (poly.degree() + 1) as f64 * f64::EPSILON * wendland::value_at_origin(params);
            EvalResult::new(v, if v == 0.0 { 0.0 } else { err }, Method::PlainSum, poly.degree() + 1)
        }
        Err(_) => wendland::eval(r, params, cfg).map_err(numerical)?,
    };
    finite(out, &format!("φ({r})"))
}

fn compute(job: &JobConfig) -> Result<Report, CliError> {
    let p = job.params;
    let cfg = job.quadrature;
    let mut meta = metadata(job);
    let mut breaches = 0;
    let (columns, rows): (Vec<&'static str>, Vec<Vec<Cell>>) = match job.command {
        Command::Eval => {
            let pts = job.points.as_deref().unwrap_or_default();
            let rows = par_rows(pts, |&r| {
                let v = phi_at(r, &p, &cfg)?;
                let [a, b, c] = result_cells(&v);
                Ok(vec![Cell::Num(r), a, b, c])
            })?;
            (vec!["r", "value", "abs_error_estimate", "method"], rows)
        }
        Command::Ft => {
            let pts = job.points.as_deref().unwrap_or_default();
            let rows = par_rows(pts, |&z| {
                let v = finite(ft_closed(z, &p).map_err(numerical)?, &format!("φ̂({z})"))?;
                let [a, b, c] = result_cells(&v);
                Ok(vec![Cell::Num(z), a, b, c, Cell::Num(v.cancellation_ratio)])
            })?;
            (vec!["z", "value", "abs_error_estimate", "method", "cancellation_ratio"], rows)
        }
        Command::Coeffs => {
            let table = SchoenbergTable::build(&p, job.max_m.unwrap_or(0)).map_err(numerical)?;
            meta.push(("prefactor".into(), Cell::Num(table.prefactor())));
            let mut rows = Vec::new();
            for (m, c) in table.coeffs().iter().enumerate() {
                let c = finite(*c, &format!("ψ̂({m})"))?;
                let [a, b, cc] = result_cells(&c);
                rows.push(vec![Cell::Int(m as u64), a, b, cc, Cell::Num(c.cancellation_ratio)]);
            }
            (vec!["m", "value", "abs_error_estimate", "method", "cancellation_ratio"], rows)
        }
        Command::Verify => {
            let zs: Vec<f64> = job.points.clone().unwrap_or_else(|| VERIFY_DEFAULT_Z.to_vec());
            let mut rows = par_rows(&zs, |&z| {
                let closed = finite(ft_closed(z, &p).map_err(numerical)?, &format!("φ̂({z})"))?;
                let oracle = finite(ft_oracle(z, &p, &cfg).map_err(numerical)?, &format!("φ̂({z}) oracle"))?;
                Ok(check_row("ft", Cell::Num(z), &closed, oracle.value, VERIFY_FT_TOL))
            })?;
            if CapGeometry::new(&p).is_ok() {
                let max_m = job.max_m.unwrap_or(VERIFY_DEFAULT_MAX_M);
                let table = SchoenbergTable::build(&p, max_m).map_err(numerical)?;
                meta.push(("prefactor".into(), Cell::Num(table.prefactor())));
                let mut jobs: Vec<(&'static str, usize)> = (0..=max_m).map(|m| ("projection", m)).collect();
                jobs.extend((0..=max_m.min(VERIFY_LINKUP_MAX_M)).map(|m| ("linkup", m)));
                rows.extend(par_rows(&jobs, |&(kind, m)| {
                    let closed = finite(table.coeffs()[m], &format!("ψ̂({m})"))?;
                    let (oracle, tol) = if kind == "projection" {
                        (coeff_oracle_projection(m, &p, &cfg), VERIFY_PROJECTION_TOL)
                    } else {
                        (coeff_oracle_linkup(m, &p, &cfg), VERIFY_LINKUP_TOL)
                    };
                    let oracle = finite(oracle.map_err(numerical)?, &format!("ψ̂({m}) {kind} oracle"))?;
                    Ok(check_row(kind, Cell::Int(m as u64), &closed, oracle.value, tol))
                })?);
            } else {
                meta.push(("sphere_checks".into(), Cell::Text("skipped (needs d ≥ 2 and ε ≥ 1/2)".into())));
            }
            breaches = rows.iter().filter(|r| r.last() == Some(&Cell::Bool(false))).count();
            meta.push(("breaches".into(), Cell::Int(breaches as u64)));
            (
                vec!["check", "x", "value", "abs_error_estimate", "method", "oracle", "rel_error", "tolerance", "pass"],
                rows,
            )
        }
        Command::Asymptotics => {
            let mut rows = Vec::new();
            if let Some(max_m) = job.max_m {
                let table = SchoenbergTable::build(&p, max_m).map_err(numerical)?;
                for (m, c) in table.coeffs().iter().enumerate() {
                    let c = finite(*c, &format!("ψ̂({m})"))?;
                    let a = coeff_asymptotic(m, &p);
                    let [v, e, me] = result_cells(&c);
                    rows.push(vec![Cell::Text("sphere".into()), Cell::Int(m as u64), v, e, me, Cell::Num(a), Cell::Num(c.value / a)]);
                }
            }
            if let Some(zs) = &job.points {
                rows.extend(par_rows(zs, |&z| {
                    let c = finite(ft_closed(z, &p).map_err(numerical)?, &format!("φ̂({z})"))?;
                    let a = ft_asymptotic(z, &p, true);
                    let [v, e, me] = result_cells(&c);
                    Ok(vec![Cell::Text("euclid".into()), Cell::Num(z), v, e, me, Cell::Num(a), Cell::Num(c.value / a)])
                })?);
            }
            (vec!["kind", "x", "value", "abs_error_estimate", "method", "asymptotic", "ratio"], rows)
        }
        Command::Reconstruct => {
            let table = SchoenbergTable::build(&p, job.max_m.unwrap_or(0)).map_err(numerical)?;
            let phi = WendlandFunction::new(&p);
            let pts = job.points.as_deref().unwrap_or_default();
            let rows = par_rows(pts, |&t| {
                let v = finite(reconstruct_kernel(t, &table).map_err(numerical)?, &format!("kernel at t={t}"))?;
                let exact = phi.value((2.0 - 2.0 * t).max(0.0).sqrt()).map_err(numerical)?;
                let [a, b, c] = result_cells(&v);
                Ok(vec![Cell::Num(t), a, b, c, Cell::Num(exact)])
            })?;
            (vec!["t", "value", "abs_error_estimate", "method", "exact"], rows)
        }
    };
    Ok(Report { meta, columns, rows, breaches })
}

fn check_row(kind: &str, x: Cell, closed: &EvalResult, oracle: f64, tol: f64) -> Vec<Cell> {
    let rel = rel_diff(closed.value, oracle);
    let [v, e, m] = result_cells(closed);
    vec![Cell::Text(kind.into()), x, v, e, m, Cell::Num(oracle), Cell::Num(rel), Cell::Num(tol), Cell::Bool(rel < tol)]
}

/// Computes the job on a pool of `threads` workers and writes the report.
/// Output order follows the grid regardless of the thread count.
pub fn run(job: &JobConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let report = pool.install(|| compute(job))?;
    report.write(job.format, out)?;
    if report.breaches > 0 {
        return Err(CliError::Breach(format!("{} comparison(s) outside tolerance", report.breaches)));
    }
    Ok(())
}

/// Entry point behind the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let result = JobConfig::from_args(&args).and_then(|job| run(&job, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "gwendland: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(args: &[&str]) -> Result<JobConfig, CliError> {
        let mut v = vec!["gwendland"];
        v.extend_from_slice(args);
        JobConfig::from_args(&Args::try_parse_from(v).unwrap())
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = parse_grid("0:1:5").unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.3:0.3:1").unwrap(), vec![0.3]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn config_file_syntax() {
        let m = parse_config_file("# header\nd = 3\nalpha=1 # trailing\n\nmax_m = 4\n").unwrap();
        assert_eq!(m["d"], "3");
        assert_eq!(m["alpha"], "1");
        assert_eq!(m["max-m"], "4");
        assert!(matches!(parse_config_file("d 3"), Err(CliError::Config(_))));
        assert!(matches!(parse_config_file("colour = red"), Err(CliError::Config(_))));
        assert!(matches!(parse_config_file("d = 3\nd = 4"), Err(CliError::Config(_))));
    }

    #[test]
    fn validation_errors_are_config_errors() {
        let base = ["--d", "3", "--alpha", "1", "--mu", "4"];
        let with = |extra: &[&str]| {
            let mut v: Vec<&str> = extra.to_vec();
            v.extend_from_slice(&base);
            job(&v)
        };
        assert!(with(&["eval", "--r", "0.5"]).is_ok());
        for bad in [
            &["eval"][..],
            &["eval", "--r", "0.5,0.2"],
            &["eval", "--r", "0.5", "--grid", "0:1:3"],
            &["eval", "--z", "1"],
            &["coeffs"],
            &["coeffs", "--max-m", "10001"],
            &["coeffs", "--max-m", "3", "--eps", "0.4"],
            &["reconstruct", "--max-m", "3", "--t", "1.5"],
            &["ft", "--z", "1", "--threads", "0"],
            &["ft", "--z", "1", "--format", "xml"],
            &["frobnicate"],
        ] {
            let e = with(bad).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{bad:?}: {e}");
        }
    }

    #[test]
    fn outside_support_is_zero() {
        let j = job(&["eval", "--d", "3", "--alpha", "1", "--mu", "4", "--eps", "1", "--r", "1.5"]).unwrap();
        let rep = compute(&j).unwrap();
        assert_eq!(rep.rows[0][1], Cell::Num(0.0));
    }

    #[test]
    fn csv_has_metadata_header_and_rows() {
        let j = job(&["coeffs", "--d", "3", "--alpha", "1", "--mu", "4", "--max-m", "3"]).unwrap();
        let mut buf = Vec::new();
        run(&j, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines.iter().any(|l| l.starts_with("# lambda = ")));
        assert!(lines.iter().any(|l| l.starts_with("# cap_radius = ")));
        let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
        assert_eq!(lines[header], "m,value,abs_error_estimate,method,cancellation_ratio");
        assert_eq!(lines.len() - header - 1, 4);
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(CliError::Breach("x".into()).exit_code(), 1);
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Numerical("x".into()).exit_code(), 3);
        assert_eq!(CliError::Io(std::io::Error::other("x")).exit_code(), 3);
    }

    #[test]
    fn non_finite_cells_refused() {
        assert!(matches!(Cell::Num(f64::NAN).render(), Err(CliError::Numerical(_))));
        assert!(matches!(Cell::Num(f64::INFINITY).json(), Err(CliError::Numerical(_))));
        assert_eq!(Cell::Num(0.1).render().unwrap(), "0.1");
    }
}
