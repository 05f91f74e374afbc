//! Command-line front end. Every subcommand produces a table that is written
//! as CSV (with `#` metadata lines), JSON (`{meta, data}`) or aligned text.
//!
//! Exit codes: 0 success, 1 failed verification, 2 flag or domain error.

use std::ffi::OsString;
use std::io::Write;
use std::ops::RangeInclusive;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::acceptance::{
    action_checks, moment_checks, normalization_checks, run_all, run_criterion, stability_checks, Check,
    CriterionResult, CRITERIA,
};
use crate::coherent::{CoherentLabel, CoherentState, CoherentVector, ContinuumComponent, EnergyOffset, Portion};
use crate::error::{domain, Error, Result};
use crate::limits::{
    bound_energy_convergence, bound_wavefunction_convergence, continuum_energy_convergence,
    continuum_wavefunction_convergence, factorial_convergence, ConvergenceReport,
};
use crate::spectrum::{
    energy_curved, energy_flat_bound, gen_factorial_curved, gen_factorial_flat, gen_number_curved_value,
    gen_number_flat_value, ContinuumLabel, PhysicalConfig, Sector, SpectralIndex,
};
use crate::wavefunctions::{BoundEigenfunction, ContinuumEigenfunction, CurvedEigenfunction};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "coulomb-coherent", version, about = "Coulomb coherent states on the 3-sphere and their flat limits")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Energy scale omega = Z^2 e^4 / 2.
    #[arg(long, global = true, conflicts_with = "charge")]
    pub omega: Option<f64>,
    /// Nuclear charge (e = 1); sets omega = Z^2 / 2.
    #[arg(long = "Z", global = true)]
    pub charge: Option<f64>,
    /// Angular momentum.
    #[arg(long, global = true, default_value_t = 0)]
    pub ell: u32,
    /// Series and quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Table)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels, generalized numbers and factorials.
    Spectrum(SpectrumArgs),
    /// Radial wavefunctions on a grid.
    States(StatesArgs),
    /// Coherent state construction and checks.
    #[command(subcommand)]
    Coherent(CoherentCommand),
    /// Flat-space limit studies.
    #[command(subcommand)]
    Limits(LimitsCommand),
    /// The acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Curved space; requires --R.
    #[arg(long)]
    pub curved: bool,
    #[arg(long = "R", requires = "curved")]
    pub radius: Option<f64>,
    /// Inclusive level range, `a..b` or a single index.
    #[arg(long, default_value = "0..5", value_parser = parse_range)]
    pub n: RangeInclusive<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    /// Curved eigenfunction on a chi grid over [0, pi]; requires --R.
    Curved,
    /// Hydrogen bound function.
    Bound,
    /// Regular Coulomb continuum function; requires --k.
    Continuum,
}

#[derive(Debug, Args)]
pub struct StatesArgs {
    #[arg(long, value_enum)]
    pub kind: StateKind,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Grid start in units of the Bohr radius (ignored for curved).
    #[arg(long, default_value_t = 0.0)]
    pub r_min: f64,
    /// Grid end in units of the Bohr radius (ignored for curved).
    #[arg(long, default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Curvature radius; flat space when absent.
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Portion of a flat state to keep.
    #[arg(long, value_enum, default_value_t = PortionArg::Combined)]
    pub portion: PortionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PortionArg {
    Combined,
    Discrete,
    Continuum,
}

impl From<PortionArg> for Portion {
    fn from(p: PortionArg) -> Self {
        match p {
            PortionArg::Combined => Portion::Combined,
            PortionArg::Discrete => Portion::DiscreteOnly,
            PortionArg::Continuum => Portion::ContinuumOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OffsetArg {
    /// Evolve with H.
    None,
    /// Evolve with H - E0.
    SubtractE0,
}

impl From<OffsetArg> for EnergyOffset {
    fn from(o: OffsetArg) -> Self {
        match o {
            OffsetArg::None => EnergyOffset::None,
            OffsetArg::SubtractE0 => EnergyOffset::SubtractE0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Normalization,
    Stability,
    Action,
    Moments,
}

#[derive(Debug, Subcommand)]
pub enum CoherentCommand {
    /// Expansion coefficients of one state.
    Build(StateArgs),
    /// `<psi(s, gamma)|psi(s2, gamma2)>`.
    Overlap {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        s2: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma2: f64,
    },
    /// Autocorrelation `<psi|U(t) psi>` and stability residual on a time grid.
    Evolve {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = OffsetArg::SubtractE0)]
        offset: OffsetArg,
    },
    /// Normalization, stability, action identity or moment checks.
    Verify {
        #[arg(long, value_enum)]
        check: CheckKind,
        #[command(flatten)]
        state: StateArgs,
        /// Evolution time for the stability check.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Highest moment for the moment check.
        #[arg(long, default_value_t = 30)]
        n_max: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WaveKind {
    Bound,
    Continuum,
}

#[derive(Debug, Subcommand)]
pub enum LimitsCommand {
    /// `|E(R) - E_flat|` for a bound level, or for the continuum level nearest `k` when --k is given.
    Energy {
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long = "R-list", value_delimiter = ',', default_value = "10,100,1000")]
        radii: Vec<f64>,
    },
    /// `|[n]_R! - [n]!|`.
    Factorial {
        #[arg(long, default_value_t = 5)]
        n: u32,
        #[arg(long = "R-list", value_delimiter = ',', default_value = "10,100,1000")]
        radii: Vec<f64>,
    },
    /// Shape residual between curved eigenfunctions and their flat counterpart.
    Wavefunction {
        #[arg(long, value_enum, default_value_t = WaveKind::Bound)]
        kind: WaveKind,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 0.5)]
        k: f64,
        #[arg(long = "R-list", value_delimiter = ',', default_value = "50,100,200")]
        radii: Vec<f64>,
        /// Grid start in units of the Bohr radius.
        #[arg(long, default_value_t = 0.5)]
        r_min: f64,
        /// Grid end in units of the Bohr radius.
        #[arg(long, default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = 96)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Run a single criterion by number.
    #[arg(long)]
    pub only: Option<u8>,
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad level index `{t}`: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => parse(s).map(|a| a..=a),
    }
}

/// One cell of an output table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) if *x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&x.abs()) => x.to_string(),
            Cell::Num(x) => format!("{x:e}"),
            Cell::Text(t) => t.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn pretty(&self) -> String {
        match self {
            Cell::Num(x) if *x != 0.0 && !(1e-3..1e6).contains(&x.abs()) => format!("{x:.9e}"),
            Cell::Num(x) => format!("{x:.12}"),
            other => other.csv(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// The result of one invocation.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    /// Scalars written as `# key: value` lines and into `meta`.
    pub summary: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// JSON `data`; the rows as objects unless a richer structure exists.
    pub data: Option<Value>,
    pub success: bool,
}

impl Report {
    fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            summary: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            data: None,
            success: true,
        }
    }

    fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.push((key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null)));
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn rows_as_objects(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), serde_json::to_value(v).unwrap_or(Value::Null)))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    fn meta(&self, args: &[String]) -> Value {
        let mut meta = Map::new();
        meta.insert("version".into(), json!(VERSION));
        meta.insert("command".into(), json!(self.command));
        meta.insert("args".into(), json!(args));
        meta.insert("pass".into(), json!(self.success));
        for (k, v) in &self.summary {
            meta.insert(k.clone(), v.clone());
        }
        Value::Object(meta)
    }

    pub fn write(&self, fmt: OutputFormat, args: &[String], out: &mut dyn Write) -> std::io::Result<()> {
        match fmt {
            OutputFormat::Json => {
                let data = self.data.clone().unwrap_or_else(|| self.rows_as_objects());
                let doc = json!({ "meta": self.meta(args), "data": data });
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
            }
            OutputFormat::Csv => {
                writeln!(out, "# version: {VERSION}")?;
                writeln!(out, "# command: {}", self.command)?;
                writeln!(out, "# args: {}", args.join(" "))?;
                writeln!(out, "# pass: {}", self.success)?;
                for (k, v) in &self.summary {
                    writeln!(out, "# {k}: {}", plain(v))?;
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                let bytes = w.into_inner().map_err(|e| e.into_error())?;
                out.write_all(&bytes)
            }
            OutputFormat::Table => {
                for (k, v) in &self.summary {
                    writeln!(out, "{k}: {}", plain(v))?;
                }
                let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::pretty).collect()).collect();
                let widths: Vec<usize> = (0..self.columns.len())
                    .map(|j| cells.iter().map(|r| r[j].len()).chain([self.columns[j].len()]).max().unwrap_or(0))
                    .collect();
                let line = |vals: Vec<&str>| {
                    vals.iter()
                        .zip(&widths)
                        .map(|(v, w)| format!("{v:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                writeln!(out, "{}", line(self.columns.iter().map(String::as_str).collect()))?;
                for r in &cells {
                    writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
                }
                Ok(())
            }
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn config(g: &GlobalArgs, radius: Option<f64>) -> Result<PhysicalConfig> {
    let base = match (g.omega, g.charge) {
        (Some(w), _) => PhysicalConfig::flat(w)?,
        (None, Some(z)) => PhysicalConfig::from_charge(z)?,
        (None, None) => PhysicalConfig::flat(0.5)?,
    };
    match radius {
        Some(r) => base.with_radius(r),
        None => Ok(base),
    }
}

fn validate(g: &GlobalArgs) -> Result<()> {
    if !(g.tol > 0.0 && g.tol < 1.0) {
        return Err(Error::Config(format!("--tol must lie in (0, 1), got {}", g.tol)));
    }
    Ok(())
}

fn grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(domain("grid", format!("need 0 <= r_min < r_max and points >= 2, got [{lo}, {hi}] x {points}")));
    }
    Ok((0..points).map(|j| lo + (hi - lo) * j as f64 / (points - 1) as f64).collect())
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    validate(g)?;
    let sec = Sector::new(g.ell);
    match &cli.command {
        Command::Spectrum(a) => spectrum(g, sec, a),
        Command::States(a) => states(g, sec, a),
        Command::Coherent(c) => coherent(g, sec, c),
        Command::Limits(c) => limits(g, sec, c),
        Command::Verify(a) => verify(a),
    }
}

fn spectrum(g: &GlobalArgs, sec: Sector, a: &SpectrumArgs) -> Result<Report> {
    if a.curved && a.radius.is_none() {
        return Err(Error::MissingCurvature);
    }
    let cfg = config(g, a.radius)?;
    let mut rep = Report::new("spectrum", &["n", "ell", "N", "energy", "gen_number", "gen_factorial"]);
    rep.note("space", if a.curved { "curved" } else { "flat" });
    rep.note("omega", cfg.omega);
    if let Some(r) = a.radius {
        rep.note("R", r);
    }
    for n in a.n.clone() {
        let idx = SpectralIndex::new(n);
        let (e, gn, gf) = if a.curved {
            (
                energy_curved(idx, sec, &cfg)?,
                gen_number_curved_value(n, sec, &cfg)?,
                gen_factorial_curved(n, sec, &cfg)?,
            )
        } else {
            (
                energy_flat_bound(idx, sec, &cfg),
                gen_number_flat_value(n, sec),
                gen_factorial_flat(n, sec),
            )
        };
        rep.push(vec![n.into(), sec.ell.into(), idx.principal(sec).into(), e.into(), gn.into(), gf.into()]);
    }
    Ok(rep)
}

fn states(g: &GlobalArgs, sec: Sector, a: &StatesArgs) -> Result<Report> {
    let idx = SpectralIndex::new(a.n);
    match a.kind {
        StateKind::Curved => {
            let radius = a.radius.ok_or(Error::MissingCurvature)?;
            let cfg = config(g, Some(radius))?;
            let w = CurvedEigenfunction::new(idx, sec, &cfg)?;
            let mut rep = Report::new("states", &["chi", "r", "re", "im"]);
            rep.note("kind", "curved");
            rep.note("n", a.n);
            rep.note("R", radius);
            rep.note("norm_defect", w.norm_defect());
            for chi in grid(0.0, std::f64::consts::PI, a.points)? {
                let v = w.eval(chi)?;
                rep.push(vec![chi.into(), (radius * chi.sin()).into(), v.re.into(), v.im.into()]);
            }
            Ok(rep)
        }
        StateKind::Bound => {
            let cfg = config(g, None)?;
            let u = BoundEigenfunction::new(idx, sec, &cfg);
            let mut rep = Report::new("states", &["r", "re", "im"]);
            rep.note("kind", "bound");
            rep.note("n", a.n);
            for r in grid(a.r_min * cfg.a, a.r_max * cfg.a, a.points)? {
                rep.push(vec![r.into(), u.eval(r)?.into(), 0.0.into()]);
            }
            Ok(rep)
        }
        StateKind::Continuum => {
            let k = a.k.ok_or_else(|| domain("states", "--kind continuum requires --k"))?;
            let cfg = config(g, None)?;
            let v = ContinuumEigenfunction::new(ContinuumLabel::from_k(k, &cfg)?, sec, &cfg)?;
            let mut rep = Report::new("states", &["r", "re", "im"]);
            rep.note("kind", "continuum");
            rep.note("k", k);
            rep.note("asymptotic_amplitude", v.asymptotic_amplitude());
            for r in grid(a.r_min * cfg.a, a.r_max * cfg.a, a.points)? {
                let z = v.eval(r)?;
                rep.push(vec![r.into(), z.re.into(), z.im.into()]);
            }
            Ok(rep)
        }
    }
}

fn build_state(g: &GlobalArgs, sec: Sector, a: &StateArgs) -> Result<(PhysicalConfig, CoherentLabel, CoherentState)> {
    let cfg = config(g, a.radius)?;
    let lbl = CoherentLabel::new(a.s, a.gamma)?;
    let state = CoherentState::build(lbl, sec, &cfg, g.tol, a.portion.into())?;
    Ok((cfg, lbl, state))
}

fn note_state(rep: &mut Report, a: &StateArgs, state: &CoherentState) {
    rep.note("space", if a.radius.is_some() { "curved" } else { "flat" });
    if let Some(r) = a.radius {
        rep.note("R", r);
    }
    rep.note("s", a.s);
    rep.note("gamma", a.gamma);
    rep.note("norm_sqr", state.norm_sqr());
    rep.note("energy", state.energy());
    rep.note("discrete_tail_bound", state.discrete().tail_bound);
    if let Some(c) = state.continuum() {
        rep.note("portion", format!("{:?}", a.portion).to_lowercase());
        note_continuum(rep, c);
    }
}

fn note_continuum(rep: &mut Report, c: &ContinuumComponent) {
    rep.note("continuum_weight", c.weight());
    rep.note("continuum_prefactor", c.prefactor);
    rep.note("eps_cut", c.eps_cut);
    rep.note("continuum_tail_bound", c.tail_bound);
}

fn coherent(g: &GlobalArgs, sec: Sector, cmd: &CoherentCommand) -> Result<Report> {
    match cmd {
        CoherentCommand::Build(a) => {
            let (_, _, state) = build_state(g, sec, a)?;
            let d = state.discrete();
            let mut rep = Report::new("coherent build", &["n", "energy", "gen_number", "re", "im", "weight"]);
            note_state(&mut rep, a, &state);
            for (n, (c, gn)) in d.coeffs.iter().zip(&d.gen_numbers).enumerate() {
                let e = d.ground_energy + d.omega * gn;
                rep.push(vec![n.into(), e.into(), (*gn).into(), c.re.into(), c.im.into(), c.norm_sqr().into()]);
            }
            Ok(rep)
        }
        CoherentCommand::Overlap { state, s2, gamma2 } => {
            let (_, _, a) = build_state(g, sec, state)?;
            let other = StateArgs {
                s: *s2,
                gamma: *gamma2,
                ..state.clone()
            };
            let (_, _, b) = build_state(g, sec, &other)?;
            let o = a.overlap_with(&b)?;
            let mut rep = Report::new("coherent overlap", &["s", "gamma", "s2", "gamma2", "re", "im", "abs"]);
            rep.push(vec![
                state.s.into(),
                state.gamma.into(),
                (*s2).into(),
                (*gamma2).into(),
                o.re.into(),
                o.im.into(),
                o.norm().into(),
            ]);
            Ok(rep)
        }
        CoherentCommand::Evolve {
            state: a,
            t_max,
            steps,
            offset,
        } => {
            if !(t_max.is_finite() && *t_max >= 0.0) || *steps == 0 {
                return Err(domain("evolve", "need finite --t-max >= 0 and --steps >= 1"));
            }
            let (cfg, lbl, psi) = build_state(g, sec, a)?;
            let mut rep = Report::new("coherent evolve", &["t", "re", "im", "abs", "stability_residual"]);
            note_state(&mut rep, a, &psi);
            rep.note("offset", format!("{offset:?}").to_lowercase());
            for j in 0..=*steps {
                let t = t_max * j as f64 / *steps as f64;
                let moved = psi.evolved(t, (*offset).into());
                let auto: Complex64 = psi.overlap_with(&moved)?;
                let shifted = CoherentState::build(lbl.shifted(cfg.omega * t), sec, &cfg, g.tol, a.portion.into())?;
                let o = moved.overlap_with(&shifted)?.norm() / (moved.norm_sqr() * shifted.norm_sqr()).sqrt();
                rep.push(vec![t.into(), auto.re.into(), auto.im.into(), auto.norm().into(), (1.0 - o).max(0.0).into()]);
            }
            Ok(rep)
        }
        CoherentCommand::Verify { check, state: a, t, n_max } => {
            let cfg = config(g, a.radius)?;
            let lbl = CoherentLabel::new(a.s, a.gamma)?;
            let checks = match check {
                CheckKind::Normalization => normalization_checks(lbl, sec, &cfg, g.tol)?,
                CheckKind::Stability => stability_checks(lbl, sec, &cfg, *t, g.tol)?,
                CheckKind::Action => action_checks(lbl, sec, &cfg, g.tol)?,
                CheckKind::Moments => {
                    if sec.ell != 0 {
                        return Err(domain("moments", "the moment check is defined for --ell 0"));
                    }
                    moment_checks(*n_max, g.tol.min(1e-12))?
                }
            };
            let mut rep = checks_report(&format!("coherent verify {check:?}").to_lowercase(), &checks);
            rep.note("s", a.s);
            rep.note("gamma", a.gamma);
            Ok(rep)
        }
    }
}

fn checks_report(command: &str, checks: &[Check]) -> Report {
    let mut rep = Report::new(command, &["check", "measured", "tolerance", "gating", "pass"]);
    for c in checks {
        rep.push(vec![
            c.name.as_str().into(),
            c.measured.into(),
            c.tolerance.map_or(Cell::Text(String::new()), Cell::Num),
            c.gating.into(),
            c.pass.into(),
        ]);
    }
    rep.success = checks.iter().all(|c| c.pass || !c.gating);
    rep.data = Some(serde_json::to_value(checks).unwrap_or(Value::Null));
    rep
}

fn limits(g: &GlobalArgs, sec: Sector, cmd: &LimitsCommand) -> Result<Report> {
    let cfg = config(g, None)?;
    let report = match cmd {
        LimitsCommand::Energy { k: Some(k), radii, .. } => continuum_energy_convergence(*k, sec, &cfg, radii)?,
        LimitsCommand::Energy { n, k: None, radii } => bound_energy_convergence(*n, sec, &cfg, radii)?,
        LimitsCommand::Factorial { n, radii } => factorial_convergence(*n, sec, &cfg, radii)?,
        LimitsCommand::Wavefunction {
            kind,
            n,
            k,
            radii,
            r_min,
            r_max,
            points,
        } => {
            let r_grid = grid(r_min * cfg.a, r_max * cfg.a, *points)?;
            match kind {
                WaveKind::Bound => bound_wavefunction_convergence(*n, sec, &cfg, &r_grid, radii)?,
                WaveKind::Continuum => continuum_wavefunction_convergence(*k, sec, &cfg, &r_grid, radii)?,
            }
        }
    };
    Ok(convergence_report(&report))
}

fn convergence_report(r: &ConvergenceReport) -> Report {
    let mut columns = vec!["R", "residual"];
    columns.extend(r.extras.keys().map(String::as_str));
    let mut rep = Report::new(&format!("limits {}", r.study), &columns);
    rep.note("study", &r.study);
    rep.note("fitted_order", r.fitted_order);
    rep.note("target_order", r.target_order);
    rep.note("r_squared", r.r_squared);
    for (i, (&big_r, &res)) in r.r_values.iter().zip(&r.residuals).enumerate() {
        let mut row = vec![big_r.into(), res.into()];
        row.extend(r.extras.values().map(|v| Cell::Num(v[i])));
        rep.push(row);
    }
    rep.data = Some(serde_json::to_value(r).unwrap_or(Value::Null));
    rep
}

fn verify(a: &VerifyArgs) -> Result<Report> {
    let results: Vec<CriterionResult> = match a.only {
        Some(id) => vec![run_criterion(id).ok_or_else(|| {
            domain("verify", format!("no criterion {id}; valid numbers are 1..={}", CRITERIA.len()))
        })?],
        None => run_all(),
    };
    let mut rep = Report::new("verify", &["id", "name", "measured", "tolerance", "pass"]);
    let opt = |x: Option<f64>| x.map_or(Cell::Text(String::new()), Cell::Num);
    for r in &results {
        rep.push(vec![
            (r.id as u32).into(),
            r.name.as_str().into(),
            opt(r.measured),
            opt(r.tolerance),
            r.pass.into(),
        ]);
    }
    rep.note("suite", "all");
    rep.note("passed", results.iter().filter(|r| r.pass).count());
    rep.note("failed", results.iter().filter(|r| !r.pass).count());
    rep.success = results.iter().all(|r| r.pass);
    rep.data = Some(serde_json::to_value(&results).unwrap_or(Value::Null));
    Ok(rep)
}

/// Parses `argv` (program name first), runs the command and writes its
/// output. Returns the process exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if !e.use_stderr() {
                let _ = write!(out, "{text}");
                return 0;
            }
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("error: invalid arguments");
            let _ = writeln!(err, "{line}");
            return 2;
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli) {
        Ok(rep) => {
            match rep.write(cli.global.output, &args, out) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return 2;
                }
                Ok(()) => {}
            }
            if rep.success {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Entry point for the binary.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
