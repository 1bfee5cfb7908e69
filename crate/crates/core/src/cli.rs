//! Command-line front end.
//!
//! Every command writes a table as CSV (with a header row) or JSON. Numbers
//! carry 9 significant digits. Output ports are 0-based. Time densities are
//! in units of `1/T^N`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::distinguishability::{
    ds_closed_form, ds_exact, DistFunctionA, DistFunctionB, MAX_MONTE_CARLO_N,
};
use crate::error::{Error, Result};
use crate::interference::{
    all_occupations, prob_a, prob_a_classical, prob_a_ideal, prob_a_occupation, prob_b,
    prob_b_ideal, Experiment, OutputTuple,
};
use crate::linalg::{beam_splitter_50_50, haar_unitary, UnitaryJson, UnitaryMatrix};
use crate::metrics::{
    eta_for_purity, required_purity, summarize, tvd_a, DistSummary, MAX_TVD_M, MAX_TVD_N,
    MIN_TVD_B_SAMPLES,
};
use crate::permgroup::MAX_GROUP_ORDER_N;
use crate::photon_model::{purity_approx, purity_order_n, GaussianModel, ModelConfig, TimeTuple};

/// Largest purity order tabulated by `purity`.
pub const MAX_PURITY_ORDER: usize = 200;
/// Largest interferometer written by `haar`.
pub const MAX_HAAR_M: usize = 64;
/// Default Monte-Carlo sample count for `compare`.
pub const DEFAULT_COMPARE_SAMPLES: usize = 10_000;

#[derive(Debug, Parser)]
#[command(
    name = "bosondist",
    version,
    about = "Multiphoton interference with partially distinguishable photons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the table to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Print a one-line summary of the run to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DsMethod {
    /// Group average with closed-form purities (N ≤ 10).
    Exact,
    /// Exponential-approximation closed form, any N.
    Closed,
    /// Monte-Carlo average over detection times (N ≤ 8).
    Mc,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Higher-order purities Tr(ρⁿ), exact and exponential approximation.
    Purity {
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
    /// Probability that the photons are fully indistinguishable.
    Ds {
        #[arg(long = "n")]
        n_photons: usize,
        #[arg(long)]
        eta: f64,
        #[arg(long, value_enum, default_value_t = DsMethod::Exact)]
        method: DsMethod,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Distances to the ideal distribution for both detection setups, and the bound.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the sample count in the config.
        #[arg(long)]
        samples: Option<usize>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Smallest purity keeping the distance bound at or below a target.
    RequiredPurity {
        #[arg(long = "n")]
        n_photons: usize,
        #[arg(long)]
        target: f64,
    },
    /// Write a Haar-random unitary as JSON.
    Haar {
        #[arg(long = "m")]
        modes: usize,
        #[arg(long)]
        seed: u64,
        /// Destination of the unitary JSON.
        #[arg(long = "out")]
        path: PathBuf,
    },
    /// Time-unresolved output probabilities.
    ProbA {
        #[command(flatten)]
        source: ExperimentArgs,
        /// Ordered output ports; all occupations are listed when omitted.
        #[arg(long, value_delimiter = ',')]
        ports: Option<Vec<usize>>,
    },
    /// Time-resolved output probability density.
    ProbB {
        #[command(flatten)]
        source: ExperimentArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        ports: Vec<usize>,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        times: Vec<f64>,
    },
    /// Two-photon coincidence on a balanced beam splitter versus arrival spread.
    Hom {
        /// Largest Δτ/T in the sweep.
        #[arg(long, default_value_t = 1.0)]
        ratio_max: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Run configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
}

/// `{"model": {...}, "unitary": path | {"haar": {"M", "seed"}} | {"m", "re", "im"}, "samples", "seed"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub unitary: UnitarySource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitarySource {
    Path(PathBuf),
    Haar { haar: HaarSpec },
    BeamSplitter { beam_splitter: BeamSplitterSpec },
    Inline(UnitaryJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarSpec {
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
}

/// Only the balanced splitter is offered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterSpec {
    pub reflectivity: f64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Builds the experiment; relative unitary paths resolve against `base`.
    pub fn experiment(&self, base: &Path) -> Result<Experiment> {
        let model = GaussianModel::try_from(&self.model)?;
        let unitary = match &self.unitary {
            UnitarySource::Path(p) => UnitaryMatrix::read_json(base.join(p))?,
            UnitarySource::Haar { haar } => haar_unitary(haar.m, haar.seed)?,
            UnitarySource::BeamSplitter { beam_splitter } => {
                if beam_splitter.reflectivity != 0.5 {
                    return Err(Error::Config("only reflectivity 0.5 is supported".into()));
                }
                beam_splitter_50_50()
            }
            UnitarySource::Inline(j) => UnitaryMatrix::try_from(j.clone())?,
        };
        Experiment::new(model, unitary)
    }

    pub fn mc_seed(&self) -> u64 {
        self.seed.or(self.model.seed).unwrap_or(0)
    }
}

/// A cell of an output table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
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

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// Named columns and rows. A table with `single` set is written as one JSON
/// object rather than an array.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub single: bool,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            single: false,
        }
    }

    fn record(columns: Vec<&'static str>, row: Vec<Cell>) -> Self {
        Self {
            columns,
            rows: vec![row],
            single: true,
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), json_cell(v)))
                    .collect();
                Value::Object(map)
            })
            .collect();
        if self.single && objects.len() == 1 {
            objects.into_iter().next().expect("one row")
        } else {
            Value::Array(objects)
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                serde_json::to_string_pretty(&self.to_json()).expect("serializable table") + "\n"
            }
        }
    }
}

/// 9 significant digits; scientific notation below `1e-4` and from `1e9`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if !(1e-4..1e9).contains(&a) {
        let s = format!("{x:.8e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent present");
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (8 - a.log10().floor() as i32).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format_number(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
        Cell::Text(t) => t.clone(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => format_number(*x)
            .parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Cell::Int(i) => Value::from(*i),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(t) => Value::String(t.clone()),
    }
}

fn ports_text(ports: &[usize]) -> String {
    ports
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Runs a parsed command and returns its table.
pub fn execute(command: &Command) -> Result<Table> {
    match command {
        Command::Purity { eta, n_max } => cmd_purity(*eta, *n_max),
        Command::Ds {
            n_photons,
            eta,
            method,
            seed,
            samples,
        } => cmd_ds(*n_photons, *eta, *method, *seed, *samples),
        Command::Compare {
            config,
            samples,
            seed,
        } => cmd_compare(config, *samples, *seed),
        Command::RequiredPurity { n_photons, target } => cmd_required_purity(*n_photons, *target),
        Command::Haar { modes, seed, path } => cmd_haar(*modes, *seed, path),
        Command::ProbA { source, ports } => cmd_prob_a(&source.config, ports.as_deref()),
        Command::ProbB {
            source,
            ports,
            times,
        } => cmd_prob_b(&source.config, ports, times),
        Command::Hom { ratio_max, steps } => cmd_hom(*ratio_max, *steps),
    }
}

pub fn cmd_purity(eta: f64, n_max: usize) -> Result<Table> {
    if n_max == 0 || n_max > MAX_PURITY_ORDER {
        return Err(Error::Domain(format!(
            "--n-max must lie in 1..={MAX_PURITY_ORDER}, got {n_max}"
        )));
    }
    let mut t = Table::new(vec!["n", "exact", "approx", "rel_diff"]);
    for n in 1..=n_max {
        let exact = purity_order_n(eta, n)?;
        let approx = purity_approx(eta, n);
        t.push(vec![
            n.into(),
            exact.into(),
            approx.into(),
            ((approx - exact).abs() / exact).into(),
        ]);
    }
    Ok(t)
}

pub fn cmd_ds(
    n_photons: usize,
    eta: f64,
    method: DsMethod,
    seed: u64,
    samples: usize,
) -> Result<Table> {
    let model = GaussianModel::from_eta(n_photons, eta)?;
    let (value, err) = match method {
        DsMethod::Exact => {
            if n_photons > MAX_GROUP_ORDER_N {
                return Err(Error::Size {
                    what: "photon number for --method exact (use --method closed)",
                    got: n_photons,
                    max: MAX_GROUP_ORDER_N,
                });
            }
            (ds_exact(&DistFunctionA::new(&model))?, None)
        }
        DsMethod::Closed => (ds_closed_form(n_photons, eta), None),
        DsMethod::Mc => {
            if n_photons > MAX_MONTE_CARLO_N {
                return Err(Error::Size {
                    what: "photon number for --method mc (use --method closed)",
                    got: n_photons,
                    max: MAX_MONTE_CARLO_N,
                });
            }
            let est = DistFunctionB::new(&model).ds_monte_carlo(seed, samples)?;
            (est.estimate, Some(est.std_error))
        }
    };
    let name = match method {
        DsMethod::Exact => "exact",
        DsMethod::Closed => "closed",
        DsMethod::Mc => "mc",
    };
    let mut columns = vec!["N", "eta", "method", "ds"];
    let mut row: Vec<Cell> = vec![n_photons.into(), eta.into(), name.into(), value.into()];
    if let Some(e) = err {
        columns.extend(["std_error", "samples", "seed"]);
        row.extend([e.into(), samples.into(), seed.into()]);
    }
    Ok(Table::record(columns, row))
}

fn config_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn cmd_compare(config: &Path, samples: Option<usize>, seed: Option<u64>) -> Result<Table> {
    let cfg = RunConfig::load(config)?;
    let exp = cfg.experiment(&config_dir(config))?;
    let samples = samples.or(cfg.samples).unwrap_or(DEFAULT_COMPARE_SAMPLES);
    let seed = seed.unwrap_or_else(|| cfg.mc_seed());
    if exp.n_photons() > MAX_TVD_N {
        return Err(Error::size(
            "photon number for compare",
            exp.n_photons(),
            MAX_TVD_N,
        ));
    }
    if exp.n_modes() > MAX_TVD_M {
        return Err(Error::size(
            "mode number for compare",
            exp.n_modes(),
            MAX_TVD_M,
        ));
    }
    if samples < MIN_TVD_B_SAMPLES {
        return Err(Error::Domain(format!(
            "compare needs at least {MIN_TVD_B_SAMPLES} samples, got {samples}"
        )));
    }
    let s = summarize(&exp, seed, samples)?;
    Ok(summary_table(&exp, &s, samples, seed))
}

fn summary_table(exp: &Experiment, s: &DistSummary, samples: usize, seed: u64) -> Table {
    let route = serde_json::to_value(s.ds_route)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    Table::record(
        vec![
            "N", "M", "eta", "samples", "seed", "d_a", "d_b", "d_b_err", "ds", "ds_route", "bound",
            "purity", "pass_a", "pass_b",
        ],
        vec![
            exp.n_photons().into(),
            exp.n_modes().into(),
            exp.model().eta().into(),
            samples.into(),
            seed.into(),
            s.d_a.into(),
            s.d_b.estimate.into(),
            s.d_b.std_error.into(),
            s.ds.into(),
            route.into(),
            s.bound.into(),
            s.purity.into(),
            s.pass_a.into(),
            s.pass_b.into(),
        ],
    )
}

pub fn cmd_required_purity(n_photons: usize, target: f64) -> Result<Table> {
    let p = required_purity(n_photons, target)?;
    Ok(Table::record(
        vec!["N", "target", "purity", "eta"],
        vec![
            n_photons.into(),
            target.into(),
            p.into(),
            eta_for_purity(p)?.into(),
        ],
    ))
}

pub fn cmd_haar(modes: usize, seed: u64, path: &Path) -> Result<Table> {
    if modes > MAX_HAAR_M {
        return Err(Error::size("unitary dimension", modes, MAX_HAAR_M));
    }
    let u = haar_unitary(modes, seed)?;
    u.write_json(path)?;
    Ok(Table::record(
        vec!["M", "seed", "residual", "path"],
        vec![
            modes.into(),
            seed.into(),
            u.residual().into(),
            path.display().to_string().into(),
        ],
    ))
}

pub fn cmd_prob_a(config: &Path, ports: Option<&[usize]>) -> Result<Table> {
    let cfg = RunConfig::load(config)?;
    let exp = cfg.experiment(&config_dir(config))?;
    match ports {
        Some(p) => {
            let l = OutputTuple::new(p.to_vec(), exp.n_modes())?;
            Ok(Table::record(
                vec!["ports", "prob", "ideal", "classical"],
                vec![
                    ports_text(l.ports()).into(),
                    prob_a(&exp, &l)?.into(),
                    prob_a_ideal(&exp, &l)?.into(),
                    prob_a_classical(&exp, &l)?.into(),
                ],
            ))
        }
        None => {
            let mut t = Table::new(vec!["occupation", "prob", "ideal", "classical"]);
            for occ in all_occupations(exp.n_photons(), exp.n_modes()) {
                let l = occ.to_tuple();
                let k = occ.multiplicity();
                t.push(vec![
                    ports_text(occ.counts()).into(),
                    prob_a_occupation(&exp, &occ)?.into(),
                    (k * prob_a_ideal(&exp, &l)?).into(),
                    (k * prob_a_classical(&exp, &l)?).into(),
                ]);
            }
            Ok(t)
        }
    }
}

pub fn cmd_prob_b(config: &Path, ports: &[usize], times: &[f64]) -> Result<Table> {
    let cfg = RunConfig::load(config)?;
    let exp = cfg.experiment(&config_dir(config))?;
    let l = OutputTuple::new(ports.to_vec(), exp.n_modes())?;
    let t = TimeTuple::new(times.to_vec())?;
    Ok(Table::record(
        vec!["ports", "times", "density", "ideal", "unit"],
        vec![
            ports_text(l.ports()).into(),
            times
                .iter()
                .map(|&x| format_number(x))
                .collect::<Vec<_>>()
                .join(" ")
                .into(),
            prob_b(&exp, &l, &t)?.into(),
            prob_b_ideal(&exp, &l, &t)?.into(),
            format!("1/T^{}", exp.n_photons()).into(),
        ],
    ))
}

pub fn cmd_hom(ratio_max: f64, steps: usize) -> Result<Table> {
    if !(ratio_max.is_finite() && ratio_max >= 0.0) {
        return Err(Error::Domain(format!(
            "--ratio-max must be finite and non-negative, got {ratio_max}"
        )));
    }
    if steps == 0 {
        return Err(Error::Domain("--steps must be at least 1".into()));
    }
    let mut t = Table::new(vec![
        "dtau_over_t",
        "eta",
        "purity",
        "coincidence",
        "expected",
        "tvd_a",
    ]);
    let coincidence = crate::interference::Occupation::new(vec![1, 1])?;
    for i in 0..=steps {
        let ratio = ratio_max * i as f64 / steps as f64;
        let model = GaussianModel::uniform(2, 1.0, ratio)?;
        let eta = model.eta();
        let exp = Experiment::new(model, beam_splitter_50_50())?;
        let purity = purity_order_n(eta, 2)?;
        t.push(vec![
            ratio.into(),
            eta.into(),
            purity.into(),
            prob_a_occupation(&exp, &coincidence)?.into(),
            ((1.0 - purity) / 2.0).into(),
            tvd_a(&exp)?.into(),
        ]);
    }
    Ok(t)
}

fn emit(cli: &Cli, table: &Table) -> Result<()> {
    let text = table.render(cli.format);
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let start = std::time::Instant::now();
    let result = execute(&cli.command).and_then(|table| emit(&cli, &table));
    if cli.verbose {
        eprintln!(
            "{:?} finished in {:.3} s",
            cli.command,
            start.elapsed().as_secs_f64()
        );
    }
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
