//! Batch front end: each subcommand runs one experiment and writes a data
//! file plus a JSON manifest into the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use semiclassical::acceptance::{
    emergence_energies, fmt_sig12, full_report, radial_momentum_residuals, kinetic_test_functions, Tolerances,
};
use semiclassical::channels::{emergence_of_time_sweep, ChannelSolverConfig, ChannelSystem};
use semiclassical::config::{load_model, ConfigError, LoadedModel};
use semiclassical::gutzwiller::{find_poles, GutzwillerOrbit, PoleIndex};
use semiclassical::numerics::ToleranceConfig;
use semiclassical::operators::{
    hydrogen_radial_levels, kinetic_discrepancy, GridFunction, HydrogenGrid, OperatorSettings, SphericalGrid,
};
use semiclassical::trajectory::{
    run_trajectory, sensitivity_sweep, table1_sweep, CubicSystem, EnergyOrder, SweepConfig, TrajectoryConfig,
    TABLE1_G,
};
use semiclassical::wkb::{bohr_sommerfeld_levels, PotentialModel, QuantizationSpec};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Compute(_) => 1,
            Self::Config(_) => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "semiclassical", version, about = "Run semiclassical experiments and write CSV/JSON artifacts")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory for data files and manifests.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Absolute and relative integration tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Model file (`[channels]` for `channels`, `[potential]` for `wkb`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lifetimes and escape times of the cubic well.
    #[command(allow_negative_numbers = true)]
    Table1 {
        /// Couplings; defaults to the four tabulated values.
        #[arg(long, num_args = 1..)]
        g: Vec<f64>,
        /// Order of the resonance energy used to launch the trajectory (0 or 2).
        #[arg(long, default_value_t = 2)]
        order: u32,
    },
    /// Sampled complex trajectory of the cubic well.
    #[command(allow_negative_numbers = true)]
    Fig1 {
        #[arg(long, default_value_t = 0.178885)]
        g: f64,
        #[arg(long, default_value_t = 200.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
    },
    /// Bohr-Sommerfeld levels with and without the turning-point phases.
    #[command(allow_negative_numbers = true)]
    Wkb {
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 10)]
        levels: u32,
    },
    /// Kinetic-operator identity, p_r hermiticity and hydrogen levels.
    #[command(allow_negative_numbers = true)]
    Operators {
        /// Radial and angular points of the spherical grid.
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Stationary versus time-dependent transition probabilities.
    #[command(allow_negative_numbers = true)]
    Channels {
        /// Collision energies; defaults to six points from 1 to 10.
        #[arg(long, num_args = 1..)]
        energies: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        channel: usize,
    },
    /// Resonance poles of a periodic-orbit family with affine action.
    #[command(allow_negative_numbers = true)]
    Poles {
        #[arg(long, default_value_t = 2)]
        k_count: u32,
        #[arg(long, default_value_t = 3)]
        s_count: u32,
        #[arg(long, default_value_t = 0.0)]
        action0: f64,
        #[arg(long, default_value_t = 1.0)]
        period: f64,
        #[arg(long, default_value_t = 2.0)]
        instability: f64,
        #[arg(long, default_value_t = 0.0)]
        instability_slope: f64,
        #[arg(long, default_value_t = 0)]
        focal_count: i32,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
    },
    /// Full reproduction report; exits 1 if any criterion fails.
    #[command(allow_negative_numbers = true)]
    Report {
        /// Tolerance override `key=value`; may be repeated.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Table1 { .. } => "table1",
            Self::Fig1 { .. } => "fig1",
            Self::Wkb { .. } => "wkb",
            Self::Operators { .. } => "operators",
            Self::Channels { .. } => "channels",
            Self::Poles { .. } => "poles",
            Self::Report { .. } => "report",
        }
    }
}

/// One tabular artifact: bit-exact header plus rows of numbers or text.
struct Table {
    stem: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_sig12(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Parsing the fixed-precision text keeps JSON and CSV values identical.
            Cell::Num(x) if x.is_finite() => fmt_sig12(*x).parse::<f64>().map_or(Value::Null, Value::from),
            Cell::Num(_) => Value::Null,
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl Table {
    fn new(stem: impl Into<String>, columns: &[&'static str]) -> Self {
        Self {
            stem: stem.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| Value::Array(row.iter().map(Cell::json).collect()))
                    .collect();
                let mut s = serde_json::to_string_pretty(&json!({ "columns": self.columns, "rows": rows }))
                    .expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

/// Everything a command produces before anything touches the disk.
struct Outcome {
    tables: Vec<Table>,
    parameters: Value,
    row_status: Vec<String>,
    tolerances: Value,
    failed: Option<String>,
    stdout: Option<String>,
}

impl Outcome {
    fn new(tables: Vec<Table>, parameters: Value, tol: f64) -> Self {
        let row_status = tables
            .first()
            .map(|t| vec!["ok".to_string(); t.rows.len()])
            .unwrap_or_default();
        Self {
            tables,
            parameters,
            row_status,
            tolerances: json!({ "integration": tol }),
            failed: None,
            stdout: None,
        }
    }
}

fn validate_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--{name} must be a finite number > 0, got {x}")))
    }
}

fn ode_tolerance(tol: f64) -> Result<ToleranceConfig> {
    validate_positive("tol", tol)?;
    Ok(ToleranceConfig::uniform(tol))
}

fn run_table1(common: &Common, g: &[f64], order: u32) -> Result<Outcome> {
    let gs = if g.is_empty() { TABLE1_G.to_vec() } else { g.to_vec() };
    for &x in &gs {
        validate_positive("g", x)?;
    }
    let energy_order = EnergyOrder::from_order(order).map_err(|e| CliError::Config(e.to_string()))?;
    let mut config = SweepConfig {
        energy_order,
        ..SweepConfig::default()
    };
    config.trajectory.tolerance = ode_tolerance(common.tol)?;

    let mut table = Table::new("table1", &["g", "tau", "t_c", "ratio"]);
    for row in table1_sweep(&gs, &config) {
        let r = row.map_err(compute)?;
        table.rows.push(vec![Cell::Num(r.g), Cell::Num(r.tau), Cell::Num(r.t_c), Cell::Num(r.ratio)]);
    }

    let mut sens = Table::new("table1_sensitivity", &["g", "energy_order", "well_fraction", "t_c"]);
    for row in sensitivity_sweep(&gs, &config) {
        for v in row.variants {
            sens.rows.push(vec![
                Cell::Num(row.g),
                Cell::Int(v.energy_order.order() as i64),
                Cell::Num(v.well_fraction),
                v.t_c.map_or_else(|e| Cell::Text(format!("error: {e}")), Cell::Num),
            ]);
        }
    }
    let params = json!({ "g": gs, "order": order });
    Ok(Outcome::new(vec![table, sens], params, common.tol))
}

fn run_fig1(common: &Common, g: f64, tmax: f64, dt: f64) -> Result<Outcome> {
    validate_positive("g", g)?;
    validate_positive("tmax", tmax)?;
    validate_positive("dt", dt)?;
    let config = TrajectoryConfig {
        tolerance: ode_tolerance(common.tol)?,
        ..TrajectoryConfig::default()
    };
    let sys = CubicSystem::resonance(g, EnergyOrder::SecondOrder).map_err(compute)?;
    let path = run_trajectory(&sys, tmax, dt, &config).map_err(compute)?;
    let mut table = Table::new("fig1", &["t", "re_x", "im_x", "re_p", "im_p"]);
    for r in path {
        table.rows.push(vec![
            Cell::Num(r.t),
            Cell::Num(r.x.re),
            Cell::Num(r.x.im),
            Cell::Num(r.p.re),
            Cell::Num(r.p.im),
        ]);
    }
    Ok(Outcome::new(vec![table], json!({ "g": g, "tmax": tmax, "dt": dt }), common.tol))
}

fn run_wkb(common: &Common, hbar: f64, levels: u32) -> Result<Outcome> {
    validate_positive("hbar", hbar)?;
    if levels == 0 {
        return Err(CliError::Config("--levels must be >= 1".into()));
    }
    let (v, source) = match &common.config {
        Some(path) => match load_model(path)? {
            LoadedModel::Potential(v) => (v, path.display().to_string()),
            LoadedModel::Channels(_) => {
                return Err(CliError::Config(format!(
                    "{}: `wkb` needs a [potential] section",
                    path.display()
                )))
            }
        },
        None => (PotentialModel::harmonic(1.0).map_err(compute)?, "harmonic omega=1".to_string()),
    };
    let caustic = bohr_sommerfeld_levels(&v, &QuantizationSpec::caustic(hbar, 0..levels)).map_err(compute)?;
    let integer = bohr_sommerfeld_levels(&v, &QuantizationSpec::integer(hbar, 0..levels)).map_err(compute)?;
    let mut table = Table::new("wkb", &["n", "e_caustic", "e_integer"]);
    for (n, (a, b)) in caustic.iter().zip(&integer).enumerate() {
        table.rows.push(vec![Cell::Int(n as i64), Cell::Num(*a), Cell::Num(*b)]);
    }
    let params = json!({ "hbar": hbar, "levels": levels, "potential": source });
    Ok(Outcome::new(vec![table], params, common.tol))
}

fn run_operators(common: &Common, n: usize) -> Result<Outcome> {
    if !(20..=2000).contains(&n) {
        return Err(CliError::Config(format!("--n must lie in [20, 2000], got {n}")));
    }
    let settings = OperatorSettings::default();
    let grid = SphericalGrid::offset(n, n, 10.0).map_err(compute)?;
    let mut table = Table::new("operators", &["quantity", "index", "value"]);
    for (i, f) in kinetic_test_functions().into_iter().enumerate() {
        let gf = GridFunction::spherical(&grid, |r, t| Complex64::new(f(r, t), 0.0));
        let d = kinetic_discrepancy(&gf, &settings, 1e-2).map_err(compute)?;
        table.rows.push(vec![
            Cell::Text("kinetic_max_relative_error".into()),
            Cell::Int(i as i64),
            Cell::Num(d.max_relative_error),
        ]);
    }
    let ns = [100, 200, 400, 800];
    for (n, r) in ns.iter().zip(radial_momentum_residuals(&ns).map_err(compute)?) {
        table.rows.push(vec![Cell::Text("p_r_hermiticity_residual".into()), Cell::Int(*n as i64), Cell::Num(r)]);
    }
    let levels = hydrogen_radial_levels(3, &HydrogenGrid::default()).map_err(compute)?;
    for (i, e) in levels.iter().enumerate() {
        table.rows.push(vec![Cell::Text("hydrogen_s_level".into()), Cell::Int(i as i64 + 1), Cell::Num(*e)]);
    }
    Ok(Outcome::new(vec![table], json!({ "n": n }), common.tol))
}

fn run_channels(common: &Common, energies: &[f64], channel: usize) -> Result<Outcome> {
    let energies = if energies.is_empty() { emergence_energies() } else { energies.to_vec() };
    for &e in &energies {
        validate_positive("energies", e)?;
    }
    let (sys, source) = match &common.config {
        Some(path) => match load_model(path)? {
            LoadedModel::Channels(s) => (s, path.display().to_string()),
            LoadedModel::Potential(_) => {
                return Err(CliError::Config(format!(
                    "{}: `channels` needs a [channels] section",
                    path.display()
                )))
            }
        },
        None => (
            ChannelSystem::landau_zener(energies[0]).map_err(compute)?,
            "landau_zener (bundled)".to_string(),
        ),
    };
    if channel >= sys.channels() {
        return Err(CliError::Config(format!(
            "--channel must be < {}, got {channel}",
            sys.channels()
        )));
    }
    let config = ChannelSolverConfig {
        tolerance: ode_tolerance(common.tol)?,
        ..ChannelSolverConfig::default()
    };
    let mut table = Table::new("channels", &["energy", "p_stationary", "p_timedependent", "discrepancy"]);
    let mut status = Vec::new();
    let mut first_error = None;
    for (e, row) in energies.iter().zip(emergence_of_time_sweep(&sys, &energies, channel, &config)) {
        match row {
            Ok(r) => {
                table.rows.push(vec![
                    Cell::Num(r.energy),
                    Cell::Num(1.0 - r.stationary[channel]),
                    Cell::Num(1.0 - r.time_dependent[channel]),
                    Cell::Num(r.discrepancy),
                ]);
                status.push("ok".to_string());
            }
            Err(err) => {
                status.push(format!("error: {err}"));
                first_error.get_or_insert_with(|| format!("energy {}: {err}", fmt_sig12(*e)));
            }
        }
    }
    let params = json!({ "energies": energies, "channel": channel, "model": source });
    let mut outcome = Outcome::new(vec![table], params, common.tol);
    outcome.row_status = status;
    outcome.tolerances = json!({ "integration": common.tol, "unitarity": config.unitarity_tolerance });
    outcome.failed = first_error;
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn run_poles(
    common: &Common,
    k_count: u32,
    s_count: u32,
    action0: f64,
    period: f64,
    instability: f64,
    instability_slope: f64,
    focal_count: i32,
    hbar: f64,
) -> Result<Outcome> {
    if k_count == 0 || s_count == 0 || k_count > 50 || s_count > 200 {
        return Err(CliError::Config("--k-count in [1, 50] and --s-count in [1, 200] required".into()));
    }
    let orbit = GutzwillerOrbit::affine(action0, period, instability, instability_slope, focal_count, hbar)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let indices: Vec<PoleIndex> = (0..k_count)
        .flat_map(|k| (0..s_count).map(move |s| PoleIndex::new(k, s)))
        .collect();
    let poles = find_poles(&orbit, &indices, |i| {
        orbit.exact_pole(i).unwrap_or_default() + Complex64::new(0.05, 0.05)
    });
    let mut table = Table::new("poles", &["k", "s", "re_E", "im_E", "residual"]);
    for pole in poles {
        let p = pole.map_err(compute)?;
        table.rows.push(vec![
            Cell::Int(p.index.k as i64),
            Cell::Int(p.index.s as i64),
            Cell::Num(p.energy.re),
            Cell::Num(p.energy.im),
            Cell::Num(p.residual),
        ]);
    }
    let params = json!({
        "k_count": k_count, "s_count": s_count, "action0": action0, "period": period,
        "instability": instability, "instability_slope": instability_slope,
        "focal_count": focal_count, "hbar": hbar,
    });
    Ok(Outcome::new(vec![table], params, common.tol))
}

fn run_report(common: &Common, set: &[String]) -> Result<Outcome> {
    let mut tol = Tolerances::default();
    for item in set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{item}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("--set {key}: `{value}` is not a number")))?;
        tol.set(key.trim(), value).map_err(CliError::Config)?;
    }
    let (outcomes, _) = full_report(&tol);
    let mut table = Table::new("report", &["id", "criterion", "status", "measured", "reference"]);
    let mut stdout = String::new();
    for o in &outcomes {
        table.rows.push(vec![
            Cell::Int(o.id as i64),
            Cell::Text(o.name.to_string()),
            Cell::Text(o.status().to_string()),
            Cell::Text(o.measured.clone()),
            Cell::Text(o.reference.clone()),
        ]);
        stdout.push_str(&format!("{} {}: {}\n", o.status(), o.id, o.name));
    }
    let failing: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    let tolerances: Map<String, Value> = Tolerances::KEYS
        .iter()
        .map(|k| (k.to_string(), Value::from(tol.get(k))))
        .collect();
    let timing: Map<String, Value> = outcomes
        .iter()
        .map(|o| (format!("criterion_{}_s", o.id), Value::from(o.elapsed.as_secs_f64())))
        .collect();
    let mut outcome = Outcome::new(vec![table], json!({ "set": set }), common.tol);
    outcome.row_status = outcomes.iter().map(|o| o.status().to_string()).collect();
    outcome.tolerances = json!({ "acceptance": tolerances, "criterion_timing": timing });
    outcome.stdout = Some(stdout);
    if !failing.is_empty() {
        outcome.failed = Some(format!("criteria failed: {}", failing.join(", ")));
    }
    Ok(outcome)
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    validate_positive("tol", c.tol)?;
    match &cli.command {
        Command::Table1 { g, order } => run_table1(c, g, *order),
        Command::Fig1 { g, tmax, dt } => run_fig1(c, *g, *tmax, *dt),
        Command::Wkb { hbar, levels } => run_wkb(c, *hbar, *levels),
        Command::Operators { n } => run_operators(c, *n),
        Command::Channels { energies, channel } => run_channels(c, energies, *channel),
        Command::Poles {
            k_count,
            s_count,
            action0,
            period,
            instability,
            instability_slope,
            focal_count,
            hbar,
        } => run_poles(
            c,
            *k_count,
            *s_count,
            *action0,
            *period,
            *instability,
            *instability_slope,
            *focal_count,
            *hbar,
        ),
        Command::Report { set } => run_report(c, set),
    }
}

fn write_artifacts(cli: &Cli, outcome: &Outcome, seconds: f64) -> std::io::Result<Vec<PathBuf>> {
    let dir = &cli.common.out;
    fs::create_dir_all(dir)?;
    let ext = match cli.common.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut files = Vec::new();
    for t in &outcome.tables {
        let path = dir.join(format!("{}.{ext}", t.stem));
        fs::write(&path, t.render(cli.common.format))?;
        files.push(path);
    }
    let manifest = json!({
        "config": {
            "command": cli.command.name(),
            "parameters": outcome.parameters,
            "format": ext,
            "tol": cli.common.tol,
            "config_file": cli.common.config.as_ref().map(|p| p.display().to_string()),
        },
        "library_version": env!("CARGO_PKG_VERSION"),
        "outputs": files.iter().map(|p| file_name(p)).collect::<Vec<_>>(),
        "row_status": outcome.row_status,
        "tolerances": outcome.tolerances,
        "status": if outcome.failed.is_some() { "failed" } else { "ok" },
        "timing": { "wall_clock_s": seconds },
    });
    let path = dir.join(format!("{}.manifest.json", cli.command.name()));
    let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
    text.push('\n');
    fs::write(&path, text)?;
    files.push(path);
    Ok(files)
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let files = match write_artifacts(&cli, &outcome, start.elapsed().as_secs_f64()) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: writing artifacts: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(text) = &outcome.stdout {
        print!("{text}");
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    match &outcome.failed {
        Some(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
