use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use emaware::em::{self, EmError, Mtf, RmsLimit, SignalElectricals, TechParams, WireGeometry};
use emaware::run::{self, RunConfigFile, StructureSel};
use emaware::stats::{self, Improvement};
use emaware::workload::{self, GenSpec};
use emaware::{AllocPolicy, RingPreset, RunConfig, RunError, StructureReport, TraceSource};

const EXIT_CONFIG: u8 = 2;
const EXIT_TRACE: u8 = 3;
const EXIT_MODEL: u8 = 4;

/// An error together with the process status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn config(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_CONFIG,
            error: error.into(),
        }
    }

    fn model(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_MODEL,
            error: error.into(),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let code = match e.exit_code() {
            3 => EXIT_TRACE,
            4 => EXIT_MODEL,
            _ => EXIT_CONFIG,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<EmError> for Failure {
    fn from(e: EmError) -> Self {
        Failure::model(e)
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser, Debug)]
#[command(name = "emaware", version, about = "Electromigration-aware wear leveling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Replay a trace through baseline and EM-aware structures and write reports.
    Simulate(SimulateArgs),
    /// Write a synthetic trace.
    GenTrace(GenTraceArgs),
    /// Evaluate one of the EM reliability models.
    EmCalc {
        #[command(subcommand)]
        calc: Calc,
    },
    /// Combine several report.json files into per-structure geometric means.
    ReportMerge(ReportMergeArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Trace file to replay.
    #[arg(long, conflicts_with = "gen")]
    trace: Option<PathBuf>,
    /// Generator spec, as inline JSON or a path to a JSON file.
    #[arg(long)]
    gen: Option<String>,
    /// alu, regfile, cache or all.
    #[arg(long)]
    structure: Option<String>,
    /// ALU allocation policies as `aware` or `baseline:aware`.
    #[arg(long)]
    policy: Option<String>,
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.csv and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the generator seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Rotation period of the register file and of every cache level.
    #[arg(long)]
    rotation_period: Option<u64>,
    /// Count the register moves made by each rotation as writes.
    #[arg(long)]
    count_rotation_shifts: bool,
    /// Number of ALUs.
    #[arg(long)]
    units: Option<usize>,
    /// Register ring preset: gpr16, gpr-flags-sp or fp32.
    #[arg(long)]
    ring: Option<String>,
}

#[derive(Args, Debug)]
struct GenTraceArgs {
    /// Generator spec, as inline JSON or a path to a JSON file.
    #[arg(long)]
    gen: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the generator spec.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ReportMergeArgs {
    /// report.json files from earlier runs.
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct TechArgs {
    /// Black's scale constant A.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Current density exponent n.
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    /// Activation energy in eV.
    #[arg(long, default_value_t = 0.9)]
    ea: f64,
    /// Temperature in kelvin.
    #[arg(long, conflicts_with = "temp_c", allow_negative_numbers = true)]
    temp_k: Option<f64>,
    /// Temperature in degrees Celsius (default 125).
    #[arg(long, allow_negative_numbers = true)]
    temp_c: Option<f64>,
}

impl TechArgs {
    fn params(&self) -> Result<TechParams, EmError> {
        let temperature = match (self.temp_k, self.temp_c) {
            (Some(k), _) => k,
            (None, Some(c)) => em::celsius_to_kelvin(c),
            (None, None) => TechParams::default().temperature,
        };
        TechParams::new(self.scale, self.exponent, self.ea, temperature)
    }
}

#[derive(Args, Debug, Clone)]
struct GeomArgs {
    /// Wire width in meters.
    #[arg(long)]
    width: f64,
    /// Wire height in meters.
    #[arg(long)]
    height: f64,
}

impl GeomArgs {
    fn geometry(&self) -> Result<WireGeometry, EmError> {
        WireGeometry::new(self.width, self.height)
    }
}

#[derive(Args, Debug, Clone)]
struct SignalArgs {
    /// Load capacitance in farads.
    #[arg(long)]
    capacitance: f64,
    /// Supply voltage in volts.
    #[arg(long)]
    vdd: f64,
    /// Clock frequency in hertz.
    #[arg(long)]
    frequency: f64,
    /// Toggle rate in [0, 1].
    #[arg(long)]
    toggle_rate: f64,
    /// Rise time in seconds.
    #[arg(long, default_value_t = 1e-11)]
    rise_time: f64,
    /// Fall time in seconds.
    #[arg(long, default_value_t = 1e-11)]
    fall_time: f64,
}

impl SignalArgs {
    fn signal(&self) -> Result<SignalElectricals, EmError> {
        let sig = SignalElectricals {
            capacitance: self.capacitance,
            supply_voltage: self.vdd,
            frequency: self.frequency,
            toggle_rate: self.toggle_rate,
            rise_time: self.rise_time,
            fall_time: self.fall_time,
        };
        sig.validate()?;
        Ok(sig)
    }
}

#[derive(Subcommand, Debug)]
enum Calc {
    /// Black's equation MTF for a given current density.
    BlackMtf {
        #[command(flatten)]
        tech: TechArgs,
        /// Current density in A/m^2.
        #[arg(long)]
        current_density: f64,
    },
    /// Peak current density of a switching net.
    CurrentDensity {
        #[command(flatten)]
        geom: GeomArgs,
        #[command(flatten)]
        signal: SignalArgs,
    },
    /// RMS current allowed for a relaxed lifetime target.
    ReducedIrms {
        /// Sign-off RMS current limit in amperes.
        #[arg(long)]
        i_max: f64,
        /// Nominal technology lifetime in years.
        #[arg(long)]
        mtf_tech: f64,
        /// Relaxed lifetime target in years.
        #[arg(long)]
        mtf_reduced: f64,
    },
    /// Lifetime multiplier for an RMS current ratio I_reduced / I_max.
    LifetimeExtension { ratio: f64 },
    /// Technology constant K1.
    K1 {
        #[command(flatten)]
        tech: TechArgs,
        #[command(flatten)]
        geom: GeomArgs,
    },
    /// Edge-rate constant K2.
    K2 {
        /// Rise time in seconds.
        #[arg(long)]
        rise_time: f64,
        /// Fall time in seconds.
        #[arg(long)]
        fall_time: f64,
    },
    /// RMS-EM median time to failure.
    RmsMtf {
        #[command(flatten)]
        tech: TechArgs,
        #[command(flatten)]
        geom: GeomArgs,
        #[command(flatten)]
        signal: SignalArgs,
    },
    /// MTF improvement from the hotspot toggle rates (or write maxima) of two designs.
    Improvement { p_max_original: f64, p_max_aware: f64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::GenTrace(args) => cmd_gen_trace(args),
        Command::EmCalc { calc } => cmd_em_calc(calc),
        Command::ReportMerge(args) => cmd_report_merge(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// Accepts inline JSON (anything starting with `{`) or a path to a JSON file.
fn read_gen_spec(arg: &str) -> Result<GenSpec, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg)
            .with_context(|| format!("reading generator spec {arg}"))
            .map_err(Failure::config)?
    };
    let spec = GenSpec::from_json(&text).map_err(Failure::config)?;
    spec.validate().map_err(Failure::config)?;
    Ok(spec)
}

fn parse_policy(text: &str) -> Result<(Option<AllocPolicy>, AllocPolicy), Failure> {
    let parse = |s: &str| s.parse::<AllocPolicy>().map_err(Failure::config);
    match text.split_once(':') {
        Some((b, a)) => Ok((Some(parse(b)?), parse(a)?)),
        None => Ok((None, parse(text)?)),
    }
}

fn build_run_config(args: &SimulateArgs) -> Result<RunConfig, Failure> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::config)?;
            RunConfigFile::from_json(&text)?
        }
        None => RunConfigFile::default(),
    };

    let trace = match (&args.trace, &args.gen) {
        (Some(p), _) => TraceSource::File(p.clone()),
        (None, Some(g)) => TraceSource::Gen(read_gen_spec(g)?),
        (None, None) => match (file.trace, file.gen) {
            (Some(_), Some(_)) => {
                return Err(Failure::config(anyhow!("config sets both `trace` and `gen`")));
            }
            (Some(p), None) => TraceSource::File(p),
            (None, Some(g)) => TraceSource::Gen(g),
            (None, None) => return Err(Failure::config(anyhow!("no trace given: use --trace or --gen"))),
        },
    };
    let out = args
        .out
        .clone()
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("emaware-out"));

    let mut cfg = RunConfig::new(trace, out);
    if let Some(s) = file.structure {
        cfg.structure = s;
    }
    if let Some(a) = file.alu {
        cfg.alu = a;
    }
    if let Some(r) = file.regfile {
        cfg.regfile = r;
    }
    if let Some(h) = file.hierarchy {
        cfg.hierarchy = h;
    }
    cfg.seed = args.seed.or(file.seed);

    if let Some(s) = &args.structure {
        cfg.structure = s.parse()?;
    }
    if let Some(p) = &args.policy {
        if !matches!(cfg.structure, StructureSel::Alu | StructureSel::All) {
            return Err(Failure::config(anyhow!(
                "--policy selects ALU allocation policies and does not apply to structure `{}`",
                cfg.structure
            )));
        }
        let (baseline, aware) = parse_policy(p)?;
        if let Some(b) = baseline {
            cfg.alu.baseline = b;
        }
        cfg.alu.aware = aware;
    }
    if let Some(u) = args.units {
        cfg.alu.units = u;
    }
    if let Some(r) = &args.ring {
        cfg.regfile.ring = serde_json::from_value::<RingPreset>(serde_json::Value::String(r.clone()))
            .map_err(|_| Failure::config(anyhow!("unknown ring preset `{r}` (expected gpr16, gpr-flags-sp or fp32)")))?;
    }
    if let Some(p) = args.rotation_period {
        if p == 0 {
            return Err(Failure::config(anyhow!("--rotation-period must be >= 1")));
        }
        cfg.set_rotation_period(p);
    }
    if args.count_rotation_shifts {
        cfg.regfile.count_rotation_shifts = true;
    }
    Ok(cfg)
}

/// Shortest round-trip form, in scientific notation outside [1e-3, 1e6).
fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e6).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn improvement_cell(i: Improvement) -> String {
    match i {
        Improvement::Finite(v) => format!("{:.1}%", v * 100.0),
        Improvement::Unbounded => "unbounded".into(),
    }
}

fn print_summary(out: &mut impl Write, reports: &[StructureReport]) -> io::Result<()> {
    writeln!(
        out,
        "{:<20} {:>8} {:>14} {:>14} {:>12}",
        "structure", "entries", "max_baseline", "max_aware", "improvement"
    )?;
    for r in reports {
        writeln!(
            out,
            "{:<20} {:>8} {:>14} {:>14} {:>12}",
            r.structure,
            r.num_entries,
            r.max_baseline,
            r.max_aware,
            improvement_cell(r.mtf_improvement)
        )?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let cfg = build_run_config(&args)?;
    let reports = run::simulate(&cfg)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    print_summary(&mut out, &reports)
        .and_then(|()| writeln!(out, "reports written to {}", cfg.out_dir.display()))
        .map_err(Failure::config)
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CmdResult {
    match path {
        Some(p) => fs::write(p, bytes)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::config),
        None => io::stdout().write_all(bytes).map_err(Failure::config),
    }
}

fn cmd_gen_trace(args: GenTraceArgs) -> CmdResult {
    let mut spec = read_gen_spec(&args.gen)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let events = workload::generate(&spec).map_err(Failure::config)?;
    let header = serde_json::to_string(&spec).map_err(Failure::config)?;
    let mut text = format!("# emaware trace {header}\n");
    text.push_str(&workload::serialize_trace(&events));
    write_output(args.out.as_deref(), text.as_bytes())
}

fn cmd_em_calc(calc: Calc) -> CmdResult {
    let line = match calc {
        Calc::BlackMtf { tech, current_density } => {
            let v = em::black_mtf(&tech.params()?, current_density)?;
            format!("black_mtf = {} (units of A)", num(v))
        }
        Calc::CurrentDensity { geom, signal } => {
            let v = em::current_density(&signal.signal()?, &geom.geometry()?);
            format!("current_density = {} A/m^2", num(v))
        }
        Calc::ReducedIrms {
            i_max,
            mtf_tech,
            mtf_reduced,
        } => {
            let v = em::reduced_rms_current(&RmsLimit::new(i_max, mtf_tech)?, mtf_reduced)?;
            format!("reduced_irms = {} A", num(v))
        }
        Calc::LifetimeExtension { ratio } => {
            let v = em::lifetime_extension_from_current_ratio(ratio)?;
            format!("lifetime_extension = {} x", num(v))
        }
        Calc::K1 { tech, geom } => {
            let v = em::k1(&tech.params()?, &geom.geometry()?);
            format!("k1 = {}", num(v))
        }
        Calc::K2 { rise_time, fall_time } => {
            let v = em::k2_from_edges(rise_time, fall_time)?;
            format!("k2 = {} s^-1/2", num(v))
        }
        Calc::RmsMtf { tech, geom, signal } => match em::rms_em_mtf(&tech.params()?, &geom.geometry()?, &signal.signal()?)? {
            Mtf::Finite(v) => format!("rms_mtf = {} (units of A^n)", num(v)),
            Mtf::Unbounded => "rms_mtf = unbounded (net never switches)".to_string(),
        },
        Calc::Improvement {
            p_max_original,
            p_max_aware,
        } => {
            let v = em::mtf_improvement(p_max_original, p_max_aware)?;
            format!("mtf_improvement = {} ({:.1}%)", num(v), v * 100.0)
        }
    };
    println!("{line}");
    Ok(())
}

fn cmd_report_merge(args: ReportMergeArgs) -> CmdResult {
    let mut runs = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::config)?;
        let reports = stats::from_json(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(Failure::config)?;
        runs.push(reports);
    }
    let rows = stats::merge_reports(&runs).map_err(Failure::model)?;
    let mut buf = Vec::new();
    stats::write_merged_csv(&mut buf, &rows).map_err(Failure::model)?;
    write_output(args.out.as_deref(), &buf)
}
