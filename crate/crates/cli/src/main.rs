//! `spillsim`: run leak models on a scenario file, export the results and
//! compare models side by side.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or model pairing,
//! 3 numerical failure.

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spill_core::cfd::Parallelism;
use spill_core::estimators::{read_film_csv, ThicknessTable};
use spill_core::harness::{
    audit, compare, export, CfdOptions, InventoryRecord, ModelId, OpticalRecord, RunOptions,
    RunResult,
};
use spill_core::two_stage::DecayCoefficient;
use spill_core::{ErrorKind, HarnessError, Scenario};

#[derive(Parser, Debug)]
#[command(
    name = "spillsim",
    version,
    about = "Oil leak source terms for breached ship tanks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spilled quantity from inventory records, slick observations or a
    /// measured outflow speed.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        estimate: EstimateArgs,
    },
    /// Orifice draining of the tank through its breach.
    Jet {
        #[command(flatten)]
        common: Common,
    },
    /// Two-stage discharge for a breach below the waterline.
    TwoStage {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        two_stage: TwoStageArgs,
    },
    /// 2D volume-of-fluid simulation of the flow towards the breach.
    Cfd {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        cfd: CfdArgs,
    },
    /// Any model by name.
    Run {
        #[arg(long, short)]
        model: ModelId,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        all: AllArgs,
    },
    /// Several models on one scenario, tabulated side by side.
    Compare {
        /// Comma-separated model list, e.g. `jet,two_stage,cfd`.
        #[arg(long, short, value_delimiter = ',', required = true)]
        models: Vec<ModelId>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        all: AllArgs,
    },
    /// Re-derives an exported summary from its series.
    Audit {
        /// Directory written by a previous run.
        dir: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long = "scenario", value_name = "PATH")]
    scenario_flag: Option<PathBuf>,
    #[arg(value_name = "SCENARIO", conflicts_with = "scenario_flag")]
    scenario_pos: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Output interval in seconds; the largest step for `cfd`.
    #[arg(long)]
    dt: Option<f64>,
    /// End time in seconds.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Reserved; no model is stochastic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
struct EstimateArgs {
    /// Bunker records in tonnes: STOCK,CONSUMED,REMAINING.
    #[arg(long, value_delimiter = ',', num_args = 3, value_name = "T")]
    inventory: Option<Vec<f64>>,
    /// Slick observations: CSV of area_m2 and appearance code or thickness.
    #[arg(long, value_name = "CSV")]
    films: Option<PathBuf>,
    /// Appearance-to-thickness table (TOML) replacing the built-in one.
    #[arg(long, value_name = "TOML")]
    thickness_table: Option<PathBuf>,
    /// Measured outflow speed, m/s.
    #[arg(long, requires = "optical_duration")]
    optical_velocity: Option<f64>,
    /// Duration of the measured outflow, s.
    #[arg(long, requires = "optical_velocity")]
    optical_duration: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Decay {
    #[default]
    Frozen,
    Reevaluated,
}

#[derive(Args, Debug, Default)]
struct TwoStageArgs {
    /// Stage-one decay coefficient handling.
    #[arg(long, value_enum, default_value_t = Decay::Frozen)]
    decay: Decay,
}

#[derive(Args, Debug, Default)]
struct CfdArgs {
    /// Grid size, `NXxNY` or `N`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Fraction of the stability limit per step.
    #[arg(long)]
    cfl: Option<f64>,
    /// Write field snapshots every N steps.
    #[arg(long, value_name = "N")]
    snapshot_every: Option<usize>,
    #[arg(long, value_name = "N")]
    max_steps: Option<usize>,
    /// Relative divergence tolerance of the pressure projection.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Breach slot height in metres.
    #[arg(long)]
    slot_height: Option<f64>,
    /// Run grid loops and model comparisons on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug, Default)]
struct AllArgs {
    #[command(flatten)]
    estimate: EstimateArgs,
    #[command(flatten)]
    two_stage: TwoStageArgs,
    #[command(flatten)]
    cfd: CfdArgs,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad grid size `{s}`, expected NXxNY"))
    };
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => parse(s).map(|n| (n, n)),
    }
}

#[derive(Debug)]
enum Failure {
    Harness(HarnessError),
    Usage(String),
    Audit(Vec<String>),
    Compare(ErrorKind),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure::Harness(e)
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Io => 1,
        ErrorKind::Validation => 2,
        ErrorKind::Numerical => 3,
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Failure {
    Failure::Harness(HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl Common {
    fn scenario(&self) -> Result<Scenario, Failure> {
        let path = self
            .scenario_flag
            .as_ref()
            .or(self.scenario_pos.as_ref())
            .ok_or_else(|| {
                Failure::Usage("a scenario file is required (--scenario PATH)".into())
            })?;
        Ok(Scenario::from_path(path).map_err(HarnessError::from)?)
    }
}

fn build_options(
    common: &Common,
    estimate: &EstimateArgs,
    two_stage: &TwoStageArgs,
    cfd: &CfdArgs,
) -> Result<RunOptions, Failure> {
    let mut options = RunOptions {
        dt: common.dt,
        t_end: common.t_end,
        ..RunOptions::default()
    };

    if let Some(v) = &estimate.inventory {
        options.estimate.inventory = Some(InventoryRecord {
            stock_before: v[0],
            consumed_since: v[1],
            remaining_after: v[2],
        });
    }
    if let Some(path) = &estimate.thickness_table {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        options.estimate.thickness =
            ThicknessTable::from_toml_str(&text).map_err(HarnessError::from)?;
    }
    if let Some(path) = &estimate.films {
        let file = File::open(path).map_err(|e| io_error(path, e))?;
        options.estimate.films = read_film_csv(BufReader::new(file)).map_err(HarnessError::from)?;
    }
    if let (Some(velocity), Some(duration)) = (estimate.optical_velocity, estimate.optical_duration)
    {
        options.estimate.optical = Some(OpticalRecord { velocity, duration });
    }

    options.decay = match two_stage.decay {
        Decay::Frozen => DecayCoefficient::Frozen,
        Decay::Reevaluated => DecayCoefficient::Reevaluated,
    };

    let mut c = CfdOptions::default();
    if let Some((nx, ny)) = cfd.grid {
        c.nx = nx;
        c.ny = ny;
    }
    if let Some(cfl) = cfd.cfl {
        c.cfl = cfl;
    }
    c.snapshot_every = cfd.snapshot_every;
    c.max_steps = cfd.max_steps;
    c.slot_height = cfd.slot_height;
    if let Some(tol) = cfd.tolerance {
        c.solver.projection_tolerance = tol;
    }
    if cfd.sequential {
        c.solver.parallelism = Parallelism::Sequential;
    }
    options.cfd = c;
    Ok(options)
}

fn fmt_opt(v: Option<f64>, unit: &str) -> String {
    v.map(|x| format!("{x:.6} {unit}"))
        .unwrap_or_else(|| "-".into())
}

fn report(r: &RunResult, dir: &Path) {
    println!("scenario:        {}", r.label);
    println!("model:           {}", r.model);
    println!("samples:         {}", r.series.len());
    println!("spilled mass:    {:.6} kg", r.series.final_mass());
    println!("spilled volume:  {:.6} m3", r.series.final_volume());
    if r.model != ModelId::Estimate {
        println!("peak rate:       {:.6} kg/s", r.series.peak_rate());
        println!(
            "t50:             {}",
            fmt_opt(r.series.time_to_fraction(0.5), "s")
        );
        println!(
            "t90:             {}",
            fmt_opt(r.series.time_to_fraction(0.9), "s")
        );
    }
    if let Some(c) = &r.continuous {
        println!(
            "constant rate:   {} over {} from t = {} s",
            fmt_opt(c.rate, "kg/s"),
            fmt_opt(c.duration, "s"),
            c.start_time
        );
    }
    println!("runtime:         {:.3} s", r.runtime_s);
    for (k, v) in &r.notes {
        println!("  {k} = {v}");
    }
    println!("written to {}", dir.display());
}

fn run_one(model: ModelId, common: &Common, options: &RunOptions) -> Result<(), Failure> {
    let s = common.scenario()?;
    let result = spill_core::harness::run(&s, model, options)?;
    export(&result, &common.out)?;
    report(&result, &common.out);
    Ok(())
}

fn run_compare(
    models: &[ModelId],
    common: &Common,
    options: &RunOptions,
    sequential: bool,
) -> Result<(), Failure> {
    let s = common.scenario()?;
    let par = if sequential {
        Parallelism::Sequential
    } else {
        Parallelism::default()
    };
    let c = compare(&s, models, options, par)?;
    let out = &common.out;
    fs::create_dir_all(out).map_err(|e| io_error(out, e))?;

    let mut used: Vec<String> = Vec::new();
    let mut first_failure = None;
    for (model, result) in &c.runs {
        match result {
            Ok(r) => {
                let base = model.to_string();
                let n = used.iter().filter(|u| **u == base).count();
                let name = if n == 0 {
                    base.clone()
                } else {
                    format!("{base}-{}", n + 1)
                };
                used.push(base);
                export(r, &out.join(name))?;
            }
            Err(e) => {
                first_failure.get_or_insert(e.kind());
            }
        }
    }
    let path = out.join("comparison.csv");
    let file = File::create(&path).map_err(|e| io_error(&path, e))?;
    c.table.write_csv(file).map_err(|source| {
        Failure::Harness(HarnessError::Csv {
            path: path.display().to_string(),
            source,
        })
    })?;
    print!("{}", c.table.render());
    println!("written to {}", out.display());
    match first_failure {
        Some(kind) => Err(Failure::Compare(kind)),
        None => Ok(()),
    }
}

fn run_audit(dir: &Path) -> Result<(), Failure> {
    let r = audit(dir)?;
    if r.is_ok() {
        println!(
            "{}: {} values consistent with the series",
            dir.display(),
            r.checked
        );
        Ok(())
    } else {
        Err(Failure::Audit(r.mismatches))
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let none = AllArgs::default();
    match cli.command {
        Command::Estimate { common, estimate } => {
            let o = build_options(&common, &estimate, &none.two_stage, &none.cfd)?;
            run_one(ModelId::Estimate, &common, &o)
        }
        Command::Jet { common } => {
            let o = build_options(&common, &none.estimate, &none.two_stage, &none.cfd)?;
            run_one(ModelId::Jet, &common, &o)
        }
        Command::TwoStage { common, two_stage } => {
            let o = build_options(&common, &none.estimate, &two_stage, &none.cfd)?;
            run_one(ModelId::TwoStage, &common, &o)
        }
        Command::Cfd { common, cfd } => {
            let o = build_options(&common, &none.estimate, &none.two_stage, &cfd)?;
            run_one(ModelId::Cfd, &common, &o)
        }
        Command::Run { model, common, all } => {
            let o = build_options(&common, &all.estimate, &all.two_stage, &all.cfd)?;
            run_one(model, &common, &o)
        }
        Command::Compare {
            models,
            common,
            all,
        } => {
            let o = build_options(&common, &all.estimate, &all.two_stage, &all.cfd)?;
            run_compare(&models, &common, &o, all.cfd.sequential)
        }
        Command::Audit { dir } => run_audit(&dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Harness(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Audit(mismatches)) => {
            eprintln!("audit failed:");
            for m in mismatches {
                eprintln!("  {m}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Compare(kind)) => {
            eprintln!("error: at least one model failed; see the table");
            ExitCode::from(exit_code(kind))
        }
    }
}
