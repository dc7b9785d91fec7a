use std::ffi::OsStr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use grover_netlogic::encoding::ParamBitstring;
use grover_netlogic::grover::{run_grover, GroverPlan, Iterations, OracleKind};
use grover_netlogic::netmodel::{ConstraintSet, ProteinNetwork, SamplingMode};
use grover_netlogic::qsim::{NoiseModel, ABSOLUTE_MAX_QUBITS, DEFAULT_MAX_QUBITS};
use grover_netlogic::report::{histogram_csv, histogram_svg, RunReport};
use grover_netlogic::satcore::{self, distinct_expressions, DEFAULT_ENUMERATION_LIMIT};
use grover_netlogic::Error;

const MAX_QUBITS_ENV: &str = "GROVER_NETLOGIC_MAX_QUBITS";
const SVG_MAX_BARS: usize = 64;

#[derive(Parser)]
#[command(name = "grover-netlogic", version, about = "Recover Boolean network update rules with Grover search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample (state, next value) constraints from a built-in network.
    Generate {
        #[arg(long, value_enum, default_value_t = Model::Cortex)]
        model: Model,
        #[arg(long, default_value = "Fgf8")]
        target: String,
        /// Number of samples; ignored by full-table mode.
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long, default_value = "random-states")]
        mode: SamplingMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classically list every rule consistent with a constraint file.
    Enumerate {
        input: PathBuf,
        /// Raise the enumeration guard on the number of variables.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        max_enum_k: usize,
    },
    /// Run Grover search over the rule parameters and report the ranking.
    Solve {
        input: PathBuf,
        #[arg(long, default_value = "predicate")]
        oracle: OracleKind,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        /// `auto` or a fixed number of rounds.
        #[arg(long, default_value = "auto", value_parser = parse_iterations)]
        iterations: Iterations,
        /// Depolarizing probability per gate per touched qubit.
        #[arg(long, default_value_t = 0.0)]
        noise_p: f64,
        /// Readout flip probability per measured qubit.
        #[arg(long, default_value_t = 0.0)]
        noise_q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Histogram path; `.csv` or `.svg`.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Only keep the first N ranked rows in the report.
        #[arg(long)]
        top: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        /// Simulator width limit (also read from GROVER_NETLOGIC_MAX_QUBITS).
        #[arg(long)]
        max_qubits: Option<usize>,
    },
    /// Print the rule a parameter bitstring encodes.
    Decode {
        bitstring: String,
        /// Comma-separated variable names; s1, s2, ... by default.
        #[arg(long, value_delimiter = ',')]
        variables: Option<Vec<String>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Cortex,
}

fn parse_iterations(s: &str) -> Result<Iterations, String> {
    if s == "auto" {
        return Ok(Iterations::Auto);
    }
    match s.parse::<usize>() {
        Ok(0) => Err("iterations must be at least 1".into()),
        Ok(m) => Ok(Iterations::Fixed(m)),
        Err(_) => Err(format!("expected `auto` or a positive integer, got {s:?}")),
    }
}

/// 0 success, 2 usage or input, 3 unsatisfiable, 4 capacity.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unsatisfiable | Error::NoSolutions => 3,
        Error::Capacity(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Error::Unsatisfiable => eprintln!("unsatisfiable: no rule reproduces every sample"),
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> grover_netlogic::Result<()> {
    match command {
        Command::Generate { model: Model::Cortex, target, count, mode, seed, out } => {
            let c = ProteinNetwork::cortex().sample_constraints(&target, count, seed, mode)?;
            let t = satcore::count_solutions(&c)?;
            match out {
                Some(path) => {
                    c.save(&path)?;
                    println!("wrote {} samples for {target} to {}; t = {t}", c.len(), path.display());
                }
                None => {
                    print!("{}", c.to_json_string());
                    eprintln!("t = {t}");
                }
            }
            Ok(())
        }
        Command::Enumerate { input, max_enum_k } => {
            let c = ConstraintSet::load(&input)?;
            let solutions = satcore::enumerate_solutions_with_limit(&c, max_enum_k)?;
            let expressions = distinct_expressions(&solutions)
                .iter()
                .map(|e| Ok(json!({"expr": e.canonical.format(c.variables())?, "class_size": e.class_size})))
                .collect::<grover_netlogic::Result<Vec<_>>>()?;
            let doc = json!({
                "t": solutions.len(),
                "solutions": solutions.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "expressions": expressions,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            if solutions.is_empty() {
                eprintln!("unsatisfiable: no rule reproduces every sample");
            }
            Ok(())
        }
        Command::Solve {
            input,
            oracle,
            shots,
            iterations,
            noise_p,
            noise_q,
            seed,
            out,
            plot,
            top,
            workers,
            max_qubits,
        } => {
            let c = ConstraintSet::load(&input)?;
            let mut plan = GroverPlan::new(c.clone());
            plan.oracle = oracle;
            plan.shots = shots;
            plan.iterations = iterations;
            plan.seed = seed;
            plan.noise = NoiseModel::new(noise_p, noise_q)?;
            plan.workers = workers;
            plan.max_qubits = resolve_max_qubits(max_qubits)?;
            let plot_kind = plot.as_deref().map(plot_kind).transpose()?;

            let run = run_grover(&plan)?;
            if iterations == Iterations::Auto {
                println!("t = {}, m = {}", run.solutions, run.iterations);
            }
            let label = input.file_name().map(|n| n.to_string_lossy().into_owned());
            let report = RunReport::build(&run, &c, label, top)?;
            print!("{}", report.to_table());
            if let Some(path) = out {
                std::fs::write(&path, report.to_json_pretty())?;
            }
            if let (Some(path), Some(kind)) = (plot, plot_kind) {
                let body = match kind {
                    PlotKind::Csv => histogram_csv(&run, &c)?,
                    PlotKind::Svg => histogram_svg(&run, &c, SVG_MAX_BARS)?,
                };
                std::fs::write(&path, body)?;
            }
            Ok(())
        }
        Command::Decode { bitstring, variables } => {
            let b: ParamBitstring = bitstring.parse()?;
            let p = b.decode();
            let names = variables.unwrap_or_else(|| (1..=p.k()).map(|i| format!("s{i}")).collect());
            println!("{}", p.format(&names)?);
            if !p.is_canonical() {
                let canon = ParamBitstring::from_params(&p.canonicalize());
                eprintln!("warning: {b} sets negate bits of excluded variables; canonical form is {canon}");
                println!("canonical: {canon}");
            }
            Ok(())
        }
    }
}

enum PlotKind {
    Csv,
    Svg,
}

fn plot_kind(path: &Path) -> grover_netlogic::Result<PlotKind> {
    match path.extension().and_then(OsStr::to_str) {
        Some("csv") => Ok(PlotKind::Csv),
        Some("svg") => Ok(PlotKind::Svg),
        _ => Err(Error::InvalidPlan(format!("--plot {} must end in .csv or .svg", path.display()))),
    }
}

fn resolve_max_qubits(flag: Option<usize>) -> grover_netlogic::Result<usize> {
    let limit = match flag {
        Some(n) => n,
        None => match std::env::var(MAX_QUBITS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidPlan(format!("{MAX_QUBITS_ENV}={v:?} is not a qubit count")))?,
            Err(_) => DEFAULT_MAX_QUBITS,
        },
    };
    if limit > ABSOLUTE_MAX_QUBITS {
        return Err(Error::InvalidPlan(format!(
            "a {limit}-qubit limit is above the {ABSOLUTE_MAX_QUBITS}-qubit ceiling"
        )));
    }
    Ok(limit)
}
