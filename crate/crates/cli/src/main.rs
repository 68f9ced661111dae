use clap::{Parser, Subcommand};
use nuca::ca_decide::Property;
use nuca::decide::{construct_inverse, decide, DecideOptions};
use nuca::format::{config_to_value, oracle_report_value, parse_config, parse_spec, report_to_value, spec_to_json};
use nuca::nuca::{apply_step, dual_spec, power_spec, NucaSpec};
use nuca::oracle::{oracle_verdict, KERNEL_WINDOW_R};
use nuca::NucaError;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "nuca", version, about = "Decision procedures for linear non-uniform cellular automata")]
struct Cli {
    /// JSON output (the only format).
    #[arg(long, global = true, default_value_t = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide a property and print a report.
    Decide {
        property: String,
        spec: PathBuf,
        /// Largest support radius tried when searching for an inverse.
        #[arg(long, default_value_t = 6)]
        max_radius: usize,
        /// Seed for sampled certificate checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random samples per sampled certificate check.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Include elapsed time in the report (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Print the input configuration and the next `steps` configurations, one per line.
    Simulate {
        spec: PathBuf,
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: u64,
    },
    /// Print the spec of the n-th iterate.
    Power {
        spec: PathBuf,
        #[arg(short = 'n', default_value_t = 2)]
        n: u64,
    },
    /// Print the dual spec.
    Dual { spec: PathBuf },
    /// Print an inverse spec.
    Invert {
        spec: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_radius: usize,
    },
    /// Run the independent oracle and compare with `decide`.
    Oracle {
        property: String,
        spec: PathBuf,
        /// Kernel window padding (injectivity, d = 1).
        #[arg(long, default_value_t = KERNEL_WINDOW_R)]
        bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Input(String),
    Resource(String),
}

impl From<NucaError> for Failure {
    fn from(e: NucaError) -> Self {
        if e.is_resource_limit() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Run = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<NucaSpec, Failure> {
    let spec = parse_spec(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if !(1..=2).contains(&spec.d()) {
        return Err(Failure::Input(format!("d = {} is not supported (d must be 1 or 2)", spec.d())));
    }
    Ok(spec)
}

fn property(name: &str) -> Result<Property, Failure> {
    Property::parse(name).ok_or_else(|| {
        let names: Vec<&str> = Property::ALL.iter().map(|p| p.name()).collect();
        Failure::Input(format!("unknown property {name:?} (expected one of {})", names.join(", ")))
    })
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn run(cmd: Cmd) -> Run {
    match cmd {
        Cmd::Decide { property: p, spec, max_radius, seed, samples, timings } => {
            let prop = property(&p)?;
            let spec = load_spec(&spec)?;
            let opts = DecideOptions { samples, seed, max_radius, ..DecideOptions::default() };
            let report = decide(&spec, prop, &opts)?;
            Ok(pretty(&report_to_value(&report, timings)))
        }
        Cmd::Simulate { spec, config, steps } => {
            let spec = load_spec(&spec)?;
            let mut x = parse_config(&read(&config)?, &spec)
                .map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
            let mut lines = vec![config_to_value(&x).to_string()];
            for _ in 0..steps {
                x = apply_step(&spec, &x)?;
                lines.push(config_to_value(&x).to_string());
            }
            Ok(lines.join("\n"))
        }
        Cmd::Power { spec, n } => Ok(spec_to_json(&power_spec(&load_spec(&spec)?, n)?)),
        Cmd::Dual { spec } => Ok(spec_to_json(&dual_spec(&load_spec(&spec)?)?)),
        Cmd::Invert { spec, max_radius } => Ok(spec_to_json(&construct_inverse(&load_spec(&spec)?, max_radius)?)),
        Cmd::Oracle { property: p, spec, bound, seed } => {
            let prop = property(&p)?;
            let spec = load_spec(&spec)?;
            let oracle = oracle_verdict(&spec, prop, bound)?;
            let opts = DecideOptions { seed, ..DecideOptions::default() };
            let decided = decide(&spec, prop, &opts).ok().map(|r| r.verdict);
            Ok(pretty(&oracle_report_value(prop, oracle.verdict, oracle.method, decided)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(out) => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("resource limit: {msg}");
            ExitCode::from(EXIT_RESOURCE)
        }
    }
}
