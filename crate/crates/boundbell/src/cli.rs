//! Command-line front end: violation reports, threshold tables, witness
//! reports, LP feasibility scans, and LHV bound enumeration.
//!
//! Human-readable reports go to stdout with five decimal places; machine
//! tables are written to `--out` with full double precision, as CSV or as
//! a JSON array of objects mirroring the CSV columns. Every command is
//! deterministic given its flags and seed.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::algebra::{dur_state, expectation, ghz, mix_with_noise, QubitCount, MAX_QUBITS};
use crate::bell::{
    bell_operator_closed_form, lhv_bound_enumeration, noise_threshold_mk, noise_threshold_three,
    SettingPhaseTable,
};
use crate::error::{Error, Result};
use crate::lhv::random_setting_scan;
use crate::witness::{detection_value, kappa_min, positivity_scan, s_witness};

#[derive(Parser)]
#[command(
    name = "boundbell",
    version,
    about = "Multiqubit Bell tests, entanglement witnesses, and LHV feasibility"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the three-setting Bell operator on the bound entangled family
    Violation(ViolationArgs),
    /// Tabulate noise thresholds (three-setting and Mermin-Klyshko) over a range
    Thresholds(ThresholdsArgs),
    /// Report witness detection value and product-state positivity
    Witness(WitnessArgs),
    /// Scan random measurement settings for LHV feasibility
    LpScan(LpScanArgs),
    /// Enumerate the LHV bound and compare with the closed form
    BoundEnum(BoundEnumArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Write the machine-readable table to this path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format for --out
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct ViolationArgs {
    /// Number of qubits (2..=10)
    #[arg(long)]
    n: usize,
    /// Family phase alpha in radians
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ThresholdsArgs {
    /// Smallest qubit count (>= 4)
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    /// Largest qubit count (<= 10, bound by the MK optimizer)
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WitnessArgs {
    /// Number of qubits (2..=12)
    #[arg(long)]
    n: usize,
    /// Witness corner weight fraction in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Witness phase alpha in radians
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Random starts for the positivity scan
    #[arg(long, default_value_t = 60)]
    trials: usize,
    /// Scan seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct LpScanArgs {
    /// Number of qubits
    #[arg(long)]
    n: usize,
    /// Family phase alpha in radians
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Settings per observer
    #[arg(long = "settings", default_value_t = 3)]
    settings: usize,
    /// White-noise admixture v in [0, 1]
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Number of random setting draws
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Scan seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Scan the GHZ state instead of the bound entangled family
    #[arg(long)]
    ghz: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BoundEnumArgs {
    /// Number of qubits (2..=7)
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// One typed table cell; rendering depends on the output format.
enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

/// Column-ordered table backing both CSV and JSON emission.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let rendered: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::Int(v) => format!("{v}"),
                    Cell::Float(v) => format!("{v:.16e}"),
                    Cell::Text(v) => v.clone(),
                    Cell::Bool(v) => format!("{v}"),
                })
                .collect();
            out.push_str(&rendered.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> Result<String> {
        let mut array = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut object = serde_json::Map::new();
            for (name, cell) in self.columns.iter().zip(row) {
                let value = match cell {
                    Cell::Int(v) => serde_json::Value::from(*v),
                    Cell::Float(v) => serde_json::Number::from_f64(*v)
                        .map(serde_json::Value::Number)
                        .ok_or_else(|| {
                            Error::Serialization("non-finite value in table".into())
                        })?,
                    Cell::Text(v) => serde_json::Value::from(v.clone()),
                    Cell::Bool(v) => serde_json::Value::from(*v),
                };
                object.insert((*name).to_string(), value);
            }
            array.push(serde_json::Value::Object(object));
        }
        let mut text = serde_json::to_string_pretty(&array)?;
        text.push('\n');
        Ok(text)
    }

    fn write(&self, output: &OutputArgs) -> Result<()> {
        if let Some(path) = &output.out {
            let text = match output.format {
                OutFormat::Csv => self.csv(),
                OutFormat::Json => self.json()?,
            };
            std::fs::write(path, text)?;
        }
        Ok(())
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_thread_pool();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok((human, exit)) => {
            print!("{human}");
            exit
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Usage and validation problems exit 1; numerical or runtime failures
/// exit 2.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_)
        | Error::QubitCountOutOfRange(..)
        | Error::BadKappa(_)
        | Error::BadNoiseWeight(_)
        | Error::BadSettingIndex(_, _)
        | Error::EnumerationTooLarge(_, _)
        | Error::DimensionMismatch(_) => 1,
        _ => 2,
    }
}

fn init_thread_pool() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| {
        if let Ok(raw) = std::env::var("BOUNDBELL_THREADS") {
            if let Ok(threads) = raw.parse::<usize>() {
                if threads >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build_global();
                }
            }
        }
    });
}

fn execute(cli: Cli) -> Result<(String, i32)> {
    match cli.command {
        Command::Violation(args) => cmd_violation(args),
        Command::Thresholds(args) => cmd_thresholds(args),
        Command::Witness(args) => cmd_witness(args),
        Command::LpScan(args) => cmd_lp_scan(args),
        Command::BoundEnum(args) => cmd_bound_enum(args),
    }
}

fn qubit_range(n: usize, lo: usize, hi: usize, what: &str) -> Result<QubitCount> {
    if !(lo..=hi).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "{what} requires {lo} <= n <= {hi}, got {n}"
        )));
    }
    QubitCount::new(n)
}

fn cmd_violation(args: ViolationArgs) -> Result<(String, i32)> {
    let n = qubit_range(args.n, 2, 10, "violation")?;
    let operator = bell_operator_closed_form(n, args.alpha);
    let rho = dur_state(n, args.alpha)?;
    let value = expectation(operator.matrix(), &rho)?;
    let bound = operator.classical_bound();
    let ratio = value.abs() / bound;
    let violated = value.abs() > bound;
    let mut human = String::new();
    let _ = writeln!(human, "n = {}  alpha = {:.5}", args.n, args.alpha);
    let _ = writeln!(human, "value = {value:.5}");
    let _ = writeln!(human, "bound = {bound:.5}");
    let _ = writeln!(human, "ratio = {ratio:.5}");
    let _ = writeln!(
        human,
        "verdict: {}",
        if violated { "VIOLATED" } else { "NOT VIOLATED" }
    );
    let table = Table {
        columns: vec!["n", "alpha", "value", "bound", "ratio", "violated"],
        rows: vec![vec![
            Cell::Int(args.n as u64),
            Cell::Float(args.alpha),
            Cell::Float(value),
            Cell::Float(bound),
            Cell::Float(ratio),
            Cell::Bool(violated),
        ]],
    };
    table.write(&args.output)?;
    Ok((human, 0))
}

fn cmd_thresholds(args: ThresholdsArgs) -> Result<(String, i32)> {
    if !(4..=10).contains(&args.n_min) || !(4..=10).contains(&args.n_max)
        || args.n_min > args.n_max
    {
        return Err(Error::InvalidArgument(format!(
            "thresholds requires 4 <= n-min <= n-max <= 10, got {}..{}",
            args.n_min, args.n_max
        )));
    }
    let mut human = String::new();
    let mut rows = Vec::new();
    for n in args.n_min..=args.n_max {
        let qc = QubitCount::new(n)?;
        let three = noise_threshold_three(qc);
        let mk = noise_threshold_mk(qc)?;
        let flag = if !three.violation && !mk.violation {
            "  (no violation)"
        } else {
            ""
        };
        let _ = writeln!(
            human,
            "N={n}  v_three={:.5}  v_mk={:.5}{flag}",
            three.value, mk.value
        );
        rows.push(vec![
            Cell::Int(n as u64),
            Cell::Float(three.value),
            Cell::Float(mk.value),
        ]);
    }
    let table = Table {
        columns: vec!["N", "v_three", "v_mk"],
        rows,
    };
    table.write(&args.output)?;
    Ok((human, 0))
}

fn cmd_witness(args: WitnessArgs) -> Result<(String, i32)> {
    let n = qubit_range(args.n, 2, MAX_QUBITS, "witness")?;
    let witness = s_witness(n, args.kappa, args.alpha)?;
    let detection = detection_value(n, args.kappa);
    let scan = positivity_scan(&witness, args.trials, args.seed)?;
    let threshold = kappa_min(n);
    let detected = detection < 0.0;
    let mut human = String::new();
    let _ = writeln!(
        human,
        "n = {}  kappa = {:.5}  alpha = {:.5}",
        args.n, args.kappa, args.alpha
    );
    let _ = writeln!(human, "detection = {detection:.5}");
    let _ = writeln!(human, "scan_min = {:.5}", scan.min_value);
    let _ = writeln!(human, "kappa_min = {threshold:.5}");
    let _ = writeln!(
        human,
        "verdict: {}",
        if detected { "DETECTED" } else { "NOT DETECTED" }
    );
    let table = Table {
        columns: vec![
            "n",
            "kappa",
            "alpha",
            "detection_value",
            "scan_min",
            "kappa_min",
            "detected",
        ],
        rows: vec![vec![
            Cell::Int(args.n as u64),
            Cell::Float(args.kappa),
            Cell::Float(args.alpha),
            Cell::Float(detection),
            Cell::Float(scan.min_value),
            Cell::Float(threshold),
            Cell::Bool(detected),
        ]],
    };
    table.write(&args.output)?;
    Ok((human, 0))
}

fn cmd_lp_scan(args: LpScanArgs) -> Result<(String, i32)> {
    let n = qubit_range(args.n, 2, MAX_QUBITS, "lp-scan")?;
    let base = if args.ghz {
        ghz(n, args.alpha).projector()
    } else {
        dur_state(n, args.alpha)?
    };
    let rho = mix_with_noise(&base, args.noise)?;
    let report = random_setting_scan(&rho, args.settings, args.trials, args.seed)?;
    let mut verdicts = vec!["feasible"; report.trials];
    for trial in &report.infeasible_trials {
        verdicts[trial.trial] = "infeasible";
    }
    for (trial, _) in &report.failures {
        verdicts[*trial] = "failed";
    }
    let rows = verdicts
        .iter()
        .enumerate()
        .map(|(i, v)| vec![Cell::Int(i as u64), Cell::Text((*v).to_string())])
        .collect();
    let table = Table {
        columns: vec!["trial", "verdict"],
        rows,
    };
    table.write(&args.output)?;
    let mut human = String::new();
    let _ = writeln!(
        human,
        "feasible={} infeasible={} failed={}",
        report.feasible, report.infeasible, report.failed
    );
    for (trial, message) in &report.failures {
        let _ = writeln!(human, "trial {trial} failed: {message}");
    }
    let exit = if report.failed > 0 { 2 } else { 0 };
    Ok((human, exit))
}

fn cmd_bound_enum(args: BoundEnumArgs) -> Result<(String, i32)> {
    let n = qubit_range(args.n, 2, 7, "bound-enum")?;
    let table_phases = SettingPhaseTable::standard(n);
    let enumerated = lhv_bound_enumeration(n, &table_phases)?;
    let analytic = 2f64.powi(args.n as i32 - 1) * 3f64.sqrt();
    let mut human = String::new();
    let _ = writeln!(human, "n = {}", args.n);
    let _ = writeln!(human, "enumerated = {enumerated:.5}");
    let _ = writeln!(human, "analytic = {analytic:.5}");
    let table = Table {
        columns: vec!["n", "enumerated", "analytic"],
        rows: vec![vec![
            Cell::Int(args.n as u64),
            Cell::Float(enumerated),
            Cell::Float(analytic),
        ]],
    };
    table.write(&args.output)?;
    Ok((human, 0))
}
