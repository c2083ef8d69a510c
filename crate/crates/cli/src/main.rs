use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qswitch_core::diagram::{
    build_diagram, count_loops, is_information_transmitting, modify_diagram,
};
use qswitch_core::io::{density_from_json, parse_ensemble, parse_spec, MatrixJson, OutputJson};
use qswitch_core::optimizer::{
    holevo_of_protocol, holevo_of_protocol_discarding_control, pairwise_mutually_cyclic,
    search_best_with, search_sampled, MAX_SAMPLED_N,
};
use qswitch_core::switch::brute::switch_output_with;
use qswitch_core::switch::{classify_term, fourier_control, switch_output_fast, TermKind};
use qswitch_core::verify::{self, VerifyConfig};
use qswitch_core::{DensityMatrix, Ensemble, Execution, Permutation, SwitchSpec, TOL};
use serde::Serialize;

const MAX_CLASSIFY_N: usize = 6;

#[derive(Parser)]
#[command(
    name = "qswitch",
    version,
    about = "Evaluate and analyse N-channel quantum switches"
)]
struct Cli {
    /// Run on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a switch on an input state and print the output blocks as JSON.
    Evaluate(EvaluateArgs),
    /// Classify interference terms algebraically and by wiring diagram (CSV).
    Classify(ClassifyArgs),
    /// Search for ordering sets maximising the transmission objective.
    Search(SearchArgs),
    /// Run the cross-oracle verification suite.
    Verify(VerifyArgs),
    /// Holevo quantity of a switch protocol for an input ensemble.
    Holevo(HolevoArgs),
}

#[derive(Args)]
struct CdpcArgs {
    /// Use N completely depolarising channels instead of a spec file.
    #[arg(long, conflicts_with = "spec")]
    cdpc: bool,
    /// Switch specification JSON.
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    #[arg(short = 'd', long = "dim")]
    d: Option<usize>,
    #[arg(short = 'N', long = "channels")]
    n: Option<usize>,
    /// `cyclic`, `all` or a JSON list of orderings such as `[[1,2],[2,1]]`.
    #[arg(long, default_value = "cyclic")]
    perms: String,
    /// `fourier` or a JSON matrix file.
    #[arg(long, default_value = "fourier")]
    control: String,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    switch: CdpcArgs,
    /// `zero`, `plus`, `mixed` or a JSON matrix file.
    #[arg(long, default_value = "zero")]
    rho: String,
    /// Use the closed-form evaluator (depolarising channels only).
    #[arg(long, conflicts_with = "both")]
    fast: bool,
    /// Run both evaluators and report their maximum deviation.
    #[arg(long)]
    both: bool,
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(short = 'N', long = "channels")]
    n: usize,
    /// `all-pairs`, `cyclic` or a JSON list of orderings.
    #[arg(long, default_value = "all-pairs")]
    perms: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(short = 'N', long = "channels")]
    n: usize,
    #[arg(short = 'M', long = "orderings")]
    m: usize,
    #[arg(short = 'd', long = "dim")]
    d: usize,
    /// Exit with status 1 unless every maximiser is pairwise mutually cyclic.
    #[arg(long)]
    check_cyclic: bool,
    /// Score this many random subsets instead of all of them.
    #[arg(long, requires = "seed")]
    sample: Option<u64>,
    #[arg(long, requires = "sample")]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Only run the Kraus-sum checks up to N = 3.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    tolerance: f64,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct HolevoArgs {
    #[arg(short = 'd', long = "dim")]
    d: usize,
    #[arg(short = 'N', long = "channels")]
    n: usize,
    #[arg(long, default_value = "cyclic")]
    perms: String,
    #[arg(long, default_value = "fourier")]
    control: String,
    /// Ensemble JSON; defaults to the uniform computational-basis ensemble.
    #[arg(long, value_name = "FILE")]
    ensemble: Option<PathBuf>,
    /// Trace out the control before computing the Holevo quantity.
    #[arg(long)]
    discard_control: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Failures mapped onto exit codes: verification (1) or usage/input (2).
enum Failure {
    Verification(String),
    Input(String),
}

impl From<qswitch_core::Error> for Failure {
    fn from(e: qswitch_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let result = match cli.command {
        Command::Evaluate(a) => evaluate(&a, exec),
        Command::Classify(a) => classify(&a),
        Command::Search(a) => search(&a, exec),
        Command::Verify(a) => run_verify(&a, exec),
        Command::Holevo(a) => holevo(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: qswitch_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_matrix_state(path: &Path) -> Result<DensityMatrix, Failure> {
    let raw: MatrixJson = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    with_path(path, density_from_json(&raw))
}

fn parse_perms(spec: &str, n: usize) -> Result<Vec<Permutation>, Failure> {
    match spec {
        "cyclic" => Ok(Permutation::cyclic_set(n)),
        "all" | "all-pairs" => Ok(Permutation::all(n)),
        text => {
            let perms: Vec<Permutation> =
                serde_json::from_str(text).map_err(|e| Failure::Input(format!("--perms: {e}")))?;
            if let Some(p) = perms.iter().find(|p| p.len() != n) {
                return Err(Failure::Input(format!(
                    "--perms: ordering {p} does not have {n} labels"
                )));
            }
            Ok(perms)
        }
    }
}

fn parse_state(spec: &str, d: usize) -> Result<DensityMatrix, Failure> {
    Ok(match spec {
        "zero" => DensityMatrix::basis(d, 0)?,
        "plus" => DensityMatrix::plus(d),
        "mixed" => DensityMatrix::maximally_mixed(d),
        path => read_matrix_state(Path::new(path))?,
    })
}

fn parse_control(spec: &str, m: usize) -> Result<DensityMatrix, Failure> {
    if spec == "fourier" {
        Ok(fourier_control(m))
    } else {
        read_matrix_state(Path::new(spec))
    }
}

fn require(v: Option<usize>, flag: &str) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Input(format!("--cdpc needs {flag}")))
}

fn load_switch(a: &CdpcArgs) -> Result<SwitchSpec, Failure> {
    match (&a.spec, a.cdpc) {
        (Some(path), _) => with_path(path, parse_spec(&read(path)?)),
        (None, true) => {
            let d = require(a.d, "-d")?;
            let n = require(a.n, "-N")?;
            let perms = parse_perms(&a.perms, n)?;
            let control = parse_control(&a.control, perms.len())?;
            Ok(SwitchSpec::cdpc(d, perms, control)?)
        }
        (None, false) => Err(Failure::Input("give either --spec FILE or --cdpc".into())),
    }
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn evaluate(a: &EvaluateArgs, exec: Execution) -> CmdResult {
    let spec = load_switch(&a.switch)?;
    let rho = parse_state(&a.rho, spec.d())?;
    if (a.fast || a.both) && !spec.all_depolarising(TOL) {
        return Err(Failure::Input(
            "the closed-form evaluator needs completely depolarising channels".into(),
        ));
    }
    let fast = || switch_output_fast(spec.d(), spec.perms(), spec.control(), &rho);
    if a.fast {
        return print_json(&OutputJson::from(&fast()?));
    }
    let brute = switch_output_with(&spec, &rho, exec)?;
    let mut report = OutputJson::from(&brute);
    let deviation = if a.both {
        let dev = brute.max_deviation(&fast()?);
        report.max_deviation = Some(dev);
        Some(dev)
    } else {
        None
    };
    print_json(&report)?;
    match deviation {
        Some(dev) if dev >= a.tolerance => Err(Failure::Verification(format!(
            "evaluators differ by {dev:e} (tolerance {:e})",
            a.tolerance
        ))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct ClassifyRow {
    pi: String,
    pi_prime: String,
    kind: TermKind,
    cycle_count: usize,
    coeff_exponent: i32,
    diagram_kind: TermKind,
    diagram_loops: usize,
}

fn classify(a: &ClassifyArgs) -> CmdResult {
    if a.n == 0 || a.n > MAX_CLASSIFY_N {
        return Err(Failure::Input(format!(
            "N must be between 1 and {MAX_CLASSIFY_N}, got {}",
            a.n
        )));
    }
    let perms = parse_perms(&a.perms, a.n)?;
    let mut rows = Vec::with_capacity(perms.len() * perms.len());
    let mut disagreements = 0usize;
    for p in &perms {
        for q in &perms {
            let class = classify_term(p, q)?;
            let dg = build_diagram(p, q)?;
            let diagram_kind = if is_information_transmitting(&dg)? {
                TermKind::IdentityProportional
            } else {
                TermKind::DepolarisingProportional
            };
            let diagram_loops = count_loops(&modify_diagram(&dg)?);
            if diagram_kind != class.kind || diagram_loops != class.cycle_count {
                disagreements += 1;
            }
            rows.push(ClassifyRow {
                pi: p.to_string(),
                pi_prime: q.to_string(),
                kind: class.kind,
                cycle_count: class.cycle_count,
                coeff_exponent: class.coefficient_log_d,
                diagram_kind,
                diagram_loops,
            });
        }
    }
    match a.format {
        Format::Json => print_json(&rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            for row in &rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    if disagreements > 0 {
        return Err(Failure::Verification(format!(
            "{disagreements} pairs where the diagram disagrees with the cycle classification"
        )));
    }
    Ok(())
}

fn search(a: &SearchArgs, exec: Execution) -> CmdResult {
    let report = match (a.sample, a.seed) {
        (Some(samples), Some(seed)) => {
            if a.n > MAX_SAMPLED_N {
                return Err(Failure::Input(format!(
                    "sampled search supports N <= {MAX_SAMPLED_N}"
                )));
            }
            search_sampled(a.n, a.m, a.d, samples, seed, exec)?
        }
        _ => search_best_with(a.n, a.m, a.d, exec)?,
    };
    print_json(&report)?;
    if a.check_cyclic {
        let mut bad = 0usize;
        for mx in &report.maximizers {
            if !pairwise_mutually_cyclic(&mx.perms)? {
                bad += 1;
            }
        }
        if bad > 0 {
            return Err(Failure::Verification(format!(
                "{bad} of {} maximizers contain a pair that is not mutually cyclic",
                report.maximizers.len()
            )));
        }
    }
    Ok(())
}

fn run_verify(a: &VerifyArgs, exec: Execution) -> CmdResult {
    let report = verify::run(&VerifyConfig {
        tolerance: a.tolerance,
        quick: a.quick,
        exec,
        seed: a.seed,
    })?;
    if a.json {
        print_json(&report)?;
    } else {
        println!("{report}");
    }
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(Failure::Verification(names.join(", ")))
    }
}

#[derive(Serialize)]
struct HolevoReport {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    discard_control: bool,
    holevo_bits: f64,
}

fn holevo(a: &HolevoArgs) -> CmdResult {
    let perms = parse_perms(&a.perms, a.n)?;
    let control = parse_control(&a.control, perms.len())?;
    let ensemble = match &a.ensemble {
        Some(path) => with_path(path, parse_ensemble(&read(path)?))?,
        None => Ensemble::uniform(
            (0..a.d)
                .map(|k| DensityMatrix::basis(a.d, k))
                .collect::<qswitch_core::Result<Vec<_>>>()?,
        )?,
    };
    let chi = if a.discard_control {
        holevo_of_protocol_discarding_control(&perms, a.d, &ensemble, &control)?
    } else {
        holevo_of_protocol(&perms, a.d, &ensemble, &control)?
    };
    print_json(&HolevoReport {
        d: a.d,
        n: a.n,
        m: perms.len(),
        discard_control: a.discard_control,
        holevo_bits: chi,
    })
}
