//! Command-line interface for the carsep toolkit.
//!
//! Subcommands:
//!   verify           run the invariant suite, print a pass/fail table
//!   analyze          full report for one state and partition
//!   sweep            tabulate the hopping family over a lambda grid
//!   inequality-scan  sample random states and check the roof inequalities
//!
//! Exit codes: 0 success, 1 a check or verdict failed, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use carsep::entanglement::{
    eof_averaged, eof_superselected, eof_tensor, RoofOptions, Side,
};
use carsep::report::{sig, RoofDoc, VerdictDoc, WitnessDoc};
use carsep::separability::{
    car_separability, hopping_witness, ppt_check, Verdict,
};
use carsep::specdoc::StateSpecDoc;
use carsep::state::{marginal_entropies, QuantumState};
use carsep::{named, random, verify, Partition};

const SEED_ENV: &str = "CARSEP_SEED";

#[derive(Parser)]
#[command(name = "carsep", version, about = "Bipartite fermion separability toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full invariant suite and print one line per check.
    Verify(VerifyArgs),
    /// Analyze one state: restrictions, entropies, witnesses, verdicts,
    /// and roof values with certificates.
    Analyze(AnalyzeArgs),
    /// Tabulate witness, roof, and transpose data over a parameter grid.
    Sweep(SweepArgs),
    /// Sample random states and check the roof inequalities numerically.
    InequalityScan(ScanArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Master seed for the randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Machine-readable results file.
    #[arg(long, default_value = "carsep-verify.json")]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Path to a state-spec JSON document, or a named state such as
    /// `tracial`, `psi_plus`, `rho_one`, `varrho_asym`, or
    /// `phi_lambda:lambda=0.5,k1=a1,k2=a2`.
    spec: String,
    /// Partition as `I:J` with comma-separated mode labels, e.g. `1:2` or
    /// `1,2:3,4`. Defaults to the first half of the modes against the rest.
    #[arg(long)]
    partition: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Roof optimizer restarts.
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Machine-readable report file.
    #[arg(long, default_value = "carsep-analysis.json")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Family to sweep; `phi-lambda` is the available family.
    family: String,
    #[arg(long, default_value_t = -1.0)]
    from: f64,
    #[arg(long, default_value_t = 1.0)]
    to: f64,
    #[arg(long, default_value_t = 21)]
    steps: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// CSV output file.
    #[arg(long, default_value = "carsep-sweep.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 40)]
    trials: usize,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Machine-readable report file.
    #[arg(long, default_value = "carsep-inequality.json")]
    out: PathBuf,
}

fn default_seed(cli: Option<u64>) -> u64 {
    cli.or_else(|| {
        std::env::var(SEED_ENV)
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
    })
    .unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::InequalityScan(args) => cmd_scan(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let seed = default_seed(args.seed);
    println!("carsep verify (seed {seed})");
    println!("{:-<78}", "");
    let results = verify::run_all(seed);
    let mut failed = 0usize;
    for r in &results {
        println!(
            "{}  {:<40} {:>7} ms  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.millis,
            r.detail
        );
        if !r.passed {
            failed += 1;
        }
    }
    println!("{:-<78}", "");
    println!("{} checks, {failed} failed", results.len());
    write_file(&args.out, &serde_json::to_string_pretty(&results)?)?;
    println!("results written to {}", args.out.display());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn parse_named_shorthand(spec: &str) -> anyhow::Result<StateSpecDoc> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let mut doc = StateSpecDoc::named(name, vec![1, 2]);
    if let Some(params) = params {
        let mut map = serde_json::Map::new();
        for pair in params.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| anyhow::anyhow!("malformed parameter '{pair}', expected key=value"))?;
            let value = match value.parse::<f64>() {
                Ok(x) => serde_json::json!(x),
                Err(_) => serde_json::json!(value),
            };
            map.insert(key.to_string(), value);
        }
        doc.parameters = Some(map);
    }
    Ok(doc)
}

fn load_spec(spec: &str) -> anyhow::Result<StateSpecDoc> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec)?;
        Ok(StateSpecDoc::from_json(&text)?)
    } else {
        parse_named_shorthand(spec)
    }
}

fn parse_partition(arg: Option<&str>, modes: &[u32]) -> anyhow::Result<(Vec<u32>, Vec<u32>)> {
    match arg {
        None => {
            let half = modes.len().div_ceil(2);
            Ok((modes[..half].to_vec(), modes[half..].to_vec()))
        }
        Some(s) => {
            let (i, j) = s
                .split_once(':')
                .ok_or_else(|| anyhow::anyhow!("partition must look like I:J, e.g. 1:2"))?;
            let parse_side = |side: &str| -> anyhow::Result<Vec<u32>> {
                side.split(',')
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.trim()
                            .parse::<u32>()
                            .map_err(|_| anyhow::anyhow!("bad mode label '{t}'"))
                    })
                    .collect()
            };
            Ok((parse_side(i)?, parse_side(j)?))
        }
    }
}

#[derive(Serialize)]
struct EntropyDoc {
    on_i: f64,
    on_j: f64,
    on_commutant_i: f64,
    on_commutant_j: f64,
}

type MatrixDoc = Vec<Vec<(f64, f64)>>;

fn matrix_doc(m: &carsep::linalg::CMat) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
        .collect()
}

fn print_matrix(label: &str, m: &carsep::linalg::CMat) {
    println!("{label}");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:+.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        println!("    [{}]", row.join(", "));
    }
}

#[derive(Serialize)]
struct AnalysisReport {
    spec: StateSpecDoc,
    partition_i: Vec<u32>,
    partition_j: Vec<u32>,
    seed: u64,
    even: bool,
    pure: bool,
    restriction_i: MatrixDoc,
    restriction_j: MatrixDoc,
    entropies: EntropyDoc,
    witness: WitnessDoc,
    ppt: VerdictDoc,
    car: VerdictDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    roof_superselected: Option<RoofDoc>,
    roof_averaged: RoofDoc,
    roof_tensor_i: RoofDoc,
    roof_tensor_j: RoofDoc,
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<ExitCode> {
    let seed = default_seed(args.seed);
    let doc = load_spec(&args.spec)?;
    let (_, state) = doc.resolve()?;
    let modes = doc.modes.clone();
    let (i_labels, j_labels) = parse_partition(args.partition.as_deref(), &modes)?;

    // The partition must exhaust the document's modes.
    let mut combined = i_labels.clone();
    combined.extend_from_slice(&j_labels);
    let mut sorted_combined = combined.clone();
    sorted_combined.sort_unstable();
    let mut sorted_modes = modes.clone();
    sorted_modes.sort_unstable();
    if sorted_combined != sorted_modes || combined.len() != modes.len() {
        anyhow::bail!(
            "unsatisfiable partition: {i_labels:?} / {j_labels:?} does not split modes {modes:?}"
        );
    }

    let partition = Partition::new(&i_labels, &j_labels)?;
    // Reorder the state onto the partition's mode order if needed.
    let state = if combined == modes {
        QuantumState::from_density(partition.ambient(), state.density().clone())?
    } else {
        let reordered = state.restrict(&combined)?;
        QuantumState::from_density(partition.ambient(), reordered.density().clone())?
    };

    let opts = RoofOptions {
        restarts: args.restarts,
        seed,
        ..RoofOptions::default()
    };

    let restriction_i = state.restrict_with(partition.basis_i())?;
    let restriction_j = state.restrict_with(partition.basis_j())?;
    let entropies = marginal_entropies(&state, &partition)?;
    let witness = hopping_witness(&state, &partition)?;
    let ppt = ppt_check(&state, &partition)?;
    let car = car_separability(&state, &partition, &opts)?;
    let superselected = if state.is_even() {
        Some(eof_superselected(&state, &partition, &opts)?)
    } else {
        None
    };
    let averaged = eof_averaged(&state, &partition, &opts)?;
    let tensor_i = eof_tensor(&state, &partition, Side::I, &opts)?;
    let tensor_j = eof_tensor(&state, &partition, Side::J, &opts)?;

    println!("state: {}  (modes {:?})", args.spec, modes);
    println!(
        "partition: I = {:?}, J = {:?}   seed {}",
        i_labels, j_labels, seed
    );
    println!("even: {}   pure: {}", state.is_even(), state.is_pure());
    println!();
    print_matrix("restriction to I (density):", restriction_i.density());
    print_matrix("restriction to J (density):", restriction_j.density());
    println!();
    println!("marginal entropies (nats)");
    println!("  on I            {}", sig(entropies.on_i));
    println!("  on J            {}", sig(entropies.on_j));
    println!("  on commutant(I) {}", sig(entropies.on_commutant_i));
    println!("  on commutant(J) {}", sig(entropies.on_commutant_j));
    println!();
    println!(
        "hopping witness: max violation {} ({})",
        sig(witness.max_violation),
        if witness.nonseparable {
            "CAR-nonseparable"
        } else {
            "inconclusive"
        }
    );
    println!("  left  = {}", witness.left_expr);
    println!("  right = {}", witness.right_expr);
    println!();
    let ppt_doc = VerdictDoc::from_verdict(&ppt);
    println!(
        "tensor pairing (PPT): {}  min transpose eigenvalue {}",
        ppt_doc.verdict,
        sig(ppt_doc.ppt_min_eigenvalue.unwrap_or(f64::NAN))
    );
    let car_doc = VerdictDoc::from_verdict(&car);
    match (&car.verdict, car_doc.certificate_components) {
        (Verdict::Separable, Some(n)) => {
            println!("CAR pairing: separable (certificate with {n} product components)")
        }
        (Verdict::Nonseparable, _) => println!("CAR pairing: nonseparable (witness certificate)"),
        _ => println!(
            "CAR pairing: inconclusive (roof upper bound {})",
            sig(car_doc.roof_upper_bound.unwrap_or(f64::NAN))
        ),
    }
    println!();
    println!("entanglement roofs (nats, upper bounds)");
    if let Some(sup) = &superselected {
        println!(
            "  superselected E^T  {}  converged {}",
            sig(sup.value),
            sup.converged
        );
    } else {
        println!("  superselected E^T  undefined for noneven states");
    }
    println!(
        "  averaged      E    {}  converged {}",
        sig(averaged.value),
        averaged.converged
    );
    println!("  tensor side I      {}", sig(tensor_i.value));
    println!("  tensor side J      {}", sig(tensor_j.value));

    let report = AnalysisReport {
        spec: doc,
        partition_i: i_labels,
        partition_j: j_labels,
        seed,
        even: state.is_even(),
        pure: state.is_pure(),
        restriction_i: matrix_doc(restriction_i.density()),
        restriction_j: matrix_doc(restriction_j.density()),
        entropies: EntropyDoc {
            on_i: entropies.on_i,
            on_j: entropies.on_j,
            on_commutant_i: entropies.on_commutant_i,
            on_commutant_j: entropies.on_commutant_j,
        },
        witness: WitnessDoc::from_report(&witness),
        ppt: ppt_doc,
        car: car_doc,
        roof_superselected: superselected.as_ref().map(RoofDoc::from_result),
        roof_averaged: RoofDoc::from_result(&averaged),
        roof_tensor_i: RoofDoc::from_result(&tensor_i),
        roof_tensor_j: RoofDoc::from_result(&tensor_j),
    };
    write_file(&args.out, &serde_json::to_string_pretty(&report)?)?;
    println!();
    println!("report written to {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<ExitCode> {
    if args.family != "phi-lambda" {
        anyhow::bail!("unknown sweep family '{}'; available: phi-lambda", args.family);
    }
    if args.steps < 2 {
        anyhow::bail!("steps must be at least 2");
    }
    let seed = default_seed(args.seed);
    let partition = named::default_partition();
    let opts = RoofOptions {
        restarts: args.restarts,
        seed,
        ..RoofOptions::default()
    };

    println!(
        "{:>8}  {:>18}  {:>18}  {:>18}  {:>18}  {:>18}  {}",
        "lambda", "witness", "E^T", "E^avr", "E_I", "E_J", "ppt"
    );
    let mut csv = String::from("lambda,witness,e_superselected,e_averaged,e_tensor_i,e_tensor_j,ppt\n");
    for step in 0..args.steps {
        let t = step as f64 / (args.steps - 1) as f64;
        let lambda = args.from + t * (args.to - args.from);
        let st = named::phi_lambda(&partition, &named::PhiLambdaSpec::new(lambda))?;
        let witness = hopping_witness(&st, &partition)?;
        let sup = eof_superselected(&st, &partition, &opts)?;
        let avr = eof_averaged(&st, &partition, &opts)?;
        let ei = eof_tensor(&st, &partition, Side::I, &opts)?;
        let ej = eof_tensor(&st, &partition, Side::J, &opts)?;
        let ppt = ppt_check(&st, &partition)?;
        let ppt_str = match ppt.verdict {
            Verdict::Separable => "separable",
            Verdict::Nonseparable => "nonseparable",
            Verdict::Inconclusive => "inconclusive",
        };
        println!(
            "{lambda:>8.4}  {:>18}  {:>18}  {:>18}  {:>18}  {:>18}  {ppt_str}",
            sig(witness.max_violation),
            sig(sup.value),
            sig(avr.value),
            sig(ei.value),
            sig(ej.value)
        );
        csv.push_str(&format!(
            "{lambda:.6},{},{},{},{},{},{ppt_str}\n",
            sig(witness.max_violation),
            sig(sup.value),
            sig(avr.value),
            sig(ei.value),
            sig(ej.value)
        ));
    }
    write_file(&args.out, &csv)?;
    println!("table written to {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// inequality-scan
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ScanReport {
    seed: u64,
    trials: usize,
    tolerance: f64,
    violations: usize,
    min_gap_superselected_vs_averaged: f64,
    note: String,
}

fn cmd_scan(args: ScanArgs) -> anyhow::Result<ExitCode> {
    let seed = default_seed(args.seed);
    let partition = named::default_partition();
    let algebra = partition.ambient().clone();
    let tolerance = 2e-3;
    let opts = RoofOptions {
        restarts: args.restarts,
        seed,
        ..RoofOptions::default()
    };

    let mut violations = 0usize;
    let mut min_gap = f64::INFINITY;
    println!(
        "sampling {} random states at one mode per side (seed {seed})",
        args.trials
    );
    for trial in 0..args.trials {
        let mut rng = random::rng_from_seed(random::stream_seed(seed, trial as u64));
        let even_trial = trial % 2 == 0;
        let rho = if even_trial {
            random::even_density(&algebra, &mut rng)
        } else {
            random::density(&mut rng, algebra.dim(), algebra.dim())
        };
        let st = QuantumState::from_density(&algebra, rho)?;
        let avr = eof_averaged(&st, &partition, &opts)?.value;
        let ei = eof_tensor(&st, &partition, Side::I, &opts)?.value;
        let ej = eof_tensor(&st, &partition, Side::J, &opts)?.value;
        let mut bad = avr + tolerance < 0.5 * (ei + ej);
        if even_trial {
            let sup = eof_superselected(&st, &partition, &opts)?.value;
            bad |= sup + tolerance < avr;
            bad |= sup + tolerance < ei.max(ej);
            min_gap = min_gap.min(sup - avr);
        }
        if bad {
            violations += 1;
            println!("  trial {trial}: inequality violated beyond tolerance");
        }
    }
    println!(
        "minimal observed gap between the superselected and averaged roofs: {}",
        sig(min_gap)
    );
    let note = "all quantities are optimizer upper bounds; a small or zero gap does not \
                decide whether the superselected roof can strictly exceed the averaged one"
        .to_string();
    println!("note: {note}");
    println!("violations: {violations}");

    let report = ScanReport {
        seed,
        trials: args.trials,
        tolerance,
        violations,
        min_gap_superselected_vs_averaged: min_gap,
        note,
    };
    write_file(&args.out, &serde_json::to_string_pretty(&report)?)?;
    println!("report written to {}", args.out.display());
    Ok(if violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
