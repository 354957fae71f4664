use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pbl_core::bounds::{compute_bound, verify_dual_certificate, BoundKind, BoundResult, Epsilon, PprtMode};
use pbl_core::io::{canonical, certificate_from_json, certificate_to_json, protocol_from_json, protocol_to_json};
use pbl_core::oracles::{crosscheck_pprt, det_cc, det_query};
use pbl_core::report::{self, emit, Format};
use pbl_core::suite::{run_criterion, SuiteOptions, CRITERIA};
use pbl_core::synth::{check_protocol, run_synth, RandomizedProtocol, SupportEntry};
use pbl_core::{families, Caps, Error, Rational, Relation, Side};

const OK: u8 = 0;
const INFEASIBLE: u8 = 2;
const CAP_EXCEEDED: u8 = 3;
const MALFORMED: u8 = 4;
const VERIFY_FAILED: u8 = 5;

/// Exact partition bounds, dual certificates and protocol synthesis for
/// small relations.
#[derive(Parser)]
#[command(name = "pbl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the partition bound.
    Prt(BoundArgs),
    /// Compute the public-coin partition bound.
    Pprt(BoundArgs),
    /// Optimal pprt witness, truncation, synthesis and exact evaluation.
    Synth(SynthArgs),
    /// Evaluate a protocol file and check pprt at its error against its cost.
    Verify(VerifyArgs),
    /// Check a dual certificate file.
    CheckCert(CheckCertArgs),
    /// Deterministic complexity by exhaustive recursion.
    Oracle(OracleArgs),
    /// Run the acceptance suite.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct Common {
    /// Relation file (JSON).
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    input: Option<PathBuf>,
    /// Built-in relation instead of a file, e.g. `eq:3`, `parity:2`, `random-cc:3x3:2:7`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value = "text")]
    format: Format,
    /// Raise the enumeration caps to their hard limits.
    #[arg(long)]
    allow_large: bool,
    /// Cap override `key=value`; raising needs `--allow-large`.
    #[arg(long = "cap", value_name = "KEY=VALUE")]
    caps: Vec<String>,
}

impl Common {
    fn relation(&self) -> Result<Relation, Error> {
        match (&self.input, &self.family) {
            (Some(path), _) => Relation::load(path).map_err(|e| match e {
                Error::Io(io) => Error::Malformed(format!("cannot read {}: {io}", path.display())),
                other => other,
            }),
            (None, Some(name)) => families::by_name(name),
            (None, None) => Err(Error::Malformed("need --input or --family".into())),
        }
    }

    fn caps(&self) -> Result<Caps, Error> {
        let mut caps = Caps::from_env(self.allow_large)?;
        for item in &self.caps {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Malformed(format!("bad cap setting `{item}`")))?;
            let value = value
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad cap value in `{item}`")))?;
            caps.override_cap(key.trim(), value)?;
        }
        Ok(caps)
    }
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    common: Common,
    /// Error parameter as an exact rational, e.g. `1/8`.
    #[arg(long)]
    eps: Epsilon,
    /// pprt formulation.
    #[arg(long, default_value = "reduced")]
    mode: PprtMode,
    /// Write the dual certificate here.
    #[arg(long)]
    cert_out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    eps: Epsilon,
    /// Write the synthesized protocol here.
    #[arg(long)]
    protocol_out: Option<PathBuf>,
    /// Also run the protocol once per input with public coins from this seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Protocol file (JSON).
    #[arg(long)]
    protocol: PathBuf,
    /// Also require the measured error to be at most this.
    #[arg(long)]
    eps: Option<Epsilon>,
}

#[derive(Args)]
struct CheckCertArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    eps: Epsilon,
    /// Certificate file (JSON).
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Also cross-check both pprt formulations at this error.
    #[arg(long)]
    eps: Option<Epsilon>,
    /// Write the optimal deterministic protocol here.
    #[arg(long)]
    protocol_out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Also attempt the 4x4 cc pipeline.
    #[arg(long)]
    allow_large: bool,
    /// Run only these criteria.
    #[arg(long, value_name = "N")]
    only: Vec<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => INFEASIBLE,
        Error::CapExceeded { .. } => CAP_EXCEEDED,
        Error::BudgetExceeded { .. } | Error::AllMassDropped => VERIFY_FAILED,
        _ => MALFORMED,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Malformed(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))
}

fn bound(args: BoundArgs, kind: BoundKind) -> Result<u8, Error> {
    let relation = args.common.relation()?;
    let caps = args.common.caps()?;
    let report = compute_bound(&relation, &args.eps, kind, args.mode, &caps)?;
    print!("{}", emit(args.common.format, || report::bound_text(&report), || report::bound_json(&report)));
    match &report.result {
        BoundResult::Optimal(v) => {
            if let Some(path) = &args.cert_out {
                write_file(path, &canonical(&certificate_to_json(&v.certificate, &relation, &caps)?))?;
            }
            Ok(if v.duality_checked { OK } else { VERIFY_FAILED })
        }
        BoundResult::Infeasible { .. } => Ok(INFEASIBLE),
    }
}

fn synth(args: SynthArgs) -> Result<u8, Error> {
    let relation = args.common.relation()?;
    let caps = args.common.caps()?;
    let rep = run_synth(&relation, &args.eps, &caps)?;
    print!(
        "{}",
        emit(args.common.format, || report::synth_text(&rep, &relation), || report::synth_json(&rep, &relation))
    );
    if let (Some(seed), Format::Text) = (args.seed, args.common.format) {
        let shape = relation.shape();
        let runs: Vec<String> = (0..relation.input_count())
            .map(|i| {
                let z = rep.protocol.run(i, seed.wrapping_add(i as u64));
                format!("{} -> {}", shape.input_name(i), relation.outputs()[z])
            })
            .collect();
        println!("sampled run (seed {seed}): {}", runs.join(", "));
    }
    if let Some(path) = &args.protocol_out {
        write_file(path, &canonical(&protocol_to_json(&rep.protocol)))?;
    }
    let ok = rep.delta_within_eps() && rep.error_within_twice_eps() && rep.within_budget();
    Ok(if ok { OK } else { VERIFY_FAILED })
}

fn verify(args: VerifyArgs) -> Result<u8, Error> {
    let relation = args.common.relation()?;
    let caps = args.common.caps()?;
    let protocol = protocol_from_json(&read_file(&args.protocol)?, &relation)?;
    let check = check_protocol(&protocol, &relation, &caps)?;
    print!(
        "{}",
        emit(
            args.common.format,
            || report::protocol_check_text(&check, &relation),
            || report::protocol_check_json(&check, &relation)
        )
    );
    let within = args.eps.as_ref().is_none_or(|e| check.evaluation.worst_error <= *e.value());
    if !within && args.common.format == Format::Text {
        println!("measured error exceeds the requested eps");
    }
    Ok(if check.pass() && within { OK } else { VERIFY_FAILED })
}

fn check_cert(args: CheckCertArgs) -> Result<u8, Error> {
    let relation = args.common.relation()?;
    let caps = args.common.caps()?;
    let cert = certificate_from_json(&read_file(&args.cert)?, &relation, &caps)?;
    let verdict = verify_dual_certificate(&relation, &args.eps, &cert, &caps)?;
    print!(
        "{}",
        emit(args.common.format, || report::verdict_text(&verdict), || report::verdict_json(&verdict, &relation))
    );
    Ok(if verdict.accepted { OK } else { VERIFY_FAILED })
}

fn oracle(args: OracleArgs) -> Result<u8, Error> {
    let relation = args.common.relation()?;
    let caps = args.common.caps()?;
    let value = match relation.side() {
        Side::Cc => det_cc(&relation, &caps)?,
        Side::Query => det_query(&relation, &caps)?,
    };
    let cross = args.eps.as_ref().map(|e| crosscheck_pprt(&relation, e, &caps)).transpose()?;
    print!(
        "{}",
        emit(
            args.common.format,
            || report::oracle_text(&value, cross.as_ref()),
            || report::oracle_json(&value, cross.as_ref())
        )
    );
    if let Some(path) = &args.protocol_out {
        let shape = relation.shape();
        let entry = SupportEntry { prob: Rational::one(), partition: value.witness.to_partition(shape)?, tree: value.witness.clone() };
        let protocol = RandomizedProtocol { shape, support: vec![entry] };
        write_file(path, &canonical(&protocol_to_json(&protocol)))?;
    }
    Ok(if cross.is_none_or(|c| c.pass()) { OK } else { VERIFY_FAILED })
}

fn suite(args: SuiteArgs) -> Result<u8, Error> {
    let ids: Vec<usize> = if args.only.is_empty() { (1..=CRITERIA.len()).collect() } else { args.only };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA.len()) {
        return Err(Error::Malformed(format!("no criterion {bad}")));
    }
    let mut all = true;
    for id in ids {
        let result = run_criterion(id, SuiteOptions { large: args.allow_large });
        println!("{result}");
        all &= result.pass;
    }
    Ok(if all { OK } else { VERIFY_FAILED })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { MALFORMED } else { OK });
        }
    };
    let outcome = match cli.command {
        Command::Prt(a) => bound(a, BoundKind::Prt),
        Command::Pprt(a) => bound(a, BoundKind::Pprt),
        Command::Synth(a) => synth(a),
        Command::Verify(a) => verify(a),
        Command::CheckCert(a) => check_cert(a),
        Command::Oracle(a) => oracle(a),
        Command::Suite(a) => suite(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
