//! `bcubic`: generate, check and analyse bit streams from exact cubic orbits.
//!
//! Exit status: 0 on success or pass, 1 when an analysis fails, 2 on usage,
//! input or I/O errors.

mod formats;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bernoulli_cubic::mt::recurrence::{format_matrix_file, LAG_SHORT};
use bernoulli_cubic::mt::{
    lag_pair_uniformity, lag_pairs_csv, load_recurrence_matrices, match_count_model, mt_outputs, recover_matrices,
    scan_conditions_ab, verify_recurrence, RecurrenceCheck, DEFAULT_SEED,
};
use bernoulli_cubic::seeds::SeedSetRecord;
use bernoulli_cubic::stats::{run_suite, DEFAULT_ALPHA};
use bernoulli_cubic::{
    build_seed_set, field_distinctness_check, gap_report, isolate_root_bits, merger_audit, words_from_le_bytes,
    BitStream, CoeffTriple, GenerateOptions, OrbitState,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use formats::{decode, encode, OutputFormat};

#[derive(Debug)]
enum Failure {
    /// Bad input, bad flags or I/O trouble.
    Usage(String),
    /// The command ran and the check it performs did not hold.
    Analytic(String),
}

impl From<bernoulli_cubic::Error> for Failure {
    fn from(e: bernoulli_cubic::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", path.display()))
}

#[derive(Parser)]
#[command(name = "bcubic", version, about = "Pseudorandom bits from exact cubic-irrational orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit bits from one seed, or from a whole seed set.
    Generate(GenerateArgs),
    /// Build a seed set and optionally report gaps, mergers and fields.
    Seeds(SeedsArgs),
    /// MT19937 output and its linear recurrence.
    Mt {
        #[command(subcommand)]
        command: MtCommand,
    },
    /// Run the statistical test battery on a bit file.
    Stats(StatsArgs),
    /// Compare the generator against root bisection.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct TripleArgs {
    #[arg(long, allow_hyphen_values = true)]
    b: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<i64>,
}

impl TripleArgs {
    fn triple(&self) -> Result<CoeffTriple, Failure> {
        match (self.b, self.c, self.d) {
            (Some(b), Some(c), Some(d)) => Ok(CoeffTriple::new(b, c, d)?),
            _ => Err(Failure::Usage("--b, --c and --d are all required".into())),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    triple: TripleArgs,
    /// Number of bits to emit (single-seed mode).
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, value_enum, default_value = "raw")]
    format: OutputFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continue from a checkpoint instead of a seed.
    #[arg(long, conflicts_with = "seed_set")]
    resume: Option<PathBuf>,
    /// Write the final orbit state here.
    #[arg(long, conflicts_with = "seed_set")]
    checkpoint: Option<PathBuf>,
    /// Run every member of the seed set `b,c` and concatenate in descending-d order.
    #[arg(long, value_name = "B,C", allow_hyphen_values = true)]
    seed_set: Option<String>,
    /// Bits generated per member in seed-set mode.
    #[arg(long, requires = "seed_set")]
    per_seed_bits: Option<usize>,
    /// Bits discarded from the front of each member's output.
    #[arg(long, default_value_t = 0, requires = "seed_set")]
    drop_prefix_bits: usize,
    /// Abort if a coefficient grows beyond this many bits.
    #[arg(long)]
    max_coeff_bits: Option<u64>,
}

#[derive(Args)]
struct SeedsArgs {
    #[arg(long, allow_hyphen_values = true)]
    b: i64,
    #[arg(long)]
    c: i64,
    /// Attach the gap report.
    #[arg(long)]
    gaps: bool,
    /// Root precision in bits for the gap report.
    #[arg(long, default_value_t = 64)]
    precision: u32,
    /// Run the merger audit for this many steps.
    #[arg(long, value_name = "H")]
    audit_mergers: Option<usize>,
    /// Run the field distinctness check with this trial-division bound.
    #[arg(long, value_name = "BOUND")]
    distinctness: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MtCommand {
    /// Emit MT19937 outputs.
    Gen(MtGenArgs),
    /// Check the output recurrence against the bundled matrices.
    Verify(MtSourceArgs),
    /// Rederive the recurrence matrices from outputs.
    Recover(MtSourceArgs),
    /// List lag pairs at indices meeting the zero-row conditions.
    Scan(MtScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WordFormat {
    /// One decimal word per line.
    Text,
    /// Little-endian 32-bit binary.
    Words32le,
}

#[derive(Args)]
struct MtGenArgs {
    #[arg(long, default_value_t = 624)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: WordFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MtSourceArgs {
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u32,
    /// Read little-endian words from this file instead of running MT19937.
    #[arg(long = "in")]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    Mt,
    File,
}

#[derive(Args)]
struct MtScanArgs {
    #[arg(long, default_value_t = 312_500)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u32,
    #[arg(long, value_enum, default_value = "mt")]
    source: Source,
    /// Little-endian word file for `--source file`.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "raw")]
    format: OutputFormat,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    triple: TripleArgs,
    #[arg(long, default_value_t = 256)]
    bits: usize,
    /// Start the generator from this checkpoint, taken along the seed's orbit.
    #[arg(long)]
    state: Option<PathBuf>,
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => fs::write(p, bytes).map_err(io_err(p)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Usage(format!("stdout: {e}")))
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(io_err(path))
}

fn parse_pair(text: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("expected B,C, got {text:?}"));
    let (b, c) = text.split_once(',').ok_or_else(bad)?;
    Ok((b.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

fn cmd_generate(args: &GenerateArgs) -> CliResult {
    let opts = GenerateOptions {
        max_coeff_bits: args.max_coeff_bits,
        ..GenerateOptions::default()
    };
    let bits = if let Some(pair) = &args.seed_set {
        let (b, c) = parse_pair(pair)?;
        let per_seed = args
            .per_seed_bits
            .ok_or_else(|| Failure::Usage("--per-seed-bits is required with --seed-set".into()))?;
        if args.drop_prefix_bits > per_seed {
            return Err(Failure::Usage("--drop-prefix-bits exceeds --per-seed-bits".into()));
        }
        let set = build_seed_set(b, c)?;
        let parts = set
            .members
            .par_iter()
            .map(|m| {
                let mut state = OrbitState::new(m.triple.clone());
                let mut s = BitStream::with_capacity(per_seed);
                state.advance(per_seed, &opts, &mut s)?;
                Ok(s.skip(args.drop_prefix_bits))
            })
            .collect::<Result<Vec<_>, bernoulli_cubic::Error>>()?;
        let mut all = BitStream::with_capacity(parts.iter().map(BitStream::len).sum());
        for p in &parts {
            all.extend_from(p);
        }
        all
    } else {
        let n = args
            .bits
            .ok_or_else(|| Failure::Usage("--bits is required".into()))?;
        let mut state = match &args.resume {
            Some(path) => {
                let text = String::from_utf8(read_file(path)?).map_err(|e| Failure::Usage(e.to_string()))?;
                OrbitState::from_record(&text)?
            }
            None => OrbitState::new(args.triple.triple()?),
        };
        let mut s = BitStream::with_capacity(n);
        state.advance(n, &opts, &mut s)?;
        if let Some(path) = &args.checkpoint {
            fs::write(path, state.to_record()).map_err(io_err(path))?;
        }
        s
    };
    write_output(args.out.as_deref(), &encode(&bits, args.format))
}

fn cmd_seeds(args: &SeedsArgs) -> CliResult {
    let set = build_seed_set(args.b, args.c)?;
    let mut record = SeedSetRecord::new(&set);
    if args.gaps {
        let report = gap_report(&set, args.precision)?;
        record = record.with_gaps(&set, &report);
    }
    if let Some(h) = args.audit_mergers {
        record = record.with_audit(merger_audit(set.triples(), h)?);
    }
    if let Some(bound) = args.distinctness {
        let triples: Vec<CoeffTriple> = set.triples().cloned().collect();
        let report = field_distinctness_check(&triples, bound)?;
        record = record.with_distinctness(&set, bound, &report);
    }
    let mut json = serde_json::to_vec_pretty(&record).expect("serializable");
    json.push(b'\n');
    write_output(args.out.as_deref(), &json)
}

fn load_words(count: usize, seed: u32, input: Option<&Path>) -> Result<Vec<u32>, Failure> {
    match input {
        Some(path) => Ok(words_from_le_bytes(&read_file(path)?)?),
        None => Ok(mt_outputs(seed, count)),
    }
}

#[derive(Serialize)]
struct RecoverReport {
    outputs_used: usize,
    matches_bundled: bool,
    differing_entries_a: u32,
    differing_entries_b: u32,
    a: Vec<String>,
    b: Vec<String>,
}

#[derive(Serialize)]
struct ScanSummary {
    words: usize,
    matches: usize,
    on_diagonal: usize,
    expected_matches: f64,
    sd: f64,
    chi_square: Option<f64>,
    p_value: Option<f64>,
}

fn cmd_mt(command: &MtCommand) -> CliResult {
    match command {
        MtCommand::Gen(args) => {
            let words = mt_outputs(args.seed, args.count);
            let bytes = match args.format {
                WordFormat::Text => words.iter().map(|w| format!("{w}\n")).collect::<String>().into_bytes(),
                WordFormat::Words32le => bernoulli_cubic::words_to_le_bytes(&words),
            };
            write_output(args.out.as_deref(), &bytes)
        }
        MtCommand::Verify(args) => {
            let words = load_words(args.count, args.seed, args.input.as_deref())?;
            let (a, b) = load_recurrence_matrices()?;
            match verify_recurrence(&words, &a, &b)? {
                RecurrenceCheck::Pass { checked } => {
                    println!("pass: recurrence holds for {checked} outputs");
                    Ok(())
                }
                RecurrenceCheck::Fail {
                    index,
                    expected,
                    actual,
                } => Err(Failure::Analytic(format!(
                    "recurrence fails at n = {index}: predicted {expected}, found {actual}"
                ))),
            }
        }
        MtCommand::Recover(args) => {
            let words = load_words(args.count, args.seed, args.input.as_deref())?;
            let (a, b) = recover_matrices(&words)?;
            let (ref_a, ref_b) = load_recurrence_matrices()?;
            let report = RecoverReport {
                outputs_used: words.len(),
                matches_bundled: a == ref_a && b == ref_b,
                differing_entries_a: a.hamming(&ref_a),
                differing_entries_b: b.hamming(&ref_b),
                a: a.to_row_strings(),
                b: b.to_row_strings(),
            };
            let mut json = serde_json::to_vec_pretty(&report).expect("serializable");
            json.push(b'\n');
            write_output(None, &json)?;
            if report.matches_bundled {
                Ok(())
            } else {
                eprint!("recovered A:\n{}", format_matrix_file(&a));
                Err(Failure::Analytic("recovered matrices differ from the bundled data".into()))
            }
        }
        MtCommand::Scan(args) => {
            let words = match args.source {
                Source::Mt => mt_outputs(args.seed, args.count),
                Source::File => {
                    let path = args
                        .input
                        .as_deref()
                        .ok_or_else(|| Failure::Usage("--source file needs --in".into()))?;
                    words_from_le_bytes(&read_file(path)?)?
                }
            };
            let (a, b) = load_recurrence_matrices()?;
            let pairs = scan_conditions_ab(&words, &a, &b)?;
            write_output(args.out.as_deref(), lag_pairs_csv(&pairs).as_bytes())?;
            let (expected, sd) = match_count_model(words.len());
            let uniform = lag_pair_uniformity(&pairs, 4).ok();
            let summary = ScanSummary {
                words: words.len(),
                matches: pairs.len(),
                on_diagonal: pairs.iter().filter(|p| p.on_diagonal()).count(),
                expected_matches: expected,
                sd,
                chi_square: uniform.map(|u| u.0),
                p_value: uniform.map(|u| u.1),
            };
            eprintln!(
                "lag {LAG_SHORT} scan: {}",
                serde_json::to_string(&summary).expect("serializable")
            );
            Ok(())
        }
    }
}

fn cmd_stats(args: &StatsArgs) -> CliResult {
    let bits = decode(&read_file(&args.input)?, args.format)?;
    let report = run_suite(&bits, args.alpha)?;
    let mut json = serde_json::to_vec_pretty(&report).expect("serializable");
    json.push(b'\n');
    write_output(args.out.as_deref(), &json)?;
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.tests.iter().filter(|t| !t.passed).map(|t| t.name.as_str()).collect();
        Err(Failure::Analytic(format!("failed: {}", failed.join(", "))))
    }
}

fn cmd_verify(args: &VerifyArgs) -> CliResult {
    let seed = args.triple.triple()?;
    let mut state = match &args.state {
        Some(path) => {
            let text = String::from_utf8(read_file(path)?).map_err(|e| Failure::Usage(e.to_string()))?;
            OrbitState::from_record(&text)?
        }
        None => OrbitState::new(seed.clone()),
    };
    let offset = usize::try_from(state.step_index()).map_err(|_| Failure::Usage("step index too large".into()))?;
    let mut generated = BitStream::with_capacity(args.bits);
    state.advance(args.bits, &GenerateOptions::default(), &mut generated)?;
    let (oracle, _) = isolate_root_bits(&seed, offset + args.bits)?;
    let oracle = oracle.skip(offset);
    let first_mismatch = generated.iter().zip(oracle.iter()).position(|(g, o)| g != o);
    match first_mismatch {
        None => {
            println!("pass: {} bits from step {offset} agree with root bisection", args.bits);
            Ok(())
        }
        Some(i) => Err(Failure::Analytic(format!(
            "mismatch at bit index {}: generator {}, bisection {}",
            offset + i,
            u8::from(generated.get(i).unwrap()),
            u8::from(oracle.get(i).unwrap())
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Seeds(a) => cmd_seeds(a),
        Command::Mt { command } => cmd_mt(command),
        Command::Stats(a) => cmd_stats(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Analytic(msg)) => {
            eprintln!("fail: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
