use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use rootsplit::codec::{decode_key_file, decode_share_file, encode_key_file, encode_share_file};
use rootsplit::composite::{self, CompositeKey};
use rootsplit::partition::coefficient_space_lower_bound;
use rootsplit::pipeline::{self, JoinOutput, PipelineError, SplitPlan, SplitScheme};
use rootsplit::simnet::{parse_scenario, run_scenario, ScenarioError};
use rootsplit::{ExpansionMode, Modulus};

const EXIT_OPERATIONAL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNRECOVERABLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rootsplit",
    version,
    about = "Split data into polynomial-root shares and put it back together"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Structured,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Split a file (or one residue with --datum) into share files.
    Split {
        /// File to split.
        #[arg(required_unless_present = "datum", conflicts_with = "datum")]
        input: Option<PathBuf>,
        /// Shares needed to rebuild.
        #[arg(short)]
        k: usize,
        /// Total shares to write; any k of them rebuild the data.
        #[arg(short)]
        n: Option<u16>,
        /// Expansion matrix for -n.
        #[arg(long, value_enum, requires = "n")]
        mode: Option<Mode>,
        /// Directory for the .rsh files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Seed the random generator for reproducible output.
        #[arg(long)]
        seed: Option<u64>,
        /// Prime modulus in hex instead of 2^255 - 19.
        #[arg(long, value_name = "HEX")]
        prime_hex: Option<String>,
        /// Split this single residue instead of a file (small-prime demos).
        #[arg(long, value_name = "DECIMAL")]
        datum: Option<String>,
        /// Split d^y mod n under a composite key; needs --key.
        #[arg(long, requires = "key", conflicts_with_all = ["n", "prime_hex"])]
        composite: bool,
        /// Key file written by `keygen`.
        #[arg(long)]
        key: Option<PathBuf>,
    },
    /// Rebuild data from share files.
    Join {
        #[arg(required = true)]
        shares: Vec<PathBuf>,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Composite key; without it only the ciphertext comes back.
        #[arg(long)]
        key: Option<PathBuf>,
    },
    /// Generate a composite key file.
    Keygen {
        #[arg(long, default_value_t = 2048)]
        bits: u64,
        /// Public exponent.
        #[arg(long, default_value = "65537")]
        y: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Replay a network scenario and report.
    Simulate { scenario: PathBuf },
    /// Size of the coefficient search space for modulus p and k roots.
    Bound {
        /// Decimal, or hex with a 0x prefix.
        p: String,
        k: u32,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn operational(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_OPERATIONAL,
        message: message.to_string(),
    }
}

fn io_failure(path: &Path, err: std::io::Error) -> Failure {
    operational(format!("{}: {err}", path.display()))
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io_failure(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn parse_uint(text: &str, what: &str) -> Result<BigUint, Failure> {
    let parsed = match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => BigUint::parse_bytes(hex.as_bytes(), 16),
        None => BigUint::parse_bytes(text.as_bytes(), 10),
    };
    parsed.ok_or_else(|| usage(format!("{what} `{text}` is not a non-negative integer")))
}

fn load_key(path: &Path) -> Result<CompositeKey, Failure> {
    decode_key_file(&read(path)?).map_err(|e| operational(format!("{}: {e}", path.display())))
}

fn warn_toy(key: &CompositeKey) {
    if key.is_toy() {
        eprintln!(
            "warning: {}-bit key is below {} bits; fine for tests, not for secrets",
            key.bits(),
            composite::RECOMMENDED_KEY_BITS
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_split(
    input: Option<PathBuf>,
    k: usize,
    n: Option<u16>,
    mode: Option<Mode>,
    out: PathBuf,
    seed: Option<u64>,
    prime_hex: Option<String>,
    datum: Option<String>,
    composite: bool,
    key: Option<PathBuf>,
) -> Result<(), Failure> {
    if k < 2 {
        return Err(usage("k must be at least 2"));
    }
    if key.is_some() && !composite {
        return Err(usage("--key only applies with --composite"));
    }
    if let Some(n) = n {
        if usize::from(n) < k {
            return Err(usage(format!("n = {n} is smaller than k = {k}")));
        }
    }
    let scheme = if composite {
        let key = load_key(key.as_deref().expect("clap requires --key"))?;
        warn_toy(&key);
        SplitScheme::Composite(key)
    } else if let Some(n) = n {
        let mode = match mode.unwrap_or(Mode::Structured) {
            Mode::Structured => ExpansionMode::Structured,
            Mode::Random => ExpansionMode::Random,
        };
        SplitScheme::Redundant { n, mode }
    } else {
        SplitScheme::RootK
    };
    let mut plan = SplitPlan::new(k, scheme);
    if let Some(hex) = prime_hex {
        let p = BigUint::parse_bytes(hex.trim_start_matches("0x").as_bytes(), 16)
            .ok_or_else(|| usage(format!("--prime-hex `{hex}` is not hex")))?;
        plan = plan.with_modulus(Modulus::prime(p).map_err(|e| usage(format!("--prime-hex: {e}")))?);
    }

    let mut rng = rng(seed);
    let result = match datum {
        Some(text) => pipeline::split_datum(&parse_uint(&text, "--datum")?, &plan, &mut rng),
        None => pipeline::split_bytes(&read(input.as_deref().expect("clap requires input"))?, &plan, &mut rng),
    };
    let (group, envelopes) = result.map_err(|e| match e {
        PipelineError::Partition(_) | PipelineError::BadShareCount => usage(e.to_string()),
        other => operational(other),
    })?;

    fs::create_dir_all(&out).map_err(|e| io_failure(&out, e))?;
    for env in &envelopes {
        let path = out.join(format!("{group}-{}.rsh", env.share_index));
        write(&path, &encode_share_file(env).map_err(operational)?)?;
    }
    println!("{group}");
    Ok(())
}

fn cmd_join(shares: Vec<PathBuf>, out: Option<PathBuf>, key: Option<PathBuf>) -> Result<(), Failure> {
    let envelopes = shares
        .iter()
        .map(|p| decode_share_file(&read(p)?).map_err(|e| operational(format!("{}: {e}", p.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    let key = key.as_deref().map(load_key).transpose()?;
    let joined = pipeline::join_envelopes(&envelopes, key.as_ref()).map_err(|e| match e {
        PipelineError::Unrecoverable { .. } => Failure {
            code: EXIT_UNRECOVERABLE,
            message: e.to_string(),
        },
        other => operational(other),
    })?;
    let bytes = match joined {
        JoinOutput::Data(data) => data,
        JoinOutput::Datum(d) => format!("{d}\n").into_bytes(),
        JoinOutput::Ciphertext(values) => {
            eprintln!(
                "warning: no key given; the shares only reveal the ciphertext c = d^y mod n, one value per chunk"
            );
            values.iter().map(|c| format!("{c}\n")).collect::<String>().into_bytes()
        }
    };
    match out {
        Some(path) => write(&path, &bytes),
        None => std::io::stdout().write_all(&bytes).map_err(operational),
    }
}

fn cmd_keygen(bits: u64, y: String, out: PathBuf, seed: Option<u64>) -> Result<(), Failure> {
    let y = parse_uint(&y, "--y")?;
    let key = composite::keygen(bits, &y, &mut rng(seed)).map_err(operational)?;
    warn_toy(&key);
    write(&out, &encode_key_file(&key))?;
    println!("n_bits={}", key.bits());
    Ok(())
}

fn cmd_simulate(scenario: PathBuf) -> Result<(), Failure> {
    let text = String::from_utf8(read(&scenario)?).map_err(|_| usage("scenario is not UTF-8"))?;
    let parsed = parse_scenario(&text).map_err(|e| usage(format!("{}: {e}", scenario.display())))?;
    let base = scenario.parent().unwrap_or(Path::new("."));
    let outcome = run_scenario(&parsed, base).map_err(|e| match e {
        ScenarioError::Parse { .. } => usage(e.to_string()),
        other => operational(other),
    })?;
    print!("{}", outcome.render());
    if outcome.all_retrievable() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_UNRECOVERABLE,
            message: "data not retrievable".into(),
        })
    }
}

fn cmd_bound(p: String, k: u32) -> Result<(), Failure> {
    let p = parse_uint(&p, "p")?;
    if p < BigUint::from(2u32) {
        return Err(usage("p must be at least 2"));
    }
    if k < 2 {
        return Err(usage("k must be at least 2"));
    }
    let space = coefficient_space_lower_bound(&p, k);
    println!("lower_bound={}", space.lower_bound);
    println!("multiset_count={}", space.multiset_count);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Split {
            input,
            k,
            n,
            mode,
            out,
            seed,
            prime_hex,
            datum,
            composite,
            key,
        } => cmd_split(input, k, n, mode, out, seed, prime_hex, datum, composite, key),
        Command::Join { shares, out, key } => cmd_join(shares, out, key),
        Command::Keygen { bits, y, out, seed } => cmd_keygen(bits, y, out, seed),
        Command::Simulate { scenario } => cmd_simulate(scenario),
        Command::Bound { p, k } => cmd_bound(p, k),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == EXIT_USAGE {
                eprintln!("run `rootsplit --help` for usage");
            }
            ExitCode::from(f.code)
        }
    }
}
