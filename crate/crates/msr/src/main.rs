use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use msr_core::coefficients::{bound_qany, bound_qmds, find_lambdas_with};
use msr_core::construction::min_alpha;
use msr_core::field::{is_prime, next_prime_above};
use msr_core::repair::bandwidth_report;
use msr_core::{CodeParams, MsrCode};

use msr::pipeline::{encode_bytes, recover_bytes, repair_node};
use msr::verify::{certify, verify, Level, Verdict};
use msr::{Error, LoadedCode, ParamsFile};

#[derive(Parser)]
#[command(
    name = "msr",
    version,
    about = "Minimum-storage regenerating codes with optimal systematic repair"
)]
struct Cli {
    /// More output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for certified coefficients and write a parameter file.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        /// Prime field size. Defaults to the smallest prime above q_MDS + q_ANY.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        tries: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a file into node_<i>.msr shards.
    Encode {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Rebuild a systematic shard from d helpers.
    Repair {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        failed: usize,
        /// Comma-separated helper nodes.
        #[arg(long, value_delimiter = ',', required = true)]
        helpers: Vec<usize>,
        #[arg(long)]
        shards: PathBuf,
    },
    /// Reassemble the original file from any k shards.
    Recover {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        shards: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the exhaustive checks for a parameter file.
    Verify {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = LevelArg::All)]
        level: LevelArg,
    },
    /// Print sizes and field-size bounds.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Repair,
    Mds,
    AnyHelper,
    All,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Level {
        match l {
            LevelArg::Repair => Level::Repair,
            LevelArg::Mds => Level::Mds,
            LevelArg::AnyHelper => Level::AnyHelper,
            LevelArg::All => Level::All,
        }
    }
}

const USAGE: u8 = 2;
const FAILURE: u8 = 1;

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_usage() { USAGE } else { FAILURE };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<msr_core::Error> for Failure {
    fn from(e: msr_core::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: USAGE,
        msg: msg.into(),
    }
}

fn recommended_q(n: usize, k: usize, d: usize) -> Result<(u128, u128, u64), Failure> {
    let mds = bound_qmds(n, k, d)?;
    let any = bound_qany(n, k, d)?;
    let sum = u64::try_from(mds + any).map_err(|_| usage("field-size bound exceeds u64"))?;
    let q = next_prime_above(sum).ok_or_else(|| usage("no prime above the field-size bound"))?;
    Ok((mds, any, q))
}

fn construct(
    n: usize,
    k: usize,
    d: usize,
    q: Option<u64>,
    seed: u64,
    tries: u32,
    out: &Path,
) -> Result<(), Failure> {
    // Validate the triple before spending time on bounds.
    min_alpha(n, k, d)?;
    let (mds, any, rec) = recommended_q(n, k, d)?;
    let q = q.unwrap_or(rec);
    if !is_prime(q) {
        return Err(usage(format!("{q} is not prime")));
    }
    let params = CodeParams::new(n, k, d, q)?;
    let cert = find_lambdas_with(&params, seed, tries, certify)?;
    let code = MsrCode::new(params, &cert.lambdas)?;
    let file = ParamsFile::from_code(&code, Some(&cert));
    file.save(out)?;
    println!("alpha = {}", params.alpha());
    println!("beta = {}", params.beta());
    println!("q_MDS = {mds}");
    println!("q_ANY = {any}");
    println!(
        "q = {q}{}",
        if cert.below_recommended() {
            " (below q_MDS + q_ANY)"
        } else {
            ""
        }
    );
    println!("lambda found after {} tries", cert.tries);
    println!("checksum = {:#010x}", file.checksum());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Construct {
            n,
            k,
            d,
            q,
            seed,
            tries,
            out,
        } => construct(n, k, d, q, seed, tries, &out),
        Command::Encode {
            params,
            input,
            outdir,
        } => {
            let lc = LoadedCode::load(&params)?;
            let bytes =
                std::fs::read(&input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            let cw = encode_bytes(&lc.code, lc.checksum, &bytes, &outdir)?;
            println!(
                "wrote {} shards of {cw} codewords to {}",
                lc.code.params().n(),
                outdir.display()
            );
            Ok(())
        }
        Command::Repair {
            params,
            failed,
            helpers,
            shards,
        } => {
            let lc = LoadedCode::load(&params)?;
            let p = lc.code.params();
            if failed == 0 || failed > p.n() {
                return Err(usage(format!(
                    "failed node {failed} out of range 1..={}",
                    p.n()
                )));
            }
            if p.is_parity(failed) {
                return Err(usage(format!(
                    "node {failed} is a parity node: systematic-repair only"
                )));
            }
            if helpers.len() != p.d() {
                return Err(usage(format!(
                    "expected {} helpers, got {}",
                    p.d(),
                    helpers.len()
                )));
            }
            let s = repair_node(&lc.code, lc.checksum, &shards, failed, &helpers)?;
            let r = bandwidth_report(p);
            println!(
                "downloaded {} of naive {} symbols per codeword (target d*alpha/(d-k+1) = {})",
                s.downloaded_per_codeword, s.naive_per_codeword, r.repair_download
            );
            println!(
                "{} codewords: read {} symbols in {} runs, solved {}x{} system",
                s.codewords, s.reads.symbols, s.reads.runs, s.system_dimension, s.system_dimension
            );
            if cli.verbose > 0 {
                println!(
                    "wrote {}",
                    msr::shard::shard_path(&shards, failed).display()
                );
            }
            Ok(())
        }
        Command::Recover {
            params,
            shards,
            out,
        } => {
            let lc = LoadedCode::load(&params)?;
            let bytes = recover_bytes(&lc.code, lc.checksum, &shards)?;
            std::fs::write(&out, &bytes).map_err(|e| Failure {
                code: FAILURE,
                msg: format!("{}: {e}", out.display()),
            })?;
            println!("recovered {} bytes", bytes.len());
            Ok(())
        }
        Command::Verify { params, level } => {
            let lc = LoadedCode::load(&params)?;
            let rows = verify(&lc.code, level.into())?;
            let mut failed = 0;
            for row in &rows {
                if row.verdict == Verdict::Fail {
                    failed += 1;
                }
                println!("{row}");
            }
            println!("{} cases, {failed} failed", rows.len());
            if failed > 0 {
                return Err(Failure {
                    code: FAILURE,
                    msg: "verification failed".into(),
                });
            }
            Ok(())
        }
        Command::Bounds { n, k, d } => {
            let alpha = min_alpha(n, k, d)?;
            let (mds, any, rec) = recommended_q(n, k, d)?;
            println!("alpha = {alpha}");
            println!("beta = {}", alpha / (d - k + 1));
            println!("q_MDS = {mds}");
            println!("q_ANY = {any}");
            println!("recommended q = {rec}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("msr: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
