use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use num_bigint::BigUint;

use digit_witness::exp_witness::{construct_exp_witness, DEFAULT_DIGIT_BUDGET};
use digit_witness::explorer::{emit, scan, Format, ScanRange, Sequence};
use digit_witness::poly_witness::{construct_poly_witness, zero_block_witness};
use digit_witness::report::WitnessRun;
use digit_witness::words::gamma_prime;
use digit_witness::{count_in_integer, expansion, gamma, IntPoly, Word, WitnessReport};

/// Explicit integers whose digit expansions contain many copies of a word.
#[derive(Parser)]
#[command(name = "digit-witness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Self-overlap statistics of a word.
    Gamma {
        #[arg(long)]
        base: u32,
        #[arg(long)]
        word: String,
    },
    /// Overlapping occurrences of a word in the expansion of a value.
    Count {
        #[arg(long)]
        base: u32,
        #[arg(long)]
        word: String,
        /// A decimal integer or a power written `m^k`.
        #[arg(long)]
        value: String,
    },
    /// Construct N so that f(N) ends in w^L 0^c (f(a0))_q.
    WitnessPoly {
        #[arg(long)]
        base: u32,
        #[arg(long)]
        word: String,
        /// Coefficients `c0,c1,…,cd`, lowest degree first.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        scale: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the lift log here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Construct N' so that m^{N'} ends in w^L 0^c 1 in base p.
    WitnessExp {
        #[arg(long)]
        prime: u32,
        #[arg(long)]
        m: BigUint,
        #[arg(long)]
        word: String,
        #[arg(long)]
        scale: u32,
        #[arg(long, default_value_t = DEFAULT_DIGIT_BUDGET)]
        digit_budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Scan count / ln n along a sequence.
    Explore {
        /// `poly:c0,c1,…` or `exp:m`.
        #[arg(long, allow_hyphen_values = true)]
        spec: String,
        #[arg(long)]
        base: u32,
        #[arg(long)]
        word: String,
        /// Inclusive range `a..b`.
        #[arg(long)]
        range: String,
        #[arg(long, default_value_t = 1)]
        stride: u64,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long, default_value_t = DEFAULT_DIGIT_BUDGET)]
        digit_budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_value(text: &str) -> anyhow::Result<BigUint> {
    let text = text.trim();
    match text.split_once('^') {
        Some((base, exponent)) => {
            let base: BigUint = base.trim().parse().context("bad base in value")?;
            let exponent: u32 = exponent.trim().parse().context("bad exponent in value")?;
            Ok(base.pow(exponent))
        }
        None => text.parse().context("value must be a decimal integer or m^k"),
    }
}

fn write_report(report: &WitnessReport, out: Option<&Path>) -> anyhow::Result<()> {
    let mut sink = output(out)?;
    sink.write_all(report.to_json().as_bytes())?;
    sink.flush()?;
    Ok(())
}

fn finish(run: &WitnessRun, out: Option<&Path>, trace: Option<&Path>) -> anyhow::Result<ExitCode> {
    write_report(&run.report, out)?;
    if let Some(path) = trace {
        std::fs::write(path, run.trace_text())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    verdict(&run.report)
}

fn verdict(report: &WitnessReport) -> anyhow::Result<ExitCode> {
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    if !report.verification_passed() {
        bail!("witness failed verification");
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gamma { base, word } => {
            let w = Word::parse(&word, base)?;
            let target = digit_witness::explorer::ratio_target(&w, base)?;
            println!("word: {w}");
            println!("length: {}", w.len());
            println!("gamma_prime: {}", gamma_prime(&w)?);
            println!("gamma: {}", gamma(&w)?);
            println!("target: {target}");
        }
        Command::Count { base, word, value } => {
            let w = Word::parse(&word, base)?;
            let n = parse_value(&value)?;
            println!("expansion: {}", expansion(&n, base)?);
            println!("count: {}", count_in_integer(&w, &n, base)?);
        }
        Command::WitnessPoly {
            base,
            word,
            poly,
            scale,
            out,
            trace,
        } => {
            let w = Word::parse(&word, base)?;
            let f = IntPoly::parse(&poly)?;
            if w.is_all_zeros() {
                let report = zero_block_witness(&f, base, w.len(), scale)?;
                write_report(&report, out.as_deref())?;
                if let Some(path) = trace {
                    // no lifting happens on this path
                    std::fs::write(&path, "")?;
                }
                return verdict(&report);
            }
            let run = construct_poly_witness(&f, base, &w, scale)?;
            return finish(&run, out.as_deref(), trace.as_deref());
        }
        Command::WitnessExp {
            prime,
            m,
            word,
            scale,
            digit_budget,
            out,
            trace,
        } => {
            let w = Word::parse(&word, prime)?;
            let run = construct_exp_witness(&m, prime, &w, scale, digit_budget)?;
            return finish(&run, out.as_deref(), trace.as_deref());
        }
        Command::Explore {
            spec,
            base,
            word,
            range,
            stride,
            format,
            digit_budget,
            out,
        } => {
            let h = Sequence::parse(&spec)?;
            let w = Word::parse(&word, base)?;
            let range = ScanRange::parse(&range, stride)?;
            let format: Format = format.parse()?;
            let series = scan(&h, base, &w, &range, digit_budget)?;
            let mut sink = output(out.as_deref())?;
            emit(&series, format, &mut sink)?;
            sink.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
