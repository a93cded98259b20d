//! Command-line front end. Squares are read in the 1-based text format or the
//! compact `n:digits` format; `-` reads standard input.
//!
//! Exit status: 0 on success or "same class", 1 on "different class", 2 on
//! any error.

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};

use crate::canonical::{canonical_labelling, species_canonical};
use crate::cycles::CycleTable;
use crate::error::{Error, Result};
use crate::latin::{LatinSquare, PartialPermutation};
use crate::onefact::{canonical_1f, of_to_unipotent, same_class_1f, unipotent_to_of, FactorSet};
use crate::oracle::{enumerate_subsquares, longest_cycle_vs_subsquare_with};
use crate::sampler::{h_statistics_with, JmChain, Schedule};
use crate::steiner::{canonical_sts, canonical_sts_lifted, quasigroup_to_sts, sts_to_quasigroup, BlockSet};

#[derive(Parser, Debug)]
#[command(name = "latin-canon", version, about = "Canonical labelling of Latin squares and related designs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SquareFormat {
    Text,
    Compact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StatsFormat {
    Table,
    Kv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Canonical form of a Latin square under isotopism
    Canon {
        file: String,
        /// Also print the row, column and symbol maps (1-based images)
        #[arg(long)]
        labelling: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: SquareFormat,
    },
    /// Decide whether two Latin squares are isotopic
    Isotopic { a: String, b: String },
    /// Main-class representative over all six conjugates
    Species {
        file: String,
        #[arg(long, value_enum, default_value = "text")]
        format: SquareFormat,
    },
    /// Canonical form of a Steiner triple system (block file)
    StsCanon {
        file: String,
        /// Use the symbol map of the general isotopism search instead
        #[arg(long)]
        lifted: bool,
    },
    /// Decide whether two Steiner triple systems are isomorphic
    StsIsomorphic { a: String, b: String },
    /// Canonical form of a 1-factorisation (factor file)
    OfCanon { file: String },
    /// Decide whether two 1-factorisations are isomorphic
    OfIsomorphic { a: String, b: String },
    /// Sample Latin squares with the Jacobson-Matthews chain
    Sample {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: SquareFormat,
    },
    /// Statistics of the number of Hamiltonian row cycles over sampled squares
    Stats {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Independent chains, one thread each
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: StatsFormat,
        /// Moves before the first sample (default n^3)
        #[arg(long)]
        burn_in: Option<u64>,
        /// Moves between samples (default n^2)
        #[arg(long)]
        spacing: Option<u64>,
    },
    /// Row-cycle structures of a Latin square
    Cycles {
        file: String,
        /// Print the structure of every row pair
        #[arg(long)]
        all: bool,
    },
    /// Proper subsquares of a Latin square
    Subsquares { file: String },
    /// Compare longest row cycle with largest proper subsquare on samples
    Probe {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Independent chains, one thread each
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text).map_err(|e| Error::Parse(0, format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Error::Parse(0, format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn read_square(path: &str, stdin: &mut dyn Read) -> Result<LatinSquare> {
    let text = read_input(path, stdin)?;
    if text.contains(':') {
        LatinSquare::parse_compact(&text)
    } else {
        LatinSquare::parse(&text)
    }
}

fn format_square(l: &LatinSquare, format: SquareFormat) -> Result<String> {
    match format {
        SquareFormat::Text => Ok(l.to_text()),
        SquareFormat::Compact => l
            .to_compact()
            .map(|s| s + "\n")
            .ok_or(Error::OrderTooLarge(l.order(), 35)),
    }
}

fn images(p: &PartialPermutation) -> String {
    let v: Vec<String> = p.images().iter().map(|x| x.map_or("*".to_string(), |x| (x + 1).to_string())).collect();
    v.join(" ")
}

fn verdict(same: bool, out: &mut dyn Write) -> std::io::Result<i32> {
    writeln!(out, "{}", if same { "same" } else { "different" })?;
    Ok(if same { 0 } else { 1 })
}

fn execute(cmd: Command, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Parse(0, format!("write failed: {e}"));
    match cmd {
        Command::Canon { file, labelling, format } => {
            let l = read_square(&file, stdin)?;
            let res = canonical_labelling(&l);
            write!(out, "{}", format_square(&res.form, format)?).map_err(io)?;
            if labelling {
                writeln!(out, "rows: {}", images(&res.labelling.alpha)).map_err(io)?;
                writeln!(out, "cols: {}", images(&res.labelling.beta)).map_err(io)?;
                writeln!(out, "symbols: {}", images(&res.labelling.gamma)).map_err(io)?;
            }
            Ok(0)
        }
        Command::Isotopic { a, b } => {
            let a = read_square(&a, stdin)?;
            let b = read_square(&b, stdin)?;
            if a.order() != b.order() {
                return verdict(false, out).map_err(io);
            }
            verdict(canonical_labelling(&a).form == canonical_labelling(&b).form, out).map_err(io)
        }
        Command::Species { file, format } => {
            let l = read_square(&file, stdin)?;
            write!(out, "{}", format_square(&species_canonical(&l), format)?).map_err(io)?;
            Ok(0)
        }
        Command::StsCanon { file, lifted } => {
            let b = BlockSet::parse(&read_input(&file, stdin)?)?;
            let q = sts_to_quasigroup(&b);
            let form = if lifted { canonical_sts_lifted(&q) } else { canonical_sts(&q).form };
            write!(out, "{}", quasigroup_to_sts(&form)).map_err(io)?;
            Ok(0)
        }
        Command::StsIsomorphic { a, b } => {
            let a = BlockSet::parse(&read_input(&a, stdin)?)?;
            let b = BlockSet::parse(&read_input(&b, stdin)?)?;
            if a.order() != b.order() {
                return verdict(false, out).map_err(io);
            }
            let fa = canonical_sts(&sts_to_quasigroup(&a)).form;
            let fb = canonical_sts(&sts_to_quasigroup(&b)).form;
            verdict(fa == fb, out).map_err(io)
        }
        Command::OfCanon { file } => {
            let f = FactorSet::parse(&read_input(&file, stdin)?)?;
            let form = canonical_1f(&of_to_unipotent(&f)).form;
            write!(out, "{}", unipotent_to_of(&form)).map_err(io)?;
            Ok(0)
        }
        Command::OfIsomorphic { a, b } => {
            let a = FactorSet::parse(&read_input(&a, stdin)?)?;
            let b = FactorSet::parse(&read_input(&b, stdin)?)?;
            if a.vertices() != b.vertices() {
                return verdict(false, out).map_err(io);
            }
            verdict(same_class_1f(&a, &b)?, out).map_err(io)
        }
        Command::Sample { order, seed, count, format } => {
            let chain = JmChain::new(order, seed)?;
            for (k, l) in chain.take(count).enumerate() {
                if k > 0 && matches!(format, SquareFormat::Text) {
                    writeln!(out).map_err(io)?;
                }
                write!(out, "{}", format_square(&l, format)?).map_err(io)?;
            }
            Ok(0)
        }
        Command::Stats { order, samples, seed, jobs, format, burn_in, spacing } => {
            let default = Schedule::default_for(order);
            let schedule = Schedule {
                burn_in: burn_in.unwrap_or(default.burn_in),
                spacing: spacing.unwrap_or(default.spacing),
            };
            let stats = h_statistics_with(order, samples, seed, jobs, schedule)?;
            match format {
                StatsFormat::Table => write!(out, "{stats}"),
                StatsFormat::Kv => write!(out, "{}", stats.key_values()),
            }
            .map_err(io)?;
            Ok(0)
        }
        Command::Cycles { file, all } => {
            let l = read_square(&file, stdin)?;
            if l.order() < 2 {
                return Err(Error::OrderTooSmall(l.order()));
            }
            let t = CycleTable::new(&l);
            writeln!(out, "longest={}", t.longest()).map_err(io)?;
            writeln!(out, "hamiltonian_pairs={}", t.hamiltonian_count()).map_err(io)?;
            writeln!(out, "max_structure={}", t.max_gamma().expect("n >= 2")).map_err(io)?;
            let pairs: Vec<String> = t.r_max().iter().map(|&(i, j)| format!("({},{})", i + 1, j + 1)).collect();
            writeln!(out, "max_pairs={}", pairs.join(" ")).map_err(io)?;
            if all {
                for i in 0..l.order() {
                    for j in i + 1..l.order() {
                        writeln!(out, "{} {}: {}", i + 1, j + 1, t.gamma(i, j)).map_err(io)?;
                    }
                }
            }
            Ok(0)
        }
        Command::Subsquares { file } => {
            let l = read_square(&file, stdin)?;
            let report = enumerate_subsquares(&l);
            let subs = &report.subsquares;
            writeln!(out, "count={}", subs.len()).map_err(io)?;
            writeln!(out, "largest_proper={}", report.largest_proper).map_err(io)?;
            if let Some(k) = report.exhaustive_largest {
                writeln!(out, "exhaustive_largest_proper={k}").map_err(io)?;
            }
            let one = |v: &[usize]| v.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",");
            for s in subs {
                writeln!(out, "rows={} cols={} symbols={}", one(&s.rows), one(&s.cols), one(&s.symbols)).map_err(io)?;
            }
            Ok(0)
        }
        Command::Probe { order, samples, seed, jobs } => {
            let report = longest_cycle_vs_subsquare_with(order, samples, seed, jobs)?;
            writeln!(out, "order={order}").map_err(io)?;
            writeln!(out, "samples={}", report.pairs.len()).map_err(io)?;
            writeln!(out, "fraction_exceeding={:.4}", report.fraction_exceeding()).map_err(io)?;
            writeln!(out, "longest largest_subsquare count").map_err(io)?;
            for ((h, s), k) in report.distribution() {
                writeln!(out, "{h} {s} {k}").map_err(io)?;
            }
            Ok(0)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, stdin, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
