use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cubic_selmer::classgroup::{ClassGroupEngine, DEFAULT_LIMIT};
use cubic_selmer::cubesum::VerdictFlags;
use cubic_selmer::Error;
use cubic_selmer_cli::exit_code;
use cubic_selmer_cli::report::{
    analyze_cubesum, analyze_type1, analyze_type2, Analysis, AnalysisReport, RankSpec, Type1Args,
    Type2Args,
};
use cubic_selmer_cli::table::{
    format_set, parse_rows, run_table1, run_table2, table1_row, table2_row, write_csv, Which,
    TABLE1_HEADERS, TABLE2_HEADERS,
};
use num_bigint::BigInt;

/// Bounds on 3-isogeny Selmer groups of y² = x³ + a and y² = x³ + a(x-b)².
#[derive(Parser)]
#[command(name = "cubic-selmer", version)]
struct Cli {
    /// Largest |discriminant| for which class groups are enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_LIMIT)]
    limit: u64,
    /// Class-group cache file.
    #[arg(long, global = true, env = "CUBIC_SELMER_CACHE")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct Format {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Analyse the Type I curve y² = x³ + a.
    Type1 {
        #[arg(long, allow_negative_numbers = true)]
        a: BigInt,
        /// Global root number of E_a over Q.
        #[arg(long, allow_negative_numbers = true, value_parser = parse_root_number)]
        root_number: Option<i8>,
        /// Rank of E_a(K), exact or as lo..hi.
        #[arg(long)]
        rank: Option<RankSpec>,
        /// dim Ш(E_a/K)[φ].
        #[arg(long)]
        sha_phi: Option<u64>,
        #[command(flatten)]
        format: Format,
    },
    /// Analyse the Type II curve y² = x³ + a(x-b)².
    Type2 {
        #[arg(long, allow_negative_numbers = true)]
        a: BigInt,
        #[arg(long, allow_negative_numbers = true)]
        b: BigInt,
        /// Rank of E_{a,b}(K), exact or as lo..hi.
        #[arg(long)]
        rank: Option<RankSpec>,
        #[command(flatten)]
        format: Format,
    },
    /// Decide whether D ∈ {ℓ, 2ℓ, ℓ²} is a sum of two rational cubes.
    Cubesum {
        #[arg(long = "D", visible_alias = "d")]
        d: u64,
        /// Take dim Ш(E/Q)[3] to be even.
        #[arg(long)]
        assume_sha_even: bool,
        /// Take the rank of E_{16D²}(Q) to be positive.
        #[arg(long)]
        assume_rank_positive: bool,
        /// Search for points up to this naive height.
        #[arg(long)]
        search_height: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Reproduce a bound table as CSV from a rows file.
    Table {
        #[arg(long, value_enum)]
        which: TableKind,
        #[arg(long)]
        rows: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

fn parse_root_number(s: &str) -> Result<i8, String> {
    match s {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("root number must be +1 or -1, got {s}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let engine = ClassGroupEngine::new(cli.limit, cli.cache.clone());
    match run(&cli, &engine) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn echo(pairs: &[(&str, Option<String>)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
        .collect()
}

/// `"+ 5"` or `"- 5"` for a decimal integer string.
fn signed(n: &str) -> String {
    match n.strip_prefix('-') {
        Some(abs) => format!("- {abs}"),
        None => format!("+ {n}"),
    }
}

fn negated(n: &str) -> String {
    match n.strip_prefix('-') {
        Some(abs) => abs.to_string(),
        None => format!("-{n}"),
    }
}

fn print_json(report: &AnalysisReport) -> Result<(), Error> {
    let text =
        serde_json::to_string_pretty(report).map_err(|e| Error::Consistency(e.to_string()))?;
    writeln!(io::stdout().lock(), "{text}").or_else(quiet_broken_pipe)
}

/// A closed downstream pipe (`| head`) is not an error worth reporting.
fn quiet_broken_pipe(e: io::Error) -> Result<(), Error> {
    match e.kind() {
        io::ErrorKind::BrokenPipe => Ok(()),
        _ => Err(io_error(e)),
    }
}

fn io_error(e: io::Error) -> Error {
    Error::InvalidInput(e.to_string())
}

fn run(cli: &Cli, engine: &ClassGroupEngine) -> Result<u8, Error> {
    let stdout = io::stdout();
    match &cli.command {
        Command::Type1 {
            a,
            root_number,
            rank,
            sha_phi,
            format,
        } => {
            let args = Type1Args {
                a: a.clone(),
                root_number: *root_number,
                rank: *rank,
                sha_phi: *sha_phi,
            };
            if format.csv {
                let row = table1_row(engine, a, *rank)?;
                write_csv(stdout.lock(), &TABLE1_HEADERS, &[row]).or_else(quiet_broken_pipe)?;
                return Ok(0);
            }
            let input = echo(&[
                ("a", Some(a.to_string())),
                ("root_number", root_number.map(|w| w.to_string())),
                ("rank", rank.map(|r| r.to_string())),
                ("sha_phi", sha_phi.map(|s| s.to_string())),
            ]);
            let report =
                AnalysisReport::timed(input, || analyze_type1(engine, &args).map(Analysis::Type1))?;
            if format.json {
                print_json(&report)?;
            } else if let Analysis::Type1(t) = &report.analysis {
                let mut out = stdout.lock();
                let _ = writeln!(out, "E_a: y² = x³ {}", signed(&t.a));
                let _ = writeln!(
                    out,
                    "S_a = {}, S_a(Q) = {}, S_aα²(Q) = {}, |S_a(L)| = {}",
                    format_set(&t.s_a),
                    format_set(&t.s_a_q),
                    format_set(&t.s_aalpha2_q),
                    t.size_s_a_l
                );
                if let Some(h) = &t.h3_s_a_l {
                    let _ = writeln!(out, "h³_S(L) = {h}");
                }
                let _ = writeln!(out, "dim Sel^φ(E/K) ∈ {}", t.phi_k);
                if let Some(d) = &t.phi_k_exact {
                    let _ = writeln!(out, "dim Sel^φ(E/K) = {d} (root number)");
                }
                let _ = writeln!(out, "dim Sel³(E/K) ∈ {}", t.sel3_k);
                let _ = writeln!(
                    out,
                    "dim Sel^φ(E/Q) ∈ {}, dim Sel^φ̂(Ê/Q) ∈ {}",
                    t.phi_q, t.phi_hat_q
                );
                if let Some(s) = &t.sha_phi_floor {
                    let _ = writeln!(out, "dim Ш(E/K)[φ] ≥ {s}");
                }
            }
            Ok(0)
        }
        Command::Type2 { a, b, rank, format } => {
            let args = Type2Args {
                a: a.clone(),
                b: b.clone(),
                rank: *rank,
            };
            if format.csv {
                let row = table2_row(engine, a, b, *rank)?;
                write_csv(stdout.lock(), &TABLE2_HEADERS, &[row]).or_else(quiet_broken_pipe)?;
                return Ok(0);
            }
            let input = echo(&[
                ("a", Some(a.to_string())),
                ("b", Some(b.to_string())),
                ("rank", rank.map(|r| r.to_string())),
            ]);
            let report =
                AnalysisReport::timed(input, || analyze_type2(engine, &args).map(Analysis::Type2))?;
            if format.json {
                print_json(&report)?;
            } else if let Analysis::Type2(t) = &report.analysis {
                let mut out = stdout.lock();
                let _ = writeln!(
                    out,
                    "E_{{a,b}}: y² = x³ {}(x {})²",
                    signed(&t.a),
                    signed(&negated(&t.b))
                );
                let _ = writeln!(
                    out,
                    "S₁ = {}, S₂ = {}, S₃ = {}",
                    format_set(&t.s1),
                    format_set(&t.s2),
                    format_set(&t.s3)
                );
                if let (Some(h12), Some(h13)) = (&t.h3_s12_l, &t.h3_s13_l) {
                    let _ = writeln!(out, "h³_S₁,₂(L) = {h12}, h³_S₁,₃(L) = {h13}");
                }
                let _ = writeln!(out, "dim Sel^Ψ ∈ {}", t.psi);
                let _ = writeln!(out, "dim Sel^Ψ̂ ∈ {}", t.psi_hat);
                let _ = writeln!(out, "dim Sel³ ∈ {}", t.sel3);
            }
            Ok(0)
        }
        Command::Cubesum {
            d,
            assume_sha_even,
            assume_rank_positive,
            search_height,
            json,
        } => {
            let flags = VerdictFlags {
                sha_even: *assume_sha_even,
                rank_positive: *assume_rank_positive,
                search_height: *search_height,
            };
            let input = echo(&[
                ("D", Some(d.to_string())),
                ("assume_sha_even", Some(assume_sha_even.to_string())),
                (
                    "assume_rank_positive",
                    Some(assume_rank_positive.to_string()),
                ),
                ("search_height", search_height.map(|h| h.to_string())),
            ]);
            let report =
                AnalysisReport::timed(input, || analyze_cubesum(*d, flags).map(Analysis::CubeSum))?;
            if *json {
                print_json(&report)?;
            } else if let Analysis::CubeSum(v) = &report.analysis {
                let mut out = stdout.lock();
                let _ = writeln!(out, "D = {}: {}", v.d, v.status);
                let _ = writeln!(out, "dim Sel^φ = {} ({})", v.selmer_dim, v.source);
                if let Some(r) = &v.rank {
                    let _ = writeln!(out, "rank = {r}");
                }
                for h in &v.hypotheses {
                    let _ = writeln!(out, "assuming: {h}");
                }
                if let Some(c) = &v.certificate {
                    let _ = writeln!(
                        out,
                        "point ({}, {}) on y² = x³ {} [{}]",
                        c.x,
                        c.y,
                        signed(&c.curve_a),
                        c.label
                    );
                }
            }
            Ok(0)
        }
        Command::Table { which, rows } => {
            let text = std::fs::read_to_string(rows)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", rows.display())))?;
            let which = match which {
                TableKind::One => Which::Type1,
                TableKind::Two => Which::Type2,
            };
            let inputs = parse_rows(&text, which)?;
            let first_error = match which {
                Which::Type1 => {
                    let out = run_table1(engine, &inputs);
                    write_csv(stdout.lock(), &TABLE1_HEADERS, &out.rows)
                        .or_else(quiet_broken_pipe)?;
                    out.first_error
                }
                Which::Type2 => {
                    let out = run_table2(engine, &inputs);
                    write_csv(stdout.lock(), &TABLE2_HEADERS, &out.rows)
                        .or_else(quiet_broken_pipe)?;
                    out.first_error
                }
            };
            Ok(first_error.map_or(0, |e| exit_code(&e)))
        }
    }
}
