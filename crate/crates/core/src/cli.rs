//! The `hindman` command line.
//!
//! Exit codes: 0 success or valid, 1 invalid or infeasible, 2 unknown or
//! budget exhausted, 3 input error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{render, spencer_bound, BoundError, Fallback, OracleTable, DEFAULT_BIT_BUDGET};
use crate::error::{Error, Result};
use crate::formats::{parse_certificate, parse_coloring, parse_witness, to_json, WitnessFile};
use crate::model::{BlockFamily, Coloring, DomainKind, UnionWitness};
use crate::replay::{extract, verify_spencer, ReplayParams};
use crate::search::{compute, naive::naive_compute, verify_certificate, Problem, SearchBudget, Status};

/// Largest coloring `gen-coloring` will write.
pub const MAX_GENERATED_CELLS: u64 = 1 << 24;

#[derive(Debug, Parser)]
#[command(name = "hindman", version, about = "Finitary Hindman numbers: search, bounds and witness extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute Sp(m,p,c).
    Sp {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        c: u32,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Compute U(n,c).
    U {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        c: u32,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Compute Hind(n,c).
    Hind {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        c: u32,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Print the recursive upper bound trace for Sp(m,p,c).
    Bound {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        c: u64,
        /// exact | symbolic | table:<file>
        #[arg(long, default_value = "exact")]
        oracle: String,
        /// Bit budget for materialized values.
        #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
        bits: u64,
        /// Search limits for oracle values under `exact`.
        #[arg(long, default_value_t = 6)]
        max_k: u32,
        #[arg(long, default_value_t = 10_000_000)]
        max_nodes: u64,
        /// Print the trace as JSON instead of key=value lines.
        #[arg(long)]
        json: bool,
    },
    /// Extract a Spencer witness from a coloring by replaying the construction.
    Extract {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        coloring: PathBuf,
        /// Comma separated n_0,...,n_{k*}; defaults to the recursion.
        #[arg(long, value_delimiter = ',')]
        n_seq: Option<Vec<u64>>,
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Check a witness against a coloring, or a bad-coloring certificate.
    Verify {
        #[arg(long, requires = "coloring", conflicts_with = "certificate")]
        witness: Option<PathBuf>,
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(long, required_unless_present = "witness")]
        certificate: Option<PathBuf>,
    },
    /// Write a seeded pseudo-random coloring (ChaCha8, seeded from --seed).
    GenColoring {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        colors: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 64)]
    max_k: u32,
    #[arg(long, default_value_t = 50_000_000)]
    max_nodes: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Use the unpruned enumeration.
    #[arg(long)]
    naive: bool,
    /// Write the lower-bound certificate here.
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Interval,
    Subsets,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String, code: i32) -> Self {
        Output { stdout, stderr: String::new(), code }
    }

    fn error(e: &Error) -> Self {
        Output { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<S: AsRef<str>>(args: &[S]) -> Output {
    let cli = match Cli::try_parse_from(args.iter().map(AsRef::as_ref)) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { stdout: String::new(), stderr: text, code: 3 }
            } else {
                Output::ok(text, 0)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(e) => Output::error(&e),
    }
}

fn dispatch(command: Command) -> Result<Output> {
    match command {
        Command::Sp { m, p, c, search } => cmd_compute(Problem::Sp { m, p }, c, &search),
        Command::U { n, c, search } => cmd_compute(Problem::U { n }, c, &search),
        Command::Hind { n, c, search } => cmd_compute(Problem::Hind { n }, c, &search),
        Command::Bound { m, p, c, oracle, bits, max_k, max_nodes, json } => {
            cmd_bound(m, p, c, &oracle, bits, SearchBudget { max_k, max_nodes, threads: 1 }, json)
        }
        Command::Extract { m, p, c, coloring, n_seq, transcript } => {
            cmd_extract(m, p, c, &coloring, n_seq, transcript.as_deref())
        }
        Command::Verify { witness, coloring, certificate } => cmd_verify(witness, coloring, certificate),
        Command::GenColoring { kind, k, colors, seed } => cmd_gen_coloring(kind, k, colors, seed),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_compute(problem: Problem, c: u32, args: &SearchArgs) -> Result<Output> {
    let budget = SearchBudget { max_k: args.max_k, max_nodes: args.max_nodes, threads: args.threads };
    let outcome = if args.naive { naive_compute(problem, c, budget)? } else { compute(problem, c, budget)? };
    let mut stderr = format!("nodes_explored={}\n", outcome.nodes_explored);
    if let Some(path) = &args.cert {
        match &outcome.lower_certificate {
            Some(cert) => write(path, &format!("{}\n", to_json(cert)))?,
            None => stderr.push_str("no certificate: the value is 1\n"),
        }
    }
    let code = match outcome.status {
        Status::Exact => 0,
        Status::Unknown => 2,
    };
    Ok(Output { stdout: format!("{outcome}\n"), stderr, code })
}

fn oracle_table(source: &str, budget: SearchBudget) -> Result<OracleTable> {
    match source {
        "exact" => Ok(OracleTable::exact(budget)),
        "symbolic" => Ok(OracleTable::symbolic()),
        _ => match source.strip_prefix("table:") {
            Some(path) => OracleTable::from_json(&read(Path::new(path))?, Fallback::Symbolic),
            None => Err(Error::Input(format!("unknown oracle source {source:?}"))),
        },
    }
}

fn cmd_bound(m: u64, p: u64, c: u64, oracle: &str, bits: u64, budget: SearchBudget, json: bool) -> Result<Output> {
    if bits < 64 {
        return Err(Error::Input("--bits must be at least 64".into()));
    }
    let table = oracle_table(oracle, budget)?;
    let show = |t| if json { format!("{}\n", to_json(t)) } else { render(t) };
    match spencer_bound(m, p, c, &table, bits) {
        Ok(trace) => Ok(Output::ok(show(&trace), 0)),
        Err(BoundError::Domain(e)) => Err(e),
        Err(BoundError::UnknownOracle(miss)) => Ok(Output {
            stdout: show(&miss.partial),
            stderr: format!("error: oracle unresolved: {}\n", miss.message),
            code: 2,
        }),
    }
}

fn cmd_extract(
    m: u64,
    p: u64,
    c: u64,
    coloring: &Path,
    n_seq: Option<Vec<u64>>,
    transcript: Option<&Path>,
) -> Result<Output> {
    let coloring = parse_coloring(&read(coloring)?)?;
    let params = match n_seq {
        Some(seq) => ReplayParams::Supplied(seq),
        None => ReplayParams::Recursion(OracleTable::exact(SearchBudget {
            max_k: 6,
            max_nodes: 10_000_000,
            threads: 1,
        })),
    };
    let t = extract(m, p, c, &coloring, &params)?;
    if let Some(path) = transcript {
        write(path, &format!("{}\n", to_json(&t)))?;
    }
    Ok(Output::ok(format!("{}\n", to_json(&WitnessFile::Spencer(t.witness))), 0))
}

fn cmd_verify(witness: Option<PathBuf>, coloring: Option<PathBuf>, certificate: Option<PathBuf>) -> Result<Output> {
    let verdict = match (witness, coloring, certificate) {
        (Some(w), Some(col), None) => {
            let coloring = parse_coloring(&read(&col)?)?;
            match parse_witness(&read(&w)?)? {
                WitnessFile::Spencer(sw) => verify_spencer(&coloring, &sw).violation,
                WitnessFile::Union(uw) => union_violation(&coloring, &uw),
            }
        }
        (None, _, Some(cert)) => {
            let cert = parse_certificate(&read(&cert)?)?;
            if verify_certificate(&cert)? {
                None
            } else {
                Some(format!("coloring admits a witness for {}", cert.problem))
            }
        }
        _ => return Err(Error::Input("give --witness with --coloring, or --certificate".into())),
    };
    Ok(match verdict {
        None => Output::ok("VALID\n".into(), 0),
        Some(msg) => Output::ok(format!("INVALID: {msg}\n"), 1),
    })
}

/// First problem with a union witness against a subsets coloring, if any.
fn union_violation(coloring: &Coloring, w: &UnionWitness) -> Option<String> {
    if coloring.kind() != DomainKind::Subsets {
        return Some("coloring is not a subsets coloring".into());
    }
    if w.d.len() != w.n as usize || w.n == 0 {
        return Some(format!("expected {} sets, got {}", w.n, w.d.len()));
    }
    if let Err(e) = BlockFamily::new(w.d.clone(), w.ordered) {
        return Some(e.to_string());
    }
    let k = coloring.k();
    let Some(masks) = w.masks().filter(|ms| ms.iter().all(|&x| x >> k == 0)) else {
        return Some(format!("a set uses a block index outside 0..{k}"));
    };
    let color = |t: u64| coloring.assign()[(t - 1) as usize];
    let first = color(masks[0]);
    for sel in 1..1u64 << masks.len() {
        let cell = (0..masks.len()).filter(|i| sel >> i & 1 == 1).fold(0, |acc, i| acc | masks[i]);
        if color(cell) != first {
            return Some(format!("union cell {cell} has color {} instead of {first}", color(cell)));
        }
    }
    None
}

fn cmd_gen_coloring(kind: KindArg, k: u32, colors: u32, seed: u64) -> Result<Output> {
    let kind = match kind {
        KindArg::Interval => DomainKind::Interval,
        KindArg::Subsets => DomainKind::Subsets,
    };
    if colors == 0 || k == 0 {
        return Err(Error::Input("--k and --colors must be positive".into()));
    }
    let cells = Coloring::cell_count(kind, k)?;
    if cells > MAX_GENERATED_CELLS {
        return Err(Error::Input(format!("{cells} cells exceeds {MAX_GENERATED_CELLS}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assign = (0..cells).map(|_| rng.gen_range(0..colors)).collect();
    let coloring = Coloring::new(kind, k, colors, assign)?;
    Ok(Output::ok(format!("{}\n", to_json(&coloring)), 0))
}
