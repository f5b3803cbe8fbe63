use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use simfes::ecg::{parse_witness, write_answer, write_ecg_with_comments, GraphError};
use simfes::generators::{gen_hs, gen_phs, gen_random, gen_vc3, Generated, HsInstance, PhsInstance, VcInstance};
use simfes::kernel::{kernelize, KernelOptions, KernelVerdict};
use simfes::maxsim::{brute_maxsim, max_simultaneous_forest, solve_maxsim, MaxSimOptions};
use simfes::parity::ParityBudget;
use simfes::{brute_simfes, par, parse_ecg, solve_simfes, EdgeColoredGraph, PrimeField, SolveOptions, DEFAULT_PRIME};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser)]
#[command(
    name = "simfes",
    version,
    about = "Simultaneous feedback edge set solver for edge-colored multigraphs"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every randomized step
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Prime modulus of the field all matroids are represented over
    #[arg(long, global = true, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Sweeps over all guesses before answering NO
    #[arg(long, global = true, default_value_t = 3)]
    trials: usize,
    /// Skip kernelization before solving
    #[arg(long, global = true)]
    no_kernel: bool,
    /// Cross-check the answer against brute force
    #[arg(long, global = true)]
    oracle: bool,
    /// Input/output graph format
    #[arg(long, global = true, value_enum, default_value_t = Format::Ecg)]
    format: Format,
    /// Write output here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Run single-threaded
    #[arg(long, global = true)]
    sequential: bool,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Give up when one parity DP level holds more wedge coordinates than this
    #[arg(long, global = true, default_value_t = ParityBudget::default().max_terms)]
    max_terms: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ecg,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether k edge deletions make every color class a forest
    Solve {
        input: PathBuf,
        #[arg(long)]
        k: i64,
    },
    /// Find a simultaneous forest with q edges, or the largest one
    Maxsim {
        input: PathBuf,
        /// Target size; omit to maximize
        #[arg(long)]
        q: Option<usize>,
    },
    /// Apply the reduction rules and print the reduced instance
    Kernelize {
        input: PathBuf,
        #[arg(long)]
        k: i64,
        /// Stop after the basic rules
        #[arg(long)]
        no_signatures: bool,
    },
    /// Generate an instance
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check a witness file against an instance
    Verify {
        input: PathBuf,
        witness: PathBuf,
        #[arg(long)]
        k: i64,
    },
    /// Solve a corpus and print one CSV row per instance
    Bench {
        /// Instance files; a seeded random corpus is used when none are given
        inputs: Vec<PathBuf>,
        #[arg(long)]
        k: i64,
        /// Random corpus size
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        /// Report 0 in the millis column so output is byte-stable
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// From Vertex Cover on a cubic graph (JSON: {"n", "edges", "k"})
    Vc3 { input: PathBuf },
    /// From Hitting Set (JSON: {"universe", "sets", "k"})
    Hs { input: PathBuf },
    /// From Partitioned Hitting Set (JSON: {"universe", "families", "k"})
    Phs { input: PathBuf },
    /// Uniform random multigraph; uses --seed
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        alpha: usize,
    },
}

/// An error carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for Failure {}

fn fail(code: u8, msg: impl Into<String>) -> anyhow::Error {
    Failure { code, msg: msg.into() }.into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_graph(path: &Path) -> Result<EdgeColoredGraph> {
    let text = read(path)?;
    parse_ecg(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn solve_options(c: &Common) -> Result<SolveOptions> {
    let field = PrimeField::new(c.prime).map_err(|e| fail(EXIT_USAGE, format!("--prime: {e}")))?;
    Ok(SolveOptions {
        seed: c.seed,
        trials: c.trials,
        use_kernel: !c.no_kernel,
        shortcut: true,
        field,
        budget: ParityBudget {
            max_terms: c.max_terms,
            ..ParityBudget::default()
        },
    })
}

fn maxsim_options(c: &Common) -> Result<MaxSimOptions> {
    let o = solve_options(c)?;
    Ok(MaxSimOptions {
        seed: o.seed,
        trials: o.trials,
        field: o.field,
        budget: o.budget,
    })
}

fn cmd_solve(c: &Common, input: &Path, k: i64) -> Result<(String, u8)> {
    let g = read_graph(input)?;
    let v = solve_simfes(&g, k, &solve_options(c)?)?;
    let out = write_answer(v.yes, &v.witness);
    if c.oracle {
        let want = brute_simfes(&g, k)?;
        if want.yes != v.yes {
            eprintln!(
                "oracle mismatch: solver {}, brute force {}",
                yes_no(v.yes),
                yes_no(want.yes)
            );
            return Ok((out, EXIT_CHECK));
        }
    }
    Ok((out, 0))
}

fn cmd_maxsim(c: &Common, input: &Path, q: Option<usize>) -> Result<(String, u8)> {
    let g = read_graph(input)?;
    let opts = maxsim_options(c)?;
    let (out, answer, target) = match q {
        Some(q) => {
            let v = solve_maxsim(&g, q, &opts)?;
            (write_answer(v.yes, &v.witness), v.yes, q)
        }
        None => {
            let (size, witness) = max_simultaneous_forest(&g, &opts)?;
            let mut out = format!("max simultaneous forest size {size}\n");
            for id in &witness {
                let _ = writeln!(out, "d {id}");
            }
            (out, true, size)
        }
    };
    if c.oracle {
        let want = brute_maxsim(&g, target)?.yes;
        let above = match q {
            None => brute_maxsim(&g, target + 1)?.yes,
            Some(_) => false,
        };
        if want != answer || above {
            eprintln!("oracle mismatch at q = {target}");
            return Ok((out, EXIT_CHECK));
        }
    }
    Ok((out, 0))
}

fn cmd_kernelize(input: &Path, k: i64, signatures: bool) -> Result<(String, u8)> {
    let g = read_graph(input)?;
    let kernel = kernelize(
        &g,
        k,
        &KernelOptions {
            signatures,
            ..KernelOptions::default()
        },
    );
    let mut out = String::from("# trace:\n");
    for step in &kernel.trace {
        let _ = writeln!(out, "# {step}");
    }
    let verdict = match kernel.verdict {
        KernelVerdict::Yes => "YES",
        KernelVerdict::No => "NO",
        KernelVerdict::Reduced => "REDUCED",
    };
    let _ = writeln!(out, "# verdict: {verdict}");
    let _ = writeln!(out, "# k: {}", kernel.k);
    let map: Vec<String> = kernel.vertex_map.iter().map(|v| (v + 1).to_string()).collect();
    let _ = writeln!(out, "# input vertices: {}", map.join(" "));
    let lift: Vec<String> = kernel.lift.iter().map(|e| e.to_string()).collect();
    let _ = writeln!(out, "# input edges: {}", lift.join(" "));
    if !kernel.forced.is_empty() {
        let forced: Vec<String> = kernel.forced.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "# forced deletions: {}", forced.join(" "));
    }
    out.push_str(&write_ecg_with_comments(&kernel.graph, &[]));
    Ok((out, 0))
}

fn generated(out: Generated) -> String {
    let mut comments = vec![format!("k {}", out.k)];
    comments.extend(out.comments());
    write_ecg_with_comments(&out.graph, &comments)
}

fn cmd_gen(c: &Common, g: &GenCommand) -> Result<(String, u8)> {
    let usage = |e: simfes::generators::GenError| fail(EXIT_USAGE, e.to_string());
    let text = match g {
        GenCommand::Vc3 { input } => generated(gen_vc3(&read_json::<VcInstance>(input)?).map_err(usage)?),
        GenCommand::Hs { input } => generated(gen_hs(&read_json::<HsInstance>(input)?).map_err(usage)?),
        GenCommand::Phs { input } => generated(gen_phs(&read_json::<PhsInstance>(input)?).map_err(usage)?),
        GenCommand::Random { n, m, alpha } => {
            let g = gen_random(*n, *m, *alpha, c.seed).map_err(usage)?;
            write_ecg_with_comments(&g, &[format!("random n={n} m={m} alpha={alpha} seed={}", c.seed)])
        }
    };
    Ok((text, 0))
}

fn cmd_verify(input: &Path, witness: &Path, k: i64) -> Result<(String, u8)> {
    let g = read_graph(input)?;
    let w: BTreeSet<usize> =
        parse_witness(&read(witness)?).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", witness.display())))?;
    let ok = match g.verify_sfes(&w) {
        Ok(ok) => ok,
        Err(e @ GraphError::UnknownEdge(_)) => return Ok((format!("FAIL {e}\n"), EXIT_CHECK)),
        Err(e) => return Err(e.into()),
    };
    if !ok {
        return Ok(("FAIL some color class keeps a cycle\n".into(), EXIT_CHECK));
    }
    if w.len() as i64 > k {
        return Ok((format!("FAIL {} deletions exceed k = {k}\n", w.len()), EXIT_CHECK));
    }
    Ok(("OK\n".into(), 0))
}

struct BenchRow {
    name: String,
    g: EdgeColoredGraph,
}

fn cmd_bench(
    c: &Common,
    inputs: &[PathBuf],
    k: i64,
    corpus: (usize, usize, usize, usize),
    no_timing: bool,
) -> Result<(String, u8)> {
    let (count, n, m, alpha) = corpus;
    let rows: Vec<BenchRow> = if inputs.is_empty() {
        (0..count as u64)
            .map(|i| {
                let seed = c.seed.wrapping_add(i);
                let g = gen_random(n, m, alpha, seed).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
                Ok(BenchRow {
                    name: format!("random-{seed}"),
                    g,
                })
            })
            .collect::<Result<_>>()?
    } else {
        inputs
            .iter()
            .map(|p| {
                Ok(BenchRow {
                    name: p.display().to_string(),
                    g: read_graph(p)?,
                })
            })
            .collect::<Result<_>>()?
    };
    let opts = solve_options(c)?;
    let mut out = String::from("instance,n,m,alpha,k,answer,millis,kernel_vertices\n");
    let mut exponent: f64 = 0.0;
    let mut code = 0;
    for row in &rows {
        let kernel = kernelize(&row.g, k, &KernelOptions::default());
        let start = Instant::now();
        let v = solve_simfes(&row.g, k, &opts)?;
        let millis = if no_timing { 0 } else { start.elapsed().as_millis() };
        // 0 when the rules alone decide the instance
        let kv = if kernel.verdict == KernelVerdict::Reduced {
            kernel.graph.n()
        } else {
            0
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.name,
            row.g.n(),
            row.g.m(),
            row.g.alpha(),
            k,
            yes_no(v.yes),
            millis,
            kv
        );
        let ka = (k.max(0) as f64) * row.g.alpha() as f64;
        if kernel.verdict == KernelVerdict::Reduced && ka >= 2.0 && kv > 1 {
            exponent = exponent.max((kv as f64).ln() / (row.g.alpha() as f64 * ka.ln()));
        }
        if c.oracle && brute_simfes(&row.g, k)?.yes != v.yes {
            eprintln!("oracle mismatch on {}", row.name);
            code = EXIT_CHECK;
        }
    }
    eprintln!("kernel size exponent: |V| <= (k*alpha)^({exponent:.3}*alpha) on this corpus");
    Ok((out, code))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "YES"
    } else {
        "NO"
    }
}

fn run(cli: &Cli) -> Result<(String, u8)> {
    let c = &cli.common;
    let Format::Ecg = c.format;
    if let Some(t) = c.threads {
        par::set_threads(t);
    }
    par::set_parallel(!c.sequential);
    match &cli.command {
        Command::Solve { input, k } => cmd_solve(c, input, *k),
        Command::Maxsim { input, q } => cmd_maxsim(c, input, *q),
        Command::Kernelize {
            input,
            k,
            no_signatures,
        } => cmd_kernelize(input, *k, !no_signatures),
        Command::Gen(g) => cmd_gen(c, g),
        Command::Verify { input, witness, k } => cmd_verify(input, witness, *k),
        Command::Bench {
            inputs,
            k,
            count,
            n,
            m,
            alpha,
            no_timing,
        } => cmd_bench(c, inputs, *k, (*count, *n, *m, *alpha), *no_timing),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok((text, code)) => {
            if let Some(path) = &cli.common.output {
                if let Err(e) = fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            } else {
                print!("{text}");
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Failure>().map_or(EXIT_USAGE, |f| f.code);
            ExitCode::from(code)
        }
    }
}
