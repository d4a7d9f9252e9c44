//! `veerkit`: batch front end. Reads signatures (or files of them), writes one JSON
//! line per input in input order.

mod commands;
mod output;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use commands::{Outcome, Status};

#[derive(Parser, Debug)]
#[command(name = "veerkit", version, about = "Taut polynomials and vertical surgery for veering triangulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Spanning tree of the dual graph: `bfs`, `reverse`, or a comma separated list of faces.
    #[arg(long, global = true, default_value = "bfs")]
    pub tree: String,

    #[arg(long, global = true, value_enum, default_value_t = Route::Matrix)]
    pub route: Route,

    /// Surgery coefficient (1, k).
    #[arg(long, global = true)]
    pub k: Option<usize>,

    /// Surgery curve JSON file.
    #[arg(long, global = true)]
    pub curve: Option<PathBuf>,

    /// Skip inputs with more tetrahedra than this.
    #[arg(long, global = true)]
    pub max_tets: Option<usize>,

    /// Fail (exit 3) if some taut polynomial vanishes.
    #[arg(long, global = true)]
    pub assert_nonzero: bool,

    /// Aligned table instead of JSON lines.
    #[arg(long, global = true)]
    pub pretty: bool,

    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Triangulation, taut structure, colours and sectors of each signature.
    Decode { inputs: Vec<String> },
    /// Canonical signature of a signature or a JSON triangulation.
    Encode { inputs: Vec<String> },
    TautPoly { inputs: Vec<String> },
    Homology { inputs: Vec<String> },
    /// Twisted Alexander polynomial of presentations in `gens:`/`rel:` text format.
    TwistedAlex { inputs: Vec<String> },
    Surgery { inputs: Vec<String> },
    BlowUp { inputs: Vec<String> },
    CensusScan { inputs: Vec<String> },
    CompareRoutes { inputs: Vec<String> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Matrix,
    Fox,
    Both,
}

impl Command {
    fn inputs(&self) -> &[String] {
        match self {
            Command::Decode { inputs }
            | Command::Encode { inputs }
            | Command::TautPoly { inputs }
            | Command::Homology { inputs }
            | Command::TwistedAlex { inputs }
            | Command::Surgery { inputs }
            | Command::BlowUp { inputs }
            | Command::CensusScan { inputs }
            | Command::CompareRoutes { inputs } => inputs,
        }
    }
}

fn signature_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Jobs in input order. Arguments naming files are expanded to their lines; with no
/// arguments standard input is read. Presentations are whole files.
fn collect_jobs(cli: &Cli) -> anyhow::Result<Vec<String>> {
    let args = cli.command.inputs();
    let whole = matches!(cli.command, Command::TwistedAlex { .. });
    let mut jobs = Vec::new();
    if args.is_empty() {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("reading standard input")?;
        if whole {
            jobs.push(text);
        } else {
            jobs.extend(signature_lines(&text));
        }
        return Ok(jobs);
    }
    for a in args {
        let path = std::path::Path::new(a);
        if path.is_file() {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {a}"))?;
            if whole {
                jobs.push(text);
            } else {
                jobs.extend(signature_lines(&text));
            }
        } else if whole || matches!(cli.command, Command::CensusScan { .. }) {
            bail!("no such file: {a}");
        } else {
            jobs.push(a.clone());
        }
    }
    Ok(jobs)
}

fn thread_cap() -> anyhow::Result<usize> {
    let default = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("VEERKIT_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => bail!("VEERKIT_THREADS must be a positive integer, got {v:?}"),
        },
        Err(_) => Ok(default),
    }
}

/// Runs `jobs` on at most `threads` workers; results come back in input order.
fn run_pool<F>(jobs: &[String], threads: usize, work: F) -> Vec<Outcome>
where
    F: Fn(&str) -> Outcome + Sync,
{
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Outcome>>> = Mutex::new(vec![None; jobs.len()]);
    let workers = threads.min(jobs.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let out = work(&jobs[i]);
                slots.lock().unwrap()[i] = Some(out);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|o| o.expect("every job ran")).collect()
}

fn exit_code(outcomes: &[Outcome]) -> u8 {
    // a route disagreement is a bug and trumps everything else
    if outcomes.iter().any(|o| o.status == Status::Inconsistent) {
        2
    } else if outcomes.iter().any(|o| o.status == Status::Failed) {
        1
    } else if outcomes.iter().any(|o| o.status == Status::AssertionFailed) {
        3
    } else {
        0
    }
}

fn real_main() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    let threads = thread_cap()?;
    let ctx = commands::Context::new(&cli)?;
    let jobs = collect_jobs(&cli)?;
    let outcomes = run_pool(&jobs, threads, |job| ctx.run(job));
    let records: Vec<serde_json::Value> = outcomes.iter().filter_map(|o| o.record.clone()).collect();
    let text = if cli.pretty { output::table(&records) } else { output::json_lines(&records) };
    match &cli.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).context("writing output")?;
        }
    }
    Ok(exit_code(&outcomes))
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("veerkit: {e:#}");
            ExitCode::from(1)
        }
    }
}
