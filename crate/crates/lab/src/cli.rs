use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sperner_core::antichain::max_antichain_exact;
use sperner_core::bounds::union_bound_report;
use sperner_core::container::{
    build_containers, check_invariants, rebuild_matches, ContainerParams, InvariantReport,
    TieOrder,
};
use sperner_core::enumeration::{census, greedy_middle_layers, proposition_bracket, CENSUS_MAX_N};
use sperner_core::sampling::{ExperimentPoint, ExperimentRow};
use sperner_core::VertexSet;

use crate::drivers::{kleitman_rows, run_experiment, Jobs, KleitmanMode};
use crate::error::{ExitCode, LabError, LabResult};
use crate::io::{
    csv_bytes, csv_with_header, emit, format_vertex_set, json_bytes, read_vertex_set,
};
use crate::manifest::{manifest_path_for, RunManifest, BUILD_ID};
use crate::selftest::{self, Status};

#[derive(Parser, Debug)]
#[command(name = "sperner", version = BUILD_ID, about = "Antichains in the Boolean lattice and in random subsets of it")]
pub struct Cli {
    /// Worker threads: `max` or a positive integer. Output does not depend on it.
    #[arg(long, global = true, default_value = "max")]
    pub jobs: Jobs,
    /// Fill the `millis` columns with wall-clock times (otherwise 0).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Where to write the run manifest.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TieArg {
    Bitmask,
    Centrality,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Induced edges of centrality-order initial segments against the true minimum.
    Kleitman {
        #[arg(long)]
        n: u32,
        #[arg(long, conflicts_with = "all_r")]
        r: Option<u64>,
        #[arg(long)]
        all_r: bool,
        /// Enumerate every subset (n <= 4).
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        /// Random subsets per r.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-phase container construction for an antichain read from a VertexSet file.
    Containers {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        input: PathBuf,
        /// One JSON object per step.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TieArg::Bitmask)]
        tie_order: TieArg,
        /// Accept eps in (0, 1] instead of (0, 1/(2t)^(t+1)].
        #[arg(long)]
        relaxed_eps: bool,
        /// Directory for s1.txt, s2.txt, f_s1.txt, g.txt and report.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Exact maximum antichain of a VertexSet file.
    Maxantichain {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Re-check the chain-cover certificate.
        #[arg(long)]
        certificate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum antichains of random subsets P(n)_p.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Log-space evaluation of the union bound at n = 10^k.
    Bounds {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long = "n-exp")]
        n_exp: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Antichains of P(n) by size (n <= 6).
    Census {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy antichain of size s inside the t middle layers.
    Greedy {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        s: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Log bracket around the number of s-antichains.
    Bracket {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in invariant checks.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExperimentCommand {
    /// p = c/n for each c.
    Threshold {
        #[arg(long)]
        n: u32,
        #[arg(long = "c-list", value_delimiter = ',', required = true)]
        c_list: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed p, ratio against p m t.
    Window {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 30)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXPERIMENT_HEADER: [&str; 10] = [
    "mode",
    "n",
    "t",
    "c_or_p",
    "trial",
    "sample_size",
    "alpha",
    "pm_t",
    "ratio",
    "millis",
];

#[derive(Serialize)]
struct MaxRow {
    alpha: u64,
    matching_size: u64,
    edges: u64,
    millis: u64,
}

#[derive(Serialize)]
struct CensusRow {
    s: usize,
    count: u64,
}

#[derive(Serialize)]
struct ContainerReport<'a> {
    n: u32,
    t: u32,
    eps: f64,
    theta1: f64,
    theta2: f64,
    tie_order: &'a str,
    eps_in_lemma_range: bool,
    invariants: InvariantReport,
    failures: Vec<&'static str>,
    idempotent: bool,
}

#[derive(Serialize)]
struct BracketReport {
    n: u32,
    s: u64,
    t: u32,
    eps: f64,
    lower: f64,
    upper: f64,
    slack: u64,
    pool: u64,
    max_degree: u64,
    /// `ln` of the exact count, when n is small enough to enumerate.
    census_log_count: Option<f64>,
}

struct Context<'a> {
    manifest: &'a mut RunManifest,
    timing: bool,
}

impl Context<'_> {
    fn emit(&mut self, path: Option<&Path>, bytes: Vec<u8>) -> LabResult<()> {
        let emitted = emit(path, bytes)?;
        self.manifest.output(&emitted);
        Ok(())
    }

    fn read(&mut self, path: &Path) -> LabResult<VertexSet> {
        let (set, bytes) = read_vertex_set(path)?;
        self.manifest.input(path, &bytes);
        Ok(set)
    }
}

/// Parses `args` (program name first) and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut manifest = RunManifest::start(command_line, cli.jobs.threads());
    let always_manifest = matches!(cli.command, Command::Experiment(_));

    let outcome = cli
        .jobs
        .install(|| {
            let mut ctx = Context {
                manifest: &mut manifest,
                timing: cli.timing,
            };
            dispatch(&cli.command, &mut ctx)
        })
        .and_then(|r| r);
    let code = match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    } as i32;

    manifest.finish(code);
    let target = cli
        .manifest
        .clone()
        .or_else(|| manifest.primary_file().map(|p| manifest_path_for(&p)));
    if target.is_some() || always_manifest {
        if let Err(e) = manifest.write(target.as_deref()) {
            eprintln!("error: {e}");
            return ExitCode::Usage as i32;
        }
    }
    code
}

fn dispatch(command: &Command, ctx: &mut Context<'_>) -> LabResult<ExitCode> {
    match command {
        Command::Kleitman {
            n,
            r,
            all_r,
            exhaustive,
            samples,
            seed,
            out,
        } => {
            let rs: Vec<u64> = match (r, all_r) {
                (Some(r), false) => vec![*r],
                (None, true) => (0..=1u64 << (*n).min(31)).collect(),
                _ => return Err(LabError::Usage("give exactly one of --r or --all-r".into())),
            };
            let mode = match (exhaustive, samples) {
                (true, _) => KleitmanMode::Exhaustive,
                (false, Some(samples)) => {
                    ctx.manifest.seeds.push(*seed);
                    KleitmanMode::Randomized {
                        samples: *samples,
                        seed: *seed,
                    }
                }
                (false, None) => {
                    return Err(LabError::Usage("give --exhaustive or --samples".into()))
                }
            };
            let rows = kleitman_rows(*n, &rs, mode)?;
            ctx.emit(out.as_deref(), csv_bytes(&rows)?)?;
            let failed: Vec<u64> = rows.iter().filter(|r| !r.verified).map(|r| r.r).collect();
            if !failed.is_empty() {
                eprintln!("segments beaten by some subset at r = {failed:?}");
                return Ok(ExitCode::Failure);
            }
            Ok(ExitCode::Ok)
        }

        Command::Containers {
            n,
            t,
            eps,
            input,
            trace,
            tie_order,
            relaxed_eps,
            out_dir,
        } => {
            let set = ctx.read(input)?;
            if set.n() != *n {
                return Err(LabError::Usage(format!(
                    "{} holds a subset of P({}), not P({n})",
                    input.display(),
                    set.n()
                )));
            }
            let params = if *relaxed_eps {
                ContainerParams::relaxed(*n, *t, *eps)?
            } else {
                ContainerParams::new(*n, *t, *eps)?
            };
            let (params, tie_name) = match tie_order {
                TieArg::Bitmask => (params.with_tie_order(TieOrder::Bitmask), "bitmask"),
                TieArg::Centrality => (params.with_tie_order(TieOrder::Centrality), "centrality"),
            };
            let result = build_containers(&set, &params, trace.is_some())?;
            let invariants = check_invariants(&set, &result, &params);
            let idempotent = rebuild_matches(&result, &params)?;
            if let (Some(path), Some(steps)) = (trace, &result.trace) {
                let mut bytes = Vec::new();
                for step in steps {
                    serde_json::to_writer(&mut bytes, step)
                        .map_err(|e| LabError::Failed(format!("json: {e}")))?;
                    bytes.push(b'\n');
                }
                ctx.emit(Some(path), bytes)?;
            }
            let report = ContainerReport {
                n: *n,
                t: *t,
                eps: *eps,
                theta1: params.theta1(),
                theta2: params.theta2(),
                tie_order: tie_name,
                eps_in_lemma_range: params.in_lemma_range(),
                failures: invariants.failures(),
                invariants,
                idempotent,
            };
            let report_bytes = json_bytes(&report)?;
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
                    ctx.emit(Some(&dir.join("report.json")), report_bytes)?;
                    for (name, part) in [
                        ("s1.txt", &result.s1),
                        ("s2.txt", &result.s2),
                        ("f_s1.txt", &result.f_s1),
                        ("g.txt", &result.g),
                    ] {
                        ctx.emit(Some(&dir.join(name)), format_vertex_set(part).into_bytes())?;
                    }
                }
                None => ctx.emit(None, report_bytes)?,
            }
            if !report.failures.is_empty() || !idempotent {
                eprintln!(
                    "container postconditions violated: {:?}, idempotent: {idempotent}",
                    report.failures
                );
                return Ok(ExitCode::Failure);
            }
            Ok(ExitCode::Ok)
        }

        Command::Maxantichain {
            input,
            witness,
            certificate,
            out,
        } => {
            let set = ctx.read(input)?;
            let start = Instant::now();
            let w = max_antichain_exact(&set)?;
            let millis = if ctx.timing {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            let row = MaxRow {
                alpha: w.alpha,
                matching_size: w.matching_size,
                edges: w.edges,
                millis,
            };
            ctx.emit(out.as_deref(), csv_bytes(&[row])?)?;
            if let Some(path) = witness {
                let text = format_vertex_set(&w.antichain_set(set.n()));
                ctx.emit(Some(path), text.into_bytes())?;
            }
            if *certificate {
                if !w.verify(&set) {
                    eprintln!("certificate rejected");
                    return Ok(ExitCode::Failure);
                }
                eprintln!(
                    "certificate: antichain of {} and cover by {} chains",
                    w.alpha,
                    w.chain_cover.len()
                );
            }
            Ok(ExitCode::Ok)
        }

        Command::Experiment(sub) => {
            let (points, trials, seed, out) = match sub {
                ExperimentCommand::Threshold {
                    n,
                    c_list,
                    trials,
                    seed,
                    out,
                } => {
                    let points = c_list
                        .iter()
                        .map(|&c| ExperimentPoint::threshold(*n, c))
                        .collect::<Result<Vec<_>, _>>()?;
                    (points, *trials, *seed, out)
                }
                ExperimentCommand::Window {
                    n,
                    t,
                    p,
                    trials,
                    seed,
                    out,
                } => (vec![ExperimentPoint::window(*n, *t, *p)?], *trials, *seed, out),
            };
            if trials == 0 {
                return Err(LabError::Usage("--trials must be at least 1".into()));
            }
            ctx.manifest.seeds.push(seed);
            let outcome = run_experiment(&points, trials, seed, ctx.timing)?;
            let rows: &[ExperimentRow] = &outcome.rows;
            ctx.emit(out.as_deref(), csv_with_header(&EXPERIMENT_HEADER, rows)?)?;
            for s in &outcome.skipped {
                eprintln!("skipped c_or_p={}: {}", s.c_or_p, s.reason);
            }
            Ok(if outcome.skipped.is_empty() {
                ExitCode::Ok
            } else {
                ExitCode::Refused
            })
        }

        Command::Bounds { t, eps, n_exp, out } => {
            let report = union_bound_report(*n_exp, *t, *eps)?;
            ctx.emit(out.as_deref(), json_bytes(&report)?)?;
            if !report.total_negative {
                eprintln!("total log of the union bound is not negative");
                return Ok(ExitCode::Failure);
            }
            Ok(ExitCode::Ok)
        }

        Command::Census { n, out } => {
            if *n > CENSUS_MAX_N {
                return Err(sperner_core::Error::Feasibility(format!(
                    "antichain census is limited to n <= {CENSUS_MAX_N}"
                ))
                .into());
            }
            let c = census(*n)?;
            let rows: Vec<CensusRow> = c
                .counts
                .iter()
                .enumerate()
                .map(|(s, &count)| CensusRow { s, count })
                .collect();
            ctx.emit(out.as_deref(), csv_bytes(&rows)?)?;
            Ok(ExitCode::Ok)
        }

        Command::Greedy { n, t, s, seed, out } => {
            ctx.manifest.seeds.push(*seed);
            let set = greedy_middle_layers(*n, *t, *s, *seed)?;
            ctx.emit(out.as_deref(), format_vertex_set(&set).into_bytes())?;
            Ok(ExitCode::Ok)
        }

        Command::Bracket { n, s, t, eps, out } => {
            let b = proposition_bracket(*n, *s, *t, *eps)?;
            let census_log_count = if *n <= CENSUS_MAX_N {
                let c = census(*n)?;
                c.counts
                    .get(*s as usize)
                    .filter(|&&k| k > 0)
                    .map(|&k| (k as f64).ln())
            } else {
                None
            };
            let report = BracketReport {
                n: *n,
                s: *s,
                t: *t,
                eps: *eps,
                lower: b.lower,
                upper: b.upper,
                slack: b.slack,
                pool: b.pool,
                max_degree: b.max_degree,
                census_log_count,
            };
            ctx.emit(out.as_deref(), json_bytes(&report)?)?;
            Ok(ExitCode::Ok)
        }

        Command::Selftest { quick } => {
            let checks = selftest::run(*quick);
            let mut text = String::new();
            for c in &checks {
                let line = match c.status {
                    Status::Pass => format!("ok    {}\n", c.name),
                    Status::Fail => format!("FAIL  {}: {}\n", c.name, c.detail),
                    Status::Info => format!("info  {}: {}\n", c.name, c.detail),
                };
                text.push_str(&line);
            }
            ctx.emit(None, text.into_bytes())?;
            Ok(if checks.iter().all(selftest::Check::passed) {
                ExitCode::Ok
            } else {
                ExitCode::Failure
            })
        }
    }
}
