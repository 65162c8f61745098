use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use cwl_core::corpus;
use cwl_core::decomp::{exact_pathwidth, verify_certificate, verify_line_decomposition, LineDecomposition, QuasiBoundCertificate};
use cwl_core::json::{certificate_from_json, from_json, graph_from_json, graph_to_json, outcome_to_json, to_canonical};
use cwl_core::minors::{find_superfat, verify_quasi_isometry, verify_superfat, QuasiIsometryMap, SuperfatModel};
use cwl_core::pipeline::{make_schedule, run_pipeline, AuditEntry, CustomTable, Outcome, PipelineConfig, Schedule, ScheduleMode};
use cwl_core::{Graph, TieBreakKind, TieBreaker, VertexSet};

const EXIT_FAIL: u8 = 2;
const EXIT_WITNESS: u8 = 3;
const DEFAULT_BUDGET: usize = 200_000;

#[derive(Parser)]
#[command(name = "cwl", version, about = "Quasi-line-width certificates and fat-minor witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph from one of the built-in families.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run the century pipeline and emit a certificate or a witness.
    Pipeline(PipelineArgs),
    /// Check a payload against a graph.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Exact path-width of a small graph.
    Pathwidth {
        graph: PathBuf,
        /// Where to write an optimal decomposition.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Search for or check a c-superfat H_ℓ model.
    Fatminor {
        #[command(subcommand)]
        mode: FatMode,
    },
}

#[derive(Subcommand)]
enum Family {
    Path { n: usize },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    /// Star with every edge subdivided `s` times.
    SubdividedStar { arms: usize, s: usize },
    /// H_ℓ with every edge subdivided `s` times.
    SubdividedTree { ell: usize, s: usize },
    RandomTree { n: usize, seed: u64 },
}

#[derive(Args)]
struct Budget {
    /// Node budget for each search.
    #[arg(long, env = "CWL_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct PipelineArgs {
    graph: PathBuf,
    #[arg(long = "c", default_value_t = 2)]
    c: usize,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// `paper`, `minimal` or `@file` with a custom table.
    #[arg(long, default_value = "paper")]
    schedule: String,
    /// `lex` or `seed:<n>`.
    #[arg(long, default_value = "lex")]
    tiebreak: String,
    /// Include the audit log in the outcome.
    #[arg(long)]
    audit: bool,
    #[command(flatten)]
    budget: Budget,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyKind {
    Certificate {
        graph: PathBuf,
        payload: PathBuf,
        /// Also require `a` to be at most this.
        #[arg(long)]
        a: Option<usize>,
        /// Also require `b` to be at most this.
        #[arg(long)]
        b: Option<usize>,
    },
    Witness {
        graph: PathBuf,
        payload: PathBuf,
        /// Also require a model of at least this pattern.
        #[arg(long)]
        ell: Option<usize>,
    },
    Decomposition {
        graph: PathBuf,
        payload: PathBuf,
        /// Also require width at most this.
        #[arg(long)]
        width: Option<usize>,
    },
    Qi {
        graph: PathBuf,
        target: PathBuf,
        payload: PathBuf,
    },
}

#[derive(Subcommand)]
enum FatMode {
    Find {
        graph: PathBuf,
        #[arg(long)]
        ell: usize,
        #[arg(long = "c")]
        c: usize,
        #[arg(long, default_value = "lex")]
        tiebreak: String,
        #[command(flatten)]
        budget: Budget,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    Verify {
        graph: PathBuf,
        payload: PathBuf,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    graph_from_json(&read(path)?).with_context(|| format!("parsing graph {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_tiebreak(s: &str) -> anyhow::Result<TieBreakKind> {
    if s == "lex" {
        return Ok(TieBreakKind::Lex);
    }
    match s.strip_prefix("seed:").map(str::parse) {
        Some(Ok(seed)) => Ok(TieBreakKind::Seeded { seed }),
        _ => bail!("tie-breaker must be `lex` or `seed:<n>`, got {s:?}"),
    }
}

fn parse_schedule(s: &str, c: usize, ell: usize) -> anyhow::Result<Schedule> {
    let sched = match s {
        "paper" => make_schedule(c, ell, ScheduleMode::Paper, None)?,
        "minimal" => make_schedule(c, ell, ScheduleMode::Minimal, None)?,
        _ => {
            let Some(path) = s.strip_prefix('@') else {
                bail!("schedule must be `paper`, `minimal` or `@file`, got {s:?}");
            };
            let table: CustomTable = from_json(&read(Path::new(path))?)?;
            make_schedule(c, ell, ScheduleMode::Custom, Some(&table))?
        }
    };
    Ok(sched)
}

fn relabel(set: &VertexSet, map: &[usize]) -> VertexSet {
    set.iter().map(|v| map[v]).collect()
}

fn relabel_certificate(cert: QuasiBoundCertificate, map: &[usize]) -> QuasiBoundCertificate {
    QuasiBoundCertificate {
        subject: relabel(&cert.subject, map),
        decomposition: LineDecomposition::new(cert.decomposition.bags.iter().map(|b| relabel(b, map)).collect()),
        bag_centers: cert.bag_centers.iter().map(|b| relabel(b, map)).collect(),
        boundary_centers: relabel(&cert.boundary_centers, map),
        ..cert
    }
}

fn relabel_model(m: SuperfatModel, map: &[usize]) -> SuperfatModel {
    SuperfatModel {
        eta: m.eta.iter().map(|(x, s)| (*x, relabel(s, map))).collect(),
        ..m
    }
}

/// Runs each component separately; certificates are concatenated and the
/// first witness wins.
fn run_components(g: &Graph, kind: TieBreakKind, sched: &Schedule, config: &PipelineConfig) -> anyhow::Result<(Outcome, Vec<AuditEntry>)> {
    let comps = g.components();
    if comps.len() == 1 {
        let run = run_pipeline(g, &TieBreaker::from_kind(g, kind), sched, config)?;
        return Ok((run.outcome, run.audit));
    }
    let mut audit = Vec::new();
    let mut certs = Vec::new();
    for comp in &comps {
        let (h, map) = g.induced_subgraph(comp);
        audit.push(AuditEntry {
            century: 0,
            op: "component".into(),
            detail: format!("{} vertices from {}", h.n(), map[0]),
        });
        let run = run_pipeline(&h, &TieBreaker::from_kind(&h, kind), sched, config)?;
        audit.extend(run.audit);
        match run.outcome {
            Outcome::Witness(m) => return Ok((Outcome::Witness(relabel_model(m, &map)), audit)),
            Outcome::Certificate(c) => certs.push(relabel_certificate(c, &map)),
        }
    }
    let cert = QuasiBoundCertificate::concat(g, &certs);
    if let Some(v) = verify_certificate(g, &cert)? {
        bail!("concatenated certificate fails: {v}");
    }
    Ok((Outcome::Certificate(cert), audit))
}

fn cmd_pipeline(args: &PipelineArgs) -> anyhow::Result<u8> {
    let g = read_graph(&args.graph)?;
    if g.n() == 0 {
        bail!("the graph is empty");
    }
    let sched = parse_schedule(&args.schedule, args.c, args.ell)?;
    let kind = parse_tiebreak(&args.tiebreak)?;
    let config = PipelineConfig {
        budget: args.budget.budget,
    };
    let (outcome, audit) = run_components(&g, kind, &sched, &config)?;
    let audit = if args.audit { audit } else { Vec::new() };
    emit(&args.out, &outcome_to_json(&outcome, &audit)?)?;
    Ok(match outcome {
        Outcome::Certificate(c) => {
            eprintln!("certificate: quasi-bound ({}, {})", c.a, c.b);
            0
        }
        Outcome::Witness(m) => {
            eprintln!("witness: {}-superfat H_{} model", m.c, m.pattern_ell);
            EXIT_WITNESS
        }
    })
}

fn verdict(failure: Option<String>) -> u8 {
    match failure {
        None => {
            println!("ok");
            0
        }
        Some(why) => {
            eprintln!("FAIL: {why}");
            EXIT_FAIL
        }
    }
}

fn read_witness(path: &Path) -> anyhow::Result<SuperfatModel> {
    let v: serde_json::Value = from_json(&read(path)?)?;
    let inner = if v.get("outcome").is_some() { v["payload"].clone() } else { v };
    Ok(serde_json::from_value(inner).context("parsing witness")?)
}

fn cmd_verify(kind: &VerifyKind) -> anyhow::Result<u8> {
    let failure = match kind {
        VerifyKind::Certificate { graph, payload, a, b } => {
            let g = read_graph(graph)?;
            let cert = certificate_from_json(&read(payload)?)?;
            match verify_certificate(&g, &cert)? {
                Some(v) => Some(v.to_string()),
                None if a.is_some_and(|a| cert.a > a) => Some(format!("bound: a = {} exceeds {}", cert.a, a.unwrap())),
                None if b.is_some_and(|b| cert.b > b) => Some(format!("bound: b = {} exceeds {}", cert.b, b.unwrap())),
                None if cert.subject != g.vertices() => Some("coverage: the subject is not the whole graph".into()),
                None => None,
            }
        }
        VerifyKind::Witness { graph, payload, ell } => {
            let g = read_graph(graph)?;
            let m = read_witness(payload)?;
            match verify_superfat(&g, &m) {
                Some(v) => Some(v.to_string()),
                None if ell.is_some_and(|l| m.pattern_ell < l) => Some(format!("pattern: H_{} is smaller than required", m.pattern_ell)),
                None => None,
            }
        }
        VerifyKind::Decomposition { graph, payload, width } => {
            let g = read_graph(graph)?;
            let d: LineDecomposition = from_json(&read(payload)?)?;
            match verify_line_decomposition(&g, &g.vertices(), &d)? {
                Some(v) => Some(v.to_string()),
                None => {
                    let w = d.width()?;
                    println!("width {w}");
                    width.filter(|&k| w > k).map(|k| format!("width: {w} exceeds {k}"))
                }
            }
        }
        VerifyKind::Qi { graph, target, payload } => {
            let g = read_graph(graph)?;
            let h = read_graph(target)?;
            let q: QuasiIsometryMap = from_json(&read(payload)?)?;
            verify_quasi_isometry(&g, &h, &q).map(|v| v.to_string())
        }
    };
    Ok(verdict(failure))
}

fn cmd_fatminor(mode: &FatMode) -> anyhow::Result<u8> {
    match mode {
        FatMode::Find {
            graph,
            ell,
            c,
            tiebreak,
            budget,
            out,
        } => {
            let g = read_graph(graph)?;
            let tb = TieBreaker::from_kind(&g, parse_tiebreak(tiebreak)?);
            let found = find_superfat(&g, &tb, *ell, *c, budget.budget)?;
            match found.model {
                Some(m) => {
                    emit(out, &to_canonical(&m)?)?;
                    eprintln!("found: {c}-superfat H_{ell} model");
                    Ok(EXIT_WITNESS)
                }
                None if found.absent => {
                    println!("absent: no H_{ell} minor at all");
                    Ok(0)
                }
                None => {
                    println!("none found within budget (incomplete)");
                    Ok(0)
                }
            }
        }
        FatMode::Verify { graph, payload } => {
            let g = read_graph(graph)?;
            let m = read_witness(payload)?;
            Ok(verdict(verify_superfat(&g, &m).map(|v| v.to_string())))
        }
    }
}

fn cmd_gen(family: &Family, out: &Option<PathBuf>) -> anyhow::Result<u8> {
    let g = match *family {
        Family::Path { n } => corpus::path(n),
        Family::Cycle { n } => corpus::cycle(n)?,
        Family::Grid { rows, cols } => corpus::grid(rows, cols),
        Family::SubdividedStar { arms, s } => corpus::subdivided_star(arms, s),
        Family::SubdividedTree { ell, s } => corpus::subdivided_tree(ell, s),
        Family::RandomTree { n, seed } => corpus::random_tree(n, seed),
    };
    if g.n() == 0 {
        bail!("size parameters must be positive");
    }
    emit(out, &graph_to_json(&g)?)?;
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Gen { family, out } => cmd_gen(&family, &out),
        Command::Pipeline(args) => cmd_pipeline(&args),
        Command::Verify { kind } => cmd_verify(&kind),
        Command::Pathwidth { graph, out } => {
            let g = read_graph(&graph)?;
            let (w, d) = exact_pathwidth(&g)?;
            println!("{w}");
            if out.is_some() {
                emit(&out, &to_canonical(&d)?)?;
            }
            Ok(0)
        }
        Command::Fatminor { mode } => cmd_fatminor(&mode),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
