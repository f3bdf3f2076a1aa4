use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use auctionlab::format::{
    parse_edge_list, parse_instance, trace_to_json, validate, InstanceDoc, MatchingDoc, TraceDoc,
};
use auctionlab::generators::{
    adversary_vs_policy, gap_instance, random_2paa, random_2pm, random_perfect_2pm, sample_chain, ChainVariant,
};
use auctionlab::harness::{records_to_csv, run_experiment, Params, Suite, Verdict};
use auctionlab::offline::{reverse_match, top_c};
use auctionlab::online::{
    left_k_copy, run_online, run_online_matching, FirstAvailable, Greedy, OnlinePolicy, Ranking, RankingSimulate,
    SkipAll,
};
use auctionlab::reductions::{extract_vertex_cover, partition_to_2paa, vc_to_2pm};
use auctionlab::{execute, max_matching, opt_1paa, opt_2paa, opt_2pm, AuctionTrace, Instance, Money, SearchLimits};

#[derive(Parser)]
#[command(name = "auctionlab", version, about = "Second-price ad auction allocation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Structured,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    TopC,
    ReverseMatch,
    Greedy,
    SkipAll,
    FirstAvailable,
    Ranking,
    RankingSimulate,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    MaxMatching,
    #[value(name = "opt-2pm")]
    Opt2pm,
    #[value(name = "opt-2paa")]
    Opt2paa,
    #[value(name = "opt-1paa")]
    Opt1paa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Gap,
    Adversary,
    Chain,
    #[value(name = "random-2pm")]
    Random2pm,
    #[value(name = "random-2paa")]
    Random2paa,
    #[value(name = "perfect-2pm")]
    Perfect2pm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    Partition,
    VertexCover,
}

#[derive(Subcommand)]
enum Command {
    /// Run an allocation algorithm on an instance.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Number of keywords kept by top-c.
        #[arg(long)]
        c: Option<usize>,
        /// Replace the instance by its left k-copy first.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "structured")]
        format: Format,
    },
    /// Compute an exact optimum on a small instance.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: OracleKind,
        #[arg(long, default_value_t = SearchLimits::default().max_nodes)]
        max_nodes: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "structured")]
        format: Format,
    },
    /// Write a generated instance.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        /// k=v,... (gap: c,k; adversary: policy,m; chain: m,variant;
        /// random-2pm: keywords,bidders,p; random-2paa: keywords,bidders,max_bid,r_min;
        /// perfect-2pm: n,p)
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a hardness gadget, or read a cover back from a gadget trace.
    Reduce {
        #[arg(long, value_enum)]
        kind: ReduceKind,
        /// Weights (partition) or an edge list (vertex-cover).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        c: usize,
        /// Trace on the vertex-cover gadget to turn into a cover.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded experiment suite.
    Experiment {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "")]
        params: String,
        /// Per-trial records.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary document (stdout when absent).
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Check an instance document and list every violation.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Usage or input problem: exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure(format!("{what} is randomized: --seed is required")))
}

fn render_trace(instance: &Instance, trace: &AuctionTrace, format: Format) -> String {
    match format {
        Format::Structured => trace_to_json(instance, trace),
        Format::Csv => TraceDoc::from_trace(instance, trace).to_csv(),
    }
}

fn render_matching(doc: &MatchingDoc, format: Format) -> String {
    match format {
        Format::Structured => serde_json::to_string_pretty(doc).expect("matching serializes"),
        Format::Csv => {
            let mut s = String::from("keyword,bidder\n");
            for p in &doc.pairs {
                s.push_str(&format!("{},{}\n", p.keyword, p.bidder));
            }
            s
        }
    }
}

fn solve(
    input: &Path,
    algorithm: Algorithm,
    c: Option<usize>,
    k: Option<usize>,
    seed: Option<u64>,
    out: Option<&Path>,
    format: Format,
) -> Outcome {
    let mut instance = parse_instance(&read(input)?)?;
    if let Some(k) = k {
        instance = left_k_copy(&instance, k)?.instance;
    }
    let trace = match algorithm {
        Algorithm::TopC => {
            let c = c.ok_or_else(|| Failure("top-c needs --c".into()))?;
            let res = top_c(&instance, c)?;
            if res.truncation_possible {
                eprintln!("warning: r_min < c, budgets may cut bids and the top-c bound does not apply");
            }
            res.trace
        }
        Algorithm::ReverseMatch => {
            let res = reverse_match(&instance)?;
            for u in &res.dropped {
                eprintln!(
                    "warning: keyword {} has fewer than two bidders; skipped",
                    instance.keyword_id(*u)
                );
            }
            res.trace
        }
        Algorithm::Ranking => {
            let seed = need_seed(seed, "ranking")?;
            let m = run_online_matching(&instance, &mut Ranking::new(), seed)?;
            let doc = MatchingDoc::from_matching(&instance, &m);
            emit(out, &render_matching(&doc, format))?;
            return Ok(true);
        }
        Algorithm::Greedy | Algorithm::SkipAll | Algorithm::FirstAvailable | Algorithm::RankingSimulate => {
            let mut policy: Box<dyn OnlinePolicy> = match algorithm {
                Algorithm::Greedy => Box::new(Greedy),
                Algorithm::SkipAll => Box::new(SkipAll),
                Algorithm::FirstAvailable => Box::new(FirstAvailable),
                _ => Box::new(RankingSimulate::new()),
            };
            let seed = if policy.is_deterministic() {
                seed.unwrap_or(0)
            } else {
                need_seed(seed, policy.name())?
            };
            run_online(&instance, policy.as_mut(), seed)?
        }
    };
    emit(out, &render_trace(&instance, &trace, format))?;
    Ok(true)
}

fn oracle(input: &Path, kind: OracleKind, max_nodes: u64, out: Option<&Path>, format: Format) -> Outcome {
    let instance = parse_instance(&read(input)?)?;
    let limits = SearchLimits::nodes(max_nodes);
    let text = match kind {
        OracleKind::MaxMatching => {
            render_matching(&MatchingDoc::from_matching(&instance, &max_matching(&instance)), format)
        }
        OracleKind::Opt2pm => render_trace(&instance, &opt_2pm(&instance, limits)?.witness, format),
        OracleKind::Opt2paa => render_trace(&instance, &opt_2paa(&instance, limits)?.witness, format),
        OracleKind::Opt1paa => {
            let res = opt_1paa(&instance, limits)?;
            let winners: Vec<serde_json::Value> = res
                .witness
                .winners()
                .iter()
                .enumerate()
                .map(|(u, w)| {
                    serde_json::json!({
                        "keyword": instance.keyword_id(u),
                        "winner": w.map(|v| instance.bidder(v).id.clone()),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({ "value": res.value, "allocation": winners }))?
        }
    };
    emit(out, &text)?;
    Ok(true)
}

fn generate(family: Family, params: &str, seed: Option<u64>, out: Option<&Path>) -> Outcome {
    let p = Params::parse(params)?;
    let instance = match family {
        Family::Gap => gap_instance(p.get("c", 2usize)?, p.get("k", 3usize)?)?,
        Family::Adversary => {
            let mut policy: Box<dyn OnlinePolicy> = match p.get("policy", String::from("greedy"))?.as_str() {
                "greedy" => Box::new(Greedy),
                "skip-all" => Box::new(SkipAll),
                "first-available" => Box::new(FirstAvailable),
                other => return Err(Failure(format!("unknown deterministic policy {other:?}"))),
            };
            let tr = adversary_vs_policy(policy.as_mut(), p.get("m", 5usize)?)?;
            eprintln!("policy {} value {}", tr.policy, tr.policy_value());
            tr.instance
        }
        Family::Chain => {
            let variant = match p.get("variant", String::from("normal"))?.as_str() {
                "normal" => ChainVariant::Normal,
                "restricted" => ChainVariant::Restricted,
                other => return Err(Failure(format!("unknown chain variant {other:?}"))),
            };
            sample_chain(p.get("m", 9usize)?, variant, need_seed(seed, "chain")?)?.instance
        }
        Family::Random2pm => random_2pm(
            p.get("keywords", 8usize)?,
            p.get("bidders", 8usize)?,
            p.get("p", 0.3f64)?,
            need_seed(seed, "random-2pm")?,
        )?,
        Family::Random2paa => random_2paa(
            p.get("keywords", 8usize)?,
            p.get("bidders", 5usize)?,
            p.get("max_bid", 10 as Money)?,
            p.get("r_min", 2 as Money)?,
            need_seed(seed, "random-2paa")?,
        )?,
        Family::Perfect2pm => random_perfect_2pm(
            p.get("n", 6usize)?,
            p.get("p", 0.3f64)?,
            need_seed(seed, "perfect-2pm")?,
        )?,
    };
    emit(out, &auctionlab::format::instance_to_json(&instance))?;
    Ok(true)
}

fn parse_weights(text: &str) -> Result<Vec<Money>, Failure> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    trimmed
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Money>().map_err(|e| Failure(format!("weight {t:?}: {e}"))))
        .collect()
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".roles.json");
    PathBuf::from(name)
}

fn reduce(kind: ReduceKind, input: &Path, c: usize, trace: Option<&Path>, out: Option<&Path>) -> Outcome {
    let text = read(input)?;
    let (instance, roles) = match kind {
        ReduceKind::Partition => {
            let g = partition_to_2paa(&parse_weights(&text)?, c)?;
            let roles = serde_json::to_string_pretty(&g.roles())?;
            (g.instance, roles)
        }
        ReduceKind::VertexCover => {
            let g = vc_to_2pm(&parse_edge_list(&text)?)?;
            if let Some(tp) = trace {
                let doc: TraceDoc = serde_json::from_str(&read(tp)?)?;
                let t = execute(&g.instance, &doc.actions(&g.instance)?)?;
                let ex = extract_vertex_cover(&g, &t)?;
                let cover: Vec<&str> = ex.cover.iter().map(|&v| g.graph.labels[v].as_str()).collect();
                let report = serde_json::json!({
                    "cover": cover,
                    "size": cover.len(),
                    "trace_value": t.value(),
                    "normalized_value": ex.normalized.value(),
                });
                emit(out, &serde_json::to_string_pretty(&report)?)?;
                return Ok(true);
            }
            let roles = serde_json::to_string_pretty(&g.roles())?;
            (g.instance, roles)
        }
    };
    emit(out, &auctionlab::format::instance_to_json(&instance))?;
    match out {
        Some(p) => fs::write(sidecar(p), roles).map_err(|e| Failure(e.to_string()))?,
        None => eprintln!("{roles}"),
    }
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn experiment(
    suite: &str,
    trials: u64,
    seed: Option<u64>,
    params: &str,
    out: Option<&Path>,
    summary: Option<&Path>,
    workers: Option<usize>,
    format: Format,
) -> Outcome {
    let suite: Suite = suite.parse()?;
    let seed = need_seed(seed, "experiment")?;
    let exp = run_experiment(suite, &Params::parse(params)?, trials, seed, workers)?;
    if let Some(p) = out {
        let text = match format {
            Format::Csv => records_to_csv(&exp.records),
            Format::Structured => serde_json::to_string_pretty(&exp.records)?,
        };
        emit(Some(p), &text)?;
    }
    emit(summary, &serde_json::to_string_pretty(&exp.report)?)?;
    eprintln!(
        "{}: mean {:.4} (se {:.4}) over {} trials, {} skipped: {}",
        suite,
        exp.report.mean,
        exp.report.se,
        exp.report.trials,
        exp.report.skipped,
        if exp.report.verdict == Verdict::Pass {
            "pass"
        } else {
            "FAIL"
        }
    );
    Ok(exp.report.verdict == Verdict::Pass)
}

fn validate_cmd(input: &Path) -> Outcome {
    let doc: InstanceDoc = serde_json::from_str(&read(input)?)?;
    let report = validate(&doc);
    println!("{report}");
    Ok(report.is_valid())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            input,
            algorithm,
            c,
            k,
            seed,
            out,
            format,
        } => solve(&input, algorithm, c, k, seed, out.as_deref(), format),
        Command::Oracle {
            input,
            kind,
            max_nodes,
            out,
            format,
        } => oracle(&input, kind, max_nodes, out.as_deref(), format),
        Command::Generate {
            family,
            params,
            seed,
            out,
        } => generate(family, &params, seed, out.as_deref()),
        Command::Reduce {
            kind,
            input,
            c,
            trace,
            out,
        } => reduce(kind, &input, c, trace.as_deref(), out.as_deref()),
        Command::Experiment {
            suite,
            trials,
            seed,
            params,
            out,
            summary,
            workers,
            format,
        } => experiment(
            &suite,
            trials,
            seed,
            &params,
            out.as_deref(),
            summary.as_deref(),
            workers,
            format,
        ),
        Command::Validate { input } => validate_cmd(&input),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
