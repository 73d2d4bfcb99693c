//! Command-line front end. `run` returns the process exit code.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robloc_core::graph::{to_dot, Built, GraphJson};
use robloc_core::solver::{
    locatability_grid, solve_with, verify_certificate, Certificate, GridFamily, GridRequest,
};
use robloc_core::strategies::{
    robber_policy_girth6, robber_policy_ka3_half, robber_policy_kab, robber_policy_kn_small_m,
    verify_cop_strategy, verify_evasion_family, verify_robber_policy, AnyStrategy, EvasionFamily,
    RobberAnswerPolicy,
};
use robloc_core::{Graph, GraphSpec, Parallelism, SolveBudget, Verdict};
use serde_json::json;

use crate::server::{serve, ServerConfig};

pub const EXIT_COP_WINS: i32 = 0;
pub const EXIT_ROBBER_WINS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_FAILED: i32 = 3;
pub const EXIT_ERROR: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "robloc", version, about = "Solve and play the Robber Locating game on graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the cop can locate the robber. Exit code 0 cop wins,
    /// 1 robber wins, 2 budget exhausted.
    Solve(SolveArgs),
    /// Solve a parameter grid of subdivided complete or complete bipartite graphs.
    Grid(GridArgs),
    /// Check a scripted strategy, robber policy, certificate or evasion family.
    Verify(VerifyArgs),
    /// Build a graph and print it as JSON or Graphviz.
    Build(BuildArgs),
    /// Run the HTTP/JSON service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Builder spec (`K:5`, `Kab:2,3^2`, `H`, `E:0-1,1-2`) or a path to a graph JSON file.
    #[arg(long)]
    pub graph: String,
    /// Subdivide every edge into a path of this length.
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = SolveBudget::default().max_states)]
    pub budget_states: usize,
    #[arg(long, default_value_t = SolveBudget::default().max_seconds)]
    pub budget_seconds: f64,
    /// Worker threads; 1 runs sequentially. Defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl BudgetArgs {
    fn budget(&self) -> SolveBudget {
        SolveBudget::default()
            .with_states(self.budget_states)
            .with_seconds(self.budget_seconds)
    }

    fn parallelism(&self) -> Parallelism {
        Parallelism::from_threads(self.threads)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the graph in Graphviz format.
    #[arg(long)]
    pub export_dot: Option<PathBuf>,
    /// Write the cop policy as JSON when the cop wins.
    #[arg(long)]
    pub policy_out: Option<PathBuf>,
    /// Write the robber certificate as JSON when the robber wins.
    #[arg(long)]
    pub certificate_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub family: GridFamily,
    /// Range `lo..hi` (inclusive) or a single value.
    #[arg(long, value_parser = parse_range)]
    pub n: Option<(u32, u32)>,
    #[arg(long, value_parser = parse_range)]
    pub a: Option<(u32, u32)>,
    #[arg(long, value_parser = parse_range)]
    pub b: Option<(u32, u32)>,
    #[arg(long, value_parser = parse_range)]
    pub m: (u32, u32),
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the grid JSON here, and the text table next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Cop strategy id: H, star, k2b-half, kab, kn.
    #[arg(long, group = "what")]
    pub strategy: Option<String>,
    /// Robber policy id: girth6, kn-small-m, kab, ka3-half.
    #[arg(long, group = "what")]
    pub robber_policy: Option<String>,
    /// Certificate JSON file (`{"states": [[...], ...]}`).
    #[arg(long, group = "what")]
    pub certificate: Option<PathBuf>,
    /// Evasion family JSON file (`{"states": [[...], ...], "lookahead": k}`).
    #[arg(long, group = "what")]
    pub evasion: Option<PathBuf>,
    /// Round cap for cop strategies.
    #[arg(long, default_value_t = 400)]
    pub cap: u32,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = BuildFormat::Json)]
    pub format: BuildFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuildFormat {
    Json,
    Dot,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value_t = ServerConfig::default().max_sessions)]
    pub max_sessions: usize,
    /// Seconds of inactivity before a session may be evicted.
    #[arg(long, default_value_t = ServerConfig::default().idle_timeout.as_secs())]
    pub idle_seconds: u64,
    #[arg(long, default_value_t = ServerConfig::default().max_vertices)]
    pub max_vertices: usize,
    #[arg(long, default_value_t = ServerConfig::default().solve_budget.max_states)]
    pub budget_states: usize,
    #[arg(long, default_value_t = ServerConfig::default().solve_budget.max_seconds)]
    pub budget_seconds: f64,
}

pub fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let num = |x: &str| x.trim().parse::<u32>().map_err(|_| format!("bad number {x:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (num(lo)?, num(hi.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl ToString) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn failure(message: impl ToString) -> CliError {
    CliError {
        code: EXIT_ERROR,
        message: message.to_string(),
    }
}

/// Builds a spec, or loads a graph JSON file when `graph` names one.
pub fn load_graph(args: &GraphArgs) -> Result<(Option<Built>, Graph), CliError> {
    let path = Path::new(&args.graph);
    if args.graph.ends_with(".json") && path.exists() {
        if args.m.is_some() {
            return Err(usage("--m applies to builder specs only"));
        }
        let text = std::fs::read_to_string(path).map_err(failure)?;
        return Ok((None, GraphJson::parse(&text).map_err(usage)?));
    }
    let spec = args.graph.parse::<GraphSpec>().map_err(usage)?.with_m(args.m);
    let built = spec.build().map_err(usage)?;
    let g = built.graph.clone();
    Ok((Some(built), g))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| failure(format!("{}: {e}", path.display())))
}

fn name_of(built: &Option<Built>, args: &GraphArgs) -> String {
    built.as_ref().map_or(args.graph.clone(), |b| b.spec.to_string())
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Grid(a) => cmd_grid(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Build(a) => cmd_build(&a),
        Command::Serve(a) => cmd_serve(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<i32, CliError> {
    let (built, g) = load_graph(&a.graph)?;
    let name = name_of(&built, &a.graph);
    if let Some(p) = &a.export_dot {
        write(p, &to_dot(&g, "G"))?;
    }
    let r = solve_with(&g, &a.budget.budget(), a.budget.parallelism());
    if let (Some(p), Some(policy)) = (&a.policy_out, &r.policy) {
        write(p, &serde_json::to_string_pretty(&policy.to_json()).map_err(failure)?)?;
    }
    if let (Some(p), Some(cert)) = (&a.certificate_out, &r.certificate) {
        write(p, &serde_json::to_string_pretty(cert).map_err(failure)?)?;
    }
    let summary = r.summary();
    match a.format {
        Format::Json => {
            let mut v = serde_json::to_value(&summary).map_err(failure)?;
            v["graph"] = json!(name);
            v["vertices"] = json!(g.vertex_count());
            v["edges"] = json!(g.edge_count());
            println!("{}", serde_json::to_string_pretty(&v).map_err(failure)?);
        }
        Format::Text => {
            println!("graph     {name} ({} vertices, {} edges)", g.vertex_count(), g.edge_count());
            println!("verdict   {}", r.verdict);
            if let Some(k) = r.capture_bound {
                println!("bound     {k} probes");
            }
            if let Some(n) = summary.policy_size {
                println!("policy    {n} states");
            }
            if let Some(n) = summary.certificate_size {
                println!("family    {n} states");
            }
            if let Some(why) = &r.exhausted {
                println!("budget    {why}");
            }
            println!(
                "explored  {} states in {:.3}s",
                r.stats.states_explored, r.stats.wall_seconds
            );
        }
    }
    Ok(match r.verdict {
        Verdict::CopWins => EXIT_COP_WINS,
        Verdict::RobberWins => EXIT_ROBBER_WINS,
        Verdict::Unknown => EXIT_UNKNOWN,
    })
}

fn cmd_grid(a: &GridArgs) -> Result<i32, CliError> {
    let req = GridRequest {
        family: a.family,
        n: a.n,
        a: a.a,
        b: a.b,
        m: a.m,
        budget: a.budget.budget(),
    };
    match a.family {
        GridFamily::Kn if a.n.is_none() => return Err(usage("--family kn needs --n")),
        GridFamily::Kab if a.a.is_none() || a.b.is_none() => {
            return Err(usage("--family kab needs --a and --b"))
        }
        _ => {}
    }
    let grid = locatability_grid(&req, a.budget.parallelism());
    let text = grid.to_text();
    let json = serde_json::to_string_pretty(&grid).map_err(failure)?;
    if let Some(p) = &a.out {
        write(p, &json)?;
        write(&p.with_extension("txt"), &text)?;
    }
    match a.format {
        Format::Json => println!("{json}"),
        Format::Text => print!("{text}"),
    }
    Ok(0)
}

fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| failure(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
}

fn report(format: Format, ok: bool, value: serde_json::Value) -> Result<i32, CliError> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).map_err(failure)?),
        Format::Text => {
            let kind = value["check"].as_str().unwrap_or("check");
            println!("{kind}: {}", if ok { "ok" } else { "failed" });
            for (k, v) in value.as_object().into_iter().flatten() {
                if k != "check" && !v.is_null() && !v.is_array() {
                    println!("  {k}: {v}");
                }
            }
        }
    }
    Ok(if ok { 0 } else { EXIT_FAILED })
}

fn robber_check<P: RobberAnswerPolicy>(g: &Graph, p: &P, family: EvasionFamily) -> (bool, serde_json::Value) {
    let play = verify_robber_policy(g, p);
    let fam = verify_evasion_family(g, &family);
    let ok = play.survives && fam.accepted;
    (
        ok,
        json!({
            "check": "robber_policy",
            "policy": p.name(),
            "survives": play.survives,
            "positions": play.positions,
            "failure": play.failure,
            "family_size": family.len(),
            "lookahead": family.lookahead,
            "family_accepted": fam.accepted,
            "family_failure": fam.reason,
        }),
    )
}

/// Family parameters read off the spec: (n or a, b, m).
fn spec_params(built: &Option<Built>) -> Option<(robloc_core::graph::Family, u32)> {
    built.as_ref().map(|b| (b.spec.family.clone(), b.spec.m.unwrap_or(1)))
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    use robloc_core::graph::Family;
    let (built, g) = load_graph(&a.graph)?;
    let par = Parallelism::from_threads(a.threads);
    if let Some(id) = &a.strategy {
        let built = built
            .as_ref()
            .ok_or_else(|| usage("strategies need a builder spec"))?;
        let s = AnyStrategy::for_spec(id, &built.spec, &g).map_err(usage)?;
        let r = verify_cop_strategy(&g, &s, a.cap);
        let mut v = serde_json::to_value(&r).map_err(failure)?;
        v["check"] = json!("cop_strategy");
        v["capture_bound"] = json!(r.capture_bound());
        return report(a.format, r.wins(), v);
    }
    if let Some(id) = &a.robber_policy {
        let bad = || usage(format!("robber policy {id} does not apply to {}", a.graph.graph));
        let (family, m) = spec_params(&built).ok_or_else(bad)?;
        let (ok, v) = match (id.to_ascii_lowercase().as_str(), family) {
            ("girth6", _) => {
                let p = robber_policy_girth6(&g, None).map_err(usage)?;
                robber_check(&g, &p, p.family(&g))
            }
            ("kn-small-m", Family::Complete { n }) => {
                let p = robber_policy_kn_small_m(&g, n, m).map_err(usage)?;
                robber_check(&g, &p, p.family(&g))
            }
            ("kab", Family::CompleteBipartite { a, b }) => {
                let p = robber_policy_kab(&g, a, b, m).map_err(usage)?;
                robber_check(&g, &p, p.family(&g))
            }
            ("ka3-half", Family::CompleteBipartite { a, b }) => {
                let p = robber_policy_ka3_half(&g, a, b).map_err(usage)?;
                robber_check(&g, &p, p.family(&g))
            }
            _ => return Err(bad()),
        };
        return report(a.format, ok, v);
    }
    if let Some(p) = &a.certificate {
        let cert: Certificate = read_json(p)?;
        let r = verify_certificate(&g, &cert.sets(g.vertex_count()), par);
        let v = json!({"check": "certificate", "valid": r.valid, "states": cert.len(), "reason": r.reason});
        return report(a.format, r.valid, v);
    }
    if let Some(p) = &a.evasion {
        let fam: EvasionFamily = read_json::<EvasionFile>(p)?.into_family(g.vertex_count())?;
        let r = verify_evasion_family(&g, &fam);
        let mut v = serde_json::to_value(&r).map_err(failure)?;
        v["check"] = json!("evasion_family");
        v["states"] = json!(fam.len());
        return report(a.format, r.accepted, v);
    }
    Err(usage("give one of --strategy, --robber-policy, --certificate, --evasion"))
}

#[derive(Debug, serde::Deserialize)]
struct EvasionFile {
    states: Vec<Vec<u32>>,
    lookahead: u32,
}

impl EvasionFile {
    fn into_family(self, n: usize) -> Result<EvasionFamily, CliError> {
        let mut sets = Vec::new();
        for s in self.states {
            if let Some(&v) = s.iter().find(|&&v| v as usize >= n) {
                return Err(usage(format!("vertex {v} out of range")));
            }
            sets.push(robloc_core::VertexSet::from_vertices(n, s));
        }
        Ok(EvasionFamily::new(sets, self.lookahead))
    }
}

fn cmd_build(a: &BuildArgs) -> Result<i32, CliError> {
    let (built, g) = load_graph(&a.graph)?;
    match a.format {
        BuildFormat::Dot => print!("{}", to_dot(&g, "G")),
        BuildFormat::Json => {
            let mut v = serde_json::to_value(GraphJson::from_graph(&g)).map_err(failure)?;
            if let Some(map) = built.as_ref().and_then(|b| b.subdivision.as_ref()) {
                v["subdivision"] = serde_json::to_value(map).map_err(failure)?;
            }
            println!("{}", serde_json::to_string_pretty(&v).map_err(failure)?);
        }
    }
    Ok(0)
}

fn cmd_serve(a: &ServeArgs) -> Result<i32, CliError> {
    let config = ServerConfig {
        max_sessions: a.max_sessions,
        idle_timeout: Duration::from_secs(a.idle_seconds),
        max_vertices: a.max_vertices,
        solve_budget: SolveBudget::default()
            .with_states(a.budget_states)
            .with_seconds(a.budget_seconds),
        ..ServerConfig::default()
    };
    let rt = tokio::runtime::Runtime::new().map_err(failure)?;
    rt.block_on(serve(a.port, config)).map_err(failure)?;
    Ok(0)
}
