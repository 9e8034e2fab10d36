use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use gsx::oracle::DEFAULT_CAP;
use gsx::planners::{execute_plan, execute_plan_with, plan, verify_statevector, verify_tableau, ExtractionRequest, Strategy};
use gsx::primitives::Plan;
use gsx::render::{render_ascii, render_svg};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Ascii,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Verify {
    Off,
    Graph,
    Statevector,
    Tableau,
}

/// Plan the extraction of a graph state from a 2D cluster state.
#[derive(Parser, Debug)]
#[command(name = "gsx", version)]
struct Cli {
    /// Request JSON, or a plan JSON written by an earlier run.
    #[arg(long)]
    input: PathBuf,
    /// Overrides the request's strategy.
    #[arg(long, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    #[arg(long, value_enum, default_value = "ascii")]
    format: Format,
    #[arg(long, value_enum, default_value = "graph")]
    verify: Verify,
    /// Seed for random measurement outcomes during verification; without it
    /// every outcome is +1.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory. Without it the rendering goes to stdout.
    #[arg(long, env = "GSX_OUT_DIR")]
    out: Option<PathBuf>,
    /// Also print the step list.
    #[arg(short, long)]
    verbose: bool,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: gsx::Error| e.to_string())
}

enum Failure {
    Parse(String),
    Planning(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Planning(_) => 3,
            Failure::Verify(_) => 4,
        }
    }
}

fn load(path: &Path, strategy: Option<Strategy>) -> Result<Plan, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    if value.get("steps").is_some() {
        return Plan::from_json(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())));
    }
    let mut req = ExtractionRequest::from_json(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    if let Some(s) = strategy {
        req.strategy = s;
    }
    plan(&req).map_err(|e| Failure::Planning(e.to_string()))
}

fn verify(plan: &Plan, mode: Verify, seed: Option<u64>) -> Result<(), Failure> {
    let fail = |e: gsx::Error| Failure::Verify(e.to_string());
    match mode {
        Verify::Off => Ok(()),
        Verify::Graph => {
            match seed {
                Some(s) => execute_plan_with(plan, gsx::graph::OutcomePolicy::Seeded(s)).map_err(fail)?,
                None => execute_plan(plan).map_err(fail)?,
            };
            gsx::planners::check_extraction(plan, &plan.predicted_graph).map_err(fail)
        }
        Verify::Statevector if plan.grid.site_count() > DEFAULT_CAP => {
            eprintln!(
                "note: {} qubits exceed the statevector cap of {DEFAULT_CAP}; verifying with the tableau instead",
                plan.grid.site_count()
            );
            verify_tableau(plan, seed).map(|_| ()).map_err(fail)
        }
        Verify::Statevector => verify_statevector(plan, seed, DEFAULT_CAP).map_err(fail),
        Verify::Tableau => verify_tableau(plan, seed).map(|_| ()).map_err(fail),
    }
}

fn cost_table(plan: &Plan) -> String {
    let s = &plan.stats;
    let mut t = String::new();
    let _ = writeln!(t, "strategy  prep  connect  total  n_x  n_y  n_z  n_e  n_l  N   N_c  n_exp");
    let _ = writeln!(
        t,
        "{:<8}  {:>4}  {:>7}  {:>5}  {:>3}  {:>3}  {:>3}  {:>3}  {:>3}  {:<3} {:>3}  {:>5}",
        plan.strategy, s.prep, s.connect, s.total, s.n_x, s.n_y, s.n_z, s.n_e, s.n_l, s.n_grid, s.n_c, s.n_exp
    );
    t
}

fn rendering(plan: &Plan, format: Format) -> (String, &'static str) {
    match format {
        Format::Json => (plan.to_json() + "\n", "plan.json"),
        Format::Ascii => (render_ascii(plan), "txt"),
        Format::Svg => (render_svg(plan), "svg"),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let plan = load(&cli.input, cli.strategy)?;
    verify(&plan, cli.verify, cli.seed)?;
    let (body, ext) = rendering(&plan, cli.format);
    match &cli.out {
        Some(dir) => {
            let write = |name: String, text: &str| {
                std::fs::create_dir_all(dir)
                    .and_then(|_| std::fs::write(dir.join(&name), text))
                    .map_err(|e| Failure::Parse(format!("{}: {e}", dir.join(&name).display())))
            };
            let stem = cli.input.file_stem().and_then(|s| s.to_str()).unwrap_or("request");
            let stem = stem.strip_suffix(".plan").unwrap_or(stem);
            write(format!("{stem}.plan.json"), &(plan.to_json() + "\n"))?;
            if ext != "plan.json" {
                write(format!("{stem}.{ext}"), &body)?;
            }
        }
        None => print!("{body}"),
    }
    if cli.verbose {
        for s in &plan.steps {
            eprintln!("{:>4} {:>2} ({},{}) {}", s.order, s.op, s.x, s.y, s.tag);
        }
    }
    eprint!("{}", cost_table(&plan));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (kind, msg) = match &f {
                Failure::Parse(m) => ("parse error", m),
                Failure::Planning(m) => ("planning failed", m),
                Failure::Verify(m) => ("verification failed", m),
            };
            eprintln!("gsx: {kind}: {msg}");
            ExitCode::from(f.code())
        }
    }
}
