//! `survnet`: plan, verify and report survivable packet-over-optical networks.
//!
//! Exit codes: 0 success, 1 infeasible plan or failed verification,
//! 2 usage or schema error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use survnet::formulation::{
    build_integrated, build_logical_design, estimate_problem_size, Approach, IntegratedPhase, LogicalPhase,
    ProblemInstance, SurvivabilityMode,
};
use survnet::milp::{check_solution, parse_lp_file, parse_solution_listing, FEAS_TOL};
use survnet::model::{
    average_connectivity, generate_topology, random_demands, CostRatioSpec, CostRatios, DemandRecord, Instance,
    InstanceFile, NodeLabel, ParamsRecord,
};
use survnet::planner::{plan_with, GreedyEngine, MilpEngine, NetworkConfiguration, PhaseEngine, PhaseRecord};
use survnet::report::{Report, ReportColumn, ReportFormat};
use survnet::verify::{
    brute_force_optimum, check_consistency, check_disjointness, check_restorability, enumerate_failures,
};
use survnet::Error;

const OUT_DIR_ENV: &str = "SURVNET_OUT_DIR";

#[derive(Parser)]
#[command(name = "survnet", version, about = "Survivable MPLS-over-OTN network design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a survivable configuration for an instance.
    Plan(PlanArgs),
    /// Check a configuration, or an external solution against an LP model.
    Verify(VerifyArgs),
    /// Compare configurations in one table.
    Report(ReportArgs),
    /// Write a random bi-connected instance.
    GenTopology(GenArgs),
    /// Print closed-form and built problem sizes.
    EstimateSize(SizeArgs),
    /// Exhaustive optimum for tiny instances.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    None,
    SingleLayer,
    MlDoubleProtection,
    MlSpareUnprotected,
    MlInterlayerBrs,
}

impl From<ModeArg> for SurvivabilityMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::None => SurvivabilityMode::None,
            ModeArg::SingleLayer => SurvivabilityMode::SingleLayer,
            ModeArg::MlDoubleProtection => SurvivabilityMode::MlDoubleProtection,
            ModeArg::MlSpareUnprotected => SurvivabilityMode::MlSpareUnprotected,
            ModeArg::MlInterlayerBrs => SurvivabilityMode::MlInterlayerBrs,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproachArg {
    Sequential,
    Integrated,
}

impl From<ApproachArg> for Approach {
    fn from(a: ApproachArg) -> Self {
        match a {
            ApproachArg::Sequential => Approach::Sequential,
            ApproachArg::Integrated => Approach::Integrated,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RatioArg {
    Cr1,
    Cr2,
    Cr3,
}

impl From<RatioArg> for CostRatios {
    fn from(r: RatioArg) -> Self {
        match r {
            RatioArg::Cr1 => CostRatios::CR1,
            RatioArg::Cr2 => CostRatios::CR2,
            RatioArg::Cr3 => CostRatios::CR3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => ReportFormat::Table,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

fn extension(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Table => "txt",
        ReportFormat::Csv => "csv",
        ReportFormat::Json => "json",
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Milp,
    Greedy,
}

#[derive(Args)]
struct OutArgs {
    /// Output directory [default: $SURVNET_OUT_DIR, else the current directory].
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl OutArgs {
    fn dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

#[derive(Args)]
struct PlanArgs {
    /// Instance file (JSON).
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "sequential")]
    approach: ApproachArg,
    /// Override the instance's cost ratio.
    #[arg(long, value_enum)]
    cost_ratio: Option<RatioArg>,
    /// Relative optimality gap at which a phase stops.
    #[arg(long, default_value_t = 0.03)]
    gap: f64,
    /// Per-phase time limit in seconds.
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long, value_enum, default_value = "milp")]
    engine: EngineArg,
    /// Re-solves allowed after a forbidden grouping or BRS contention.
    #[arg(long, default_value_t = 3)]
    max_retries: usize,
    /// Write one LP file per phase and skip solving.
    #[arg(long)]
    emit_lp: bool,
    /// Run the failure simulation and disjointness checks on the result.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value = "table")]
    report_format: FormatArg,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Configuration file written by `plan`.
    configuration: Option<PathBuf>,
    /// LP model the external solution refers to.
    #[arg(long, requires = "solution_in")]
    model: Option<PathBuf>,
    /// External solver listing of `name value` lines.
    #[arg(long, requires = "model")]
    solution_in: Option<PathBuf>,
    /// Print every scenario, not just the summary.
    #[arg(long)]
    detail: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Configuration files, one column each.
    #[arg(required = true)]
    configurations: Vec<PathBuf>,
    /// Column labels, in order [default: mode and approach].
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    /// Relative total-cost difference between columns, as A:B (1-based).
    #[arg(long, value_parser = parse_pair)]
    relative: Vec<(usize, usize)>,
    #[arg(long, value_enum, default_value = "table")]
    report_format: FormatArg,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected A:B")?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad column `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad column `{b}`"))?;
    if a == 0 || b == 0 {
        return Err("columns are 1-based".into());
    }
    Ok((a - 1, b - 1))
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    nodes: usize,
    /// Average node degree 2E/N.
    #[arg(long)]
    degree: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random demands between distinct node pairs.
    #[arg(long, default_value_t = 0)]
    demands: usize,
    /// Demand bandwidths to draw from, Gbps.
    #[arg(long, value_delimiter = ',', default_value = "2,4,6")]
    bandwidths: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    capacity: f64,
    #[arg(long, default_value_t = 32)]
    wavelengths: usize,
    #[arg(long, default_value_t = 1)]
    max_parallel: usize,
    #[arg(long)]
    max_interfaces: Option<usize>,
    #[arg(long, value_enum, default_value = "cr1")]
    cost_ratio: RatioArg,
    /// Output file [default: stdout].
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SizeArgs {
    /// Take N, K, Q and E from an instance and also build the phase models.
    #[arg(long, conflicts_with_all = ["nodes", "lsps", "max_parallel", "links"])]
    instance: Option<PathBuf>,
    #[arg(long, required_unless_present = "instance")]
    nodes: Option<usize>,
    #[arg(long, required_unless_present = "instance")]
    lsps: Option<usize>,
    #[arg(long, required_unless_present = "instance")]
    max_parallel: Option<usize>,
    #[arg(long, required_unless_present = "instance")]
    links: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "sequential")]
    approach: ApproachArg,
    #[arg(long, value_enum)]
    cost_ratio: Option<RatioArg>,
    #[command(flatten)]
    out: OutArgs,
}

/// A failure mapped to an exit code.
enum Failure {
    Infeasible(String),
    Usage(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Infeasible(m) | Failure::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible { .. } | Error::NoIncumbent { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(a) => run_plan(a),
        Command::Verify(a) => run_verify(a),
        Command::Report(a) => run_report(a),
        Command::GenTopology(a) => run_gen(a),
        Command::EstimateSize(a) => run_size(a),
        Command::Oracle(a) => run_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible(m)) => {
            eprintln!("survnet: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("survnet: {m}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn load_instance(path: &Path, ratio: Option<RatioArg>) -> Result<Instance, Failure> {
    let mut instance = Instance::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let Some(r) = ratio {
        instance.ratios = r.into();
    }
    Ok(instance)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into())
}

fn print_phases(phases: &[PhaseRecord]) {
    for p in phases {
        let obj = p.objective.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
        eprintln!(
            "phase {:<12} {:<6} {:<11} obj {:>10} vars {:>6} rows {:>6} nodes {:>6} {:.2}s",
            p.phase, p.engine, p.status, obj, p.variables, p.constraints, p.nodes, p.wall_time
        );
    }
}

fn run_plan(a: PlanArgs) -> CliResult {
    if !(a.gap >= 0.0) || !(a.time_limit > 0.0) {
        return Err(Failure::Usage("--gap must be >= 0 and --time-limit > 0".into()));
    }
    let instance = load_instance(&a.instance, a.cost_ratio)?;
    let mode: SurvivabilityMode = a.mode.into();
    let approach: Approach = a.approach.into();
    let problem = ProblemInstance::from_instance(&instance, mode, approach)?;
    let dir = a.out.dir();
    let base = format!("{}.{}.{}", stem(&a.instance), mode, approach);

    if a.emit_lp {
        let mut engine = MilpEngine::new(a.gap, Some(Duration::from_secs_f64(a.time_limit)));
        engine.emit_only = true;
        let outcome = plan_with(&problem, &mut engine, a.max_retries);
        for m in &engine.emitted {
            write(&dir.join(format!("{base}.phase_{}.lp", m.phase)), &m.text)?;
        }
        return match outcome {
            Ok(_) => Ok(()),
            Err(e) => Err(Failure::Infeasible(format!(
                "{e}; the greedy heuristic found no solution to carry past the last phase written"
            ))),
        };
    }

    let mut engine: Box<dyn PhaseEngine> = match a.engine {
        EngineArg::Milp => Box::new(MilpEngine::new(a.gap, Some(Duration::from_secs_f64(a.time_limit)))),
        EngineArg::Greedy => Box::new(GreedyEngine),
    };
    let cfg = plan_with(&problem, engine.as_mut(), a.max_retries)?;
    print_phases(&cfg.phases);
    write(&dir.join(format!("{base}.json")), &cfg.to_json())?;
    let format: ReportFormat = a.report_format.into();
    let report = Report::new(vec![ReportColumn::from_config(column_label(&cfg), &cfg)]).render(format);
    write(&dir.join(format!("{base}.report.{}", extension(format))), &report)?;
    print!("{report}");
    if a.verify {
        let (text, ok) = verify_configuration(&cfg, true);
        write(&dir.join(format!("{base}.verify.txt")), &text)?;
        if !ok {
            return Err(Failure::Infeasible("verification failed".into()));
        }
    }
    Ok(())
}

fn column_label(cfg: &NetworkConfiguration) -> String {
    format!("{} ({})", cfg.mode.label(), cfg.approach)
}

/// Restorability, disjointness and consistency; text plus pass flag.
fn verify_configuration(cfg: &NetworkConfiguration, detail: bool) -> (String, bool) {
    let scenarios = enumerate_failures(cfg);
    let rest = check_restorability(cfg, &scenarios);
    let disjoint = check_disjointness(cfg);
    let consistency = check_consistency(cfg);
    let mut text = if detail {
        rest.to_text()
    } else {
        format!(
            "scenarios {}\naffected {} recovered {} exempt {} uncovered {} failed {}\ncontention violations {}\nrestorability {:.2}%\n",
            rest.scenarios.len(),
            rest.affected,
            rest.recovered,
            rest.exempt,
            rest.uncovered,
            rest.failed,
            rest.contention_violations,
            100.0 * rest.restorability
        )
    };
    text.push_str(&format!("disjointness violations {}\n", disjoint.len()));
    for v in &disjoint {
        text.push_str(&format!("  {:?} on {}: shared {:?}\n", v.rule, v.subject, v.shared));
    }
    text.push_str(&format!("consistency problems {}\n", consistency.len()));
    for c in &consistency {
        text.push_str(&format!("  {c}\n"));
    }
    let ok = rest.is_clean() && disjoint.is_empty() && consistency.is_empty();
    text.push_str(if ok { "PASS\n" } else { "FAIL\n" });
    (text, ok)
}

fn run_verify(a: VerifyArgs) -> CliResult {
    if a.configuration.is_none() && a.solution_in.is_none() {
        return Err(Failure::Usage("give a configuration file, or --model with --solution-in".into()));
    }
    let mut ok = true;
    if let Some(path) = &a.configuration {
        let cfg = NetworkConfiguration::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let (text, pass) = verify_configuration(&cfg, a.detail);
        print!("{text}");
        ok &= pass;
    }
    if let (Some(model_path), Some(sol_path)) = (&a.model, &a.solution_in) {
        let model = parse_lp_file(&read(model_path)?).map_err(|e| Failure::Usage(format!("{}: {e}", model_path.display())))?;
        let values =
            parse_solution_listing(&read(sol_path)?, &model).map_err(|e| Failure::Usage(format!("{}: {e}", sol_path.display())))?;
        let violations = check_solution(&model, &values, FEAS_TOL);
        println!("model {} objective {:.6}", model.name, model.objective_value(&values));
        for v in &violations {
            println!("  {v:?}");
        }
        println!("solution violations {}", violations.len());
        ok &= violations.is_empty();
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Infeasible("verification failed".into()))
    }
}

fn run_report(a: ReportArgs) -> CliResult {
    if !a.labels.is_empty() && a.labels.len() != a.configurations.len() {
        return Err(Failure::Usage(format!("{} labels for {} configurations", a.labels.len(), a.configurations.len())));
    }
    let mut columns = Vec::new();
    for (k, path) in a.configurations.iter().enumerate() {
        let mut cfg =
            NetworkConfiguration::from_json(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        cfg.refresh();
        let label = a.labels.get(k).cloned().unwrap_or_else(|| column_label(&cfg));
        columns.push(ReportColumn::from_config(label, &cfg));
    }
    if let Some(&(i, j)) = a.relative.iter().find(|&&(i, j)| i.max(j) >= columns.len()) {
        return Err(Failure::Usage(format!("--relative {}:{} names a missing column", i + 1, j + 1)));
    }
    print!("{}", Report::new(columns).with_relative(&a.relative).render(a.report_format.into()));
    Ok(())
}

fn run_gen(a: GenArgs) -> CliResult {
    let topology = generate_topology(a.nodes, a.degree, a.seed)?;
    let demands = random_demands(a.nodes, a.demands, &a.bandwidths, a.seed);
    let label = |n: usize| NodeLabel::Int(n as i64);
    let file = InstanceFile {
        description: Some(format!(
            "generated: {} nodes, {} links (average degree {:.2}), seed {}",
            a.nodes,
            topology.link_count(),
            average_connectivity(&topology),
            a.seed
        )),
        nodes: (0..a.nodes).map(label).collect(),
        links: topology.links.iter().map(|l| [label(l.0), label(l.1)]).collect(),
        params: ParamsRecord {
            capacity: a.capacity,
            wavelengths: a.wavelengths,
            max_parallel: a.max_parallel,
            max_interfaces: a.max_interfaces,
        },
        cost_ratio: CostRatioSpec::Named(format!("{:?}", CostRatios::from(a.cost_ratio).label)),
        demands: demands.iter().map(|d| DemandRecord { s: label(d.source), d: label(d.destination), b: d.bandwidth }).collect(),
    };
    // catches impossible parameter combinations before writing
    Instance::from_file(&file)?;
    let text = serde_json::to_string_pretty(&file).map_err(|e| Failure::Usage(e.to_string()))? + "\n";
    match &a.output {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_size(a: SizeArgs) -> CliResult {
    let instance = a.instance.as_deref().map(|p| load_instance(p, None)).transpose()?;
    let (n, k, q, e) = match &instance {
        Some(i) => (i.topology.node_count(), i.lsps.len(), i.params.max_parallel, i.topology.link_count()),
        None => (a.nodes.unwrap_or(0), a.lsps.unwrap_or(0), a.max_parallel.unwrap_or(0), a.links.unwrap_or(0)),
    };
    println!("N = {n}, K = {k}, q = {q}, E = {e}");
    for approach in [Approach::Sequential, Approach::Integrated] {
        let est = estimate_problem_size(n, k, q, e, approach);
        println!("{:<10} estimate {}", approach.as_str(), est.variables);
    }
    if let Some(inst) = &instance {
        let seq = ProblemInstance::from_instance(inst, SurvivabilityMode::None, Approach::Sequential)?;
        let (model, _) = build_logical_design(&LogicalPhase::working(&seq))?;
        println!("{:<10} built    {} variables, {} constraints (phase I)", "sequential", model.variables.len(), model.constraints.len());
        print_families(&model.family_counts());
        let int = ProblemInstance::from_instance(inst, SurvivabilityMode::None, Approach::Integrated)?;
        let phase = IntegratedPhase::working(&int);
        let (model, _) = build_integrated(&int.topology, &phase)?;
        println!("{:<10} built    {} variables, {} constraints (phase I-III-w)", "integrated", model.variables.len(), model.constraints.len());
        print_families(&model.family_counts());
    }
    Ok(())
}

fn print_families(counts: &std::collections::BTreeMap<String, usize>) {
    for (family, n) in counts {
        println!("  {family:<8} {n}");
    }
}

fn run_oracle(a: OracleArgs) -> CliResult {
    let instance = load_instance(&a.instance, a.cost_ratio)?;
    let problem = ProblemInstance::from_instance(&instance, a.mode.into(), a.approach.into())?;
    let result = brute_force_optimum(&problem)?;
    println!("optimum {:.3}", result.cost);
    let path = a.out.dir().join(format!("{}.{}.{}.oracle.json", stem(&a.instance), problem.mode, problem.approach));
    write(&path, &result.configuration.to_json())
}
