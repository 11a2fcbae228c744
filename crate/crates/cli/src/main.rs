//! `subroute`: generate scenario instances, solve them, run benchmark
//! sweeps and the verification suite.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use subroute::harness::{
    self, check_budget_safety, check_energy_identity, dominance_gaps, emit_report, instance_for, mean_values,
    read_instance, run_algorithm, run_experiment, write_instance, Scenario, ScenarioConfig, ScenarioInstance,
};
use subroute::optimizer::{solve_detailed, Algorithm};
use subroute::routing::CostKind;
use subroute::verification::{self, Family, SuiteConfig, VerificationReport};

#[derive(Parser, Debug)]
#[command(name = "subroute", version, about = "Budgeted nonmonotone submodular maximization under routing costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the instance files for one scenario and seed.
    Gen(GenArgs),
    /// Run one algorithm on one instance and print the solution.
    Solve(SolveArgs),
    /// Run a seeded sweep and write the CSV and plots.
    Bench(BenchArgs),
    /// Run the verification suite; exits 1 on any violation.
    Verify(VerifyArgs),
    /// Audit a cost oracle against its exact twin on small instances.
    OracleCheck(OracleCheckArgs),
}

/// Flags that map one-to-one onto config keys.
#[derive(Args, Debug, Default)]
struct ConfigFlags {
    /// Key=value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// multicast or poi.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// One budget or a comma-separated list.
    #[arg(long, alias = "budgets")]
    budget: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// Loop count: a positive integer or `auto`.
    #[arg(long)]
    k: Option<String>,
    /// Seed list: `7`, `1..20` (inclusive) or `1,4,9`.
    #[arg(long, alias = "seed")]
    seeds: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    /// ours, rand, rmax or a comma-separated list.
    #[arg(long, alias = "algos")]
    algo: Option<String>,
    /// Run every seed on the instance generated from this seed.
    #[arg(long)]
    instance_seed: Option<String>,
    /// tsp-exact, tsp-mst-double, tsp-two-opt, steiner-exact, steiner-kmb.
    #[arg(long)]
    oracle: Option<String>,
}

impl ConfigFlags {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::new(Scenario::Poi),
        };
        let pairs = [
            ("scenario", &self.scenario),
            ("n", &self.n),
            ("budget", &self.budget),
            ("theta", &self.theta),
            ("k", &self.k),
            ("seeds", &self.seeds),
            ("lambda", &self.lambda),
            ("algo", &self.algo),
            ("instance_seed", &self.instance_seed),
            ("oracle", &self.oracle),
        ];
        // scenario first: switching scenario resets the other keys
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v).with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    cfg: ConfigFlags,
    /// Output directory for the instance files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    cfg: ConfigFlags,
    /// Instance directory or manifest written by `gen`; otherwise one is
    /// generated from the scenario and seed.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Print the per-step trace.
    #[arg(long)]
    trace: bool,
    /// Directory for solution.txt (and selection.svg for poi).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    cfg: ConfigFlags,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Ground-set size of the bicriterion sweep.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Number of seeds in the bicriterion sweep.
    #[arg(long, default_value_t = 300)]
    seeds: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for verify_report.txt and verify_report.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleCheckArgs {
    #[arg(long, default_value = "steiner-kmb")]
    oracle: String,
    /// Items per random instance.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Number of random instances.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// Audit this instance's network instead of random ones.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Sampled (S, x) pairs for ground sets above 12 items.
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Ok,
    Violations,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violations) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Verify(a) => verify(a),
        Command::OracleCheck(a) => oracle_check(a),
    }
}

fn set_jobs(jobs: usize) -> Result<()> {
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
        .context("configuring the thread pool")
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn first_seed(cfg: &ScenarioConfig) -> u64 {
    cfg.instance_seed.unwrap_or(cfg.seeds[0])
}

fn gen(a: GenArgs) -> Result<Outcome> {
    let cfg = a.cfg.resolve()?;
    let inst = instance_for(&cfg, first_seed(&cfg))?;
    for path in write_instance(&a.out, &inst)? {
        println!("{}", path.display());
    }
    Ok(Outcome::Ok)
}

fn load_or_generate(path: Option<&Path>, cfg: &ScenarioConfig) -> Result<ScenarioInstance> {
    let inst = match path {
        Some(p) => {
            if !p.exists() {
                bail!("instance not found: {}", p.display());
            }
            read_instance(p)?
        }
        None => return Ok(instance_for(cfg, first_seed(cfg))?),
    };
    Ok(match cfg.oracle {
        Some(kind) => inst.with_oracle(kind)?,
        None => inst,
    })
}

fn solve_cmd(a: SolveArgs) -> Result<Outcome> {
    let cfg = a.cfg.resolve()?;
    let inst = load_or_generate(a.instance.as_deref(), &cfg)?;
    let budget = if a.cfg.budget.is_some() {
        if cfg.budgets.len() != 1 {
            bail!("solve takes a single --budget");
        }
        cfg.budgets[0]
    } else {
        inst.scenario.default_budget()
    };
    let [algo] = cfg.algos[..] else {
        bail!("solve takes a single --algo");
    };
    let seed = cfg.seeds[0];
    let instance = inst.instance(budget, cfg.theta, cfg.k)?;
    let sol = match algo {
        Algorithm::Ours => solve_detailed(&instance)?.solution,
        _ => run_algorithm(algo, &instance, seed)?,
    };

    let mut text = String::new();
    let _ = writeln!(text, "scenario       {} (instance seed {})", inst.scenario, inst.seed);
    let _ = writeln!(text, "oracle         {}", inst.cost.kind());
    let _ = writeln!(text, "algorithm      {algo}");
    let _ = writeln!(text, "budget         {budget}");
    let _ = writeln!(text, "theta          {}", cfg.theta);
    let _ = writeln!(text, "k              {}", instance.k());
    let _ = writeln!(text, "value          {}", sol.value);
    let _ = writeln!(text, "cost           {}", sol.cost);
    let _ = writeln!(text, "over_budget    {}", sol.over_budget_ratio());
    let _ = writeln!(text, "travel         {}", sol.travel_energy());
    let _ = writeln!(text, "visiting       {}", sol.visiting_energy());
    let _ = writeln!(text, "sequence       {:?}", sol.sequence);
    let _ = writeln!(text, "route          {:?}", sol.witness.route);
    let _ = writeln!(text, "f_calls        {}", sol.f_calls);
    let _ = writeln!(text, "rho_calls      {}", sol.rho_calls);
    print!("{text}");
    if a.trace {
        for line in &sol.trace {
            println!("{line}");
        }
    }
    if let Some(out) = &a.out {
        create_out(out)?;
        let path = out.join("solution.txt");
        fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
        if let Some((coords, depot)) = inst.coordinates() {
            let tour = sol.witness.tour().map(<[usize]>::to_vec).unwrap_or_default();
            let title = format!("{algo} at budget {budget} (value {:.3})", sol.value);
            let svg = harness::poi_selection_svg(coords, depot, &sol.items(), &tour, &title);
            let path = out.join("selection.svg");
            fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(Outcome::Ok)
}

fn bench(a: BenchArgs) -> Result<Outcome> {
    set_jobs(a.jobs)?;
    let cfg = a.cfg.resolve()?;
    let exp = run_experiment(&cfg)?;
    for f in &exp.failures {
        warn!("{f}");
    }
    if exp.records.is_empty() {
        println!("no runs");
        return Ok(Outcome::Ok);
    }
    let overlay = exp
        .records
        .iter()
        .filter(|r| r.algo == Algorithm::Ours)
        .max_by(|x, y| x.value.total_cmp(&y.value))
        .map(|r| instance_for(&cfg, r.seed))
        .transpose()?;
    let written = emit_report(&exp.records, overlay.as_ref(), &a.out)?;

    let mut summary = String::new();
    for algo in Algorithm::ALL {
        let means = mean_values(&exp.records, algo);
        if means.is_empty() {
            continue;
        }
        let cells: Vec<String> = means.iter().map(|(b, v)| format!("{b}:{v:.4}")).collect();
        let _ = writeln!(summary, "{algo:<5} mean value by budget  {}", cells.join("  "));
    }
    let safety = check_budget_safety(&exp.records);
    let energy = check_energy_identity(&exp.records);
    summary.push_str(&safety.to_text());
    summary.push_str(&energy.to_text());
    for gap in dominance_gaps(&exp.records) {
        let _ = writeln!(summary, "note: {gap}");
    }
    for f in &exp.failures {
        let _ = writeln!(summary, "failed run: {f}");
    }
    print!("{summary}");
    let path = a.out.join("summary.txt");
    fs::write(&path, &summary).with_context(|| format!("writing {}", path.display()))?;
    for p in written.iter().chain([&path]) {
        info!("wrote {}", p.display());
    }
    Ok(if safety.passed() && energy.passed() && exp.failures.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Violations
    })
}

fn finish_reports(reports: &[VerificationReport], out: Option<&Path>, stem: &str) -> Result<Outcome> {
    let mut text = String::new();
    for r in reports {
        text.push_str(&r.to_text());
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(text, "{} properties, {} failed", reports.len(), failed);
    print!("{text}");
    if let Some(out) = out {
        create_out(out)?;
        let txt = out.join(format!("{stem}.txt"));
        fs::write(&txt, &text).with_context(|| format!("writing {}", txt.display()))?;
        let csv = out.join(format!("{stem}.csv"));
        let file = fs::File::create(&csv).with_context(|| format!("writing {}", csv.display()))?;
        verification::write_csv(reports, file)?;
    }
    Ok(if failed == 0 { Outcome::Ok } else { Outcome::Violations })
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    set_jobs(a.jobs)?;
    if a.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    let cfg = SuiteConfig {
        n: a.n,
        seeds: a.seeds,
        ..SuiteConfig::default()
    };
    let reports = verification::run_suite(&cfg)?;
    finish_reports(&reports, a.out.as_deref(), "verify_report")
}

fn oracle_check(a: OracleCheckArgs) -> Result<Outcome> {
    let kind: CostKind = a.oracle.parse()?;
    if kind == CostKind::Tabulated {
        bail!("--oracle tabulated has no network to audit");
    }
    let mut merged: Vec<VerificationReport> = Vec::new();
    let mut absorb = |reports: Vec<VerificationReport>| {
        if merged.is_empty() {
            merged = reports;
        } else {
            for (m, r) in merged.iter_mut().zip(reports) {
                m.merge(r);
            }
        }
    };
    match &a.instance {
        Some(path) => {
            if !path.exists() {
                bail!("instance not found: {}", path.display());
            }
            let inst = read_instance(path)?.with_oracle(kind)?;
            absorb(verification::audit_cost_oracle(&inst.cost, a.samples, inst.seed)?);
        }
        None => {
            let family = if kind.is_tsp() { Family::Tour } else { Family::Tree };
            for seed in 0..a.seeds {
                let small = verification::generate::small_instance(family, a.n, seed)?;
                absorb(verification::audit_cost_oracle(&small.cost.twin(kind)?, a.samples, seed)?);
            }
        }
    }
    finish_reports(&merged, a.out.as_deref(), "oracle_check")
}
