//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use subroute::harness::scenario::{ScenarioData, MULTICAST_MAX_DELAY, POI_HEIGHT, POI_WIDTH};
use subroute::harness::{
    check_budget_safety, gen_multicast_instance, gen_poi_instance, generate, run_algorithm, run_experiment, RunRecord,
    Scenario, ScenarioConfig,
};
use subroute::optimizer::{solve, Algorithm};
use subroute::verification::{
    check_bicriterion, check_objective_suite, check_prefix_theorems, check_routing_envelopes, check_usm_guarantee,
    oracle_count_rows, CostMode, Family, VerificationReport,
};

const TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn reports_outcome(reports: &[VerificationReport], elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} ({} violations)", r.property, r.violation_count()))
        .collect();
    let checked: usize = reports.iter().map(|r| r.checked).sum();
    let slow = limit.is_some_and(|l| elapsed > l);
    let mut detail = format!("{} properties, {checked} rows, {:.2}s", reports.len(), elapsed.as_secs_f64());
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {}s)", l.as_secs()));
    }
    if !failed.is_empty() {
        detail.push_str(&format!("; failed: {}", failed.join(", ")));
        for r in reports.iter().filter(|r| !r.passed()) {
            eprint!("{}", r.to_text());
        }
    }
    Outcome {
        pass: failed.is_empty() && !slow,
        detail,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn bicriterion() -> Outcome {
    let seeds: Vec<u64> = (0..300).collect();
    let (reports, t) = timed(|| check_bicriterion(Family::Tour, 8, &seeds, CostMode::Exact).unwrap());
    reports_outcome(&reports, t, Some(Duration::from_secs(60)))
}

fn usm() -> Outcome {
    let trials: Vec<u64> = (0..500).collect();
    let (reports, t) = timed(|| check_usm_guarantee(&trials, 12).unwrap());
    reports_outcome(&reports, t, Some(Duration::from_secs(30)))
}

fn prefixes() -> Outcome {
    let seeds: Vec<u64> = (0..200).collect();
    let (reports, t) = timed(|| check_prefix_theorems(9, &seeds).unwrap());
    reports_outcome(&reports, t, None)
}

fn envelopes() -> Outcome {
    let seeds: Vec<u64> = (0..200).collect();
    let (reports, t) = timed(|| check_routing_envelopes(&seeds).unwrap());
    reports_outcome(&reports, t, None)
}

fn submodularity() -> Outcome {
    let seeds: Vec<u64> = (0..20).collect();
    let (reports, t) = timed(|| check_objective_suite(&seeds, 6).unwrap());
    reports_outcome(&reports, t, None)
}

fn counters() -> Outcome {
    let mut report = VerificationReport::new("oracle-counters");
    let mut cells = Vec::new();
    for scenario in [Scenario::Multicast, Scenario::Poi] {
        for n in [20, 45, 100] {
            let inst = generate(scenario, n, 1).unwrap();
            let instance = inst.instance(scenario.default_budget(), scenario.default_theta(), None).unwrap();
            let sol = solve(&instance).unwrap();
            for row in oracle_count_rows(&instance, &sol, Some(n as u64)) {
                report.record(row);
            }
            cells.push(format!(
                "{scenario} n={n}: f {}/{} rho {}/{}",
                sol.f_calls,
                3 * instance.k() * n * n,
                sol.rho_calls,
                3 * instance.k() * n
            ));
        }
    }
    let mut out = reports_outcome(&[report], Duration::ZERO, None);
    out.detail = cells.join("; ");
    out
}

fn constants() -> Outcome {
    let mut problems = Vec::new();
    let poi = gen_poi_instance(1).unwrap();
    if let ScenarioData::Poi { points, collection, .. } = &poi.data {
        if points.len() != 45 {
            problems.push(format!("{} PoIs", points.len()));
        }
        if points.travel_rate() != 0.6 {
            problems.push(format!("travel rate {}", points.travel_rate()));
        }
        if !points.coords().iter().all(|p| (0.0..=POI_WIDTH).contains(&p[0]) && (0.0..=POI_HEIGHT).contains(&p[1])) {
            problems.push("PoI outside 35 x 40".into());
        }
        if !collection.iter().all(|&c| c > 0.0 && c < 2.0) {
            problems.push("collection cost outside (0, 2)".into());
        }
    }
    let mc = gen_multicast_instance(20, 1).unwrap();
    if let ScenarioData::Multicast { graph, lambda, .. } = &mc.data {
        if graph.edges().iter().any(|&(_, _, w)| !(1.0..=f64::from(MULTICAST_MAX_DELAY)).contains(&w)) {
            problems.push("delay outside [1, 200]".into());
        }
        if *lambda != 1.0 {
            problems.push(format!("lambda {lambda}"));
        }
    }
    let budget = poi.scenario.default_budget();
    if budget != 120.0 {
        problems.push(format!("default budget {budget}"));
    }
    let mut values = Vec::new();
    for algo in Algorithm::ALL {
        let instance = poi.instance(budget, poi.scenario.default_theta(), None).unwrap();
        match run_algorithm(algo, &instance, 1) {
            Ok(sol) => {
                let fresh = poi.objective.eval(&sol.items()).unwrap();
                if (fresh - sol.value).abs() > TOL || sol.over_budget_ratio() > instance.theta() + TOL {
                    problems.push(format!("{algo} solution inconsistent"));
                }
                values.push(format!("{algo} {:.3} @ {:.1}", sol.value, sol.cost));
            }
            Err(e) => problems.push(format!("{algo}: {e}")),
        }
    }
    Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("budget 120 run: {}", values.join(", "))
        } else {
            problems.join("; ")
        },
    }
}

fn rand_turns_down(records: &[RunRecord], full_costs: &[(u64, f64)]) -> Outcome {
    let budgets = [240.0, 320.0, 400.0];
    let mut decreases = Vec::new();
    let mut took_all = 0;
    for seed in 1..=20u64 {
        let vals: Vec<&RunRecord> = budgets
            .iter()
            .filter_map(|&b| records.iter().find(|r| r.algo == Algorithm::Rand && r.seed == seed && r.budget == b))
            .collect();
        took_all += vals.iter().filter(|r| r.items.len() == 45).count();
        for w in vals.windows(2) {
            if w[1].value < w[0].value {
                decreases.push(format!("seed {seed}: {} -> {} at {} -> {}", w[0].value, w[1].value, w[0].budget, w[1].budget));
            }
        }
    }
    let lo = full_costs.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let hi = full_costs.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    let detail = if decreases.is_empty() {
        format!(
            "no strict decrease; {took_all}/60 Rand runs selected all 45 PoIs (mutual information 0); \
             full-set cost {lo:.1}..{hi:.1} lies below every tested budget"
        )
    } else {
        decreases.join("; ")
    };
    Outcome {
        pass: !decreases.is_empty(),
        detail,
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let out = f();
        println!("{} criterion {id} {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        results.push((id, name, out));
    };
    run(1, "bicriterion bound", &bicriterion);
    run(2, "USM one-third guarantee", &usm);
    run(3, "prefix theorems", &prefixes);
    run(4, "routing-oracle envelopes", &envelopes);
    run(5, "submodularity suite", &submodularity);
    run(6, "complexity counters", &counters);
    run(7, "scenario constants", &constants);

    // benchmark sweeps: default multicast and poi configurations, plus the
    // Rand budgets of the nonmonotonicity check
    let mut records = Vec::new();
    for scenario in [Scenario::Multicast, Scenario::Poi] {
        let exp = run_experiment(&ScenarioConfig::new(scenario)).unwrap();
        assert!(exp.failures.is_empty(), "{:?}", exp.failures);
        records.extend(exp.records);
    }
    let mut rand_cfg = ScenarioConfig::new(Scenario::Poi);
    rand_cfg.algos = vec![Algorithm::Rand];
    rand_cfg.budgets = vec![240.0, 320.0, 400.0];
    let rand_exp = run_experiment(&rand_cfg).unwrap();
    let full_costs: Vec<(u64, f64)> = rand_cfg
        .seeds
        .iter()
        .map(|&s| {
            let inst = gen_poi_instance(s).unwrap();
            (s, inst.cost.cost(&(0..45).collect::<Vec<_>>()).unwrap())
        })
        .collect();
    run(8, "Rand nonmonotone in budget", &|| rand_turns_down(&rand_exp.records, &full_costs));
    records.extend(rand_exp.records.iter().cloned());
    run(9, "budget safety", &|| {
        let report = check_budget_safety(&records);
        let mut out = reports_outcome(std::slice::from_ref(&report), Duration::ZERO, None);
        out.detail = format!("{} runs, {} violations", report.checked, report.violation_count());
        out
    });

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "{} of {} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failed: {failed:?}") }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
