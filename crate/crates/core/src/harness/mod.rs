//! Scenario generation, file formats, experiment sweeps and charts.

pub mod config;
pub mod experiment;
pub mod io;
pub mod plot;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_k, parse_seeds, ScenarioConfig, DEFAULT_SEEDS};
pub use experiment::{
    check_budget_safety, check_energy_identity, dominance_gaps, instance_for, mean_values, run_algorithm, run_experiment,
    write_records_csv, Experiment, RunRecord, CSV_HEADER,
};
pub use io::{read_instance, write_instance};
pub use plot::{energy_split_svg, poi_selection_svg, value_vs_budget_svg};
pub use scenario::{gen_multicast_instance, gen_poi_instance, gen_poi_instance_sized, generate, Scenario, ScenarioInstance};

use crate::error::{Error, Result};
use crate::optimizer::Algorithm;

/// Writes `results.csv`, `value_vs_budget.svg`, `energy_split.svg` and, for
/// PoI instances, `selection.svg` (our best run on that instance) into
/// `out_dir`.
pub fn emit_report(records: &[RunRecord], scenario: Option<&ScenarioInstance>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let csv_path = out_dir.join("results.csv");
    let file = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_records_csv(records, file)?;
    written.push(csv_path);

    let label = scenario.map_or_else(String::new, |s| format!("{} ", s.scenario));
    let mut put = |name: &str, body: String| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put("value_vs_budget.svg", value_vs_budget_svg(records, &format!("{label}value vs budget")))?;
    put("energy_split.svg", energy_split_svg(records, &format!("{label}energy split")))?;
    if let Some((inst, (coords, depot))) = scenario.and_then(|s| Some((s, s.coordinates()?))) {
        let best = records
            .iter()
            .filter(|r| r.algo == Algorithm::Ours && r.instance_seed == inst.seed)
            .max_by(|a, b| a.value.total_cmp(&b.value).then(b.budget.total_cmp(&a.budget)));
        if let Some(r) = best {
            let title = format!("selection at budget {} (value {:.3})", r.budget, r.value);
            put("selection.svg", poi_selection_svg(coords, depot, &r.items, &r.tour, &title))?;
        }
    }
    Ok(written)
}
