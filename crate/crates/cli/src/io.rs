use std::fs;
use std::path::{Path, PathBuf};

use tstar_core::{Error, Result, Scenario};

/// Scenario files of a directory (`*.json`), sorted by file name. The id of
/// each scenario is its file stem.
pub fn load_scenarios(dir: &Path) -> Result<Vec<(String, Scenario)>> {
    let mut paths: Vec<PathBuf> =
        fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "json")).collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((id, read_scenario(&p)?))
        })
        .collect()
}

pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    Scenario::from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::Format(format!("{}: {j}", path.display())),
        other => other,
    })
}

/// `scenario_0042.json` style names, so lexical order is seed order.
pub fn scenario_file_name(seed: u64) -> String {
    format!("scenario_{seed:04}.json")
}
