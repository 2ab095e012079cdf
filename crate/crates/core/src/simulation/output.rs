use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentResult, GridChoice, MseMethod, RunRecord};
use crate::error::Result;

/// Random number generator identity recorded with every run.
pub const GENERATOR: &str =
    "ChaCha8Rng (rand_chacha 0.3); replication seed = seed XOR splitmix64(replication); \
                             stream 0 = training data, stream 1 = evaluation points";

/// JSON sidecar written next to the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub library: String,
    pub library_version: String,
    pub generator: String,
    pub config: ExperimentConfig,
    pub replication_seeds: Vec<u64>,
    pub mse_method: MseMethod,
    pub checkpoints: Vec<u64>,
    pub oracle_sweep: bool,
    pub selections: Vec<Option<GridChoice>>,
    pub warnings: Vec<String>,
    pub partial: bool,
    pub errors: Vec<String>,
}

impl Metadata {
    pub fn new(result: &ExperimentResult) -> Self {
        let run = &result.config.run;
        Metadata {
            library: env!("CARGO_PKG_NAME").to_string(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            generator: GENERATOR.to_string(),
            config: result.config.clone(),
            replication_seeds: result.seeds.clone(),
            mse_method: result.mse_method,
            checkpoints: run.checkpoints.resolve(run.n_max),
            oracle_sweep: result.selections.iter().any(Option::is_some),
            selections: result.selections.clone(),
            warnings: result.warnings.clone(),
            partial: result.is_partial(),
            errors: result.failures.iter().map(|e| e.to_string()).collect(),
        }
    }
}

pub fn write_csv<W: Write>(writer: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record([
            "run_id",
            "replication",
            "n",
            "mse",
            "regret",
            "op_count",
            "coef_count",
            "storage_bits",
            "wall_time_s",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(Into::into))
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>> {
    read_records(File::open(path)?)
}

/// Writes `path` through a temporary sibling so a failed write leaves nothing behind.
fn write_atomically(
    path: &Path,
    fill: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("output");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let outcome = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        fill(&mut w)?;
        w.flush()?;
        w.get_ref().sync_all()?;
        Ok(())
    })();
    match outcome {
        Ok(()) => Ok(fs::rename(&tmp, path)?),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

/// Writes `<run_id>.csv` and `<run_id>.json` into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, result: &ExperimentResult) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let stem = if result.config.run_id.is_empty() {
        "run"
    } else {
        result.config.run_id.as_str()
    };
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    let metadata = Metadata::new(result);
    write_atomically(&json_path, |w| {
        Ok(serde_json::to_writer_pretty(w, &metadata)?)
    })?;
    write_atomically(&csv_path, |w| write_csv(w, &result.records))?;
    Ok((csv_path, json_path))
}
