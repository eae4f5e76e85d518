// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Parameter sweeps over the mixing coefficient.
//!
//! Each `(mu, replicate)` pair is one row with seed `base_seed * 10007 + row`.
//! Rows run on a worker pool and reach `results.csv` through a single writer
//! in row order, so the file is identical for any worker count. Restarting
//! over an existing output directory keeps the completed prefix of rows and
//! computes only the rest. Wall-clock timings go to `runtimes.csv`, which is
//! the only output that differs between runs.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use lfr_core::detection::{detect, Algorithm};
use lfr_core::evaluation::nmi;
use lfr_core::metrics::{topology_report, TopologyReport};
use lfr_core::planting::plant;
use lfr_core::RandomSource;
use rayon::prelude::*;

use crate::config::{ConfigError, SweepConfig};

pub const RESULTS_FILE: &str = "results.csv";
pub const RUNTIMES_FILE: &str = "runtimes.csv";
pub const CONFIG_FILE: &str = "config.json";
pub const PLOTS_DIR: &str = "plots";

/// Result columns before the per-algorithm ones.
pub const BASE_COLUMNS: [&str; 19] = [
    "row",
    "model",
    "mu",
    "replicate",
    "seed",
    "avg_distance",
    "unreachable_pairs",
    "transitivity_global",
    "clustering_local_avg",
    "assortativity",
    "centralization_degree",
    "centralization_closeness",
    "centralization_betweenness",
    "degree_mean",
    "degree_max",
    "fitted_gamma",
    "achieved_mu",
    "mu_limit",
    "converged",
];

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} holds results of a different configuration")]
    ConfigChanged(PathBuf),
    #[error("{path}: unreadable existing results: {message}")]
    Corrupt { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SweepError + '_ {
    move |source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn header(algorithms: &[Algorithm]) -> Vec<String> {
    let mut cols: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for a in algorithms {
        cols.push(format!("nmi_{}", a.name()));
        cols.push(format!("modularity_{}", a.name()));
    }
    cols.push("error".into());
    cols
}

pub fn row_seed(base_seed: u64, row: usize) -> u64 {
    base_seed.wrapping_mul(10007).wrapping_add(row as u64)
}

/// `(mu, replicate)` for each row, mu-major.
pub fn row_plan(cfg: &SweepConfig) -> Vec<(f64, usize)> {
    cfg.mu_values
        .iter()
        .flat_map(|&mu| (0..cfg.replicates).map(move |r| (mu, r)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub algorithm: Algorithm,
    pub nmi: f64,
    pub modularity: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowData {
    pub report: TopologyReport,
    pub achieved_mu: f64,
    pub mu_limit: f64,
    pub converged: bool,
    pub detections: Vec<Detection>,
    pub plant_seconds: f64,
    pub measure_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub row: usize,
    pub mu: f64,
    pub replicate: usize,
    pub seed: u64,
    pub data: Result<RowData, String>,
}

/// Plants, measures and scores one row.
pub fn run_row(cfg: &SweepConfig, algorithms: &[Algorithm], row: usize, mu: f64, replicate: usize) -> RowOutcome {
    let seed = row_seed(cfg.base_seed, row);
    let data = (|| {
        let t = Instant::now();
        let mut rng = RandomSource::new(seed);
        let planted = plant(&cfg.seed_model(), &cfg.planting(mu), &mut rng).map_err(|e| e.to_string())?;
        let plant_seconds = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let report = topology_report(&planted.graph).map_err(|e| e.to_string())?;
        let measure_seconds = t.elapsed().as_secs_f64();
        let mut detections = Vec::with_capacity(algorithms.len());
        for &a in algorithms {
            let d = detect(&planted.graph, a, seed).map_err(|e| e.to_string())?;
            let score = nmi(&planted.truth, &d.partition).map_err(|e| e.to_string())?;
            detections.push(Detection {
                algorithm: a,
                nmi: score,
                modularity: d.modularity,
                seconds: d.elapsed.as_secs_f64(),
            });
        }
        Ok(RowData {
            report,
            achieved_mu: planted.achieved_mu_mean,
            mu_limit: planted.mu_limit,
            converged: planted.converged,
            detections,
            plant_seconds,
            measure_seconds,
        })
    })();
    RowOutcome {
        row,
        mu,
        replicate,
        seed,
        data,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn result_record(cfg: &SweepConfig, algorithms: &[Algorithm], o: &RowOutcome) -> Vec<String> {
    let mut rec = vec![
        o.row.to_string(),
        cfg.model.name().to_string(),
        o.mu.to_string(),
        o.replicate.to_string(),
        o.seed.to_string(),
    ];
    match &o.data {
        Ok(d) => {
            let r = &d.report;
            rec.extend([
                r.avg_distance.to_string(),
                r.unreachable_pairs.to_string(),
                r.transitivity_global.to_string(),
                r.clustering_local_avg.to_string(),
                opt(r.assortativity),
                r.centralization_degree.to_string(),
                r.centralization_closeness.to_string(),
                r.centralization_betweenness.to_string(),
                r.degree_mean.to_string(),
                r.degree_max.to_string(),
                opt(r.fitted_gamma),
                d.achieved_mu.to_string(),
                d.mu_limit.to_string(),
                d.converged.to_string(),
            ]);
            for det in &d.detections {
                rec.push(det.nmi.to_string());
                rec.push(det.modularity.to_string());
            }
            rec.push(String::new());
        }
        Err(e) => {
            rec.extend(std::iter::repeat(String::new()).take(BASE_COLUMNS.len() - 5 + 2 * algorithms.len()));
            rec.push(e.clone());
        }
    }
    rec
}

fn runtime_header(algorithms: &[Algorithm]) -> Vec<String> {
    let mut cols = vec!["row".to_string(), "plant_seconds".into(), "measure_seconds".into()];
    cols.extend(algorithms.iter().map(|a| format!("{}_seconds", a.name())));
    cols
}

fn runtime_record(algorithms: &[Algorithm], o: &RowOutcome) -> Vec<String> {
    let mut rec = vec![o.row.to_string()];
    match &o.data {
        Ok(d) => {
            rec.push(d.plant_seconds.to_string());
            rec.push(d.measure_seconds.to_string());
            rec.extend(d.detections.iter().map(|x| x.seconds.to_string()));
        }
        Err(_) => rec.extend(std::iter::repeat(String::new()).take(2 + algorithms.len())),
    }
    rec
}

fn csv_line(fields: &[String]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    w.into_inner().expect("in-memory write")
}

/// Complete rows already on disk. A trailing partial line, left by an
/// interrupted run, is dropped and the file truncated to the last full row.
fn completed_prefix(path: &Path, header_line: &[u8]) -> Result<usize, SweepError> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(io_err(path)(e)),
    };
    let corrupt = |message: String| SweepError::Corrupt {
        path: path.to_path_buf(),
        message,
    };
    if bytes.is_empty() {
        return Ok(0);
    }
    if !bytes.starts_with(header_line) {
        return Err(corrupt("header does not match the configured columns".into()));
    }
    let body = &bytes[header_line.len()..];
    let complete = body.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(&body[..complete]);
    let mut rows = 0usize;
    for rec in reader.records() {
        let rec = rec.map_err(|e| corrupt(e.to_string()))?;
        let idx: usize = rec
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| corrupt(format!("bad row index on data line {}", rows + 1)))?;
        if idx != rows {
            return Err(corrupt(format!("row {idx} found where {rows} expected")));
        }
        rows += 1;
    }
    let keep = (header_line.len() + complete) as u64;
    if keep < bytes.len() as u64 {
        let f = OpenOptions::new().write(true).open(path).map_err(io_err(path))?;
        f.set_len(keep).map_err(io_err(path))?;
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSummary {
    pub rows: usize,
    /// Rows found complete on disk and skipped.
    pub resumed: usize,
    pub failed: usize,
    pub results: PathBuf,
}

/// Runs every row of `cfg` not yet present under `cfg.out`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepSummary, SweepError> {
    run_sweep_limited(cfg, usize::MAX)
}

/// As [`run_sweep`], stopping after `budget` new rows. Used to emulate an
/// interrupted run.
pub fn run_sweep_limited(cfg: &SweepConfig, budget: usize) -> Result<SweepSummary, SweepError> {
    cfg.validate()?;
    let algorithms = cfg.algorithms()?;
    let out = cfg.out.as_path();
    fs::create_dir_all(out).map_err(io_err(out))?;

    let config_path = out.join(CONFIG_FILE);
    let fingerprint = cfg.fingerprint();
    match fs::read_to_string(&config_path) {
        Ok(existing) if existing.trim_end() != fingerprint => {
            return Err(SweepError::ConfigChanged(out.to_path_buf()))
        }
        Ok(_) => {}
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            fs::write(&config_path, format!("{fingerprint}\n")).map_err(io_err(&config_path))?;
        }
        Err(e) => return Err(io_err(&config_path)(e)),
    }

    let results_path = out.join(RESULTS_FILE);
    let header_line = csv_line(&header(&algorithms));
    let done = completed_prefix(&results_path, &header_line)?;
    let plan = row_plan(cfg);
    let end = plan.len().min(done.saturating_add(budget));

    let mut results = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&results_path)
        .map_err(io_err(&results_path))?;
    if done == 0 {
        results.set_len(0).map_err(io_err(&results_path))?;
        results.write_all(&header_line).map_err(io_err(&results_path))?;
    }
    let runtimes_path = out.join(RUNTIMES_FILE);
    let fresh_runtimes = done == 0 || !runtimes_path.exists();
    let mut runtimes = BufWriter::new(
        OpenOptions::new()
            .create(true)
            .write(true)
            .append(!fresh_runtimes)
            .truncate(fresh_runtimes)
            .open(&runtimes_path)
            .map_err(io_err(&runtimes_path))?,
    );
    if fresh_runtimes {
        runtimes
            .write_all(&csv_line(&runtime_header(&algorithms)))
            .map_err(io_err(&runtimes_path))?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .expect("thread pool");
    let (tx, rx) = mpsc::channel::<RowOutcome>();
    let todo: Vec<usize> = (done..end).collect();
    let mut failed = 0;

    std::thread::scope(|scope| -> Result<(), SweepError> {
        let algorithms = &algorithms;
        let plan = &plan;
        let todo = &todo;
        scope.spawn(move || {
            pool.install(|| {
                todo.par_iter().for_each_with(tx, |tx, &row| {
                    let (mu, rep) = plan[row];
                    let _ = tx.send(run_row(cfg, algorithms, row, mu, rep));
                });
            });
        });

        let mut pending = BTreeMap::new();
        let mut next = done;
        for outcome in rx {
            pending.insert(outcome.row, outcome);
            while let Some(o) = pending.remove(&next) {
                if o.data.is_err() {
                    failed += 1;
                }
                results
                    .write_all(&csv_line(&result_record(cfg, algorithms, &o)))
                    .and_then(|_| results.flush())
                    .map_err(io_err(&results_path))?;
                runtimes
                    .write_all(&csv_line(&runtime_record(algorithms, &o)))
                    .and_then(|_| runtimes.flush())
                    .map_err(io_err(&runtimes_path))?;
                next += 1;
            }
        }
        Ok(())
    })?;

    // Failures among resumed rows count too, so the exit status does not
    // depend on where a run was interrupted.
    let table = load_results(&results_path)?;
    let failed_total = table.rows.iter().filter(|r| r.error.is_some()).count();
    debug_assert!(failed_total >= failed);
    if end == plan.len() {
        write_plot_tables(&table, &out.join(PLOTS_DIR))?;
    }
    Ok(SweepSummary {
        rows: end,
        resumed: done,
        failed: failed_total,
        results: results_path,
    })
}

/// One parsed line of `results.csv`. Empty cells read as `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub row: usize,
    pub model: String,
    pub mu: f64,
    pub replicate: usize,
    pub seed: u64,
    pub values: BTreeMap<String, Option<f64>>,
    pub converged: Option<bool>,
    pub error: Option<String>,
}

impl ResultRow {
    pub fn get(&self, column: &str) -> Option<f64> {
        self.values.get(column).copied().flatten()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Numeric columns in file order.
    pub fn numeric_columns(&self) -> Vec<&str> {
        self.columns
            .iter()
            .map(String::as_str)
            .filter(|c| !matches!(*c, "row" | "model" | "mu" | "replicate" | "seed" | "error"))
            .collect()
    }
}

pub fn load_results(path: &Path) -> Result<ResultTable, SweepError> {
    let corrupt = |message: String| SweepError::Corrupt {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| corrupt(e.to_string()))?;
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| corrupt(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| corrupt(e.to_string()))?;
        let cell = |name: &str| -> &str {
            columns.iter().position(|c| c == name).and_then(|i| rec.get(i)).unwrap_or("")
        };
        let num = |name: &str| -> Result<Option<f64>, SweepError> {
            let s = cell(name);
            if s.is_empty() {
                return Ok(None);
            }
            if s == "true" || s == "false" {
                return Ok(Some(if s == "true" { 1.0 } else { 0.0 }));
            }
            s.parse().map(Some).map_err(|_| corrupt(format!("{name}: {s:?}")))
        };
        let int = |name: &str| -> Result<u64, SweepError> {
            cell(name).parse().map_err(|_| corrupt(format!("{name}: {:?}", cell(name))))
        };
        let mut values = BTreeMap::new();
        for c in &columns {
            if !matches!(c.as_str(), "row" | "model" | "mu" | "replicate" | "seed" | "error") {
                values.insert(c.clone(), num(c)?);
            }
        }
        let error = Some(cell("error").to_string()).filter(|s| !s.is_empty());
        rows.push(ResultRow {
            row: int("row")? as usize,
            model: cell("model").to_string(),
            mu: num("mu")?.ok_or_else(|| corrupt("missing mu".into()))?,
            replicate: int("replicate")? as usize,
            seed: int("seed")?,
            converged: match cell("converged") {
                "true" => Some(true),
                "false" => Some(false),
                _ => None,
            },
            values,
            error,
        });
    }
    Ok(ResultTable { columns, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single observation.
    pub sd: f64,
    pub count: usize,
}

pub fn summarize(xs: &[f64]) -> Option<Summary> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Some(Summary {
        mean,
        sd,
        count: xs.len(),
    })
}

/// Mean and deviation of `column` per distinct mu, in order of first
/// appearance. Rows with an empty cell are skipped.
pub fn column_by_mu(table: &ResultTable, model: &str, column: &str) -> Vec<(f64, Summary)> {
    let mut order: Vec<f64> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for r in table.rows.iter().filter(|r| r.model == model) {
        let k = match order.iter().position(|&m| m == r.mu) {
            Some(k) => k,
            None => {
                order.push(r.mu);
                groups.push(Vec::new());
                order.len() - 1
            }
        };
        if let Some(v) = r.get(column) {
            groups[k].push(v);
        }
    }
    order
        .into_iter()
        .zip(groups)
        .filter_map(|(mu, g)| summarize(&g).map(|s| (mu, s)))
        .collect()
}

/// One `<model>_<column>.tsv` per numeric column: `mu mean sd count`.
pub fn write_plot_tables(table: &ResultTable, dir: &Path) -> Result<(), SweepError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut models: Vec<&str> = table.rows.iter().map(|r| r.model.as_str()).collect();
    models.dedup();
    for model in models {
        for column in table.numeric_columns() {
            let path = dir.join(format!("{model}_{column}.tsv"));
            let mut f = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
            let mut text = String::from("mu\tmean\tsd\tcount\n");
            for (mu, s) in column_by_mu(table, model, column) {
                text.push_str(&format!("{mu}\t{}\t{}\t{}\n", s.mean, s.sd, s.count));
            }
            f.write_all(text.as_bytes()).map_err(io_err(&path))?;
        }
    }
    Ok(())
}
