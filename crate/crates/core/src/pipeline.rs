//! End-to-end runs: detect, decompose, score, repair, evaluate, and the files
//! each stage writes.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::dataset::{load_dataset, load_ground_truth, Dataset, GroundTruth, LoadOptions};
use crate::decomposition::{check_independence, decompose, Component, DecompositionStats};
use crate::detection::{detect_conflicts, DetectionStats};
use crate::error::{Error, Result};
use crate::eval::{evaluate, inject_errors, synthetic_clean, RepairMetrics, SyntheticSpec};
use crate::graph::ConflictGraph;
use crate::repair::{approximation_bound, repair, Algorithm, RepairConfig, RepairPlan};
use crate::rules::{group_rules, parse_rules, CfdRule};
use crate::scoring::{compute_density, AttributeWeights, DensityTable, DEFAULT_EPSILON};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub algorithm: Algorithm,
    pub k: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub time_limit: Duration,
    pub parallel: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            algorithm: Algorithm::Ppis,
            k: 3,
            alpha: 0.5,
            epsilon: DEFAULT_EPSILON,
            time_limit: Duration::from_secs(10),
            parallel: true,
        }
    }
}

impl PipelineOptions {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }

    fn repair_config(&self) -> RepairConfig {
        RepairConfig {
            algorithm: self.algorithm,
            epsilon: self.epsilon,
            time_limit: self.time_limit,
            parallel: self.parallel,
        }
    }
}

pub struct Detection {
    pub graph: ConflictGraph,
    pub stats: DetectionStats,
    pub components: Vec<Component>,
    pub decomposition: DecompositionStats,
}

/// Builds the conflict graph and its components, checking that no edge
/// crosses components.
pub fn detect(dataset: &Dataset, rules: &[CfdRule]) -> Result<Detection> {
    let (graph, stats) = detect_conflicts(dataset, &group_rules(rules));
    let components = decompose(&graph);
    check_independence(&components, &graph)?;
    let decomposition = DecompositionStats::new(&components, &graph);
    Ok(Detection {
        graph,
        stats,
        components,
        decomposition,
    })
}

pub struct Repaired {
    pub detection: Detection,
    pub weights: AttributeWeights,
    pub density: DensityTable,
    pub plan: RepairPlan,
    /// Wall time per phase in milliseconds.
    pub timings: BTreeMap<String, f64>,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

pub fn run_pipeline(dataset: &Dataset, rules: &[CfdRule], options: &PipelineOptions) -> Result<Repaired> {
    options.validate()?;
    let mut timings = BTreeMap::new();
    let total = Instant::now();

    let t = Instant::now();
    let detection = detect(dataset, rules)?;
    timings.insert("detect".to_owned(), ms(t));

    let t = Instant::now();
    let weights = AttributeWeights::compute(dataset, rules, options.alpha)?;
    // a single row cannot conflict, so its density is never consulted
    let density = if dataset.len() < 2 {
        DensityTable::empty(dataset.len(), options.k)
    } else {
        compute_density(dataset, &detection.graph, &weights, options.k)?
    };
    timings.insert("density".to_owned(), ms(t));

    let t = Instant::now();
    let mut plan = repair(
        &detection.graph,
        &detection.components,
        &density,
        &options.repair_config(),
    )?;
    plan.bound = Some(approximation_bound(&plan, &density, &detection.graph, options.k));
    timings.insert("repair".to_owned(), ms(t));
    timings.insert("total".to_owned(), ms(total));

    Ok(Repaired {
        detection,
        weights,
        density,
        plan,
        timings,
    })
}

/// Settings shared by the command-line subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_path: PathBuf,
    pub rules_path: Option<PathBuf>,
    pub labels_path: Option<PathBuf>,
    /// Label column inside the data file; excluded from the attributes.
    pub label_col: Option<String>,
    pub options: PipelineOptions,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub exclude_cols: Vec<String>,
    pub missing_token: String,
}

impl RunConfig {
    pub fn new(data_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            data_path: data_path.into(),
            rules_path: None,
            labels_path: None,
            label_col: None,
            options: PipelineOptions::default(),
            output_dir: None,
            seed: 0,
            exclude_cols: Vec::new(),
            missing_token: String::new(),
        }
    }

    fn load_options(&self) -> LoadOptions {
        let mut opts = LoadOptions {
            missing_token: self.missing_token.clone(),
            exclude_cols: self.exclude_cols.clone(),
        };
        if let Some(col) = &self.label_col {
            if !opts.exclude_cols.contains(col) {
                opts.exclude_cols.push(col.clone());
            }
        }
        opts
    }

    pub fn load(&self) -> Result<(Dataset, Vec<CfdRule>)> {
        let dataset = load_dataset(&self.data_path, &self.load_options())?;
        let rules = match &self.rules_path {
            Some(path) => parse_rules(path, &dataset)?,
            None => Vec::new(),
        };
        Ok((dataset, rules))
    }

    pub fn load_truth(&self, dataset: &Dataset) -> Result<Option<GroundTruth>> {
        if let Some(path) = &self.labels_path {
            return load_ground_truth(path, dataset).map(Some);
        }
        if let Some(col) = &self.label_col {
            return GroundTruth::from_label_column(&self.data_path, col, dataset).map(Some);
        }
        Ok(None)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectReport {
    pub stats: DetectionStats,
    pub decomposition: DecompositionStats,
    pub mean_candidates: f64,
    pub runtime_ms: f64,
}

pub struct DetectRun {
    pub dataset: Dataset,
    pub detection: Detection,
    pub report: DetectReport,
}

pub fn cmd_detect(config: &RunConfig) -> Result<DetectRun> {
    let (dataset, rules) = config.load()?;
    let t = Instant::now();
    let detection = detect(&dataset, &rules)?;
    let report = DetectReport {
        stats: detection.stats.clone(),
        decomposition: detection.decomposition.clone(),
        mean_candidates: detection.stats.mean_candidates(),
        runtime_ms: ms(t),
    };
    if let Some(dir) = &config.output_dir {
        create_dir(dir)?;
        write_with(&dir.join("graph.txt"), |w| detection.graph.write_edge_list(w))?;
        write_json(&dir.join("detect_stats.json"), &report)?;
    }
    Ok(DetectRun {
        dataset,
        detection,
        report,
    })
}

pub struct RepairRun {
    pub dataset: Dataset,
    pub repaired: Repaired,
    pub metrics: Option<RepairMetrics>,
}

pub fn cmd_repair(config: &RunConfig) -> Result<RepairRun> {
    let (dataset, rules) = config.load()?;
    let truth = config.load_truth(&dataset)?;
    let repaired = run_pipeline(&dataset, &rules, &config.options)?;
    let metrics = match &truth {
        Some(t) => {
            let mut m = evaluate(&repaired.plan, t)?;
            m.runtime_ms = repaired.timings.clone();
            Some(m)
        }
        None => None,
    };
    if let Some(dir) = &config.output_dir {
        write_repair_outputs(dir, &repaired, metrics.as_ref())?;
    }
    Ok(RepairRun {
        dataset,
        repaired,
        metrics,
    })
}

/// Writes `removal.txt`, `plan.json`, `scores.csv`, `graph.txt` and, when
/// given, `metrics.json` into `dir`.
pub fn write_repair_outputs(dir: &Path, repaired: &Repaired, metrics: Option<&RepairMetrics>) -> Result<()> {
    create_dir(dir)?;
    let plan = &repaired.plan;
    write_with(&dir.join("removal.txt"), |w| {
        for r in &plan.removal_set {
            writeln!(w, "{r}")?;
        }
        Ok(())
    })?;
    write_json(&dir.join("plan.json"), plan)?;
    write_with(&dir.join("graph.txt"), |w| repaired.detection.graph.write_edge_list(w))?;
    write_with(&dir.join("scores.csv"), |w| {
        writeln!(w, "row_id,rho,conflict_degree,penalty,removed")?;
        for row in 0..plan.row_count {
            let rho = repaired.density.rho.get(row).copied().unwrap_or(0.0);
            let degree = repaired.detection.graph.degree(row);
            let penalty = plan
                .scores
                .get(&row)
                .map(|s| s.penalty.to_string())
                .unwrap_or_default();
            writeln!(w, "{row},{rho},{degree},{penalty},{}", plan.is_removed(row))?;
        }
        Ok(())
    })?;
    if let Some(m) = metrics {
        write_json(&dir.join("metrics.json"), m)?;
    }
    Ok(())
}

/// One-line run summary: removed count, strategy breakdown, wall time.
pub fn summary_line(repaired: &Repaired) -> String {
    let plan = &repaired.plan;
    let strategies: Vec<String> = plan
        .strategy_counts()
        .into_iter()
        .map(|(s, n)| format!("{}={n}", s.tag()))
        .collect();
    format!(
        "removed {} of {} rows; components {} [{}]; {:.1} ms",
        plan.removal_set.len(),
        plan.row_count,
        plan.per_component.len(),
        strategies.join(" "),
        repaired.timings.get("total").copied().unwrap_or(0.0),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub rows: usize,
    pub cols: usize,
    pub rate: f64,
    pub edges: usize,
    pub components: usize,
    pub removed: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub pairs_checked: u64,
    pub detect_ms: f64,
    pub repair_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub rates: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    /// Key domain per column; 0 picks `rows / 10` (at least 2).
    pub domain: usize,
    pub seed: u64,
    pub options: PipelineOptions,
}

/// Runs every (algorithm, rows, cols, rate) combination on generated data.
pub fn cmd_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut out = Vec::new();
    for &algorithm in &config.algorithms {
        for &rows in &config.rows {
            for &cols in &config.cols {
                for &rate in &config.rates {
                    let domain = if config.domain == 0 {
                        (rows / 10).max(2)
                    } else {
                        config.domain
                    };
                    let spec = SyntheticSpec {
                        rows,
                        cols,
                        domain,
                        seed: config.seed,
                    };
                    let (clean, rules) = synthetic_clean(&spec)?;
                    let (dirty, truth) = inject_errors(&clean, &rules, rate, config.seed)?;
                    let options = PipelineOptions {
                        algorithm,
                        ..config.options.clone()
                    };
                    let run = run_pipeline(&dirty, &rules, &options)?;
                    let m = evaluate(&run.plan, &truth)?;
                    out.push(BenchRow {
                        algorithm,
                        rows,
                        cols,
                        rate,
                        edges: run.detection.graph.edge_count(),
                        components: run.detection.components.len(),
                        removed: run.plan.removal_set.len(),
                        precision: m.precision,
                        recall: m.recall,
                        f1: m.f1,
                        pairs_checked: run.detection.stats.pairs_checked,
                        detect_ms: run.timings["detect"],
                        repair_ms: run.timings["density"] + run.timings["repair"],
                        total_ms: run.timings["total"],
                    });
                }
            }
        }
    }
    Ok(out)
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for row in rows {
        csv.serialize(row)?;
    }
    csv.flush().map_err(|e| Error::io("<bench csv>", e))?;
    Ok(())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_with(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}
