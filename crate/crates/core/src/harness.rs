//! Config-driven experiment sweeps and the scaling fit.
//!
//! A trial samples `G(n, p)`, regularizes it, runs multi-COBRA with `δ`
//! walks, builds the tree packing and broadcasts every requested `k`. A
//! disconnected sample or an uncovered walk reruns the trial with the next
//! seed, at most `max_retries` times.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::broadcast::{broadcast_over_packing, naive_bfs_broadcast, MessageSet};
use crate::cobra::{
    coverage_report, run_multi_cobra, subgraph_diameter, CobraConfig, MultiCobraAssignment,
};
use crate::error::{Error, Result};
use crate::graph::{bitset_diameter, erdos_renyi, Graph};
use crate::io::read_edge_list;
use crate::packing::{build_tree_packing, TreePacking};
use crate::rng::RngSeed;
use crate::spectral::{lambda2, normalized_adjacency};

pub const SCHEMA_VERSION: u32 = 1;

fn default_c_p() -> f64 {
    20.0
}
fn default_cover_constant() -> f64 {
    8.0
}
fn default_max_retries() -> usize {
    3
}
fn default_k_per_delta() -> Vec<usize> {
    vec![1]
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Graph sizes; ignored when `graph_file` is set.
    #[serde(default)]
    pub ns: Vec<usize>,
    /// Edge probability; `None` uses `c_p · ln n / n`.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default = "default_c_p")]
    pub c_p: f64,
    /// Fixed host graph instead of sampling.
    #[serde(default)]
    pub graph_file: Option<PathBuf>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub source: usize,
    /// Absolute message counts.
    #[serde(default)]
    pub k: Vec<usize>,
    /// Message counts as multiples of `δ`.
    #[serde(default = "default_k_per_delta")]
    pub k_per_delta: Vec<usize>,
    #[serde(default = "default_cover_constant")]
    pub cover_constant: f64,
    #[serde(default)]
    pub phases: Option<usize>,
    #[serde(default = "default_max_retries")]
    pub max_retries: usize,
    /// λ₂ before and after regularization (dense eigensolve per trial).
    #[serde(default)]
    pub spectral: bool,
    /// Single-BFS-tree pipeline baseline.
    #[serde(default = "default_true")]
    pub baseline: bool,
    #[serde(default)]
    pub output_csv: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Config with defaults for the given sizes and seeds.
    pub fn new(ns: Vec<usize>, seeds: Vec<u64>) -> ExperimentConfig {
        ExperimentConfig {
            ns,
            p: None,
            c_p: default_c_p(),
            graph_file: None,
            seeds,
            source: 0,
            k: Vec::new(),
            k_per_delta: default_k_per_delta(),
            cover_constant: default_cover_constant(),
            phases: None,
            max_retries: default_max_retries(),
            spectral: false,
            baseline: true,
            output_csv: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::invalid("seeds must be nonempty"));
        }
        if self.graph_file.is_none() && self.ns.is_empty() {
            return Err(Error::invalid("give ns or graph_file"));
        }
        if self.ns.iter().any(|&n| n < 2) {
            return Err(Error::invalid("every n must be at least 2"));
        }
        if !(self.c_p > 0.0 && self.cover_constant > 0.0) {
            return Err(Error::invalid("c_p and cover_constant must be positive"));
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::invalid(format!("p = {p} outside (0, 1]")));
            }
        }
        if self.phases == Some(0) {
            return Err(Error::invalid("phases must be positive"));
        }
        if self.k.iter().chain(&self.k_per_delta).any(|&k| k == 0) {
            return Err(Error::invalid("message counts must be positive"));
        }
        if self.k.is_empty() && self.k_per_delta.is_empty() {
            return Err(Error::invalid("give k or k_per_delta"));
        }
        Ok(())
    }

    pub fn p_for(&self, n: usize) -> f64 {
        self.p
            .unwrap_or_else(|| (self.c_p * (n as f64).ln() / n as f64).min(1.0))
    }
}

/// One row per (trial, k). Stage fields stay empty past a failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub seed: u64,
    pub seed_used: u64,
    pub retries: usize,
    pub n: usize,
    pub p: Option<f64>,
    pub min_degree: Option<usize>,
    pub max_degree: Option<usize>,
    pub diameter: Option<usize>,
    pub lambda2: Option<f64>,
    pub lambda2_regularized: Option<f64>,
    pub phases: Option<usize>,
    pub walks: Option<usize>,
    pub covered_walks: Option<usize>,
    pub max_edge_weight: Option<usize>,
    pub max_subgraph_diameter: Option<usize>,
    pub packing_size: Option<usize>,
    pub packing_diameter: Option<usize>,
    pub packing_weight: Option<usize>,
    pub build_rounds: Option<usize>,
    pub k: Option<usize>,
    pub broadcast_rounds: Option<usize>,
    /// COBRA (two rounds per phase) + tree building + broadcast.
    pub total_rounds: Option<usize>,
    pub baseline_rounds: Option<usize>,
    pub status: String,
}

impl ExperimentRecord {
    fn empty(seed: u64, n: usize) -> ExperimentRecord {
        ExperimentRecord {
            schema_version: SCHEMA_VERSION,
            seed,
            seed_used: seed,
            retries: 0,
            n,
            p: None,
            min_degree: None,
            max_degree: None,
            diameter: None,
            lambda2: None,
            lambda2_regularized: None,
            phases: None,
            walks: None,
            covered_walks: None,
            max_edge_weight: None,
            max_subgraph_diameter: None,
            packing_size: None,
            packing_diameter: None,
            packing_weight: None,
            build_rounds: None,
            k: None,
            broadcast_rounds: None,
            total_rounds: None,
            baseline_rounds: None,
            status: "ok".into(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

struct Trial {
    graph: Graph,
    seed_used: u64,
    retries: usize,
    assignment: MultiCobraAssignment,
    covered: usize,
}

fn sample(cfg: &ExperimentConfig, n: usize, seed: RngSeed) -> Result<Graph> {
    match &cfg.graph_file {
        Some(path) => read_edge_list(path),
        None => erdos_renyi(n, cfg.p_for(n), seed),
    }
}

/// Graph plus a covering COBRA run, retrying with `seed + 1, ...`.
fn covered_trial(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<Trial> {
    let mut last_err = None;
    for retry in 0..=cfg.max_retries {
        let s = RngSeed(seed).offset(retry as u64);
        if retry > 0 {
            log::warn!("n = {n}, seed {seed}: retry {retry} with seed {}", s.0);
        }
        let graph = sample(cfg, n, s)?;
        if !graph.is_connected() || graph.degree_stats().min == 0 {
            last_err = Some(Error::invalid(format!(
                "sample with seed {} is disconnected",
                s.0
            )));
            continue;
        }
        if cfg.source >= graph.node_count() {
            return Err(Error::NodeOutOfRange {
                node: cfg.source,
                node_count: graph.node_count(),
            });
        }
        let regular = graph.regularize()?;
        let mut cobra = CobraConfig::new(graph.degree_stats().min);
        cobra.cover_constant = cfg.cover_constant;
        cobra.phases = cfg.phases;
        let assignment = run_multi_cobra(&regular, cfg.source, &cobra, s)?;
        let coverage = coverage_report(&assignment);
        let covered = coverage.iter().filter(|c| c.covered).count();
        if covered < coverage.len() {
            last_err = Some(Error::WalkNotCovering {
                walk: coverage.iter().position(|c| !c.covered).unwrap(),
                reached: 0,
                node_count: graph.node_count(),
            });
            continue;
        }
        return Ok(Trial {
            graph,
            seed_used: s.0,
            retries: retry,
            assignment,
            covered,
        });
    }
    Err(last_err.expect("at least one attempt"))
}

fn message_counts(cfg: &ExperimentConfig, delta: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = cfg
        .k
        .iter()
        .copied()
        .chain(cfg.k_per_delta.iter().map(|&f| f * delta))
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn run_trial(cfg: &ExperimentConfig, n: usize, seed: u64) -> Result<Vec<ExperimentRecord>> {
    let trial = covered_trial(cfg, n, seed)?;
    let g = &trial.graph;
    let n = g.node_count();
    let stats = g.degree_stats();
    let a = &trial.assignment;
    let mut base = ExperimentRecord::empty(seed, n);
    base.seed_used = trial.seed_used;
    base.retries = trial.retries;
    base.p = cfg.graph_file.is_none().then(|| cfg.p_for(n));
    base.min_degree = Some(stats.min);
    base.max_degree = Some(stats.max);
    base.diameter = Some(bitset_diameter(g)?);
    if cfg.spectral {
        base.lambda2 = Some(lambda2(&normalized_adjacency(g)?)?);
        base.lambda2_regularized = Some(lambda2(&normalized_adjacency(&g.regularize()?)?)?);
    }
    base.phases = Some(a.phases_run());
    base.walks = Some(a.num_walks());
    base.covered_walks = Some(trial.covered);
    base.max_edge_weight = Some(a.max_edge_weight());
    let mut diam = 0;
    for w in 0..a.num_walks() {
        diam = diam.max(subgraph_diameter(a, w)?);
    }
    base.max_subgraph_diameter = Some(diam);
    let tp: TreePacking = build_tree_packing(&g.regularize()?, a, cfg.source)?;
    base.packing_size = Some(tp.size);
    base.packing_diameter = Some(tp.diameter);
    base.packing_weight = Some(tp.weight);
    base.build_rounds = Some(tp.build_rounds);

    let mut out = Vec::new();
    for k in message_counts(cfg, stats.min) {
        let msgs = MessageSet::new(k)?;
        let trace = broadcast_over_packing(g, &tp, msgs, false)?;
        if !trace.is_saturated() {
            return Err(Error::invalid(format!(
                "broadcast of {k} messages left nodes unsaturated"
            )));
        }
        let mut rec = base.clone();
        rec.k = Some(k);
        rec.broadcast_rounds = Some(trace.total_rounds);
        rec.total_rounds = Some(2 * a.phases_run() + tp.build_rounds + trace.total_rounds);
        if cfg.baseline {
            rec.baseline_rounds = Some(naive_bfs_broadcast(g, cfg.source, msgs)?);
        }
        out.push(rec);
    }
    Ok(out)
}

/// Runs every (n, seed) trial in order. Failed trials become a single record
/// with the error in `status`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let ns: Vec<usize> = if cfg.graph_file.is_some() {
        vec![0]
    } else {
        cfg.ns.clone()
    };
    let mut records = Vec::new();
    for &n in &ns {
        for &seed in &cfg.seeds {
            match run_trial(cfg, n, seed) {
                Ok(rs) => records.extend(rs),
                Err(e) => {
                    log::warn!("n = {n}, seed {seed} failed: {e}");
                    let mut r = ExperimentRecord::empty(seed, n);
                    r.status = e.to_string();
                    records.push(r);
                }
            }
        }
    }
    if let Some(path) = &cfg.output_csv {
        write_records_csv(std::fs::File::create(path)?, &records)?;
    }
    Ok(records)
}

pub fn write_records_csv<W: std::io::Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// One measurement for the scaling model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub k: usize,
    pub delta: usize,
    pub rounds: f64,
}

impl ScalingPoint {
    fn features(&self) -> (f64, f64) {
        let l = (self.n as f64).log2();
        (l * l, l * self.k as f64 / self.delta as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub a: f64,
    pub b: f64,
    /// `‖y - ŷ‖ / ‖y‖`.
    pub relative_residual: f64,
}

impl ScalingFit {
    pub fn predict(&self, p: &ScalingPoint) -> f64 {
        let (x1, x2) = p.features();
        self.a * x1 + self.b * x2
    }
}

pub fn scaling_points(records: &[ExperimentRecord]) -> Vec<ScalingPoint> {
    records
        .iter()
        .filter_map(|r| {
            Some(ScalingPoint {
                n: r.n,
                k: r.k?,
                delta: r.min_degree?,
                rounds: r.total_rounds? as f64,
            })
        })
        .collect()
}

/// Least squares for `rounds ≈ a·log₂²n + b·log₂n·k/δ`, no intercept.
pub fn fit_scaling(points: &[ScalingPoint]) -> Result<ScalingFit> {
    let mut ns: Vec<usize> = points.iter().map(|p| p.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::invalid(format!(
            "scaling fit needs at least 3 distinct n, got {}",
            ns.len()
        )));
    }
    if points.iter().any(|p| p.delta == 0) {
        return Err(Error::invalid("δ = 0 in a scaling point"));
    }
    let (mut s11, mut s12, mut s22, mut t1, mut t2, mut yy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let (x1, x2) = p.features();
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        t1 += x1 * p.rounds;
        t2 += x2 * p.rounds;
        yy += p.rounds * p.rounds;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-12 * s11 * s22 {
        return Err(Error::invalid("scaling design is rank deficient"));
    }
    let a = (t1 * s22 - t2 * s12) / det;
    let b = (s11 * t2 - s12 * t1) / det;
    let mut fit = ScalingFit {
        a,
        b,
        relative_residual: 0.0,
    };
    let rss: f64 = points
        .iter()
        .map(|p| (p.rounds - fit.predict(p)).powi(2))
        .sum();
    fit.relative_residual = if yy > 0.0 { (rss / yy).sqrt() } else { 0.0 };
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_config_gives_one_record() {
        let cfg = ExperimentConfig::new(vec![50], vec![1]);
        let recs = run_experiment(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert!(r.is_ok(), "{}", r.status);
        assert_eq!(r.packing_size, r.min_degree);
        assert!(r.max_edge_weight.unwrap() <= 4 * r.phases.unwrap());
    }

    #[test]
    fn csv_is_deterministic() {
        let mut cfg = ExperimentConfig::new(vec![40, 60], vec![3, 4]);
        cfg.k = vec![5];
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_records_csv(&mut a, &run_experiment(&cfg).unwrap()).unwrap();
        write_records_csv(&mut b, &run_experiment(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a)
            .unwrap()
            .starts_with("schema_version,seed,seed_used"));
    }

    #[test]
    fn exact_fit_recovered() {
        let mut pts = Vec::new();
        for n in [64, 256, 1024, 4096] {
            for k in [10, 100, 500] {
                let mut p = ScalingPoint {
                    n,
                    k,
                    delta: 10,
                    rounds: 0.0,
                };
                let (x1, x2) = p.features();
                p.rounds = 2.0 * x1 + 3.0 * x2;
                pts.push(p);
            }
        }
        let fit = fit_scaling(&pts).unwrap();
        assert!((fit.a - 2.0).abs() < 1e-6 && (fit.b - 3.0).abs() < 1e-6);
        assert!(fit.relative_residual < 1e-9);
    }

    #[test]
    fn fit_rejects_degenerate_designs() {
        let one_n: Vec<_> = [1, 2, 3]
            .iter()
            .map(|&k| ScalingPoint {
                n: 100,
                k,
                delta: 1,
                rounds: k as f64,
            })
            .collect();
        assert!(fit_scaling(&one_n).is_err());
        // k/δ proportional to log n makes the two columns collinear.
        let collinear: Vec<_> = [16usize, 256, 65536]
            .iter()
            .map(|&n| {
                let l = (n as f64).log2() as usize;
                ScalingPoint {
                    n,
                    k: l,
                    delta: 1,
                    rounds: 1.0,
                }
            })
            .collect();
        assert!(fit_scaling(&collinear).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(vec![50], vec![]);
        assert!(cfg.validate().is_err());
        cfg.seeds = vec![1];
        cfg.c_p = 0.0;
        assert!(cfg.validate().is_err());
        let json = r#"{"ns": [50], "seeds": [1], "k": [4]}"#;
        let parsed: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(parsed.c_p, 20.0);
        assert_eq!(parsed.k_per_delta, vec![1]);
    }
}
