//! Monte-Carlo harnesses for the Ising mismatch and MIMO symbol-error
//! experiments, plus the single-graph `infer` report.
//!
//! Trial `t` of every sweep point draws its instance from seed
//! `base_seed + t`, so any subset of trials can be replayed on its own and
//! every method at a sweep point sees the same instances. Rows are emitted in
//! sweep order and, within a sweep point, in method order.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::engine::{self, ConvergenceReport, EngineConfig, Schedule};
use crate::error::{Error, Result};
use crate::graph::{Alphabet, FactorGraph};
use crate::mmse::{mmse_decide, mmse_posterior, mmse_prior_factors, CovarianceScaling};
use crate::models::{ising_to_graph, mimo_to_graph, sample_ising, sample_mimo, sigma_from_snr_db};
use crate::numeric::format_significant;
use crate::oracle::{exact_map, ENUMERATION_LIMIT};

pub const CSV_HEADER: &str = "sweep,method,alpha,metric,trials,converged_frac";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    IsingMismatch,
    MimoSer,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMode {
    #[default]
    None,
    Mmse,
}

/// How a decision vector is scored against the reference.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MismatchMetric {
    /// Fraction of variables that disagree.
    #[default]
    Hamming,
    /// 1 if any variable disagrees.
    Vector,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    #[default]
    Fixed,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n_vars: usize,
    /// Receive antennas for MIMO; ignored by the Ising experiment.
    pub n_receive: usize,
    pub trials: usize,
    /// Edge probabilities (Ising) or noise standard deviations σ_w (MIMO).
    pub sweep: Vec<f64>,
    pub alphas: Vec<f64>,
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub schedule: ScheduleKind,
    pub damping: f64,
    pub seed: u64,
    pub prior: PriorMode,
    pub mismatch: MismatchMetric,
    pub covariance_scaling: CovarianceScaling,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_ALPHAS: [f64; 7] = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4];
pub const DEFAULT_EDGE_PROBS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Default MIMO operating points, as `10 log10(N / σ_w²)`.
pub const DEFAULT_SNR_DB: [f64; 5] = [10.0, 12.5, 15.0, 17.5, 20.0];

/// σ_w values matching [`DEFAULT_SNR_DB`] for `n` transmit antennas.
pub fn default_sigmas(n: usize) -> Vec<f64> {
    DEFAULT_SNR_DB.iter().map(|&db| sigma_from_snr_db(n, db)).collect()
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let (n, sweep, prior) = match kind {
            ExperimentKind::IsingMismatch => (9, DEFAULT_EDGE_PROBS.to_vec(), PriorMode::None),
            ExperimentKind::MimoSer => (8, default_sigmas(8), PriorMode::Mmse),
        };
        Self {
            kind,
            n_vars: n,
            n_receive: n,
            trials: 1000,
            sweep,
            alphas: DEFAULT_ALPHAS.to_vec(),
            tolerance: engine::DEFAULT_TOLERANCE,
            max_sweeps: engine::DEFAULT_MAX_SWEEPS,
            schedule: ScheduleKind::Fixed,
            damping: 0.0,
            seed: 0,
            prior,
            mismatch: MismatchMetric::Hamming,
            covariance_scaling: CovarianceScaling::Sigma,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_vars == 0 || self.n_receive == 0 {
            return bad("n must be at least 1".into());
        }
        if self.sweep.is_empty() {
            return bad("sweep needs at least one value".into());
        }
        if (2f64).powi(self.n_vars as i32) > ENUMERATION_LIMIT as f64 {
            return Err(Error::EnumerationTooLarge {
                states: 2f64.powi(self.n_vars as i32),
                limit: ENUMERATION_LIMIT,
            });
        }
        for &v in &self.sweep {
            let ok = match self.kind {
                ExperimentKind::IsingMismatch => (0.0..=1.0).contains(&v),
                ExperimentKind::MimoSer => v.is_finite() && v > 0.0,
            };
            if !ok {
                return bad(format!("invalid sweep value {v}"));
            }
        }
        for &alpha in &self.alphas {
            self.engine(alpha, 0).validate()?;
        }
        Ok(())
    }

    /// Engine settings for one run at `alpha` in trial with `seed`.
    pub fn engine(&self, alpha: f64, seed: u64) -> EngineConfig {
        EngineConfig {
            alpha,
            max_sweeps: self.max_sweeps,
            tolerance: self.tolerance,
            schedule: match self.schedule {
                ScheduleKind::Fixed => Schedule::FixedOrder,
                ScheduleKind::Random => Schedule::SeededRandom { seed },
            },
            damping: self.damping,
            ..EngineConfig::default()
        }
    }

    /// α values to run, with α = 1 (plain BP) always included.
    fn method_alphas(&self) -> Vec<f64> {
        let mut alphas = self.alphas.clone();
        if !alphas.contains(&1.0) {
            alphas.push(1.0);
        }
        alphas
    }
}

/// Partial configuration, as read from a config file or command-line flags.
/// Later patches override earlier ones field by field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigPatch {
    pub experiment: Option<ExperimentKind>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub sweep: Option<Vec<f64>>,
    pub alphas: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub max_sweeps: Option<usize>,
    pub schedule: Option<ScheduleKind>,
    pub damping: Option<f64>,
    pub prior: Option<PriorMode>,
    pub mismatch: Option<MismatchMetric>,
    pub covariance_scaling: Option<String>,
    pub out: Option<PathBuf>,
}

impl ConfigPatch {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            field: "<config>".into(),
            message: e.to_string(),
        })
    }

    /// Overlays the fields set in `other`.
    pub fn merge(mut self, other: ConfigPatch) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(experiment, n, m, trials, sweep, alphas, seed, tol, max_sweeps, schedule, damping, prior, mismatch,
              covariance_scaling, out);
        self
    }

    /// Resolves against the defaults of `kind` (or of the patch's own
    /// `experiment` field when `kind` is `None`).
    pub fn resolve(self, kind: Option<ExperimentKind>) -> Result<ExperimentConfig> {
        if let (Some(a), Some(b)) = (kind, self.experiment) {
            if a != b {
                return Err(Error::InvalidConfig(format!(
                    "config is for {b:?} but {a:?} was requested"
                )));
            }
        }
        let kind = kind
            .or(self.experiment)
            .ok_or_else(|| Error::InvalidConfig("experiment kind not specified".into()))?;
        let mut c = ExperimentConfig::defaults(kind);
        if let Some(n) = self.n {
            c.n_vars = n;
            c.n_receive = n;
            if kind == ExperimentKind::MimoSer {
                c.sweep = default_sigmas(n);
            }
        }
        if let Some(m) = self.m {
            c.n_receive = m;
        }
        c.trials = self.trials.unwrap_or(c.trials);
        c.sweep = self.sweep.unwrap_or(c.sweep);
        c.alphas = self.alphas.unwrap_or(c.alphas);
        c.seed = self.seed.unwrap_or(c.seed);
        c.tolerance = self.tol.unwrap_or(c.tolerance);
        c.max_sweeps = self.max_sweeps.unwrap_or(c.max_sweeps);
        c.schedule = self.schedule.unwrap_or(c.schedule);
        c.damping = self.damping.unwrap_or(c.damping);
        c.prior = self.prior.unwrap_or(c.prior);
        c.mismatch = self.mismatch.unwrap_or(c.mismatch);
        if let Some(s) = self.covariance_scaling {
            c.covariance_scaling = s.parse()?;
        }
        c.out = self.out.or(c.out);
        c.validate()?;
        Ok(c)
    }
}

/// One (sweep value, method) cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep: f64,
    pub method: String,
    pub alpha: Option<f64>,
    /// Mismatch rate or symbol-error rate, in `[0, 1]`.
    pub metric: f64,
    pub trials: usize,
    pub converged_frac: f64,
    /// Raw error count behind `metric`.
    pub errors: u64,
    /// Number of scored decisions behind `metric`.
    pub decisions: u64,
}

impl ResultRow {
    /// Wilson score interval for `metric` treated as a binomial proportion.
    pub fn wilson_interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.errors, self.decisions, z)
    }
}

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let alpha = r.alpha.map(|a| format_significant(a, 6)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                format_significant(r.sweep, 6),
                r.method,
                alpha,
                format_significant(r.metric, 6),
                r.trials,
                format_significant(r.converged_frac, 6)
            );
        }
        out
    }

    /// The row for `method` at `sweep` with matching α (`None` for MAP/MMSE).
    pub fn find(&self, sweep: f64, method: &str, alpha: Option<f64>) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.sweep == sweep && r.method == method && r.alpha == alpha)
    }
}

fn bp_label(alpha: f64) -> &'static str {
    if alpha == 1.0 {
        "BP"
    } else {
        "alpha-BP"
    }
}

fn bp_prior_label(alpha: f64) -> &'static str {
    if alpha == 1.0 {
        "BP+MMSE"
    } else {
        "alpha-BP+MMSE"
    }
}

#[derive(Clone)]
struct Tally {
    method: &'static str,
    alpha: Option<f64>,
    errors: u64,
    decisions: u64,
    converged: usize,
}

impl Tally {
    fn new(method: &'static str, alpha: Option<f64>) -> Self {
        Self {
            method,
            alpha,
            errors: 0,
            decisions: 0,
            converged: 0,
        }
    }

    fn score(&mut self, decided: &[usize], reference: &[usize], metric: MismatchMetric, converged: bool) {
        let wrong = decided.iter().zip(reference).filter(|(a, b)| a != b).count() as u64;
        match metric {
            MismatchMetric::Hamming => {
                self.errors += wrong;
                self.decisions += reference.len() as u64;
            }
            MismatchMetric::Vector => {
                self.errors += u64::from(wrong > 0);
                self.decisions += 1;
            }
        }
        self.converged += usize::from(converged);
    }

    fn row(self, sweep: f64, trials: usize) -> ResultRow {
        ResultRow {
            sweep,
            method: self.method.to_string(),
            alpha: self.alpha,
            metric: self.errors as f64 / self.decisions as f64,
            trials,
            converged_frac: self.converged as f64 / trials as f64,
            errors: self.errors,
            decisions: self.decisions,
        }
    }
}

fn run_bp(
    graph: &FactorGraph,
    config: &ExperimentConfig,
    alpha: f64,
    seed: u64,
    priors: Option<&[Option<Vec<f64>>]>,
) -> Result<(Vec<usize>, ConvergenceReport)> {
    let (state, report) = engine::run(graph, &config.engine(alpha, seed), priors)?;
    Ok((engine::map_decision(&state, graph), report))
}

/// Mismatch between exact MAP and α-BP decisions on Erdős–Rényi Ising
/// models, one row per (edge probability, α).
pub fn run_ising_mismatch(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let alphas = config.method_alphas();
    let mut table = ResultTable::default();
    for &edge_prob in &config.sweep {
        let mut tallies: Vec<Tally> = alphas.iter().map(|&a| Tally::new(bp_label(a), Some(a))).collect();
        for trial in 0..config.trials {
            let seed = config.seed.wrapping_add(trial as u64);
            let graph = ising_to_graph(&sample_ising(config.n_vars, edge_prob, seed)?);
            let reference = exact_map(&graph)?.assignment;
            for (tally, &alpha) in tallies.iter_mut().zip(&alphas) {
                let (decided, report) = run_bp(&graph, config, alpha, seed, None)?;
                tally.score(&decided, &reference, config.mismatch, report.converged);
            }
        }
        table
            .rows
            .extend(tallies.into_iter().map(|t| t.row(edge_prob, config.trials)));
    }
    Ok(table)
}

/// Symbol-error rates of MAP, MMSE, α-BP and (optionally) α-BP with MMSE
/// priors on random Gaussian MIMO channels, one row per (σ_w, method).
pub fn run_mimo_ser(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let alphas = config.method_alphas();
    let alphabet = Alphabet::binary();
    let mut table = ResultTable::default();
    for &sigma in &config.sweep {
        let mut map = Tally::new("MAP", None);
        let mut mmse = Tally::new("MMSE", None);
        let mut plain: Vec<Tally> = alphas.iter().map(|&a| Tally::new(bp_label(a), Some(a))).collect();
        let mut primed: Vec<Tally> = alphas
            .iter()
            .map(|&a| Tally::new(bp_prior_label(a), Some(a)))
            .collect();
        for trial in 0..config.trials {
            let seed = config.seed.wrapping_add(trial as u64);
            let instance = sample_mimo(config.n_vars, config.n_receive, sigma, seed)?;
            let truth = instance.symbols();
            let graph = mimo_to_graph(&instance);
            // symbol errors are scored per symbol regardless of `mismatch`
            let metric = MismatchMetric::Hamming;

            map.score(&exact_map(&graph)?.assignment, truth, metric, true);
            let posterior = mmse_posterior(&instance, config.covariance_scaling)?;
            mmse.score(&mmse_decide(&posterior, &alphabet), truth, metric, true);

            for (tally, &alpha) in plain.iter_mut().zip(&alphas) {
                let (decided, report) = run_bp(&graph, config, alpha, seed, None)?;
                tally.score(&decided, truth, metric, report.converged);
            }
            if config.prior == PriorMode::Mmse {
                let priors: Vec<Option<Vec<f64>>> = mmse_prior_factors(&posterior, &alphabet)?
                    .into_iter()
                    .map(Some)
                    .collect();
                for (tally, &alpha) in primed.iter_mut().zip(&alphas) {
                    let (decided, report) = run_bp(&graph, config, alpha, seed, Some(&priors))?;
                    tally.score(&decided, truth, metric, report.converged);
                }
            }
        }
        let rows = &mut table.rows;
        rows.push(map.row(sigma, config.trials));
        rows.push(mmse.row(sigma, config.trials));
        rows.extend(plain.into_iter().map(|t| t.row(sigma, config.trials)));
        if config.prior == PriorMode::Mmse {
            rows.extend(primed.into_iter().map(|t| t.row(sigma, config.trials)));
        }
    }
    Ok(table)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    match config.kind {
        ExperimentKind::IsingMismatch => run_ising_mismatch(config),
        ExperimentKind::MimoSer => run_mimo_ser(config),
    }
}

fn format_symbol(v: f64) -> String {
    let s = format_significant(v, 12);
    if v > 0.0 {
        format!("+{s}")
    } else {
        s
    }
}

/// Runs α-BP on `graph` and renders marginals, the MAP decision and the
/// convergence report as `key: value` lines.
pub fn infer_report(graph: &FactorGraph, config: &EngineConfig) -> Result<(String, ConvergenceReport)> {
    let (state, report) = engine::run(graph, config, None)?;
    let mut out = String::new();
    for (i, q) in engine::marginals(&state, graph).iter().enumerate() {
        let probs: Vec<String> = q.iter().map(|p| format_significant(*p, 12)).collect();
        let _ = writeln!(out, "x{i}: {}", probs.join(" "));
    }
    let decision: Vec<String> = engine::map_decision(&state, graph)
        .into_iter()
        .map(|a| format_symbol(graph.alphabet().value(a)))
        .collect();
    let _ = writeln!(out, "decision: {}", decision.join(" "));
    let _ = writeln!(out, "converged: {}", report.converged);
    let _ = writeln!(out, "sweeps: {}", report.sweeps_used);
    let _ = writeln!(out, "residual: {}", format_significant(report.final_residual, 6));
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            trials: 20,
            alphas: vec![0.4, 1.0],
            ..ExperimentConfig::defaults(kind)
        }
    }

    #[test]
    fn uncoupled_ising_has_no_mismatch() {
        let c = ExperimentConfig {
            sweep: vec![0.0],
            alphas: vec![0.2, 0.4, 1.4],
            ..small(ExperimentKind::IsingMismatch)
        };
        let t = run_ising_mismatch(&c).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.rows[3].method, "BP");
        assert!(t.rows.iter().all(|r| r.metric == 0.0 && r.converged_frac == 1.0));
    }

    #[test]
    fn rows_cover_every_cell() {
        let c = ExperimentConfig {
            sweep: vec![0.2, 0.8],
            ..small(ExperimentKind::IsingMismatch)
        };
        let t = run_ising_mismatch(&c).unwrap();
        assert_eq!(t.rows.len(), 4);
        for r in &t.rows {
            assert!((0.0..=1.0).contains(&r.metric));
            assert!((0.0..=1.0).contains(&r.converged_frac));
        }
        let csv = t.to_csv();
        assert!(csv.starts_with("sweep,method,alpha,metric,trials,converged_frac\n"));
        assert!(csv.ends_with('\n'));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn vector_metric_counts_trials() {
        let c = ExperimentConfig {
            sweep: vec![0.9],
            mismatch: MismatchMetric::Vector,
            ..small(ExperimentKind::IsingMismatch)
        };
        let t = run_ising_mismatch(&c).unwrap();
        assert!(t.rows.iter().all(|r| r.decisions == 20));
    }

    #[test]
    fn noiseless_mimo_is_error_free() {
        // a tall channel keeps the Gram matrix diagonally dominant
        let c = ExperimentConfig {
            sweep: vec![1e-9, 1e-3],
            n_receive: 64,
            ..small(ExperimentKind::MimoSer)
        };
        let t = run_mimo_ser(&c).unwrap();
        let methods: Vec<&str> = t.rows.iter().take(6).map(|r| r.method.as_str()).collect();
        assert_eq!(methods, ["MAP", "MMSE", "alpha-BP", "BP", "alpha-BP+MMSE", "BP+MMSE"]);
        for r in &t.rows {
            assert_eq!(r.metric, 0.0, "{} at alpha {:?}", r.method, r.alpha);
        }
    }

    #[test]
    fn noiseless_square_mimo_map_and_mmse_are_exact() {
        let c = ExperimentConfig {
            sweep: vec![1e-9],
            ..small(ExperimentKind::MimoSer)
        };
        let t = run_mimo_ser(&c).unwrap();
        assert_eq!(t.find(1e-9, "MAP", None).unwrap().metric, 0.0);
        assert_eq!(t.find(1e-9, "MMSE", None).unwrap().metric, 0.0);
    }

    #[test]
    fn patch_precedence() {
        let file = ConfigPatch::from_json(r#"{"experiment": "mimo-ser", "trials": 7, "alphas": [0.5]}"#).unwrap();
        let flags = ConfigPatch {
            trials: Some(3),
            ..Default::default()
        };
        let c = file.merge(flags).resolve(None).unwrap();
        assert_eq!(c.kind, ExperimentKind::MimoSer);
        assert_eq!(c.trials, 3);
        assert_eq!(c.alphas, vec![0.5]);
        assert_eq!(c.n_vars, 8);
        assert!(ConfigPatch::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn invalid_configs() {
        let mut c = small(ExperimentKind::IsingMismatch);
        c.sweep = vec![1.2];
        assert!(c.validate().is_err());
        c = small(ExperimentKind::IsingMismatch);
        c.trials = 0;
        assert!(c.validate().is_err());
        c = small(ExperimentKind::IsingMismatch);
        c.n_vars = 21;
        assert!(matches!(c.validate(), Err(Error::EnumerationTooLarge { .. })));
        c = small(ExperimentKind::MimoSer);
        c.sweep = vec![0.0];
        assert!(c.validate().is_err());
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert!(lo.abs() < 1e-15);
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn report_format() {
        let g = FactorGraph::new(Alphabet::binary(), vec![vec![1.0, 3.0]], vec![]).unwrap();
        let (text, report) = infer_report(&g, &EngineConfig::default()).unwrap();
        assert!(report.converged);
        assert!(text.contains("x0: 0.25 0.75\n"), "{text}");
        assert!(text.contains("decision: +1\n"), "{text}");
    }
}
