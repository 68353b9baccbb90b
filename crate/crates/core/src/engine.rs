//! α-belief propagation.
//!
//! The surrogate `q(x) ∝ ∏ f̃_i(x_i) ∏ m_{k→i}(x_i) m_{k→j}(x_j)` is refined one
//! directed message at a time. For a pairwise factor `t_k` joining `x_i` and
//! `x_j`, the refinement of `m_{k→i}` is
//!
//! ```text
//! m_{k→i}(x_i) ∝ [ Σ_{x_j} t_k(x_i,x_j)^α · m_{k→j}(x_j)^{1-α} · m_{j→k}(x_j) ] · m_{k→i}(x_i)^{1-α}
//! m_{j→k}(x_j) = f̃_j(x_j) · p̂_j(x_j) · ∏_{n ∈ Pa[j]\k} m_{n→j}(x_j)
//! ```
//!
//! and the singleton surrogate follows `f̃_i ∝ f_i^α f̃_i^{1-α}`. At `α = 1`
//! the rule is the ordinary sum-product message.
//!
//! All products and powers are evaluated on log tables with a log-sum-exp
//! reduction. Messages are stored normalized and clamped from below by
//! `message_floor` so `m^{1-α}` stays finite. The clamp acts on log tables.
//! A floor of `f` caps the evidence one message can carry at `-ln f` nats;
//! the default keeps that cap near 690 nats.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::FactorGraph;
use crate::numeric::{log_sum_exp, normalize_log};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_SWEEPS: usize = 50;
pub const DEFAULT_MESSAGE_FLOOR: f64 = 1e-300;
pub const MAX_ALPHA: f64 = 2.0;

/// Order in which pairwise factors are visited within a sweep.
///
/// Both directed messages of a factor are refreshed back to back, first the
/// one toward the lower endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Factors in id order every sweep.
    FixedOrder,
    /// Factors shuffled every sweep by a generator seeded once per run.
    SeededRandom { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub alpha: f64,
    pub max_sweeps: usize,
    pub tolerance: f64,
    pub schedule: Schedule,
    /// Weight of the previous message when committing, in `[0, 1)`.
    pub damping: f64,
    pub message_floor: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            tolerance: DEFAULT_TOLERANCE,
            schedule: Schedule::FixedOrder,
            damping: 0.0,
            message_floor: DEFAULT_MESSAGE_FLOOR,
        }
    }
}

impl EngineConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha <= MAX_ALPHA) {
            return bad(format!("alpha must lie in (0, {MAX_ALPHA}], got {}", self.alpha));
        }
        if self.max_sweeps == 0 {
            return bad("max_sweeps must be positive".into());
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return bad(format!("damping must lie in [0, 1), got {}", self.damping));
        }
        if !(self.message_floor.is_finite() && self.message_floor > 0.0 && self.message_floor < 1.0) {
            return bad(format!("message_floor must lie in (0, 1), got {}", self.message_floor));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub sweeps_used: usize,
    /// Largest absolute per-entry message change during the last sweep.
    pub final_residual: f64,
}

/// One committed factor-to-variable message, as seen by a run observer.
#[derive(Debug, Clone, Copy)]
pub struct MessageCommit<'a> {
    pub sweep: usize,
    pub factor: usize,
    pub variable: usize,
    pub table: &'a [f64],
}

/// Messages, singleton surrogates and optional priors of one inference run.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    arity: usize,
    floor: f64,
    // slot 2k targets the lower endpoint of factor k, slot 2k+1 the upper one
    messages: Vec<f64>,
    log_messages: Vec<f64>,
    log_surrogate: Vec<Vec<f64>>,
    log_priors: Vec<Option<Vec<f64>>>,
}

/// Uniform messages, `f̃_i = f_i`, and optional priors `p̂_i`.
///
/// `priors`, when given, holds one entry per variable; `None` entries mean
/// that variable has no prior. Prior tables are linear and strictly positive.
pub fn init_state(graph: &FactorGraph, priors: Option<&[Option<Vec<f64>>]>) -> Result<BeliefState> {
    BeliefState::new(graph, priors, DEFAULT_MESSAGE_FLOOR)
}

impl BeliefState {
    pub fn new(graph: &FactorGraph, priors: Option<&[Option<Vec<f64>>]>, floor: f64) -> Result<Self> {
        let a = graph.alphabet().len();
        let n = graph.n_vars();
        let slots = 2 * graph.pairwise().len();
        let uniform = 1.0 / a as f64;

        let log_priors = match priors {
            None => vec![None; n],
            Some(p) => {
                if p.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "priors".into(),
                        expected: n,
                        got: p.len(),
                    });
                }
                p.iter()
                    .enumerate()
                    .map(|(var, table)| table.as_deref().map(|t| log_prior(var, t, a)).transpose())
                    .collect::<Result<Vec<_>>>()?
            }
        };

        Ok(Self {
            arity: a,
            floor,
            messages: vec![uniform; slots * a],
            log_messages: vec![uniform.ln(); slots * a],
            log_surrogate: graph
                .singletons()
                .iter()
                .map(|f| f.log_table().to_vec())
                .collect(),
            log_priors,
        })
    }

    pub fn message_floor(&self) -> f64 {
        self.floor
    }

    pub fn message_count(&self) -> usize {
        self.messages.len() / self.arity
    }

    fn slot(graph: &FactorGraph, k: usize, var: usize) -> Result<usize> {
        let (i, j) = graph
            .pairwise()
            .get(k)
            .ok_or(Error::NotIncident { factor: k, var })?
            .endpoints();
        if var == i {
            Ok(2 * k)
        } else if var == j {
            Ok(2 * k + 1)
        } else {
            Err(Error::NotIncident { factor: k, var })
        }
    }

    fn range(&self, slot: usize) -> std::ops::Range<usize> {
        slot * self.arity..(slot + 1) * self.arity
    }

    /// `m_{k→var}`, normalized.
    pub fn message(&self, graph: &FactorGraph, k: usize, var: usize) -> Result<&[f64]> {
        let s = Self::slot(graph, k, var)?;
        Ok(&self.messages[self.range(s)])
    }

    /// Overwrites `m_{k→var}` with a normalized, floor-clamped copy of `table`.
    pub fn set_message(&mut self, graph: &FactorGraph, k: usize, var: usize, table: &[f64]) -> Result<()> {
        let s = Self::slot(graph, k, var)?;
        check_table("message", table, self.arity)?;
        let mut logs: Vec<f64> = table.iter().map(|v| v.ln()).collect();
        normalize_log(&mut logs);
        self.clamp_log(&mut logs);
        self.store_log(s, &logs);
        Ok(())
    }

    /// Linear singleton surrogate `f̃_var`.
    pub fn surrogate(&self, var: usize) -> Vec<f64> {
        self.log_surrogate[var].iter().map(|l| l.exp()).collect()
    }

    pub fn set_surrogate(&mut self, var: usize, table: &[f64]) -> Result<()> {
        check_table("surrogate", table, self.arity)?;
        self.log_surrogate[var] = table.iter().map(|v| v.ln()).collect();
        Ok(())
    }

    /// Normalized prior `p̂_var`, if any.
    pub fn prior(&self, var: usize) -> Option<Vec<f64>> {
        self.log_priors[var].as_ref().map(|l| l.iter().map(|v| v.exp()).collect())
    }

    fn log_variable_to_factor(&self, graph: &FactorGraph, j: usize, exclude: Option<usize>, out: &mut [f64]) {
        out.copy_from_slice(&self.log_surrogate[j]);
        if let Some(p) = &self.log_priors[j] {
            out.iter_mut().zip(p).for_each(|(o, l)| *o += l);
        }
        for &n in graph.neighbors(j) {
            if Some(n) == exclude {
                continue;
            }
            let s = if graph.factor(n).endpoints().0 == j { 2 * n } else { 2 * n + 1 };
            let r = self.range(s);
            out.iter_mut()
                .zip(&self.log_messages[r])
                .for_each(|(o, l)| *o += l);
        }
    }

    /// Unnormalized log of `q_i`; ties in the argmax are preserved exactly.
    fn log_belief(&self, graph: &FactorGraph, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.arity];
        self.log_variable_to_factor(graph, i, None, &mut out);
        out
    }

    /// Log of the refined `m_{k→i}`, normalized but not yet clamped.
    fn log_factor_update(&self, graph: &FactorGraph, k: usize, i: usize, alpha: f64) -> Result<Vec<f64>> {
        let factor = graph.factor(k);
        let target = Self::slot(graph, k, i)?;
        let j = factor.other(i).expect("slot() checked incidence");
        let reverse = if target % 2 == 0 { target + 1 } else { target - 1 };
        let target_is_lower = target % 2 == 0;
        let a = self.arity;

        let mut cavity = vec![0.0; a];
        self.log_variable_to_factor(graph, j, Some(k), &mut cavity);
        let old_target = &self.log_messages[self.range(target)];
        let old_reverse = &self.log_messages[self.range(reverse)];

        let mut terms = vec![0.0; a];
        let mut out = vec![0.0; a];
        for xi in 0..a {
            for xj in 0..a {
                let log_t = if target_is_lower {
                    factor.log_entry(xi, xj)
                } else {
                    factor.log_entry(xj, xi)
                };
                terms[xj] = alpha * log_t + (1.0 - alpha) * old_reverse[xj] + cavity[xj];
            }
            out[xi] = (1.0 - alpha) * old_target[xi] + log_sum_exp(&terms);
        }
        normalize_log(&mut out);
        Ok(out)
    }

    /// Floor-clamps a normalized log table and renormalizes it.
    fn clamp_log(&self, log_table: &mut [f64]) {
        let log_floor = self.floor.ln();
        log_table.iter_mut().for_each(|l| *l = l.max(log_floor));
        normalize_log(log_table);
    }

    fn store_log(&mut self, slot: usize, log_table: &[f64]) {
        let r = self.range(slot);
        for (n, &l) in r.zip(log_table) {
            self.log_messages[n] = l;
            self.messages[n] = l.exp();
        }
    }
}

fn check_table(what: &str, table: &[f64], arity: usize) -> Result<()> {
    if table.len() != arity {
        return Err(Error::DimensionMismatch {
            what: what.into(),
            expected: arity,
            got: table.len(),
        });
    }
    for &v in table {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::NonPositiveEntry { what: what.into(), value: v });
        }
        if !v.is_finite() {
            return Err(Error::NonFiniteEntry { what: what.into(), value: v });
        }
    }
    Ok(())
}

fn log_prior(var: usize, table: &[f64], arity: usize) -> Result<Vec<f64>> {
    check_table(&format!("prior {var}"), table, arity)?;
    let mut l: Vec<f64> = table.iter().map(|v| v.ln()).collect();
    normalize_log(&mut l);
    Ok(l)
}

/// `m_{j→k}`: the normalized product of `f̃_j`, `p̂_j` and every incoming
/// factor message except the one from `k`.
pub fn variable_to_factor(state: &BeliefState, graph: &FactorGraph, j: usize, k: usize) -> Result<Vec<f64>> {
    BeliefState::slot(graph, k, j)?;
    let mut out = vec![0.0; state.arity];
    state.log_variable_to_factor(graph, j, Some(k), &mut out);
    normalize_log(&mut out);
    Ok(out.into_iter().map(f64::exp).collect())
}

/// Refined `m_{k→i}` for the given α. The state is not modified.
pub fn factor_to_variable_update(
    state: &BeliefState,
    graph: &FactorGraph,
    k: usize,
    i: usize,
    alpha: f64,
) -> Result<Vec<f64>> {
    let mut log_new = state.log_factor_update(graph, k, i, alpha)?;
    state.clamp_log(&mut log_new);
    Ok(log_new.into_iter().map(f64::exp).collect())
}

/// Applies `f̃_i ← normalize(f_i^α f̃_i^{1-α})` in place.
pub fn singleton_refresh(state: &mut BeliefState, graph: &FactorGraph, i: usize, alpha: f64) {
    let f = graph.singleton(i).log_table();
    let s = &mut state.log_surrogate[i];
    s.iter_mut()
        .zip(f)
        .for_each(|(st, fl)| *st = alpha * fl + (1.0 - alpha) * *st);
    normalize_log(s);
}

/// Belief `q_i ∝ f̃_i · p̂_i · ∏_{k ∈ Pa[i]} m_{k→i}`.
pub fn marginal(state: &BeliefState, graph: &FactorGraph, i: usize) -> Vec<f64> {
    let mut l = state.log_belief(graph, i);
    normalize_log(&mut l);
    let mut q: Vec<f64> = l.into_iter().map(|v| v.exp().max(f64::MIN_POSITIVE)).collect();
    let total: f64 = q.iter().sum();
    q.iter_mut().for_each(|v| *v /= total);
    q
}

pub fn marginals(state: &BeliefState, graph: &FactorGraph) -> Vec<Vec<f64>> {
    (0..graph.n_vars()).map(|i| marginal(state, graph, i)).collect()
}

/// Per-variable argmax of the belief, as alphabet indices. Ties go to the
/// lowest index.
pub fn map_decision(state: &BeliefState, graph: &FactorGraph) -> Vec<usize> {
    (0..graph.n_vars())
        .map(|i| argmax_first(&state.log_belief(graph, i)))
        .collect()
}

pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (n, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = n;
        }
    }
    best
}

/// Runs α-BP to convergence or until `max_sweeps`.
pub fn run(
    graph: &FactorGraph,
    config: &EngineConfig,
    priors: Option<&[Option<Vec<f64>>]>,
) -> Result<(BeliefState, ConvergenceReport)> {
    run_observed(graph, config, priors, |_| {})
}

/// [`run`], calling `observer` after every committed factor-to-variable
/// message.
pub fn run_observed<F>(
    graph: &FactorGraph,
    config: &EngineConfig,
    priors: Option<&[Option<Vec<f64>>]>,
    mut observer: F,
) -> Result<(BeliefState, ConvergenceReport)>
where
    F: FnMut(MessageCommit<'_>),
{
    config.validate()?;
    let mut state = BeliefState::new(graph, priors, config.message_floor)?;
    let mut order: Vec<usize> = (0..graph.pairwise().len()).collect();
    let mut rng = match config.schedule {
        Schedule::FixedOrder => None,
        Schedule::SeededRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    };

    let mut report = ConvergenceReport {
        converged: false,
        sweeps_used: 0,
        final_residual: f64::INFINITY,
    };
    for sweep in 0..config.max_sweeps {
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut residual: f64 = 0.0;
        for &k in &order {
            let (lo, hi) = graph.factor(k).endpoints();
            for var in [lo, hi] {
                let mut fresh = state.log_factor_update(graph, k, var, config.alpha)?;
                state.clamp_log(&mut fresh);
                let slot = BeliefState::slot(graph, k, var)?;
                let r = state.range(slot);
                if config.damping > 0.0 {
                    let d = config.damping;
                    fresh
                        .iter_mut()
                        .zip(&state.messages[r.clone()])
                        .for_each(|(l, old)| *l = ((1.0 - d) * l.exp() + d * old).ln());
                    normalize_log(&mut fresh);
                }
                for (new, old) in fresh.iter().zip(&state.messages[r]) {
                    residual = residual.max((new.exp() - old).abs());
                }
                state.store_log(slot, &fresh);
                observer(MessageCommit {
                    sweep,
                    factor: k,
                    variable: var,
                    table: state.message(graph, k, var)?,
                });
            }
        }
        for i in 0..graph.n_vars() {
            singleton_refresh(&mut state, graph, i, config.alpha);
        }
        report = ConvergenceReport {
            converged: residual <= config.tolerance,
            sweeps_used: sweep + 1,
            final_residual: residual,
        };
        if report.converged {
            break;
        }
    }
    Ok((state, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Alphabet, PairwiseSpec};

    fn two_var(t: [[f64; 2]; 2], f0: [f64; 2], f1: [f64; 2]) -> FactorGraph {
        FactorGraph::new(
            Alphabet::binary(),
            vec![f0.to_vec(), f1.to_vec()],
            vec![PairwiseSpec::new(0, 1, t.iter().map(|r| r.to_vec()).collect())],
        )
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Star graph: variable 0 joined to 1 and 2.
    fn star(f0: [f64; 2]) -> FactorGraph {
        let t = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        FactorGraph::new(
            Alphabet::binary(),
            vec![f0.to_vec(), vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![PairwiseSpec::new(0, 1, t.clone()), PairwiseSpec::new(0, 2, t)],
        )
        .unwrap()
    }

    #[test]
    fn init_is_uniform_and_surrogate_is_singleton() {
        let g = two_var([[2.0, 1.0], [1.0, 2.0]], [1.0, 3.0], [2.0, 5.0]);
        let s = init_state(&g, None).unwrap();
        assert_eq!(s.message_count(), 2);
        assert_eq!(s.message(&g, 0, 0).unwrap(), &[0.5, 0.5]);
        assert_eq!(s.message(&g, 0, 1).unwrap(), &[0.5, 0.5]);
        assert_eq!(s.surrogate(0), g.singleton(0).table());
        assert_eq!(s.surrogate(1), g.singleton(1).table());
    }

    #[test]
    fn prior_validation() {
        let g = two_var([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], [1.0, 1.0]);
        let bad = vec![Some(vec![0.0, 1.0]), None];
        assert!(matches!(init_state(&g, Some(&bad)), Err(Error::NonPositiveEntry { .. })));
        let short = vec![Some(vec![0.5, 0.5, 0.1]), None];
        assert!(matches!(init_state(&g, Some(&short)), Err(Error::DimensionMismatch { .. })));
        let few = vec![None];
        assert!(matches!(init_state(&g, Some(&few)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn leaf_variable_to_factor_is_singleton() {
        let g = two_var([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], [1.0, 3.0]);
        let s = init_state(&g, None).unwrap();
        assert!(close(&variable_to_factor(&s, &g, 1, 0).unwrap(), &[0.25, 0.75], 1e-15));
    }

    #[test]
    fn variable_to_factor_excludes_target() {
        let g = star([1.0, 1.0]);
        let mut s = init_state(&g, None).unwrap();
        s.set_message(&g, 1, 0, &[0.8, 0.2]).unwrap();
        assert!(close(&variable_to_factor(&s, &g, 0, 0).unwrap(), &[0.8, 0.2], 1e-15));
        // the message from factor 0 must not feed back into m_{0→0}
        s.set_message(&g, 0, 0, &[0.1, 0.9]).unwrap();
        assert!(close(&variable_to_factor(&s, &g, 0, 0).unwrap(), &[0.8, 0.2], 1e-15));
    }

    #[test]
    fn variable_to_factor_with_prior() {
        let g = star([1.0, 3.0]);
        let priors = vec![Some(vec![0.5, 0.5]), None, None];
        let mut s = init_state(&g, Some(&priors)).unwrap();
        s.set_message(&g, 1, 0, &[0.8, 0.2]).unwrap();
        let m = variable_to_factor(&s, &g, 0, 0).unwrap();
        // [0.8·1, 0.2·3] / 1.4
        assert!(close(&m, &[0.8 / 1.4, 0.6 / 1.4], 1e-12));
        assert!(close(&m, &[0.5714, 0.4286], 1e-4));
    }

    #[test]
    fn not_incident_is_an_error() {
        let g = star([1.0, 1.0]);
        let s = init_state(&g, None).unwrap();
        assert_eq!(
            variable_to_factor(&s, &g, 2, 0).unwrap_err(),
            Error::NotIncident { factor: 0, var: 2 }
        );
        assert!(factor_to_variable_update(&s, &g, 1, 1, 0.5).is_err());
    }

    #[test]
    fn alpha_one_update_is_sum_product() {
        let g = two_var([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], [0.8, 0.2]);
        let mut s = init_state(&g, None).unwrap();
        // old messages are irrelevant at α = 1
        s.set_message(&g, 0, 0, &[0.9, 0.1]).unwrap();
        s.set_message(&g, 0, 1, &[0.3, 0.7]).unwrap();
        let m = factor_to_variable_update(&s, &g, 0, 0, 1.0).unwrap();
        assert!(close(&m, &[0.6, 0.4], 1e-15));
    }

    #[test]
    fn half_alpha_update() {
        let g = two_var([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], [0.8, 0.2]);
        let s = init_state(&g, None).unwrap();
        let m = factor_to_variable_update(&s, &g, 0, 0, 0.5).unwrap();
        let a = 2f64.sqrt() * 0.8 + 0.2;
        let b = 0.8 + 2f64.sqrt() * 0.2;
        assert!(close(&m, &[a / (a + b), b / (a + b)], 1e-14));
        assert!(close(&m, &[0.5515, 0.4485], 1e-3));
    }

    #[test]
    fn update_toward_upper_endpoint_uses_transposed_table() {
        let g = two_var([[3.0, 1.0], [2.0, 5.0]], [0.25, 0.75], [1.0, 1.0]);
        let s = init_state(&g, None).unwrap();
        let m = factor_to_variable_update(&s, &g, 0, 1, 1.0).unwrap();
        // m(x1) ∝ Σ_x0 t(x0, x1) f0(x0)
        let u = [3.0 * 0.25 + 2.0 * 0.75, 1.0 * 0.25 + 5.0 * 0.75];
        let z = u[0] + u[1];
        assert!(close(&m, &[u[0] / z, u[1] / z], 1e-14));
    }

    #[test]
    fn symmetric_inputs_give_uniform() {
        let g = two_var([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], [1.0, 1.0]);
        let s = init_state(&g, None).unwrap();
        for alpha in [0.2, 0.5, 1.0, 1.5, 2.0] {
            let m = factor_to_variable_update(&s, &g, 0, 0, alpha).unwrap();
            assert!(close(&m, &[0.5, 0.5], 1e-15));
        }
    }

    #[test]
    fn singleton_refresh_cases() {
        let g = FactorGraph::new(Alphabet::binary(), vec![vec![4.0, 1.0]], vec![]).unwrap();
        let mut s = init_state(&g, None).unwrap();
        for alpha in [0.3, 1.0, 1.7] {
            singleton_refresh(&mut s, &g, 0, alpha);
            assert!(close(&s.surrogate(0), &[0.8, 0.2], 1e-14));
        }
        s.set_surrogate(0, &[1.0, 1.0]).unwrap();
        singleton_refresh(&mut s, &g, 0, 0.5);
        assert!(close(&s.surrogate(0), &[2.0 / 3.0, 1.0 / 3.0], 1e-14));
        s.set_surrogate(0, &[1.0, 9.0]).unwrap();
        singleton_refresh(&mut s, &g, 0, 1.0);
        assert!(close(&s.surrogate(0), &[0.8, 0.2], 1e-14));
    }

    #[test]
    fn marginal_products() {
        let g = FactorGraph::new(Alphabet::binary(), vec![vec![1.0, 3.0]], vec![]).unwrap();
        let s = init_state(&g, None).unwrap();
        assert!(close(&marginal(&s, &g, 0), &[0.25, 0.75], 1e-15));
        assert_eq!(map_decision(&s, &g), vec![1]);

        let g = star([1.0, 1.0]);
        let mut s = init_state(&g, None).unwrap();
        s.set_message(&g, 0, 0, &[0.6, 0.4]).unwrap();
        s.set_message(&g, 1, 0, &[0.6, 0.4]).unwrap();
        assert!(close(&marginal(&s, &g, 0), &[0.36 / 0.52, 0.16 / 0.52], 1e-14));
    }

    #[test]
    fn tie_goes_to_lowest_index() {
        let g = FactorGraph::new(Alphabet::binary(), vec![vec![2.0, 2.0]], vec![]).unwrap();
        let s = init_state(&g, None).unwrap();
        assert_eq!(map_decision(&s, &g), vec![0]);
        assert_eq!(argmax_first(&[0.5, 0.5]), 0);
    }

    #[test]
    fn isolated_variables_converge_in_one_sweep() {
        let g = FactorGraph::new(Alphabet::binary(), vec![vec![1.0, 3.0], vec![2.0, 1.0]], vec![]).unwrap();
        let priors = vec![Some(vec![3.0, 1.0]), None];
        let (s, report) = run(&g, &EngineConfig::with_alpha(0.4), Some(&priors)).unwrap();
        assert!(report.converged);
        assert_eq!(report.sweeps_used, 1);
        assert_eq!(report.final_residual, 0.0);
        assert!(close(&marginal(&s, &g, 0), &[0.5, 0.5], 1e-14));
        assert!(close(&marginal(&s, &g, 1), &[2.0 / 3.0, 1.0 / 3.0], 1e-14));
    }

    #[test]
    fn config_validation() {
        for alpha in [0.0, -1.0, 2.5, f64::NAN] {
            assert!(EngineConfig::with_alpha(alpha).validate().is_err());
        }
        assert!(EngineConfig::with_alpha(2.0).validate().is_ok());
        let c = EngineConfig { damping: 1.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = EngineConfig { tolerance: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = EngineConfig { max_sweeps: 0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn messages_respect_floor() {
        // extreme coupling drives one entry far below the floor
        let g = two_var([[1.0, 1e-30], [1e-30, 1.0]], [1.0, 1e30], [1.0, 1.0]);
        let config = EngineConfig {
            alpha: 0.5,
            message_floor: 1e-12,
            ..Default::default()
        };
        let (s, _) = run(&g, &config, None).unwrap();
        for var in [0, 1] {
            let m = s.message(&g, 0, var).unwrap();
            assert!(m.iter().all(|&v| v >= 1e-12 * 0.999));
            assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        // variable 0's evidence saturates the message toward variable 1
        assert!(s.message(&g, 0, 1).unwrap()[0] < 1e-11);
    }
}
