//! Ground truth by brute-force enumeration, and divergence measures on flat
//! tables.
//!
//! Joint assignments are enumerated in mixed-radix order with variable 0 as
//! the most significant digit, so index 0 is `(a_0, a_0, ..., a_0)` and MAP
//! ties resolve to the lexicographically first assignment.

use crate::error::{Error, Result};
use crate::graph::FactorGraph;
use crate::numeric::CompensatedSum;

/// Largest number of joint states the oracle will enumerate.
pub const ENUMERATION_LIMIT: usize = 1 << 20;

fn guard(graph: &FactorGraph) -> Result<usize> {
    let states = graph.state_count();
    if states > ENUMERATION_LIMIT as f64 {
        return Err(Error::EnumerationTooLarge {
            states,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(states as usize)
}

/// Writes the mixed-radix digits of `index` into `out`, variable 0 first.
pub fn decode_assignment(mut index: usize, arity: usize, out: &mut [usize]) {
    for digit in out.iter_mut().rev() {
        *digit = index % arity;
        index /= arity;
    }
}

/// The normalized joint distribution over every assignment.
#[derive(Debug, Clone)]
pub struct JointTable {
    n_vars: usize,
    arity: usize,
    probabilities: Vec<f64>,
    log_normalizer: f64,
}

impl JointTable {
    pub fn enumerate(graph: &FactorGraph) -> Result<Self> {
        let states = guard(graph)?;
        let n = graph.n_vars();
        let arity = graph.alphabet().len();
        let mut assignment = vec![0; n];
        let mut logs = Vec::with_capacity(states);
        for index in 0..states {
            decode_assignment(index, arity, &mut assignment);
            logs.push(graph.log_joint_unchecked(&assignment));
        }
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = CompensatedSum::default();
        let mut probabilities: Vec<f64> = logs
            .into_iter()
            .map(|l| {
                let v = (l - max).exp();
                total.add(v);
                v
            })
            .collect();
        let z = total.value();
        probabilities.iter_mut().for_each(|p| *p /= z);
        Ok(Self {
            n_vars: n,
            arity,
            probabilities,
            log_normalizer: max + z.ln(),
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `log Z`, the log of the sum of unnormalized joint values.
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn assignment(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_vars];
        decode_assignment(index, self.arity, &mut out);
        out
    }

    pub fn marginals(&self) -> Vec<Vec<f64>> {
        let mut acc = vec![vec![CompensatedSum::default(); self.arity]; self.n_vars];
        let mut assignment = vec![0; self.n_vars];
        for (index, &p) in self.probabilities.iter().enumerate() {
            decode_assignment(index, self.arity, &mut assignment);
            for (var, &a) in assignment.iter().enumerate() {
                acc[var][a].add(p);
            }
        }
        acc.into_iter()
            .map(|sums| {
                let m: Vec<f64> = sums.iter().map(CompensatedSum::value).collect();
                let z: f64 = m.iter().sum();
                m.into_iter().map(|v| v / z).collect()
            })
            .collect()
    }
}

/// Exact MAP assignment and its unnormalized joint value.
#[derive(Debug, Clone, PartialEq)]
pub struct MapEstimate {
    pub assignment: Vec<usize>,
    pub log_value: f64,
}

impl MapEstimate {
    /// `evaluate_joint` at the MAP assignment.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `argmax_x p(x)` by enumeration; the lexicographically first maximizer wins.
pub fn exact_map(graph: &FactorGraph) -> Result<MapEstimate> {
    let states = guard(graph)?;
    let arity = graph.alphabet().len();
    let mut assignment = vec![0; graph.n_vars()];
    let mut best_index = 0;
    let mut best = f64::NEG_INFINITY;
    for index in 0..states {
        decode_assignment(index, arity, &mut assignment);
        let l = graph.log_joint_unchecked(&assignment);
        if l > best {
            best = l;
            best_index = index;
        }
    }
    decode_assignment(best_index, arity, &mut assignment);
    let log_value = graph.log_joint(&assignment)?;
    Ok(MapEstimate { assignment, log_value })
}

/// Exact per-variable marginals.
pub fn exact_marginals(graph: &FactorGraph) -> Result<Vec<Vec<f64>>> {
    Ok(JointTable::enumerate(graph)?.marginals())
}

fn check_pair(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            what: "q".into(),
            expected: p.len(),
            got: q.len(),
        });
    }
    for (what, table) in [("p", p), ("q", q)] {
        if let Some(&v) = table.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::NegativeEntry { what: what.into(), value: v });
        }
    }
    Ok(())
}

/// α-divergence between unnormalized tables,
/// `Σ [α p + (1-α) q - p^α q^{1-α}] / (α (1-α))`.
///
/// `α = 0` and `α = 1` are the KL limits; use [`kl_divergence`] there.
pub fn alpha_divergence(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    check_pair(p, q)?;
    if alpha == 0.0 || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "alpha-divergence needs alpha outside {{0, 1}}, got {alpha}"
        )));
    }
    let mut total = CompensatedSum::default();
    for (&pv, &qv) in p.iter().zip(q) {
        // covers 0^α 0^{1-α}; the term vanishes identically when p = q
        if pv == qv {
            continue;
        }
        total.add(alpha * pv + (1.0 - alpha) * qv - pv.powf(alpha) * qv.powf(1.0 - alpha));
    }
    Ok(total.value() / (alpha * (1.0 - alpha)))
}

/// KL divergence between unnormalized tables, `Σ p log(p/q) + Σ (q - p)`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check_pair(p, q)?;
    let mut total = CompensatedSum::default();
    for (index, (&pv, &qv)) in p.iter().zip(q).enumerate() {
        if pv > 0.0 {
            if qv == 0.0 {
                return Err(Error::SupportViolation { index });
            }
            total.add(pv * (pv / qv).ln());
        }
        total.add(qv - pv);
    }
    Ok(total.value())
}
