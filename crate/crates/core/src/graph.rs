//! Pairwise discrete Markov random fields and their factor-graph topology.
//!
//! A [`FactorGraph`] represents an unnormalized distribution
//!
//! ```text
//! p(x) ∝ ∏_i f_i(x_i) ∏_k t_k(x_i, x_j)
//! ```
//!
//! over `n_vars` variables that share one finite [`Alphabet`]. Every variable
//! carries exactly one singleton factor; pairwise factors connect two distinct
//! variables and each unordered pair appears at most once.
//!
//! Potentials are held as natural logarithms. Models built from exponential
//! families (Ising couplings, Gaussian likelihoods) can span hundreds of
//! nats, which a linear table cannot represent without overflow. Linear tables
//! supplied through [`FactorGraph::new`] are validated for strict positivity
//! and converted once at construction.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered set of real symbol values shared by every variable.
///
/// The order defines table indexing and tie-breaking: index 0 wins ties.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    values: Vec<f64>,
}

impl Alphabet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidAlphabet(format!(
                "need at least 2 values, got {}",
                values.len()
            )));
        }
        for (a, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidAlphabet(format!("value {v} is not finite")));
            }
            if values[..a].contains(&v) {
                return Err(Error::InvalidAlphabet(format!("value {v} appears twice")));
            }
        }
        Ok(Self { values })
    }

    /// The binary antipodal alphabet `{-1, +1}` used by Ising and BPSK models.
    pub fn binary() -> Self {
        Self {
            values: vec![-1.0, 1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Index of the nearest alphabet value; ties go to the lower index.
    pub fn nearest(&self, x: f64) -> usize {
        let mut best = 0;
        let mut best_dist = (self.values[0] - x).abs();
        for (a, &v) in self.values.iter().enumerate().skip(1) {
            let d = (v - x).abs();
            if d < best_dist {
                best = a;
                best_dist = d;
            }
        }
        best
    }
}

/// Singleton factor `f_i(x_i)`, stored as log-potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct SingletonFactor {
    variable: usize,
    log_table: Vec<f64>,
}

impl SingletonFactor {
    pub fn variable(&self) -> usize {
        self.variable
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log_table
    }

    /// Linear-domain table. May overflow for extreme log-potentials.
    pub fn table(&self) -> Vec<f64> {
        self.log_table.iter().map(|l| l.exp()).collect()
    }
}

/// Pairwise factor `t_k(x_i, x_j)` with canonical endpoints `i < j`.
///
/// The table is row-major over `(x_i, x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseFactor {
    id: usize,
    endpoints: (usize, usize),
    arity: usize,
    log_table: Vec<f64>,
}

impl PairwiseFactor {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn endpoints(&self) -> (usize, usize) {
        self.endpoints
    }

    /// The endpoint opposite to `var`, if `var` is an endpoint.
    pub fn other(&self, var: usize) -> Option<usize> {
        match self.endpoints {
            (i, j) if i == var => Some(j),
            (i, j) if j == var => Some(i),
            _ => None,
        }
    }

    /// `log t_k(x_i = a, x_j = b)` in canonical orientation.
    #[inline]
    pub fn log_entry(&self, a: usize, b: usize) -> f64 {
        self.log_table[a * self.arity + b]
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log_table
    }

    pub fn table(&self) -> Vec<Vec<f64>> {
        self.log_table
            .chunks(self.arity)
            .map(|row| row.iter().map(|l| l.exp()).collect())
            .collect()
    }
}

/// Description of a pairwise factor before validation.
///
/// `table[a][b]` is the potential at `(x_i = a, x_j = b)`. Specs with `i > j`
/// are canonicalized by swapping the endpoints and transposing the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseSpec {
    pub i: usize,
    pub j: usize,
    pub table: Vec<Vec<f64>>,
}

impl PairwiseSpec {
    pub fn new(i: usize, j: usize, table: Vec<Vec<f64>>) -> Self {
        Self { i, j, table }
    }
}

/// Immutable pairwise MRF with precomputed adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGraph {
    alphabet: Alphabet,
    singletons: Vec<SingletonFactor>,
    pairwise: Vec<PairwiseFactor>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Clone, Copy)]
enum Domain {
    Linear,
    Log,
}

impl FactorGraph {
    /// Builds a graph from linear-domain tables. Every entry must be strictly
    /// positive and finite.
    pub fn new(
        alphabet: Alphabet,
        singletons: Vec<Vec<f64>>,
        pairwise: Vec<PairwiseSpec>,
    ) -> Result<Self> {
        Self::build(alphabet, singletons, pairwise, Domain::Linear)
    }

    /// Builds a graph from log-potentials. Every entry must be finite.
    pub fn from_log_potentials(
        alphabet: Alphabet,
        singletons: Vec<Vec<f64>>,
        pairwise: Vec<PairwiseSpec>,
    ) -> Result<Self> {
        Self::build(alphabet, singletons, pairwise, Domain::Log)
    }

    fn build(
        alphabet: Alphabet,
        singletons: Vec<Vec<f64>>,
        pairwise: Vec<PairwiseSpec>,
        domain: Domain,
    ) -> Result<Self> {
        let a = alphabet.len();
        let n_vars = singletons.len();
        let to_log = |what: &dyn Fn() -> String, v: f64| -> Result<f64> {
            match domain {
                Domain::Linear => {
                    if v.is_nan() || v <= 0.0 {
                        Err(Error::NonPositiveEntry { what: what(), value: v })
                    } else if !v.is_finite() {
                        Err(Error::NonFiniteEntry { what: what(), value: v })
                    } else {
                        Ok(v.ln())
                    }
                }
                Domain::Log => {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::NonFiniteEntry { what: what(), value: v })
                    }
                }
            }
        };

        let mut singleton_factors = Vec::with_capacity(n_vars);
        for (var, table) in singletons.into_iter().enumerate() {
            let what = || format!("singleton {var}");
            if table.len() != a {
                return Err(Error::DimensionMismatch {
                    what: what(),
                    expected: a,
                    got: table.len(),
                });
            }
            let log_table = table
                .into_iter()
                .map(|v| to_log(&what, v))
                .collect::<Result<Vec<_>>>()?;
            singleton_factors.push(SingletonFactor { variable: var, log_table });
        }

        let mut seen = HashSet::new();
        let mut pairwise_factors = Vec::with_capacity(pairwise.len());
        let mut adjacency = vec![Vec::new(); n_vars];
        for (id, spec) in pairwise.into_iter().enumerate() {
            let PairwiseSpec { i, j, table } = spec;
            for v in [i, j] {
                if v >= n_vars {
                    return Err(Error::DanglingVariable { id: v, n_vars });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            let what = || format!("pairwise factor {id} ({i}, {j})");
            if table.len() != a {
                return Err(Error::DimensionMismatch {
                    what: what(),
                    expected: a,
                    got: table.len(),
                });
            }
            for row in &table {
                if row.len() != a {
                    return Err(Error::DimensionMismatch {
                        what: what(),
                        expected: a,
                        got: row.len(),
                    });
                }
            }
            let (lo, hi) = (i.min(j), i.max(j));
            if !seen.insert((lo, hi)) {
                return Err(Error::DuplicateEdge(lo, hi));
            }
            let mut log_table = vec![0.0; a * a];
            for (r, row) in table.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    let l = to_log(&what, v)?;
                    if i < j {
                        log_table[r * a + c] = l;
                    } else {
                        log_table[c * a + r] = l;
                    }
                }
            }
            adjacency[lo].push(id);
            adjacency[hi].push(id);
            pairwise_factors.push(PairwiseFactor {
                id,
                endpoints: (lo, hi),
                arity: a,
                log_table,
            });
        }

        Ok(Self {
            alphabet,
            singletons: singleton_factors,
            pairwise: pairwise_factors,
            adjacency,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_vars(&self) -> usize {
        self.singletons.len()
    }

    pub fn singletons(&self) -> &[SingletonFactor] {
        &self.singletons
    }

    pub fn singleton(&self, var: usize) -> &SingletonFactor {
        &self.singletons[var]
    }

    pub fn pairwise(&self) -> &[PairwiseFactor] {
        &self.pairwise
    }

    pub fn factor(&self, k: usize) -> &PairwiseFactor {
        &self.pairwise[k]
    }

    /// `Pa[i]`: ids of the pairwise factors incident to `var`, in id order.
    pub fn neighbors(&self, var: usize) -> &[usize] {
        &self.adjacency[var]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Total number of joint assignments, as a float to avoid overflow.
    pub fn state_count(&self) -> f64 {
        (self.alphabet.len() as f64).powi(self.n_vars() as i32)
    }

    fn check_assignment(&self, assignment: &[usize]) -> Result<()> {
        if assignment.len() != self.n_vars() {
            return Err(Error::DimensionMismatch {
                what: "assignment".into(),
                expected: self.n_vars(),
                got: assignment.len(),
            });
        }
        let a = self.alphabet.len();
        for (var, &index) in assignment.iter().enumerate() {
            if index >= a {
                return Err(Error::IndexOutOfRange { var, index });
            }
        }
        Ok(())
    }

    /// Sum of all log-potentials at `assignment` (alphabet indices).
    pub fn log_joint(&self, assignment: &[usize]) -> Result<f64> {
        self.check_assignment(assignment)?;
        Ok(self.log_joint_unchecked(assignment))
    }

    pub(crate) fn log_joint_unchecked(&self, assignment: &[usize]) -> f64 {
        let mut total = 0.0;
        for f in &self.singletons {
            total += f.log_table[assignment[f.variable]];
        }
        for t in &self.pairwise {
            let (i, j) = t.endpoints;
            total += t.log_entry(assignment[i], assignment[j]);
        }
        total
    }

    /// Unnormalized joint `∏ f_i(x_i) ∏ t_k(x_i, x_j)` at `assignment`.
    pub fn evaluate_joint(&self, assignment: &[usize]) -> Result<f64> {
        self.log_joint(assignment).map(f64::exp)
    }
}
