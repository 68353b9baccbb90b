//! Seeded generators for the two benchmark families and their conversion to
//! factor graphs.
//!
//! * Ising: `p(x) ∝ exp{-xᵀJx - bᵀx}` on `{-1, +1}^N` with Erdős–Rényi sparsity
//!   in `J`. Factors are `t_k = exp{-2 J_ij x_i x_j}` and `f_i = exp{-J_ii - b_i x_i}`.
//! * MIMO: `y = Hx + e`, `e ~ N(0, σ_w² I)`, with posterior
//!   `p(x|y) ∝ exp{-‖Hx - y‖² / (2σ_w²)}`. With `S = HᵀH` the factors are
//!   `f_i = exp{-S_ii x_i² / (2σ_w²) + ⟨h_i, y⟩ x_i / σ_w²}` and
//!   `t_k = exp{-x_i S_ij x_j / σ_w²}`.
//!
//! Every generator is a pure function of its parameters and seed.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{Alphabet, FactorGraph, PairwiseSpec};

/// Seeded generator used by every sampler in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    coupling: DMatrix<f64>,
    bias: DVector<f64>,
}

impl IsingModel {
    /// Validates that `coupling` is square, exactly symmetric and finite.
    pub fn new(coupling: DMatrix<f64>, bias: DVector<f64>) -> Result<Self> {
        let n = bias.len();
        if coupling.nrows() != n || coupling.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "coupling matrix".into(),
                expected: n,
                got: coupling.nrows().max(coupling.ncols()),
            });
        }
        for v in coupling.iter().chain(bias.iter()) {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { what: "ising model".into(), value: *v });
            }
        }
        if coupling != coupling.transpose() {
            return Err(Error::InvalidConfig("coupling matrix must be symmetric".into()));
        }
        Ok(Self { coupling, bias })
    }

    pub fn n(&self) -> usize {
        self.bias.len()
    }

    pub fn coupling(&self) -> &DMatrix<f64> {
        &self.coupling
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    /// Number of nonzero couplings above the diagonal.
    pub fn edge_count(&self) -> usize {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.coupling[(i, j)] != 0.0)
            .count()
    }

    /// `-xᵀJx - bᵀx` for spin values `x`.
    pub fn log_density(&self, spins: &[f64]) -> f64 {
        let x = DVector::from_column_slice(spins);
        -(x.transpose() * &self.coupling * &x)[(0, 0)] - self.bias.dot(&x)
    }
}

/// Erdős–Rényi Ising model: each pair `i < j` is coupled with probability
/// `edge_prob`, `J_ij = J_ji ~ N(0, 1)`, `b_i ~ N(0, 1/16)`, `J_ii = 0`.
pub fn sample_ising(n: usize, edge_prob: f64, seed: u64) -> Result<IsingModel> {
    if n == 0 {
        return Err(Error::InvalidConfig("ising model needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidConfig(format!(
            "edge probability must lie in [0, 1], got {edge_prob}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut coupling = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < edge_prob {
                let w: f64 = rng.sample(StandardNormal);
                coupling[(i, j)] = w;
                coupling[(j, i)] = w;
            }
        }
    }
    let bias = DVector::from_iterator(n, (0..n).map(|_| 0.25 * rng.sample::<f64, _>(StandardNormal)));
    Ok(IsingModel { coupling, bias })
}

/// One pairwise factor per nonzero coupling, one singleton per spin.
pub fn ising_to_graph(model: &IsingModel) -> FactorGraph {
    let alphabet = Alphabet::binary();
    let spins = alphabet.values();
    let n = model.n();
    let singletons = (0..n)
        .map(|i| {
            spins
                .iter()
                .map(|&x| -model.coupling[(i, i)] - model.bias[i] * x)
                .collect()
        })
        .collect();
    let mut pairwise = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = model.coupling[(i, j)];
            if w != 0.0 {
                let table = spins
                    .iter()
                    .map(|&xi| spins.iter().map(|&xj| -2.0 * w * xi * xj).collect())
                    .collect();
                pairwise.push(PairwiseSpec::new(i, j, table));
            }
        }
    }
    FactorGraph::from_log_potentials(alphabet, singletons, pairwise)
        .expect("validated ising model yields finite potentials")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimoInstance {
    channel: DMatrix<f64>,
    symbols: Vec<usize>,
    transmitted: DVector<f64>,
    observation: DVector<f64>,
    sigma_w: f64,
}

impl MimoInstance {
    /// Builds an instance from explicit parts; `symbols` are indices into the
    /// binary alphabet.
    pub fn new(channel: DMatrix<f64>, symbols: Vec<usize>, observation: DVector<f64>, sigma_w: f64) -> Result<Self> {
        check_sigma(sigma_w)?;
        if symbols.len() != channel.ncols() {
            return Err(Error::DimensionMismatch {
                what: "transmitted symbols".into(),
                expected: channel.ncols(),
                got: symbols.len(),
            });
        }
        if observation.len() != channel.nrows() {
            return Err(Error::DimensionMismatch {
                what: "observation".into(),
                expected: channel.nrows(),
                got: observation.len(),
            });
        }
        let alphabet = Alphabet::binary();
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet.len()) {
            return Err(Error::IndexOutOfRange { var: 0, index: bad });
        }
        let transmitted = DVector::from_iterator(symbols.len(), symbols.iter().map(|&s| alphabet.value(s)));
        Ok(Self {
            channel,
            symbols,
            transmitted,
            observation,
            sigma_w,
        })
    }

    pub fn n(&self) -> usize {
        self.channel.ncols()
    }

    pub fn m(&self) -> usize {
        self.channel.nrows()
    }

    pub fn channel(&self) -> &DMatrix<f64> {
        &self.channel
    }

    /// Transmitted symbols as binary-alphabet indices.
    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    /// Transmitted symbols as values in `{-1, +1}`.
    pub fn transmitted(&self) -> &DVector<f64> {
        &self.transmitted
    }

    pub fn observation(&self) -> &DVector<f64> {
        &self.observation
    }

    pub fn sigma_w(&self) -> f64 {
        self.sigma_w
    }

    /// `-‖Hx - y‖² / (2σ_w²)` for symbol values `x`.
    pub fn log_posterior(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        let r = &self.channel * x - &self.observation;
        -r.norm_squared() / (2.0 * self.sigma_w * self.sigma_w)
    }
}

fn check_sigma(sigma_w: f64) -> Result<()> {
    if sigma_w.is_finite() && sigma_w > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("sigma_w must be positive, got {sigma_w}")))
    }
}

/// `SNR_dB = 10 log10(N / σ_w²)` for unit-energy symbols and unit-variance
/// channel taps.
pub fn snr_db(n: usize, sigma_w: f64) -> f64 {
    10.0 * (n as f64 / (sigma_w * sigma_w)).log10()
}

/// Inverse of [`snr_db`].
pub fn sigma_from_snr_db(n: usize, snr_db: f64) -> f64 {
    (n as f64 / 10f64.powf(snr_db / 10.0)).sqrt()
}

/// Gaussian `m × n` channel, uniform BPSK symbols and AWGN of standard
/// deviation `sigma_w`.
pub fn sample_mimo(n: usize, m: usize, sigma_w: f64, seed: u64) -> Result<MimoInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidConfig("mimo instance needs n, m >= 1".into()));
    }
    check_sigma(sigma_w)?;
    let mut rng = seeded_rng(seed);
    let channel = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let symbols: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let alphabet = Alphabet::binary();
    let x = DVector::from_iterator(n, symbols.iter().map(|&s| alphabet.value(s)));
    let noise = DVector::from_fn(m, |_, _| sigma_w * rng.sample::<f64, _>(StandardNormal));
    let observation = &channel * &x + noise;
    Ok(MimoInstance {
        channel,
        symbols,
        transmitted: x,
        observation,
        sigma_w,
    })
}

/// Posterior factor graph of a MIMO instance. Pairs with `S_ij = 0` get no
/// factor, so a generic Gaussian channel yields a complete graph.
pub fn mimo_to_graph(instance: &MimoInstance) -> FactorGraph {
    let alphabet = Alphabet::binary();
    let values = alphabet.values().to_vec();
    let h = &instance.channel;
    let gram = h.transpose() * h;
    let matched = h.transpose() * &instance.observation;
    let var = instance.sigma_w * instance.sigma_w;
    let n = instance.n();

    let singletons = (0..n)
        .map(|i| {
            values
                .iter()
                .map(|&x| -gram[(i, i)] * x * x / (2.0 * var) + matched[i] * x / var)
                .collect()
        })
        .collect();
    let mut pairwise = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let s = gram[(i, j)];
            if s != 0.0 {
                let table = values
                    .iter()
                    .map(|&xi| values.iter().map(|&xj| -xi * s * xj / var).collect())
                    .collect();
                pairwise.push(PairwiseSpec::new(i, j, table));
            }
        }
    }
    FactorGraph::from_log_potentials(alphabet, singletons, pairwise)
        .expect("finite channel and sigma yield finite potentials")
}
