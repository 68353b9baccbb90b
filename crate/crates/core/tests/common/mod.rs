//! Shared generators and reference implementations for the integration tests.
#![allow(dead_code)]

use alphabp::graph::{Alphabet, FactorGraph, PairwiseSpec};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Alphabet with `arity` evenly spaced points, binary {-1, +1} for arity 2.
pub fn alphabet(arity: usize) -> Alphabet {
    if arity == 2 {
        return Alphabet::binary();
    }
    Alphabet::new((0..arity).map(|a| a as f64).collect()).unwrap()
}

fn positive_table<R: Rng>(rng: &mut R, len: usize, scale: f64) -> Vec<f64> {
    (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            (scale * z).exp()
        })
        .collect()
}

fn pairwise<R: Rng>(rng: &mut R, i: usize, j: usize, arity: usize, scale: f64) -> PairwiseSpec {
    let table = (0..arity).map(|_| positive_table(rng, arity, scale)).collect();
    PairwiseSpec::new(i, j, table)
}

/// Erdős–Rényi graph with log-normal potentials.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, edge_prob: f64, arity: usize) -> FactorGraph {
    let singletons = (0..n).map(|_| positive_table(rng, arity, 1.0)).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                edges.push(pairwise(rng, i, j, arity, 1.0));
            }
        }
    }
    FactorGraph::new(alphabet(arity), singletons, edges).unwrap()
}

/// Random labelled tree: each vertex attaches to a uniformly chosen earlier
/// vertex, then labels are permuted so edges are not all `(parent < child)`.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, arity: usize) -> FactorGraph {
    let mut labels: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    let singletons = (0..n).map(|_| positive_table(rng, arity, 1.0)).collect();
    let edges = (1..n)
        .map(|v| {
            let parent = rng.random_range(0..v);
            pairwise(rng, labels[v], labels[parent], arity, 1.5)
        })
        .collect();
    FactorGraph::new(alphabet(arity), singletons, edges).unwrap()
}

fn normalize(v: &mut [f64]) {
    let z: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= z);
}

/// Textbook linear-domain sum-product under the fixed schedule: factors in
/// id order, lower endpoint first. Returns every committed message.
pub fn reference_sum_product(graph: &FactorGraph, sweeps: usize) -> Vec<Vec<f64>> {
    let a = graph.alphabet().len();
    let n_factors = graph.pairwise().len();
    let singles: Vec<Vec<f64>> = graph
        .singletons()
        .iter()
        .map(|s| {
            let mut t = s.table();
            normalize(&mut t);
            t
        })
        .collect();
    let tables: Vec<Vec<Vec<f64>>> = graph.pairwise().iter().map(|f| f.table()).collect();
    // msgs[k][0] targets the lower endpoint, msgs[k][1] the upper
    let mut msgs = vec![[vec![1.0 / a as f64; a], vec![1.0 / a as f64; a]]; n_factors];
    let incoming = |msgs: &[[Vec<f64>; 2]], j: usize, skip: usize| -> Vec<f64> {
        let mut out = singles[j].clone();
        for &k in graph.neighbors(j) {
            if k == skip {
                continue;
            }
            let side = if graph.factor(k).endpoints().0 == j { 0 } else { 1 };
            out.iter_mut().zip(&msgs[k][side]).for_each(|(o, m)| *o *= m);
        }
        out
    };
    let mut log = Vec::new();
    for _ in 0..sweeps {
        for k in 0..n_factors {
            let (lo, hi) = graph.factor(k).endpoints();
            for (side, source) in [(0, hi), (1, lo)] {
                let cavity = incoming(&msgs, source, k);
                let mut m = vec![0.0; a];
                for (xt, slot) in m.iter_mut().enumerate() {
                    for (xs, c) in cavity.iter().enumerate() {
                        let t = if side == 0 { tables[k][xt][xs] } else { tables[k][xs][xt] };
                        *slot += t * c;
                    }
                }
                normalize(&mut m);
                log.push(m.clone());
                msgs[k][side] = m;
            }
        }
    }
    log
}

/// Largest per-entry absolute difference between two marginal sets.
pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

/// Spin value of a binary alphabet index.
pub fn spin(index: usize) -> f64 {
    if index == 0 {
        -1.0
    } else {
        1.0
    }
}
