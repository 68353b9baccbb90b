//! The α-divergence family between two tables and its KL limits.
//!
//! cargo run --example divergences

use alphabp::oracle::{alpha_divergence, kl_divergence};

fn main() -> alphabp::Result<()> {
    let p = [0.6, 0.3, 0.1];
    let q = [0.2, 0.5, 0.3];
    println!("KL(p||q) = {:.6}", kl_divergence(&p, &q)?);
    println!("KL(q||p) = {:.6}", kl_divergence(&q, &p)?);
    for alpha in [-1.0, 1e-6, 0.25, 0.5, 0.75, 1.0 - 1e-6, 1.5, 2.0] {
        println!("D_{alpha:<9} = {:.6}", alpha_divergence(&p, &q, alpha)?);
    }
    println!("D_0.5(p||p) = {}", alpha_divergence(&p, &p, 0.5)?);
    Ok(())
}
