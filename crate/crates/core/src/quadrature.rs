//! Momentum grids for integrals over `phi` in `(0, pi)`.
//!
//! Thermodynamic-limit quantities use Gauss-Legendre rules; finite chains use
//! the antiperiodic momenta `pi (2m + 1) / N` with equal weights, which makes
//! the same integration code reproduce finite-N free-fermion sums exactly.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 2048;
pub const MAX_NODES: usize = 16384;

/// Quadrature nodes in `(0, pi)` with weights summing to `pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl MomentumGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `int_0^pi f(phi) dphi`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Momenta of the even-fermion-parity sector of an `n_sites` periodic chain,
    /// `pi (2m + 1) / N` for `m < N/2`, each weighted `2 pi / N`.
    pub fn antiperiodic(n_sites: usize) -> Result<Self> {
        if n_sites < 2 || !n_sites.is_multiple_of(2) {
            return Err(Error::param(
                "n_sites",
                format!("must be even and >= 2, got {n_sites}"),
            ));
        }
        let n = n_sites as f64;
        let nodes = (0..n_sites / 2)
            .map(|m| PI * (2 * m + 1) as f64 / n)
            .collect();
        let weights = vec![2.0 * PI / n; n_sites / 2];
        Ok(Self { nodes, weights })
    }

    /// Whether this grid came from [`MomentumGrid::antiperiodic`] for some chain length.
    pub fn finite_chain_length(&self) -> Option<usize> {
        let n = self.nodes.len() * 2;
        let w = 2.0 * PI / n as f64;
        let equal = self.weights.iter().all(|&x| (x - w).abs() < 1e-15);
        let on_lattice = self
            .nodes
            .iter()
            .enumerate()
            .all(|(m, &x)| (x - PI * (2 * m + 1) as f64 / n as f64).abs() < 1e-14);
        (equal && on_lattice).then_some(n)
    }
}

/// Gauss-Legendre grid of `n` nodes mapped to `(0, pi)`. Grids are cached.
pub fn make_grid(n: usize) -> Result<Arc<MomentumGrid>> {
    if n < 2 {
        return Err(Error::param(
            "nodes",
            format!("need at least 2 nodes, got {n}"),
        ));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<MomentumGrid>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().unwrap().get(&n) {
        return Ok(g.clone());
    }
    let (x, w) = gauss_legendre(n);
    let grid = Arc::new(MomentumGrid {
        nodes: x.iter().map(|&x| 0.5 * PI * (x + 1.0)).collect(),
        weights: w.iter().map(|&w| 0.5 * PI * w).collect(),
    });
    cache.lock().unwrap().insert(n, grid.clone());
    Ok(grid)
}

/// Nodes (ascending) and weights on `[-1, 1]`, by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d.is_finite() {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // i-th largest root and its mirror
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = wi;
        w[i] = wi;
    }
    (x, w)
}

/// `(P_n(z), P_n'(z))`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * z * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
