//! Spectra of normalized adjacency matrices, the diagonal-perturbation
//! bound, exact conductance and lazy edge-walk mixing times.
//!
//! A self-loop adds 1 to both `A_vv` and `D_vv`, so a regularized graph is
//! the unperturbed adjacency plus the diagonal `D E` with `E_vv = Δ/deg(v) - 1`.

mod conductance;
mod eigen;
mod mixing;

pub use conductance::{conductance_exact, CONDUCTANCE_MAX_NODES};
pub use eigen::DenseMatrix;
pub use mixing::{mixing_time_empirical, MixingOptions, MixingTime};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// `D^{-1/2} A D^{-1/2}` as a dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    matrix: DenseMatrix,
}

impl NormalizedMatrix {
    /// Normalizes a symmetric weighted adjacency whose diagonal already holds
    /// the self-loop weights. `D_vv` is the row sum.
    pub fn from_weighted_adjacency(a: &DenseMatrix) -> Result<NormalizedMatrix> {
        let n = a.order();
        let degrees: Vec<f64> = (0..n).map(|v| a.row(v).iter().sum()).collect();
        if let Some(v) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::IsolatedNode(v));
        }
        let scale: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
        let mut matrix = DenseMatrix::zeros(n);
        for u in 0..n {
            for v in 0..n {
                let x = a.get(u, v);
                if x != 0.0 {
                    matrix.set(u, v, x * scale[u] * scale[v]);
                }
            }
        }
        Ok(NormalizedMatrix { matrix })
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.matrix.get(u, v)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.matrix.max_asymmetry()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.matrix.symmetric_eigenvalues()
    }
}

/// Dense weighted adjacency of `g`: multiplicities off the diagonal, self-loop
/// counts on it.
pub fn adjacency_matrix(g: &Graph) -> DenseMatrix {
    let n = g.node_count();
    let mut a = DenseMatrix::zeros(n);
    for (u, v, m) in g.edges() {
        a.set(u, v, m as f64);
        a.set(v, u, m as f64);
    }
    for v in 0..n {
        a.set(v, v, g.self_loops(v) as f64);
    }
    a
}

pub fn normalized_adjacency(g: &Graph) -> Result<NormalizedMatrix> {
    NormalizedMatrix::from_weighted_adjacency(&adjacency_matrix(g))
}

/// Second largest eigenvalue in absolute value.
pub fn lambda2(m: &NormalizedMatrix) -> Result<f64> {
    Ok(lambda2_of(&m.eigenvalues()?))
}

fn lambda2_of(ascending: &[f64]) -> f64 {
    let mut abs: Vec<f64> = ascending.iter().map(|x| x.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    abs.get(1).copied().unwrap_or(0.0)
}

/// Second largest eigenvalue in algebraic order.
pub fn lambda2_algebraic(ascending: &[f64]) -> f64 {
    let n = ascending.len();
    if n < 2 {
        return 0.0;
    }
    ascending[n - 2]
}

/// Second largest eigenvalue of the lazy walk `(I + Ā)/2`. Its spectrum is
/// `(1 + λ)/2 ≥ 0`, so the second largest algebraic eigenvalue of `Ā` decides it.
pub fn lazy_lambda(ascending: &[f64]) -> f64 {
    let n = ascending.len();
    if n < 2 {
        return 0.0;
    }
    (1.0 + lambda2_algebraic(ascending)) / 2.0
}

/// Diagonal perturbation `E` with `0 <= E_ii <= epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalPerturbation {
    pub entries: Vec<f64>,
    pub epsilon: f64,
}

impl DiagonalPerturbation {
    pub fn new(entries: Vec<f64>, epsilon: f64) -> Result<DiagonalPerturbation> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::invalid(format!("epsilon {epsilon} outside [0, 1)")));
        }
        if let Some(x) = entries.iter().find(|&&x| !(0.0..=epsilon).contains(&x)) {
            return Err(Error::invalid(format!("entry {x} outside [0, {epsilon}]")));
        }
        Ok(DiagonalPerturbation { entries, epsilon })
    }

    /// The perturbation that turns `g` into its regularization:
    /// `E_ii = Δ/deg(i) - 1`, with epsilon the largest entry.
    pub fn regularization(g: &Graph) -> Result<DiagonalPerturbation> {
        let stats = g.degree_stats();
        if stats.min == 0 {
            return Err(Error::IsolatedNode(
                (0..g.node_count()).find(|&v| g.degree(v) == 0).unwrap_or(0),
            ));
        }
        let entries: Vec<f64> = (0..g.node_count())
            .map(|v| stats.max as f64 / g.degree(v) as f64 - 1.0)
            .collect();
        let epsilon = entries.iter().copied().fold(0.0, f64::max);
        DiagonalPerturbation::new(entries, epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylCheck {
    pub lambda2_before: f64,
    pub lambda2_after: f64,
    pub bound_ok: bool,
}

/// Compares λ₂ of `g` with λ₂ of `A + DE` against the `6ε` shift bound.
pub fn weyl_shift_check(g: &Graph, e: &DiagonalPerturbation) -> Result<WeylCheck> {
    if g.has_self_loops() {
        return Err(Error::HasSelfLoops);
    }
    if e.entries.len() != g.node_count() {
        return Err(Error::invalid(
            "perturbation length differs from node count",
        ));
    }
    let mut a = adjacency_matrix(g);
    let before = lambda2(&NormalizedMatrix::from_weighted_adjacency(&a)?)?;
    for v in 0..g.node_count() {
        a.add(v, v, g.degree(v) as f64 * e.entries[v]);
    }
    let after = lambda2(&NormalizedMatrix::from_weighted_adjacency(&a)?)?;
    Ok(WeylCheck {
        lambda2_before: before,
        lambda2_after: after,
        bound_ok: after <= before + 6.0 * e.epsilon + 1e-9,
    })
}

/// `((1/(1-λ) - 1) ln n, 2 ln n / (1-λ))`.
pub fn mixing_bounds_from_gap(lambda: f64, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    mixing_bounds_with_log(lambda, (n as f64).ln())
}

/// Same bounds with `ln n` given directly.
pub fn mixing_bounds_with_log(lambda: f64, ln_n: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda {lambda} outside [0, 1)")));
    }
    let relax = 1.0 / (1.0 - lambda);
    Ok(((relax - 1.0) * ln_n, 2.0 * ln_n * relax))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub lambda2: f64,
    pub spectral_gap: f64,
    /// Second eigenvalue of the lazy walk; the mixing bounds use it.
    pub lazy_lambda: f64,
    pub mixing_lower: f64,
    pub mixing_upper: f64,
    /// Exhaustive conductance, absent above the enumeration budget.
    pub conductance: Option<f64>,
    pub mixing_empirical: Option<usize>,
}

pub fn spectral_report(g: &Graph, mixing: Option<&MixingOptions>) -> Result<SpectralReport> {
    let eigenvalues = normalized_adjacency(g)?.eigenvalues()?;
    let l2 = lambda2_of(&eigenvalues);
    let lazy = lazy_lambda(&eigenvalues).clamp(0.0, 1.0 - f64::EPSILON);
    let (lower, upper) = mixing_bounds_from_gap(lazy, g.node_count())?;
    let conductance = if g.node_count() <= CONDUCTANCE_MAX_NODES {
        Some(conductance_exact(g)?)
    } else {
        None
    };
    let mixing_empirical = match mixing {
        Some(opts) => Some(mixing_time_empirical(g, opts)?.t),
        None => None,
    };
    Ok(SpectralReport {
        n: g.node_count(),
        lambda2: l2,
        spectral_gap: 1.0 - l2,
        lazy_lambda: lazy,
        mixing_lower: lower,
        mixing_upper: upper,
        conductance,
        mixing_empirical,
    })
}
