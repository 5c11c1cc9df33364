//! Dense symmetric eigenvalues: Householder reduction to tridiagonal form,
//! then the implicit QL iteration with Wilkinson-style shifts.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Square row-major matrix of order `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> DenseMatrix {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<DenseMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix rows must all have length n"));
        }
        Ok(DenseMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    pub fn add(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] += x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// All eigenvalues in ascending order. Only the lower triangle is read.
    pub fn symmetric_eigenvalues(&self) -> Result<Vec<f64>> {
        let (mut d, mut e) = tridiagonalize(self);
        tql(&mut d, &mut e)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }
}

/// Reduces a symmetric matrix to tridiagonal form. Returns the diagonal and
/// the subdiagonal (`e[i]` couples `i` and `i + 1`; the last entry is zero).
fn tridiagonalize(m: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.data.clone();
    // Symmetrize from the lower triangle so callers may fill only that half.
    for i in 0..n {
        for j in 0..i {
            a[j * n + i] = a[i * n + j];
        }
    }
    let mut off = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let len = n - start;
        let x = &a[k * n + start..(k + 1) * n];
        let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        v[..len].copy_from_slice(x);
        v[0] -= alpha;
        let vv: f64 = v[..len].iter().map(|t| t * t).sum();
        off[k] = alpha;
        let beta = 2.0 / vv;
        for i in 0..len {
            let row = &a[(start + i) * n + start..(start + i + 1) * n];
            p[i] = beta * row.iter().zip(&v[..len]).map(|(r, s)| r * s).sum::<f64>();
        }
        let kk = p[..len]
            .iter()
            .zip(&v[..len])
            .map(|(r, s)| r * s)
            .sum::<f64>()
            / vv;
        for i in 0..len {
            p[i] -= kk * v[i];
        }
        for i in 0..len {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(start + i) * n + start..(start + i + 1) * n];
            for j in 0..len {
                row[j] -= vi * p[j] + wi * v[j];
            }
        }
    }
    if n >= 2 {
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    let d = (0..n).map(|i| a[i * n + i]).collect();
    (d, off)
}

/// Implicit QL on a symmetric tridiagonal matrix; eigenvalues land in `d`.
fn tql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iterations == MAX_SWEEPS {
                return Err(Error::EigenNoConvergence {
                    index: l,
                    iterations,
                });
            }
            iterations += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let x = rng.random_range(-1.0..1.0);
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        m
    }

    #[test]
    fn matches_nalgebra_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 3, 5, 17, 60] {
            let m = random_symmetric(n, &mut rng);
            let ours = m.symmetric_eigenvalues().unwrap();
            let oracle = nalgebra::DMatrix::from_row_slice(n, n, &m.data);
            let mut theirs: Vec<f64> = oracle.symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn diagonal_and_empty() {
        let m = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(m.symmetric_eigenvalues().unwrap(), vec![-1.0, 3.0]);
        assert!(DenseMatrix::zeros(0)
            .symmetric_eigenvalues()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn trace_is_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_symmetric(40, &mut rng);
        let trace: f64 = (0..40).map(|i| m.get(i, i)).sum();
        let sum: f64 = m.symmetric_eigenvalues().unwrap().iter().sum();
        assert!((trace - sum).abs() < 1e-10);
    }
}
