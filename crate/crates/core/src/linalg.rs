//! Symmetric eigenproblems: dense via nalgebra, large sparse via restarted Lanczos.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Eigenvalues in descending order with matching eigenvector columns.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Accept once `‖A y - θ y‖₂` drops below this.
    pub tol: f64,
}

impl LanczosOptions {
    /// Krylov dimension bounded so that the basis stays around 512 MiB.
    pub fn for_size(n: usize) -> Self {
        let budget = (1usize << 26) / n.max(1);
        Self {
            krylov_dim: budget.clamp(40, 300).min(n),
            max_restarts: 400,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub matvecs: usize,
}

fn project_out(w: &mut [f64], basis: &[Vec<f64>]) {
    for d in basis {
        let c = dot(d, w);
        axpy(-c, d, w);
    }
}

/// Largest eigenpair of a symmetric operator restricted to the orthogonal
/// complement of the orthonormal vectors in `deflate`.
pub fn lanczos_largest(
    n: usize,
    matvec: impl Fn(&[f64], &mut [f64]),
    start: &[f64],
    deflate: &[Vec<f64>],
    opts: LanczosOptions,
) -> Result<Eigenpair> {
    let mut v0 = start.to_vec();
    project_out(&mut v0, deflate);
    project_out(&mut v0, deflate);
    let nv = norm(&v0);
    if !(nv > 0.0) {
        return Err(Error::Precondition("start vector lies in the deflated space".into()));
    }
    v0.iter_mut().for_each(|x| *x /= nv);

    let m = opts.krylov_dim.min(n - deflate.len()).max(1);
    let mut w = vec![0.0; n];
    let mut matvecs = 0;
    let mut residual = f64::INFINITY;
    for _ in 0..opts.max_restarts.max(1) {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        basis.push(v0.clone());
        for j in 0..m {
            matvec(&basis[j], &mut w);
            matvecs += 1;
            project_out(&mut w, deflate);
            let mut a = 0.0;
            for _ in 0..2 {
                for (k, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    if k == j {
                        a += c;
                    }
                    axpy(-c, v, &mut w);
                }
                project_out(&mut w, deflate);
            }
            alpha.push(a);
            let b = norm(&w);
            if j + 1 == m || b <= 1e-13 * (1.0 + a.abs()) {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let (_, s) = symmetric_eigen(t);
        let mut y = vec![0.0; n];
        for i in 0..k {
            axpy(s[(i, 0)], &basis[i], &mut y);
        }
        project_out(&mut y, deflate);
        let ny = norm(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        matvec(&y, &mut w);
        matvecs += 1;
        project_out(&mut w, deflate);
        let value = dot(&y, &w);
        axpy(-value, &y, &mut w);
        residual = norm(&w);
        if residual <= opts.tol {
            return Ok(Eigenpair {
                value,
                vector: y,
                residual,
                matvecs,
            });
        }
        v0 = y;
    }
    Err(Error::NoConvergence {
        iterations: matvecs,
        residual,
    })
}

/// Deterministic start vector with no special alignment.
pub fn scrambled_start(n: usize) -> Vec<f64> {
    let mut state: u64 = 0x2545_F491_4F6C_DD1D;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lanczos_matches_dense_on_tridiagonal() {
        let n = 200;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = -2.0 - (i as f64) * 0.01;
            if i + 1 < n {
                m[(i, i + 1)] = 1.0;
                m[(i + 1, i)] = 1.0;
            }
        }
        let (vals, vecs) = symmetric_eigen(m.clone());
        let mv = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                y[i] = (0..n).map(|j| m[(i, j)] * x[j]).sum();
            }
        };
        let opts = LanczosOptions {
            krylov_dim: 60,
            max_restarts: 200,
            tol: 1e-9,
        };
        let top = lanczos_largest(n, mv, &scrambled_start(n), &[], opts).unwrap();
        assert!((top.value - vals[0]).abs() < 1e-9);
        let d: Vec<f64> = vecs.column(0).iter().copied().collect();
        let second = lanczos_largest(n, mv, &scrambled_start(n), &[d], opts).unwrap();
        assert!((second.value - vals[1]).abs() < 1e-9);
    }
}
