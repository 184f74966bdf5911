//! Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! Jacobi is slow for large matrices but computes small singular values to
//! high relative accuracy, which matters more here than speed: every rank
//! decision in the crate goes through this routine.

use crate::error::{Error, Result};
use crate::numlin::matrix::{dot, vec_norm, Matrix, C64};

const MAX_SWEEPS: usize = 80;

/// Full SVD `A = U Σ V*` with square unitary factors.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    /// `m x m` unitary.
    pub left_vectors: Matrix,
    /// Length `min(m, n)`, nonincreasing.
    pub singular_values: Vec<f64>,
    /// `n x n` unitary.
    pub right_vectors: Matrix,
}

impl SvdFactors {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values strictly above `rtol * σ_max`.
    pub fn rank_with(&self, rtol: f64) -> usize {
        let cut = rtol * self.sigma_max();
        self.singular_values.iter().take_while(|&&s| s > cut && s > 0.0).count()
    }

    /// `U Σ V*`.
    pub fn reconstruct(&self) -> Matrix {
        let m = self.left_vectors.rows();
        let n = self.right_vectors.rows();
        let mut us = Matrix::zeros(m, n);
        for (j, s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                us[(i, j)] = self.left_vectors[(i, j)] * s;
            }
        }
        &us * &self.right_vectors.adjoint()
    }
}

pub fn svd(a: &Matrix) -> Result<SvdFactors> {
    a.check_finite()?;
    let (m, n) = a.shape();
    if m >= n {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.adjoint())?;
        Ok(SvdFactors {
            left_vectors: t.right_vectors,
            singular_values: t.singular_values,
            right_vectors: t.left_vectors,
        })
    }
}

/// Jacobi on the columns of `a` (requires `rows >= cols`).
fn svd_tall(a: &Matrix) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let tol = f64::EPSILON * (m.max(1) as f64);
    // Columns below this carry only roundoff; orthogonalizing against them
    // can stall, and their directions are discarded below anyway.
    let noise = (f64::EPSILON * a.frobenius_norm()).powi(2);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = vec_norm(&w[p]).powi(2);
                let beta = vec_norm(&w[q]).powi(2);
                let gamma = dot(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() || alpha.min(beta) <= noise {
                    continue;
                }
                rotated = true;
                // Rotate (w_p, w_q e^{-iφ}) by a real Givens pair.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = phase.conj();
                for cols in [&mut w, &mut v] {
                    let (lo, hi) = cols.split_at_mut(q);
                    let (xp, xq) = (&mut lo[p], &mut hi[0]);
                    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
                        let bq = *b * ph;
                        let ap = *a;
                        *a = ap * c - bq * s;
                        *b = ap * s + bq * c;
                    }
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::SvdNoConvergence { rows: m, cols: n, sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, c)| (vec_norm(c), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let singular_values: Vec<f64> = order.iter().map(|(s, _)| *s).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);

    let right_vectors = Matrix::from_columns(n, &order.iter().map(|(_, j)| v[*j].clone()).collect::<Vec<_>>());

    // Columns with σ below roundoff carry no direction; complete those instead.
    let floor = (sigma_max * f64::EPSILON).max(noise.sqrt());
    let mut left: Vec<Vec<C64>> = Vec::with_capacity(m);
    for (s, j) in &order {
        if *s > floor && *s > f64::MIN_POSITIVE {
            left.push(w[*j].iter().map(|z| z / *s).collect());
        } else {
            break;
        }
    }
    complete_orthonormal(&mut left, m);
    let left_vectors = Matrix::from_columns(m, &left);

    Ok(SvdFactors { left_vectors, singular_values, right_vectors })
}

/// Extends orthonormal `basis` to `dim` vectors with standard basis vectors
/// orthogonalized against the current set (two Gram-Schmidt passes),
/// always taking the candidate with the largest residual.
fn complete_orthonormal(basis: &mut Vec<Vec<C64>>, dim: usize) {
    while basis.len() < dim {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for i in 0..dim {
            let mut e = vec![C64::new(0.0, 0.0); dim];
            e[i] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for b in basis.iter() {
                    let c = dot(b, &e);
                    for (x, y) in e.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
            }
            let r = vec_norm(&e);
            if best.as_ref().is_none_or(|(br, _)| r > *br) {
                best = Some((r, e));
            }
        }
        let (r, e) = best.expect("dim > 0");
        basis.push(e.into_iter().map(|z| z / r).collect());
    }
}
