//! Test-only oracles, written without the library's factorizations.
#![allow(dead_code, clippy::needless_range_loop)]

use oil_core::numlin::{Matrix, C64};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Gauss-Jordan with partial pivoting on `[M | B]`; `None` if a pivot
/// falls below `1e-12` times the largest entry of `M`.
pub fn gauss_solve(m: &Matrix, b: &Matrix) -> Option<Matrix> {
    let n = m.rows();
    assert!(m.is_square() && b.rows() == n);
    let k = b.cols();
    let mut aug: Vec<Vec<C64>> =
        (0..n).map(|i| (0..n).map(|j| m[(i, j)]).chain((0..k).map(|j| b[(i, j)])).collect()).collect();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| aug[x][col].norm().total_cmp(&aug[y][col].norm()))?;
        if aug[piv][col].norm() <= 1e-12 * scale {
            return None;
        }
        aug.swap(col, piv);
        let p = aug[col][col];
        for x in aug[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                if f != c(0.0, 0.0) {
                    for j in 0..n + k {
                        let v = aug[col][j];
                        aug[r][j] -= f * v;
                    }
                }
            }
        }
    }
    Some(Matrix::from_fn(n, k, |i, j| aug[i][n + j]))
}

/// Largest singular value by power iteration on `A*A`.
pub fn power_norm(a: &Matrix) -> f64 {
    if a.is_empty() || a.max_abs() == 0.0 {
        return 0.0;
    }
    let ata = &a.adjoint() * a;
    let n = ata.rows();
    let mut x = Matrix::from_fn(n, 1, |i, _| c(1.0 + i as f64 * 0.37, 0.5 - i as f64 * 0.11));
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let y = &ata * &x;
        let norm = y.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / x.frobenius_norm();
        x = y.scale_real(1.0 / norm);
        if (next - lambda).abs() <= 1e-15 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt()
}

/// `B (B*B)⁻¹ B*` for a full-column-rank `B`.
pub fn projector_from_basis(b: &Matrix) -> Option<Matrix> {
    if b.cols() == 0 {
        return Some(Matrix::zeros(b.rows(), b.rows()));
    }
    let gram = &b.adjoint() * b;
    let x = gauss_solve(&gram, &b.adjoint())?;
    Some(b * &x)
}

pub fn entry() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(r, i)| c(r, i))
}

pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(entry(), rows * cols).prop_map(move |v| Matrix::from_vec(rows, cols, v).unwrap())
}

/// `m x n` product of `m x r` and `r x n` factors with `1 <= m, n <= max_dim`.
pub fn low_rank(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim)
        .prop_flat_map(|(m, n)| (Just(m), Just(n), 0..=m.min(n)))
        .prop_flat_map(|(m, n, r)| (matrix(m, r), matrix(r, n)))
        .prop_map(|(l, r)| &l * &r)
}

/// Estimates `sup { dist(x, N) : x ∈ M, ‖x‖ = 1 }` using only `N.dist`:
/// random unit vectors of `M`, then a shrinking-step random search from the
/// best one.
pub fn sampled_directed_gap(
    m: &oil_core::Subspace,
    n: &oil_core::Subspace,
    samples: usize,
    rng: &mut oil_core::instance_gen::GenRng,
) -> f64 {
    use oil_core::instance_gen::complex_gaussian;
    if m.dim() == 0 {
        return 0.0;
    }
    let eval = |coef: &Matrix| {
        let x = m.basis() * coef;
        let x = x.scale_real(1.0 / x.frobenius_norm());
        n.dist(x.as_slice()).unwrap()
    };
    let mut best = complex_gaussian(m.dim(), 1, rng);
    let mut best_val = eval(&best);
    for _ in 0..samples {
        let cand = complex_gaussian(m.dim(), 1, rng);
        let v = eval(&cand);
        if v > best_val {
            best = cand;
            best_val = v;
        }
    }
    let mut step = 0.5;
    while step > 1e-6 {
        let mut improved = false;
        for _ in 0..40 {
            let norm = best.frobenius_norm();
            let cand = &best + &complex_gaussian(m.dim(), 1, rng).scale_real(step * norm);
            let v = eval(&cand);
            if v > best_val {
                best = cand;
                best_val = v;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best_val
}
