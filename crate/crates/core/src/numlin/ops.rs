use crate::error::{Error, Result};
use crate::numlin::matrix::{Matrix, C64};
use crate::numlin::svd::svd;
use crate::numlin::tolerance::ToleranceProfile;

/// Moore-Penrose inverse `V Σ⁺ U*`, dropping singular values at or below
/// `rank_rtol * σ_max`.
pub fn pinv(a: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    let (m, n) = a.shape();
    let f = svd(a)?;
    let r = f.rank_with(tol.rank_rtol_for(m, n));
    let mut v_scaled = Matrix::zeros(n, r);
    for j in 0..r {
        let inv = 1.0 / f.singular_values[j];
        for i in 0..n {
            v_scaled[(i, j)] = f.right_vectors[(i, j)] * inv;
        }
    }
    let u_r = f.left_vectors.select_columns(0..r);
    Ok(&v_scaled * &u_r.adjoint())
}

/// Spectral norm (largest singular value); zero for empty matrices.
pub fn op_norm(a: &Matrix) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(svd(a)?.sigma_max())
}

pub fn rank(a: &Matrix, tol: &ToleranceProfile) -> Result<usize> {
    let (m, n) = a.shape();
    Ok(svd(a)?.rank_with(tol.rank_rtol_for(m, n)))
}

/// 2-norm condition number `σ_max / σ_min` of a square matrix.
pub fn condition_number(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("condition number of non-square {}x{}", a.rows(), a.cols())));
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    let f = svd(a)?;
    let smin = *f.singular_values.last().unwrap();
    Ok(if smin == 0.0 { f64::INFINITY } else { f.sigma_max() / smin })
}

/// Solves `M X = rhs` by LU with partial pivoting after refusing matrices
/// whose condition number exceeds `tol.cond_cap`.
pub fn solve_square(mat: &Matrix, rhs: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    let n = mat.rows();
    if !mat.is_square() || rhs.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve with {}x{} matrix and {}x{} right-hand side",
            mat.rows(),
            mat.cols(),
            rhs.rows(),
            rhs.cols()
        )));
    }
    let cond = condition_number(mat)?;
    if cond.is_nan() || cond > tol.cond_cap {
        return Err(Error::IllConditioned { cond, cap: tol.cond_cap });
    }

    let mut lu = mat.clone();
    let mut x = rhs.clone();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm())).unwrap();
        if p != k {
            swap_rows(&mut lu, p, k);
            swap_rows(&mut x, p, k);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / pivot;
            if l == C64::new(0.0, 0.0) {
                continue;
            }
            lu[(i, k)] = l;
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= l * u;
            }
            for j in 0..x.cols() {
                let u = x[(k, j)];
                x[(i, j)] -= l * u;
            }
        }
    }
    for k in (0..n).rev() {
        let pivot = lu[(k, k)];
        for j in 0..x.cols() {
            let mut s = x[(k, j)];
            for i in k + 1..n {
                s -= lu[(k, i)] * x[(i, j)];
            }
            x[(k, j)] = s / pivot;
        }
    }
    Ok(x)
}

/// `M⁻¹` through [`solve_square`].
pub fn inverse(mat: &Matrix, tol: &ToleranceProfile) -> Result<Matrix> {
    solve_square(mat, &Matrix::identity(mat.rows()), tol)
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    for j in 0..m.cols() {
        let t = m[(a, j)];
        m[(a, j)] = m[(b, j)];
        m[(b, j)] = t;
    }
}

/// `‖X − Y‖ / max(‖Y‖, tiny)`, spectral norm.
pub fn relative_error(x: &Matrix, reference: &Matrix) -> Result<f64> {
    let diff = op_norm(&x.try_sub(reference)?)?;
    let scale = op_norm(reference)?;
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::matrix::C64;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    fn assert_close(a: &Matrix, b: &Matrix, eps: f64) {
        let d = (a - b).max_abs();
        assert!(d <= eps, "max abs difference {d:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn pinv_of_singular_diagonal() {
        let p = pinv(&Matrix::from_real_diag(&[2.0, 0.0]), &tol()).unwrap();
        assert_close(&p, &Matrix::from_real_diag(&[0.5, 0.0]), 1e-15);
    }

    #[test]
    fn pinv_of_identity() {
        assert_close(&pinv(&Matrix::identity(3), &tol()).unwrap(), &Matrix::identity(3), 1e-15);
    }

    #[test]
    fn pinv_of_rank_one_row() {
        // B = [[.5,0],[.5,0]]: AB = diag(1,0) and BA = [[.5,.5],[.5,.5]] are
        // Hermitian, ABA = A, BAB = B.
        let a = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let b = Matrix::from_real_rows(&[&[0.5, 0.0], &[0.5, 0.0]]);
        assert_close(&(&(&a * &b) * &a), &a, 0.0);
        assert_close(&(&(&b * &a) * &b), &b, 0.0);
        assert_close(&pinv(&a, &tol()).unwrap(), &b, 1e-15);
    }

    #[test]
    fn norms() {
        assert_eq!(op_norm(&Matrix::zeros(2, 2)).unwrap(), 0.0);
        assert!((op_norm(&Matrix::identity(5)).unwrap() - 1.0).abs() < 1e-15);
        // A*A = diag(25, 0).
        let a = Matrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 0.0]]);
        assert!((op_norm(&a).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&Matrix::identity(4), &tol()).unwrap(), 4);
        assert_eq!(rank(&Matrix::zeros(3, 3), &tol()).unwrap(), 0);
        assert_eq!(rank(&Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]), &tol()).unwrap(), 1);
    }

    #[test]
    fn solves() {
        let b = Matrix::from_real_rows(&[&[1.0], &[-2.0]]);
        assert_close(&solve_square(&Matrix::identity(2), &b, &tol()).unwrap(), &b, 0.0);
        let x = solve_square(&Matrix::from_real_diag(&[2.0, 4.0]), &Matrix::identity(2), &tol()).unwrap();
        assert_close(&x, &Matrix::from_real_diag(&[0.5, 0.25]), 0.0);
        let m = Matrix::from_fn(4, 4, |i, j| {
            C64::new(if i == j { 3.0 } else { 0.3 * (i + 2 * j) as f64 - 1.0 }, 0.1 * j as f64)
        });
        let x = solve_square(&m, &m, &tol()).unwrap();
        assert_close(&x, &Matrix::identity(4), 1e-13);
    }

    #[test]
    fn solve_refuses_singular() {
        let m = Matrix::from_real_diag(&[1.0, 0.0]);
        match solve_square(&m, &Matrix::identity(2), &tol()) {
            Err(Error::IllConditioned { cond, .. }) => assert!(cond.is_infinite()),
            other => panic!("expected ill-conditioning error, got {other:?}"),
        }
        let m = Matrix::from_real_diag(&[1.0, 1e-13]);
        assert!(matches!(solve_square(&m, &Matrix::identity(2), &tol()), Err(Error::IllConditioned { .. })));
    }
}
