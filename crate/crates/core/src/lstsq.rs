//! Minimum-norm least squares with a rank-revealing SVD.
//!
//! The tall design matrix is first reduced by QR and only the square factor
//! is decomposed: the bidiagonal SVD applied directly to the tall matrices
//! of the curvature fits can stop with reconstruction errors near 1e-5. One
//! step of iterative refinement follows the solve.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub x: DVector<f64>,
    /// All `ncols` singular values, in decreasing order.
    pub singular_values: Vec<f64>,
    /// Right singular vectors as rows, matching `singular_values`.
    pub v_t: DMatrix<f64>,
    /// Singular values at or below this count as zero.
    pub threshold: f64,
    pub rank: usize,
}

impl LeastSquares {
    /// Right singular vectors of the zero singular values.
    pub fn nullspace(&self) -> Vec<Vec<f64>> {
        self.singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s <= self.threshold)
            .map(|(i, _)| self.v_t.row(i).iter().cloned().collect())
            .collect()
    }
}

/// Solves `min |a x - b|` with the smallest `|x|`, treating singular values
/// at or below `rank_tol * sigma_max` as zero.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>, rank_tol: f64) -> Result<LeastSquares> {
    let (rows, cols) = a.shape();
    if b.len() != rows {
        return Err(GeomError::Usage(format!(
            "least squares: {rows} rows but {} right-hand sides",
            b.len()
        )));
    }
    crate::error::ensure_finite_slice(a.as_slice(), "least-squares matrix")?;
    crate::error::ensure_finite_slice(b.as_slice(), "least-squares right-hand side")?;
    // zero rows do not change the problem and make the QR factor square
    let (a_tall, b_tall) = if rows < cols {
        let mut a2 = DMatrix::zeros(cols, cols);
        a2.rows_mut(0, rows).copy_from(a);
        let mut b2 = DVector::zeros(cols);
        b2.rows_mut(0, rows).copy_from(b);
        (a2, b2)
    } else {
        (a.clone(), b.clone())
    };
    let qr = a_tall.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let svd = r.svd(true, true);
    let smax = svd.singular_values.max();
    let threshold = rank_tol * smax;
    let solve_r = |rhs: &DVector<f64>| -> Result<DVector<f64>> {
        if smax == 0.0 {
            return Ok(DVector::zeros(cols));
        }
        svd.solve(&(q.transpose() * rhs), threshold)
            .map_err(|e| GeomError::Numeric { op: e.to_string() })
    };
    let mut x = solve_r(&b_tall)?;
    let correction = solve_r(&(&b_tall - &a_tall * &x))?;
    x += correction;
    crate::error::ensure_finite_slice(x.as_slice(), "least-squares solution")?;

    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let v_t_raw = svd.v_t.as_ref().expect("requested V^T");
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v_t = DMatrix::from_fn(cols, cols, |i, j| v_t_raw[(order[i], j)]);
    let rank = if smax == 0.0 {
        0
    } else {
        singular_values.iter().filter(|s| **s > threshold).count()
    };
    Ok(LeastSquares {
        x,
        singular_values,
        v_t,
        threshold: if smax == 0.0 { 0.0 } else { threshold },
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_solution_of_full_rank_system() {
        let a = DMatrix::from_fn(40, 4, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + (j as f64) * 0.1);
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let b = &a * &x;
        let s = solve(&a, &b, 1e-8).unwrap();
        assert_eq!(s.rank, 4);
        assert!((s.x - x).amax() < 1e-12);
    }

    #[test]
    fn minimum_norm_on_rank_deficient_system() {
        // columns 0 and 1 equal: the minimum-norm split is even
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 0.0, 0.0]);
        let b = DVector::from_vec(vec![2.0, 4.0, 0.0]);
        let s = solve(&a, &b, 1e-8).unwrap();
        assert_eq!(s.rank, 1);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
        let null = s.nullspace();
        assert_eq!(null.len(), 1);
        assert!((null[0][0] + null[0][1]).abs() < 1e-12);
    }

    #[test]
    fn wide_and_zero_systems() {
        let a = DMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        let s = solve(&a, &DVector::from_vec(vec![5.0]), 1e-8).unwrap();
        assert!((s.x[0] - 0.6).abs() < 1e-12 && (s.x[1] - 0.8).abs() < 1e-12);
        assert_eq!(s.nullspace().len(), 1);
        let z = solve(&DMatrix::zeros(3, 2), &DVector::zeros(3), 1e-8).unwrap();
        assert_eq!(z.rank, 0);
        assert_eq!(z.nullspace().len(), 2);
    }
}
