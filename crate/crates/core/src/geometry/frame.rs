use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{GeomError, Result};

/// An ordered list of tangent vectors at a point together with their Gram
/// matrix under the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: DMatrix<f64>,
    metric_gram: DMatrix<f64>,
}

impl Frame {
    /// `vectors` holds backend components column by column.
    pub fn new(vectors: DMatrix<f64>, metric: &DMatrix<f64>) -> Self {
        let metric_gram = vectors.transpose() * metric * &vectors;
        Self {
            vectors,
            metric_gram,
        }
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }

    pub fn metric_gram(&self) -> &DMatrix<f64> {
        &self.metric_gram
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    pub fn gram_deviation(&self) -> f64 {
        let n = self.len();
        (&self.metric_gram - DMatrix::identity(n, n)).amax()
    }

    /// Inverse of the component matrix (requires a square frame).
    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.vectors
            .clone()
            .try_inverse()
            .ok_or(GeomError::DegenerateFrame { sigma_min: 0.0 })
    }

    /// Re-expresses a (1,1)-tensor given in the backend basis on this frame.
    pub fn endo_in_frame(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.inverse()? * a * &self.vectors)
    }

    /// Frame components of a backend vector.
    pub fn vector_in_frame(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.inverse()? * v)
    }

    /// Values `w(E_i)` of a backend 1-form.
    pub fn one_form_in_frame(&self, w: &DVector<f64>) -> DVector<f64> {
        self.vectors.transpose() * w
    }

    /// Values `B(E_i, E_j)` of a backend bilinear form.
    pub fn bilinear_in_frame(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.vectors.transpose() * b * &self.vectors
    }

    /// Keeps `keep` leading vectors and rotates the rest by a random
    /// orthogonal matrix. Used to probe frame independence.
    pub fn rotate_tail<R: Rng>(&self, keep: usize, rng: &mut R) -> Result<Frame> {
        let n = self.len();
        let k = n - keep;
        let raw = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
        let q = orthonormal_columns(&raw)?;
        let mut t = DMatrix::identity(n, n);
        t.view_mut((keep, keep), (k, k)).copy_from(&q);
        let vectors = &self.vectors * &t;
        let metric_gram = t.transpose() * &self.metric_gram * &t;
        Ok(Frame {
            vectors,
            metric_gram,
        })
    }
}

/// Gram–Schmidt against the metric, done through the Cholesky factor of the
/// Gram matrix: with `Gram = L L^T` the new vectors are `V L^{-T}`.
pub fn orthonormalize(frame: &Frame) -> Result<Frame> {
    let n = frame.len();
    if n == 0 {
        return Err(GeomError::DegenerateFrame { sigma_min: 0.0 });
    }
    let sigma = frame.vectors.clone().svd(false, false).singular_values;
    let sigma_min = sigma.iter().fold(f64::INFINITY, |m, s| m.min(*s));
    if sigma.len() < n || sigma_min <= 1e-10 {
        return Err(GeomError::DegenerateFrame {
            sigma_min: if sigma.len() < n { 0.0 } else { sigma_min },
        });
    }
    let chol = frame
        .metric_gram
        .clone()
        .cholesky()
        .ok_or(GeomError::DegenerateFrame { sigma_min })?;
    let l = chol.l();
    let l_inv_t = l
        .transpose()
        .try_inverse()
        .ok_or(GeomError::DegenerateFrame { sigma_min })?;
    let vectors = &frame.vectors * l_inv_t;
    let l_inv = l
        .try_inverse()
        .ok_or(GeomError::DegenerateFrame { sigma_min })?;
    let metric_gram = &l_inv * &frame.metric_gram * l_inv.transpose();
    Ok(Frame {
        vectors,
        metric_gram,
    })
}

/// Euclidean Gram–Schmidt on the columns of a square matrix.
fn orthonormal_columns(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.ncols();
    let f = Frame::new(a.clone(), &DMatrix::identity(a.nrows(), a.nrows()));
    let q = orthonormalize(&f)?;
    debug_assert_eq!(q.len(), n);
    Ok(q.vectors)
}
