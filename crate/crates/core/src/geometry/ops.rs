//! Brackets, Lie derivatives and exterior derivatives of fields.
//!
//! Every routine works in the backend basis. On a chart the basis fields are
//! the coordinate fields (which commute) and derivatives of component
//! functions are central differences; on a Lie algebra the basis fields are
//! left-invariant, components are constant and all brackets come from the
//! structure constants.

use nalgebra::{DMatrix, DVector};

use super::backend::Backend;
use super::field::{FieldKind, OneFormField, Point, TensorField, VectorField};
use crate::error::{GeomError, Result};

/// Jacobian `J[k][a] = d_a X^k` of a vector field at `p`.
pub fn jacobian(backend: &Backend, x: &VectorField, p: &Point) -> Result<DMatrix<f64>> {
    let m = backend.dim();
    let cols = backend.gradient_with_step(p, backend.fd().step, |q| x.eval(q))?;
    Ok(DMatrix::from_fn(m, m, |k, a| cols[a][k]))
}

/// `[X, Y]` at `p`.
pub fn lie_bracket(
    backend: &Backend,
    x: &VectorField,
    y: &VectorField,
    p: &Point,
) -> Result<DVector<f64>> {
    backend.check_point(p)?;
    let xv = x.eval(p)?;
    let yv = y.eval(p)?;
    let dy_along_x = backend.directional(p, xv.as_slice(), |q| y.eval(q))?;
    let dx_along_y = backend.directional(p, yv.as_slice(), |q| x.eval(q))?;
    let c = backend.structure_constants();
    Ok(dy_along_x - dx_along_y + c.bracket(&xv, &yv))
}

/// `L_Z A` at `p` as a matrix in the backend basis, where
/// `(L_Z A) X = [Z, AX] - A [Z, X]`.
pub fn lie_derivative_endo(
    backend: &Backend,
    a: &TensorField,
    z: &VectorField,
    p: &Point,
) -> Result<DMatrix<f64>> {
    lie_derivative_endo_with_step(backend, a, z, p, backend.fd().step)
}

fn lie_derivative_endo_with_step(
    backend: &Backend,
    a: &TensorField,
    z: &VectorField,
    p: &Point,
    step: f64,
) -> Result<DMatrix<f64>> {
    if a.kind() != FieldKind::Endomorphism {
        return Err(GeomError::Usage(
            "Lie derivative of an endomorphism requires a (1,1)-tensor field".into(),
        ));
    }
    backend.check_point(p)?;
    let m = backend.dim();
    let zv = z.eval(p)?;
    let av = a.eval(p)?;
    let da_along_z = backend.directional_with_step(p, zv.as_slice(), step, |q| a.eval(q))?;
    let grads = backend.gradient_with_step(p, step, |q| z.eval(q))?;
    let jz = DMatrix::from_fn(m, m, |k, c| grads[c][k]);
    // With W = A e_j:  [Z, W] = D_Z W - J_Z W + ad_Z W  and  [Z, e_j] = -J_Z e_j + ad_Z e_j.
    let k = jz - backend.structure_constants().ad(&zv);
    Ok(da_along_z - &k * &av + &av * &k)
}

/// A 3-form stored by its components on basis triples.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeForm {
    dim: usize,
    data: Vec<f64>,
}

impl ThreeForm {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.dim + b) * self.dim + c] = v;
    }

    pub fn eval(&self, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let m = self.dim;
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                let uv = u[a] * v[b];
                if uv == 0.0 {
                    continue;
                }
                for c in 0..m {
                    s += uv * w[c] * self.get(a, b, c);
                }
            }
        }
        s
    }

    /// Components on the columns of `frame`.
    pub fn in_frame(&self, frame: &DMatrix<f64>) -> ThreeForm {
        let m = frame.ncols();
        let mut out = ThreeForm::zeros(m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let v = self.eval(
                        &frame.column(i).into_owned(),
                        &frame.column(j).into_owned(),
                        &frame.column(k).into_owned(),
                    );
                    out.set(i, j, k, v);
                }
            }
        }
        out
    }

    pub fn amax(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(eta ^ phi)(X,Y,Z) = eta(X)phi(Y,Z) - eta(Y)phi(X,Z) + eta(Z)phi(X,Y)`.
    pub fn wedge_one_two(eta: &DVector<f64>, phi: &DMatrix<f64>) -> ThreeForm {
        let m = eta.len();
        let mut out = ThreeForm::zeros(m);
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    out.set(
                        a,
                        b,
                        c,
                        eta[a] * phi[(b, c)] - eta[b] * phi[(a, c)] + eta[c] * phi[(a, b)],
                    );
                }
            }
        }
        out
    }

    pub fn lin_comb(&self, a: f64, other: &ThreeForm, b: f64) -> ThreeForm {
        ThreeForm {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }
}

/// A form handed to [`exterior_d`].
#[derive(Debug, Clone, Copy)]
pub enum FormRef<'a> {
    One(&'a OneFormField),
    Two(&'a TensorField),
}

/// Value of an exterior derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum DForm {
    Two(DMatrix<f64>),
    Three(ThreeForm),
}

/// `d(omega)` at `p`, without any 1/2 normalisation:
/// `d w(X,Y) = X w(Y) - Y w(X) - w([X,Y])` and
/// `d P(X,Y,Z) = X P(Y,Z) - Y P(X,Z) + Z P(X,Y) - P([X,Y],Z) + P([X,Z],Y) - P([Y,Z],X)`.
pub fn exterior_d(backend: &Backend, form: FormRef<'_>, p: &Point) -> Result<DForm> {
    backend.check_point(p)?;
    let m = backend.dim();
    let c = backend.structure_constants();
    match form {
        FormRef::One(w) => {
            if w.kind() != FieldKind::OneForm {
                return Err(GeomError::Usage(format!(
                    "exterior derivative expects a 1-form, got {:?}",
                    w.kind()
                )));
            }
            let wv = w.eval(p)?;
            let grads = backend.gradient_with_step(p, backend.fd().step, |q| w.eval(q))?;
            let out = DMatrix::from_fn(m, m, |a, b| {
                let bracket: f64 = (0..m).map(|k| wv[k] * c.get(a, b, k)).sum();
                grads[a][b] - grads[b][a] - bracket
            });
            Ok(DForm::Two(out))
        }
        FormRef::Two(phi) => {
            if phi.kind() != FieldKind::TwoForm {
                return Err(GeomError::Usage(format!(
                    "exterior derivative expects a 2-form, got {:?}",
                    phi.kind()
                )));
            }
            let pv = phi.eval(p)?;
            let grads = backend.gradient_with_step(p, backend.fd().step, |q| phi.eval(q))?;
            // P([e_a, e_b], e_c) = sum_k c[a][b][k] P[k][c]
            let pb = |a: usize, b: usize, cc: usize| -> f64 {
                (0..m).map(|k| c.get(a, b, k) * pv[(k, cc)]).sum()
            };
            let mut out = ThreeForm::zeros(m);
            for a in 0..m {
                for b in 0..m {
                    for cc in 0..m {
                        let v = grads[a][(b, cc)] - grads[b][(a, cc)] + grads[cc][(a, b)]
                            - pb(a, b, cc)
                            + pb(a, cc, b)
                            - pb(b, cc, a);
                        out.set(a, b, cc, v);
                    }
                }
            }
            Ok(DForm::Three(out))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::backend::{Chart, LieAlgebraSpec, StructureConstants};
    use crate::geometry::field::Field;

    fn flat3() -> Backend {
        Backend::Chart(Chart::cube(3, 1.0).unwrap())
    }

    fn coord_field(i: usize) -> VectorField {
        let mut v = DVector::zeros(3);
        v[i] = 1.0;
        Field::constant(FieldKind::Vector, v)
    }

    #[test]
    fn lie_bracket_reads_structure_constants() {
        // basis (xi, e1, e2) with [xi, e1] = 2 e2
        let mut c = StructureConstants::zeros(3);
        c.set_bracket(0, 1, 2, 2.0);
        let lie = Backend::Lie(LieAlgebraSpec::with_identity_metric(c).unwrap());
        let br = lie_bracket(&lie, &coord_field(0), &coord_field(1), &Point::identity()).unwrap();
        assert_eq!(br.as_slice(), &[0.0, 0.0, 2.0]);
    }

    #[test]
    fn coordinate_fields_commute() {
        let p = Point::new(vec![0.1, 0.2, -0.3]);
        let br = lie_bracket(&flat3(), &coord_field(0), &coord_field(1), &p).unwrap();
        assert!(br.amax() == 0.0);
    }

    #[test]
    fn bracket_of_polynomial_fields() {
        // X = x d_y, Y = d_x  =>  [X, Y] = -d_y
        let x = Field::from_fn(FieldKind::Vector, |p: &Point| {
            DVector::from_vec(vec![0.0, p.coord(0), 0.0])
        });
        let p = Point::new(vec![0.3, 0.1, 0.0]);
        let br = lie_bracket(&flat3(), &x, &coord_field(0), &p).unwrap();
        assert!((br[1] + 1.0).abs() < 1e-9);
        assert!(br[0].abs() < 1e-9 && br[2].abs() < 1e-9);
    }

    #[test]
    fn outside_chart_is_domain_error() {
        let p = Point::new(vec![2.0, 0.0, 0.0]);
        let err = lie_bracket(&flat3(), &coord_field(0), &coord_field(1), &p).unwrap_err();
        assert!(matches!(err, GeomError::Domain { .. }));
    }

    #[test]
    fn non_finite_field_is_numeric_error() {
        let bad = Field::from_fn(FieldKind::Vector, |_: &Point| {
            DVector::from_vec(vec![f64::NAN, 0.0, 0.0])
        });
        let err = lie_bracket(&flat3(), &bad, &coord_field(0), &Point::new(vec![0.0; 3]))
            .unwrap_err();
        assert!(matches!(err, GeomError::Numeric { .. }));
    }

    #[test]
    fn d_of_exact_differential_vanishes() {
        let dt = Field::constant(FieldKind::OneForm, DVector::from_vec(vec![1.0, 0.0, 0.0]));
        match exterior_d(&flat3(), FormRef::One(&dt), &Point::new(vec![0.2, 0.0, 0.1])).unwrap() {
            DForm::Two(m) => assert_eq!(m.amax(), 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn d_rejects_wrong_kind() {
        let v = coord_field(0);
        let err = exterior_d(&flat3(), FormRef::One(&v), &Point::new(vec![0.0; 3])).unwrap_err();
        assert!(matches!(err, GeomError::Usage(_)));
    }

    #[test]
    fn d_of_x_dy_is_dx_wedge_dy() {
        let w = Field::from_fn(FieldKind::OneForm, |p: &Point| {
            DVector::from_vec(vec![0.0, p.coord(0), 0.0])
        });
        let DForm::Two(m) = exterior_d(&flat3(), FormRef::One(&w), &Point::new(vec![0.4, 0.0, 0.0])).unwrap()
        else {
            panic!()
        };
        assert!((m[(0, 1)] - 1.0).abs() < 1e-9);
        assert!((m[(1, 0)] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn wedge_convention() {
        let eta = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let mut phi = DMatrix::zeros(3, 3);
        phi[(1, 2)] = -1.0;
        phi[(2, 1)] = 1.0;
        let w = ThreeForm::wedge_one_two(&eta, &phi);
        assert_eq!(w.get(0, 1, 2), -1.0);
        assert_eq!(w.get(1, 0, 2), 1.0);
        assert_eq!(w.get(1, 2, 0), -1.0);
    }
}
