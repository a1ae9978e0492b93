//! Points, fields, frames and the two manifold backends.

mod backend;
mod field;
mod frame;
mod ops;

pub use backend::{Backend, Chart, FiniteDiff, LieAlgebraSpec, StructureConstants};
pub use field::{
    require_spd, Field, FieldKind, FieldValue, MetricField, OneFormField, Point, ScalarField,
    TensorField, VectorField,
};
pub use frame::{orthonormalize, Frame};
pub use ops::{exterior_d, jacobian, lie_bracket, lie_derivative_endo, DForm, FormRef, ThreeForm};
