//! Reference-triangle machinery: bases, quadrature and operator matrices.

pub mod basis;
pub mod jacobi;
pub mod operators;
pub mod quadrature;

pub use basis::{Basis, BasisKind};
pub use operators::ReferenceOperators;
pub use quadrature::{build_face_quadrature, build_volume_quadrature, QuadratureRule};
