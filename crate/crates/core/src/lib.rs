//! Exact symbolic computation for Z2^n-graded supergeometry: graded
//! functions, graded matrices with their determinant and Berezinian,
//! coordinate changes, differential forms and Berezin integration.

pub mod berez;
pub mod error;
pub mod forms;
pub mod gfun;
pub mod gmat;
pub mod io;
pub mod grading;
pub mod morph;
pub mod parse;
pub mod random;
pub mod scalars;

pub use berez::{BerSection, BerVolume, Coefficient, DeltaComplex, LaurentFunction};
pub use error::{Error, Result};
pub use forms::{Convention, Form, FormAlgebra};
pub use gfun::{DomainSpec, GradedFunction};
pub use gmat::GradedMatrix;
pub use grading::{koszul_sign, standard_order, Degree, GradedDimension, Sign};
pub use morph::{BaseImage, CoordMorphism};
pub use scalars::{definite_integral, IntegralRegistry, Interval, Rational, ScalarExpr};
