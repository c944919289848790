pub mod coeffring;
pub mod laxmat;
pub mod linalg;
pub mod localmodel;
pub mod microp;
pub mod normalize;
pub mod properties;
pub mod random;
pub mod scenario;
pub mod error;
pub mod flows;

pub use coeffring::{Cap, Precision, Rational, TruncSeries};
pub use laxmat::{DegreeVector, LaxMatrix, ModMatrix, SeriesMatrix};
pub use microp::{MicroOp, OpOrder};
pub use error::{Error, Result};
