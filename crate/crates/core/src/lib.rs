//! Exact computations behind the ghost-staircase obstruction for ellipsoid
//! embeddings: weight sequences, continued fractions, ECH capacities and
//! gradings, partition conditions, area estimates, index formulas and Cremona
//! reduction, plus named verification suites.

pub mod cremona;
pub mod echindex;
pub mod error;
pub mod exactnum;
pub mod ghostverify;
pub mod lattice;
pub mod numberseq;
pub mod report;

pub use cremona::BlowupClass;
pub use echindex::CurveData;
pub use error::{Error, Result};
pub use exactnum::{PerturbedRational, QuadraticNumber, Rational};
pub use lattice::OrbitSet;
pub use report::{Status, VerificationReport};
