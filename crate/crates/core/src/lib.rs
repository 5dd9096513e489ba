//! Sofic-Dyck shifts presented by Dyck automata: admissible-path semantics,
//! left and right reduction, constructions to and from visibly pushdown
//! devices, and exact zeta functions.
//!
//! ```
//! use sofic_dyck::{fixtures, zeta, ZetaOptions};
//!
//! let a = fixtures::ex1();
//! let z = zeta::zeta(&a, 3, &ZetaOptions::default()).unwrap();
//! assert_eq!(z.zeta.to_string(), "1 + 5 z + 19 z^2 + 71 z^3");
//! ```

pub mod automaton;
pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod oracle;
pub mod paths;
pub mod reduction;
pub mod series;
pub mod words;
pub mod zeta;

pub use automaton::{Diagnostic, DiagnosticKind, DyckAutomaton, Edge, StateId, StateRelation};
pub use error::{Error, Result};
pub use series::{Scalar, SeriesMatrix, TruncatedSeries};
pub use words::{Letter, LetterClass, PushdownAlphabet, Word};
pub use zeta::{ZetaOptions, ZetaResult};

/// Exact rational coefficients.
pub type Rational = num_rational::BigRational;
/// Exact truncated series, the default for every computation in this crate.
pub type Series = TruncatedSeries<Rational>;
pub type Matrix = SeriesMatrix<Rational>;
pub type SeriesF64 = TruncatedSeries<f64>;
pub type MatrixF64 = SeriesMatrix<f64>;
pub type SeriesF32 = TruncatedSeries<f32>;
