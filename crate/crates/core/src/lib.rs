//! Exact Hall-Littlewood `P` and `Q` polynomials of type `A`, computed from
//! alcove walks and from fillings, together with the combinatorial machinery
//! that relates the two.

pub mod bijection;
pub mod chains;
pub mod combinatorics;
pub mod error;
pub mod fillings;
pub mod formulas;
pub mod report;
pub mod tpoly;
pub mod walks;

pub use bijection::{BijectionContext, Direction, MarkedSplitting, Sampling, Side};
pub use chains::{LambdaChain, Layout, Transposition};
pub use combinatorics::{Partition, Permutation};
pub use error::{HlError, Result};
pub use fillings::{Filling, FillingClass};
pub use formulas::{FormulaResult, Method};
pub use report::Report;
pub use tpoly::{ExponentVector, SymPoly, TPoly};
pub use walks::{AdmissiblePair, Budget, Orientation};
