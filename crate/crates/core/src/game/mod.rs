//! Utilities, the feasible design domain and the Nash bargaining design
//! under the three scenarios: both coefficients free, participation
//! fixed, or incentives fixed.

mod curve;
mod evaluator;
mod scenario;
mod utility;

pub use curve::*;
pub use evaluator::*;
pub use scenario::*;
pub use utility::*;
