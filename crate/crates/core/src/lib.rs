pub mod error;
pub mod lpengine;
pub mod norms;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod verify;
pub mod witnesses;

pub use error::{Error, Result};
pub use params::{ext, in_ap_range, rat, DerivedIndices, Extended, Family, SpaceSpec};
pub use oracle::{decide, Outcome, RuleCitation, RuleId, Verdict, Violation};
pub use scalar::{Real, Scalar};
pub use verify::{run_suite, ExperimentReport, RunConfig};

/// Exact rational parameters, the default for decisions.
pub type Rational = num_rational::BigRational;
/// A space descriptor with exact rational parameters.
pub type Spec = SpaceSpec<Rational>;

pub type Grid64 = lpengine::Grid<f64>;
pub type Field64 = lpengine::Field<f64>;
pub type Dyadic64 = lpengine::DyadicSystem<f64>;
