//! Exact polyhedral machinery for multi-period markets with proportional
//! transaction costs and convex portfolio constraints.

pub mod cli;
pub mod cone;
pub mod generate;
pub mod instances;
pub mod linalg;
pub mod lp;
pub mod market;
mod positions;
pub mod pricing;
pub mod randomized;
pub mod recursion;
pub mod scalar;
pub mod vector;

pub use cone::{ConeError, ConeSection, PolyhedralCone, Representation};
pub use market::{MarketError, MarketSpec, NodeId, ScenarioTree, TreeBuilder};
pub use lp::{LinearProgram, LpOutcome, Relation, Sense};
pub use scalar::{approx_decimal, Extended, Scalar};
pub use vector::Vector;

pub type Rational = num_rational::BigRational;
pub type Cone = PolyhedralCone<Rational>;
pub type RVector = Vector<Rational>;
pub type Market = market::MarketSpec<Rational>;
