//! Quadrature on attractor cells: composite barycenter rules, exact
//! self-similar treatment of singular pairs, and Monte-Carlo oracles.

pub mod montecarlo;
pub mod pairs;
pub mod recursive;
pub mod rule;
pub mod selfsimilar;

pub use montecarlo::{mc_double_integral, mc_helmholtz_pair, mc_integrate_cell, mc_singular_pair, ChaosGame, McEstimate};
pub use pairs::{center_distance, classify, classify_maps, PairClass};
pub use recursive::{recursive_double_integral, RecursionOptions, RecursionResult};
pub use rule::{cell_rule, integrate_on_cell, CellRule, RuleCache};
pub use selfsimilar::{SelfSimilarTable, StaticKernel, TableOptions};
