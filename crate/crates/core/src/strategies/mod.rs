//! Strategy constructors: the optimal one-lie family and the lie-free
//! reference strategies (non-adaptive, exactly-one, adaptive, multi-round).

pub mod adaptive;
mod nonadaptive;
pub mod rounds;

pub use adaptive::{
    adaptive_complexity, adaptive_no_lie_search, AdaptiveOracle, AdaptiveOutcome, TruthfulOracle,
};
pub use nonadaptive::{
    binary_mask_family_exactly_one, ceil_log2, decode_exactly_one, optimal_one_lie_family,
    singleton_family_no_lie,
};
pub use rounds::{
    multi_round_plan, two_round_plan, MultiRoundPlan, RoundRun, RoundState, TwoRoundPlan,
};
