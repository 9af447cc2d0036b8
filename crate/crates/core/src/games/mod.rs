//! Games between the selector and an adversary choosing the prior on the
//! number of items.

pub mod best_response;
pub mod geometric;
pub mod posterior;
pub mod saddle;

pub use best_response::{best_response, AcceptancePolicy, Interval};
pub use geometric::{geometric_optimal_x, improve_on_inv_e, optimal_x, GeometricOptimum};
pub use posterior::{posterior, Posterior};
pub use saddle::{
    game_example1, game_example1_saddle, game_example2, game_example2_saddle, monotonicity_check,
    monotonicity_counterexample, CounterexampleReport, Example, SaddleReport,
};
