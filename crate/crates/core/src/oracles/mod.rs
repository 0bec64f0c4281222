//! Independent brute-force checks for the production engines.

pub mod enumerate;
pub mod fc_direct;
pub mod monte_carlo;

pub use enumerate::{enumerate_states, TrapState};
pub use fc_direct::{fc_direct_sum, fc_direct_sum_f64, Decimal};
pub use monte_carlo::{mc_phase_space_spectrum, McConfig, McRun};
