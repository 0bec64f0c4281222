//! Absorption lineshapes of a spin-polarized Fermi gas in a harmonic trap.
//!
//! Units throughout: ħ = M = Ω_g = 1, so energies are in ħΩ_g, lengths in
//! (ħ/MΩ_g)^{1/2} and detunings in Ω_g. Four engines compute the spectrum:
//!
//! * [`exact`] sums Franck–Condon weighted sidebands over the filled trap levels (T = 0).
//! * [`thomas_fermi`] gives the semiclassical T = 0 closed form.
//! * [`finite_temperature`] reduces the semiclassical lineshape to a 1-D quadrature.
//! * [`oracles`] holds independent checks, including a Monte Carlo sampler.
//!
//! [`scenario`] and [`output`] turn configuration files into serialized spectra.

pub mod error;
pub mod exact;
pub mod finite_temperature;
pub mod model;
pub mod numerics;
pub mod oracles;
pub mod output;
pub mod scenario;
pub mod spectrum;
pub mod thomas_fermi;

pub use error::{Error, Result};
pub use model::{ExcitedLine, GasState, LightSpec, TrapSpec};
pub use scenario::{run_scenario, ScenarioConfig, SpectrumFile};
pub use spectrum::{GridSpec, Kernel, Spectrum};
