//! Exact quench dynamics of a ring Bose-Einstein condensate at Bogoliubov order.
//!
//! The coupling is ramped linearly from zero to its final value; every ring
//! mode is then known in closed form (plane waves, Airy functions, Bogoliubov
//! phonons). From the modes the crate builds the vacuum correlators, the
//! quantum depletion, the energy split between depleted cloud and condensate
//! correction, and residual checks of the number, energy and momentum laws.
//!
//! Units: `ħ = m = 1`, lengths in healing lengths, times in `1/Δμ`.

pub mod airy;
pub mod cli;
pub mod conservation;
pub mod error;
pub mod model;
pub mod modes;
pub mod numeric;
pub mod observables;
pub mod oracle;
pub mod spinor;

pub use airy::{airy_all, AiryValues};
pub use error::{Error, Result};
pub use model::{
    chemical_potential, coupling_fraction, coupling_rate, dispersion, Dispersion, MuConvention,
    PhysicalParams, Regime,
};
pub use spinor::{symplectic_bracket, NambuSpinor};
