//! Pseudo-spectral laboratory for the Isobe-Kakinuma model of water waves.
//!
//! The crate covers linear dispersion analytics, the variable-coefficient
//! operators of the model, inversion of its elliptic constraint, time
//! integration of the reduced evolution system and conservation diagnostics,
//! all on periodic domains in one or two horizontal dimensions.

pub mod bottom;
pub mod config;
pub mod diagnostics;
pub mod dispersion;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod field;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod scenario;
pub mod spectral;
pub mod state;

pub use bottom::{Bottom, BottomProfile};
pub use config::{Exponents, Model, ModelConfig, MAX_N};
pub use error::{IkError, Result};
pub use exec::ExecPolicy;
pub use field::Field;
pub use grid::{Grid, PeriodicDomain};
pub use scenario::{FieldSpec, Scenario};
pub use state::State;
