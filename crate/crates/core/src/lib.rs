//! Pump-probe response of a coherently driven Y-type four-level atom whose
//! excited doublet decays through shared vacuum modes.

pub mod cli;
pub mod dressed;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod liouvillian;
pub mod oracle;
pub mod output;
pub mod params;
pub mod presets;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
