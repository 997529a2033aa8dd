pub mod channel;
pub mod config;
pub mod density;
pub mod error;
pub mod experiment;
pub mod kde;
pub mod metrics;
pub mod quadrature;
pub mod special;
pub mod stats;

pub use config::SystemConfig;
pub use error::{Error, Result};
