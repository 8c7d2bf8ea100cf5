pub mod capacity;
pub mod channels;
pub mod cli;
pub mod densemath;
pub mod error;
pub mod random;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
