pub mod directionality;
pub mod error;
pub mod langevin;
pub mod network;
pub mod noise;
pub mod ode;
pub mod cli;
pub mod devices;
pub mod fock;

pub use error::{Error, Result};
