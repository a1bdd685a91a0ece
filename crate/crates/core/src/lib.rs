//! Dynamics of EOS maps `F(x) = x + b - 1/(1 + e^{-ax})` and logistic maps:
//! evaluation, orbits, periodic-orbit continuation, rotational
//! classification, bifurcation sweeps and figure output.

pub mod cli;
pub mod dd;
pub mod error;
pub mod export;
pub mod map_core;
pub mod orbit;
pub mod periodic;
pub mod render;
pub mod rotation;
pub mod scan;

pub use error::{Error, Result};
pub use map_core::{CriticalSet, Family, MapInstance, Order, Precision};
