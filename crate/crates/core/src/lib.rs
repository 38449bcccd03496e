pub mod bridge;
pub mod cli;
pub mod eval;
pub mod forecast;
mod lstsq;
pub mod series;
pub mod optim;
pub mod srgm;
pub mod statfit;
pub mod synth;
