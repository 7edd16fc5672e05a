pub mod error;
pub mod lattice;
pub mod bernoulli;
pub mod qseries;
pub mod generalized;
pub mod cli;
