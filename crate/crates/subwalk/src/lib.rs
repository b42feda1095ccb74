//! Subordinate random walks on the integer lattice.
pub mod bernstein;
pub mod cli;
pub mod error;
pub mod estimates;
pub mod io;
pub mod lattice;
pub mod montecarlo;
pub mod report;
pub mod subordination;
