//! Simulation study, file formats and command-line plumbing around
//! [`rodgp_core`].

pub mod cli;
pub mod config;
pub mod formats;
pub mod harness;
