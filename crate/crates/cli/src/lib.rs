//! Command-line front end: translation to TH0 problem files, the prover harness and
//! the bounded lemma checker.

pub mod commands;
pub mod config;
pub mod harness;
pub mod szs;
pub mod table;
