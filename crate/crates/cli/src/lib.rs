//! Experiment harness for the CV-QRNN simulator: dataset generation,
//! training runs, sweeps, and deterministic artifact emission.

pub mod commands;
pub mod manifest;
pub mod seeds;
