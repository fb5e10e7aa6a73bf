//! Truncated Fock-space simulation of a continuous-variable quantum
//! recurrent neural network (CV-QRNN), with a training harness and
//! classical baselines.
//!
//! The crate is organized around a dense density-matrix simulator:
//!
//! - [`linalg`]: complex dense matrices, Hermitian checks, matrix exponential.
//! - [`fock`]: mode operators, multi-mode embedding, partial trace,
//!   expectation values over `DensityState`.
//! - [`gates`]: the CV gate set (displacement, squeezing, phase, beam
//!   splitter), Clements-mesh interferometers, and the trainable layer
//!   unitary.
//! - [`qrnn`]: the recurrent cell (encode, evolve, measure, reset) and the
//!   prediction / forecasting / classification heads.
//! - [`channels`]: photon-loss channel and additive data noise.
//! - [`datasets`]: synthetic series generators, windowing, IDX image data.
//! - [`training`]: cost functions, finite-difference gradients, ADAM.
//! - [`baseline`]: from-scratch LSTM and the repeat-last predictor.

pub mod baseline;
pub mod channels;
pub mod datasets;
pub mod error;
pub mod fock;
pub mod gates;
pub mod linalg;
pub mod qrnn;
pub mod training;

pub use error::{Error, Result};
