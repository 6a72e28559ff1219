//! Differential Grassmannian beamforming feedback for MIMO-OFDM.
//!
//! The receiver quantizes the dominant right singular vector of each
//! subcarrier cluster against a Grassmannian codebook, then feeds back the
//! first cluster's index raw and every following cluster as a *transition
//! symbol*: the rank of the next codeword in the current codeword's
//! descending-correlation ordering. Transition symbols are Huffman coded with
//! probabilities that encoder and decoder estimate in lock-step, so the
//! compression is lossless and needs no side channel.
//!
//! This crate is `no_std` + `alloc`. File formats, the experiment runner and
//! the CLI live in the `grassfeed` companion crate.
//!
//! Modules, bottom-up:
//!
//! * [`numerics`]: complex matrices, Hermitian Jacobi eigensolver, dominant
//!   singular vectors, Kronecker products, PSD square roots.
//! * [`channel`]: Kronecker-correlated Rayleigh channel tensors.
//! * [`codebook`]: Grassmannian codebooks and transition tables.
//! * [`beamform`]: max-min-SNR cluster codeword selection.
//! * [`feedback`]: differential symbols, canonical Huffman codes, the
//!   synchronized encoder/decoder sessions.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod beamform;
pub mod channel;
pub mod codebook;
mod error;
pub mod feedback;
pub mod numerics;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;
