//! Quantum key distribution with vacuum-one-photon qubits.
//!
//! A qubit whose basis states are the vacuum and the one-photon state
//! carries, on average, less than one photon, so a key can cost fewer
//! photons than bits. This crate models that trade end to end:
//!
//! - [`hilbert`]: two-level states, overlaps, density matrices;
//! - [`measurement`]: projective B92 detection and the three-outcome
//!   unambiguous-discrimination measurement, plus Born-rule sampling;
//! - [`channel`]: amplitude damping and the fiber-loss parametrization;
//! - [`protocol`]: seeded Monte-Carlo BB84/B92 sessions with transcripts,
//!   an intercept-resend eavesdropper, and a loss-rate detection test;
//! - [`analysis`]: closed forms for the per-qubit and per-photon yields,
//!   their maxima over the state family, loss ceilings, and the
//!   eavesdropping-detectability condition.
//!
//! Monte-Carlo runs and parameter sweeps are data parallel. With the
//! default `parallel` feature they fan out over a rayon pool in fixed
//! deterministic batches; without it the same batches run sequentially
//! and produce bit-identical results.

#![forbid(unsafe_code)]

mod error;

pub mod analysis;
pub mod channel;
pub mod hilbert;
pub mod measurement;
pub mod protocol;
pub mod solver;
pub mod stats;
pub mod tol;

pub use error::{Error, Result};

/// Execution mode for batched work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    /// Rayon when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Auto,
    /// Always single-threaded; results match `Auto` exactly.
    Sequential,
}

/// Maps `f` over `0..n` in batch-index order.
pub(crate) fn map_indexed<T, F>(n: usize, parallelism: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match parallelism {
        Parallelism::Sequential => (0..n).map(f).collect(),
        Parallelism::Auto => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(f).collect()
            }
        }
    }
}
