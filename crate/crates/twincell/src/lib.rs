//! Two-cell downlink beamforming with limited feedback: large-system SINR
//! limits, optimal feedback allocation, and a finite-size Monte Carlo
//! validator.
//!
//! The crate models a symmetric pair of cells whose base stations each carry
//! `N` antennas and serve `K = beta·N` single-antenna users. Every user sees
//! its own base station at unit gain and the neighbor at gain `epsilon`, and
//! reports channel state over a finite feedback channel, either as analog
//! retransmission of the pilots observations ([`analog`]) or as
//! random-codebook quantization bits ([`digital`]). Base stations then run
//! regularized channel inversion in one of three modes: pooled joint
//! transmission from both sites (MCP), per-cell beamforming that nulls the
//! neighbor's users from local estimates (CBf), or a single-cell baseline
//! that ignores the other cell (SCP).
//!
//! For each mode and feedback type the crate provides
//!
//! - the deterministic large-system SINR limit and its optimizers over the
//!   regularization and the feedback allocation ([`analog`], [`digital`],
//!   built on the fixed points in [`solver`]);
//! - an exact finite-size simulator of channels, estimators, quantizers,
//!   precoders, and per-user SINRs to validate the limits ([`sim`]);
//! - sweep and budget-conversion drivers plus output emitters used by the
//!   `twincell` binary ([`experiments`], [`cli`]).
//!
//! ## Example
//!
//! ```
//! use twincell::analog::{mcp_optimize, cbf_optimize, AnalogParams};
//!
//! let p = AnalogParams::default();
//! let mcp = mcp_optimize(&p).unwrap();
//! let cbf = cbf_optimize(&p).unwrap();
//! // Pooling both base stations' antennas beats per-cell beamforming here.
//! assert!(mcp.sinr_limit > cbf.sinr_limit);
//! ```

pub mod analog;
pub mod cli;
pub mod digital;
pub mod error;
pub mod experiments;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
