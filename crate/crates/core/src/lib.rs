#![cfg_attr(not(test), no_std)]
#![warn(missing_docs)]

//! Systematic-repair minimum-storage regenerating (MSR) codes.
//!
//! An `[n, k, d]` MSR code stores a file of `k·α` symbols over a prime field
//! on `n` nodes holding `α` symbols each. The file can be recovered from any
//! `k` nodes, and a failed systematic node is rebuilt from any `d` surviving
//! helpers, each of which sends only `β = α / (d - k + 1)` symbols.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line tool, and threaded verification live in the companion `msr` crate.
//!
//! # Indexing
//!
//! Nodes are numbered from 1: systematic nodes are `1..=k`, parity nodes are
//! `k+1..=n`. Everything else (parity rows of the encoding array, systematic
//! columns, scenario indices, label coordinates, symbol positions) is
//! zero-based.
//!
//! ```
//! use msr_core::{CodeParams, MsrCode};
//!
//! let params = CodeParams::new(4, 2, 3, 5).unwrap();
//! let code = MsrCode::new(params, &[vec![1, 1], vec![1, 2]]).unwrap();
//! assert_eq!(code.params().alpha(), 4);
//! assert_eq!(code.params().beta(), 2);
//! ```

extern crate alloc;

pub mod codec;
pub mod coefficients;
pub mod construction;
mod error;
pub mod field;
pub mod labels;
pub mod linalg;
pub mod repair;
pub mod rng;
pub mod subsets;

pub use codec::{NodeShard, SourceFile};
pub use coefficients::CoefficientCertificate;
pub use construction::{CodeParams, EncodingBlock, MsrCode, ScenarioTable};
pub use error::{Error, Result};
pub use field::{Fe, Field};
pub use labels::{CoordinateSlice, LabelSpace, Translation};
pub use linalg::Matrix;
pub use repair::{HelperSet, RepairDecoder, RepairPlan, RepairResult, Transmissions};
