//! Files and tooling around [`msr_core`]: parameter files, shard files,
//! verification sweeps and the file-level pipeline behind the `msr` binary.

mod error;
pub mod params;
pub mod pipeline;
pub mod shard;
pub mod verify;

pub use error::{Error, Result};
pub use params::{LoadedCode, ParamsFile};
pub use shard::{PartialReader, ReadStats, ShardFile, ShardHeader};
