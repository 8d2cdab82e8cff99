//! Shard files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "MSR1" | version u8 | n u16 | k u16 | d u16 | q u64 | alpha u64
//!        | node_index u16 | params_checksum u32 | payload
//! ```
//!
//! The payload is one or more codewords, each `alpha` symbols of
//! [`symbol_width`] bytes.

use std::fs::File;
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use msr_core::codec::{read_symbols, symbol_width, write_symbols};
use msr_core::{CodeParams, Fe, Field};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"MSR1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 33;

/// File name for node `i`.
pub fn shard_file_name(node: usize) -> String {
    format!("node_{node}.msr")
}

/// Path of node `i`'s file in `dir`.
pub fn shard_path(dir: &Path, node: usize) -> PathBuf {
    dir.join(shard_file_name(node))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardHeader {
    pub n: u16,
    pub k: u16,
    pub d: u16,
    pub q: u64,
    pub alpha: u64,
    pub node_index: u16,
    pub params_checksum: u32,
}

impl ShardHeader {
    pub fn for_node(params: &CodeParams, node: usize, params_checksum: u32) -> Result<Self> {
        let narrow = |v: usize, what: &'static str| {
            u16::try_from(v).map_err(|_| msr_core::Error::OutOfRange(what))
        };
        Ok(ShardHeader {
            n: narrow(params.n(), "n exceeds u16")?,
            k: narrow(params.k(), "k exceeds u16")?,
            d: narrow(params.d(), "d exceeds u16")?,
            q: params.q(),
            alpha: params.alpha() as u64,
            node_index: narrow(node, "node index exceeds u16")?,
            params_checksum,
        })
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4] = VERSION;
        b[5..7].copy_from_slice(&self.n.to_le_bytes());
        b[7..9].copy_from_slice(&self.k.to_le_bytes());
        b[9..11].copy_from_slice(&self.d.to_le_bytes());
        b[11..19].copy_from_slice(&self.q.to_le_bytes());
        b[19..27].copy_from_slice(&self.alpha.to_le_bytes());
        b[27..29].copy_from_slice(&self.node_index.to_le_bytes());
        b[29..33].copy_from_slice(&self.params_checksum.to_le_bytes());
        b
    }

    /// Parse a header. Errors carry a reason string; callers attach the path.
    pub fn parse(b: &[u8]) -> std::result::Result<Self, String> {
        if b.len() < HEADER_LEN {
            return Err(format!(
                "header is {} bytes, expected {HEADER_LEN}",
                b.len()
            ));
        }
        if b[0..4] != MAGIC {
            return Err("bad magic".into());
        }
        if b[4] != VERSION {
            return Err(format!("unsupported version {}", b[4]));
        }
        let u16_at = |i: usize| u16::from_le_bytes([b[i], b[i + 1]]);
        let u64_at = |i: usize| u64::from_le_bytes(b[i..i + 8].try_into().unwrap());
        Ok(ShardHeader {
            n: u16_at(5),
            k: u16_at(7),
            d: u16_at(9),
            q: u64_at(11),
            alpha: u64_at(19),
            node_index: u16_at(27),
            params_checksum: u32::from_le_bytes(b[29..33].try_into().unwrap()),
        })
    }

    /// Check the header against a code instance. A checksum mismatch is
    /// reported as such; any other disagreement is a format error.
    pub fn check(&self, params: &CodeParams, checksum: u32, path: &Path) -> Result<()> {
        let expected = ShardHeader::for_node(params, self.node_index as usize, checksum)?;
        let node = self.node_index as usize;
        if node == 0 || node > params.n() {
            return Err(shard_err(path, format!("node index {node} out of range")));
        }
        let unstamped = ShardHeader {
            params_checksum: checksum,
            ..*self
        };
        if unstamped != expected {
            return Err(shard_err(
                path,
                "header does not match the parameter file".into(),
            ));
        }
        if self.params_checksum != checksum {
            return Err(msr_core::Error::ChecksumMismatch {
                expected: checksum,
                actual: self.params_checksum,
            }
            .into());
        }
        Ok(())
    }
}

fn shard_err(path: &Path, reason: String) -> Error {
    Error::Shard {
        path: path.to_path_buf(),
        reason,
    }
}

/// Streams codewords into a new shard file.
pub struct ShardWriter {
    out: BufWriter<File>,
    path: PathBuf,
    width: usize,
    alpha: usize,
    buf: Vec<u8>,
}

impl ShardWriter {
    pub fn create(path: &Path, header: &ShardHeader, field: &Field) -> Result<Self> {
        let file = File::create(path).map_err(Error::io(path))?;
        let mut out = BufWriter::new(file);
        out.write_all(&header.to_bytes()).map_err(Error::io(path))?;
        Ok(ShardWriter {
            out,
            path: path.to_path_buf(),
            width: symbol_width(field),
            alpha: header.alpha as usize,
            buf: Vec::new(),
        })
    }

    pub fn write_codeword(&mut self, symbols: &[Fe]) -> Result<()> {
        if symbols.len() != self.alpha {
            return Err(msr_core::Error::BadLength {
                expected: self.alpha,
                actual: symbols.len(),
            }
            .into());
        }
        self.buf.clear();
        write_symbols(symbols, self.width, &mut self.buf);
        self.out.write_all(&self.buf).map_err(Error::io(&self.path))
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(Error::io(&self.path))
    }
}

/// A whole shard file in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardFile {
    pub header: ShardHeader,
    /// Codewords back to back, `alpha` symbols each.
    pub symbols: Vec<Fe>,
}

impl ShardFile {
    pub fn codewords(&self) -> usize {
        self.symbols.len() / self.header.alpha as usize
    }

    pub fn codeword(&self, c: usize) -> &[Fe] {
        let a = self.header.alpha as usize;
        &self.symbols[c * a..(c + 1) * a]
    }

    /// Read and check a shard file against a code instance.
    pub fn read(path: &Path, params: &CodeParams, checksum: u32) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(Error::io(path))?;
        let header = ShardHeader::parse(&bytes).map_err(|r| shard_err(path, r))?;
        header.check(params, checksum, path)?;
        let field = params.field();
        let payload = &bytes[HEADER_LEN..];
        let per = params.alpha() * symbol_width(&field);
        if !payload.len().is_multiple_of(per) {
            return Err(shard_err(
                path,
                format!("payload of {} bytes is not whole codewords", payload.len()),
            ));
        }
        Ok(ShardFile {
            header,
            symbols: read_symbols(&field, payload)?,
        })
    }
}

/// What a [`PartialReader`] pulled from disk.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadStats {
    /// Payload symbols read.
    pub symbols: u64,
    /// Payload bytes read.
    pub bytes: u64,
    /// Contiguous runs, one seek and one read each.
    pub runs: u64,
}

impl ReadStats {
    pub fn add(&mut self, other: &ReadStats) {
        self.symbols += other.symbols;
        self.bytes += other.bytes;
        self.runs += other.runs;
    }
}

/// Reads selected positions of each codeword and nothing else.
pub struct PartialReader {
    file: File,
    path: PathBuf,
    header: ShardHeader,
    field: Field,
    width: usize,
    codewords: usize,
    stats: ReadStats,
    buf: Vec<u8>,
}

impl PartialReader {
    /// Open a shard and validate its header. Only the header is read.
    pub fn open(path: &Path, params: &CodeParams, checksum: u32) -> Result<Self> {
        let mut file = File::open(path).map_err(Error::io(path))?;
        let mut head = [0u8; HEADER_LEN];
        file.read_exact(&mut head).map_err(Error::io(path))?;
        let header = ShardHeader::parse(&head).map_err(|r| shard_err(path, r))?;
        header.check(params, checksum, path)?;
        let field = params.field();
        let width = symbol_width(&field);
        let len = file.metadata().map_err(Error::io(path))?.len();
        let per = (params.alpha() * width) as u64;
        let payload = len - HEADER_LEN as u64;
        if !payload.is_multiple_of(per) {
            return Err(shard_err(
                path,
                format!("payload of {payload} bytes is not whole codewords"),
            ));
        }
        Ok(PartialReader {
            file,
            path: path.to_path_buf(),
            header,
            field,
            width,
            codewords: (payload / per) as usize,
            stats: ReadStats::default(),
            buf: Vec::new(),
        })
    }

    pub fn header(&self) -> &ShardHeader {
        &self.header
    }

    pub fn codewords(&self) -> usize {
        self.codewords
    }

    pub fn stats(&self) -> ReadStats {
        self.stats
    }

    /// Symbols at `positions` (increasing) of codeword `c`. Adjacent
    /// positions are fetched in a single read.
    pub fn read_positions(&mut self, c: usize, positions: &[usize]) -> Result<Vec<Fe>> {
        let alpha = self.header.alpha as usize;
        if c >= self.codewords {
            return Err(msr_core::Error::OutOfRange("codeword index").into());
        }
        if positions.windows(2).any(|w| w[0] >= w[1])
            || positions.last().is_some_and(|&p| p >= alpha)
        {
            return Err(
                msr_core::Error::OutOfRange("positions must increase and be below alpha").into(),
            );
        }
        let mut out = Vec::with_capacity(positions.len());
        let mut i = 0;
        while i < positions.len() {
            let start = positions[i];
            let mut end = i + 1;
            while end < positions.len() && positions[end] == positions[end - 1] + 1 {
                end += 1;
            }
            let count = end - i;
            let offset = HEADER_LEN + (c * alpha + start) * self.width;
            self.buf.resize(count * self.width, 0);
            self.file
                .seek(SeekFrom::Start(offset as u64))
                .map_err(Error::io(&self.path))?;
            self.file
                .read_exact(&mut self.buf)
                .map_err(Error::io(&self.path))?;
            out.extend(read_symbols(&self.field, &self.buf)?);
            self.stats.symbols += count as u64;
            self.stats.bytes += self.buf.len() as u64;
            self.stats.runs += 1;
            i = end;
        }
        Ok(out)
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn header_round_trip(
            n in any::<u16>(), k in any::<u16>(), d in any::<u16>(),
            q in any::<u64>(), alpha in any::<u64>(),
            node_index in any::<u16>(), params_checksum in any::<u32>(),
        ) {
            let h = ShardHeader { n, k, d, q, alpha, node_index, params_checksum };
            prop_assert_eq!(ShardHeader::parse(&h.to_bytes()), Ok(h));
        }
    }
}
