//! Codewords: systematic encoding, recovery from any `k` shards, and the
//! byte/symbol packing used for files.

use alloc::vec;
use alloc::vec::Vec;

use crate::construction::MsrCode;
use crate::field::{Fe, Field};
use crate::linalg::Matrix;
use crate::{Error, Result};

/// One node's share of a codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeShard {
    node_index: usize,
    symbols: Vec<Fe>,
    params_checksum: u32,
}

impl NodeShard {
    /// A shard for 1-based node `node_index`.
    pub fn new(node_index: usize, symbols: Vec<Fe>, params_checksum: u32) -> Self {
        NodeShard {
            node_index,
            symbols,
            params_checksum,
        }
    }

    /// 1-based node number.
    pub fn node_index(&self) -> usize {
        self.node_index
    }

    /// The `α` stored symbols.
    pub fn symbols(&self) -> &[Fe] {
        &self.symbols
    }

    /// Checksum of the parameter set this shard was produced under.
    pub fn params_checksum(&self) -> u32 {
        self.params_checksum
    }

    /// Consume into the symbol vector.
    pub fn into_symbols(self) -> Vec<Fe> {
        self.symbols
    }
}

/// Compute the `r` parity vectors of one codeword of `k·α` symbols.
pub fn encode_parities(code: &MsrCode, data: &[Fe]) -> Result<Vec<Vec<Fe>>> {
    let p = code.params();
    let alpha = p.alpha();
    if data.len() != p.file_symbols() {
        return Err(Error::BadLength {
            expected: p.file_symbols(),
            actual: data.len(),
        });
    }
    Ok((0..p.r())
        .map(|i| {
            let mut acc = vec![Fe::ZERO; alpha];
            for (j, x) in data.chunks_exact(alpha).enumerate() {
                code.apply_block(i, j, x, &mut acc);
            }
            acc
        })
        .collect())
}

/// Encode one codeword into `n` shards: `k` raw chunks then `r` parities.
pub fn encode(code: &MsrCode, data: &[Fe], params_checksum: u32) -> Result<Vec<NodeShard>> {
    let parities = encode_parities(code, data)?;
    let alpha = code.params().alpha();
    let systematic = data.chunks_exact(alpha).map(<[Fe]>::to_vec);
    Ok(systematic
        .chain(parities)
        .enumerate()
        .map(|(t, s)| NodeShard::new(t + 1, s, params_checksum))
        .collect())
}

/// Decoder for a fixed choice of `k` surviving nodes.
///
/// Systematic survivors are read off directly. Their contribution is
/// subtracted from the chosen parities, which leaves a square system over
/// the missing systematic nodes whose matrix is the corresponding block
/// sub-matrix of the parity part.
#[derive(Debug, Clone)]
pub struct Recoverer {
    code: MsrCode,
    nodes: Vec<usize>,
    missing: Vec<usize>,
    parities: Vec<usize>,
    inverse: Option<Matrix>,
}

impl Recoverer {
    /// Prepare to decode from exactly the given `k` distinct nodes (1-based).
    pub fn new(code: &MsrCode, nodes: &[usize]) -> Result<Self> {
        let p = code.params();
        let mut sorted = nodes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != nodes.len() || sorted.len() != p.k() {
            return Err(Error::DimensionMismatch("need exactly k distinct shards"));
        }
        if sorted.iter().any(|&s| s == 0 || s > p.n()) {
            return Err(Error::OutOfRange("node index"));
        }
        let missing: Vec<usize> = (1..=p.k()).filter(|j| !sorted.contains(j)).collect();
        let parities: Vec<usize> = sorted.iter().copied().filter(|&s| p.is_parity(s)).collect();
        let inverse = if missing.is_empty() {
            None
        } else {
            Some(block_submatrix(code, &parities, &missing)?.inverse()?)
        };
        Ok(Recoverer {
            code: code.clone(),
            nodes: sorted,
            missing,
            parities,
            inverse,
        })
    }

    /// The nodes this decoder reads, increasing.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Reconstruct the `k·α` data symbols. `shard(node)` yields the symbols
    /// of each node in [`Recoverer::nodes`].
    pub fn decode<'a>(&self, shard: impl Fn(usize) -> &'a [Fe]) -> Result<Vec<Fe>> {
        let p = self.code.params();
        let f = p.field();
        let alpha = p.alpha();
        for &node in &self.nodes {
            let got = shard(node).len();
            if got != alpha {
                return Err(Error::BadLength {
                    expected: alpha,
                    actual: got,
                });
            }
        }
        let mut data = vec![Fe::ZERO; p.file_symbols()];
        for j in (1..=p.k()).filter(|j| !self.missing.contains(j)) {
            data[(j - 1) * alpha..j * alpha].copy_from_slice(shard(j));
        }
        let Some(inverse) = &self.inverse else {
            return Ok(data);
        };
        // Right-hand side: each parity minus its known systematic terms.
        let mut rhs = Vec::with_capacity(self.missing.len() * alpha);
        for &node in &self.parities {
            let i = node - p.k() - 1;
            let mut known = vec![Fe::ZERO; alpha];
            for j in (1..=p.k()).filter(|j| !self.missing.contains(j)) {
                self.code
                    .apply_block(i, j - 1, &data[(j - 1) * alpha..j * alpha], &mut known);
            }
            rhs.extend(shard(node).iter().zip(&known).map(|(&y, &c)| f.sub(y, c)));
        }
        let solved = inverse.mul_vec(&rhs)?;
        for (t, &j) in self.missing.iter().enumerate() {
            data[(j - 1) * alpha..j * alpha].copy_from_slice(&solved[t * alpha..(t + 1) * alpha]);
        }
        Ok(data)
    }
}

/// The dense block sub-matrix of the parity part with the given parity
/// nodes as block rows and systematic nodes as block columns (1-based).
pub fn block_submatrix(code: &MsrCode, parity_nodes: &[usize], cols: &[usize]) -> Result<Matrix> {
    let p = code.params();
    let alpha = p.alpha();
    if alpha > crate::construction::DENSE_ALPHA_CAP {
        return Err(Error::TooLarge("alpha above dense cap"));
    }
    let mut m = Matrix::zeros(p.field(), parity_nodes.len() * alpha, cols.len() * alpha);
    for (bi, &node) in parity_nodes.iter().enumerate() {
        let i = node - p.k() - 1;
        for (bj, &j) in cols.iter().enumerate() {
            let lambda = code.block(i, j - 1).lambda();
            for (v, &dst) in code.perm_table(i, j - 1).iter().enumerate() {
                m.set(bi * alpha + dst as usize, bj * alpha + v, lambda);
            }
        }
    }
    Ok(m)
}

/// Recover one codeword from any `k` shards with matching checksums.
pub fn recover(code: &MsrCode, shards: &[NodeShard], params_checksum: u32) -> Result<Vec<Fe>> {
    for s in shards {
        if s.params_checksum != params_checksum {
            return Err(Error::ChecksumMismatch {
                expected: params_checksum,
                actual: s.params_checksum,
            });
        }
    }
    let nodes: Vec<usize> = shards.iter().map(|s| s.node_index).collect();
    let rec = Recoverer::new(code, &nodes)?;
    rec.decode(|node| {
        shards
            .iter()
            .find(|s| s.node_index == node)
            .map(|s| s.symbols.as_slice())
            .expect("node set validated")
    })
}

/// Payload bits carried by one symbol: `floor(log2 q)`, so every packed
/// value is below `q`.
pub fn bits_per_symbol(field: &Field) -> u32 {
    63 - field.modulus().leading_zeros()
}

/// Bytes per stored symbol: enough little-endian bytes to hold `q - 1`.
pub fn symbol_width(field: &Field) -> usize {
    let bits = 64 - (field.modulus() - 1).leading_zeros();
    bits.div_ceil(8).max(1) as usize
}

/// Append `symbols` as `width`-byte little-endian integers.
pub fn write_symbols(symbols: &[Fe], width: usize, out: &mut Vec<u8>) {
    for s in symbols {
        out.extend_from_slice(&s.value().to_le_bytes()[..width]);
    }
}

/// Parse `width`-byte little-endian symbols, rejecting values `>= q`.
pub fn read_symbols(field: &Field, bytes: &[u8]) -> Result<Vec<Fe>> {
    let width = symbol_width(field);
    if !bytes.len().is_multiple_of(width) {
        return Err(Error::BadLength {
            expected: bytes.len().next_multiple_of(width),
            actual: bytes.len(),
        });
    }
    bytes
        .chunks_exact(width)
        .map(|c| {
            let mut buf = [0u8; 8];
            buf[..width].copy_from_slice(c);
            field.checked_elem(u64::from_le_bytes(buf))
        })
        .collect()
}

/// A byte string packed into whole codewords of field symbols.
///
/// The stream is the original length as a little-endian `u64` followed by
/// the bytes, read as a little-endian bit string and cut into groups of
/// [`bits_per_symbol`] bits, then zero-filled to a multiple of the
/// codeword size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    symbols: Vec<Fe>,
    byte_len: u64,
}

impl SourceFile {
    /// Pack `bytes` into a multiple of `codeword_symbols` symbols.
    pub fn pad(field: &Field, bytes: &[u8], codeword_symbols: usize) -> Self {
        let bits = bits_per_symbol(field);
        let mask = (1u64 << bits) - 1;
        let mut symbols = Vec::new();
        let mut acc: u128 = 0;
        let mut held = 0u32;
        let len = bytes.len() as u64;
        for &b in len.to_le_bytes().iter().chain(bytes) {
            acc |= (b as u128) << held;
            held += 8;
            while held >= bits {
                symbols.push(Fe((acc as u64) & mask));
                acc >>= bits;
                held -= bits;
            }
        }
        if held > 0 {
            symbols.push(Fe(acc as u64 & mask));
        }
        let total = symbols.len().next_multiple_of(codeword_symbols.max(1));
        symbols.resize(total, Fe::ZERO);
        SourceFile {
            symbols,
            byte_len: len,
        }
    }

    /// The packed symbols.
    pub fn symbols(&self) -> &[Fe] {
        &self.symbols
    }

    /// Length of the original byte string.
    pub fn byte_len(&self) -> u64 {
        self.byte_len
    }

    /// Unpack symbols produced by [`SourceFile::pad`].
    pub fn unpad(field: &Field, symbols: &[Fe]) -> Result<Vec<u8>> {
        let bits = bits_per_symbol(field);
        let mut out = Vec::new();
        let mut acc: u128 = 0;
        let mut held = 0u32;
        let mut want: Option<usize> = None;
        for s in symbols {
            if s.value() >> bits != 0 {
                return Err(Error::SymbolOverflow(s.value()));
            }
            acc |= (s.value() as u128) << held;
            held += bits;
            while held >= 8 {
                out.push(acc as u8);
                acc >>= 8;
                held -= 8;
            }
            if want.is_none() && out.len() >= 8 {
                let len = u64::from_le_bytes(out[..8].try_into().expect("eight bytes"));
                want = Some(8usize.saturating_add(len as usize));
            }
            if want.is_some_and(|w| out.len() >= w) {
                break;
            }
        }
        let want = want.ok_or(Error::BadLength {
            expected: 8,
            actual: out.len(),
        })?;
        if out.len() < want {
            return Err(Error::BadLength {
                expected: want,
                actual: out.len(),
            });
        }
        out.truncate(want);
        Ok(out.split_off(8))
    }
}
