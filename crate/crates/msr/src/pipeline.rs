//! File-level encode, repair and recover over a directory of shard files.

use std::path::Path;

use msr_core::codec::{encode, Recoverer, SourceFile};
use msr_core::repair::{RepairDecoder, RepairPlan};
use msr_core::{MsrCode, Transmissions};

use crate::error::{Error, Result};
use crate::shard::{shard_path, PartialReader, ReadStats, ShardFile, ShardHeader, ShardWriter};

/// Split `bytes` into codewords and write `node_1.msr ..= node_n.msr`.
/// Returns the number of codewords.
pub fn encode_bytes(code: &MsrCode, checksum: u32, bytes: &[u8], outdir: &Path) -> Result<usize> {
    let p = code.params();
    let field = p.field();
    std::fs::create_dir_all(outdir).map_err(Error::io(outdir))?;
    let src = SourceFile::pad(&field, bytes, p.file_symbols());
    let mut writers = (1..=p.n())
        .map(|node| {
            let h = ShardHeader::for_node(p, node, checksum)?;
            ShardWriter::create(&shard_path(outdir, node), &h, &field)
        })
        .collect::<Result<Vec<_>>>()?;
    let chunks = src.symbols().chunks_exact(p.file_symbols());
    let count = chunks.len();
    for chunk in chunks {
        for (w, shard) in writers.iter_mut().zip(encode(code, chunk, checksum)?) {
            w.write_codeword(shard.symbols())?;
        }
    }
    for w in writers {
        w.finish()?;
    }
    Ok(count)
}

/// What a repair did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairSummary {
    pub codewords: usize,
    /// Symbols downloaded per codeword.
    pub downloaded_per_codeword: usize,
    /// `k · α`, the per-codeword download of a conventional rebuild.
    pub naive_per_codeword: usize,
    /// Dimension of the solved system.
    pub system_dimension: usize,
    /// Reads against the helper files, summed.
    pub reads: ReadStats,
}

/// Rebuild `node_<failed>.msr` in `dir` from the planned rows of the helper
/// files. Each helper file is opened with a [`PartialReader`] and only the
/// plan rows are read.
pub fn repair_node(
    code: &MsrCode,
    checksum: u32,
    dir: &Path,
    failed: usize,
    helpers: &[usize],
) -> Result<RepairSummary> {
    let p = code.params();
    let plan = RepairPlan::new(code, failed, helpers)?;
    let decoder = RepairDecoder::new(code, &plan)?;
    let mut readers = plan
        .helper_set()
        .helpers()
        .iter()
        .map(|&h| Ok((h, PartialReader::open(&shard_path(dir, h), p, checksum)?)))
        .collect::<Result<Vec<_>>>()?;
    let codewords = readers.first().map_or(0, |(_, r)| r.codewords());
    if let Some((h, _)) = readers.iter().find(|(_, r)| r.codewords() != codewords) {
        return Err(Error::Shard {
            path: shard_path(dir, *h),
            reason: "codeword count differs from the other helpers".into(),
        });
    }
    let field = p.field();
    let header = ShardHeader::for_node(p, failed, checksum)?;
    let mut out = ShardWriter::create(&shard_path(dir, failed), &header, &field)?;
    for c in 0..codewords {
        let mut tx = Transmissions::new(checksum);
        for (h, r) in readers.iter_mut() {
            let rows = plan.rows_for(*h).expect("reader per helper");
            tx.insert(*h, r.read_positions(c, rows)?);
        }
        out.write_codeword(&decoder.decode(&tx)?)?;
    }
    out.finish()?;
    let mut reads = ReadStats::default();
    for (_, r) in &readers {
        reads.add(&r.stats());
    }
    Ok(RepairSummary {
        codewords,
        downloaded_per_codeword: plan.download_symbols(),
        naive_per_codeword: plan.naive_symbols(),
        system_dimension: plan.system_dimension(),
        reads,
    })
}

/// Reassemble the original bytes from any `k` readable shards in `dir`,
/// preferring systematic ones. Files that are missing or fail their header
/// check are passed over.
pub fn recover_bytes(code: &MsrCode, checksum: u32, dir: &Path) -> Result<Vec<u8>> {
    let p = code.params();
    let mut shards = Vec::new();
    for node in 1..=p.n() {
        if shards.len() == p.k() {
            break;
        }
        let path = shard_path(dir, node);
        if !path.exists() {
            continue;
        }
        match ShardFile::read(&path, p, checksum) {
            Ok(s) => shards.push(s),
            Err(Error::Io { .. } | Error::Shard { .. }) => continue,
            Err(Error::Core(msr_core::Error::ChecksumMismatch { .. })) => continue,
            Err(e) => return Err(e),
        }
    }
    if shards.len() < p.k() {
        return Err(Error::NotEnoughShards {
            needed: p.k(),
            found: shards.len(),
        });
    }
    let codewords = shards[0].codewords();
    if shards.iter().any(|s| s.codewords() != codewords) {
        return Err(Error::Shard {
            path: dir.to_path_buf(),
            reason: "shards hold different numbers of codewords".into(),
        });
    }
    let nodes: Vec<usize> = shards
        .iter()
        .map(|s| s.header.node_index as usize)
        .collect();
    let rec = Recoverer::new(code, &nodes)?;
    let mut symbols = Vec::with_capacity(codewords * p.file_symbols());
    for c in 0..codewords {
        symbols.extend(rec.decode(|node| {
            let i = nodes.iter().position(|&v| v == node).expect("chosen node");
            shards[i].codeword(c)
        })?);
    }
    Ok(SourceFile::unpad(&p.field(), &symbols)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use msr_core::CodeParams;

    fn code_423() -> MsrCode {
        MsrCode::new(
            CodeParams::new(4, 2, 3, 5).unwrap(),
            &[vec![1, 1], vec![1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_through_files() {
        let code = code_423();
        let dir = tempfile::tempdir().unwrap();
        let data: Vec<u8> = (0..=255).collect();
        let cw = encode_bytes(&code, 1, &data, dir.path()).unwrap();
        assert!(cw > 1);
        let before = std::fs::read(shard_path(dir.path(), 2)).unwrap();
        std::fs::remove_file(shard_path(dir.path(), 2)).unwrap();
        let s = repair_node(&code, 1, dir.path(), 2, &[1, 3, 4]).unwrap();
        assert_eq!(std::fs::read(shard_path(dir.path(), 2)).unwrap(), before);
        assert_eq!((s.downloaded_per_codeword, s.naive_per_codeword), (6, 8));
        assert_eq!(s.reads.symbols, 6 * cw as u64);
        std::fs::remove_file(shard_path(dir.path(), 1)).unwrap();
        std::fs::remove_file(shard_path(dir.path(), 2)).unwrap();
        assert_eq!(recover_bytes(&code, 1, dir.path()).unwrap(), data);
        std::fs::remove_file(shard_path(dir.path(), 3)).unwrap();
        assert!(matches!(
            recover_bytes(&code, 1, dir.path()),
            Err(Error::NotEnoughShards {
                needed: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn foreign_shards_are_skipped_on_recover() {
        let code = code_423();
        let dir = tempfile::tempdir().unwrap();
        encode_bytes(&code, 1, b"abc", dir.path()).unwrap();
        let other = tempfile::tempdir().unwrap();
        encode_bytes(&code, 2, b"xyz", other.path()).unwrap();
        std::fs::copy(shard_path(other.path(), 1), shard_path(dir.path(), 1)).unwrap();
        assert_eq!(recover_bytes(&code, 1, dir.path()).unwrap(), b"abc");
        assert!(matches!(
            repair_node(&code, 1, dir.path(), 2, &[1, 3, 4]),
            Err(Error::Core(msr_core::Error::ChecksumMismatch { .. }))
        ));
    }
}
