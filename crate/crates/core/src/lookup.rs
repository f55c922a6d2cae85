//! Lookup table of every combination's embedding, with exact nearest-neighbor
//! recovery.
//!
//! Row `r` holds `R * encode(unrank(r))`. Recovery is a linear scan over all
//! rows with ties resolved toward the smaller rank, so the result never
//! depends on scan order or thread count.
//!
//! # File format
//!
//! Little-endian throughout:
//!
//! ```text
//! "CBOL1"               5 bytes
//! k                     u64
//! arities               k x u64
//! m                     u64
//! d                     u64
//! seed                  u64
//! rows                  N x d x f64, rank order
//! ```

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::embedding::RandomEmbedding;
use crate::error::{CboError, Result};
use crate::space::{CategoricalSpace, Combination};

pub const DEFAULT_TABLE_CAP: u64 = 1 << 24;
pub const TABLE_MAGIC: &[u8; 5] = b"CBOL1";

#[derive(Debug, Clone)]
pub struct LookupTable {
    space: CategoricalSpace,
    embedding: RandomEmbedding,
    rows: Vec<f64>,
}

impl LookupTable {
    pub fn build(space: &CategoricalSpace, embedding: &RandomEmbedding) -> Result<Self> {
        Self::build_with_cap(space, embedding, DEFAULT_TABLE_CAP)
    }

    pub fn build_with_cap(
        space: &CategoricalSpace,
        embedding: &RandomEmbedding,
        cap: u64,
    ) -> Result<Self> {
        let n = space.cardinality();
        if n > cap {
            return Err(CboError::EnumerationCap { cardinality: n, cap });
        }
        if embedding.code_length() != space.code_length() {
            return Err(CboError::DimensionMismatch {
                expected: space.code_length(),
                actual: embedding.code_length(),
            });
        }
        let d = embedding.target_dim();
        let mut rows = vec![0.0; n as usize * d];
        rows.par_chunks_mut(d).enumerate().for_each(|(rank, row)| {
            // rank < N, so the pattern is in-image
            embedding.embed_into(&space.rank_to_bits(rank as u64), row);
        });
        Ok(Self {
            space: space.clone(),
            embedding: embedding.clone(),
            rows,
        })
    }

    pub fn space(&self) -> &CategoricalSpace {
        &self.space
    }

    pub fn embedding(&self) -> &RandomEmbedding {
        &self.embedding
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.embedding.target_dim()
    }

    /// Embedded vector stored for `rank`.
    pub fn row(&self, rank: u64) -> &[f64] {
        let d = self.dim();
        let start = rank as usize * d;
        &self.rows[start..start + d]
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &[f64])> {
        self.rows
            .chunks_exact(self.dim())
            .enumerate()
            .map(|(r, row)| (r as u64, row))
    }

    /// Per-coordinate bounds of the table image.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for (_, row) in self.rows() {
            for i in 0..d {
                lo[i] = lo[i].min(row[i]);
                hi[i] = hi[i].max(row[i]);
            }
        }
        (lo, hi)
    }

    pub fn nearest(&self, x: &[f64]) -> Result<Combination> {
        let rank = self.nearest_rank(x)?;
        self.space.unrank(rank)
    }

    pub fn nearest_rank(&self, x: &[f64]) -> Result<u64> {
        self.nearest_rank_excluding(x, &HashSet::new())?
            .ok_or(CboError::EmptyCandidates)
    }

    /// Nearest row whose rank is not in `exclude`; `None` if every rank is excluded.
    pub fn nearest_rank_excluding(&self, x: &[f64], exclude: &HashSet<u64>) -> Result<Option<u64>> {
        if x.len() != self.dim() {
            return Err(CboError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        assert!(!self.is_empty(), "lookup table is never empty after build");
        let mut best: Option<(f64, u64)> = None;
        for (rank, row) in self.rows() {
            if exclude.contains(&rank) {
                continue;
            }
            let dist: f64 = row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            // strict comparison keeps the smallest rank among ties
            if best.is_none_or(|(bd, _)| dist < bd) {
                best = Some((dist, rank));
            }
        }
        Ok(best.map(|(_, r)| r))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| CboError::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut write = |bytes: &[u8]| w.write_all(bytes).map_err(|e| CboError::io(path, e));
        write(TABLE_MAGIC)?;
        write(&(self.space.num_variables() as u64).to_le_bytes())?;
        for &a in self.space.arities() {
            write(&(a as u64).to_le_bytes())?;
        }
        write(&(self.space.code_length() as u64).to_le_bytes())?;
        write(&(self.dim() as u64).to_le_bytes())?;
        write(&self.embedding.seed().to_le_bytes())?;
        for v in &self.rows {
            write(&v.to_le_bytes())?;
        }
        w.flush().map_err(|e| CboError::io(path, e))
    }

    /// Reads a table file, rebuilding `R` from the header and checking every
    /// stored row against it bit for bit.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| CboError::io(path, e))?;
        let mut r = BufReader::new(file);
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic).map_err(|e| CboError::io(path, e))?;
        if &magic != TABLE_MAGIC {
            return Err(CboError::TableFormat(format!("bad magic {magic:?}")));
        }
        let read_u64 = |r: &mut BufReader<File>| -> Result<u64> {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf).map_err(|e| CboError::io(path, e))?;
            Ok(u64::from_le_bytes(buf))
        };
        let k = read_u64(&mut r)?;
        if k == 0 || k > 4096 {
            return Err(CboError::TableFormat(format!("implausible variable count {k}")));
        }
        let arities = (0..k)
            .map(|_| read_u64(&mut r).map(|a| a as usize))
            .collect::<Result<Vec<_>>>()?;
        let m = read_u64(&mut r)? as usize;
        let d = read_u64(&mut r)? as usize;
        let seed = read_u64(&mut r)?;
        let space = CategoricalSpace::new(arities)?;
        if space.code_length() != m {
            return Err(CboError::TableFormat(format!(
                "header code length {m} does not match arities (expected {})",
                space.code_length()
            )));
        }
        let embedding = RandomEmbedding::new(&space, d, seed)?;
        let expected = Self::build(&space, &embedding)?;
        let mut buf = [0u8; 8];
        for (i, want) in expected.rows.iter().enumerate() {
            r.read_exact(&mut buf).map_err(|e| {
                CboError::TableFormat(format!("truncated at value {i}: {e}"))
            })?;
            let got = f64::from_le_bytes(buf);
            if got.to_bits() != want.to_bits() {
                return Err(CboError::TableFormat(format!(
                    "row {} does not match the embedding rebuilt from seed {seed}",
                    i / d
                )));
            }
        }
        if r.read(&mut buf).map_err(|e| CboError::io(path, e))? != 0 {
            return Err(CboError::TableFormat("trailing bytes after last row".into()));
        }
        Ok(expected)
    }
}
