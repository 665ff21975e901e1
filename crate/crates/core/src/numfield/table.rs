//! Binary cache of prime-ideal tables.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes  "ADEPRIME"
//! version  u32      1
//! tag      i64      field tag (0 for Q)
//! bound    u64      norm bound of the table
//! count    u64      number of records
//! records  count * (norm u64, a i64, b i64)   generator a + b*w
//! ```

use super::{FieldContext, PrimeIdeal, Quad, SplitKind};
use crate::error::{AdeError, Result};
use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::ToPrimitive;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 8] = b"ADEPRIME";
const VERSION: u32 = 1;

/// Prime ideals of norm at most `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    pub tag: i64,
    pub bound: u64,
    pub primes: Vec<PrimeIdeal>,
}

/// Cache directory: `ADE_CACHE_DIR` if set, else `<tmp>/ade-cache`.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("ADE_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("ade-cache"))
}

fn table_path(dir: &Path, tag: i64, bound: u64) -> PathBuf {
    dir.join(format!("primes_{tag}_{bound}.bin"))
}

pub fn write_table(path: &Path, table: &PrimeTable) -> Result<()> {
    let mut buf = Vec::with_capacity(36 + 24 * table.primes.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&table.tag.to_le_bytes());
    buf.extend_from_slice(&table.bound.to_le_bytes());
    buf.extend_from_slice(&(table.primes.len() as u64).to_le_bytes());
    for p in &table.primes {
        let a = p.generator.a.to_i64().ok_or_else(|| AdeError::Io("generator too large".into()))?;
        let b = p.generator.b.to_i64().ok_or_else(|| AdeError::Io("generator too large".into()))?;
        buf.extend_from_slice(&p.norm.to_le_bytes());
        buf.extend_from_slice(&a.to_le_bytes());
        buf.extend_from_slice(&b.to_le_bytes());
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    // write then rename so concurrent readers never see a torn file
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::File::create(&tmp)?.write_all(&buf)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn take<const N: usize>(data: &[u8], pos: &mut usize) -> Result<[u8; N]> {
    let s = data.get(*pos..*pos + N).ok_or_else(|| AdeError::Io("truncated prime table".into()))?;
    *pos += N;
    Ok(s.try_into().expect("slice has length N"))
}

pub fn read_table(path: &Path, ctx: &FieldContext) -> Result<PrimeTable> {
    let mut data = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut data)?;
    let mut pos = 0;
    if &take::<8>(&data, &mut pos)? != MAGIC {
        return Err(AdeError::Io("bad prime table magic".into()));
    }
    if u32::from_le_bytes(take(&data, &mut pos)?) != VERSION {
        return Err(AdeError::Io("unsupported prime table version".into()));
    }
    let tag = i64::from_le_bytes(take(&data, &mut pos)?);
    if tag != ctx.tag() {
        return Err(AdeError::Io(format!("prime table is for field tag {tag}")));
    }
    let bound = u64::from_le_bytes(take(&data, &mut pos)?);
    let count = u64::from_le_bytes(take(&data, &mut pos)?);
    let mut primes = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let norm = u64::from_le_bytes(take(&data, &mut pos)?);
        let a = i64::from_le_bytes(take(&data, &mut pos)?);
        let b = i64::from_le_bytes(take(&data, &mut pos)?);
        let generator = Quad::new(BigInt::from(a), BigInt::from(b));
        let (p, kind) = if ctx.tag() == 0 {
            (norm, SplitKind::Rational)
        } else {
            let r = norm.sqrt();
            if r * r == norm && b == 0 {
                (r, SplitKind::Inert)
            } else if ctx.kronecker(norm) == 0 {
                (norm, SplitKind::Ramified)
            } else {
                (norm, SplitKind::Split)
            }
        };
        primes.push(PrimeIdeal { p, norm, generator, kind });
    }
    if pos != data.len() {
        return Err(AdeError::Io("trailing bytes in prime table".into()));
    }
    Ok(PrimeTable { tag, bound, primes })
}

/// Loads the table for `(field, bound)` from the cache, building and
/// storing it on a miss. Cache failures fall back to an in-memory build.
pub fn load_or_build_table(ctx: &FieldContext, bound: u64) -> PrimeTable {
    let path = table_path(&cache_dir(), ctx.tag(), bound);
    if let Ok(t) = read_table(&path, ctx) {
        if t.bound == bound {
            return t;
        }
    }
    let table = PrimeTable { tag: ctx.tag(), bound, primes: ctx.primes_up_to_norm(bound) };
    let _ = write_table(&path, &table);
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for tag in [0, -1, -3, -7] {
            let ctx = FieldContext::new(tag).unwrap();
            let t = PrimeTable { tag, bound: 200, primes: ctx.primes_up_to_norm(200) };
            let path = dir.path().join(format!("t{tag}.bin"));
            write_table(&path, &t).unwrap();
            assert_eq!(read_table(&path, &ctx).unwrap(), t);
        }
    }

    #[test]
    fn corrupt_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"ADEPRIME\x01\x00").unwrap();
        assert!(read_table(&path, &FieldContext::rationals()).is_err());
    }
}
