//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | offset | type     | content                      |
//! |--------|----------|------------------------------|
//! | 0      | [u8; 8]  | magic `GBBMSNAP`             |
//! | 8      | u32      | format version (1)           |
//! | 12     | u32      | reserved, zero               |
//! | 16     | u64      | `n`                          |
//! | 24     | f64      | `length`                     |
//! | 32     | f64      | `x_min`                      |
//! | 40     | f64      | `t`                          |
//! | 48     | n × 2 f64| coefficients `(re, im)`      |

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{make_grid_at, SpectralField};

pub const MAGIC: &[u8; 8] = b"GBBMSNAP";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 48;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub profile: SpectralField,
}

pub fn encode(snap: &Snapshot) -> Vec<u8> {
    let g = &snap.profile.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.n());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(g.n() as u64).to_le_bytes());
    out.extend_from_slice(&g.length().to_le_bytes());
    out.extend_from_slice(&g.x_min().to_le_bytes());
    out.extend_from_slice(&snap.t.to_le_bytes());
    for c in &snap.profile.coeffs {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let bad = |reason: String| Error::Snapshot {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!(
            "{} bytes is shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[..8] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(8);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let n = usize::try_from(u64_at(16)).map_err(|_| bad("n overflows usize".into()))?;
    let expected = n
        .checked_mul(16)
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| bad("n overflows".into()))?;
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes for n = {n}, got {}",
            bytes.len()
        )));
    }
    let grid = make_grid_at(n, f64_at(24), f64_at(32)).map_err(|e| bad(e.to_string()))?;
    let t = f64_at(40);
    let coeffs = (0..n)
        .map(|j| {
            let o = HEADER_LEN + 16 * j;
            Complex64::new(f64_at(o), f64_at(o + 8))
        })
        .collect();
    Ok(Snapshot {
        t,
        profile: SpectralField::from_coeffs(&grid, coeffs)?,
    })
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode(snap))?;
    f.sync_all()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn round_trip() {
        let g = make_grid(32, 10.0).unwrap();
        let profile = SpectralField::from_fn(&g, |x| (-(x * x)).exp());
        let snap = Snapshot { t: 3.5, profile };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        write_snapshot(&path, &snap).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(back.t, 3.5);
        assert_eq!(back.profile.coeffs, snap.profile.coeffs);
        assert_eq!(*back.profile.grid, *snap.profile.grid);
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 48 + 32 * 16);
    }

    #[test]
    fn rejects_corruption() {
        let g = make_grid(16, 1.0).unwrap();
        let snap = Snapshot {
            t: 1.0,
            profile: SpectralField::zeros(&g),
        };
        let bytes = encode(&snap);
        let p = Path::new("mem");
        assert!(decode(&bytes[..40], p).is_err());
        assert!(decode(&bytes[..bytes.len() - 1], p).is_err());
        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(decode(&wrong, p).is_err());
        let mut wrong = bytes;
        wrong[8] = 9;
        assert!(matches!(decode(&wrong, p), Err(Error::Snapshot { .. })));
    }
}
