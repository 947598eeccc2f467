//! Bit-exact binary field snapshots.
//!
//! Layout: 8-byte magic `PACOKF1\0`, then little-endian `u32 Nx`, `u32 Ny`,
//! `f64 X`, `f64 Y`, then `Nx * Ny` IEEE-754 `f64` values row-major with the
//! y-index outer and the x-index inner. Write/read round trips are bitwise
//! lossless.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

pub const MAGIC: [u8; 8] = *b"PACOKF1\0";

pub fn write_snapshot(phi: &Field, path: &Path) -> Result<()> {
    let g = phi.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    w.write_all(&(g.nx as u32).to_le_bytes())?;
    w.write_all(&(g.ny as u32).to_le_bytes())?;
    w.write_all(&g.x.to_le_bytes())?;
    w.write_all(&g.y.to_le_bytes())?;
    for &v in phi.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let truncated = |e: std::io::Error| {
        if e.kind() == ErrorKind::UnexpectedEof {
            Error::TruncatedFile { path: path.into() }
        } else {
            Error::Io(e)
        }
    };

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(truncated)?;
    if magic != MAGIC {
        return Err(Error::BadMagic { path: path.into() });
    }

    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4).map_err(truncated)?;
    let nx = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4).map_err(truncated)?;
    let ny = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8).map_err(truncated)?;
    let x = f64::from_le_bytes(b8);
    r.read_exact(&mut b8).map_err(truncated)?;
    let y = f64::from_le_bytes(b8);
    let grid = GridSpec::new(x, y, nx, ny)?;

    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut b8).map_err(truncated)?;
        values.push(f64::from_le_bytes(b8));
    }
    Field::from_values(grid, values)
}

/// Read a snapshot that must live on a specific grid.
pub fn read_snapshot_expecting(path: &Path, grid: &GridSpec) -> Result<Field> {
    let phi = read_snapshot(path)?;
    if phi.grid() != grid {
        return Err(Error::GridMismatch {
            expected: format!("{grid:?}"),
            found: format!("{:?}", phi.grid()),
        });
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bitwise_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.bin");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for trial in 0..1000 {
            let g = GridSpec::new(
                rng.random_range(0.5..2.0),
                rng.random_range(0.5..2.0),
                8,
                4,
            )
            .unwrap();
            let phi = Field::from_values(
                g,
                (0..g.len()).map(|_| rng.random_range(-1e6..1e6)).collect(),
            )
            .unwrap();
            write_snapshot(&phi, &path).unwrap();
            let back = read_snapshot(&path).unwrap();
            assert_eq!(back.grid(), phi.grid(), "trial {trial}");
            for (a, b) in phi.values().iter().zip(back.values()) {
                assert_eq!(a.to_bits(), b.to_bits(), "trial {trial}");
            }
        }
    }

    #[test]
    fn file_size_matches_format_arithmetic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.bin");
        let g = GridSpec::square(4).unwrap();
        write_snapshot(&Field::constant(g, 1.0), &path).unwrap();
        // 8 magic + 4 + 4 dims + 8 + 8 half-widths + 16 values * 8
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 160);
    }

    #[test]
    fn corrupted_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        let g = GridSpec::square(4).unwrap();
        write_snapshot(&Field::constant(g, 1.0), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] ^= 0xff;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn truncated_file_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cut.bin");
        let g = GridSpec::square(4).unwrap();
        write_snapshot(&Field::constant(g, 1.0), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        assert!(matches!(
            read_snapshot(&path),
            Err(Error::TruncatedFile { .. })
        ));
    }

    #[test]
    fn grid_mismatch_on_expected_grid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        let g = GridSpec::square(8).unwrap();
        write_snapshot(&Field::constant(g, 0.5), &path).unwrap();
        let other = GridSpec::square(16).unwrap();
        assert!(matches!(
            read_snapshot_expecting(&path, &other),
            Err(Error::GridMismatch { .. })
        ));
        assert!(read_snapshot_expecting(&path, &g).is_ok());
    }
}
