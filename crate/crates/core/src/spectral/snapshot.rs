//! Binary snapshot format for fields and trajectories.
//!
//! Field snapshot (all integers and floats little-endian):
//!
//! | offset | size | content                                       |
//! |--------|------|-----------------------------------------------|
//! | 0      | 8    | magic `b"NSFFIELD"`                           |
//! | 8      | 4    | format version (u32, currently 1)             |
//! | 12     | 4    | points per axis `n` (u32)                     |
//! | 16     | 8    | box length (f64)                              |
//! | 24     | 1    | precision: 8 = complex64 (2×f32), 16 = complex128 (2×f64) |
//! | 25     | 1    | divergence-free flag (0/1)                    |
//! | 26     | 2    | reserved, zero                                |
//! | 28     | ...  | `3 n^3` complex values `(re, im)`, component-major, each component in flat `(ix*n+iy)*n+iz` FFT order |
//!
//! Trajectory file: magic `b"NSFTRAJ1"`, version (u32), sample count `m`
//! (u32), `m` times (f64), then `m` field snapshots back to back.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use super::trajectory::Trajectory;
use crate::{Error, Result};

pub const FIELD_MAGIC: &[u8; 8] = b"NSFFIELD";
pub const TRAJECTORY_MAGIC: &[u8; 8] = b"NSFTRAJ1";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Complex64,
    Complex128,
}

impl Precision {
    fn tag(self) -> u8 {
        match self {
            Precision::Complex64 => 8,
            Precision::Complex128 => 16,
        }
    }
}

pub fn write_field<W: Write>(w: &mut W, u: &SpectralField, precision: Precision) -> Result<()> {
    let g = u.grid();
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.box_length().to_le_bytes())?;
    w.write_all(&[precision.tag(), u.is_divfree() as u8, 0, 0])?;
    let mut buf = Vec::with_capacity(3 * g.len() * 16);
    for c in u.components() {
        for z in c {
            match precision {
                Precision::Complex64 => {
                    buf.extend_from_slice(&(z.re as f32).to_le_bytes());
                    buf.extend_from_slice(&(z.im as f32).to_le_bytes());
                }
                Precision::Complex128 => {
                    buf.extend_from_slice(&z.re.to_le_bytes());
                    buf.extend_from_slice(&z.im.to_le_bytes());
                }
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| Error::Snapshot(format!("truncated header: {e}")))?;
    Ok(b)
}

pub fn read_field<R: Read>(r: &mut R) -> Result<SpectralField> {
    let magic: [u8; 8] = read_array(r)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Snapshot("bad field magic".into()));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != FORMAT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(read_array(r)?) as usize;
    let box_length = f64::from_le_bytes(read_array(r)?);
    let grid = Grid::new(n, box_length).map_err(|e| Error::Snapshot(e.to_string()))?;
    let flags: [u8; 4] = read_array(r)?;
    let width = match flags[0] {
        8 => 4,
        16 => 8,
        t => return Err(Error::Snapshot(format!("unknown precision tag {t}"))),
    };
    let mut raw = vec![0u8; 3 * grid.len() * 2 * width];
    r.read_exact(&mut raw)
        .map_err(|e| Error::Snapshot(format!("truncated coefficients: {e}")))?;
    let value = |i: usize| -> f64 {
        let s = &raw[i * width..(i + 1) * width];
        if width == 4 {
            f32::from_le_bytes(s.try_into().unwrap()) as f64
        } else {
            f64::from_le_bytes(s.try_into().unwrap())
        }
    };
    let comps = [0, 1, 2].map(|a| {
        (0..grid.len())
            .map(|idx| {
                let base = 2 * (a * grid.len() + idx);
                Complex64::new(value(base), value(base + 1))
            })
            .collect()
    });
    Ok(SpectralField::from_components(grid, comps, flags[1] != 0))
}

pub fn write_trajectory<W: Write>(
    w: &mut W,
    traj: &Trajectory,
    precision: Precision,
) -> Result<()> {
    w.write_all(TRAJECTORY_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(traj.len() as u32).to_le_bytes())?;
    for t in traj.times() {
        w.write_all(&t.to_le_bytes())?;
    }
    for s in traj.states() {
        write_field(w, s, precision)?;
    }
    Ok(())
}

pub fn read_trajectory<R: Read>(r: &mut R) -> Result<Trajectory> {
    let magic: [u8; 8] = read_array(r)?;
    if &magic != TRAJECTORY_MAGIC {
        return Err(Error::Snapshot("bad trajectory magic".into()));
    }
    let version = u32::from_le_bytes(read_array(r)?);
    if version != FORMAT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let m = u32::from_le_bytes(read_array(r)?) as usize;
    let times = (0..m)
        .map(|_| read_array::<8, _>(r).map(f64::from_le_bytes))
        .collect::<Result<Vec<_>>>()?;
    let states = (0..m).map(|_| read_field(r)).collect::<Result<Vec<_>>>()?;
    Trajectory::new(times, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::recipes::random_divfree;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn field_round_trip(seed in 0u64..1000, len in 0.5f64..20.0) {
            let g = Grid::new(8, len).unwrap();
            let u = random_divfree(&g, 0.0, f64::INFINITY, 0.5, seed, false);
            let mut bytes = Vec::new();
            write_field(&mut bytes, &u, Precision::Complex128).unwrap();
            prop_assert_eq!(bytes.len(), 28 + 3 * g.len() * 16);
            let back = read_field(&mut bytes.as_slice()).unwrap();
            prop_assert_eq!(&back, &u);

            let mut small = Vec::new();
            write_field(&mut small, &u, Precision::Complex64).unwrap();
            let lossy = read_field(&mut small.as_slice()).unwrap();
            prop_assert!(lossy.max_abs_diff(&u) <= 1e-6 * u.max_coefficient());
        }
    }

    #[test]
    fn header_layout_and_rejections() {
        let g = Grid::new(8, 2.0).unwrap();
        let u = SpectralField::zeros(g);
        let mut bytes = Vec::new();
        write_field(&mut bytes, &u, Precision::Complex64).unwrap();
        assert_eq!(&bytes[..8], FIELD_MAGIC);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2.0);
        assert_eq!(bytes[24], 8);
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_field(&mut bad.as_slice()).is_err());
        assert!(read_field(&mut &bytes[..100]).is_err());
    }

    #[test]
    fn trajectory_round_trip() {
        let g = Grid::new(8, 1.0).unwrap();
        let a = random_divfree(&g, 0.0, 40.0, 0.0, 1, true);
        let t = Trajectory::new(vec![0.0, 0.5], vec![a.clone(), a.scaled(0.5)]).unwrap();
        let mut bytes = Vec::new();
        write_trajectory(&mut bytes, &t, Precision::Complex128).unwrap();
        let back = read_trajectory(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, t);
    }
}
