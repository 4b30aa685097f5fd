//! Field snapshots.
//!
//! Binary layout, little-endian: `u32 dim`, `u32 points`, `f64 box_length`,
//! `u32 space` (0 physical, 1 frequency), then `points^dim` pairs of `f64`
//! (re, im) in row-major order.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{Field, Space, SpectralGrid};
use crate::error::{Error, Result};

pub fn write_snapshot(f: &Field, mut w: impl Write) -> Result<()> {
    let g = f.grid;
    let mut buf = Vec::with_capacity(20 + 16 * f.values.len());
    buf.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(g.points() as u32).to_le_bytes());
    buf.extend_from_slice(&g.box_length().to_le_bytes());
    let flag: u32 = match f.space {
        Space::Physical => 0,
        Space::Frequency => 1,
    };
    buf.extend_from_slice(&flag.to_le_bytes());
    for v in &f.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot(mut r: impl Read) -> Result<Field> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 20 {
        return Err(Error::Io("snapshot header truncated".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let dim = u32_at(0) as usize;
    let points = u32_at(4) as usize;
    let box_length = f64_at(8);
    let space = match u32_at(16) {
        0 => Space::Physical,
        1 => Space::Frequency,
        s => return Err(Error::Io(format!("unknown space flag {s}"))),
    };
    let grid = SpectralGrid::new(dim, box_length, points)?;
    if bytes.len() != 20 + 16 * grid.len() {
        return Err(Error::Io(format!(
            "snapshot has {} bytes, expected {}",
            bytes.len(),
            20 + 16 * grid.len()
        )));
    }
    let values = bytes[20..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Field::from_values(grid, values, space)
}

/// CSV with columns x (x1,x2 in 2-D), re, im, abs.
pub fn write_csv(f: &Field, mut w: impl Write) -> Result<()> {
    let g = f.grid;
    let axis = g.axis();
    let n = g.points();
    let mut out = String::new();
    if g.dim() == 1 {
        out.push_str("x,re,im,abs\n");
    } else {
        out.push_str("x1,x2,re,im,abs\n");
    }
    for (idx, v) in f.values.iter().enumerate() {
        if g.dim() == 1 {
            out.push_str(&format!("{},", axis[idx]));
        } else {
            out.push_str(&format!("{},{},", axis[idx / n], axis[idx % n]));
        }
        out.push_str(&format!("{},{},{}\n", v.re, v.im, v.norm()));
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip() {
        let g = SpectralGrid::new(2, 7.5, 8).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0], -x[1] * 0.3));
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 20 + 16 * 64);
        let back = read_snapshot(&buf[..]).unwrap();
        assert_eq!(back, f);
        assert!(read_snapshot(&buf[..30]).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = SpectralGrid::new(1, 1.0, 8).unwrap();
        let f = Field::from_fn(g, |_| Complex64::new(3.0, 4.0));
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "x,re,im,abs");
        assert_eq!(lines[1], "-0.5,3,4,5");
    }
}
