//! Binary matrix container: `b"RMT1"`, `beta` as one byte, `N` as a
//! little-endian `u64`, then the `N x N` entries row-major as little-endian
//! `f64` (complex entries as `re, im` pairs).

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{Beta, Dense, HermitianMatrix};

pub const MAGIC: &[u8; 4] = b"RMT1";

pub fn write_container<W: Write>(mut w: W, m: &HermitianMatrix) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[m.beta().as_u8()])?;
    w.write_all(&(m.dim() as u64).to_le_bytes())?;
    match m {
        HermitianMatrix::Real(d) => {
            for v in d.as_slice() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        HermitianMatrix::Complex(d) => {
            for v in d.as_slice() {
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn read_container<R: Read>(mut r: R) -> Result<HermitianMatrix> {
    let mut head = [0u8; 13];
    r.read_exact(&mut head).map_err(|e| Error::Container(format!("truncated header: {e}")))?;
    if &head[..4] != MAGIC {
        return Err(Error::Container("bad magic".into()));
    }
    let beta = Beta::try_from(head[4]).map_err(|_| Error::Container(format!("bad beta byte {}", head[4])))?;
    let n = u64::from_le_bytes(head[5..13].try_into().unwrap()) as usize;
    if n == 0 || n > 1 << 16 {
        return Err(Error::Container(format!("implausible dimension {n}")));
    }
    let per = if beta == Beta::Real { 1 } else { 2 };
    let mut buf = vec![0u8; n * n * per * 8];
    r.read_exact(&mut buf).map_err(|e| Error::Container(format!("truncated payload: {e}")))?;
    let vals: Vec<f64> = buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let m = match beta {
        Beta::Real => HermitianMatrix::Real(Dense::from_row_major(n, vals)?),
        Beta::Complex => HermitianMatrix::Complex(Dense::from_row_major(
            n,
            vals.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect(),
        )?),
    };
    Ok(m)
}

pub fn write_container_file(path: &Path, m: &HermitianMatrix) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_container(f, m)
}

pub fn read_container_file(path: &Path) -> Result<HermitianMatrix> {
    read_container(std::io::BufReader::new(std::fs::File::open(path)?))
}

/// Debug CSV: `i,j,re,im`, one line per entry.
pub fn write_csv<W: Write>(mut w: W, m: &HermitianMatrix) -> Result<()> {
    writeln!(w, "i,j,re,im")?;
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let v = m.entry(i, j);
            writeln!(w, "{i},{j},{:e},{:e}", v.re, v.im)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::sample_gaussian;

    #[test]
    fn roundtrip_is_bit_exact() {
        for beta in [Beta::Real, Beta::Complex] {
            let m = sample_gaussian(beta, 5, 9).unwrap();
            let mut buf = Vec::new();
            write_container(&mut buf, &m).unwrap();
            assert_eq!(buf.len(), 13 + 25 * 8 * beta.as_u8() as usize);
            assert_eq!(read_container(buf.as_slice()).unwrap(), m);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(read_container(&b"RMT2\x01"[..]), Err(Error::Container(_))));
        let mut buf = Vec::new();
        write_container(&mut buf, &sample_gaussian(Beta::Real, 3, 1).unwrap()).unwrap();
        buf.truncate(buf.len() - 1);
        assert!(matches!(read_container(buf.as_slice()), Err(Error::Container(_))));
    }
}
