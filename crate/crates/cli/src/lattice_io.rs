//! Binary lattice-function files.
//!
//! Layout, all little-endian: `u32 m`, then `m` pairs `(i64 lo, i64 hi)` with
//! `hi` exclusive, then the values row-major (last coordinate fastest) as
//! `(f64 re, f64 im)`.

use std::fmt;
use std::path::Path;

use he_core::lattice::LatticeFunction;
use num_complex::Complex64;

#[derive(Debug)]
pub enum LatticeIoError {
    Io(std::io::Error),
    Truncated { needed: usize, found: usize },
    TrailingBytes(usize),
    BadBox { axis: usize, lo: i64, hi: i64 },
    TooLarge,
    Invalid(he_core::Error),
}

impl fmt::Display for LatticeIoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(e) => write!(f, "{e}"),
            Self::Truncated { needed, found } => write!(f, "lattice file truncated: need {needed} bytes, have {found}"),
            Self::TrailingBytes(n) => write!(f, "lattice file has {n} trailing bytes"),
            Self::BadBox { axis, lo, hi } => write!(f, "empty box on axis {axis}: [{lo}, {hi})"),
            Self::TooLarge => write!(f, "lattice box too large"),
            Self::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LatticeIoError {}

impl From<std::io::Error> for LatticeIoError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

pub fn encode(f: &LatticeFunction) -> Vec<u8> {
    let m = f.dim();
    let mut out = Vec::with_capacity(4 + 16 * m + 16 * f.values().len());
    out.extend_from_slice(&(m as u32).to_le_bytes());
    for (&lo, &len) in f.lo().iter().zip(f.shape()) {
        out.extend_from_slice(&lo.to_le_bytes());
        out.extend_from_slice(&(lo + len as i64).to_le_bytes());
    }
    for z in f.values() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const K: usize>(&mut self) -> Result<[u8; K], LatticeIoError> {
        let end = self.pos + K;
        if end > self.bytes.len() {
            return Err(LatticeIoError::Truncated {
                needed: end,
                found: self.bytes.len(),
            });
        }
        let mut b = [0u8; K];
        b.copy_from_slice(&self.bytes[self.pos..end]);
        self.pos = end;
        Ok(b)
    }
}

pub fn decode(bytes: &[u8]) -> Result<LatticeFunction, LatticeIoError> {
    let mut r = Reader { bytes, pos: 0 };
    let m = u32::from_le_bytes(r.take()?) as usize;
    if m == 0 || m > 64 {
        return Err(LatticeIoError::Invalid(he_core::Error::InvalidArgument(
            "lattice dimension must be in 1..=64",
        )));
    }
    let mut lo = Vec::with_capacity(m);
    let mut shape = Vec::with_capacity(m);
    let mut total = 1usize;
    for axis in 0..m {
        let a = i64::from_le_bytes(r.take()?);
        let b = i64::from_le_bytes(r.take()?);
        let len = b
            .checked_sub(a)
            .filter(|l| *l > 0)
            .ok_or(LatticeIoError::BadBox { axis, lo: a, hi: b })?;
        let len = usize::try_from(len).map_err(|_| LatticeIoError::TooLarge)?;
        total = total.checked_mul(len).ok_or(LatticeIoError::TooLarge)?;
        lo.push(a);
        shape.push(len);
    }
    let needed = total
        .checked_mul(16)
        .and_then(|v| v.checked_add(r.pos))
        .ok_or(LatticeIoError::TooLarge)?;
    if bytes.len() < needed {
        return Err(LatticeIoError::Truncated {
            needed,
            found: bytes.len(),
        });
    }
    if bytes.len() > needed {
        return Err(LatticeIoError::TrailingBytes(bytes.len() - needed));
    }
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        let re = f64::from_le_bytes(r.take()?);
        let im = f64::from_le_bytes(r.take()?);
        values.push(Complex64::new(re, im));
    }
    LatticeFunction::new(lo, shape, values).map_err(LatticeIoError::Invalid)
}

pub fn load(path: &Path) -> Result<LatticeFunction, LatticeIoError> {
    decode(&std::fs::read(path)?)
}

pub fn store(path: &Path, f: &LatticeFunction) -> Result<(), LatticeIoError> {
    Ok(std::fs::write(path, encode(f))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LatticeFunction {
        let vals = (0..6)
            .map(|i| Complex64::new(i as f64 * 0.1, -(i as f64) / 3.0))
            .collect();
        LatticeFunction::new(vec![-1, 7], vec![2, 3], vals).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let f = sample();
        let bytes = encode(&f);
        assert_eq!(bytes.len(), 4 + 32 + 96);
        assert_eq!(decode(&bytes).unwrap(), f);
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&sample());
        assert_eq!(&bytes[..4], &2u32.to_le_bytes());
        assert_eq!(&bytes[4..12], &(-1i64).to_le_bytes());
        assert_eq!(&bytes[12..20], &1i64.to_le_bytes());
        assert_eq!(&bytes[28..36], &10i64.to_le_bytes());
    }

    #[test]
    fn rejects_malformed() {
        let bytes = encode(&sample());
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(LatticeIoError::Truncated { .. })
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(decode(&extra), Err(LatticeIoError::TrailingBytes(1))));
        let mut bad = bytes;
        bad[12..20].copy_from_slice(&(-1i64).to_le_bytes());
        assert!(matches!(decode(&bad), Err(LatticeIoError::BadBox { axis: 0, .. })));
        assert!(decode(&[0, 0, 0, 0]).is_err());
    }
}
