//! Radix-2 complex FFT, in place, and its tensor-product extension to
//! row-major multidimensional arrays.
//!
//! Forward transform: `X_k = Σ_x x_x e(−kx/n)`. The inverse uses `e(+kx/n)`
//! and divides by `n`.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{Error, Result};

fn bit_reverse_permute(buf: &mut [Complex64]) {
    let n = buf.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
}

/// One-dimensional transform of a power-of-two length buffer.
pub fn fft(buf: &mut [Complex64], inverse: bool) -> Result<()> {
    let n = buf.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument("FFT length must be a power of two"));
    }
    bit_reverse_permute(buf);
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        // twiddles computed directly rather than by recurrence, to keep the
        // error at a few ulp for long transforms
        let tw: Vec<Complex64> = (0..half)
            .map(|k| {
                let ang = sign * core::f64::consts::TAU * k as f64 / len as f64;
                Complex64::new(libm::cos(ang), libm::sin(ang))
            })
            .collect();
        for chunk in buf.chunks_mut(len) {
            let (a, b) = chunk.split_at_mut(half);
            for k in 0..half {
                let t = b[k] * tw[k];
                b[k] = a[k] - t;
                a[k] += t;
            }
        }
        len <<= 1;
    }
    if inverse {
        let s = 1.0 / n as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }
    Ok(())
}

/// Transform along every axis of a row-major array with the given shape.
pub fn fft_nd(buf: &mut [Complex64], shape: &[usize], inverse: bool) -> Result<()> {
    let total: usize = shape.iter().product();
    if total != buf.len() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: buf.len(),
        });
    }
    let mut stride = 1usize;
    let mut scratch = Vec::new();
    for &len in shape.iter().rev() {
        if len > 1 {
            scratch.resize(len, Complex64::new(0.0, 0.0));
            let block = len * stride;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    for k in 0..len {
                        scratch[k] = buf[outer + inner + k * stride];
                    }
                    fft(&mut scratch, inverse)?;
                    for k in 0..len {
                        buf[outer + inner + k * stride] = scratch[k];
                    }
                }
            }
        } else if len == 0 {
            return Err(Error::InvalidArgument("empty axis"));
        }
        stride *= len;
    }
    Ok(())
}
