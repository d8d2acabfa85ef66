//! Finitely supported complex functions on `Z^m`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::CompensatedSum;
use crate::{Error, Result};

/// Values on the box `∏ [lo_i, lo_i + shape_i)`, row-major with the last
/// coordinate fastest. Zero outside the box.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeFunction {
    lo: Vec<i64>,
    shape: Vec<usize>,
    values: Vec<Complex64>,
}

impl LatticeFunction {
    pub fn new(lo: Vec<i64>, shape: Vec<usize>, values: Vec<Complex64>) -> Result<Self> {
        if lo.len() != shape.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: shape.len(),
            });
        }
        if shape.contains(&0) {
            return Err(Error::InvalidArgument("box sides must be positive"));
        }
        let total: usize = shape.iter().product();
        if total != values.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: values.len(),
            });
        }
        Ok(Self { lo, shape, values })
    }

    pub fn zeros(lo: Vec<i64>, shape: Vec<usize>) -> Result<Self> {
        let total = shape.iter().product();
        Self::new(lo, shape, vec![Complex64::new(0.0, 0.0); total])
    }

    /// Unit mass at `x`.
    pub fn delta(x: &[i64]) -> Self {
        Self {
            lo: x.to_vec(),
            shape: vec![1; x.len()],
            values: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Row-major offset of `x` inside the box.
    pub fn offset(&self, x: &[i64]) -> Option<usize> {
        if x.len() != self.lo.len() {
            return None;
        }
        let mut off = 0usize;
        for ((&xi, &lo), &len) in x.iter().zip(&self.lo).zip(&self.shape) {
            let d = xi.checked_sub(lo)?;
            if d < 0 || d as u64 >= len as u64 {
                return None;
            }
            off = off * len + d as usize;
        }
        Some(off)
    }

    /// Lattice point at a row-major offset.
    pub fn point(&self, mut offset: usize) -> Vec<i64> {
        let mut x = vec![0i64; self.dim()];
        for i in (0..self.dim()).rev() {
            x[i] = self.lo[i] + (offset % self.shape[i]) as i64;
            offset /= self.shape[i];
        }
        x
    }

    pub fn get(&self, x: &[i64]) -> Complex64 {
        self.offset(x).map_or(Complex64::new(0.0, 0.0), |o| self.values[o])
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for v in &self.values {
            acc.add(v.norm_sqr());
        }
        acc.value()
    }

    pub fn norm_l2(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    /// `Σ_x f(x)·conj(g(x))` over the union of the two boxes.
    pub fn inner(&self, other: &LatticeFunction) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (o, v) in self.values.iter().enumerate() {
            let w = other.get(&self.point(o));
            let z = v * w.conj();
            re.add(z.re);
            im.add(z.im);
        }
        Complex64::new(re.value(), im.value())
    }
}
