//! Small numeric helpers shared by the modules: `e(x)`, accurate fractional
//! parts of products, and compensated summation.

use num_complex::Complex64;

pub const TAU: f64 = core::f64::consts::TAU;

/// Largest integer every double represents exactly.
pub const MAX_EXACT_INT: i64 = 1 << 53;

/// `x - round(x)`, in `[-1/2, 1/2]`. Symmetric under `x -> -x`.
#[inline]
pub fn wrap_half(x: f64) -> f64 {
    x - libm::round(x)
}

/// Canonical representative of `x mod 1` in `[-1/2, 1/2)`.
#[inline]
pub fn reduce_torus(x: f64) -> f64 {
    let y = x - libm::floor(x + 0.5);
    if y >= 0.5 {
        y - 1.0
    } else {
        y
    }
}

/// Representative of `x mod 1` in `[0, 1)`.
#[inline]
pub fn reduce_unit(x: f64) -> f64 {
    let y = x - libm::floor(x);
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// `xi·k mod 1` in `[-1/2, 1/2]`, using the exact product error so that large
/// `k` do not lose the fractional digits.
#[inline]
pub fn frac_mul(xi: f64, k: i64) -> f64 {
    let kf = k as f64;
    let p = xi * kf;
    let err = libm::fma(xi, kf, -p);
    wrap_half(wrap_half(p) + err)
}

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let y = wrap_half(x);
    Complex64::new(libm::cos(TAU * y), libm::sin(TAU * y))
}

/// Neumaier-compensated sum of doubles.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated sum of complex numbers, componentwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

/// Least-squares slope of `ln y` against `ln x`, over pairs with both positive.
/// `None` when fewer than two usable points remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: alloc::vec::Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (libm::log(*x), libm::log(*y)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reductions() {
        assert_eq!(reduce_torus(0.5), -0.5);
        assert_eq!(reduce_torus(-0.5), -0.5);
        assert_eq!(reduce_torus(1.25), 0.25);
        assert_eq!(reduce_unit(-0.25), 0.75);
        assert_eq!(wrap_half(-0.7), wrap_half(0.7) * -1.0);
    }

    #[test]
    fn frac_mul_keeps_digits_for_large_k() {
        // 0.1 is not exact; compare against the exact rational product of the
        // double nearest 0.1 with k, computed in i128 arithmetic.
        let xi = 0.1f64;
        let bits = xi.to_bits();
        let mant = ((bits & ((1u64 << 52) - 1)) | (1u64 << 52)) as i128;
        let exp = ((bits >> 52) & 0x7ff) as i32 - 1075; // xi = mant·2^exp
        let k: i64 = (1 << 40) + 12345;
        let num = mant * k as i128; // xi·k = num·2^exp
        let den = 1i128 << (-exp);
        let rem = num.rem_euclid(den);
        let exact = rem as f64 / den as f64;
        let got = frac_mul(xi, k);
        let diff = wrap_half(got - exact);
        assert!(diff.abs() < 1e-15, "{got} vs {exact}");
    }

    #[test]
    fn e_is_odd_in_imaginary_part() {
        for &x in &[0.1, 0.37, 0.5, 123.456] {
            let a = e(x);
            let b = e(-x);
            assert_eq!(a.re, b.re);
            assert_eq!(a.im, -b.im);
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s = compensated_sum([1e16, 1.0, -1e16, 1.0]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: alloc::vec::Vec<f64> = xs.iter().map(|x: &f64| x.powf(-2.5)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 2.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&[1.0], &[1.0]), None);
    }
}
