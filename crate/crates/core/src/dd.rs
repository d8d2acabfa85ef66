//! Double-double arithmetic (about 32 significant digits), used only to settle
//! floors that land within rounding distance of an integer.

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: 0.6931471805599453,
    lo: 2.3190468138462996e-17,
};
const LOG2E: Dd = Dd {
    hi: 1.4426950408889634,
    lo: 2.0355273740931033e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self.sub(Dd::from_f64(b).mul_f64(q1));
        let q2 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    /// `exp(self)`.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        const SQUARINGS: i32 = 10;
        let k = libm::round(self.hi / LN2.hi);
        let r = self.sub(LN2.mul_f64(k));
        let r = r.mul_f64(libm::ldexp(1.0, -SQUARINGS));
        // expm1 by Taylor series; |r| < 4e-4 so 12 terms are far past 1e-32.
        let mut term = r;
        let mut sum = r;
        for i in 2..=12 {
            term = term.mul(r).div_f64(i as f64);
            sum = sum.add(term);
        }
        // (1 + s)^2 - 1 = 2s + s^2 keeps the small part accurate.
        for _ in 0..SQUARINGS {
            sum = sum.mul_f64(2.0).add(sum.mul(sum));
        }
        let v = sum.add(Dd::ONE);
        let scale = libm::ldexp(1.0, k as i32);
        Dd {
            hi: v.hi * scale,
            lo: v.lo * scale,
        }
    }

    /// Natural logarithm of a positive value: one Newton step on the double
    /// estimate.
    pub fn ln(self) -> Dd {
        let y = Dd::from_f64(libm::log(self.hi));
        y.add(self.mul(y.neg().exp())).sub(Dd::ONE)
    }

    pub fn log2(self) -> Dd {
        self.ln().mul(LOG2E)
    }

    /// `self^p` for positive `self`.
    pub fn powf(self, p: f64) -> Dd {
        if p == 0.0 {
            return Dd::ONE;
        }
        self.ln().mul_f64(p).exp()
    }

    pub fn floor(self) -> f64 {
        let f = libm::floor(self.hi);
        if f == self.hi {
            f + libm::floor(self.lo)
        } else {
            f
        }
    }

    /// Distance to the nearest integer, in units of the value.
    pub fn integer_gap(self) -> f64 {
        let r = libm::round(self.hi);
        libm::fabs((self.hi - r) + self.lo)
    }
}
