//! Hardy-field functions represented as finite sums of monomials
//! `a·t^c·(log₂ t)^b`.
//!
//! Evaluation is defined for `t ≥ 2`, where `log₂ t ≥ 1`. At `t = 1` a
//! monomial takes its limiting value: `0` for `b > 0`, `a` for `b = 0`, and is
//! undefined for `b < 0`.

mod parse;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::dd::Dd;
use crate::math::{CompensatedSum, MAX_EXACT_INT};
use crate::{Error, Result};

const LN_2: f64 = core::f64::consts::LN_2;

/// Floors closer than this to an integer are re-derived at higher precision.
const FLOOR_GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyMonomial {
    coef: f64,
    power: f64,
    logpower: f64,
}

impl HardyMonomial {
    pub fn new(coef: f64, power: f64, logpower: f64) -> Result<Self> {
        if coef == 0.0 || !coef.is_finite() {
            return Err(Error::InvalidArgument(
                "monomial coefficient must be finite and nonzero",
            ));
        }
        if !power.is_finite() || !logpower.is_finite() {
            return Err(Error::InvalidArgument("monomial exponents must be finite"));
        }
        Ok(Self { coef, power, logpower })
    }

    pub fn coef(&self) -> f64 {
        self.coef
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn logpower(&self) -> f64 {
        self.logpower
    }

    /// True for `a·t^k` with `k` a nonnegative integer.
    pub fn is_polynomial(&self) -> bool {
        self.logpower == 0.0 && self.power >= 0.0 && self.power == libm::round(self.power)
    }

    #[inline]
    fn eval_unchecked(&self, t: f64) -> f64 {
        let mut v = self.coef;
        if self.power != 0.0 {
            v *= libm::pow(t, self.power);
        }
        if self.logpower != 0.0 {
            v *= libm::pow(libm::log2(t), self.logpower);
        }
        v
    }

    fn value_at_one(&self) -> Result<f64> {
        match self.logpower.partial_cmp(&0.0) {
            Some(Ordering::Greater) => Ok(0.0),
            Some(Ordering::Equal) => Ok(self.coef),
            _ => Err(Error::Domain {
                what: "negative log power is singular at t = 1",
                value: self.logpower,
            }),
        }
    }

    fn eval_dd(&self, t: f64) -> Dd {
        let tt = Dd::from_f64(t);
        let mut v = Dd::from_f64(self.coef);
        if self.power != 0.0 {
            v = v.mul(tt.powf(self.power));
        }
        if self.logpower != 0.0 {
            v = v.mul(tt.log2().powf(self.logpower));
        }
        v
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        other
            .power
            .total_cmp(&self.power)
            .then(other.logpower.total_cmp(&self.logpower))
    }
}

impl fmt::Display for HardyMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*t^{}", self.coef, self.power)?;
        if self.logpower != 0.0 {
            write!(f, "*log^{}", self.logpower)?;
        }
        Ok(())
    }
}

/// Finite sum of monomials, sorted by `(power, logpower)` descending with no
/// repeated exponent pair. The first monomial is the leading one.
///
/// The only way to obtain the zero function is by differentiating; every
/// constructor rejects it.
#[derive(Clone, Debug, PartialEq)]
pub struct HardyFunction {
    monomials: Vec<HardyMonomial>,
}

impl HardyFunction {
    pub fn new(monomials: Vec<HardyMonomial>) -> Result<Self> {
        let f = Self::normalized(monomials);
        if f.is_zero() {
            return Err(Error::InvalidArgument(
                "a Hardy function needs at least one nonzero monomial",
            ));
        }
        Ok(f)
    }

    /// `coef·t^power·(log₂ t)^logpower`.
    pub fn monomial(coef: f64, power: f64, logpower: f64) -> Result<Self> {
        Ok(Self {
            monomials: alloc::vec![HardyMonomial::new(coef, power, logpower)?],
        })
    }

    /// `t^power`.
    pub fn power(power: f64) -> Result<Self> {
        Self::monomial(1.0, power, 0.0)
    }

    fn normalized(mut monomials: Vec<HardyMonomial>) -> Self {
        monomials.sort_by(|a, b| a.key_cmp(b));
        let mut out: Vec<HardyMonomial> = Vec::with_capacity(monomials.len());
        for m in monomials {
            match out.last_mut() {
                Some(last) if last.power == m.power && last.logpower == m.logpower => {
                    last.coef += m.coef;
                }
                _ => out.push(m),
            }
        }
        out.retain(|m| m.coef != 0.0);
        Self { monomials: out }
    }

    pub fn monomials(&self) -> &[HardyMonomial] {
        &self.monomials
    }

    pub fn leading(&self) -> Option<&HardyMonomial> {
        self.monomials.first()
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// `P(t)` for `t ≥ 2`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 2.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "evaluation requires t >= 2",
                value: t,
            });
        }
        Ok(self.eval_unchecked(t))
    }

    /// Like [`eval`](Self::eval) but also accepts `1 ≤ t < 2`, using the
    /// limiting value at `t = 1`.
    pub fn eval_extended(&self, t: f64) -> Result<f64> {
        if t == 1.0 {
            self.value_at_one()
        } else if t > 1.0 && t.is_finite() {
            Ok(self.eval_unchecked(t))
        } else {
            Err(Error::Domain {
                what: "evaluation requires t >= 1",
                value: t,
            })
        }
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for m in &self.monomials {
            acc.add(m.eval_unchecked(t));
        }
        acc.value()
    }

    pub fn value_at_one(&self) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for m in &self.monomials {
            acc.add(m.value_at_one()?);
        }
        Ok(acc.value())
    }

    /// Symbolic derivative of the given order, using
    /// `d/dt[t^a L^b] = a·t^{a−1} L^b + (b/ln 2)·t^{a−1} L^{b−1}` with `L = log₂ t`.
    pub fn derivative(&self, order: u32) -> HardyFunction {
        let mut cur = self.clone();
        for _ in 0..order {
            let mut next = Vec::with_capacity(2 * cur.monomials.len());
            for m in &cur.monomials {
                if m.power != 0.0 {
                    next.push(HardyMonomial {
                        coef: m.coef * m.power,
                        power: m.power - 1.0,
                        logpower: m.logpower,
                    });
                }
                if m.logpower != 0.0 {
                    next.push(HardyMonomial {
                        coef: m.coef * m.logpower / LN_2,
                        power: m.power - 1.0,
                        logpower: m.logpower - 1.0,
                    });
                }
            }
            cur = Self::normalized(next);
        }
        cur
    }

    /// Growth type `τ(P)`: the power of the leading monomial. Logarithmic
    /// factors do not change it. The zero function has type `-∞`.
    pub fn growth_type(&self) -> f64 {
        self.leading().map_or(f64::NEG_INFINITY, |m| m.power)
    }

    /// A point `t₀ ≥ 2` past which the leading monomial strictly dominates the
    /// sum of the others, so `P` has the sign of its leading coefficient on
    /// `[t₀, ∞)`.
    pub fn sign_threshold(&self) -> f64 {
        let Some(lead) = self.leading() else {
            return f64::INFINITY;
        };
        let rest = &self.monomials[1..];
        let mut t: f64 = 2.0;
        for _ in 0..2048 {
            let l = libm::log2(t);
            // ratio_k(t) = |a_k/a_0| t^{c_k-c_0} L^{b_k-b_0} decreases on [t, ∞)
            // once (c_0-c_k)·ln t > b_k-b_0.
            let decreasing = rest
                .iter()
                .all(|m| (lead.power - m.power) * libm::log(t) > m.logpower - lead.logpower);
            let total: f64 = rest
                .iter()
                .map(|m| {
                    libm::fabs(m.coef / lead.coef)
                        * libm::pow(t, m.power - lead.power)
                        * libm::pow(l, m.logpower - lead.logpower)
                })
                .sum();
            if decreasing && total < 1.0 {
                return t;
            }
            t *= 2.0;
            if !t.is_finite() {
                break;
            }
        }
        f64::INFINITY
    }

    /// `⌊P(n)⌋`, exact for representable inputs. `n = 1` uses the limiting
    /// value.
    pub fn floor_at(&self, n: u64) -> Result<i64> {
        if n == 0 {
            return Err(Error::Domain {
                what: "orbit index must be >= 1",
                value: 0.0,
            });
        }
        if n == 1 {
            return self.checked_floor(libm::floor(self.value_at_one()?), n);
        }
        let t = n as f64;
        let v = self.eval_unchecked(t);
        let magnitude: f64 = self.monomials.iter().map(|m| libm::fabs(m.eval_unchecked(t))).sum();
        let guard = FLOOR_GUARD.max(1e-13 * magnitude);
        let nearest = libm::round(v);
        if libm::fabs(v - nearest) > guard {
            return self.checked_floor(libm::floor(v), n);
        }
        let hp = self.eval_dd(t);
        if hp.integer_gap() > 1e-24 * magnitude.max(1.0) {
            return self.checked_floor(hp.floor(), n);
        }
        // Numerically an integer. Confirm exactly where the form allows it,
        // otherwise take the nearest integer.
        let candidate = libm::round(hp.hi + hp.lo);
        if let Some(exact) = self.exact_floor(n, candidate) {
            return self.checked_floor(exact, n);
        }
        self.checked_floor(candidate, n)
    }

    fn eval_dd(&self, t: f64) -> Dd {
        self.monomials.iter().fold(Dd::ZERO, |acc, m| acc.add(m.eval_dd(t)))
    }

    /// Exact floor of `a·n^{p/q}` for a single monomial with integer `a > 0`
    /// and rational power, when the comparison fits in 128 bits.
    fn exact_floor(&self, n: u64, candidate: f64) -> Option<f64> {
        let [m] = self.monomials.as_slice() else { return None };
        if m.logpower != 0.0 || m.coef <= 0.0 || m.coef != libm::round(m.coef) || m.power < 0.0 {
            return None;
        }
        let (p, q) = rational_approx(m.power)?;
        let a = m.coef as u128;
        let k = candidate as u128;
        // a·n^{p/q} ≥ k  ⇔  a^q n^p ≥ k^q
        let rhs = a.checked_pow(q)?.checked_mul((n as u128).checked_pow(p)?)?;
        let lhs = k.checked_pow(q)?;
        Some(if lhs <= rhs { candidate } else { candidate - 1.0 })
    }

    fn checked_floor(&self, v: f64, n: u64) -> Result<i64> {
        if !(libm::fabs(v) < MAX_EXACT_INT as f64) {
            return Err(Error::OrbitOverflow { n });
        }
        Ok(v as i64)
    }

    /// `(⌊P(n)⌋)_{n=1..n_max}`. Requires `P(n) > 0` for `2 ≤ n ≤ n_max`.
    pub fn floor_orbit(&self, n_max: u64) -> Result<Vec<i64>> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("orbit length must be positive"));
        }
        let mut out = Vec::with_capacity(n_max as usize);
        for n in 1..=n_max {
            if n >= 2 {
                let v = self.eval_unchecked(n as f64);
                if !(v > 0.0) {
                    return Err(Error::Domain {
                        what: "P must be positive on [2, N]",
                        value: n as f64,
                    });
                }
            }
            out.push(self.floor_at(n)?);
        }
        Ok(out)
    }
}

/// `c = p/q` exactly, with `q` a power of two up to 64. A double is a dyadic
/// rational, so these are the only exact rational exponents it can carry.
fn rational_approx(c: f64) -> Option<(u32, u32)> {
    let mut q = 1u32;
    while q <= 64 {
        let pq = c * q as f64;
        if pq == libm::round(pq) && pq >= 0.0 && pq < u32::MAX as f64 {
            return Some((pq as u32, q));
        }
        q *= 2;
    }
    None
}

impl fmt::Display for HardyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for HardyFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let monomials = parse::parse_monomials(s)?;
        Self::new(monomials)
    }
}

/// Parses a `;`-separated list of Hardy functions.
pub fn parse_family(s: &str) -> Result<Vec<HardyFunction>> {
    s.split(';').map(|part| part.trim().parse()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    MemberOfPPrime,
    MemberOfP,
    NotMember,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyClass {
    pub verdict: Verdict,
    pub violations: Vec<String>,
}

pub const VIOLATION_PPRIME: &str = "P': non-integer pure power required";

/// Checks the admissibility conditions on a family:
/// (i) `0 < τ(P_i) < ∞`; (ii) the leading term is not a polynomial `t^k`;
/// (iii) the growth types are pairwise distinct; (iv) regularity, which every
/// monomial sum satisfies. The restricted class additionally needs each
/// leading term to be a pure non-integer power.
pub fn classify_family(family: &[HardyFunction]) -> FamilyClass {
    let mut violations = Vec::new();
    if family.is_empty() {
        violations.push(String::from("empty family"));
    }
    for (i, p) in family.iter().enumerate() {
        let tau = p.growth_type();
        if !(tau > 0.0 && tau.is_finite()) {
            violations.push(format!(
                "(i) growth type outside (0, inf): P_{} = {} has type {}",
                i + 1,
                p,
                tau
            ));
        }
        if p.leading().is_some_and(HardyMonomial::is_polynomial) {
            violations.push(format!("(ii) polynomial leading term: P_{} = {}", i + 1, p));
        }
    }
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if family[i].growth_type() == family[j].growth_type() {
                violations.push(format!(
                    "(iii) equal growth types: P_{} and P_{} both have type {}",
                    i + 1,
                    j + 1,
                    family[i].growth_type()
                ));
            }
        }
    }
    if !violations.is_empty() {
        return FamilyClass {
            verdict: Verdict::NotMember,
            violations,
        };
    }
    let pure = family.iter().all(|p| {
        p.leading()
            .is_some_and(|m| m.logpower == 0.0 && m.power != libm::round(m.power))
    });
    if pure {
        FamilyClass {
            verdict: Verdict::MemberOfPPrime,
            violations,
        }
    } else {
        violations.push(String::from(VIOLATION_PPRIME));
        FamilyClass {
            verdict: Verdict::MemberOfP,
            violations,
        }
    }
}

/// Floor orbits of every member of a family, one vector per member.
pub fn family_orbits(family: &[HardyFunction], n_max: u64) -> Result<Vec<Vec<i64>>> {
    family.iter().map(|p| p.floor_orbit(n_max)).collect()
}

#[cfg(test)]
mod tests;
