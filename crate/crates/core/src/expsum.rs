//! Exponential-sum multipliers of the floor-orbit averages and the tools used
//! to analyse them: major-arc boxes, grid scans, Van der Corput bounds, the
//! sawtooth Fourier expansion and the correlation function.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hardy::HardyFunction;
use crate::math::{e, frac_mul, reduce_torus, wrap_half, ComplexSum};
use crate::quadrature::CompositeRule;
use crate::{Error, Result};

/// A frequency vector on `T^m`, stored in `[-1/2, 1/2)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Wraps every coordinate into the canonical box.
    pub fn new(raw: Vec<f64>) -> Self {
        Self {
            coords: raw.into_iter().map(reduce_torus).collect(),
        }
    }

    pub fn zero(m: usize) -> Self {
        Self { coords: vec![0.0; m] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `‖ξ_i‖_T`.
    pub fn norm(&self, i: usize) -> f64 {
        libm::fabs(self.coords[i])
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().map(|x| -x).collect())
    }
}

/// The box `∏ [-w_i, w_i]` around the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorArcBox {
    half_widths: Vec<f64>,
}

impl MajorArcBox {
    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn contains(&self, xi: &TorusPoint) -> bool {
        xi.coords
            .iter()
            .zip(&self.half_widths)
            .all(|(x, w)| libm::fabs(*x) <= *w)
    }
}

/// `half_widths_i = 2^l / |P_i(N)|`.
pub fn major_arc_box(family: &[HardyFunction], n: u64, l: i32) -> Result<MajorArcBox> {
    if n < 2 {
        return Err(Error::Domain {
            what: "major arc needs N >= 2",
            value: n as f64,
        });
    }
    let scale = libm::ldexp(1.0, l);
    let half_widths = family
        .iter()
        .map(|p| {
            let v = libm::fabs(p.eval(n as f64)?);
            if v == 0.0 {
                return Err(Error::Domain {
                    what: "P_i(N) vanishes",
                    value: n as f64,
                });
            }
            Ok(scale / v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MajorArcBox { half_widths })
}

fn check_dim(family: &[HardyFunction], xi: &TorusPoint) -> Result<()> {
    if family.len() != xi.dim() || family.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            found: xi.dim(),
        });
    }
    Ok(())
}

/// Floor orbits `⌊P_i(n)⌋`, `1 ≤ n ≤ n_max`, of a family, computed once and
/// shared by every multiplier evaluation.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    floors: Vec<Vec<i64>>,
    n_max: u64,
}

impl OrbitTable {
    pub fn new(family: &[HardyFunction], n_max: u64) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::InvalidArgument("empty family"));
        }
        let floors = crate::hardy::family_orbits(family, n_max)?;
        Ok(Self { floors, n_max })
    }

    pub fn dim(&self) -> usize {
        self.floors.len()
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// `⌊P_i(n)⌋`.
    pub fn floor(&self, i: usize, n: u64) -> i64 {
        self.floors[i][(n - 1) as usize]
    }

    /// `ξ·⌊P(n)⌋ mod 1`, in `[-1/2, 1/2]`.
    #[inline]
    pub fn phase(&self, xi: &[f64], n: u64) -> f64 {
        let idx = (n - 1) as usize;
        let mut s = 0.0;
        for (x, f) in xi.iter().zip(&self.floors) {
            s += frac_mul(*x, f[idx]);
        }
        wrap_half(s)
    }

    fn check(&self, n: u64, xi: &TorusPoint) -> Result<()> {
        if xi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: xi.dim(),
            });
        }
        if n == 0 || n > self.n_max {
            return Err(Error::InvalidArgument("scale outside the precomputed orbit range"));
        }
        Ok(())
    }

    /// `(1/N) Σ_{n ≤ N} [n > N/2] e(ξ·⌊P(n)⌋)`, summed in ascending `n`.
    pub fn multiplier(&self, n: u64, xi: &TorusPoint, upper_half: bool) -> Result<Complex64> {
        self.check(n, xi)?;
        let start = if upper_half { n / 2 + 1 } else { 1 };
        let mut acc = ComplexSum::new();
        for k in start..=n {
            acc.add(e(self.phase(&xi.coords, k)));
        }
        Ok(acc.value() / n as f64)
    }

    /// Running sums `S(n) = Σ_{k ≤ n} e(ξ·⌊P(k)⌋)` for `0 ≤ n ≤ n_max`.
    pub fn prefix_sums(&self, xi: &TorusPoint) -> Result<Vec<Complex64>> {
        self.check(1, xi)?;
        let mut out = Vec::with_capacity(self.n_max as usize + 1);
        out.push(Complex64::new(0.0, 0.0));
        let mut acc = ComplexSum::new();
        for k in 1..=self.n_max {
            acc.add(e(self.phase(&xi.coords, k)));
            out.push(acc.value());
        }
        Ok(out)
    }

    /// The multiplier at every requested scale, from a single pass.
    pub fn trace(&self, xi: &TorusPoint, scales: &[u64], upper_half: bool) -> Result<Vec<Complex64>> {
        let top = scales.iter().copied().max().unwrap_or(1);
        if top > self.n_max || scales.contains(&0) {
            return Err(Error::InvalidArgument("scale outside the precomputed orbit range"));
        }
        let s = self.prefix_sums(xi)?;
        Ok(scales
            .iter()
            .map(|&n| {
                let total = s[n as usize];
                let v = if upper_half { total - s[(n / 2) as usize] } else { total };
                v / n as f64
            })
            .collect())
    }
}

/// `m_{N;Z}(ξ) = (1/N) Σ_{n=1}^{N} [n > N/2] e(ξ_1⌊P_1(n)⌋ + … + ξ_m⌊P_m(n)⌋)`,
/// the indicator present when `upper_half` is set.
pub fn m_discrete(family: &[HardyFunction], n: u64, xi: &TorusPoint, upper_half: bool) -> Result<Complex64> {
    check_dim(family, xi)?;
    if n < 2 {
        return Err(Error::Domain {
            what: "multiplier needs N >= 2",
            value: n as f64,
        });
    }
    OrbitTable::new(family, n)?.multiplier(n, xi, upper_half)
}

pub const DEFAULT_MAX_PANELS: usize = 1 << 22;
const GL_ORDER: usize = 16;

/// `m_{N;R}(ξ) = (1/N) ∫_{N/2}^{N} e(ξ·P(t)) dt` to absolute accuracy `tol`.
pub fn m_continuous(family: &[HardyFunction], n: u64, xi: &TorusPoint, tol: f64) -> Result<Complex64> {
    m_continuous_with_limit(family, n, xi, tol, DEFAULT_MAX_PANELS)
}

/// [`m_continuous`] with an explicit cap on the number of panels.
///
/// The initial panel count follows the number of oscillations
/// `Σ|ξ_i||P_i(N)|`; panels double until two successive estimates agree to
/// `tol`.
pub fn m_continuous_with_limit(
    family: &[HardyFunction],
    n: u64,
    xi: &TorusPoint,
    tol: f64,
    max_panels: usize,
) -> Result<Complex64> {
    check_dim(family, xi)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    if n < 2 {
        return Err(Error::Domain {
            what: "multiplier needs N >= 2",
            value: n as f64,
        });
    }
    if xi.coords.iter().all(|x| *x == 0.0) {
        return Ok(Complex64::new(0.5, 0.0));
    }
    let nf = n as f64;
    let (a, b) = (nf / 2.0, nf);
    let mut osc = 0.0;
    for (p, x) in family.iter().zip(&xi.coords) {
        osc += libm::fabs(*x) * libm::fabs(p.eval_extended(b)?).max(libm::fabs(p.eval_extended(a)?));
    }
    let integrand = |t: f64| -> Complex64 {
        let mut ph = 0.0;
        for (p, x) in family.iter().zip(&xi.coords) {
            // t > 1 on every node, so eval_extended cannot fail here
            ph += wrap_half(x * p.eval_extended(t).unwrap_or(0.0));
        }
        e(ph)
    };
    let rule = CompositeRule::new(GL_ORDER);
    let mut panels = (libm::ceil(2.0 * osc) as usize).max(4).next_power_of_two();
    if panels > max_panels {
        return Err(Error::ConvergenceFailure { panels });
    }
    let mut prev: Complex64 = rule.integrate(a, b, panels, integrand) / nf;
    loop {
        panels *= 2;
        if panels > max_panels {
            return Err(Error::ConvergenceFailure { panels });
        }
        let cur: Complex64 = rule.integrate(a, b, panels, integrand) / nf;
        if (cur - prev).norm() <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Points `-1/2 + (j + u)/g` per coordinate, `u` uniform in `[0,1)` and drawn
/// per point from a ChaCha8 stream seeded with `seed`. Row-major order.
pub fn jittered_grid(m: usize, per_dim: usize, seed: u64) -> Result<Vec<TorusPoint>> {
    if per_dim < 8 {
        return Err(Error::InvalidArgument("grid needs at least 8 points per dimension"));
    }
    let total = (0..m)
        .try_fold(1usize, |acc, _| acc.checked_mul(per_dim))
        .filter(|t| *t <= 1 << 24);
    let Some(total) = total else {
        return Err(Error::InvalidArgument("grid has more than 2^24 points"));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = per_dim as f64;
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; m];
    for _ in 0..total {
        let coords = idx
            .iter()
            .map(|&j| -0.5 + (j as f64 + rng.random::<f64>()) / g)
            .collect();
        out.push(TorusPoint::new(coords));
        for d in (0..m).rev() {
            idx[d] += 1;
            if idx[d] < per_dim {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub xi: TorusPoint,
    pub abs_m: f64,
    pub in_major_arc: bool,
}

/// `|m_{N;Z}|` (upper half) at one frequency, flagged against the major box.
pub fn scan_point(table: &OrbitTable, n: u64, major: &MajorArcBox, xi: TorusPoint) -> Result<ScanPoint> {
    let abs_m = table.multiplier(n, &xi, true)?.norm();
    let in_major_arc = major.contains(&xi);
    Ok(ScanPoint {
        xi,
        abs_m,
        in_major_arc,
    })
}

/// Upper-half multiplier over the whole jittered grid.
pub fn multiplier_scan(
    family: &[HardyFunction],
    n: u64,
    l: i32,
    grid_per_dim: usize,
    seed: u64,
) -> Result<Vec<ScanPoint>> {
    let table = OrbitTable::new(family, n)?;
    let major = major_arc_box(family, n, l)?;
    jittered_grid(family.len(), grid_per_dim, seed)?
        .into_iter()
        .map(|xi| scan_point(&table, n, &major, xi))
        .collect()
}

/// Largest upper-half `|m_{N;Z}|` over the jittered grid points outside the
/// major box (`0` when every point is inside).
pub fn minor_arc_sup(family: &[HardyFunction], n: u64, l: i32, grid_per_dim: usize, seed: u64) -> Result<f64> {
    let table = OrbitTable::new(family, n)?;
    let major = major_arc_box(family, n, l)?;
    let mut best = 0.0f64;
    for xi in jittered_grid(family.len(), grid_per_dim, seed)? {
        if !major.contains(&xi) {
            best = best.max(table.multiplier(n, &xi, true)?.norm());
        }
    }
    Ok(best)
}

/// `h·(λ^{1/(J−2)} + N^{−2/J} + (λN^j)^{−2/J})` with `J = 2^j`.
pub fn vdc_bound(j: u32, n: u64, lambda: f64, h: f64) -> Result<f64> {
    if !(2..=30).contains(&j) {
        return Err(Error::InvalidArgument("Van der Corput bound needs 2 <= j <= 30"));
    }
    if !(lambda > 0.0) || !(h >= 1.0) || n == 0 {
        return Err(Error::InvalidArgument(
            "Van der Corput bound needs lambda > 0, h >= 1, N >= 1",
        ));
    }
    let big_j = (1u64 << j) as f64;
    let nf = n as f64;
    let t1 = libm::pow(lambda, 1.0 / (big_j - 2.0));
    let t2 = libm::pow(nf, -2.0 / big_j);
    let t3 = libm::pow(lambda * libm::pow(nf, j as f64), -2.0 / big_j);
    Ok(h * (t1 + t2 + t3))
}

fn golden_min<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, f: F) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-14 * libm::fabs(hi).max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimum and maximum of `|Σ c_i P_i^{(j)}(t)|` on `[a, b]`: a uniform scan
/// with `samples` points, refined by golden-section search around the best
/// sample of each kind.
pub fn derivative_range(
    family: &[HardyFunction],
    coeffs: &[f64],
    j: u32,
    a: f64,
    b: f64,
    samples: usize,
) -> Result<(f64, f64)> {
    if family.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            found: coeffs.len(),
        });
    }
    if !(a >= 2.0 && a < b) || samples < 16 {
        return Err(Error::InvalidArgument(
            "derivative_range needs 2 <= a < b and samples >= 16",
        ));
    }
    let ders: Vec<HardyFunction> = family.iter().map(|p| p.derivative(j)).collect();
    let g = |t: f64| -> f64 {
        let mut s = 0.0;
        for (d, c) in ders.iter().zip(coeffs) {
            if *c != 0.0 && !d.is_zero() {
                s += c * d.eval(t.clamp(a, b)).unwrap_or(0.0);
            }
        }
        libm::fabs(s)
    };
    let step = (b - a) / (samples - 1) as f64;
    let ts: Vec<f64> = (0..samples)
        .map(|k| if k + 1 == samples { b } else { a + k as f64 * step })
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
    let (imin, imax) = vals.iter().enumerate().fold((0, 0), |(lo, hi), (i, v)| {
        (if *v < vals[lo] { i } else { lo }, if *v > vals[hi] { i } else { hi })
    });
    let bracket = |i: usize| (ts[i.saturating_sub(1)], ts[(i + 1).min(samples - 1)]);
    let (lo, hi) = bracket(imin);
    let min = golden_min(lo, hi, g).1.min(vals[imin]);
    let (lo, hi) = bracket(imax);
    let max = (-golden_min(lo, hi, |t| -g(t)).1).max(vals[imax]);
    Ok((min, max))
}

/// Truncated Fourier series of `x ↦ e(−ξ{x})`:
/// `a(ξ) Σ_{|k|≤K} e(kx)/(ξ+k)` with `a(ξ) = (1 − e(−ξ))/(2πi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SawtoothExpansion {
    xi: f64,
    k_max: u32,
    a_xi: Complex64,
    terms: Vec<(i64, Complex64)>,
}

impl SawtoothExpansion {
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn a_xi(&self) -> Complex64 {
        self.a_xi
    }

    pub fn terms(&self) -> &[(i64, Complex64)] {
        &self.terms
    }

    /// The truncated series at `x`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (k, c) in &self.terms {
            acc.add(c * e(frac_mul(x, *k)));
        }
        acc.value()
    }
}

/// `e(−ξ{x})`, the function the sawtooth series expands.
pub fn sawtooth_target(xi: f64, x: f64) -> Complex64 {
    let frac = x - libm::floor(x);
    e(-xi * frac)
}

pub fn sawtooth_expansion(xi: f64, k_max: u32) -> Result<SawtoothExpansion> {
    if !(-0.5..0.5).contains(&xi) {
        return Err(Error::Domain {
            what: "xi must lie in [-1/2, 1/2)",
            value: xi,
        });
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("K must be positive"));
    }
    if xi == 0.0 {
        return Ok(SawtoothExpansion {
            xi,
            k_max,
            a_xi: Complex64::new(0.0, 0.0),
            terms: vec![(0, Complex64::new(1.0, 0.0))],
        });
    }
    // 1/(2πi) = −i/(2π)
    let a_xi = (Complex64::new(1.0, 0.0) - e(-xi)) * Complex64::new(0.0, -1.0 / core::f64::consts::TAU);
    let k = k_max as i64;
    let terms = (-k..=k).map(|k| (k, a_xi / (xi + k as f64))).collect();
    Ok(SawtoothExpansion { xi, k_max, a_xi, terms })
}

/// `C_η(t) = Σ a_i|P_i(t)| / Σ |a_i||P_i(t)|`. Accepts `t = 1` through the
/// limiting values of the monomials.
pub fn correlation_function(coeffs: &[f64], family: &[HardyFunction], t: f64) -> Result<f64> {
    if family.len() != coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            found: coeffs.len(),
        });
    }
    if coeffs.iter().all(|c| *c == 0.0) {
        return Err(Error::InvalidArgument("all coefficients are zero"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, a) in family.iter().zip(coeffs) {
        let v = libm::fabs(p.eval_extended(t)?);
        num += a * v;
        den += libm::fabs(*a) * v;
    }
    if !(den > f64::MIN_POSITIVE) || !den.is_finite() {
        return Err(Error::Domain {
            what: "correlation denominator underflows",
            value: t,
        });
    }
    Ok((num / den).clamp(-1.0, 1.0))
}

/// `(N/2)·(fraction of sample points t ∈ [N/2, N] with |C_η(t)| < threshold)`,
/// the sample points being the midpoints of `samples` equal cells.
pub fn exceptional_measure(
    coeffs: &[f64],
    family: &[HardyFunction],
    n: u64,
    threshold: f64,
    samples: usize,
) -> Result<f64> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument("threshold must lie in (0, 1]"));
    }
    if n < 4 || samples == 0 {
        return Err(Error::InvalidArgument(
            "exceptional_measure needs N >= 4 and samples >= 1",
        ));
    }
    let half = n as f64 / 2.0;
    let cell = half / samples as f64;
    let mut hits = 0usize;
    for k in 0..samples {
        let t = half + (k as f64 + 0.5) * cell;
        if libm::fabs(correlation_function(coeffs, family, t)?) < threshold {
            hits += 1;
        }
    }
    Ok(half * hits as f64 / samples as f64)
}
