//! Smooth cutoffs, the annular decomposition of the major arc, Fourier
//! projections on a cyclic grid, the Littlewood–Paley partition and the
//! operator experiments built on them.
//!
//! Lattice functions are embedded into `Z_G^m` (zero padded, `G` a power of
//! two). On that group the averaging operator is convolution with the orbit
//! histogram taken mod `G`; its Fourier transform at `k` is exactly the
//! multiplier at the frequency `k/G`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expsum::{major_arc_box, MajorArcBox, OrbitTable, TorusPoint};
use crate::fft::fft_nd;
use crate::hardy::HardyFunction;
use crate::lattice::LatticeFunction;
use crate::math::{e, CompensatedSum, ComplexSum};
use crate::variation::{vr_norm, IndexedSequence};
use crate::{Error, Result};

/// Largest grid (total number of points) the cyclic model accepts.
pub const MAX_GRID_POINTS: usize = 1 << 24;
/// Allowed share of kernel `ℓ¹` mass beyond cyclic distance `G/4`.
pub const WRAPAROUND_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcConfig {
    pub c0: u32,
    pub c1: u32,
    pub c2: u32,
    /// Per-dimension DFT size.
    pub grid_size: usize,
}

impl Default for ArcConfig {
    fn default() -> Self {
        Self {
            c0: 1,
            c1: 2,
            c2: 16,
            grid_size: 256,
        }
    }
}

impl ArcConfig {
    /// `l_N = ⌊C_0 log₂ log₂ N⌋`.
    pub fn l_n(&self, n: u64) -> Result<i32> {
        if n < 2 {
            return Err(Error::Domain {
                what: "l_N needs N >= 2",
                value: n as f64,
            });
        }
        let ll = libm::log2(libm::log2(n as f64));
        Ok(libm::floor(self.c0 as f64 * ll) as i32)
    }

    fn min_l(&self) -> i32 {
        -(self.c1 as i32)
    }
}

fn sigma(u: f64) -> f64 {
    if u > 0.0 {
        libm::exp(-1.0 / u)
    } else {
        0.0
    }
}

/// Smooth even cutoff: `1` on `[-1/2, 1/2]`, `0` off `(-1, 1)`, with an
/// `exp(−1/u)` transition in between.
pub fn psi(x: f64) -> f64 {
    let a = libm::fabs(x);
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let u = 2.0 * (1.0 - a);
        let (p, q) = (sigma(u), sigma(1.0 - u));
        p / (p + q)
    }
}

/// `⌈log₂ x⌉` for `x > 0`, exact.
fn ceil_log2(x: f64) -> i32 {
    let (m, ex) = libm::frexp(x);
    if m == 0.5 {
        ex - 1
    } else {
        ex
    }
}

/// `Ψ_{≤x}(ξ) = Ψ(ξ / 2^{⌈log₂ x⌉})`. A nonpositive threshold is the
/// degenerate cutoff `1_{ξ=0}`.
pub fn psi_leq(threshold: f64, xi: f64) -> f64 {
    if !(threshold > 0.0) || !threshold.is_finite() {
        return if xi == 0.0 { 1.0 } else { 0.0 };
    }
    psi(libm::ldexp(xi, -ceil_log2(threshold)))
}

fn magnitudes_at(family: &[HardyFunction], t: f64) -> Result<Vec<f64>> {
    family
        .iter()
        .map(|p| {
            let v = libm::fabs(p.eval(t)?);
            if v == 0.0 {
                Err(Error::Domain {
                    what: "P_i vanishes",
                    value: t,
                })
            } else {
                Ok(v)
            }
        })
        .collect()
}

fn cutoff_product(scale: f64, mags: &[f64], xi: &[f64]) -> f64 {
    mags.iter().zip(xi).map(|(p, x)| psi_leq(scale / p, *x)).product()
}

/// The piece `Φ_{N,l}` of the major-arc symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnularPiece {
    n: u64,
    l: i32,
    first: bool,
    mags: Vec<f64>,
}

impl AnnularPiece {
    pub fn new(cfg: &ArcConfig, family: &[HardyFunction], n: u64, l: i32) -> Result<Self> {
        if l < cfg.min_l() {
            return Err(Error::InvalidArgument("annular index below -C1"));
        }
        if n < 2 {
            return Err(Error::Domain {
                what: "annular piece needs N >= 2",
                value: n as f64,
            });
        }
        let mags = magnitudes_at(family, n as f64)?;
        Ok(Self {
            n,
            l,
            first: l == cfg.min_l(),
            mags,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn l(&self) -> i32 {
        self.l
    }

    /// `∏ Ψ_{≤2^l/|P_i(N)|}(ξ_i) − ∏ Ψ_{≤2^{l−1}/|P_i(N)|}(ξ_i)`; only the first
    /// product at `l = −C_1`.
    pub fn eval(&self, xi: &TorusPoint) -> Result<f64> {
        if xi.dim() != self.mags.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mags.len(),
                found: xi.dim(),
            });
        }
        let outer = cutoff_product(libm::ldexp(1.0, self.l), &self.mags, xi.coords());
        if self.first {
            return Ok(outer);
        }
        Ok(outer - cutoff_product(libm::ldexp(1.0, self.l - 1), &self.mags, xi.coords()))
    }

    /// Half-widths `2^{l+1}/|P_i(N)|` of a box containing the support.
    pub fn support_half_widths(&self) -> Vec<f64> {
        self.mags.iter().map(|p| libm::ldexp(1.0, self.l + 1) / p).collect()
    }

    /// Half-widths `2^{l−2}/|P_i(N)|` of a box on which the piece vanishes
    /// (for `l > −C_1`).
    pub fn vanishing_half_widths(&self) -> Vec<f64> {
        self.mags.iter().map(|p| libm::ldexp(1.0, self.l - 2) / p).collect()
    }
}

pub fn phi_nl(cfg: &ArcConfig, family: &[HardyFunction], n: u64, l: i32, xi: &TorusPoint) -> Result<f64> {
    AnnularPiece::new(cfg, family, n, l)?.eval(xi)
}

/// `∏ Ψ_{≤2^{l_N}/|P_i(N)|}(ξ_i)`, the symbol of the major-arc projection.
pub fn major_symbol(cfg: &ArcConfig, family: &[HardyFunction], n: u64, xi: &TorusPoint) -> Result<f64> {
    if xi.dim() != family.len() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            found: xi.dim(),
        });
    }
    let mags = magnitudes_at(family, n as f64)?;
    Ok(cutoff_product(libm::ldexp(1.0, cfg.l_n(n)?), &mags, xi.coords()))
}

/// `k/G` wrapped into `[-1/2, 1/2)`.
pub fn grid_frequency(k: usize, g: usize) -> f64 {
    if 2 * k < g {
        k as f64 / g as f64
    } else {
        k as f64 / g as f64 - 1.0
    }
}

fn grid_total(g: usize, m: usize) -> Result<usize> {
    if g < 8 || !g.is_power_of_two() {
        return Err(Error::InvalidArgument("grid size must be a power of two >= 8"));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("grid needs m >= 1"));
    }
    (0..m)
        .try_fold(1usize, |acc, _| acc.checked_mul(g))
        .filter(|t| *t <= MAX_GRID_POINTS)
        .ok_or(Error::InvalidArgument("grid exceeds 2^24 points"))
}

/// Row-major multi-index of a grid offset.
fn unravel(mut off: usize, g: usize, m: usize, out: &mut [usize]) {
    for d in (0..m).rev() {
        out[d] = off % g;
        off /= g;
    }
}

/// The grid frequency of every bin, row-major.
fn grid_points(g: usize, m: usize) -> Result<Vec<TorusPoint>> {
    let total = grid_total(g, m)?;
    let mut idx = vec![0usize; m];
    Ok((0..total)
        .map(|off| {
            unravel(off, g, m, &mut idx);
            TorusPoint::new(idx.iter().map(|k| grid_frequency(*k, g)).collect())
        })
        .collect())
}

/// Symbol values at every grid frequency.
pub fn sample_symbol<F>(g: usize, m: usize, mut symbol: F) -> Result<Vec<f64>>
where
    F: FnMut(&TorusPoint) -> Result<f64>,
{
    grid_points(g, m)?.iter().map(|xi| symbol(xi)).collect()
}

/// Share of the `ℓ¹` mass of the kernel of `symbol` (its inverse DFT) at
/// cyclic max-distance beyond `G/4` from the origin.
pub fn wraparound_fraction(symbol: &[f64], g: usize, m: usize) -> Result<f64> {
    let total = grid_total(g, m)?;
    if symbol.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: symbol.len(),
        });
    }
    let mut k: Vec<Complex64> = symbol.iter().map(|s| Complex64::new(*s, 0.0)).collect();
    fft_nd(&mut k, &vec![g; m], true)?;
    let mut all = CompensatedSum::new();
    let mut far = CompensatedSum::new();
    let mut idx = vec![0usize; m];
    for (off, z) in k.iter().enumerate() {
        unravel(off, g, m, &mut idx);
        let dist = idx.iter().map(|c| (*c).min(g - c)).max().unwrap_or(0);
        let a = z.norm();
        all.add(a);
        if 4 * dist > g {
            far.add(a);
        }
    }
    let all = all.value();
    Ok(if all == 0.0 { 0.0 } else { far.value() / all })
}

/// A lattice function placed in the middle of a `G^m` cyclic grid.
#[derive(Clone, Debug)]
struct Embedded {
    origin: Vec<i64>,
    g: usize,
    values: Vec<Complex64>,
}

impl Embedded {
    fn new(f: &LatticeFunction, g: usize) -> Result<Self> {
        let m = f.dim();
        let total = grid_total(g, m)?;
        if f.shape().iter().any(|w| w.saturating_mul(4) > g) {
            return Err(Error::GridTooSmall { wraparound: 1.0 });
        }
        let origin: Vec<i64> = f
            .lo()
            .iter()
            .zip(f.shape())
            .map(|(lo, w)| lo - ((g - w) / 2) as i64)
            .collect();
        let mut values = vec![Complex64::new(0.0, 0.0); total];
        for (o, v) in f.values().iter().enumerate() {
            let x = f.point(o);
            let mut off = 0usize;
            for (xi, oi) in x.iter().zip(&origin) {
                off = off * g + (xi - oi) as usize;
            }
            values[off] = *v;
        }
        Ok(Self { origin, g, values })
    }

    fn into_lattice(self) -> Result<LatticeFunction> {
        let m = self.origin.len();
        LatticeFunction::new(self.origin, vec![self.g; m], self.values)
    }
}

fn apply_real_symbol(f: &LatticeFunction, g: usize, symbol: &[f64]) -> Result<LatticeFunction> {
    let wrap = wraparound_fraction(symbol, g, f.dim())?;
    if wrap >= WRAPAROUND_TOLERANCE {
        return Err(Error::GridTooSmall { wraparound: wrap });
    }
    let mut emb = Embedded::new(f, g)?;
    let shape = vec![g; f.dim()];
    fft_nd(&mut emb.values, &shape, false)?;
    for (v, s) in emb.values.iter_mut().zip(symbol) {
        *v *= *s;
    }
    fft_nd(&mut emb.values, &shape, true)?;
    emb.into_lattice()
}

/// `f_{M_N}`: the Fourier multiplier `∏ Ψ_{≤2^{l_N}|P_i(N)|^{−1}}` applied on
/// the grid. The result lives on the whole grid box around `f`.
pub fn project_major(
    cfg: &ArcConfig,
    f: &LatticeFunction,
    family: &[HardyFunction],
    n: u64,
) -> Result<LatticeFunction> {
    if family.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: family.len(),
        });
    }
    let symbol = sample_symbol(cfg.grid_size, f.dim(), |xi| major_symbol(cfg, family, n, xi))?;
    apply_real_symbol(f, cfg.grid_size, &symbol)
}

/// `f_{M_N^c} = f − f_{M_N}`, on the same box as [`project_major`].
pub fn project_minor(
    cfg: &ArcConfig,
    f: &LatticeFunction,
    family: &[HardyFunction],
    n: u64,
) -> Result<LatticeFunction> {
    let major = project_major(cfg, f, family, n)?;
    let mut out = Embedded::new(f, cfg.grid_size)?.into_lattice()?;
    for (o, v) in out.values_mut().iter_mut().zip(major.values()) {
        *o -= v;
    }
    Ok(out)
}

/// `‖f‖² = ‖f_M‖² + ‖f_{M^c}‖² + 2 Re⟨f_M, f_{M^c}⟩`, every term reported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParsevalSplit {
    pub total: f64,
    pub major: f64,
    pub minor: f64,
    pub cross: f64,
}

pub fn parseval_split(cfg: &ArcConfig, f: &LatticeFunction, family: &[HardyFunction], n: u64) -> Result<ParsevalSplit> {
    let major = project_major(cfg, f, family, n)?;
    let minor = project_minor(cfg, f, family, n)?;
    Ok(ParsevalSplit {
        total: f.norm_sqr(),
        major: major.norm_sqr(),
        minor: minor.norm_sqr(),
        cross: 2.0 * major.inner(&minor).re,
    })
}

/// `u_j(ξ) = ∏ Ψ_{≤|P_i(2^j)|^{−1}/2}(ξ_i)`.
pub fn lp_envelope(family: &[HardyFunction], j: u32, xi: &TorusPoint) -> Result<f64> {
    if xi.dim() != family.len() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            found: xi.dim(),
        });
    }
    if j > 60 {
        return Err(Error::InvalidArgument("scale index too large"));
    }
    let mags = magnitudes_at(family, libm::ldexp(1.0, j as i32))?;
    Ok(cutoff_product(0.5, &mags, xi.coords()))
}

/// `η_j = u_j − u_{j+1}`. Supported in `∏ [[|P_i(2^j)|^{−1}]]` and vanishing
/// on `∏ [[|P_i(2^{j+1})|^{−1}/4]]`; the sum over `j ≥ 1` telescopes to `u_1`.
pub fn littlewood_paley_partition(family: &[HardyFunction], j: u32, xi: &TorusPoint) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidArgument("partition index starts at 1"));
    }
    Ok(lp_envelope(family, j, xi)? - lp_envelope(family, j + 1, xi)?)
}

/// `Sf = (Σ_{j ≤ j_max} |f ∗ η̌_j|²)^{1/2}` on the grid box around `f`.
pub fn square_function(
    cfg: &ArcConfig,
    family: &[HardyFunction],
    f: &LatticeFunction,
    j_max: u32,
) -> Result<LatticeFunction> {
    if family.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: family.len(),
        });
    }
    let g = cfg.grid_size;
    let mut acc: Option<(LatticeFunction, Vec<f64>)> = None;
    for j in 1..=j_max {
        let symbol = sample_symbol(g, f.dim(), |xi| littlewood_paley_partition(family, j, xi))?;
        let piece = apply_real_symbol(f, g, &symbol)?;
        let sq = acc.get_or_insert_with(|| (piece.clone(), vec![0.0; piece.values().len()]));
        for (s, v) in sq.1.iter_mut().zip(piece.values()) {
            *s += v.norm_sqr();
        }
    }
    match acc {
        Some((mut out, sq)) => {
            for (o, s) in out.values_mut().iter_mut().zip(sq) {
                *o = Complex64::new(libm::sqrt(s), 0.0);
            }
            Ok(out)
        }
        None => {
            let emb = Embedded::new(f, g)?;
            LatticeFunction::zeros(emb.origin, vec![g; f.dim()])
        }
    }
}

/// DFT of the orbit histogram mod `G`: at bin `k` this is
/// `(1/N) Σ_n [n > N/2] e(−k·⌊P(n)⌋/G)`.
pub fn orbit_kernel_transform(table: &OrbitTable, n: u64, g: usize, upper_half: bool) -> Result<Vec<Complex64>> {
    let m = table.dim();
    let total = grid_total(g, m)?;
    if n == 0 || n > table.n_max() {
        return Err(Error::InvalidArgument("scale outside the precomputed orbit range"));
    }
    let mut hist = vec![Complex64::new(0.0, 0.0); total];
    let w = 1.0 / n as f64;
    let start = if upper_half { n / 2 + 1 } else { 1 };
    for k in start..=n {
        let mut off = 0usize;
        for i in 0..m {
            off = off * g + table.floor(i, k).rem_euclid(g as i64) as usize;
        }
        hist[off].re += w;
    }
    fft_nd(&mut hist, &vec![g; m], false)?;
    Ok(hist)
}

/// `A_N` on `Z_G^m` through the transform of [`orbit_kernel_transform`].
pub fn apply_average_grid(values: &mut [Complex64], transform: &[Complex64], g: usize, m: usize) -> Result<()> {
    if values.len() != transform.len() {
        return Err(Error::DimensionMismatch {
            expected: transform.len(),
            found: values.len(),
        });
    }
    let shape = vec![g; m];
    fft_nd(values, &shape, false)?;
    for (v, t) in values.iter_mut().zip(transform) {
        *v *= t;
    }
    fft_nd(values, &shape, true)
}

/// `A_N f(x) = (1/N) Σ_n [n > N/2] f(x − ⌊P(n)⌋ mod G)` by direct summation.
pub fn cyclic_average_direct(
    values: &[Complex64],
    g: usize,
    table: &OrbitTable,
    n: u64,
    upper_half: bool,
) -> Result<Vec<Complex64>> {
    let m = table.dim();
    let total = grid_total(g, m)?;
    if values.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: values.len(),
        });
    }
    let start = if upper_half { n / 2 + 1 } else { 1 };
    let mut idx = vec![0usize; m];
    let mut out = Vec::with_capacity(total);
    for off in 0..total {
        unravel(off, g, m, &mut idx);
        let mut acc = ComplexSum::new();
        for k in start..=n {
            let mut src = 0usize;
            for (i, x) in idx.iter().enumerate() {
                src = src * g + (*x as i64 - table.floor(i, k)).rem_euclid(g as i64) as usize;
            }
            acc.add(values[src]);
        }
        out.push(acc.value() / n as f64);
    }
    Ok(out)
}

/// Shared state of the random minor-arc trials: the operator transform and
/// the major-box mask on a `G^m` grid, test functions supported on `(G/4)^m`.
#[derive(Clone, Debug)]
pub struct MinorArcExperiment {
    g: usize,
    m: usize,
    transform: Vec<Complex64>,
    in_box: Vec<bool>,
}

impl MinorArcExperiment {
    pub fn new(cfg: &ArcConfig, family: &[HardyFunction], n: u64, l: i32) -> Result<Self> {
        let (g, m) = (cfg.grid_size, family.len());
        let table = OrbitTable::new(family, n)?;
        let transform = orbit_kernel_transform(&table, n, g, true)?;
        let major: MajorArcBox = major_arc_box(family, n, l)?;
        let in_box = grid_points(g, m)?.iter().map(|xi| major.contains(xi)).collect();
        Ok(Self {
            g,
            m,
            transform,
            in_box,
        })
    }

    pub fn transform(&self) -> &[Complex64] {
        &self.transform
    }

    /// `‖A_N f‖₂/‖f‖₂` for the `trial`-th random `f` (uniform in the unit
    /// square on the support, stream `trial` of the seed) after its transform
    /// is zeroed on the major box. `None` if nothing survives.
    pub fn trial(&self, seed: u64, trial: u64) -> Option<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let w = self.g / 4;
        let total = self.in_box.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); total];
        let mut idx = vec![0usize; self.m];
        for (off, v) in buf.iter_mut().enumerate() {
            unravel(off, self.g, self.m, &mut idx);
            if idx.iter().all(|c| *c < w) {
                *v = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
            }
        }
        fft_nd(&mut buf, &vec![self.g; self.m], false).ok()?;
        Some(self.ratio_of_transform(&buf)?)
    }

    /// The operator ratio of `f` given by its grid transform, after zeroing
    /// the major box (Parseval on the grid).
    pub fn ratio_of_transform(&self, fhat: &[Complex64]) -> Option<f64> {
        let mut num = CompensatedSum::new();
        let mut den = CompensatedSum::new();
        for ((v, t), inside) in fhat.iter().zip(&self.transform).zip(&self.in_box) {
            if !inside {
                den.add(v.norm_sqr());
                num.add((v * t).norm_sqr());
            }
        }
        let den = den.value();
        if !(den > 0.0) {
            return None;
        }
        Some(libm::sqrt(num.value() / den))
    }

    /// Ratio for the pure frequency at grid bin `k` (row-major offset),
    /// computed by applying the operator to `e(k·x/G)` in physical space.
    pub fn pure_frequency_ratio(&self, bin: &[usize]) -> Result<f64> {
        if bin.len() != self.m || bin.iter().any(|b| *b >= self.g) {
            return Err(Error::InvalidArgument("frequency bin outside the grid"));
        }
        let total = self.in_box.len();
        let mut buf = Vec::with_capacity(total);
        let mut idx = vec![0usize; self.m];
        for off in 0..total {
            unravel(off, self.g, self.m, &mut idx);
            let mut ph = 0u128;
            for (x, k) in idx.iter().zip(bin) {
                ph += (*x as u128 * *k as u128) % self.g as u128;
            }
            let ph = (ph % self.g as u128) as f64 / self.g as f64;
            buf.push(e(ph));
        }
        let before = l2(&buf);
        apply_average_grid(&mut buf, &self.transform, self.g, self.m)?;
        Ok(l2(&buf) / before)
    }
}

fn l2(v: &[Complex64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for z in v {
        acc.add(z.norm_sqr());
    }
    libm::sqrt(acc.value())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorRatio {
    /// Per trial, skipped trials omitted, in trial order.
    pub ratios: Vec<f64>,
    pub max: f64,
    pub median: f64,
}

impl OperatorRatio {
    pub fn from_ratios(ratios: Vec<f64>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::Degenerate);
        }
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let mut sorted = ratios.clone();
        sorted.sort_by(f64::total_cmp);
        let h = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[h]
        } else {
            0.5 * (sorted[h - 1] + sorted[h])
        };
        Ok(Self { ratios, max, median })
    }
}

/// `‖A_N f‖₂/‖f‖₂` over random `f` whose transform vanishes on the major box
/// `∏ [[2^l |P_i(N)|^{−1}]]`, `A_N` the upper-half average.
pub fn minor_arc_operator_ratio(
    cfg: &ArcConfig,
    family: &[HardyFunction],
    n: u64,
    l: i32,
    trials: u32,
    seed: u64,
) -> Result<OperatorRatio> {
    if trials < 8 {
        return Err(Error::InvalidArgument("need at least 8 trials"));
    }
    let exp = MinorArcExperiment::new(cfg, family, n, l)?;
    let ratios = (0..trials as u64).filter_map(|t| exp.trial(seed, t)).collect();
    OperatorRatio::from_ratios(ratios)
}

/// Grid used by [`short_variation_instance`]; frequencies are snapped to it
/// so that every phase is computed exactly.
pub const SHORT_VARIATION_GRID: u64 = 1 << 24;

/// One instance of the short-variation estimate at a pure frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortVariation {
    pub k: u32,
    /// `ξ` after snapping to the grid.
    pub xi: TorusPoint,
    /// `V²(A_N f(0))_{N ∈ I_k}` for `f(x) = e(ξ·x)`.
    pub v2_average: f64,
    /// `V²(m_{N;Z}(ξ))_{N ∈ I_k}`.
    pub v2_multiplier: f64,
    /// `V²(ν_N(ξ))_{N ∈ I_k}`, `ν_N = m_{N;Z} − m_{2^k;Z}`.
    pub v2_nu: f64,
    /// `A = max |ν_N(ξ)|`.
    pub big_a: f64,
    /// `a = max |ν_{N+1}(ξ) − ν_N(ξ)|`.
    pub small_a: f64,
}

impl ShortVariation {
    /// `√(2^k A a)`.
    pub fn bound(&self) -> f64 {
        libm::sqrt(libm::ldexp(self.big_a * self.small_a, self.k as i32))
    }

    pub fn holds(&self, factor: f64) -> bool {
        self.v2_nu <= factor * self.bound()
    }
}

/// Short variation over `I_k = [2^k, 2^{k+1}]` of the upper-half averages of
/// a pure frequency, computed both from the operator and from the multiplier.
pub fn short_variation_instance(family: &[HardyFunction], xi: &TorusPoint, k: u32) -> Result<ShortVariation> {
    if xi.dim() != family.len() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            found: xi.dim(),
        });
    }
    if !(1..=24).contains(&k) {
        return Err(Error::InvalidArgument("block index must lie in 1..=24"));
    }
    let g = SHORT_VARIATION_GRID as i64;
    let bins: Vec<i64> = xi.coords().iter().map(|x| libm::round(x * g as f64) as i64).collect();
    let snapped = TorusPoint::new(bins.iter().map(|b| *b as f64 / g as f64).collect());
    let lo = 1u64 << k;
    let hi = lo << 1;
    let table = OrbitTable::new(family, hi)?;

    // A_N f(0) = (1/N) Σ_{n > N/2} f(−⌊P(n)⌋), phases reduced exactly mod G
    let mut prefix = Vec::with_capacity(hi as usize + 1);
    prefix.push(Complex64::new(0.0, 0.0));
    let mut acc = ComplexSum::new();
    for n in 1..=hi {
        let mut ph = 0i64;
        for (i, b) in bins.iter().enumerate() {
            let y = (-table.floor(i, n)).rem_euclid(g) as i128;
            ph = (ph + ((y * *b as i128).rem_euclid(g as i128)) as i64) % g;
        }
        acc.add(e(ph as f64 / g as f64));
        prefix.push(acc.value());
    }
    let scales: Vec<u64> = (lo..=hi).collect();
    let averages: Vec<Complex64> = scales
        .iter()
        .map(|&n| (prefix[n as usize] - prefix[(n / 2) as usize]) / n as f64)
        .collect();
    let multipliers = table.trace(&snapped, &scales, true)?;
    let nu: Vec<Complex64> = multipliers.iter().map(|z| z - multipliers[0]).collect();
    let big_a = nu.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let small_a = nu.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
    let v2 = |v: Vec<Complex64>| -> Result<f64> { Ok(vr_norm(&IndexedSequence::new(scales.clone(), v)?, 2.0)?.value) };
    Ok(ShortVariation {
        k,
        xi: snapped,
        v2_average: v2(averages)?,
        v2_multiplier: v2(multipliers.clone())?,
        v2_nu: v2(nu)?,
        big_a,
        small_a,
    })
}
