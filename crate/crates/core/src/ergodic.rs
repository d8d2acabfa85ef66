//! Torus rotations and lattice shifts driven by floor orbits: average traces,
//! equidistribution counts and the jump-count experiments.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::expsum::{OrbitTable, TorusPoint};
use crate::hardy::{classify_family, HardyFunction, Verdict};
use crate::lattice::LatticeFunction;
use crate::math::{e, frac_mul, loglog_slope, reduce_unit, wrap_half, ComplexSum};
use crate::variation::{jump_count, lacunary_subset, vr_norm, IndexedSequence, VariationResult};
use crate::{Error, Result};

/// Commuting rotations `T_i x = x + α_i e_i` on `T^m` with the observable
/// `f(x) = e(β·x)`. `β` is an integer vector so that `f` is a function on the
/// torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusSystem {
    alphas: Vec<f64>,
    beta: Vec<i64>,
}

impl TorusSystem {
    pub fn new(alphas: Vec<f64>, beta: Vec<i64>) -> Result<Self> {
        if alphas.len() != beta.len() {
            return Err(Error::DimensionMismatch {
                expected: alphas.len(),
                found: beta.len(),
            });
        }
        if alphas.is_empty() {
            return Err(Error::InvalidArgument("torus system needs m >= 1"));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("rotation amounts must be finite"));
        }
        Ok(Self {
            alphas: alphas.into_iter().map(reduce_unit).collect(),
            beta,
        })
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn beta(&self) -> &[i64] {
        &self.beta
    }

    /// `ξ_i = α_i β_i mod 1`, the frequency the averages of `f` see.
    pub fn frequency(&self) -> TorusPoint {
        TorusPoint::new(
            self.alphas
                .iter()
                .zip(&self.beta)
                .map(|(a, b)| frac_mul(*a, *b))
                .collect(),
        )
    }

    /// `f(x) = e(β·x)`.
    pub fn observable(&self, x: &[f64]) -> Complex64 {
        let mut ph = 0.0;
        for (xi, b) in x.iter().zip(&self.beta) {
            ph += frac_mul(*xi, *b);
        }
        e(wrap_half(ph))
    }

    /// `T_1^{k_1} ⋯ T_m^{k_m} x`, in `[0,1)^m`.
    fn shift(&self, x: &[f64], table: &OrbitTable, n: u64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let step = frac_mul(self.alphas[i], table.floor(i, n));
            *o = reduce_unit(x[i] + reduce_unit(step));
        }
    }
}

/// `A_N f(x)` at a list of scales.
#[derive(Clone, Debug, PartialEq)]
pub struct AverageTrace {
    pub scales: Vec<u64>,
    pub values: Vec<Complex64>,
    pub basepoint: Vec<f64>,
}

impl AverageTrace {
    pub fn to_sequence(&self) -> Result<IndexedSequence> {
        IndexedSequence::new(self.scales.clone(), self.values.clone())
    }
}

fn check_scales(scales: &[u64]) -> Result<u64> {
    if scales.is_empty() || scales[0] == 0 || scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "scales must be positive and strictly increasing",
        ));
    }
    Ok(scales[scales.len() - 1])
}

fn check_family(system_dim: usize, family: &[HardyFunction], x0: &[f64]) -> Result<()> {
    if family.len() != system_dim {
        return Err(Error::DimensionMismatch {
            expected: system_dim,
            found: family.len(),
        });
    }
    if x0.len() != system_dim {
        return Err(Error::DimensionMismatch {
            expected: system_dim,
            found: x0.len(),
        });
    }
    Ok(())
}

/// `A_N f(x_0) = (1/N) Σ_{n ≤ N} f(T^{⌊P(n)⌋} x_0)` at every requested scale,
/// in one pass over `n`.
pub fn torus_average_trace(
    system: &TorusSystem,
    family: &[HardyFunction],
    x0: &[f64],
    scales: &[u64],
) -> Result<AverageTrace> {
    check_family(system.dim(), family, x0)?;
    let top = check_scales(scales)?;
    let table = OrbitTable::new(family, top)?;
    let base: Vec<f64> = x0.iter().map(|x| reduce_unit(*x)).collect();
    let mut y = base.clone();
    let mut acc = ComplexSum::new();
    let mut values = Vec::with_capacity(scales.len());
    let mut next = scales.iter().peekable();
    for n in 1..=top {
        system.shift(&base, &table, n, &mut y);
        acc.add(system.observable(&y));
        if next.peek() == Some(&&n) {
            values.push(acc.value() / n as f64);
            next.next();
        }
    }
    Ok(AverageTrace {
        scales: scales.to_vec(),
        values,
        basepoint: base,
    })
}

/// `(1/N) Σ_{n ≤ N} [n > N/2] f(x − ⌊P(n)⌋)` by direct orbit summation.
pub fn lattice_average(
    f: &LatticeFunction,
    family: &[HardyFunction],
    n: u64,
    x: &[i64],
    upper_half: bool,
) -> Result<Complex64> {
    if family.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: family.len(),
        });
    }
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: x.len(),
        });
    }
    if n < 2 {
        return Err(Error::Domain {
            what: "average needs N >= 2",
            value: n as f64,
        });
    }
    let table = OrbitTable::new(family, n)?;
    let start = if upper_half { n / 2 + 1 } else { 1 };
    let mut acc = ComplexSum::new();
    let mut y = x.to_vec();
    for k in start..=n {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = x[i] - table.floor(i, k);
        }
        acc.add(f.get(&y));
    }
    Ok(acc.value() / n as f64)
}

/// Half-open arc `{y : (y − start) mod 1 < length}` of the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusArc {
    start: f64,
    length: f64,
}

impl TorusArc {
    /// The arc `[lo, hi)` with `0 ≤ lo ≤ hi ≤ 1`.
    pub fn from_bounds(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidArgument("arc bounds must satisfy 0 <= lo <= hi <= 1"));
        }
        Ok(Self {
            start: lo,
            length: hi - lo,
        })
    }

    /// Wrapping arc starting anywhere; `length ≥ 1` is the whole circle.
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !start.is_finite() || !(length >= 0.0) {
            return Err(Error::InvalidArgument(
                "arc needs a finite start and nonnegative length",
            ));
        }
        Ok(Self {
            start: reduce_unit(start),
            length,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn contains(&self, y: f64) -> bool {
        self.length >= 1.0 || reduce_unit(y - self.start) < self.length
    }
}

/// `|{1 ≤ n ≤ N : T^{⌊P(n)⌋} x_0 ∈ A}| / N` at every scale, `A` a product of arcs.
pub fn equidistribution_trace(
    system: &TorusSystem,
    family: &[HardyFunction],
    x0: &[f64],
    arcs: &[TorusArc],
    scales: &[u64],
) -> Result<Vec<f64>> {
    check_family(system.dim(), family, x0)?;
    if arcs.len() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            found: arcs.len(),
        });
    }
    let top = check_scales(scales)?;
    let table = OrbitTable::new(family, top)?;
    let base: Vec<f64> = x0.iter().map(|x| reduce_unit(*x)).collect();
    let mut y = base.clone();
    let mut hits = 0u64;
    let mut out = Vec::with_capacity(scales.len());
    let mut next = scales.iter().peekable();
    for n in 1..=top {
        system.shift(&base, &table, n, &mut y);
        if arcs.iter().zip(&y).all(|(a, yi)| a.contains(*yi)) {
            hits += 1;
        }
        if next.peek() == Some(&&n) {
            out.push(hits as f64 / n as f64);
            next.next();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub variation: VariationResult,
    /// `(δ, N_δ)`.
    pub jumps: Vec<(f64, usize)>,
    /// Mean of the last quarter of the trace.
    pub limit: Complex64,
    /// `N_δ · δ^{2.5}` per δ.
    pub ratios: Vec<f64>,
}

pub fn convergence_diagnostics(trace: &AverageTrace, r: f64, deltas: &[f64]) -> Result<Diagnostics> {
    if !(r > 2.0) {
        return Err(Error::Domain {
            what: "diagnostics need r > 2",
            value: r,
        });
    }
    let seq = trace.to_sequence()?;
    let variation = vr_norm(&seq, r)?;
    let jumps = deltas
        .iter()
        .map(|&d| Ok((d, jump_count(&seq, d)?)))
        .collect::<Result<Vec<_>>>()?;
    let n = trace.values.len();
    let tail = &trace.values[n - n.div_ceil(4)..];
    let mut acc = ComplexSum::new();
    for z in tail {
        acc.add(*z);
    }
    let limit = acc.value() / tail.len() as f64;
    let ratios = jumps.iter().map(|(d, c)| *c as f64 * libm::pow(*d, 2.5)).collect();
    Ok(Diagnostics {
        variation,
        jumps,
        limit,
        ratios,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaleSet {
    /// Greedy `λ`-lacunary scales up to `n_max`.
    Lacunary { lambda: f64, n_max: u64 },
    /// Every `N ≤ n_max`.
    All { n_max: u64 },
}

impl ScaleSet {
    /// The scales, all at least 2.
    pub fn scales(&self) -> Result<Vec<u64>> {
        let v = match *self {
            ScaleSet::Lacunary { lambda, n_max } => lacunary_subset(n_max, lambda)?,
            ScaleSet::All { n_max } => (1..=n_max).collect(),
        };
        let v: Vec<u64> = v.into_iter().filter(|n| *n >= 2).collect();
        if v.is_empty() {
            return Err(Error::InvalidArgument("scale set has no scale >= 2"));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpRow {
    pub delta: f64,
    pub count: usize,
    pub vr: f64,
    pub limit: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpReport {
    pub rows: Vec<JumpRow>,
    /// Least-squares slope of `log N_δ` against `log δ` over the nonzero
    /// counts; `None` with fewer than two.
    pub slope: Option<f64>,
}

/// Jump counts of the averages `m_{N;Z}(ξ)` (all `n ≤ N`) over a scale set.
///
/// Lacunary runs need the family to lie in `P`; runs over every scale need
/// `P'`.
pub fn jump_experiment(
    family: &[HardyFunction],
    xi: &TorusPoint,
    scale_set: ScaleSet,
    deltas: &[f64],
    r: f64,
) -> Result<JumpReport> {
    let class = classify_family(family);
    match (scale_set, class.verdict) {
        (_, Verdict::NotMember) => {
            return Err(Error::ClassificationMismatch("family is not in the admissible class"));
        }
        (ScaleSet::All { .. }, Verdict::MemberOfP) => {
            return Err(Error::ClassificationMismatch(
                "every-scale runs need a family of pure non-integer powers",
            ));
        }
        _ => {}
    }
    if xi.dim() != family.len() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            found: xi.dim(),
        });
    }
    if deltas.iter().any(|d| !(*d > 0.0)) || deltas.is_empty() {
        return Err(Error::InvalidArgument("deltas must be positive"));
    }
    let scales = scale_set.scales()?;
    let table = OrbitTable::new(family, scales[scales.len() - 1])?;
    let values = table.trace(xi, &scales, false)?;
    let trace = AverageTrace {
        scales,
        values,
        basepoint: Vec::new(),
    };
    let diag = convergence_diagnostics(&trace, r, deltas)?;
    let rows = diag
        .jumps
        .iter()
        .map(|(d, c)| JumpRow {
            delta: *d,
            count: *c,
            vr: diag.variation.value,
            limit: diag.limit,
        })
        .collect::<Vec<_>>();
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|row| row.count > 0)
        .map(|row| (row.delta, row.count as f64))
        .unzip();
    let slope = loglog_slope(&xs, &ys);
    Ok(JumpReport { rows, slope })
}

#[cfg(test)]
mod tests;
