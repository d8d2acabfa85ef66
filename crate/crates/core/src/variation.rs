//! r-variation norms, δ-jump counts, lacunary scale sets and the long/short
//! variation split, each with an exhaustive oracle for small inputs.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest length accepted by the exhaustive oracles.
pub const BRUTEFORCE_CAP: usize = 18;

/// Complex values `a_N` indexed by strictly increasing scales `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedSequence {
    indices: Vec<u64>,
    values: Vec<Complex64>,
}

impl IndexedSequence {
    pub fn new(indices: Vec<u64>, values: Vec<Complex64>) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                found: values.len(),
            });
        }
        if indices.is_empty() {
            return Err(Error::InvalidArgument("sequence must be nonempty"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("indices must be strictly increasing"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("values must be finite"));
        }
        Ok(Self { indices, values })
    }

    /// Indexed by `1, 2, …, n`.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        let indices = (1..=values.len() as u64).collect();
        Self::new(indices, values)
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_values(values.iter().map(|x| Complex64::new(*x, 0.0)).collect())
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The subsequence at the scales accepted by `keep`, if any.
    pub fn restrict<F: Fn(u64) -> bool>(&self, keep: F) -> Option<Self> {
        let (indices, values): (Vec<u64>, Vec<Complex64>) = self
            .indices
            .iter()
            .zip(&self.values)
            .filter(|(n, _)| keep(**n))
            .map(|(n, v)| (*n, *v))
            .unzip();
        if indices.is_empty() {
            None
        } else {
            Some(Self { indices, values })
        }
    }

    fn sup(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationResult {
    pub value: f64,
    pub sup_term: f64,
    pub jump_term: f64,
    /// Scales of an optimal chain.
    pub witness: Vec<u64>,
}

fn check_r(r: f64) -> Result<()> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain {
            what: "variation exponent must satisfy 1 <= r < inf",
            value: r,
        });
    }
    Ok(())
}

#[inline]
fn powr(d: f64, r: f64) -> f64 {
    if r == 1.0 {
        d
    } else if r == 2.0 {
        d * d
    } else {
        libm::pow(d, r)
    }
}

/// `V^r(a) = sup_N |a_N| + sup_{N_0 < … < N_J} (Σ_j |a_{N_{j+1}} − a_{N_j}|^r)^{1/r}`.
///
/// `best[i]` is the largest `r`-th power sum of a chain starting at `i`; among
/// optimal chains the lexicographically smallest one is returned.
pub fn vr_norm(seq: &IndexedSequence, r: f64) -> Result<VariationResult> {
    check_r(r)?;
    let a = &seq.values;
    let n = a.len();
    let jump = |i: usize, j: usize| powr((a[j] - a[i]).norm(), r);
    let mut best = vec![0.0f64; n];
    for i in (0..n.saturating_sub(1)).rev() {
        let mut b = 0.0f64;
        for j in i + 1..n {
            let v = jump(i, j) + best[j];
            if v > b {
                b = v;
            }
        }
        best[i] = b;
    }
    let total = best.iter().copied().fold(0.0, f64::max);
    let mut i = best.iter().position(|b| *b == total).unwrap_or(0);
    let mut witness = vec![seq.indices[i]];
    while best[i] > 0.0 {
        let j = (i + 1..n)
            .find(|&j| jump(i, j) + best[j] == best[i])
            .expect("chain reconstruction");
        witness.push(seq.indices[j]);
        i = j;
    }
    let sup_term = seq.sup();
    let jump_term = if total == 0.0 { 0.0 } else { libm::pow(total, 1.0 / r) };
    Ok(VariationResult {
        value: sup_term + jump_term,
        sup_term,
        jump_term,
        witness,
    })
}

/// [`vr_norm`] by enumerating every chain. Length at most [`BRUTEFORCE_CAP`].
pub fn vr_norm_bruteforce(seq: &IndexedSequence, r: f64) -> Result<f64> {
    check_r(r)?;
    let n = seq.len();
    if n > BRUTEFORCE_CAP {
        return Err(Error::LengthCap {
            len: n,
            cap: BRUTEFORCE_CAP,
        });
    }
    let a = &seq.values;
    let mut total = 0.0f64;
    for mask in 1u32..(1 << n) {
        let mut prev: Option<usize> = None;
        let mut s = 0.0;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                if let Some(p) = prev {
                    s += powr((a[i] - a[p]).norm(), r);
                }
                prev = Some(i);
            }
        }
        total = total.max(s);
    }
    let jump = if total == 0.0 { 0.0 } else { libm::pow(total, 1.0 / r) };
    Ok(seq.sup() + jump)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain {
            what: "delta must be positive",
            value: delta,
        });
    }
    Ok(())
}

/// `N_δ`: the longest chain `N_0 < … < N_J` with every step
/// `|a_{N_{j+1}} − a_{N_j}| ≥ δ`.
///
/// Left-to-right greedy anchoring is not optimal: on `(0, 1, 1.8, 0.7)` with
/// `δ = 1` it finds one jump while `0 → 1.8 → 0.7` has two. This is an exact
/// longest-path computation instead; `tail[j] = max_{k ≥ j} count[k]` is
/// nonincreasing, which lets the inner scan stop early.
pub fn jump_count(seq: &IndexedSequence, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    let a = &seq.values;
    let n = a.len();
    let mut count = vec![0usize; n];
    let mut tail = vec![0usize; n + 1];
    for i in (0..n).rev() {
        let mut c = 0usize;
        for j in i + 1..n {
            if tail[j] < c {
                break;
            }
            if count[j] >= c && (a[j] - a[i]).norm() >= delta {
                c = count[j] + 1;
            }
        }
        count[i] = c;
        tail[i] = tail[i + 1].max(c);
    }
    Ok(tail[0])
}

/// [`jump_count`] by enumerating every chain. Length at most [`BRUTEFORCE_CAP`].
pub fn jump_count_bruteforce(seq: &IndexedSequence, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    let n = seq.len();
    if n > BRUTEFORCE_CAP {
        return Err(Error::LengthCap {
            len: n,
            cap: BRUTEFORCE_CAP,
        });
    }
    let a = &seq.values;
    let mut best = 0usize;
    'masks: for mask in 1u32..(1 << n) {
        let jumps = mask.count_ones() as usize - 1;
        if jumps <= best {
            continue;
        }
        let mut prev: Option<usize> = None;
        for i in 0..n {
            if mask & (1 << i) != 0 {
                if let Some(p) = prev {
                    if (a[i] - a[p]).norm() < delta {
                        continue 'masks;
                    }
                }
                prev = Some(i);
            }
        }
        best = jumps;
    }
    Ok(best)
}

/// Greedy `λ`-lacunary scales: `1`, then repeatedly the smallest integer
/// strictly greater than `λ` times the previous one, up to `n_max`.
pub fn lacunary_subset(n_max: u64, lambda: f64) -> Result<Vec<u64>> {
    if !(lambda > 1.0) || !lambda.is_finite() {
        return Err(Error::Domain {
            what: "lacunarity must exceed 1",
            value: lambda,
        });
    }
    let mut out = Vec::new();
    let mut cur = 1u64;
    while cur <= n_max {
        out.push(cur);
        let target = lambda * cur as f64;
        if target >= u64::MAX as f64 {
            break;
        }
        let mut next = libm::floor(target) as u64 + 1;
        while next as f64 <= target {
            next += 1;
        }
        cur = next;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LongShort {
    pub long: f64,
    pub short: f64,
    pub full: f64,
}

/// Splits `V^r` over a contiguous range of scales `[2^a, 2^b]` into the
/// variation along the dyadic scales and the square sum of the `V^2` norms
/// of the blocks `I_k = [2^k, 2^{k+1}]`.
pub fn long_short_split(seq: &IndexedSequence, r: f64) -> Result<LongShort> {
    if !(r > 2.0) {
        return Err(Error::Domain {
            what: "long/short split needs r > 2",
            value: r,
        });
    }
    let idx = seq.indices();
    let (first, last) = (idx[0], idx[idx.len() - 1]);
    if !first.is_power_of_two() || !last.is_power_of_two() || last <= first {
        return Err(Error::IncompleteCoverage(
            "scales must run between two distinct powers of two",
        ));
    }
    if (last - first + 1) as usize != idx.len() {
        return Err(Error::IncompleteCoverage("scales must be contiguous"));
    }
    let full = vr_norm(seq, r)?.value;
    let dyadic = seq.restrict(|n| n.is_power_of_two()).expect("endpoints are dyadic");
    let long = vr_norm(&dyadic, r)?.value;
    let mut sq = 0.0;
    let mut lo = first;
    while lo < last {
        let hi = 2 * lo;
        let block = seq.restrict(|n| n >= lo && n <= hi).expect("block is covered");
        let v = vr_norm(&block, 2.0)?.value;
        sq += v * v;
        lo = hi;
    }
    Ok(LongShort {
        long,
        short: libm::sqrt(sq),
        full,
    })
}
