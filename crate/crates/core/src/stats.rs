//! Per-sample statistics: the dispersion `s`, outlier counts, self-normalized
//! sums and symmetrization by random pairing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngState;

/// How the dispersion `s` is derived from `Σx²/n − mean²`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SConvention {
    /// `sqrt(Σx²/n − mean²)`.
    #[default]
    SqrtBiased,
    /// `sqrt(n / (n − 1))` times the biased value.
    SqrtUnbiased,
    /// `Σx²/n − mean²` with no square root. Not scale-equivariant.
    RawVariance,
}

impl SConvention {
    pub const ALL: [SConvention; 3] = [
        SConvention::SqrtBiased,
        SConvention::SqrtUnbiased,
        SConvention::RawVariance,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SConvention::SqrtBiased => "sqrt-biased",
            SConvention::SqrtUnbiased => "sqrt-unbiased",
            SConvention::RawVariance => "raw-variance",
        }
    }
}

impl fmt::Display for SConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SConvention::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown s convention {s:?}")))
    }
}

/// Which event is counted: `|x| > k s`, or `|x − mean| > k s` when centered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierQuery {
    pub k: f64,
    #[serde(default)]
    pub centered: bool,
    #[serde(default)]
    pub convention: SConvention,
}

impl OutlierQuery {
    pub fn new(k: f64) -> Self {
        Self {
            k,
            centered: false,
            convention: SConvention::SqrtBiased,
        }
    }

    pub fn centered(mut self, centered: bool) -> Self {
        self.centered = centered;
        self
    }

    pub fn with_convention(mut self, convention: SConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k.is_finite() && self.k > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "k must be positive and finite, got {}",
                self.k
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Dispersion under `convention`.
    pub s: f64,
    /// `sqrt(Σx²)`.
    pub v_n: f64,
    pub convention: SConvention,
}

/// Computes mean, dispersion and `V_n` in three passes.
///
/// Values are rescaled by a power of two near `max |x|` before squaring, so
/// heavy-tailed samples do not overflow and scaling the input by a power of
/// two scales every output exactly. A constant sample gets `s = 0` and its
/// own value as the mean.
pub fn compute_stats(sample: &[f64], convention: SConvention) -> Result<SampleStats> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooShort { needed: 2, got: n });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (index, &x) in sample.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { index });
        }
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let peak = lo.abs().max(hi.abs());
    if peak == 0.0 {
        return Ok(SampleStats {
            n,
            mean: 0.0,
            s: 0.0,
            v_n: 0.0,
            convention,
        });
    }
    let (down, up) = pow2_scaling(peak);
    let nf = n as f64;

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &x in sample {
        let y = x * down;
        sum += y;
        sum_sq += y * y;
    }
    let v_n = sum_sq.sqrt() * up;

    if lo == hi {
        return Ok(SampleStats {
            n,
            mean: lo,
            s: 0.0,
            v_n,
            convention,
        });
    }

    let scaled_mean = sum / nf;
    let centered_sq: f64 = sample
        .iter()
        .map(|&x| {
            let d = x * down - scaled_mean;
            d * d
        })
        .sum();
    let scaled_var = centered_sq / nf;
    let s = match convention {
        SConvention::SqrtBiased => scaled_var.sqrt() * up,
        SConvention::SqrtUnbiased => (scaled_var * nf / (nf - 1.0)).sqrt() * up,
        SConvention::RawVariance => scaled_var * up * up,
    };
    Ok(SampleStats {
        n,
        mean: scaled_mean * up,
        s,
        v_n,
        convention,
    })
}

/// `(2^-e, 2^e)` with `2^e` the power of two just above `peak`.
fn pow2_scaling(peak: f64) -> (f64, f64) {
    let e = peak.log2().ceil().clamp(-1000.0, 1000.0) as i32;
    (2f64.powi(-e), 2f64.powi(e))
}

/// Number of observations beyond `k · s`, strictly.
///
/// With `s = 0` the threshold is zero, so an observation counts exactly when
/// its compared magnitude is positive.
pub fn count_outliers(sample: &[f64], stats: &SampleStats, query: &OutlierQuery) -> usize {
    let threshold = query.k * stats.s;
    if query.centered {
        let mean = stats.mean;
        sample
            .iter()
            .filter(|&&x| (x - mean).abs() > threshold)
            .count()
    } else {
        sample.iter().filter(|&&x| x.abs() > threshold).count()
    }
}

/// `count_outliers / n` for `sample`, computing the statistics it needs.
pub fn outlier_fraction(sample: &[f64], query: &OutlierQuery) -> Result<f64> {
    let stats = compute_stats(sample, query.convention)?;
    Ok(count_outliers(sample, &stats, query) as f64 / sample.len() as f64)
}

/// `S_n / V_n = Σx / sqrt(Σx²)`.
pub fn self_normalized(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::SampleTooShort { needed: 1, got: 0 });
    }
    let mut peak = 0.0f64;
    for (index, &x) in sample.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { index });
        }
        peak = peak.max(x.abs());
    }
    if peak == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let (down, _) = pow2_scaling(peak);
    let (sum, sum_sq) = sample.iter().fold((0.0, 0.0), |(s, q), &x| {
        let y = x * down;
        (s + y, q + y * y)
    });
    Ok(sum / sum_sq.sqrt())
}

/// Differences `A_i − B_i` over a uniformly random split of `sample` into two
/// equal halves. For odd lengths one uniformly chosen element is dropped first.
pub fn symmetrize(sample: &[f64], rng: &mut RngState) -> Result<Vec<f64>> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooShort { needed: 2, got: n });
    }
    let mut pool = sample.to_vec();
    if n % 2 == 1 {
        let drop = rng.below(n);
        pool.swap_remove(drop);
    }
    // Fisher–Yates
    for i in (1..pool.len()).rev() {
        let j = rng.below(i + 1);
        pool.swap(i, j);
    }
    let (a, b) = pool.split_at(pool.len() / 2);
    Ok(a.iter().zip(b).map(|(x, y)| x - y).collect())
}
