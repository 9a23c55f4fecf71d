//! Samplers and closed-form cdfs for the laws under study.
//!
//! Stable laws use the Samorodnitsky–Taqqu 1-parametrization, with
//! characteristic function `exp(-|σt|^α (1 - iβ sign(t) tan(πα/2)))` for
//! α ≠ 1, sampled by the Chambers–Mallows–Stuck transform. Every stable draw
//! consumes exactly two uniforms. Under this parametrization the α = 2 law is
//! Gaussian with variance `2σ²`, while [`Family::Gaussian`] has variance `σ²`.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Cauchy,
    SymmetricStable { alpha: f64 },
    SkewedStable { alpha: f64, beta: f64 },
    Laplace,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Cauchy => "cauchy",
            Family::SymmetricStable { .. } => "stable",
            Family::SkewedStable { .. } => "skewed",
            Family::Laplace => "laplace",
        }
    }

    /// Stability index of the law, when it is stable (Gaussian = 2, Cauchy = 1).
    pub fn stability_index(&self) -> Option<f64> {
        match *self {
            Family::Gaussian => Some(2.0),
            Family::Cauchy => Some(1.0),
            Family::SymmetricStable { alpha } | Family::SkewedStable { alpha, .. } => Some(alpha),
            Family::Laplace => None,
        }
    }

    pub fn skewness(&self) -> f64 {
        match *self {
            Family::SkewedStable { beta, .. } => beta,
            _ => 0.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Family::SkewedStable { .. })
    }
}

/// A sampling law: family plus location and scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub location: f64,
    #[serde(default = "unit")]
    pub scale: f64,
}

fn unit() -> f64 {
    1.0
}

impl DistributionSpec {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            location: 0.0,
            scale: 1.0,
        }
    }

    pub fn gaussian() -> Self {
        Self::new(Family::Gaussian)
    }

    pub fn cauchy() -> Self {
        Self::new(Family::Cauchy)
    }

    pub fn laplace() -> Self {
        Self::new(Family::Laplace)
    }

    pub fn symmetric_stable(alpha: f64) -> Self {
        Self::new(Family::SymmetricStable { alpha })
    }

    pub fn skewed_stable(alpha: f64, beta: f64) -> Self {
        Self::new(Family::SkewedStable { alpha, beta })
    }

    pub fn with_location(mut self, location: f64) -> Self {
        self.location = location;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "scale must be positive and finite, got {}",
                self.scale
            )));
        }
        if !self.location.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "location must be finite, got {}",
                self.location
            )));
        }
        match self.family {
            Family::SymmetricStable { alpha } => check_alpha(alpha),
            Family::SkewedStable { alpha, beta } => {
                check_alpha(alpha)?;
                if !(-1.0..=1.0).contains(&beta) {
                    return Err(Error::InvalidSpec(format!(
                        "beta must lie in [-1, 1], got {beta}"
                    )));
                }
                if beta == 0.0 {
                    return Err(Error::InvalidSpec(
                        "beta = 0 is a symmetric stable law; use the stable family".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Validated, precomputed sampler for this law.
    pub fn sampler(&self) -> Result<Sampler> {
        Sampler::new(*self)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "alpha must lie in (0, 2], got {alpha}"
        )))
    }
}

impl fmt::Display for DistributionSpec {
    /// Same grammar [`FromStr`] accepts: `cauchy`, `stable:1.8`,
    /// `skewed:1.5:0.8`, with an optional `@location,scale` suffix when either
    /// differs from the default.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::SymmetricStable { alpha } => write!(f, "stable:{alpha}")?,
            Family::SkewedStable { alpha, beta } => write!(f, "skewed:{alpha}:{beta}")?,
            other => f.write_str(other.name())?,
        }
        if self.location != 0.0 || self.scale != 1.0 {
            write!(f, "@{},{}", self.location, self.scale)?;
        }
        Ok(())
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (law, loc_scale) = match s.split_once('@') {
            Some((law, rest)) => (law, Some(rest)),
            None => (s, None),
        };
        let mut parts = law.split(':').map(str::trim);
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let params = parts
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::InvalidSpec(format!("bad parameter {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let arity = |want: usize| -> Result<()> {
            if params.len() == want {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{name} takes {want} parameter(s), got {} in {s:?}",
                    params.len()
                )))
            }
        };
        let family = match name.as_str() {
            "gaussian" | "normal" => {
                arity(0)?;
                Family::Gaussian
            }
            "cauchy" => {
                arity(0)?;
                Family::Cauchy
            }
            "laplace" => {
                arity(0)?;
                Family::Laplace
            }
            "stable" => {
                arity(1)?;
                Family::SymmetricStable { alpha: params[0] }
            }
            "skewed" => {
                arity(2)?;
                Family::SkewedStable {
                    alpha: params[0],
                    beta: params[1],
                }
            }
            _ => return Err(Error::InvalidSpec(format!("unknown family {name:?}"))),
        };
        let mut spec = DistributionSpec::new(family);
        if let Some(rest) = loc_scale {
            let (loc, scale) = rest
                .split_once(',')
                .ok_or_else(|| Error::InvalidSpec(format!("expected @location,scale in {s:?}")))?;
            spec.location = loc
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad location in {s:?}")))?;
            spec.scale = scale
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad scale in {s:?}")))?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy)]
enum Kernel {
    BoxMuller,
    Tangent,
    InverseLaplace,
    /// CMS, α ≠ 1.
    Stable {
        alpha: f64,
        inv_alpha: f64,
        /// (1 - α) / α
        tail_exp: f64,
        /// arctan(β tan(πα/2)) / α
        shift: f64,
        /// (1 + β² tan²(πα/2))^(1/(2α))
        factor: f64,
    },
    /// CMS, α = 1.
    StableUnit {
        beta: f64,
        drift: f64,
    },
}

/// Prepared sampler for one [`DistributionSpec`].
#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    spec: DistributionSpec,
    kernel: Kernel,
}

impl Sampler {
    pub fn new(spec: DistributionSpec) -> Result<Self> {
        spec.validate()?;
        let kernel = match spec.family {
            Family::Gaussian => Kernel::BoxMuller,
            Family::Cauchy => Kernel::Tangent,
            Family::Laplace => Kernel::InverseLaplace,
            Family::SymmetricStable { alpha } => stable_kernel(alpha, 0.0, spec.scale),
            Family::SkewedStable { alpha, beta } => stable_kernel(alpha, beta, spec.scale),
        };
        Ok(Self { spec, kernel })
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    /// Overwrites `out` with independent draws.
    ///
    /// Gaussian draws are produced in Box–Muller pairs; for an odd length the
    /// second member of the last pair is discarded.
    pub fn fill(&self, rng: &mut RngState, out: &mut [f64]) {
        let loc = self.spec.location;
        let scale = self.spec.scale;
        match self.kernel {
            Kernel::BoxMuller => {
                let mut pairs = out.chunks_exact_mut(2);
                for pair in &mut pairs {
                    let (a, b) = box_muller(rng);
                    pair[0] = loc + scale * a;
                    pair[1] = loc + scale * b;
                }
                if let [last] = pairs.into_remainder() {
                    *last = loc + scale * box_muller(rng).0;
                }
            }
            Kernel::Tangent => {
                for x in out.iter_mut() {
                    *x = loc + scale * (PI * (rng.open01() - 0.5)).tan();
                }
            }
            Kernel::InverseLaplace => {
                for x in out.iter_mut() {
                    let u = rng.open01();
                    let z = if u < 0.5 {
                        (2.0 * u).ln()
                    } else {
                        -(2.0 * (1.0 - u)).ln()
                    };
                    *x = loc + scale * z;
                }
            }
            Kernel::Stable {
                alpha,
                inv_alpha,
                tail_exp,
                shift,
                factor,
            } => {
                for x in out.iter_mut() {
                    let v = PI * (rng.open01() - 0.5);
                    let w = -rng.open01().ln();
                    let phase = alpha * (v + shift);
                    let ratio = ((v - phase).cos() / w).max(f64::MIN_POSITIVE);
                    let z = factor * phase.sin() / v.cos().powf(inv_alpha) * ratio.powf(tail_exp);
                    *x = loc + scale * z;
                }
            }
            Kernel::StableUnit { beta, drift } => {
                for x in out.iter_mut() {
                    let v = PI * (rng.open01() - 0.5);
                    let w = -rng.open01().ln();
                    let lever = FRAC_PI_2 + beta * v;
                    let z = if beta == 0.0 {
                        v.tan()
                    } else {
                        let log_arg = (FRAC_PI_2 * w * v.cos() / lever).max(f64::MIN_POSITIVE);
                        FRAC_2_PI * (lever * v.tan() - beta * log_arg.ln())
                    };
                    *x = loc + scale * z + drift;
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut RngState, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::InvalidArgument(
                "sample count must be at least 1".into(),
            ));
        }
        let mut out = vec![0.0; count];
        self.fill(rng, &mut out);
        Ok(out)
    }
}

fn stable_kernel(alpha: f64, beta: f64, scale: f64) -> Kernel {
    if alpha == 1.0 {
        return Kernel::StableUnit {
            beta,
            drift: FRAC_2_PI * beta * scale * scale.ln(),
        };
    }
    let skew = beta * (PI * alpha / 2.0).tan();
    Kernel::Stable {
        alpha,
        inv_alpha: 1.0 / alpha,
        tail_exp: (1.0 - alpha) / alpha,
        shift: skew.atan() / alpha,
        factor: (1.0 + skew * skew).powf(1.0 / (2.0 * alpha)),
    }
}

#[inline]
fn box_muller(rng: &mut RngState) -> (f64, f64) {
    let radius = (-2.0 * rng.open01().ln()).sqrt();
    let (s, c) = (TAU * rng.open01()).sin_cos();
    (radius * c, radius * s)
}

/// `count` independent draws from `spec`.
pub fn sample(spec: &DistributionSpec, rng: &mut RngState, count: usize) -> Result<Vec<f64>> {
    Sampler::new(*spec)?.sample(rng, count)
}

/// Closed-form cdf; stable laws have none and are rejected.
pub fn cdf(spec: &DistributionSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    let z = (x - spec.location) / spec.scale;
    match spec.family {
        Family::Gaussian => Ok(0.5 * erfc(-z / SQRT_2)),
        Family::Cauchy => Ok(0.5 + z.atan() / PI),
        Family::Laplace => Ok(if z < 0.0 {
            0.5 * z.exp()
        } else {
            1.0 - 0.5 * (-z).exp()
        }),
        family @ (Family::SymmetricStable { .. } | Family::SkewedStable { .. }) => {
            Err(Error::UnsupportedFamily {
                op: "cdf",
                family: family.name().into(),
            })
        }
    }
}
