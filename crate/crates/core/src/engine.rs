//! Deterministic parallel Monte Carlo runner.
//!
//! A cell is one `(law, n, query)` combination estimated from `M`
//! replications. Replication `r` of cell `c` always draws from the stream
//! `derive_stream(base_seed, c, r)`, whatever thread runs it, and the
//! per-replication results are reduced in replication order after
//! collection. Output is therefore bit-identical for any worker count.
//!
//! Sweeps and crossover searches use the sample size itself as the cell id,
//! so extending a grid never perturbs cells that were already there, and two
//! laws compared at the same `n` share their stream ids.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Family, Sampler};
use crate::error::{Error, Result};
use crate::reference::{limit_moments, MomentQuadruple};
use crate::rng::RngState;
use crate::stats::{compute_stats, count_outliers, self_normalized, OutlierQuery, SConvention};

/// Replication count used when none is given.
pub const DEFAULT_REPLICATIONS: usize = 1500;

/// Consecutive flipped grid points required before a crossover is accepted.
pub const DEFAULT_PERSISTENCE: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: DistributionSpec,
    pub n_grid: Vec<usize>,
    pub query: OutlierQuery,
    pub replications: usize,
    pub base_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.query.validate()?;
        if self.n_grid.is_empty() {
            return Err(Error::InvalidConfig("n grid is empty".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!(
                "every sample size must be at least 2, got {n}"
            )));
        }
        if let Some(w) = self.n_grid.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(format!(
                "n grid must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One Monte Carlo cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub spec: DistributionSpec,
    pub n: usize,
    pub k: f64,
    pub centered: bool,
    pub convention: SConvention,
    pub replications: usize,
    /// Mean over replications of the per-sample outlier fraction.
    pub p_hat: f64,
    /// Sample standard deviation of the fractions over `sqrt(M)`; zero for `M = 1`.
    pub stderr: f64,
    pub base_seed: u64,
    pub cell_id: u64,
}

impl EstimateRow {
    pub fn family(&self) -> &'static str {
        self.spec.family.name()
    }

    pub fn alpha(&self) -> Option<f64> {
        self.spec.family.stability_index()
    }

    pub fn query(&self) -> OutlierQuery {
        OutlierQuery {
            k: self.k,
            centered: self.centered,
            convention: self.convention,
        }
    }
}

/// Analytic against simulated moments of `S_n / V_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub alpha: f64,
    pub n: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub analytic: MomentQuadruple,
    pub estimated: [f64; 4],
    pub stderrs: [f64; 4],
}

impl MomentReport {
    /// `(estimated − analytic) / stderr` per moment; zero when both agree exactly.
    pub fn z_scores(&self) -> [f64; 4] {
        let analytic = self.analytic.as_array();
        std::array::from_fn(|j| {
            let diff = self.estimated[j] - analytic[j];
            if diff == 0.0 {
                0.0
            } else {
                diff / self.stderrs[j]
            }
        })
    }
}

/// Mean and standard error of `values`, reduced in slice order.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return (first, 0.0);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (m - 1) as f64).sqrt();
    (mean, sd / (m as f64).sqrt())
}

/// The sample drawn by one replication of one cell.
pub fn draw_replication(
    spec: &DistributionSpec,
    n: usize,
    base_seed: u64,
    cell_id: u64,
    replication: u64,
) -> Result<Vec<f64>> {
    let mut rng = RngState::for_replication(base_seed, cell_id, replication);
    spec.sampler()?.sample(&mut rng, n)
}

fn replication_fraction(
    sampler: &Sampler,
    buf: &mut [f64],
    query: &OutlierQuery,
    base_seed: u64,
    cell_id: u64,
    replication: u64,
) -> Result<f64> {
    let mut rng = RngState::for_replication(base_seed, cell_id, replication);
    sampler.fill(&mut rng, buf);
    let stats = compute_stats(buf, query.convention)?;
    Ok(count_outliers(buf, &stats, query) as f64 / buf.len() as f64)
}

/// Estimates `P(|X| > k s)` (or the centered event) at sample size `n`.
pub fn run_cell(
    spec: &DistributionSpec,
    n: usize,
    query: &OutlierQuery,
    replications: usize,
    base_seed: u64,
    cell_id: u64,
) -> Result<EstimateRow> {
    let sampler = spec.sampler()?;
    query.validate()?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sample size must be at least 2, got {n}"
        )));
    }
    if replications == 0 {
        return Err(Error::InvalidArgument(
            "replications must be at least 1".into(),
        ));
    }

    let fractions = (0..replications as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, r| replication_fraction(&sampler, buf, query, base_seed, cell_id, r),
        )
        .collect::<Result<Vec<f64>>>()?;
    let (p_hat, stderr) = mean_and_stderr(&fractions);

    Ok(EstimateRow {
        spec: *spec,
        n,
        k: query.k,
        centered: query.centered,
        convention: query.convention,
        replications,
        p_hat,
        stderr,
        base_seed,
        cell_id,
    })
}

/// One row per grid point; cell ids are the sample sizes.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<EstimateRow>> {
    config.validate()?;
    config
        .n_grid
        .iter()
        .enumerate()
        .map(|(index, &n)| {
            run_cell(
                &config.spec,
                n,
                &config.query,
                config.replications,
                config.base_seed,
                n as u64,
            )
            .map_err(|e| Error::Cell {
                index,
                n,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Parameters of a crossover search between two laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverSearch {
    pub spec_a: DistributionSpec,
    pub spec_b: DistributionSpec,
    pub query: OutlierQuery,
    pub n_lo: usize,
    pub n_hi: usize,
    /// Refinement grid spacing; candidate sizes are `n_lo + i · step`.
    pub step: usize,
    pub replications: usize,
    pub base_seed: u64,
    /// Consecutive flipped grid points that make a flip durable.
    pub persistence: usize,
}

impl CrossoverSearch {
    pub fn new(
        spec_a: DistributionSpec,
        spec_b: DistributionSpec,
        k: f64,
        n_lo: usize,
        n_hi: usize,
        replications: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            spec_a,
            spec_b,
            query: OutlierQuery::new(k),
            n_lo,
            n_hi,
            step: 100,
            replications,
            base_seed,
            persistence: DEFAULT_PERSISTENCE,
        }
    }

    pub fn with_step(mut self, step: usize) -> Self {
        self.step = step;
        self
    }

    fn validate(&self) -> Result<()> {
        self.spec_a.validate()?;
        self.spec_b.validate()?;
        self.query.validate()?;
        if self.n_lo < 2 || self.n_hi <= self.n_lo {
            return Err(Error::InvalidArgument(format!(
                "need 2 <= n_lo < n_hi, got [{}, {}]",
                self.n_lo, self.n_hi
            )));
        }
        if self.step == 0 || self.replications == 0 || self.persistence == 0 {
            return Err(Error::InvalidArgument(
                "step, replications and persistence must be positive".into(),
            ));
        }
        Ok(())
    }

    fn grid_len(&self) -> usize {
        (self.n_hi - self.n_lo).div_ceil(self.step) + 1
    }

    fn grid(&self, i: usize) -> usize {
        (self.n_lo + i * self.step).min(self.n_hi)
    }
}

/// Both estimates at one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverPoint {
    pub n: usize,
    pub p_a: f64,
    pub stderr_a: f64,
    pub p_b: f64,
    pub stderr_b: f64,
}

impl CrossoverPoint {
    pub fn diff(&self) -> f64 {
        self.p_a - self.p_b
    }

    pub fn combined_stderr(&self) -> f64 {
        self.stderr_a.hypot(self.stderr_b)
    }

    pub fn flipped(&self) -> bool {
        self.diff() < 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverReport {
    /// Smallest refinement point found where `p_a < p_b` durably.
    pub n_star: usize,
    /// Last unflipped and first flipped grid points.
    pub bracket: (usize, usize),
    /// Every evaluated point, ordered by `n`.
    pub points: Vec<CrossoverPoint>,
    pub step: usize,
    pub persistence: usize,
}

/// Locates the sample size where `P_A(|X| > k s)` drops below `P_B(...)`.
///
/// Requires `p_a > p_b` at `n_lo` and `p_a < p_b` at `n_hi`, each by at
/// least two combined standard errors. Bisects on the refinement grid; a
/// candidate is accepted only when it and the next `persistence − 1` grid
/// points are all flipped, otherwise the search restarts above the first
/// unflipped point.
pub fn find_crossover(search: &CrossoverSearch) -> Result<CrossoverReport> {
    search.validate()?;
    let mut cache: BTreeMap<usize, CrossoverPoint> = BTreeMap::new();
    let mut eval = |n: usize| -> Result<CrossoverPoint> {
        if let Some(p) = cache.get(&n) {
            return Ok(*p);
        }
        let a = run_cell(
            &search.spec_a,
            n,
            &search.query,
            search.replications,
            search.base_seed,
            n as u64,
        )?;
        let b = run_cell(
            &search.spec_b,
            n,
            &search.query,
            search.replications,
            search.base_seed,
            n as u64,
        )?;
        let p = CrossoverPoint {
            n,
            p_a: a.p_hat,
            stderr_a: a.stderr,
            p_b: b.p_hat,
            stderr_b: b.stderr,
        };
        cache.insert(n, p);
        Ok(p)
    };

    let lo = eval(search.n_lo)?;
    let hi = eval(search.n_hi)?;
    for (point, want_positive) in [(lo, true), (hi, false)] {
        let d = if want_positive {
            point.diff()
        } else {
            -point.diff()
        };
        if d <= 0.0 {
            return Err(Error::NoCrossover(format!(
                "expected p_a {} p_b at n = {}, got {:.6e} vs {:.6e}",
                if want_positive { ">" } else { "<" },
                point.n,
                point.p_a,
                point.p_b
            )));
        }
        if d < 2.0 * point.combined_stderr() {
            return Err(Error::InsufficientPrecision(format!(
                "gap {:.3e} at n = {} is under 2 combined stderr ({:.3e}); raise M",
                point.diff(),
                point.n,
                point.combined_stderr()
            )));
        }
    }

    let last = search.grid_len() - 1;
    let mut lo_i = 0;
    'search: loop {
        let mut hi_i = last;
        while hi_i - lo_i > 1 {
            let mid = lo_i + (hi_i - lo_i) / 2;
            if eval(search.grid(mid))?.flipped() {
                hi_i = mid;
            } else {
                lo_i = mid;
            }
        }
        for j in 1..search.persistence {
            let idx = hi_i + j;
            if idx > last {
                break;
            }
            if !eval(search.grid(idx))?.flipped() {
                lo_i = idx;
                continue 'search;
            }
        }
        return Ok(CrossoverReport {
            n_star: search.grid(hi_i),
            bracket: (search.grid(lo_i), search.grid(hi_i)),
            points: cache.into_values().collect(),
            step: search.step,
            persistence: search.persistence,
        });
    }
}

/// Simulated `E[(S_n/V_n)^{2j}]`, `j = 1..4`, next to the limit values.
pub fn estimate_limit_moments(
    spec: &DistributionSpec,
    n: usize,
    replications: usize,
    base_seed: u64,
) -> Result<MomentReport> {
    let alpha = match spec.family {
        Family::SymmetricStable { alpha } => alpha,
        Family::Gaussian => 2.0,
        Family::Cauchy => 1.0,
        other => {
            return Err(Error::UnsupportedFamily {
                op: "limit moments",
                family: other.name().into(),
            })
        }
    };
    let analytic = limit_moments(alpha)?;
    let sampler = spec.sampler()?;
    if n < 100 {
        return Err(Error::InvalidArgument(format!(
            "limit moments need n >= 100, got {n}"
        )));
    }
    if replications < 1000 {
        return Err(Error::InvalidArgument(format!(
            "limit moments need at least 1000 replications, got {replications}"
        )));
    }

    let powers = (0..replications as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, r| -> Result<[f64; 4]> {
                let mut rng = RngState::for_replication(base_seed, n as u64, r);
                sampler.fill(&mut rng, buf);
                let t2 = self_normalized(buf)?.powi(2);
                Ok([t2, t2 * t2, t2 * t2 * t2, t2 * t2 * t2 * t2])
            },
        )
        .collect::<Result<Vec<_>>>()?;

    let mut estimated = [0.0; 4];
    let mut stderrs = [0.0; 4];
    let mut column = Vec::with_capacity(replications);
    for j in 0..4 {
        column.clear();
        column.extend(powers.iter().map(|p| p[j]));
        (estimated[j], stderrs[j]) = mean_and_stderr(&column);
    }
    Ok(MomentReport {
        alpha,
        n,
        replications,
        base_seed,
        analytic,
        estimated,
        stderrs,
    })
}
