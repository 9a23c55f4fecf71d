//! Subcommand implementations. Each returns a serializable report; `main`
//! decides where it is printed.

use std::fmt::Write as _;
use std::path::Path;

use outlierfreq_core::{
    compute_stats, count_outliers, draw_replication, estimate_limit_moments, find_crossover,
    run_cell, run_sweep, symmetrize, CrossoverPoint, CrossoverSearch, DistributionSpec,
    EstimateRow, ExperimentConfig, MomentReport, OutlierQuery, RngState, SConvention,
    EMPIRICAL_BAND,
};
use serde::Serialize;

use crate::config::SweepSettings;
use crate::error::{CliError, Result};
use crate::ingest::ReturnSeries;
use crate::manifest::RunManifest;
use crate::output::{csv_string, sweep_chart};

/// Stability indices of the `n = 3` tables.
pub const TABLE_ALPHAS: [f64; 5] = [1.0, 1.25, 1.5, 1.75, 2.0];
pub const TABLE_N: usize = 3;
/// Reference values of `P(|X| > 3s)` at `n = 3`, one per entry of [`TABLE_ALPHAS`].
pub const REFERENCE_K3: [f64; 5] = [0.035214, 0.044251, 0.0532881, 0.060860, 0.0690411];
/// Reference values of `P(|X| > 7s)` at `n = 3`.
pub const REFERENCE_K7: [f64; 5] = [0.0045115, 0.0034141, 0.0044689, 0.0053509, 0.010674];

/// Stream used by `ingest --symmetrize`.
pub const SYMMETRIZE_STREAM: u64 = 0x5359_4d4d;

#[derive(Debug, Clone, Serialize)]
pub struct TableCell {
    pub alpha: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub k: f64,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub cells: Vec<TableCell>,
}

impl TableReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "P(|X| > {} s) for symmetric alpha-stable samples, n = {}, M = {}, seed = {}",
            self.k, self.n, self.replications, self.seed
        );
        let _ = write!(out, "{:<10}", "alpha");
        for c in &self.cells {
            let _ = write!(out, "{:>14}", format!("{:.2}", c.alpha));
        }
        out.push('\n');
        let row = |out: &mut String, label: &str, f: &dyn Fn(&TableCell) -> String| {
            let _ = write!(out, "{label:<10}");
            for c in &self.cells {
                let _ = write!(out, "{:>14}", f(c));
            }
            out.push('\n');
        };
        row(&mut out, "p_hat", &|c| format!("{:.7}", c.p_hat));
        row(&mut out, "stderr", &|c| format!("{:.7}", c.stderr));
        if self.cells.iter().all(|c| c.reference.is_some()) {
            row(&mut out, "reference", &|c| {
                format!("{:.7}", c.reference.unwrap_or(f64::NAN))
            });
            row(&mut out, "diff", &|c| {
                format!("{:+.7}", c.p_hat - c.reference.unwrap_or(f64::NAN))
            });
        }
        out
    }
}

/// `n = 3` outlier probabilities over [`TABLE_ALPHAS`]. Outside `free` mode
/// only `k = 3` and `k = 7` are accepted and reference values are attached.
pub fn cmd_tables(k: f64, replications: usize, seed: u64, free: bool) -> Result<TableReport> {
    let reference = if free {
        None
    } else if k == 3.0 {
        Some(REFERENCE_K3)
    } else if k == 7.0 {
        Some(REFERENCE_K7)
    } else {
        return Err(CliError::Config(format!(
            "reproduction tables exist for k = 3 and k = 7 only (got {k}); pass --free for other k"
        )));
    };
    if replications == 0 {
        return Err(CliError::Config("replications must be at least 1".into()));
    }
    let query = OutlierQuery::new(k);
    query.validate()?;
    let cells = TABLE_ALPHAS
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let spec = DistributionSpec::symmetric_stable(alpha);
            let row = run_cell(&spec, TABLE_N, &query, replications, seed, TABLE_N as u64)?;
            Ok(TableCell {
                alpha,
                p_hat: row.p_hat,
                stderr: row.stderr,
                reference: reference.map(|r| r[i]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TableReport {
        k,
        n: TABLE_N,
        replications,
        seed,
        cells,
    })
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub configs: Vec<ExperimentConfig>,
    pub rows: Vec<EstimateRow>,
}

impl SweepOutput {
    pub fn csv(&self) -> String {
        csv_string(&self.rows)
    }

    pub fn svg(&self) -> String {
        sweep_chart(&self.rows).render()
    }

    pub fn manifest(&self) -> RunManifest {
        RunManifest::new(self.configs.clone(), self.rows.clone())
    }

    /// Rows of one law, in grid order.
    pub fn curve(&self, spec: &DistributionSpec) -> Vec<&EstimateRow> {
        self.rows.iter().filter(|r| &r.spec == spec).collect()
    }
}

/// Runs every law in `settings` over the shared grid. The first failing cell
/// aborts the run.
pub fn cmd_sweep(settings: &SweepSettings) -> Result<SweepOutput> {
    let configs = settings.into_configs()?;
    let mut rows = Vec::new();
    for config in &configs {
        let curve = run_sweep(config).map_err(|e| match e {
            outlierfreq_core::Error::Cell { index, n, source } => CliError::Data(format!(
                "{}: cell {index} (n = {n}) failed: {source}",
                config.spec
            )),
            other => other.into(),
        })?;
        rows.extend(curve);
    }
    Ok(SweepOutput { configs, rows })
}

/// Writes whichever outputs `settings` names; returns the CSV when no CSV
/// path was given so the caller can print it.
pub fn write_sweep_outputs(out: &SweepOutput, settings: &SweepSettings) -> Result<Option<String>> {
    let write =
        |path: &Path, text: String| std::fs::write(path, text).map_err(|e| CliError::io(path, e));
    if let Some(p) = &settings.json {
        write(
            p,
            serde_json::to_string_pretty(&out.rows).expect("rows serialize"),
        )?;
    }
    if let Some(p) = &settings.svg {
        write(p, out.svg())?;
    }
    if let Some(p) = &settings.manifest {
        write(p, out.manifest().to_json())?;
    }
    match &settings.csv {
        Some(p) => {
            write(p, out.csv())?;
            Ok(None)
        }
        None => Ok(Some(out.csv())),
    }
}

/// Limit-moment reports for each `alpha`; all alphas are checked before any
/// simulation starts.
pub fn cmd_moments(
    alphas: &[f64],
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<Vec<MomentReport>> {
    if alphas.is_empty() {
        return Err(CliError::Config("no alpha given".into()));
    }
    for &a in alphas {
        outlierfreq_core::limit_moments(a)?;
    }
    alphas
        .iter()
        .map(|&a| {
            estimate_limit_moments(
                &DistributionSpec::symmetric_stable(a),
                n,
                replications,
                seed,
            )
            .map_err(CliError::from)
        })
        .collect()
}

pub fn render_moments(reports: &[MomentReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>6} {:>14} {:>14} {:>12} {:>8}",
        "alpha", "moment", "analytic", "estimated", "stderr", "z"
    );
    for r in reports {
        let analytic = r.analytic.as_array();
        let z = r.z_scores();
        for j in 0..4 {
            let _ = writeln!(
                out,
                "{:>6} {:>6} {:>14.6} {:>14.6} {:>12.6} {:>8.2}",
                r.alpha,
                format!("mu{}", 2 * (j + 1)),
                analytic[j],
                r.estimated[j],
                r.stderrs[j],
                z[j]
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesSummary {
    pub n: usize,
    pub mean: f64,
    pub s_sqrt_biased: f64,
    pub s_sqrt_unbiased: f64,
    pub raw_variance: f64,
    /// Dispersion actually used for the threshold.
    pub s: f64,
    pub outliers: usize,
    pub fraction: f64,
}

fn summarize(values: &[f64], query: &OutlierQuery) -> Result<SeriesSummary> {
    let biased = compute_stats(values, SConvention::SqrtBiased)?;
    let unbiased = compute_stats(values, SConvention::SqrtUnbiased)?;
    let raw = compute_stats(values, SConvention::RawVariance)?;
    let used = match query.convention {
        SConvention::SqrtBiased => biased,
        SConvention::SqrtUnbiased => unbiased,
        SConvention::RawVariance => raw,
    };
    let outliers = count_outliers(values, &used, query);
    Ok(SeriesSummary {
        n: values.len(),
        mean: biased.mean,
        s_sqrt_biased: biased.s,
        s_sqrt_unbiased: unbiased.s,
        raw_variance: raw.s,
        s: used.s,
        outliers,
        fraction: outliers as f64 / values.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonBand {
    pub low: f64,
    pub high: f64,
    pub contains: bool,
}

impl ComparisonBand {
    pub fn empirical(fraction: f64) -> Self {
        let (low, high) = EMPIRICAL_BAND;
        Self {
            low,
            high,
            contains: (low..=high).contains(&fraction),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub source: String,
    pub query: OutlierQuery,
    #[serde(flatten)]
    pub summary: SeriesSummary,
    /// Observed `P(|X| > 3s)` range for daily index returns, for comparison.
    pub empirical_band: ComparisonBand,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetrized: Option<SeriesSummary>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    pub query: OutlierQuery,
    pub symmetrize: bool,
    pub seed: Option<u64>,
}

pub fn cmd_ingest(path: &Path, opts: &IngestOptions) -> Result<IngestReport> {
    let series = ReturnSeries::read(path)?;
    ingest_series(&series, opts)
}

pub fn ingest_series(series: &ReturnSeries, opts: &IngestOptions) -> Result<IngestReport> {
    opts.query.validate()?;
    let mut warnings = Vec::new();
    let summary = summarize(&series.values, &opts.query)?;
    if summary.s == 0.0 {
        warnings.push(
            "all values are equal: s = 0, so every nonzero compared magnitude counts as an outlier"
                .to_string(),
        );
    }
    let symmetrized = if opts.symmetrize {
        let seed = opts
            .seed
            .ok_or_else(|| CliError::Config("--symmetrize needs --seed".into()))?;
        let z = symmetrize(&series.values, &mut RngState::new(seed, SYMMETRIZE_STREAM))?;
        if z.len() < 2 {
            warnings.push(format!(
                "symmetrized series has {} value(s); too short to summarize",
                z.len()
            ));
            None
        } else {
            Some(summarize(&z, &opts.query)?)
        }
    } else {
        None
    };
    Ok(IngestReport {
        source: series.source.clone(),
        query: opts.query,
        empirical_band: ComparisonBand::empirical(summary.fraction),
        summary,
        symmetrized,
        warnings,
    })
}

pub fn render_ingest(r: &IngestReport) -> String {
    let mut out = String::new();
    let q = &r.query;
    let _ = writeln!(out, "source          {}", r.source);
    let section = |out: &mut String, s: &SeriesSummary| {
        let _ = writeln!(out, "n               {}", s.n);
        let _ = writeln!(out, "mean            {}", s.mean);
        let _ = writeln!(out, "s (sqrt-biased)   {}", s.s_sqrt_biased);
        let _ = writeln!(out, "s (sqrt-unbiased) {}", s.s_sqrt_unbiased);
        let _ = writeln!(out, "raw variance    {}", s.raw_variance);
        let _ = writeln!(
            out,
            "outliers        {} of {} beyond {} s ({}, {})",
            s.outliers,
            s.n,
            q.k,
            q.convention,
            if q.centered { "centered" } else { "uncentered" }
        );
        let _ = writeln!(out, "fraction        {:.6}", s.fraction);
    };
    section(&mut out, &r.summary);
    let b = &r.empirical_band;
    let _ = writeln!(
        out,
        "empirical band  [{}, {}]: {}",
        b.low,
        b.high,
        if b.contains { "inside" } else { "outside" }
    );
    if let Some(s) = &r.symmetrized {
        let _ = writeln!(out, "symmetrized:");
        section(&mut out, s);
    }
    out
}

/// `n` draws from replication 0 of cell `cell_id`: exactly the sample
/// `run_cell(spec, n, _, 1, seed, cell_id)` evaluates.
pub fn cmd_sample(spec: &DistributionSpec, n: usize, seed: u64, cell_id: u64) -> Result<String> {
    let values = draw_replication(spec, n, seed, cell_id, 0)?;
    let mut out = String::with_capacity(values.len() * 20);
    out.push_str("value\n");
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverDiagnostics {
    pub spec_a: String,
    pub spec_b: String,
    pub k: f64,
    pub replications: usize,
    pub seed: u64,
    pub step: usize,
    pub persistence: usize,
    pub points: Vec<CrossoverPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossoverOutput {
    pub n_star: usize,
    pub bracket: (usize, usize),
    pub diagnostics: CrossoverDiagnostics,
}

pub fn cmd_crossover(search: &CrossoverSearch) -> Result<CrossoverOutput> {
    let report = find_crossover(search)?;
    Ok(CrossoverOutput {
        n_star: report.n_star,
        bracket: report.bracket,
        diagnostics: CrossoverDiagnostics {
            spec_a: search.spec_a.to_string(),
            spec_b: search.spec_b.to_string(),
            k: search.query.k,
            replications: search.replications,
            seed: search.base_seed,
            step: report.step,
            persistence: report.persistence,
            points: report.points,
        },
    })
}
