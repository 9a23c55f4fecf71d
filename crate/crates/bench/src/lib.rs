//! Criterion benchmarks for `outlierfreq-core`; see `benches/`.
