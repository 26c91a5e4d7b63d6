//! Criterion benchmarks for the `twomode` crate live under `benches/`.
