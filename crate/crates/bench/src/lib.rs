//! Criterion benchmarks for kanpos live under `benches/`.
