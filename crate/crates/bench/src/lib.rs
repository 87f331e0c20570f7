//! Criterion benchmarks for gbbm-core live in `benches/`.
