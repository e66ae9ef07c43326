//! Criterion benchmarks for mlsim; see `benches/`.
