//! Criterion benchmarks for the core calculators live in `benches/`.
