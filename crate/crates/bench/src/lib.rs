//! Criterion benchmarks for the hot loops in `lowdens-core` live under `benches/`.
