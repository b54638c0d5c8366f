//! Benchmarks for the strata kernels live in `benches/`.
