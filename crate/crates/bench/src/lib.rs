//! Criterion benchmarks of the numerical kernels live under `benches/`.
