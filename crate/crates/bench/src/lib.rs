//! Criterion benchmarks for the delayheat kernels live in `benches/`.
