//! Benchmark harness for the glkit kernels; see `benches/`.
