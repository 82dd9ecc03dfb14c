//! Benchmark-only crate; see `benches/kernels.rs`. Keeping the benchmarks
//! out of the core crate keeps criterion out of its dependency tree.
