//! Criterion benchmarks for `crooked-core`; see `benches/kernel.rs`.
