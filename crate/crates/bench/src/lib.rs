//! Benchmarks for `staircase-core`; see `benches/staircase.rs`.
