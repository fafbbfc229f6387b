//! Criterion benchmarks for `qde-core`; see `benches/`.
