//! Criterion benchmarks for the `mols` crate live under `benches/`.
