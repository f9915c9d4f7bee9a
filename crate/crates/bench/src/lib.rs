//! Criterion benchmarks for the offline solvers and online algorithms; see `benches/`.
