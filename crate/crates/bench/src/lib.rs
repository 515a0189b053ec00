//! Criterion benchmarks for the solver and the symbolic layer; see
//! `benches/`.  No library code.
