//! Benchmark harness for circleweb; see `benches/`.
