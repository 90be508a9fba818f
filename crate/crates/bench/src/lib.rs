//! Benchmarks for the intersection recursions and profile construction; see `benches/`.
