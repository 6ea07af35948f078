//! Benchmark-only crate; see `benches/`.

pub use ghzx_core;
