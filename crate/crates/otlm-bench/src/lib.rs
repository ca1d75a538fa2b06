//! Benchmark-only crate; see `benches/solver.rs`. Shared fixtures could
//! move here if more bench targets appear.
pub use otlm_core;
