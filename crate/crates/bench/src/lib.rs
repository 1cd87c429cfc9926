//! Shared fixtures for the criterion benchmarks; no library code of its
//! own.
