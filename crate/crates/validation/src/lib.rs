//! Holds the workspace acceptance suite, `tests/acceptance.rs`. It lives in
//! its own package so that it runs after the per-crate test suites.
