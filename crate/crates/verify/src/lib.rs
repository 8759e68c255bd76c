//! Acceptance gate for the workspace; the checks live in `tests/acceptance.rs`.
