//! Library surface of the bench harness: manifests, report emission, and the
//! batch runner. The `maxrpc-bench` binary is a thin CLI over these.

pub mod manifest;
pub mod report;
pub mod runner;
