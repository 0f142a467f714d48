//! Resource caps for the enumeration-heavy operations.
//!
//! Every cap is an explicit hard error, never a silent truncation. The
//! defaults keep the full verification suite comfortably under half an hour
//! on a laptop while still admitting every desk-scale scenario.

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceCaps {
    /// Maximum number of canonical deterministic strategies a brute-force
    /// vertex enumeration may visit.
    pub max_vertices: u64,
    /// Maximum number of simultaneously live rays inside a double-description
    /// run.
    pub max_dd_rays: u64,
    /// Maximum total Hilbert-space dimension d^n for quantum strategies.
    pub max_hilbert_dim: u64,
}

impl Default for ResourceCaps {
    fn default() -> Self {
        ResourceCaps {
            max_vertices: 50_000_000,
            max_dd_rays: 2_000_000,
            max_hilbert_dim: 256,
        }
    }
}

impl ResourceCaps {
    pub fn unlimited() -> Self {
        ResourceCaps {
            max_vertices: u64::MAX,
            max_dd_rays: u64::MAX,
            max_hilbert_dim: u64::MAX,
        }
    }
}

/// A computation exceeded one of the configured caps.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("resource cap exceeded: {cap} = {limit}, required at least {required}")]
pub struct CapExceeded {
    /// Name of the cap, e.g. `caps.max_vertices`.
    pub cap: &'static str,
    pub limit: u64,
    pub required: u64,
}

impl CapExceeded {
    pub fn new(cap: &'static str, limit: u64, required: u64) -> Self {
        CapExceeded { cap, limit, required }
    }
}
