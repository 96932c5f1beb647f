//! Size caps for lattice-wide and vector-wide work.
//!
//! The menu lattice has `2^n` nodes and choice vectors have `n·2^(n-1)`
//! coordinates, so both are capped. The caps can be raised through the
//! `RUMID_MAX_N` and `RUMID_MAX_VECTOR_N` environment variables.

use crate::{Error, Result};

pub const LATTICE_ENV: &str = "RUMID_MAX_N";
pub const VECTOR_ENV: &str = "RUMID_MAX_VECTOR_N";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for operations that walk the whole menu lattice.
    pub lattice: usize,
    /// Largest `n` for operations that build full choice vectors.
    pub vectors: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            lattice: 20,
            vectors: 12,
        }
    }
}

impl Limits {
    /// Defaults overridden by the environment, when set.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Some(v) = read_env(LATTICE_ENV)? {
            limits.lattice = v;
        }
        if let Some(v) = read_env(VECTOR_ENV)? {
            limits.vectors = v;
        }
        Ok(limits)
    }

    pub fn check_lattice(&self, n: usize) -> Result<()> {
        if n > self.lattice {
            return Err(Error::CapExceeded {
                n,
                cap: self.lattice,
                what: "lattice-wide operations",
            });
        }
        Ok(())
    }

    pub fn check_vectors(&self, n: usize) -> Result<()> {
        if n > self.vectors {
            return Err(Error::CapExceeded {
                n,
                cap: self.vectors,
                what: "choice-vector operations",
            });
        }
        Ok(())
    }
}

fn read_env(name: &str) -> Result<Option<usize>> {
    match std::env::var(name) {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| {
                Error::document(name, format!("expected a positive integer, got {v:?}"))
            })
        }
        Err(_) => Ok(None),
    }
}
