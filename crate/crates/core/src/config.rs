use crate::error::{Error, Result};

/// Width in bits of the storage word. Bitmap images live in one such word
/// and the partitioning permutation acts on values of this width.
pub const MACHINE_BITS: u32 = 64;

/// Set element identifier.
pub type Element = u64;

/// Parameters shared by every index built for one collection.
///
/// `w` is the logical image width: hash values land in `[0, w)` and a group
/// image occupies the low `w` bits of a storage word. The group side is
/// `sqrt(w)`, so supported widths are the perfect squares 16 and 64.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    /// Logical image width in bits, 16 or 64.
    pub w: u32,
    /// Number of filter hash functions kept per group, at least 1.
    pub m: u32,
    /// Seed from which the permutation and all hash parameters derive.
    pub seed: u64,
}

impl Config {
    pub fn new(w: u32, m: u32, seed: u64) -> Result<Self> {
        if w != 16 && w != 64 {
            return Err(Error::InvalidConfig(format!("w must be 16 or 64, got {w}")));
        }
        if m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        Ok(Config { w, m, seed })
    }

    /// Default parameters with the given seed.
    pub fn with_seed(seed: u64) -> Self {
        Config { seed, ..Config::default() }
    }

    /// Group side `sqrt(w)`.
    pub fn s(&self) -> u32 {
        match self.w {
            16 => 4,
            _ => 8,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config { w: 64, m: 2, seed: 0 }
    }
}
