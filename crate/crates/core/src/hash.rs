use rand::RngCore;

use crate::config::{Config, Element};
use crate::error::{Error, Result};
use crate::perm::{PermFn, SplitMix64};

/// Modulus of the multiply-mod-prime family, the Mersenne prime 2^61 - 1.
pub const HASH_PRIME: u64 = (1 << 61) - 1;

/// One hash of the filter family, mapping elements into bit positions
/// `[0, w)`.
///
/// `MulModPrime` is the default: `((a*x + b) mod (2^61 - 1)) mod w`, which is
/// 2-universal for arguments below the prime. `OffsetMod` is a deterministic
/// stand-in used by fixture tests where hand-checked images are needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HashFn {
    MulModPrime { a: u64, b: u64, w: u32 },
    OffsetMod { offset: u64, w: u32 },
}

impl HashFn {
    /// Fresh parameters `a` uniform in `[1, p)`, `b` uniform in `[0, p)`.
    pub fn random(w: u32, rng: &mut impl RngCore) -> HashFn {
        let a = loop {
            let v = rng.next_u64() >> 3;
            if v >= 1 && v < HASH_PRIME {
                break v;
            }
        };
        let b = loop {
            let v = rng.next_u64() >> 3;
            if v < HASH_PRIME {
                break v;
            }
        };
        HashFn::MulModPrime { a, b, w }
    }

    /// `(x - offset) mod w`.
    pub fn offset_mod(w: u32, offset: u64) -> HashFn {
        HashFn::OffsetMod { offset, w }
    }

    pub fn w(&self) -> u32 {
        match *self {
            HashFn::MulModPrime { w, .. } => w,
            HashFn::OffsetMod { w, .. } => w,
        }
    }

    #[inline]
    pub fn eval(&self, x: Element) -> u32 {
        match *self {
            HashFn::MulModPrime { a, b, w } => {
                let t = (a as u128) * (x as u128) + (b as u128);
                (mod_mersenne61(t) % (w as u64)) as u32
            }
            HashFn::OffsetMod { offset, w } => (x.wrapping_sub(offset) % (w as u64)) as u32,
        }
    }
}

/// Reduce mod 2^61 - 1 by folding the high bits down twice.
#[inline]
fn mod_mersenne61(v: u128) -> u64 {
    const P: u128 = HASH_PRIME as u128;
    let v = (v & P) + (v >> 61);
    let v = (v & P) + (v >> 61);
    let v = v as u64;
    if v >= HASH_PRIME {
        v - HASH_PRIME
    } else {
        v
    }
}

/// The shared randomness of an index family: the partitioning permutation
/// plus `m` filter hashes, all derived from `Config::seed`.
///
/// Indexes interoperate only when their suites are identical; every
/// cross-index operation checks this first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashSuite {
    config: Config,
    perm: PermFn,
    hashes: Vec<HashFn>,
}

impl HashSuite {
    pub fn new(config: Config) -> HashSuite {
        let perm = PermFn::from_seed(config.seed);
        let mut mix = SplitMix64::new(config.seed ^ 0xa0761d6478bd642f);
        let hashes = (0..config.m).map(|_| HashFn::random(config.w, &mut mix)).collect();
        HashSuite { config, perm, hashes }
    }

    /// Suite with caller-chosen hashes, for fixtures with hand-picked `h`.
    pub fn with_hashes(config: Config, hashes: Vec<HashFn>) -> Result<HashSuite> {
        if hashes.len() != config.m as usize {
            return Err(Error::InvalidConfig(format!(
                "expected {} hashes, got {}",
                config.m,
                hashes.len()
            )));
        }
        if let Some(h) = hashes.iter().find(|h| h.w() != config.w) {
            return Err(Error::InvalidConfig(format!(
                "hash width {} does not match config w={}",
                h.w(),
                config.w
            )));
        }
        Ok(HashSuite { perm: PermFn::from_seed(config.seed), config, hashes })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn w(&self) -> u32 {
        self.config.w
    }

    pub fn m(&self) -> usize {
        self.config.m as usize
    }

    /// Group side `sqrt(w)`.
    pub fn s(&self) -> u32 {
        self.config.s()
    }

    pub fn perm(&self) -> &PermFn {
        &self.perm
    }

    /// The hash used for images and inverted mappings (`h_1`).
    pub fn primary_hash(&self) -> &HashFn {
        &self.hashes[0]
    }

    pub fn hashes(&self) -> &[HashFn] {
        &self.hashes
    }

    /// First field in which `other` differs, if any.
    pub fn mismatch_field(&self, other: &HashSuite) -> Option<&'static str> {
        if self.config.w != other.config.w {
            Some("w")
        } else if self.config.m != other.config.m {
            Some("m")
        } else if self.config.seed != other.config.seed {
            Some("seed")
        } else if self.hashes != other.hashes {
            Some("hash parameters")
        } else if self.perm != other.perm {
            Some("permutation")
        } else {
            None
        }
    }

    pub fn ensure_compatible(&self, other: &HashSuite) -> Result<()> {
        match self.mismatch_field(other) {
            Some(field) => Err(Error::SuiteMismatch(field)),
            None => Ok(()),
        }
    }
}
