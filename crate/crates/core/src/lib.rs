//! Partition-and-filter set intersection over single-word bitmap summaries.
//!
//! Sets of `u64` identifiers are cut into small groups, each group is
//! summarized by hashing its members into the bits of one machine word, and
//! group tuples are pre-filtered with a bitwise AND of those words before any
//! element-level work happens. Four engines share the idea:
//!
//! * [`intgroup`]: fixed-width groups over the natural sort order, two sets.
//! * [`rangroup`]: permutation-prefix groups at query-chosen resolutions,
//!   two or more sets, exact inverted-mapping merges.
//! * [`ranscan`]: single-resolution blocks carrying `m` filter bitmaps and a
//!   linear-merge fallback, with an optional compressed block codec.
//! * [`hashbin`]: skew-friendly intersection by per-group binary search.
//!
//! [`baselines`] holds the merge/hash/galloping reference algorithms that
//! serve as correctness oracles, and [`workload`] generates synthetic
//! instances and runs the statistics experiments behind the probabilistic
//! guarantees.
//!
//! All structures are immutable once built and safe to share across threads.

pub mod baselines;
pub mod bitmap;
mod bits;
mod chains;
pub mod config;
pub mod error;
pub mod hash;
pub mod hashbin;
pub mod intgroup;
pub mod multires;
pub mod partition;
pub mod perm;
pub mod rangroup;
pub mod ranscan;
pub mod result;
pub mod workload;

pub use bitmap::WordBitmap;
pub use config::{Config, Element, MACHINE_BITS};
pub use error::{Error, Result};
pub use hash::{HashFn, HashSuite};
pub use perm::{prefix, PermFn};
pub use result::{Counters, IntersectionResult};
