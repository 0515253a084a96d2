use crate::config::Element;

/// Instrumentation shared by all engines. Counters an algorithm has no use
/// for stay zero.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Counters {
    /// Group pairs or prefix tuples examined, including filtered ones.
    pub groups_visited: u64,
    /// Tuples skipped because some image AND came up empty.
    pub tuples_filtered: u64,
    /// Tuples whose inverted mappings or payloads were actually merged.
    pub tuples_merged: u64,
    /// Merged tuples that produced no output.
    pub false_positives: u64,
    /// Bitmap AND operations spent combining group images.
    pub image_and_ops: u64,
    /// Key comparisons made by merges and binary searches.
    pub comparisons: u64,
    /// Cross-set element pairs (tuples for k > 2) sharing a hash value.
    pub pairs_same_hash: u64,
    /// Same-hash pairs that were equal elements.
    pub matches: u64,
    /// Same-hash pairs of distinct elements.
    pub spurious: u64,
}

/// Sorted duplicate-free intersection plus the counters gathered while
/// computing it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntersectionResult {
    pub elements: Vec<Element>,
    pub counters: Counters,
}

impl IntersectionResult {
    pub fn empty() -> IntersectionResult {
        IntersectionResult::default()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}
