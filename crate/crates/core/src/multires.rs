//! Multi-resolution structure over one permutation-sorted array.
//!
//! Elements are ordered by g-value, so the groups of every resolution `t`
//! are consecutive intervals. Each stored level keeps interval boundaries,
//! an image word per group, and bit-packed first-position offsets; the
//! shared `next` chain then enumerates any inverted mapping in g-order.
//! Everything fits in a constant number of words per element.

use crate::bitmap::WordBitmap;
use crate::chains::{build_level, build_next, ceil_log2, ChainIter, ChainStore, Level};
use crate::config::Element;
use crate::error::{Error, Result};
use crate::hash::HashSuite;
use crate::hashbin::GSortedView;
use crate::perm::prefix;

pub struct MultiResIndex {
    suite: HashSuite,
    store: ChainStore,
}

/// Word counts per component of a built index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceReport {
    pub n: usize,
    /// Elements plus their stored g-values.
    pub gsorted_words: u64,
    /// Successor chain, one word per element.
    pub next_words: u64,
    /// Interval boundary tables across all levels.
    pub boundary_words: u64,
    /// Image words across all levels.
    pub image_words: u64,
    /// Packed first-position offsets plus their per-group bit anchors.
    pub first_words: u64,
    pub total_words: u64,
}

impl MultiResIndex {
    /// Sort by g-value and summarize every resolution `t` in
    /// `0..=ceil(log2 n)`. Time is dominated by the sort.
    pub fn build(set: &[Element], suite: &HashSuite) -> MultiResIndex {
        let perm = suite.perm();
        let mut pairs: Vec<(u64, Element)> = set.iter().map(|&x| (perm.apply(x), x)).collect();
        pairs.sort_unstable();
        debug_assert!(pairs.windows(2).all(|p| p[0].0 < p[1].0));
        let keys: Vec<u64> = pairs.iter().map(|&(g, _)| g).collect();
        let elems: Vec<Element> = pairs.iter().map(|&(_, x)| x).collect();
        let h = suite.primary_hash();
        let hvals: Vec<u8> = elems.iter().map(|&x| h.eval(x) as u8).collect();
        let next = build_next(&hvals);
        let n = elems.len();
        let finest = ceil_log2(n as u64);
        let levels = (0..=finest)
            .map(|t| build_level(prefix_starts(&keys, t), &hvals))
            .collect();
        MultiResIndex { suite: suite.clone(), store: ChainStore { keys, elems, next, levels } }
    }

    pub fn len(&self) -> usize {
        self.store.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.elems.is_empty()
    }

    pub fn suite(&self) -> &HashSuite {
        &self.suite
    }

    /// Finest stored resolution, `ceil(log2 n)`.
    pub fn finest_t(&self) -> u32 {
        (self.store.levels.len() - 1) as u32
    }

    /// Elements in natural sorted order (reconstructed; for verification).
    pub fn sorted_elements(&self) -> Vec<Element> {
        let mut v = self.store.elems.clone();
        v.sort_unstable();
        v
    }

    pub(crate) fn store(&self) -> &ChainStore {
        &self.store
    }

    pub(crate) fn level(&self, t: u32) -> &Level {
        &self.store.levels[t as usize]
    }

    fn check_group(&self, t: u32, z: u64) -> Result<()> {
        if t > self.finest_t() {
            return Err(Error::ResolutionOutOfRange { t, max: self.finest_t() });
        }
        if z >= (1u64 << t) {
            return Err(Error::GroupOutOfRange { z, t });
        }
        Ok(())
    }

    /// Interval and image of group `z` at resolution `t`. The interval may
    /// be empty.
    pub fn group_at(&self, t: u32, z: u64) -> Result<(usize, usize, WordBitmap)> {
        self.check_group(t, z)?;
        let level = self.level(t);
        let (l, r) = level.bounds(z as usize);
        Ok((l as usize, r as usize, level.images[z as usize]))
    }

    /// The inverted mapping `h^-1(y, group)` in g-order, by following the
    /// packed first position and the `next` chain until the interval ends.
    pub fn enumerate_preimage(&self, t: u32, z: u64, y: u32) -> Result<Vec<Element>> {
        self.check_group(t, z)?;
        debug_assert!(y < self.suite.w());
        let level = self.level(t);
        Ok(ChainIter::new(&self.store, level, z as usize, y)
            .map(|p| self.store.elems[p])
            .collect())
    }

    /// View over the g-sorted array for interval-search algorithms.
    pub fn gsorted_view(&self) -> GSortedView<'_> {
        GSortedView::new(&self.store.keys, &self.store.elems, &self.suite)
    }

    pub fn space_report(&self) -> SpaceReport {
        let n = self.len();
        let gsorted_words = 2 * n as u64;
        let next_words = n as u64;
        let mut boundary_words = 0u64;
        let mut image_words = 0u64;
        let mut first_words = 0u64;
        for level in &self.store.levels {
            boundary_words += words_for_bytes(level.starts.len() as u64 * 4);
            image_words += level.images.len() as u64;
            first_words += words_for_bytes(level.first_starts.len() as u64 * 4);
            first_words += words_for_bits(level.firsts.len_bits());
        }
        let total_words = gsorted_words + next_words + boundary_words + image_words + first_words;
        SpaceReport { n, gsorted_words, next_words, boundary_words, image_words, first_words, total_words }
    }
}

fn words_for_bytes(bytes: u64) -> u64 {
    (bytes + 7) / 8
}

fn words_for_bits(bits: u64) -> u64 {
    (bits + 63) / 64
}

/// Counting-sort boundaries of the `2^t` prefix groups over ascending keys.
fn prefix_starts(keys: &[u64], t: u32) -> Vec<u32> {
    let groups = 1usize << t;
    let mut starts = vec![0u32; groups + 1];
    for &k in keys {
        starts[prefix(k, t) as usize + 1] += 1;
    }
    for z in 0..groups {
        starts[z + 1] += starts[z];
    }
    starts
}
