//! Shared machinery for the interval-group indexes: elements in key order,
//! per-position successor links among equal hash values, and one summary
//! level per stored resolution. A group is a contiguous interval of the key
//! array; its inverted mapping is reached through a packed first-position
//! offset and then the `next` chain.

use crate::bitmap::WordBitmap;
use crate::bits::BitBuf;
use crate::config::Element;
use crate::result::Counters;

pub(crate) const NO_NEXT: u64 = u64::MAX;

pub(crate) struct ChainStore {
    /// Order keys, strictly ascending (g-values, or the elements themselves
    /// for natural order).
    pub keys: Vec<u64>,
    /// Elements aligned with `keys`.
    pub elems: Vec<Element>,
    /// Position of the next element to the right with the same hash value.
    /// Full words, one per element.
    pub next: Vec<u64>,
    pub levels: Vec<Level>,
}

/// One resolution: intervals tiling `[0, n)`, an image word per interval,
/// and bit-packed first-position offsets, one entry per set image bit at
/// width `ceil(log2(interval_len + 1))`.
pub(crate) struct Level {
    pub starts: Vec<u32>,
    pub images: Vec<WordBitmap>,
    pub first_starts: Vec<u32>,
    pub firsts: BitBuf,
}

impl Level {
    pub fn group_count(&self) -> usize {
        self.images.len()
    }

    pub fn bounds(&self, z: usize) -> (u32, u32) {
        (self.starts[z], self.starts[z + 1])
    }

    fn offset_width(&self, z: usize) -> u32 {
        let (l, r) = self.bounds(z);
        ceil_log2((r - l + 1) as u64)
    }

    /// Position of the first element of group `z` hashing to `y`, if any.
    pub fn first_pos(&self, z: usize, y: u32) -> Option<u32> {
        let image = self.images[z];
        if !image.contains(y) {
            return None;
        }
        let width = self.offset_width(z);
        let idx = image.rank(y);
        let at = self.first_starts[z] as u64 + (idx * width) as u64;
        Some(self.starts[z] + self.firsts.read_bits(at, width) as u32)
    }
}

/// Smallest `t` with `2^t >= x`.
pub(crate) fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Smallest `t` with `s * 2^t >= n`, the resolution giving mean group size
/// in `(s/2, s]`.
pub(crate) fn resolution_for(n: usize, s: u32) -> u32 {
    let mut t = 0;
    while (s as u128) << t < n as u128 {
        t += 1;
    }
    t
}

/// Link every position to the next one to its right with an equal hash
/// value.
pub(crate) fn build_next(hvals: &[u8]) -> Vec<u64> {
    let mut next = vec![NO_NEXT; hvals.len()];
    let mut last = [NO_NEXT; 64];
    for i in (0..hvals.len()).rev() {
        let y = hvals[i] as usize;
        next[i] = last[y];
        last[y] = i as u64;
    }
    next
}

/// Summarize the intervals delimited by `starts` over the hash values.
pub(crate) fn build_level(starts: Vec<u32>, hvals: &[u8]) -> Level {
    let groups = starts.len() - 1;
    let mut images = Vec::with_capacity(groups);
    let mut first_starts = Vec::with_capacity(groups);
    let mut firsts = BitBuf::new();
    let mut first = [u32::MAX; 64];
    for z in 0..groups {
        let (l, r) = (starts[z] as usize, starts[z + 1] as usize);
        let mut image = WordBitmap::EMPTY;
        for p in l..r {
            let y = hvals[p] as usize;
            if first[y] == u32::MAX {
                first[y] = (p - l) as u32;
            }
            image.insert(y as u32);
        }
        let width = ceil_log2((r - l + 1) as u64);
        let base = firsts.len_bits();
        first_starts.push(u32::try_from(base).expect("packed offsets exceed u32 range"));
        for y in image.positions() {
            firsts.push_bits(first[y as usize] as u64, width);
            first[y as usize] = u32::MAX;
        }
        debug_assert_eq!(firsts.len_bits() - base, (image.len() * width) as u64);
        images.push(image);
    }
    Level { starts, images, first_starts, firsts }
}

/// Walk of one inverted mapping: start at the packed first position, follow
/// `next` until the chain leaves the interval.
pub(crate) struct ChainIter<'a> {
    next: &'a [u64],
    pos: u64,
    right: u64,
}

impl<'a> ChainIter<'a> {
    pub fn new(store: &'a ChainStore, level: &Level, z: usize, y: u32) -> ChainIter<'a> {
        let pos = level.first_pos(z, y).map(|p| p as u64).unwrap_or(NO_NEXT);
        ChainIter { next: &store.next, pos, right: level.bounds(z).1 as u64 }
    }
}

impl Iterator for ChainIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.pos == NO_NEXT || self.pos >= self.right {
            return None;
        }
        let p = self.pos as usize;
        self.pos = self.next[p];
        Some(p)
    }
}

/// One group in a chained index, addressed for the merge kernels.
#[derive(Clone, Copy)]
pub(crate) struct GroupCtx<'a> {
    pub store: &'a ChainStore,
    pub level: &'a Level,
    pub z: usize,
}

/// Merge the inverted mappings of two groups over the surviving image bits.
/// Emits `(key, element)` matches and full collision accounting.
pub(crate) fn merge_preimages_2(
    a: GroupCtx,
    b: GroupCtx,
    h_and: WordBitmap,
    out: &mut Vec<(u64, Element)>,
    c: &mut Counters,
) {
    for y in h_and.positions() {
        let mut ia = ChainIter::new(a.store, a.level, a.z, y);
        let mut ib = ChainIter::new(b.store, b.level, b.z, y);
        let mut pa = ia.next();
        let mut pb = ib.next();
        let (mut la, mut lb) = (0u64, 0u64);
        let mut eq = 0u64;
        while let (Some(qa), Some(qb)) = (pa, pb) {
            let ka = a.store.keys[qa];
            let kb = b.store.keys[qb];
            c.comparisons += 1;
            if ka < kb {
                la += 1;
                pa = ia.next();
            } else if ka > kb {
                lb += 1;
                pb = ib.next();
            } else {
                out.push((ka, a.store.elems[qa]));
                eq += 1;
                la += 1;
                lb += 1;
                pa = ia.next();
                pb = ib.next();
            }
        }
        // drain tails so the pair count is exact
        la += pa.map_or(0, |_| 1) + ia.count() as u64;
        lb += pb.map_or(0, |_| 1) + ib.count() as u64;
        c.pairs_same_hash += la * lb;
        c.matches += eq;
        c.spurious += la * lb - eq;
    }
}

/// k-way variant over materialized key lists; iterated two-way merges keep
/// it simple and the lists are tiny.
pub(crate) fn merge_preimages_k(
    parts: &[GroupCtx],
    h_and: WordBitmap,
    out: &mut Vec<(u64, Element)>,
    c: &mut Counters,
) {
    debug_assert!(parts.len() >= 2);
    let mut acc: Vec<(u64, Element)> = Vec::new();
    let mut other: Vec<(u64, Element)> = Vec::new();
    for y in h_and.positions() {
        acc.clear();
        let mut tuples = 1u64;
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                acc.extend(
                    ChainIter::new(p.store, p.level, p.z, y)
                        .map(|q| (p.store.keys[q], p.store.elems[q])),
                );
                tuples = acc.len() as u64;
                continue;
            }
            other.clear();
            other.extend(
                ChainIter::new(p.store, p.level, p.z, y)
                    .map(|q| (p.store.keys[q], p.store.elems[q])),
            );
            tuples = tuples.saturating_mul(other.len() as u64);
            let mut merged = Vec::with_capacity(acc.len().min(other.len()));
            let (mut i, mut j) = (0, 0);
            while i < acc.len() && j < other.len() {
                c.comparisons += 1;
                match acc[i].0.cmp(&other[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        merged.push(acc[i]);
                        i += 1;
                        j += 1;
                    }
                }
            }
            acc = merged;
        }
        c.pairs_same_hash = c.pairs_same_hash.saturating_add(tuples);
        c.matches += acc.len() as u64;
        c.spurious = c.spurious.saturating_add(tuples - acc.len() as u64);
        out.extend_from_slice(&acc);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn next_links_equal_hashes_in_order() {
        let hvals = [3u8, 1, 3, 3, 1, 0];
        let next = build_next(&hvals);
        assert_eq!(next[0], 2);
        assert_eq!(next[2], 3);
        assert_eq!(next[3], NO_NEXT);
        assert_eq!(next[1], 4);
        assert_eq!(next[5], NO_NEXT);
    }

    #[test]
    fn level_first_positions() {
        let hvals = [3u8, 1, 3, 3, 1, 0];
        let level = build_level(vec![0, 3, 6], &hvals);
        assert_eq!(level.images[0], WordBitmap::from_positions(&[1, 3]));
        assert_eq!(level.images[1], WordBitmap::from_positions(&[0, 1, 3]));
        assert_eq!(level.first_pos(0, 3), Some(0));
        assert_eq!(level.first_pos(0, 1), Some(1));
        assert_eq!(level.first_pos(0, 0), None);
        assert_eq!(level.first_pos(1, 0), Some(5));
        assert_eq!(level.first_pos(1, 3), Some(3));
    }

    #[test]
    fn chain_iter_stops_at_boundary() {
        let hvals = [3u8, 1, 3, 3, 1, 0];
        let store = ChainStore {
            keys: (0..6).collect(),
            elems: (0..6).collect(),
            next: build_next(&hvals),
            levels: vec![build_level(vec![0, 3, 6], &hvals)],
        };
        let level = &store.levels[0];
        let first_group: Vec<usize> = ChainIter::new(&store, level, 0, 3).collect();
        assert_eq!(first_group, vec![0, 2]);
        let second_group: Vec<usize> = ChainIter::new(&store, level, 1, 3).collect();
        assert_eq!(second_group, vec![3]);
    }
}
