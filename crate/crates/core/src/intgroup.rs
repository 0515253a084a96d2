//! Two-set intersection over fixed-width groups of the naturally sorted
//! arrays. Every power-of-two group size is summarized at build time; a
//! query picks the pair of sizes balancing the two set lengths, sweeps the
//! group ranges in tandem, and intersects overlapping pairs through their
//! images and inverted mappings.

use crate::chains::{build_level, build_next, ceil_log2, merge_preimages_2, ChainStore, GroupCtx};
use crate::config::Element;
use crate::error::Result;
use crate::hash::HashSuite;
use crate::result::{Counters, IntersectionResult};

pub struct FixedWidthIndex {
    suite: HashSuite,
    store: ChainStore,
    /// Group size per stored level, `2^j` ascending.
    sizes: Vec<usize>,
}

impl FixedWidthIndex {
    /// Sort and summarize every group size `2, 4, ..., 2^ceil(log2 n)`.
    pub fn build(set: &[Element], suite: &HashSuite) -> FixedWidthIndex {
        let mut elems = set.to_vec();
        elems.sort_unstable();
        debug_assert!(elems.windows(2).all(|p| p[0] < p[1]));
        let h = suite.primary_hash();
        let hvals: Vec<u8> = elems.iter().map(|&x| h.eval(x) as u8).collect();
        let next = build_next(&hvals);
        let n = elems.len();
        let max_j = ceil_log2(n as u64).max(1);
        let mut sizes = Vec::new();
        let mut levels = Vec::new();
        for j in 1..=max_j {
            let size = 1usize << j;
            let groups = n.div_ceil(size);
            let starts: Vec<u32> =
                (0..=groups).map(|g| (g * size).min(n) as u32).collect();
            levels.push(build_level(starts, &hvals));
            sizes.push(size);
        }
        let store = ChainStore { keys: elems.clone(), elems, next, levels };
        FixedWidthIndex { suite: suite.clone(), store, sizes }
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

    /// Stored group sizes, ascending powers of two.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn sorted_elements(&self) -> &[Element] {
        &self.store.elems
    }

    /// Level whose group size is the smallest stored size >= `s`.
    fn level_for_size(&self, s: usize) -> usize {
        self.sizes.iter().position(|&sz| sz >= s).unwrap_or(self.sizes.len() - 1)
    }

    /// Total words held by the structure (elements, keys, chain, and all
    /// level summaries).
    pub fn space_words(&self) -> u64 {
        let n = self.len() as u64;
        let mut words = 3 * n; // elems + keys + next
        for level in &self.store.levels {
            words += (level.starts.len() as u64 * 4).div_ceil(8);
            words += level.images.len() as u64;
            words += (level.first_starts.len() as u64 * 4).div_ceil(8);
            words += level.firsts.len_bits().div_ceil(64);
        }
        words
    }
}

/// Group sizes minimizing the pair sweep: the power of two just above
/// `sqrt(w * n_own / n_other)`, clamped to `[1, 2^ceil(log2 n_own)]`.
pub fn choose_group_sizes(n1: usize, n2: usize, w: u32) -> (usize, usize) {
    (starred_size(n1, n2, w), starred_size(n2, n1, w))
}

fn starred_size(n_own: usize, n_other: usize, w: u32) -> usize {
    // smallest power of two s with s^2 * n_other >= w * n_own
    let mut s = 1usize;
    while (s as u128) * (s as u128) * (n_other as u128) < (w as u128) * (n_own as u128) {
        s <<= 1;
    }
    s.clamp(1, n_own.max(1).next_power_of_two())
}

/// Intersect at the balanced group sizes for the two lengths.
pub fn intersect_intgroup(
    a: &FixedWidthIndex,
    b: &FixedWidthIndex,
) -> Result<IntersectionResult> {
    let (s1, s2) = choose_group_sizes(a.len(), b.len(), a.suite.w());
    intersect_intgroup_with_sizes(a, b, s1, s2)
}

/// Intersect with explicit group sizes (rounded up to the nearest stored
/// power of two). The sweep advances whichever side has the smaller group
/// supremum, so each overlapping pair is visited exactly once.
pub fn intersect_intgroup_with_sizes(
    a: &FixedWidthIndex,
    b: &FixedWidthIndex,
    s1: usize,
    s2: usize,
) -> Result<IntersectionResult> {
    a.suite.ensure_compatible(&b.suite)?;
    if a.is_empty() || b.is_empty() {
        return Ok(IntersectionResult::empty());
    }
    let la = &a.store.levels[a.level_for_size(s1)];
    let lb = &b.store.levels[b.level_for_size(s2)];
    let mut c = Counters::default();
    let mut out: Vec<(u64, Element)> = Vec::new();
    let (mut p, mut q) = (0usize, 0usize);
    let (np, nq) = (la.group_count(), lb.group_count());
    while p < np && q < nq {
        c.groups_visited += 1;
        let (pl, pr) = la.bounds(p);
        let (ql, qr) = lb.bounds(q);
        let (a_lo, a_hi) = (a.store.keys[pl as usize], a.store.keys[pr as usize - 1]);
        let (b_lo, b_hi) = (b.store.keys[ql as usize], b.store.keys[qr as usize - 1]);
        if b_lo > a_hi {
            p += 1;
        } else if a_lo > b_hi {
            q += 1;
        } else {
            let h = la.images[p] & lb.images[q];
            c.image_and_ops += 1;
            if h.is_empty() {
                c.tuples_filtered += 1;
            } else {
                c.tuples_merged += 1;
                let before = out.len();
                merge_preimages_2(
                    GroupCtx { store: &a.store, level: la, z: p },
                    GroupCtx { store: &b.store, level: lb, z: q },
                    h,
                    &mut out,
                    &mut c,
                );
                if out.len() == before {
                    c.false_positives += 1;
                }
            }
            if a_hi < b_hi {
                p += 1;
            } else {
                q += 1;
            }
        }
    }
    out.sort_unstable();
    Ok(IntersectionResult { elements: out.into_iter().map(|(_, x)| x).collect(), counters: c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::merge_intersect;
    use crate::config::Config;
    use crate::hash::HashFn;
    use crate::partition::partition_fixed;
    use crate::perm::SplitMix64;
    use rand::RngCore;
    use std::collections::BTreeSet;

    fn fixture_suite() -> HashSuite {
        HashSuite::with_hashes(
            Config::new(16, 1, 0).unwrap(),
            vec![HashFn::offset_mod(16, 1000)],
        )
        .unwrap()
    }

    fn fixture_sets() -> (Vec<Element>, Vec<Element>) {
        (
            vec![1001, 1002, 1004, 1009, 1016, 1027, 1043],
            vec![1001, 1003, 1005, 1009, 1011, 1016, 1022, 1032, 1034, 1049],
        )
    }

    #[test]
    fn build_matches_flat_partition() {
        let suite = fixture_suite();
        let (l1, _) = fixture_sets();
        let idx = FixedWidthIndex::build(&l1, &suite);
        let level = &idx.store.levels[idx.level_for_size(4)];
        let flat = partition_fixed(&l1, 4);
        assert_eq!(level.group_count(), flat.len());
        for (z, part) in flat.iter().enumerate() {
            let (l, r) = level.bounds(z);
            assert_eq!(&idx.store.elems[l as usize..r as usize], *part);
        }
    }

    #[test]
    fn fixture_intersection() {
        let suite = fixture_suite();
        let (l1, l2) = fixture_sets();
        let a = FixedWidthIndex::build(&l1, &suite);
        let b = FixedWidthIndex::build(&l2, &suite);
        let got = intersect_intgroup_with_sizes(&a, &b, 4, 4).unwrap();
        assert_eq!(got.elements, vec![1001, 1009, 1016]);
        // groups visited: (1,1), (2,2), (2,3) in one-based labels
        assert_eq!(got.counters.tuples_merged + got.counters.tuples_filtered, 3);
    }

    #[test]
    fn size_selection() {
        assert_eq!(choose_group_sizes(1000, 1000, 64), (8, 8));
        assert_eq!(choose_group_sizes(100, 400, 64), (4, 16));
        assert_eq!(choose_group_sizes(1, 1, 64), (1, 1));
        // product stays near w after rounding
        for (n1, n2) in [(10, 1000), (1000, 10), (5, 7), (123, 45678)] {
            let (s1, s2) = choose_group_sizes(n1, n2, 64);
            assert!(s1 * s2 <= 4 * 64, "{s1} * {s2}");
        }
    }

    #[test]
    fn self_intersection_is_identity() {
        let suite = HashSuite::new(Config::with_seed(20));
        let mut mix = SplitMix64::new(11);
        let set: BTreeSet<Element> = (0..500).map(|_| mix.next_u64() % 10_000).collect();
        let set: Vec<Element> = set.into_iter().collect();
        let a = FixedWidthIndex::build(&set, &suite);
        let got = intersect_intgroup(&a, &a).unwrap();
        assert_eq!(got.elements, set);
    }

    fn random_set(mix: &mut SplitMix64, n: usize, span: u64) -> Vec<Element> {
        let mut s = BTreeSet::new();
        while s.len() < n {
            s.insert(mix.next_u64() % span);
        }
        s.into_iter().collect()
    }

    #[test]
    fn random_pairs_match_oracle() {
        let suite = HashSuite::new(Config::with_seed(21));
        let mut mix = SplitMix64::new(12);
        for trial in 0..1000 {
            let n1 = 1 + (mix.next_u64() % 300) as usize;
            let n2 = 1 + (mix.next_u64() % 300) as usize;
            let span = 200 + (trial % 2000);
            let l1 = random_set(&mut mix, n1, span);
            let l2 = random_set(&mut mix, n2, span);
            let a = FixedWidthIndex::build(&l1, &suite);
            let b = FixedWidthIndex::build(&l2, &suite);
            let got = intersect_intgroup(&a, &b).unwrap();
            assert_eq!(got.elements, merge_intersect(&[&l1, &l2]));
        }
    }

    #[test]
    fn group_pair_visits_bounded() {
        let suite = HashSuite::new(Config::with_seed(22));
        let mut mix = SplitMix64::new(13);
        let l1 = random_set(&mut mix, 4096, 1 << 30);
        let l2 = random_set(&mut mix, 1024, 1 << 30);
        let a = FixedWidthIndex::build(&l1, &suite);
        let b = FixedWidthIndex::build(&l2, &suite);
        let (s1, s2) = choose_group_sizes(4096, 1024, 64);
        let got = intersect_intgroup(&a, &b).unwrap();
        let bound = (4096usize.div_ceil(s1) + 1024usize.div_ceil(s2)) as u64;
        assert!(got.counters.groups_visited <= bound);
    }

    #[test]
    fn overlapping_pairs_visited_exactly_once() {
        // adversarial fixtures: identical boundaries and nested ranges
        let suite = HashSuite::new(Config::with_seed(23));
        let cases: Vec<(Vec<Element>, Vec<Element>)> = vec![
            ((0..64).collect(), (0..64).collect()),
            ((0..64).collect(), (32..96).collect()),
            ((0..128).step_by(2).collect(), (1..129).step_by(2).collect()),
            ((0..16).chain(100..116).collect(), (8..108).collect()),
        ];
        for (l1, l2) in cases {
            let a = FixedWidthIndex::build(&l1, &suite);
            let b = FixedWidthIndex::build(&l2, &suite);
            let s = 8;
            let got = intersect_intgroup_with_sizes(&a, &b, s, s).unwrap();
            assert_eq!(got.elements, merge_intersect(&[&l1, &l2]));
            // count overlapping group pairs by brute force
            let ga = partition_fixed(&l1, s);
            let gb = partition_fixed(&l2, s);
            let mut overlaps = 0u64;
            for x in &ga {
                for y in &gb {
                    if x[0] <= *y.last().unwrap() && y[0] <= *x.last().unwrap() {
                        overlaps += 1;
                    }
                }
            }
            assert_eq!(got.counters.tuples_merged + got.counters.tuples_filtered, overlaps);
        }
    }

    #[test]
    fn single_element_sets() {
        let suite = HashSuite::new(Config::with_seed(24));
        let a = FixedWidthIndex::build(&[5], &suite);
        let b = FixedWidthIndex::build(&[5], &suite);
        assert_eq!(a.sizes(), &[2]);
        let got = intersect_intgroup(&a, &b).unwrap();
        assert_eq!(got.elements, vec![5]);
        let empty = FixedWidthIndex::build(&[], &suite);
        assert!(intersect_intgroup(&a, &empty).unwrap().is_empty());
    }

    #[test]
    fn space_is_linearish() {
        let suite = HashSuite::new(Config::with_seed(25));
        let mut mix = SplitMix64::new(14);
        let set = random_set(&mut mix, 100_000, 1 << 40);
        let idx = FixedWidthIndex::build(&set, &suite);
        let ratio = idx.space_words() as f64 / 100_000.0;
        assert!(ratio < 12.0, "ratio {ratio}");
    }
}
