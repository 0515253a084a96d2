//! Group formation and the reference small-group intersection kernel.
//!
//! Groups here store their inverted mappings explicitly as short arrays,
//! which keeps the kernel easy to check against brute force. The compact
//! first/next encoding used by the indexes lives in the multi-resolution
//! structure; both must produce identical results.

use std::collections::BTreeMap;

use crate::bitmap::WordBitmap;
use crate::config::Element;
use crate::hash::HashFn;
use crate::perm::{prefix, PermFn};

/// A small group: elements in order of their order key (natural value for
/// fixed-width groups, permuted value for prefix groups), the word image of
/// their hash values, and per-bit inverted mappings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    elements: Vec<Element>,
    keys: Vec<u64>,
    image: WordBitmap,
    /// `(y, indices into elements)` for every set bit `y`, ascending by `y`;
    /// each index list preserves the group's element order.
    inverted: Vec<(u32, Vec<u32>)>,
}

impl Group {
    /// Summarize elements ordered by their natural value.
    pub fn from_sorted(elements: &[Element], h: &HashFn) -> Group {
        let keys = elements.to_vec();
        Group::build(elements.to_vec(), keys, h)
    }

    /// Summarize `(g-value, element)` pairs ordered by g-value.
    pub fn from_keyed(pairs: &[(u64, Element)], h: &HashFn) -> Group {
        let keys = pairs.iter().map(|&(k, _)| k).collect();
        let elements = pairs.iter().map(|&(_, x)| x).collect();
        Group::build(elements, keys, h)
    }

    fn build(elements: Vec<Element>, keys: Vec<u64>, h: &HashFn) -> Group {
        debug_assert!(!elements.is_empty());
        debug_assert!(keys.windows(2).all(|p| p[0] < p[1]));
        let mut image = WordBitmap::EMPTY;
        let mut inverted: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (i, &x) in elements.iter().enumerate() {
            let y = h.eval(x);
            image.insert(y);
            inverted.entry(y).or_default().push(i as u32);
        }
        Group { elements, keys, image, inverted: inverted.into_iter().collect() }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Smallest order key, `inf` of the group's range.
    pub fn lo(&self) -> u64 {
        self.keys[0]
    }

    /// Largest order key, `sup` of the group's range.
    pub fn hi(&self) -> u64 {
        *self.keys.last().unwrap()
    }

    pub fn image(&self) -> WordBitmap {
        self.image
    }

    /// Elements hashing to `y`, in group order.
    pub fn preimage(&self, y: u32) -> &[u32] {
        match self.inverted.binary_search_by_key(&y, |e| e.0) {
            Ok(i) => &self.inverted[i].1,
            Err(_) => &[],
        }
    }

    fn key_list(&self, y: u32) -> impl Iterator<Item = (u64, Element)> + '_ {
        self.preimage(y)
            .iter()
            .map(move |&i| (self.keys[i as usize], self.elements[i as usize]))
    }
}

/// Pair-level collision accounting for one small-group intersection.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct CollisionStats {
    /// Cross-group element pairs (tuples for k > 2) with equal hash value.
    pub pairs_same_hash: u64,
    /// Of those, pairs that were the same element.
    pub matches: u64,
}

impl CollisionStats {
    /// Same-hash pairs of distinct elements.
    pub fn spurious(&self) -> u64 {
        self.pairs_same_hash - self.matches
    }
}

/// Split an ascending duplicate-free list into consecutive chunks of `s`
/// elements; only the last chunk may be shorter.
pub fn partition_fixed(sorted: &[Element], s: usize) -> Vec<&[Element]> {
    assert!(s >= 1);
    sorted.chunks(s).collect()
}

/// Partition by the `t`-bit prefix of the permuted value. Within each group
/// the pairs come out ordered by g-value.
pub fn partition_by_prefix(
    set: &[Element],
    g: &PermFn,
    t: u32,
) -> BTreeMap<u64, Vec<(u64, Element)>> {
    let mut groups: BTreeMap<u64, Vec<(u64, Element)>> = BTreeMap::new();
    for &x in set {
        let gv = g.apply(x);
        groups.entry(prefix(gv, t)).or_default().push((gv, x));
    }
    for members in groups.values_mut() {
        members.sort_unstable();
    }
    groups
}

/// Summarize a natural-ordered group. See [`Group::from_keyed`] for prefix
/// groups.
pub fn summarize_group(elements: &[Element], h: &HashFn) -> Group {
    Group::from_sorted(elements, h)
}

/// Intersect two summarized groups: AND the images, then merge the inverted
/// mappings of each surviving bit by order key.
pub fn intersect_small(a: &Group, b: &Group) -> (Vec<Element>, CollisionStats) {
    let mut out: Vec<(u64, Element)> = Vec::new();
    let mut stats = CollisionStats::default();
    let h = a.image() & b.image();
    for y in h.positions() {
        let la = a.preimage(y);
        let lb = b.preimage(y);
        stats.pairs_same_hash += la.len() as u64 * lb.len() as u64;
        let mut ia = a.key_list(y);
        let mut ib = b.key_list(y);
        let mut ca = ia.next();
        let mut cb = ib.next();
        while let (Some((ka, xa)), Some((kb, _))) = (ca, cb) {
            if ka < kb {
                ca = ia.next();
            } else if ka > kb {
                cb = ib.next();
            } else {
                out.push((ka, xa));
                stats.matches += 1;
                ca = ia.next();
                cb = ib.next();
            }
        }
    }
    out.sort_unstable();
    (out.into_iter().map(|(_, x)| x).collect(), stats)
}

/// k-way variant: AND all images, bail out on zero, otherwise merge the k
/// inverted mappings of each surviving bit.
pub fn intersect_small_k(groups: &[&Group]) -> (Vec<Element>, CollisionStats) {
    let mut stats = CollisionStats::default();
    match groups.len() {
        0 => return (Vec::new(), stats),
        1 => {
            let g = groups[0];
            stats.pairs_same_hash = g.len() as u64;
            stats.matches = g.len() as u64;
            return (g.elements.to_vec(), stats);
        }
        _ => {}
    }
    let mut h = groups[0].image();
    for g in &groups[1..] {
        h = h & g.image();
    }
    let mut out: Vec<(u64, Element)> = Vec::new();
    if h.is_empty() {
        return (Vec::new(), stats);
    }
    for y in h.positions() {
        let mut tuples = 1u64;
        for g in groups {
            tuples = tuples.saturating_mul(g.preimage(y).len() as u64);
        }
        stats.pairs_same_hash = stats.pairs_same_hash.saturating_add(tuples);

        let mut acc: Vec<(u64, Element)> = groups[0].key_list(y).collect();
        for g in &groups[1..] {
            let other: Vec<(u64, Element)> = g.key_list(y).collect();
            acc = merge_keyed(&acc, &other);
            if acc.is_empty() {
                break;
            }
        }
        stats.matches += acc.len() as u64;
        out.extend(acc);
    }
    out.sort_unstable();
    (out.into_iter().map(|(_, x)| x).collect(), stats)
}

fn merge_keyed(a: &[(u64, Element)], b: &[(u64, Element)]) -> Vec<(u64, Element)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::hash::HashSuite;
    use crate::perm::SplitMix64;
    use rand::RngCore;
    use std::collections::BTreeSet;

    fn fixture_sets() -> (Vec<Element>, Vec<Element>) {
        (
            vec![1001, 1002, 1004, 1009, 1016, 1027, 1043],
            vec![1001, 1003, 1005, 1009, 1011, 1016, 1022, 1032, 1034, 1049],
        )
    }

    fn fixture_hash() -> HashFn {
        HashFn::offset_mod(16, 1000)
    }

    #[test]
    fn fixed_partition_fixture() {
        let (l1, l2) = fixture_sets();
        let g1 = partition_fixed(&l1, 4);
        assert_eq!(g1, vec![&[1001, 1002, 1004, 1009][..], &[1016, 1027, 1043][..]]);
        let g2 = partition_fixed(&l2, 4);
        assert_eq!(
            g2,
            vec![
                &[1001, 1003, 1005, 1009][..],
                &[1011, 1016, 1022, 1032][..],
                &[1034, 1049][..]
            ]
        );
        // s >= n gives a single group
        assert_eq!(partition_fixed(&l1, 100), vec![&l1[..]]);
        assert!(partition_fixed(&[], 4).is_empty());
    }

    #[test]
    fn summarize_fixture_images() {
        let (l1, l2) = fixture_sets();
        let h = fixture_hash();
        let images: Vec<WordBitmap> = partition_fixed(&l1, 4)
            .iter()
            .chain(partition_fixed(&l2, 4).iter())
            .map(|g| summarize_group(g, &h).image())
            .collect();
        let expect = [
            WordBitmap::from_positions(&[1, 2, 4, 9]),
            WordBitmap::from_positions(&[0, 11]),
            WordBitmap::from_positions(&[1, 3, 5, 9]),
            WordBitmap::from_positions(&[0, 6, 11]),
            WordBitmap::from_positions(&[1, 2]),
        ];
        assert_eq!(images, expect);
    }

    #[test]
    fn inverted_mapping_fixture() {
        let (_, l2) = fixture_sets();
        let h = fixture_hash();
        let l2_2 = summarize_group(&partition_fixed(&l2, 4)[1], &h);
        let members: Vec<Element> =
            l2_2.preimage(0).iter().map(|&i| l2_2.elements()[i as usize]).collect();
        assert_eq!(members, vec![1016, 1032]);
        assert!(l2_2.preimage(3).is_empty());
    }

    #[test]
    fn singleton_group() {
        let h = fixture_hash();
        let g = summarize_group(&[1016], &h);
        assert_eq!(g.image(), WordBitmap::from_positions(&[0]));
        assert_eq!(g.preimage(0), &[0]);
    }

    #[test]
    fn intersect_small_fixture_pair() {
        // L1's second group against L2's second group: images AND to {0, 11},
        // bit 0 yields 1016, bit 11 merges [1027, 1043] against [1011] to
        // nothing.
        let (l1, l2) = fixture_sets();
        let h = fixture_hash();
        let a = summarize_group(&partition_fixed(&l1, 4)[1], &h);
        let b = summarize_group(&partition_fixed(&l2, 4)[1], &h);
        assert_eq!(a.image() & b.image(), WordBitmap::from_positions(&[0, 11]));
        let (out, stats) = intersect_small(&a, &b);
        assert_eq!(out, vec![1016]);
        // pairs: bit 0 has 1x2, bit 11 has 2x1
        assert_eq!(stats.pairs_same_hash, 4);
        assert_eq!(stats.matches, 1);
        assert_eq!(stats.spurious(), 3);
    }

    #[test]
    fn disjoint_images_no_work() {
        let (l1, l2) = fixture_sets();
        let h = fixture_hash();
        let a = summarize_group(&partition_fixed(&l1, 4)[1], &h);
        let b = summarize_group(&partition_fixed(&l2, 4)[2], &h);
        assert!((a.image() & b.image()).is_empty());
        let (out, stats) = intersect_small(&a, &b);
        assert!(out.is_empty());
        assert_eq!(stats.pairs_same_hash, 0);
    }

    fn random_set(mix: &mut SplitMix64, n: usize, span: u64) -> Vec<Element> {
        let mut s = BTreeSet::new();
        while s.len() < n {
            s.insert(mix.next_u64() % span);
        }
        s.into_iter().collect()
    }

    #[test]
    fn random_pairs_match_brute_force() {
        let mut mix = SplitMix64::new(21);
        let suite = HashSuite::new(Config::with_seed(3));
        for trial in 0..1000 {
            let h = suite.primary_hash();
            let a_elems = random_set(&mut mix, 8, 200 + trial);
            let b_elems = random_set(&mut mix, 8, 200 + trial);
            let a = summarize_group(&a_elems, h);
            let b = summarize_group(&b_elems, h);
            let (mut out, stats) = intersect_small(&a, &b);
            out.sort_unstable();
            let expect: Vec<Element> =
                a_elems.iter().filter(|x| b_elems.contains(x)).copied().collect();
            assert_eq!(out, expect);
            assert_eq!(stats.matches as usize, expect.len());
            // commutativity as sets
            let (mut rev, _) = intersect_small(&b, &a);
            rev.sort_unstable();
            assert_eq!(rev, expect);
        }
    }

    #[test]
    fn k_way_matches_brute_force() {
        let mut mix = SplitMix64::new(22);
        let suite = HashSuite::new(Config::with_seed(4));
        for _ in 0..1000 {
            let h = suite.primary_hash();
            let sets: Vec<Vec<Element>> = (0..3).map(|_| random_set(&mut mix, 8, 64)).collect();
            let groups: Vec<Group> = sets.iter().map(|s| summarize_group(s, h)).collect();
            let refs: Vec<&Group> = groups.iter().collect();
            let (out, _) = intersect_small_k(&refs);
            let expect: Vec<Element> = sets[0]
                .iter()
                .filter(|x| sets[1].contains(x) && sets[2].contains(x))
                .copied()
                .collect();
            assert_eq!(out, expect);
        }
    }

    #[test]
    fn k_way_consistency() {
        let suite = HashSuite::new(Config::with_seed(5));
        let h = suite.primary_hash();
        let a = summarize_group(&[3, 14, 15, 92, 653], h);
        let b = summarize_group(&[1, 14, 92, 100], h);
        // k = 1 returns the group
        let (one, _) = intersect_small_k(&[&a]);
        assert_eq!(one, a.elements());
        // k = 2 agrees with the pair kernel
        let (two, _) = intersect_small_k(&[&a, &b]);
        let (pair, _) = intersect_small(&a, &b);
        assert_eq!(two, pair);
    }

    #[test]
    fn prefix_partition_laws() {
        let g = PermFn::from_seed(8);
        let mut mix = SplitMix64::new(30);
        let set = random_set(&mut mix, 500, u64::MAX);
        // t = 0 puts everything in one group
        let whole = partition_by_prefix(&set, &g, 0);
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[&0].len(), set.len());
        // groups cover the set disjointly
        for t in [1u32, 3, 6] {
            let parts = partition_by_prefix(&set, &g, t);
            let mut all: Vec<Element> =
                parts.values().flat_map(|v| v.iter().map(|&(_, x)| x)).collect();
            all.sort_unstable();
            assert_eq!(all, set);
            for (&z, members) in &parts {
                assert!(members.windows(2).all(|p| p[0].0 < p[1].0));
                assert!(members.iter().all(|&(gv, _)| prefix(gv, t) == z));
            }
        }
    }

    #[test]
    fn prefix_group_sizes_in_expected_band() {
        // n = 6400, t = 10: mean group size over seeds stays within [4, 8]
        for seed in 0..8 {
            let g = PermFn::from_seed(seed);
            let mut mix = SplitMix64::new(seed + 100);
            let set = random_set(&mut mix, 6400, u64::MAX);
            let parts = partition_by_prefix(&set, &g, 10);
            let mean = 6400.0 / (1u64 << 10) as f64; // over all slots
            assert!((4.0..=8.0).contains(&mean));
            let nonempty_mean: f64 =
                parts.values().map(|v| v.len() as f64).sum::<f64>() / parts.len() as f64;
            assert!((4.0..=8.5).contains(&nonempty_mean), "mean {nonempty_mean}");
        }
    }

    #[test]
    fn collision_mean_within_bound() {
        // disjoint groups of side sqrt(w): expected spurious pairs <= 1
        let mut mix = SplitMix64::new(77);
        let trials = 2000;
        let mut spurious = 0u64;
        for _ in 0..trials {
            let h = HashFn::random(64, &mut mix);
            let a_elems = random_set(&mut mix, 8, 1 << 40);
            let b_elems: Vec<Element> =
                random_set(&mut mix, 8, 1 << 40).iter().map(|x| x + (1 << 41)).collect();
            let a = summarize_group(&a_elems, &h);
            let b = summarize_group(&b_elems, &h);
            let (_, stats) = intersect_small(&a, &b);
            spurious += stats.spurious();
        }
        let mean = spurious as f64 / trials as f64;
        assert!(mean <= 1.5, "mean spurious {mean}");
    }

    #[test]
    fn removing_an_element_never_adds_output() {
        let suite = HashSuite::new(Config::with_seed(6));
        let h = suite.primary_hash();
        let mut mix = SplitMix64::new(41);
        for _ in 0..200 {
            let a_elems = random_set(&mut mix, 8, 100);
            let b_elems = random_set(&mut mix, 8, 100);
            let a = summarize_group(&a_elems, h);
            let b = summarize_group(&b_elems, h);
            let (full, _) = intersect_small(&a, &b);
            for drop in 0..a_elems.len() {
                let mut fewer = a_elems.clone();
                fewer.remove(drop);
                let a2 = summarize_group(&fewer, h);
                let (part, _) = intersect_small(&a2, &b);
                assert!(part.iter().all(|x| full.contains(x)));
            }
        }
    }
}
