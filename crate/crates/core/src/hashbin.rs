//! Skew-friendly intersection: partition every set at resolution
//! `t = ceil(log2 n1)` taken from the smallest set, then check each of its
//! elements against the matching interval of every larger set by binary
//! search over g-values. With roughly one small-set element per group, the
//! expected work is `n1 log(n2/n1)` comparisons.

use crate::config::Element;
use crate::error::{Error, Result};
use crate::hash::HashSuite;
use crate::perm::prefix;
use crate::result::{Counters, IntersectionResult};

/// Permutation-ordered view of one set: ascending g-values with their
/// elements. Group intervals are located by searching the g-values rather
/// than storing boundaries.
#[derive(Clone, Copy)]
pub struct GSortedView<'a> {
    gvals: &'a [u64],
    elems: &'a [Element],
    suite: &'a HashSuite,
}

impl<'a> GSortedView<'a> {
    pub(crate) fn new(gvals: &'a [u64], elems: &'a [Element], suite: &'a HashSuite) -> Self {
        GSortedView { gvals, elems, suite }
    }

    pub fn len(&self) -> usize {
        self.gvals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gvals.is_empty()
    }

    pub fn gvals(&self) -> &[u64] {
        self.gvals
    }

    pub fn elems(&self) -> &[Element] {
        self.elems
    }

    pub fn suite(&self) -> &HashSuite {
        self.suite
    }
}

/// Positions whose g-values carry the `t`-bit prefix `z`, located by binary
/// search from scratch. The interval may be empty.
pub fn interval_of(view: &GSortedView, t: u32, z: u64) -> (usize, usize) {
    let (lo_bound, hi_bound) = prefix_value_range(t, z);
    let lo = view.gvals.partition_point(|&g| (g as u128) < lo_bound);
    let hi = lo + view.gvals[lo..].partition_point(|&g| (g as u128) < hi_bound);
    (lo, hi)
}

/// Half-open g-value range covered by prefix `z` at resolution `t`.
fn prefix_value_range(t: u32, z: u64) -> (u128, u128) {
    if t == 0 {
        return (0, 1u128 << 64);
    }
    let shift = 64 - t.min(64);
    ((z as u128) << shift, ((z as u128) + 1) << shift)
}

/// Intersect k permutation-sorted sets, smallest first. The smallest set is
/// walked in runs of equal prefix; each run locates the matching interval of
/// every other set by galloping forward from the previous interval, and each
/// element is then binary-searched per set, stopping at the first miss.
pub fn intersect_hashbin(views: &[GSortedView]) -> Result<IntersectionResult> {
    if views.len() < 2 {
        return Err(Error::TooFewSets { min: 2, got: views.len() });
    }
    for v in &views[1..] {
        views[0].suite().ensure_compatible(v.suite())?;
    }
    if views.iter().any(|v| v.is_empty()) {
        return Ok(IntersectionResult::empty());
    }
    let mut order: Vec<usize> = (0..views.len()).collect();
    order.sort_by_key(|&i| views[i].len());
    let small = &views[order[0]];
    let rest: Vec<&GSortedView> = order[1..].iter().map(|&i| &views[i]).collect();

    let t = crate::chains::ceil_log2(small.len() as u64);
    let mut c = Counters::default();
    let mut out: Vec<Element> = Vec::new();

    let mut cursors = vec![0usize; rest.len()];
    let mut intervals: Vec<Option<(usize, usize)>> = vec![None; rest.len()];
    let mut i = 0;
    while i < small.len() {
        let z = prefix(small.gvals()[i], t);
        let run_end = i + small.gvals()[i..].partition_point(|&g| prefix(g, t) == z);
        intervals.iter_mut().for_each(|iv| *iv = None);
        c.groups_visited += 1;
        for p in i..run_end {
            let g = small.gvals()[p];
            let mut member = true;
            for (j, other) in rest.iter().enumerate() {
                let (lo, hi) = match intervals[j] {
                    Some(iv) => iv,
                    None => {
                        let iv = locate_interval(other, t, z, cursors[j], &mut c.comparisons);
                        cursors[j] = iv.1;
                        intervals[j] = Some(iv);
                        iv
                    }
                };
                if !contains(&other.gvals()[lo..hi], g, &mut c.comparisons) {
                    member = false;
                    break;
                }
            }
            if member {
                out.push(small.elems()[p]);
            }
        }
        i = run_end;
    }
    out.sort_unstable();
    Ok(IntersectionResult { elements: out, counters: c })
}

/// Locate the interval of prefix `z` by galloping forward from `from`.
/// Successive runs advance monotonically, so the total cost over a query is
/// the sum of logs of the gaps.
fn locate_interval(view: &GSortedView, t: u32, z: u64, from: usize, comparisons: &mut u64) -> (usize, usize) {
    let (lo_bound, hi_bound) = prefix_value_range(t, z);
    let lo = gallop(view.gvals(), from, lo_bound, comparisons);
    let hi = gallop(view.gvals(), lo, hi_bound, comparisons);
    (lo, hi)
}

/// First position at or after `from` whose value is >= `bound`, by doubling
/// steps then binary search inside the last window.
fn gallop(arr: &[u64], from: usize, bound: u128, comparisons: &mut u64) -> usize {
    let mut lo = from;
    if lo >= arr.len() {
        return arr.len();
    }
    *comparisons += 1;
    if (arr[lo] as u128) >= bound {
        return lo;
    }
    // invariant: arr[lo] < bound
    let mut step = 1usize;
    let mut hi = lo + step;
    while hi < arr.len() {
        *comparisons += 1;
        if (arr[hi] as u128) >= bound {
            break;
        }
        lo = hi;
        step <<= 1;
        hi = lo + step;
    }
    let mut hi = hi.min(arr.len());
    // binary search in (lo, hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        *comparisons += 1;
        if (arr[mid] as u128) < bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Binary-search membership of `g` in a sorted interval.
fn contains(interval: &[u64], g: u64, comparisons: &mut u64) -> bool {
    let (mut lo, mut hi) = (0usize, interval.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        *comparisons += 1;
        match interval[mid].cmp(&g) {
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}
