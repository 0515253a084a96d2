use std::fmt;
use std::ops::{BitAnd, BitOr};

/// A subset of bit positions `{0..w-1}` packed into one storage word.
///
/// Bit `y` is set iff position `y` belongs to the subset, so the word holds
/// the image of a group under a hash into `[0, w)` and intersecting two
/// images is a single AND.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct WordBitmap(u64);

impl WordBitmap {
    pub const EMPTY: WordBitmap = WordBitmap(0);

    pub fn from_bits(bits: u64) -> Self {
        WordBitmap(bits)
    }

    pub fn from_positions(positions: &[u32]) -> Self {
        let mut bm = WordBitmap(0);
        for &y in positions {
            bm.insert(y);
        }
        bm
    }

    pub fn insert(&mut self, y: u32) {
        debug_assert!(y < 64);
        self.0 |= 1u64 << y;
    }

    pub fn contains(self, y: u32) -> bool {
        debug_assert!(y < 64);
        self.0 >> y & 1 == 1
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Number of set positions.
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    /// Number of set positions strictly below `y`.
    pub fn rank(self, y: u32) -> u32 {
        debug_assert!(y < 64);
        (self.0 & ((1u64 << y) - 1)).count_ones()
    }

    /// Set positions in ascending order, in time linear in their count.
    pub fn positions(self) -> Positions {
        Positions(self.0)
    }
}

impl BitAnd for WordBitmap {
    type Output = WordBitmap;
    fn bitand(self, rhs: WordBitmap) -> WordBitmap {
        WordBitmap(self.0 & rhs.0)
    }
}

impl BitOr for WordBitmap {
    type Output = WordBitmap;
    fn bitor(self, rhs: WordBitmap) -> WordBitmap {
        WordBitmap(self.0 | rhs.0)
    }
}

impl fmt::Debug for WordBitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.positions()).finish()
    }
}

/// Ascending iterator over set bits, peeling the lowest 1-bit each step.
pub struct Positions(u64);

impl Iterator for Positions {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let y = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(y)
    }
}

/// Intersection of the represented subsets, one AND.
pub fn bitmap_and(a: WordBitmap, b: WordBitmap) -> WordBitmap {
    a & b
}

/// Set positions of `a` in ascending order.
pub fn bitmap_enumerate(a: WordBitmap) -> Vec<u32> {
    a.positions().collect()
}

/// Reference semantics for lowest-set-bit extraction: `((v-1) XOR v) AND v`.
/// The iterator above uses count-trailing-zeros; the two must agree.
#[cfg(test)]
fn lowest_bit_reference(v: u64) -> u64 {
    (v.wrapping_sub(1) ^ v) & v
}
