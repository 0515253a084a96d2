use rand::RngCore;

/// Seeded bijection on `u64` used to spread elements across prefix groups.
///
/// Two rounds of odd-constant multiply followed by xor-shift. Both steps are
/// invertible mod 2^64, so [`PermFn::invert`] recovers the argument exactly,
/// and the top bits (the prefixes that name groups) are well mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermFn {
    mul: [u64; 2],
    inv: [u64; 2],
    shift: [u32; 2],
}

impl PermFn {
    pub fn from_seed(seed: u64) -> PermFn {
        let mut mix = SplitMix64::new(seed);
        let mul = [mix.next_u64() | 1, mix.next_u64() | 1];
        let shift = [
            13 + (mix.next_u64() % 39) as u32,
            13 + (mix.next_u64() % 39) as u32,
        ];
        PermFn {
            mul,
            inv: [mul_inverse(mul[0]), mul_inverse(mul[1])],
            shift,
        }
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        let mut v = x.wrapping_mul(self.mul[0]);
        v ^= v >> self.shift[0];
        v = v.wrapping_mul(self.mul[1]);
        v ^ (v >> self.shift[1])
    }

    #[inline]
    pub fn invert(&self, y: u64) -> u64 {
        let v = unxorshift(y, self.shift[1]);
        let v = v.wrapping_mul(self.inv[1]);
        let v = unxorshift(v, self.shift[0]);
        v.wrapping_mul(self.inv[0])
    }

    /// Round constants, exposed for index file validation.
    pub fn round_constants(&self) -> ([u64; 2], [u32; 2]) {
        (self.mul, self.shift)
    }
}

/// The `t` most significant bits of `v`; `t = 0` is the empty prefix 0.
#[inline]
pub fn prefix(v: u64, t: u32) -> u64 {
    match t {
        0 => 0,
        t if t >= 64 => v,
        t => v >> (64 - t),
    }
}

/// Inverse of an odd multiplier mod 2^64 by Newton iteration; each round
/// doubles the number of correct low bits.
fn mul_inverse(a: u64) -> u64 {
    debug_assert!(a & 1 == 1);
    let mut x = a;
    for _ in 0..5 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

/// Undo `x ^= x >> s`: the top `s` bits of the output are already correct
/// and each pass extends that by `s` more.
fn unxorshift(y: u64, s: u32) -> u64 {
    let mut x = y;
    for _ in 0..(63 / s) {
        x = y ^ (x >> s);
    }
    x
}

/// SplitMix64 stream used to derive permutation and hash parameters.
pub(crate) struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }
}

impl RngCore for SplitMix64 {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut x = self.0;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        x ^ (x >> 31)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}
