//! Append-only bit buffer. Fields are packed LSB-first into little-endian
//! 64-bit words, so bit `i` of a pushed value lands at stream position
//! `len + i`.

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBuf {
    words: Vec<u64>,
    len: u64,
}

impl BitBuf {
    pub fn new() -> BitBuf {
        BitBuf::default()
    }

    pub fn from_words(words: Vec<u64>, len: u64) -> BitBuf {
        assert!(len <= words.len() as u64 * 64);
        BitBuf { words, len }
    }

    pub fn len_bits(&self) -> u64 {
        self.len
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Append the low `width` bits of `value`.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        if width == 0 {
            return;
        }
        let value = if width == 64 { value } else { value & ((1u64 << width) - 1) };
        let word = (self.len >> 6) as usize;
        let off = (self.len & 63) as u32;
        if word == self.words.len() {
            self.words.push(0);
        }
        self.words[word] |= value << off;
        if off + width > 64 {
            self.words.push(value >> (64 - off));
        }
        self.len += width as u64;
    }

    /// Read `width` bits starting at `at`. Caller keeps `at + width <= len`.
    pub fn read_bits(&self, at: u64, width: u32) -> u64 {
        debug_assert!(at + width as u64 <= self.len);
        if width == 0 {
            return 0;
        }
        let word = (at >> 6) as usize;
        let off = (at & 63) as u32;
        let mut v = self.words[word] >> off;
        if off + width > 64 {
            v |= self.words[word + 1] << (64 - off);
        }
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    pub fn checked_read_bits(&self, at: u64, width: u32) -> Option<u64> {
        if at + width as u64 > self.len {
            None
        } else {
            Some(self.read_bits(at, width))
        }
    }

    /// Unary code: `n` one-bits then a zero terminator.
    pub fn push_unary(&mut self, mut n: u64) {
        while n >= 64 {
            self.push_bits(u64::MAX, 64);
            n -= 64;
        }
        self.push_bits((1u64 << n) - 1, n as u32);
        self.push_bits(0, 1);
    }

    /// Decode a unary value at `at`, returning it and the position after the
    /// terminator. `None` if the stream ends before a terminator.
    pub fn read_unary(&self, at: u64) -> Option<(u64, u64)> {
        let mut pos = at;
        let mut run = 0u64;
        loop {
            if pos >= self.len {
                return None;
            }
            let avail = (64 - (pos & 63)).min(self.len - pos) as u32;
            let chunk = self.read_bits(pos, avail);
            let zeros = !chunk & (((1u128 << avail) - 1) as u64);
            if zeros == 0 {
                run += avail as u64;
                pos += avail as u64;
            } else {
                let ones = zeros.trailing_zeros() as u64;
                return Some((run + ones, pos + ones + 1));
            }
        }
    }

    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(bytes: &[u8], len: u64) -> Option<BitBuf> {
        if bytes.len() % 8 != 0 || len > bytes.len() as u64 * 8 {
            return None;
        }
        let words = bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Some(BitBuf { words, len })
    }
}
