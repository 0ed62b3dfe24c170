//! Fixed-width bitset for cells `0..512`.

pub(crate) const WORDS: usize = 8;
pub(crate) const CAPACITY: usize = 64 * WORDS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Bits([u64; WORDS]);

impl Bits {
    pub fn single(i: usize) -> Self {
        let mut b = Bits::default();
        b.set(i);
        b
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.0[i >> 6] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        self.0[i >> 6] &= !(1u64 << (i & 63));
    }

    #[inline]
    pub fn shl(&self, by: usize) -> Bits {
        let mut out = [0u64; WORDS];
        let (words, bits) = (by >> 6, by & 63);
        for i in (words..WORDS).rev() {
            let src = i - words;
            let mut v = self.0[src] << bits;
            if bits != 0 && src > 0 {
                v |= self.0[src - 1] >> (64 - bits);
            }
            out[i] = v;
        }
        Bits(out)
    }

    #[inline]
    pub fn or(&self, other: &Bits) -> Bits {
        let mut out = self.0;
        for (o, x) in out.iter_mut().zip(other.0.iter()) {
            *o |= x;
        }
        Bits(out)
    }

    /// True when every bit of `self` is also set in `other`.
    #[inline]
    pub fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }
}
