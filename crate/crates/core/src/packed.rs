//! Joint state vectors packed into fixed-width words.

use smallvec::SmallVec;

/// Bit layout shared by all state vectors of one network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packing {
    bits: u32,
    len: usize,
}

impl Packing {
    /// `max_states` is the largest state count among the instances.
    pub fn new(len: usize, max_states: usize) -> Self {
        let mut bits = 1;
        while (1usize << bits) < max_states {
            bits += 1;
        }
        Packing { bits, len }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn per_word(&self) -> usize {
        (64 / self.bits) as usize
    }

    fn words(&self) -> usize {
        self.len.div_ceil(self.per_word()).max(1)
    }

    pub fn pack(&self, states: &[usize]) -> StateVec {
        let mut v = StateVec(SmallVec::from_elem(0, self.words()));
        for (i, &s) in states.iter().enumerate() {
            self.set(&mut v, i, s);
        }
        v
    }

    pub fn unpack(&self, v: &StateVec) -> Vec<usize> {
        (0..self.len).map(|i| self.get(v, i)).collect()
    }

    #[inline]
    pub fn get(&self, v: &StateVec, i: usize) -> usize {
        let pw = self.per_word();
        let shift = (i % pw) as u32 * self.bits;
        ((v.0[i / pw] >> shift) & ((1u64 << self.bits) - 1)) as usize
    }

    #[inline]
    pub fn set(&self, v: &mut StateVec, i: usize, s: usize) {
        let pw = self.per_word();
        let shift = (i % pw) as u32 * self.bits;
        let mask = ((1u64 << self.bits) - 1) << shift;
        let w = &mut v.0[i / pw];
        *w = (*w & !mask) | ((s as u64) << shift);
    }
}

/// Packed per-instance states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVec(SmallVec<[u64; 2]>);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pack_unpack_roundtrip(states in proptest::collection::vec(0usize..5, 0..40)) {
            let p = Packing::new(states.len(), 5);
            prop_assert_eq!(p.unpack(&p.pack(&states)), states);
        }
    }

    #[test]
    fn width_grows_with_state_count() {
        assert_eq!(Packing::new(3, 2).bits(), 1);
        assert_eq!(Packing::new(3, 3).bits(), 2);
        assert_eq!(Packing::new(3, 16).bits(), 4);
    }
}
