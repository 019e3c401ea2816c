//! Counter-based random numbers.
//!
//! Every stochastic quantity in the crate is a pure function of
//! `(seed, stream labels, counter)`: SplitMix64 run in counter mode, where the
//! state for counter `c` under key `K` is `K + c·γ` and the output is the
//! SplitMix64 finalizer of that state. Keys are derived from a seed by hashing
//! labels into them, so parallel workers can address any value directly and
//! results never depend on evaluation order or thread count.

use rand::RngCore;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A key selecting one independent counter stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey(mix64(seed ^ 0x5851_f42d_4c95_7f2d))
    }

    /// Child key for a labelled sub-stream (trial index, subset size, ...).
    pub fn derive(self, label: u64) -> Self {
        StreamKey(mix64(self.0 ^ mix64(label.wrapping_add(GAMMA))))
    }

    /// Value number `counter` of this stream.
    #[inline]
    pub fn at(self, counter: u64) -> u64 {
        mix64(self.0.wrapping_add(counter.wrapping_mul(GAMMA)))
    }

    /// Sequential view, for code that wants a `rand::Rng`.
    pub fn rng(self) -> CounterRng {
        CounterRng {
            key: self,
            counter: 0,
        }
    }
}

/// Sequential generator over a [`StreamKey`].
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: StreamKey,
    counter: u64,
}

impl CounterRng {
    pub fn seeded(seed: u64) -> Self {
        StreamKey::new(seed).rng()
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let v = self.key.at(self.counter);
        self.counter += 1;
        v
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

/// 64-bit fixed-point uniform: `v` stands for `v / 2^64 ∈ [0,1)`.
#[inline]
pub fn unit_level(v: u64, l: usize) -> usize {
    ((v as u128 * l as u128) >> 64) as usize
}

#[inline]
pub fn unit_to_f64(v: u64) -> f64 {
    (v >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps a uniform `u` into the half-open slot `[level/l, (level+1)/l)`,
/// exactly: the result always satisfies `unit_level(result, l) == level`.
#[inline]
pub fn unit_in_level(u: u64, level: usize, l: usize) -> u64 {
    debug_assert!(level < l);
    let num = ((level as u128) << 64) + u as u128;
    let l = l as u128;
    // ceil keeps us inside the slot from below; clamp guards the top end.
    let x = num.div_ceil(l);
    let hi = (((level as u128 + 1) << 64) - 1) / l;
    let x = x.min(hi) as u64;
    debug_assert_eq!(unit_level(x, l as usize), level);
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = StreamKey::new(7);
        assert_eq!(a.at(3), StreamKey::new(7).at(3));
        assert_ne!(a.at(3), a.at(4));
        assert_ne!(a.derive(1).at(0), a.derive(2).at(0));
        let mut r = a.rng();
        assert_eq!(r.next_u64(), a.at(0));
        assert_eq!(r.next_u64(), a.at(1));
    }

    #[test]
    fn level_slots_are_exact() {
        for l in 1..20usize {
            for level in 0..l {
                for u in [0u64, 1, 2, u64::MAX / 3, u64::MAX - 1, u64::MAX] {
                    assert_eq!(unit_level(unit_in_level(u, level, l), l), level);
                }
            }
        }
        assert_eq!(unit_level(1u64 << 63, 2), 1);
        assert_eq!(unit_level((1u64 << 63) - 1, 2), 0);
    }

    #[test]
    fn uniform_mean_is_half() {
        let key = StreamKey::new(11);
        let n = 100_000u64;
        let s: f64 = (0..n).map(|i| unit_to_f64(key.at(i))).sum();
        assert!((s / n as f64 - 0.5).abs() < 0.005);
    }
}
