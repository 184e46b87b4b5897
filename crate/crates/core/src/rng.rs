//! Seeded 64-bit shift-register generator.
//!
//! The stream is fully specified by its constants so it can be reproduced
//! bit-for-bit in any language:
//!
//! * seeding: SplitMix64 (`state += 0x9E3779B97F4A7C15`, then
//!   `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9`,
//!   `z = (z ^ (z >> 27)) * 0x94D049BB133111EB`, `z ^ (z >> 31)`);
//! * update: xorshift64* (`x ^= x >> 12; x ^= x << 25; x ^= x >> 27`),
//!   output `x * 0x2545F4914F6CDD1D`;
//! * uniform doubles take the top 53 bits of the output: `(out >> 11) * 2^-53`.
//!
//! Independent sub-streams (one per restart, say) are derived from
//! `(seed, index)` by seeding with `splitmix64(seed ^ splitmix64(index))`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const XORSHIFT_MULT: u64 = 0x2545_F491_4F6C_DD1D;

/// One SplitMix64 step applied to `x` (state already advanced by the caller's increment).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct ShiftRegisterRng {
    state: u64,
}

impl ShiftRegisterRng {
    pub fn new(seed: u64) -> Self {
        let mut state = splitmix64(seed);
        if state == 0 {
            state = GOLDEN;
        }
        ShiftRegisterRng { state }
    }

    /// Sub-stream `index` of `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        Self::new(seed ^ splitmix64(index))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(XORSHIFT_MULT)
    }

    /// Uniform on [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1].
    pub fn next_f64_open0(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // first outputs of the reference SplitMix64 seeded with 0
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(GOLDEN), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn deterministic_streams() {
        let a: Vec<u64> = {
            let mut r = ShiftRegisterRng::new(42);
            (0..8).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = ShiftRegisterRng::new(42);
            (0..8).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        let mut c = ShiftRegisterRng::stream(42, 1);
        assert_ne!(a[0], c.next_u64());
    }

    #[test]
    fn uniform_range_and_mean() {
        let mut r = ShiftRegisterRng::new(7);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        assert!((sum / n as f64 - 0.5).abs() < 4.0 / (12.0 * n as f64).sqrt());
        let v = r.next_f64_open0();
        assert!(v > 0.0 && v <= 1.0);
    }
}
