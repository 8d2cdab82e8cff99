//! Portable deterministic generator for coefficient search.
//!
//! The stream is fixed by contract so that a `(seed, q, n, k, d)` tuple
//! reproduces the same coefficient table in any implementation:
//!
//! * the state is initialised to `splitmix64(seed)`, or to
//!   `0x9E37_79B9_7F4A_7C15` if that is zero;
//! * each step is xorshift64* with shifts `(12, 25, 27)` and output
//!   multiplier `0x2545_F491_4F6C_DD1D`;
//! * a uniform draw from `[0, bound)` rejects outputs at or above
//!   `u64::MAX - (u64::MAX % bound)` and returns `x % bound`.

/// xorshift64* generator.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl XorShift64Star {
    /// Seed the generator.
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        XorShift64Star {
            state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s },
        }
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform draw from `[0, bound)`; `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}
