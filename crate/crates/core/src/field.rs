//! Arithmetic in the prime field `F_q`.
//!
//! The modulus lives in a [`Field`] context; elements are plain reduced
//! residues ([`Fe`]) and carry no reference to their field.

use crate::{Error, Result};

/// Exclusive upper bound on supported moduli.
pub const MAX_MODULUS: u64 = 1 << 61;

/// A field element: a residue in `[0, q)` for the enclosing [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct Fe(pub(crate) u64);

impl Fe {
    /// The additive identity, valid in every field.
    pub const ZERO: Fe = Fe(0);
    /// The multiplicative identity, valid in every field.
    pub const ONE: Fe = Fe(1);

    /// The residue as an integer.
    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    /// Whether this is the zero element.
    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A prime field `F_q` with `2 <= q < 2^61`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    q: u64,
}

impl Field {
    /// Create the field of order `q`.
    pub fn new(q: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&q) {
            return Err(Error::ModulusOutOfRange(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Field { q })
    }

    /// The modulus `q`.
    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Reduce an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> Fe {
        Fe(v % self.q)
    }

    /// Accept `v` only if it is already reduced.
    pub fn checked_elem(&self, v: u64) -> Result<Fe> {
        if v < self.q {
            Ok(Fe(v))
        } else {
            Err(Error::SymbolOverflow(v))
        }
    }

    /// `a + b`.
    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        // q < 2^61 so the sum cannot overflow.
        let s = a.0 + b.0;
        Fe(if s >= self.q { s - self.q } else { s })
    }

    /// `a - b`.
    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        Fe(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.q - b.0
        })
    }

    /// `-a`.
    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(if a.0 == 0 { 0 } else { self.q - a.0 })
    }

    /// `a * b`.
    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if self.q <= 1 << 32 {
            Fe(a.0 * b.0 % self.q)
        } else {
            Fe((a.0 as u128 * b.0 as u128 % self.q as u128) as u64)
        }
    }

    /// `a^e` by square-and-multiply.
    pub fn pow(&self, mut a: Fe, mut e: u64) -> Fe {
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// `a / b`.
    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `dst[i] -= factor * src[i]` over two equal-length slices.
    #[inline]
    pub(crate) fn sub_scaled(&self, dst: &mut [Fe], src: &[Fe], factor: Fe) {
        let q = self.q;
        let f = factor.0;
        if q <= 1 << 32 {
            for (d, s) in dst.iter_mut().zip(src) {
                if s.0 != 0 {
                    let p = f * s.0 % q;
                    d.0 = if d.0 >= p { d.0 - p } else { d.0 + q - p };
                }
            }
        } else {
            for (d, s) in dst.iter_mut().zip(src) {
                if s.0 != 0 {
                    *d = self.sub(*d, self.mul(factor, *s));
                }
            }
        }
    }

    /// `row[i] *= factor` in place.
    #[inline]
    pub(crate) fn scale(&self, row: &mut [Fe], factor: Fe) {
        for v in row {
            *v = self.mul(*v, factor);
        }
    }
}

/// Deterministic primality for 64-bit inputs: Miller-Rabin over the first
/// twelve prime bases, which has no counterexamples below `3.3·10^24`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| (a as u128 * b as u128 % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let odd = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow(a, odd);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The smallest prime strictly greater than `n`, if below `2^61`.
pub fn next_prime_above(n: u64) -> Option<u64> {
    let mut c = n.checked_add(1)?;
    while c < MAX_MODULUS {
        if is_prime(c) {
            return Some(c);
        }
        c += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_accepts_primes_only() {
        assert!(Field::new(5).is_ok());
        assert!(Field::new(2).is_ok());
        assert_eq!(Field::new(6), Err(Error::NotPrime(6)));
        assert_eq!(Field::new(1), Err(Error::ModulusOutOfRange(1)));
        assert_eq!(
            Field::new(MAX_MODULUS),
            Err(Error::ModulusOutOfRange(MAX_MODULUS))
        );
        // 2^61 - 1 is a Mersenne prime.
        assert!(Field::new(MAX_MODULUS - 1).is_ok());
    }

    #[test]
    fn small_field_values() {
        let f = Field::new(5).unwrap();
        let two = f.elem(2);
        let v = f.sub(f.mul(two, two), Fe::ONE);
        assert_eq!(v, f.elem(3));
        assert_eq!(f.mul(v, v), f.elem(4));
        assert_eq!(f.inv(two).unwrap(), f.elem(3));

        let f7 = Field::new(7).unwrap();
        assert_eq!(f7.inv(Fe::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn fermat_exhaustive_small_primes() {
        for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let f = Field::new(q).unwrap();
            for a in 0..q {
                assert_eq!(f.pow(Fe(a), q), Fe(a), "q={q} a={a}");
            }
        }
    }

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|i| i * i <= n)
                .all(|i| !n.is_multiple_of(i))
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_division(n), "n={n}");
        }
        // Strong pseudoprimes to several small bases.
        for n in [
            3_215_031_751u64,
            2_152_302_898_747,
            3_474_749_660_383,
            341_550_071_728_321,
        ] {
            assert!(!is_prime(n));
            assert!(!trial_division(n));
        }
        for n in [
            4_294_967_291u64,
            4_294_967_311,
            1_000_000_007,
            999_999_999_989,
        ] {
            assert_eq!(is_prime(n), trial_division(n), "n={n}");
        }
    }

    #[test]
    fn next_prime() {
        assert_eq!(next_prime_above(704), Some(709));
        assert_eq!(next_prime_above(4), Some(5));
        assert_eq!(next_prime_above(1), Some(2));
    }

    fn field_and_elems() -> impl Strategy<Value = (u64, u64, u64, u64)> {
        prop::sample::select(vec![2u64, 3, 5, 709, 65_537, 4_294_967_311, (1 << 61) - 1])
            .prop_flat_map(|q| (Just(q), 0..q, 0..q, 0..q))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn field_axioms((q, a, b, c) in field_and_elems()) {
            let f = Field { q };
            let (a, b, c) = (Fe(a), Fe(b), Fe(c));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
            prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
            }
        }
    }
}
