//! The label space `Z_ρ^m` that indexes symbol positions `0..α`.
//!
//! Position `i` is identified with the digit vector `v` where
//! `i = Σ_c v[c] · ρ^(m-1-c)`: coordinate 0 is the most significant digit.
//! Every permutation used by the codes is a translation `v ↦ v + s` of this
//! space, so permutations are stored as shift vectors and composed by adding
//! them digitwise.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{Fe, Field};
use crate::linalg::Matrix;
use crate::{Error, Result};

/// Largest supported number of positions per node.
pub const MAX_ALPHA: usize = 1 << 20;

/// The space of `size = base^len` labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelSpace {
    base: usize,
    len: usize,
    size: usize,
}

impl LabelSpace {
    /// `base^len` labels; fails if that exceeds [`MAX_ALPHA`].
    pub fn new(base: usize, len: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::OutOfRange("label base must be at least 2"));
        }
        if len == 0 {
            return Err(Error::OutOfRange("label length must be at least 1"));
        }
        let mut size = 1usize;
        for _ in 0..len {
            size = size
                .checked_mul(base)
                .filter(|&s| s <= MAX_ALPHA)
                .ok_or(Error::Overflow("label space exceeds 2^20 positions"))?;
        }
        Ok(LabelSpace { base, len, size })
    }

    /// The digit base `ρ`.
    pub fn base(&self) -> usize {
        self.base
    }

    /// The number of coordinates `m`.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; a label space has at least one coordinate.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The number of labels `α`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Place value of coordinate `c`.
    #[inline]
    fn weight(&self, c: usize) -> usize {
        self.base.pow((self.len - 1 - c) as u32)
    }

    /// Digit of index `i` at coordinate `c`.
    #[inline]
    pub fn digit(&self, i: usize, c: usize) -> usize {
        (i / self.weight(c)) % self.base
    }

    /// Index of a label vector.
    pub fn index_of(&self, label: &[usize]) -> Result<usize> {
        if label.len() != self.len {
            return Err(Error::OutOfRange("label length"));
        }
        label.iter().try_fold(0usize, |acc, &d| {
            if d < self.base {
                Ok(acc * self.base + d)
            } else {
                Err(Error::OutOfRange("label digit"))
            }
        })
    }

    /// Label vector of an index.
    pub fn label_of(&self, i: usize) -> Result<Vec<usize>> {
        if i >= self.size {
            return Err(Error::OutOfRange("label index"));
        }
        Ok((0..self.len).map(|c| self.digit(i, c)).collect())
    }

    /// The positions whose coordinate `coord` equals `digit`.
    pub fn slice(&self, coord: usize, digit: usize) -> Result<CoordinateSlice> {
        if coord >= self.len {
            return Err(Error::OutOfRange("slice coordinate"));
        }
        if digit >= self.base {
            return Err(Error::OutOfRange("slice digit"));
        }
        let w = self.weight(coord);
        let block = w * self.base;
        // Runs of length w starting at digit·w inside every block of w·ρ.
        let members = (0..self.size / block)
            .flat_map(|b| {
                let start = b * block + digit * w;
                start..start + w
            })
            .collect();
        Ok(CoordinateSlice {
            coord,
            digit,
            members,
        })
    }
}

/// A translation `v ↦ v + shift` of the label space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Translation {
    shift: Vec<usize>,
}

impl Translation {
    /// The identity.
    pub fn zero(space: &LabelSpace) -> Self {
        Translation {
            shift: vec![0; space.len],
        }
    }

    /// Shift by `digit` along `coord` alone.
    pub fn unit(space: &LabelSpace, coord: usize, digit: usize) -> Result<Self> {
        if coord >= space.len || digit >= space.base {
            return Err(Error::OutOfRange("unit translation"));
        }
        let mut t = Self::zero(space);
        t.shift[coord] = digit;
        Ok(t)
    }

    /// A translation with the given per-coordinate shift.
    pub fn from_shift(space: &LabelSpace, shift: Vec<usize>) -> Result<Self> {
        if shift.len() != space.len || shift.iter().any(|&d| d >= space.base) {
            return Err(Error::OutOfRange("translation shift"));
        }
        Ok(Translation { shift })
    }

    /// Per-coordinate shift digits.
    pub fn shift(&self) -> &[usize] {
        &self.shift
    }

    /// Whether this is the identity.
    pub fn is_zero(&self) -> bool {
        self.shift.iter().all(|&d| d == 0)
    }

    /// `self` followed by `other`; translations commute.
    pub fn compose(&self, other: &Translation, space: &LabelSpace) -> Translation {
        Translation {
            shift: self
                .shift
                .iter()
                .zip(&other.shift)
                .map(|(a, b)| (a + b) % space.base)
                .collect(),
        }
    }

    /// The inverse translation.
    pub fn inverse(&self, space: &LabelSpace) -> Translation {
        Translation {
            shift: self
                .shift
                .iter()
                .map(|&d| (space.base - d) % space.base)
                .collect(),
        }
    }

    /// Image of index `i`.
    pub fn apply(&self, space: &LabelSpace, i: usize) -> usize {
        debug_assert!(i < space.size);
        let mut out = i;
        for (c, &s) in self.shift.iter().enumerate() {
            if s != 0 {
                let w = space.weight(c);
                let d = (i / w) % space.base;
                let nd = (d + s) % space.base;
                out = out + nd * w - d * w;
            }
        }
        out
    }

    /// `table[i] = apply(i)` for every position.
    pub fn table(&self, space: &LabelSpace) -> Vec<u32> {
        (0..space.size)
            .map(|i| self.apply(space, i) as u32)
            .collect()
    }

    /// Sorted image of a set of positions.
    pub fn image(&self, space: &LabelSpace, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&i| self.apply(space, i)).collect();
        out.sort_unstable();
        out
    }

    /// Dense `α × α` matrix `P` of this translation, scaled by `lambda`:
    /// `(P·x)[apply(v)] = lambda · x[v]`.
    pub fn materialize(&self, space: &LabelSpace, field: Field, lambda: Fe) -> Matrix {
        let mut m = Matrix::zeros(field, space.size, space.size);
        for v in 0..space.size {
            m.set(self.apply(space, v), v, lambda);
        }
        m
    }
}

/// The positions `{ v : v[coord] = digit }`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateSlice {
    coord: usize,
    digit: usize,
    members: Vec<usize>,
}

impl CoordinateSlice {
    /// The fixed coordinate.
    pub fn coord(&self) -> usize {
        self.coord
    }

    /// The fixed digit.
    pub fn digit(&self) -> usize {
        self.digit
    }

    /// Member positions in increasing order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Number of members, `α / ρ`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Never true for a valid slice.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Position of index `i` within the slice, if it is a member.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.members.binary_search(&i).ok()
    }

    /// Row-selection matrix `S` with `S·x = x restricted to the slice`.
    pub fn selector(&self, space: &LabelSpace, field: Field) -> Matrix {
        let mut m = Matrix::zeros(field, self.members.len(), space.size());
        for (r, &c) in self.members.iter().enumerate() {
            m.set(r, c, Fe::ONE);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(base: usize, len: usize) -> LabelSpace {
        LabelSpace::new(base, len).unwrap()
    }

    #[test]
    fn index_convention() {
        let s = sp(2, 2);
        assert_eq!(s.index_of(&[1, 0]).unwrap(), 2);
        assert_eq!(s.label_of(3).unwrap(), vec![1, 1]);
        assert_eq!(s.index_of(&[2, 0]), Err(Error::OutOfRange("label digit")));
        assert_eq!(s.label_of(4), Err(Error::OutOfRange("label index")));
        let s = sp(3, 4);
        for i in 0..s.size() {
            assert_eq!(s.index_of(&s.label_of(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn size_cap() {
        assert!(LabelSpace::new(2, 20).is_ok());
        assert!(matches!(LabelSpace::new(2, 21), Err(Error::Overflow(_))));
        assert!(matches!(LabelSpace::new(3, 64), Err(Error::Overflow(_))));
    }

    #[test]
    fn translations_on_four_positions() {
        let s = sp(2, 2);
        let zero = Translation::zero(&s);
        assert!((0..4).all(|i| zero.apply(&s, i) == i));
        let e1 = Translation::unit(&s, 0, 1).unwrap();
        assert_eq!(e1.table(&s), vec![2, 3, 0, 1]);
        let e2 = Translation::unit(&s, 1, 1).unwrap();
        assert_eq!(e2.table(&s), vec![1, 0, 3, 2]);
    }

    #[test]
    fn composition() {
        let s = sp(2, 3);
        let e1 = Translation::unit(&s, 0, 1).unwrap();
        let e2 = Translation::unit(&s, 1, 1).unwrap();
        assert!(e1.compose(&e1, &s).is_zero());
        assert_eq!(e1.compose(&Translation::zero(&s), &s), e1);
        assert_eq!(e1.compose(&e2, &s), e2.compose(&e1, &s));
        let s3 = sp(3, 2);
        let t = Translation::from_shift(&s3, vec![2, 1]).unwrap();
        assert!(t.compose(&t.inverse(&s3), &s3).is_zero());
        for i in 0..s3.size() {
            assert_eq!(t.inverse(&s3).apply(&s3, t.apply(&s3, i)), i);
        }
    }

    #[test]
    fn slices() {
        assert_eq!(sp(2, 2).slice(0, 0).unwrap().members(), &[0, 1]);
        let s = sp(2, 6);
        for c in 0..6 {
            for d in 0..2 {
                assert_eq!(s.slice(c, d).unwrap().len(), 32);
            }
        }
        // Definitional membership.
        let s = sp(3, 3);
        for c in 0..3 {
            for d in 0..3 {
                let sl = s.slice(c, d).unwrap();
                let expect: Vec<usize> = (0..s.size())
                    .filter(|&i| s.label_of(i).unwrap()[c] == d)
                    .collect();
                assert_eq!(sl.members(), expect.as_slice());
            }
        }
    }

    #[test]
    fn translating_a_slice_moves_its_digit() {
        let s = sp(3, 3);
        for c in 0..3 {
            let y = s.slice(c, 0).unwrap();
            for l in 0..3 {
                let t = Translation::unit(&s, c, l).unwrap();
                assert_eq!(t.image(&s, y.members()), s.slice(c, l).unwrap().members());
            }
        }
    }

    #[test]
    fn coset_partition_and_invariance() {
        for (base, len) in [(2, 12), (3, 7), (4, 6)] {
            let s = sp(base, len);
            for c in 0..len {
                let y = s.slice(c, 0).unwrap();
                let mut hit = vec![0u8; s.size()];
                for l in 0..base {
                    let t = Translation::unit(&s, c, l).unwrap();
                    for i in t.image(&s, y.members()) {
                        hit[i] += 1;
                    }
                }
                assert!(hit.iter().all(|&h| h == 1));

                for other in (0..len).filter(|&o| o != c) {
                    for l in 0..base {
                        let t = Translation::unit(&s, other, l).unwrap();
                        for d in 0..base {
                            let sl = s.slice(c, d).unwrap();
                            assert_eq!(t.image(&s, sl.members()), sl.members());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn translation_is_bijective() {
        let s = sp(3, 5);
        let t = Translation::from_shift(&s, vec![1, 0, 2, 2, 1]).unwrap();
        let mut img = t.table(&s);
        img.sort_unstable();
        img.dedup();
        assert_eq!(img.len(), s.size());
    }
}
