//! Lexicographic enumeration of fixed-size subsets and binomial coefficients.

use alloc::vec::Vec;

/// `C(n, t)`, saturating at `u128::MAX`; zero when `t > n`.
pub fn binomial(n: u64, t: u64) -> u128 {
    if t > n {
        return 0;
    }
    let t = t.min(n - t);
    let mut acc: u128 = 1;
    for i in 0..t {
        // acc * (n - i) / (i + 1) is exact at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All `t`-element subsets of `items`, each in the order given, listed
/// lexicographically by position.
pub fn combinations<T: Copy>(items: &[T], t: usize) -> Vec<Vec<T>> {
    let n = items.len();
    let mut out = Vec::new();
    if t > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Advance the rightmost index that still has room.
        let Some(pos) = (0..t).rev().find(|&p| idx[p] < n - t + p) else {
            return out;
        };
        idx[pos] += 1;
        for p in pos + 1..t {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(1, 2), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn lexicographic_order() {
        assert_eq!(
            combinations(&[1, 2, 3], 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(&[1, 2], 0), vec![Vec::<i32>::new()]);
        assert!(combinations(&[1, 2], 3).is_empty());
        assert_eq!(combinations(&[4, 5, 6], 3), vec![vec![4, 5, 6]]);
    }

    #[test]
    fn counts_match_binomial() {
        let items: Vec<u8> = (0..7).collect();
        for t in 0..=7 {
            assert_eq!(combinations(&items, t).len() as u128, binomial(7, t as u64));
        }
    }
}
