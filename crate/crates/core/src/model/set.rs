use std::fmt;

/// A set of receivers as a bitmask; bit `i` is receiver `i + 1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ReceiverSet(pub u64);

impl ReceiverSet {
    pub const EMPTY: ReceiverSet = ReceiverSet(0);

    /// Maximum receiver count representable.
    pub const CAPACITY: usize = 64;

    pub fn full(n: usize) -> Self {
        Self::prefix(n)
    }

    /// The prefix `{1, ..., len}`.
    pub fn prefix(len: usize) -> Self {
        if len >= 64 {
            ReceiverSet(u64::MAX)
        } else {
            ReceiverSet((1u64 << len) - 1)
        }
    }

    /// Builds a set from 0-based indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        ReceiverSet(indices.into_iter().fold(0, |m, i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        ReceiverSet(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Self {
        ReceiverSet(self.0 & !(1u64 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: ReceiverSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ReceiverSet) -> Self {
        ReceiverSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ReceiverSet) -> Self {
        ReceiverSet(self.0 & other.0)
    }

    /// Length of the longest prefix `[j]` contained in the set, capped at `n`.
    pub fn longest_prefix(self, n: usize) -> usize {
        ((!self.0).trailing_zeros() as usize).min(n)
    }

    /// Highest member (0-based), if any.
    pub fn max_index(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros() as usize)
        }
    }

    /// Members in increasing order (0-based).
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = ReceiverSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(ReceiverSet(cur))
        })
    }

    /// 0/1 string with receiver 1 first.
    pub fn to_bits(self, n: usize) -> String {
        (0..n).map(|i| if self.contains(i) { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for ReceiverSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

/// All `k`-subsets of `{0..n}` in lexicographic order of their sorted members.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return out;
        };
        idx[p] += 1;
        for j in p + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefixes() {
        assert_eq!(ReceiverSet::prefix(3).0, 0b111);
        assert_eq!(ReceiverSet::from_indices([0, 1]).longest_prefix(3), 2);
        assert_eq!(ReceiverSet::from_indices([0, 2]).longest_prefix(3), 1);
        assert_eq!(ReceiverSet::full(3).longest_prefix(3), 3);
        assert_eq!(ReceiverSet::EMPTY.longest_prefix(3), 0);
    }

    #[test]
    fn subset_enumeration_counts() {
        let s = ReceiverSet::from_indices([1, 3, 4]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.is_subset_of(s)));
        assert_eq!(ReceiverSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn k_subsets_lex() {
        assert_eq!(
            k_subsets(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(k_subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(k_subsets(3, 3), vec![vec![0, 1, 2]]);
        assert!(k_subsets(2, 3).is_empty());
        assert_eq!(k_subsets(6, 3).len(), 20);
    }
}
