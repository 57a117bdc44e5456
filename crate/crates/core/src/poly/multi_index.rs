use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::scalar::factorial;

/// Per-variable exponents. Ordering is lexicographic, which fixes the
/// canonical term order of polynomials and operator words.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zeros(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut m = Self::zeros(len);
        m.0[i] = 1;
        m
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, value: u32) {
        self.0[i] = value;
    }

    /// `k! = Π k_i!`.
    pub fn factorial(&self) -> i64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    /// Componentwise `self - other`, or `None` if any component would go
    /// negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Same exponents laid out over `new_len` slots, with `self` split into
    /// `blocks` equal blocks that are each zero-padded to `new_len / blocks`.
    pub(crate) fn embed_blocks(&self, blocks: usize, new_len: usize) -> MultiIndex {
        let old_block = self.len() / blocks;
        let new_block = new_len / blocks;
        let mut out = vec![0; new_len];
        for b in 0..blocks {
            for i in 0..old_block {
                out[b * new_block + i] = self.0[b * old_block + i];
            }
        }
        MultiIndex(out)
    }

    /// Every multi-index of length `len` whose total degree lies in
    /// `min_degree..=max_degree`, in lexicographic order.
    pub fn enumerate(len: usize, min_degree: u32, max_degree: u32) -> Vec<MultiIndex> {
        fn rec(
            pos: usize,
            remaining: u32,
            cur: &mut Vec<u32>,
            min_degree: u32,
            out: &mut Vec<MultiIndex>,
        ) {
            if pos == cur.len() {
                let d: u32 = cur.iter().sum();
                if d >= min_degree {
                    out.push(MultiIndex(cur.clone()));
                }
                return;
            }
            for e in 0..=remaining {
                cur[pos] = e;
                rec(pos + 1, remaining - e, cur, min_degree, out);
            }
            cur[pos] = 0;
        }
        let mut out = Vec::new();
        let mut cur = vec![0; len];
        rec(0, max_degree, &mut cur, min_degree, &mut out);
        out.sort();
        out
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), rhs.len());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_counts() {
        // Two variables, degree 2..=3: 3 + 4 = 7 indices.
        let all = MultiIndex::enumerate(2, 2, 3);
        assert_eq!(all.len(), 7);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|m| (2..=3).contains(&m.degree())));
    }

    #[test]
    fn lexicographic_order() {
        let a = MultiIndex::from(vec![0, 2]);
        let b = MultiIndex::from(vec![1, 0]);
        assert!(a < b);
    }

    #[test]
    fn checked_sub_refuses_negative() {
        let a = MultiIndex::from(vec![2, 1]);
        assert_eq!(a.checked_sub(&MultiIndex::from(vec![1, 1])), Some(MultiIndex::from(vec![1, 0])));
        assert_eq!(a.checked_sub(&MultiIndex::from(vec![0, 2])), None);
    }

    #[test]
    fn embedding_pads_each_block() {
        let m = MultiIndex::from(vec![3, 5]);
        assert_eq!(m.embed_blocks(2, 4), MultiIndex::from(vec![3, 0, 5, 0]));
    }
}
