use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Bell scenario: `n` parties, `m` dichotomic settings each.
///
/// Settings are numbered `1..=m`; setting `0` denotes the trivial
/// measurement that always yields `+1` and is used for marginal terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    n: usize,
    m: usize,
}

impl Scenario {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidScenario(format!("need at least 2 parties, got {n}")));
        }
        if m < 2 {
            return Err(Error::InvalidScenario(format!("need at least 2 settings, got {m}")));
        }
        if n > 16 || m > 9 {
            return Err(Error::InvalidScenario(format!("scenario ({n},{m}) too large")));
        }
        Ok(Scenario { n, m })
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn settings(&self) -> usize {
        self.m
    }

    /// Number of full-body correlators, `m^n`.
    pub fn full_body_dim(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    /// Number of correlators including marginals, `(m+1)^n - 1`.
    pub fn marginal_dim(&self) -> usize {
        (self.m + 1).pow(self.n as u32) - 1
    }

    /// Setting tuples of the full-body space, in index order.
    pub fn full_body_tuples(&self) -> Vec<Vec<u8>> {
        (0..self.full_body_dim()).map(|i| self.full_body_tuple(i)).collect()
    }

    pub fn full_body_tuple(&self, mut idx: usize) -> Vec<u8> {
        let mut t = vec![0u8; self.n];
        for k in (0..self.n).rev() {
            t[k] = (idx % self.m) as u8 + 1;
            idx /= self.m;
        }
        t
    }

    pub fn full_body_index(&self, t: &[u8]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.m + (x as usize - 1))
    }

    /// Setting tuples of the space with marginals (all-zero tuple excluded).
    pub fn marginal_tuples(&self) -> Vec<Vec<u8>> {
        (0..self.marginal_dim()).map(|i| self.marginal_tuple(i)).collect()
    }

    pub fn marginal_tuple(&self, idx: usize) -> Vec<u8> {
        let mut idx = idx + 1;
        let mut t = vec![0u8; self.n];
        for k in (0..self.n).rev() {
            t[k] = (idx % (self.m + 1)) as u8;
            idx /= self.m + 1;
        }
        t
    }

    pub fn marginal_index(&self, t: &[u8]) -> usize {
        t.iter().fold(0, |acc, &x| acc * (self.m + 1) + x as usize) - 1
    }

    /// All multisets of size `n`; with `marginals` the symbol 0 is allowed
    /// (the all-zero multiset is skipped). Sorted lexicographically.
    pub fn multisets(&self, marginals: bool) -> Vec<Multiset> {
        let lo = if marginals { 0 } else { 1 };
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.n);
        fn rec(cur: &mut Vec<u8>, lo: u8, hi: u8, n: usize, out: &mut Vec<Multiset>) {
            if cur.len() == n {
                if cur.iter().any(|&x| x != 0) {
                    out.push(Multiset(cur.clone()));
                }
                return;
            }
            let start = cur.last().copied().unwrap_or(lo);
            for x in start..=hi {
                cur.push(x);
                rec(cur, lo, hi, n, out);
                cur.pop();
            }
        }
        rec(&mut cur, lo, self.m as u8, self.n, &mut out);
        out
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={}", self.n, self.m)
    }
}

/// A sorted multiset of settings, e.g. `(1122)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Multiset(pub Vec<u8>);

impl Multiset {
    pub fn from_tuple(t: &[u8]) -> Self {
        let mut v = t.to_vec();
        v.sort_unstable();
        Multiset(v)
    }

    /// For the two-setting full-body case: number of entries equal to 2.
    pub fn level(&self) -> usize {
        self.0.iter().filter(|&&x| x == 2).count()
    }

    pub fn has_marginal(&self) -> bool {
        self.0.contains(&0)
    }

    /// Number of distinct orderings, `n! / prod(k_i!)`.
    pub fn multiplicity(&self) -> u64 {
        let n = self.0.len() as u64;
        let mut num: u64 = (1..=n).product();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            num /= (1..=(j - i) as u64).product::<u64>();
            i = j;
        }
        num
    }

    /// All distinct orderings of the multiset.
    pub fn permutations(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut counts = [0usize; 10];
        for &x in &self.0 {
            counts[x as usize] += 1;
        }
        let mut cur = Vec::with_capacity(self.0.len());
        fn rec(counts: &mut [usize; 10], cur: &mut Vec<u8>, n: usize, out: &mut Vec<Vec<u8>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for s in 0..10 {
                if counts[s] > 0 {
                    counts[s] -= 1;
                    cur.push(s as u8);
                    rec(counts, cur, n, out);
                    cur.pop();
                    counts[s] += 1;
                }
            }
        }
        rec(&mut counts, &mut cur, self.0.len(), &mut out);
        out
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for x in &self.0 {
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Binomial coefficient as u128.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        let s = Scenario::new(3, 2).unwrap();
        assert_eq!(s.full_body_dim(), 8);
        assert_eq!(s.marginal_dim(), 26);
        assert!(Scenario::new(1, 2).is_err());
        assert!(Scenario::new(3, 1).is_err());
    }

    #[test]
    fn index_round_trip() {
        let s = Scenario::new(3, 3).unwrap();
        for i in 0..s.full_body_dim() {
            assert_eq!(s.full_body_index(&s.full_body_tuple(i)), i);
        }
        for i in 0..s.marginal_dim() {
            assert_eq!(s.marginal_index(&s.marginal_tuple(i)), i);
        }
    }

    #[test]
    fn multiset_counts() {
        let s = Scenario::new(4, 2).unwrap();
        assert_eq!(s.multisets(false).len(), 5);
        let s3 = Scenario::new(3, 3).unwrap();
        // multisets of size 3 over {0,1,2,3} minus (000)
        assert_eq!(s3.multisets(true).len(), 19);
        assert_eq!(Multiset(vec![1, 1, 2, 2]).multiplicity(), 6);
        assert_eq!(Multiset(vec![1, 1, 1, 2]).permutations().len(), 4);
        assert_eq!(format!("{}", Multiset(vec![1, 1, 2])), "(112)");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 10), 184756);
        assert_eq!(binomial(3, 4), 0);
    }
}
