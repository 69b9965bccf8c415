use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::rational::factorial;

/// Exponent tuple `P = (p₁, …, pₙ)` of a monomial `z^P`.
///
/// Ordered by total degree first, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit index `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `|P| = Σ pᵢ`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    /// `P! = ∏ pᵢ!`.
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, &p| acc * factorial(p as u64))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&p| p == 0)
    }

    /// `P - e_i`, or `None` when `p_i = 0`.
    pub fn lowered(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(MultiIndex(e))
    }

    /// `P + e_i`.
    pub fn raised(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        MultiIndex(e)
    }

    /// All indices in `n` variables with `|P| = degree`, in increasing order.
    pub fn with_degree(n: usize, degree: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fill(&mut cur, 0, degree, &mut out);
        out.sort();
        out
    }

    /// All indices in `n` variables with `|P| ≤ max_degree`, in increasing order.
    pub fn up_to_degree(n: usize, max_degree: u32) -> Vec<Self> {
        (0..=max_degree)
            .flat_map(|d| Self::with_degree(n, d))
            .collect()
    }
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    for p in 0..=remaining {
        cur[pos] = p;
        fill(cur, pos + 1, remaining - p, out);
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
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
    fn degree_and_factorial() {
        let p = MultiIndex::new(vec![2, 1, 3]);
        assert_eq!(p.degree(), 6);
        assert_eq!(p.factorial(), BigInt::from(2 * 6));
    }

    #[test]
    fn ordering_degree_first() {
        let a = MultiIndex::new(vec![0, 3]);
        let b = MultiIndex::new(vec![2, 0]);
        let c = MultiIndex::new(vec![1, 2]);
        assert!(a > b);
        assert!(c > a);
    }

    #[test]
    fn enumeration_counts() {
        // C(d + n - 1, n - 1)
        assert_eq!(MultiIndex::with_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::up_to_degree(2, 3).len(), 10);
        assert_eq!(
            MultiIndex::with_degree(1, 4),
            vec![MultiIndex::new(vec![4])]
        );
    }

    #[test]
    fn lowered_at_zero_is_none() {
        let p = MultiIndex::new(vec![0, 2]);
        assert!(p.lowered(0).is_none());
        assert_eq!(p.lowered(1), Some(MultiIndex::new(vec![0, 1])));
    }
}
