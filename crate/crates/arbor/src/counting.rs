//! Closed-form counts of t-ary trees and ordered forests refined by edge type.
//!
//! A t-ary tree with `n` nodes has `n - 1` edges, each occupying one of the
//! `t` child slots. Writing `a_i` for the number of edges in slot `i`, the
//! number of trees with edge profile `(a_1, ..., a_t)` is
//!
//! ```text
//! (1/n) * C(n, a_1) * C(n, a_2) * ... * C(n, a_t)
//! ```
//!
//! and for an ordered sequence of `m < t` trees hanging from an uncounted
//! super-root, whose `m` edges are typed `1..=m`, it is
//!
//! ```text
//! (m/n) * C(n, a_1 - 1) ... C(n, a_m - 1) * C(n, a_{m+1}) ... C(n, a_t)
//! ```
//!
//! Summing either product over the free parts with Vandermonde's identity
//! gives the totals and the single-slot marginals exposed here.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{check_arity, Error, Result};

/// Binomial coefficient `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut small: u128 = 1;
    for i in 0..k {
        // r * (n - i) / (i + 1) stays integral at every step.
        match small.checked_mul(u128::from(n - i)) {
            Some(v) => small = v / u128::from(i + 1),
            None => return binomial_big(n, k),
        }
    }
    BigUint::from(small)
}

fn binomial_big(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Per-slot edge counts `(a_1, ..., a_t)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EdgeComposition(Vec<usize>);

impl EdgeComposition {
    pub fn new(parts: Vec<usize>) -> Self {
        Self(parts)
    }

    pub fn zeros(t: usize) -> Self {
        Self(vec![0; t])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn parts_mut(&mut self) -> &mut [usize] {
        &mut self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn into_parts(self) -> Vec<usize> {
        self.0
    }
}

impl From<Vec<usize>> for EdgeComposition {
    fn from(parts: Vec<usize>) -> Self {
        Self(parts)
    }
}

impl<const N: usize> From<[usize; N]> for EdgeComposition {
    fn from(parts: [usize; N]) -> Self {
        Self(parts.to_vec())
    }
}

impl fmt::Display for EdgeComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for EdgeComposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse { what: "composition", reason: format!("{p:?}: {e}") })
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// A validated request for the number of `n`-node t-ary trees with a given
/// edge profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCountQuery {
    arity: usize,
    nodes: usize,
    composition: EdgeComposition,
}

impl TreeCountQuery {
    pub fn new(arity: usize, nodes: usize, composition: impl Into<EdgeComposition>) -> Result<Self> {
        let composition = composition.into();
        check_arity(arity)?;
        if nodes == 0 {
            return Err(Error::EmptyTree);
        }
        if composition.arity() != arity {
            return Err(Error::CompositionLength { expected: arity, found: composition.arity() });
        }
        if composition.total() != nodes - 1 {
            return Err(Error::CompositionSum { expected: nodes - 1, found: composition.total() });
        }
        Ok(Self { arity, nodes, composition })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn composition(&self) -> &EdgeComposition {
        &self.composition
    }
}

/// A validated request for the number of ordered `m`-tuples of non-empty
/// t-ary trees with `n` nodes in total. Parts `1..=m` include the edge from
/// the uncounted super-root to each tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestCountQuery {
    arity: usize,
    trees: usize,
    nodes: usize,
    composition: EdgeComposition,
}

impl ForestCountQuery {
    pub fn new(
        arity: usize,
        trees: usize,
        nodes: usize,
        composition: impl Into<EdgeComposition>,
    ) -> Result<Self> {
        let composition = composition.into();
        check_forest_shape(arity, trees, nodes)?;
        if composition.arity() != arity {
            return Err(Error::CompositionLength { expected: arity, found: composition.arity() });
        }
        if let Some(i) = composition.parts()[..trees].iter().position(|&a| a == 0) {
            return Err(Error::MissingRootEdge { index: i + 1 });
        }
        if composition.total() != nodes {
            return Err(Error::CompositionSum { expected: nodes, found: composition.total() });
        }
        Ok(Self { arity, trees, nodes, composition })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn trees(&self) -> usize {
        self.trees
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn composition(&self) -> &EdgeComposition {
        &self.composition
    }
}

pub(crate) fn check_forest_shape(t: usize, m: usize, n: usize) -> Result<()> {
    check_arity(t)?;
    if m == 0 || m >= t {
        return Err(Error::ForestSize { m, t });
    }
    if n < m {
        return Err(Error::ForestTooSmall { m, n });
    }
    Ok(())
}

fn exact_div(value: BigUint, divisor: usize) -> BigUint {
    let (q, r) = value.div_rem(&BigUint::from(divisor));
    assert!(r.is_zero(), "closed form is not integral: remainder {r} mod {divisor}");
    q
}

/// Number of `n`-node t-ary trees with edge profile `q.composition()`.
pub fn count_trees(q: &TreeCountQuery) -> BigUint {
    let n = q.nodes as u64;
    let product = q.composition.parts().iter().fold(BigUint::one(), |acc, &a| acc * binomial(n, a as i64));
    exact_div(product, q.nodes)
}

/// Number of ordered `m`-forests with edge profile `q.composition()`,
/// super-root edges included in parts `1..=m`.
pub fn count_forests(q: &ForestCountQuery) -> BigUint {
    let n = q.nodes as u64;
    let product = q.composition.parts().iter().enumerate().fold(BigUint::one(), |acc, (i, &a)| {
        let shift = usize::from(i < q.trees);
        acc * binomial(n, a as i64 - shift as i64)
    });
    exact_div(product * q.trees, q.nodes)
}

/// Number of t-ary trees with `n` nodes, `(1/n) C(tn, n-1)`.
pub fn total_trees(t: usize, n: usize) -> Result<BigUint> {
    if t == 0 {
        return Err(Error::Arity(t));
    }
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    Ok(exact_div(binomial((t * n) as u64, n as i64 - 1), n))
}

/// Number of ordered `m`-tuples of non-empty t-ary trees with `n` nodes in
/// total, `(m/n) C(tn, n-m)`.
pub fn total_forests(t: usize, m: usize, n: usize) -> Result<BigUint> {
    if t == 0 {
        return Err(Error::Arity(t));
    }
    if m == 0 || m >= t {
        return Err(Error::ForestSize { m, t });
    }
    if n < m {
        return Err(Error::ForestTooSmall { m, n });
    }
    Ok(exact_div(binomial((t * n) as u64, (n - m) as i64) * m, n))
}

/// Number of `n`-node t-ary trees whose slot `i` holds exactly `fixed[i]`
/// edges for every key of `fixed` (slots are 1-based); other slots are free.
///
/// Returns zero when the fixed counts cannot fit in `n - 1` edges.
pub fn marginal_count(t: usize, n: usize, fixed: &BTreeMap<usize, usize>) -> Result<BigUint> {
    if t == 0 {
        return Err(Error::Arity(t));
    }
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    if let Some(&slot) = fixed.keys().find(|&&s| s == 0 || s > t) {
        return Err(Error::Slot { slot, t });
    }
    let n64 = n as u64;
    let fixed_sum: usize = fixed.values().sum();
    let free = (t - fixed.len()) as u64;
    let product = fixed.values().fold(BigUint::one(), |acc, &a| acc * binomial(n64, a as i64));
    let rest = binomial(free * n64, n as i64 - 1 - fixed_sum as i64);
    Ok(exact_div(product * rest, n))
}

/// Lexicographic stream of compositions of `total` into `t` non-negative
/// parts, the first `m` of which are at least 1.
#[derive(Debug, Clone)]
pub struct Compositions {
    mins: Vec<usize>,
    current: Option<Vec<usize>>,
}

/// Every composition of `total` into `t` parts with the first `m` parts
/// positive (`m = 0` for single trees), in lexicographic order.
pub fn compositions(t: usize, total: usize, m: usize) -> Result<Compositions> {
    check_arity(t)?;
    if m >= t && m != 0 {
        return Err(Error::ForestSize { m, t });
    }
    let mins: Vec<usize> = (0..t).map(|i| usize::from(i < m)).collect();
    let current = total.checked_sub(m).map(|spare| {
        let mut first = mins.clone();
        first[t - 1] += spare;
        first
    });
    Ok(Compositions { mins, current })
}

impl Iterator for Compositions {
    type Item = EdgeComposition;

    fn next(&mut self) -> Option<EdgeComposition> {
        let current = self.current.take()?;
        let t = current.len();
        // Rightmost position whose suffix still has spare units to move left.
        let mut suffix_spare = 0;
        let mut pivot = None;
        for i in (0..t.saturating_sub(1)).rev() {
            suffix_spare += current[i + 1] - self.mins[i + 1];
            if suffix_spare > 0 {
                pivot = Some(i);
                break;
            }
        }
        if let Some(i) = pivot {
            let mut next = current.clone();
            next[i] += 1;
            next[i + 1..].copy_from_slice(&self.mins[i + 1..]);
            next[t - 1] += suffix_spare - 1;
            self.current = Some(next);
        }
        Some(EdgeComposition(current))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn tree(t: usize, n: usize, a: &[usize]) -> BigUint {
        count_trees(&TreeCountQuery::new(t, n, a.to_vec()).unwrap())
    }

    fn forest(t: usize, m: usize, n: usize, a: &[usize]) -> BigUint {
        count_forests(&ForestCountQuery::new(t, m, n, a.to_vec()).unwrap())
    }

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(5, 0), big(1));
        assert_eq!(binomial(5, 5), big(1));
        assert_eq!(binomial(4, 2), big(6));
        assert_eq!(binomial(4, -1), big(0));
        assert_eq!(binomial(4, 5), big(0));
        assert_eq!(binomial(0, 0), big(1));
    }

    #[test]
    fn binomial_matches_pascal_past_u128() {
        let mut row = vec![BigUint::one()];
        for n in 1..=200u64 {
            let mut next = vec![BigUint::one(); n as usize + 1];
            for k in 1..n as usize {
                next[k] = &row[k - 1] + &row[k];
            }
            row = next;
            for k in [0, 1, n / 3, n / 2, n] {
                assert_eq!(binomial(n, k as i64), row[k as usize], "C({n},{k})");
            }
        }
    }

    #[test]
    fn tree_counts() {
        assert_eq!(tree(3, 1, &[0, 0, 0]), big(1));
        assert_eq!(tree(3, 3, &[1, 1, 0]), big(3));
        assert_eq!(tree(3, 4, &[1, 1, 1]), big(16));
        assert_eq!(tree(3, 4, &[2, 1, 0]), big(6));
        assert_eq!(tree(1, 7, &[6]), big(1));
    }

    #[test]
    fn tree_query_rejects_bad_sum() {
        assert_eq!(
            TreeCountQuery::new(3, 3, vec![1, 1, 1]),
            Err(Error::CompositionSum { expected: 2, found: 3 })
        );
        assert_eq!(TreeCountQuery::new(3, 0, vec![0, 0, 0]), Err(Error::EmptyTree));
        assert_eq!(
            TreeCountQuery::new(3, 2, vec![1, 0]),
            Err(Error::CompositionLength { expected: 3, found: 2 })
        );
        assert_eq!(TreeCountQuery::new(17, 1, vec![0; 17]), Err(Error::Arity(17)));
    }

    #[test]
    fn forest_counts() {
        assert_eq!(forest(3, 2, 2, &[1, 1, 0]), big(1));
        assert_eq!(forest(3, 2, 3, &[2, 1, 0]), big(2));
        assert_eq!(forest(3, 1, 3, &[2, 1, 0]), tree(3, 3, &[1, 1, 0]));
    }

    #[test]
    fn forest_query_rejects_bad_input() {
        assert_eq!(ForestCountQuery::new(3, 3, 3, vec![1, 1, 1]), Err(Error::ForestSize { m: 3, t: 3 }));
        assert_eq!(ForestCountQuery::new(3, 0, 3, vec![1, 1, 1]), Err(Error::ForestSize { m: 0, t: 3 }));
        assert_eq!(ForestCountQuery::new(3, 2, 3, vec![3, 0, 0]), Err(Error::MissingRootEdge { index: 2 }));
        assert_eq!(
            ForestCountQuery::new(3, 2, 3, vec![1, 1, 0]),
            Err(Error::CompositionSum { expected: 3, found: 2 })
        );
        assert_eq!(ForestCountQuery::new(3, 2, 1, vec![1, 0, 0]), Err(Error::ForestTooSmall { m: 2, n: 1 }));
    }

    #[test]
    fn totals() {
        assert_eq!(total_trees(3, 1).unwrap(), big(1));
        assert_eq!(total_trees(3, 3).unwrap(), big(12));
        assert_eq!(total_trees(3, 5).unwrap(), big(273));
        assert_eq!(total_trees(2, 10).unwrap(), big(16796));
        assert_eq!(total_forests(3, 2, 2).unwrap(), big(1));
        assert_eq!(total_forests(3, 2, 3).unwrap(), big(6));
        assert_eq!(total_forests(3, 2, 4).unwrap(), big(33));
        assert_eq!(total_forests(3, 1, 4).unwrap(), big(55));
        assert_eq!(total_trees(3, 0), Err(Error::EmptyTree));
        assert_eq!(total_forests(3, 3, 4), Err(Error::ForestSize { m: 3, t: 3 }));
    }

    #[test]
    fn marginals() {
        let fix = |pairs: &[(usize, usize)]| pairs.iter().copied().collect::<BTreeMap<_, _>>();
        assert_eq!(marginal_count(3, 2, &fix(&[(2, 1)])).unwrap(), big(1));
        assert_eq!(marginal_count(3, 2, &fix(&[(2, 0)])).unwrap(), big(2));
        assert_eq!(marginal_count(3, 4, &fix(&[(2, 1)])).unwrap(), big(28));
        assert_eq!(marginal_count(3, 4, &fix(&[(2, 4)])).unwrap(), big(0));
        assert_eq!(marginal_count(3, 4, &fix(&[])).unwrap(), big(55));
        assert_eq!(marginal_count(3, 4, &fix(&[(1, 1), (2, 1), (3, 1)])).unwrap(), tree(3, 4, &[1, 1, 1]));
        assert_eq!(marginal_count(3, 4, &fix(&[(4, 1)])), Err(Error::Slot { slot: 4, t: 3 }));
    }

    fn collect(t: usize, total: usize, m: usize) -> Vec<Vec<usize>> {
        compositions(t, total, m).unwrap().map(EdgeComposition::into_parts).collect()
    }

    #[test]
    fn composition_streams() {
        assert_eq!(collect(3, 1, 0), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(collect(2, 2, 0), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(collect(3, 2, 2), vec![vec![1, 1, 0]]);
        assert_eq!(collect(1, 4, 0), vec![vec![4]]);
        assert_eq!(collect(3, 0, 0), vec![vec![0, 0, 0]]);
        assert!(collect(3, 1, 2).is_empty());
    }

    #[test]
    fn composition_stream_is_complete_and_sorted() {
        for t in 1..=5 {
            for total in 0..=7 {
                for m in 0..t {
                    let got = collect(t, total, m);
                    let brute: Vec<Vec<usize>> =
                        itertools::Itertools::multi_cartesian_product((0..t).map(|_| 0..=total))
                            .filter(|c| c.iter().sum::<usize>() == total && c[..m].iter().all(|&a| a >= 1))
                            .collect();
                    assert_eq!(got, brute, "t={t} total={total} m={m}");
                }
            }
        }
    }

    #[test]
    fn composition_text_round_trip() {
        let c: EdgeComposition = "1, 2,0".parse().unwrap();
        assert_eq!(c.parts(), &[1, 2, 0]);
        assert_eq!(c.to_string(), "1,2,0");
        assert!("1,x".parse::<EdgeComposition>().is_err());
    }
}
