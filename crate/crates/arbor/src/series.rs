//! Truncated multivariate power series with big-integer coefficients.
//!
//! A [`MultiSeries`] lives in `Z[y_1, ..., y_t][[x]]` truncated at x-degree
//! `N`. The tree generating function `G` is its unique solution of
//!
//! ```text
//! G = x (1 + y_1 G) (1 + y_2 G) ... (1 + y_t G)
//! ```
//!
//! with zero constant term, found here by iterating the right-hand side from
//! `G = 0`. Independently, [`lagrange_extract`] reads the coefficient of
//! `x^n y^a` off the expansion of `(1 + y_1 G)^n ... (1 + y_t G)^n` as a
//! [`Poly`] in `G`, divided by `n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::counting::{EdgeComposition, ForestCountQuery, TreeCountQuery};
use crate::error::{check_arity, Error, Result};

/// Exponent vector: main variable (x or G) first, then `y_1..y_t`.
type Key = Vec<u32>;
type Terms = BTreeMap<Key, BigInt>;

fn add_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = a.clone();
    for (k, v) in b {
        let entry = out.entry(k.clone()).or_default();
        *entry += v;
        if entry.is_zero() {
            out.remove(k);
        }
    }
    out
}

fn mul_terms(a: &Terms, b: &Terms, max_main: usize) -> Terms {
    let mut out = Terms::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            if (ka[0] + kb[0]) as usize > max_main {
                continue;
            }
            let key: Key = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            *out.entry(key).or_default() += va * vb;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn key_of(main: usize, a: &[usize]) -> Key {
    std::iter::once(main as u32).chain(a.iter().map(|&e| e as u32)).collect()
}

/// Truncated series in `x` with polynomial coefficients in `y_1..y_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiSeries {
    arity: usize,
    truncation: usize,
    terms: Terms,
}

impl MultiSeries {
    pub fn zero(arity: usize, truncation: usize) -> Self {
        Self { arity, truncation, terms: Terms::new() }
    }

    pub fn one(arity: usize, truncation: usize) -> Self {
        Self::monomial(arity, truncation, 0, &vec![0; arity], BigInt::one())
    }

    /// `coef * x^n * y^a`; vanishes when `n` exceeds the truncation.
    pub fn monomial(arity: usize, truncation: usize, n: usize, a: &[usize], coef: BigInt) -> Self {
        assert_eq!(a.len(), arity, "exponent vector length differs from arity");
        let mut terms = Terms::new();
        if n <= truncation && !coef.is_zero() {
            terms.insert(key_of(n, a), coef);
        }
        Self { arity, truncation, terms }
    }

    /// The series `x`.
    pub fn x(arity: usize, truncation: usize) -> Self {
        Self::monomial(arity, truncation, 1, &vec![0; arity], BigInt::one())
    }

    /// The series `y_i` for 1-based slot `i`.
    pub fn y(arity: usize, truncation: usize, i: usize) -> Self {
        let mut a = vec![0; arity];
        a[i - 1] = 1;
        Self::monomial(arity, truncation, 0, &a, BigInt::one())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms as `(n, a, coefficient)` in sorted key order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, EdgeComposition, &BigInt)> + '_ {
        self.terms.iter().map(|(k, v)| {
            let a = k[1..].iter().map(|&e| e as usize).collect::<Vec<_>>();
            (k[0] as usize, EdgeComposition::new(a), v)
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity || self.truncation != other.truncation {
            return Err(Error::SeriesMismatch(self.arity, self.truncation, other.arity, other.truncation));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { terms: add_terms(&self.terms, &other.terms), ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self { terms: mul_terms(&self.terms, &other.terms, self.truncation), ..*self })
    }

    /// Coefficient of `x^n y^a`; zero when not stored.
    pub fn coefficient(&self, n: usize, a: &EdgeComposition) -> Result<BigInt> {
        if n > self.truncation {
            return Err(Error::BeyondTruncation { n, truncation: self.truncation });
        }
        if a.arity() != self.arity {
            return Err(Error::CompositionLength { expected: self.arity, found: a.arity() });
        }
        Ok(self.terms.get(&key_of(n, a.parts())).cloned().unwrap_or_default())
    }

    /// True when every stored `x^n y^a` has `|a| = n - 1`.
    pub fn is_edge_homogeneous(&self) -> bool {
        self.terms.keys().all(|k| {
            let edges: u32 = k[1..].iter().sum();
            k[0] >= 1 && edges == k[0] - 1
        })
    }

    /// Sorted `n;a1,...,at;coef` lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (n, a, c) in self.terms() {
            let _ = writeln!(out, "{n};{a};{c}");
        }
        out
    }

    fn times_x(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| (k[0] as usize) < self.truncation)
            .map(|(k, v)| {
                let mut k = k.clone();
                k[0] += 1;
                (k, v.clone())
            })
            .collect();
        Self { terms, ..*self }
    }

    fn times_y(&self, slot: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| {
                let mut k = k.clone();
                k[slot] += 1;
                (k, v.clone())
            })
            .collect();
        Self { terms, ..*self }
    }
}

/// One application of `G -> x (1 + y_1 G) ... (1 + y_t G)`, truncated.
pub fn functional_map(g: &MultiSeries) -> MultiSeries {
    let one = MultiSeries::one(g.arity, g.truncation);
    let mut product = one.clone();
    for slot in 1..=g.arity {
        let factor = one.add(&g.times_y(slot)).expect("same shape");
        // The trailing factor of x means x-degree N - 1 suffices here.
        product = MultiSeries {
            terms: mul_terms(&product.terms, &factor.terms, g.truncation.saturating_sub(1)),
            ..product
        };
    }
    product.times_x()
}

/// The tree generating function through x-degree `truncation`, by exactly
/// `truncation` rounds of [`functional_map`] starting from zero.
pub fn solve_g(t: usize, truncation: usize) -> Result<MultiSeries> {
    check_arity(t)?;
    let mut g = MultiSeries::zero(t, truncation);
    for _ in 0..truncation {
        g = functional_map(&g);
    }
    Ok(g)
}

/// Polynomial in `G` with coefficients in `Z[y_1..y_t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    arity: usize,
    terms: Terms,
}

impl Poly {
    pub fn one(arity: usize) -> Self {
        let mut terms = Terms::new();
        terms.insert(vec![0; arity + 1], BigInt::one());
        Self { arity, terms }
    }

    /// `1 + y_slot G` for 1-based `slot`.
    pub fn edge_factor(arity: usize, slot: usize) -> Self {
        let mut p = Self::one(arity);
        let mut key = vec![0; arity + 1];
        key[0] = 1;
        key[slot] = 1;
        p.terms.insert(key, BigInt::one());
        p
    }

    pub fn mul_truncated(&self, other: &Self, max_g: usize) -> Self {
        Self { arity: self.arity, terms: mul_terms(&self.terms, &other.terms, max_g) }
    }

    /// Coefficient of `G^g y^a`.
    pub fn coefficient(&self, g: usize, a: &[usize]) -> BigInt {
        self.terms.get(&key_of(g, a)).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `(1 + y_1 G)^n ... (1 + y_t G)^n` truncated at `G^(n-1)`, built by
/// repeated multiplication so no binomial coefficient is ever evaluated.
#[derive(Debug, Clone)]
pub struct LagrangeExpansion {
    nodes: usize,
    poly: Poly,
}

impl LagrangeExpansion {
    pub fn new(t: usize, n: usize) -> Result<Self> {
        check_arity(t)?;
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        let max_g = n - 1;
        let mut poly = Poly::one(t);
        for slot in 1..=t {
            let factor = Poly::edge_factor(t, slot);
            for _ in 0..n {
                poly = poly.mul_truncated(&factor, max_g);
            }
        }
        Ok(Self { nodes: n, poly })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// `(1/n) [G^(n-1) y^a]` of the expansion.
    pub fn tree_count(&self, a: &EdgeComposition) -> Result<BigUint> {
        let coef = self.poly.coefficient(self.nodes - 1, a.parts());
        divide(coef, self.nodes)
    }

    /// `(m/n) [G^(n-m) y^(a - e_1 - ... - e_m)]` of the expansion: the
    /// super-root contributes `y_1 ... y_m G^m`, factored out before reading.
    pub fn forest_count(&self, m: usize, a: &EdgeComposition) -> Result<BigUint> {
        let shifted: Vec<usize> =
            a.parts().iter().enumerate().map(|(i, &e)| if i < m { e - 1 } else { e }).collect();
        let coef = self.poly.coefficient(self.nodes - m, &shifted);
        divide(coef * m, self.nodes)
    }
}

fn divide(value: BigInt, divisor: usize) -> Result<BigUint> {
    let (q, r) = value.div_rem(&BigInt::from(divisor));
    if !r.is_zero() {
        return Err(Error::InexactDivision { value: value.to_string(), divisor });
    }
    q.to_biguint().ok_or(Error::InexactDivision { value: value.to_string(), divisor })
}

/// Tree count by direct Lagrange coefficient extraction.
pub fn lagrange_extract(t: usize, n: usize, a: &EdgeComposition) -> Result<BigUint> {
    let q = TreeCountQuery::new(t, n, a.clone())?;
    LagrangeExpansion::new(q.arity(), q.nodes())?.tree_count(q.composition())
}

/// Forest count by direct Lagrange coefficient extraction.
pub fn lagrange_extract_forest(t: usize, m: usize, n: usize, a: &EdgeComposition) -> Result<BigUint> {
    let q = ForestCountQuery::new(t, m, n, a.clone())?;
    LagrangeExpansion::new(t, n)?.forest_count(m, q.composition())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn comp(a: &[usize]) -> EdgeComposition {
        EdgeComposition::new(a.to_vec())
    }

    #[test]
    fn ring_basics() {
        let x = MultiSeries::x(2, 4);
        let x2 = MultiSeries::monomial(2, 4, 2, &[0, 0], BigInt::one());
        assert_eq!(x.mul(&x).unwrap(), x2);

        let one = MultiSeries::one(2, 4);
        let a = one.add(&MultiSeries::y(2, 4, 1).mul(&x).unwrap()).unwrap();
        let b = one.add(&MultiSeries::y(2, 4, 2).mul(&x).unwrap()).unwrap();
        let got = a.mul(&b).unwrap();
        assert_eq!(got.dump(), "0;0,0;1\n1;0,1;1\n1;1,0;1\n2;1,1;1\n");

        assert_eq!(got.add(&MultiSeries::zero(2, 4)).unwrap(), got);
        assert_eq!(got.add(&MultiSeries::zero(3, 4)), Err(Error::SeriesMismatch(2, 4, 3, 4)));
        assert!(got.mul(&MultiSeries::zero(2, 5)).is_err());
    }

    #[test]
    fn cancellation_keeps_representation_normal() {
        let x = MultiSeries::x(1, 3);
        let minus_x = MultiSeries::monomial(1, 3, 1, &[0], BigInt::from(-1));
        assert!(x.add(&minus_x).unwrap().is_zero());
    }

    #[test]
    fn truncation_drops_high_terms() {
        let x = MultiSeries::x(1, 2);
        let x2 = x.mul(&x).unwrap();
        assert!(!x2.is_zero());
        assert!(x2.mul(&x).unwrap().is_zero());
    }

    #[test]
    fn solved_coefficients() {
        let g = solve_g(3, 1).unwrap();
        assert_eq!(g.coefficient(1, &comp(&[0, 0, 0])).unwrap(), BigInt::one());
        let g = solve_g(3, 3).unwrap();
        assert_eq!(g.coefficient(3, &comp(&[1, 1, 0])).unwrap(), BigInt::from(3));
        let g = solve_g(2, 3).unwrap();
        assert_eq!(g.coefficient(3, &comp(&[1, 1])).unwrap(), BigInt::from(3));

        let g = solve_g(3, 5).unwrap();
        assert_eq!(g.coefficient(1, &comp(&[0, 0, 0])).unwrap(), BigInt::from(1));
        assert_eq!(g.coefficient(2, &comp(&[0, 1, 0])).unwrap(), BigInt::from(1));
        assert_eq!(g.coefficient(4, &comp(&[1, 1, 1])).unwrap(), BigInt::from(16));
        assert_eq!(g.coefficient(4, &comp(&[3, 1, 1])).unwrap(), BigInt::zero());
        assert_eq!(g.coefficient(6, &comp(&[5, 0, 0])), Err(Error::BeyondTruncation { n: 6, truncation: 5 }));
    }

    #[test]
    fn solved_series_is_fixed_point_and_homogeneous() {
        for t in 1..=4 {
            for n in 1..=8 {
                let g = solve_g(t, n).unwrap();
                assert_eq!(functional_map(&g), g, "t={t} N={n}");
                assert!(g.is_edge_homogeneous());
            }
        }
    }

    #[test]
    fn lagrange_values() {
        assert_eq!(lagrange_extract(3, 1, &comp(&[0, 0, 0])).unwrap(), BigUint::from(1u8));
        assert_eq!(lagrange_extract(3, 2, &comp(&[1, 0, 0])).unwrap(), BigUint::from(1u8));
        assert_eq!(lagrange_extract(3, 4, &comp(&[2, 1, 0])).unwrap(), BigUint::from(6u8));
        assert!(lagrange_extract(3, 4, &comp(&[1, 1, 0])).is_err());

        let e = LagrangeExpansion::new(3, 2).unwrap();
        assert_eq!(e.poly().coefficient(1, &[1, 0, 0]), BigInt::from(2));

        assert_eq!(lagrange_extract_forest(3, 2, 2, &comp(&[1, 1, 0])).unwrap(), BigUint::from(1u8));
        assert_eq!(lagrange_extract_forest(3, 2, 3, &comp(&[1, 1, 1])).unwrap(), BigUint::from(2u8));
        assert_eq!(lagrange_extract_forest(3, 1, 2, &comp(&[1, 1, 0])).unwrap(), BigUint::from(1u8));
        assert!(lagrange_extract_forest(3, 2, 3, &comp(&[3, 0, 0])).is_err());
    }

    fn small_series(arity: usize, truncation: usize) -> impl Strategy<Value = MultiSeries> {
        prop::collection::vec((0..=truncation, prop::collection::vec(0usize..3, arity), -5i64..=5), 0..6)
            .prop_map(move |terms| {
                terms.into_iter().fold(MultiSeries::zero(arity, truncation), |acc, (n, a, c)| {
                    acc.add(&MultiSeries::monomial(arity, truncation, n, &a, BigInt::from(c))).unwrap()
                })
            })
    }

    proptest! {
        #[test]
        fn ring_laws(a in small_series(2, 3), b in small_series(2, 3), c in small_series(2, 3)) {
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
            prop_assert!(a.terms().all(|(_, _, v)| !v.is_zero()));
        }
    }
}
