//! Concrete t-ary trees and forests, exhaustive enumeration, and the
//! brute-force edge-type census used as the oracle for every closed form.
//!
//! Trees are "incomplete": each node has exactly `t` ordered child slots and
//! any slot may be empty. The canonical text form is a preorder walk writing
//! `o` for a node and `.` for an empty slot, so the ternary lone root is
//! `o...` and a ternary root with only a middle child is `o.o....`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::counting::{check_forest_shape, compositions, total_forests, total_trees, EdgeComposition};
use crate::error::{check_arity, Error, Result};
use crate::table::{CountTable, TableContext};

/// Default cap on the number of objects a census may enumerate.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "ARBOR_BUDGET";

/// A non-empty t-ary tree. Subtrees are shared, so clones are cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TAryTree {
    children: Vec<Option<Arc<TAryTree>>>,
}

impl TAryTree {
    /// A single node with all `t` slots empty.
    pub fn leaf(t: usize) -> Self {
        Self { children: vec![None; t] }
    }

    /// A root over the given slots. All subtrees must have arity `children.len()`.
    pub fn with_children(children: Vec<Option<TAryTree>>) -> Self {
        let t = children.len();
        let children = children
            .into_iter()
            .map(|c| {
                c.map(|c| {
                    assert_eq!(c.arity(), t, "subtree arity differs from parent arity");
                    Arc::new(c)
                })
            })
            .collect();
        Self { children }
    }

    pub fn arity(&self) -> usize {
        self.children.len()
    }

    /// Child in 0-based slot `i`.
    pub fn child(&self, i: usize) -> Option<&TAryTree> {
        self.children[i].as_deref()
    }

    pub fn children(&self) -> impl DoubleEndedIterator<Item = Option<&TAryTree>> + ExactSizeIterator + '_ {
        self.children.iter().map(|c| c.as_deref())
    }

    pub fn node_count(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            count += 1;
            stack.extend(node.children.iter().flatten().map(|c| &**c));
        }
        count
    }

    /// Parse the canonical preorder form for arity `t`.
    pub fn parse(s: &str, t: usize) -> Result<Self> {
        check_arity(t)?;
        let bytes = s.as_bytes();
        let mut pos = 0;
        let tree = parse_node(bytes, &mut pos, t)?
            .ok_or_else(|| parse_err(format!("empty tree at offset 0 in {s:?}")))?;
        if pos != bytes.len() {
            return Err(parse_err(format!("trailing input at offset {pos} in {s:?}")));
        }
        Ok(tree)
    }
}

fn parse_err(reason: String) -> Error {
    Error::Parse { what: "tree", reason }
}

fn parse_node(bytes: &[u8], pos: &mut usize, t: usize) -> Result<Option<TAryTree>> {
    let at = *pos;
    match bytes.get(at) {
        Some(b'.') => {
            *pos += 1;
            Ok(None)
        }
        Some(b'o') => {
            *pos += 1;
            let children = (0..t)
                .map(|_| parse_node(bytes, pos, t).map(|c| c.map(Arc::new)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Some(TAryTree { children }))
        }
        Some(&c) => Err(parse_err(format!("unexpected {:?} at offset {at}", c as char))),
        None => Err(parse_err(format!("input ends at offset {at}"))),
    }
}

impl fmt::Display for TAryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("o")?;
        for child in &self.children {
            match child {
                Some(c) => write!(f, "{c}")?,
                None => f.write_str(".")?,
            }
        }
        Ok(())
    }
}

/// An ordered sequence of `m` non-empty trees of common arity `t`, with
/// `1 <= m < t`, hanging from an uncounted super-root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Forest {
    trees: Vec<TAryTree>,
}

impl Forest {
    pub fn new(trees: Vec<TAryTree>) -> Result<Self> {
        let t = trees.first().map_or(0, TAryTree::arity);
        if trees.is_empty() || trees.len() >= t {
            return Err(Error::ForestSize { m: trees.len(), t });
        }
        if let Some(bad) = trees.iter().find(|tr| tr.arity() != t) {
            return Err(Error::Arity(bad.arity()));
        }
        Ok(Self { trees })
    }

    pub fn arity(&self) -> usize {
        self.trees[0].arity()
    }

    pub fn trees(&self) -> &[TAryTree] {
        &self.trees
    }

    pub fn node_count(&self) -> usize {
        self.trees.iter().map(TAryTree::node_count).sum()
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tree) in self.trees.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{tree}")?;
        }
        Ok(())
    }
}

type SlotIter = Box<dyn Iterator<Item = Option<Arc<TAryTree>>> + Send>;

fn slot_iter(t: usize, size: usize) -> SlotIter {
    if size == 0 {
        Box::new(std::iter::once(None))
    } else {
        Box::new(enumerate_trees(t, size).map(|tree| Some(Arc::new(tree))))
    }
}

/// Odometer over the product of per-slot subtree streams for fixed slot
/// sizes; the last slot varies fastest.
struct SlotProduct {
    t: usize,
    sizes: Vec<usize>,
    iters: Vec<SlotIter>,
    current: Vec<Option<Arc<TAryTree>>>,
    started: bool,
    done: bool,
}

impl SlotProduct {
    fn new(t: usize, sizes: Vec<usize>) -> Self {
        Self { t, sizes, iters: Vec::new(), current: Vec::new(), started: false, done: false }
    }

    fn refill_from(&mut self, start: usize) -> bool {
        for j in start..self.sizes.len() {
            let mut it = slot_iter(self.t, self.sizes[j]);
            match it.next() {
                Some(first) => {
                    self.current[j] = first;
                    self.iters[j] = it;
                }
                None => return false,
            }
        }
        true
    }

    fn advance(&mut self) -> Option<Vec<Option<Arc<TAryTree>>>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            let k = self.sizes.len();
            self.iters = (0..k).map(|_| Box::new(std::iter::empty()) as SlotIter).collect();
            self.current = vec![None; k];
            if !self.refill_from(0) {
                self.done = true;
                return None;
            }
            return Some(self.current.clone());
        }
        for i in (0..self.sizes.len()).rev() {
            if let Some(next) = self.iters[i].next() {
                self.current[i] = next;
                if self.refill_from(i + 1) {
                    return Some(self.current.clone());
                }
            }
        }
        self.done = true;
        None
    }
}

/// Lazy stream of t-ary trees with a fixed node count.
pub struct Trees {
    inner: Box<dyn Iterator<Item = TAryTree> + Send>,
}

impl Iterator for Trees {
    type Item = TAryTree;

    fn next(&mut self) -> Option<TAryTree> {
        self.inner.next()
    }
}

/// Trees whose root distributes its `n - 1` descendants as `split`.
fn trees_with_split(t: usize, split: EdgeComposition) -> impl Iterator<Item = TAryTree> + Send {
    let mut product = SlotProduct::new(t, split.into_parts());
    std::iter::from_fn(move || product.advance()).map(|children| TAryTree { children })
}

/// Every t-ary tree with exactly `n` nodes, once each. The root's slot sizes
/// run through compositions of `n - 1` in lexicographic order and, within a
/// split, subtrees vary last-slot-fastest. `n = 0` yields nothing.
pub fn enumerate_trees(t: usize, n: usize) -> Trees {
    if n == 0 || t == 0 {
        return Trees { inner: Box::new(std::iter::empty()) };
    }
    let splits = compositions_unbounded(t, n - 1);
    Trees { inner: Box::new(splits.flat_map(move |split| trees_with_split(t, split))) }
}

// Arity checks happen at the public boundary; recursion only needs the stream.
fn compositions_unbounded(t: usize, total: usize) -> crate::counting::Compositions {
    compositions(t, total, 0).expect("arity validated by caller")
}

/// Every ordered `m`-tuple of non-empty t-ary trees with `n` nodes in total.
/// Node splits `(n_1, ..., n_m)` run lexicographically, trees vary
/// last-position-fastest within a split.
pub fn enumerate_forests(t: usize, m: usize, n: usize) -> Result<impl Iterator<Item = Forest> + Send> {
    check_forest_shape(t, m, n)?;
    // m positive parts summing to n, as m - 1 spare units over m slots.
    let splits = positive_splits(m, n);
    Ok(splits.into_iter().flat_map(move |sizes| {
        let mut product = SlotProduct::new(t, sizes);
        std::iter::from_fn(move || product.advance()).map(|trees| Forest {
            trees: trees.into_iter().map(|tr| (*tr.expect("positive size")).clone()).collect(),
        })
    }))
}

fn positive_splits(m: usize, n: usize) -> Vec<Vec<usize>> {
    // Weak compositions of n - m into m parts, shifted by one; m <= 15 here.
    compositions(m, n - m, 0)
        .expect("m < t <= 16")
        .map(|c| c.into_parts().into_iter().map(|a| a + 1).collect())
        .collect()
}

/// Number of edges in each child slot, over every node.
pub fn edge_profile(tree: &TAryTree) -> EdgeComposition {
    let mut parts = vec![0; tree.arity()];
    let mut stack = vec![tree];
    while let Some(node) = stack.pop() {
        for (i, child) in node.children.iter().enumerate() {
            if let Some(c) = child {
                parts[i] += 1;
                stack.push(c);
            }
        }
    }
    EdgeComposition::new(parts)
}

/// Edge profile of all trees plus one slot-`j` edge from the super-root to
/// tree `j`, for `j = 1..=m`.
pub fn forest_profile(forest: &Forest) -> EdgeComposition {
    let mut parts = vec![0; forest.arity()];
    for (j, tree) in forest.trees.iter().enumerate() {
        parts[j] += 1;
        for (p, a) in parts.iter_mut().zip(edge_profile(tree).parts()) {
            *p += a;
        }
    }
    EdgeComposition::new(parts)
}

/// Enumeration limits for [`census`] and [`forest_census`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    /// Refuse to enumerate more objects than this.
    pub budget: u64,
    /// Worker threads; `1` runs on the calling thread.
    pub jobs: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, jobs: 1 }
    }
}

impl CensusOptions {
    /// Defaults, with the budget taken from `ARBOR_BUDGET` when it parses.
    pub fn from_env() -> Self {
        let budget =
            std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET);
        Self { budget, ..Self::default() }
    }

    pub fn with_budget(self, budget: u64) -> Self {
        Self { budget, ..self }
    }

    pub fn with_jobs(self, jobs: usize) -> Self {
        Self { jobs: jobs.max(1), ..self }
    }

    fn check(&self, total: &BigUint) -> Result<()> {
        if *total > BigUint::from(self.budget) {
            return Err(Error::Budget { total: total.to_string(), budget: self.budget });
        }
        Ok(())
    }
}

fn tally<I, F>(items: I, profile: F) -> BTreeMap<EdgeComposition, u64>
where
    I: Iterator,
    F: Fn(&I::Item) -> EdgeComposition,
{
    let mut counts = BTreeMap::new();
    for item in items {
        *counts.entry(profile(&item)).or_insert(0) += 1;
    }
    counts
}

fn merge(parts: Vec<BTreeMap<EdgeComposition, u64>>) -> BTreeMap<EdgeComposition, BigUint> {
    let mut out: BTreeMap<EdgeComposition, BigUint> = BTreeMap::new();
    for part in parts {
        for (k, v) in part {
            *out.entry(k).or_default() += v;
        }
    }
    out
}

fn run_partitioned<T, F>(jobs: usize, work: Vec<T>, f: F) -> Vec<BTreeMap<EdgeComposition, u64>>
where
    T: Send,
    F: Fn(T) -> BTreeMap<EdgeComposition, u64> + Send + Sync,
{
    if jobs <= 1 {
        return work.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(|| work.into_par_iter().map(f).collect())
}

/// Multiplicity of every realized edge profile over all `n`-node t-ary trees.
///
/// Work is split by the root's slot distribution; the merged table does not
/// depend on `opts.jobs`.
pub fn census(t: usize, n: usize, opts: CensusOptions) -> Result<CountTable> {
    check_arity(t)?;
    let total = total_trees(t, n)?;
    opts.check(&total)?;
    let splits: Vec<EdgeComposition> = compositions(t, n - 1, 0)?.collect();
    let parts = run_partitioned(opts.jobs, splits, |split| tally(trees_with_split(t, split), edge_profile));
    Ok(CountTable::from_sparse(t, n, TableContext::Trees, merge(parts)))
}

/// Multiplicity of every realized forest profile over all ordered
/// `m`-forests with `n` nodes.
pub fn forest_census(t: usize, m: usize, n: usize, opts: CensusOptions) -> Result<CountTable> {
    check_forest_shape(t, m, n)?;
    opts.check(&total_forests(t, m, n)?)?;
    let parts = run_partitioned(opts.jobs, positive_splits(m, n), |sizes| {
        let mut product = SlotProduct::new(t, sizes);
        let forests = std::iter::from_fn(move || product.advance()).map(|trees| Forest {
            trees: trees.into_iter().map(|tr| (*tr.expect("positive size")).clone()).collect(),
        });
        tally(forests, forest_profile)
    });
    Ok(CountTable::from_sparse(t, n, TableContext::Forest { trees: m }, merge(parts)))
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn small_tree_counts() {
        assert_eq!(enumerate_trees(3, 0).count(), 0);
        assert_eq!(enumerate_trees(3, 1).count(), 1);
        assert_eq!(enumerate_trees(3, 2).count(), 3);
        assert_eq!(enumerate_trees(3, 4).count(), 55);
        assert_eq!(enumerate_trees(1, 6).count(), 1);
    }

    #[test]
    fn enumeration_has_no_duplicates_and_right_sizes() {
        for (t, n) in [(2, 6), (3, 5), (4, 4)] {
            let mut seen = HashSet::new();
            for tree in enumerate_trees(t, n) {
                assert_eq!(tree.node_count(), n);
                assert_eq!(tree.arity(), t);
                assert!(seen.insert(tree.to_string()));
            }
            assert_eq!(BigUint::from(seen.len()), total_trees(t, n).unwrap());
        }
    }

    #[test]
    fn enumeration_order_is_fixed() {
        let got: Vec<String> = enumerate_trees(3, 2).map(|t| t.to_string()).collect();
        assert_eq!(got, ["o..o...", "o.o....", "oo....."]);
        let got: Vec<String> = enumerate_trees(2, 3).map(|t| t.to_string()).collect();
        assert_eq!(got, ["o.o.o..", "o.oo...", "oo..o..", "oo.o...", "ooo...."]);
    }

    #[test]
    fn canonical_form_round_trips() {
        for tree in enumerate_trees(3, 4) {
            assert_eq!(TAryTree::parse(&tree.to_string(), 3).unwrap(), tree);
        }
        assert_eq!(TAryTree::leaf(3).to_string(), "o...");
        assert!(TAryTree::parse("o..", 3).is_err());
        assert!(TAryTree::parse("o....", 3).is_err());
        assert!(TAryTree::parse(".", 3).is_err());
        assert!(TAryTree::parse("ox..", 3).is_err());
    }

    #[test]
    fn profiles() {
        let leaf = TAryTree::leaf(3);
        assert_eq!(edge_profile(&leaf).parts(), &[0, 0, 0]);
        let middle = TAryTree::with_children(vec![None, Some(leaf.clone()), None]);
        assert_eq!(edge_profile(&middle).parts(), &[0, 1, 0]);
        let left = TAryTree::with_children(vec![Some(leaf.clone()), None, None]);
        let left_left = TAryTree::with_children(vec![Some(left.clone()), None, None]);
        assert_eq!(edge_profile(&left_left).parts(), &[2, 0, 0]);

        let pair = Forest::new(vec![leaf.clone(), leaf.clone()]).unwrap();
        assert_eq!(forest_profile(&pair).parts(), &[1, 1, 0]);
        let single = Forest::new(vec![leaf.clone()]).unwrap();
        assert_eq!(forest_profile(&single).parts(), &[1, 0, 0]);
        let mixed = Forest::new(vec![left, leaf.clone()]).unwrap();
        assert_eq!(forest_profile(&mixed).parts(), &[2, 1, 0]);

        assert!(Forest::new(vec![leaf.clone(), leaf.clone(), leaf]).is_err());
    }

    #[test]
    fn forest_counts() {
        assert_eq!(enumerate_forests(3, 2, 2).unwrap().count(), 1);
        assert_eq!(enumerate_forests(3, 2, 3).unwrap().count(), 6);
        assert_eq!(enumerate_forests(3, 2, 4).unwrap().count(), 33);
        assert!(enumerate_forests(3, 3, 4).is_err());
    }

    #[test]
    fn census_tables() {
        let opts = CensusOptions::default();
        let table = census(3, 2, opts).unwrap();
        let rows: Vec<(Vec<usize>, BigUint)> =
            table.rows().iter().map(|(c, v)| (c.parts().to_vec(), v.clone())).collect();
        assert_eq!(rows, vec![(vec![0, 0, 1], big(1)), (vec![0, 1, 0], big(1)), (vec![1, 0, 0], big(1))]);

        let table = census(3, 3, opts).unwrap();
        assert_eq!(table.total(), big(12));
        assert_eq!(table.get(&[2, 0, 0].into()), big(1));
        assert_eq!(table.get(&[1, 1, 0].into()), big(3));

        let table = census(1, 4, opts).unwrap();
        assert_eq!(table.rows().len(), 1);
        assert_eq!(table.get(&[3].into()), big(1));
    }

    #[test]
    fn forest_census_tables() {
        let opts = CensusOptions::default();
        let table = forest_census(3, 2, 2, opts).unwrap();
        assert_eq!(table.rows().len(), 1);
        assert_eq!(table.get(&[1, 1, 0].into()), big(1));

        let table = forest_census(3, 2, 3, opts).unwrap();
        assert_eq!(table.rows().len(), 3);
        for c in [[2, 1, 0], [1, 2, 0], [1, 1, 1]] {
            assert_eq!(table.get(&c.into()), big(2));
        }

        let table = forest_census(2, 1, 2, opts).unwrap();
        assert_eq!(table.get(&[2, 0].into()), big(1));
        assert_eq!(table.get(&[1, 1].into()), big(1));
    }

    #[test]
    fn census_respects_budget() {
        let opts = CensusOptions::default().with_budget(54);
        assert_eq!(census(3, 4, opts), Err(Error::Budget { total: "55".into(), budget: 54 }));
        assert!(census(3, 4, opts.with_budget(55)).is_ok());
        assert!(forest_census(3, 2, 4, opts.with_budget(32)).is_err());
    }

    #[test]
    fn census_is_independent_of_worker_count() {
        let one = census(3, 6, CensusOptions::default()).unwrap();
        let four = census(3, 6, CensusOptions::default().with_jobs(4)).unwrap();
        assert_eq!(one, four);
        let one = forest_census(4, 2, 5, CensusOptions::default()).unwrap();
        let three = forest_census(4, 2, 5, CensusOptions::default().with_jobs(3)).unwrap();
        assert_eq!(one, three);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a: Vec<TAryTree> = enumerate_trees(3, 5).collect();
        let b: Vec<TAryTree> = enumerate_trees(3, 5).collect();
        assert_eq!(a, b);
    }
}
