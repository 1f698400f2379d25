//! Łukasiewicz lattice paths of t-ary trees, labelled by child slot.
//!
//! The tree is completed by turning every empty slot into an external leaf
//! and walked in preorder: a node is a rise of `t - 1`, a leaf is a fall of
//! one. Each symbol except the root's carries the slot it occupies under its
//! parent. An `n`-node tree gives `n` rises and `(t-1)n + 1` falls, and the
//! path first reaches height `-1` at its last step.
//!
//! Text form: comma-separated signed steps with optional `:slot` suffixes,
//! e.g. `+2,-1:1,-1:2,-1:3`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::counting::{total_trees, EdgeComposition};
use crate::error::{check_arity, Error, Result};
use crate::treebank::{edge_profile, enumerate_trees, CensusOptions, TAryTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub rise: i64,
    /// 1-based child slot; `None` for the root and for unlabelled input.
    pub label: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePath {
    arity: usize,
    steps: Vec<Step>,
}

impl LatticePath {
    pub fn new(arity: usize, steps: Vec<Step>) -> Self {
        Self { arity, steps }
    }

    /// Parse the text form for arity `t`. Step values are not validated here.
    pub fn parse(s: &str, t: usize) -> Result<Self> {
        check_arity(t)?;
        let steps = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                let (num, label) = match tok.split_once(':') {
                    Some((num, label)) => (num, Some(label)),
                    None => (tok, None),
                };
                let rise = num
                    .trim_start_matches('+')
                    .parse::<i64>()
                    .map_err(|e| Error::Parse { what: "path step", reason: format!("{tok:?}: {e}") })?;
                let label = label
                    .map(|l| {
                        l.parse::<usize>()
                            .map_err(|e| Error::Parse { what: "path label", reason: format!("{tok:?}: {e}") })
                    })
                    .transpose()?;
                Ok(Step { rise, label })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { arity: t, steps })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn rises(&self) -> impl Iterator<Item = i64> + '_ {
        self.steps.iter().map(|s| s.rise)
    }

    /// Same steps with all labels dropped.
    pub fn unlabeled(&self) -> Self {
        let steps = self.steps.iter().map(|s| Step { label: None, ..*s }).collect();
        Self { arity: self.arity, steps }
    }

    /// Text form including `:slot` suffixes.
    pub fn to_labeled_string(&self) -> String {
        let mut out = String::new();
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{:+}", step.rise);
            if let Some(label) = step.label {
                let _ = write!(out, ":{label}");
            }
        }
        out
    }
}

/// Steps only, without labels.
impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{:+}", step.rise)?;
        }
        Ok(())
    }
}

/// Preorder Łukasiewicz encoding of the completed tree.
pub fn tree_to_path(tree: &TAryTree) -> LatticePath {
    let t = tree.arity();
    let up = t as i64 - 1;
    let mut steps = Vec::with_capacity(t * tree.node_count() + 1);
    // (subtree, label); `None` subtree is an external leaf.
    let mut stack: Vec<(Option<&TAryTree>, Option<usize>)> = vec![(Some(tree), None)];
    while let Some((node, label)) = stack.pop() {
        match node {
            Some(node) => {
                steps.push(Step { rise: up, label });
                for (i, child) in node.children().enumerate().rev() {
                    stack.push((child, Some(i + 1)));
                }
            }
            None => steps.push(Step { rise: -1, label }),
        }
    }
    LatticePath { arity: t, steps }
}

fn malformed(index: usize, reason: impl Into<String>) -> Error {
    Error::MalformedPath { index, reason: reason.into() }
}

/// Inverse of [`tree_to_path`]. Labels, where present, must match the slots
/// recomputed from the step sequence.
pub fn path_to_tree(path: &LatticePath) -> Result<TAryTree> {
    let t = path.arity;
    check_arity(t)?;
    let up = t as i64 - 1;
    let steps = &path.steps;
    match steps.first() {
        Some(s) if s.rise == up => {}
        _ => return Err(malformed(0, "path must start with a node step")),
    }
    let mut height = 0i64;
    for (i, step) in steps.iter().enumerate() {
        if step.rise != up && step.rise != -1 {
            return Err(malformed(i, format!("step {:+} is neither {up:+} nor -1", step.rise)));
        }
        height += step.rise;
        if height < 0 && i + 1 != steps.len() {
            return Err(malformed(i, "path reaches -1 before its last step"));
        }
    }
    if height != -1 {
        return Err(malformed(steps.len(), format!("path ends at height {height}, expected -1")));
    }

    let mut pos = 0;
    let tree = build(steps, &mut pos, t).expect("first step is a node");
    debug_assert_eq!(pos, steps.len());

    let canonical = tree_to_path(&tree);
    for (i, (given, expected)) in steps.iter().zip(&canonical.steps).enumerate() {
        if given.label.is_some() && given.label != expected.label {
            return Err(malformed(
                i,
                format!("label {:?} does not match slot {:?}", given.label, expected.label),
            ));
        }
    }
    Ok(tree)
}

fn build(steps: &[Step], pos: &mut usize, t: usize) -> Option<TAryTree> {
    let step = steps[*pos];
    *pos += 1;
    if step.rise == -1 {
        return None;
    }
    let children = (0..t).map(|_| build(steps, pos, t)).collect();
    Some(TAryTree::with_children(children))
}

/// Down-steps of a path tallied by starting height modulo `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueStats {
    counts: Vec<usize>,
}

impl ResidueStats {
    /// Entry `r` counts down-steps starting at a height congruent to `r`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn residue_stats(path: &LatticePath, t: usize) -> ResidueStats {
    let mut counts = vec![0; t];
    let mut height = 0i64;
    for step in &path.steps {
        if step.rise < 0 {
            counts[height.rem_euclid(t as i64) as usize] += 1;
        }
        height += step.rise;
    }
    ResidueStats { counts }
}

/// Per-slot tallies of labelled symbols: `(rises, falls)`, index `i` for slot `i + 1`.
pub fn label_counts(path: &LatticePath) -> (Vec<usize>, Vec<usize>) {
    let mut rises = vec![0; path.arity];
    let mut falls = vec![0; path.arity];
    for step in &path.steps {
        if let Some(slot) = step.label {
            if step.rise < 0 {
                falls[slot - 1] += 1;
            } else {
                rises[slot - 1] += 1;
            }
        }
    }
    (rises, falls)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    NotEqual,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equal => "equal",
            Verdict::NotEqual => "not-equal",
        })
    }
}

/// A vector whose multiplicity differs between the two distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub vector: Vec<i64>,
    pub edge_count: u64,
    pub residue_count: u64,
}

/// Edge-type distribution against normalized residue distribution for all
/// `n`-node t-ary trees.
///
/// A residue vector `r` is normalized under cyclic shift `s` to
/// `v_i = n - r[(i + s) mod t]`, which has the same sum `n - 1` as an edge
/// composition. Every shift is scored by the L1 distance between the two
/// distributions; the best is the first with the smallest distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub arity: usize,
    pub nodes: usize,
    pub edge: BTreeMap<EdgeComposition, u64>,
    pub residue: BTreeMap<Vec<usize>, u64>,
    /// L1 distance for each shift `0..t`.
    pub distances: Vec<u64>,
    pub best_shift: usize,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

fn normalize(residue: &BTreeMap<Vec<usize>, u64>, n: usize, shift: usize) -> BTreeMap<Vec<i64>, u64> {
    let mut out = BTreeMap::new();
    for (r, &count) in residue {
        let t = r.len();
        let v = (0..t).map(|i| n as i64 - r[(i + shift) % t] as i64).collect();
        *out.entry(v).or_insert(0) += count;
    }
    out
}

fn signed(edge: &BTreeMap<EdgeComposition, u64>) -> BTreeMap<Vec<i64>, u64> {
    edge.iter().map(|(c, &v)| (c.parts().iter().map(|&a| a as i64).collect(), v)).collect()
}

fn differences(a: &BTreeMap<Vec<i64>, u64>, b: &BTreeMap<Vec<i64>, u64>) -> Vec<Witness> {
    let keys: std::collections::BTreeSet<&Vec<i64>> = a.keys().chain(b.keys()).collect();
    keys.into_iter()
        .filter_map(|k| {
            let x = a.get(k).copied().unwrap_or(0);
            let y = b.get(k).copied().unwrap_or(0);
            (x != y).then(|| Witness { vector: k.clone(), edge_count: x, residue_count: y })
        })
        .collect()
}

/// Compare edge profiles with down-step residue classes over every tree.
pub fn residue_distribution_probe(t: usize, n: usize, opts: CensusOptions) -> Result<ProbeReport> {
    check_arity(t)?;
    let total = total_trees(t, n)?;
    if total > opts.budget.into() {
        return Err(Error::Budget { total: total.to_string(), budget: opts.budget });
    }
    let mut edge = BTreeMap::new();
    let mut residue = BTreeMap::new();
    for tree in enumerate_trees(t, n) {
        *edge.entry(edge_profile(&tree)).or_insert(0u64) += 1;
        let stats = residue_stats(&tree_to_path(&tree), t);
        *residue.entry(stats.counts).or_insert(0u64) += 1;
    }

    let edge_signed = signed(&edge);
    let diffs: Vec<Vec<Witness>> =
        (0..t).map(|s| differences(&edge_signed, &normalize(&residue, n, s))).collect();
    let distances: Vec<u64> =
        diffs.iter().map(|d| d.iter().map(|w| w.edge_count.abs_diff(w.residue_count)).sum()).collect();
    let best_shift = (0..t).min_by_key(|&s| (distances[s], s)).unwrap_or(0);
    let witness = diffs[best_shift].first().cloned();
    let verdict = if witness.is_none() { Verdict::Equal } else { Verdict::NotEqual };
    Ok(ProbeReport { arity: t, nodes: n, edge, residue, distances, best_shift, verdict, witness })
}

impl ProbeReport {
    /// Normalized residue distribution under the best shift.
    pub fn normalized(&self) -> BTreeMap<Vec<i64>, u64> {
        normalize(&self.residue, self.nodes, self.best_shift)
    }

    /// CSV body `side,v1,...,vt,count` for sides `edge`, `residue` (raw) and
    /// `normalized`, then one `verdict:` line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("side");
        for i in 1..=self.arity {
            let _ = write!(out, ",v{i}");
        }
        out.push_str(",count\n");
        for (c, v) in &self.edge {
            let _ = writeln!(out, "edge,{c},{v}");
        }
        for (r, v) in &self.residue {
            let _ = writeln!(out, "residue,{},{v}", join(r));
        }
        for (r, v) in self.normalized() {
            let _ = writeln!(out, "normalized,{},{v}", join(&r));
        }
        out.push_str(&self.verdict_line());
        out.push('\n');
        out
    }

    pub fn verdict_line(&self) -> String {
        let mut line = format!(
            "verdict: {} (t={}, n={}, shift={}, l1={}, normalization v_i = n - r[(i+shift) mod t])",
            self.verdict, self.arity, self.nodes, self.best_shift, self.distances[self.best_shift]
        );
        if let Some(w) = &self.witness {
            let _ = write!(
                line,
                " witness ({}): edge={} residue={}",
                join(&w.vector),
                w.edge_count,
                w.residue_count
            );
        }
        line
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(Verdict::Equal),
            "not-equal" => Ok(Verdict::NotEqual),
            other => Err(Error::Parse { what: "verdict", reason: other.to_string() }),
        }
    }
}
