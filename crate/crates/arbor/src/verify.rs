//! Cross-verification of the closed forms against enumeration, the solved
//! generating function and direct Lagrange extraction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};

use crate::counting::{
    check_forest_shape, compositions, count_forests, count_trees, marginal_count, total_forests, total_trees,
    EdgeComposition, ForestCountQuery, TreeCountQuery,
};
use crate::error::{check_arity, Error, Result};
use crate::series::{functional_map, solve_g, LagrangeExpansion, MultiSeries};
use crate::table::{CountTable, TableContext};
use crate::treebank::{census, forest_census, CensusOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Brute,
    Series,
    Lagrange,
    All,
}

impl Mode {
    fn includes(self, other: Mode) -> bool {
        self == Mode::All || self == other
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Mode::Brute),
            "series" => Ok(Mode::Series),
            "lagrange" => Ok(Mode::Lagrange),
            "all" => Ok(Mode::All),
            other => Err(Error::Parse { what: "mode", reason: other.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub arity: usize,
    pub max_nodes: usize,
    pub mode: Mode,
    /// Also check ordered forests of this many trees.
    pub forest: Option<usize>,
    pub census: CensusOptions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: String, failures: Vec<String>, examined: usize) {
        let passed = failures.is_empty();
        let detail = if passed {
            format!("{examined} cases")
        } else {
            format!("{} of {examined} cases differ; first: {}", failures.len(), failures[0])
        };
        self.checks.push(Check { name, passed, detail });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {} ({})", c.name, c.detail)?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        writeln!(f, "summary: {passed} passed, {} failed", self.checks.len() - passed)
    }
}

fn tree_count(t: usize, n: usize, a: &EdgeComposition) -> BigUint {
    count_trees(&TreeCountQuery::new(t, n, a.clone()).expect("composition from stream"))
}

fn forest_count(t: usize, m: usize, n: usize, a: &EdgeComposition) -> BigUint {
    count_forests(&ForestCountQuery::new(t, m, n, a.clone()).expect("composition from stream"))
}

/// Every closed-form entry must match the census, and the census may hold
/// nothing the closed form lacks.
fn compare_tables(closed: &CountTable, brute: &CountTable) -> Vec<String> {
    let mut failures: Vec<String> = closed
        .rows()
        .iter()
        .filter(|(c, v)| brute.get(c) != *v)
        .map(|(c, v)| format!("({c}): closed form {v}, enumeration {}", brute.get(c)))
        .collect();
    failures.extend(
        brute
            .rows()
            .iter()
            .filter(|(c, _)| closed.rows().binary_search_by(|(k, _)| k.cmp(c)).is_err())
            .map(|(c, v)| format!("({c}): enumeration {v} outside closed-form domain")),
    );
    failures
}

/// Run the checks selected by `opts`. Errors only for invalid shapes or an
/// exceeded enumeration budget; failed checks are reported, not raised.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let t = opts.arity;
    check_arity(t)?;
    if opts.max_nodes == 0 {
        return Err(Error::EmptyTree);
    }
    if let Some(m) = opts.forest {
        check_forest_shape(t, m, m)?;
    }
    if opts.mode.includes(Mode::Brute) {
        // Refuse up front rather than after partial output.
        let largest = total_trees(t, opts.max_nodes)?;
        if largest > BigUint::from(opts.census.budget) {
            return Err(Error::Budget { total: largest.to_string(), budget: opts.census.budget });
        }
        if let Some(m) = opts.forest.filter(|&m| m <= opts.max_nodes) {
            let largest = total_forests(t, m, opts.max_nodes)?;
            if largest > BigUint::from(opts.census.budget) {
                return Err(Error::Budget { total: largest.to_string(), budget: opts.census.budget });
            }
        }
    }

    let mut report = VerifyReport::default();
    closed_form_checks(opts, &mut report)?;
    if opts.mode.includes(Mode::Brute) {
        brute_checks(opts, &mut report)?;
    }
    if opts.mode.includes(Mode::Series) {
        series_checks(opts, &mut report)?;
    }
    if opts.mode.includes(Mode::Lagrange) {
        lagrange_checks(opts, &mut report)?;
    }
    Ok(report)
}

fn closed_form_checks(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let (t, max_n) = (opts.arity, opts.max_nodes);

    let mut failures = Vec::new();
    for n in 1..=max_n {
        let sum: BigUint = compositions(t, n - 1, 0)?.map(|a| tree_count(t, n, &a)).sum();
        let total = total_trees(t, n)?;
        if sum != total {
            failures.push(format!("n={n}: sum {sum} vs total {total}"));
        }
    }
    report.push(format!("identity/tree-sum t={t} n<={max_n}"), failures, max_n);

    // Grouping by sorted parts covers every permutation, since each
    // permutation of a composition is itself a composition.
    let mut failures = Vec::new();
    let mut examined = 0;
    for n in 1..=max_n {
        let mut classes: BTreeMap<Vec<usize>, BigUint> = BTreeMap::new();
        for a in compositions(t, n - 1, 0)? {
            examined += 1;
            let count = tree_count(t, n, &a);
            let mut key = a.parts().to_vec();
            key.sort_unstable();
            match classes.get(&key) {
                Some(first) if *first != count => {
                    failures.push(format!("n={n} ({a}): {count} vs sorted class {first}"))
                }
                Some(_) => {}
                None => {
                    classes.insert(key, count);
                }
            }
        }
    }
    report.push(format!("symmetry/permutations t={t} n<={max_n}"), failures, examined);

    let mut failures = Vec::new();
    let mut examined = 0;
    for n in 1..=max_n {
        let free = marginal_count(t, n, &BTreeMap::new())?;
        if free != total_trees(t, n)? {
            failures.push(format!("n={n}: no slots fixed gives {free}"));
        }
        for slot in 1..=t {
            let mut by_slot: BTreeMap<usize, BigUint> = BTreeMap::new();
            for a in compositions(t, n - 1, 0)? {
                *by_slot.entry(a.parts()[slot - 1]).or_default() += tree_count(t, n, &a);
            }
            for k in 0..n {
                examined += 1;
                let fixed = BTreeMap::from([(slot, k)]);
                let got = marginal_count(t, n, &fixed)?;
                let want = by_slot.get(&k).cloned().unwrap_or_default();
                if got != want {
                    failures.push(format!("n={n} slot {slot}={k}: {got} vs summed {want}"));
                }
            }
        }
    }
    report.push(format!("identity/marginal t={t} n<={max_n}"), failures, examined);

    if t >= 2 {
        let mut failures = Vec::new();
        let mut examined = 0;
        for n in 1..=max_n {
            for a in compositions(t, n, 1)? {
                examined += 1;
                let forest = forest_count(t, 1, n, &a);
                let mut shifted = a.clone();
                shifted.parts_mut()[0] -= 1;
                let tree = tree_count(t, n, &shifted);
                if forest != tree {
                    failures.push(format!("n={n} ({a}): forest {forest} vs tree {tree}"));
                }
            }
        }
        report.push(format!("identity/single-tree-forest t={t} n<={max_n}"), failures, examined);
    }

    if let Some(m) = opts.forest {
        let mut failures = Vec::new();
        for n in m..=max_n {
            let sum: BigUint = compositions(t, n, m)?.map(|a| forest_count(t, m, n, &a)).sum();
            let total = total_forests(t, m, n)?;
            if sum != total {
                failures.push(format!("n={n}: sum {sum} vs total {total}"));
            }
        }
        report.push(
            format!("identity/forest-sum t={t} m={m} n<={max_n}"),
            failures,
            (max_n + 1).saturating_sub(m),
        );
    }
    Ok(())
}

fn brute_checks(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let t = opts.arity;
    for n in 1..=opts.max_nodes {
        let brute = census(t, n, opts.census)?;
        let closed = CountTable::closed_form(t, n, TableContext::Trees)?;
        let mut failures = compare_tables(&closed, &brute);
        if brute.total() != total_trees(t, n)? {
            failures.push(format!("enumerated {} trees, expected {}", brute.total(), total_trees(t, n)?));
        }
        report.push(format!("brute/trees t={t} n={n}"), failures, closed.rows().len());
    }
    if let Some(m) = opts.forest {
        for n in m..=opts.max_nodes {
            let brute = forest_census(t, m, n, opts.census)?;
            let closed = CountTable::closed_form(t, n, TableContext::Forest { trees: m })?;
            let failures = compare_tables(&closed, &brute);
            report.push(format!("brute/forests t={t} m={m} n={n}"), failures, closed.rows().len());
        }
    }
    Ok(())
}

fn series_checks(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let (t, max_n) = (opts.arity, opts.max_nodes);
    let g = solve_g(t, max_n)?;

    let residual_ok = functional_map(&g) == g;
    report.push(
        format!("series/fixed-point t={t} N={max_n}"),
        if residual_ok { vec![] } else { vec!["x*prod(1+y_i G) differs from G".into()] },
        1,
    );
    let homogeneous = g.is_edge_homogeneous();
    report.push(
        format!("series/homogeneity t={t} N={max_n}"),
        if homogeneous { vec![] } else { vec!["term with |a| != n-1".into()] },
        g.terms().count(),
    );

    for n in 1..=max_n {
        let mut failures = Vec::new();
        let mut examined = 0;
        for a in compositions(t, n - 1, 0)? {
            examined += 1;
            let coef = g.coefficient(n, &a)?;
            let closed = BigInt::from(tree_count(t, n, &a));
            if coef != closed {
                failures.push(format!("({a}): series {coef}, closed form {closed}"));
            }
        }
        report.push(format!("series/trees t={t} n={n}"), failures, examined);
    }

    if let Some(m) = opts.forest {
        // y_1 ... y_m G^m: one super-root edge of type j to each of m trees.
        let mut forest = MultiSeries::one(t, max_n);
        for j in 1..=m {
            forest = forest.mul(&MultiSeries::y(t, max_n, j))?.mul(&g)?;
        }
        for n in m..=max_n {
            let mut failures = Vec::new();
            let mut examined = 0;
            for a in compositions(t, n, m)? {
                examined += 1;
                let coef = forest.coefficient(n, &a)?;
                let closed = BigInt::from(forest_count(t, m, n, &a));
                if coef != closed {
                    failures.push(format!("({a}): series {coef}, closed form {closed}"));
                }
            }
            let stray = forest
                .terms()
                .filter(|(k, a, _)| *k == n && (a.total() != n || a.parts()[..m].contains(&0)))
                .count();
            if stray > 0 {
                failures.push(format!("{stray} terms outside the forest domain"));
            }
            report.push(format!("series/forests t={t} m={m} n={n}"), failures, examined);
        }
    }
    Ok(())
}

fn lagrange_checks(opts: &VerifyOptions, report: &mut VerifyReport) -> Result<()> {
    let t = opts.arity;
    for n in 1..=opts.max_nodes {
        let expansion = LagrangeExpansion::new(t, n)?;
        let mut failures = Vec::new();
        let mut examined = 0;
        for a in compositions(t, n - 1, 0)? {
            examined += 1;
            let closed = tree_count(t, n, &a);
            match expansion.tree_count(&a) {
                Ok(v) if v == closed => {}
                Ok(v) => failures.push(format!("({a}): lagrange {v}, closed form {closed}")),
                Err(e) => failures.push(format!("({a}): {e}")),
            }
        }
        report.push(format!("lagrange/trees t={t} n={n}"), failures, examined);

        if let Some(m) = opts.forest.filter(|&m| m <= n) {
            let mut failures = Vec::new();
            let mut examined = 0;
            for a in compositions(t, n, m)? {
                examined += 1;
                let closed = forest_count(t, m, n, &a);
                match expansion.forest_count(m, &a) {
                    Ok(v) if v == closed => {}
                    Ok(v) => failures.push(format!("({a}): lagrange {v}, closed form {closed}")),
                    Err(e) => failures.push(format!("({a}): {e}")),
                }
            }
            report.push(format!("lagrange/forests t={t} m={m} n={n}"), failures, examined);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(t: usize, max_n: usize, mode: Mode, forest: Option<usize>) -> VerifyOptions {
        VerifyOptions { arity: t, max_nodes: max_n, mode, forest, census: CensusOptions::default() }
    }

    #[test]
    fn all_modes_pass() {
        let report = verify(&opts(3, 5, Mode::All, Some(2))).unwrap();
        assert!(report.all_passed(), "{report}");
        assert!(report.checks.iter().any(|c| c.name.starts_with("brute/forests")));
        assert!(report.checks.iter().any(|c| c.name.starts_with("series/forests")));
        assert!(report.checks.iter().any(|c| c.name.starts_with("lagrange/forests")));
    }

    #[test]
    fn single_modes_pass() {
        assert!(verify(&opts(2, 8, Mode::Brute, None)).unwrap().all_passed());
        assert!(verify(&opts(7, 3, Mode::Series, None)).unwrap().all_passed());
        assert!(verify(&opts(4, 5, Mode::Lagrange, Some(3))).unwrap().all_passed());
        assert!(verify(&opts(1, 6, Mode::All, None)).unwrap().all_passed());
    }

    #[test]
    fn budget_is_checked_before_work() {
        let mut o = opts(3, 6, Mode::Brute, None);
        o.census = o.census.with_budget(100);
        assert_eq!(verify(&o), Err(Error::Budget { total: "1428".into(), budget: 100 }));
        o.mode = Mode::Series;
        assert!(verify(&o).is_ok());
    }

    #[test]
    fn table_mismatch_is_reported() {
        let closed = CountTable::closed_form(3, 3, TableContext::Trees).unwrap();
        let brute = CountTable::from_sparse(
            3,
            3,
            TableContext::Trees,
            BTreeMap::from([(EdgeComposition::from([2, 0, 0]), BigUint::from(2u8))]),
        );
        let failures = compare_tables(&closed, &brute);
        assert_eq!(failures.len(), 6);
        assert!(failures[0].starts_with("(0,0,2)"));
    }

    #[test]
    fn report_rendering() {
        let report = verify(&opts(2, 2, Mode::Lagrange, None)).unwrap();
        let text = report.to_string();
        assert!(text.lines().all(|l| l.starts_with("PASS ") || l.starts_with("summary: ")));
        assert!(text.ends_with("failed\n"));
    }
}
