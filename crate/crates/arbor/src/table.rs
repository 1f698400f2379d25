//! Edge-profile count tables and their text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::counting::{
    check_forest_shape, compositions, count_forests, count_trees, EdgeComposition, ForestCountQuery,
    TreeCountQuery,
};
use crate::error::{Error, Result};

/// What a table's rows count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableContext {
    /// Single trees; compositions sum to `n - 1`.
    Trees,
    /// Ordered forests of `trees` trees; compositions sum to `n`.
    Forest { trees: usize },
}

/// Exact counts per edge composition for fixed arity and node count, rows in
/// strictly increasing lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    arity: usize,
    nodes: usize,
    context: TableContext,
    rows: Vec<(EdgeComposition, BigUint)>,
}

impl CountTable {
    /// Table over the compositions present in `counts`; zero entries are dropped.
    pub fn from_sparse(
        arity: usize,
        nodes: usize,
        context: TableContext,
        counts: BTreeMap<EdgeComposition, BigUint>,
    ) -> Self {
        let rows = counts.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self { arity, nodes, context, rows }
    }

    /// Closed-form table over every valid composition, zeros included.
    pub fn closed_form(arity: usize, nodes: usize, context: TableContext) -> Result<Self> {
        let rows = match context {
            TableContext::Trees => {
                let n1 = nodes.checked_sub(1).ok_or(Error::EmptyTree)?;
                compositions(arity, n1, 0)?
                    .map(|c| {
                        let q = TreeCountQuery::new(arity, nodes, c.clone())?;
                        Ok((c, count_trees(&q)))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            TableContext::Forest { trees } => {
                check_forest_shape(arity, trees, nodes)?;
                compositions(arity, nodes, trees)?
                    .map(|c| {
                        let q = ForestCountQuery::new(arity, trees, nodes, c.clone())?;
                        Ok((c, count_forests(&q)))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Self { arity, nodes, context, rows })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn context(&self) -> TableContext {
        self.context
    }

    pub fn rows(&self) -> &[(EdgeComposition, BigUint)] {
        &self.rows
    }

    /// Count for `composition`, zero when absent.
    pub fn get(&self, composition: &EdgeComposition) -> BigUint {
        self.rows
            .binary_search_by(|(c, _)| c.cmp(composition))
            .map(|i| self.rows[i].1.clone())
            .unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.rows.iter().map(|(_, v)| v).sum()
    }

    /// `a1,...,at,count` with a header and a trailing `total,,...,N` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.arity {
            let _ = write!(out, "a{i},");
        }
        out.push_str("count\n");
        for (c, v) in &self.rows {
            let _ = writeln!(out, "{c},{v}");
        }
        out.push_str("total");
        for _ in 0..self.arity {
            out.push(',');
        }
        let _ = writeln!(out, "{}", self.total());
        out
    }

    /// Right-aligned columns for reading at a terminal.
    pub fn to_pretty(&self) -> String {
        let header: Vec<String> = (1..=self.arity).map(|i| format!("a{i}")).collect();
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|(c, v)| c.parts().iter().map(ToString::to_string).chain([v.to_string()]).collect())
            .collect();
        let mut widths: Vec<usize> = header.iter().map(String::len).chain(["count".len()]).collect();
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }

        let context = match self.context {
            TableContext::Trees => "trees".to_string(),
            TableContext::Forest { trees } => format!("forests of {trees}"),
        };
        let mut out = format!("t = {}, n = {}, {context}\n", self.arity, self.nodes);
        let line = |cells: &[String], out: &mut String| {
            let joined: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "{}", joined.join("  ").trim_end());
        };
        let mut head = header.clone();
        head.push("count".into());
        line(&head, &mut out);
        for row in &body {
            line(row, &mut out);
        }
        let _ = writeln!(out, "total {}", self.total());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_tables() {
        let table = CountTable::closed_form(3, 2, TableContext::Trees).unwrap();
        assert_eq!(table.rows().len(), 3);
        assert_eq!(table.total(), BigUint::from(3u8));
        assert_eq!(table.to_csv(), "a1,a2,a3,count\n0,0,1,1\n0,1,0,1\n1,0,0,1\ntotal,,,3\n");

        let table = CountTable::closed_form(1, 5, TableContext::Trees).unwrap();
        assert_eq!(table.to_csv(), "a1,count\n4,1\ntotal,1\n");

        let table = CountTable::closed_form(3, 3, TableContext::Forest { trees: 2 }).unwrap();
        assert_eq!(table.total(), BigUint::from(6u8));
    }

    #[test]
    fn rows_strictly_increase() {
        let table = CountTable::closed_form(4, 6, TableContext::Trees).unwrap();
        assert!(table.rows().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn pretty_layout() {
        let table = CountTable::closed_form(2, 3, TableContext::Trees).unwrap();
        assert_eq!(
            table.to_pretty(),
            "t = 2, n = 3, trees\n\
             a1  a2  count\n\
             \x200   2      1\n\
             \x201   1      3\n\
             \x202   0      1\n\
             total 5\n"
        );
    }

    #[test]
    fn closed_form_rejects_bad_shape() {
        assert!(CountTable::closed_form(3, 0, TableContext::Trees).is_err());
        assert!(CountTable::closed_form(17, 2, TableContext::Trees).is_err());
        assert!(CountTable::closed_form(3, 2, TableContext::Forest { trees: 3 }).is_err());
    }
}
