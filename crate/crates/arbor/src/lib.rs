//! Exact enumeration of t-ary trees refined by edge type.
//!
//! Every edge of a t-ary tree sits in one of `t` ordered child slots. This
//! crate counts trees, and ordered forests of trees, by how many edges fall
//! in each slot, and checks those counts four independent ways:
//!
//! * [`counting`]: closed-form binomial products on big integers.
//! * [`treebank`]: exhaustive enumeration of concrete trees.
//! * [`series`]: the generating function solved by fixed-point iteration,
//!   and coefficient extraction from an expanded Lagrange product.
//! * [`paths`]: the Łukasiewicz lattice-path encoding, with a probe
//!   comparing down-step residue classes to edge types.
//!
//! ```
//! use arbor::{count_trees, total_trees, TreeCountQuery};
//!
//! // Ternary trees with 4 nodes and one left, one middle and one right edge.
//! let q = TreeCountQuery::new(3, 4, vec![1, 1, 1]).unwrap();
//! assert_eq!(count_trees(&q), 16u32.into());
//! assert_eq!(total_trees(3, 4).unwrap(), 55u32.into());
//! ```

pub mod counting;
pub mod error;
pub mod paths;
pub mod series;
pub mod table;
pub mod treebank;
pub mod verify;

pub use counting::{
    binomial, compositions, count_forests, count_trees, marginal_count, total_forests, total_trees,
    Compositions, EdgeComposition, ForestCountQuery, TreeCountQuery,
};
pub use error::{Error, Result, MAX_ARITY};
pub use paths::{
    path_to_tree, residue_distribution_probe, residue_stats, tree_to_path, LatticePath, ProbeReport,
    ResidueStats, Step, Verdict,
};
pub use series::{lagrange_extract, lagrange_extract_forest, solve_g, MultiSeries, Poly};
pub use table::{CountTable, TableContext};
pub use treebank::{
    census, edge_profile, enumerate_forests, enumerate_trees, forest_census, forest_profile, CensusOptions,
    Forest, TAryTree,
};
pub use verify::{verify, Mode, VerifyOptions, VerifyReport};
