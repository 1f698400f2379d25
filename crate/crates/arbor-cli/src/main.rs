//! `arbor`: exact counts, tables, triangles and cross-verification for
//! t-ary trees refined by edge type.
//!
//! Exit codes: 0 success, 1 invalid input, 2 enumeration budget exceeded,
//! 3 verification failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use arbor::error::check_arity;
use arbor::{
    census, count_forests, count_trees, forest_census, marginal_count, residue_distribution_probe, solve_g,
    total_trees, tree_to_path, verify, CensusOptions, CountTable, EdgeComposition, Error, ForestCountQuery,
    Mode, TableContext, TreeCountQuery, VerifyOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

const EXIT_INVALID: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "arbor", version, about = "Count t-ary trees and forests by edge type")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct Limits {
    /// Maximum number of trees or forests to enumerate.
    #[arg(long, env = "ARBOR_BUDGET", default_value_t = arbor::treebank::DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads for enumeration; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl Limits {
    fn census(self) -> CensusOptions {
        CensusOptions::default().with_budget(self.budget).with_jobs(self.jobs)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableSource {
    /// Closed-form products.
    Formula,
    /// Exhaustive enumeration.
    Census,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TriangleFormat {
    Bfile,
    Triangle,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerifyMode {
    Brute,
    Series,
    Lagrange,
    All,
}

impl From<VerifyMode> for Mode {
    fn from(m: VerifyMode) -> Mode {
        match m {
            VerifyMode::Brute => Mode::Brute,
            VerifyMode::Series => Mode::Series,
            VerifyMode::Lagrange => Mode::Lagrange,
            VerifyMode::All => Mode::All,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact number of trees (or forests) with one edge composition.
    Count {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        /// Edges per slot, e.g. `1,1,1`.
        #[arg(long)]
        composition: EdgeComposition,
        /// Count ordered forests of this many trees instead.
        #[arg(long)]
        forest: Option<usize>,
    },
    /// Counts for every composition.
    Table {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        forest: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        #[arg(long, value_enum, default_value = "formula")]
        source: TableSource,
        #[command(flatten)]
        limits: Limits,
    },
    /// Enumerate every tree (or forest) and tally edge profiles.
    Census {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        forest: Option<usize>,
        /// Print each object's canonical serialization and profile first.
        #[arg(long)]
        dump: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        #[command(flatten)]
        limits: Limits,
    },
    /// Triangle of counts by number of edges in one slot.
    Triangle {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        rows: usize,
        /// Slot whose edge count indexes the columns (1-based).
        #[arg(long)]
        marginal: usize,
        /// First linear index of the b-file.
        #[arg(long, default_value_t = 0)]
        offset: u64,
        #[arg(long, value_enum, default_value = "both")]
        format: TriangleFormat,
        /// Check that every slot yields the same triangle.
        #[arg(long)]
        self_check: bool,
    },
    /// Cross-check the closed forms against independent computations.
    Verify {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_enum, default_value = "all")]
        mode: VerifyMode,
        #[arg(long)]
        forest: Option<usize>,
        /// Write the solved generating function as `n;a1,...,at;coef` lines.
        #[arg(long)]
        dump_series: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Lattice paths of every tree, or the residue-class probe.
    Paths {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        probe: bool,
        /// Show `:slot` labels on each step.
        #[arg(long)]
        labels: bool,
        #[command(flatten)]
        limits: Limits,
    },
}

enum Failure {
    Lib(Error),
    Verify(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Lib(e @ Error::Budget { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_BUDGET)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Verify(out)) => {
            print!("{out}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}

fn context(forest: Option<usize>) -> TableContext {
    match forest {
        Some(trees) => TableContext::Forest { trees },
        None => TableContext::Trees,
    }
}

fn render(table: &CountTable, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => table.to_csv(),
        TableFormat::Pretty => table.to_pretty(),
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Count { t, n, composition, forest } => {
            let count = match forest {
                Some(m) => count_forests(&ForestCountQuery::new(t, m, n, composition)?),
                None => count_trees(&TreeCountQuery::new(t, n, composition)?),
            };
            Ok(format!("{count}\n"))
        }
        Command::Table { t, n, forest, format, source, limits } => {
            let table = match (source, forest) {
                (TableSource::Formula, _) => CountTable::closed_form(t, n, context(forest))?,
                (TableSource::Census, None) => census(t, n, limits.census())?,
                (TableSource::Census, Some(m)) => forest_census(t, m, n, limits.census())?,
            };
            Ok(render(&table, format))
        }
        Command::Census { t, n, forest, dump, format, limits } => {
            let table = match forest {
                None => census(t, n, limits.census())?,
                Some(m) => forest_census(t, m, n, limits.census())?,
            };
            let mut out = String::new();
            if dump {
                match forest {
                    None => {
                        for tree in arbor::enumerate_trees(t, n) {
                            let _ = writeln!(out, "{tree} {}", arbor::edge_profile(&tree));
                        }
                    }
                    Some(m) => {
                        for f in arbor::enumerate_forests(t, m, n)? {
                            let _ = writeln!(out, "{f} {}", arbor::forest_profile(&f));
                        }
                    }
                }
            }
            out.push_str(&render(&table, format));
            Ok(out)
        }
        Command::Triangle { t, rows, marginal, offset, format, self_check } => {
            triangle(t, rows, marginal, offset, format, self_check)
        }
        Command::Verify { t, max_n, mode, forest, dump_series, limits } => {
            let opts = VerifyOptions {
                arity: t,
                max_nodes: max_n,
                mode: mode.into(),
                forest,
                census: limits.census(),
            };
            let report = verify(&opts)?;
            if let Some(path) = dump_series {
                let g = solve_g(t, max_n)?;
                std::fs::write(&path, g.dump())
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            let text = report.to_string();
            if report.all_passed() {
                Ok(text)
            } else {
                Err(Failure::Verify(text))
            }
        }
        Command::Paths { t, n, probe, labels, limits } => {
            if probe {
                let report = residue_distribution_probe(t, n, limits.census())?;
                return Ok(report.to_csv());
            }
            check_arity(t)?;
            let total = total_trees(t, n)?;
            if total > BigUint::from(limits.budget) {
                return Err(Error::Budget { total: total.to_string(), budget: limits.budget }.into());
            }
            let mut out = String::new();
            for tree in arbor::enumerate_trees(t, n) {
                let path = tree_to_path(&tree);
                let text = if labels { path.to_labeled_string() } else { path.to_string() };
                let _ = writeln!(out, "{tree} | {text}");
            }
            Ok(out)
        }
    }
}

fn triangle_rows(t: usize, rows: usize, slot: usize) -> Result<Vec<Vec<BigUint>>, Error> {
    (1..=rows)
        .map(|n| {
            (0..n).map(|k| marginal_count(t, n, &BTreeMap::from([(slot, k)]))).collect::<Result<Vec<_>, _>>()
        })
        .collect()
}

fn triangle(
    t: usize,
    rows: usize,
    slot: usize,
    offset: u64,
    format: TriangleFormat,
    self_check: bool,
) -> Outcome {
    check_arity(t)?;
    if slot == 0 || slot > t {
        return Err(Error::Slot { slot, t }.into());
    }
    let table = triangle_rows(t, rows, slot)?;

    if self_check {
        for other in 1..=t {
            if triangle_rows(t, rows, other)? != table {
                return Err(Failure::Verify(format!(
                    "self-check failed: slot {other} triangle differs from slot {slot}\n"
                )));
            }
        }
        eprintln!("self-check: slots 1..={t} give identical triangles");
    }

    let mut out = String::new();
    let with_headers = matches!(format, TriangleFormat::Both);
    if matches!(format, TriangleFormat::Bfile | TriangleFormat::Both) {
        if with_headers {
            let _ = writeln!(
                out,
                "# b-file: t={t}, slot {slot}, rows n=1..={rows} nodes (= e=0..={} edges), offset {offset}",
                rows.saturating_sub(1)
            );
        }
        let mut index = offset;
        for row in &table {
            for v in row {
                let _ = writeln!(out, "{index} {v}");
                index += 1;
            }
        }
    }
    if matches!(format, TriangleFormat::Triangle | TriangleFormat::Both) {
        if with_headers {
            let _ = writeln!(out, "# triangle: row n nodes, e = n-1 edges; column k = edges in slot {slot}");
        }
        for (i, row) in table.iter().enumerate() {
            let values: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "n={} e={}: {}", i + 1, i, values.join(" "));
        }
    }
    Ok(out)
}
