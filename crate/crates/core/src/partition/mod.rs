//! Matrices tiled into positioned blocks, compatibility groups and the
//! four-block case analysis.

mod builders;
mod classify;

pub use builders::{
    example_four_block, grid, hyperplane_split, pinwheel5, three_block, Pinwheel5Sizes,
    ThreeBlockLayout,
};
pub use classify::{fourblock_classify, FourBlockCase, FourBlockLabels};

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

/// A block: sorted row and column index sets of the host.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSpec {
    pub name: String,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl BlockSpec {
    pub fn new(name: impl Into<String>, rows: Vec<usize>, cols: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            rows,
            cols,
        }
    }

    /// Block on the contiguous rectangle `rows x cols`.
    pub fn rect(name: impl Into<String>, rows: Range<usize>, cols: Range<usize>) -> Self {
        Self::new(name, rows.collect(), cols.collect())
    }

    /// `n_k`.
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// `m_k`.
    pub fn m(&self) -> usize {
        self.cols.len()
    }

    pub fn min_row(&self) -> usize {
        self.rows[0]
    }

    pub fn min_col(&self) -> usize {
        self.cols[0]
    }

    pub fn is_contiguous(&self) -> bool {
        contiguous(&self.rows) && contiguous(&self.cols)
    }

    fn transposed(&self) -> Self {
        Self::new(self.name.clone(), self.cols.clone(), self.rows.clone())
    }
}

fn contiguous(idx: &[usize]) -> bool {
    idx.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Why a block family fails to tile its host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TilingViolation {
    NoBlocks,
    EmptyBlock { block: String },
    NotIncreasing { block: String },
    OutOfBounds { block: String, index: usize },
    Uncovered { row: usize, col: usize },
    Overlap { row: usize, col: usize, first: String, second: String },
}

impl fmt::Display for TilingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilingViolation::NoBlocks => write!(f, "partition has no blocks"),
            TilingViolation::EmptyBlock { block } => write!(f, "block {block} has an empty index set"),
            TilingViolation::NotIncreasing { block } => {
                write!(f, "block {block} has index sets that are not strictly increasing")
            }
            TilingViolation::OutOfBounds { block, index } => {
                write!(f, "block {block} uses index {index} outside the host")
            }
            TilingViolation::Uncovered { row, col } => write!(f, "cell ({row}, {col}) is not covered"),
            TilingViolation::Overlap { row, col, first, second } => {
                write!(f, "cell ({row}, {col}) is covered by both {first} and {second}")
            }
        }
    }
}

/// Checks that `blocks` tile the `host_rows x host_cols` grid exactly once.
/// Cells are scanned in row-major order, so the reported cell is the first
/// offending one.
pub fn validate(host_rows: usize, host_cols: usize, blocks: &[BlockSpec]) -> std::result::Result<(), TilingViolation> {
    if blocks.is_empty() {
        return Err(TilingViolation::NoBlocks);
    }
    for b in blocks {
        if b.rows.is_empty() || b.cols.is_empty() {
            return Err(TilingViolation::EmptyBlock { block: b.name.clone() });
        }
        if b.rows.windows(2).any(|w| w[0] >= w[1]) || b.cols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TilingViolation::NotIncreasing { block: b.name.clone() });
        }
        if let Some(&i) = b.rows.last().filter(|&&i| i >= host_rows) {
            return Err(TilingViolation::OutOfBounds { block: b.name.clone(), index: i });
        }
        if let Some(&j) = b.cols.last().filter(|&&j| j >= host_cols) {
            return Err(TilingViolation::OutOfBounds { block: b.name.clone(), index: j });
        }
    }
    // first and second owner of every cell
    let mut owners: Vec<(Option<usize>, Option<usize>)> = vec![(None, None); host_rows * host_cols];
    for (k, b) in blocks.iter().enumerate() {
        for &i in &b.rows {
            for &j in &b.cols {
                let cell = &mut owners[i * host_cols + j];
                if cell.0.is_none() {
                    cell.0 = Some(k);
                } else if cell.1.is_none() {
                    cell.1 = Some(k);
                }
            }
        }
    }
    for (pos, cell) in owners.iter().enumerate() {
        let (row, col) = (pos / host_cols, pos % host_cols);
        match *cell {
            (None, _) => return Err(TilingViolation::Uncovered { row, col }),
            (Some(first), Some(second)) => {
                return Err(TilingViolation::Overlap {
                    row,
                    col,
                    first: blocks[first].name.clone(),
                    second: blocks[second].name.clone(),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

/// A validated tiling. Blocks are kept sorted by `(min row, min col)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionFile", into = "PartitionFile")]
pub struct Partition {
    host_rows: usize,
    host_cols: usize,
    blocks: Vec<BlockSpec>,
}

/// On-disk form: `{"hostRows", "hostCols", "blocks": [{"name", "rows", "cols"}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PartitionFile {
    pub host_rows: usize,
    pub host_cols: usize,
    pub blocks: Vec<BlockSpec>,
}

impl TryFrom<PartitionFile> for Partition {
    type Error = Error;

    fn try_from(f: PartitionFile) -> Result<Self> {
        Partition::new(f.host_rows, f.host_cols, f.blocks)
    }
}

impl From<Partition> for PartitionFile {
    fn from(p: Partition) -> Self {
        PartitionFile {
            host_rows: p.host_rows,
            host_cols: p.host_cols,
            blocks: p.blocks,
        }
    }
}

impl Partition {
    pub fn new(host_rows: usize, host_cols: usize, mut blocks: Vec<BlockSpec>) -> Result<Self> {
        validate(host_rows, host_cols, &blocks).map_err(|v| Error::InvalidPartition(v.to_string()))?;
        blocks.sort_by_key(|b| (b.min_row(), b.min_col()));
        Ok(Self {
            host_rows,
            host_cols,
            blocks,
        })
    }

    /// Blocks named `A`, `B`, ... in sorted order.
    pub fn with_letter_names(host_rows: usize, host_cols: usize, blocks: Vec<(Vec<usize>, Vec<usize>)>) -> Result<Self> {
        let mut p = Self::new(
            host_rows,
            host_cols,
            blocks.into_iter().map(|(r, c)| BlockSpec::new("", r, c)).collect(),
        )?;
        for (k, b) in p.blocks.iter_mut().enumerate() {
            b.name = letter_name(k);
        }
        Ok(p)
    }

    pub fn host_rows(&self) -> usize {
        self.host_rows
    }

    pub fn host_cols(&self) -> usize {
        self.host_cols
    }

    /// `r`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &BlockSpec {
        &self.blocks[k]
    }

    /// `m = sum_k m_k`.
    pub fn total_block_cols(&self) -> usize {
        self.blocks.iter().map(BlockSpec::m).sum()
    }

    pub fn is_contiguous(&self) -> bool {
        self.blocks.iter().all(BlockSpec::is_contiguous)
    }

    pub fn compatibility(&self) -> CompatibilityReport {
        CompatibilityReport {
            column_compatible: pairwise_same_or_disjoint(self.blocks.iter().map(|b| &b.cols)),
            row_compatible: pairwise_same_or_disjoint(self.blocks.iter().map(|b| &b.rows)),
            column_groups: groups(self.blocks.iter().map(|b| &b.cols)),
            row_groups: groups(self.blocks.iter().map(|b| &b.rows)),
        }
    }

    pub fn transpose(&self) -> Partition {
        Partition::new(
            self.host_cols,
            self.host_rows,
            self.blocks.iter().map(BlockSpec::transposed).collect(),
        )
        .expect("transpose of a tiling is a tiling")
    }

    /// Relabels rows and columns by the permutations `row_perm[i]`, `col_perm[j]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Partition> {
        let map = |idx: &[usize], perm: &[usize]| {
            let mut v: Vec<usize> = idx.iter().map(|&i| perm[i]).collect();
            v.sort_unstable();
            v
        };
        Partition::new(
            self.host_rows,
            self.host_cols,
            self.blocks
                .iter()
                .map(|b| BlockSpec::new(b.name.clone(), map(&b.rows, row_perm), map(&b.cols, col_perm)))
                .collect(),
        )
    }

    /// The blocks `keep` re-indexed inside the submatrix on the union of their
    /// rows and columns. Returns the sub-partition with the host row and column
    /// indices it occupies. Fails if the chosen blocks do not tile that union.
    pub fn restrict(&self, keep: &[usize]) -> Result<(Partition, Vec<usize>, Vec<usize>)> {
        let rows: Vec<usize> = keep
            .iter()
            .flat_map(|&k| self.blocks[k].rows.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let cols: Vec<usize> = keep
            .iter()
            .flat_map(|&k| self.blocks[k].cols.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let pos = |set: &[usize], i: usize| set.binary_search(&i).expect("index in union");
        let blocks = keep
            .iter()
            .map(|&k| {
                let b = &self.blocks[k];
                BlockSpec::new(
                    b.name.clone(),
                    b.rows.iter().map(|&i| pos(&rows, i)).collect(),
                    b.cols.iter().map(|&j| pos(&cols, j)).collect(),
                )
            })
            .collect();
        let sub = Partition::new(rows.len(), cols.len(), blocks)?;
        Ok((sub, rows, cols))
    }

    /// Index of the block owning cell `(i, j)`.
    pub fn owner(&self, i: usize, j: usize) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.rows.binary_search(&i).is_ok() && b.cols.binary_search(&j).is_ok())
    }
}

pub(crate) fn letter_name(k: usize) -> String {
    if k < 26 {
        ((b'A' + k as u8) as char).to_string()
    } else {
        format!("A{k}")
    }
}

fn pairwise_same_or_disjoint<'a>(sets: impl Iterator<Item = &'a Vec<usize>> + Clone) -> bool {
    let all: Vec<&Vec<usize>> = sets.collect();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if a != b && !disjoint(a, b) {
                return false;
            }
        }
    }
    true
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

fn groups<'a>(sets: impl Iterator<Item = &'a Vec<usize>>) -> Vec<BlockGroup> {
    let mut out: Vec<BlockGroup> = Vec::new();
    for (k, s) in sets.enumerate() {
        match out.iter_mut().find(|g| &g.indices == s) {
            Some(g) => g.blocks.push(k),
            None => out.push(BlockGroup {
                blocks: vec![k],
                indices: s.clone(),
            }),
        }
    }
    out.sort_by_key(|g| g.indices[0]);
    out
}

/// Blocks sharing one index set: a block column `C_q` or block row `R_q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGroup {
    pub blocks: Vec<usize>,
    /// The shared column (or row) indices.
    pub indices: Vec<usize>,
}

/// Groups are blocks with identical index sets, in increasing order of
/// their leading index; they partition the block list whether or not the
/// partition is compatible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompatibilityReport {
    pub column_compatible: bool,
    pub row_compatible: bool,
    pub column_groups: Vec<BlockGroup>,
    pub row_groups: Vec<BlockGroup>,
}

impl CompatibilityReport {
    pub fn is_compatible(&self) -> bool {
        self.column_compatible || self.row_compatible
    }

    /// `alpha_q`: zero-based position of each group's first block once the
    /// blocks are relabelled group by group.
    pub fn alphas(groups: &[BlockGroup]) -> Vec<usize> {
        groups
            .iter()
            .scan(0, |acc, g| {
                let start = *acc;
                *acc += g.blocks.len();
                Some(start)
            })
            .collect()
    }
}

/// A host matrix with a tiling of its entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionedMatrix {
    matrix: ComplexMatrix,
    partition: Partition,
}

impl PartitionedMatrix {
    pub fn new(matrix: ComplexMatrix, partition: Partition) -> Result<Self> {
        if matrix.shape() != (partition.host_rows, partition.host_cols) {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but the partition host is {}x{}",
                matrix.rows(),
                matrix.cols(),
                partition.host_rows,
                partition.host_cols
            )));
        }
        Ok(Self { matrix, partition })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    /// `A_k` as an `n_k x m_k` matrix.
    pub fn block(&self, k: usize) -> ComplexMatrix {
        let b = &self.partition.blocks[k];
        self.matrix.select(&b.rows, &b.cols)
    }

    pub fn blocks(&self) -> Vec<ComplexMatrix> {
        (0..self.len()).map(|k| self.block(k)).collect()
    }

    /// `A_k` padded with zeros to the host shape.
    pub fn padded_block(&self, k: usize) -> ComplexMatrix {
        let b = &self.partition.blocks[k];
        let mut out = ComplexMatrix::zeros(self.matrix.rows(), self.matrix.cols());
        for &i in &b.rows {
            for &j in &b.cols {
                out[(i, j)] = self.matrix[(i, j)];
            }
        }
        out
    }

    /// `|A|^2 = A* A`.
    pub fn abs_sq(&self) -> ComplexMatrix {
        self.matrix.gram()
    }

    pub fn transpose(&self) -> PartitionedMatrix {
        PartitionedMatrix {
            matrix: ComplexMatrix::from_fn(self.matrix.cols(), self.matrix.rows(), |i, j| self.matrix[(j, i)]),
            partition: self.partition.transpose(),
        }
    }

    /// The sub-partitioned matrix on blocks `keep`; see [`Partition::restrict`].
    pub fn restrict(&self, keep: &[usize]) -> Result<(PartitionedMatrix, Vec<usize>, Vec<usize>)> {
        let (p, rows, cols) = self.partition.restrict(keep)?;
        let m = self.matrix.select(&rows, &cols);
        Ok((PartitionedMatrix::new(m, p)?, rows, cols))
    }

    /// Square host obtained by appending zero rows (or zero columns) to a
    /// rectangular one. Each block touching the last row (column) is
    /// extended by the new zero rows (columns), which keeps the block
    /// absolute values unchanged in the row case and preserves tiling in
    /// both cases.
    pub fn pad_to_square(&self) -> PartitionedMatrix {
        let (d, dp) = self.matrix.shape();
        if d == dp {
            return self.clone();
        }
        let n = d.max(dp);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..d {
            for j in 0..dp {
                m[(i, j)] = self.matrix[(i, j)];
            }
        }
        let blocks = self
            .partition
            .blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                if d < dp && b.rows.last() == Some(&(d - 1)) {
                    b.rows.extend(d..n);
                }
                if dp < d && b.cols.last() == Some(&(dp - 1)) {
                    b.cols.extend(dp..n);
                }
                b
            })
            .collect();
        let partition = Partition::new(n, n, blocks).expect("padding preserves the tiling");
        PartitionedMatrix { matrix: m, partition }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        let singles: Vec<BlockSpec> = (0..4)
            .map(|k| BlockSpec::rect(letter_name(k), k / 2..k / 2 + 1, k % 2..k % 2 + 1))
            .collect();
        assert_eq!(validate(2, 2, &singles), Ok(()));

        let overlap = vec![BlockSpec::rect("A", 0..2, 0..2), BlockSpec::rect("B", 1..2, 1..2)];
        assert_eq!(
            validate(2, 2, &overlap),
            Err(TilingViolation::Overlap { row: 1, col: 1, first: "A".into(), second: "B".into() })
        );
        let gap = vec![BlockSpec::rect("A", 0..1, 0..2)];
        assert_eq!(validate(2, 2, &gap), Err(TilingViolation::Uncovered { row: 1, col: 0 }));
        assert!(validate(2, 2, &[BlockSpec::new("A", vec![1, 0], vec![0, 1])]).is_err());
        assert!(validate(2, 2, &[BlockSpec::new("A", vec![0, 2], vec![0, 1])]).is_err());
    }

    #[test]
    fn overlap_reported_before_later_gap() {
        let blocks = vec![BlockSpec::rect("A", 0..1, 0..2), BlockSpec::rect("B", 0..1, 1..2)];
        assert!(matches!(validate(2, 2, &blocks), Err(TilingViolation::Overlap { row: 0, col: 1, .. })));
    }

    #[test]
    fn example_compatibility() {
        let p = example_four_block();
        let c = p.compatibility();
        assert!(!c.column_compatible && !c.row_compatible);
        let names: Vec<&str> = p.blocks().iter().map(|b| b.name.as_str()).collect();
        assert_eq!(names, ["A", "B", "C", "D"]);
    }

    #[test]
    fn grid_is_compatible_both_ways() {
        let p = grid(&[2, 1, 3], &[1, 4]).unwrap();
        let c = p.compatibility();
        assert!(c.column_compatible && c.row_compatible);
        assert_eq!(c.column_groups.len(), 2);
        assert_eq!(c.row_groups.len(), 3);
        assert_eq!(CompatibilityReport::alphas(&c.column_groups), vec![0, 3]);
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let p = example_four_block();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"hostRows\":5"));
        let q: Partition = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let bad = r#"{"hostRows":2,"hostCols":2,"blocks":[{"name":"A","rows":[0],"cols":[0,1]}]}"#;
        assert!(serde_json::from_str::<Partition>(bad).is_err());
    }

    #[test]
    fn restrict_reindexes() {
        let p = example_four_block();
        let (sub, rows, cols) = p.restrict(&[1, 2, 3]).unwrap();
        assert_eq!(rows, vec![0, 1, 2, 3, 4]);
        assert_eq!(cols, vec![2, 3, 4]);
        assert_eq!(sub.host_cols(), 3);
        assert!(p.restrict(&[0, 2]).is_err());
    }

    #[test]
    fn padding_keeps_tiling() {
        let p = grid(&[1, 2], &[2, 2, 1]).unwrap();
        let pm = PartitionedMatrix::new(ComplexMatrix::from_fn(3, 5, |i, j| C64::new(i as f64, j as f64)), p).unwrap();
        let sq = pm.pad_to_square();
        assert_eq!(sq.matrix().shape(), (5, 5));
        for k in 0..pm.len() {
            assert_eq!(pm.block(k).gram(), sq.block(k).gram());
        }
    }

    use crate::linalg::C64;
}
