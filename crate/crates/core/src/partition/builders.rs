//! Standard partition shapes.

use serde::{Deserialize, Serialize};

use super::{letter_name, BlockSpec, Partition};
use crate::{Error, Result};

fn cumulative(sizes: &[usize]) -> Result<Vec<usize>> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidPartition(format!("sizes must be positive, got {sizes:?}")));
    }
    let mut acc = vec![0];
    for s in sizes {
        acc.push(acc.last().unwrap() + s);
    }
    Ok(acc)
}

/// `p x q` grid with block row heights `row_sizes` and block column widths
/// `col_sizes`. Block `(i, j)` is named `A{i}{j}` (one-based).
pub fn grid(row_sizes: &[usize], col_sizes: &[usize]) -> Result<Partition> {
    let rs = cumulative(row_sizes)?;
    let cs = cumulative(col_sizes)?;
    let mut blocks = Vec::new();
    for i in 0..row_sizes.len() {
        for j in 0..col_sizes.len() {
            blocks.push(BlockSpec::rect(format!("A{}{}", i + 1, j + 1), rs[i]..rs[i + 1], cs[j]..cs[j + 1]));
        }
    }
    Partition::new(rs[row_sizes.len()], cs[col_sizes.len()], blocks)
}

/// Three-block layouts: three strips, or two blocks side by side (stacked)
/// next to one spanning block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThreeBlockLayout {
    /// Horizontal strips; cuts are two row indices.
    Rows,
    /// Vertical strips; cuts are two column indices.
    Columns,
    /// Two blocks on top split at `col`, one full-width block below `row`.
    TopSplit,
    /// One full-width block above `row`, two below split at `col`.
    BottomSplit,
    /// Two blocks on the left split at `row`, one full-height block right of `col`.
    LeftSplit,
    /// One full-height block left of `col`, two on the right split at `row`.
    RightSplit,
}

/// Three-block partition of a `d x d'` host. For the strip layouts `cuts`
/// are the two interior cut positions; otherwise `cuts = (row, col)`.
pub fn three_block(layout: ThreeBlockLayout, d: usize, dp: usize, cuts: (usize, usize)) -> Result<Partition> {
    let (x, y) = cuts;
    let bad = || Error::InvalidPartition(format!("cuts {cuts:?} do not fit a {d}x{dp} host for {layout:?}"));
    let rects = match layout {
        ThreeBlockLayout::Rows => {
            if !(0 < x && x < y && y < d) || dp == 0 {
                return Err(bad());
            }
            vec![(0..x, 0..dp), (x..y, 0..dp), (y..d, 0..dp)]
        }
        ThreeBlockLayout::Columns => {
            if !(0 < x && x < y && y < dp) || d == 0 {
                return Err(bad());
            }
            vec![(0..d, 0..x), (0..d, x..y), (0..d, y..dp)]
        }
        _ => {
            if !(0 < x && x < d && 0 < y && y < dp) {
                return Err(bad());
            }
            match layout {
                ThreeBlockLayout::TopSplit => vec![(0..x, 0..y), (0..x, y..dp), (x..d, 0..dp)],
                ThreeBlockLayout::BottomSplit => vec![(0..x, 0..dp), (x..d, 0..y), (x..d, y..dp)],
                ThreeBlockLayout::LeftSplit => vec![(0..x, 0..y), (x..d, 0..y), (0..d, y..dp)],
                ThreeBlockLayout::RightSplit => vec![(0..d, 0..y), (0..x, y..dp), (x..d, y..dp)],
                _ => unreachable!(),
            }
        }
    };
    Partition::new(
        d,
        dp,
        rects
            .into_iter()
            .enumerate()
            .map(|(k, (r, c))| BlockSpec::rect(letter_name(k), r, c))
            .collect(),
    )
}

/// Band sizes of the five-block pinwheel: rows split into top / middle /
/// bottom bands and columns into left / middle / right bands. The middle
/// cell is `X`; `A`, `B`, `C`, `D` wind around it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pinwheel5Sizes {
    pub top: usize,
    pub middle_rows: usize,
    pub bottom: usize,
    pub left: usize,
    pub middle_cols: usize,
    pub right: usize,
}

impl Default for Pinwheel5Sizes {
    /// The 5x5 layout with a 1x1 centre.
    fn default() -> Self {
        Self {
            top: 2,
            middle_rows: 1,
            bottom: 2,
            left: 2,
            middle_cols: 1,
            right: 2,
        }
    }
}

/// Five blocks with no block spanning a full row or column band:
/// `A` top-left (top x (left + middle)), `B` top-right ((top + middle) x right),
/// `C` bottom-right (bottom x (middle + right)), `D` bottom-left
/// ((middle + bottom) x left) and `X` the centre.
pub fn pinwheel5(s: Pinwheel5Sizes) -> Result<Partition> {
    let rs = cumulative(&[s.top, s.middle_rows, s.bottom])?;
    let cs = cumulative(&[s.left, s.middle_cols, s.right])?;
    let (d, dp) = (rs[3], cs[3]);
    Partition::new(
        d,
        dp,
        vec![
            BlockSpec::rect("A", 0..rs[1], 0..cs[2]),
            BlockSpec::rect("B", 0..rs[2], cs[2]..dp),
            BlockSpec::rect("X", rs[1]..rs[2], cs[1]..cs[2]),
            BlockSpec::rect("D", rs[1]..d, 0..cs[1]),
            BlockSpec::rect("C", rs[2]..d, cs[1]..dp),
        ],
    )
}

/// `A_S` (leading `(d-1) x (d-1)`), `B` (last row without the last entry)
/// and `C` (last column).
pub fn hyperplane_split(d: usize) -> Result<Partition> {
    if d < 2 {
        return Err(Error::InvalidPartition(format!("hyperplane split needs d >= 2, got {d}")));
    }
    Partition::new(
        d,
        d,
        vec![
            BlockSpec::rect("A_S", 0..d - 1, 0..d - 1),
            BlockSpec::rect("B", d - 1..d, 0..d - 1),
            BlockSpec::rect("C", 0..d, d - 1..d),
        ],
    )
}

/// The 5x5 four-block example: `A` (5x2) on the left, `B` (2x3) top right,
/// `C` (3x2) and `D` (3x1) below `B`.
pub fn example_four_block() -> Partition {
    Partition::new(
        5,
        5,
        vec![
            BlockSpec::rect("A", 0..5, 0..2),
            BlockSpec::rect("B", 0..2, 2..5),
            BlockSpec::rect("C", 2..5, 2..4),
            BlockSpec::rect("D", 2..5, 4..5),
        ],
    )
    .expect("static layout")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_grid() {
        let p = grid(&[1, 1], &[1, 1]).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.blocks().iter().all(|b| b.n() == 1 && b.m() == 1));
        assert!(grid(&[1, 0], &[1]).is_err());
    }

    #[test]
    fn hyperplane_layout() {
        let p = hyperplane_split(4).unwrap();
        let names: Vec<&str> = p.blocks().iter().map(|b| b.name.as_str()).collect();
        assert_eq!(names, ["A_S", "C", "B"]);
        let c = &p.blocks()[1];
        assert_eq!(c.rows, vec![0, 1, 2, 3]);
        assert_eq!(c.cols, vec![3]);
        assert!(hyperplane_split(1).is_err());
    }

    #[test]
    fn unit_pinwheel_matches_display() {
        let p = pinwheel5(Pinwheel5Sizes::default()).unwrap();
        let expect = ["AAABB", "AAABB", "DDXBB", "DDCCC", "DDCCC"];
        for (i, row) in expect.iter().enumerate() {
            for (j, ch) in row.chars().enumerate() {
                let k = p.owner(i, j).unwrap();
                assert_eq!(p.block(k).name, ch.to_string(), "cell ({i}, {j})");
            }
        }
        let c = p.compatibility();
        assert!(!c.column_compatible && !c.row_compatible);
    }

    #[test]
    fn three_block_layouts_are_compatible() {
        use ThreeBlockLayout::*;
        for layout in [Rows, Columns, TopSplit, BottomSplit, LeftSplit, RightSplit] {
            let p = three_block(layout, 4, 5, (1, 3)).unwrap();
            assert_eq!(p.len(), 3);
            assert!(p.compatibility().is_compatible(), "{layout:?}");
        }
        assert!(three_block(Rows, 4, 5, (3, 1)).is_err());
    }
}
