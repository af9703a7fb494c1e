//! Geometric case analysis of four-block tilings by contiguous rectangles.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Partition;
use crate::{Error, Result};

/// The case of the four-block argument a tiling falls into. `A` is the
/// block at `(0, 0)`, `B` the block just right of `A` on the top row and `C`
/// the block just below `A` on the left edge; `l x c` is the shape of `A`,
/// `lambda x gamma` that of `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FourBlockCase {
    /// `A` spans every row.
    #[serde(rename = "full-height-A")]
    FullHeightA,
    /// `A` spans every column.
    #[serde(rename = "full-width-A")]
    FullWidthA,
    /// `lambda < l`.
    #[serde(rename = "3a")]
    ShortB,
    /// `lambda = l`, `C` wider than `c + gamma`.
    #[serde(rename = "3b-i")]
    LevelBWideC,
    /// `lambda = l`, `C` exactly `c + gamma` wide.
    #[serde(rename = "3b-ii")]
    LevelBFlushC,
    /// `lambda = l`, `C` narrower than `c + gamma`.
    #[serde(rename = "3b-iii")]
    LevelBNarrowC,
    /// `l < lambda < d`.
    #[serde(rename = "3c-iv")]
    TallB,
    /// `lambda = d`.
    #[serde(rename = "3c-v")]
    FullHeightB,
}

impl FourBlockCase {
    pub const ALL: [FourBlockCase; 8] = [
        FourBlockCase::FullHeightA,
        FourBlockCase::FullWidthA,
        FourBlockCase::ShortB,
        FourBlockCase::LevelBWideC,
        FourBlockCase::LevelBFlushC,
        FourBlockCase::LevelBNarrowC,
        FourBlockCase::TallB,
        FourBlockCase::FullHeightB,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FourBlockCase::FullHeightA => "full-height-A",
            FourBlockCase::FullWidthA => "full-width-A",
            FourBlockCase::ShortB => "3a",
            FourBlockCase::LevelBWideC => "3b-i",
            FourBlockCase::LevelBFlushC => "3b-ii",
            FourBlockCase::LevelBNarrowC => "3b-iii",
            FourBlockCase::TallB => "3c-iv",
            FourBlockCase::FullHeightB => "3c-v",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.tag() == tag)
    }
}

impl fmt::Display for FourBlockCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Block indices playing the roles `A`, `B`, `C` in the case analysis.
/// `B` and `C` are absent when `A` spans the full height or width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourBlockLabels {
    pub case: FourBlockCase,
    pub a: usize,
    pub b: Option<usize>,
    pub c: Option<usize>,
}

/// Classifies a four-block tiling by contiguous rectangles.
pub fn fourblock_classify(p: &Partition) -> Result<FourBlockLabels> {
    if p.len() != 4 {
        return Err(Error::Classification(format!("expected 4 blocks, got {}", p.len())));
    }
    if !p.is_contiguous() {
        return Err(Error::Classification(
            "the four-block case analysis needs contiguous index ranges".into(),
        ));
    }
    let (d, dp) = (p.host_rows(), p.host_cols());
    let a = p
        .owner(0, 0)
        .ok_or_else(|| Error::Classification("cell (0, 0) has no owner".into()))?;
    let (l, c) = (p.block(a).n(), p.block(a).m());
    let labels = |case, b, c| Ok(FourBlockLabels { case, a, b, c });
    if l == d {
        return labels(FourBlockCase::FullHeightA, None, None);
    }
    if c == dp {
        return labels(FourBlockCase::FullWidthA, None, None);
    }
    let b = p.owner(0, c).expect("tiling covers the top row");
    let cc = p.owner(l, 0).expect("tiling covers the left column");
    let (lambda, gamma) = (p.block(b).n(), p.block(b).m());
    let c_width = p.block(cc).m();
    let case = if lambda < l {
        FourBlockCase::ShortB
    } else if lambda == l {
        match c_width.cmp(&(c + gamma)) {
            std::cmp::Ordering::Greater => FourBlockCase::LevelBWideC,
            std::cmp::Ordering::Equal => FourBlockCase::LevelBFlushC,
            std::cmp::Ordering::Less => FourBlockCase::LevelBNarrowC,
        }
    } else if lambda < d {
        FourBlockCase::TallB
    } else {
        FourBlockCase::FullHeightB
    };
    labels(case, Some(b), Some(cc))
}
