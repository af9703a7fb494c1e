//! Seeded generators for matrices and partitions. Everything random in the
//! crate flows through [`rng`], so results are reproducible from a seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{orthonormal_with_completion, ComplexMatrix, C64};
use crate::partition::{BlockSpec, FourBlockCase, Partition};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded by `seed`; used for
/// per-restart and per-trial randomness that must not depend on scheduling.
pub fn rng_stream(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Uniform on the closed unit disk.
pub fn random_complex<R: Rng + ?Sized>(r: &mut R) -> C64 {
    let rad = r.gen::<f64>().sqrt();
    let theta = std::f64::consts::TAU * r.gen::<f64>();
    C64::from_polar(rad, theta)
}

/// Entries i.i.d. uniform on the unit disk.
pub fn random_matrix<R: Rng + ?Sized>(r: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(r))
}

/// Product of random `rows x rank` and `rank x cols` factors.
pub fn random_low_rank<R: Rng + ?Sized>(r: &mut R, rows: usize, cols: usize, rank: usize) -> ComplexMatrix {
    &random_matrix(r, rows, rank) * &random_matrix(r, rank, cols)
}

pub fn random_hermitian<R: Rng + ?Sized>(r: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(r, n, n).hermitian_part()
}

/// `X X*` with `X` square random.
pub fn random_psd<R: Rng + ?Sized>(r: &mut R, n: usize) -> ComplexMatrix {
    random_matrix(r, n, n).outer_gram()
}

/// Orthonormalised random columns.
pub fn random_isometry<R: Rng + ?Sized>(r: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "an isometry needs rows >= cols");
    let x = random_matrix(r, rows, cols);
    orthonormal_with_completion(rows, (0..cols).map(|j| Some(x.col(j))).collect())
}

pub fn random_unitary<R: Rng + ?Sized>(r: &mut R, n: usize) -> ComplexMatrix {
    random_isometry(r, n, n)
}

pub fn random_unit_vector<R: Rng + ?Sized>(r: &mut R, n: usize) -> Vec<C64> {
    random_isometry(r, n, 1).col(0)
}

/// Random composition of `total` into `parts` positive sizes.
pub fn random_sizes<R: Rng + ?Sized>(r: &mut R, total: usize, parts: usize) -> Vec<usize> {
    assert!(parts >= 1 && parts <= total);
    let mut cuts: Vec<usize> = (1..total).collect();
    cuts.shuffle(r);
    let mut cuts = cuts[..parts - 1].to_vec();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    out
}

fn ranges(sizes: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    sizes
        .iter()
        .map(|s| {
            let r = start..start + s;
            start += s;
            r
        })
        .collect()
}

/// Column-compatible tiling: columns cut into groups, each group's rows cut
/// independently.
pub fn random_column_compatible<R: Rng + ?Sized>(r: &mut R, d: usize, dp: usize) -> Partition {
    let groups = r.gen_range(1..=dp.min(4));
    let mut blocks = Vec::new();
    for cols in ranges(&random_sizes(r, dp, groups)) {
        let pieces = r.gen_range(1..=d.min(4));
        for rows in ranges(&random_sizes(r, d, pieces)) {
            blocks.push(BlockSpec::rect("", rows, cols.clone()));
        }
    }
    named(d, dp, blocks)
}

pub fn random_row_compatible<R: Rng + ?Sized>(r: &mut R, d: usize, dp: usize) -> Partition {
    random_column_compatible(r, dp, d).transpose()
}

pub fn random_grid<R: Rng + ?Sized>(r: &mut R, d: usize, dp: usize) -> Partition {
    let p = r.gen_range(1..=d.min(4));
    let q = r.gen_range(1..=dp.min(4));
    let col_ranges = ranges(&random_sizes(r, dp, q));
    let mut blocks = Vec::new();
    for rows in ranges(&random_sizes(r, d, p)) {
        for cols in &col_ranges {
            blocks.push(BlockSpec::rect("", rows.clone(), cols.clone()));
        }
    }
    named(d, dp, blocks)
}

/// Row or column compatible (including grids), optionally with scattered
/// index sets obtained by random row and column permutations.
pub fn random_compatible<R: Rng + ?Sized>(r: &mut R, d: usize, dp: usize, scatter: bool) -> Partition {
    let p = match r.gen_range(0..3) {
        0 => random_column_compatible(r, d, dp),
        1 => random_row_compatible(r, d, dp),
        _ => random_grid(r, d, dp),
    };
    if scatter {
        scatter_indices(r, &p)
    } else {
        p
    }
}

pub fn scatter_indices<R: Rng + ?Sized>(r: &mut R, p: &Partition) -> Partition {
    let mut rp: Vec<usize> = (0..p.host_rows()).collect();
    let mut cp: Vec<usize> = (0..p.host_cols()).collect();
    rp.shuffle(r);
    cp.shuffle(r);
    p.permuted(&rp, &cp).expect("permutation preserves the tiling")
}

fn named(d: usize, dp: usize, blocks: Vec<BlockSpec>) -> Partition {
    let raw = blocks.into_iter().map(|b| (b.rows, b.cols)).collect();
    Partition::with_letter_names(d, dp, raw).expect("generator emits tilings")
}

fn cut<R: Rng + ?Sized>(r: &mut R, lo: usize, hi: usize) -> usize {
    r.gen_range(lo..hi)
}

/// A four-block tiling of a `d x d'` host in the given proof case. Needs
/// `d, d' >= 3` (the narrowest cases need three bands in one direction).
pub fn random_four_block<R: Rng + ?Sized>(r: &mut R, case: FourBlockCase, d: usize, dp: usize) -> Partition {
    assert!(d >= 3 && dp >= 3, "four-block generators need hosts of at least 3x3");
    type Rect = (std::ops::Range<usize>, std::ops::Range<usize>);
    let rects: Vec<Rect> = match case {
        FourBlockCase::FullHeightA => {
            let c = cut(r, 1, dp);
            let rest = random_three_rects(r, d, dp - c);
            std::iter::once((0..d, 0..c))
                .chain(rest.into_iter().map(|(rr, cc)| (rr, cc.start + c..cc.end + c)))
                .collect()
        }
        FourBlockCase::FullWidthA => {
            let l = cut(r, 1, d);
            let rest = random_three_rects(r, dp, d - l);
            // generated transposed: rows of `rest` are our columns
            std::iter::once((0..l, 0..dp))
                .chain(rest.into_iter().map(|(cc, rr)| (rr.start + l..rr.end + l, cc)))
                .collect()
        }
        FourBlockCase::ShortB => {
            // B shorter than A; D under B over the same columns; C under A
            let l = cut(r, 2, d);
            let lambda = cut(r, 1, l);
            let c = cut(r, 1, dp);
            if r.gen_bool(0.5) {
                vec![(0..l, 0..c), (0..lambda, c..dp), (lambda..d, c..dp), (l..d, 0..c)]
            } else {
                // D stops at A's bottom edge and C runs the full width:
                // not compatible, although B is still shorter than A
                vec![(0..l, 0..c), (0..lambda, c..dp), (lambda..l, c..dp), (l..d, 0..dp)]
            }
        }
        FourBlockCase::LevelBWideC => {
            // A, B, D on the top band; C full width below
            let l = cut(r, 1, d);
            let c = cut(r, 1, dp - 1);
            let e = cut(r, c + 1, dp);
            vec![(0..l, 0..c), (0..l, c..e), (0..l, e..dp), (l..d, 0..dp)]
        }
        FourBlockCase::LevelBFlushC => {
            // A, B on top, C under both, D full height on the right
            let l = cut(r, 1, d);
            let c = cut(r, 1, dp - 1);
            let e = cut(r, c + 1, dp);
            vec![(0..l, 0..c), (0..l, c..e), (l..d, 0..e), (0..d, e..dp)]
        }
        FourBlockCase::LevelBNarrowC => {
            // A, B on top; C under A, D under B
            let l = cut(r, 1, d);
            let c = cut(r, 1, dp);
            vec![(0..l, 0..c), (0..l, c..dp), (l..d, 0..c), (l..d, c..dp)]
        }
        FourBlockCase::TallB => {
            // B taller than A; C under A; D under B
            let l = cut(r, 1, d - 1);
            let lambda = cut(r, l + 1, d);
            let c = cut(r, 1, dp);
            if r.gen_bool(0.5) {
                vec![(0..l, 0..c), (0..lambda, c..dp), (l..d, 0..c), (lambda..d, c..dp)]
            } else {
                // C stops at B's bottom edge and D runs the full width
                vec![(0..l, 0..c), (0..lambda, c..dp), (l..lambda, 0..c), (lambda..d, 0..dp)]
            }
        }
        FourBlockCase::FullHeightB => {
            // B full height on the right; A, C, D stacked on the left
            let c = cut(r, 1, dp);
            let l = cut(r, 1, d - 1);
            let m = cut(r, l + 1, d);
            vec![(0..l, 0..c), (0..d, c..dp), (l..m, 0..c), (m..d, 0..c)]
        }
    };
    named(d, dp, rects.into_iter().map(|(rr, cc)| BlockSpec::rect("", rr, cc)).collect())
}

/// Three rectangles tiling `d x w`, in one of the six three-block layouts.
fn random_three_rects<R: Rng + ?Sized>(
    r: &mut R,
    d: usize,
    w: usize,
) -> Vec<(std::ops::Range<usize>, std::ops::Range<usize>)> {
    let mut options = Vec::new();
    if d >= 3 {
        options.push(0);
    }
    if w >= 3 {
        options.push(1);
    }
    if d >= 2 && w >= 2 {
        options.extend([2, 3, 4, 5]);
    }
    match *options.choose(r).expect("host too small for three blocks") {
        0 => {
            let x = cut(r, 1, d - 1);
            let y = cut(r, x + 1, d);
            vec![(0..x, 0..w), (x..y, 0..w), (y..d, 0..w)]
        }
        1 => {
            let x = cut(r, 1, w - 1);
            let y = cut(r, x + 1, w);
            vec![(0..d, 0..x), (0..d, x..y), (0..d, y..w)]
        }
        k => {
            let x = cut(r, 1, d);
            let y = cut(r, 1, w);
            match k {
                2 => vec![(0..x, 0..y), (0..x, y..w), (x..d, 0..w)],
                3 => vec![(0..x, 0..w), (x..d, 0..y), (x..d, y..w)],
                4 => vec![(0..x, 0..y), (x..d, 0..y), (0..d, y..w)],
                _ => vec![(0..d, 0..y), (0..x, y..w), (x..d, y..w)],
            }
        }
    }
}
