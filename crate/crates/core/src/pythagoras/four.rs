//! Four-block decompositions.
//!
//! Compatible tilings go straight to [`decompose`](super::decompose). An
//! incompatible tiling by four rectangles always has a block spanning the
//! full height or the full width of the host; splitting that block off
//! leaves a two-block compatible partition `K | A'`, and `A'` is a
//! three-block tiling, which is always compatible. The isometries of `A'`
//! are then pushed through the isometry of `A'` in the outer split.

use super::{assemble_compatible, certify, multi_block_diag_split, scatter_rows, Assembly, DecompositionCertificate};
use crate::linalg::ComplexMatrix;
use crate::partition::{fourblock_classify, PartitionedMatrix};
use crate::{Error, Result};

/// Certificate for any four-block tiling by contiguous rectangles (and for
/// compatible non-contiguous ones).
pub fn decompose4(pm: &PartitionedMatrix) -> Result<DecompositionCertificate> {
    if pm.len() != 4 {
        return Err(Error::Classification(format!("expected 4 blocks, got {}", pm.len())));
    }
    let p = pm.partition();
    let case = if p.is_contiguous() {
        Some(fourblock_classify(p)?.case)
    } else {
        None
    };
    let mut assembly = if p.compatibility().is_compatible() {
        let mut a = assemble_compatible(pm)?;
        a.route = format!("compatible-{}", a.route);
        a
    } else if case.is_some() {
        peel(pm)?
    } else {
        return Err(Error::Classification(
            "incompatible four-block partition with non-contiguous index sets".into(),
        ));
    };
    if let Some(c) = case {
        assembly.trail.insert(0, format!("case {c}"));
    }
    certify(pm, assembly, case)
}

/// Splits off a full-height or full-width block and recurses on the rest.
fn peel(pm: &PartitionedMatrix) -> Result<Assembly> {
    if pm.partition().compatibility().is_compatible() {
        return assemble_compatible(pm);
    }
    let p = pm.partition();
    let (d, dp) = pm.matrix().shape();
    let full_height = (0..p.len()).find(|&k| p.block(k).n() == d);
    let full_width = (0..p.len()).find(|&k| p.block(k).m() == dp);
    let (k, tall) = match (full_height, full_width) {
        (Some(k), _) => (k, true),
        (None, Some(k)) => (k, false),
        (None, None) => return Err(Error::Incompatible),
    };
    let rest: Vec<usize> = (0..p.len()).filter(|&j| j != k).collect();
    let (sub, _, sub_cols) = pm.restrict(&rest)?;
    let inner = peel(&sub)?;
    let name = &p.block(k).name;
    let mut isometries = vec![ComplexMatrix::zeros(0, 0); p.len()];
    let mut trail = vec![];

    if tall {
        // K | A' is column compatible: split |A|^2 along [cols(K), cols(A')]
        let k_cols = &p.block(k).cols;
        let order: Vec<usize> = k_cols.iter().chain(sub_cols.iter()).copied().collect();
        let split = multi_block_diag_split(&pm.abs_sq().select(&order, &order), &[k_cols.len(), sub_cols.len()])?;
        let u_k = scatter_rows(&split[0], &order);
        let u_rest = scatter_rows(&split[1], &order);
        isometries[k] = u_k;
        for (pos, &j) in rest.iter().enumerate() {
            isometries[j] = &u_rest * &inner.isometries[pos];
        }
        trail.push(format!("split off full-height {name}, column order {order:?}"));
    } else {
        // K over A' (or under) is row compatible: |A|^2 = |K|^2 + |A'|^2
        isometries[k] = ComplexMatrix::identity(dp);
        for (pos, &j) in rest.iter().enumerate() {
            isometries[j] = inner.isometries[pos].clone();
        }
        trail.push(format!("split off full-width {name}"));
    }
    trail.extend(inner.trail);
    Ok(Assembly {
        isometries,
        route: format!(
            "peel-full-{}:{name}/{}",
            if tall { "height" } else { "width" },
            inner.route
        ),
        trail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{example_four_block, grid, FourBlockCase};
    use crate::pythagoras::decompose;
    use crate::random::{random_four_block, random_matrix, rng};

    #[test]
    fn grid_matches_decompose() {
        let mut r = rng(1);
        let pm = PartitionedMatrix::new(random_matrix(&mut r, 4, 5), grid(&[2, 2], &[3, 2]).unwrap()).unwrap();
        let a = decompose4(&pm).unwrap();
        let b = decompose(&pm).unwrap();
        assert_eq!(a.isometries, b.isometries);
        assert_eq!(a.route, "compatible-column");
        assert_eq!(a.case, Some(FourBlockCase::LevelBNarrowC));
    }

    #[test]
    fn example_matrix() {
        let mut r = rng(2);
        let pm = PartitionedMatrix::new(random_matrix(&mut r, 5, 5), example_four_block()).unwrap();
        let cert = decompose4(&pm).unwrap();
        assert!(cert.route.starts_with("peel-full-height:A"));
        assert!(cert.residual <= 1e-10 * (1.0 + pm.matrix().frobenius_sq()));
    }

    #[test]
    fn all_ones_two_by_two() {
        let pm = PartitionedMatrix::new(ComplexMatrix::from_real(2, 2, &[1.0; 4]).unwrap(), grid(&[1, 1], &[1, 1]).unwrap()).unwrap();
        let cert = decompose4(&pm).unwrap();
        let total: f64 = cert.reassemble(&pm).unwrap().trace().re;
        assert!((total - 4.0).abs() < 1e-14);
    }

    #[test]
    fn every_case_certifies() {
        let mut r = rng(3);
        for case in FourBlockCase::ALL {
            for _ in 0..20 {
                let (d, dp) = (3 + (r.next_u32() % 5) as usize, 3 + (r.next_u32() % 5) as usize);
                let p = random_four_block(&mut r, case, d, dp);
                let (d, dp) = (p.host_rows(), p.host_cols());
                let pm = PartitionedMatrix::new(random_matrix(&mut r, d, dp), p).unwrap();
                let cert = decompose4(&pm).unwrap();
                assert_eq!(cert.case, Some(case));
            }
        }
    }

    use rand::RngCore;
}
