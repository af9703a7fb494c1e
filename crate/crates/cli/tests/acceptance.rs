//! Acceptance suite. Each test prints one `acceptance N ...: PASS|FAIL` line
//! straight to stderr, so the summary shows up without `--nocapture`.

use std::io::Write as _;
use std::panic::{catch_unwind, UnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use blockpythag::functional::{cor_concave, cor_four2, sharp_constant_check, th_convex, thompson_sum};
use blockpythag::inequalities::{
    check_bhatia_kittaneh, check_compression_drop, check_cor_sing, check_cor_sing_sweep, check_interlacing,
    compress_hyperplane,
};
use blockpythag::io;
use blockpythag::linalg::{abs_value, herm_eig, singular_values};
use blockpythag::partition::{example_four_block, grid, pinwheel5, three_block, FourBlockCase, Pinwheel5Sizes, ThreeBlockLayout};
use blockpythag::pythagoras::{decompose, decompose4, direct_sum_average, majorization_average};
use blockpythag::random::{
    random_compatible, random_four_block, random_grid, random_hermitian, random_low_rank, random_matrix, random_sizes,
    random_unit_vector, random_unitary, rng,
};
use blockpythag::search::{feasibility_search, gradient_check, random_point, run_manifest, Manifest, SearchConfig};
use blockpythag::{BlockSpec, ComplexMatrix, Error, Partition, PartitionedMatrix, ScalarFunction, C64};
use rand::Rng;

fn criterion(n: u32, title: &str, body: impl FnOnce() -> Result<String, String> + UnwindSafe) {
    let start = Instant::now();
    let outcome = catch_unwind(body).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    let line = match &outcome {
        Ok(detail) => format!("acceptance {n:>2} {title}: PASS ({detail}; {secs:.1}s)\n"),
        Err(why) => format!("acceptance {n:>2} {title}: FAIL ({why})\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(why) = outcome {
        panic!("criterion {n} failed: {why}");
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pm(m: ComplexMatrix, p: Partition) -> PartitionedMatrix {
    PartitionedMatrix::new(m, p).expect("shapes agree")
}

fn host_bound(pm: &PartitionedMatrix) -> f64 {
    1e-10 * (1.0 + pm.matrix().frobenius_sq())
}

fn low_rank_or_full<R: Rng>(r: &mut R, d: usize, dp: usize) -> ComplexMatrix {
    let full = d.min(dp);
    if full > 1 && r.gen_bool(0.3) {
        let rank = r.gen_range(0..full);
        random_low_rank(r, d, dp, rank)
    } else {
        random_matrix(r, d, dp)
    }
}

#[test]
fn acceptance_01_pythagorean_certificates() {
    criterion(1, "pythagorean certificates", || {
        let mut r = rng(101);
        let start = Instant::now();
        let (mut worst_res, mut worst_def, mut rect, mut deficient) = (0.0f64, 0.0f64, 0, 0);
        for i in 0..600 {
            let (d, dp) = (r.gen_range(1..=12), r.gen_range(1..=12));
            let p = random_compatible(&mut r, d, dp, i % 2 == 0);
            let m = low_rank_or_full(&mut r, d, dp);
            rect += usize::from(d != dp);
            let x = pm(m, p);
            let rank = singular_values(x.matrix()).unwrap().as_slice().iter().filter(|&&s| s > 1e-12).count();
            deficient += usize::from(rank < d.min(dp));
            let c = decompose(&x).map_err(|e| format!("case {i}: {e}"))?;
            let rel = c.residual / (1.0 + x.matrix().frobenius_sq());
            ensure(c.residual <= host_bound(&x), || format!("case {i}: residual {:.3e}", c.residual))?;
            let def = c.isometry_defects.iter().cloned().fold(0.0, f64::max);
            ensure(def <= 1e-12 * dp as f64, || format!("case {i}: defect {def:.3e}"))?;
            worst_res = worst_res.max(rel);
            worst_def = worst_def.max(def / dp as f64);
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs <= 30.0, || format!("took {secs:.1}s"))?;
        ensure(rect > 0 && deficient > 0, || "generator missed rectangular or rank-deficient hosts".into())?;
        Ok(format!(
            "600 partitions, {rect} rectangular, {deficient} rank-deficient, worst relative residual {worst_res:.1e}, worst defect/d' {worst_def:.1e}"
        ))
    });
}

#[test]
fn acceptance_02_four_block_coverage() {
    criterion(2, "four-block coverage", || {
        let mut r = rng(202);
        let mut seen = Vec::new();
        for case in FourBlockCase::ALL {
            for k in 0..25 {
                let (d, dp) = (r.gen_range(3..=9), r.gen_range(3..=9));
                let p = random_four_block(&mut r, case, d, dp);
                let (d, dp) = (p.host_rows(), p.host_cols());
                let x = pm(low_rank_or_full(&mut r, d, dp), p);
                let c = decompose4(&x).map_err(|e| format!("{case:?} #{k}: {e}"))?;
                ensure(c.case == Some(case), || format!("{case:?} classified as {:?}", c.case))?;
                ensure(c.residual <= host_bound(&x), || format!("{case:?} #{k}: residual {:.3e}", c.residual))?;
                let def = c.isometry_defects.iter().cloned().fold(0.0, f64::max);
                ensure(def <= 1e-12 * dp as f64, || format!("{case:?} #{k}: defect {def:.3e}"))?;
            }
            seen.push(case);
        }
        for s in 0..20 {
            let x = pm(random_matrix(&mut rng(s), 5, 5), example_four_block());
            let c = decompose4(&x).map_err(|e| e.to_string())?;
            ensure(c.residual <= host_bound(&x), || format!("example seed {s}: residual {:.3e}", c.residual))?;
        }
        Ok(format!("{} case tags x 25 instances plus the 5x5 example", seen.len()))
    });
}

/// Compositions of `n` into positive parts.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn starts(parts: &[usize]) -> Vec<usize> {
    parts
        .iter()
        .scan(0, |acc, &p| {
            let s = *acc;
            *acc += p;
            Some(s)
        })
        .collect()
}

/// Every contiguous column compatible tiling of `d x dp`: block columns of
/// the given widths, each cut independently into row bands. With
/// `transpose` the roles swap and the tilings are row compatible.
fn contiguous_tilings(d: usize, dp: usize, transpose: bool) -> Vec<Partition> {
    let (outer, inner) = if transpose { (d, dp) } else { (dp, d) };
    let mut out = Vec::new();
    let comps = compositions(inner);
    for widths in compositions(outer) {
        let w0 = starts(&widths);
        // one composition index per block column
        let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in &widths {
            choices = choices
                .iter()
                .flat_map(|prefix| {
                    (0..comps.len()).map(move |ci| {
                        let mut v = prefix.clone();
                        v.push(ci);
                        v
                    })
                })
                .collect();
        }
        for choice in choices {
            let mut blocks = Vec::new();
            for (q, &ci) in choice.iter().enumerate() {
                let heights = &comps[ci];
                for (l, (&h0, &h)) in starts(heights).iter().zip(heights).enumerate() {
                    let name = format!("B{q}_{l}");
                    let band = h0..h0 + h;
                    let slab = w0[q]..w0[q] + widths[q];
                    blocks.push(if transpose {
                        BlockSpec::rect(name, slab, band)
                    } else {
                        BlockSpec::rect(name, band, slab)
                    });
                }
            }
            out.push(Partition::new(d, dp, blocks).expect("tiling"));
        }
    }
    out
}

#[test]
fn acceptance_03_singular_value_sweep() {
    criterion(3, "singular value inequality sweep", || {
        let mut r = rng(303);
        let mut worst = f64::INFINITY;
        let mut tilings = 0;
        for d in 1..=4 {
            for dp in 1..=4 {
                for transpose in [false, true] {
                    for p in contiguous_tilings(d, dp, transpose) {
                        let x = pm(low_rank_or_full(&mut r, d, dp), p);
                        let rep = check_cor_sing_sweep(&x, 3).map_err(|e| e.to_string())?;
                        ensure(rep.hypothesis, || "enumerated tiling not compatible".into())?;
                        ensure(rep.pass, || format!("margin {:.3e} on {:?}", rep.min_margin, x.partition()))?;
                        worst = worst.min(rep.min_margin);
                        tilings += 1;
                    }
                }
            }
        }
        let mut sampled = 0;
        for i in 0..1500 {
            let (d, dp) = (r.gen_range(1..=6), r.gen_range(1..=6));
            let p = random_compatible(&mut r, d, dp, i % 3 != 0);
            let x = pm(low_rank_or_full(&mut r, d, dp), p);
            let rep = check_cor_sing_sweep(&x, 3).map_err(|e| e.to_string())?;
            ensure(rep.pass, || format!("sampled {i}: margin {:.3e}", rep.min_margin))?;
            worst = worst.min(rep.min_margin);
            sampled += 1;
        }
        // mu_4^2(A) <= mu_3^2(A) + mu_2^2(B) + mu_1^2(C) on three-block tilings
        let layouts = [
            ThreeBlockLayout::TopSplit,
            ThreeBlockLayout::BottomSplit,
            ThreeBlockLayout::LeftSplit,
            ThreeBlockLayout::RightSplit,
        ];
        for layout in layouts {
            for s in 0..20 {
                let mut rs = rng(3000 + s);
                let (d, dp) = (rs.gen_range(4..=8), rs.gen_range(4..=8));
                let cuts = (rs.gen_range(1..d), rs.gen_range(1..dp));
                let x = pm(random_matrix(&mut rs, d, dp), three_block(layout, d, dp, cuts).unwrap());
                let rep = check_cor_sing(&x, &[2, 1, 0]).map_err(|e| e.to_string())?;
                ensure(rep.pass, || format!("J = [2, 1, 0] on {layout:?}: {:.3e}", rep.min_margin))?;
                worst = worst.min(rep.min_margin);
            }
        }
        ensure(worst >= -1e-9, || format!("worst margin {worst:.3e}"))?;
        Ok(format!(
            "{tilings} contiguous tilings up to 4x4, {sampled} sampled up to 6x6, J = [2, 1, 0] on 3-block layouts, worst relative margin {worst:.2e}"
        ))
    });
}

#[test]
fn acceptance_04_bhatia_kittaneh() {
    criterion(4, "Schatten norm bounds", || {
        let mut r = rng(404);
        let mut worst = f64::INFINITY;
        let mut q2 = 0.0f64;
        for i in 0..200 {
            let (d, dp) = (r.gen_range(2..=8), r.gen_range(2..=8));
            let x = pm(random_matrix(&mut r, d, dp), random_grid(&mut r, d, dp));
            for q in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0] {
                let rep = check_bhatia_kittaneh(&x, q).map_err(|e| e.to_string())?;
                ensure(rep.margins.len() == 2 && rep.pass, || format!("grid {i}, q={q}: {:.3e}", rep.min_margin))?;
                worst = worst.min(rep.min_margin);
                if q == 2.0 {
                    let upper = rep.margins.iter().find(|m| m.label == "upper").unwrap();
                    q2 = q2.max(upper.value.abs());
                }
            }
        }
        ensure(q2 <= 1e-12, || format!("q=2 equality off by {q2:.3e}"))?;
        Ok(format!("200 grids x 7 exponents, worst margin {worst:.2e}, q=2 equality within {q2:.1e}"))
    });
}

#[test]
fn acceptance_05_hyperplane_suite() {
    criterion(5, "hyperplane compressions", || {
        let mut r = rng(505);
        let mut worst = f64::INFINITY;
        for i in 0..200 {
            let d = r.gen_range(2..=9);
            let a = random_matrix(&mut r, d, d);
            let h = random_unit_vector(&mut r, d);
            for rep in [check_interlacing(&a, &h, false), check_compression_drop(&a, &h)] {
                let rep = rep.map_err(|e| e.to_string())?;
                ensure(rep.pass, || format!("pair {i}: {} margin {:.3e}", rep.name, rep.min_margin))?;
                worst = worst.min(rep.min_margin);
            }
            let herm = random_hermitian(&mut r, d);
            let rep = check_interlacing(&herm, &h, true).map_err(|e| e.to_string())?;
            ensure(rep.hypothesis && rep.pass, || format!("normal pair {i}: {:.3e}", rep.min_margin))?;
            worst = worst.min(rep.min_margin);
        }
        let mut dev = 0.0f64;
        for i in 0..50 {
            let d = 3 + i % 6;
            let v = random_unitary(&mut r, d);
            let h = random_unit_vector(&mut r, d);
            let c = compress_hyperplane(&v, &h).map_err(|e| e.to_string())?;
            let s = singular_values(&c.matrix).unwrap();
            for j in 1..=d - 2 {
                dev = dev.max((s.mu(j) - 1.0).abs());
            }
            let vh: C64 = h.iter().enumerate().map(|(k, hk)| hk.conj() * (0..d).map(|l| v[(k, l)] * h[l]).sum::<C64>()).sum();
            dev = dev.max((s.mu(d - 1) - vh.norm()).abs());
            let rep = check_interlacing(&v, &h, true).map_err(|e| e.to_string())?;
            ensure(rep.pass, || format!("unitary {i}: {:.3e}", rep.min_margin))?;
        }
        ensure(dev <= 1e-9, || format!("unitary sharpness off by {dev:.3e}"))?;
        Ok(format!("200 pairs, worst margin {worst:.2e}; 50 unitaries d=3..8 reproduce the sharp case within {dev:.1e}"))
    });
}

fn pinching(b: &ComplexMatrix, sizes: &[usize]) -> ComplexMatrix {
    let label: Vec<usize> = sizes.iter().enumerate().flat_map(|(k, &m)| std::iter::repeat(k).take(m)).collect();
    ComplexMatrix::from_fn(b.rows(), b.cols(), |i, j| if label[i] == label[j] { b[(i, j)] } else { C64::new(0.0, 0.0) })
}

#[test]
fn acceptance_06_averaging_certificates() {
    criterion(6, "averaging certificates", || {
        let mut r = rng(606);
        let mut worst_avg = 0.0f64;
        for i in 0..100 {
            let (d, dp) = (r.gen_range(1..=8), r.gen_range(1..=8));
            let x = pm(random_matrix(&mut r, d, dp), random_compatible(&mut r, d, dp, true));
            let cert = decompose(&x).map_err(|e| e.to_string())?;
            let avg = direct_sum_average(&x, &cert).map_err(|e| format!("partition {i}: {e}"))?;
            ensure(avg.residual <= host_bound(&x), || format!("partition {i}: {:.3e}", avg.residual))?;
            ensure(avg.isometries.len() == x.len(), || format!("partition {i}: {} isometries", avg.isometries.len()))?;
            worst_avg = worst_avg.max(avg.residual / (1.0 + x.matrix().frobenius_sq()));
        }
        let mut worst_maj = 0.0f64;
        for i in 0..100 {
            let n = r.gen_range(1..=8);
            let b = random_hermitian(&mut r, n);
            let parts = r.gen_range(1..=n);
            let a = pinching(&b, &random_sizes(&mut r, n, parts));
            let cert = majorization_average(&a, &b).map_err(|e| format!("pair {i}: {e}"))?;
            ensure(cert.unitaries.len() == n, || format!("pair {i}: {} unitaries for n={n}", cert.unitaries.len()))?;
            let bound = 1e-10 * (1.0 + b.frobenius());
            ensure(cert.residual <= bound, || format!("pair {i}: residual {:.3e}", cert.residual))?;
            worst_maj = worst_maj.max(cert.residual / (1.0 + b.frobenius()));
        }
        Ok(format!("direct sums worst {worst_avg:.1e}, majorization worst {worst_maj:.1e} with n unitaries"))
    });
}

fn compatible<R: Rng>(r: &mut R) -> PartitionedMatrix {
    let (d, dp) = (r.gen_range(1..=8), r.gen_range(1..=8));
    pm(random_matrix(r, d, dp), random_compatible(r, d, dp, true))
}

#[test]
fn acceptance_07_functional_certificates() {
    criterion(7, "functional certificates", || {
        let mut r = rng(707);
        let mut search_failures = 0;
        let mut worst = f64::INFINITY;
        let mut record = |name: &str, i: usize, res: blockpythag::Result<blockpythag::functional::FunctionalCertificate>| -> Result<(), String> {
            match res {
                Ok(c) => {
                    worst = worst.min(c.loewner_margin);
                    ensure(c.loewner_margin >= -1e-8, || format!("{name} #{i}: margin {:.3e}", c.loewner_margin))
                }
                Err(Error::SearchFailure { .. }) => {
                    search_failures += 1;
                    Ok(())
                }
                Err(e) => Err(format!("{name} #{i}: {e}")),
            }
        };
        for i in 0..100 {
            record("thompson", i, thompson_sum(&compatible(&mut r)))?;
        }
        for p in [2.5, 3.0, 4.0] {
            let psi = ScalarFunction::power(p);
            for i in 0..100 {
                record(&format!("th-convex p={p}"), i, th_convex(&compatible(&mut r), &psi))?;
            }
        }
        for q in [0.5, 1.0, 1.5] {
            let phi = ScalarFunction::power(q);
            for i in 0..100 {
                record(&format!("cor-concave q={q}"), i, cor_concave(&compatible(&mut r), &phi))?;
            }
        }
        let affine: ScalarFunction = "affine:a=1,b=1".parse().unwrap();
        for i in 0..100 {
            let d = r.gen_range(1..=8);
            let x = pm(random_matrix(&mut r, d, d), random_compatible(&mut r, d, d, true));
            record("cor-concave 1+t", i, cor_concave(&x, &affine))?;
        }
        for p in [1.0, 3.0] {
            for i in 0..100 {
                let case = FourBlockCase::ALL[i % 8];
                let part = if i % 5 == 0 {
                    grid(&[1 + i % 3, 2], &[2, 1 + i % 4]).unwrap()
                } else {
                    let (d, dp) = (r.gen_range(3..=8), r.gen_range(3..=8));
                    random_four_block(&mut r, case, d, dp)
                };
                let (d, dp) = (part.host_rows(), part.host_cols());
                if d > 8 || dp > 8 {
                    continue;
                }
                let x = pm(random_matrix(&mut r, d, dp), part);
                record(&format!("cor-four2 p={p}"), i, cor_four2(&x, p))?;
            }
        }
        ensure(search_failures == 0, || format!("{search_failures} SEARCH-FAILURE results"))?;
        Ok(format!("9 suites of 100, worst Loewner margin {worst:.2e}, 0 search failures"))
    });
}

#[test]
fn acceptance_08_sharpness_anchors() {
    criterion(8, "sharpness anchors", || {
        let mut detail = Vec::new();
        for r in [3, 2] {
            let rep = sharp_constant_check(r).map_err(|e| e.to_string())?;
            let res = rep.parameters["residual"].as_f64().unwrap();
            ensure(rep.pass && res <= 1e-12, || format!("r={r}: residual {res:.3e}"))?;
            detail.push(format!("sqrt({r}) residual {res:.1e}"));
        }
        let ones = ComplexMatrix::from_real(2, 2, &[1.0; 4]).unwrap();
        let x = pm(ones, grid(&[1, 1], &[1, 1]).unwrap());
        let c = cor_four2(&x, 1.0).map_err(|e| e.to_string())?;
        ensure((c.constant - 2.0).abs() < 1e-15, || format!("constant {}", c.constant))?;
        let terms: Vec<ComplexMatrix> = x.blocks().iter().map(|a| abs_value(a).unwrap()).collect();
        let sum = c.witness_sum(&terms).unwrap();
        let lhs = abs_value(x.matrix()).unwrap().scale(2.0);
        let res = (&lhs - &sum).frobenius();
        ensure(res <= 1e-12, || format!("constant-2 residual {res:.3e}"))?;
        // no smaller constant: traces already agree
        let gap = herm_eig(&(&lhs.scale(0.999) - &sum)).unwrap().min();
        ensure(gap < 0.0, || "a smaller constant would still hold".into())?;
        detail.push(format!("constant 2 residual {res:.1e}"));
        Ok(detail.join(", "))
    });
}

fn pinwheel_manifest() -> Manifest {
    Manifest {
        name: "pinwheel".into(),
        partition: pinwheel5(Pinwheel5Sizes::default()).unwrap(),
        seeds: (0..8).collect(),
        search: SearchConfig {
            iterations: 150,
            restarts: 4,
            ..SearchConfig::default()
        },
    }
}

#[test]
fn acceptance_09_optimizer_sanity() {
    criterion(9, "optimizer sanity", || {
        let mut r = rng(909);
        let mut worst_fd = 0.0f64;
        for i in 0..50 {
            // with d' = 1 the objective vanishes identically
            let (d, dp) = (r.gen_range(1..=6), r.gen_range(2..=6));
            let p = if i % 5 == 0 { pinwheel5(Pinwheel5Sizes::default()).unwrap() } else { random_compatible(&mut r, d, dp, true) };
            let x = pm(random_matrix(&mut r, p.host_rows(), p.host_cols()), p);
            let point = random_point(&x, &mut r);
            let dir: Vec<ComplexMatrix> = point.iter().map(|u| random_matrix(&mut r, u.rows(), u.cols())).collect();
            let g = gradient_check(&x, &point, &dir, 1e-5);
            worst_fd = worst_fd.max(g.relative_error);
        }
        ensure(worst_fd <= 1e-6, || format!("finite differences off by {worst_fd:.3e}"))?;
        let mut worst_res = 0.0f64;
        let mut runs = 0;
        for i in 0..40u64 {
            let (d, dp) = (r.gen_range(1..=6), r.gen_range(1..=6));
            let x = pm(random_matrix(&mut r, d, dp), random_compatible(&mut r, d, dp, true));
            let cfg = SearchConfig {
                seed: i,
                ..SearchConfig::default()
            };
            let res = feasibility_search(&x, &cfg).map_err(|e| e.to_string())?;
            ensure(res.best_residual <= 1e-6, || format!("cold start {i} ({d}x{dp}, r={}): {:.3e}", x.len(), res.best_residual))?;
            worst_res = worst_res.max(res.best_residual);
            runs += 1;
        }
        let m = pinwheel_manifest();
        let a = io::to_json(&run_manifest(&m).map_err(|e| e.to_string())?).unwrap();
        let b = io::to_json(&run_manifest(&m).map_err(|e| e.to_string())?).unwrap();
        ensure(a == b, || "pinwheel manifest rerun differs".into())?;
        Ok(format!(
            "gradient error {worst_fd:.1e} at 50 points, {runs} cold starts worst residual {worst_res:.1e}, manifest rerun identical"
        ))
    });
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_blockpythag")).args(args).output().expect("binary runs")
}

#[test]
fn acceptance_10_cli_contract() {
    criterion(10, "cli contract", || {
        let dir = tempfile::tempdir().unwrap();
        let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
        let mut r = rng(1010);

        let m = random_matrix(&mut r, 5, 5);
        io::write_matrix(path("m.json"), &m).unwrap();
        ensure(io::read_matrix(path("m.json")).unwrap() == m, || "matrix round trip".into())?;
        let parts = [grid(&[2, 3], &[2, 3]).unwrap(), example_four_block(), pinwheel5(Pinwheel5Sizes::default()).unwrap()];
        for (k, p) in parts.iter().enumerate() {
            let f = path(&format!("p{k}.json"));
            io::write_partition(&f, p).unwrap();
            ensure(&io::read_partition(&f).unwrap() == p, || format!("partition {k} round trip"))?;
        }
        let man = pinwheel_manifest();
        io::write_json(path("man.json"), &man).unwrap();
        ensure(io::read_manifest(path("man.json")).unwrap() == man, || "manifest round trip".into())?;
        let cert = decompose(&pm(m.clone(), parts[0].clone())).unwrap();
        io::write_json(path("cert.json"), &cert).unwrap();
        let back: blockpythag::pythagoras::DecompositionCertificate = io::read_json(path("cert.json")).unwrap();
        ensure(back == cert, || "certificate round trip".into())?;

        let h = ComplexMatrix::column(&random_unit_vector(&mut r, 5));
        io::write_matrix(path("h.json"), &h).unwrap();
        io::write_matrix(path("bad_h.json"), &h.scale(2.0)).unwrap();
        std::fs::write(path("broken.json"), "{\"rows\":").unwrap();

        let (mf, g, four, pin) = (path("m.json"), path("p0.json"), path("p1.json"), path("p2.json"));
        let (hf, manf) = (path("h.json"), path("man.json"));
        let stable: Vec<Vec<&str>> = vec![
            vec!["decompose", "--matrix", &mf, "--partition", &g],
            vec!["decompose", "--matrix", &mf, "--partition", &four, "--four"],
            vec!["verify", "--partition", &pin],
            vec!["verify", "--matrix", &mf, "--partition", &g, "--suite", "all"],
            vec!["compress", "--matrix", &mf, "--h", &hf],
            vec!["functional", "--matrix", &mf, "--partition", &g, "--psi", "pow:p=3"],
            vec!["search", "--manifest", &manf],
        ];
        for args in &stable {
            let a = bin(args);
            let b = bin(args);
            ensure(a.status.code() == Some(0), || format!("{args:?}: {}", String::from_utf8_lossy(&a.stderr)))?;
            ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || format!("{args:?} not byte-stable"))?;
        }

        let missing = path("absent.json");
        let (broken, bad_h) = (path("broken.json"), path("bad_h.json"));
        let codes: Vec<(Vec<&str>, i32)> = vec![
            (vec!["decompose", "--matrix", &mf, "--partition", &four], 2),
            (vec!["decompose", "--matrix", &mf, "--partition", &pin], 2),
            (vec!["decompose", "--matrix", &mf, "--partition", &g, "--tol", "0"], 3),
            (vec!["decompose", "--matrix", &broken, "--partition", &g], 1),
            (vec!["decompose", "--matrix", &missing, "--partition", &g], 1),
            (vec!["compress", "--matrix", &mf, "--h", &bad_h], 1),
            (vec!["functional", "--matrix", &mf, "--partition", &g, "--phi", "pow:q=3"], 1),
            (vec!["functional", "--matrix", &mf, "--partition", &g, "--psi", "bogus"], 1),
            (vec!["search", "--manifest", &missing], 1),
            (vec!["nonsense"], 1),
        ];
        for (args, want) in &codes {
            let out = bin(args);
            ensure(out.status.code() == Some(*want), || format!("{args:?}: exit {:?}, want {want}", out.status.code()))?;
        }
        ensure(Path::new(&path("cert.json")).exists(), || "certificate missing".into())?;
        Ok(format!("4 file types round-trip, {} commands byte-stable, {} exit codes", stable.len(), codes.len()))
    });
}
