//! Acceptance gate. Each test is one go/no-go criterion and prints a single
//! PASS/FAIL line; run `cargo test --test acceptance -- --nocapture` to see
//! them all at once.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::panic::UnwindSafe;
use std::process::Command;
use std::time::Instant;

use cyclink_core::exact::{rat, Rat};
use cyclink_core::family::{make_member, CyclicFamilySpec};
use cyclink_core::sampler::{self, LinkSample};
use cyclink_core::transversal::{self, GermMethod};
use cyclink_core::{linalg, rng, torusmap, weights, Tolerances, C64};

fn criterion<F: FnOnce() + UnwindSafe>(num: u32, label: &str, body: F) {
    match std::panic::catch_unwind(body) {
        Ok(()) => println!("criterion {num:02} ({label}): PASS"),
        Err(e) => {
            println!("criterion {num:02} ({label}): FAIL");
            std::panic::resume_unwind(e);
        }
    }
}

fn spec3() -> CyclicFamilySpec {
    CyclicFamilySpec::new(vec![2, 2, 2], vec![1, 1, 1]).unwrap()
}

fn abs_rat(v: &Rat) -> Rat {
    if *v < rat(0, 1) {
        -v.clone()
    } else {
        v.clone()
    }
}

/// Integer draws: `lo..=hi` uniformly.
fn draw(rg: &mut rand_chacha::ChaCha8Rng, lo: u32, hi: u32) -> u32 {
    lo + (rng::unit_f64(rg) * (hi - lo + 1) as f64) as u32
}

#[test]
fn criterion_01_torus_map_golden_matrix() {
    criterion(1, "exact torus map exponents", || {
        let start = Instant::now();
        let member = make_member(&spec3(), 0.0).unwrap();
        let map = torusmap::build_torus_map(member.poly()).unwrap();
        let golden = [[17i64, -4, 2], [2, 17, -4], [-4, 2, 17]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(map.exponents()[i][j], rat(golden[i][j], 9), "entry ({i}, {j})");
            }
        }
        assert!(start.elapsed().as_secs_f64() < 1.0, "took {:?}", start.elapsed());
    });
}

#[test]
fn criterion_02_weight_exactness() {
    criterion(2, "polar weights exact and homogeneous", || {
        let spec = spec3();
        for &t in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let member = make_member(&spec, t).unwrap();
            let w = weights::polar_weight(member.poly()).unwrap();
            assert_eq!(w.weights, vec![1, 1, 1], "weights at t = {t}");
            assert_eq!(w.degree, 3, "degree at t = {t}");
            for j in 0..3 {
                assert_eq!(spec.a()[j] as i64 * w.weights[j] + w.weights[(j + 1) % 3], w.degree);
            }
            let worst = weights::check_polar_homogeneity(member.poly(), &w, 100, 4207);
            assert!(worst <= 1e-12, "homogeneity residual {worst:.3e} at t = {t}");
        }
    });
}

#[test]
fn criterion_03_determinant_identity() {
    criterion(3, "closed-form band determinant", || {
        let start = Instant::now();
        for k in 0..1000u64 {
            let mut rg = rng::stream(30_003, k);
            let n = draw(&mut rg, 2, 8) as usize;
            let a: Vec<u32> = (0..n).map(|_| draw(&mut rg, 1, 4)).collect();
            let b: Vec<u32> = (0..n).map(|_| draw(&mut rg, 0, 3)).collect();
            // The identity is pure band algebra; the family assumptions are
            // not needed for it.
            let spec = CyclicFamilySpec::new_relaxed(a, b).unwrap();
            let t = rng::uniform(&mut rg, 1e-6, 1.0 - 1e-6);
            let radii: Vec<f64> = (0..n).map(|_| rng::uniform(&mut rg, 0.5, 2.0)).collect();
            let m: Vec<f64> = (0..n)
                .map(|j| {
                    let wj = rng::uniform(&mut rg, 0.0, 2.0);
                    (wj * wj).powi(spec.b()[j] as i32)
                })
                .collect();
            let pj = transversal::phi_jacobian(&spec, t, &m, &radii);
            let closed = transversal::det_closed_form(&pj);
            let lu = linalg::lu_det(pj.a_dense());
            let scale = transversal::det_scale(&pj).max(1.0);
            assert!(
                (closed - lu).abs() <= 1e-10 * scale,
                "instance {k}: n = {n}, closed {closed:.6e}, lu {lu:.6e}"
            );
        }
        assert!(start.elapsed().as_secs_f64() < 10.0, "took {:?}", start.elapsed());
    });
}

#[test]
fn criterion_04_base_point_positivity() {
    criterion(4, "base-point determinant positivity", || {
        for k in 0..1000u64 {
            let mut rg = rng::stream(40_004, k);
            let spec = loop {
                let n = draw(&mut rg, 2, 8) as usize;
                let a: Vec<u32> = (0..n).map(|_| draw(&mut rg, 1, 4)).collect();
                let b: Vec<u32> = (0..n).map(|_| draw(&mut rg, 0, 3)).collect();
                if let Ok(s) = CyclicFamilySpec::new(a, b) {
                    break s;
                }
            };
            let t = match k % 10 {
                0 => 0.0,
                1 => 1.0,
                _ => rng::unit_f64(&mut rg),
            };
            // Nullity-free moduli in (0, 2].
            let m: Vec<f64> = (0..spec.n())
                .map(|j| {
                    let wj = rng::uniform(&mut rg, 1e-3, 2.0);
                    (wj * wj).powi(spec.b()[j] as i32)
                })
                .collect();
            let det = transversal::check_det(&transversal::matrix_a(&spec, t, &m))
                .unwrap_or_else(|e| panic!("instance {k}: {e}"));
            assert!(det > 0.0, "instance {k}: det {det:.6e}");
        }
    });
}

#[test]
fn criterion_05_certification_sweep() {
    criterion(5, "full certification sweep", || {
        let start = Instant::now();
        let spec = spec3();
        let t_grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let r_list = vec![0.5, 1.0, 2.0];
        let tol = Tolerances::default();
        let cert = transversal::certify(&spec, &t_grid, &r_list, 50, 50_005, &tol).unwrap();
        assert!(cert.summary.records > 0);
        for cell in &cert.cells {
            assert!(
                cell.records.len() >= 50,
                "cell t = {}, r = {} has only {} records",
                cell.t,
                cell.r,
                cell.records.len()
            );
            // For this spec the three pair strata are feasible and must all
            // show up; the single-coordinate strata leave one surviving term
            // and are rejected as structurally infeasible.
            for pair in [[0usize, 1], [0, 2], [1, 2]] {
                assert!(
                    cell.records.iter().any(|rec| rec.nullity == pair),
                    "missing nullity pattern {pair:?} in cell t = {}, r = {}",
                    cell.t,
                    cell.r
                );
            }
            assert_eq!(cell.infeasible_patterns, vec![vec![0], vec![1], vec![2]]);
            for rec in &cell.records {
                assert!(
                    rec.direct_pass,
                    "direct check failed at t = {}, r = {}, nullity {:?}",
                    rec.t, rec.r, rec.nullity
                );
                assert_eq!(
                    rec.constructive_pass,
                    Some(true),
                    "germ failed at t = {}, r = {}, nullity {:?}",
                    rec.t,
                    rec.r,
                    rec.nullity
                );
            }
        }
        assert_eq!(cert.summary.disagreements, 0);
        assert!(cert.summary.all_pass && !cert.summary.vacuous);
        assert!(start.elapsed().as_secs_f64() < 300.0, "took {:?}", start.elapsed());
    });
}

#[test]
fn criterion_06_case1_worked_point() {
    criterion(6, "case-1 germ at the hand-worked root", || {
        let member = make_member(&spec3(), 0.5).unwrap();
        let omega = C64::from_polar(1.0, TAU / 3.0);
        let sample = LinkSample {
            t: 0.5,
            r: 3f64.sqrt(),
            w: vec![C64::new(1.0, 0.0), omega, omega],
            nullity: BTreeSet::new(),
            residual_f: 0.0,
            residual_r: 0.0,
        };
        let germ = transversal::tangent_case1(&member, &sample).unwrap();
        assert_eq!(germ.method, GermMethod::LinearSolve);
        for j in 0..3 {
            assert!(
                (germ.dr_ds[j] - 0.25).abs() <= 1e-10,
                "dr_ds[{j}] = {:.17}",
                germ.dr_ds[j]
            );
        }
        assert!(
            (germ.radial_derivative - 1.5).abs() <= 1e-9,
            "radial derivative {:.17}",
            germ.radial_derivative
        );
        // tangent_case1 cross-checks its linear solve against the cofactor
        // closed form at 1e-10 and errors on disagreement, so Ok above is
        // also the solver-agreement claim.
    });
}

#[test]
fn criterion_07_case2_worked_point() {
    criterion(7, "case-2 germ at the chain point", || {
        let spec = CyclicFamilySpec::new(vec![2, 2, 2, 2], vec![1, 1, 1, 1]).unwrap();
        let member = make_member(&spec, 0.5).unwrap();
        let nullity: BTreeSet<usize> = [3].into_iter().collect();
        let sample = LinkSample {
            t: 0.5,
            r: 3f64.sqrt(),
            w: vec![
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
            nullity: nullity.clone(),
            residual_f: 0.0,
            residual_r: 0.0,
        };
        let germ = transversal::curve_germ(&member, &sample).unwrap();
        assert_eq!(germ.method, GermMethod::BambooRecursion);
        assert!((germ.dr_ds[1] - 1.0 / 3.0).abs() <= 1e-6, "dr_ds[1] = {:.12}", germ.dr_ds[1]);
        assert!((germ.dr_ds[0] - 2.0 / 9.0).abs() <= 1e-6, "dr_ds[0] = {:.12}", germ.dr_ds[0]);

        // The slopes must agree with finite differences of the scalar chain
        // solves, not just with the hand-derived constants.
        let restriction = transversal::restrict_to_nullity(&member, &nullity);
        assert_eq!(restriction.components.len(), 1);
        let comp = restriction.components[0];
        let m = transversal::bracket_weights(&spec, &sample.w);
        let h = 1e-6;
        let plus = transversal::bamboo_radii(&member, &m, &comp, h).unwrap();
        let minus = transversal::bamboo_radii(&member, &m, &comp, -h).unwrap();
        for (k, &var) in plus.vars.iter().enumerate() {
            let fd = (plus.radii[k] - minus.radii[k]) / (2.0 * h);
            assert!(
                (germ.dr_ds[var] - fd).abs() <= 1e-6,
                "var {var}: germ {:.12} vs fd {fd:.12}",
                germ.dr_ds[var]
            );
        }
        assert!(
            (germ.radial_derivative - 10.0 / 9.0).abs() <= 1e-6,
            "radial derivative {:.12}",
            germ.radial_derivative
        );
    });
}

#[test]
fn criterion_08_curve_identity() {
    criterion(8, "traced curves scale the fiber value", || {
        let spec = spec3();
        let tol = Tolerances::default();
        let s_grid: Vec<f64> = (-2..=2).map(|i| 0.05 * i as f64).collect();
        let mut base_points = 0usize;
        for (ti, &t) in [0.25, 0.5, 0.75].iter().enumerate() {
            let member = make_member(&spec, t).unwrap();
            let d = weights::polar_weight(member.poly()).unwrap().degree as i32;
            for (ri, &r) in [0.7, 1.0, 1.4].iter().enumerate() {
                let seed = rng::derive_seed(80_008, (ti * 3 + ri) as u64);
                let batch = sampler::sample_link(&member, r, 12, seed, &tol);
                for sample in &batch.samples {
                    let pts = transversal::trace_curve(&member, sample, &s_grid, &tol).unwrap();
                    let bound = 1e-8 * (1.0 + r.powi(d));
                    for p in &pts {
                        assert!(p.converged, "divergence at s = {}, t = {t}, r = {r}", p.s);
                        assert!(
                            p.residual <= bound,
                            "residual {:.3e} at s = {}, t = {t}, r = {r}",
                            p.residual,
                            p.s
                        );
                    }
                    base_points += 1;
                }
            }
        }
        assert!(base_points >= 100, "only {base_points} base points traced");
    });
}

#[test]
fn criterion_09_fiber_preservation() {
    criterion(9, "torus map preserves fibers", || {
        let member = make_member(&spec3(), 0.0).unwrap();
        let map = torusmap::build_torus_map(member.poly()).unwrap();
        let res = torusmap::check_fiber_preservation(member.poly(), &map, 100, 90_009);
        assert!(res <= 1e-10, "worked example residual {res:.3e}");

        let mut found = 0;
        let mut salt = 0u64;
        while found < 20 {
            salt += 1;
            assert!(salt < 500, "only {found} full simplicial instances found");
            let mut rg = rng::stream(90_909, salt);
            let n = draw(&mut rg, 2, 5) as usize;
            let a: Vec<u32> = (0..n).map(|_| draw(&mut rg, 1, 4)).collect();
            let b: Vec<u32> = (0..n).map(|_| draw(&mut rg, 0, 3)).collect();
            let Ok(spec) = CyclicFamilySpec::new_relaxed(a, b) else { continue };
            let member = make_member(&spec, 0.0).unwrap();
            let Ok(map) = torusmap::build_torus_map(member.poly()) else { continue };
            // Keep the modulus distortion bounded so exp/ln noise stays well
            // under the acceptance tolerance.
            let tame = map.exponents().iter().all(|row| {
                let mut s = rat(0, 1);
                for v in row {
                    s = s + abs_rat(v);
                }
                s <= rat(6, 1)
            });
            if !tame {
                continue;
            }
            let res =
                torusmap::check_fiber_preservation(member.poly(), &map, 100, rng::derive_seed(91_000, salt));
            assert!(res <= 1e-10, "instance {salt} residual {res:.3e}");
            found += 1;
        }
    });
}

#[test]
fn criterion_10_bamboo_monotonicity() {
    criterion(10, "bamboo chains never dip below the base", || {
        let cases = [
            (CyclicFamilySpec::new(vec![2, 2, 2, 2], vec![1, 1, 1, 1]).unwrap(), 0.5, 3usize),
            (CyclicFamilySpec::new(vec![2, 2, 2, 2, 2], vec![1, 1, 1, 1, 1]).unwrap(), 0.3, 1),
            (CyclicFamilySpec::new(vec![3, 1, 2, 2], vec![0, 2, 1, 1]).unwrap(), 0.7, 2),
        ];
        let tol = Tolerances::default();
        let mut recursions = 0usize;
        for (case_idx, (spec, t, null_var)) in cases.iter().enumerate() {
            let member = make_member(spec, *t).unwrap();
            let nullity: BTreeSet<usize> = [*null_var].into_iter().collect();
            let restriction = transversal::restrict_to_nullity(&member, &nullity);
            let mut contributed = 0usize;
            let mut salt = 0u64;
            while contributed < 67 {
                salt += 1;
                assert!(salt < 200, "case {case_idx}: not enough matching samples");
                let r = 1.0 + 0.1 * (salt % 5) as f64;
                let seed = rng::derive_seed(100_010 + case_idx as u64, salt);
                let batch = sampler::sample_with_nullity(&member, r, &nullity, 4, seed, &tol);
                // Newton may land on a deeper stratum; only exact pattern
                // matches feed the chain solves.
                for sample in batch.samples.iter().filter(|s| s.nullity == nullity) {
                    let m = transversal::bracket_weights(spec, &sample.w);
                    for comp in &restriction.components {
                        for &sv in &[0.0, 0.05, 0.1] {
                            let trace = transversal::bamboo_radii(&member, &m, comp, sv).unwrap();
                            for &rj in &trace.radii {
                                assert!(rj >= 1.0 - 1e-12, "radius {rj:.17} at s = {sv}");
                            }
                            for &sj in &trace.s_vals {
                                assert!(sj >= 1.0 - 1e-12, "multiplier {sj:.17} at s = {sv}");
                            }
                            if sv == 0.0 {
                                // Multiplier 1 everywhere, so every scalar
                                // solve must return the base radius.
                                for &rj in &trace.radii {
                                    assert!((rj - 1.0).abs() <= 1e-12, "psi(1) = {rj:.17}");
                                }
                            }
                            recursions += 1;
                            contributed += 1;
                        }
                    }
                }
            }
        }
        assert!(recursions >= 200, "only {recursions} recursions exercised");
    });
}

#[test]
fn criterion_11_reproducibility() {
    criterion(11, "reports are worker-count independent", || {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(
            &cfg,
            concat!(
                "seed = 1234\n",
                "[spec]\n",
                "a = [2, 2, 2]\n",
                "b = [1, 1, 1]\n",
                "[grid]\n",
                "t = [0.0, 0.5, 1.0]\n",
                "r = [0.5, 1.0]\n",
                "samples_per_cell = 20\n",
            ),
        )
        .unwrap();
        let out1 = dir.path().join("jobs1.json");
        let out8 = dir.path().join("jobs8.json");
        let bin = env!("CARGO_BIN_EXE_cyclink");
        for (jobs, out) in [("1", &out1), ("8", &out8)] {
            let status = Command::new(bin)
                .arg("certify")
                .arg("--config")
                .arg(&cfg)
                .arg("--jobs")
                .arg(jobs)
                .arg("--out")
                .arg(out)
                .status()
                .unwrap();
            assert!(status.success(), "--jobs {jobs} exited with {status}");
        }
        let b1 = std::fs::read(&out1).unwrap();
        let b8 = std::fs::read(&out8).unwrap();
        assert!(!b1.is_empty());
        assert_eq!(b1, b8, "reports differ between --jobs 1 and --jobs 8");
    });
}
