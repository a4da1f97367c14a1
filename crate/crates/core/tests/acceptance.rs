//! Every acceptance criterion at its stated tolerance. One line per
//! criterion is printed; the test fails if any criterion fails.

mod common;

use std::sync::Arc;
use std::time::Instant;

use common::*;
use hmorph_core::catalog::{
    get_example, get_example_with, lnsnc_det_k, ExampleOptions, MapSource, Mu1Variant,
};
use hmorph_core::complex_core::{cofactor_c, sylvester_identity_check, ComplexMatrix, ComplexPoly, QzPoint, Var};
use hmorph_core::geometry::{
    fiber_sampler, fullness_test, kahler_test, reduced_fullness_test, superminimality_test, WalkSettings,
};
use hmorph_core::hermitian::{cosymplectic_residual, w_coordinates, MuVector};
use hmorph_core::holo::{hwc_residual, holomorphicity_residual, laplacian_from_divergence, poly_laplacian, MapEvaluator};
use hmorph_core::implicit::{laplacian_formula_at, ImplicitSystem, LaplacianFormula, SolutionBranch, SystemForm};
use hmorph_core::verify::{domain_samples, RADIAL_FACTORS};
use hmorph_core::{tol, C64};
use nalgebra::DMatrix;

type Outcome = (bool, String);

fn to_nalgebra(k: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(k.rows(), k.cols(), |i, j| k[(i, j)])
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for t in 0..1000 {
        let k = 3 + t % 3;
        let kmat = rand_nonsingular(&mut r, k);
        let inv = to_nalgebra(&kmat).try_inverse().unwrap();
        let mut scale: f64 = 0.0;
        let mut errs = Vec::new();
        for i in 0..k {
            for j in 0..k {
                for a in 0..k {
                    for b in 0..k {
                        if i == j || a == b {
                            continue;
                        }
                        let oracle = inv[(a, i)] * inv[(b, j)] - inv[(b, i)] * inv[(a, j)];
                        let got = cofactor_c(&kmat, i, j, a, b).unwrap();
                        scale = scale.max(oracle.norm());
                        errs.push((got - oracle).norm());
                    }
                }
            }
        }
        worst = worst.max(errs.into_iter().fold(0.0, f64::max) / scale);
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst < 1e-10 && secs < 5.0,
        format!("cofactor vs inverse oracle: max relative error {worst:.2e} (< 1e-10), {secs:.2} s (< 5 s)"),
    )
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for t in 0..1000 {
        let k = 3 + t % 3;
        let kmat = rand_nonsingular(&mut r, k);
        let scale = kmat.hadamard_bound().powi(2).max(1.0);
        for rr in 1..k {
            for s in 1..k {
                if rr != s {
                    worst = worst.max(sylvester_identity_check(&kmat, rr, s).unwrap() / scale);
                }
            }
        }
    }
    (worst < 1e-10, format!("Sylvester identity: max residual/scale {worst:.2e} (< 1e-10)"))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut spread: f64 = 0.0;
    for t in 0..50 {
        let m = 2 + t % 3;
        let (sys, q0, z0) = rand_canonical(&mut r, m);
        let truth = laplacian_formula_at(&sys, &q0, &z0, LaplacianFormula::Lap2Prime).unwrap();
        for f in LaplacianFormula::ALL {
            if f != LaplacianFormula::Lap2Prime && f.applies_to(&sys) {
                let got = laplacian_formula_at(&sys, &q0, &z0, f).unwrap();
                for (a, b) in got.iter().zip(&truth) {
                    spread = spread.max((a - b).norm() / b.norm().max(1.0));
                }
            }
        }
    }
    let mut fd_bad = Vec::new();
    let mut fd_worst: f64 = 0.0;
    for e in all_entries() {
        let branch = e.branch(0).unwrap();
        let map = MapEvaluator::from_branch(branch.clone());
        for p in domain_samples(&e, 0, 20, 3).unwrap() {
            let exact = laplacian_formula_at(branch.system(), &p.q, &p.z, LaplacianFormula::Lap2Prime).unwrap();
            let fd = map.laplacian(&p.q).unwrap();
            for (a, b) in fd.iter().zip(&exact) {
                fd_worst = fd_worst.max((a - b).norm() / b.norm().max(1.0));
                if !tol::close(*a, *b, tol::LAPLACIAN_RTOL, tol::LAPLACIAN_ATOL) {
                    fd_bad.push(label(&e));
                }
            }
        }
    }
    fd_bad.dedup();
    (
        spread < 1e-10 && fd_bad.is_empty(),
        format!(
            "formulas on 50 random systems: max relative spread {spread:.2e} (< 1e-10); \
             closed form vs finite differences on the catalog: worst {fd_worst:.2e} (< 1e-5), failing {fd_bad:?}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let e = get_example("LNSNC").unwrap();
    let branch = e.branch(0).unwrap();
    let explicit = e.closed_form.clone().unwrap();
    let fd_map = MapEvaluator::from_branch(branch.clone());
    let det_poly = lnsnc_det_k();
    let (mut f_res, mut lap1, mut dev2, mut dev3): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut ratio2 = C64::new(0.0, 0.0);
    let mut ratio3 = C64::new(0.0, 0.0);
    for p in domain_samples(&e, 0, 20, 4).unwrap() {
        let z = explicit.eval(&p.q).unwrap();
        f_res = f_res.max(branch.residual(&p.q, &z).unwrap());
        let lap = fd_map.laplacian(&p.q).unwrap();
        lap1 = lap1.max(lap[0].norm());
        let det = det_poly.eval(&QzPoint::q_only(&p.q)).unwrap();
        let want2 = -4.0 / det;
        let want3 = -2.0 * p.q[0].conj() / det;
        dev2 = dev2.max((lap[1] - want2).norm() / want2.norm());
        dev3 = dev3.max((lap[2] - want3).norm() / want3.norm());
        ratio2 = lap[1] / want2;
        ratio3 = lap[2] / want3;
    }
    let pass = f_res < 1e-10 && lap1 < 1e-6 && dev2 < 1e-5 && dev3 < 1e-5;
    (
        pass,
        format!(
            "explicit z1: |F| {f_res:.2e} (< 1e-10), |Lap z1| {lap1:.2e} (< 1e-6); \
             Lap z2 vs -4/det K: rel dev {dev2:.2e}, Lap z3 vs -2 conj(q1)/det K: rel dev {dev3:.2e} (< 1e-5); \
             measured/stated ratios at the last point {:.4}, {:.4}",
            ratio2, ratio3
        ),
    )
}

/// A general k = 1 system with z-dependent μ and f affine in w, plus a
/// solution (q0, z0).
fn random_scalar_system(seed: u64) -> SolutionBranch {
    let mut r = rng(seed);
    loop {
        let m = 3;
        let mu: Vec<ComplexPoly> = (0..3)
            .map(|_| ComplexPoly::constant(rand_c(&mut r, 0.5)) + rand_c(&mut r, 0.5) * ComplexPoly::z(0))
            .collect();
        let mu = MuVector::new(m, mu).unwrap();
        let mut f = rand_c(&mut r, 1.0) * ComplexPoly::z(0).pow(2);
        for i in 0..m {
            let coeff = ComplexPoly::constant(rand_c(&mut r, 1.0)) + rand_c(&mut r, 0.5) * ComplexPoly::z(0);
            f = f + coeff * ComplexPoly::w(i);
        }
        let q0 = rand_vec(&mut r, m, 1.0);
        let z0 = rand_vec(&mut r, 1, 1.0);
        let probe = ImplicitSystem::general(mu.clone(), 1, vec![f.clone()]).unwrap();
        let f0 = probe.eval_f(&q0, &z0).unwrap()[0];
        let sys = ImplicitSystem::general(mu, 1, vec![f - ComplexPoly::constant(f0)]).unwrap();
        if sys.jacobian_k(&q0, &z0).unwrap().det().unwrap().norm() > 0.2 {
            return SolutionBranch::new(Arc::new(sys), q0, z0).unwrap();
        }
    }
}

fn criterion_5() -> Outcome {
    let mut branches: Vec<(String, SolutionBranch, f64)> = Vec::new();
    for e in all_entries() {
        for i in 0..e.seeds.len() {
            if let Some(b) = e.scalar_branch(i).unwrap() {
                branches.push((format!("{} seed {i}", label(&e)), b, e.sample_radius));
            }
        }
    }
    for s in 0..3 {
        branches.push((format!("random k=1 system {s}"), random_scalar_system(50 + s), 0.2));
    }
    let (mut lap, mut hwc): (f64, f64) = (0.0, 0.0);
    let mut failing = Vec::new();
    for (name, b, radius) in &branches {
        let map = MapEvaluator::from_branch(b.clone());
        let pts = sample_branch(b, *radius, 10, 5);
        for (q, _) in &pts {
            lap = lap.max(map.laplacian(q).unwrap()[0].norm());
            hwc = hwc.max(hwc_residual(&map, q).unwrap().norm());
        }
        for (f, (q, _)) in pts.iter().take(5).enumerate() {
            let settings = WalkSettings { seed: f as u64, ..Default::default() };
            let sample = fiber_sampler(&map, q, &settings).unwrap();
            let v = superminimality_test(&sample, b.system().m(), tol::GEOMETRY_TOL).unwrap();
            if !v.pass {
                failing.push(format!("{name} fibre {f} (span {})", v.span_dim));
            }
        }
    }
    (
        lap < 1e-6 && hwc < 1e-8 && failing.is_empty(),
        format!(
            "{} k=1 branches: max |Lap z| {lap:.2e} (< 1e-6), max |HWC| {hwc:.2e} (< 1e-8), superminimality failures {failing:?}",
            branches.len()
        ),
    )
}

fn fibre_spans(map: &MapEvaluator, starts: &[Vec<C64>], m: usize) -> Vec<usize> {
    starts
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let settings = WalkSettings { count: 40, seed: i as u64, ..Default::default() };
            let sample = fiber_sampler(map, q, &settings).unwrap();
            superminimality_test(&sample, m, 1e-7).unwrap().span_dim
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [3, 4] {
        let e = get_example_with("glob1", &ExampleOptions { m: Some(m), ..Default::default() }).unwrap();
        let map = e.map_for("phi", MapSource::ClosedForm).unwrap();
        let phi = map.as_polynomials().unwrap()[0].clone();
        let symbolic_zero = poly_laplacian(&phi, m).is_zero();
        let pts: Vec<Vec<C64>> = domain_samples(&e, 0, 120, 6).unwrap().into_iter().map(|p| p.q).collect();
        let starts: Vec<Vec<C64>> =
            pts.iter().filter(|q| map.eval(q).unwrap()[0].norm() > 1e-2).take(3).cloned().collect();
        let spans = fibre_spans(&map, &starts, m);
        let full = fullness_test(&map, &pts, 1e-7).unwrap();
        let kahler = kahler_test(&map, &pts, m, 1e-7).unwrap();
        let ok = symbolic_zero && spans.iter().all(|&s| s == m + 2) && full.full && !kahler.pass;
        pass &= ok;
        parts.push(format!(
            "m={m}: symbolic Lap = 0 {symbolic_zero}, fibre spans {spans:?} (want {}), full {} (rank {}), kahler pass {}",
            m + 2,
            full.full,
            full.real_rank,
            kahler.pass
        ));
    }
    (pass, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let m = 3;
    let e = get_example_with("glob2", &ExampleOptions { m: Some(m), ..Default::default() }).unwrap();
    let map = e.map_for("phi", MapSource::ClosedForm).unwrap();
    let pts: Vec<Vec<C64>> = domain_samples(&e, 0, 120, 7).unwrap().into_iter().map(|p| p.q).collect();
    let full = fullness_test(&map, &pts, 1e-7).unwrap();
    let one = full.annihilators.len() == 1;
    let along_x1 = one && full.annihilators[0][0].abs() > 1.0 - 1e-9;
    let reduced = reduced_fullness_test(&map, &pts, &full.annihilators, 1e-7).unwrap();
    let starts: Vec<Vec<C64>> = pts.iter().take(3).cloned().collect();
    let spans = fibre_spans(&map, &starts, m);
    let pass = one && along_x1 && reduced.real_rank == 2 * m - 1 && spans.iter().all(|&s| s == m + 1);
    (
        pass,
        format!(
            "annihilators {:?}, reduced rank {} (want {}), fibre spans {spans:?} (want {})",
            full.annihilators,
            reduced.real_rank,
            2 * m - 1,
            m + 1
        ),
    )
}

fn criterion_8() -> Outcome {
    let lsc = get_example("LSC").unwrap();
    let SystemForm::Canonical { h } = lsc.system.form() else {
        return (false, "LSC is not canonical".into());
    };
    let mu = lsc.system.mu().entries();
    let d = |p: &ComplexPoly| p.derivative(Var::z(0));
    let combo = h[2].clone() * d(&mu[0]) - h[1].clone() * d(&mu[1]) + h[0].clone() * d(&mu[2]);
    let symbolic_zero = combo.is_zero();
    let branch = lsc.branch(0).unwrap();
    let b2 = branch.clone();
    let matrix = lsc.system.matrix().clone();
    let w_map = MapEvaluator::custom(3, 3, move |q| w_coordinates(&matrix, Some(&b2), q));
    let mut w_lap: f64 = 0.0;
    for p in domain_samples(&lsc, 0, 20, 8).unwrap() {
        for v in w_map.laplacian(&p.q).unwrap() {
            w_lap = w_lap.max(v.norm());
        }
    }

    let ls = get_example("LSnotC").unwrap();
    let nb = ls.branch(0).unwrap();
    let fd = MapEvaluator::from_branch(nb.clone());
    let (mut cos_min, mut lap_min) = (f64::INFINITY, f64::INFINITY);
    for p in domain_samples(&ls, 0, 20, 8).unwrap() {
        let cos = cosymplectic_residual(ls.system.matrix(), Some(&nb), &p.q).unwrap();
        cos_min = cos_min.min(cos.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
        let lap = fd.laplacian(&p.q).unwrap();
        lap_min = lap_min.min(lap[1].norm().min(lap[2].norm()));
    }
    let pass = symbolic_zero && w_lap < 1e-6 && cos_min > 1e-3 && lap_min > 1e-3;
    (
        pass,
        format!(
            "LSC: h3 mu1' - h2 mu2' + h1 mu3' = 0 {symbolic_zero}, max |Lap w| {w_lap:.2e} (< 1e-6); \
             LSnotC: min |cosymplectic residual| {cos_min:.2e}, min |Lap z2|,|Lap z3| {lap_min:.2e} (both nonzero)"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    for mu1 in [Mu1Variant::Mixed, Mu1Variant::Z1Only] {
        let e = get_example_with("family4", &ExampleOptions { m: None, mu1 }).unwrap();
        let b = e.branch(0).unwrap();
        for p in domain_samples(&e, 0, 20, 9).unwrap() {
            let local = b.reseed(p.q.clone(), p.z.clone()).unwrap();
            for a in RADIAL_FACTORS {
                let qa: Vec<C64> = p.q.iter().map(|c| c * a).collect();
                let za = local.solve_z(&qa).unwrap();
                worst = worst.max((za[0] - p.z[0]).norm());
            }
        }
    }
    (worst < 1e-8, format!("max |z1(aq) - z1(q)| over a in {{0.5, 2, 3}}: {worst:.2e} (< 1e-8)"))
}

fn criterion_10() -> Outcome {
    let mut hol: f64 = 0.0;
    let mut divj_worst: f64 = 0.0;
    let mut divj_failing = Vec::new();
    for e in all_entries() {
        for i in 0..e.seeds.len() {
            let b = e.branch(i).unwrap();
            let map = MapEvaluator::from_branch(b.clone());
            let pts = domain_samples(&e, i, 20, 10).unwrap();
            let cos = pts
                .iter()
                .map(|p| {
                    let r = cosymplectic_residual(e.system.matrix(), Some(&b), &p.q).unwrap();
                    r.iter().map(|c| c.norm()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            for p in &pts {
                hol = hol.max(holomorphicity_residual(&map, e.system.matrix(), Some(&b), &p.q).unwrap().max_abs());
                if let Some(cf) = &e.closed_form {
                    hol = hol.max(holomorphicity_residual(cf, e.system.matrix(), Some(&b), &p.q).unwrap().max_abs());
                }
            }
            if cos < 1e-8 || i > 0 {
                continue;
            }
            for p in pts.iter().take(10) {
                let exact = laplacian_formula_at(b.system(), &p.q, &p.z, LaplacianFormula::Lap2Prime).unwrap();
                let via = laplacian_from_divergence(&map, e.system.matrix(), Some(&b), &p.q).unwrap();
                for (a, x) in via.iter().zip(&exact) {
                    divj_worst = divj_worst.max((a - x).norm() / x.norm().max(1.0));
                    if !rel_close(*a, *x, 1e-4) {
                        divj_failing.push(label(&e));
                    }
                }
            }
        }
    }
    divj_failing.dedup();
    (
        hol < 1e-8 && divj_failing.is_empty(),
        format!(
            "max holomorphicity residual {hol:.2e} (< 1e-8); Lap vs -d phi(J delta J) on non-cosymplectic entries: \
             worst {divj_worst:.2e} (< 1e-4), failing {divj_failing:?}"
        ),
    )
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = Vec::new();
    for (i, c) in criteria.iter().enumerate() {
        let (pass, detail) = c();
        if !report(i as u32 + 1, pass, &detail) {
            failed.push(i + 1);
        }
    }
    println!("acceptance suite: {:.1} s", start.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
