#![allow(dead_code)]

use std::sync::Arc;

use hmorph_core::catalog::{get_example, get_example_with, CatalogEntry, ExampleOptions, Mu1Variant};
use hmorph_core::complex_core::{ComplexMatrix, ComplexPoly, QzPoint};
use hmorph_core::hermitian::MuVector;
use hmorph_core::implicit::{ImplicitSystem, SolutionBranch};
use hmorph_core::verify::critical_distance;
use hmorph_core::{tol, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

pub fn rand_vec(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<C64> {
    (0..n).map(|_| rand_c(rng, r)).collect()
}

/// Entries uniform in the unit box, redrawn until |det| >= 1e-3.
pub fn rand_nonsingular(rng: &mut ChaCha8Rng, k: usize) -> ComplexMatrix {
    loop {
        let m = ComplexMatrix::from_fn(k, k, |_, _| rand_c(rng, 1.0));
        if m.det().unwrap().norm() >= 1e-3 {
            return m;
        }
    }
}

/// Random polynomial of total degree <= `deg` in z1..zk.
pub fn rand_poly_z(rng: &mut ChaCha8Rng, k: usize, deg: u32) -> ComplexPoly {
    let mut p = ComplexPoly::constant(rand_c(rng, 1.0));
    for a in 0..k {
        p = p + rand_c(rng, 1.0) * ComplexPoly::z(a);
        if deg >= 2 {
            for b in a..k {
                p = p + rand_c(rng, 0.5) * ComplexPoly::z(a) * ComplexPoly::z(b);
            }
        }
    }
    p
}

/// Random polynomial of total degree <= 2 in q and q̄.
pub fn rand_poly_q(rng: &mut ChaCha8Rng, m: usize) -> ComplexPoly {
    let vars: Vec<ComplexPoly> = (0..m).flat_map(|j| [ComplexPoly::q(j), ComplexPoly::qbar(j)]).collect();
    let mut p = ComplexPoly::constant(rand_c(rng, 1.0));
    for (a, u) in vars.iter().enumerate() {
        p = p + rand_c(rng, 1.0) * u.clone();
        for v in &vars[a..] {
            p = p + rand_c(rng, 0.5) * u.clone() * v.clone();
        }
    }
    p
}

/// A canonical system with random polynomial μ(z) and h(z) together with a
/// solution (q0, z0) where |det K| >= 0.1. The constant terms of h are
/// chosen so that F(q0, z0) = 0.
pub fn rand_canonical(rng: &mut ChaCha8Rng, m: usize) -> (Arc<ImplicitSystem>, Vec<C64>, Vec<C64>) {
    loop {
        let n = MuVector::len_for(m);
        let mu: Vec<ComplexPoly> = (0..n).map(|_| rand_poly_z(rng, m, 1).scale(c(0.5, 0.0))).collect();
        let mu = MuVector::new(m, mu).unwrap();
        let q0 = rand_vec(rng, m, 1.0);
        let z0 = rand_vec(rng, m, 1.0);
        let raw: Vec<ComplexPoly> = (0..m).map(|_| rand_poly_z(rng, m, 2)).collect();
        let probe = ImplicitSystem::canonical(mu.clone(), raw.clone()).unwrap();
        let f0 = probe.eval_f(&q0, &z0).unwrap();
        // F = w - h, so adding f0 to h removes the residual
        let h: Vec<ComplexPoly> = raw.iter().zip(&f0).map(|(p, f)| p.clone() + ComplexPoly::constant(*f)).collect();
        let sys = ImplicitSystem::canonical(mu, h).unwrap();
        let det = sys.jacobian_k(&q0, &z0).unwrap().det().unwrap();
        if det.norm() >= 0.1 {
            return (Arc::new(sys), q0, z0);
        }
    }
}

/// Points within `radius` of the seed where the branch solves, with
/// |det K| >= 1e-4 and away from the critical locus.
pub fn sample_branch(branch: &SolutionBranch, radius: f64, n: usize, seed: u64) -> Vec<(Vec<C64>, Vec<C64>)> {
    let mut r = rng(seed);
    let center = branch.seed_q().to_vec();
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < n && tries < 100 * n {
        tries += 1;
        let q: Vec<C64> = center.iter().map(|c| c + rand_c(&mut r, radius)).collect();
        let Ok(z) = branch.solve_z(&q) else { continue };
        let det = branch.system().jacobian_k(&q, &z).unwrap().det().unwrap();
        if det.norm() < tol::SAMPLE_MIN_DET {
            continue;
        }
        match critical_distance(branch, &q, &z, det) {
            Ok(d) if d >= tol::SAMPLE_MIN_CRITICAL_DISTANCE * tol::scale_of(&q) => out.push((q, z)),
            _ => {}
        }
    }
    assert!(out.len() == n, "only {} of {n} sample points found", out.len());
    out
}

pub fn eval_at(p: &ComplexPoly, q: &[C64], z: &[C64]) -> C64 {
    p.eval(&QzPoint::new(q, z)).unwrap()
}

/// |a - b| <= rel * max(1, |b|)
pub fn rel_close(a: C64, b: C64, rel: f64) -> bool {
    (a - b).norm() <= rel * b.norm().max(1.0)
}

pub fn report(n: u32, pass: bool, detail: &str) -> bool {
    println!("criterion {n:>2}: {}  {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Every catalog entry in each variant and in m = 3, 4 where m is free.
pub fn all_entries() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for name in ["LSnotC", "LSC", "LNSNC"] {
        out.push(get_example(name).unwrap());
    }
    for name in ["family3", "family4"] {
        for mu1 in [Mu1Variant::Mixed, Mu1Variant::Z1Only] {
            out.push(get_example_with(name, &ExampleOptions { m: None, mu1 }).unwrap());
        }
    }
    for name in ["glob1", "glob2"] {
        for m in [3, 4] {
            out.push(get_example_with(name, &ExampleOptions { m: Some(m), ..Default::default() }).unwrap());
        }
    }
    out
}

pub fn label(e: &CatalogEntry) -> String {
    match e.variant {
        Some(v) => format!("{}:{}", e.name, v.name()),
        None => format!("{}(m={})", e.name, e.m),
    }
}
