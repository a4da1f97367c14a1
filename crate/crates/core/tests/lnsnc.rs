//! Laplacians of the LNSNC solution with the correct constants:
//! Δz² = 4/det K and Δz³ = 8 q̄¹/det K, with z¹ harmonic.

mod common;

use common::*;
use hmorph_core::catalog::{get_example, lnsnc_det_k, lnsnc_singular_point};
use hmorph_core::complex_core::QzPoint;
use hmorph_core::holo::MapEvaluator;
use hmorph_core::implicit::{laplacian_formula_at, LaplacianFormula};
use hmorph_core::verify::domain_samples;
use hmorph_core::Error;

#[test]
fn laplacians_match_corrected_closed_form() {
    let e = get_example("LNSNC").unwrap();
    let branch = e.branch(0).unwrap();
    let fd = MapEvaluator::from_branch(branch.clone());
    let det_poly = lnsnc_det_k();
    for p in domain_samples(&e, 0, 20, 11).unwrap() {
        let det = det_poly.eval(&QzPoint::q_only(&p.q)).unwrap();
        let want = [c(0.0, 0.0), 4.0 / det, 8.0 * p.q[0].conj() / det];
        let exact = laplacian_formula_at(branch.system(), &p.q, &p.z, LaplacianFormula::Lap2Prime).unwrap();
        let numeric = fd.laplacian(&p.q).unwrap();
        for a in 0..3 {
            assert!(rel_close(exact[a], want[a], 1e-10), "lap2prime z{}: {} vs {}", a + 1, exact[a], want[a]);
            assert!(rel_close(numeric[a], want[a], 1e-5), "fd z{}: {} vs {}", a + 1, numeric[a], want[a]);
        }
    }
}

#[test]
fn det_k_matches_jacobian() {
    let e = get_example("LNSNC").unwrap();
    let branch = e.branch(0).unwrap();
    for p in domain_samples(&e, 0, 10, 12).unwrap() {
        let det = branch.system().jacobian_k(&p.q, &p.z).unwrap().det().unwrap();
        let closed = lnsnc_det_k().eval(&QzPoint::q_only(&p.q)).unwrap();
        assert!(rel_close(det, closed, 1e-12), "{det} vs {closed}");
    }
}

#[test]
fn singular_surface_is_rejected() {
    let e = get_example("LNSNC").unwrap();
    let q = lnsnc_singular_point(c(0.7, 0.2), c(-0.3, 0.6));
    let err = e.branch(0).unwrap().solve_z(&q).unwrap_err();
    assert!(matches!(err, Error::SingularJacobian { .. } | Error::SingularMatrix { .. }), "{err:?}");
}
