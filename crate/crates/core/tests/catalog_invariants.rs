mod common;

use common::*;
use hmorph_core::catalog::{get_example_with, ExampleOptions, MapSource};
use hmorph_core::complex_core::numerical_rank;
use hmorph_core::geometry::{fiber_sampler, reduction_determinant, WalkSettings};
use hmorph_core::hermitian::StructureField;
use hmorph_core::holo::{gradient_pairing, MapEvaluator};
use hmorph_core::verify::{domain_samples, verify_entry, VerifyOptions};

#[test]
fn closed_forms_back_substitute() {
    for e in all_entries() {
        let Some(cf) = &e.closed_form else { continue };
        let b = e.branch(0).unwrap();
        for p in domain_samples(&e, 0, 10, 21).unwrap() {
            let z = cf.eval(&p.q).unwrap();
            assert!(b.residual(&p.q, &z).unwrap() < 1e-10, "{}", label(&e));
        }
    }
}

#[test]
fn component_gradients_are_isotropic() {
    for e in all_entries() {
        let map = MapEvaluator::from_branch(e.branch(0).unwrap());
        for p in domain_samples(&e, 0, 10, 22).unwrap() {
            let g = gradient_pairing(&map, &p.q).unwrap();
            assert!(g.max_abs() < 1e-10, "{}: {:e}", label(&e), g.max_abs());
        }
    }
}

#[test]
fn solution_maps_are_submersions() {
    for e in all_entries() {
        let map = MapEvaluator::from_branch(e.branch(0).unwrap());
        for p in domain_samples(&e, 0, 5, 23).unwrap() {
            let rows = map.wirtinger_gradient(&p.q).unwrap().to_rows();
            assert_eq!(numerical_rank(&rows, None).unwrap(), e.system.k(), "{}", label(&e));
        }
    }
}

#[test]
fn structure_is_constant_on_fibres_of_z1() {
    for e in all_entries().into_iter().filter(|e| e.scalar_reduction.is_some()) {
        let branch = e.branch(0).unwrap();
        let z1 = MapEvaluator::branch_components(branch.clone(), vec![0]).unwrap();
        let field = StructureField::of_branch(&branch);
        let start = domain_samples(&e, 0, 1, 24).unwrap().remove(0).q;
        let settings = WalkSettings { count: 12, ..Default::default() };
        let sample = fiber_sampler(&z1, &start, &settings).unwrap();
        let j0 = field.j_at(&sample.points[0]).unwrap();
        for q in &sample.points[1..] {
            let diff = (field.j_at(q).unwrap() - &j0).amax();
            assert!(diff < 1e-8, "{}: {diff:e}", label(&e));
        }
    }
}

#[test]
fn reduction_determinant_detects_the_annihilator() {
    let e = get_example_with("glob2", &ExampleOptions { m: Some(3), ..Default::default() }).unwrap();
    let branch = e.branch(0).unwrap();
    let phi = e.postcomposition("phi").unwrap().psi.clone();
    let along = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let across = [c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)];
    let mut largest: f64 = 0.0;
    for p in domain_samples(&e, 0, 10, 25).unwrap() {
        let d = reduction_determinant(&branch, &phi, &along, &p.q).unwrap();
        assert!(d.norm() < 1e-10, "{d}");
        largest = largest.max(reduction_determinant(&branch, &phi, &across, &p.q).unwrap().norm());
    }
    assert!(largest > 1e-3);
}

#[test]
fn postcompositions_match_branch_values() {
    for e in all_entries() {
        for name in e.postcompositions.iter().map(|p| p.name.clone()) {
            let closed = e.map_for(&name, MapSource::ClosedForm);
            let numeric = e.map_for(&name, MapSource::Branch(0)).unwrap();
            let Ok(closed) = closed else { continue };
            for p in domain_samples(&e, 0, 5, 26).unwrap() {
                let a = closed.eval(&p.q).unwrap();
                let b = numeric.eval(&p.q).unwrap();
                assert!(rel_close(a[0], b[0], 1e-10), "{} {name}", label(&e));
            }
        }
    }
}

#[test]
fn expected_verdicts_are_reproduced() {
    for e in all_entries() {
        let opts = VerifyOptions { points: 10, seed: 5, ..Default::default() };
        let report = verify_entry(&e, &opts).unwrap();
        for v in &report.verdicts {
            assert!(v.pass, "{} {} {}: {}", label(&e), v.subject, v.property, v.detail);
        }
        for v in report.verdicts.iter().filter(|v| v.property == "kahler" && v.observed) {
            let sm = report.verdict(&v.subject, "superminimal").unwrap();
            assert!(sm.observed, "{} {}: Kähler but not superminimal", label(&e), v.subject);
        }
        assert!(report.overall.is_pass());
    }
}
