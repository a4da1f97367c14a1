//! Default tolerances and step sizes.

/// Newton stopping tolerance, scaled by `max(1, |q|)`.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;
/// A seed pair must satisfy `|F(q0, z0)|` below this.
pub const SEED_TOL: f64 = 1e-8;
/// Largest distance covered by one continuation step.
pub const CONTINUATION_STEP: f64 = 0.1;
/// Smallest continuation step as a fraction of the whole path.
pub const MIN_CONTINUATION_STEP: f64 = 1e-6;
/// `|det K|` below this times the Hadamard bound of K counts as singular.
pub const SINGULAR_RTOL: f64 = 1e-10;

/// Relative singular value cutoff for `numerical_rank`.
pub const RANK_TOL: f64 = 1e-8;
/// Rank cutoff used by the geometric tests.
pub const GEOMETRY_TOL: f64 = 1e-7;
/// Entrywise threshold for "holomorphic at q".
pub const HOLOMORPHIC_TOL: f64 = 1e-8;

/// First-derivative stencil step, scaled by `max(1, |q|)`.
pub const FD_STEP_FIRST: f64 = 1e-6;
/// Second-derivative stencil step, scaled by `max(1, |q|)`.
pub const FD_STEP_SECOND: f64 = 2e-3;
/// Step for the divergence of J, scaled by `max(1, |q|)`.
pub const FD_STEP_DIVERGENCE: f64 = 1e-5;

pub const FIBER_STEP: f64 = 0.05;
pub const FIBER_PROJECTION_TOL: f64 = 1e-10;
pub const FIBER_SAMPLES: usize = 40;
pub const DOMAIN_SAMPLES: usize = 120;

/// Generic sample points are drawn from a box of this radius.
pub const SAMPLE_BOX_RADIUS: f64 = 2.0;
/// Sample points with `|det K|` below this are rejected.
pub const SAMPLE_MIN_DET: f64 = 1e-4;
/// Domain samples also need |det K| / |grad_x det K| above this, times
/// `max(1, |q|)`. It estimates the distance to the critical locus, near
/// which finite-difference stencils stop resolving the branch.
pub const SAMPLE_MIN_CRITICAL_DISTANCE: f64 = 0.05;

/// `max(1, |v|)` with the Euclidean norm.
pub fn scale_of(v: &[num_complex::Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1.0)
}

/// Default threshold for "|Δφ| is zero"; `--tol` and HMORPH_TOL override it.
pub const HARMONIC_TOL: f64 = 1e-6;
/// Threshold for the HWC residual of a holomorphic map.
pub const HWC_TOL: f64 = 1e-8;
/// Closed-form against finite-difference Laplacians: relative tolerance,
/// or absolute when the value is below one.
pub const LAPLACIAN_RTOL: f64 = 1e-5;
pub const LAPLACIAN_ATOL: f64 = 1e-6;
/// Agreement between the closed-form Laplacian formulas.
pub const FORMULA_RTOL: f64 = 1e-8;
/// `|F(q, z)|` at a solved point, scaled by `max(1, |q|)`.
pub const SOLVED_RESIDUAL: f64 = 1e-10;
pub const VERIFY_POINTS: usize = 20;
pub const VERIFY_FIBERS: usize = 3;

/// `|a - b| <= rtol |b|`, or `<= atol` when `|b| < 1`.
pub fn close(a: num_complex::Complex64, b: num_complex::Complex64, rtol: f64, atol: f64) -> bool {
    let d = (a - b).norm();
    if b.norm() < 1.0 {
        d <= atol.max(rtol * b.norm())
    } else {
        d <= rtol * b.norm()
    }
}
