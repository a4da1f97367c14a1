//! Sampled decision procedures: superminimality of fibres, holomorphicity
//! with respect to a parallel (Kähler) structure, fullness, and the
//! bordered determinant that detects a factorization through a projection.
//!
//! All tests are rank tests on gradients collected at finitely many points,
//! so a PASS means "no obstruction found at these samples".

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex_core::{numerical_rank, span_basis, ComplexMatrix, ComplexPoly, QzPoint, Var};
use crate::error::{Error, Result};
use crate::holo::{x_gradient_from_wirtinger, MapEvaluator};
use crate::implicit::SolutionBranch;
use crate::tol;

/// Points on one connected component of a fibre of a scalar map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberSample {
    pub value: C64,
    pub points: Vec<Vec<C64>>,
    /// ∂ψ/∂x^1..∂ψ/∂x^{2m}
    pub gradients_x: Vec<Vec<C64>>,
    /// ∂ψ/∂q^1..∂ψ/∂q^m, ∂ψ/∂q̄^1..∂ψ/∂q̄^m
    pub gradients_q: Vec<Vec<C64>>,
}

impl FiberSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Settings of the fibre walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSettings {
    pub count: usize,
    /// relative step, scaled by max(1, |q|)
    pub step: f64,
    pub seed: u64,
    pub projection_tol: f64,
}

impl Default for WalkSettings {
    fn default() -> Self {
        WalkSettings {
            count: tol::FIBER_SAMPLES,
            step: tol::FIBER_STEP,
            seed: 0,
            projection_tol: tol::FIBER_PROJECTION_TOL,
        }
    }
}

fn to_real(q: &[C64]) -> Vec<f64> {
    q.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn from_real(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Real 2 x 2m Jacobian rows (Re ∇ψ, Im ∇ψ) from an x-indexed gradient.
fn real_rows(gx: &[C64]) -> [Vec<f64>; 2] {
    [gx.iter().map(|c| c.re).collect(), gx.iter().map(|c| c.im).collect()]
}

/// Minimum-norm Gauss-Newton correction dx with G dx = -r.
fn min_norm_correction(g: &[Vec<f64>; 2], r: C64) -> Option<Vec<f64>> {
    let a = |i: usize, j: usize| g[i].iter().zip(&g[j]).map(|(x, y)| x * y).sum::<f64>();
    let (a00, a01, a11) = (a(0, 0), a(0, 1), a(1, 1));
    let det = a00 * a11 - a01 * a01;
    if det.abs() <= 1e-300 || !det.is_finite() {
        return None;
    }
    let (b0, b1) = (-r.re, -r.im);
    let y0 = (a11 * b0 - a01 * b1) / det;
    let y1 = (a00 * b1 - a01 * b0) / det;
    Some((0..g[0].len()).map(|i| g[0][i] * y0 + g[1][i] * y1).collect())
}

struct WalkPoint {
    q: Vec<C64>,
    value: C64,
    gx: Vec<C64>,
    gq: Vec<C64>,
    state: Option<Vec<C64>>,
}

fn probe(psi: &MapEvaluator, q: &[C64], hint: Option<&[C64]>) -> Result<WalkPoint> {
    let t = psi.eval_tracked(q, hint)?;
    let gq = t.gradient.row(0).to_vec();
    let gx = x_gradient_from_wirtinger(&t.gradient).remove(0);
    Ok(WalkPoint {
        q: q.to_vec(),
        value: t.value[0],
        gx,
        gq,
        state: t.state,
    })
}

/// Random walk along the fibre of ψ through `q_start`: each step moves
/// orthogonally to Re ∇ψ and Im ∇ψ and is then projected back onto the
/// fibre by minimum-norm Newton.
pub fn fiber_sampler(psi: &MapEvaluator, q_start: &[C64], settings: &WalkSettings) -> Result<FiberSample> {
    if psi.k() != 1 {
        return Err(Error::ArityMismatch(format!("fibre sampling needs a scalar map, got k={}", psi.k())));
    }
    let start = probe(psi, q_start, None)?;
    let gnorm = start.gx.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if gnorm < tol::GEOMETRY_TOL {
        return Err(Error::CriticalPoint(gnorm));
    }
    let value = start.value;
    let ptol = settings.projection_tol * value.norm().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut out = FiberSample {
        value,
        points: Vec::with_capacity(settings.count),
        gradients_x: Vec::with_capacity(settings.count),
        gradients_q: Vec::with_capacity(settings.count),
    };
    let mut cur = start;
    let push = |out: &mut FiberSample, p: &WalkPoint| {
        out.points.push(p.q.clone());
        out.gradients_x.push(p.gx.clone());
        out.gradients_q.push(p.gq.clone());
    };
    if settings.count > 0 {
        push(&mut out, &cur);
    }
    while out.points.len() < settings.count {
        let x0 = to_real(&cur.q);
        let rows = real_rows(&cur.gx);
        let mut h = settings.step * norm(&x0).max(1.0);
        let mut next = None;
        let mut last_err = None;
        for _attempt in 0..6 {
            let dir = orthogonal_direction(&mut rng, &rows);
            let x: Vec<f64> = x0.iter().zip(&dir).map(|(a, d)| a + h * d).collect();
            match project(psi, x, value, ptol, cur.state.as_deref()) {
                Ok(p) => {
                    next = Some(p);
                    break;
                }
                Err(e) => {
                    last_err = Some(e);
                    h *= 0.5;
                }
            }
        }
        match next {
            Some(p) => {
                push(&mut out, &p);
                cur = p;
            }
            None => {
                return Err(Error::ProjectionFailure(
                    last_err.map(|e| e.to_string()).unwrap_or_default(),
                ))
            }
        }
    }
    Ok(out)
}

fn orthogonal_direction(rng: &mut ChaCha8Rng, rows: &[Vec<f64>; 2]) -> Vec<f64> {
    let n = rows[0].len();
    // Gram-Schmidt basis of span{Re ∇ψ, Im ∇ψ}
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let nv = norm(&v);
        if nv > 1e-12 * norm(r).max(1e-300) {
            basis.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    loop {
        let mut d: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for b in &basis {
            let c: f64 = d.iter().zip(b).map(|(x, y)| x * y).sum();
            d.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nd = norm(&d);
        if nd > 1e-3 {
            return d.into_iter().map(|x| x / nd).collect();
        }
    }
}

fn project(psi: &MapEvaluator, mut x: Vec<f64>, value: C64, ptol: f64, hint: Option<&[C64]>) -> Result<WalkPoint> {
    let mut state = hint.map(|h| h.to_vec());
    for _ in 0..30 {
        let p = probe(psi, &from_real(&x), state.as_deref())?;
        let r = p.value - value;
        if r.norm() < ptol {
            return Ok(p);
        }
        let dx = min_norm_correction(&real_rows(&p.gx), r)
            .ok_or_else(|| Error::ProjectionFailure("gradient vanished during projection".into()))?;
        x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
        state = p.state;
    }
    Err(Error::ProjectionFailure(format!("no convergence onto the fibre over {value}")))
}

/// Outcome of a span test on gradients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceVerdict {
    pub span_dim: usize,
    pub conjugate_intersection_trivial: bool,
    pub pass: bool,
    pub samples: usize,
    pub tol: f64,
    pub witness_basis: Option<Vec<Vec<C64>>>,
}

/// Span test: S = span of the vectors; PASS iff dim S ≤ m and S ∩ S̄ = 0.
pub fn subspace_verdict(vectors: &[Vec<C64>], m: usize, tol: f64) -> Result<SubspaceVerdict> {
    if vectors.is_empty() {
        return Err(Error::EmptySample);
    }
    let span_dim = numerical_rank(vectors, Some(tol))?;
    let mut doubled = vectors.to_vec();
    doubled.extend(vectors.iter().map(|v| v.iter().map(|c| c.conj()).collect::<Vec<_>>()));
    let doubled_dim = numerical_rank(&doubled, Some(tol))?;
    let trivial = doubled_dim == 2 * span_dim;
    Ok(SubspaceVerdict {
        span_dim,
        conjugate_intersection_trivial: trivial,
        pass: span_dim <= m && trivial,
        samples: vectors.len(),
        tol,
        witness_basis: Some(span_basis(vectors, tol)?),
    })
}

/// Superminimality of one fibre with respect to some almost complex
/// structure: the gradients along it must lie in an m-dimensional W with
/// W ∩ W̄ = 0.
pub fn superminimality_test(sample: &FiberSample, m: usize, tol: f64) -> Result<SubspaceVerdict> {
    subspace_verdict(&sample.gradients_x, m, tol)
}

/// Same test with gradients pooled over the whole domain: the subspace
/// must not vary from fibre to fibre.
pub fn kahler_test(psi: &MapEvaluator, domain: &[Vec<C64>], m: usize, tol: f64) -> Result<SubspaceVerdict> {
    if domain.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut grads = Vec::with_capacity(domain.len() * psi.k());
    for q in domain {
        grads.extend(psi.x_gradient(q)?);
    }
    subspace_verdict(&grads, m, tol)
}

/// Outcome of the fullness test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullnessVerdict {
    pub full: bool,
    pub real_rank: usize,
    /// orthonormal real directions v with dψ(v) = 0 at every sample
    pub annihilators: Vec<Vec<f64>>,
    pub samples: usize,
    pub tol: f64,
}

/// Real rank of the stacked real and imaginary gradient rows, with the
/// null directions. The map factors through a projection iff the rank is
/// below 2m.
pub fn fullness_from_gradients(grads_x: &[Vec<C64>], tol: f64) -> Result<FullnessVerdict> {
    let first = grads_x.first().ok_or(Error::EmptySample)?;
    let n = first.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * grads_x.len());
    for g in grads_x {
        if g.len() != n {
            return Err(Error::DimensionMismatch("gradients of different lengths".into()));
        }
        let [re, im] = real_rows(g);
        rows.push(re);
        rows.push(im);
    }
    while rows.len() < n {
        rows.push(vec![0.0; n]);
    }
    let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let mut rank = 0;
    let mut annihilators = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if top > 0.0 && *s > tol * top {
            rank += 1;
        } else {
            annihilators.push(vt.row(i).iter().copied().collect());
        }
    }
    Ok(FullnessVerdict {
        full: rank == n,
        real_rank: rank,
        annihilators,
        samples: grads_x.len(),
        tol,
    })
}

pub fn fullness_test(psi: &MapEvaluator, domain: &[Vec<C64>], tol: f64) -> Result<FullnessVerdict> {
    if domain.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut grads = Vec::with_capacity(domain.len() * psi.k());
    for q in domain {
        grads.extend(psi.x_gradient(q)?);
    }
    fullness_from_gradients(&grads, tol)
}

/// Fullness of ψ restricted to the orthogonal complement H of the given
/// directions: samples are moved onto H (through the origin) and gradients
/// are projected to H. Full iff the projected real rank equals dim H.
pub fn reduced_fullness_test(
    psi: &MapEvaluator,
    domain: &[Vec<C64>],
    directions: &[Vec<f64>],
    tol: f64,
) -> Result<FullnessVerdict> {
    if domain.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = 2 * psi.m();
    let basis = complement_basis(directions, n);
    let mut grads = Vec::new();
    for q in domain {
        let mut x = to_real(q);
        for d in directions {
            let c: f64 = x.iter().zip(d).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(d).for_each(|(a, b)| *a -= c * b);
        }
        for g in psi.x_gradient(&from_real(&x))? {
            grads.push(
                basis
                    .iter()
                    .map(|b| g.iter().zip(b).map(|(gi, bi)| gi * bi).sum::<C64>())
                    .collect::<Vec<C64>>(),
            );
        }
    }
    fullness_from_gradients(&grads, tol)
}

/// Orthonormal basis of the complement of the span of `dirs` in R^n.
fn complement_basis(dirs: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut span: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::new();
    let candidates = dirs.iter().cloned().map(|d| (d, false)).chain((0..n).map(|i| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        (e, true)
    }));
    for (v0, keep) in candidates {
        let mut v = v0;
        for b in &span {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            let u: Vec<f64> = v.into_iter().map(|x| x / nv).collect();
            span.push(u.clone());
            if keep {
                out.push(u);
            }
        }
    }
    out
}

/// α^j = v^{2j-1} + i v^{2j}: the complex form of a real direction, so that
/// D_v ψ = α^j ∂ψ/∂q^j + ᾱ^j ∂ψ/∂q̄^j.
pub fn alpha_from_direction(v: &[f64]) -> Vec<C64> {
    from_real(v)
}

pub fn direction_from_alpha(alpha: &[C64]) -> Vec<f64> {
    to_real(alpha)
}

/// Σ_a ∂φ/∂z^a · det(K with column a replaced by w(α, z(q))), where
/// w(α, z) = α - M(z) ᾱ. Equals -det K · D_v(φ∘z) at q, so it vanishes
/// identically iff φ∘z is invariant in the direction v(α).
pub fn reduction_determinant(branch: &SolutionBranch, phi: &ComplexPoly, alpha: &[C64], q: &[C64]) -> Result<C64> {
    let sys = branch.system();
    if !sys.is_canonical() {
        return Err(Error::FormulaInapplicable("reduction determinant needs a canonical system".into()));
    }
    let m = sys.m();
    if alpha.len() != m {
        return Err(Error::DimensionMismatch(format!("α has length {}, expected {m}", alpha.len())));
    }
    let z = branch.solve_z(q)?;
    let (k, _det) = sys.checked_jacobian(q, &z)?;
    let mat = sys.matrix_at(&z)?;
    let abar: Vec<C64> = alpha.iter().map(|a| a.conj()).collect();
    let ma = mat.mul_vec(&abar)?;
    let w: Vec<C64> = alpha.iter().zip(&ma).map(|(a, b)| a - b).collect();
    let pt = QzPoint::z_only(&z);
    let mut total = C64::new(0.0, 0.0);
    for a in 0..sys.k() {
        let dphi = phi.derivative(Var::z(a)).eval(&pt)?;
        if dphi == C64::new(0.0, 0.0) {
            continue;
        }
        let replaced = ComplexMatrix::from_fn(k.rows(), k.cols(), |r, c| if c == a { w[r] } else { k[(r, c)] });
        total += dphi * replaced.det()?;
    }
    Ok(total)
}
