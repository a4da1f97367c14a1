//! Maps φ: U ⊂ C^m -> C^k and the residual calculus for harmonic
//! morphisms: Laplacians, horizontal weak conformality, holomorphicity
//! with respect to J(M), and postcomposition.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::complex_core::{ComplexMatrix, ComplexPoly, QzPoint, Var, VarKind};
use crate::error::{Error, Result};
use crate::hermitian::{cosymplectic_residual, divergence_delta_j, SkewMatrixFn, StructureField};
use crate::implicit::SolutionBranch;
use crate::tol;

/// How second derivatives are obtained. First derivatives are exact
/// whenever the map carries them (implicit differentiation for
/// solver-backed maps).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffMode {
    Symbolic,
    FiniteDifference,
}

/// Relative finite-difference steps; the actual step is `step * max(1, |q|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPolicy {
    pub first: f64,
    pub second: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            first: tol::FD_STEP_FIRST,
            second: tol::FD_STEP_SECOND,
        }
    }
}

type CustomFn = Arc<dyn Fn(&[C64]) -> Result<Vec<C64>> + Send + Sync>;

#[derive(Clone)]
enum MapKind {
    /// polynomials in q, q̄
    Polynomial(Vec<ComplexPoly>),
    /// common denominator
    Rational { num: Vec<ComplexPoly>, den: ComplexPoly },
    Branch { branch: SolutionBranch, components: Vec<usize> },
    /// outer polynomials in z1..zk applied to the inner map
    Composed { inner: Box<MapEvaluator>, outer: Vec<ComplexPoly> },
    Custom(CustomFn),
}

/// Value, Wirtinger gradient and solver state at one point.
#[derive(Clone, Debug)]
pub struct Tracked {
    pub value: Vec<C64>,
    pub gradient: ComplexMatrix,
    /// full z(q) for solver-backed maps
    pub state: Option<Vec<C64>>,
}

#[derive(Clone)]
pub struct MapEvaluator {
    m: usize,
    k: usize,
    kind: MapKind,
    mode: DiffMode,
    steps: StepPolicy,
}

impl fmt::Debug for MapEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            MapKind::Polynomial(_) => "polynomial",
            MapKind::Rational { .. } => "rational",
            MapKind::Branch { .. } => "branch",
            MapKind::Composed { .. } => "composed",
            MapKind::Custom(_) => "custom",
        };
        f.debug_struct("MapEvaluator")
            .field("m", &self.m)
            .field("k", &self.k)
            .field("kind", &kind)
            .field("mode", &self.mode)
            .finish()
    }
}

fn in_q(m: usize) -> impl Fn(Var) -> bool {
    move |v| matches!(v.kind, VarKind::Q | VarKind::QBar) && v.index < m
}

fn eval_all(polys: &[ComplexPoly], pt: &QzPoint) -> Result<Vec<C64>> {
    polys.iter().map(|p| p.eval(pt)).collect()
}

/// Wirtinger gradient (k x 2m) -> gradient in ∂/∂x^1..∂/∂x^{2m}.
pub fn x_gradient_from_wirtinger(g: &ComplexMatrix) -> Vec<Vec<C64>> {
    let m = g.cols() / 2;
    (0..g.rows())
        .map(|c| {
            let mut out = Vec::with_capacity(2 * m);
            for j in 0..m {
                let (dq, dqb) = (g[(c, j)], g[(c, m + j)]);
                out.push(dq + dqb);
                out.push(C64::i() * (dq - dqb));
            }
            out
        })
        .collect()
}

impl MapEvaluator {
    pub fn polynomial(m: usize, polys: Vec<ComplexPoly>) -> Result<Self> {
        if let Some(p) = polys.iter().find(|p| !p.only_uses(in_q(m))) {
            return Err(Error::InvalidSystem(format!("{p} is not a polynomial in q1..q{m} and conjugates")));
        }
        Ok(MapEvaluator {
            m,
            k: polys.len(),
            kind: MapKind::Polynomial(polys),
            mode: DiffMode::Symbolic,
            steps: StepPolicy::default(),
        })
    }

    pub fn rational(m: usize, num: Vec<ComplexPoly>, den: ComplexPoly) -> Result<Self> {
        if num.iter().chain([&den]).any(|p| !p.only_uses(in_q(m))) {
            return Err(Error::InvalidSystem(format!("rational map must use only q1..q{m} and conjugates")));
        }
        Ok(MapEvaluator {
            m,
            k: num.len(),
            kind: MapKind::Rational { num, den },
            mode: DiffMode::Symbolic,
            steps: StepPolicy::default(),
        })
    }

    /// All components of z(q).
    pub fn from_branch(branch: SolutionBranch) -> Self {
        let k = branch.system().k();
        Self::branch_components(branch, (0..k).collect()).expect("valid components")
    }

    /// Selected components of z(q) (zero based).
    pub fn branch_components(branch: SolutionBranch, components: Vec<usize>) -> Result<Self> {
        let k = branch.system().k();
        if let Some(c) = components.iter().find(|&&c| c >= k) {
            return Err(Error::ArityMismatch(format!("component {} of a {k}-component map", c + 1)));
        }
        Ok(MapEvaluator {
            m: branch.system().m(),
            k: components.len(),
            kind: MapKind::Branch { branch, components },
            mode: DiffMode::FiniteDifference,
            steps: StepPolicy::default(),
        })
    }

    pub fn custom(
        m: usize,
        k: usize,
        f: impl Fn(&[C64]) -> Result<Vec<C64>> + Send + Sync + 'static,
    ) -> Self {
        MapEvaluator {
            m,
            k,
            kind: MapKind::Custom(Arc::new(f)),
            mode: DiffMode::FiniteDifference,
            steps: StepPolicy::default(),
        }
    }

    pub fn with_mode(mut self, mode: DiffMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_steps(mut self, steps: StepPolicy) -> Self {
        self.steps = steps;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn mode(&self) -> DiffMode {
        self.mode
    }
    pub fn steps(&self) -> StepPolicy {
        self.steps
    }

    /// True when every piece has exact derivatives of all orders.
    pub fn is_closed_form(&self) -> bool {
        match &self.kind {
            MapKind::Polynomial(_) | MapKind::Rational { .. } => true,
            MapKind::Composed { inner, .. } => inner.is_closed_form(),
            MapKind::Branch { .. } | MapKind::Custom(_) => false,
        }
    }

    /// The polynomials, when the map is polynomial.
    pub fn as_polynomials(&self) -> Option<&[ComplexPoly]> {
        match &self.kind {
            MapKind::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    /// The underlying solution branch, if any.
    pub fn branch(&self) -> Option<&SolutionBranch> {
        match &self.kind {
            MapKind::Branch { branch, .. } => Some(branch),
            MapKind::Composed { inner, .. } => inner.branch(),
            _ => None,
        }
    }

    fn check_q(&self, q: &[C64]) -> Result<()> {
        if q.len() != self.m {
            return Err(Error::DimensionMismatch(format!("q has length {}, expected {}", q.len(), self.m)));
        }
        Ok(())
    }

    pub fn eval(&self, q: &[C64]) -> Result<Vec<C64>> {
        self.check_q(q)?;
        Ok(self.eval_state(q, None)?.0)
    }

    /// Value plus the solver state reached (the full z for solver-backed
    /// maps), so that nearby points can be solved from it.
    fn eval_state(&self, q: &[C64], hint: Option<&[C64]>) -> Result<(Vec<C64>, Option<Vec<C64>>)> {
        match &self.kind {
            MapKind::Polynomial(p) => Ok((eval_all(p, &QzPoint::q_only(q))?, None)),
            MapKind::Rational { num, den } => {
                let pt = QzPoint::q_only(q);
                let d = checked_denominator(den, &pt, q)?;
                Ok((eval_all(num, &pt)?.into_iter().map(|n| n / d).collect(), None))
            }
            MapKind::Branch { branch, components } => {
                let z = match hint {
                    Some(g) => branch.solve_near(q, g)?,
                    None => branch.solve_z(q)?,
                };
                Ok((components.iter().map(|&c| z[c]).collect(), Some(z)))
            }
            MapKind::Composed { inner, outer } => {
                let (iv, st) = inner.eval_state(q, hint)?;
                Ok((eval_all(outer, &QzPoint::z_only(&iv))?, st))
            }
            MapKind::Custom(f) => Ok((f(q)?, None)),
        }
    }

    /// Value and Wirtinger gradient (k x 2m: ∂/∂q^1..∂/∂q^m, ∂/∂q̄^1..∂/∂q̄^m).
    pub fn eval_with_gradient(&self, q: &[C64]) -> Result<(Vec<C64>, ComplexMatrix)> {
        let t = self.eval_tracked(q, None)?;
        Ok((t.value, t.gradient))
    }

    /// Like [`eval_with_gradient`](Self::eval_with_gradient), but solver-backed
    /// maps start Newton from `hint` (a full z near the answer) instead of
    /// continuing from the seed. Used to walk along a branch.
    pub fn eval_tracked(&self, q: &[C64], hint: Option<&[C64]>) -> Result<Tracked> {
        self.check_q(q)?;
        let m = self.m;
        let plain = |(value, gradient): (Vec<C64>, ComplexMatrix)| Tracked { value, gradient, state: None };
        match &self.kind {
            MapKind::Polynomial(p) => {
                let pt = QzPoint::q_only(q);
                let g = ComplexMatrix::from_rows(
                    &p.iter()
                        .map(|pi| poly_gradient(pi, m, &pt))
                        .collect::<Result<Vec<_>>>()?,
                )?;
                Ok(plain((eval_all(p, &pt)?, g)))
            }
            MapKind::Rational { num, den } => {
                let pt = QzPoint::q_only(q);
                let d = checked_denominator(den, &pt, q)?;
                let dg = poly_gradient(den, m, &pt)?;
                let mut rows = Vec::with_capacity(num.len());
                let mut vals = Vec::with_capacity(num.len());
                for n in num {
                    let nv = n.eval(&pt)?;
                    let ng = poly_gradient(n, m, &pt)?;
                    rows.push(
                        ng.iter()
                            .zip(&dg)
                            .map(|(a, b)| (a * d - nv * b) / (d * d))
                            .collect(),
                    );
                    vals.push(nv / d);
                }
                Ok(plain((vals, ComplexMatrix::from_rows(&rows)?)))
            }
            MapKind::Branch { branch, components } => {
                let z = match hint {
                    Some(g) => branch.solve_near(q, g)?,
                    None => branch.solve_z(q)?,
                };
                let dz = branch.system().dz_dq_at(q, &z)?;
                let g = ComplexMatrix::from_fn(components.len(), 2 * m, |r, c| dz[(components[r], c)]);
                Ok(Tracked {
                    value: components.iter().map(|&c| z[c]).collect(),
                    gradient: g,
                    state: Some(z),
                })
            }
            MapKind::Composed { inner, outer } => {
                let Tracked { value: iv, gradient: ig, state } = inner.eval_tracked(q, hint)?;
                let pt = QzPoint::z_only(&iv);
                let mut rows = Vec::with_capacity(outer.len());
                for psi in outer {
                    let dpsi: Vec<C64> = (0..inner.k)
                        .map(|a| psi.derivative(Var::z(a)).eval(&pt))
                        .collect::<Result<_>>()?;
                    rows.push(
                        (0..2 * m)
                            .map(|col| (0..inner.k).map(|a| dpsi[a] * ig[(a, col)]).sum())
                            .collect(),
                    );
                }
                Ok(Tracked {
                    value: eval_all(outer, &pt)?,
                    gradient: ComplexMatrix::from_rows(&rows)?,
                    state,
                })
            }
            MapKind::Custom(_) => {
                let v = self.eval(q)?;
                Ok(plain((v, self.gradient_fd(q)?)))
            }
        }
    }

    pub fn wirtinger_gradient(&self, q: &[C64]) -> Result<ComplexMatrix> {
        Ok(self.eval_with_gradient(q)?.1)
    }

    /// Gradient in the real coordinates, one C^{2m} row per component.
    pub fn x_gradient(&self, q: &[C64]) -> Result<Vec<Vec<C64>>> {
        Ok(x_gradient_from_wirtinger(&self.wirtinger_gradient(q)?))
    }

    /// Wirtinger gradient by central differences in the real coordinates.
    pub fn gradient_fd(&self, q: &[C64]) -> Result<ComplexMatrix> {
        self.check_q(q)?;
        let m = self.m;
        let h = self.steps.first * tol::scale_of(q);
        let (_, state) = self.eval_state(q, None)?;
        let hint = state.as_deref();
        let mut g = ComplexMatrix::zeros(self.k, 2 * m);
        for j in 0..m {
            let mut dx = Vec::new();
            for dir in [C64::new(h, 0.0), C64::new(0.0, h)] {
                let mut qp = q.to_vec();
                qp[j] += dir;
                let mut qm = q.to_vec();
                qm[j] -= dir;
                let fp = self.eval_state(&qp, hint).map_err(stencil)?.0;
                let fm = self.eval_state(&qm, hint).map_err(stencil)?.0;
                dx.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
            }
            for c in 0..self.k {
                let (fx, fy) = (dx[0][c], dx[1][c]);
                g[(c, j)] = (fx - C64::i() * fy) * 0.5;
                g[(c, m + j)] = (fx + C64::i() * fy) * 0.5;
            }
        }
        Ok(g)
    }

    /// Δφ = 4 Σ ∂²φ/∂q^i∂q̄^i.
    pub fn laplacian(&self, q: &[C64]) -> Result<Vec<C64>> {
        self.check_q(q)?;
        match self.mode {
            DiffMode::Symbolic => self.laplacian_exact(q),
            DiffMode::FiniteDifference => self.laplacian_fd(q),
        }
    }

    fn laplacian_exact(&self, q: &[C64]) -> Result<Vec<C64>> {
        let m = self.m;
        match &self.kind {
            MapKind::Polynomial(p) => {
                let pt = QzPoint::q_only(q);
                p.iter().map(|pi| poly_laplacian(pi, m).eval(&pt)).collect()
            }
            MapKind::Rational { num, den } => {
                let pt = QzPoint::q_only(q);
                let d = checked_denominator(den, &pt, q)?;
                let dg = poly_gradient(den, m, &pt)?;
                let dlap = poly_laplacian(den, m).eval(&pt)?;
                num.iter()
                    .map(|n| {
                        let nv = n.eval(&pt)?;
                        let ng = poly_gradient(n, m, &pt)?;
                        let nlap = poly_laplacian(n, m).eval(&pt)?;
                        // 4 Σ_i [N_{i ī}/D - (N_i D_ī + N_ī D_i)/D² + N(2 D_i D_ī/D³ - D_{i ī}/D²)]
                        let mut cross = C64::new(0.0, 0.0);
                        let mut dd = C64::new(0.0, 0.0);
                        for i in 0..m {
                            cross += ng[i] * dg[m + i] + ng[m + i] * dg[i];
                            dd += dg[i] * dg[m + i];
                        }
                        Ok(nlap / d - cross * 4.0 / (d * d) + nv * (dd * 8.0 / (d * d * d) - dlap / (d * d)))
                    })
                    .collect()
            }
            MapKind::Composed { inner, outer } => {
                if !inner.is_closed_form() {
                    return Err(Error::NonPolynomial);
                }
                let (iv, ig) = inner.eval_with_gradient(q)?;
                let ilap = inner.laplacian_exact(q)?;
                let ki = inner.k;
                let pair = |a: usize, b: usize| -> C64 {
                    (0..m)
                        .map(|i| (ig[(a, i)] * ig[(b, m + i)] + ig[(a, m + i)] * ig[(b, i)]) * 2.0)
                        .sum()
                };
                let pt = QzPoint::z_only(&iv);
                outer
                    .iter()
                    .map(|psi| {
                        let mut s = C64::new(0.0, 0.0);
                        for a in 0..ki {
                            let da = psi.derivative(Var::z(a));
                            s += da.eval(&pt)? * ilap[a];
                            for b in 0..ki {
                                s += da.derivative(Var::z(b)).eval(&pt)? * pair(a, b);
                            }
                        }
                        Ok(s)
                    })
                    .collect()
            }
            MapKind::Branch { .. } | MapKind::Custom(_) => Err(Error::NonPolynomial),
        }
    }

    /// Five-point stencil in every complex coordinate, Richardson-extrapolated
    /// from steps h and 2h so the error is O(h^4). The step is halved a few
    /// times and the estimate where successive values agree best is kept,
    /// which balances truncation against rounding.
    fn laplacian_fd(&self, q: &[C64]) -> Result<Vec<C64>> {
        let mut h = self.steps.second * tol::scale_of(q);
        let (f0, state) = self.eval_state(q, None)?;
        let hint = state.as_deref();
        let mut coarse = self.second_difference(q, &f0, 2.0 * h, hint)?;
        let mut fine = self.second_difference(q, &f0, h, hint)?;
        let extrapolate = |f: &[C64], c: &[C64]| -> Vec<C64> { f.iter().zip(c).map(|(f, c)| (4.0 * f - c) / 3.0).collect() };
        let mut prev = extrapolate(&fine, &coarse);
        let mut best = (f64::INFINITY, prev.clone());
        for _ in 0..FD_HALVINGS {
            h /= 2.0;
            coarse = fine;
            fine = self.second_difference(q, &f0, h, hint)?;
            let next = extrapolate(&fine, &coarse);
            let gap = next.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if gap < best.0 {
                best = (gap, next.clone());
            }
            prev = next;
        }
        Ok(best.1)
    }

    fn second_difference(&self, q: &[C64], f0: &[C64], h: f64, hint: Option<&[C64]>) -> Result<Vec<C64>> {
        let mut acc = vec![C64::new(0.0, 0.0); self.k];
        for j in 0..self.m {
            for dir in [C64::new(h, 0.0), C64::new(-h, 0.0), C64::new(0.0, h), C64::new(0.0, -h)] {
                let mut qs = q.to_vec();
                qs[j] += dir;
                let f = self.eval_state(&qs, hint).map_err(stencil)?.0;
                for ((a, v), c) in acc.iter_mut().zip(&f).zip(f0) {
                    *a += v - c;
                }
            }
        }
        Ok(acc.into_iter().map(|a| a / (h * h)).collect())
    }

    /// ψ ∘ φ for holomorphic polynomials ψ in z1..zk.
    pub fn postcompose(&self, psi: &[ComplexPoly]) -> Result<MapEvaluator> {
        let k = self.k;
        if let Some(p) = psi
            .iter()
            .find(|p| !p.only_uses(|v| v.kind == VarKind::Z && v.index < k))
        {
            return Err(Error::ArityMismatch(format!(
                "{p} is not a holomorphic polynomial in z1..z{k}"
            )));
        }
        let kind = match &self.kind {
            MapKind::Polynomial(inner) => {
                let map: BTreeMap<Var, ComplexPoly> =
                    inner.iter().enumerate().map(|(a, p)| (Var::z(a), p.clone())).collect();
                MapKind::Polynomial(psi.iter().map(|p| p.substitute(&map)).collect())
            }
            MapKind::Composed { inner, outer } => {
                let map: BTreeMap<Var, ComplexPoly> =
                    outer.iter().enumerate().map(|(a, p)| (Var::z(a), p.clone())).collect();
                MapKind::Composed {
                    inner: inner.clone(),
                    outer: psi.iter().map(|p| p.substitute(&map)).collect(),
                }
            }
            _ => MapKind::Composed {
                inner: Box::new(self.clone()),
                outer: psi.to_vec(),
            },
        };
        Ok(MapEvaluator {
            m: self.m,
            k: psi.len(),
            kind,
            mode: self.mode,
            steps: self.steps,
        })
    }
}

const FD_HALVINGS: usize = 3;

fn stencil(e: Error) -> Error {
    Error::StencilFailure(e.to_string())
}

fn checked_denominator(den: &ComplexPoly, pt: &QzPoint, q: &[C64]) -> Result<C64> {
    let d = den.eval(pt)?;
    let scale = tol::scale_of(q).powi(den.total_degree() as i32);
    if d.norm() < 1e-12 * scale {
        return Err(Error::DomainExcluded(d.norm()));
    }
    Ok(d)
}

fn poly_gradient(p: &ComplexPoly, m: usize, pt: &QzPoint) -> Result<Vec<C64>> {
    (0..m)
        .map(|i| p.derivative(Var::q(i)).eval(pt))
        .chain((0..m).map(|i| p.derivative(Var::qbar(i)).eval(pt)))
        .collect()
}

/// 4 Σ ∂²p/∂q^i∂q̄^i as a polynomial.
pub fn poly_laplacian(p: &ComplexPoly, m: usize) -> ComplexPoly {
    let mut acc = ComplexPoly::zero();
    for i in 0..m {
        acc = acc + p.derivative(Var::q(i)).derivative(Var::qbar(i));
    }
    4.0 * acc
}

/// 4 Σ_j φ_{q^j} φ_{q̄^j}, i.e. Σ_i (∂φ/∂x^i)², for a scalar map.
pub fn hwc_residual(phi: &MapEvaluator, q: &[C64]) -> Result<C64> {
    if phi.k() != 1 {
        return Err(Error::ArityMismatch(format!("expected a scalar map, got k={}", phi.k())));
    }
    Ok(gradient_pairing(phi, q)?[(0, 0)])
}

/// ⟨∇φ^a, ∇φ^b⟩ with the complex bilinear extension of the Euclidean
/// inner product.
pub fn gradient_pairing(phi: &MapEvaluator, q: &[C64]) -> Result<ComplexMatrix> {
    let g = phi.wirtinger_gradient(q)?;
    Ok(pairing_of(&g))
}

pub fn pairing_of(g: &ComplexMatrix) -> ComplexMatrix {
    let m = g.cols() / 2;
    ComplexMatrix::from_fn(g.rows(), g.rows(), |a, b| {
        (0..m)
            .map(|i| (g[(a, i)] * g[(b, m + i)] + g[(a, m + i)] * g[(b, i)]) * 2.0)
            .sum()
    })
}

/// R[i][c] = ∂φ^c/∂q̄^i + M^j_{ī} ∂φ^c/∂q^j (m x k); zero iff φ is
/// J(M)-holomorphic at q.
pub fn holomorphicity_residual(
    phi: &MapEvaluator,
    matrix: &SkewMatrixFn,
    branch: Option<&SolutionBranch>,
    q: &[C64],
) -> Result<ComplexMatrix> {
    let mat = StructureField::new(matrix, branch).matrix_at(q)?;
    let g = phi.wirtinger_gradient(q)?;
    Ok(residual_from(&g, &mat))
}

pub(crate) fn residual_from(g: &ComplexMatrix, mat: &ComplexMatrix) -> ComplexMatrix {
    let m = mat.rows();
    ComplexMatrix::from_fn(m, g.rows(), |i, c| {
        g[(c, m + i)] + (0..m).map(|j| mat[(j, i)] * g[(c, j)]).sum::<C64>()
    })
}

/// Δφ = -4 Σ_i (Σ_j ∂M^i_{j̄}/∂q^j) ∂φ/∂q^i for J(M)-holomorphic φ.
pub fn laplacian_via_divj(
    phi: &MapEvaluator,
    matrix: &SkewMatrixFn,
    branch: Option<&SolutionBranch>,
    q: &[C64],
) -> Result<Vec<C64>> {
    let mat = StructureField::new(matrix, branch).matrix_at(q)?;
    let g = phi.wirtinger_gradient(q)?;
    let worst = residual_from(&g, &mat).max_abs();
    if worst > tol::HOLOMORPHIC_TOL {
        return Err(Error::NotHolomorphic(worst));
    }
    let cos = cosymplectic_residual(matrix, branch, q)?;
    let m = matrix.m();
    Ok((0..phi.k())
        .map(|c| (0..m).map(|i| cos[i] * g[(c, i)]).sum::<C64>() * -4.0)
        .collect())
}

/// Δφ = -dφ(J δJ) with δJ by finite differences.
pub fn laplacian_from_divergence(
    phi: &MapEvaluator,
    matrix: &SkewMatrixFn,
    branch: Option<&SolutionBranch>,
    q: &[C64],
) -> Result<Vec<C64>> {
    let field = StructureField::new(matrix, branch);
    let j = field.j_at(q)?;
    let div = divergence_delta_j(matrix, branch, q, None)?;
    let n = div.len();
    let v: Vec<f64> = (0..n).map(|a| (0..n).map(|b| j[(a, b)] * div[b]).sum()).collect();
    let xg = phi.x_gradient(q)?;
    Ok(xg
        .iter()
        .map(|row| -row.iter().zip(&v).map(|(g, x)| g * x).sum::<C64>())
        .collect())
}
