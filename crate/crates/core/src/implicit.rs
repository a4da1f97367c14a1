//! Implicit systems F(q, z) = 0 built from a z-dependent skew matrix M(z),
//! Newton continuation along solution branches, derivative transport and the
//! closed-form Laplacians of the solution components.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::complex_core::matrix::is_numerically_singular;
use crate::complex_core::{ComplexMatrix, ComplexPoly, QzPoint, Var, VarKind};
use crate::error::{Error, Result};
use crate::hermitian::{mu_to_matrix, w_coordinate_polys, MuVector, SkewMatrixFn};
use crate::tol;

#[derive(Clone, Debug, PartialEq)]
pub enum SystemForm {
    /// F = q - M(z) q̄ - h(z), with k = m.
    Canonical { h: Vec<ComplexPoly> },
    /// F = f(q - M(z) q̄, z), f a polynomial in (w, z).
    General { f: Vec<ComplexPoly> },
}

#[derive(Clone, Debug)]
pub struct ImplicitSystem {
    m: usize,
    k: usize,
    mu: MuVector,
    matrix: SkewMatrixFn,
    form: SystemForm,
    f_polys: Vec<ComplexPoly>,
    /// k x k, row = equation, column = variable
    k_polys: Vec<ComplexPoly>,
    /// k x 2m, columns q^1..q^m then q̄^1..q̄^m
    dq_polys: Vec<ComplexPoly>,
    dm_dz: Vec<SkewMatrixFn>,
}

fn q_index(v: Var, m: usize) -> bool {
    matches!(v.kind, VarKind::Q | VarKind::QBar) && v.index < m
}

impl ImplicitSystem {
    pub fn canonical(mu: MuVector, h: Vec<ComplexPoly>) -> Result<Self> {
        let m = mu.m();
        if h.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: h.len(),
            });
        }
        let k = m;
        for (a, p) in h.iter().enumerate() {
            if !p.only_uses(|v| v.kind == VarKind::Z && v.index < k) {
                return Err(Error::InvalidSystem(format!(
                    "h{} must be a polynomial in z1..z{k}",
                    a + 1
                )));
            }
        }
        let matrix = mu_to_matrix(&mu);
        let w = w_coordinate_polys(&matrix);
        let f_polys = w.iter().zip(&h).map(|(wi, hi)| wi - hi).collect();
        Self::assemble(m, k, mu, matrix, SystemForm::Canonical { h }, f_polys)
    }

    pub fn general(mu: MuVector, k: usize, f: Vec<ComplexPoly>) -> Result<Self> {
        let m = mu.m();
        if k == 0 || k > m {
            return Err(Error::InvalidSystem(format!("need 1 <= k <= m, got k={k}, m={m}")));
        }
        if f.len() != k {
            return Err(Error::LengthMismatch {
                expected: k,
                got: f.len(),
            });
        }
        for (a, p) in f.iter().enumerate() {
            let ok = p.only_uses(|v| {
                (v.kind == VarKind::Z && v.index < k) || (v.kind == VarKind::W && v.index < m)
            });
            if !ok {
                return Err(Error::InvalidSystem(format!(
                    "f{} must be a polynomial in w1..w{m}, z1..z{k}",
                    a + 1
                )));
            }
        }
        let matrix = mu_to_matrix(&mu);
        let subst: BTreeMap<Var, ComplexPoly> = w_coordinate_polys(&matrix)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (Var::w(i), p))
            .collect();
        let f_polys = f.iter().map(|p| p.substitute(&subst)).collect();
        Self::assemble(m, k, mu, matrix, SystemForm::General { f }, f_polys)
    }

    fn assemble(
        m: usize,
        k: usize,
        mu: MuVector,
        matrix: SkewMatrixFn,
        form: SystemForm,
        f_polys: Vec<ComplexPoly>,
    ) -> Result<Self> {
        for (t, p) in mu.entries().iter().enumerate() {
            if !p.only_uses(|v| v.kind == VarKind::Z && v.index < k) {
                return Err(Error::InvalidSystem(format!(
                    "mu{} must be a polynomial in z1..z{k}",
                    t + 1
                )));
            }
        }
        let f_polys: Vec<ComplexPoly> = f_polys
            .into_iter()
            .map(|p: ComplexPoly| {
                p.declare((0..m).flat_map(|i| [Var::q(i), Var::qbar(i)]))
                    .declare((0..k).map(Var::z))
            })
            .collect();
        let mut k_polys = Vec::with_capacity(k * k);
        let mut dq_polys = Vec::with_capacity(k * 2 * m);
        for p in &f_polys {
            debug_assert!(p.only_uses(|v| q_index(v, m) || (v.kind == VarKind::Z && v.index < k)));
            for b in 0..k {
                k_polys.push(p.derivative(Var::z(b)));
            }
            for i in 0..m {
                dq_polys.push(p.derivative(Var::q(i)));
            }
            for i in 0..m {
                dq_polys.push(p.derivative(Var::qbar(i)));
            }
        }
        let dm_dz = (0..k).map(|b| matrix.derivative(Var::z(b))).collect();
        Ok(ImplicitSystem {
            m,
            k,
            mu,
            matrix,
            form,
            f_polys,
            k_polys,
            dq_polys,
            dm_dz,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn mu(&self) -> &MuVector {
        &self.mu
    }
    pub fn matrix(&self) -> &SkewMatrixFn {
        &self.matrix
    }
    pub fn form(&self) -> &SystemForm {
        &self.form
    }
    pub fn is_canonical(&self) -> bool {
        matches!(self.form, SystemForm::Canonical { .. })
    }
    /// The polynomials F^a in (q, q̄, z).
    pub fn f_polys(&self) -> &[ComplexPoly] {
        &self.f_polys
    }
    /// The polynomials K^a_b = ∂F^a/∂z^b, row major.
    pub fn k_polys(&self) -> &[ComplexPoly] {
        &self.k_polys
    }

    fn check_point(&self, q: &[C64], z: &[C64]) -> Result<()> {
        if q.len() != self.m {
            return Err(Error::DimensionMismatch(format!("q has length {}, expected {}", q.len(), self.m)));
        }
        if z.len() != self.k {
            return Err(Error::DimensionMismatch(format!("z has length {}, expected {}", z.len(), self.k)));
        }
        Ok(())
    }

    pub fn eval_f(&self, q: &[C64], z: &[C64]) -> Result<Vec<C64>> {
        self.check_point(q, z)?;
        let pt = QzPoint::new(q, z);
        self.f_polys.iter().map(|p| p.eval(&pt)).collect()
    }

    pub fn jacobian_k(&self, q: &[C64], z: &[C64]) -> Result<ComplexMatrix> {
        self.check_point(q, z)?;
        let pt = QzPoint::new(q, z);
        let data = self.k_polys.iter().map(|p| p.eval(&pt)).collect::<Result<_>>()?;
        ComplexMatrix::new(self.k, self.k, data)
    }

    /// ∂F^a/∂q^I as a k x 2m matrix.
    pub fn df_dq(&self, q: &[C64], z: &[C64]) -> Result<ComplexMatrix> {
        self.check_point(q, z)?;
        let pt = QzPoint::new(q, z);
        let data = self.dq_polys.iter().map(|p| p.eval(&pt)).collect::<Result<_>>()?;
        ComplexMatrix::new(self.k, 2 * self.m, data)
    }

    /// K and det K, failing when K is numerically singular.
    pub fn checked_jacobian(&self, q: &[C64], z: &[C64]) -> Result<(ComplexMatrix, C64)> {
        let kmat = self.jacobian_k(q, z)?;
        let d = kmat.det()?;
        if is_numerically_singular(&kmat, d) {
            return Err(Error::SingularJacobian {
                det_abs: d.norm(),
                q: format_point(q),
            });
        }
        Ok((kmat, d))
    }

    /// ∂z^a/∂q^I = -(K^{-1})^a_α ∂F^α/∂q^I at a solution (q, z).
    pub fn dz_dq_at(&self, q: &[C64], z: &[C64]) -> Result<ComplexMatrix> {
        let (kmat, _) = self.checked_jacobian(q, z)?;
        let inv = kmat.inverse()?;
        Ok(inv.matmul(&self.df_dq(q, z)?)?.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matrix_at(&self, z: &[C64]) -> Result<ComplexMatrix> {
        self.matrix.eval(&QzPoint::z_only(z))
    }

    /// ∂M/∂z^b for b = 1..k.
    pub fn dmatrix_dz(&self, z: &[C64]) -> Result<Vec<ComplexMatrix>> {
        let pt = QzPoint::z_only(z);
        self.dm_dz.iter().map(|d| d.eval(&pt)).collect()
    }
}

pub(crate) fn format_point(q: &[C64]) -> String {
    let parts: Vec<String> = q.iter().map(|c| format!("{}{:+}j", c.re, c.im)).collect();
    format!("({})", parts.join(", "))
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Longest continuation step, in the Euclidean norm of q.
    pub continuation_step: f64,
    /// Smallest continuation step as a fraction of the path.
    pub min_step: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            newton_tol: tol::NEWTON_TOL,
            max_iter: tol::NEWTON_MAX_ITER,
            continuation_step: tol::CONTINUATION_STEP,
            min_step: tol::MIN_CONTINUATION_STEP,
        }
    }
}

/// A local solution z(q) of an implicit system, identified by its seed.
#[derive(Clone, Debug)]
pub struct SolutionBranch {
    system: Arc<ImplicitSystem>,
    q0: Vec<C64>,
    z0: Vec<C64>,
    settings: SolverSettings,
}

impl SolutionBranch {
    pub fn new(system: Arc<ImplicitSystem>, q0: Vec<C64>, z0: Vec<C64>) -> Result<Self> {
        Self::with_settings(system, q0, z0, SolverSettings::default())
    }

    pub fn with_settings(
        system: Arc<ImplicitSystem>,
        q0: Vec<C64>,
        z0: Vec<C64>,
        settings: SolverSettings,
    ) -> Result<Self> {
        let res = norm(&system.eval_f(&q0, &z0)?);
        if !(res < tol::SEED_TOL) {
            return Err(Error::InvalidSeed(res));
        }
        Ok(SolutionBranch {
            system,
            q0,
            z0,
            settings,
        })
    }

    pub fn system(&self) -> &ImplicitSystem {
        &self.system
    }
    pub fn system_arc(&self) -> &Arc<ImplicitSystem> {
        &self.system
    }
    pub fn seed_q(&self) -> &[C64] {
        &self.q0
    }
    pub fn seed_z(&self) -> &[C64] {
        &self.z0
    }
    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    /// Same system and settings, new seed.
    pub fn reseed(&self, q0: Vec<C64>, z0: Vec<C64>) -> Result<Self> {
        Self::with_settings(self.system.clone(), q0, z0, self.settings.clone())
    }

    pub fn residual(&self, q: &[C64], z: &[C64]) -> Result<f64> {
        Ok(norm(&self.system.eval_f(q, z)?))
    }

    /// Newton from `start`, then a few polishing steps while the residual
    /// keeps dropping.
    fn newton(&self, q: &[C64], start: &[C64]) -> Result<Vec<C64>> {
        let target = self.settings.newton_tol * tol::scale_of(q);
        let mut z = start.to_vec();
        let mut res = f64::INFINITY;
        for it in 0..self.settings.max_iter {
            let f = self.system.eval_f(q, &z)?;
            res = norm(&f);
            if !res.is_finite() {
                break;
            }
            if res < target {
                return self.polish(q, z, res);
            }
            let (kmat, _) = self.system.checked_jacobian(q, &z)?;
            let step = kmat.solve(&f)?;
            for (zi, s) in z.iter_mut().zip(step) {
                *zi -= s;
            }
            if it + 1 == self.settings.max_iter {
                res = norm(&self.system.eval_f(q, &z)?);
                if res < target {
                    return self.polish(q, z, res);
                }
            }
        }
        // stalling next to det K = 0 is reported as such
        if let Ok(d) = self.system.jacobian_k(q, &z).and_then(|k| k.det()) {
            if d.norm() < tol::SAMPLE_MIN_DET {
                return Err(Error::SingularJacobian {
                    det_abs: d.norm(),
                    q: format_point(q),
                });
            }
        }
        Err(Error::NoConvergence {
            iterations: self.settings.max_iter,
            residual: res,
            q: format_point(q),
        })
    }

    fn polish(&self, q: &[C64], mut z: Vec<C64>, mut res: f64) -> Result<Vec<C64>> {
        for _ in 0..4 {
            if res == 0.0 {
                break;
            }
            let f = self.system.eval_f(q, &z)?;
            let Ok((kmat, _)) = self.system.checked_jacobian(q, &z) else {
                break;
            };
            let step = kmat.solve(&f)?;
            let trial: Vec<C64> = z.iter().zip(step).map(|(a, s)| a - s).collect();
            let r = norm(&self.system.eval_f(q, &trial)?);
            if r < res {
                z = trial;
                res = r;
            } else {
                break;
            }
        }
        Ok(z)
    }

    /// Newton started at a nearby known value; no continuation.
    pub fn solve_near(&self, q: &[C64], guess: &[C64]) -> Result<Vec<C64>> {
        self.system.check_point(q, guess)?;
        self.newton(q, guess)
    }

    /// z(q) by straight-line continuation from the seed.
    pub fn solve_z(&self, q: &[C64]) -> Result<Vec<C64>> {
        self.system.check_point(q, &self.z0)?;
        let m = self.system.m;
        let delta: Vec<C64> = q.iter().zip(&self.q0).map(|(a, b)| a - b).collect();
        let dist = norm(&delta);
        if dist == 0.0 {
            return self.newton(q, &self.z0);
        }
        let max_dt = (self.settings.continuation_step / dist).min(1.0);
        let mut dt = max_dt;
        let mut t = 0.0;
        let mut z = self.z0.clone();
        while t < 1.0 {
            let t_new = (t + dt).min(1.0);
            let q_t: Vec<C64> = self.q0.iter().zip(&delta).map(|(a, d)| a + d * t_new).collect();
            let q_prev: Vec<C64> = self.q0.iter().zip(&delta).map(|(a, d)| a + d * t).collect();
            let mut pred = z.clone();
            if let Ok(dz) = self.system.dz_dq_at(&q_prev, &z) {
                let h = t_new - t;
                for (a, p) in pred.iter_mut().enumerate() {
                    for i in 0..m {
                        let dq = delta[i] * h;
                        *p += dz[(a, i)] * dq + dz[(a, m + i)] * dq.conj();
                    }
                }
            }
            let attempt = self.newton(&q_t, &pred).and_then(|zn| {
                let jump: Vec<C64> = zn.iter().zip(&pred).map(|(a, b)| a - b).collect();
                if norm(&jump) > 0.25 * tol::scale_of(&z) {
                    Err(Error::NoConvergence {
                        iterations: 0,
                        residual: norm(&jump),
                        q: format_point(&q_t),
                    })
                } else {
                    Ok(zn)
                }
            });
            match attempt {
                Ok(zn) => {
                    z = zn;
                    t = t_new;
                    dt = (dt * 2.0).min(max_dt);
                }
                Err(e) => {
                    dt *= 0.5;
                    if dt < self.settings.min_step {
                        return Err(e);
                    }
                }
            }
        }
        Ok(z)
    }

    /// dz/dq at the solution through q (k x 2m).
    pub fn dz_dq(&self, q: &[C64]) -> Result<ComplexMatrix> {
        let z = self.solve_z(q)?;
        self.system.dz_dq_at(q, &z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianFormula {
    /// −4 Σ_{i<j} C^{ab}_{ij} ∂M^i_{j̄}/∂z^b with C from the A-matrix.
    Lap2Prime,
    /// Bordered-determinant form divided by det K (canonical systems).
    LapFinal,
    /// m = 2 specialization.
    M2,
    /// m = 3 specialization.
    M3,
}

impl LaplacianFormula {
    pub const ALL: [LaplacianFormula; 4] = [
        LaplacianFormula::Lap2Prime,
        LaplacianFormula::LapFinal,
        LaplacianFormula::M2,
        LaplacianFormula::M3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LaplacianFormula::Lap2Prime => "lap2prime",
            LaplacianFormula::LapFinal => "lapfinal",
            LaplacianFormula::M2 => "m2",
            LaplacianFormula::M3 => "m3",
        }
    }

    pub fn applies_to(self, sys: &ImplicitSystem) -> bool {
        match self {
            LaplacianFormula::Lap2Prime => true,
            LaplacianFormula::LapFinal => sys.is_canonical(),
            LaplacianFormula::M2 => sys.is_canonical() && sys.m == 2,
            LaplacianFormula::M3 => sys.is_canonical() && sys.m == 3,
        }
    }
}

/// Closed-form Laplacian of z(q) at q.
pub fn laplacian_closed_form(
    branch: &SolutionBranch,
    q: &[C64],
    formula: LaplacianFormula,
) -> Result<Vec<C64>> {
    if !formula.applies_to(branch.system()) {
        return Err(inapplicable(formula, branch.system()));
    }
    let z = branch.solve_z(q)?;
    laplacian_formula_at(branch.system(), q, &z, formula)
}

fn inapplicable(formula: LaplacianFormula, sys: &ImplicitSystem) -> Error {
    Error::FormulaInapplicable(format!(
        "{} for a {} system with m={}",
        formula.name(),
        if sys.is_canonical() { "canonical" } else { "general" },
        sys.m
    ))
}

/// Evaluates a Laplacian formula at an arbitrary pair (q, z); at a solution
/// this is the Laplacian of the solution components.
pub fn laplacian_formula_at(
    sys: &ImplicitSystem,
    q: &[C64],
    z: &[C64],
    formula: LaplacianFormula,
) -> Result<Vec<C64>> {
    if !formula.applies_to(sys) {
        return Err(inapplicable(formula, sys));
    }
    let dm = sys.dmatrix_dz(z)?;
    match formula {
        LaplacianFormula::Lap2Prime => {
            let dz = sys.dz_dq_at(q, z)?;
            Ok(lap2prime(sys.m, sys.k, &dz, &dm))
        }
        LaplacianFormula::LapFinal => {
            let (kmat, d) = sys.checked_jacobian(q, z)?;
            lapfinal(sys.m, &kmat, d, &dm)
        }
        LaplacianFormula::M2 => {
            let (_, d) = sys.checked_jacobian(q, z)?;
            let four = C64::new(4.0, 0.0);
            Ok(vec![-four * dm[1][(0, 1)] / d, four * dm[0][(0, 1)] / d])
        }
        LaplacianFormula::M3 => {
            let (kmat, d) = sys.checked_jacobian(q, z)?;
            Ok(m3(&kmat, d, &dm))
        }
    }
}

fn lap2prime(m: usize, k: usize, dz: &ComplexMatrix, dm: &[ComplexMatrix]) -> Vec<C64> {
    let a_mat = |a: usize, i: usize| dz[(a, i)];
    (0..k)
        .map(|a| {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..m {
                for j in i + 1..m {
                    for (b, dmb) in dm.iter().enumerate() {
                        let c = a_mat(a, i) * a_mat(b, j) - a_mat(b, i) * a_mat(a, j);
                        s += c * dmb[(i, j)];
                    }
                }
            }
            s * -4.0
        })
        .collect()
}

fn lapfinal(m: usize, kmat: &ComplexMatrix, d: C64, dm: &[ComplexMatrix]) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(m);
    for a in 0..m {
        let cols: Vec<usize> = (0..m).filter(|&b| b != a).collect();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..m {
            for j in i + 1..m {
                let rest: Vec<usize> = (0..m).filter(|&r| r != i && r != j).collect();
                let block = ComplexMatrix::from_fn(m - 1, m - 1, |r, c| {
                    if r == 0 {
                        dm[cols[c]][(i, j)]
                    } else {
                        kmat[(rest[r - 1], cols[c])]
                    }
                });
                let sign = if (a + i + j) % 2 == 0 { 1.0 } else { -1.0 };
                s += block.det()? * sign;
            }
        }
        out.push(s * 4.0 / d);
    }
    Ok(out)
}

fn m3(kmat: &ComplexMatrix, d: C64, dm: &[ComplexMatrix]) -> Vec<C64> {
    // mu1 = M[0][1], mu2 = M[0][2], mu3 = M[1][2]
    let mu = |t: usize, b: usize| match t {
        0 => dm[b][(0, 1)],
        1 => dm[b][(0, 2)],
        _ => dm[b][(1, 2)],
    };
    let pair = |t: usize, row: usize, b1: usize, b2: usize| {
        mu(t, b1) * kmat[(row, b2)] - mu(t, b2) * kmat[(row, b1)]
    };
    let block = |b1, b2| pair(0, 2, b1, b2) - pair(1, 1, b1, b2) + pair(2, 0, b1, b2);
    [(1, 2), (2, 0), (0, 1)]
        .iter()
        .map(|&(b1, b2)| -block(b1, b2) * 4.0 / d)
        .collect()
}

/// Rewrites a general system with k = m whose f is affine in w, with a
/// w-linear part independent of z, into canonical form.
pub fn canonicalize(sys: &ImplicitSystem, q0: &[C64], z0: &[C64]) -> Result<ImplicitSystem> {
    let f = match &sys.form {
        SystemForm::Canonical { .. } => return Ok(sys.clone()),
        SystemForm::General { f } => f,
    };
    let m = sys.m;
    if sys.k != m {
        return Err(Error::FormulaInapplicable(format!(
            "canonical form needs k = m, got k={}, m={m}",
            sys.k
        )));
    }
    for p in f {
        for (mono, _) in p.terms() {
            let w_deg: u32 = mono
                .pairs()
                .iter()
                .filter(|(v, _)| v.kind == VarKind::W)
                .map(|&(_, e)| e)
                .sum();
            if w_deg > 1 {
                return Err(Error::NotAffineInW);
            }
        }
    }
    let zero_w: BTreeMap<Var, ComplexPoly> = (0..m).map(|i| (Var::w(i), ComplexPoly::zero())).collect();
    let mut lin = ComplexMatrix::zeros(m, m);
    for (a, p) in f.iter().enumerate() {
        for i in 0..m {
            let d = p.derivative(Var::w(i));
            if !d.is_constant() {
                return Err(Error::NonConstantWJacobian);
            }
            lin[(a, i)] = d.eval(&QzPoint::default())?;
        }
    }
    sys.eval_f(q0, z0)?;
    let d = lin.det()?;
    if is_numerically_singular(&lin, d) {
        return Err(Error::SingularWJacobian);
    }
    let inv = lin.inverse()?;
    let affine: Vec<ComplexPoly> = f.iter().map(|p| p.substitute(&zero_w)).collect();
    let h = (0..m)
        .map(|a| {
            let mut acc = ComplexPoly::zero();
            for (b, c) in affine.iter().enumerate() {
                if inv[(a, b)] != C64::new(0.0, 0.0) {
                    acc = acc - c.scale(inv[(a, b)]);
                }
            }
            trimmed(&acc)
        })
        .collect();
    ImplicitSystem::canonical(sys.mu.clone(), h)
}

/// Same polynomial with the declared set reduced to the variables in use.
fn trimmed(p: &ComplexPoly) -> ComplexPoly {
    ComplexPoly::from_terms(p.terms().map(|(m, c)| (m.clone(), *c))).expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn identity_system(m: usize) -> Arc<ImplicitSystem> {
        let h = (0..m).map(ComplexPoly::z).collect();
        Arc::new(ImplicitSystem::canonical(MuVector::zeros(m), h).unwrap())
    }

    fn lnsnc() -> Arc<ImplicitSystem> {
        let mu = MuVector::new(3, vec![ComplexPoly::z(1), ComplexPoly::z(0), ComplexPoly::zero()]).unwrap();
        let h = vec![ComplexPoly::z(2), ComplexPoly::z(2), ComplexPoly::z(1)];
        Arc::new(ImplicitSystem::canonical(mu, h).unwrap())
    }

    fn lnsnc_closed(q: &[C64]) -> Vec<C64> {
        let qb: Vec<C64> = q.iter().map(|x| x.conj()).collect();
        let det = qb[0] * qb[0] + qb[0] * qb[1] + qb[2];
        let z1 = (q[0] - q[1] - q[2] * (qb[0] + qb[1])) / det;
        let z2 = q[2] + z1 * qb[0];
        let z3 = q[1] + z2 * qb[0];
        vec![z1, z2, z3]
    }

    #[test]
    fn identity_system_basics() {
        let sys = identity_system(3);
        let q = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
        let f = sys.eval_f(&q, &q).unwrap();
        assert!(f.iter().all(|x| x.norm() == 0.0));
        let k = sys.jacobian_k(&q, &q).unwrap();
        assert_eq!(k, ComplexMatrix::identity(3).scale(c(-1.0, 0.0)));
        let seed = vec![c(0.0, 0.0); 3];
        let br = SolutionBranch::new(sys, seed.clone(), seed).unwrap();
        let z = br.solve_z(&q).unwrap();
        for (a, b) in z.iter().zip(&q) {
            assert!((a - b).norm() < 1e-12);
        }
        let dz = br.dz_dq(&q).unwrap();
        for a in 0..3 {
            for i in 0..6 {
                let expect = if a == i { 1.0 } else { 0.0 };
                assert!((dz[(a, i)] - c(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn seed_must_satisfy_system() {
        let sys = identity_system(2);
        let q = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let z = vec![c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(SolutionBranch::new(sys, q, z), Err(Error::InvalidSeed(_))));
    }

    #[test]
    fn lnsnc_det_and_solution() {
        let sys = lnsnc();
        let q0 = vec![c(0.6, 0.2), c(-0.3, 0.5), c(0.4, -0.7)];
        let z0 = lnsnc_closed(&q0);
        assert!(norm(&sys.eval_f(&q0, &z0).unwrap()) < 1e-13);
        let qb: Vec<C64> = q0.iter().map(|x| x.conj()).collect();
        let expect = qb[0] * qb[0] + qb[0] * qb[1] + qb[2];
        assert!((sys.jacobian_k(&q0, &z0).unwrap().det().unwrap() - expect).norm() < 1e-13);

        let br = SolutionBranch::new(sys, q0, z0).unwrap();
        let q = vec![c(1.1, -0.4), c(0.2, 0.9), c(-0.3, -0.2)];
        let z = br.solve_z(&q).unwrap();
        let zc = lnsnc_closed(&q);
        for (a, b) in z.iter().zip(&zc) {
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn laplacians_of_lnsnc() {
        let sys = lnsnc();
        let q = vec![c(0.6, 0.2), c(-0.3, 0.5), c(0.4, -0.7)];
        let z = lnsnc_closed(&q);
        let qb1 = q[0].conj();
        let d = sys.jacobian_k(&q, &z).unwrap().det().unwrap();
        let lap = laplacian_formula_at(&sys, &q, &z, LaplacianFormula::Lap2Prime).unwrap();
        // these values follow from differentiating the closed form
        let expect = [c(0.0, 0.0), c(4.0, 0.0) / d, qb1 * 8.0 / d];
        for (a, b) in lap.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0), "{a} vs {b}");
        }
        for f in [LaplacianFormula::LapFinal, LaplacianFormula::M3] {
            let other = laplacian_formula_at(&sys, &q, &z, f).unwrap();
            for (a, b) in other.iter().zip(&lap) {
                assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
            }
        }
        assert!(matches!(
            laplacian_formula_at(&sys, &q, &z, LaplacianFormula::M2),
            Err(Error::FormulaInapplicable(_))
        ));
    }

    #[test]
    fn m2_specialization() {
        // mu = z1 z2 + z2^2, h = (z1 + z2^2, z2 - z1^2)
        let mu = MuVector::new(2, vec![ComplexPoly::z(0) * ComplexPoly::z(1) + ComplexPoly::z(1).pow(2)]).unwrap();
        let h = vec![
            ComplexPoly::z(0) + ComplexPoly::z(1).pow(2),
            ComplexPoly::z(1) - ComplexPoly::z(0).pow(2),
        ];
        let sys = ImplicitSystem::canonical(mu, h).unwrap();
        let q = vec![c(0.3, -0.2), c(0.1, 0.7)];
        let z = vec![c(-0.4, 0.1), c(0.2, 0.3)];
        let base = laplacian_formula_at(&sys, &q, &z, LaplacianFormula::Lap2Prime).unwrap();
        for f in [LaplacianFormula::LapFinal, LaplacianFormula::M2] {
            let got = laplacian_formula_at(&sys, &q, &z, f).unwrap();
            for (a, b) in got.iter().zip(&base) {
                assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn k_equals_one_gives_zero_laplacian() {
        let mu = MuVector::new(3, vec![ComplexPoly::z(0), ComplexPoly::z(0).pow(2), ComplexPoly::real(1.0)]).unwrap();
        let f = vec![ComplexPoly::w(0) + ComplexPoly::z(0) * ComplexPoly::w(2) - ComplexPoly::z(0).pow(3)];
        let sys = ImplicitSystem::general(mu, 1, f).unwrap();
        let q = vec![c(0.2, 0.1), c(-0.3, 0.4), c(0.5, 0.0)];
        let lap = laplacian_formula_at(&sys, &q, &[c(0.3, 0.2)], LaplacianFormula::Lap2Prime).unwrap();
        assert_eq!(lap, vec![c(0.0, 0.0)]);
        assert!(matches!(
            laplacian_formula_at(&sys, &q, &[c(0.3, 0.2)], LaplacianFormula::LapFinal),
            Err(Error::FormulaInapplicable(_))
        ));
    }

    #[test]
    fn canonicalize_cases() {
        let mu = MuVector::new(2, vec![ComplexPoly::z(0)]).unwrap();
        let h = vec![ComplexPoly::z(1), ComplexPoly::z(0) * ComplexPoly::z(1)];
        let q0 = vec![c(0.0, 0.0); 2];
        let z0 = vec![c(0.0, 0.0); 2];

        let f: Vec<ComplexPoly> = h.iter().enumerate().map(|(i, p)| ComplexPoly::w(i) - p).collect();
        let general = ImplicitSystem::general(mu.clone(), 2, f).unwrap();
        let can = canonicalize(&general, &q0, &z0).unwrap();
        assert_eq!(can.form(), &SystemForm::Canonical { h: h.clone() });

        let f2: Vec<ComplexPoly> = h
            .iter()
            .enumerate()
            .map(|(i, p)| 2.0 * ComplexPoly::w(i) - p)
            .collect();
        let can2 = canonicalize(&ImplicitSystem::general(mu.clone(), 2, f2).unwrap(), &q0, &z0).unwrap();
        let halved: Vec<ComplexPoly> = h.iter().map(|p| 0.5 * p.clone()).collect();
        assert_eq!(can2.form(), &SystemForm::Canonical { h: halved });

        let torus = vec![
            ComplexPoly::w(0).pow(3) + ComplexPoly::w(0) - ComplexPoly::z(0),
            ComplexPoly::w(1) - ComplexPoly::z(1),
        ];
        let sys = ImplicitSystem::general(mu.clone(), 2, torus).unwrap();
        assert_eq!(canonicalize(&sys, &q0, &z0).unwrap_err(), Error::NotAffineInW);

        let singular = vec![ComplexPoly::w(0) - ComplexPoly::z(0), ComplexPoly::w(0) - ComplexPoly::z(1)];
        let sys = ImplicitSystem::general(mu, 2, singular).unwrap();
        assert_eq!(canonicalize(&sys, &q0, &z0).unwrap_err(), Error::SingularWJacobian);
    }

    #[test]
    fn rejects_bad_systems() {
        let mu = MuVector::new(2, vec![ComplexPoly::qbar(0)]).unwrap();
        let h = vec![ComplexPoly::z(0), ComplexPoly::z(1)];
        assert!(matches!(ImplicitSystem::canonical(mu, h), Err(Error::InvalidSystem(_))));
        let mu = MuVector::zeros(2);
        assert!(matches!(
            ImplicitSystem::canonical(mu.clone(), vec![ComplexPoly::z(0)]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            ImplicitSystem::general(mu, 3, vec![]),
            Err(Error::InvalidSystem(_))
        ));
    }

    #[test]
    fn singular_point_reports_singular_jacobian() {
        let sys = lnsnc();
        let q0 = vec![c(0.6, 0.2), c(-0.3, 0.5), c(0.4, -0.7)];
        let br = SolutionBranch::new(sys.clone(), q0.clone(), lnsnc_closed(&q0)).unwrap();
        // choose q3 so that qb1^2 + qb1 qb2 + qb3 = 0
        let (q1, q2) = (c(0.5, 0.5), c(0.2, -0.1));
        let qb3 = -(q1.conj() * q1.conj() + q1.conj() * q2.conj());
        let q = vec![q1, q2, qb3.conj()];
        let err = br.solve_z(&q).unwrap_err();
        assert!(err.is_solver_failure(), "{err:?}");
    }
}
