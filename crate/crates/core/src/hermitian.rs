//! Hermitian structures on R^{2m} parametrized by skew-symmetric complex
//! matrices: μ -> M -> isotropic frame -> real J.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::complex_core::matrix::is_numerically_singular;
use crate::complex_core::{ComplexMatrix, ComplexPoly, QzPoint, Var, VarKind, VarSource};
use crate::error::{Error, Result};
use crate::implicit::SolutionBranch;
use crate::tol;

/// The m(m-1)/2 independent entries of a skew matrix, strict upper triangle
/// read row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct MuVector {
    m: usize,
    entries: Vec<ComplexPoly>,
}

impl MuVector {
    pub fn len_for(m: usize) -> usize {
        m * (m.saturating_sub(1)) / 2
    }

    pub fn new(m: usize, entries: Vec<ComplexPoly>) -> Result<Self> {
        if m < 2 {
            return Err(Error::DimensionMismatch(format!("need m >= 2, got {m}")));
        }
        if entries.len() != Self::len_for(m) {
            return Err(Error::LengthMismatch {
                expected: Self::len_for(m),
                got: entries.len(),
            });
        }
        Ok(MuVector { m, entries })
    }

    pub fn constant(m: usize, values: &[C64]) -> Result<Self> {
        Self::new(m, values.iter().map(|&c| ComplexPoly::constant(c)).collect())
    }

    pub fn zeros(m: usize) -> Self {
        MuVector {
            m,
            entries: vec![ComplexPoly::zero(); Self::len_for(m)],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[ComplexPoly] {
        &self.entries
    }

    /// Position of the (i, j) entry, i < j, in the layout.
    pub fn position(m: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < m);
        i * (2 * m - i - 1) / 2 + (j - i - 1)
    }
}

/// m x m skew-symmetric matrix of polynomials. Entry (i, j) is M^i_{j̄}.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrixFn {
    m: usize,
    entries: Vec<ComplexPoly>,
}

impl SkewMatrixFn {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &ComplexPoly {
        &self.entries[i * self.m + j]
    }

    pub fn eval(&self, src: &impl VarSource) -> Result<ComplexMatrix> {
        let data = self.entries.iter().map(|p| p.eval(src)).collect::<Result<_>>()?;
        ComplexMatrix::new(self.m, self.m, data)
    }

    pub fn derivative(&self, v: Var) -> SkewMatrixFn {
        SkewMatrixFn {
            m: self.m,
            entries: self.entries.iter().map(|p| p.derivative(v)).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(ComplexPoly::is_constant)
    }

    pub fn uses_kind(&self, kind: VarKind) -> bool {
        self.entries
            .iter()
            .any(|p| p.support().iter().any(|v| v.kind == kind))
    }

    /// Structural skew-symmetry check.
    pub fn is_skew(&self) -> bool {
        (0..self.m).all(|i| {
            self.entry(i, i).is_zero()
                && (i + 1..self.m).all(|j| {
                    let s = self.entry(i, j) + self.entry(j, i);
                    s.is_zero()
                })
        })
    }

    /// Wraps a constant skew matrix.
    pub fn from_constant(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let mut mu = Vec::with_capacity(MuVector::len_for(n));
        for i in 0..n {
            for j in i + 1..n {
                mu.push(ComplexPoly::constant(m[(i, j)]));
            }
        }
        let out = mu_to_matrix(&MuVector::new(n, mu)?);
        if out.eval(&QzPoint::default())?.sub(m)?.max_abs() > 0.0 {
            return Err(Error::DimensionMismatch("matrix is not skew-symmetric".into()));
        }
        Ok(out)
    }
}

pub fn mu_to_matrix(mu: &MuVector) -> SkewMatrixFn {
    let m = mu.m;
    let mut entries = vec![ComplexPoly::zero(); m * m];
    let mut t = 0;
    for i in 0..m {
        for j in i + 1..m {
            entries[i * m + j] = mu.entries[t].clone();
            entries[j * m + i] = -&mu.entries[t];
            t += 1;
        }
    }
    SkewMatrixFn { m, entries }
}

pub fn matrix_to_mu(matrix: &SkewMatrixFn) -> MuVector {
    let m = matrix.m;
    let mut entries = Vec::with_capacity(MuVector::len_for(m));
    for i in 0..m {
        for j in i + 1..m {
            entries.push(matrix.entry(i, j).clone());
        }
    }
    MuVector { m, entries }
}

/// w^i = q^i - M^i_{j̄} q̄^j as polynomials.
pub fn w_coordinate_polys(matrix: &SkewMatrixFn) -> Vec<ComplexPoly> {
    let m = matrix.m;
    (0..m)
        .map(|i| {
            let mut w = ComplexPoly::q(i);
            for j in 0..m {
                let e = matrix.entry(i, j);
                if !e.is_zero() {
                    w = w - e * &ComplexPoly::qbar(j);
                }
            }
            w
        })
        .collect()
}

/// Covectors e^i = dq^i - M^i_{j̄} dq̄^j in the (dq, dq̄) basis and vectors
/// e_ī = ∂/∂q̄^i + M^j_{ī} ∂/∂q^j in the (∂q, ∂q̄) basis.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianFrame {
    pub m: usize,
    pub covectors: Vec<Vec<C64>>,
    pub vectors: Vec<Vec<C64>>,
}

impl HermitianFrame {
    pub fn from_matrix(mat: &ComplexMatrix) -> Self {
        let m = mat.rows();
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let covectors = (0..m)
            .map(|i| {
                let mut v = vec![zero; 2 * m];
                v[i] = one;
                for j in 0..m {
                    v[m + j] = -mat[(i, j)];
                }
                v
            })
            .collect();
        let vectors = (0..m)
            .map(|i| {
                let mut v = vec![zero; 2 * m];
                v[m + i] = one;
                for j in 0..m {
                    v[j] = mat[(j, i)];
                }
                v
            })
            .collect();
        HermitianFrame {
            m,
            covectors,
            vectors,
        }
    }

    /// Complex bilinear extension of the Euclidean inner product on
    /// covectors written in the (dq, dq̄) basis.
    pub fn bilinear(&self, a: &[C64], b: &[C64]) -> C64 {
        let m = self.m;
        (0..m).map(|k| (a[k] * b[m + k] + a[m + k] * b[k]) * 2.0).sum()
    }

    /// max |<e^i, e^j>| over all pairs.
    pub fn isotropy_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.covectors {
            for b in &self.covectors {
                worst = worst.max(self.bilinear(a, b).norm());
            }
        }
        worst
    }

    /// max |e^i(e_j̄)|.
    pub fn pairing_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.covectors {
            for v in &self.vectors {
                let p: C64 = a.iter().zip(v).map(|(x, y)| x * y).sum();
                worst = worst.max(p.norm());
            }
        }
        worst
    }

    /// The (0,1) vectors in the real coordinate basis ∂/∂x^1..∂/∂x^{2m}.
    pub fn vectors_in_x_basis(&self) -> Vec<Vec<C64>> {
        self.vectors.iter().map(|v| wirtinger_vector_to_x(v)).collect()
    }
}

/// a ∂/∂q + b ∂/∂q̄ -> ((a+b)/2) ∂/∂x + (i(b-a)/2) ∂/∂y per coordinate.
pub fn wirtinger_vector_to_x(v: &[C64]) -> Vec<C64> {
    let m = v.len() / 2;
    let mut out = Vec::with_capacity(2 * m);
    for j in 0..m {
        let (a, b) = (v[j], v[m + j]);
        out.push((a + b) * 0.5);
        out.push(C64::i() * (b - a) * 0.5);
    }
    out
}

pub fn isotropic_frame(matrix: &SkewMatrixFn, at: &impl VarSource) -> Result<HermitianFrame> {
    Ok(HermitianFrame::from_matrix(&matrix.eval(at)?))
}

/// Real 2m x 2m matrix of J in the basis ∂/∂x^1..∂/∂x^{2m}, where
/// q^j = x^{2j-1} + i x^{2j}. J is -i on the span of the e_ī.
pub fn real_j_matrix(mat: &ComplexMatrix) -> Result<DMatrix<f64>> {
    let m = mat.rows();
    let n = 2 * m;
    let frame = HermitianFrame::from_matrix(mat);
    let low = frame.vectors_in_x_basis();
    let basis = ComplexMatrix::from_fn(n, n, |r, c| {
        if c < m {
            low[c][r]
        } else {
            low[c - m][r].conj()
        }
    });
    let d = basis.det()?;
    if is_numerically_singular(&basis, d) {
        return Err(Error::DegenerateFrame { dim: n });
    }
    let inv = basis.inverse().map_err(|_| Error::DegenerateFrame { dim: n })?;
    let eig = ComplexMatrix::from_fn(n, n, |r, c| {
        let e = if c < m { -C64::i() } else { C64::i() };
        basis[(r, c)] * e
    });
    let j = eig.matmul(&inv)?;
    Ok(DMatrix::from_fn(n, n, |r, c| j[(r, c)].re))
}

/// det[u_1, J u_1, ..., u_m, J u_m] where u_k - i J u_k spans the (1,0)
/// space; positive for a positively oriented structure.
pub fn orientation_det(mat: &ComplexMatrix) -> f64 {
    let m = mat.rows();
    let frame = HermitianFrame::from_matrix(mat);
    let up: Vec<Vec<C64>> = frame
        .vectors_in_x_basis()
        .into_iter()
        .map(|v| v.into_iter().map(|c| c.conj()).collect())
        .collect();
    DMatrix::from_fn(2 * m, 2 * m, |r, c| {
        let v = &up[c / 2];
        if c % 2 == 0 {
            v[r].re
        } else {
            -v[r].im
        }
    })
    .determinant()
}

/// A structure M, possibly depending on z through a solution branch.
#[derive(Clone, Copy, Debug)]
pub struct StructureField<'a> {
    pub matrix: &'a SkewMatrixFn,
    pub branch: Option<&'a SolutionBranch>,
}

impl<'a> StructureField<'a> {
    pub fn new(matrix: &'a SkewMatrixFn, branch: Option<&'a SolutionBranch>) -> Self {
        StructureField { matrix, branch }
    }

    pub fn of_branch(branch: &'a SolutionBranch) -> Self {
        StructureField {
            matrix: branch.system().matrix(),
            branch: Some(branch),
        }
    }

    pub fn m(&self) -> usize {
        self.matrix.m()
    }

    /// z(q) when M depends on z, otherwise empty.
    pub fn z_at(&self, q: &[C64]) -> Result<Vec<C64>> {
        if !self.matrix.uses_kind(VarKind::Z) {
            return Ok(Vec::new());
        }
        match self.branch {
            Some(b) => b.solve_z(q),
            None => Err(Error::InvalidSystem(
                "the structure depends on z but no solution branch was given".into(),
            )),
        }
    }

    fn z_near(&self, q: &[C64], guess: &[C64]) -> Result<Vec<C64>> {
        match self.branch {
            Some(b) if !guess.is_empty() => b.solve_near(q, guess),
            _ => Ok(Vec::new()),
        }
    }

    pub fn matrix_with_z(&self, q: &[C64], z: &[C64]) -> Result<ComplexMatrix> {
        self.matrix.eval(&QzPoint::new(q, z))
    }

    pub fn matrix_at(&self, q: &[C64]) -> Result<ComplexMatrix> {
        let z = self.z_at(q)?;
        self.matrix_with_z(q, &z)
    }

    pub fn j_at(&self, q: &[C64]) -> Result<DMatrix<f64>> {
        real_j_matrix(&self.matrix_at(q)?)
    }

    /// ∂M/∂q^j for j = 1..m, through z(q) when M depends on z.
    pub fn dmatrix_dq(&self, q: &[C64]) -> Result<Vec<ComplexMatrix>> {
        let m = self.m();
        let z = self.z_at(q)?;
        let pt = QzPoint::new(q, &z);
        let dz = match (self.branch, z.is_empty()) {
            (Some(b), false) => Some(b.system().dz_dq_at(q, &z)?),
            _ => None,
        };
        let dm_dz: Vec<ComplexMatrix> = match &dz {
            Some(d) => (0..d.rows())
                .map(|b| self.matrix.derivative(Var::z(b)).eval(&pt))
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        (0..m)
            .map(|j| {
                let mut out = self.matrix.derivative(Var::q(j)).eval(&pt)?;
                if let Some(d) = &dz {
                    for (b, dmb) in dm_dz.iter().enumerate() {
                        let s = d[(b, j)];
                        for r in 0..m {
                            for c in 0..m {
                                out[(r, c)] += dmb[(r, c)] * s;
                            }
                        }
                    }
                }
                Ok(out)
            })
            .collect()
    }
}

/// i-th component Σ_j ∂M^i_{j̄}/∂q^j; zero everywhere iff J is cosymplectic.
pub fn cosymplectic_residual(
    matrix: &SkewMatrixFn,
    branch: Option<&SolutionBranch>,
    q: &[C64],
) -> Result<Vec<C64>> {
    let field = StructureField::new(matrix, branch);
    let dm = field.dmatrix_dq(q)?;
    let m = field.m();
    Ok((0..m).map(|i| (0..m).map(|j| dm[j][(i, j)]).sum()).collect())
}

/// (δJ)^a = Σ_i ∂J^a_i/∂x^i by central differences; `h` defaults to
/// 1e-5 max(1, |q|).
pub fn divergence_delta_j(
    matrix: &SkewMatrixFn,
    branch: Option<&SolutionBranch>,
    q: &[C64],
    h: Option<f64>,
) -> Result<Vec<f64>> {
    let field = StructureField::new(matrix, branch);
    let m = field.m();
    let h = h.unwrap_or(tol::FD_STEP_DIVERGENCE * tol::scale_of(q));
    let z0 = field.z_at(q)?;
    let j_near = |dq: C64, i: usize| -> Result<DMatrix<f64>> {
        let mut qs = q.to_vec();
        qs[i] += dq;
        let z = field.z_near(&qs, &z0)?;
        real_j_matrix(&field.matrix_with_z(&qs, &z)?)
    };
    let mut div = vec![0.0; 2 * m];
    for x in 0..2 * m {
        let dir = if x % 2 == 0 { C64::new(h, 0.0) } else { C64::new(0.0, h) };
        let plus = j_near(dir, x / 2).map_err(|e| Error::StepTooLarge(e.to_string()))?;
        let minus = j_near(-dir, x / 2).map_err(|e| Error::StepTooLarge(e.to_string()))?;
        for (a, d) in div.iter_mut().enumerate() {
            *d += (plus[(a, x)] - minus[(a, x)]) / (2.0 * h);
        }
    }
    Ok(div)
}

/// w(q) = q - M(z(q)) q̄.
pub fn w_coordinates(
    matrix: &SkewMatrixFn,
    branch: Option<&SolutionBranch>,
    q: &[C64],
) -> Result<Vec<C64>> {
    let mat = StructureField::new(matrix, branch).matrix_at(q)?;
    let m = matrix.m();
    Ok((0..m)
        .map(|i| q[i] - (0..m).map(|j| mat[(i, j)] * q[j].conj()).sum::<C64>())
        .collect())
}
