//! Built-in example systems with seeds, closed-form solutions where known,
//! named holomorphic postcompositions, and expected properties.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::complex_core::{polynomial_roots, univariate_coefficients, ComplexPoly, Var};
use crate::error::{Error, Result};
use crate::hermitian::MuVector;
use crate::holo::{DiffMode, MapEvaluator};
use crate::implicit::{ImplicitSystem, SolutionBranch};

pub const EXAMPLE_NAMES: [&str; 7] = ["LSnotC", "LSC", "LNSNC", "family3", "family4", "glob1", "glob2"];

/// Choice of the free entry μ1 in the family examples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mu1Variant {
    /// μ1 = z1 + z2: the structure varies along z2 as well
    #[default]
    Mixed,
    /// μ1 = z1
    Z1Only,
}

impl Mu1Variant {
    pub fn name(self) -> &'static str {
        match self {
            Mu1Variant::Mixed => "mixed",
            Mu1Variant::Z1Only => "z1only",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mixed" => Ok(Mu1Variant::Mixed),
            "z1only" | "z1" => Ok(Mu1Variant::Z1Only),
            _ => Err(Error::Parse(format!("unknown variant {s:?}; expected mixed or z1only"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExampleOptions {
    /// dimension for the examples defined for every m ≥ 3
    pub m: Option<usize>,
    pub mu1: Mu1Variant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub q: Vec<C64>,
    pub z: Vec<C64>,
}

/// ψ(z) applied to the solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMap {
    pub name: String,
    pub psi: ComplexPoly,
    pub description: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Property {
    Harmonic,
    Hwc,
    Holomorphic,
    Cosymplectic,
    Superminimal,
    FiberSpanDim(usize),
    Kahler,
    Full,
    Annihilators(usize),
    ReducedFull,
    RadialInvariant,
    Submersive,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Harmonic => write!(f, "harmonic"),
            Property::Hwc => write!(f, "hwc"),
            Property::Holomorphic => write!(f, "holomorphic"),
            Property::Cosymplectic => write!(f, "cosymplectic"),
            Property::Superminimal => write!(f, "superminimal"),
            Property::FiberSpanDim(d) => write!(f, "fiber_span_dim={d}"),
            Property::Kahler => write!(f, "kahler"),
            Property::Full => write!(f, "full"),
            Property::Annihilators(n) => write!(f, "annihilators={n}"),
            Property::ReducedFull => write!(f, "reduced_full"),
            Property::RadialInvariant => write!(f, "radial_invariant"),
            Property::Submersive => write!(f, "submersive"),
        }
    }
}

/// One row of the expected-property table. `subject` is a component
/// (`z1`, `z2`, ...), a named postcomposition (`phi`, `phi_tilde`), or `J`
/// for properties of the structure itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedProperty {
    pub subject: String,
    pub property: Property,
    pub verdict: bool,
    pub reason: String,
}

fn expect(subject: &str, property: Property, verdict: bool, reason: &str) -> ExpectedProperty {
    ExpectedProperty {
        subject: subject.into(),
        property,
        verdict,
        reason: reason.into(),
    }
}

type BackSub = fn(&[C64], C64, Mu1Variant) -> Vec<C64>;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub summary: String,
    pub m: usize,
    pub variant: Option<Mu1Variant>,
    pub system: Arc<ImplicitSystem>,
    /// ordered by decreasing |det K|
    pub seeds: Vec<Seed>,
    /// all components of z(q), when known explicitly
    pub closed_form: Option<MapEvaluator>,
    pub postcompositions: Vec<NamedMap>,
    pub expected: Vec<ExpectedProperty>,
    /// scalar system f(w(q, z1), z1) = 0 satisfied by z1, when μ depends
    /// on z1 alone
    pub scalar_reduction: Option<Arc<ImplicitSystem>>,
    /// radius of the ball around the first seed used for domain samples
    pub sample_radius: f64,
}

/// Where a subject map gets its values from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapSource {
    ClosedForm,
    Branch(usize),
}

impl CatalogEntry {
    pub fn branch(&self, seed_index: usize) -> Result<SolutionBranch> {
        let s = self.seeds.get(seed_index).ok_or_else(|| {
            Error::IndexOutOfRange(format!("seed {seed_index} of {} for {}", self.seeds.len(), self.name))
        })?;
        SolutionBranch::new(self.system.clone(), s.q.clone(), s.z.clone())
    }

    /// Branch of the scalar reduction through the given seed.
    pub fn scalar_branch(&self, seed_index: usize) -> Result<Option<SolutionBranch>> {
        let Some(sys) = &self.scalar_reduction else {
            return Ok(None);
        };
        let s = self.seeds.get(seed_index).ok_or_else(|| {
            Error::IndexOutOfRange(format!("seed {seed_index} of {} for {}", self.seeds.len(), self.name))
        })?;
        Ok(Some(SolutionBranch::new(sys.clone(), s.q.clone(), vec![s.z[0]])?))
    }

    pub fn postcomposition(&self, name: &str) -> Option<&NamedMap> {
        self.postcompositions.iter().find(|p| p.name == name)
    }

    /// Names of all subjects that are maps (components and postcompositions).
    pub fn map_subjects(&self) -> Vec<String> {
        let mut out: Vec<String> = (1..=self.system.k()).map(|a| format!("z{a}")).collect();
        out.extend(self.postcompositions.iter().map(|p| p.name.clone()));
        out
    }

    /// The holomorphic polynomial ψ(z) behind a subject name.
    pub fn subject_psi(&self, subject: &str) -> Result<ComplexPoly> {
        if let Some(p) = self.postcomposition(subject) {
            return Ok(p.psi.clone());
        }
        let v: Var = subject
            .parse()
            .map_err(|_| Error::UnknownExample(format!("{}/{subject}", self.name)))?;
        if v.kind != crate::complex_core::VarKind::Z || v.index >= self.system.k() {
            return Err(Error::UnknownExample(format!("{}/{subject}", self.name)));
        }
        Ok(ComplexPoly::z(v.index))
    }

    /// Evaluator for a subject. Closed forms are differentiated exactly;
    /// branch-backed maps use finite differences for the Laplacian.
    pub fn map_for(&self, subject: &str, source: MapSource) -> Result<MapEvaluator> {
        let psi = self.subject_psi(subject)?;
        let base = match source {
            MapSource::ClosedForm => self
                .closed_form
                .clone()
                .ok_or_else(|| Error::FormulaInapplicable(format!("{} has no closed form", self.name)))?,
            MapSource::Branch(i) => MapEvaluator::from_branch(self.branch(i)?),
        };
        base.postcompose(&[psi])
    }

    /// Closed form if present, else the first branch.
    pub fn default_source(&self) -> MapSource {
        if self.closed_form.is_some() {
            MapSource::ClosedForm
        } else {
            MapSource::Branch(0)
        }
    }

    pub fn max_seed_residual(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in &self.seeds {
            let f = self.system.eval_f(&s.q, &s.z)?;
            worst = worst.max(f.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
        }
        Ok(worst)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn zp(i: usize) -> ComplexPoly {
    ComplexPoly::z(i - 1)
}

fn wp(i: usize) -> ComplexPoly {
    ComplexPoly::w(i - 1)
}

fn mu(m: usize, entries: Vec<ComplexPoly>) -> MuVector {
    MuVector::new(m, entries).expect("catalog μ has the right length")
}

pub fn list_examples() -> Vec<(&'static str, &'static str)> {
    EXAMPLE_NAMES.iter().map(|&n| (n, summary(n))).collect()
}

fn summary(name: &str) -> &'static str {
    match name {
        "LSnotC" => "m=3; z1 has superminimal fibres, structure not cosymplectic",
        "LSC" => "m=3; z1 has superminimal fibres, structure cosymplectic",
        "LNSNC" => "m=3; rational z1, structure neither Kahler nor cosymplectic",
        "family3" => "m=3; z1 holomorphic for a family of structures indexed by mu1",
        "family4" => "m=4; full z1 invariant under q -> aq",
        "glob1" => "any m>=3; global full phi = z1...z(m-1) with non-superminimal fibres",
        "glob2" => "any m>=3; global phi invariant along x1, full on the hyperplane",
        _ => "",
    }
}

pub fn get_example(name: &str) -> Result<CatalogEntry> {
    get_example_with(name, &ExampleOptions::default())
}

pub fn get_example_with(name: &str, opts: &ExampleOptions) -> Result<CatalogEntry> {
    let fixed = |m: usize| -> Result<()> {
        match opts.m {
            Some(x) if x != m => Err(Error::InvalidSystem(format!("{name} is defined for m={m} only"))),
            _ => Ok(()),
        }
    };
    match name {
        "LSnotC" => {
            fixed(3)?;
            ls_not_c()
        }
        "LSC" => {
            fixed(3)?;
            lsc()
        }
        "LNSNC" => {
            fixed(3)?;
            lnsnc()
        }
        "family3" => {
            fixed(3)?;
            family3(opts.mu1)
        }
        "family4" => {
            fixed(4)?;
            family4(opts.mu1)
        }
        "glob1" => glob(opts.m.unwrap_or(3), false),
        "glob2" => glob(opts.m.unwrap_or(3), true),
        _ => Err(Error::UnknownExample(name.to_string())),
    }
}

/// Seeds at `q0`: roots of the scalar reduction in z1, completed by
/// back-substitution, Newton-polished, and kept when K is well conditioned.
fn seeds_from_reduction(
    full: &Arc<ImplicitSystem>,
    scalar: &ImplicitSystem,
    q0: &[C64],
    back: BackSub,
    variant: Mu1Variant,
) -> Result<Vec<Seed>> {
    let mut subst = BTreeMap::new();
    for (i, &qi) in q0.iter().enumerate() {
        subst.insert(Var::q(i), ComplexPoly::constant(qi));
        subst.insert(Var::qbar(i), ComplexPoly::constant(qi.conj()));
    }
    let uni = scalar.f_polys()[0].substitute(&subst);
    let roots = polynomial_roots(&univariate_coefficients(&uni, Var::z(0))?)?;
    let mut seeds: Vec<(f64, Seed)> = Vec::new();
    for r in roots {
        let z = back(q0, r, variant);
        let Ok(branch) = SolutionBranch::new(full.clone(), q0.to_vec(), z.clone()) else {
            continue;
        };
        let Ok(z) = branch.solve_near(q0, &z) else { continue };
        let Ok((_, det)) = full.checked_jacobian(q0, &z) else { continue };
        if det.norm() < 1e-3 {
            continue;
        }
        if seeds.iter().any(|(_, s)| s.z.iter().zip(&z).all(|(a, b)| (a - b).norm() < 1e-8)) {
            continue;
        }
        seeds.push((det.norm(), Seed { q: q0.to_vec(), z }));
    }
    seeds.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(seeds.into_iter().map(|(_, s)| s).collect())
}

fn ls_not_c() -> Result<CatalogEntry> {
    let mu3 = || mu(3, vec![zp(1), zp(1), ComplexPoly::zero()]);
    let h = vec![zp(2), zp(3), zp(2) * zp(3)];
    let system = Arc::new(ImplicitSystem::canonical(mu3(), h)?);
    let scalar = ImplicitSystem::general(mu3(), 1, vec![wp(3) - wp(1) * wp(2)])?;
    let q0 = vec![c(0.6, 0.3), c(-0.4, 0.5), c(0.3, -0.2)];
    fn back(q: &[C64], z1: C64, _: Mu1Variant) -> Vec<C64> {
        let qb: Vec<C64> = q.iter().map(|x| x.conj()).collect();
        vec![z1, q[0] - z1 * qb[1] - z1 * qb[2], q[1] + z1 * qb[0]]
    }
    let seeds = seeds_from_reduction(&system, &scalar, &q0, back, Mu1Variant::Mixed)?;
    let why_k1 = "mu depends on z1 only, so z1 solves a scalar equation in w and is a harmonic morphism";
    Ok(CatalogEntry {
        name: "LSnotC".into(),
        summary: summary("LSnotC").into(),
        m: 3,
        variant: None,
        system,
        seeds,
        closed_form: None,
        postcompositions: vec![],
        expected: vec![
            expect("z1", Property::Harmonic, true, why_k1),
            expect("z1", Property::Hwc, true, "holomorphic for a Hermitian structure"),
            expect("z1", Property::Holomorphic, true, "solution of the implicit system"),
            expect("z1", Property::Superminimal, true, why_k1),
            expect("z1", Property::Kahler, false, "gradients do not stay in one fixed subspace"),
            expect("z2", Property::Harmonic, false, "the structure is not cosymplectic"),
            expect("z3", Property::Harmonic, false, "the structure is not cosymplectic"),
            expect("J", Property::Cosymplectic, false, "z2 and z3 are not harmonic"),
        ],
        scalar_reduction: Some(Arc::new(scalar)),
        sample_radius: 0.15,
    })
}

fn lsc() -> Result<CatalogEntry> {
    let mu3 = || mu(3, vec![zp(1), zp(1).pow(2), zp(1).pow(3)]);
    let h = vec![
        zp(3),
        zp(2),
        2.0 * (zp(1) * zp(2)) - 3.0 * (zp(1).pow(2) * zp(3)),
    ];
    let system = Arc::new(ImplicitSystem::canonical(mu3(), h)?);
    // w1 = z3, w2 = z2, w3 = 2 z1 w2 - 3 z1^2 w1
    let scalar = ImplicitSystem::general(
        mu3(),
        1,
        vec![wp(3) - 2.0 * (zp(1) * wp(2)) + 3.0 * (zp(1).pow(2) * wp(1))],
    )?;
    let q0 = vec![c(0.5, -0.2), c(0.3, 0.4), c(-0.6, 0.1)];
    fn back(q: &[C64], z1: C64, _: Mu1Variant) -> Vec<C64> {
        let qb: Vec<C64> = q.iter().map(|x| x.conj()).collect();
        let w1 = q[0] - z1 * qb[1] - z1 * z1 * qb[2];
        let w2 = q[1] + z1 * qb[0] - z1.powi(3) * qb[2];
        vec![z1, w2, w1]
    }
    let seeds = seeds_from_reduction(&system, &scalar, &q0, back, Mu1Variant::Mixed)?;
    let why = "h3 mu1' - h2 mu2' + h1 mu3' vanishes identically, so the structure is cosymplectic";
    Ok(CatalogEntry {
        name: "LSC".into(),
        summary: summary("LSC").into(),
        m: 3,
        variant: None,
        system,
        seeds,
        closed_form: None,
        postcompositions: vec![],
        expected: vec![
            expect("z1", Property::Harmonic, true, why),
            expect("z2", Property::Harmonic, true, why),
            expect("z3", Property::Harmonic, true, why),
            expect("z1", Property::Hwc, true, "holomorphic for a Hermitian structure"),
            expect("z1", Property::Holomorphic, true, "solution of the implicit system"),
            expect("z1", Property::Superminimal, true, "mu depends on z1 only"),
            expect("J", Property::Cosymplectic, true, why),
        ],
        scalar_reduction: Some(Arc::new(scalar)),
        sample_radius: 0.25,
    })
}

/// (q̄1)^2 + q̄1 q̄2 + q̄3 as a polynomial.
pub fn lnsnc_det_k() -> ComplexPoly {
    ComplexPoly::qbar(0).pow(2) + ComplexPoly::qbar(0) * ComplexPoly::qbar(1) + ComplexPoly::qbar(2)
}

/// A point where det K vanishes for LNSNC, given q1 and q2.
pub fn lnsnc_singular_point(q1: C64, q2: C64) -> Vec<C64> {
    vec![q1, q2, -(q1 * q1 + q1 * q2)]
}

fn lnsnc_closed_form() -> Result<MapEvaluator> {
    let (q1, q2, q3) = (ComplexPoly::q(0), ComplexPoly::q(1), ComplexPoly::q(2));
    let qb1 = ComplexPoly::qbar(0);
    let d = lnsnc_det_k();
    let n1 = &q1 - &q2 - &q3 * &(&qb1 + &ComplexPoly::qbar(1));
    // z2 = q3 + z1 q̄1, z3 = q2 + z2 q̄1
    let n2 = &q3 * &d + &n1 * &qb1;
    let n3 = &q2 * &d + &n2 * &qb1;
    MapEvaluator::rational(3, vec![n1, n2, n3], d)
}

fn lnsnc() -> Result<CatalogEntry> {
    let system = Arc::new(ImplicitSystem::canonical(
        mu(3, vec![zp(2), zp(1), ComplexPoly::zero()]),
        vec![zp(3), zp(3), zp(2)],
    )?);
    let closed = lnsnc_closed_form()?;
    let q0 = vec![c(0.7, 0.2), c(-0.3, 0.6), c(0.4, -0.5)];
    let z0 = closed.eval(&q0)?;
    let seed = Seed { q: q0, z: z0 };
    Ok(CatalogEntry {
        name: "LNSNC".into(),
        summary: summary("LNSNC").into(),
        m: 3,
        variant: None,
        system,
        seeds: vec![seed],
        closed_form: Some(closed),
        postcompositions: vec![],
        expected: vec![
            expect("z1", Property::Harmonic, true, "Laplacian of the rational solution vanishes"),
            expect("z1", Property::Hwc, true, "holomorphic for a Hermitian structure"),
            expect("z1", Property::Holomorphic, true, "solution of the implicit system"),
            expect("z1", Property::Superminimal, true, "gradients along each fibre lie in a fixed C^3"),
            expect("z1", Property::FiberSpanDim(3), true, "gradients along each fibre lie in a fixed C^3"),
            expect("z2", Property::Harmonic, false, "Laplacian is a non-zero multiple of 1/det K"),
            expect("z3", Property::Harmonic, false, "Laplacian is a non-zero multiple of 1/det K"),
            expect("J", Property::Cosymplectic, false, "z2 and z3 are not harmonic"),
        ],
        scalar_reduction: None,
        sample_radius: 0.25,
    })
}

fn mu1_of(variant: Mu1Variant) -> ComplexPoly {
    match variant {
        Mu1Variant::Mixed => zp(1) + zp(2),
        Mu1Variant::Z1Only => zp(1),
    }
}

fn family3(variant: Mu1Variant) -> Result<CatalogEntry> {
    let system = Arc::new(ImplicitSystem::canonical(
        mu(3, vec![mu1_of(variant), zp(1).pow(2), zp(1).pow(3)]),
        vec![zp(2), zp(3), zp(1)],
    )?);
    // the last equation w3 = z1 does not involve μ1
    let scalar = ImplicitSystem::general(
        mu(3, vec![zp(1), zp(1).pow(2), zp(1).pow(3)]),
        1,
        vec![wp(3) - zp(1)],
    )?;
    let q0 = vec![c(0.4, 0.3), c(0.2, -0.6), c(-0.5, 0.2)];
    fn back(q: &[C64], z1: C64, v: Mu1Variant) -> Vec<C64> {
        let qb: Vec<C64> = q.iter().map(|x| x.conj()).collect();
        let rhs = q[0] - z1 * qb[1] - z1 * z1 * qb[2];
        let z2 = match v {
            Mu1Variant::Mixed => rhs / (C64::new(1.0, 0.0) + qb[1]),
            Mu1Variant::Z1Only => rhs,
        };
        let mu1 = match v {
            Mu1Variant::Mixed => z1 + z2,
            Mu1Variant::Z1Only => z1,
        };
        vec![z1, z2, q[1] + mu1 * qb[0] - z1.powi(3) * qb[2]]
    }
    let seeds = seeds_from_reduction(&system, &scalar, &q0, back, variant)?;
    let scalar_reduction = match variant {
        Mu1Variant::Z1Only => Some(Arc::new(ImplicitSystem::general(
            mu(3, vec![zp(1), zp(1).pow(2), zp(1).pow(3)]),
            1,
            vec![wp(3) - zp(1)],
        )?)),
        Mu1Variant::Mixed => None,
    };
    Ok(CatalogEntry {
        name: "family3".into(),
        summary: summary("family3").into(),
        m: 3,
        variant: Some(variant),
        system,
        seeds,
        closed_form: None,
        postcompositions: vec![],
        expected: vec![
            expect("z1", Property::Harmonic, true, "z1 is fixed by the last equation alone"),
            expect("z1", Property::Hwc, true, "holomorphic for a Hermitian structure"),
            expect("z1", Property::Holomorphic, true, "solution of the implicit system"),
            expect("z1", Property::Full, true, "no direction annihilates all gradients"),
            expect(
                "z1",
                Property::Superminimal,
                true,
                "the same z1 is holomorphic for the member mu1 = z1, whose fibres are superminimal",
            ),
        ],
        scalar_reduction,
        sample_radius: 0.25,
    })
}

fn family4(variant: Mu1Variant) -> Result<CatalogEntry> {
    let mu4 = |m1: ComplexPoly| {
        mu(
            4,
            vec![m1, zp(1), ComplexPoly::zero(), ComplexPoly::zero(), zp(1), zp(1).pow(3)],
        )
    };
    let system = Arc::new(ImplicitSystem::canonical(
        mu4(mu1_of(variant)),
        vec![zp(3), zp(4), zp(1) * zp(2), zp(2)],
    )?);
    // w3 = z1 z2, w4 = z2
    let scalar = ImplicitSystem::general(mu4(zp(1)), 1, vec![wp(3) - zp(1) * wp(4)])?;
    let q0 = vec![c(0.3, 0.5), c(-0.4, 0.2), c(0.6, -0.3), c(0.2, 0.4)];
    fn back(q: &[C64], z1: C64, v: Mu1Variant) -> Vec<C64> {
        let qb: Vec<C64> = q.iter().map(|x| x.conj()).collect();
        let z2 = q[3] + z1 * qb[1] + z1.powi(3) * qb[2];
        let mu1 = match v {
            Mu1Variant::Mixed => z1 + z2,
            Mu1Variant::Z1Only => z1,
        };
        vec![
            z1,
            z2,
            q[0] - mu1 * qb[1] - z1 * qb[2],
            q[1] + mu1 * qb[0] - z1 * qb[3],
        ]
    }
    let seeds = seeds_from_reduction(&system, &scalar, &q0, back, variant)?;
    let scalar_reduction = match variant {
        Mu1Variant::Z1Only => Some(Arc::new(scalar)),
        Mu1Variant::Mixed => None,
    };
    Ok(CatalogEntry {
        name: "family4".into(),
        summary: summary("family4").into(),
        m: 4,
        variant: Some(variant),
        system,
        seeds,
        closed_form: None,
        postcompositions: vec![],
        expected: vec![
            expect("z1", Property::Harmonic, true, "z1 is fixed by the last two equations"),
            expect("z1", Property::Hwc, true, "holomorphic for a Hermitian structure"),
            expect("z1", Property::Holomorphic, true, "solution of the implicit system"),
            expect("z1", Property::Full, true, "no direction annihilates all gradients"),
            expect("z1", Property::RadialInvariant, true, "the eliminant is homogeneous of degree one in q"),
        ],
        scalar_reduction,
        sample_radius: 0.25,
    })
}

/// Product z_from * ... * z_to (one-based, inclusive); 1 if empty.
fn zprod(from: usize, to: usize) -> ComplexPoly {
    (from..=to).fold(ComplexPoly::real(1.0), |acc, a| acc * zp(a))
}

/// Base point for the global examples.
fn glob_base(m: usize) -> Vec<C64> {
    (0..m)
        .map(|j| c(0.3 + 0.2 * j as f64, 0.5 - 0.15 * j as f64))
        .collect()
}

fn glob(m: usize, odd: bool) -> Result<CatalogEntry> {
    if m < 3 {
        return Err(Error::InvalidSystem(format!("glob examples need m >= 3, got {m}")));
    }
    let mut entries = vec![ComplexPoly::zero(); MuVector::len_for(m)];
    entries[0] = zp(m);
    let h: Vec<ComplexPoly> = (1..=m).map(zp).collect();
    let system = Arc::new(ImplicitSystem::canonical(mu(m, entries), h)?);
    let (qm, q1, q2) = (ComplexPoly::q(m - 1), ComplexPoly::q(0), ComplexPoly::q(1));
    let mut sol: Vec<ComplexPoly> = (0..m).map(ComplexPoly::q).collect();
    sol[0] = &q1 - &qm * &ComplexPoly::qbar(1);
    sol[1] = &q2 + &qm * &ComplexPoly::qbar(0);
    let closed = MapEvaluator::polynomial(m, sol)?.with_mode(DiffMode::Symbolic);
    let q0 = glob_base(m);
    let z0 = closed.eval(&q0)?;
    let (name, postcompositions, expected) = if !odd {
        let phi = zprod(1, m - 1);
        let phi_t = &phi + &zp(m);
        (
            "glob1",
            vec![
                NamedMap {
                    name: "phi".into(),
                    psi: phi,
                    description: "z1 z2 ... z(m-1)".into(),
                },
                NamedMap {
                    name: "phi_tilde".into(),
                    psi: phi_t,
                    description: "z1 z2 ... z(m-1) + zm".into(),
                },
            ],
            vec![
                expect("J", Property::Cosymplectic, true, "mu1 = zm with K unipotent: every holomorphic map is harmonic"),
                expect("z1", Property::Harmonic, true, "holomorphic for a cosymplectic structure"),
                expect("z1", Property::Kahler, true, "each coordinate is holomorphic for a constant structure"),
                expect("phi", Property::Harmonic, true, "holomorphic postcomposition of harmonic holomorphic maps"),
                expect("phi", Property::Hwc, true, "holomorphic for a Hermitian structure"),
                expect("phi", Property::Holomorphic, true, "holomorphic postcomposition"),
                expect("phi", Property::Full, true, "no direction annihilates all gradients"),
                expect("phi", Property::FiberSpanDim(m + 2), true, "gradients along a fibre over a != 0 span C^(m+2)"),
                expect("phi", Property::Superminimal, false, "fibre span exceeds m"),
                expect("phi", Property::Kahler, false, "fibres are not superminimal"),
                expect("phi_tilde", Property::Submersive, true, "the zm term keeps the gradient non-zero"),
                expect("phi_tilde", Property::Harmonic, true, "holomorphic postcomposition"),
                expect("phi_tilde", Property::Full, true, "same properties as phi"),
                expect("phi_tilde", Property::Superminimal, false, "same properties as phi"),
                expect("phi_tilde", Property::Kahler, false, "same properties as phi"),
            ],
        )
    } else {
        let base = zp(1) * zp(m) - zp(2);
        let phi = &base * &zprod(3, m - 1);
        let mut maps = vec![NamedMap {
            name: "phi".into(),
            psi: phi,
            description: "(z1 zm - z2) z3 ... z(m-1)".into(),
        }];
        let mut expected = vec![
            expect("phi", Property::Harmonic, true, "holomorphic postcomposition of harmonic holomorphic maps"),
            expect("phi", Property::Hwc, true, "holomorphic for a Hermitian structure"),
            expect("phi", Property::Holomorphic, true, "holomorphic postcomposition"),
            expect("phi", Property::Annihilators(1), true, "invariant along x1 and no other direction"),
            expect("phi", Property::ReducedFull, true, "full on the hyperplane orthogonal to x1"),
            expect("phi", Property::FiberSpanDim(m + 1), true, "gradients along a fibre span C^(m+1)"),
            expect("phi", Property::Superminimal, false, "fibre span exceeds m"),
        ];
        if m >= 4 {
            let tail = (3..=m - 2).fold(ComplexPoly::zero(), |acc, a| acc + zp(a).pow(2));
            maps.push(NamedMap {
                name: "phi_tilde".into(),
                psi: base + tail + zp(m - 1),
                description: "(z1 zm - z2) + z3^2 + ... + z(m-2)^2 + z(m-1)".into(),
            });
            expected.extend([
                expect("phi_tilde", Property::Submersive, true, "the z(m-1) term keeps the gradient non-zero"),
                expect("phi_tilde", Property::Harmonic, true, "holomorphic postcomposition"),
                expect("phi_tilde", Property::Annihilators(1), true, "invariant along x1 only"),
                expect("phi_tilde", Property::ReducedFull, true, "full on the hyperplane orthogonal to x1"),
                expect("phi_tilde", Property::Superminimal, false, "fibres not superminimal"),
            ]);
        }
        ("glob2", maps, expected)
    };
    Ok(CatalogEntry {
        name: name.into(),
        summary: summary(name).into(),
        m,
        variant: None,
        system,
        seeds: vec![Seed { q: q0, z: z0 }],
        closed_form: Some(closed),
        postcompositions,
        expected,
        scalar_reduction: None,
        sample_radius: 2.0,
    })
}

/// One row of the global expected-property table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyRow {
    pub example: String,
    pub subject: String,
    pub property: Property,
    pub verdict: bool,
    pub reason: String,
}

/// Expected properties of every catalog entry at its default options,
/// plus the general statements checked on every entry.
pub fn expected_property_table() -> Vec<PropertyRow> {
    let mut rows = vec![
        PropertyRow {
            example: "anyK1Branch".into(),
            subject: "z1".into(),
            property: Property::Superminimal,
            verdict: true,
            reason: "a scalar solution of f(w(q, z), z) = 0 has superminimal fibres".into(),
        },
        PropertyRow {
            example: "M=0 standard".into(),
            subject: "q1".into(),
            property: Property::Kahler,
            verdict: true,
            reason: "holomorphic for the standard constant structure".into(),
        },
    ];
    for name in EXAMPLE_NAMES {
        let entry = get_example(name).expect("catalog entries build");
        rows.extend(entry.expected.into_iter().map(|e| PropertyRow {
            example: name.into(),
            subject: e.subject,
            property: e.property,
            verdict: e.verdict,
            reason: e.reason,
        }));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_build_with_valid_seeds() {
        for name in EXAMPLE_NAMES {
            let e = get_example(name).unwrap();
            assert!(!e.seeds.is_empty(), "{name}");
            assert!(e.max_seed_residual().unwrap() < 1e-10, "{name}");
        }
        for v in [Mu1Variant::Mixed, Mu1Variant::Z1Only] {
            for name in ["family3", "family4"] {
                let e = get_example_with(name, &ExampleOptions { m: None, mu1: v }).unwrap();
                assert!(!e.seeds.is_empty());
                assert!(e.max_seed_residual().unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn ls_not_c_has_two_roots() {
        let e = get_example("LSnotC").unwrap();
        assert_eq!(e.seeds.len(), 2);
    }

    #[test]
    fn glob1_closed_form_value() {
        let e = get_example("glob1").unwrap();
        let z = e.closed_form.unwrap().eval(&[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)]).unwrap();
        assert_eq!(z, vec![c(1.0, 2.0), c(2.0, 1.0), c(2.0, 0.0)]);
    }

    #[test]
    fn lnsnc_excluded_surface() {
        let e = get_example("LNSNC").unwrap();
        let p = lnsnc_singular_point(c(0.3, 0.1), c(-0.2, 0.4));
        assert!(matches!(e.closed_form.unwrap().eval(&p), Err(Error::DomainExcluded(_))));
    }

    #[test]
    fn unknown_and_fixed_dimension() {
        assert!(matches!(get_example("nope"), Err(Error::UnknownExample(_))));
        assert!(get_example_with("LSC", &ExampleOptions { m: Some(4), ..Default::default() }).is_err());
        assert_eq!(get_example_with("glob2", &ExampleOptions { m: Some(5), ..Default::default() }).unwrap().m, 5);
    }

    #[test]
    fn table_has_generic_rows() {
        let t = expected_property_table();
        assert!(t.iter().any(|r| r.example == "glob1" && r.subject == "phi" && r.property == Property::Full && r.verdict));
        assert!(t.iter().any(|r| r.example == "anyK1Branch"));
    }
}
