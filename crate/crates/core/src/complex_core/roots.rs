//! Roots of univariate complex polynomials via the companion matrix.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::poly::{ComplexPoly, Monomial, Var};
use crate::error::{Error, Result};

/// Coefficients of `p` as a polynomial in `v`, lowest degree first. Every
/// other variable must be absent.
pub fn univariate_coefficients(p: &ComplexPoly, v: Var) -> Result<Vec<C64>> {
    if let Some(other) = p.support().into_iter().find(|&u| u != v) {
        return Err(Error::InvalidSystem(format!("{other} remains in a polynomial meant to be univariate in {v}")));
    }
    let deg = p.degree_in(v) as usize;
    Ok((0..=deg)
        .map(|e| {
            let mono = if e == 0 { Monomial::one() } else { Monomial::from_pairs([(v, e as u32)]) };
            p.coefficient(&mono)
        })
        .collect())
}

/// All complex roots, with multiplicity, of Σ c_e t^e (lowest first).
/// Leading zero coefficients are dropped.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    let n = c.len() - 1;
    let lead = c[n];
    let comp = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let ev = comp
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::NoConvergence { iterations: 0, residual: f64::NAN, q: "companion matrix".into() })?;
    // one Newton polish per root
    let eval = |t: C64| -> (C64, C64) {
        let mut f = C64::new(0.0, 0.0);
        let mut df = C64::new(0.0, 0.0);
        for a in c.iter().rev() {
            df = df * t + f;
            f = f * t + a;
        }
        (f, df)
    };
    Ok(ev
        .iter()
        .map(|&t| {
            let (f, df) = eval(t);
            if df.norm() > 0.0 {
                let u = t - f / df;
                if eval(u).0.norm() < f.norm() {
                    return u;
                }
            }
            t
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_and_cubic() {
        // (t - 1)(t + 2i) = t^2 + (2i - 1) t - 2i
        let mut r = polynomial_roots(&[C64::new(0.0, -2.0), C64::new(-1.0, 2.0), C64::new(1.0, 0.0)]).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - C64::new(0.0, -2.0)).norm() < 1e-12);
        assert!((r[1] - C64::new(1.0, 0.0)).norm() < 1e-12);
        let cube = polynomial_roots(&[C64::new(-8.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert_eq!(cube.len(), 3);
        for t in cube {
            assert!((t.powi(3) - C64::new(8.0, 0.0)).norm() < 1e-10);
        }
        assert!(polynomial_roots(&[C64::new(3.0, 0.0), C64::new(0.0, 0.0)]).unwrap().is_empty());
    }

    #[test]
    fn coefficients_of_univariate() {
        let p = 3.0 * ComplexPoly::z(0).pow(2) - ComplexPoly::real(1.0);
        let c = univariate_coefficients(&p, Var::z(0)).unwrap();
        assert_eq!(c, vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(3.0, 0.0)]);
        assert!(univariate_coefficients(&(p + ComplexPoly::q(0)), Var::z(0)).is_err());
    }
}
