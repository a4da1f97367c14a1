//! Grid descriptions for `hmorph scan`.
//!
//! Two forms are accepted:
//!
//! * `N` puts N points on each axis Re q^1, ..., Re q^m, spanning the seed
//!   value plus or minus a radius. For m = 3, `--grid 10` is 1000 points.
//! * `x1=lo:hi:n,x4=lo:hi:n,...` lists real coordinates explicitly, with
//!   x^{2j-1} = Re q^j and x^{2j} = Im q^j. Unlisted coordinates stay at the
//!   seed.
//!
//! Points are numbered row-major, first axis slowest.

use hmorph_core::C64;

use crate::failure::CliFailure;

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    /// zero-based real coordinate
    pub coord: usize,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    fn value(&self, i: usize) -> f64 {
        if self.n == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub base: Vec<C64>,
    pub axes: Vec<Axis>,
}

fn bad(spec: &str, why: &str) -> CliFailure {
    CliFailure::Input(format!("bad grid spec {spec:?}: {why}"))
}

impl Grid {
    pub fn parse(spec: &str, base: &[C64], radius: f64) -> Result<Grid, CliFailure> {
        let m = base.len();
        let spec = spec.trim();
        if let Ok(n) = spec.parse::<usize>() {
            if n == 0 {
                return Err(bad(spec, "need at least one point per axis"));
            }
            let axes = base
                .iter()
                .enumerate()
                .map(|(j, q)| Axis {
                    coord: 2 * j,
                    lo: q.re - radius,
                    hi: q.re + radius,
                    n,
                })
                .collect();
            return Ok(Grid { base: base.to_vec(), axes });
        }
        let mut axes: Vec<Axis> = Vec::new();
        for part in spec.split(',') {
            let (name, range) = part.split_once('=').ok_or_else(|| bad(spec, "expected x<i>=lo:hi:n"))?;
            let idx: usize = name
                .trim()
                .strip_prefix('x')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad(spec, "axis names are x1..x2m"))?;
            if idx == 0 || idx > 2 * m {
                return Err(bad(spec, &format!("axis x{idx} outside x1..x{}", 2 * m)));
            }
            let fields: Vec<&str> = range.split(':').collect();
            let [lo, hi, n] = fields[..] else {
                return Err(bad(spec, "expected lo:hi:n"));
            };
            let num = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
            let (Some(lo), Some(hi), Ok(n)) = (num(lo), num(hi), n.trim().parse::<usize>()) else {
                return Err(bad(spec, "lo and hi must be numbers, n a positive integer"));
            };
            if n == 0 {
                return Err(bad(spec, "need at least one point per axis"));
            }
            if axes.iter().any(|a| a.coord == idx - 1) {
                return Err(bad(spec, &format!("axis x{idx} given twice")));
            }
            axes.push(Axis { coord: idx - 1, lo, hi, n });
        }
        Ok(Grid { base: base.to_vec(), axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn point(&self, index: usize) -> Vec<C64> {
        let mut q = self.base.clone();
        let mut rest = index;
        for a in self.axes.iter().rev() {
            let i = rest % a.n;
            rest /= a.n;
            let v = a.value(i);
            let c = &mut q[a.coord / 2];
            if a.coord % 2 == 0 {
                c.re = v;
            } else {
                c.im = v;
            }
        }
        q
    }
}
