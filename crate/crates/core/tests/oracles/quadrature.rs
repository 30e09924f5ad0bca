//! Floating-point cross-check of every S and F integral. Integrands are
//! rebuilt in `f64` from the positive parts and the raw form entries, and
//! integrated with composite two-point Gauss rules over at least a million
//! cells per integral.

use deltaflag_core::scenarios::{builtin, FlagScenario};
use deltaflag_core::{analyze, Analysis, Lattice, Poly, Rational};

pub const CELLS: usize = 1_000_000;
pub const TOL: f64 = 1e-8;

const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

fn f(x: &Rational) -> f64 {
    x.to_f64()
}

/// Form entries as dense `f64` arrays.
struct Form {
    rank: usize,
    two: Vec<f64>,
    three: Vec<f64>,
}

impl Form {
    fn new(l: &Lattice) -> Self {
        let n = l.rank();
        let mut two = vec![0.0; n * n];
        let mut three = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                if l.degree() == 2 {
                    two[i * n + j] = f(&l.entry(&[i, j]));
                } else {
                    for k in 0..n {
                        three[(i * n + j) * n + k] = f(&l.entry(&[i, j, k]));
                    }
                }
            }
        }
        Self { rank: n, two, three }
    }

    fn pair(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.rank;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * y[j] * self.two[i * n + j];
            }
        }
        s
    }

    fn cube(&self, x: &[f64]) -> f64 {
        let n = self.rank;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    s += x[i] * x[j] * x[k] * self.three[(i * n + j) * n + k];
                }
            }
        }
        s
    }
}

/// A polynomial with its coefficients converted once.
struct FPoly(Vec<(i32, i32, f64)>);

impl FPoly {
    fn new(p: &Poly) -> Self {
        Self(p.terms().map(|(m, c)| (m[0] as i32, m[1] as i32, f(c))).collect())
    }

    fn at(&self, u: f64, v: f64) -> f64 {
        self.0.iter().map(|(i, j, c)| c * u.powi(*i) * v.powi(*j)).sum()
    }
}

fn compile(polys: &[Poly]) -> Vec<FPoly> {
    polys.iter().map(FPoly::new).collect()
}

fn eval(polys: &[FPoly], u: f64, v: f64) -> Vec<f64> {
    polys.iter().map(|p| p.at(u, v)).collect()
}

/// Composite Gauss rule for `g` on `[a, b]` with `n` cells.
fn gauss_1d(a: f64, b: f64, n: usize, mut g: impl FnMut(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let x0 = a + i as f64 * h;
        for t in GAUSS {
            s += g(x0 + t * h);
        }
    }
    s * h / 2.0
}

fn close(name: &str, numeric: f64, exact: &Rational) {
    let e = f(exact);
    let err = (numeric - e).abs();
    assert!(
        err <= TOL * e.abs(),
        "{name}: quadrature {numeric:.15} vs exact {exact} ({e:.15}), relative error {:.3e}",
        err / e.abs()
    );
}

struct FlagSums {
    curve_first: f64,
    curve_second: f64,
    /// Per point: `∫∫ (P·Z)^2` and `∫∫ (P·Z) ord_p`.
    points: Vec<(f64, f64)>,
}

fn flag_sums(s: &FlagScenario, a: &Analysis, flag: usize) -> FlagSums {
    let sf = &s.surfaces[flag];
    let fa = &a.flags[flag];
    let data = s.lattice(&sf.lattice).unwrap();
    let form = Form::new(&data.lattice);
    let z: Vec<f64> = sf.curve.coords().iter().map(f).collect();
    let restriction: Vec<Vec<f64>> = sf.restriction.iter().map(|c| c.coords().iter().map(f).collect()).collect();
    let three = &a.threefold;
    let negatives: Vec<Vec<(String, FPoly)>> = three
        .chambers
        .iter()
        .map(|c| {
            c.negative
                .iter()
                .map(|(i, p)| (three.candidates[*i].name.clone(), FPoly::new(p)))
                .collect()
        })
        .collect();
    let threefold_ord = |k: usize, u: f64, m: &dyn Fn(&str) -> f64| -> f64 {
        negatives[k].iter().map(|(n, c)| c.at(u, 0.0) * m(n)).sum()
    };

    // First summand of S(V; Z), one-dimensional.
    let pull = |name: &str| sf.pullback.get(name).map(f).unwrap_or(0.0);
    let mut curve_first = 0.0;
    for (k, c) in three.chambers.iter().enumerate() {
        let (lo, hi) = (c.lo.eval_f64(0.0, 0.0), c.hi.eval_f64(0.0, 0.0));
        let positive = compile(c.positive.coords());
        curve_first += gauss_1d(lo, hi, CELLS, |u| {
            let p = eval(&positive, u, 0.0);
            let mut rp = vec![0.0; form.rank];
            for (x, img) in p.iter().zip(&restriction) {
                for (y, w) in rp.iter_mut().zip(img) {
                    *y += x * w;
                }
            }
            form.pair(&rp, &rp) * threefold_ord(k, u, &pull)
        });
    }

    let regions: usize = fa.pieces.iter().map(|(_, d)| d.chambers.len()).sum();
    let side = ((CELLS as f64 / regions as f64).sqrt().ceil()) as usize;
    let mut curve_second = 0.0;
    let mut points = vec![(0.0, 0.0); sf.points.len()];
    let mults: Vec<_> = sf
        .points
        .iter()
        .map(|pt| move |n: &str| pt.multiplicities.get(n).map(f).unwrap_or(0.0))
        .collect();
    for (k, dec) in &fa.pieces {
        let (ua, ub) = dec.outer.clone().unwrap();
        let (ua, ub) = (f(&ua), f(&ub));
        let hu = (ub - ua) / side as f64;
        for c in &dec.chambers {
            let coeffs: Vec<(String, FPoly)> = c
                .negative
                .iter()
                .map(|(i, p)| (dec.candidates[*i].name.clone(), FPoly::new(p)))
                .collect();
            let positive = compile(c.positive.coords());
            let (lo_p, hi_p) = (FPoly::new(&c.lo), FPoly::new(&c.hi));
            for iu in 0..side {
                for tu in GAUSS {
                    let u = ua + (iu as f64 + tu) * hu;
                    let (lo, hi) = (lo_p.at(u, 0.0), hi_p.at(u, 0.0));
                    let hv = (hi - lo) / side as f64;
                    let w = hu * hv / 4.0;
                    let base: Vec<f64> = mults.iter().map(|m| threefold_ord(*k, u, m)).collect();
                    for iv in 0..side {
                        for tv in GAUSS {
                            let v = lo + (iv as f64 + tv) * hv;
                            let p = eval(&positive, u, v);
                            let pz = form.pair(&p, &z);
                            curve_second += w * form.pair(&p, &p);
                            for (j, m) in mults.iter().enumerate() {
                                let ord: f64 = base[j]
                                    + coeffs.iter().map(|(n, q)| q.at(u, v) * m(n)).sum::<f64>();
                                points[j].0 += w * pz * pz;
                                points[j].1 += w * pz * ord;
                            }
                        }
                    }
                }
            }
        }
    }
    FlagSums {
        curve_first,
        curve_second,
        points,
    }
}

pub fn check(name: &str) {
    let s = builtin(name).unwrap();
    let a = analyze(&s).unwrap();
    let ambient = s.ambient().unwrap();
    let form = Form::new(&ambient.lattice);
    let k: Vec<f64> = s.flag.antican.coords().iter().map(f).collect();
    let norm = form.cube(&k);
    close(&format!("{name}: (-K)^3"), norm, &a.norm);

    let mut vol = 0.0;
    for c in &a.threefold.chambers {
        let (lo, hi) = (c.lo.eval_f64(0.0, 0.0), c.hi.eval_f64(0.0, 0.0));
        let positive = compile(c.positive.coords());
        vol += gauss_1d(lo, hi, CELLS, |u| form.cube(&eval(&positive, u, 0.0)));
    }
    close(&format!("{name}: S_X(Y)"), vol / norm, &a.s_divisor);

    for (i, fa) in a.flags.iter().enumerate() {
        let sums = flag_sums(&s, &a, i);
        let s_curve = 3.0 * (sums.curve_first + sums.curve_second) / norm;
        close(&format!("{name}/{}: S(V; Z)", fa.name), s_curve, &fa.s_curve);
        for (pa, (first, second)) in fa.points.iter().zip(&sums.points) {
            let f_term = 6.0 * second / norm;
            let label = format!("{name}/{}/{}", fa.name, pa.name);
            if pa.f_term.is_zero() {
                assert_eq!(f_term, 0.0, "{label}: F_p");
            } else {
                close(&format!("{label}: F_p"), f_term, &pa.f_term);
            }
            close(&format!("{label}: S(W; p)"), 3.0 * first / norm + f_term, &pa.s_point);
        }
    }
}
