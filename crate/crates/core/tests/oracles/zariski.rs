//! Subset-enumeration oracle for the Zariski decomposition at single
//! rational parameter values, compared with the chambered walks.
//!
//! For each subset `S` of the candidates the oracle solves `P · C = 0` for
//! `C` in `S`, and keeps `S` when all coefficients are positive, `P` pairs
//! non-negatively with every declared curve, and (on a surface) the Gram
//! matrix of `S` is negative definite. Exactly one subset may survive.

use deltaflag_core::lattice::CurveKind;
use deltaflag_core::scenarios::{FlagScenario, LatticeData};
use deltaflag_core::{analyze, Assignment, ChamberedDecomposition, Lattice, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const POINTS: usize = 25;

type Vector = Vec<Rational>;

/// `x · y` on a surface, straight from the form entries.
fn surface_pair(l: &Lattice, x: &[Rational], y: &[Rational]) -> Rational {
    let mut out = Rational::zero();
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out += &(a * b * l.entry(&[i, j]));
        }
    }
    out
}

/// Pairing of a class with a declared curve.
fn pair_curve(data: &LatticeData, x: &[Rational], curve: &CurveKind) -> Rational {
    match curve {
        CurveKind::Surface(c) => surface_pair(&data.lattice, x, c.coords()),
        CurveKind::Cycle(v) => x.iter().zip(v).map(|(a, b)| a * b).sum(),
    }
}

fn solve(mut m: Vec<Vector>, mut b: Vector) -> Option<Vector> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for k in 0..n {
                    let t = &m[col][k] * &f;
                    m[r][k] -= &t;
                }
                let t = &b[col] * &f;
                b[r] -= &t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &m[i][i]).collect())
}

fn det(mut m: Vec<Vector>) -> Rational {
    let n = m.len();
    let mut out = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            m.swap(col, piv);
            out = -out;
        }
        out *= &m[col][col].clone();
        for r in col + 1..n {
            let f = &m[r][col] / &m[col][col];
            for k in col..n {
                let t = &m[col][k] * &f;
                m[r][k] -= &t;
            }
        }
    }
    out
}

fn negative_definite(g: &[Vector]) -> bool {
    (1..=g.len()).all(|k| {
        let minor: Vec<Vector> = g[..k].iter().map(|row| row[..k].to_vec()).collect();
        let d = det(minor);
        if k % 2 == 1 {
            d.is_negative()
        } else {
            d.is_positive()
        }
    })
}

/// Positive part coordinates and one coefficient per candidate.
pub fn brute_force(data: &LatticeData, d: &[Rational]) -> (Vector, Vector) {
    let cands = &data.candidates;
    let n = cands.len();
    let surface = data.lattice.degree() == 2;
    let mut tests: Vec<&CurveKind> = cands.iter().map(|c| c.detector.kind()).collect();
    tests.extend(data.mori.iter().map(|c| c.kind()));
    let mut found = Vec::new();
    for mask in 0u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let m: Vec<Vector> = support
            .iter()
            .map(|&i| {
                support
                    .iter()
                    .map(|&j| pair_curve(data, cands[j].class.coords(), cands[i].detector.kind()))
                    .collect()
            })
            .collect();
        let rhs: Vector = support
            .iter()
            .map(|&i| pair_curve(data, d, cands[i].detector.kind()))
            .collect();
        let Some(a) = solve(m.clone(), rhs) else { continue };
        if a.iter().any(|x| !x.is_positive()) {
            continue;
        }
        if surface && !negative_definite(&m) {
            continue;
        }
        let mut p = d.to_vec();
        let mut coeffs = vec![Rational::zero(); n];
        for (k, &i) in support.iter().enumerate() {
            for (x, c) in p.iter_mut().zip(cands[i].class.coords()) {
                *x -= &(&a[k] * c);
            }
            coeffs[i] = a[k].clone();
        }
        if tests.iter().all(|t| !pair_curve(data, &p, t).is_negative()) {
            found.push((p, coeffs));
        }
    }
    assert_eq!(found.len(), 1, "expected a unique admissible support, got {}", found.len());
    found.remove(0)
}

fn random_in(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let den: i64 = rng.gen_range(2..200);
    let num: i64 = rng.gen_range(1..den);
    lo + &((hi - lo) * Rational::new(num, den))
}

fn engine_at(dec: &ChamberedDecomposition, at: &Assignment, var: deltaflag_core::Var) -> (Vector, Vector) {
    let x = at.get(var).unwrap();
    let c = dec
        .chambers
        .iter()
        .find(|c| &c.lo.eval(at).unwrap() <= x && x <= &c.hi.eval(at).unwrap())
        .expect("point inside the walk");
    let p = c.positive.eval(at).unwrap().coords().to_vec();
    let coeffs = (0..dec.candidates.len())
        .map(|i| c.coefficient(i).eval(at).unwrap())
        .collect();
    (p, coeffs)
}

fn threefold_divisor(s: &FlagScenario, u: &Rational) -> Vector {
    s.flag
        .antican
        .coords()
        .iter()
        .zip(s.flag.divisor.coords())
        .map(|(k, y)| k - &(u * y))
        .collect()
}

pub fn check_scenario(s: &FlagScenario, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ambient = s.ambient().unwrap();
    let a = analyze(s).unwrap();
    for _ in 0..POINTS {
        let u = random_in(&mut rng, &Rational::zero(), &s.flag.tau);
        let want = brute_force(ambient, &threefold_divisor(s, &u));
        let got = engine_at(&a.threefold, &Assignment::u(u.clone()), deltaflag_core::Var::U);
        assert_eq!(got, want, "{} at u = {u}", s.name);
    }
    for flag in &s.surfaces {
        let data = s.lattice(&flag.lattice).unwrap();
        let f = a.flag(&flag.name).unwrap();
        for _ in 0..POINTS {
            let u = random_in(&mut rng, &Rational::zero(), &s.flag.tau);
            // The oracle's own threefold positive part, restricted by hand.
            let (pu, _) = brute_force(ambient, &threefold_divisor(s, &u));
            let mut rp = vec![Rational::zero(); data.lattice.rank()];
            for (x, img) in pu.iter().zip(&flag.restriction) {
                for (y, c) in rp.iter_mut().zip(img.coords()) {
                    *y += &(x * c);
                }
            }
            let dec = f
                .pieces
                .iter()
                .map(|(_, d)| d)
                .find(|d| {
                    let (lo, hi) = d.outer.clone().unwrap();
                    lo <= u && u <= hi
                })
                .unwrap();
            let at_u = Assignment::u(u.clone());
            let end = dec.threshold().eval(&at_u).unwrap();
            let v = random_in(&mut rng, &Rational::zero(), &end);
            let d: Vector = rp
                .iter()
                .zip(flag.curve.coords())
                .map(|(x, z)| x - &(&v * z))
                .collect();
            let want = brute_force(data, &d);
            let got = engine_at(dec, &at_u.with(deltaflag_core::Var::V, v.clone()), deltaflag_core::Var::V);
            assert_eq!(got, want, "{} flag {} at (u, v) = ({u}, {v})", s.name, flag.name);
        }
    }
}
