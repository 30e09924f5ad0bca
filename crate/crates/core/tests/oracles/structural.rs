//! Structural properties of every builtin walk, recomputed from the raw form
//! entries at exact sample points rather than read off the engine's own
//! polynomials.

use deltaflag_core::lattice::CurveKind;
use deltaflag_core::scenarios::{builtin, LatticeData};
use deltaflag_core::{analyze, Assignment, ChamberedDecomposition, Lattice, Rational};


/// Full multilinear evaluation, summing over ordered index tuples.
fn form(l: &Lattice, xs: &[&[Rational]]) -> Rational {
    let n = l.rank();
    let mut total = Rational::zero();
    let mut idx = vec![0usize; xs.len()];
    loop {
        let mut term = l.entry(&idx);
        for (x, &i) in xs.iter().zip(&idx) {
            term = &term * &x[i];
        }
        total += &term;
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return total;
        }
    }
}

fn volume(l: &Lattice, p: &[Rational]) -> Rational {
    match l.degree() {
        2 => form(l, &[p, p]),
        _ => form(l, &[p, p, p]),
    }
}

fn pair_curve(data: &LatticeData, p: &[Rational], c: &CurveKind) -> Rational {
    match c {
        CurveKind::Surface(d) => form(&data.lattice, &[p, d.coords()]),
        CurveKind::Cycle(v) => p.iter().zip(v).map(|(a, b)| a * b).sum(),
    }
}

fn leading_minors_alternate(g: &[Vec<Rational>]) -> bool {
    (1..=g.len()).all(|k| {
        let mut m: Vec<Vec<Rational>> = g[..k].iter().map(|r| r[..k].to_vec()).collect();
        let mut d = Rational::one();
        for c in 0..k {
            let Some(piv) = (c..k).find(|&r| !m[r][c].is_zero()) else {
                return false;
            };
            if piv != c {
                m.swap(c, piv);
                d = -d;
            }
            d *= &m[c][c].clone();
            for r in c + 1..k {
                let f = &m[r][c] / &m[c][c];
                for j in c..k {
                    let t = &m[c][j] * &f;
                    m[r][j] -= &t;
                }
            }
        }
        if k % 2 == 1 {
            d.is_negative()
        } else {
            d.is_positive()
        }
    })
}

/// Interior samples plus both ends of `[lo, hi]`.
fn samples(lo: &Rational, hi: &Rational) -> Vec<Rational> {
    [q(0, 1), q(1, 7), q(1, 2), q(5, 6), q(1, 1)]
        .iter()
        .map(|t| lo + &((hi - lo) * t.clone()))
        .collect()
}

/// Checks one walk at the outer assignment `base`; returns the volumes at
/// the two ends of the walk.
fn check_walk(data: &LatticeData, dec: &ChamberedDecomposition, base: &Assignment, label: &str) -> (Rational, Rational) {
    let var = dec.var;
    let surface = data.lattice.degree() == 2;
    let mut previous_end: Option<Rational> = None;
    let mut first = None;
    for (k, c) in dec.chambers.iter().enumerate() {
        let lo = c.lo.eval(base).unwrap();
        let hi = c.hi.eval(base).unwrap();
        // Chamber walls may meet at the ends of the outer interval.
        assert!(lo <= hi, "{label} chamber {k}: reversed interval [{lo}, {hi}]");
        let support: Vec<usize> = c.negative.iter().map(|(i, _)| *i).collect();
        if surface && !support.is_empty() {
            let g: Vec<Vec<Rational>> = support
                .iter()
                .map(|&i| {
                    support
                        .iter()
                        .map(|&j| {
                            form(
                                &data.lattice,
                                &[dec.candidates[i].class.coords(), dec.candidates[j].class.coords()],
                            )
                        })
                        .collect()
                })
                .collect();
            assert!(leading_minors_alternate(&g), "{label} chamber {k}: Gram matrix not negative definite");
        }
        for (n, x) in samples(&lo, &hi).into_iter().enumerate() {
            let at = base.clone().with(var, x.clone());
            let p = c.positive.eval(&at).unwrap();
            let p = p.coords();
            for (i, coeff) in &c.negative {
                let cand = &dec.candidates[*i];
                let pc = pair_curve(data, p, cand.detector.kind());
                assert!(pc.is_zero(), "{label} chamber {k} at {x}: P · {} = {pc}", cand.name);
                let a = coeff.eval(&at).unwrap();
                assert!(!a.is_negative(), "{label} chamber {k} at {x}: N coefficient of {} is {a}", cand.name);
            }
            for m in &data.mori {
                let pm = pair_curve(data, p, m.kind());
                assert!(!pm.is_negative(), "{label} chamber {k} at {x}: P · {} = {pm}", m.name());
            }
            let vol = volume(&data.lattice, p);
            assert_eq!(vol, c.volume.eval(&at).unwrap(), "{label} chamber {k} at {x}: volume");
            if n == 0 {
                if let Some(prev) = &previous_end {
                    assert_eq!(prev, &vol, "{label}: volume jumps entering chamber {k}");
                }
                first.get_or_insert(vol.clone());
            }
            if n == 4 {
                previous_end = Some(vol);
            }
        }
    }
    (first.unwrap(), previous_end.unwrap())
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Walk structure on the threefold, `(-K)^3 = 22` and the end volumes.
pub fn check_threefold(name: &str) {
    let s = builtin(name).unwrap();
    let a = analyze(&s).unwrap();
    let ambient = s.ambient().unwrap();
    let (start, end) = check_walk(ambient, &a.threefold, &Assignment::new(), name);
    let k = s.flag.antican.coords();
    assert_eq!(form(&ambient.lattice, &[k, k, k]), q(22, 1), "{name}: (-K)^3");
    assert_eq!(start, q(22, 1), "{name}: volume at u = 0");
    assert!(end.is_zero(), "{name}: volume at tau is {end}");
    assert_eq!(a.threefold.threshold().eval(&Assignment::new()).unwrap(), s.flag.tau);
}

/// Walk structure on every surface at sampled values of u.
pub fn check_surfaces(name: &str) {
    let s = builtin(name).unwrap();
    let a = analyze(&s).unwrap();
    for sf in &s.surfaces {
        let data = s.lattice(&sf.lattice).unwrap();
        let fa = a.flag(&sf.name).unwrap();
        for (k, dec) in &fa.pieces {
            let (ua, ub) = dec.outer.clone().unwrap();
            // The walk collapses to a point at u = tau.
            for u in samples(&ua, &ub).into_iter().filter(|u| u != &s.flag.tau) {
                let label = format!("{name}/{} (threefold chamber {k}, u = {u})", sf.name);
                let base = Assignment::u(u.clone());
                let (start, end) = check_walk(data, dec, &base, &label);
                assert!(end.is_zero(), "{label}: volume at the end of the walk is {end}");
                // The walk starts at the restriction of P(u), whose square
                // is P(u)^2 · Y upstairs.
                let three = a
                    .threefold
                    .chambers
                    .iter()
                    .find(|c| c.lo.eval(&base).unwrap() <= u && u <= c.hi.eval(&base).unwrap())
                    .unwrap();
                let pu = three.positive.eval(&base).unwrap();
                let ambient = s.ambient().unwrap();
                let up = form(&ambient.lattice, &[pu.coords(), pu.coords(), s.flag.divisor.coords()]);
                assert_eq!(start, up, "{label}: (P|Y)^2 against P^2 · Y");
            }
        }
    }
}
