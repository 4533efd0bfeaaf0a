//! Dense reference model used to cross-check the library.
//!
//! Structure constants are written out directly from the defining
//! relations on `(symbol, twice_index)` pairs and kernels are computed by
//! plain dense Gauss-Jordan elimination over `Rational64`. Nothing here
//! calls into the library's bracket or linear algebra.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Zero};
use superderiv::{Element, Family, SuperDerivation};

pub type Basis = (&'static str, i64);
pub type Vector = BTreeMap<Basis, Rational64>;

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

pub fn is_odd(sym: &str) -> bool {
    sym == "G" || sym == "Q"
}

fn c_main(family: Family) -> &'static str {
    if family == Family::SW22 {
        "C1"
    } else {
        "C"
    }
}

/// `[u, v]` for basis symbols, indices doubled.
pub fn bracket(family: Family, u: Basis, v: Basis) -> Vector {
    let mut out = Vector::new();
    let (a, m2) = u;
    let (b, n2) = v;
    let sum = m2 + n2;
    let mut push = |sym: &'static str, idx: i64, k: Rational64| {
        if !k.is_zero() {
            *out.entry((sym, idx)).or_insert_with(Rational64::zero) += k;
        }
    };
    // m^3 - m over 12 and r^2 - 1/4 over 3, with doubled indices.
    let cubic = |t: i64| q(t * t * t - 4 * t, 96);
    let quad = |t: i64| q(t * t - 1, 12);
    match (a, b) {
        ("L", "L") => {
            push("L", sum, q(m2 - n2, 2));
            if sum == 0 {
                push(c_main(family), 0, cubic(m2));
            }
        }
        ("L", "G") => push("G", sum, q(m2 - 2 * n2, 4)),
        ("G", "G") => {
            push("L", sum, q(2, 1));
            if sum == 0 {
                push(c_main(family), 0, quad(m2));
            }
        }
        ("L", "I") => {
            push("I", sum, q(m2 - n2, 2));
            if sum == 0 {
                push("C2", 0, cubic(m2));
            }
        }
        ("L", "Q") => push("Q", sum, q(m2 - 2 * n2, 4)),
        ("G", "Q") => {
            push("I", sum, q(2, 1));
            if sum == 0 {
                push("C2", 0, quad(m2));
            }
        }
        ("I", "G") => push("Q", sum, q(m2 - 2 * n2, 4)),
        ("G", "L") | ("I", "L") | ("Q", "L") | ("Q", "G") | ("G", "I") => {
            let sign = if is_odd(a) && is_odd(b) { 1 } else { -1 };
            for (k, c) in bracket(family, v, u) {
                push(k.0, k.1, c * sign);
            }
        }
        _ => {}
    }
    out
}

pub fn bracket_vec(family: Family, x: &Vector, y: &Vector) -> Vector {
    let mut out = Vector::new();
    for (&u, cu) in x {
        for (&v, cv) in y {
            for (w, c) in bracket(family, u, v) {
                *out.entry(w).or_insert_with(Rational64::zero) += c * cu * cv;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn outer(x: &Vector) -> Vector {
    x.iter()
        .filter(|(b, _)| matches!(b.0, "I" | "Q" | "C2"))
        .map(|(b, c)| (*b, *c))
        .collect()
}

fn intern(sym: &str) -> &'static str {
    match sym {
        "L" => "L",
        "G" => "G",
        "I" => "I",
        "Q" => "Q",
        "C" => "C",
        "C1" => "C1",
        "C2" => "C2",
        other => panic!("unknown symbol {other}"),
    }
}

/// Converts through the printed form, so only the printer is shared.
pub fn from_element(x: &Element) -> Vector {
    let mut out = Vector::new();
    for (b, c) in x.terms() {
        let text = b.to_string();
        let (sym, idx) = match text.find('[') {
            Some(p) => {
                let inside = &text[p + 1..text.len() - 1];
                let twice = match inside.split_once('/') {
                    Some((n, _)) => n.parse::<i64>().unwrap(),
                    None => 2 * inside.parse::<i64>().unwrap(),
                };
                (intern(&text[..p]), twice)
            }
            None => (intern(&text), 0),
        };
        let n: i64 = c.numer().try_into().unwrap();
        let d: i64 = c.denom().try_into().unwrap();
        out.insert((sym, idx), q(n, d));
    }
    out
}

pub fn apply(family: Family, d: &SuperDerivation, x: &Vector) -> Vector {
    let mut out = bracket_vec(family, &from_element(d.inner_part()), x);
    let n: i64 = d.outer_lambda().numer().try_into().unwrap();
    let dd: i64 = d.outer_lambda().denom().try_into().unwrap();
    let lambda = q(n, dd);
    if !lambda.is_zero() {
        for (b, c) in outer(x) {
            *out.entry(b).or_insert_with(Rational64::zero) += c * lambda;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Non-central generators with `|index| <= bound`, plus a marker for the
/// outer derivation in SW(2,2).
pub fn columns(family: Family, bound: i64) -> Vec<Option<Basis>> {
    let kinds: &[&'static str] = match family {
        Family::Vir => &["L"],
        Family::SVir0 | Family::SVir12 => &["L", "G"],
        Family::SW22 => &["L", "G", "I", "Q"],
    };
    let mut cols = Vec::new();
    for &k in kinds {
        for t in -2 * bound..=2 * bound {
            let half = t % 2 != 0;
            let ok = if k == "G" && family == Family::SVir12 {
                half
            } else {
                !half
            };
            if ok {
                cols.push(Some((k, t)));
            }
        }
    }
    if family == Family::SW22 {
        cols.push(None);
    }
    cols
}

pub fn rank(mut m: Vec<Vec<Rational64>>) -> usize {
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational64::one() / m[r][c];
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                let pivot = m[r].clone();
                for (x, v) in m[i].iter_mut().zip(pivot) {
                    *x -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Dimension of `{d in window : d(target) = 0}` by dense elimination.
pub fn annihilator_dim(family: Family, target: &Vector, bound: i64) -> usize {
    let cols = columns(family, bound);
    let images: Vec<Vector> = cols
        .iter()
        .map(|c| match c {
            Some(b) => bracket_vec(family, &Vector::from([(*b, Rational64::one())]), target),
            None => outer(target),
        })
        .collect();
    let mut rows: Vec<Basis> = images.iter().flat_map(|v| v.keys().copied()).collect();
    rows.sort();
    rows.dedup();
    let m: Vec<Vec<Rational64>> = rows
        .iter()
        .map(|r| {
            images
                .iter()
                .map(|v| v.get(r).copied().unwrap_or_default())
                .collect()
        })
        .collect();
    cols.len() - rank(m)
}
