//! Dense univariate polynomials over a [`FieldSpec`], coefficients low to
//! high. Only what the point solvers need.

use super::{Elem, FieldSpec};

/// Up to this field size roots are found by evaluation at every element.
const BRUTE_LIMIT: u32 = 1024;

pub fn trim(a: &mut Vec<Elem>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Degree, `None` for the zero polynomial (trimmed input).
pub fn degree(a: &[Elem]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn eval(f: &FieldSpec, a: &[Elem], x: Elem) -> Elem {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Remainder of `a` modulo nonzero `b`, in place.
pub fn rem_in_place(f: &FieldSpec, a: &mut Vec<Elem>, b: &[Elem]) {
    trim(a);
    let db = degree(b).expect("division by zero polynomial");
    let inv_lead = f.inv(b[db]);
    while a.len() > db {
        let top = a.len() - 1;
        let c = f.mul(a[top], inv_lead);
        let shift = top - db;
        for (i, &bi) in b[..=db].iter().enumerate() {
            a[shift + i] = f.sub(a[shift + i], f.mul(c, bi));
        }
        trim(a);
    }
}

/// Monic gcd; the zero polynomial when both inputs vanish.
pub fn gcd(f: &FieldSpec, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        rem_in_place(f, &mut a, &b);
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&lead) = a.last() {
        let inv = f.inv(lead);
        for c in a.iter_mut() {
            *c = f.mul(*c, inv);
        }
    }
    a
}

/// Distinct roots of a nonzero polynomial in the field, ascending.
pub fn roots(f: &FieldSpec, a: &[Elem]) -> Vec<Elem> {
    match degree(a) {
        None | Some(0) => Vec::new(),
        Some(1) => vec![f.neg(f.div(a[0], a[1]))],
        Some(_) if f.size() <= BRUTE_LIMIT => (0..f.size()).filter(|&x| eval(f, a, x) == 0).collect(),
        Some(_) => roots_split(f, a),
    }
}

pub fn mul(f: &FieldSpec, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

pub fn mulmod(f: &FieldSpec, a: &[Elem], b: &[Elem], m: &[Elem]) -> Vec<Elem> {
    let mut r = mul(f, a, b);
    rem_in_place(f, &mut r, m);
    r
}

/// `a^k mod m`.
pub fn powmod(f: &FieldSpec, a: &[Elem], mut k: u64, m: &[Elem]) -> Vec<Elem> {
    let mut acc = vec![1];
    rem_in_place(f, &mut acc, m);
    let mut base = a.to_vec();
    rem_in_place(f, &mut base, m);
    while k > 0 {
        if k & 1 == 1 {
            acc = mulmod(f, &acc, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        k >>= 1;
    }
    acc
}

pub fn sub(f: &FieldSpec, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = f.sub(x, y);
    }
    trim(&mut out);
    out
}

/// Exact quotient `a / b`.
pub fn div(f: &FieldSpec, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = degree(b).expect("division by zero polynomial");
    if r.len() <= db {
        return Vec::new();
    }
    let inv_lead = f.inv(b[db]);
    let mut qt = vec![0; r.len() - db];
    while r.len() > db {
        let top = r.len() - 1;
        let c = f.mul(r[top], inv_lead);
        let shift = top - db;
        qt[shift] = c;
        for (i, &bi) in b[..=db].iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, bi));
        }
        trim(&mut r);
    }
    qt
}

/// Roots of a squarefree polynomial that splits into distinct linear
/// factors, by equal-degree splitting with deterministic shifts.
fn split_roots(f: &FieldSpec, g: &[Elem], out: &mut Vec<Elem>) {
    match degree(g) {
        None | Some(0) => {}
        Some(1) => out.push(f.neg(f.div(g[0], g[1]))),
        Some(dg) => {
            let s = f.size() as u64;
            for i in 0..f.size() as u64 {
                let a = f.gen_pow(i);
                let h = if f.p() == 2 {
                    // absolute trace of a*x
                    let ax = vec![0, a];
                    let mut t = ax.clone();
                    let mut acc = ax.clone();
                    rem_in_place(f, &mut acc, g);
                    for _ in 1..f.degree() {
                        t = mulmod(f, &t, &t, g);
                        acc = sub(f, &acc, &t); // char 2: sub is add
                    }
                    acc
                } else {
                    let xa = vec![a, 1];
                    sub(f, &powmod(f, &xa, (s - 1) / 2, g), &[1])
                };
                let c = gcd(f, g, &h);
                if let Some(dc) = degree(&c) {
                    if dc > 0 && dc < dg {
                        let rest = div(f, g, &c);
                        split_roots(f, &c, out);
                        split_roots(f, &rest, out);
                        return;
                    }
                }
            }
            unreachable!("distinct roots are separated by some shift");
        }
    }
}

/// Distinct roots in the field, ascending, for large fields.
pub fn roots_split(f: &FieldSpec, a: &[Elem]) -> Vec<Elem> {
    let Some(da) = degree(a) else { return Vec::new() };
    if da == 0 {
        return Vec::new();
    }
    let xs = powmod(f, &[0, 1], f.size() as u64, a);
    let g = gcd(f, a, &sub(f, &xs, &[0, 1]));
    let mut out = Vec::new();
    split_roots(f, &g, &mut out);
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_make;

    #[test]
    fn gcd_and_roots() {
        let f = field_make(3, 1).unwrap();
        // (x - 1)(x - 2) = x^2 - 3x + 2 = x^2 + 2 over F_3
        let a = vec![2, 0, 1];
        let b = vec![2, 1]; // x - 1
        assert_eq!(gcd(&f, &a, &b), vec![2, 1]);
        assert_eq!(roots(&f, &a), vec![1, 2]);
        assert_eq!(gcd(&f, &[], &[]), Vec::<Elem>::new());
        assert_eq!(gcd(&f, &[0, 0], &[1]), vec![1]);
    }

    #[test]
    fn splitting_matches_brute_force() {
        for (p, e) in [(2, 8), (3, 5), (2, 11)] {
            let f = field_make(p, e).unwrap();
            // (x - a)(x - b)(x - c)(x^2 + x + g) with a, b, c in the field
            let (a, b, c) = (f.gen_pow(3), f.gen_pow(77), 0);
            let mut poly = vec![1];
            for r in [a, b, c] {
                poly = mul(&f, &poly, &[f.neg(r), 1]);
            }
            poly = mul(&f, &poly, &[f.generator(), 1, 1]);
            let brute: Vec<Elem> = (0..f.size()).filter(|&x| eval(&f, &poly, x) == 0).collect();
            assert_eq!(roots_split(&f, &poly), brute);
        }
    }
}
