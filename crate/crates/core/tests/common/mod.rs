//! Naive linear algebra and enumeration shared by the oracle tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use lefschetz::geom::VarietySpec;
use lefschetz::gf::{embedding_table, field_make, Elem, FieldSpec};

pub fn fixture(name: &str) -> VarietySpec {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/");
    VarietySpec::load(format!("{path}{name}")).unwrap()
}

/// Every vector of `F^len`, as base-`q` digits.
pub fn all_vectors(f: &FieldSpec, len: usize) -> impl Iterator<Item = Vec<Elem>> + '_ {
    let q = f.size() as u64;
    (0..q.pow(len as u32)).map(move |mut i| {
        (0..len)
            .map(|_| {
                let d = (i % q) as Elem;
                i /= q;
                d
            })
            .collect()
    })
}

/// Points of `P^n(F)` with first nonzero coordinate one.
pub fn proj_points(f: &FieldSpec, n: usize) -> Vec<Vec<Elem>> {
    all_vectors(f, n + 1).filter(|v| v.iter().find(|&&x| x != 0) == Some(&1)).collect()
}

pub fn normalize(f: &FieldSpec, v: &mut [Elem]) {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        let inv = f.inv(lead);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
    }
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(f: &FieldSpec, m: &mut Vec<Vec<Elem>>) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(row, p);
        let inv = f.inv(m[row][c]);
        for x in m[row].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != row && m[i][c] != 0 {
                let t = m[i][c];
                for j in 0..cols {
                    let s = f.mul(t, m[row][j]);
                    m[i][j] = f.sub(m[i][j], s);
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    m.truncate(row);
    pivots
}

pub fn rank(f: &FieldSpec, vs: &[Vec<Elem>]) -> usize {
    let mut m = vs.to_vec();
    rref(f, &mut m).len()
}

pub fn on_variety(y: &VarietySpec, f: &Arc<FieldSpec>, pt: &[Elem]) -> bool {
    y.forms.iter().all(|g| {
        let g = g.base_change(f).unwrap();
        g.eval_raw(pt) == 0
    })
}

/// Naive `#Y(F_{q^e})`: test every projective point.
pub fn naive_count(y: &VarietySpec, e: u32) -> u64 {
    let f = field_make(y.field.p(), y.field.degree() * e).unwrap();
    let forms: Vec<_> = y.forms.iter().map(|g| g.base_change(&f).unwrap()).collect();
    proj_points(&f, y.n).iter().filter(|p| forms.iter().all(|g| g.eval_raw(p) == 0)).count() as u64
}

/// A closed point of `P^n` over `F_q`: its conjugate geometric points over
/// `F_{q^deg}`, normalized.
#[derive(Clone, Debug)]
pub struct ClosedPoint {
    pub deg: u32,
    pub points: Vec<Vec<Elem>>,
}

/// Closed points of degree exactly `j` of `P^n` over `F_{p^a}`, optionally
/// cut out by `filter`.
pub fn closed_points(
    p: u32,
    a: u32,
    n: usize,
    j: u32,
    filter: &dyn Fn(&Arc<FieldSpec>, &[Elem]) -> bool,
) -> Vec<ClosedPoint> {
    let f = field_make(p, a * j).unwrap();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for pt in proj_points(&f, n) {
        if seen.contains(&pt) || !filter(&f, &pt) {
            continue;
        }
        let mut orbit = vec![pt.clone()];
        loop {
            let mut nx: Vec<Elem> = orbit.last().unwrap().iter().map(|&x| f.frobenius(x, a)).collect();
            normalize(&f, &mut nx);
            if nx == pt {
                break;
            }
            orbit.push(nx);
        }
        for o in &orbit {
            seen.insert(o.clone());
        }
        if orbit.len() as u32 == j {
            out.push(ClosedPoint { deg: j, points: orbit });
        }
    }
    out
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// Galois-stable `r`-multisets of closed points, grouped by the rank of
/// their support. Returns `(by_rank_all, by_rank_distinct)` indexed by rank.
/// `pts` must be sorted by degree.
pub fn multiset_ranks(p: u32, a: u32, pts: &[ClosedPoint], r: u32, max_rank: usize) -> (Vec<u64>, Vec<u64>) {
    assert!(pts.windows(2).all(|w| w[0].deg <= w[1].deg));
    // Geometric points of each closed point, embedded in each F_{q^L}.
    let mut fields: BTreeMap<u32, Arc<FieldSpec>> = BTreeMap::new();
    for l in 1..=r {
        fields.insert(l, field_make(p, a * l).unwrap());
    }
    let emb: Vec<BTreeMap<u32, Vec<Vec<Elem>>>> = pts
        .iter()
        .map(|cp| {
            (cp.deg..=r)
                .filter(|l| l % cp.deg == 0)
                .map(|l| {
                    let t = embedding_table(&fields[&cp.deg], &fields[&l]).unwrap();
                    (l, cp.points.iter().map(|v| v.iter().map(|&x| t[x as usize]).collect()).collect())
                })
                .collect()
        })
        .collect();
    let mut all = vec![0u64; max_rank + 1];
    let mut distinct = vec![0u64; max_rank + 1];
    let mut chosen: Vec<usize> = Vec::new();
    fn go(
        start: usize,
        left: u32,
        pts: &[ClosedPoint],
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if left == 0 {
            visit(chosen);
            return;
        }
        for i in start..pts.len() {
            if pts[i].deg > left {
                break;
            }
            chosen.push(i);
            go(i, left - pts[i].deg, pts, chosen, visit);
            chosen.pop();
        }
    }
    let mut visit = |ch: &[usize]| {
        let l = ch.iter().fold(1, |a, &i| lcm(a, pts[i].deg));
        let mut support: Vec<usize> = ch.to_vec();
        support.dedup();
        let vecs: Vec<Vec<Elem>> = support.iter().flat_map(|&i| emb[i][&l].iter().cloned()).collect();
        let rk = rank(&fields[&l], &vecs);
        all[rk] += 1;
        if support.len() == ch.len() {
            distinct[rk] += 1;
        }
    };
    go(0, r, pts, &mut chosen, &mut visit);
    (all, distinct)
}
