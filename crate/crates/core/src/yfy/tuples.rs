//! Galois-stable tuples as unions of Frobenius orbits.

use crate::geom::solve::{self, rank_of};
use crate::geom::{closed_points, count_points, sym_from_closed, uconf_from_closed, VarietySpec};
use crate::gf::{embedding_table, field_make, Elem, FieldSpec};

/// Iterates subsets of orbits (as bitmasks) whose sizes sum to `target`.
pub fn orbit_subsets(sizes: &[u32], target: u32) -> impl Iterator<Item = u32> + '_ {
    let t = sizes.len();
    assert!(t < 32, "too many orbits");
    (0u32..1 << t).filter(move |mask| {
        (0..t).filter(|i| mask >> i & 1 == 1).map(|i| sizes[i]).sum::<u32>() == target
    })
}

/// Number of orbit unions of total size `target`, by subset-sum counting.
pub fn count_stable_subsets(sizes: &[u32], target: u32) -> u64 {
    let mut ways = vec![0u64; target as usize + 1];
    ways[0] = 1;
    for &s in sizes {
        for t in (s as usize..=target as usize).rev() {
            ways[t] += ways[t - s as usize];
        }
    }
    ways[target as usize]
}

/// Rank of the union of the orbits selected by `mask`.
pub fn union_rank(f: &FieldSpec, orbits: &[Vec<Vec<Elem>>], mask: u32) -> usize {
    let pts: Vec<&[Elem]> = orbits
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .flat_map(|(_, o)| o.iter().map(|p| p.as_slice()))
        .collect();
    rank_of(f, &pts)
}

/// Work estimate above which [`dependent_multisets`] gives up.
pub const DEPENDENT_COST_CAP: f64 = 4.0e6;

/// Linearly dependent effective zero-cycles of degree `size` on `Y` over
/// `F_{q^e}`, or `None` when too expensive.
///
/// Cycles with a repeated point are always dependent; for `size <= 2` those
/// are the only ones. Larger sizes enumerate the closed points of each
/// degree, embed their conjugates into a common splitting field and
/// rank-test each union of distinct closed points.
pub fn dependent_multisets(y: &VarietySpec, size: usize, e: u32) -> Option<i128> {
    if size <= 1 {
        return Some(0);
    }
    let counts: Vec<i128> = (1..=size as u32).map(|j| count_points(y, e * j) as i128).collect();
    let closed = closed_points(&counts);
    let sym = sym_from_closed(&closed, size);
    if size == 2 {
        return Some(sym - uconf_from_closed(&closed, size));
    }
    let l = (1..=size as u32).fold(1u32, |a, b| a / num_integer::gcd(a, b) * b);
    let q = y.q() as f64;
    let big_size = q.powi((e * l) as i32);
    let prefixes = q.powi((e * size as u32) as i32).powi(y.n as i32 - 1);
    let combos = sym as f64;
    if big_size > (1u64 << 20) as f64 || prefixes > DEPENDENT_COST_CAP || combos > DEPENDENT_COST_CAP {
        return None;
    }
    let big = field_make(y.field.p(), y.field.degree() * e * l).ok()?;
    let qe = y.q().pow(e);
    // Closed points of degree j come from F_{q^(ej)}; embed each orbit into
    // the common field for the rank test.
    let mut orbits: Vec<Vec<Vec<Elem>>> = Vec::new();
    for j in 1..=size as u32 {
        let small = field_make(y.field.p(), y.field.degree() * e * j).ok()?;
        let emb = embedding_table(&small, &big).ok()?;
        let frob: Vec<Elem> = (0..small.size()).map(|x| small.pow(x, qe)).collect();
        let mut seen = std::collections::BTreeSet::new();
        for p in crate::geom::enumerate_points(&y.base_change(e * j).ok()?, 1) {
            if seen.contains(&p) {
                continue;
            }
            let mut orbit = vec![p.clone()];
            let mut cur: Vec<Elem> = p.iter().map(|&c| frob[c as usize]).collect();
            while cur != p {
                orbit.push(cur.clone());
                cur.iter_mut().for_each(|c| *c = frob[*c as usize]);
            }
            for o in &orbit {
                seen.insert(o.clone());
            }
            if orbit.len() as u32 == j {
                orbits.push(orbit.iter().map(|v| v.iter().map(|&c| emb[c as usize]).collect()).collect());
            }
        }
    }
    let mut independent: i128 = 0;
    let mut chosen: Vec<usize> = Vec::new();
    count_independent(&big, &orbits, size, 0, &mut chosen, &mut independent);
    Some(sym - independent)
}

fn count_independent(
    f: &FieldSpec,
    orbits: &[Vec<Vec<Elem>>],
    left: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    acc: &mut i128,
) {
    if left == 0 {
        let pts: Vec<&[Elem]> =
            chosen.iter().flat_map(|&i| orbits[i].iter().map(|p| p.as_slice())).collect();
        if solve::rank_of(f, &pts) == pts.len() {
            *acc += 1;
        }
        return;
    }
    for i in start..orbits.len() {
        let s = orbits[i].len();
        if s <= left {
            chosen.push(i);
            count_independent(f, orbits, left - s, i + 1, chosen, acc);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_sums() {
        assert_eq!(count_stable_subsets(&[1, 1, 1, 1], 3), 4);
        assert_eq!(count_stable_subsets(&[2, 2], 3), 0);
        assert_eq!(count_stable_subsets(&[1, 3], 3), 1);
        assert_eq!(orbit_subsets(&[1, 2, 1], 2).count(), 2);
    }
}
