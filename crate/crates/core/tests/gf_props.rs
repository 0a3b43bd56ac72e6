//! Field axioms, Frobenius and substitution checked against naive arithmetic.

use std::sync::Arc;

use lefschetz::gf::{embedding_table, field_make, mpoly_eval, Elem, FieldSpec, GFElem, MPoly};
use proptest::prelude::*;

const FIELDS: [(u32, u32); 9] = [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3), (5, 2), (7, 2)];

fn field() -> impl Strategy<Value = Arc<FieldSpec>> {
    prop::sample::select(FIELDS.to_vec()).prop_map(|(p, e)| field_make(p, e).unwrap())
}

fn field_and_elems(k: usize) -> impl Strategy<Value = (Arc<FieldSpec>, Vec<Elem>)> {
    field().prop_flat_map(move |f| {
        let n = f.size();
        (Just(f), prop::collection::vec(0..n, k))
    })
}

proptest! {
    #[test]
    fn field_axioms((f, v) in field_and_elems(3)) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        prop_assert_eq!(f.pow(a, f.size() as u64), a);
    }

    #[test]
    fn frobenius_is_a_ring_map((f, v) in field_and_elems(2), s in 1u32..3) {
        let (a, b) = (v[0], v[1]);
        let fr = |x| f.frobenius(x, s);
        prop_assert_eq!(fr(f.add(a, b)), f.add(fr(a), fr(b)));
        prop_assert_eq!(fr(f.mul(a, b)), f.mul(fr(a), fr(b)));
        prop_assert_eq!(fr(a), f.pow(a, (f.p() as u64).pow(s)));
    }

    /// Orbit size is the least `s` with `x^(p^s) = x`.
    #[test]
    fn orbit_sizes((f, v) in field_and_elems(1)) {
        let x = v[0];
        let mut y = f.pow(x, f.p() as u64);
        let mut s = 1;
        while y != x {
            y = f.pow(y, f.p() as u64);
            s += 1;
        }
        prop_assert_eq!(f.orbit_size(x, 1), s);
        prop_assert_eq!(f.degree() % s, 0);
    }

    /// Restricting to a plane, then evaluating, agrees with evaluating at
    /// the image point.
    #[test]
    fn substitute_then_evaluate((f, v) in field_and_elems(20)) {
        let n = 4;
        let monos: [[u32; 4]; 10] = [
            [2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2], [1, 1, 0, 0],
            [1, 0, 1, 0], [1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1],
        ];
        let (coeffs, rest) = v.split_at(10);
        let (rows, t) = rest.split_at(8);
        let poly = MPoly::from_terms(&f, n, monos.iter().zip(coeffs).map(|(m, &c)| (m.to_vec(), c))).unwrap();
        let rows: Vec<Vec<Elem>> = rows.chunks(4).map(|r| r.to_vec()).collect();
        let restricted = poly.substitute_raw(&rows).unwrap();
        let point: Vec<Elem> = (0..n).map(|j| f.add(f.mul(t[0], rows[0][j]), f.mul(t[1], rows[1][j]))).collect();
        prop_assert_eq!(restricted.eval_raw(t), poly.eval_raw(&point));
    }
}

#[test]
fn embeddings_are_homomorphisms() {
    for (p, a, b) in [(2, 1, 2), (2, 2, 4), (2, 1, 4), (3, 1, 2), (3, 2, 4), (2, 3, 6), (3, 1, 3)] {
        let (small, big) = (field_make(p, a).unwrap(), field_make(p, b).unwrap());
        let t = embedding_table(&small, &big).unwrap();
        for x in 0..small.size() {
            for y in 0..small.size() {
                assert_eq!(t[small.add(x, y) as usize], big.add(t[x as usize], t[y as usize]));
                assert_eq!(t[small.mul(x, y) as usize], big.mul(t[x as usize], t[y as usize]));
            }
        }
    }
}

#[test]
fn embeddings_compose() {
    let (f2, f4, f16) = (field_make(2, 1).unwrap(), field_make(2, 2).unwrap(), field_make(2, 4).unwrap());
    let (a, b, c) = (
        embedding_table(&f2, &f4).unwrap(),
        embedding_table(&f4, &f16).unwrap(),
        embedding_table(&f2, &f16).unwrap(),
    );
    for x in 0..2 {
        assert_eq!(b[a[x] as usize], c[x]);
    }
    // F_4 -> F_16 composed with F_16 -> F_256 against the direct table.
    let f256 = field_make(2, 8).unwrap();
    let (d, direct) = (embedding_table(&f16, &f256).unwrap(), embedding_table(&f4, &f256).unwrap());
    for x in 0..4 {
        assert_eq!(d[b[x] as usize], direct[x]);
    }
}

#[test]
fn generator_of_f16_has_orbit_four() {
    let f = field_make(2, 4).unwrap();
    let g = GFElem::new(&f, f.generator());
    let mut y = g.frobenius(1);
    let mut s = 1;
    while y != g {
        y = y.frobenius(1);
        s += 1;
    }
    assert_eq!(s, 4);
    assert_eq!(g.orbit_size(1), 4);
}

#[test]
fn conic_contains_diagonal_line_in_char_two() {
    let f = field_make(2, 1).unwrap();
    let conic = MPoly::parse("x0^2 + x0*x1", &f, 2).unwrap();
    // x0 = s, x1 = s.
    let restricted = conic.substitute_raw(&[vec![1, 1]]).unwrap();
    assert!(restricted.is_zero());
    let f4 = field_make(2, 2).unwrap();
    let c4 = conic.base_change(&f4).unwrap();
    for s in 0..4 {
        let pt = [GFElem::new(&f4, s), GFElem::new(&f4, s)];
        assert_eq!(mpoly_eval(&c4, &pt).unwrap().rep(), 0);
    }
}
