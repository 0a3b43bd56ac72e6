//! Point counts, plane enumeration and section profiles against brute force.

mod common;

use std::collections::BTreeSet;

use common::{fixture, naive_count, proj_points, rref};
use lefschetz::geom::{
    self, count_points, fano_count, intersection_profile, sym_count, uconf_count, PlaneKind, PlaneRep,
    PlaneSpace, VarietySpec,
};
use lefschetz::gf::{embedding_table, field_make, Elem, MPoly};
use proptest::prelude::*;

#[test]
fn fermat_counts_match_naive() {
    let y = fixture("fermat3.var");
    assert_eq!(naive_count(&y, 1), 7);
    assert_eq!(naive_count(&y, 2), 45);
    for e in 1..=3 {
        assert_eq!(count_points(&y, e), naive_count(&y, e), "e={e}");
    }
}

#[test]
fn fixture_counts_match_naive() {
    for (name, es) in [("ci22_f2.var", 1..=2), ("ci22_f3.var", 1..=1), ("quartic_curve_f3.var", 1..=2), ("conic_p3.var", 1..=2)] {
        let y = fixture(name);
        for e in es.clone() {
            assert_eq!(count_points(&y, e), naive_count(&y, e), "{name} e={e}");
        }
    }
}

/// Random quadrics in `P^3` over small fields.
fn quadric() -> impl Strategy<Value = VarietySpec> {
    (prop::sample::select(vec![(2u32, 1u32), (3, 1), (2, 2), (5, 1)]), prop::collection::vec(0u32..25, 10)).prop_map(
        |((p, e), c)| {
            let f = field_make(p, e).unwrap();
            let monos = [
                [2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2], [1, 1, 0, 0],
                [1, 0, 1, 0], [1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1],
            ];
            let g = MPoly::from_terms(&f, 4, monos.iter().zip(&c).map(|(m, &x)| (m.to_vec(), x % f.size()))).unwrap();
            VarietySpec::new(&f, 3, vec![g]).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_quadric_counts(y in quadric()) {
        for e in 1..=2 {
            prop_assert_eq!(count_points(&y, e), naive_count(&y, e));
        }
    }

    /// Relabelling coordinates of both the variety and the plane leaves the
    /// section profile unchanged.
    #[test]
    fn profile_is_chart_invariant(id in 0u64..1395, perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle()) {
        let y = fixture("ci22_f2.var");
        let space = PlaneSpace::new(2, 5, &y.field);
        let plane = space.plane(id).unwrap();
        let forms: Vec<MPoly> = y
            .forms
            .iter()
            .map(|g| {
                let terms = g.terms().map(|(ex, c)| {
                    let mut ex2 = vec![0u32; 6];
                    for (i, &a) in ex.iter().enumerate() {
                        ex2[perm[i]] = a;
                    }
                    (ex2, c)
                });
                MPoly::from_terms(&y.field, 6, terms.collect::<Vec<_>>()).unwrap()
            })
            .collect();
        let y2 = VarietySpec::new(&y.field, 5, forms).unwrap();
        let mut rows: Vec<Vec<Elem>> = plane
            .rows
            .iter()
            .map(|r| {
                let mut r2 = vec![0; 6];
                for (j, &x) in r.iter().enumerate() {
                    r2[perm[j]] = x;
                }
                r2
            })
            .collect();
        let pivots = rref(&y.field, &mut rows);
        let plane2 = PlaneRep { k: 2, rows, pivots };
        prop_assert_eq!(intersection_profile(&y, &plane), intersection_profile(&y2, &plane2));
    }
}

#[test]
fn lines_of_p3_by_pair_spans() {
    let f = field_make(2, 1).unwrap();
    let pts = proj_points(&f, 3);
    let mut lines = BTreeSet::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let mut m = vec![a.clone(), b.clone()];
            rref(&f, &mut m);
            lines.insert(m);
        }
    }
    assert_eq!(lines.len(), 35);
    let enumerated: BTreeSet<Vec<Vec<Elem>>> = PlaneSpace::new(1, 3, &f).iter().map(|p| p.rows).collect();
    assert_eq!(enumerated, lines);
}

#[test]
fn plane_enumeration_is_rref_and_distinct() {
    for (p, e, k, n) in [(2, 1, 2, 5), (3, 1, 1, 4), (2, 2, 1, 3)] {
        let f = field_make(p, e).unwrap();
        let space = PlaneSpace::new(k, n, &f);
        let mut seen = BTreeSet::new();
        for plane in space.iter() {
            let mut m = plane.rows.clone();
            let piv = rref(&f, &mut m);
            assert_eq!(m, plane.rows);
            assert_eq!(piv, plane.pivots);
            assert!(seen.insert(plane.rows));
        }
        assert_eq!(seen.len() as u64, space.count());
    }
    assert_eq!(PlaneSpace::new(2, 5, &field_make(2, 1).unwrap()).count(), 1395);
}

/// Points of `Y ∩ Λ` over `F_{q^e}` by mapping every point of the plane.
fn section_count(y: &VarietySpec, rows: &[Vec<Elem>], e: u32) -> u64 {
    let f = field_make(y.field.p(), y.field.degree() * e).unwrap();
    let t = embedding_table(&y.field, &f).unwrap();
    let forms: Vec<_> = y.forms.iter().map(|g| g.base_change(&f).unwrap()).collect();
    proj_points(&f, rows.len() - 1)
        .iter()
        .filter(|c| {
            let pt: Vec<Elem> = (0..=y.n)
                .map(|j| rows.iter().zip(c.iter()).fold(0, |acc, (r, &ci)| f.add(acc, f.mul(ci, t[r[j] as usize]))))
                .collect();
            forms.iter().all(|g| g.eval_raw(&pt) == 0)
        })
        .count() as u64
}

#[test]
fn ci_section_profiles_match_direct_enumeration() {
    let y = fixture("ci22_f2.var");
    let mut kinds = [0u32; 4];
    for plane in PlaneSpace::new(2, 5, &y.field).iter() {
        let prof = intersection_profile(&y, &plane);
        match prof.kind {
            PlaneKind::Transversal => {
                kinds[0] += 1;
                assert_eq!(prof.geometric_count, 4);
                assert_eq!(prof.orbit_sizes.iter().sum::<u32>(), 4);
                for e in 1..=4 {
                    let expect: u32 = prof.orbit_sizes.iter().filter(|&&s| e % s == 0).sum();
                    assert_eq!(section_count(&y, &plane.rows, e), expect as u64);
                }
            }
            PlaneKind::Tangent => {
                kinds[1] += 1;
                assert!(prof.geometric_count >= 1 && prof.geometric_count < 4);
            }
            PlaneKind::Contained => {
                kinds[2] += 1;
                assert_eq!(section_count(&y, &plane.rows, 1), 7);
            }
            PlaneKind::PositiveDim => {
                kinds[3] += 1;
                // A curve in the plane has more points than any finite section.
                assert!(section_count(&y, &plane.rows, 4) > 4);
            }
        }
    }
    assert_eq!(kinds, [344, 881, 0, 170]);
}

#[test]
fn fano_lines_match_naive() {
    // A line lies on a cubic iff it meets it in more than three points;
    // test the points over F_{q^2}.
    for (e, expect) in [(1u32, 3u64), (2, 27)] {
        let y = fixture("fermat3.var");
        let base = field_make(2, e).unwrap();
        let big = field_make(2, 2 * e).unwrap();
        let t = embedding_table(&base, &big).unwrap();
        let forms: Vec<_> = y.forms.iter().map(|g| g.base_change(&big).unwrap()).collect();
        let on_line = proj_points(&big, 1);
        let naive = PlaneSpace::new(1, 3, &base)
            .iter()
            .filter(|l| {
                on_line.iter().all(|c| {
                    let pt: Vec<Elem> = (0..4)
                        .map(|j| big.add(big.mul(c[0], t[l.rows[0][j] as usize]), big.mul(c[1], t[l.rows[1][j] as usize])))
                        .collect();
                    forms.iter().all(|g| g.eval_raw(&pt) == 0)
                })
            })
            .count() as u64;
        assert_eq!(naive, expect);
        assert_eq!(fano_count(&y, 1, e), expect);
    }
}

#[test]
fn symmetric_squares_from_counts() {
    for (name, e) in [("fermat3.var", 1), ("fermat3.var", 2), ("ci22_f2.var", 1), ("quartic_curve_f2.var", 1)] {
        let y = fixture(name);
        let (n1, n2) = (naive_count(&y, e) as i128, naive_count(&y, 2 * e) as i128);
        assert_eq!(sym_count(&y, 2, e), (n1 * n1 + n2) / 2, "{name}");
        assert_eq!(uconf_count(&y, 2, e), (n1 * n1 - n1) / 2 + (n2 - n1) / 2, "{name}");
    }
}

#[test]
fn cubic_multisets_by_closed_points() {
    let y = fixture("fermat3.var");
    let mut pts = Vec::new();
    for j in 1..=3 {
        pts.extend(common::closed_points(2, 1, 3, j, &|f, p| common::on_variety(&y, f, p)));
    }
    let (all, distinct) = common::multiset_ranks(2, 1, &pts, 3, 4);
    assert_eq!(sym_count(&y, 3, 1), all.iter().sum::<u64>() as i128);
    assert_eq!(uconf_count(&y, 3, 1), distinct.iter().sum::<u64>() as i128);
}

#[test]
fn closed_point_inversion() {
    // P^1 over F_2: 3 rational points, 1 of degree 2, 2 of degree 3.
    let counts: Vec<i128> = (1..=3).map(|e| 2i128.pow(e) + 1).collect();
    assert_eq!(geom::closed_points(&counts), vec![3, 1, 2]);
}

#[test]
fn tangent_line_to_conic() {
    let f = field_make(3, 1).unwrap();
    let y = VarietySpec::new(&f, 2, vec![MPoly::parse("x0*x2 - x1^2", &f, 3).unwrap()]).unwrap();
    // x0 = 0 touches the conic at (0:0:1).
    let mut rows = vec![vec![0, 1, 0], vec![0, 0, 1]];
    let pivots = rref(&f, &mut rows);
    let prof = intersection_profile(&y, &PlaneRep { k: 1, rows, pivots });
    assert_eq!(prof.kind, PlaneKind::Tangent);
    assert_eq!(prof.geometric_count, 1);
}
