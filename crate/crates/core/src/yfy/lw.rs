//! Point counts of finite plane sections over extensions, against their
//! Frobenius orbit structure.

use serde::Serialize;

use super::{check_params, tuples, RunHeader, YfyError};
use crate::geom::solve::{all_points, SysForm};
use crate::geom::{binom, PlaneCtx, PlaneKind, PlaneSpace, Substituter, VarietySpec};
use crate::gf::{embedding_table, field_make, Elem, FieldSpec};
use crate::params::ParamSet;

/// Aggregates over all transversal planes for one extension degree `e`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LWEntry {
    pub e: u32,
    pub planes: u64,
    /// Planes whose direct count over `F_{Q^e}` differs from
    /// `sum_{s | e} s * #(orbits of size s)`.
    pub count_mismatches: Vec<u64>,
    /// Orbits whose fixed points under `Frob^e` were neither all nor none
    /// as their size does or does not divide `e`.
    pub orbit_dichotomy_failures: u64,
    /// Sum over planes of the stable `(d-k-1)`-subsets over `F_{Q^e}`.
    pub alpha: u64,
    pub alpha_max: u64,
    /// Planes where subset-sum counting and brute force disagree.
    pub alpha_mismatches: Vec<u64>,
    /// Planes with no orbit union of size `d-k-1` over `F_{Q^e}`, all of
    /// which must have zero stable subsets.
    pub alpha_forced_zero: u64,
    pub alpha_zero_violations: u64,
    /// Planes where `e` is a multiple of every orbit size.
    pub divisible_planes: u64,
    /// Divisible planes where the count is not `C(d, d-k-1)`.
    pub divisible_violations: u64,
    /// Largest `|direct - orbit formula|` over the planes.
    pub max_residual: u64,
}

impl LWEntry {
    pub fn holds(&self) -> bool {
        self.count_mismatches.is_empty()
            && self.orbit_dichotomy_failures == 0
            && self.alpha_mismatches.is_empty()
            && self.alpha_zero_violations == 0
            && self.divisible_violations == 0
    }

    fn merge(mut self, o: LWEntry) -> LWEntry {
        self.planes += o.planes;
        self.count_mismatches.extend(o.count_mismatches);
        self.orbit_dichotomy_failures += o.orbit_dichotomy_failures;
        self.alpha += o.alpha;
        self.alpha_max = self.alpha_max.max(o.alpha_max);
        self.alpha_mismatches.extend(o.alpha_mismatches);
        self.alpha_forced_zero += o.alpha_forced_zero;
        self.alpha_zero_violations += o.alpha_zero_violations;
        self.divisible_planes += o.divisible_planes;
        self.divisible_violations += o.divisible_violations;
        self.max_residual = self.max_residual.max(o.max_residual);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LWDiagnostics {
    pub header: RunHeader,
    /// Planes are taken over `F_{q^base_e}`.
    pub base_e: u32,
    pub q: u64,
    /// Upper bound for the per-plane count, `C(d, d-k-1)`.
    pub alpha_cap: u64,
    /// Least common multiple of all orbit sizes seen.
    pub orbit_lcm: u32,
    pub entries: Vec<LWEntry>,
    pub all_hold: bool,
}

struct Ext {
    e: u32,
    big: std::sync::Arc<FieldSpec>,
    embed: std::sync::Arc<Vec<Elem>>,
}

fn lcm(a: u32, b: u32) -> u32 {
    a / num_integer::gcd(a, b) * b
}

/// Runs the checks on every transversal plane over `F_{q^base_e}` for each
/// extension degree in `e_list`.
pub fn langweil_check(
    y: &VarietySpec,
    params: &ParamSet,
    base_e: u32,
    e_list: &[u32],
) -> Result<LWDiagnostics, YfyError> {
    check_params(y, params)?;
    let yb = y.base_change(base_e)?;
    let base = yb.field.clone();
    let q = base.size() as u64;
    let r = params.r() as usize;
    let w = params.w_size() as u32;
    let d = y.d;
    let exts: Vec<Ext> = e_list
        .iter()
        .map(|&e| {
            let big = field_make(base.p(), base.degree() * e)?;
            let embed = embedding_table(&base, &big)?;
            Ok(Ext { e, big, embed })
        })
        .collect::<Result<_, crate::gf::GfError>>()
        .map_err(crate::geom::GeomError::from)?;
    let ctx = PlaneCtx::new(&yb, r);
    let sub = Substituter::new(&yb.forms, r + 1);
    let space = PlaneSpace::new(r, y.n, &base);
    let init = || (exts.iter().map(|x| LWEntry { e: x.e, ..Default::default() }).collect::<Vec<_>>(), 1u32);
    let (entries, orbit_lcm) = space.fold(
        init,
        |(acc, l), id, rows| {
            let an = ctx.analyze(rows);
            if an.kind != PlaneKind::Transversal {
                return;
            }
            let pts = an.points.as_ref().expect("transversal planes carry points");
            let sizes: Vec<u32> = pts.orbits.iter().map(|o| o.len() as u32).collect();
            *l = sizes.iter().fold(*l, |a, &b| lcm(a, b));
            let restricted: Vec<SysForm> =
                sub.restrict(&base, rows).into_iter().filter(|s| !s.terms.is_empty()).collect();
            for (ext, entry) in exts.iter().zip(acc.iter_mut()) {
                check_plane(id, ext, q, &restricted, r + 1, &pts.field, &pts.orbits, w, d, entry);
            }
        },
        |(a, la), (b, lb)| (a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(), lcm(la, lb)),
    );
    let all_hold = entries.iter().all(LWEntry::holds);
    Ok(LWDiagnostics {
        header: RunHeader::new(y, Some(*params)),
        base_e,
        q,
        alpha_cap: binom(d as i128, w as i128) as u64,
        orbit_lcm,
        entries,
        all_hold,
    })
}

#[allow(clippy::too_many_arguments)]
fn check_plane(
    id: u64,
    ext: &Ext,
    q: u64,
    restricted: &[SysForm],
    nv: usize,
    split: &FieldSpec,
    orbits: &[Vec<Vec<Elem>>],
    w: u32,
    d: u32,
    entry: &mut LWEntry,
) {
    let e = ext.e;
    entry.planes += 1;
    let lifted: Vec<SysForm> = restricted
        .iter()
        .map(|s| SysForm { deg: s.deg, terms: s.terms.iter().map(|(c, x)| (ext.embed[*c as usize], *x)).collect() })
        .collect();
    let direct = all_points(&ext.big, &lifted, nv).len() as u64;
    let sizes: Vec<u32> = orbits.iter().map(|o| o.len() as u32).collect();
    let formula: u64 = sizes.iter().filter(|&&s| e.is_multiple_of(s)).map(|&s| s as u64).sum();
    if direct != formula {
        entry.count_mismatches.push(id);
    }
    entry.max_residual = entry.max_residual.max(direct.abs_diff(formula));

    // Frob^e on the splitting field
    let qe = q.pow(e);
    let phi = |p: &[Elem]| -> Vec<Elem> { p.iter().map(|&x| split.pow(x, qe)).collect() };
    let points: Vec<&Vec<Elem>> = orbits.iter().flatten().collect();
    for o in orbits {
        let fixed = o.iter().filter(|p| phi(p) == **p).count();
        let expect = if e.is_multiple_of(o.len() as u32) { o.len() } else { 0 };
        if fixed != expect {
            entry.orbit_dichotomy_failures += 1;
        }
    }

    let refined: Vec<u32> = sizes
        .iter()
        .flat_map(|&s| {
            let g = num_integer::gcd(s, e);
            std::iter::repeat_n(s / g, g as usize)
        })
        .collect();
    let alpha = tuples::count_stable_subsets(&refined, w);
    let image: Vec<usize> = points
        .iter()
        .map(|p| {
            let img = phi(p);
            points.iter().position(|x| **x == img).expect("Frobenius permutes the section")
        })
        .collect();
    let brute = (0u32..1 << points.len())
        .filter(|mask| mask.count_ones() == w)
        .filter(|mask| (0..points.len()).all(|i| mask >> i & 1 == 0 || mask >> image[i] & 1 == 1))
        .count() as u64;
    if alpha != brute {
        entry.alpha_mismatches.push(id);
    }
    entry.alpha += alpha;
    entry.alpha_max = entry.alpha_max.max(alpha);
    let reachable = tuples::orbit_subsets(&refined, w).next().is_some();
    if !reachable {
        entry.alpha_forced_zero += 1;
        if brute != 0 {
            entry.alpha_zero_violations += 1;
        }
    }
    let l = sizes.iter().fold(1, |a, &b| lcm(a, b));
    if e.is_multiple_of(l) {
        entry.divisible_planes += 1;
        if brute != binom(d as i128, w as i128) as u64 {
            entry.divisible_violations += 1;
        }
    }
}
