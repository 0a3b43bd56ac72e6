//! Projective geometry over finite fields: points, planes, plane sections
//! and their Frobenius orbit profiles, Fano counts, and counts of effective
//! zero-cycles.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::gf::{embedding_table, field_make, Elem, FieldSpec, GfError, MPoly};

pub mod planes;
pub mod solve;
mod variety;

pub use planes::{enumerate_planes, PlaneRep, PlaneSpace};
pub use variety::{Smoothness, VarietySpec};

use solve::{OrbitSolve, SysForm, MAXV};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("io error: {0}")]
    Io(String),
    #[error("variety file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("form is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("invalid variety: {0}")]
    Invalid(String),
    #[error("smoothness required, {0} singular points found")]
    SmoothnessRequired(u64),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// How a plane meets `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneKind {
    /// Exactly `d` distinct geometric points.
    Transversal,
    /// Finitely many, fewer than `d`, distinct geometric points.
    Tangent,
    Contained,
    /// More than `d` geometric points: the section has positive dimension.
    PositiveDim,
}

impl fmt::Display for PlaneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlaneKind::Transversal => "transversal",
            PlaneKind::Tangent => "tangent",
            PlaneKind::Contained => "contained",
            PlaneKind::PositiveDim => "positive_dim",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitProfile {
    pub kind: PlaneKind,
    /// Ascending; empty unless transversal.
    pub orbit_sizes: Vec<u32>,
    pub geometric_count: u32,
}

/// Orbits of the geometric points of a finite section, in plane
/// coordinates over a field containing all of them.
#[derive(Debug, Clone)]
pub struct OrbitPoints {
    pub field: Arc<FieldSpec>,
    pub orbits: Vec<Vec<Vec<Elem>>>,
}

/// Everything computed for one plane.
#[derive(Debug, Clone)]
pub struct PlaneAnalysis {
    pub kind: PlaneKind,
    /// Ascending orbit sizes for transversal and tangent planes.
    pub sizes: Vec<u32>,
    pub geometric_count: u32,
    pub points: Option<OrbitPoints>,
}

impl PlaneAnalysis {
    pub fn profile(&self) -> OrbitProfile {
        let sizes = if self.kind == PlaneKind::Transversal { self.sizes.clone() } else { Vec::new() };
        OrbitProfile { kind: self.kind, orbit_sizes: sizes, geometric_count: self.geometric_count }
    }
}

fn sys_forms(forms: &[MPoly]) -> Vec<SysForm> {
    forms
        .iter()
        .map(|f| SysForm {
            deg: f.degree() as usize,
            terms: f
                .terms()
                .map(|(e, c)| {
                    let mut a = [0u8; MAXV];
                    for (i, &x) in e.iter().enumerate() {
                        a[i] = x as u8;
                    }
                    (c, a)
                })
                .collect(),
        })
        .collect()
}

/// All points of `Y` over `F_{q^e}`, canonical and in scan order.
pub fn enumerate_points(y: &VarietySpec, e: u32) -> Vec<Vec<Elem>> {
    let y = y.base_change(e).expect("extension exists");
    assert!(y.n < MAXV, "ambient dimension too large");
    solve::all_points(&y.field, &sys_forms(&y.forms), y.n + 1)
}

/// `#Y(F_{q^e})`.
pub fn count_points(y: &VarietySpec, e: u32) -> u64 {
    use rayon::prelude::*;
    let y = y.base_change(e).expect("extension exists");
    assert!(y.n < MAXV, "ambient dimension too large");
    let forms = sys_forms(&y.forms);
    (0..=y.n).into_par_iter().map(|lead| solve::count_points_lead(&y.field, &forms, y.n + 1, lead)).sum()
}

/// Dense restriction of the defining forms to planes.
///
/// A term `c * prod x_j` becomes `c * prod (sum_i t_i rows[i][j])`, expanded
/// one linear factor at a time over degree-graded monomial tables.
pub struct Substituter {
    k1: usize,
    monos: Vec<Vec<[u8; MAXV]>>,
    mul_idx: Vec<Vec<[u16; MAXV]>>,
    /// Per form: `(coefficient, ambient variables repeated by exponent)`.
    forms: Vec<Vec<(Elem, Vec<usize>)>>,
    degs: Vec<usize>,
}

impl Substituter {
    pub fn new(forms: &[MPoly], k1: usize) -> Self {
        assert!(k1 <= MAXV, "plane dimension too large");
        let maxdeg = forms.iter().map(|f| f.degree() as usize).max().unwrap_or(0);
        let mut monos: Vec<Vec<[u8; MAXV]>> = vec![vec![[0; MAXV]]];
        let mut mul_idx = Vec::new();
        for _ in 0..maxdeg {
            let prev = monos.last().unwrap();
            let mut next: Vec<[u8; MAXV]> = Vec::new();
            let mut index: HashMap<[u8; MAXV], usize> = HashMap::new();
            let mut tab = Vec::with_capacity(prev.len());
            for m in prev {
                let mut row = [0u16; MAXV];
                for (i, slot) in row.iter_mut().enumerate().take(k1) {
                    let mut e = *m;
                    e[i] += 1;
                    let id = *index.entry(e).or_insert_with(|| {
                        next.push(e);
                        next.len() - 1
                    });
                    *slot = id as u16;
                }
                tab.push(row);
            }
            mul_idx.push(tab);
            monos.push(next);
        }
        let degs = forms.iter().map(|f| f.degree() as usize).collect();
        let forms = forms
            .iter()
            .map(|f| {
                f.terms()
                    .map(|(e, c)| {
                        let vars = e.iter().enumerate().flat_map(|(j, &a)| std::iter::repeat_n(j, a as usize));
                        (c, vars.collect())
                    })
                    .collect()
            })
            .collect();
        Substituter { k1, monos, mul_idx, forms, degs }
    }

    /// Restricted forms in the `k1` plane coordinates; zero forms come back
    /// with no terms.
    pub fn restrict(&self, f: &FieldSpec, rows: &[Vec<Elem>]) -> Vec<SysForm> {
        let mut out = Vec::with_capacity(self.forms.len());
        let mut cur: Vec<Elem> = Vec::new();
        let mut nxt: Vec<Elem> = Vec::new();
        for (terms, &deg) in self.forms.iter().zip(&self.degs) {
            let mut acc = vec![0; self.monos[deg].len()];
            for (c, vars) in terms {
                cur.clear();
                cur.push(*c);
                for (delta, &j) in vars.iter().enumerate() {
                    nxt.clear();
                    nxt.resize(self.monos[delta + 1].len(), 0);
                    let tab = &self.mul_idx[delta];
                    for (m, &v) in cur.iter().enumerate() {
                        if v == 0 {
                            continue;
                        }
                        for i in 0..self.k1 {
                            let r = rows[i][j];
                            if r != 0 {
                                let slot = &mut nxt[tab[m][i] as usize];
                                *slot = f.add(*slot, f.mul(v, r));
                            }
                        }
                    }
                    std::mem::swap(&mut cur, &mut nxt);
                }
                for (a, &v) in acc.iter_mut().zip(&cur) {
                    *a = f.add(*a, v);
                }
            }
            let terms = acc
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (c, self.monos[deg][i]))
                .collect();
            out.push(SysForm { deg, terms });
        }
        out
    }

    /// True when every form vanishes identically on the plane.
    pub fn contains(&self, f: &FieldSpec, rows: &[Vec<Elem>]) -> bool {
        self.restrict(f, rows).iter().all(|s| s.terms.is_empty())
    }
}

/// An extension `F_{Q^j}` of the plane field with its embedding and the
/// relative Frobenius `x -> x^Q`.
struct Sweep {
    j: u32,
    big: Arc<FieldSpec>,
    embed: Arc<Vec<Elem>>,
    frob: Vec<Elem>,
}

impl Sweep {
    fn new(base: &Arc<FieldSpec>, j: u32) -> Self {
        let big = field_make(base.p(), base.degree() * j).expect("extension exists");
        let embed = embedding_table(base, &big).expect("degrees divide");
        let q = base.size() as u64;
        let frob = (0..big.size()).map(|x| big.pow(x, q)).collect();
        Sweep { j, big, embed, frob }
    }

    fn lift(&self, forms: &[SysForm]) -> Vec<SysForm> {
        forms
            .iter()
            .map(|s| SysForm {
                deg: s.deg,
                terms: s.terms.iter().map(|(c, e)| (self.embed[*c as usize], *e)).collect(),
            })
            .collect()
    }
}

/// Reusable state for classifying many `k`-planes against one variety.
pub struct PlaneCtx {
    pub field: Arc<FieldSpec>,
    pub k: usize,
    pub d: u32,
    sub: Substituter,
    sweeps: Vec<Arc<Sweep>>,
    extra: Mutex<HashMap<u32, Arc<Sweep>>>,
}

fn lcm(a: u32, b: u32) -> u32 {
    a / num_integer::gcd(a, b) * b
}

impl PlaneCtx {
    /// `y` must already be over the field the planes live in.
    pub fn new(y: &VarietySpec, k: usize) -> Self {
        let d = y.d.max(1);
        // maximal elements of {1..d} under divisibility
        let sweeps = (d / 2 + 1..=d).map(|j| Arc::new(Sweep::new(&y.field, j))).collect();
        PlaneCtx {
            field: y.field.clone(),
            k,
            d,
            sub: Substituter::new(&y.forms, k + 1),
            sweeps,
            extra: Mutex::new(HashMap::new()),
        }
    }

    pub fn contains(&self, rows: &[Vec<Elem>]) -> bool {
        self.sub.contains(&self.field, rows)
    }

    fn sweep_for(&self, l: u32) -> Arc<Sweep> {
        if let Some(s) = self.sweeps.iter().find(|s| s.j % l == 0) {
            return s.clone();
        }
        let mut extra = self.extra.lock().unwrap();
        extra.entry(l).or_insert_with(|| Arc::new(Sweep::new(&self.field, l))).clone()
    }

    pub fn analyze(&self, rows: &[Vec<Elem>]) -> PlaneAnalysis {
        let restricted = self.sub.restrict(&self.field, rows);
        if restricted.iter().all(|s| s.terms.is_empty()) {
            return PlaneAnalysis { kind: PlaneKind::Contained, sizes: vec![], geometric_count: 0, points: None };
        }
        let restricted: Vec<SysForm> = restricted.into_iter().filter(|s| !s.terms.is_empty()).collect();
        let k1 = self.k + 1;
        let cap = self.d as usize;
        let positive = |count: u32| PlaneAnalysis {
            kind: PlaneKind::PositiveDim,
            sizes: vec![],
            geometric_count: count,
            points: None,
        };
        let mut found: Vec<Vec<Vec<Vec<Elem>>>> = Vec::with_capacity(self.sweeps.len());
        for sw in &self.sweeps {
            let lifted = sw.lift(&restricted);
            match solve::orbit_points(&sw.big, &lifted, k1, &sw.frob, cap) {
                OrbitSolve::Excess => return positive(self.d + 1),
                OrbitSolve::Orbits(o) => found.push(o),
            }
        }
        let mut sizes = Vec::new();
        for s in 1..=self.d {
            let (idx, _) = self.sweeps.iter().enumerate().find(|(_, sw)| sw.j % s == 0).unwrap();
            let c = found[idx].iter().filter(|o| o.len() as u32 == s).count();
            sizes.extend(std::iter::repeat_n(s, c));
        }
        let count: u32 = sizes.iter().sum();
        if count > self.d {
            return positive(count);
        }
        let l = sizes.iter().fold(1, |a, &b| lcm(a, b));
        let points = match self.sweeps.iter().position(|sw| sw.j % l == 0) {
            Some(i) => OrbitPoints { field: self.sweeps[i].big.clone(), orbits: std::mem::take(&mut found[i]) },
            None => {
                let sw = self.sweep_for(l);
                let lifted = sw.lift(&restricted);
                match solve::orbit_points(&sw.big, &lifted, k1, &sw.frob, cap) {
                    OrbitSolve::Orbits(o) => OrbitPoints { field: sw.big.clone(), orbits: o },
                    OrbitSolve::Excess => return positive(self.d + 1),
                }
            }
        };
        let kind = if count == self.d { PlaneKind::Transversal } else { PlaneKind::Tangent };
        PlaneAnalysis { kind, sizes, geometric_count: count, points: Some(points) }
    }
}

fn check_plane(y: &VarietySpec, plane: &PlaneRep) {
    assert_eq!(plane.rows.len(), plane.k + 1, "plane rows");
    assert!(plane.rows.iter().all(|r| r.len() == y.n + 1), "plane rows must have n+1 entries");
}

/// Symbolic containment: every restricted form is the zero polynomial.
pub fn plane_contains(y: &VarietySpec, plane: &PlaneRep) -> bool {
    check_plane(y, plane);
    y.forms.iter().all(|f| f.substitute_raw(&plane.rows).map(|g| g.is_zero()).unwrap_or(false))
}

/// Orbit profile of `Y` restricted to one plane over the base field of `y`.
pub fn intersection_profile(y: &VarietySpec, plane: &PlaneRep) -> OrbitProfile {
    check_plane(y, plane);
    PlaneCtx::new(y, plane.k).analyze(&plane.rows).profile()
}

/// Number of `k`-planes over `F_{q^e}` contained in `Y`.
pub fn fano_count(y: &VarietySpec, k: usize, e: u32) -> u64 {
    let y = y.base_change(e).expect("extension exists");
    let space = PlaneSpace::new(k, y.n, &y.field);
    let sub = Substituter::new(&y.forms, k + 1);
    space.fold(|| 0u64, |acc, _, rows| *acc += sub.contains(&y.field, rows) as u64, |a, b| a + b)
}

/// Contained planes over `F_{q^e}` as RREF matrices.
pub fn fano_planes(y: &VarietySpec, k: usize, e: u32) -> Vec<PlaneRep> {
    let y = y.base_change(e).expect("extension exists");
    let space = PlaneSpace::new(k, y.n, &y.field);
    let sub = Substituter::new(&y.forms, k + 1);
    let ids = space.fold(
        Vec::new,
        |acc, id, rows| {
            if sub.contains(&y.field, rows) {
                acc.push(id)
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    ids.into_iter().map(|id| space.plane(id).unwrap()).collect()
}

fn mobius(n: u32) -> i128 {
    let mut n = n;
    let mut res = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            res = -res;
        }
        p += 1;
    }
    if n > 1 {
        res = -res;
    }
    res
}

/// Closed points of each degree `1..=r` from point counts `counts[j-1] = N_j`.
pub fn closed_points(counts: &[i128]) -> Vec<i128> {
    (1..=counts.len() as u32)
        .map(|s| {
            let total: i128 =
                (1..=s).filter(|t| s % t == 0).map(|t| mobius(s / t) * counts[t as usize - 1]).sum();
            total / s as i128
        })
        .collect()
}

/// Binomial coefficient, with `C(n, 0) = 1` for every `n`.
pub fn binom(n: i128, k: i128) -> i128 {
    if k == 0 {
        return 1;
    }
    if k < 0 || n < k {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) / (i + 1))
}

/// Effective zero-cycles of degree `r` from closed-point counts.
pub fn sym_from_closed(a: &[i128], r: usize) -> i128 {
    let mut series = vec![0i128; r + 1];
    series[0] = 1;
    for (si, &cnt) in a.iter().enumerate().take(r) {
        let s = si + 1;
        let mut next = vec![0i128; r + 1];
        for (deg, &c) in series.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut i = 0;
            while deg + s * i <= r {
                next[deg + s * i] += c * binom(cnt + i as i128 - 1, i as i128);
                i += 1;
            }
        }
        series = next;
    }
    series[r]
}

/// Reduced zero-cycles (sets of distinct points) of degree `r`.
pub fn uconf_from_closed(a: &[i128], r: usize) -> i128 {
    let mut series = vec![0i128; r + 1];
    series[0] = 1;
    for (si, &cnt) in a.iter().enumerate().take(r) {
        let s = si + 1;
        let mut next = vec![0i128; r + 1];
        for (deg, &c) in series.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut i = 0;
            while deg + s * i <= r {
                next[deg + s * i] += c * binom(cnt, i as i128);
                i += 1;
            }
        }
        series = next;
    }
    series[r]
}

fn point_counts(y: &VarietySpec, e: u32, r: usize) -> Vec<i128> {
    (1..=r as u32).map(|j| count_points(y, e * j) as i128).collect()
}

/// `#Sym^r(Y)(F_{q^e})`.
pub fn sym_count(y: &VarietySpec, r: usize, e: u32) -> i128 {
    if r == 0 {
        return 1;
    }
    sym_from_closed(&closed_points(&point_counts(y, e, r)), r)
}

/// `#UConf_r(Y)(F_{q^e})`.
pub fn uconf_count(y: &VarietySpec, r: usize, e: u32) -> i128 {
    if r == 0 {
        return 1;
    }
    uconf_from_closed(&closed_points(&point_counts(y, e, r)), r)
}

/// `#P^n(F_q)`.
pub fn proj_count(n: i64, q: i128) -> i128 {
    (0..=n).map(|i| q.pow(i as u32)).sum()
}

/// `#Hilb^2(Y)(F_{q^e})` for smooth `Y`: distinct pairs plus a
/// `P^{m-1}` of tangent directions over each rational point.
pub fn hilb2_count(y: &VarietySpec, e: u32) -> Result<i128, GeomError> {
    let s = y.smoothness();
    if !s.is_smooth() {
        return Err(GeomError::SmoothnessRequired(s.singular_points));
    }
    let n1 = count_points(y, e) as i128;
    let n2 = count_points(y, 2 * e) as i128;
    let qe = (y.q() as i128).pow(e);
    Ok((n1 * n1 - n1) / 2 + (n2 - n1) / 2 + n1 * proj_count(y.m as i64 - 1, qe))
}

/// CSV schema tag written as the first line of profile files.
pub const PROFILE_SCHEMA: &str = "# schema: lefschetz-profiles/1";

/// Writes `plane_id,kind,orbit_sizes` for every `(n-m)`-plane over
/// `F_{q^e}`. Orbit sizes are joined by `;`.
pub fn write_profiles_csv(y: &VarietySpec, e: u32, out: &mut dyn Write) -> std::io::Result<()> {
    let y = y.base_change(e).expect("extension exists");
    let k = y.n - y.m;
    let ctx = PlaneCtx::new(&y, k);
    let space = PlaneSpace::new(k, y.n, &y.field);
    writeln!(out, "{PROFILE_SCHEMA}")?;
    writeln!(out, "plane_id,kind,orbit_sizes")?;
    for ch in space.chunks() {
        let mut rows_out = Vec::new();
        space.for_each_in_chunk(ch, |id, rows| {
            let p = ctx.analyze(rows).profile();
            let sizes: Vec<String> = p.orbit_sizes.iter().map(|s| s.to_string()).collect();
            rows_out.push(format!("{id},{},{}", p.kind, sizes.join(";")));
        });
        for r in rows_out {
            writeln!(out, "{r}")?;
        }
    }
    Ok(())
}
