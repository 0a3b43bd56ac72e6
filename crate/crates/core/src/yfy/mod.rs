//! Stratum point counts and the finite-field checks built on them.
//!
//! For a plane `Λ` of dimension `r = n - m` the W-side tuples have size
//! `w = d - k - 1` and the V-side tuples size `v = k + 1`. A tuple defined
//! over `F_Q` inside a finite section `Y ∩ Λ` is a union of Frobenius
//! orbits, so every stratum is counted by running over orbit subsets of the
//! right total size and testing ranks over the splitting field. Planes
//! inside `Y` contribute through motivic classes evaluated at `Q`.

pub mod lw;
pub mod probe;
pub mod report;
pub mod tuples;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::geom::{
    count_points, fano_count, hilb2_count, proj_count, sym_count, GeomError, PlaneCtx, PlaneKind,
    PlaneSpace, VarietySpec,
};
use crate::motivic::{self, MotivicError};
use crate::params::{ParamSet, ParameterViolation, Regime};

pub use lw::{langweil_check, LWDiagnostics};
pub use probe::{
    averaged_table, dimension_probe, ratio_probes, slope_fit, AveragedRow, AveragedTable, Bound, FamilyEntry,
    SlopeEstimate, TermProbe,
};
pub use report::{FieldInfo, RunHeader};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum YfyError {
    #[error(transparent)]
    Parameters(#[from] ParameterViolation),
    #[error("parameters do not match the variety: {0}")]
    Mismatch(String),
    #[error("the partition identities need the low-degree regime, got {0}")]
    RegimeMismatch(Regime),
    #[error("need at least 3 sample fields, got {0}")]
    InsufficientSamples(usize),
    #[error("expected a cubic hypersurface")]
    NotCubic,
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Motivic(#[from] MotivicError),
}

/// Point counts of every stratum at one `(Y, params, e)`.
///
/// `m` and `n` count dependent tuples on `Y` itself and are `None` when the
/// enumeration would be too large.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StratumCounts {
    pub w: i128,
    pub v: i128,
    pub a: i128,
    pub b1: i128,
    pub b2: i128,
    pub r: i128,
    pub t1: i128,
    pub t2: i128,
    pub j: i128,
    pub p: i128,
    pub q: i128,
    pub m: Option<i128>,
    pub n: Option<i128>,
}

impl StratumCounts {
    fn add(&mut self, o: &StratumCounts) {
        self.w += o.w;
        self.v += o.v;
        self.a += o.a;
        self.b1 += o.b1;
        self.b2 += o.b2;
        self.r += o.r;
        self.t1 += o.t1;
        self.t2 += o.t2;
        self.p += o.p;
        self.q += o.q;
    }

    /// `W - B1 - B2 - A`.
    pub fn w_side(&self) -> i128 {
        self.w - self.b1 - self.b2 - self.a
    }

    /// `V - R - T1 - T2`.
    pub fn v_side(&self) -> i128 {
        self.v - self.r - self.t1 - self.t2
    }
}

/// How many planes fell in each class, with the ones the strata skip.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PlaneTally {
    pub total: u64,
    pub transversal: u64,
    pub tangent: u64,
    pub contained: u64,
    pub positive_dim: u64,
    /// Ids of the first excluded planes.
    pub excluded_ids: Vec<u64>,
    /// Transversal planes where the complement bijection failed.
    pub bijection_failures: Vec<u64>,
    /// Planes where subset counts over all sizes did not total `2^orbits`.
    pub conservation_failures: u64,
}

const EXCLUDED_SHOWN: usize = 32;

impl PlaneTally {
    fn merge(mut self, o: PlaneTally) -> PlaneTally {
        self.total += o.total;
        self.transversal += o.transversal;
        self.tangent += o.tangent;
        self.contained += o.contained;
        self.positive_dim += o.positive_dim;
        let room = EXCLUDED_SHOWN.saturating_sub(self.excluded_ids.len());
        self.excluded_ids.extend(o.excluded_ids.into_iter().take(room));
        self.bijection_failures.extend(o.bijection_failures);
        self.conservation_failures += o.conservation_failures;
        self
    }
}

/// Stratum counts with everything needed to reproduce them.
#[derive(Debug, Clone, Serialize)]
pub struct StratumReport {
    pub header: RunHeader,
    pub e: u32,
    pub q: u64,
    pub counts: StratumCounts,
    pub planes: PlaneTally,
}

/// Classes of the tuple loci on one contained plane, evaluated at `Q`.
#[derive(Debug, Clone, Copy)]
struct ContainedPlane {
    w: i128,
    a: i128,
    v: i128,
    r: i128,
}

fn to_i128(x: &num_bigint::BigInt) -> i128 {
    x.to_i128().expect("count fits in i128")
}

fn class_count(p: &crate::lring::LPoly, q: u64) -> i128 {
    to_i128(&p.specialize_int(q as i64).expect("integer polynomial"))
}

/// `#G(k, n)(F_q)`, with the empty subspace counted once for `k = -1`.
pub(crate) fn grassmannian_count(k: i64, n: i64, q: u64) -> i128 {
    match k {
        -1 if n >= -1 => 1,
        k if k < 0 || k > n => 0,
        k => class_count(&motivic::grassmannian_class(k, n).expect("in range").value, q),
    }
}

impl ContainedPlane {
    fn new(params: &ParamSet, q: u64) -> Result<Self, YfyError> {
        let (r, w, v) = (params.r(), params.w_size(), params.v_size());
        let wc = motivic::uconf_proj_class(r, w)?.value;
        let ac = match params.regime {
            Regime::Low => motivic::rank_locus_or_zero(w, r, w, true)?,
            Regime::High => motivic::rank_locus_or_zero(r + 1, r, w, true)?,
        };
        let vc = motivic::uconf_proj_class(r, v)?.value;
        let rc = motivic::rank_locus_or_zero(v, r, v, true)?;
        Ok(ContainedPlane { w: class_count(&wc, q), a: class_count(&ac, q), v: class_count(&vc, q), r: class_count(&rc, q) })
    }
}

pub(crate) fn check_params(y: &VarietySpec, params: &ParamSet) -> Result<(), YfyError> {
    if params.n != y.n as i64 || params.m != y.m as i64 || params.d != y.d as i64 {
        return Err(YfyError::Mismatch(format!(
            "variety has (n={}, m={}, d={}), parameters {}",
            y.n, y.m, y.d, params
        )));
    }
    Ok(())
}

/// Per-plane stratum contributions of one finite section, given its orbits.
///
/// Returns the counts and whether the complement bijection held.
pub fn section_strata(
    f: &crate::gf::FieldSpec,
    orbits: &[Vec<Vec<crate::gf::Elem>>],
    params: &ParamSet,
    kind: PlaneKind,
) -> (StratumCounts, bool) {
    let (r1, w, v) = (params.r() as usize + 1, params.w_size() as u32, params.v_size() as u32);
    let t = orbits.len();
    let sizes: Vec<u32> = orbits.iter().map(|o| o.len() as u32).collect();
    let total: u32 = sizes.iter().sum();
    let full = (1u32 << t) - 1;
    let mut ranks = vec![u8::MAX; 1 << t];
    let mut rank = |mask: u32| -> usize {
        let slot = &mut ranks[mask as usize];
        if *slot == u8::MAX {
            *slot = tuples::union_rank(f, orbits, mask) as u8;
        }
        *slot as usize
    };
    let good_w = |rk: usize| match params.regime {
        Regime::Low => rk == w as usize,
        Regime::High => rk == r1,
    };
    let mut c = StratumCounts::default();
    let (mut jw, mut jv) = (0u64, 0u64);
    for mask in 0..=full {
        let size: u32 = (0..t).filter(|i| mask >> i & 1 == 1).map(|i| sizes[i]).sum();
        if size != w && size != v {
            continue;
        }
        let rk = rank(mask);
        match kind {
            PlaneKind::Transversal => {
                let comp = full & !mask;
                if size == w {
                    c.w += 1;
                    if !good_w(rk) {
                        c.b1 += 1;
                    } else if rank(comp) != (total - w) as usize {
                        c.b2 += 1;
                    } else {
                        jw += 1;
                    }
                }
                if size == v {
                    c.v += 1;
                    if rk != v as usize {
                        c.t1 += 1;
                    } else if !good_w(rank(comp)) {
                        c.t2 += 1;
                    } else {
                        jv += 1;
                    }
                }
            }
            PlaneKind::Tangent => {
                if size == w && rk == w as usize {
                    c.p += 1;
                }
                if size == v && rk == v as usize {
                    c.q += 1;
                }
            }
            _ => {}
        }
    }
    (c, jw == jv)
}

/// Counts every stratum over `F_{q^e}`.
pub fn stratum_counts(y: &VarietySpec, params: &ParamSet, e: u32) -> Result<StratumReport, YfyError> {
    check_params(y, params)?;
    let yb = y.base_change(e)?;
    let q = yb.q();
    let contained = ContainedPlane::new(params, q)?;
    let r = params.r() as usize;
    let ctx = PlaneCtx::new(&yb, r);
    let space = PlaneSpace::new(r, y.n, &yb.field);
    let d = y.d;
    let (mut counts, planes) = space.fold(
        || (StratumCounts::default(), PlaneTally::default()),
        |(c, tally), id, rows| {
            tally.total += 1;
            let an = ctx.analyze(rows);
            match an.kind {
                PlaneKind::Contained => {
                    tally.contained += 1;
                    c.w += contained.w;
                    c.a += contained.a;
                    c.b1 += contained.w - contained.a;
                    c.v += contained.v;
                    c.r += contained.r;
                    c.t1 += contained.v - contained.r;
                }
                PlaneKind::PositiveDim => {
                    tally.positive_dim += 1;
                    if tally.excluded_ids.len() < EXCLUDED_SHOWN {
                        tally.excluded_ids.push(id);
                    }
                }
                kind => {
                    if kind == PlaneKind::Transversal {
                        tally.transversal += 1;
                    } else {
                        tally.tangent += 1;
                    }
                    let pts = an.points.as_ref().expect("finite sections carry points");
                    let (pc, bij) = section_strata(&pts.field, &pts.orbits, params, kind);
                    c.add(&pc);
                    if kind == PlaneKind::Transversal && !bij {
                        tally.bijection_failures.push(id);
                    }
                    let sizes: Vec<u32> = pts.orbits.iter().map(|o| o.len() as u32).collect();
                    let subsets: u64 = (0..=d).map(|s| tuples::count_stable_subsets(&sizes, s)).sum();
                    if subsets != 1u64 << sizes.len() {
                        tally.conservation_failures += 1;
                    }
                }
            }
        },
        |(mut c, t), (c2, t2)| {
            c.add(&c2);
            (c, t.merge(t2))
        },
    );
    counts.j = counts.w - counts.b1;
    counts.m = tuples::dependent_multisets(y, params.v_size() as usize, e);
    counts.n = tuples::dependent_multisets(y, params.w_size() as usize, e);
    Ok(StratumReport { header: RunHeader::new(y, Some(*params)), e, q, counts, planes })
}

/// One extension degree of [`verify_extended`].
#[derive(Debug, Clone, Serialize)]
pub struct ExtendedEntry {
    pub e: u32,
    pub q: u64,
    pub counts: StratumCounts,
    pub planes: PlaneTally,
    /// `W - B1 - B2 - A`.
    pub lhs: i128,
    /// `V - R - T1 - T2`.
    pub rhs: i128,
    pub holds: bool,
    pub bijection_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtendedReport {
    pub header: RunHeader,
    pub entries: Vec<ExtendedEntry>,
    /// Every identity and every bijection held.
    pub all_hold: bool,
    /// Some plane met `Y` in a positive-dimensional set.
    pub has_exclusions: bool,
}

/// Checks `W - B1 - B2 - A = V - R - T1 - T2` and the per-plane complement
/// bijection for each extension degree.
pub fn verify_extended(y: &VarietySpec, params: &ParamSet, e_list: &[u32]) -> Result<ExtendedReport, YfyError> {
    let mut entries = Vec::new();
    for &e in e_list {
        let s = stratum_counts(y, params, e)?;
        let (lhs, rhs) = (s.counts.w_side(), s.counts.v_side());
        entries.push(ExtendedEntry {
            e,
            q: s.q,
            lhs,
            rhs,
            holds: lhs == rhs,
            bijection_holds: s.planes.bijection_failures.is_empty() && s.planes.conservation_failures == 0,
            counts: s.counts,
            planes: s.planes,
        });
    }
    Ok(ExtendedReport {
        header: RunHeader::new(y, Some(*params)),
        all_hold: entries.iter().all(|x| x.holds && x.bijection_holds),
        has_exclusions: entries.iter().any(|x| x.planes.positive_dim > 0),
        entries,
    })
}

/// One of the two tuple-partition identities.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionSide {
    /// `"w"` or `"v"`.
    pub side: &'static str,
    pub tuple_size: i64,
    /// `W - B1 + P`, or `V - T1 + Q`.
    pub lhs: i128,
    /// `#Sym(Y)`, the Grassmannian factor, and the dependent count.
    pub sym: i128,
    pub grassmannian: i128,
    pub dependent: Option<i128>,
    /// `(#Sym(Y) - dependent) * grassmannian`.
    pub rhs: Option<i128>,
    /// The form with the contained-plane term added to the left,
    /// `lhs + A` (or `lhs + R`), and its difference from `rhs`.
    pub with_contained_term: i128,
    pub with_contained_residual: Option<i128>,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// Excluded planes or uncomputed dependent counts leave it open.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub header: RunHeader,
    pub e: u32,
    pub q: u64,
    pub counts: StratumCounts,
    pub planes: PlaneTally,
    pub sides: Vec<PartitionSide>,
    pub verdict: Verdict,
}

/// Checks the tuple-partition identities
/// `W - B1 + P = (#Sym^w Y - N) #G(r - w, n - w)` and
/// `V - T1 + Q = (#Sym^v Y - M) #G(r - v, n - v)`.
///
/// Each side counts pairs (independent tuple on `Y`, plane through its
/// span), split by how the plane meets `Y`. Contained planes are already
/// part of `W - B1` and `V - T1`; the variant adding `A` (or `R`) once
/// more is reported alongside.
pub fn verify_partition(y: &VarietySpec, params: &ParamSet, e: u32) -> Result<PartitionReport, YfyError> {
    if params.regime != Regime::Low {
        return Err(YfyError::RegimeMismatch(params.regime));
    }
    let s = stratum_counts(y, params, e)?;
    let c = &s.counts;
    let (n, r) = (params.n, params.r());
    let side = |name: &'static str, size: i64, lhs: i128, extra: i128, dep: Option<i128>| {
        let sym = sym_count(y, size as usize, e);
        let g = grassmannian_count(r - size, n - size, s.q);
        let rhs = dep.map(|dv| (sym - dv) * g);
        PartitionSide {
            side: name,
            tuple_size: size,
            lhs,
            sym,
            grassmannian: g,
            dependent: dep,
            rhs,
            with_contained_term: lhs + extra,
            with_contained_residual: rhs.map(|x| lhs + extra - x),
            holds: rhs.map(|x| x == lhs),
        }
    };
    let sides = vec![
        side("w", params.w_size(), c.w - c.b1 + c.p, c.a, c.n),
        side("v", params.v_size(), c.v - c.t1 + c.q, c.r, c.m),
    ];
    let verdict = if sides.iter().any(|x| x.holds == Some(false)) && s.planes.positive_dim == 0 {
        Verdict::Fails
    } else if s.planes.positive_dim > 0 || sides.iter().any(|x| x.holds.is_none()) {
        Verdict::Inconclusive
    } else {
        Verdict::Holds
    };
    Ok(PartitionReport {
        header: RunHeader::new(y, Some(*params)),
        e,
        q: s.q,
        counts: s.counts,
        planes: s.planes,
        sides,
        verdict,
    })
}

/// One extension degree of [`verify_classic`].
#[derive(Debug, Clone, Serialize)]
pub struct ClassicEntry {
    pub e: u32,
    pub q: u64,
    pub points: i128,
    pub points_quadratic: i128,
    pub lines: i128,
    /// `#Sym^2 Y` and `(1 + Q^m) #Y + Q^2 #F(Y)`.
    pub sym2: i128,
    pub sym2_formula: i128,
    pub sym2_holds: bool,
    /// `#Hilb^2 Y` and `#P^m #Y + Q^2 #F(Y)`.
    pub hilb2: i128,
    pub hilb2_formula: i128,
    pub hilb2_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicReport {
    pub header: RunHeader,
    pub entries: Vec<ClassicEntry>,
    pub all_hold: bool,
}

/// Checks both forms of the classical relation for a smooth cubic
/// hypersurface at each extension degree.
pub fn verify_classic(y: &VarietySpec, e_list: &[u32]) -> Result<ClassicReport, YfyError> {
    if y.degrees != [3] {
        return Err(YfyError::NotCubic);
    }
    let mut entries = Vec::new();
    for &e in e_list {
        let q = (y.q() as i128).pow(e);
        let n1 = count_points(y, e) as i128;
        let n2 = count_points(y, 2 * e) as i128;
        let lines = fano_count(y, 1, e) as i128;
        let m = y.m as u32;
        let sym2 = sym_count(y, 2, e);
        let sym2_formula = (1 + q.pow(m)) * n1 + q * q * lines;
        let hilb2 = hilb2_count(y, e)?;
        let hilb2_formula = proj_count(m as i64, q) * n1 + q * q * lines;
        entries.push(ClassicEntry {
            e,
            q: q as u64,
            points: n1,
            points_quadratic: n2,
            lines,
            sym2,
            sym2_formula,
            sym2_holds: sym2 == sym2_formula,
            hilb2,
            hilb2_formula,
            hilb2_holds: hilb2 == hilb2_formula,
        });
    }
    Ok(ClassicReport {
        header: RunHeader::new(y, None),
        all_hold: entries.iter().all(|x| x.sym2_holds && x.hilb2_holds),
        entries,
    })
}
