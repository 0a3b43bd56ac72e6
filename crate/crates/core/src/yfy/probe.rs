//! Relative dimensions estimated from point counts.
//!
//! A count that grows like `q^D` has slope `D` in `log N` against `log q`.
//! Slopes are fitted over a handful of small fields and only ever compared
//! with `0.5` slack, so they are computed in floating point.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{check_params, class_count, stratum_counts, StratumCounts, YfyError};
use crate::geom::{sym_count, VarietySpec};
use crate::lring::{Rat, RelDim};
use crate::motivic;
use crate::params::ParamSet;

/// Growth exponent of a count in `q`, fitted by least squares.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeEstimate {
    /// `None` when every sample is zero.
    pub dimension_estimate: Option<f64>,
    pub rounded: RelDim,
    pub q_list: Vec<u64>,
    /// Root mean square of the fit residuals in `log N`.
    pub residual: f64,
    pub samples_used: usize,
}

fn ln_rat(x: &Rat) -> f64 {
    let (n, d) = (x.numer().abs(), x.denom().clone());
    ln_big(&n) - ln_big(&d)
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 900;
        (x >> shift as usize).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Fits `log |N| = D log q + a / q` by least squares; `D` is the estimate.
///
/// The model takes the leading coefficient to be one and absorbs the
/// first lower-order term into `a / q`. A plain log-log line is biased
/// low at small `q`: `#G(2,5)` over `q = 2..5` gives 8.19. Zero samples
/// are dropped; an all-zero series is `Bottom`.
pub fn slope_fit(samples: &[(u64, Rat)]) -> Result<SlopeEstimate, YfyError> {
    if samples.len() < 3 {
        return Err(YfyError::InsufficientSamples(samples.len()));
    }
    let q_list: Vec<u64> = samples.iter().map(|s| s.0).collect();
    let pts: Vec<(f64, f64, f64)> = samples
        .iter()
        .filter(|s| !s.1.is_zero())
        .map(|(q, n)| ((*q as f64).ln(), 1.0 / *q as f64, ln_rat(n)))
        .collect();
    if pts.is_empty() {
        return Ok(SlopeEstimate { dimension_estimate: None, rounded: RelDim::Bottom, q_list, residual: 0.0, samples_used: 0 });
    }
    let (mut sxx, mut sxz, mut szz, mut sxy, mut szy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, z, y) in &pts {
        sxx += x * x;
        sxz += x * z;
        szz += z * z;
        sxy += x * y;
        szy += z * y;
    }
    let det = sxx * szz - sxz * sxz;
    if pts.len() < 2 || det.abs() < 1e-12 {
        return Err(YfyError::InsufficientSamples(pts.len()));
    }
    let slope = (sxy * szz - szy * sxz) / det;
    let a = (sxx * szy - sxz * sxy) / det;
    let k = pts.len() as f64;
    let residual = (pts.iter().map(|p| (p.2 - slope * p.0 - a * p.1).powi(2)).sum::<f64>() / k).sqrt();
    Ok(SlopeEstimate {
        dimension_estimate: Some(slope),
        rounded: RelDim::Value(slope.round() as i64),
        q_list,
        residual,
        samples_used: pts.len(),
    })
}

/// Evaluates `counter` at each `q` and fits the slope.
pub fn dimension_probe(
    mut counter: impl FnMut(u64) -> Result<Rat, YfyError>,
    q_list: &[u64],
) -> Result<SlopeEstimate, YfyError> {
    if q_list.len() < 3 {
        return Err(YfyError::InsufficientSamples(q_list.len()));
    }
    let samples = q_list.iter().map(|&q| Ok((q, counter(q)?))).collect::<Result<Vec<_>, YfyError>>()?;
    slope_fit(&samples)
}

/// A bound on a relative dimension, checked with `0.5` slack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Estimate must lie within `0.5` of the value.
    Equal(i64),
    /// Estimate must be at most the value plus `0.5`; all-zero passes.
    AtMost(i64),
}

impl Bound {
    pub fn admits(self, est: &SlopeEstimate) -> bool {
        match (self, est.dimension_estimate) {
            (Bound::Equal(_), None) => false,
            (Bound::AtMost(_), None) => true,
            (Bound::Equal(b), Some(x)) => (x - b as f64).abs() <= 0.5,
            (Bound::AtMost(b), Some(x)) => x <= b as f64 + 0.5,
        }
    }
}

/// One term of the averaged relation, sampled over several fields.
#[derive(Debug, Clone, Serialize)]
pub struct TermProbe {
    pub name: &'static str,
    /// Exact values `(q, numerator/denominator)`; `None` where not computed.
    pub values: Vec<(u64, Option<String>)>,
    pub bound: Option<Bound>,
    pub estimate: Option<SlopeEstimate>,
    /// `None` when some sample is missing.
    pub within: Option<bool>,
}

/// Members of one family: the same equations over several fields.
#[derive(Debug, Clone)]
pub struct FamilyEntry {
    pub label: String,
    pub params: ParamSet,
    /// `(variety, e)`, one per sample field `F_{q^e}`.
    pub members: Vec<(VarietySpec, u32)>,
}

/// Everything one field contributes to the table.
struct Sample {
    q: u64,
    terms: Vec<Option<Rat>>,
}

/// Names and bounds of the sampled terms, in table order.
fn term_specs(p: &ParamSet, degrees: &[u32]) -> Vec<(&'static str, Option<Bound>)> {
    let (m, d, k, r) = (p.m, p.d, p.k, p.r());
    let fano_dim: i64 = degrees.iter().map(|&di| crate::geom::binom(di as i128 + r as i128, r as i128) as i64).sum();
    vec![
        ("term1_main", Some(Bound::Equal(0))),
        ("term1_degenerate_m", Some(Bound::AtMost(-m - 1))),
        ("term1", None),
        ("term2_j", Some(Bound::Equal(0))),
        ("term3_q", Some(Bound::AtMost(-r * r))),
        ("term4_b2", Some(Bound::AtMost(-2 * (r - (k - 2) - 1)))),
        ("term4_t2", Some(Bound::AtMost(-m * (r + 1)))),
        ("term4", None),
        ("term5_c", Some(Bound::AtMost(-fano_dim + r * k + k - 1))),
        ("term5_d", Some(Bound::AtMost(-fano_dim + (r - 1) * (d - k) - (d - k - 1)))),
        ("term5", None),
        ("lhs", None),
        ("left_minus_right", None),
        ("positive_dim", Some(Bound::AtMost(-1))),
    ]
}


fn sample(y: &VarietySpec, e: u32, p: &ParamSet, plane_cap: u64) -> Result<Sample, YfyError> {
    check_params(y, p)?;
    let q = y.q().pow(e);
    let (n, r, k) = (p.n, p.r(), p.k);
    let v = p.v_size();
    let g = class_count(&motivic::grassmannian_class(r, n)?.value, q);
    let gv = super::grassmannian_count(r - v, n - v, q);
    let over_g = |x: i128| Rat::new(BigInt::from(x), BigInt::from(g));
    let sym_v = sym_count(y, v as usize, e);
    let mut t: Vec<Option<Rat>> = vec![None; 14];
    t[0] = Some(over_g(sym_v * gv));
    let m_count = super::tuples::dependent_multisets(y, v as usize, e);
    t[1] = m_count.map(|mc| over_g(mc * gv));
    t[2] = m_count.map(|mc| over_g((sym_v - mc) * gv));
    if (g as u64) <= plane_cap {
        let s = stratum_counts(y, p, e)?;
        let c: &StratumCounts = &s.counts;
        let f = s.planes.contained as i128;
        let (cc, dc) = motivic::dependent_tuple_classes(p)?;
        let (cq, dq) = (class_count(&cc.value, q), class_count(&dc.value, q));
        let sym_pr = class_count(&motivic::sym_proj_class(r, k + 1)?.value, q);
        let uconf_pr = class_count(&motivic::uconf_proj_class(r, p.w_size())?.value, q);
        t[3] = Some(over_g(c.j));
        t[4] = Some(over_g(c.q));
        t[5] = Some(over_g(c.b2));
        t[6] = Some(over_g(c.t2));
        t[7] = Some(over_g(c.b2 - c.t2));
        t[8] = Some(over_g(2 * f * cq));
        t[9] = Some(over_g(2 * f * dq));
        t[10] = Some(over_g(2 * f * (cq - dq)));
        t[11] = Some(over_g(2 * f * (sym_pr - uconf_pr)));
        if let Some(term1) = &t[2] {
            let rhs = term1 - t[3].as_ref().unwrap() - t[4].as_ref().unwrap() + t[7].as_ref().unwrap()
                + t[10].as_ref().unwrap();
            t[12] = Some(t[11].as_ref().unwrap() - rhs);
        }
        t[13] = Some(over_g(s.planes.positive_dim as i128));
    }
    Ok(Sample { q, terms: t })
}

fn probes(entry: &FamilyEntry, plane_cap: u64) -> Result<Vec<TermProbe>, YfyError> {
    let degrees = entry.members.first().map(|m| m.0.degrees.clone()).unwrap_or_default();
    let samples: Vec<Sample> =
        entry.members.iter().map(|(y, e)| sample(y, *e, &entry.params, plane_cap)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for (i, (name, bound)) in term_specs(&entry.params, &degrees).into_iter().enumerate() {
        let values: Vec<(u64, Option<String>)> =
            samples.iter().map(|s| (s.q, s.terms[i].as_ref().map(|x| x.to_string()))).collect();
        let complete: Option<Vec<(u64, Rat)>> =
            samples.iter().map(|s| s.terms[i].clone().map(|x| (s.q, x))).collect();
        let estimate = match complete {
            Some(c) => match slope_fit(&c) {
                Ok(est) => Some(est),
                Err(YfyError::InsufficientSamples(_)) => None,
                Err(e) => return Err(e),
            },
            None => None,
        };
        let within = match (bound, &estimate) {
            (Some(b), Some(est)) => Some(b.admits(est)),
            _ => None,
        };
        out.push(TermProbe { name, values, bound, estimate, within });
    }
    Ok(out)
}

/// Probes every bounded term of the averaged relation for one family.
pub fn ratio_probes(entry: &FamilyEntry, plane_cap: u64) -> Result<Vec<TermProbe>, YfyError> {
    Ok(probes(entry, plane_cap)?.into_iter().filter(|t| t.bound.is_some()).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct AveragedRow {
    pub label: String,
    pub params: ParamSet,
    pub r: i64,
    pub terms: Vec<TermProbe>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AveragedTable {
    pub rows: Vec<AveragedRow>,
    /// `|left - right|` at the largest sampled field, per row, where known.
    pub trend: Vec<Option<f64>>,
    /// The trend never increases along the rows where it is known.
    pub trend_nonincreasing: bool,
}

/// The terms of the averaged high-degree relation for a sequence of
/// families, ordered by plane dimension. Terms needing a plane sweep are
/// skipped when `#G(r, n)` exceeds `plane_cap`.
pub fn averaged_table(entries: &[FamilyEntry], plane_cap: u64) -> Result<AveragedTable, YfyError> {
    if entries.windows(2).any(|w| w[0].params.r() > w[1].params.r()) {
        return Err(YfyError::Mismatch("entries must be ordered by increasing n - m".into()));
    }
    let mut rows = Vec::new();
    for e in entries {
        rows.push(AveragedRow { label: e.label.clone(), params: e.params, r: e.params.r(), terms: probes(e, plane_cap)? });
    }
    let trend: Vec<Option<f64>> = rows
        .iter()
        .map(|row| {
            let t = row.terms.iter().find(|t| t.name == "left_minus_right")?;
            let last = t.values.last()?.1.as_ref()?;
            let x: Rat = last.parse().ok()?;
            Some(ln_rat(&x).exp())
        })
        .collect();
    let known: Vec<f64> = trend.iter().flatten().copied().collect();
    let trend_nonincreasing = known.windows(2).all(|w| w[1] <= w[0]);
    Ok(AveragedTable { rows, trend, trend_nonincreasing })
}
