//! Catalog of motivic classes that are polynomials in `L`: projective spaces,
//! Grassmannians, symmetric products and configuration spaces of projective
//! spaces, rank-stratified tuple loci, and the dependent-tuple classes
//! `[C]`, `[D]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use serde::Serialize;

use crate::lring::{invert_poly, LPoly, LSeries, Rat, RelDim};
use crate::params::{ParamSet, ParameterViolation, Regime};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MotivicError {
    #[error("internal error: Gaussian binomial division was not exact for G({k},{n})")]
    NonExactDivision { k: i64, n: i64 },
    #[error("need symmetric powers 0..={needed}, got {got}")]
    IncompleteInput { needed: usize, got: usize },
    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },
    #[error(transparent)]
    ParameterViolation(#[from] ParameterViolation),
    #[error("unknown class expression {0:?}")]
    UnknownClass(String),
}

/// A catalog class with a label recording how it was built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassExpr {
    pub value: LPoly,
    pub label: String,
}

impl ClassExpr {
    pub fn new(value: LPoly, label: impl Into<String>) -> Self {
        ClassExpr { value, label: label.into() }
    }

    pub fn degree(&self) -> RelDim {
        self.value.relative_dimension()
    }

    pub fn count(&self, q: i64) -> BigInt {
        self.value.specialize_int(q).expect("catalog classes have no negative exponents")
    }
}

impl fmt::Display for ClassExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] = {}", self.label, self.value)
    }
}

/// Truncated zeta series `Z_X(t) = sum_r [Sym^r X] t^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaSeries {
    pub base: ClassExpr,
    /// Coefficients of `t^0 ..= t^R`.
    pub terms: Vec<LPoly>,
}

/// `Z_{P^k}(t) = 1 / ((1 - t)(1 - L t)...(1 - L^k t))` through `t^r_max`.
pub fn proj_zeta(k: i64, r_max: usize) -> ZetaSeries {
    // Dividing by (1 - L^i t) is the recurrence c_r <- c_r + L^i c_{r-1}.
    let mut c = vec![LPoly::one(); r_max + 1];
    for i in 1..=k {
        let li = LPoly::monomial(Rat::from_integer(1.into()), i);
        for r in 1..=r_max {
            let add = &li * &c[r - 1];
            c[r] = &c[r] + &add;
        }
    }
    ZetaSeries { base: proj_class(k), terms: c }
}

fn memo<K, F>(cell: &'static OnceLock<Mutex<HashMap<K, LPoly>>>, key: K, f: F) -> LPoly
where
    K: std::hash::Hash + Eq + Clone,
    F: FnOnce() -> LPoly,
{
    let map = cell.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = map.lock().unwrap().get(&key) {
        return v.clone();
    }
    let v = f();
    map.lock().unwrap().insert(key, v.clone());
    v
}

/// `[P^n] = 1 + L + ... + L^n`; zero for `n < 0`.
pub fn proj_class(n: i64) -> ClassExpr {
    let value = if n < 0 { LPoly::zero() } else { LPoly::from_int_coeffs(&vec![1; n as usize + 1]) };
    ClassExpr::new(value, format!("P^{n}"))
}

/// `[G(k, n)]`, the Gaussian binomial `prod_{j=1}^{k+1} (L^{n-k+j} - 1)/(L^j - 1)`.
///
/// Returns zero outside `0 <= k <= n` except `k = -1`, where the empty
/// subspace gives 1.
pub fn grassmannian_class(k: i64, n: i64) -> Result<ClassExpr, MotivicError> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, i64), LPoly>>> = OnceLock::new();
    let label = format!("G({k},{n})");
    if k == -1 && n >= -1 {
        return Ok(ClassExpr::new(LPoly::one(), label));
    }
    if k < 0 || k > n {
        return Ok(ClassExpr::new(LPoly::zero(), label));
    }
    let mut failed = false;
    let value = memo(&CACHE, (k, n), || {
        let one = LPoly::one();
        let mut num = LPoly::one();
        let mut den = LPoly::one();
        for j in 1..=k + 1 {
            num = &num * &(LPoly::monomial(Rat::from_integer(1.into()), n - k + j) - &one);
            den = &den * &(LPoly::monomial(Rat::from_integer(1.into()), j) - &one);
        }
        match num.div_exact(&den) {
            Some(v) => v,
            None => {
                failed = true;
                LPoly::zero()
            }
        }
    });
    if failed {
        return Err(MotivicError::NonExactDivision { k, n });
    }
    Ok(ClassExpr::new(value, label))
}

/// `[Sym^r P^k]`, the coefficient of `t^r` in the zeta series of `P^k`.
pub fn sym_proj_class(k: i64, r: i64) -> Result<ClassExpr, MotivicError> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, i64), LPoly>>> = OnceLock::new();
    if k < 0 || r < 0 {
        return Err(MotivicError::OutOfRange { what: "Sym", detail: format!("k={k}, r={r}") });
    }
    let value = memo(&CACHE, (k, r), || proj_zeta(k, r as usize).terms[r as usize].clone());
    Ok(ClassExpr::new(value, format!("Sym^{r}(P^{k})")))
}

/// `[UConf^n X]` from `[Sym^0 X] ..= [Sym^n X]` via
/// `[UConf^n] = [Sym^n] - sum_{j>=1} [UConf^{n-2j}][Sym^j]`.
pub fn uconf_class(sym_classes: &[ClassExpr], n: usize) -> Result<ClassExpr, MotivicError> {
    if sym_classes.len() < n + 1 {
        return Err(MotivicError::IncompleteInput { needed: n, got: sym_classes.len() });
    }
    let mut uconf: Vec<LPoly> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut v = sym_classes[i].value.clone();
        if i == 0 {
            v = LPoly::one();
        }
        let mut j = 1;
        while 2 * j <= i {
            v = &v - &(&uconf[i - 2 * j] * &sym_classes[j].value);
            j += 1;
        }
        uconf.push(v);
    }
    let base = sym_classes.get(1).map_or("X".to_string(), |c| c.label.clone());
    Ok(ClassExpr::new(uconf.pop().unwrap(), format!("UConf_{n}({base})")))
}

/// `[UConf_r P^k]`.
pub fn uconf_proj_class(k: i64, r: i64) -> Result<ClassExpr, MotivicError> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, i64), LPoly>>> = OnceLock::new();
    if k < 0 || r < 0 {
        return Err(MotivicError::OutOfRange { what: "UConf", detail: format!("k={k}, r={r}") });
    }
    let value = memo(&CACHE, (k, r), || {
        let zeta = proj_zeta(k, r as usize);
        let syms: Vec<ClassExpr> = zeta
            .terms
            .into_iter()
            .enumerate()
            .map(|(i, v)| ClassExpr::new(v, format!("Sym^{i}(P^{k})")))
            .collect();
        uconf_class(&syms, r as usize).expect("zeta series has r + 1 terms").value
    });
    Ok(ClassExpr::new(value, format!("UConf_{r}(P^{k})")))
}

/// Locus of unordered `r`-tuples in `P^n` whose span has rank exactly `u`
/// (projective dimension `u - 1`).
///
/// `distinct = false` gives `I(u,n,r)` on the symmetric product, where points
/// may repeat. `distinct = true` gives `K(u,n,r)` on the configuration space.
/// Both use `X(u,n,r) = [G(u-1,n)] X(u,u-1,r)` and
/// `X(u,u-1,r) = S_r(P^{u-1}) - sum_{v<u} X(v,u-1,r)` with `S` the symmetric
/// product or the configuration space.
pub fn rank_locus_class(u: i64, n: i64, r: i64, distinct: bool) -> Result<ClassExpr, MotivicError> {
    if u < 1 || n < 0 || u > r.min(n + 1) {
        return Err(MotivicError::OutOfRange {
            what: "rank locus",
            detail: format!("need 1 <= u <= min(r, n+1); got u={u}, n={n}, r={r}"),
        });
    }
    let value = rank_locus_value(u, n, r, distinct)?;
    let tag = if distinct { "K" } else { "I" };
    Ok(ClassExpr::new(value, format!("{tag}(u={u},n={n},r={r})")))
}

fn rank_locus_value(u: i64, n: i64, r: i64, distinct: bool) -> Result<LPoly, MotivicError> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, i64, i64, bool), LPoly>>> = OnceLock::new();
    let key = (u, n, r, distinct);
    if let Some(v) = CACHE.get_or_init(Default::default).lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let full = if distinct { uconf_proj_class(u - 1, r)? } else { sym_proj_class(u - 1, r)? };
    let mut spanning = full.value;
    for v in 1..u {
        spanning = &spanning - &rank_locus_value(v, u - 1, r, distinct)?;
    }
    let value = &grassmannian_class(u - 1, n)?.value * &spanning;
    CACHE.get().unwrap().lock().unwrap().insert(key, value.clone());
    Ok(value)
}

/// `X(u,n,r)` with zero outside the valid range of `u`.
pub fn rank_locus_or_zero(u: i64, n: i64, r: i64, distinct: bool) -> Result<LPoly, MotivicError> {
    if u < 1 || n < 0 || u > r.min(n + 1) {
        return Ok(LPoly::zero());
    }
    rank_locus_value(u, n, r, distinct)
}

/// `([C], [D])` for a parameter set.
///
/// `C` is the locus of linearly dependent `(k+1)`-tuples in `P^{n-m}`.
/// In the low regime `D` is the dependent `(d-k-1)`-tuples; in the high
/// regime it is the distinct `(d-k-1)`-tuples spanning at most a
/// hyperplane of `P^{n-m}`.
pub fn dependent_tuple_classes(params: &ParamSet) -> Result<(ClassExpr, ClassExpr), MotivicError> {
    let r = params.r();
    let tag = format!("n={},m={},d={},k={}", params.n, params.m, params.d, params.k);
    let vs = params.v_size();
    let c = &sym_proj_class(r, vs)?.value - &rank_locus_or_zero(vs, r, vs, false)?;
    let ws = params.w_size();
    let d = match params.regime {
        Regime::Low => &sym_proj_class(r, ws)?.value - &rank_locus_or_zero(ws, r, ws, false)?,
        Regime::High => &uconf_proj_class(r, ws)?.value - &rank_locus_or_zero(r + 1, r, ws, true)?,
    };
    Ok((ClassExpr::new(c, format!("C({tag})")), ClassExpr::new(d, format!("D({tag})"))))
}

/// The Grassmannian part of the weighted average
/// `A_{n,m,u} = [Y^(u)] [G(n-m-u, n-u)] / [G(n-m, n)]`.
///
/// `[Y^(u)]` is not a polynomial in `L` for general `Y`; it is supplied as a
/// point count through [`WeightedAverage::evaluate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAverage {
    pub n: i64,
    pub m: i64,
    pub u: i64,
    pub numerator: LPoly,
    pub denominator: LPoly,
    /// `numerator * denominator^-1` in the completion.
    pub factor: LSeries,
}

impl WeightedAverage {
    /// `#Y^(u)(F_q) * #G(n-m-u, n-u)(F_q) / #G(n-m, n)(F_q)` exactly.
    pub fn evaluate(&self, sym_y_count: &Rat, q: i64) -> Rat {
        let q = Rat::from_integer(q.into());
        let num = self.numerator.specialize(&q).unwrap();
        let den = self.denominator.specialize(&q).unwrap();
        sym_y_count * num / den
    }
}

pub fn weighted_average_class(n: i64, m: i64, u: i64, depth: i64) -> Result<WeightedAverage, MotivicError> {
    if u < 0 || u > n - m || m < 0 || m > n {
        let failed = vec![crate::params::Restriction::WellFormed];
        return Err(ParameterViolation { n, m, d: 0, k: u, failed }.into());
    }
    let numerator = grassmannian_class(n - m - u, n - u)?.value;
    let denominator = grassmannian_class(n - m, n)?.value;
    let inv = invert_poly(&denominator, depth).expect("Grassmannian classes are nonzero");
    let factor = inv.mul_poly(&numerator).truncate(depth);
    Ok(WeightedAverage { n, m, u, numerator, denominator, factor })
}

/// Parses a CLI class name: `P(n)`, `G(k,n)`, `Sym(r,P(k))`,
/// `UConf(r,P(k))`, `I(u,n,r)`, `K(u,n,r)`, `C(n,m,d,k)`, `D(n,m,d,k)`.
pub fn class_by_name(name: &str) -> Result<ClassExpr, MotivicError> {
    let s: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || MotivicError::UnknownClass(name.to_string());
    let open = s.find('(').ok_or_else(bad)?;
    if !s.ends_with(')') {
        return Err(bad());
    }
    let head = &s[..open];
    let inner = &s[open + 1..s.len() - 1];
    let ints = |t: &str| -> Result<Vec<i64>, MotivicError> {
        t.split(',').map(|x| x.parse::<i64>().map_err(|_| bad())).collect()
    };
    let nested = |t: &str| -> Result<(i64, i64), MotivicError> {
        let (r, rest) = t.split_once(',').ok_or_else(bad)?;
        let k = rest.strip_prefix("P(").and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
        Ok((r.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?))
    };
    match head {
        "P" => match ints(inner)?[..] {
            [n] if n >= 0 => Ok(proj_class(n)),
            _ => Err(bad()),
        },
        "G" => match ints(inner)?[..] {
            [k, n] if 0 <= k && k <= n => grassmannian_class(k, n),
            _ => Err(bad()),
        },
        "Sym" => {
            let (r, k) = nested(inner)?;
            sym_proj_class(k, r)
        }
        "UConf" => {
            let (r, k) = nested(inner)?;
            uconf_proj_class(k, r)
        }
        "I" | "K" => match ints(inner)?[..] {
            [u, n, r] => rank_locus_class(u, n, r, head == "K"),
            _ => Err(bad()),
        },
        "C" | "D" => match ints(inner)?[..] {
            [n, m, d, k] => {
                let p = ParamSet::new(n, m, d, k)?;
                let (c, dd) = dependent_tuple_classes(&p)?;
                Ok(if head == "C" { c } else { dd })
            }
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

/// Summary row for JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub label: String,
    pub value: String,
    pub degree: RelDim,
}

impl From<&ClassExpr> for ClassReport {
    fn from(c: &ClassExpr) -> Self {
        ClassReport { label: c.label.clone(), value: c.value.to_string(), degree: c.degree() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LPoly {
        s.parse().unwrap()
    }

    #[test]
    fn projective_spaces() {
        assert_eq!(proj_class(0).value, LPoly::one());
        assert_eq!(proj_class(2).value, p("1 + L + L^2"));
        assert_eq!(proj_class(3).count(2), 15.into());
    }

    #[test]
    fn grassmannians() {
        assert_eq!(grassmannian_class(0, 4).unwrap().value, proj_class(4).value);
        assert_eq!(grassmannian_class(1, 3).unwrap().value, p("L^4 + L^3 + 2*L^2 + L + 1"));
        assert_eq!(grassmannian_class(2, 5).unwrap().count(2), 1395.into());
    }

    #[test]
    fn symmetric_products() {
        assert_eq!(sym_proj_class(1, 2).unwrap().value, p("1 + L + L^2"));
        assert_eq!(sym_proj_class(3, 1).unwrap().value, proj_class(3).value);
        assert_eq!(sym_proj_class(3, 0).unwrap().value, LPoly::one());
    }

    #[test]
    fn configuration_spaces() {
        let syms: Vec<ClassExpr> = (0..=3).map(|r| sym_proj_class(1, r).unwrap()).collect();
        assert_eq!(uconf_class(&syms, 1).unwrap().value, proj_class(1).value);
        let x = &proj_class(1).value;
        assert_eq!(uconf_class(&syms, 3).unwrap().value, &syms[3].value - &(x * x));
        let u2 = uconf_class(&syms, 2).unwrap();
        assert_eq!(u2.value, p("L^2"));
        assert_eq!(u2.count(2), 4.into());
        assert!(matches!(uconf_class(&syms, 5), Err(MotivicError::IncompleteInput { .. })));
    }

    #[test]
    fn rank_loci_base_cases() {
        for b in 0..4 {
            for r in 1..4 {
                assert_eq!(rank_locus_class(1, b, r, false).unwrap().value, proj_class(b).value);
            }
            assert_eq!(rank_locus_class(1, b, 2, true).unwrap().value, LPoly::zero());
            assert_eq!(rank_locus_class(1, b, 1, true).unwrap().value, proj_class(b).value);
        }
        let g = grassmannian_class(1, 3).unwrap().value;
        let expected = &g * &(&sym_proj_class(1, 3).unwrap().value - &proj_class(1).value);
        assert_eq!(rank_locus_class(2, 3, 3, false).unwrap().value, expected);
        assert!(rank_locus_class(4, 2, 5, false).is_err());
        assert!(rank_locus_class(3, 3, 2, false).is_err());
    }

    #[test]
    fn dependent_tuples() {
        let params = ParamSet::unchecked(6, 3, 6, 2).unwrap();
        let (c, _) = dependent_tuple_classes(&params).unwrap();
        assert_eq!(c.degree(), RelDim::Value(7));
        let params = ParamSet::unchecked(6, 3, 6, 0).unwrap();
        let (c, _) = dependent_tuple_classes(&params).unwrap();
        assert!(c.value.is_zero());
    }

    #[test]
    fn weighted_average_factor() {
        let w = weighted_average_class(5, 3, 1, 32).unwrap();
        assert_eq!(w.factor.relative_dimension(), RelDim::Value(-3));
        let w0 = weighted_average_class(5, 3, 0, 32).unwrap();
        assert_eq!(w0.factor.to_poly(), LPoly::one());
        assert!(w.factor.terms().all(|(k, _)| k >= -32));
        assert!(weighted_average_class(5, 3, 3, 32).is_err());
    }

    #[test]
    fn names() {
        assert_eq!(class_by_name("G(2,5)").unwrap().count(2), 1395.into());
        assert_eq!(class_by_name("Sym(2, P(1))").unwrap().value, p("1 + L + L^2"));
        assert_eq!(class_by_name("UConf(2,P(1))").unwrap().value, p("L^2"));
        assert_eq!(class_by_name("I(1,3,2)").unwrap().value, proj_class(3).value);
        assert!(class_by_name("C(5,3,4,0)").unwrap().value.is_zero());
        assert!(class_by_name("Q(1)").is_err());
        assert!(class_by_name("C(3,2,3,1)").is_err());
    }
}
