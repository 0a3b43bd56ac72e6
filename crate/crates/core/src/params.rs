//! Parameter sets `(n, m, d, k)` and the variable size restrictions.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which family of stratum definitions applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `d - k - 1 <= n - m - 1`: both tuples can be linearly independent.
    Low,
    /// `d - k - 1 > n - m - 1`: the larger tuple is asked to span the plane.
    High,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Low => write!(f, "low"),
            Regime::High => write!(f, "high"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Restriction {
    /// `0 <= m <= n`, `d >= 1`, `0 <= k`, `k + 1 <= d`.
    WellFormed,
    /// `d >= k + 3`
    DegreeAboveK,
    /// `k + 1 <= n - m - 1`
    TupleBelowCodim,
    /// `n - m <= m - 1`
    CodimBelowDim,
    /// `d >= (n - m) + 2`
    DegreeAboveCodim,
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Restriction::WellFormed => "0 <= m <= n, 0 <= k, k + 1 <= d",
            Restriction::DegreeAboveK => "d >= k + 3",
            Restriction::TupleBelowCodim => "k + 1 <= n - m - 1",
            Restriction::CodimBelowDim => "n - m <= m - 1",
            Restriction::DegreeAboveCodim => "d >= (n - m) + 2",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parameter restrictions violated for (n={n}, m={m}, d={d}, k={k}): {}", list(.failed))]
pub struct ParameterViolation {
    pub n: i64,
    pub m: i64,
    pub d: i64,
    pub k: i64,
    pub failed: Vec<Restriction>,
}

fn list(r: &[Restriction]) -> String {
    r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A validated `(n, m, d, k)` with its regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSet {
    pub n: i64,
    pub m: i64,
    pub d: i64,
    pub k: i64,
    pub regime: Regime,
    /// False when built through [`ParamSet::unchecked`] or
    /// [`ParamSet::with_regime`].
    pub restricted: bool,
}

impl ParamSet {
    /// Validates every restriction; the regime follows from the numbers.
    pub fn new(n: i64, m: i64, d: i64, k: i64) -> Result<Self, ParameterViolation> {
        let failed = Self::violations(n, m, d, k);
        if failed.is_empty() {
            Ok(Self { n, m, d, k, regime: Self::numeric_regime(n, m, d, k), restricted: true })
        } else {
            Err(ParameterViolation { n, m, d, k, failed })
        }
    }

    /// Only well-formedness is checked. Used for degenerate examples such as
    /// the cubic hypersurface, which sit outside the restrictions.
    pub fn unchecked(n: i64, m: i64, d: i64, k: i64) -> Result<Self, ParameterViolation> {
        Self::with_regime(n, m, d, k, Self::numeric_regime(n, m, d, k))
    }

    /// As [`ParamSet::unchecked`] with an explicit regime.
    pub fn with_regime(
        n: i64,
        m: i64,
        d: i64,
        k: i64,
        regime: Regime,
    ) -> Result<Self, ParameterViolation> {
        if !Self::well_formed(n, m, d, k) {
            return Err(ParameterViolation { n, m, d, k, failed: vec![Restriction::WellFormed] });
        }
        Ok(Self { n, m, d, k, regime, restricted: false })
    }

    fn well_formed(n: i64, m: i64, d: i64, k: i64) -> bool {
        0 <= m && m <= n && d >= 1 && k >= 0 && k < d
    }

    pub fn numeric_regime(n: i64, m: i64, d: i64, k: i64) -> Regime {
        if d - k - 1 < n - m {
            Regime::Low
        } else {
            Regime::High
        }
    }

    pub fn violations(n: i64, m: i64, d: i64, k: i64) -> Vec<Restriction> {
        if !Self::well_formed(n, m, d, k) {
            return vec![Restriction::WellFormed];
        }
        let mut out = Vec::new();
        if d < k + 3 {
            out.push(Restriction::DegreeAboveK);
        }
        if k + 1 > n - m - 1 {
            out.push(Restriction::TupleBelowCodim);
        }
        if n - m > m - 1 {
            out.push(Restriction::CodimBelowDim);
        }
        if d < n - m + 2 {
            out.push(Restriction::DegreeAboveCodim);
        }
        out
    }

    /// Plane dimension `n - m`.
    pub fn r(&self) -> i64 {
        self.n - self.m
    }

    /// Size of the W-side tuples, `d - k - 1`.
    pub fn w_size(&self) -> i64 {
        self.d - self.k - 1
    }

    /// Size of the V-side tuples, `k + 1`.
    pub fn v_size(&self) -> i64 {
        self.k + 1
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={} d={} k={} ({} regime)", self.n, self.m, self.d, self.k, self.regime)
    }
}

impl std::str::FromStr for ParamSet {
    type Err = String;

    /// Parses `n,m,d,k` and validates.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| format!("bad integer {t:?}: {e}")))
            .collect::<Result<_, _>>()?;
        if v.len() != 4 {
            return Err(format!("expected n,m,d,k; got {} values", v.len()));
        }
        ParamSet::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
    }
}
