//! Variety files and the [`VarietySpec`] type.
//!
//! ```text
//! # Fermat cubic surface
//! field 2 1
//! ambient 3
//! form x0^3 + x1^3 + x2^3 + x3^3
//! ```

use std::path::Path;
use std::sync::{Arc, OnceLock};

use sha2::{Digest, Sha256};

use super::GeomError;
use crate::gf::{field_make, FieldSpec, MPoly};

/// A complete intersection `Y = V(f_1, ..., f_s)` in `P^n` over `F_q`.
#[derive(Debug, Clone)]
pub struct VarietySpec {
    pub n: usize,
    pub field: Arc<FieldSpec>,
    pub forms: Vec<MPoly>,
    /// Degrees `d_1, ..., d_s`.
    pub degrees: Vec<u32>,
    /// `n - s`.
    pub m: usize,
    /// `prod d_i`.
    pub d: u32,
    /// sha256 of the source text, or of the rendered forms when built in code.
    pub content_hash: String,
    /// Tower exponent relative to the field this variety was loaded over.
    pub base_e: u32,
    smooth: Arc<OnceLock<Smoothness>>,
}

/// Result of the Jacobian test at all points over `F_q` and `F_{q^2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Smoothness {
    pub points_checked: u64,
    pub singular_points: u64,
}

impl Smoothness {
    pub fn is_smooth(&self) -> bool {
        self.singular_points == 0
    }
}

impl VarietySpec {
    pub fn new(field: &Arc<FieldSpec>, n: usize, forms: Vec<MPoly>) -> Result<Self, GeomError> {
        let rendered: Vec<String> = forms.iter().map(|f| f.to_string()).collect();
        let text = format!("field {} {}\nambient {}\n{}", field.p(), field.degree(), n, rendered.join("\n"));
        Self::build(field, n, forms, &text)
    }

    fn build(field: &Arc<FieldSpec>, n: usize, forms: Vec<MPoly>, source: &str) -> Result<Self, GeomError> {
        if forms.len() > n {
            return Err(GeomError::Invalid(format!("{} forms in P^{n} cut out the empty set", forms.len())));
        }
        for f in &forms {
            if f.nvars() != n + 1 {
                return Err(GeomError::Invalid(format!("form {f} is not in {} variables", n + 1)));
            }
            if f.is_zero() {
                return Err(GeomError::Invalid("zero form".into()));
            }
            if !f.is_homogeneous() {
                return Err(GeomError::NotHomogeneous(f.to_string()));
            }
            if f.degree() == 0 {
                return Err(GeomError::Invalid(format!("constant form {f}")));
            }
        }
        let degrees: Vec<u32> = forms.iter().map(|f| f.degree()).collect();
        let hash = hex::encode(Sha256::digest(source.as_bytes()));
        Ok(VarietySpec {
            n,
            field: field.clone(),
            m: n - forms.len(),
            d: degrees.iter().product(),
            degrees,
            forms,
            content_hash: hash,
            base_e: 1,
            smooth: Arc::new(OnceLock::new()),
        })
    }

    /// Parses the `field` / `ambient` / `form` grammar. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, GeomError> {
        let mut field = None;
        let mut n = None;
        let mut raw_forms: Vec<(usize, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let bad = |msg: String| GeomError::Parse { line: lineno, msg };
            match key {
                "field" => {
                    let v: Vec<u32> = rest
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| bad(format!("bad integer {t:?}"))))
                        .collect::<Result<_, _>>()?;
                    if v.len() != 2 {
                        return Err(bad("expected `field p e`".into()));
                    }
                    field = Some(field_make(v[0], v[1]).map_err(|e| bad(e.to_string()))?);
                }
                "ambient" => {
                    n = Some(rest.parse::<usize>().map_err(|_| bad(format!("bad dimension {rest:?}")))?);
                }
                "form" => raw_forms.push((lineno, rest.to_string())),
                other => return Err(bad(format!("unknown section {other:?}"))),
            }
        }
        let field = field.ok_or(GeomError::Parse { line: 0, msg: "missing `field` line".into() })?;
        let n = n.ok_or(GeomError::Parse { line: 0, msg: "missing `ambient` line".into() })?;
        let forms = raw_forms
            .into_iter()
            .map(|(line, s)| {
                MPoly::parse(&s, &field, n + 1).map_err(|e| GeomError::Parse { line, msg: e.to_string() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::build(&field, n, forms, text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GeomError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| GeomError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    /// Size of the base field.
    pub fn q(&self) -> u64 {
        self.field.size() as u64
    }

    pub fn codim(&self) -> usize {
        self.forms.len()
    }

    /// The same variety over `F_{q^e}`.
    pub fn base_change(&self, e: u32) -> Result<VarietySpec, GeomError> {
        if e == 1 {
            return Ok(self.clone());
        }
        let big = field_make(self.field.p(), self.field.degree() * e)?;
        let forms = self.forms.iter().map(|f| f.base_change(&big)).collect::<Result<Vec<_>, _>>()?;
        let mut out = self.clone();
        out.field = big;
        out.forms = forms;
        out.base_e = self.base_e * e;
        out.smooth = Arc::new(OnceLock::new());
        Ok(out)
    }

    /// Jacobian-rank test at every point over `F_q` and `F_{q^2}`; cached.
    pub fn smoothness(&self) -> Smoothness {
        *self.smooth.get_or_init(|| {
            let partials: Vec<Vec<MPoly>> =
                self.forms.iter().map(|f| (0..=self.n).map(|j| f.derivative(j)).collect()).collect();
            let mut checked = 0;
            let mut singular = 0;
            for e in 1..=2 {
                let Ok(big) = self.base_change(e) else { continue };
                let f = big.field.clone();
                let partials: Vec<Vec<MPoly>> = partials
                    .iter()
                    .map(|row| row.iter().map(|p| p.base_change(&f).unwrap()).collect())
                    .collect();
                for pt in super::enumerate_points(&big, 1) {
                    checked += 1;
                    let mut jac: Vec<Vec<u32>> =
                        partials.iter().map(|row| row.iter().map(|p| p.eval_raw(&pt)).collect()).collect();
                    if super::solve::rank(&f, &mut jac) < self.forms.len() {
                        singular += 1;
                    }
                }
            }
            Smoothness { points_checked: checked, singular_points: singular }
        })
    }
}
