//! Report headers and aligned-column text rendering.

use std::fmt::Write as _;

use serde::Serialize;

use crate::geom::VarietySpec;
use crate::params::ParamSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub degree: u32,
    pub q: u64,
}

/// Identifies the input of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunHeader {
    pub variety_sha256: String,
    pub ambient: usize,
    pub degrees: Vec<u32>,
    pub field: FieldInfo,
    pub params: Option<ParamSet>,
}

impl RunHeader {
    pub fn new(y: &VarietySpec, params: Option<ParamSet>) -> Self {
        RunHeader {
            variety_sha256: y.content_hash.clone(),
            ambient: y.n,
            degrees: y.degrees.clone(),
            field: FieldInfo { p: y.field.p(), degree: y.field.degree(), q: y.q() },
            params,
        }
    }

    pub fn lines(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("variety_sha256".into(), self.variety_sha256.clone()),
            ("ambient".into(), format!("P^{}", self.ambient)),
            ("degrees".into(), join(&self.degrees)),
            ("field".into(), format!("F_{} (p={}, degree={})", self.field.q, self.field.p, self.field.degree)),
        ];
        if let Some(p) = &self.params {
            out.push(("params".into(), format!("n={} m={} d={} k={} regime={}", p.n, p.m, p.d, p.k, p.regime)));
        }
        out
    }
}

pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Two-column `key  value` block.
pub fn kv_block(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        writeln!(s, "{k:<w$}  {v}").unwrap();
    }
    s
}

/// Table with a header row; every column padded to its widest cell.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            widths[i] = widths[i].max(c.len());
        }
    }
    let mut s = String::new();
    let line = |cells: Vec<&str>, s: &mut String| {
        let parts: Vec<String> = cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = widths[i])).collect();
        writeln!(s, "{}", parts.join("  ").trim_end()).unwrap();
    };
    line(header.to_vec(), &mut s);
    for r in rows {
        line(r.iter().map(|c| c.as_str()).collect(), &mut s);
    }
    s
}
