//! Text, CSV and JSON rendering of reports.

use std::fmt::Write as _;

use lefschetz::geom::{self, VarietySpec};
use lefschetz::lring::LSeries;
use lefschetz::motivic::{ClassExpr, ClassReport};
use lefschetz::params::ParamSet;
use lefschetz::yfy::report::{join, kv_block, table};
use lefschetz::yfy::{
    AveragedTable, ClassicReport, ExtendedReport, LWDiagnostics, PartitionReport, PlaneTally, RunHeader,
    SlopeEstimate, StratumCounts, TermProbe,
};
use serde::Serialize;
use serde_json::json;

use crate::Failure;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub struct Output(pub String);

fn to_json<T: Serialize>(v: &T) -> Output {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    Output(s)
}

fn csv(schema: &str, header: &[&str], rows: &[Vec<String>]) -> Output {
    let mut s = format!("# schema: lefschetz-{schema}/1\n");
    writeln!(s, "{}", header.join(",")).unwrap();
    for r in rows {
        writeln!(s, "{}", r.iter().map(|c| quote(c)).collect::<Vec<_>>().join(",")).unwrap();
    }
    Output(s)
}

fn quote(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "unknown".to_string(), |v| v.to_string())
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "FAILS"
    }
}

fn est(e: &Option<SlopeEstimate>) -> String {
    match e {
        None => "-".into(),
        Some(s) => match s.dimension_estimate {
            Some(x) => format!("{x:.3}"),
            None => "BOTTOM".into(),
        },
    }
}

fn header_text(h: &RunHeader) -> String {
    kv_block(&h.lines())
}

fn planes_text(p: &PlaneTally) -> String {
    let mut s = format!(
        "planes: {} total, {} transversal, {} tangent, {} contained, {} positive-dimensional\n",
        p.total, p.transversal, p.tangent, p.contained, p.positive_dim
    );
    if p.positive_dim > 0 {
        writeln!(s, "excluded plane ids (first {}): {}", p.excluded_ids.len(), join(&p.excluded_ids)).unwrap();
    }
    if !p.bijection_failures.is_empty() {
        writeln!(s, "bijection failures at plane ids: {}", join(&p.bijection_failures)).unwrap();
    }
    if p.conservation_failures > 0 {
        writeln!(s, "conservation failures: {}", p.conservation_failures).unwrap();
    }
    s
}

const COUNT_COLS: [&str; 13] = ["W", "V", "A", "B1", "B2", "R", "T1", "T2", "J", "P", "Q", "M", "N"];

fn count_cells(c: &StratumCounts) -> Vec<String> {
    let mut v: Vec<String> = [c.w, c.v, c.a, c.b1, c.b2, c.r, c.t1, c.t2, c.j, c.p, c.q]
        .iter()
        .map(|x| x.to_string())
        .collect();
    v.push(opt(&c.m));
    v.push(opt(&c.n));
    v
}

pub fn class(
    fmt: Format,
    c: &ClassExpr,
    q: &[i64],
    quotient: Option<(&str, &LSeries)>,
) -> Result<Output, Failure> {
    let counts: Vec<(i64, String)> = q.iter().map(|&qq| (qq, c.count(qq).to_string())).collect();
    Ok(match fmt {
        Format::Json => to_json(&json!({
            "class": ClassReport::from(c),
            "counts": counts.iter().map(|(q, n)| json!({"q": q, "count": n})).collect::<Vec<_>>(),
            "quotient": quotient.map(|(l, s)| json!({"divisor": l, "series": s.to_string()})),
        })),
        Format::Csv => {
            let rows = counts.iter().map(|(q, n)| vec![c.label.clone(), q.to_string(), n.clone()]).collect::<Vec<_>>();
            csv("class", &["label", "q", "count"], &rows)
        }
        Format::Text => {
            let mut s = format!("{c}\nrelative dimension  {}\n", c.degree());
            for (q, n) in &counts {
                writeln!(s, "count at q={q}  {n}").unwrap();
            }
            if let Some((l, ser)) = quotient {
                writeln!(s, "[{}] / [{l}] = {ser}", c.label).unwrap();
            }
            Output(s)
        }
    })
}

pub fn count(fmt: Format, y: &VarietySpec, e: &[u32], lines: bool) -> Output {
    let h = RunHeader::new(y, None);
    let rows: Vec<(u32, u64, u64, Option<u64>)> = e
        .iter()
        .map(|&ei| (ei, y.q().pow(ei), geom::count_points(y, ei), lines.then(|| geom::fano_count(y, 1, ei))))
        .collect();
    match fmt {
        Format::Json => to_json(&json!({
            "header": h,
            "counts": rows.iter().map(|(e, q, n, l)| json!({"e": e, "q": q, "points": n, "lines": l})).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(
            "count",
            &["e", "q", "points", "lines"],
            &rows.iter().map(|(e, q, n, l)| vec![e.to_string(), q.to_string(), n.to_string(), opt(l)]).collect::<Vec<_>>(),
        ),
        Format::Text => {
            let mut s = header_text(&h);
            s.push('\n');
            let mut hd = vec!["e", "q", "points"];
            if lines {
                hd.push("lines");
            }
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(e, q, n, l)| {
                    let mut r = vec![e.to_string(), q.to_string(), n.to_string()];
                    if let Some(l) = l {
                        r.push(l.to_string());
                    }
                    r
                })
                .collect();
            s.push_str(&table(&hd, &body));
            Output(s)
        }
    }
}

pub fn classic(fmt: Format, rep: &ClassicReport) -> Output {
    match fmt {
        Format::Json => to_json(rep),
        Format::Csv => csv(
            "verify-classic",
            &["e", "q", "points", "points_quadratic", "lines", "sym2", "sym2_formula", "sym2_holds", "hilb2", "hilb2_formula", "hilb2_holds"],
            &rep.entries
                .iter()
                .map(|x| {
                    vec![
                        x.e.to_string(),
                        x.q.to_string(),
                        x.points.to_string(),
                        x.points_quadratic.to_string(),
                        x.lines.to_string(),
                        x.sym2.to_string(),
                        x.sym2_formula.to_string(),
                        x.sym2_holds.to_string(),
                        x.hilb2.to_string(),
                        x.hilb2_formula.to_string(),
                        x.hilb2_holds.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Text => {
            let mut s = header_text(&rep.header);
            for x in &rep.entries {
                writeln!(s, "\nq={} (e={})  #Y={}  #Y(F_q^2)={}  lines={}", x.q, x.e, x.points, x.points_quadratic, x.lines).unwrap();
                writeln!(s, "  Sym^2:  {} vs {}  {}", x.sym2, x.sym2_formula, mark(x.sym2_holds)).unwrap();
                writeln!(s, "  Hilb^2: {} vs {}  {}", x.hilb2, x.hilb2_formula, mark(x.hilb2_holds)).unwrap();
            }
            writeln!(s, "\nresult: {}", if rep.all_hold { "all identities hold" } else { "FAILED" }).unwrap();
            Output(s)
        }
    }
}

pub fn extended(fmt: Format, rep: &ExtendedReport) -> Output {
    match fmt {
        Format::Json => to_json(rep),
        Format::Csv => {
            let mut hd = vec!["e", "q"];
            hd.extend(COUNT_COLS);
            hd.extend(["lhs", "rhs", "holds", "bijection_holds", "positive_dim_planes"]);
            let rows = rep
                .entries
                .iter()
                .map(|x| {
                    let mut r = vec![x.e.to_string(), x.q.to_string()];
                    r.extend(count_cells(&x.counts));
                    r.extend([
                        x.lhs.to_string(),
                        x.rhs.to_string(),
                        x.holds.to_string(),
                        x.bijection_holds.to_string(),
                        x.planes.positive_dim.to_string(),
                    ]);
                    r
                })
                .collect::<Vec<_>>();
            csv("verify-extended", &hd, &rows)
        }
        Format::Text => {
            let mut s = header_text(&rep.header);
            for x in &rep.entries {
                writeln!(s, "\nq={} (e={})", x.q, x.e).unwrap();
                s.push_str(&table(&COUNT_COLS, &[count_cells(&x.counts)]));
                s.push_str(&planes_text(&x.planes));
                writeln!(s, "W - B - A = {}   V - R - T = {}   {}", x.lhs, x.rhs, mark(x.holds)).unwrap();
                writeln!(s, "complement bijection   {}", mark(x.bijection_holds)).unwrap();
            }
            if rep.has_exclusions {
                writeln!(s, "\nnote: positive-dimensional sections are outside every stratum").unwrap();
            }
            writeln!(s, "\nresult: {}", if rep.all_hold { "all identities hold" } else { "FAILED" }).unwrap();
            Output(s)
        }
    }
}

pub fn partition(fmt: Format, reps: &[PartitionReport]) -> Output {
    match fmt {
        Format::Json => to_json(&reps),
        Format::Csv => {
            let rows = reps
                .iter()
                .flat_map(|r| {
                    r.sides.iter().map(move |sd| {
                        vec![
                            r.e.to_string(),
                            r.q.to_string(),
                            sd.side.to_string(),
                            sd.tuple_size.to_string(),
                            sd.lhs.to_string(),
                            sd.sym.to_string(),
                            sd.grassmannian.to_string(),
                            opt(&sd.dependent),
                            opt(&sd.rhs),
                            opt(&sd.holds),
                            sd.with_contained_term.to_string(),
                            opt(&sd.with_contained_residual),
                            format!("{:?}", r.verdict).to_lowercase(),
                        ]
                    })
                })
                .collect::<Vec<_>>();
            csv(
                "verify-partition",
                &["e", "q", "side", "tuple_size", "lhs", "sym", "grassmannian", "dependent", "rhs", "holds", "contained_term", "contained_form_residual", "verdict"],
                &rows,
            )
        }
        Format::Text => {
            let mut s = reps.first().map(|r| header_text(&r.header)).unwrap_or_default();
            for r in reps {
                writeln!(s, "\nq={} (e={})", r.q, r.e).unwrap();
                s.push_str(&planes_text(&r.planes));
                let rows: Vec<Vec<String>> = r
                    .sides
                    .iter()
                    .map(|sd| {
                        vec![
                            sd.side.to_string(),
                            sd.tuple_size.to_string(),
                            sd.lhs.to_string(),
                            sd.sym.to_string(),
                            opt(&sd.dependent),
                            sd.grassmannian.to_string(),
                            opt(&sd.rhs),
                            sd.holds.map_or("unknown", |h| mark(h)).to_string(),
                            opt(&sd.with_contained_residual),
                        ]
                    })
                    .collect();
                s.push_str(&table(
                    &["side", "size", "lhs", "sym", "dependent", "#G", "rhs", "status", "contained-form residual"],
                    &rows,
                ));
                writeln!(s, "verdict: {:?}", r.verdict).unwrap();
            }
            Output(s)
        }
    }
}

pub fn probe_class(fmt: Format, c: &ClassExpr, e: &SlopeEstimate) -> Output {
    match fmt {
        Format::Json => to_json(&json!({"class": ClassReport::from(c), "estimate": e})),
        Format::Csv => csv("probe", &["subject", "estimate", "rounded", "exact", "residual", "q_list"], &[vec![
            c.label.clone(),
            est(&Some(e.clone())),
            e.rounded.to_string(),
            c.degree().to_string(),
            format!("{:.3e}", e.residual),
            join(&e.q_list),
        ]]),
        Format::Text => Output(format!(
            "{c}\nq list     {}\nestimate   {}\nrounded    {}\nexact      {}\n",
            join(&e.q_list),
            est(&Some(e.clone())),
            e.rounded,
            c.degree()
        )),
    }
}

pub fn probe_points(fmt: Format, y: &VarietySpec, e: &SlopeEstimate) -> Output {
    let h = RunHeader::new(y, None);
    match fmt {
        Format::Json => to_json(&json!({"header": h, "subject": "points", "estimate": e})),
        Format::Csv => csv("probe", &["subject", "estimate", "rounded", "residual", "q_list"], &[vec![
            "points".into(),
            est(&Some(e.clone())),
            e.rounded.to_string(),
            format!("{:.3e}", e.residual),
            join(&e.q_list),
        ]]),
        Format::Text => {
            let mut s = header_text(&h);
            write!(s, "\n#Y over q = {}\nestimate   {}\nrounded    {}\n", join(&e.q_list), est(&Some(e.clone())), e.rounded)
                .unwrap();
            Output(s)
        }
    }
}

fn bound_text(t: &TermProbe) -> String {
    use lefschetz::yfy::Bound;
    match t.bound {
        None => "-".into(),
        Some(Bound::Equal(b)) => format!("= {b}"),
        Some(Bound::AtMost(b)) => format!("<= {b}"),
    }
}

fn within_text(t: &TermProbe) -> &'static str {
    match t.within {
        None => "-",
        Some(true) => "pass",
        Some(false) => "FAIL",
    }
}

fn term_rows(ts: &[TermProbe]) -> Vec<Vec<String>> {
    ts.iter()
        .map(|t| vec![t.name.to_string(), est(&t.estimate), bound_text(t), within_text(t).to_string()])
        .collect()
}

pub fn probes(fmt: Format, y: &VarietySpec, p: &ParamSet, ts: &[TermProbe]) -> Output {
    let h = RunHeader::new(y, Some(*p));
    match fmt {
        Format::Json => to_json(&json!({"header": h, "terms": ts})),
        Format::Csv => csv("probe-terms", &["term", "estimate", "bound", "within"], &term_rows(ts)),
        Format::Text => {
            let mut s = header_text(&h);
            s.push('\n');
            s.push_str(&table(&["term", "estimate", "bound", "within"], &term_rows(ts)));
            Output(s)
        }
    }
}

pub fn lw(fmt: Format, rep: &LWDiagnostics) -> Output {
    let rows: Vec<Vec<String>> = rep
        .entries
        .iter()
        .map(|x| {
            vec![
                x.e.to_string(),
                x.planes.to_string(),
                x.count_mismatches.len().to_string(),
                x.orbit_dichotomy_failures.to_string(),
                x.alpha.to_string(),
                x.alpha_max.to_string(),
                x.alpha_mismatches.len().to_string(),
                x.alpha_zero_violations.to_string(),
                x.divisible_planes.to_string(),
                x.divisible_violations.to_string(),
                x.max_residual.to_string(),
                mark(x.holds()).to_string(),
            ]
        })
        .collect();
    let hd = [
        "e",
        "planes",
        "count_mismatches",
        "dichotomy_failures",
        "alpha",
        "alpha_max",
        "alpha_mismatches",
        "alpha_zero_violations",
        "divisible_planes",
        "divisible_violations",
        "max_residual",
        "status",
    ];
    match fmt {
        Format::Json => to_json(rep),
        Format::Csv => csv("lw-check", &hd, &rows),
        Format::Text => {
            let mut s = header_text(&rep.header);
            writeln!(s, "\nplanes over F_{} (base e={}), orbit lcm {}, alpha cap {}", rep.q, rep.base_e, rep.orbit_lcm, rep.alpha_cap)
                .unwrap();
            s.push_str(&table(&hd, &rows));
            writeln!(s, "\nresult: {}", if rep.all_hold { "all checks hold" } else { "FAILED" }).unwrap();
            Output(s)
        }
    }
}

pub fn averaged(fmt: Format, t: &AveragedTable) -> Output {
    let names: Vec<&str> = t.rows.first().map(|r| r.terms.iter().map(|x| x.name).collect()).unwrap_or_default();
    match fmt {
        Format::Json => to_json(t),
        Format::Csv => {
            let rows = t
                .rows
                .iter()
                .flat_map(|r| {
                    r.terms.iter().map(move |x| {
                        vec![r.label.clone(), r.r.to_string(), x.name.to_string(), est(&x.estimate), bound_text(x), within_text(x).to_string()]
                    })
                })
                .collect::<Vec<_>>();
            csv("averaged-table", &["family", "r", "term", "estimate", "bound", "within"], &rows)
        }
        Format::Text => {
            // Terms never sampled in any row are left out.
            let shown: Vec<usize> =
                (0..names.len()).filter(|&i| t.rows.iter().any(|r| r.terms[i].estimate.is_some())).collect();
            let mut hd = vec!["family", "r"];
            hd.extend(shown.iter().map(|&i| names[i]));
            let rows: Vec<Vec<String>> = t
                .rows
                .iter()
                .map(|r| {
                    let mut v = vec![r.label.clone(), r.r.to_string()];
                    v.extend(shown.iter().map(|&i| {
                        let x = &r.terms[i];
                        match x.within {
                            None => est(&x.estimate),
                            Some(_) => format!("{} {}", est(&x.estimate), within_text(x)),
                        }
                    }));
                    v
                })
                .collect();
            let mut s = table(&hd, &rows);
            let trend: Vec<String> = t.trend.iter().map(|x| x.map_or("-".into(), |v| format!("{v:.3}"))).collect();
            writeln!(s, "\ntrend: {}  ({})", trend.join(" "), if t.trend_nonincreasing { "non-increasing" } else { "INCREASING" })
                .unwrap();
            Output(s)
        }
    }
}
