//! Zeros of homogeneous systems in `P^{K-1}` over one finite field.
//!
//! Canonical points have first nonzero coordinate 1. Points are grouped by
//! their prefix (all coordinates but the last); for a fixed prefix each form
//! is a univariate polynomial in the last coordinate and the common zeros
//! are the roots of the gcd.

use std::ops::ControlFlow;

use crate::gf::{upoly, Elem, FieldSpec};

/// Most coordinates a system may have.
pub const MAXV: usize = 12;

/// A form as a list of `(coefficient, exponents)`.
#[derive(Debug, Clone)]
pub struct SysForm {
    pub deg: usize,
    pub terms: Vec<(Elem, [u8; MAXV])>,
}

impl SysForm {
    pub fn eval(&self, f: &FieldSpec, pt: &[Elem]) -> Elem {
        let mut acc = 0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (i, &x) in pt.iter().enumerate() {
                if e[i] > 0 {
                    t = f.mul(t, f.pow(x, e[i] as u64));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }
}

/// Common zeros on the line over one prefix.
pub enum Roots<'a> {
    Some(&'a [Elem]),
    /// Every value of the last coordinate is a zero.
    All,
}

/// Gaussian elimination in place; returns the rank.
pub fn rank(f: &FieldSpec, m: &mut [Vec<Elem>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, piv);
        let inv = f.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let factor = m[i][c];
                for j in c..cols {
                    let t = f.mul(factor, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Rank of a list of vectors, without modifying them.
pub fn rank_of(f: &FieldSpec, vs: &[&[Elem]]) -> usize {
    let mut m: Vec<Vec<Elem>> = vs.iter().map(|v| v.to_vec()).collect();
    rank(f, &mut m)
}

struct Workspace {
    pw: Vec<Vec<Elem>>,
    coeffs: Vec<Elem>,
    g: Vec<Elem>,
}

impl Workspace {
    fn new(nv: usize, maxdeg: usize) -> Self {
        Workspace { pw: vec![vec![1; maxdeg + 1]; nv], coeffs: Vec::new(), g: Vec::new() }
    }

    /// gcd over the forms of the polynomials in the last coordinate.
    fn line_gcd(&mut self, f: &FieldSpec, forms: &[SysForm], prefix: &[Elem]) -> &[Elem] {
        let last = prefix.len();
        for (i, &x) in prefix.iter().enumerate() {
            let row = &mut self.pw[i];
            for e in 1..row.len() {
                row[e] = f.mul(row[e - 1], x);
            }
        }
        self.g.clear();
        let mut first = true;
        for form in forms {
            self.coeffs.clear();
            self.coeffs.resize(form.deg + 1, 0);
            for (c, e) in &form.terms {
                let mut t = *c;
                for i in 0..last {
                    if e[i] > 0 {
                        t = f.mul(t, self.pw[i][e[i] as usize]);
                    }
                }
                let slot = &mut self.coeffs[e[last] as usize];
                *slot = f.add(*slot, t);
            }
            upoly::trim(&mut self.coeffs);
            if first {
                std::mem::swap(&mut self.g, &mut self.coeffs);
                first = false;
            } else if !self.coeffs.is_empty() {
                self.g = upoly::gcd(f, &self.g, &self.coeffs);
            }
            if upoly::degree(&self.g) == Some(0) {
                break;
            }
        }
        &self.g
    }
}

/// Lexicographic comparison of a prefix against its Frobenius images; true
/// when `p` is the smallest element of its orbit.
fn is_orbit_rep(p: &[Elem], frob: &[Elem], buf: &mut Vec<Elem>) -> bool {
    buf.clear();
    buf.extend(p.iter().map(|&x| frob[x as usize]));
    loop {
        if buf.as_slice() == p {
            return true;
        }
        if buf.as_slice() < p {
            return false;
        }
        for x in buf.iter_mut() {
            *x = frob[*x as usize];
        }
    }
}

/// Visits every canonical prefix of length `nv - 1` whose leading one sits
/// at `lead`, then the special point `(0, ..., 0, 1)` when `lead == nv - 1`.
/// With `frob`, only orbit representatives are visited.
pub fn scan_lead<B>(
    f: &FieldSpec,
    forms: &[SysForm],
    nv: usize,
    lead: usize,
    frob: Option<&[Elem]>,
    mut cb: impl FnMut(&[Elem], Roots<'_>) -> ControlFlow<B>,
) -> ControlFlow<B> {
    assert!((1..=MAXV).contains(&nv));
    let maxdeg = forms.iter().map(|s| s.deg).max().unwrap_or(0);
    if lead == nv - 1 {
        let mut pt = vec![0; nv];
        pt[nv - 1] = 1;
        if forms.iter().all(|s| s.eval(f, &pt) == 0) {
            return cb(&pt[..nv - 1], Roots::Some(&[1]));
        }
        return ControlFlow::Continue(());
    }
    let mut ws = Workspace::new(nv, maxdeg);
    let mut prefix = vec![0; nv - 1];
    prefix[lead] = 1;
    let mut buf = Vec::with_capacity(nv);
    let free = lead + 1..nv - 1;
    let size = f.size();
    let mut roots: Vec<Elem> = Vec::new();
    loop {
        let visit = match frob {
            Some(t) => is_orbit_rep(&prefix, t, &mut buf),
            None => true,
        };
        if visit {
            let g = ws.line_gcd(f, forms, &prefix);
            if g.is_empty() {
                cb(&prefix, Roots::All)?;
            } else if g.len() > 1 {
                roots.clear();
                roots.extend(upoly::roots(f, g));
                if !roots.is_empty() {
                    cb(&prefix, Roots::Some(&roots))?;
                }
            }
        }
        // odometer over the free coordinates
        let mut i = free.end;
        loop {
            if i == free.start {
                return ControlFlow::Continue(());
            }
            i -= 1;
            prefix[i] += 1;
            if prefix[i] < size {
                break;
            }
            prefix[i] = 0;
        }
    }
}

/// All points, in canonical form. A prefix whose whole line lies in the
/// zero set contributes every value of the last coordinate.
pub fn all_points(f: &FieldSpec, forms: &[SysForm], nv: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for lead in 0..nv {
        let _ = scan_lead::<()>(f, forms, nv, lead, None, |prefix, roots| {
            let mut push = |x: Elem| {
                let mut p = prefix.to_vec();
                p.push(x);
                out.push(p);
            };
            match roots {
                Roots::Some(rs) => rs.iter().for_each(|&x| push(x)),
                Roots::All => (0..f.size()).for_each(&mut push),
            }
            ControlFlow::Continue(())
        });
    }
    out
}

/// Number of points, as [`all_points`] but without storing them.
pub fn count_points_lead(f: &FieldSpec, forms: &[SysForm], nv: usize, lead: usize) -> u64 {
    let mut n = 0u64;
    let _ = scan_lead::<()>(f, forms, nv, lead, None, |_, roots| {
        n += match roots {
            Roots::Some(rs) => rs.len() as u64,
            Roots::All => f.size() as u64,
        };
        ControlFlow::Continue(())
    });
    n
}

/// Outcome of an orbit-aware solve.
pub enum OrbitSolve {
    /// Frobenius orbits of the zeros, each listed from a representative.
    Orbits(Vec<Vec<Vec<Elem>>>),
    /// More than `cap` zeros, or a whole line of zeros.
    Excess,
}

/// Zeros grouped into orbits of `frob`, giving up past `cap` points.
pub fn orbit_points(f: &FieldSpec, forms: &[SysForm], nv: usize, frob: &[Elem], cap: usize) -> OrbitSolve {
    let mut orbits: Vec<Vec<Vec<Elem>>> = Vec::new();
    let mut total = 0usize;
    for lead in 0..nv {
        let flow = scan_lead(f, forms, nv, lead, Some(frob), |prefix, roots| {
            let Roots::Some(rs) = roots else { return ControlFlow::Break(()) };
            let mut covered = vec![false; rs.len()];
            for (ri, &x) in rs.iter().enumerate() {
                if covered[ri] {
                    continue;
                }
                let mut start = prefix.to_vec();
                start.push(x);
                let mut orbit = vec![start.clone()];
                let mut cur: Vec<Elem> = start.iter().map(|&c| frob[c as usize]).collect();
                while cur != start {
                    orbit.push(cur.clone());
                    cur.iter_mut().for_each(|c| *c = frob[*c as usize]);
                }
                for pt in &orbit {
                    if pt[..prefix.len()] == *prefix {
                        if let Ok(j) = rs.binary_search(&pt[prefix.len()]) {
                            covered[j] = true;
                        }
                    }
                }
                total += orbit.len();
                orbits.push(orbit);
                if total > cap {
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        });
        if flow.is_break() {
            return OrbitSolve::Excess;
        }
    }
    OrbitSolve::Orbits(orbits)
}
