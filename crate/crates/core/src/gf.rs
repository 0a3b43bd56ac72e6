//! Finite fields `F_{p^e}` with deterministic moduli, Frobenius, embeddings
//! between towers, and polynomials over them.
//!
//! Elements are encoded as integers `sum c_i p^i` where `c_i` is the
//! coefficient of `x^i` in the polynomial-basis representation. The integer
//! order is the "rep-lexicographic" order used to break ties
//! deterministically (highest coefficient most significant).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

pub mod upoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("unsupported field size {p}^{e}")]
    Unsupported { p: u32, e: u32 },
    #[error("no embedding of F_{p}^{a} into F_{p2}^{b}")]
    NoEmbedding { p: u32, a: u32, p2: u32, b: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("form is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("polynomial parse error: {0}")]
    Parse(String),
}

/// Field elements are plain integers in the encoding described above.
pub type Elem = u32;

/// Fields at most this large get log/exp tables.
const TABLE_LIMIT: u64 = 1 << 20;
/// Odd-characteristic fields at most this large get an addition table.
const ADD_TABLE_LIMIT: u32 = 1024;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u32;
    while (i as u64) * (i as u64) <= n as u64 {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// `F_{p^e}` together with its arithmetic tables.
pub struct FieldSpec {
    p: u32,
    e: u32,
    size: u32,
    /// Monic modulus, coefficients low to high, length `e + 1`.
    modulus: Vec<u32>,
    generator: Elem,
    log: Vec<u32>,
    exp: Vec<u32>,
    add_tab: Vec<u16>,
    neg_tab: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} (modulus {:?})", self.p, self.e, self.modulus)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e
    }
}

impl Eq for FieldSpec {}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.e)
        }
    }
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), Arc<FieldSpec>>> {
    static R: OnceLock<Mutex<HashMap<(u32, u32), Arc<FieldSpec>>>> = OnceLock::new();
    R.get_or_init(Default::default)
}

/// `F_{p^e}` with the lexicographically smallest monic irreducible modulus.
/// Fields are built once and shared.
pub fn field_make(p: u32, e: u32) -> Result<Arc<FieldSpec>, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    let size = (p as u64).checked_pow(e).filter(|&s| e >= 1 && s <= u32::MAX as u64);
    let Some(size) = size else {
        return Err(GfError::Unsupported { p, e });
    };
    if let Some(f) = registry().lock().unwrap().get(&(p, e)) {
        return Ok(f.clone());
    }
    let f = Arc::new(FieldSpec::build(p, e, size as u32));
    let mut reg = registry().lock().unwrap();
    Ok(reg.entry((p, e)).or_insert(f).clone())
}

impl FieldSpec {
    fn build(p: u32, e: u32, size: u32) -> FieldSpec {
        let modulus = smallest_irreducible(p, e);
        let mut f = FieldSpec {
            p,
            e,
            size,
            modulus,
            generator: 0,
            log: Vec::new(),
            exp: Vec::new(),
            add_tab: Vec::new(),
            neg_tab: Vec::new(),
        };
        if p != 2 {
            f.neg_tab = (0..size).map(|x| f.neg_slow(x)).collect();
            if size <= ADD_TABLE_LIMIT {
                let mut t = vec![0u16; (size * size) as usize];
                for a in 0..size {
                    for b in 0..size {
                        t[(a * size + b) as usize] = f.add_slow(a, b) as u16;
                    }
                }
                f.add_tab = t;
            }
        }
        f.generator = f.find_generator();
        if (size as u64) <= TABLE_LIMIT {
            let n = (size - 1) as usize;
            let mut exp = vec![0u32; 2 * n.max(1)];
            let mut log = vec![u32::MAX; size as usize];
            let mut x = 1u32;
            for i in 0..n {
                exp[i] = x;
                log[x as usize] = i as u32;
                x = f.mul_slow(x, f.generator);
            }
            for i in n..2 * n {
                exp[i] = exp[i - n];
            }
            f.exp = exp;
            f.log = log;
        }
        f
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Number of elements `p^e`.
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The chosen primitive element, the smallest one in encoding order.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn digits(&self, x: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut x = x;
        for _ in 0..self.e {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    pub fn from_digits(&self, d: &[u32]) -> Elem {
        d.iter().rev().fold(0u32, |acc, &c| acc * self.p + c % self.p)
    }

    /// Image of an integer under `Z -> F_p -> F`.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            a ^ b
        } else if !self.add_tab.is_empty() {
            self.add_tab[(a * self.size + b) as usize] as u32
        } else {
            self.add_slow(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            a
        } else {
            self.neg_tab[a as usize]
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.exp.is_empty() {
            return self.mul_slow(a, b);
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    /// Multiplicative inverse; `inv(0)` panics.
    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero");
        if self.exp.is_empty() {
            return self.pow(a, self.size as u64 - 2);
        }
        let n = self.size - 1;
        self.exp[((n - self.log[a as usize]) % n) as usize]
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Elem, k: u64) -> Elem {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if !self.exp.is_empty() {
            let n = (self.size - 1) as u64;
            let l = (self.log[a as usize] as u64 * (k % n)) % n;
            return self.exp[l as usize];
        }
        let mut acc = 1;
        let mut base = a;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            k >>= 1;
        }
        acc
    }

    /// Discrete log base the generator, for nonzero elements.
    pub fn log(&self, a: Elem) -> Option<u32> {
        if a == 0 || self.log.is_empty() {
            return None;
        }
        Some(self.log[a as usize])
    }

    /// `g^k` for the chosen generator.
    pub fn gen_pow(&self, k: u64) -> Elem {
        self.pow(self.generator, k)
    }

    /// `x -> x^(p^s)`.
    pub fn frobenius(&self, x: Elem, s: u32) -> Elem {
        let q = (self.p as u64).pow(s % self.e.max(1));
        self.pow(x, q)
    }

    /// Size of the orbit of `x` under `y -> y^Q`, `Q = p^s`.
    pub fn orbit_size(&self, x: Elem, s: u32) -> u32 {
        let mut y = self.frobenius(x, s);
        let mut n = 1;
        while y != x {
            y = self.frobenius(y, s);
            n += 1;
        }
        n
    }

    fn add_slow(&self, a: Elem, b: Elem) -> Elem {
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.from_digits(&s)
    }

    fn neg_slow(&self, a: Elem) -> Elem {
        let s: Vec<u32> = self.digits(a).iter().map(|x| (self.p - x) % self.p).collect();
        self.from_digits(&s)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p as u64;
        let (da, db) = (self.digits(a), self.digits(b));
        let e = self.e as usize;
        let mut prod = vec![0u64; 2 * e];
        for i in 0..e {
            if da[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for i in (e..2 * e).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &m) in self.modulus[..e].iter().enumerate() {
                prod[i - e + j] = (prod[i - e + j] + c * (p - m as u64)) % p;
            }
        }
        let d: Vec<u32> = prod[..e].iter().map(|&x| x as u32).collect();
        self.from_digits(&d)
    }

    fn find_generator(&self) -> Elem {
        let n = self.size as u64 - 1;
        if n == 1 {
            return 1;
        }
        let mut primes = Vec::new();
        let mut m = n;
        let mut f = 2u64;
        while f * f <= m {
            if m.is_multiple_of(f) {
                primes.push(f);
                while m.is_multiple_of(f) {
                    m /= f;
                }
            }
            f += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        let pow_slow = |a: Elem, k: u64| {
            let (mut acc, mut base, mut k) = (1, a, k);
            while k > 0 {
                if k & 1 == 1 {
                    acc = self.mul_slow(acc, base);
                }
                base = self.mul_slow(base, base);
                k >>= 1;
            }
            acc
        };
        (2..self.size)
            .find(|&g| primes.iter().all(|&l| pow_slow(g, n / l) != 1))
            .expect("finite fields have primitive elements")
    }
}

/// Polynomials over `F_p` as coefficient vectors, low to high.
mod fp {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv_lead = inv(m[dm], p);
        while r.len() > dm {
            let c = (r[r.len() - 1] as u64 * inv_lead as u64 % p as u64) as u32;
            let shift = r.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                let t = (c as u64 * mi as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut v: Vec<u32> = out.into_iter().map(|x| x as u32).collect();
        trim(&mut v);
        v
    }

    pub fn inv(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut k = p as u64 - 2;
        while k > 0 {
            if k & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            k >>= 1;
        }
        r as u32
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or: `f` of degree `e` is irreducible iff
    /// `gcd(f, x^{p^i} - x) = 1` for `1 <= i <= e/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let e = f.len() - 1;
        let mut h = vec![0, 1];
        for _ in 0..e / 2 {
            let mut acc = vec![1u32];
            let mut base = h.clone();
            let mut k = p;
            while k > 0 {
                if k & 1 == 1 {
                    acc = rem(&mul(&acc, &base, p), f, p);
                }
                base = rem(&mul(&base, &base, p), f, p);
                k >>= 1;
            }
            h = acc;
            let mut g = h.clone();
            g.resize(g.len().max(2), 0);
            g[1] = (g[1] + p - 1) % p;
            trim(&mut g);
            let d = gcd(f, &g, p);
            if d.len() != 1 {
                return false;
            }
        }
        true
    }
}

/// Lower coefficients enumerated as the integer `sum c_i p^i` from 0 upward,
/// so `x^{e-1}` is the most significant position.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for t in 0..count {
        let mut f = Vec::with_capacity(e as usize + 1);
        let mut x = t;
        for _ in 0..e {
            f.push((x % p as u64) as u32);
            x /= p as u64;
        }
        f.push(1);
        if e == 1 || (f[0] != 0 && fp::is_irreducible(&f, p)) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn embed_cache() -> &'static Mutex<HashMap<(u32, u32, u32), Arc<Vec<Elem>>>> {
    static C: OnceLock<Mutex<HashMap<(u32, u32, u32), Arc<Vec<Elem>>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Table mapping every element of `small` to its image in `big`.
///
/// The small generator `x` goes to the smallest root of the small modulus
/// in `big`. Tables are computed once per field pair.
pub fn embedding_table(small: &FieldSpec, big: &FieldSpec) -> Result<Arc<Vec<Elem>>, GfError> {
    if small.p != big.p || !big.e.is_multiple_of(small.e) {
        return Err(GfError::NoEmbedding { p: small.p, a: small.e, p2: big.p, b: big.e });
    }
    let key = (small.p, small.e, big.e);
    if let Some(t) = embed_cache().lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let root = if small.e == 1 {
        0
    } else {
        (0..big.size)
            .find(|&z| {
                let v = small.modulus.iter().rev().fold(0, |acc, &c| big.add(big.mul(acc, z), c));
                v == 0
            })
            .expect("a subfield of the right degree exists")
    };
    let mut powers = vec![1u32];
    for _ in 1..small.e {
        let last = *powers.last().unwrap();
        powers.push(big.mul(last, root));
    }
    let table: Vec<Elem> = (0..small.size)
        .map(|x| {
            small.digits(x).iter().zip(&powers).fold(0, |acc, (&c, &w)| big.add(acc, big.mul(c, w)))
        })
        .collect();
    let table = Arc::new(table);
    embed_cache().lock().unwrap().insert(key, table.clone());
    Ok(table)
}

/// Element with its field, for the public arithmetic API.
#[derive(Clone)]
pub struct GFElem {
    field: Arc<FieldSpec>,
    rep: Elem,
}

impl fmt::Debug for GFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.rep, self.field)
    }
}

impl PartialEq for GFElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.rep == other.rep
    }
}

impl Eq for GFElem {}

impl GFElem {
    pub fn new(field: &Arc<FieldSpec>, rep: Elem) -> Self {
        assert!(rep < field.size, "element out of range");
        GFElem { field: field.clone(), rep }
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        Self::new(field, 0)
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        Self::new(field, 1)
    }

    pub fn rep(&self) -> Elem {
        self.rep
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn pow(&self, k: u64) -> Self {
        GFElem { field: self.field.clone(), rep: self.field.pow(self.rep, k) }
    }

    pub fn inv(&self) -> Option<Self> {
        (self.rep != 0).then(|| GFElem { field: self.field.clone(), rep: self.field.inv(self.rep) })
    }

    /// `x -> x^(p^base_power)`.
    pub fn frobenius(&self, base_power: u32) -> Self {
        GFElem { field: self.field.clone(), rep: self.field.frobenius(self.rep, base_power) }
    }

    /// Orbit size under `x -> x^(p^base_power)`.
    pub fn orbit_size(&self, base_power: u32) -> u32 {
        self.field.orbit_size(self.rep, base_power)
    }

    pub fn embed(&self, target: &Arc<FieldSpec>) -> Result<Self, GfError> {
        let t = embedding_table(&self.field, target)?;
        Ok(GFElem { field: target.clone(), rep: t[self.rep as usize] })
    }
}

macro_rules! gf_binop {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr for &GFElem {
            type Output = GFElem;
            fn $m(self, rhs: &GFElem) -> GFElem {
                assert!(self.field == rhs.field, "elements belong to different fields");
                GFElem { field: self.field.clone(), rep: self.field.$m(self.rep, rhs.rep) }
            }
        }
        impl std::ops::$tr for GFElem {
            type Output = GFElem;
            fn $m(self, rhs: GFElem) -> GFElem {
                (&self).$m(&rhs)
            }
        }
    };
}

gf_binop!(Add, add);
gf_binop!(Sub, sub);
gf_binop!(Mul, mul);

impl std::ops::Neg for &GFElem {
    type Output = GFElem;
    fn neg(self) -> GFElem {
        GFElem { field: self.field.clone(), rep: self.field.neg(self.rep) }
    }
}

/// `embed(x, target)`.
pub fn embed(x: &GFElem, target: &Arc<FieldSpec>) -> Result<GFElem, GfError> {
    x.embed(target)
}

/// `frobenius(x, base_power)`.
pub fn frobenius(x: &GFElem, base_power: u32) -> GFElem {
    x.frobenius(base_power)
}

/// Multivariate polynomial over a finite field.
#[derive(Clone)]
pub struct MPoly {
    field: Arc<FieldSpec>,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Elem>,
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({} over {})", self, self.field)
    }
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.nvars == other.nvars && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl MPoly {
    pub fn zero(field: &Arc<FieldSpec>, nvars: usize) -> Self {
        MPoly { field: field.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(field: &Arc<FieldSpec>, nvars: usize, terms: I) -> Result<Self, GfError>
    where
        I: IntoIterator<Item = (Vec<u32>, Elem)>,
    {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(GfError::DimensionMismatch { expected: nvars, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Elem) {
        if c == 0 {
            return;
        }
        let f = self.field.clone();
        let slot = self.terms.entry(e.clone()).or_insert(0);
        *slot = f.add(*slot, c);
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Elem)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    /// Evaluation at a point given as raw elements of `self.field()`.
    pub fn eval_raw(&self, point: &[Elem]) -> Elem {
        let f = &self.field;
        let mut acc = 0;
        for (e, &c) in &self.terms {
            let mut t = c;
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t = f.mul(t, f.pow(*x, k as u64));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Coefficients mapped into an extension field.
    pub fn base_change(&self, target: &Arc<FieldSpec>) -> Result<MPoly, GfError> {
        if **target == *self.field {
            return Ok(self.clone());
        }
        let t = embedding_table(&self.field, target)?;
        let terms = self.terms.iter().map(|(e, &c)| (e.clone(), t[c as usize]));
        MPoly::from_terms(target, self.nvars, terms)
    }

    /// Formal partial derivative in `x_var`.
    pub fn derivative(&self, var: usize) -> MPoly {
        let f = &self.field;
        let mut out = MPoly::zero(f, self.nvars);
        for (e, &c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, f.mul(c, f.from_int(e[var] as i64)));
        }
        out
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        let f = &self.field;
        let terms = self.terms.iter().map(|(e, &c)| (e.clone(), f.neg(c))).collect();
        MPoly { field: f.clone(), nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let f = &self.field;
        let mut out = MPoly::zero(f, self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, f.mul(ca, cb));
            }
        }
        out
    }

    /// Substitutes `x_j = sum_i t_i rows[i][j]`, giving a polynomial in the
    /// `rows.len()` plane coordinates. Coefficient-level, not pointwise.
    pub fn substitute_raw(&self, rows: &[Vec<Elem>]) -> Result<MPoly, GfError> {
        for r in rows {
            if r.len() != self.nvars {
                return Err(GfError::DimensionMismatch { expected: self.nvars, got: r.len() });
            }
        }
        let k = rows.len();
        let f = &self.field;
        let linear: Vec<MPoly> = (0..self.nvars)
            .map(|j| {
                let terms = (0..k).map(|i| {
                    let mut e = vec![0u32; k];
                    e[i] = 1;
                    (e, rows[i][j])
                });
                MPoly::from_terms(f, k, terms).unwrap()
            })
            .collect();
        let mut out = MPoly::zero(f, k);
        for (e, &c) in &self.terms {
            let mut t = MPoly::from_terms(f, k, [(vec![0; k], c)]).unwrap();
            for (j, &a) in e.iter().enumerate() {
                for _ in 0..a {
                    t = t.mul(&linear[j]);
                }
            }
            for (te, tc) in t.terms {
                out.add_term(te, tc);
            }
        }
        Ok(out)
    }

    /// Parses `c*x0^a0*x1^a1*...` terms joined by `+` (or `-`).
    ///
    /// Coefficients are integers, reduced mod `p`, or `g^k` for the field's
    /// chosen generator. A term may omit its coefficient.
    pub fn parse(text: &str, field: &Arc<FieldSpec>, nvars: usize) -> Result<MPoly, GfError> {
        let err = |m: String| GfError::Parse(m);
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(err("empty polynomial".into()));
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        // `+` or `-` just seen with no term after it yet
        let mut after_op = true;
        let mut prev = ' ';
        for ch in cleaned.chars() {
            if (ch == '+' || ch == '-') && prev != '^' {
                if !cur.is_empty() {
                    pieces.push((neg, std::mem::take(&mut cur)));
                    neg = ch == '-';
                } else if after_op && ch == '-' && !neg {
                    neg = true;
                } else {
                    return Err(err(format!("empty term before {ch:?}")));
                }
                after_op = true;
            } else {
                cur.push(ch);
                after_op = false;
            }
            prev = ch;
        }
        if cur.is_empty() {
            return Err(err("trailing operator".into()));
        }
        pieces.push((neg, cur));
        let mut poly = MPoly::zero(field, nvars);
        for (neg, term) in pieces {
            let mut coef: Elem = 1;
            let mut exps = vec![0u32; nvars];
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(err(format!("empty factor in {term:?}")));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, pow) = match rest.split_once('^') {
                        Some((i, p)) => (i, p),
                        None => (rest, "1"),
                    };
                    let idx: usize = idx.parse().map_err(|_| err(format!("bad variable {factor:?}")))?;
                    let pow: u32 = pow.parse().map_err(|_| err(format!("bad exponent {factor:?}")))?;
                    if idx >= nvars {
                        return Err(GfError::DimensionMismatch { expected: nvars, got: idx + 1 });
                    }
                    exps[idx] += pow;
                } else if let Some(k) = factor.strip_prefix("g^") {
                    let k: u64 = k.parse().map_err(|_| err(format!("bad generator power {factor:?}")))?;
                    coef = field.mul(coef, field.gen_pow(k));
                } else if factor == "g" {
                    coef = field.mul(coef, field.generator());
                } else {
                    let n: i64 = factor.parse().map_err(|_| err(format!("bad coefficient {factor:?}")))?;
                    coef = field.mul(coef, field.from_int(n));
                }
            }
            if neg {
                coef = field.neg(coef);
            }
            poly.add_term(exps, coef);
        }
        Ok(poly)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = &self.field;
        let mut first = true;
        for (e, &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if field.degree() == 1 {
                write!(f, "{c}")?;
            } else {
                match field.log(c) {
                    Some(k) => write!(f, "g^{k}")?,
                    None => write!(f, "{c}")?,
                }
            }
            for (i, &a) in e.iter().enumerate() {
                match a {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{a}")?,
                }
            }
        }
        Ok(())
    }
}

fn same_field(field: &Arc<FieldSpec>, xs: &[GFElem]) -> Result<Vec<Elem>, GfError> {
    xs.iter()
        .map(|x| if x.field == *field { Ok(x.rep) } else { Err(GfError::FieldMismatch) })
        .collect()
}

/// `f(point)`.
pub fn mpoly_eval(f: &MPoly, point: &[GFElem]) -> Result<GFElem, GfError> {
    if point.len() != f.nvars {
        return Err(GfError::DimensionMismatch { expected: f.nvars, got: point.len() });
    }
    let raw = same_field(&f.field, point)?;
    Ok(GFElem::new(&f.field, f.eval_raw(&raw)))
}

/// Restriction of a homogeneous `f` to the plane spanned by the rows of
/// `linear_forms`.
pub fn mpoly_substitute(f: &MPoly, linear_forms: &[Vec<GFElem>]) -> Result<MPoly, GfError> {
    if !f.is_homogeneous() {
        return Err(GfError::NotHomogeneous(f.to_string()));
    }
    let rows = linear_forms
        .iter()
        .map(|r| same_field(&f.field, r))
        .collect::<Result<Vec<_>, _>>()?;
    f.substitute_raw(&rows)
}
