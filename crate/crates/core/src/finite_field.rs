//! Finite fields `F_{p^s}` with discrete-log tables, multiplicative and additive
//! characters, and Gauss sums.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;
use thiserror::Error;

use crate::arith;
use crate::cyclo::{Cyclotomic, RootOfUnity, ScaledCyclotomic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not an admissible prime here")]
    InvalidPrime(u64),
    #[error("field of order {0} exceeds the table limit")]
    TooLarge(u64),
    #[error("modulus is not a primitive polynomial")]
    NotPrimitive,
    #[error("multiplicative character evaluated at 0")]
    ZeroArgument,
    #[error("character and additive character are both trivial")]
    BothTrivial,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Field elements are encoded as `Σ c_i p^i` over the coefficients of the
/// polynomial representative.
pub type Elem = u32;

/// `F_{p^s}` presented as `F_p[x]/(f)` with `f` primitive.
pub struct FqField {
    p: u64,
    s: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.modulus.iter().map(u64::to_string).collect();
        write!(f, "Fq({}^{}; modulus=[{}])", self.p, self.s, m.join(","))
    }
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FqField {}

static FIELD_CACHE: Lazy<RwLock<HashMap<(u64, Vec<u64>), Arc<FqField>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));
static DEFAULT_MODULUS: Lazy<RwLock<HashMap<(u64, u32), Vec<u64>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Polynomials over F_p, low-to-high, used only during construction.
fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let s = f.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for i in (s..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..s {
            prod[i - s + j] = (prod[i - s + j] + (p - c) * f[j]) % p;
        }
    }
    prod.truncate(s);
    prod.resize(s, 0);
    prod
}

fn poly_powmod_x(e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let s = f.len() - 1;
    let mut result = vec![0u64; s];
    result[0] = 1;
    let mut base = vec![0u64; s];
    if s == 1 {
        base[0] = (p - f[0]) % p;
    } else {
        base[1] = 1;
    }
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &base, f, p);
        }
        base = poly_mulmod(&base, &base, f, p);
        e >>= 1;
    }
    result
}

fn is_one(v: &[u64]) -> bool {
    v[0] == 1 && v[1..].iter().all(|c| *c == 0)
}

fn is_primitive_modulus(f: &[u64], p: u64) -> bool {
    let s = (f.len() - 1) as u32;
    let q = arith::ipow(p, s);
    if f[0] == 0 {
        return false;
    }
    if !is_one(&poly_powmod_x(q - 1, f, p)) {
        return false;
    }
    arith::prime_divisors(q - 1)
        .into_iter()
        .all(|l| !is_one(&poly_powmod_x((q - 1) / l, f, p)))
}

/// Lexicographic key of a coefficient vector, constant term most significant.
fn lex_key(coeffs: &[u64], p: u64) -> u64 {
    coeffs.iter().fold(0, |acc, c| acc * p + c)
}

fn least_primitive_modulus(p: u64, s: u32) -> Vec<u64> {
    if let Some(m) = DEFAULT_MODULUS.read().get(&(p, s)) {
        return m.clone();
    }
    let total = arith::ipow(p, s);
    for key in 0..total {
        // decode with c0 as the most significant digit
        let mut f = vec![0u64; s as usize + 1];
        let mut k = key;
        for i in (0..s as usize).rev() {
            f[i] = k % p;
            k /= p;
        }
        f[s as usize] = 1;
        if is_primitive_modulus(&f, p) {
            DEFAULT_MODULUS.write().insert((p, s), f.clone());
            return f;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

impl FqField {
    /// The field of order `p^s` with the canonical primitive modulus.
    pub fn new(p: u64, s: u32) -> Result<Arc<FqField>, FieldError> {
        if !arith::is_prime(p) {
            return Err(FieldError::InvalidPrime(p));
        }
        if s == 0 {
            return Err(FieldError::Parse("extension degree must be positive".into()));
        }
        let q = p.checked_pow(s).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        let m = least_primitive_modulus(p, s);
        Self::with_modulus(p, m)
    }

    /// The field `F_p[x]/(f)` for a monic primitive `f` given low-to-high.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Arc<FqField>, FieldError> {
        if !arith::is_prime(p) {
            return Err(FieldError::InvalidPrime(p));
        }
        let key = (p, modulus.clone());
        if let Some(f) = FIELD_CACHE.read().get(&key) {
            return Ok(f.clone());
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|c| *c >= p) {
            return Err(FieldError::NotPrimitive);
        }
        let s = (modulus.len() - 1) as u32;
        let q = p.checked_pow(s).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        if !is_primitive_modulus(&modulus, p) {
            return Err(FieldError::NotPrimitive);
        }
        let field = Arc::new(Self::build(p, s, modulus));
        Ok(FIELD_CACHE.write().entry(key).or_insert(field).clone())
    }

    fn build(p: u64, s: u32, modulus: Vec<u64>) -> FqField {
        let q = arith::ipow(p, s);
        let n = (q - 1) as usize;
        let encode = |v: &[u64]| -> Elem { v.iter().rev().fold(0u64, |acc, c| acc * p + c) as Elem };
        // powers of the class of x, which is primitive
        let mut x_exp = Vec::with_capacity(n);
        let mut cur = vec![0u64; s as usize];
        cur[0] = 1;
        let mut xv = vec![0u64; s as usize];
        if s == 1 {
            xv[0] = (p - modulus[0]) % p;
        } else {
            xv[1] = 1;
        }
        for _ in 0..n {
            x_exp.push(encode(&cur));
            cur = poly_mulmod(&cur, &xv, &modulus, p);
        }
        let mut x_log = vec![u32::MAX; q as usize];
        for (j, e) in x_exp.iter().enumerate() {
            x_log[*e as usize] = j as u32;
        }
        // least primitive element in lexicographic order (constant term most significant)
        let mut elems: Vec<Elem> = (1..q as Elem).collect();
        let digits = |e: Elem| -> Vec<u64> {
            let mut v = Vec::with_capacity(s as usize);
            let mut e = e as u64;
            for _ in 0..s {
                v.push(e % p);
                e /= p;
            }
            v
        };
        elems.sort_by_key(|e| lex_key(&digits(*e), p));
        let generator = *elems
            .iter()
            .find(|e| arith::gcd(x_log[**e as usize] as u64, q - 1) == 1)
            .expect("a primitive element exists");
        let gl = x_log[generator as usize] as u64;
        let mut exp = Vec::with_capacity(n);
        for j in 0..n as u64 {
            exp.push(x_exp[((j * gl) % (q - 1)) as usize]);
        }
        let mut log = vec![u32::MAX; q as usize];
        for (j, e) in exp.iter().enumerate() {
            log[*e as usize] = j as u32;
        }
        let mut field = FqField { p, s, q, modulus, generator, exp, log, trace: Vec::new() };
        let trace: Vec<u32> = (0..q as Elem)
            .map(|x| {
                let mut acc = 0;
                let mut y = x;
                for _ in 0..s {
                    acc = field.add(acc, y);
                    y = field.pow(y, p);
                }
                debug_assert!((acc as u64) < p, "trace lands in the prime field");
                acc
            })
            .collect();
        field.trace = trace;
        field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn zero(&self) -> Elem {
        0
    }

    pub fn one(&self) -> Elem {
        1
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q as Elem
    }

    pub fn units(&self) -> impl Iterator<Item = Elem> {
        1..self.q as Elem
    }

    pub fn coeffs(&self, x: Elem) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.s as usize);
        let mut e = x as u64;
        for _ in 0..self.s {
            v.push(e % self.p);
            e /= self.p;
        }
        v
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Elem {
        c.iter().rev().fold(0u64, |acc, x| acc * self.p + x % self.p) as Elem
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.s == 1 {
            return ((a as u64 + b as u64) % self.p) as Elem;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.s {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as Elem
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let c: Vec<u64> = self.coeffs(a).into_iter().map(|x| (self.p - x) % self.p).collect();
        self.from_coeffs(&c)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % n;
        self.exp[e as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroArgument);
        }
        let n = self.q - 1;
        Ok(self.exp[((n - self.log[a as usize] as u64) % n) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = self.q - 1;
        let l = (self.log[a as usize] as u128 * (e as u128 % n as u128)) % n as u128;
        self.exp[l as usize]
    }

    /// `g^j` for the fixed generator `g`.
    pub fn gen_pow(&self, j: i64) -> Elem {
        self.exp[j.rem_euclid((self.q - 1) as i64) as usize]
    }

    /// Discrete log base the fixed generator.
    pub fn dlog(&self, a: Elem) -> Result<u64, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroArgument);
        }
        Ok(self.log[a as usize] as u64)
    }

    /// Absolute trace to `F_p`, returned as an integer in `0..p`.
    pub fn trace(&self, a: Elem) -> u64 {
        self.trace[a as usize] as u64
    }

    /// Norm to `F_p`.
    pub fn norm(&self, a: Elem) -> u64 {
        self.pow(a, (self.q - 1) / (self.p - 1)) as u64
    }

    /// Relative trace to the subfield of order `q0`, where `q = q0^t`.
    pub fn trace_to(&self, a: Elem, q0: u64) -> Elem {
        let t = self.subfield_degree(q0);
        let mut acc = 0;
        let mut y = a;
        for _ in 0..t {
            acc = self.add(acc, y);
            y = self.pow(y, q0);
        }
        acc
    }

    /// Relative norm to the subfield of order `q0`.
    pub fn norm_to(&self, a: Elem, q0: u64) -> Elem {
        self.subfield_degree(q0);
        self.pow(a, (self.q - 1) / (q0 - 1))
    }

    fn subfield_degree(&self, q0: u64) -> u32 {
        let (p0, k) = arith::prime_power(q0).expect("subfield order is a prime power");
        assert!(p0 == self.p && self.s % k == 0, "F_{q0} is not a subfield of F_{}", self.q);
        self.s / k
    }

    /// Whether `a` is a nonzero square.
    pub fn is_square(&self, a: Elem) -> bool {
        a != 0 && (self.p == 2 || self.log[a as usize] % 2 == 0)
    }

    /// Canonical additive character `ψ_q(x) = ζ_p^{Tr(x)}`.
    pub fn psi(&self, x: Elem) -> RootOfUnity {
        RootOfUnity::new(self.trace(x) as i64, self.p)
    }

    pub fn parse(s: &str) -> Result<Arc<FqField>, FieldError> {
        let bad = || FieldError::Parse(format!("bad field descriptor '{s}'"));
        let inner = s.trim().strip_prefix("Fq(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let (ps, rest) = inner.split_once(';').map_or((inner, None), |(a, b)| (a, Some(b)));
        let (p, e) = ps.trim().split_once('^').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let s_deg: u32 = e.trim().parse().map_err(|_| bad())?;
        match rest {
            None => FqField::new(p, s_deg),
            Some(r) => {
                let list = r
                    .trim()
                    .strip_prefix("modulus=[")
                    .and_then(|t| t.strip_suffix(']'))
                    .ok_or_else(bad)?;
                let m: Vec<u64> = list
                    .split(',')
                    .map(|c| c.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<_, _>>()?;
                if m.len() != s_deg as usize + 1 {
                    return Err(bad());
                }
                FqField::with_modulus(p, m)
            }
        }
    }

    /// Embedding of `self` into `big`, when `self` is isomorphic to a subfield.
    ///
    /// Sends the generator to the first root (in code order) of its minimal
    /// polynomial over `F_p`.
    pub fn embedding_into(&self, big: &FqField) -> Vec<Elem> {
        assert_eq!(self.p, big.p);
        assert!(big.s % self.s == 0);
        let g = self.generator;
        // minimal polynomial of g over F_p, coefficients in self (they lie in F_p)
        let mut minpoly: Vec<Elem> = vec![1];
        let mut c = g;
        for _ in 0..self.s {
            let mut next = vec![0 as Elem; minpoly.len() + 1];
            for (i, a) in minpoly.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], *a);
                next[i] = self.sub(next[i], self.mul(*a, c));
            }
            minpoly = next;
            c = self.pow(c, self.p);
        }
        let sub_order = self.q - 1;
        let step = (big.q - 1) / sub_order;
        let root = (1..sub_order)
            .filter(|j| arith::gcd(*j, sub_order) == 1)
            .map(|j| big.gen_pow((j * step) as i64))
            .filter(|r| {
                let mut acc: Elem = 0;
                for coef in minpoly.iter().rev() {
                    acc = big.add(big.mul(acc, *r), big.from_int(*coef as i64));
                }
                acc == 0
            })
            .min()
            .unwrap_or_else(|| big.gen_pow(step as i64));
        let mut map = vec![0 as Elem; self.q as usize];
        for j in 0..sub_order {
            map[self.gen_pow(j as i64) as usize] = big.pow(root, j);
        }
        map
    }
}

/// Multiplicative character `χ(g^j) = ζ_{q-1}^{kj}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FFMultChar {
    field: Arc<FqField>,
    index: u64,
}

impl FFMultChar {
    pub fn new(field: Arc<FqField>, index: i64) -> Self {
        let n = (field.q - 1) as i64;
        FFMultChar { index: index.rem_euclid(n) as u64, field }
    }

    pub fn trivial(field: Arc<FqField>) -> Self {
        Self::new(field, 0)
    }

    /// The quadratic character; `None` in characteristic 2.
    pub fn quadratic(field: Arc<FqField>) -> Option<Self> {
        if field.p == 2 {
            return None;
        }
        let k = ((field.q - 1) / 2) as i64;
        Some(Self::new(field, k))
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn order(&self) -> u64 {
        let n = self.field.q - 1;
        n / arith::gcd(self.index, n)
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }

    pub fn eval(&self, x: Elem) -> Result<RootOfUnity, FieldError> {
        let j = self.field.dlog(x)?;
        Ok(RootOfUnity::new((self.index as u128 * j as u128 % (self.field.q - 1) as u128) as i64, self.field.q - 1))
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.field.clone(), -(self.index as i64))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(*self.field, *other.field);
        Self::new(self.field.clone(), (self.index + other.index) as i64)
    }

    pub fn pow(&self, e: i64) -> Self {
        Self::new(self.field.clone(), self.index as i64 * e)
    }

    /// Every character of `F_q^×`, by index.
    pub fn all(field: &Arc<FqField>) -> Vec<FFMultChar> {
        (0..(field.q - 1) as i64).map(|k| Self::new(field.clone(), k)).collect()
    }

    pub fn parse(s: &str, field: Arc<FqField>) -> Result<Self, FieldError> {
        let bad = || FieldError::Parse(format!("bad character descriptor '{s}'"));
        let inner = s.trim().strip_prefix("chi(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let (k, m) = inner.split_once("mod").ok_or_else(bad)?;
        let k: i64 = k.trim().parse().map_err(|_| bad())?;
        let m = m.trim();
        let expect = format!("{}", field.q - 1);
        if m != "q-1" && m != expect {
            return Err(bad());
        }
        Ok(Self::new(field, k))
    }
}

impl fmt::Display for FFMultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi({} mod {})", self.index, self.field.q - 1)
    }
}

/// Accumulates `Σ χ-exponent/ψ-exponent` terms into exponent counts modulo
/// `N = lcm(ord χ, p)` and returns the reduced sum.
struct SumAccumulator {
    n: u64,
    chi_order: u64,
    p: u64,
    counts: Vec<i64>,
}

impl SumAccumulator {
    fn new(chi_order: u64, p: u64) -> Self {
        let n = arith::lcm(chi_order, p);
        SumAccumulator { n, chi_order, p, counts: vec![0; n as usize] }
    }

    /// Adds `ζ_{chi_order}^a · ζ_p^t`.
    fn push(&mut self, a: u64, t: u64) {
        let e = (a * (self.n / self.chi_order) + t * (self.n / self.p)) % self.n;
        self.counts[e as usize] += 1;
    }

    fn finish(self) -> Cyclotomic {
        Cyclotomic::from_exponent_counts(self.n, &self.counts)
    }
}

/// Exponent of `χ(x)` as a power of `ζ_{ord χ}`.
fn chi_exponent(chi: &FFMultChar, x: Elem) -> u64 {
    let n = chi.field.q - 1;
    let g = n / chi.order();
    let j = chi.field.log[x as usize] as u64;
    (chi.index as u128 * j as u128 % n as u128) as u64 / g
}

/// `Σ_{x ≠ 0} χ(x) ψ_q(bx)`.
pub fn gauss_sum(chi: &FFMultChar, b: Elem) -> ScaledCyclotomic {
    let f = &chi.field;
    let mut acc = SumAccumulator::new(chi.order(), f.p);
    for x in f.units() {
        acc.push(chi_exponent(chi, x), f.trace(f.mul(b, x)));
    }
    acc.finish().into()
}

/// `ζ_p^{Tr(x)}` as a cyclotomic number.
pub fn psi_q(field: &FqField, x: Elem) -> Cyclotomic {
    field.psi(x).to_cyclotomic()
}

/// Closed form of the quadratic Gauss sum over `F_{p^s}` for odd `p`.
pub fn quadratic_gauss_closed_form(p: u64, s: u32) -> Result<ScaledCyclotomic, FieldError> {
    if p == 2 || !arith::is_prime(p) {
        return Err(FieldError::InvalidPrime(p));
    }
    let q = arith::ipow(p, s);
    let sign: i64 = if s % 2 == 1 { 1 } else { -1 };
    let unit = if p % 4 == 1 {
        Cyclotomic::from_int(sign)
    } else {
        Cyclotomic::zeta_pow(4, s as i64).scale(&num_rational::BigRational::from_integer(sign.into()))
    };
    Ok(ScaledCyclotomic::new(q, 1, unit))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DavenportHasseReport {
    pub lhs: ScaledCyclotomic,
    pub rhs: ScaledCyclotomic,
    pub equal: bool,
}

/// Lifts `χ` and `ψ_b` to `F_{q^s}` through norm and trace and compares both
/// sides of the lifting relation for Gauss sums.
pub fn lift_and_check_davenport_hasse(chi: &FFMultChar, b: Elem, s: u32) -> Result<DavenportHasseReport, FieldError> {
    if chi.is_trivial() && b == 0 {
        return Err(FieldError::BothTrivial);
    }
    let k = &chi.field;
    let big = FqField::new(k.p, k.s * s)?;
    let emb = k.embedding_into(&big);
    let mut back = HashMap::with_capacity(emb.len());
    for (x, y) in emb.iter().enumerate() {
        back.insert(*y, x as Elem);
    }
    let b_big = emb[b as usize];
    let mut acc = SumAccumulator::new(chi.order(), k.p);
    for x in big.units() {
        let n = back[&big.norm_to(x, k.q)];
        let t = back[&big.trace_to(big.mul(b_big, x), k.q)];
        acc.push(chi_exponent(chi, n), k.trace(t));
    }
    let lhs: ScaledCyclotomic = acc.finish().into();
    let g = gauss_sum(chi, b);
    let sign = ScaledCyclotomic::from_int(if s % 2 == 1 { 1 } else { -1 });
    let rhs = sign.mul(&g.pow(s as i64).expect("nonnegative power"));
    let equal = lhs == rhs;
    Ok(DavenportHasseReport { lhs, rhs, equal })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        let f5 = FqField::new(5, 1).unwrap();
        // x + 2 has root 3, the least c0 with -c0 a primitive root mod 5
        assert_eq!(f5.modulus(), &[2, 1]);
        assert_eq!(f5.generator(), 2);
        let f9 = FqField::new(3, 2).unwrap();
        assert_eq!(f9.to_string(), "Fq(3^2; modulus=[2,1,1])");
        assert_eq!(FqField::parse("Fq(3^2; modulus=[2,1,1])").unwrap(), f9);
        assert!(FqField::parse("Fq(3^2; modulus=[1,0,1])").is_err());
    }

    #[test]
    fn additive_character_examples() {
        let f5 = FqField::new(5, 1).unwrap();
        assert_eq!(psi_q(&f5, 0), Cyclotomic::one(1));
        assert_eq!(psi_q(&f5, 2), Cyclotomic::zeta_pow(5, 2));
        let f9 = FqField::new(3, 2).unwrap();
        let kernel = f9.elements().filter(|x| f9.trace(*x) == 0).count();
        assert_eq!(kernel, 3);
    }

    #[test]
    fn trace_and_norm_match_conjugates() {
        let f = FqField::new(2, 4).unwrap();
        for x in f.elements() {
            let mut sum = 0;
            let mut prod = 1;
            let mut y = x;
            for _ in 0..4 {
                sum = f.add(sum, y);
                prod = f.mul(prod, y);
                y = f.pow(y, 2);
            }
            assert_eq!(sum as u64, f.trace(x));
            assert_eq!(prod as u64, f.norm(x));
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let f5 = FqField::new(5, 1).unwrap();
        assert_eq!(gauss_sum(&FFMultChar::trivial(f5.clone()), 1), ScaledCyclotomic::from_int(-1));
        let quad5 = FFMultChar::quadratic(f5).unwrap();
        assert_eq!(gauss_sum(&quad5, 1), ScaledCyclotomic::sqrt(5));
        let f3 = FqField::new(3, 1).unwrap();
        let quad3 = FFMultChar::quadratic(f3).unwrap();
        assert_eq!(gauss_sum(&quad3, 1).human(), "i*sqrt(3)");
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(quadratic_gauss_closed_form(5, 1).unwrap(), ScaledCyclotomic::sqrt(5));
        assert_eq!(quadratic_gauss_closed_form(3, 2).unwrap(), ScaledCyclotomic::from_int(3));
        assert_eq!(quadratic_gauss_closed_form(7, 1).unwrap().human(), "i*sqrt(7)");
        assert_eq!(quadratic_gauss_closed_form(2, 3), Err(FieldError::InvalidPrime(2)));
    }

    #[test]
    fn davenport_hasse_examples() {
        let f3 = FqField::new(3, 1).unwrap();
        let r = lift_and_check_davenport_hasse(&FFMultChar::quadratic(f3.clone()).unwrap(), 1, 2).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, ScaledCyclotomic::from_int(3));
        let f5 = FqField::new(5, 1).unwrap();
        assert!(lift_and_check_davenport_hasse(&FFMultChar::quadratic(f5).unwrap(), 1, 3).unwrap().equal);
        let f7 = FqField::new(7, 1).unwrap();
        assert!(lift_and_check_davenport_hasse(&FFMultChar::new(f7, 2), 1, 2).unwrap().equal);
        assert_eq!(
            lift_and_check_davenport_hasse(&FFMultChar::trivial(f3), 0, 2),
            Err(FieldError::BothTrivial)
        );
    }

    #[test]
    fn character_zero_is_an_error() {
        let f = FqField::new(7, 1).unwrap();
        assert_eq!(FFMultChar::new(f.clone(), 1).eval(0), Err(FieldError::ZeroArgument));
        assert_eq!(FFMultChar::new(f.clone(), 2).order(), 3);
        assert_eq!(FFMultChar::parse("chi(2 mod 6)", f.clone()).unwrap().index(), 2);
        assert_eq!(FFMultChar::new(f, 4).to_string(), "chi(4 mod 6)");
    }
}
