//! Exact arithmetic in cyclotomic fields `Q(ζ_N)` together with a formal
//! square root of an integer.
//!
//! A [`Cyclotomic`] is a rational vector in the power basis `1, ζ, …, ζ^{φ(N)-1}`
//! reduced modulo the cyclotomic polynomial `Φ_N`. A [`ScaledCyclotomic`] multiplies
//! such a value by `√r` for a squarefree integer `r`, which is how every
//! `q^{±a/2}` normalising factor is carried.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use thiserror::Error;

use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible square-root bases {0} and {1}")]
    IncompatibleBase(u64, u64),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Monic integer cyclotomic polynomial with its nonzero non-leading terms.
#[derive(Debug)]
pub struct CycloPoly {
    pub n: u64,
    pub degree: usize,
    pub coeffs: Vec<i64>,
    low_terms: Vec<(usize, i64)>,
}

static PHI_CACHE: Lazy<RwLock<HashMap<u64, Arc<CycloPoly>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// `Φ_n`, computed as `(x^n - 1) / ∏_{d | n, d < n} Φ_d` and cached.
pub fn cyclotomic_polynomial(n: u64) -> Arc<CycloPoly> {
    assert!(n >= 1, "cyclotomic order must be positive");
    if let Some(p) = PHI_CACHE.read().get(&n) {
        return p.clone();
    }
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in arith::divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d);
        poly = divide_monic(&poly, &phi_d);
    }
    let degree = poly.len() - 1;
    let low_terms = poly[..degree]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(j, c)| (j, *c))
        .collect();
    let entry = Arc::new(CycloPoly { n, degree, coeffs: poly, low_terms });
    PHI_CACHE.write().entry(n).or_insert(entry).clone()
}

fn divide_monic(num: &[i64], den: &CycloPoly) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.degree;
    let qlen = rem.len() - dd;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd];
        if c == 0 {
            continue;
        }
        quot[i] = c;
        rem[i + dd] = 0;
        for &(j, pj) in &den.low_terms {
            rem[i + j] -= c * pj;
        }
    }
    debug_assert!(rem.iter().all(|c| *c == 0), "inexact cyclotomic division");
    quot
}

/// Coefficient arithmetic used by the reduction kernels.
trait Coef: Clone {
    fn c_zero() -> Self;
    fn c_is_zero(&self) -> bool;
    fn add_assign(&mut self, o: &Self) -> Option<()>;
    fn sub_scaled(&mut self, c: &Self, k: i64) -> Option<()>;
    fn add_product(&mut self, a: &Self, b: &Self) -> Option<()>;
}

impl Coef for i128 {
    fn c_zero() -> Self {
        0
    }
    fn c_is_zero(&self) -> bool {
        *self == 0
    }
    fn add_assign(&mut self, o: &Self) -> Option<()> {
        *self = self.checked_add(*o)?;
        Some(())
    }
    fn sub_scaled(&mut self, c: &Self, k: i64) -> Option<()> {
        *self = self.checked_sub(c.checked_mul(k as i128)?)?;
        Some(())
    }
    fn add_product(&mut self, a: &Self, b: &Self) -> Option<()> {
        *self = self.checked_add(a.checked_mul(*b)?)?;
        Some(())
    }
}

impl Coef for BigInt {
    fn c_zero() -> Self {
        Zero::zero()
    }
    fn c_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) -> Option<()> {
        *self += o;
        Some(())
    }
    fn sub_scaled(&mut self, c: &Self, k: i64) -> Option<()> {
        *self -= c * k;
        Some(())
    }
    fn add_product(&mut self, a: &Self, b: &Self) -> Option<()> {
        *self += a * b;
        Some(())
    }
}

/// Reduces a coefficient vector modulo `x^n - 1` and then modulo `Φ_n`.
fn reduce<T: Coef>(mut a: Vec<T>, phi: &CycloPoly) -> Option<Vec<T>> {
    let n = phi.n as usize;
    if a.len() > n {
        let tail = a.split_off(n);
        for (i, v) in tail.into_iter().enumerate() {
            a[i % n].add_assign(&v)?;
        }
    }
    let d = phi.degree;
    for i in (d..a.len()).rev() {
        if a[i].c_is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut a[i], T::c_zero());
        for &(j, pj) in &phi.low_terms {
            a[i - d + j].sub_scaled(&c, pj)?;
        }
    }
    a.resize(d, T::c_zero());
    Some(a)
}

fn convolve<T: Coef>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let mut out = vec![T::c_zero(); a.len() + b.len() - 1];
    let nz_b: Vec<usize> = (0..b.len()).filter(|j| !b[*j].c_is_zero()).collect();
    for (i, x) in a.iter().enumerate() {
        if x.c_is_zero() {
            continue;
        }
        for &j in &nz_b {
            out[i + j].add_product(x, &b[j])?;
        }
    }
    Some(out)
}

fn to_small(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(|x| x.to_i64().map(i128::from)).collect()
}

fn reduce_big(a: Vec<BigInt>, phi: &CycloPoly) -> Vec<BigInt> {
    if let Some(small) = to_small(&a) {
        if let Some(r) = reduce(small, phi) {
            return r.into_iter().map(BigInt::from).collect();
        }
    }
    reduce(a, phi).expect("bigint reduction is infallible")
}

/// An element of `Q(ζ_N)` in reduced power-basis form `num / den`.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    order: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclotomic {
    pub fn zero(order: u64) -> Self {
        let d = cyclotomic_polynomial(order).degree;
        Cyclotomic { order, num: vec![BigInt::zero(); d], den: BigInt::one() }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(BigRational::one(), order)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(v.into()), 1)
    }

    pub fn from_rational(r: BigRational, order: u64) -> Self {
        let mut z = Self::zero(order);
        z.num[0] = r.numer().clone();
        z.den = r.denom().clone();
        z.normalize();
        z
    }

    /// `ζ_N^k` for any integer `k`.
    pub fn zeta_pow(order: u64, k: i64) -> Self {
        let e = k.rem_euclid(order as i64) as usize;
        let mut v = vec![0i64; e + 1];
        v[e] = 1;
        Self::from_int_poly(order, &v)
    }

    /// Builds `Σ coeffs[k] ζ_N^k` from an integer vector of any length.
    pub fn from_int_poly(order: u64, coeffs: &[i64]) -> Self {
        let phi = cyclotomic_polynomial(order);
        let small: Vec<i128> = coeffs.iter().map(|c| *c as i128).collect();
        let num = match reduce(small, &phi) {
            Some(r) => r.into_iter().map(BigInt::from).collect(),
            None => reduce(coeffs.iter().map(|c| BigInt::from(*c)).collect(), &phi).unwrap(),
        };
        let mut z = Cyclotomic { order, num, den: BigInt::one() };
        z.normalize();
        z
    }

    /// Whether `Σ coeffs[k] ζ_N^k` vanishes, without building the element.
    pub fn int_poly_is_zero(order: u64, coeffs: &[i64]) -> bool {
        let phi = cyclotomic_polynomial(order);
        let small: Vec<i128> = coeffs.iter().map(|c| *c as i128).collect();
        match reduce(small, &phi) {
            Some(r) => r.iter().all(|c| *c == 0),
            None => Self::from_int_poly(order, coeffs).is_zero(),
        }
    }

    /// Builds `Σ coeffs[k] ζ_N^k` from rational coefficients of any length.
    pub fn from_rational_poly(order: u64, coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        let phi = cyclotomic_polynomial(order);
        let mut z = Cyclotomic { order, num: reduce_big(ints, &phi), den };
        z.normalize();
        z
    }

    /// `Σ_k counts[k] ζ_N^k`, where `counts` is indexed by exponent mod `N`.
    pub fn from_exponent_counts(order: u64, counts: &[i64]) -> Self {
        Self::from_int_poly(order, counts)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Rational coefficients in the reduced power basis.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        if self.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in &mut self.num {
                *c /= &g;
            }
        }
    }

    /// The same number viewed in `Q(ζ_m)`; `m` must be a multiple of the order.
    pub fn embed(&self, m: u64) -> Self {
        assert!(m % self.order == 0, "embedding target {m} is not a multiple of {}", self.order);
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut v = vec![BigInt::zero(); (self.num.len().max(1) - 1) * step + 1];
        for (i, c) in self.num.iter().enumerate() {
            v[i * step] = c.clone();
        }
        let phi = cyclotomic_polynomial(m);
        let mut z = Cyclotomic { order: m, num: reduce_big(v, &phi), den: self.den.clone() };
        z.normalize();
        z
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let m = arith::lcm(self.order, other.order);
        (self.embed(m), other.embed(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let (num, den) = if a.den == b.den {
            (a.num.iter().zip(&b.num).map(|(x, y)| x + y).collect(), a.den.clone())
        } else {
            (
                a.num.iter().zip(&b.num).map(|(x, y)| x * &b.den + y * &a.den).collect(),
                &a.den * &b.den,
            )
        };
        let mut z = Cyclotomic { order: a.order, num, den };
        z.normalize();
        z
    }

    pub fn neg(&self) -> Self {
        Cyclotomic { order: self.order, num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        if a.is_zero() || b.is_zero() {
            return Self::zero(a.order);
        }
        let phi = cyclotomic_polynomial(a.order);
        let small = to_small(&a.num).zip(to_small(&b.num)).and_then(|(x, y)| {
            let c = convolve(&x, &y)?;
            reduce(c, &phi)
        });
        let num = match small {
            Some(v) => v.into_iter().map(BigInt::from).collect(),
            None => reduce(convolve(&a.num, &b.num).unwrap(), &phi).unwrap(),
        };
        let mut z = Cyclotomic { order: a.order, num, den: &a.den * &b.den };
        z.normalize();
        z
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut z = Cyclotomic {
            order: self.order,
            num: self.num.iter().map(|c| c * r.numer()).collect(),
            den: &self.den * r.denom(),
        };
        z.normalize();
        z
    }

    /// Applies the automorphism `ζ ↦ ζ^a` for `a` prime to the order.
    pub fn galois(&self, a: i64) -> Self {
        let n = self.order as i64;
        assert!(arith::gcd(a.rem_euclid(n) as u64, self.order) == 1 || n == 1);
        let mut v = vec![BigInt::zero(); self.order as usize];
        for (k, c) in self.num.iter().enumerate() {
            let pos = (k as i64 * a).rem_euclid(n) as usize;
            v[pos] += c;
        }
        let phi = cyclotomic_polynomial(self.order);
        let mut z = Cyclotomic { order: self.order, num: reduce_big(v, &phi), den: self.den.clone() };
        z.normalize();
        z
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn pow(&self, e: i64) -> Result<Self, CycloError> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_N`.
    pub fn inv(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(r.recip(), self.order));
        }
        let phi = cyclotomic_polynomial(self.order);
        let mut r0: Vec<BigRational> = phi.coeffs.iter().map(|c| BigRational::from_integer((*c).into())).collect();
        let mut r1 = trim(self.coeffs());
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        debug_assert_eq!(r0.len(), 1, "Φ_N is irreducible so the gcd is a unit");
        let c = r0[0].clone();
        let inv: Vec<BigRational> = s0.into_iter().map(|x| x / &c).collect();
        Ok(Self::from_rational_poly(self.order, &inv))
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycloError> {
        Ok(self.mul(&other.inv()?))
    }

    /// `(k, N)` in lowest terms with `self = ζ_N^k`, if `self` is a root of unity.
    pub fn as_root_of_unity(&self) -> Option<(u64, u64)> {
        if self.is_zero() || !self.den.is_one() {
            return None;
        }
        if !self.mul(&self.conj()).as_rational().map_or(false, |r| r.is_one()) {
            return None;
        }
        let m = arith::lcm(2, self.order);
        let w = self.embed(m);
        let phi = cyclotomic_polynomial(m);
        let d = phi.degree;
        let mut cur: Vec<i128> = vec![0; d];
        cur[0] = 1;
        for k in 0..m {
            if w.num.iter().zip(&cur).all(|(a, b)| a.to_i128() == Some(*b)) {
                let g = arith::gcd(k, m);
                return Some((k / g, m / g));
            }
            cur.insert(0, 0);
            let top = cur.pop().unwrap();
            if top != 0 {
                for &(j, pj) in &phi.low_terms {
                    cur[j] -= top * pj as i128;
                }
            }
        }
        None
    }

    /// Writes `c_0 + c_1*z + …` with zero terms omitted.
    fn fmt_poly(&self) -> String {
        let mut s = String::new();
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let r = BigRational::new(c.clone(), self.den.clone());
            let neg = r.is_negative();
            let a = r.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coef = fmt_rational(&a);
            match k {
                0 => s.push_str(&coef),
                _ => {
                    if !a.is_one() {
                        s.push_str(&coef);
                        s.push('*');
                    }
                    s.push('z');
                    if k > 1 {
                        s.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().map_or(false, Zero::is_zero) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (vec![], trim(rem));
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    let lead = b[db].clone();
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        quot[i] = c;
    }
    rem.truncate(db);
    (trim(quot), trim(rem))
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyclotomic {}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1^(0/2) * ({}) ; z = zeta_{}", self.fmt_poly(), self.order)
    }
}

/// Exact root of unity `exp(2πi·num/den)` with `0 <= num < den` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub fn new(k: i64, n: u64) -> Self {
        assert!(n > 0);
        let k = k.rem_euclid(n as i64) as u64;
        let g = arith::gcd(k, n);
        RootOfUnity { num: k / g, den: n / g }
    }

    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }

    pub fn minus_one() -> Self {
        Self::new(1, 2)
    }

    pub fn i() -> Self {
        Self::new(1, 4)
    }

    /// `(k, N)` in lowest terms.
    pub fn parts(&self) -> (u64, u64) {
        (self.num, self.den)
    }

    pub fn order(&self) -> u64 {
        self.den
    }

    /// `e` with `self = ζ_n^e`; `n` must be a multiple of the order.
    pub fn exponent_in(&self, n: u64) -> u64 {
        assert!(n % self.den == 0, "ζ of order {} is not in μ_{n}", self.den);
        self.num * (n / self.den)
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = arith::lcm(self.den, o.den);
        let k = self.num * (n / self.den) + o.num * (n / o.den);
        Self::new((k % n) as i64, n)
    }

    pub fn inv(&self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    pub fn pow(&self, e: i64) -> Self {
        let k = (self.num as i128 * e as i128).rem_euclid(self.den as i128);
        Self::new(k as i64, self.den)
    }

    pub fn to_cyclotomic(&self) -> Cyclotomic {
        Cyclotomic::zeta_pow(self.den, self.num as i64)
    }

    pub fn to_scaled(&self) -> ScaledCyclotomic {
        ScaledCyclotomic::from(self.to_cyclotomic())
    }

    /// Short display: `1`, `-1`, `i`, `-i` or `zeta_N^k`.
    pub fn symbol(&self) -> String {
        match (self.num, self.den) {
            (0, 1) => "1".into(),
            (1, 2) => "-1".into(),
            (1, 4) => "i".into(),
            (3, 4) => "-i".into(),
            (1, n) => format!("zeta_{n}"),
            (k, n) => format!("zeta_{n}^{k}"),
        }
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

static SQRT_CACHE: Lazy<RwLock<HashMap<u64, Cyclotomic>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// The positive square root of a squarefree `r` as an explicit cyclotomic number.
pub fn sqrt_cyclotomic(r: u64) -> Cyclotomic {
    if let Some(z) = SQRT_CACHE.read().get(&r) {
        return z.clone();
    }
    let mut acc = Cyclotomic::one(1);
    for (p, e) in arith::factor(r) {
        assert_eq!(e, 1, "sqrt_cyclotomic expects a squarefree argument");
        let s = if p == 2 {
            Cyclotomic::zeta_pow(8, 1).add(&Cyclotomic::zeta_pow(8, 7))
        } else {
            let mut v = vec![0i64; p as usize];
            for (a, slot) in v.iter_mut().enumerate().skip(1) {
                *slot = arith::legendre(a as i64, p) as i64;
            }
            let g = Cyclotomic::from_int_poly(p, &v);
            if p % 4 == 1 {
                g
            } else {
                g.mul(&Cyclotomic::zeta_pow(4, 3))
            }
        };
        acc = acc.mul(&s);
    }
    SQRT_CACHE.write().insert(r, acc.clone());
    acc
}

/// `value · r^{e/2}` with `r` squarefree and `e ∈ {0, 1}`.
#[derive(Clone, Debug)]
pub struct ScaledCyclotomic {
    base_q: u64,
    half_exponent: u8,
    value: Cyclotomic,
}

impl From<Cyclotomic> for ScaledCyclotomic {
    fn from(value: Cyclotomic) -> Self {
        ScaledCyclotomic { base_q: 1, half_exponent: 0, value }
    }
}

impl ScaledCyclotomic {
    /// `q^{h/2} · value`, normalised so that the formal radical is squarefree.
    pub fn new(q: u64, h: i64, value: Cyclotomic) -> Self {
        assert!(q >= 1);
        let (s, r) = arith::squarefree_split(q);
        // q^{h/2} = s^h · r^{⌊h/2⌋} · (√r)^{h mod 2}
        let rational = big_pow(s, h) * big_pow(r, h.div_euclid(2));
        let value = value.scale(&rational);
        let e = h.rem_euclid(2) as u8;
        Self::normalized(r, e, value)
    }

    fn normalized(r: u64, e: u8, value: Cyclotomic) -> Self {
        if e == 0 || r == 1 || value.is_zero() {
            ScaledCyclotomic { base_q: 1, half_exponent: 0, value }
        } else {
            ScaledCyclotomic { base_q: r, half_exponent: 1, value }
        }
    }

    pub fn zero() -> Self {
        Cyclotomic::zero(1).into()
    }

    pub fn one() -> Self {
        Cyclotomic::one(1).into()
    }

    pub fn from_int(v: i64) -> Self {
        Cyclotomic::from_int(v).into()
    }

    /// `√q` for a positive integer `q`.
    pub fn sqrt(q: u64) -> Self {
        Self::new(q, 1, Cyclotomic::one(1))
    }

    pub fn base_q(&self) -> u64 {
        self.base_q
    }

    pub fn half_exponent(&self) -> u8 {
        self.half_exponent
    }

    pub fn value(&self) -> &Cyclotomic {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// The same number with the radical expanded into `Q(ζ_M)`.
    pub fn to_cyclotomic(&self) -> Cyclotomic {
        if self.half_exponent == 0 {
            self.value.clone()
        } else {
            self.value.mul(&sqrt_cyclotomic(self.base_q))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CycloError> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.base_q != other.base_q || self.half_exponent != other.half_exponent {
            return Err(CycloError::IncompatibleBase(self.base_q, other.base_q));
        }
        Ok(Self::normalized(self.base_q, self.half_exponent, self.value.add(&other.value)))
    }

    pub fn neg(&self) -> Self {
        ScaledCyclotomic { value: self.value.neg(), ..self.clone() }
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.try_add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let value = self.value.mul(&other.value);
        match (self.half_exponent, other.half_exponent) {
            (1, 1) => {
                let g = arith::gcd(self.base_q, other.base_q);
                let r = (self.base_q / g) * (other.base_q / g);
                let value = value.scale(&BigRational::from_integer(g.into()));
                Self::normalized(r, 1, value)
            }
            (1, 0) => Self::normalized(self.base_q, 1, value),
            (0, 1) => Self::normalized(other.base_q, 1, value),
            _ => value.into(),
        }
    }

    pub fn mul_cyclo(&self, c: &Cyclotomic) -> Self {
        Self::normalized(self.base_q, self.half_exponent, self.value.mul(c))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::normalized(self.base_q, self.half_exponent, self.value.scale(r))
    }

    pub fn inv(&self) -> Result<Self, CycloError> {
        let v = self.value.inv()?;
        if self.half_exponent == 1 {
            // (v√r)^{-1} = v^{-1}·√r / r
            let v = v.scale(&BigRational::new(BigInt::one(), self.base_q.into()));
            Ok(Self::normalized(self.base_q, 1, v))
        } else {
            Ok(v.into())
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, CycloError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, CycloError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn conj(&self) -> Self {
        ScaledCyclotomic { value: self.value.conj(), ..self.clone() }
    }

    pub fn as_root_of_unity(&self) -> Option<(u64, u64)> {
        self.to_cyclotomic().as_root_of_unity()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.half_exponent == 0 {
            self.value.as_rational()
        } else {
            self.to_cyclotomic().as_rational()
        }
    }

    /// Writes the value as `c*ζ*sqrt(r)` when it has that shape, else the canonical form.
    pub fn human(&self) -> String {
        rational_root_radical(&self.to_cyclotomic()).unwrap_or_else(|| self.to_string())
    }

    pub fn parse(s: &str) -> Result<Self, CycloError> {
        parse_scaled(s)
    }
}

fn big_pow(b: u64, e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(b), e.unsigned_abs() as usize);
    let r = BigRational::from_integer(p);
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

/// Renders `w = c·ζ·√r` (c a positive rational, r squarefree) compactly.
fn rational_root_radical(w: &Cyclotomic) -> Option<String> {
    if w.is_zero() {
        return Some("0".into());
    }
    if let Some(r) = w.as_rational() {
        return Some(fmt_rational(&r));
    }
    let t = w.mul(&w.conj()).as_rational()?;
    if !t.is_positive() {
        return None;
    }
    // √t = s·√r / b with a·b = s²·r
    let ab = (t.numer() * t.denom()).to_u64()?;
    let (s, r) = arith::squarefree_split(ab);
    let c = BigRational::new(s.into(), t.denom().clone());
    let radical = sqrt_cyclotomic(r);
    let unit = w
        .mul(&radical)
        .scale(&(c.recip() / BigRational::from_integer(r.into())));
    let (k, n) = unit.as_root_of_unity()?;
    let mut parts = Vec::new();
    if !c.is_one() {
        parts.push(fmt_rational(&c));
    }
    let root = RootOfUnity::new(k as i64, n);
    if !root.is_one() {
        parts.push(root.symbol());
    }
    if r != 1 {
        parts.push(format!("sqrt({r})"));
    }
    let mut out = if parts.is_empty() { "1".to_string() } else { parts.join("*") };
    // -1*sqrt(5) reads better as -sqrt(5)
    if let Some(rest) = out.strip_prefix("-1*") {
        out = format!("-{rest}");
    }
    Some(out)
}

impl PartialEq for ScaledCyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.base_q == other.base_q && self.half_exponent == other.half_exponent {
            self.value == other.value
        } else {
            self.to_cyclotomic() == other.to_cyclotomic()
        }
    }
}

impl Eq for ScaledCyclotomic {}

impl fmt::Display for ScaledCyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}^({}/2) * ({}) ; z = zeta_{}",
            self.base_q,
            self.half_exponent,
            self.value.fmt_poly(),
            self.value.order
        )
    }
}

/// Binary operation selector for [`cyclo_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn cyclo_arith(a: &ScaledCyclotomic, b: &ScaledCyclotomic, op: ArithOp) -> Result<ScaledCyclotomic, CycloError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => Ok(a.mul(b)),
        ArithOp::Div => a.div(b),
    }
}

pub fn conjugate(z: &ScaledCyclotomic) -> ScaledCyclotomic {
    z.conj()
}

pub fn as_root_of_unity(z: &ScaledCyclotomic) -> Option<(u64, u64)> {
    z.as_root_of_unity()
}

fn parse_err(msg: impl Into<String>) -> CycloError {
    CycloError::Parse(msg.into())
}

fn parse_scaled(s: &str) -> Result<ScaledCyclotomic, CycloError> {
    let (head, tail) = s.split_once(';').ok_or_else(|| parse_err("missing '; z = zeta_N'"))?;
    let tail = tail.trim();
    let order: u64 = tail
        .strip_prefix("z")
        .map(str::trim_start)
        .and_then(|t| t.strip_prefix('='))
        .map(str::trim_start)
        .and_then(|t| t.strip_prefix("zeta_"))
        .ok_or_else(|| parse_err(format!("bad order clause '{tail}'")))?
        .trim()
        .parse()
        .map_err(|_| parse_err("bad cyclotomic order"))?;
    if order == 0 {
        return Err(parse_err("order must be positive"));
    }
    let head = head.trim();
    let (scale, poly) = head.split_once('*').ok_or_else(|| parse_err("missing '*' after scale"))?;
    let scale = scale.trim();
    let (q, e) = scale.split_once("^(").ok_or_else(|| parse_err("bad scale"))?;
    let q: u64 = q.trim().parse().map_err(|_| parse_err("bad base"))?;
    let e: i64 = e
        .strip_suffix("/2)")
        .ok_or_else(|| parse_err("bad half exponent"))?
        .trim()
        .parse()
        .map_err(|_| parse_err("bad half exponent"))?;
    if q == 0 {
        return Err(parse_err("base must be positive"));
    }
    let poly = poly.trim();
    let inner = poly
        .strip_prefix('(')
        .and_then(|p| p.strip_suffix(')'))
        .ok_or_else(|| parse_err("polynomial must be parenthesised"))?;
    let coeffs = parse_poly(inner)?;
    let value = Cyclotomic::from_rational_poly(order, &coeffs);
    Ok(ScaledCyclotomic::new(q, e, value))
}

fn parse_poly(s: &str) -> Result<Vec<BigRational>, CycloError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(parse_err("empty polynomial"));
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    let mut out: Vec<BigRational> = Vec::new();
    for t in terms {
        let (neg, body) = match t.as_bytes()[0] {
            b'-' => (true, &t[1..]),
            b'+' => (false, &t[1..]),
            _ => (false, t),
        };
        let (coef, power) = match body.find('z') {
            None => (body, 0usize),
            Some(pos) => {
                let coef = body[..pos].strip_suffix('*').unwrap_or(&body[..pos]);
                let rest = &body[pos + 1..];
                let power = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(|| parse_err(format!("bad term '{t}'")))?
                        .parse()
                        .map_err(|_| parse_err(format!("bad exponent in '{t}'")))?
                };
                (if coef.is_empty() { "1" } else { coef }, power)
            }
        };
        let mut c = parse_rational(coef)?;
        if neg {
            c = -c;
        }
        if out.len() <= power {
            out.resize(power + 1, BigRational::zero());
        }
        out[power] += c;
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Result<BigRational, CycloError> {
    let bad = || parse_err(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.parse().map_err(|_| bad())?;
            let b: BigInt = b.parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64, k: i64) -> Cyclotomic {
        Cyclotomic::zeta_pow(n, k)
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1).coeffs, vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4).coeffs, vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6).coeffs, vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12).coeffs, vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic_polynomial(105).coeffs.contains(&-2));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(z(8, 1).mul(&z(8, 1)), z(4, 1));
        let one_plus_i = Cyclotomic::one(4).add(&z(4, 1));
        let one_minus_i = Cyclotomic::one(4).sub(&z(4, 1));
        assert_eq!(one_plus_i.mul(&one_minus_i), Cyclotomic::from_int(2));
        let r5 = ScaledCyclotomic::sqrt(5);
        let sq = r5.mul(&r5);
        assert_eq!(sq.half_exponent(), 0);
        assert_eq!(sq, ScaledCyclotomic::from_int(5));
    }

    #[test]
    fn conjugation_examples() {
        let i = ScaledCyclotomic::from(z(4, 1));
        assert_eq!(conjugate(&i), ScaledCyclotomic::from(z(4, 3)));
        assert_eq!(conjugate(&ScaledCyclotomic::from_int(2)), ScaledCyclotomic::from_int(2));
        let i_r3 = i.mul(&ScaledCyclotomic::sqrt(3));
        assert_eq!(conjugate(&i_r3), i_r3.neg());
    }

    #[test]
    fn root_of_unity_examples() {
        assert_eq!(as_root_of_unity(&z(4, 3).into()), Some((3, 4)));
        assert_eq!(as_root_of_unity(&ScaledCyclotomic::sqrt(5)), None);
        assert_eq!(as_root_of_unity(&z(8, 3).into()), Some((3, 8)));
        assert_eq!(z(3, 1).neg().as_root_of_unity(), Some((5, 6)));
    }

    #[test]
    fn explicit_square_roots_square_correctly() {
        for r in [2u64, 3, 5, 6, 7, 10, 15, 30] {
            let s = sqrt_cyclotomic(r);
            assert_eq!(s.mul(&s), Cyclotomic::from_int(r as i64), "r = {r}");
            assert_eq!(s.conj(), s, "√{r} is real");
        }
    }

    #[test]
    fn radical_absorbed_into_value_compares_equal() {
        // 2^{-3/2} · (ζ8 − ζ8³ − ζ8⁵ + ζ8⁷) = 1
        let v = z(8, 1).sub(&z(8, 3)).sub(&z(8, 5)).add(&z(8, 7));
        let w = ScaledCyclotomic::new(2, -3, v);
        assert_eq!(w.half_exponent(), 1);
        assert_eq!(w, ScaledCyclotomic::one());
        assert_eq!(w.human(), "1");
    }

    #[test]
    fn inverse_and_division() {
        let a = Cyclotomic::one(5).add(&z(5, 1).scale(&BigRational::new(2.into(), 3.into())));
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv), Cyclotomic::one(1));
        assert_eq!(Cyclotomic::zero(5).inv(), Err(CycloError::DivisionByZero));
        let s = ScaledCyclotomic::new(7, 1, z(4, 1));
        assert_eq!(s.div(&s).unwrap(), ScaledCyclotomic::one());
    }

    #[test]
    fn incompatible_bases() {
        let a = ScaledCyclotomic::sqrt(2);
        let b = ScaledCyclotomic::sqrt(3);
        assert_eq!(a.try_add(&b), Err(CycloError::IncompatibleBase(2, 3)));
        assert_eq!(a.mul(&b), ScaledCyclotomic::sqrt(6));
    }

    #[test]
    fn serialization_round_trip() {
        let v = Cyclotomic::from_rational_poly(
            8,
            &[BigRational::from_integer(1.into()), BigRational::zero(), BigRational::new((-2).into(), 3.into())],
        );
        let s = ScaledCyclotomic::new(5, 1, v);
        let text = s.to_string();
        assert_eq!(text, "5^(1/2) * (1 - 2/3*z^2) ; z = zeta_8");
        let back = ScaledCyclotomic::parse(&text).unwrap();
        assert_eq!(back.to_string(), text);
        assert_eq!(back, s);
        assert_eq!(ScaledCyclotomic::zero().to_string(), "1^(0/2) * (0) ; z = zeta_1");
        assert!(ScaledCyclotomic::parse("5^(1/2) * (1 + ) ; z = zeta_8").is_err());
    }

    #[test]
    fn human_rendering() {
        let i_r3 = ScaledCyclotomic::new(3, 1, z(4, 1));
        assert_eq!(i_r3.human(), "i*sqrt(3)");
        assert_eq!(ScaledCyclotomic::from(z(2, 1)).human(), "-1");
        assert_eq!(ScaledCyclotomic::from(z(4, 1)).human(), "i");
        assert_eq!(ScaledCyclotomic::sqrt(5).neg().human(), "-sqrt(5)");
        assert_eq!(ScaledCyclotomic::from_int(3).human(), "3");
    }
}
