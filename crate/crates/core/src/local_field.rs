//! A desk-scale model of finite extensions `F/Q_p`.
//!
//! Full unit-group arithmetic is available over `Q_p` through integers modulo
//! `p^a`. Over a general `F` only residue-level data is modelled, which covers
//! characters of conductor at most one. The uniformiser `π_F` is formal and
//! characters record their value on it explicitly.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use once_cell::sync::{Lazy, OnceCell};
use parking_lot::RwLock;
use thiserror::Error;

use crate::arith;
use crate::cyclo::RootOfUnity;
use crate::finite_field::{Elem, FFMultChar, FieldError, FqField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalError {
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("conductor mismatch: {0}")]
    ConductorMismatch(String),
    #[error("inconsistent field data: {0}")]
    InconsistentField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Numerical invariants of `F/Q_p`: ramification `e`, residue degree `f` and
/// the exponent `d` of the different.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalFieldDesc {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub d: u32,
}

impl LocalFieldDesc {
    pub fn new(p: u64, e: u32, f: u32, d: u32) -> Result<Self, LocalError> {
        if !arith::is_prime(p) {
            return Err(LocalError::InconsistentField(format!("{p} is not prime")));
        }
        if e == 0 || f == 0 {
            return Err(LocalError::InconsistentField("e and f must be positive".into()));
        }
        if (e as u64) % p != 0 && d != e - 1 {
            return Err(LocalError::InconsistentField(format!("tame field needs d = e - 1, got e={e}, d={d}")));
        }
        if (e as u64) % p == 0 && d < e {
            return Err(LocalError::InconsistentField(format!("wild field needs d >= e, got e={e}, d={d}")));
        }
        Ok(LocalFieldDesc { p, e, f, d })
    }

    pub fn qp(p: u64) -> Self {
        Self::new(p, 1, 1, 0).expect("Q_p is always consistent")
    }

    pub fn is_qp(&self) -> bool {
        self.e == 1 && self.f == 1
    }

    pub fn q(&self) -> u64 {
        arith::ipow(self.p, self.f)
    }

    /// `ν_F(2)`.
    pub fn nu_two(&self) -> u32 {
        if self.p == 2 {
            self.e
        } else {
            0
        }
    }

    /// Conductor of the canonical additive character `ψ_F = ψ_{Q_p} ∘ Tr`.
    pub fn canonical_psi_conductor(&self) -> i64 {
        self.d as i64
    }

    pub fn residue_field(&self) -> Result<Arc<FqField>, LocalError> {
        Ok(FqField::new(self.p, self.f)?)
    }

    pub fn parse(s: &str) -> Result<Self, LocalError> {
        let bad = || LocalError::Parse(format!("bad field descriptor '{s}'"));
        let inner = s.trim().strip_prefix("Local(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let parts: Vec<u64> = inner
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if parts.len() != 4 {
            return Err(bad());
        }
        Self::new(parts[0], parts[1] as u32, parts[2] as u32, parts[3] as u32)
    }
}

impl fmt::Display for LocalFieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Local({}, {}, {}, {})", self.p, self.e, self.f, self.d)
    }
}

/// `n(ψ ∘ Tr_{K/F}) = e_{K/F}·n(ψ) + d_{K/F}`.
pub fn composed_psi_conductor(e: u32, d: u32, n_psi: i64) -> i64 {
    e as i64 * n_psi + d as i64
}

/// `|F^×/F^{×2}| = 4·q^{ν_F(2)}`.
pub fn square_class_order(field: &LocalFieldDesc) -> u64 {
    4 * arith::ipow(field.q(), field.nu_two())
}

/// A nonzero element of `Q_p` written `p^val · num/den` with `num`, `den`
/// prime to `p` and `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PAdic {
    pub val: i64,
    pub num: i64,
    pub den: i64,
}

impl PAdic {
    /// The rational `num/den` as an element of `Q_p`.
    pub fn from_ratio(p: u64, num: i64, den: i64) -> Self {
        assert!(num != 0 && den != 0, "zero is not a unit");
        let p = p as i64;
        let (mut num, mut den) = (num, den);
        let mut val = 0;
        while num % p == 0 {
            num /= p;
            val += 1;
        }
        while den % p == 0 {
            den /= p;
            val -= 1;
        }
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = arith::gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        PAdic { val, num: num / g, den: den / g }
    }

    pub fn from_int(p: u64, n: i64) -> Self {
        Self::from_ratio(p, n, 1)
    }

    /// `p^val · u` for an integer unit `u`.
    pub fn monomial(p: u64, val: i64, u: i64) -> Self {
        let mut x = Self::from_int(p, u);
        assert_eq!(x.val, 0, "{u} is not a unit");
        x.val = val;
        x
    }

    pub fn one() -> Self {
        PAdic { val: 0, num: 1, den: 1 }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let num = self.num as i128 * o.num as i128;
        let den = self.den as i128 * o.den as i128;
        let g = num_integer::Integer::gcd(&num, &den);
        PAdic {
            val: self.val + o.val,
            num: i64::try_from(num / g).expect("p-adic unit overflow"),
            den: i64::try_from(den / g).expect("p-adic unit overflow"),
        }
    }

    pub fn inv(&self) -> Self {
        let (num, den) = if self.num < 0 { (-self.den, -self.num) } else { (self.den, self.num) };
        PAdic { val: -self.val, num, den }
    }

    /// Unit part reduced modulo `p^k`.
    pub fn unit_mod(&self, p: u64, k: u32) -> u64 {
        let m = arith::ipow(p, k);
        if m == 1 {
            return 0;
        }
        let n = self.num.rem_euclid(m as i64) as u64;
        let dinv = arith::mod_inv(self.den, m).expect("denominator is a unit");
        (n as u128 * dinv as u128 % m as u128) as u64
    }

    pub fn parse(p: u64, s: &str) -> Result<Self, LocalError> {
        let bad = || LocalError::Parse(format!("bad rational '{s}'"));
        let (a, b) = s.split_once('/').unwrap_or((s, "1"));
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if a == 0 || b == 0 {
            return Err(bad());
        }
        Ok(Self::from_ratio(p, a, b))
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = if self.den == 1 { self.num.to_string() } else { format!("{}/{}", self.num, self.den) };
        write!(f, "p^{}*{}", self.val, unit)
    }
}

/// `(Z/p^a)^×` with fixed generators and a coordinate table.
#[derive(Debug)]
pub struct UnitGroup {
    pub p: u64,
    pub a: u32,
    pub modulus: u64,
    /// `(generator, order)` pairs.
    pub gens: Vec<(u64, u64)>,
    coords: Vec<Vec<u64>>,
}

static UNIT_GROUPS: Lazy<RwLock<HashMap<(u64, u32), Arc<UnitGroup>>>> = Lazy::new(|| RwLock::new(HashMap::new()));

impl UnitGroup {
    /// For odd `p` the least primitive root modulo `p^a`; for `p = 2` the
    /// generators `-1` (when `a ≥ 2`) and `5` (when `a ≥ 3`).
    pub fn get(p: u64, a: u32) -> Arc<UnitGroup> {
        if let Some(g) = UNIT_GROUPS.read().get(&(p, a)) {
            return g.clone();
        }
        let modulus = arith::ipow(p, a);
        let gens: Vec<(u64, u64)> = if p == 2 {
            let mut g = Vec::new();
            if a >= 2 {
                g.push((modulus - 1, 2));
            }
            if a >= 3 {
                g.push((5, arith::ipow(2, a - 2)));
            }
            g
        } else if a == 0 {
            vec![]
        } else {
            let phi = modulus / p * (p - 1);
            let primes = arith::prime_divisors(phi);
            let g = (2..modulus)
                .find(|g| g % p != 0 && primes.iter().all(|l| arith::mod_pow(*g, phi / l, modulus) != 1))
                .unwrap_or(1);
            vec![(g, phi)]
        };
        let mut coords = vec![Vec::new(); modulus as usize];
        // enumerate products of generator powers
        let mut stack: Vec<(u64, Vec<u64>)> = vec![(1 % modulus.max(1), vec![])];
        for (g, ord) in &gens {
            let mut next = Vec::new();
            for (x, c) in &stack {
                let mut y = *x;
                for k in 0..*ord {
                    let mut cc = c.clone();
                    cc.push(k);
                    next.push((y, cc));
                    y = y * g % modulus;
                }
            }
            stack = next;
        }
        for (x, c) in stack {
            coords[x as usize] = c;
        }
        if modulus == 1 {
            coords = vec![vec![]];
        }
        let grp = Arc::new(UnitGroup { p, a, modulus, gens, coords });
        UNIT_GROUPS.write().entry((p, a)).or_insert(grp).clone()
    }

    pub fn order(&self) -> u64 {
        self.gens.iter().map(|(_, o)| o).product()
    }

    /// Coordinates of a unit with respect to the generators.
    pub fn coords(&self, x: u64) -> &[u64] {
        let r = if self.modulus == 1 { 0 } else { x % self.modulus };
        assert!(self.modulus == 1 || r % self.p != 0, "{x} is not a unit mod {}", self.modulus);
        &self.coords[r as usize]
    }

    /// Representatives `1 ≤ x < p^a` prime to `p`.
    pub fn reps(&self) -> Vec<u64> {
        if self.modulus == 1 {
            return vec![1];
        }
        (1..self.modulus).filter(|x| x % self.p != 0).collect()
    }
}

/// A character of `(Z/p^a)^×` given by exponents on the generators:
/// `χ(g_i) = ζ_{ord_i}^{k_i}`.
#[derive(Clone, Debug)]
pub struct IntUnitChar {
    group: Arc<UnitGroup>,
    exps: Vec<u64>,
    table: Arc<OnceCell<(u64, Vec<u64>)>>,
}

impl PartialEq for IntUnitChar {
    fn eq(&self, o: &Self) -> bool {
        self.group.p == o.group.p && self.group.a == o.group.a && self.exps == o.exps
    }
}

impl Eq for IntUnitChar {}

impl IntUnitChar {
    pub fn new(group: Arc<UnitGroup>, exps: Vec<u64>) -> Self {
        assert_eq!(exps.len(), group.gens.len());
        let exps = exps.iter().zip(&group.gens).map(|(k, (_, o))| k % o).collect();
        IntUnitChar { group, exps, table: Arc::default() }
    }

    /// The character on `(Z/p^a)^×` whose generator values are given by `f`.
    pub fn from_fn(group: Arc<UnitGroup>, f: impl Fn(u64) -> RootOfUnity) -> Self {
        let exps = group
            .gens
            .iter()
            .map(|(g, ord)| {
                let (k, n) = f(*g).parts();
                assert!(ord % n == 0, "value on generator has order {n} not dividing {ord}");
                k * (ord / n)
            })
            .collect();
        IntUnitChar::new(group, exps)
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn eval(&self, x: u64) -> RootOfUnity {
        let c = self.group.coords(x);
        c.iter()
            .zip(&self.exps)
            .zip(&self.group.gens)
            .fold(RootOfUnity::one(), |acc, ((ci, ki), (_, o))| {
                acc.mul(&RootOfUnity::new((ci * ki % o) as i64, *o))
            })
    }

    /// `(L, t)` with `χ(x) = ζ_L^{t[x]}` for every residue `x` prime to `p`.
    pub fn exponent_table(&self) -> (u64, Vec<u64>) {
        self.table.get_or_init(|| self.build_table()).clone()
    }

    fn build_table(&self) -> (u64, Vec<u64>) {
        let l = self.group.gens.iter().zip(&self.exps).fold(1, |acc, ((_, o), k)| {
            arith::lcm(acc, o / arith::gcd(*k, *o))
        });
        let m = self.group.modulus.max(1);
        let mut t = vec![0u64; m as usize];
        for x in self.group.reps() {
            let c = self.group.coords(x);
            let mut e = 0u64;
            for ((ci, ki), (_, o)) in c.iter().zip(&self.exps).zip(&self.group.gens) {
                // ζ_o^{c k} = ζ_L^{c k L / o}, and L/o is integral after reducing k
                let g = o / arith::gcd(*ki, *o);
                if g == 1 {
                    continue;
                }
                let step = ki / (o / g);
                e += (ci * step % g) * (l / g);
            }
            t[(x % m) as usize] = e % l;
        }
        (l, t)
    }

    /// Every character of `(Z/p^a)^×`.
    pub fn all(group: &Arc<UnitGroup>) -> Vec<IntUnitChar> {
        let mut out = vec![vec![]];
        for (_, o) in &group.gens {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u64>| {
                    (0..*o).map(move |k| {
                        let mut w = v.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(|e| IntUnitChar::new(group.clone(), e)).collect()
    }

    /// Smallest `c` with the character trivial on `1 + p^c`.
    pub fn exact_conductor(&self) -> u32 {
        let (p, a) = (self.group.p, self.group.a);
        for c in 0..a {
            let step = arith::ipow(p, c);
            let trivial = if c == 0 {
                self.group.reps().iter().all(|x| self.eval(*x).is_one())
            } else {
                (0..self.group.modulus / step).all(|t| self.eval(1 + t * step).is_one())
            };
            if trivial {
                return c;
            }
        }
        a
    }

    /// The character on `(Z/p^c)^×` that this one factors through.
    pub fn restrict(&self, c: u32) -> IntUnitChar {
        let g = UnitGroup::get(self.group.p, c);
        IntUnitChar::from_fn(g, |x| self.eval(x))
    }
}

/// Unit part of a local multiplicative character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitPart {
    Trivial,
    /// Character of the residue field, used when the conductor is one.
    Residue(FFMultChar),
    /// Character of `(Z/p^a)^×`, used over `Q_p`.
    Integral(IntUnitChar),
}

/// A quasi-character of `F^×` of finite order on units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMultChar {
    field: LocalFieldDesc,
    conductor: u32,
    value_on_pi: RootOfUnity,
    unit: UnitPart,
}

impl LocalMultChar {
    /// Validates that `unit` has exact conductor `a`.
    pub fn new(field: LocalFieldDesc, a: u32, value_on_pi: RootOfUnity, unit: UnitPart) -> Result<Self, LocalError> {
        let actual = match &unit {
            UnitPart::Trivial => 0,
            UnitPart::Residue(chi) => {
                if chi.field().q() != field.q() || chi.field().p() != field.p {
                    return Err(LocalError::ConductorMismatch("residue character on the wrong field".into()));
                }
                u32::from(!chi.is_trivial())
            }
            UnitPart::Integral(chi) => {
                if !field.is_qp() {
                    return Err(LocalError::UnsupportedModel(format!("integral unit characters need Q_p, got {field}")));
                }
                if chi.group().p != field.p || chi.group().a != a {
                    return Err(LocalError::ConductorMismatch(format!(
                        "unit character is defined mod {}^{}, expected exponent {a}",
                        chi.group().p,
                        chi.group().a
                    )));
                }
                chi.exact_conductor()
            }
        };
        if actual != a {
            return Err(LocalError::ConductorMismatch(format!("declared conductor {a}, actual {actual}")));
        }
        Ok(LocalMultChar { field, conductor: a, value_on_pi, unit })
    }

    pub fn unramified(field: LocalFieldDesc, value_on_pi: RootOfUnity) -> Self {
        LocalMultChar { field, conductor: 0, value_on_pi, unit: UnitPart::Trivial }
    }

    pub fn trivial(field: LocalFieldDesc) -> Self {
        Self::unramified(field, RootOfUnity::one())
    }

    /// Character of conductor at most one from a residue character.
    pub fn tame(field: LocalFieldDesc, value_on_pi: RootOfUnity, chi: FFMultChar) -> Result<Self, LocalError> {
        let a = u32::from(!chi.is_trivial());
        let unit = if a == 0 { UnitPart::Trivial } else { UnitPart::Residue(chi) };
        Self::new(field, a, value_on_pi, unit)
    }

    /// Character of `Q_p^×` from a unit character of exact conductor, given
    /// modulo any power of `p`.
    pub fn over_qp(p: u64, value_on_pi: RootOfUnity, chi: &IntUnitChar) -> Self {
        let field = LocalFieldDesc::qp(p);
        let a = chi.exact_conductor();
        let unit = if a == 0 { UnitPart::Trivial } else { UnitPart::Integral(chi.restrict(a)) };
        LocalMultChar { field, conductor: a, value_on_pi, unit }
    }

    pub fn field(&self) -> &LocalFieldDesc {
        &self.field
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn value_on_pi(&self) -> RootOfUnity {
        self.value_on_pi
    }

    pub fn unit_part(&self) -> &UnitPart {
        &self.unit
    }

    pub fn is_unramified(&self) -> bool {
        self.conductor == 0
    }

    /// Value on an integer unit of `Z_p` (Q_p model) or on its residue.
    pub fn eval_unit_int(&self, u: i64) -> Result<RootOfUnity, LocalError> {
        match &self.unit {
            UnitPart::Trivial => Ok(RootOfUnity::one()),
            UnitPart::Residue(chi) => {
                if !self.field.is_qp() {
                    return Err(LocalError::UnsupportedModel("integer units need Q_p".into()));
                }
                Ok(chi.eval(chi.field().from_int(u))?)
            }
            UnitPart::Integral(chi) => {
                let m = chi.group().modulus as i64;
                Ok(chi.eval(u.rem_euclid(m) as u64))
            }
        }
    }

    /// Value on a residue-field unit, for conductor at most one.
    pub fn eval_unit_residue(&self, x: Elem) -> Result<RootOfUnity, LocalError> {
        match &self.unit {
            UnitPart::Trivial => Ok(RootOfUnity::one()),
            UnitPart::Residue(chi) => Ok(chi.eval(x)?),
            UnitPart::Integral(chi) if chi.group().a == 1 => {
                let f = self.field.residue_field()?;
                if x == 0 {
                    return Err(FieldError::ZeroArgument.into());
                }
                Ok(chi.eval(f.coeffs(x)[0]))
            }
            UnitPart::Integral(_) => Err(LocalError::UnsupportedModel("residue evaluation needs conductor ≤ 1".into())),
        }
    }

    /// `χ(x)` for `x ∈ Q_p^×`.
    pub fn eval_qp(&self, x: &PAdic) -> Result<RootOfUnity, LocalError> {
        if !self.field.is_qp() {
            return Err(LocalError::UnsupportedModel(format!("Q_p elements on {}", self.field)));
        }
        let p = self.field.p;
        let k = self.conductor.max(1);
        let u = x.unit_mod(p, k) as i64;
        Ok(self.value_on_pi.pow(x.val).mul(&self.eval_unit_int(u)?))
    }

    /// `χ(π^v ε)` for a residue-level unit `ε`.
    pub fn eval_residue(&self, v: i64, eps: Elem) -> Result<RootOfUnity, LocalError> {
        Ok(self.value_on_pi.pow(v).mul(&self.eval_unit_residue(eps)?))
    }

    /// `χ(x)` for an element in either model.
    pub fn eval(&self, x: &LocalElem) -> Result<RootOfUnity, LocalError> {
        match x {
            LocalElem::Qp(v) => self.eval_qp(v),
            LocalElem::Residue { val, unit } => self.eval_residue(*val, *unit),
        }
    }

    /// `(L, t)` with `χ(u) = ζ_L^{t[u mod p^k]}` on integer units, `k = max(a, 1)`.
    /// Only available over `Q_p`.
    pub fn unit_exponent_table(&self) -> Result<(u64, Vec<u64>), LocalError> {
        if !self.field.is_qp() {
            return Err(LocalError::UnsupportedModel(format!("integer unit tables need Q_p, got {}", self.field)));
        }
        let p = self.field.p;
        match &self.unit {
            UnitPart::Trivial => Ok((1, vec![0; p as usize])),
            UnitPart::Integral(c) => Ok(c.exponent_table()),
            UnitPart::Residue(c) => {
                let l = c.order();
                let n = p - 1;
                let mut t = vec![0u64; p as usize];
                for x in 1..p {
                    let j = c.field().dlog(x as Elem)?;
                    t[x as usize] = (c.index() * j % n) / (n / l);
                }
                Ok((l, t))
            }
        }
    }

    /// Order of the restriction to units.
    pub fn unit_order(&self) -> u64 {
        match &self.unit {
            UnitPart::Trivial => 1,
            UnitPart::Residue(c) => c.order(),
            UnitPart::Integral(c) => c.exponent_table().0,
        }
    }

    pub fn inverse(&self) -> Self {
        let unit = match &self.unit {
            UnitPart::Trivial => UnitPart::Trivial,
            UnitPart::Residue(c) => UnitPart::Residue(c.inverse()),
            UnitPart::Integral(c) => {
                let exps = c.exps().iter().zip(&c.group().gens).map(|(k, (_, o))| (o - k) % o).collect();
                UnitPart::Integral(IntUnitChar::new(c.group().clone(), exps))
            }
        };
        LocalMultChar { field: self.field, conductor: self.conductor, value_on_pi: self.value_on_pi.inv(), unit }
    }

    /// Pointwise product, with the conductor of the product recomputed exactly.
    pub fn mul(&self, other: &Self) -> Result<Self, LocalError> {
        if self.field != other.field {
            return Err(LocalError::InconsistentField("characters on different fields".into()));
        }
        let pi = self.value_on_pi.mul(&other.value_on_pi);
        let residue_only = |u: &UnitPart| !matches!(u, UnitPart::Integral(_));
        if residue_only(&self.unit) && residue_only(&other.unit) && !self.field.is_qp() {
            let f = self.field.residue_field()?;
            let idx = |u: &UnitPart| match u {
                UnitPart::Residue(c) => c.index() as i64,
                _ => 0,
            };
            let chi = FFMultChar::new(f, idx(&self.unit) + idx(&other.unit));
            return Self::tame(self.field, pi, chi);
        }
        if !self.field.is_qp() {
            return Err(LocalError::UnsupportedModel("products beyond conductor one need Q_p".into()));
        }
        let p = self.field.p;
        let big = self.conductor.max(other.conductor).max(1);
        let grp = UnitGroup::get(p, big);
        let prod = IntUnitChar::from_fn(grp, |x| {
            self.eval_unit_int(x as i64).unwrap().mul(&other.eval_unit_int(x as i64).unwrap())
        });
        Ok(Self::over_qp(p, pi, &prod))
    }

    /// Every character of `Q_p^×` with exact conductor `a` and the given value on `p`.
    pub fn all_with_conductor(p: u64, a: u32, value_on_pi: RootOfUnity) -> Vec<LocalMultChar> {
        if a == 0 {
            return vec![Self::unramified(LocalFieldDesc::qp(p), value_on_pi)];
        }
        let g = UnitGroup::get(p, a);
        IntUnitChar::all(&g)
            .into_iter()
            .filter(|c| c.exact_conductor() == a)
            .map(|c| Self::over_qp(p, value_on_pi, &c))
            .collect()
    }

    pub fn parse(s: &str, field: LocalFieldDesc) -> Result<Self, LocalError> {
        let bad = |why: &str| LocalError::Parse(format!("bad character descriptor '{s}': {why}"));
        let inner = s.trim().strip_prefix("locchi(").and_then(|t| t.strip_suffix(')')).ok_or_else(|| bad("shape"))?;
        let parts: Vec<&str> = inner.split(';').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad("expected three fields"));
        }
        let a: u32 = parts[0].parse().map_err(|_| bad("conductor"))?;
        let pi = parse_root(parts[1].strip_prefix("pi->").ok_or_else(|| bad("pi"))?).ok_or_else(|| bad("pi value"))?;
        let unit = parts[2].strip_prefix("unit->").ok_or_else(|| bad("unit"))?.trim();
        let unit = if unit == "1" {
            UnitPart::Trivial
        } else if unit.starts_with("chi(") {
            let f = field.residue_field()?;
            UnitPart::Residue(FFMultChar::parse(unit, f)?)
        } else {
            let list = unit.strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(|| bad("unit list"))?;
            let exps: Vec<u64> = if list.trim().is_empty() {
                vec![]
            } else {
                list.split(',').map(|t| t.trim().parse().map_err(|_| bad("exponent"))).collect::<Result<_, _>>()?
            };
            let g = UnitGroup::get(field.p, a);
            if exps.len() != g.gens.len() {
                return Err(bad("wrong number of generator exponents"));
            }
            UnitPart::Integral(IntUnitChar::new(g, exps))
        };
        Self::new(field, a, pi, unit)
    }
}

fn parse_root(s: &str) -> Option<RootOfUnity> {
    match s.trim() {
        "1" => Some(RootOfUnity::one()),
        "-1" => Some(RootOfUnity::minus_one()),
        "i" => Some(RootOfUnity::i()),
        "-i" => Some(RootOfUnity::i().inv()),
        t => {
            let rest = t.strip_prefix("zeta_")?;
            let (n, k) = rest.split_once('^').unwrap_or((rest, "1"));
            let n: u64 = n.parse().ok()?;
            let k: i64 = k.parse().ok()?;
            (n > 0).then(|| RootOfUnity::new(k, n))
        }
    }
}

impl fmt::Display for LocalMultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, n) = self.value_on_pi.parts();
        let unit = match &self.unit {
            UnitPart::Trivial => "1".to_string(),
            UnitPart::Residue(c) => c.to_string(),
            UnitPart::Integral(c) => {
                let e: Vec<String> = c.exps().iter().map(u64::to_string).collect();
                format!("[{}]", e.join(","))
            }
        };
        write!(f, "locchi({}; pi->zeta_{}^{}; unit->{})", self.conductor, n, k, unit)
    }
}

/// The additive character `x ↦ ψ_F(bx)` of conductor `n = ν(b) + d`.
///
/// Over `Q_p` the shift `b` is stored exactly. Over a general `F` only `ν(b)`
/// and the residue class `β` of the unit part are kept, with the convention
/// `ψ(y / π^{n+1}) = ψ_q(β·ȳ)` for integral `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalAdditiveChar {
    field: LocalFieldDesc,
    nu_b: i64,
    shift: Option<PAdic>,
    angle: Elem,
}

impl LocalAdditiveChar {
    pub fn canonical(field: LocalFieldDesc) -> Self {
        if field.is_qp() {
            return Self::qp(field.p, PAdic::one());
        }
        LocalAdditiveChar { field, nu_b: 0, shift: None, angle: 1 }
    }

    /// `x ↦ ψ_{Q_p}(bx)`.
    pub fn qp(p: u64, b: PAdic) -> Self {
        let field = LocalFieldDesc::qp(p);
        let angle = b.unit_mod(p, 1) as Elem;
        LocalAdditiveChar { field, nu_b: b.val, shift: Some(b), angle }
    }

    /// Residue-level description over a general field.
    pub fn residue(field: LocalFieldDesc, nu_b: i64, angle: Elem) -> Result<Self, LocalError> {
        if angle == 0 {
            return Err(LocalError::Parse("the residue angle must be a unit".into()));
        }
        if field.is_qp() {
            let b = PAdic::monomial(field.p, nu_b, angle as i64);
            return Ok(Self::qp(field.p, b));
        }
        Ok(LocalAdditiveChar { field, nu_b, shift: None, angle })
    }

    pub fn field(&self) -> &LocalFieldDesc {
        &self.field
    }

    pub fn conductor(&self) -> i64 {
        self.nu_b + self.field.d as i64
    }

    pub fn nu_b(&self) -> i64 {
        self.nu_b
    }

    pub fn shift(&self) -> Option<&PAdic> {
        self.shift.as_ref()
    }

    pub fn angle(&self) -> Elem {
        self.angle
    }

    /// `x ↦ ψ(bx)`.
    pub fn shifted_qp(&self, b: &PAdic) -> Result<Self, LocalError> {
        let s = self.shift.ok_or_else(|| LocalError::UnsupportedModel("exact shifts need Q_p".into()))?;
        Ok(Self::qp(self.field.p, s.mul(b)))
    }

    /// Residue-level shift by `π^v ε`.
    pub fn shifted_residue(&self, v: i64, eps: Elem) -> Result<Self, LocalError> {
        if self.field.is_qp() {
            return self.shifted_qp(&PAdic::monomial(self.field.p, v, eps as i64));
        }
        let f = self.field.residue_field()?;
        Self::residue(self.field, self.nu_b + v, f.mul(self.angle, eps))
    }

    /// `ψ(x)` for `x ∈ Q_p`.
    pub fn eval_qp(&self, x: &PAdic) -> Result<RootOfUnity, LocalError> {
        let b = self.shift.ok_or_else(|| LocalError::UnsupportedModel("exact evaluation needs Q_p".into()))?;
        Ok(psi_qp(self.field.p, &b.mul(x)))
    }
}

/// `ψ_{Q_p}(x) = e^{2πi r}` where `r ∈ Z[1/p]` and `x - r ∈ Z_p`.
pub fn psi_qp(p: u64, x: &PAdic) -> RootOfUnity {
    if x.val >= 0 {
        return RootOfUnity::one();
    }
    let k = (-x.val) as u32;
    RootOfUnity::new(x.unit_mod(p, k) as i64, arith::ipow(p, k))
}

/// A nonzero element of `F`: exact over `Q_p`, residue-level otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalElem {
    Qp(PAdic),
    /// `π^val · ε` with `ε` a residue-field unit.
    Residue { val: i64, unit: Elem },
}

impl LocalElem {
    pub fn val(&self) -> i64 {
        match self {
            LocalElem::Qp(x) => x.val,
            LocalElem::Residue { val, .. } => *val,
        }
    }
}

/// Representatives of `U_F / U_F^a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitReps {
    /// Integers in `[1, p^a)` prime to `p`.
    Integers(Vec<u64>),
    /// Nonzero residue-field elements.
    Residues(Vec<Elem>),
}

pub fn unit_quotient_reps(field: &LocalFieldDesc, a: u32) -> Result<UnitReps, LocalError> {
    if a == 0 {
        return Err(LocalError::UnsupportedModel("U/U^0 is trivial; a must be at least 1".into()));
    }
    if field.is_qp() {
        return Ok(UnitReps::Integers(UnitGroup::get(field.p, a).reps()));
    }
    if a == 1 {
        let f = field.residue_field()?;
        return Ok(UnitReps::Residues(f.units().collect()));
    }
    Err(LocalError::UnsupportedModel(format!("U/U^{a} over {field} needs ramified arithmetic")))
}

/// One of the seven quadratic characters of `Q_2^×`.
#[derive(Clone, Debug)]
pub struct Q2QuadraticEntry {
    /// `d` with the extension `Q_2(√d)`.
    pub d: i64,
    pub conductor: u32,
    pub norm_group: &'static str,
    /// Generators of the norm group modulo squares.
    pub norm_generators: &'static [i64],
    pub chi: LocalMultChar,
}

/// Square class of `x ∈ Q_2^×`: `(ν(x) mod 2, unit mod 8)`.
pub fn q2_square_class(x: &PAdic) -> (u8, u8) {
    (x.val.rem_euclid(2) as u8, x.unit_mod(2, 3) as u8)
}

fn q2_class_mul(a: (u8, u8), b: (u8, u8)) -> (u8, u8) {
    ((a.0 + b.0) % 2, ((a.1 as u32 * b.1 as u32) % 8) as u8)
}

/// The subgroup of `Q_2^×/Q_2^{×2}` generated by the given integers.
pub fn q2_class_group(gens: &[i64]) -> BTreeSet<(u8, u8)> {
    let mut set = BTreeSet::from([(0u8, 1u8)]);
    loop {
        let mut grew = false;
        for g in gens {
            let c = q2_square_class(&PAdic::from_int(2, *g));
            for x in set.clone() {
                grew |= set.insert(q2_class_mul(x, c));
            }
        }
        if !grew {
            return set;
        }
    }
}

const Q2_TABLE: [(i64, &str, &[i64]); 7] = [
    (5, "<4>xU", &[-1, 5]),
    (-1, "<2>xU^2", &[2, 5]),
    (-5, "<-2>xU^2", &[-2, 5]),
    (2, "<2>x<-1>xU^3", &[2, -1]),
    (10, "<10>x<-1>xU^3", &[10, -1]),
    (-2, "<2>x<3>xU^3", &[2, 3]),
    (-10, "<-2>x<3>xU^3", &[-2, 3]),
];

/// The seven quadratic characters `χ_1, …, χ_7` of `Q_2^×`, each trivial
/// exactly on the norm group of `Q_2(√d)`.
pub fn q2_quadratic_catalogue() -> Vec<Q2QuadraticEntry> {
    Q2_TABLE
        .iter()
        .map(|(d, desc, gens)| {
            let norms = q2_class_group(gens);
            let value = |x: &PAdic| {
                if norms.contains(&q2_square_class(x)) {
                    RootOfUnity::one()
                } else {
                    RootOfUnity::minus_one()
                }
            };
            let on_two = value(&PAdic::from_int(2, 2));
            let unit = IntUnitChar::from_fn(UnitGroup::get(2, 3), |u| value(&PAdic::from_int(2, u as i64)));
            let chi = LocalMultChar::over_qp(2, on_two, &unit);
            Q2QuadraticEntry { d: *d, conductor: chi.conductor(), norm_group: desc, norm_generators: gens, chi }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_conductor_composition() {
        assert_eq!(composed_psi_conductor(1, 0, 3), 3);
        assert_eq!(composed_psi_conductor(2, 1, 0), 1);
        assert_eq!(composed_psi_conductor(1, 0, 0), 0);
    }

    #[test]
    fn square_classes() {
        assert_eq!(square_class_order(&LocalFieldDesc::qp(3)), 4);
        assert_eq!(square_class_order(&LocalFieldDesc::qp(2)), 8);
        assert_eq!(square_class_order(&LocalFieldDesc::new(2, 2, 1, 2).unwrap()), 16);
        assert_eq!(square_class_order(&LocalFieldDesc::new(2, 1, 2, 0).unwrap()), 16);
    }

    #[test]
    fn descriptor_consistency() {
        assert!(LocalFieldDesc::new(3, 2, 1, 0).is_err());
        assert!(LocalFieldDesc::new(2, 2, 1, 1).is_err());
        let f = LocalFieldDesc::new(5, 2, 1, 1).unwrap();
        assert_eq!(LocalFieldDesc::parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn unit_reps_examples() {
        let q2 = LocalFieldDesc::qp(2);
        assert_eq!(unit_quotient_reps(&q2, 3).unwrap(), UnitReps::Integers(vec![1, 3, 5, 7]));
        assert_eq!(unit_quotient_reps(&LocalFieldDesc::qp(5), 1).unwrap(), UnitReps::Integers(vec![1, 2, 3, 4]));
        assert_eq!(
            unit_quotient_reps(&LocalFieldDesc::qp(3), 2).unwrap(),
            UnitReps::Integers(vec![1, 2, 4, 5, 7, 8])
        );
        let ram = LocalFieldDesc::new(3, 2, 1, 1).unwrap();
        assert!(matches!(unit_quotient_reps(&ram, 2), Err(LocalError::UnsupportedModel(_))));
        assert!(matches!(unit_quotient_reps(&ram, 1), Ok(UnitReps::Residues(v)) if v.len() == 2));
    }

    #[test]
    fn catalogue_entries() {
        let cat = q2_quadratic_catalogue();
        let conductors: Vec<u32> = cat.iter().map(|e| e.conductor).collect();
        assert_eq!(conductors, vec![0, 2, 2, 3, 3, 3, 3]);
        let u = |n: i64| PAdic::from_int(2, n);
        assert_eq!(cat[1].chi.eval_qp(&u(3)).unwrap(), RootOfUnity::minus_one());
        assert_eq!(cat[3].chi.eval_qp(&u(7)).unwrap(), RootOfUnity::one());
        // √-2: 2 and 3 are norms, 5 and 7 are not
        for (x, v) in [(2, 1), (3, 1), (5, -1), (7, -1)] {
            let want = if v == 1 { RootOfUnity::one() } else { RootOfUnity::minus_one() };
            assert_eq!(cat[5].chi.eval_qp(&u(x)).unwrap(), want);
        }
        for e in &cat {
            assert_eq!(q2_class_group(e.norm_generators).len(), 4, "index two for d = {}", e.d);
        }
    }

    #[test]
    fn catalogue_product_relations() {
        let c = q2_quadratic_catalogue();
        let chi = |i: usize| c[i - 1].chi.clone();
        assert_eq!(chi(1).mul(&chi(2)).unwrap(), chi(3));
        assert_eq!(chi(1).mul(&chi(4)).unwrap(), chi(5));
        assert_eq!(chi(2).mul(&chi(4)).unwrap(), chi(6));
        assert_eq!(chi(1).mul(&chi(2)).unwrap().mul(&chi(4)).unwrap(), chi(7));
    }

    #[test]
    fn descriptor_round_trip() {
        let c = q2_quadratic_catalogue();
        for e in &c {
            let s = e.chi.to_string();
            assert_eq!(LocalMultChar::parse(&s, LocalFieldDesc::qp(2)).unwrap(), e.chi, "{s}");
        }
        let f = LocalFieldDesc::new(3, 1, 2, 0).unwrap();
        let chi = LocalMultChar::tame(f, RootOfUnity::i(), FFMultChar::new(f.residue_field().unwrap(), 4)).unwrap();
        assert_eq!(LocalMultChar::parse(&chi.to_string(), f).unwrap(), chi);
    }

    #[test]
    fn additive_character_values() {
        let psi = LocalAdditiveChar::canonical(LocalFieldDesc::qp(2));
        assert_eq!(psi.eval_qp(&PAdic::from_ratio(2, 1, 4)).unwrap(), RootOfUnity::i());
        assert_eq!(psi.eval_qp(&PAdic::from_ratio(2, 3, 4)).unwrap(), RootOfUnity::i().inv());
        assert_eq!(psi.eval_qp(&PAdic::from_ratio(2, 5, 1)).unwrap(), RootOfUnity::one());
        assert_eq!(psi.conductor(), 0);
        let shifted = psi.shifted_qp(&PAdic::from_ratio(2, 1, 8)).unwrap();
        assert_eq!(shifted.conductor(), -3);
    }

    #[test]
    fn conductor_exactness_is_enforced() {
        let g = UnitGroup::get(3, 2);
        // the character of order 2 on (Z/9)^× factors through Z/3
        let quad = IntUnitChar::new(g.clone(), vec![3]);
        assert!(LocalMultChar::new(LocalFieldDesc::qp(3), 2, RootOfUnity::one(), UnitPart::Integral(quad)).is_err());
        assert_eq!(LocalMultChar::all_with_conductor(3, 2, RootOfUnity::one()).len(), 4);
        assert!(LocalMultChar::all_with_conductor(2, 1, RootOfUnity::one()).is_empty());
    }
}
