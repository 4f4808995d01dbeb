//! Abelian local constants `W(χ, ψ)` by the modified Gauss sum
//! `χ(c) q^{-a/2} Σ_{x ∈ U/U^a} χ^{-1}(x) ψ(x/c)` with `ν(c) = a(χ) + n(ψ)`,
//! their transformation laws, and the reduced sums of Lamprecht and Tate.

use std::fmt;

use thiserror::Error;

use crate::arith;
use crate::cyclo::{Cyclotomic, RootOfUnity, ScaledCyclotomic};
use crate::finite_field::{Elem, FFMultChar};
use crate::local_field::{LocalAdditiveChar, LocalElem, LocalError, LocalMultChar, PAdic, UnitPart};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpsilonError {
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("conductor mismatch: {0}")]
    ConductorMismatch(String),
    #[error("second character is ramified")]
    NotUnramified,
    #[error("no y with α(1+x) = ψ(yx) on the upper half of the filtration")]
    NoValidY,
    #[error("no c with χ(1+y) = ψ(y/c) on P^(a-m)")]
    NoValidC,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("exponent {0} is not a half-integer")]
    UnsupportedExponent(String),
    #[error(transparent)]
    Local(#[from] LocalError),
}

impl From<crate::finite_field::FieldError> for EpsilonError {
    fn from(e: crate::finite_field::FieldError) -> Self {
        EpsilonError::Local(e.into())
    }
}

/// Normalisation of the returned constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `W(χ, ψ)`, of absolute value one for unitary `χ`.
    W,
    /// `ε_BH(χ, s, ψ)` with `s = num/den`, `den ∈ {1, 2}`.
    BH { num: i64, den: i64 },
}

/// The element `c = π^valuation · unit` used in the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CUsed {
    pub valuation: i64,
    pub unit: LocalElem,
}

impl fmt::Display for CUsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            LocalElem::Qp(u) => {
                let unit = if u.den == 1 { u.num.to_string() } else { format!("{}/{}", u.num, u.den) };
                write!(f, "pi^{}*{}", self.valuation, unit)
            }
            LocalElem::Residue { unit, .. } => write!(f, "pi^{}*[{}]", self.valuation, unit),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonResult {
    pub value: ScaledCyclotomic,
    pub c_used: CUsed,
    pub convention: Convention,
    /// Conductor of the character.
    pub a: u32,
    /// Conductor of the additive character.
    pub n: i64,
    /// Residue field size.
    pub q: u64,
}

/// `q^{h/2} · Σ_e counts[e] ζ_N^e`, kept unreduced so that large sums can be
/// compared without building dense cyclotomic vectors.
#[derive(Clone, Debug)]
pub struct CharacterSum {
    q: u64,
    half_exp: i64,
    n: u64,
    counts: Vec<i64>,
}

impl CharacterSum {
    fn new(q: u64, half_exp: i64, n: u64) -> Self {
        CharacterSum { q, half_exp, n, counts: vec![0; n as usize] }
    }

    fn push(&mut self, e: u64) {
        self.counts[(e % self.n) as usize] += 1;
    }

    fn push_root(&mut self, r: &RootOfUnity) {
        self.push(r.exponent_in(self.n));
    }

    pub fn value(&self) -> ScaledCyclotomic {
        ScaledCyclotomic::new(self.q, self.half_exp, Cyclotomic::from_exponent_counts(self.n, &self.counts))
    }

    /// Exact equality of the two numbers.
    pub fn equals(&self, other: &CharacterSum) -> bool {
        if self.q != other.q || (self.half_exp - other.half_exp).rem_euclid(2) != 0 {
            return self.value() == other.value();
        }
        let h0 = self.half_exp.min(other.half_exp);
        let scale = |h: i64| arith::ipow(self.q, ((h - h0) / 2) as u32) as i64;
        let (s1, s2) = (scale(self.half_exp), scale(other.half_exp));
        let n = arith::lcm(self.n, other.n);
        let mut diff = vec![0i64; n as usize];
        for (e, c) in self.counts.iter().enumerate() {
            diff[e * (n / self.n) as usize] += s1 * c;
        }
        for (e, c) in other.counts.iter().enumerate() {
            diff[e * (n / other.n) as usize] -= s2 * c;
        }
        Cyclotomic::int_poly_is_zero(n, &diff)
    }
}

fn same_field(chi: &LocalMultChar, psi: &LocalAdditiveChar) -> Result<(), EpsilonError> {
    if chi.field() != psi.field() {
        return Err(EpsilonError::PreconditionViolated(format!(
            "character on {} but additive character on {}",
            chi.field(),
            psi.field()
        )));
    }
    Ok(())
}

fn qp_shift(psi: &LocalAdditiveChar) -> Result<PAdic, EpsilonError> {
    psi.shift()
        .copied()
        .ok_or_else(|| EpsilonError::UnsupportedModel("exact additive characters need Q_p".into()))
}

fn default_unit(chi: &LocalMultChar) -> LocalElem {
    if chi.field().is_qp() {
        LocalElem::Qp(PAdic::one())
    } else {
        LocalElem::Residue { val: 0, unit: 1 }
    }
}

fn residue_char(chi: &LocalMultChar) -> Result<FFMultChar, EpsilonError> {
    match chi.unit_part() {
        UnitPart::Residue(c) => Ok(c.clone()),
        UnitPart::Trivial => Ok(FFMultChar::trivial(chi.field().residue_field()?)),
        UnitPart::Integral(_) => Err(EpsilonError::UnsupportedModel("integral unit part off Q_p".into())),
    }
}

/// The sum defining `W(χ, ψ, c)` in unreduced form, with `c = π^{a+n}·u`.
pub fn epsilon_terms(
    chi: &LocalMultChar,
    psi: &LocalAdditiveChar,
    c_unit: Option<&LocalElem>,
) -> Result<(CharacterSum, CUsed), EpsilonError> {
    same_field(chi, psi)?;
    let field = *chi.field();
    let a = chi.conductor();
    let n = psi.conductor();
    let cval = a as i64 + n;
    let unit = c_unit.copied().unwrap_or_else(|| default_unit(chi));
    if unit.val() != 0 {
        return Err(EpsilonError::PreconditionViolated("c_unit must be a unit".into()));
    }
    let c_used = CUsed { valuation: cval, unit };
    let chi_c = chi.value_on_pi().pow(cval).mul(&chi.eval(&unit)?);
    if a == 0 {
        let mut s = CharacterSum::new(field.q(), 0, chi_c.order());
        s.push_root(&chi_c);
        return Ok((s, c_used));
    }
    if field.is_qp() {
        let LocalElem::Qp(u) = unit else {
            return Err(EpsilonError::PreconditionViolated("Q_p needs an integer unit for c".into()));
        };
        let p = field.p;
        let pa = arith::ipow(p, a);
        let (l, table) = chi.unit_exponent_table()?;
        let bu = qp_shift(psi)?.unit_mod(p, a);
        let uinv = u.inv().unit_mod(p, a);
        let nn = arith::lcm(arith::lcm(l, pa), chi_c.order());
        let shift = chi_c.exponent_in(nn);
        let mut s = CharacterSum::new(p, -(a as i64), nn);
        let tm = table.len() as u64;
        for x in (1..pa).filter(|x| x % p != 0) {
            let e_chi = (l - table[(x % tm) as usize]) % l;
            let e_psi = (bu as u128 * x as u128 % pa as u128 * uinv as u128 % pa as u128) as u64;
            s.push(e_chi * (nn / l) + e_psi * (nn / pa) + shift);
        }
        return Ok((s, c_used));
    }
    if a != 1 {
        return Err(EpsilonError::UnsupportedModel(format!("conductor {a} over {field}")));
    }
    let LocalElem::Residue { unit: eps, .. } = unit else {
        return Err(EpsilonError::PreconditionViolated("residue model needs a residue unit for c".into()));
    };
    let chi_res = residue_char(chi)?;
    let f = chi_res.field().clone();
    let o = chi_res.order();
    let p = field.p;
    let nn = arith::lcm(arith::lcm(o, p), chi_c.order());
    let shift = chi_c.exponent_in(nn);
    let coef = f.mul(psi.angle(), f.inv(eps)?);
    let mut s = CharacterSum::new(field.q(), -1, nn);
    for x in f.units() {
        let e_chi = chi_res.eval(x)?.inv().exponent_in(nn);
        let e_psi = f.trace(f.mul(coef, x)) * (nn / p);
        s.push(e_chi + e_psi + shift);
    }
    Ok((s, c_used))
}

/// `W(χ, ψ, c)`; the unit part of `c` defaults to one.
pub fn epsilon_sum(
    chi: &LocalMultChar,
    psi: &LocalAdditiveChar,
    c_unit: Option<&LocalElem>,
) -> Result<EpsilonResult, EpsilonError> {
    let (s, c_used) = epsilon_terms(chi, psi, c_unit)?;
    Ok(EpsilonResult {
        value: s.value(),
        c_used,
        convention: Convention::W,
        a: chi.conductor(),
        n: psi.conductor(),
        q: chi.field().q(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftReport {
    /// `W(χ, bψ)`.
    pub lhs: ScaledCyclotomic,
    /// `χ(b)·W(χ, ψ)`.
    pub rhs: ScaledCyclotomic,
    pub equal: bool,
}

/// Compares `W(χ, bψ)` with `χ(b)·W(χ, ψ)`.
pub fn check_additive_shift(chi: &LocalMultChar, psi: &LocalAdditiveChar, b: &LocalElem) -> Result<ShiftReport, EpsilonError> {
    let shifted = match b {
        LocalElem::Qp(x) => psi.shifted_qp(x)?,
        LocalElem::Residue { val, unit } => psi.shifted_residue(*val, *unit)?,
    };
    let lhs = epsilon_sum(chi, &shifted, None)?.value;
    let rhs = epsilon_sum(chi, psi, None)?.value.mul(&chi.eval(b)?.to_scaled());
    let equal = lhs == rhs;
    Ok(ShiftReport { lhs, rhs, equal })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalEquationReport {
    pub w: ScaledCyclotomic,
    pub w_inverse: ScaledCyclotomic,
    pub product: ScaledCyclotomic,
    pub chi_minus_one: RootOfUnity,
    /// `W(χ)W(χ^{-1}) = χ(-1)`.
    pub equal: bool,
    /// `W·conj(W) = 1`.
    pub unitary: bool,
}

fn minus_one(chi: &LocalMultChar) -> Result<LocalElem, EpsilonError> {
    let field = chi.field();
    if field.is_qp() {
        return Ok(LocalElem::Qp(PAdic::from_int(field.p, -1)));
    }
    let f = field.residue_field()?;
    Ok(LocalElem::Residue { val: 0, unit: f.neg(1) })
}

pub fn check_functional_equation(chi: &LocalMultChar, psi: &LocalAdditiveChar) -> Result<FunctionalEquationReport, EpsilonError> {
    let w = epsilon_sum(chi, psi, None)?.value;
    let w_inverse = epsilon_sum(&chi.inverse(), psi, None)?.value;
    let product = w.mul(&w_inverse);
    let chi_minus_one = chi.eval(&minus_one(chi)?)?;
    let equal = product == chi_minus_one.to_scaled();
    let unitary = w.mul(&w.conj()) == ScaledCyclotomic::one();
    Ok(FunctionalEquationReport { w, w_inverse, product, chi_minus_one, equal, unitary })
}

/// `W(χ₁χ₂, ψ) = χ₂(π)^{a(χ₁)+n(ψ)}·W(χ₁, ψ)` for unramified `χ₂`.
pub fn twist_unramified(chi1: &LocalMultChar, chi2: &LocalMultChar, psi: &LocalAdditiveChar) -> Result<EpsilonResult, EpsilonError> {
    if !chi2.is_unramified() {
        return Err(EpsilonError::NotUnramified);
    }
    let base = epsilon_sum(chi1, psi, None)?;
    let factor = chi2.value_on_pi().pow(chi1.conductor() as i64 + psi.conductor());
    Ok(EpsilonResult { value: base.value.mul(&factor.to_scaled()), ..base })
}

fn require_qp(chi: &LocalMultChar) -> Result<u64, EpsilonError> {
    if !chi.field().is_qp() {
        return Err(EpsilonError::UnsupportedModel(format!("needs Q_p arithmetic, got {}", chi.field())));
    }
    Ok(chi.field().p)
}

/// Units `u` modulo `p^k` in increasing order.
fn units_mod(p: u64, k: u32) -> impl Iterator<Item = u64> {
    let m = arith::ipow(p, k.max(1));
    (1..m).filter(move |u| u % p != 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeligneTwistReport {
    /// `y_{α,ψ} = u·π^{-(a(α)+n(ψ))}`.
    pub y: PAdic,
    /// `β^{-1}(y)·W(α, ψ)`.
    pub via_y: ScaledCyclotomic,
    /// `β(c)·W(α, ψ)` with `c = y^{-1}`.
    pub via_c: ScaledCyclotomic,
    /// `W(αβ, ψ)` by the full sum.
    pub direct: ScaledCyclotomic,
    pub equal: bool,
}

/// Finds `y` with `α(1+x) = ψ(yx)` for `ν(x) ≥ a(α)/2`.
pub fn find_y(alpha: &LocalMultChar, psi: &LocalAdditiveChar) -> Result<PAdic, EpsilonError> {
    let p = require_qp(alpha)?;
    let a = alpha.conductor();
    let n = psi.conductor();
    if a == 0 {
        return Ok(PAdic::monomial(p, -n, 1));
    }
    let lo = a.div_ceil(2);
    let hi = a / 2;
    let (l, table) = alpha.unit_exponent_table()?;
    let pa = arith::ipow(p, a);
    let ph = arith::ipow(p, hi);
    let step = arith::ipow(p, lo);
    let bu = qp_shift(psi)?.unit_mod(p, a);
    for u in units_mod(p, hi) {
        let ok = (0..ph).all(|t| {
            let lhs = RootOfUnity::new(table[((1 + step * t) % pa) as usize] as i64, l);
            let rhs = RootOfUnity::new((bu as u128 * u as u128 * t as u128 % ph as u128) as i64, ph);
            lhs == rhs
        });
        if ok {
            return Ok(PAdic::monomial(p, -(a as i64 + n), u as i64));
        }
    }
    Err(EpsilonError::NoValidY)
}

/// `W(αβ, ψ) = β^{-1}(y_{α,ψ})·W(α, ψ)` when `a(α) ≥ 2a(β)`.
pub fn deligne_twist(alpha: &LocalMultChar, beta: &LocalMultChar, psi: &LocalAdditiveChar) -> Result<DeligneTwistReport, EpsilonError> {
    require_qp(alpha)?;
    if alpha.conductor() < 2 * beta.conductor() {
        return Err(EpsilonError::PreconditionViolated(format!(
            "a(α) = {} < 2·a(β) = {}",
            alpha.conductor(),
            2 * beta.conductor()
        )));
    }
    let y = find_y(alpha, psi)?;
    let w_alpha = epsilon_sum(alpha, psi, None)?.value;
    let via_y = w_alpha.mul(&beta.eval_qp(&y)?.inv().to_scaled());
    let via_c = w_alpha.mul(&beta.eval_qp(&y.inv())?.to_scaled());
    let direct = epsilon_sum(&alpha.mul(beta)?, psi, None)?.value;
    let equal = via_y == direct && via_c == direct;
    Ok(DeligneTwistReport { y, via_y, via_c, direct, equal })
}

/// Finds `c` with `ν(c) = a + n(ψ)` and `χ(1+y) = ψ(y/c)` for all `y ∈ P^{a-m}`.
pub fn find_c(chi: &LocalMultChar, psi: &LocalAdditiveChar, m: u32) -> Result<PAdic, EpsilonError> {
    let p = require_qp(chi)?;
    let a = chi.conductor();
    if 2 * m > a {
        return Err(EpsilonError::PreconditionViolated(format!("2m = {} exceeds a = {a}", 2 * m)));
    }
    let n = psi.conductor();
    let cval = a as i64 + n;
    if m == 0 {
        return Ok(PAdic::monomial(p, cval, 1));
    }
    let (l, table) = chi.unit_exponent_table()?;
    let pa = arith::ipow(p, a);
    let pm = arith::ipow(p, m);
    let step = arith::ipow(p, a - m);
    let bu = qp_shift(psi)?.unit_mod(p, m);
    for u in units_mod(p, m) {
        let uinv = arith::mod_inv(u as i64, pm).expect("unit");
        let ok = (0..pm).all(|t| {
            let lhs = RootOfUnity::new(table[((1 + step * t) % pa) as usize] as i64, l);
            let rhs = RootOfUnity::new((bu as u128 * t as u128 * uinv as u128 % pm as u128) as i64, pm);
            lhs == rhs
        });
        if ok {
            return Ok(PAdic::monomial(p, cval, u as i64));
        }
    }
    Err(EpsilonError::NoValidC)
}

/// Reduced sum over `(1+P^m)/(1+P^{a-m})` in unreduced form.
pub fn lamprecht_tate_terms(chi: &LocalMultChar, psi: &LocalAdditiveChar, m: u32) -> Result<(CharacterSum, PAdic), EpsilonError> {
    same_field(chi, psi)?;
    let p = require_qp(chi)?;
    let a = chi.conductor();
    if a == 0 {
        return Err(EpsilonError::PreconditionViolated("the reduced sum needs a ramified character".into()));
    }
    let c = find_c(chi, psi, m)?;
    let (l, table) = chi.unit_exponent_table()?;
    let pa = arith::ipow(p, a);
    let bu = qp_shift(psi)?.unit_mod(p, a);
    let uinv = c.inv().unit_mod(p, a);
    let chi_c = chi.eval_qp(&c)?;
    let nn = arith::lcm(arith::lcm(l, pa), chi_c.order());
    let shift = chi_c.exponent_in(nn);
    let mut s = CharacterSum::new(p, -((a - 2 * m) as i64), nn);
    let tm = table.len() as u64;
    let mut add = |x: u64| {
        let e_chi = (l - table[(x % tm) as usize]) % l;
        let e_psi = (bu as u128 * x as u128 % pa as u128 * uinv as u128 % pa as u128) as u64;
        s.push(e_chi * (nn / l) + e_psi * (nn / pa) + shift);
    };
    if m == 0 {
        (1..pa).filter(|x| x % p != 0).for_each(&mut add);
    } else {
        let pm = arith::ipow(p, m);
        (0..arith::ipow(p, a - 2 * m)).for_each(|t| add((1 + pm * t) % pa));
    }
    Ok((s, c))
}

/// `χ(c) q^{-(a-2m)/2} Σ_{x ∈ (1+P^m)/(1+P^{a-m})} χ^{-1}(x) ψ(x/c)`.
pub fn lamprecht_tate(chi: &LocalMultChar, psi: &LocalAdditiveChar, m: u32) -> Result<EpsilonResult, EpsilonError> {
    let (s, c) = lamprecht_tate_terms(chi, psi, m)?;
    Ok(EpsilonResult {
        value: s.value(),
        c_used: CUsed { valuation: c.val, unit: LocalElem::Qp(PAdic { val: 0, ..c }) },
        convention: Convention::W,
        a: chi.conductor(),
        n: psi.conductor(),
        q: chi.field().q(),
    })
}

/// The parity closed forms: `χ(c)ψ(c^{-1})` for `a = 2d`, and for `a = 2d+1`
/// the same times `q^{-1/2} Σ_{x ∈ P^d/P^{d+1}} χ^{-1}(1+x)ψ(x/c)`.
pub fn closed_form_by_parity(chi: &LocalMultChar, psi: &LocalAdditiveChar) -> Result<(CharacterSum, PAdic), EpsilonError> {
    same_field(chi, psi)?;
    let p = require_qp(chi)?;
    let a = chi.conductor();
    if a < 2 {
        return Err(EpsilonError::PreconditionViolated("closed forms need a ≥ 2".into()));
    }
    let d = a / 2;
    let c = find_c(chi, psi, d)?;
    let pa = arith::ipow(p, a);
    let bu = qp_shift(psi)?.unit_mod(p, a);
    let uinv = c.inv().unit_mod(p, a);
    let chi_c = chi.eval_qp(&c)?;
    let psi_c = RootOfUnity::new((bu as u128 * uinv as u128 % pa as u128) as i64, pa);
    let lead = chi_c.mul(&psi_c);
    if a % 2 == 0 {
        let mut s = CharacterSum::new(p, 0, lead.order());
        s.push_root(&lead);
        return Ok((s, c));
    }
    let (l, table) = chi.unit_exponent_table()?;
    let nn = arith::lcm(arith::lcm(l, pa), lead.order());
    let shift = lead.exponent_in(nn);
    let pd = arith::ipow(p, d);
    let mut s = CharacterSum::new(p, -1, nn);
    for t in 0..p {
        let x = pd * t;
        let e_chi = (l - table[((1 + x) % pa) as usize]) % l;
        let e_psi = (bu as u128 * x as u128 % pa as u128 * uinv as u128 % pa as u128) as u64;
        s.push(e_chi * (nn / l) + e_psi * (nn / pa) + shift);
    }
    Ok((s, c))
}

/// `W / χ(c)` for even `a` and `W / (χ(c)·G(c))` for odd `a`, returned as a
/// root of unity `(k, N)`; `N` is a power of `p`.
pub fn residual_root(chi: &LocalMultChar, psi: &LocalAdditiveChar) -> Result<Option<(u64, u64)>, EpsilonError> {
    let p = require_qp(chi)?;
    let a = chi.conductor();
    let (closed, c) = closed_form_by_parity(chi, psi)?;
    let w = epsilon_sum(chi, psi, None)?.value;
    debug_assert!(closed.value() == w);
    let mut divisor = chi.eval_qp(&c)?.to_scaled();
    if a % 2 == 1 {
        let d = a / 2;
        let (l, table) = chi.unit_exponent_table()?;
        let pa = arith::ipow(p, a);
        let bu = qp_shift(psi)?.unit_mod(p, a);
        let uinv = c.inv().unit_mod(p, a);
        let pd = arith::ipow(p, d);
        let nn = arith::lcm(l, pa);
        let mut g = CharacterSum::new(p, -1, nn);
        for t in 0..p {
            let x = pd * t;
            let e_chi = (l - table[((1 + x) % pa) as usize]) % l;
            let e_psi = (bu as u128 * x as u128 % pa as u128 * uinv as u128 % pa as u128) as u64;
            g.push(e_chi * (nn / l) + e_psi * (nn / pa));
        }
        divisor = divisor.mul(&g.value());
    }
    // |divisor| = 1, so dividing is multiplying by the conjugate
    Ok(w.mul(&divisor.conj()).as_root_of_unity())
}

/// `ε_BH(χ, s, ψ) = q^{(1/2 - s)(a + n)}·W(χ, ψ)` for half-integral `s`.
pub fn convert_convention(result: &EpsilonResult, s_num: i64, s_den: i64) -> Result<EpsilonResult, EpsilonError> {
    if s_den != 1 && s_den != 2 {
        return Err(EpsilonError::UnsupportedExponent(format!("{s_num}/{s_den}")));
    }
    if result.convention != Convention::W {
        return Err(EpsilonError::PreconditionViolated("convert from the W normalisation".into()));
    }
    // (1 - 2s)·(a + n) in half-units of q
    let one_minus_2s = if s_den == 1 { 1 - 2 * s_num } else { 1 - s_num };
    let h = one_minus_2s * (result.a as i64 + result.n);
    let factor = ScaledCyclotomic::new(result.q, h, Cyclotomic::one(1));
    Ok(EpsilonResult {
        value: result.value.mul(&factor),
        convention: Convention::BH { num: s_num, den: s_den },
        ..result.clone()
    })
}

/// Residue unit `−1`, for callers that build residue-model shifts.
pub fn residue_minus_one(chi: &LocalMultChar) -> Result<Elem, EpsilonError> {
    match minus_one(chi)? {
        LocalElem::Residue { unit, .. } => Ok(unit),
        LocalElem::Qp(x) => Ok(x.unit_mod(chi.field().p, 1) as Elem),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_field::{q2_quadratic_catalogue, LocalFieldDesc};

    fn q2() -> (Vec<LocalMultChar>, LocalAdditiveChar) {
        let cat = q2_quadratic_catalogue().into_iter().map(|e| e.chi).collect();
        (cat, LocalAdditiveChar::canonical(LocalFieldDesc::qp(2)))
    }

    fn sc(r: RootOfUnity) -> ScaledCyclotomic {
        r.to_scaled()
    }

    #[test]
    fn epsilon_examples() {
        let q3 = LocalFieldDesc::qp(3);
        let psi3 = LocalAdditiveChar::canonical(q3);
        assert_eq!(epsilon_sum(&LocalMultChar::trivial(q3), &psi3, None).unwrap().value, ScaledCyclotomic::one());
        let (cat, psi) = q2();
        assert_eq!(epsilon_sum(&cat[1], &psi, None).unwrap().value, sc(RootOfUnity::i()));
        assert_eq!(epsilon_sum(&cat[3], &psi, None).unwrap().value, ScaledCyclotomic::one());
    }

    #[test]
    fn shift_examples() {
        let (cat, psi) = q2();
        let r = check_additive_shift(&cat[1], &psi, &LocalElem::Qp(PAdic::from_int(2, 2))).unwrap();
        assert!(r.equal);
        let q3 = LocalFieldDesc::qp(3);
        let chi = LocalMultChar::all_with_conductor(3, 1, RootOfUnity::one()).remove(0);
        for u in [1, 2, 4, 5, 7, 8] {
            let rep = check_additive_shift(&chi, &LocalAdditiveChar::canonical(q3), &LocalElem::Qp(PAdic::from_int(3, u)));
            assert!(rep.unwrap().equal);
        }
        let unr = LocalMultChar::unramified(q3, RootOfUnity::new(1, 3));
        let r = check_additive_shift(&unr, &LocalAdditiveChar::canonical(q3), &LocalElem::Qp(PAdic::from_int(3, 3))).unwrap();
        assert!(r.equal);
        assert_eq!(r.lhs, sc(RootOfUnity::new(1, 3)));
    }

    #[test]
    fn functional_equation_examples() {
        let q5 = LocalFieldDesc::qp(5);
        let psi5 = LocalAdditiveChar::canonical(q5);
        let quad = LocalMultChar::all_with_conductor(5, 1, RootOfUnity::one())
            .into_iter()
            .find(|c| c.unit_order() == 2)
            .unwrap();
        let r = check_functional_equation(&quad, &psi5).unwrap();
        assert!(r.equal && r.unitary);
        assert_eq!(r.chi_minus_one, RootOfUnity::one());
        let (cat, psi) = q2();
        let r = check_functional_equation(&cat[1], &psi).unwrap();
        assert!(r.equal);
        assert_eq!(r.product, ScaledCyclotomic::from_int(-1));
        let r = check_functional_equation(&LocalMultChar::trivial(q5), &psi5).unwrap();
        assert_eq!(r.product, ScaledCyclotomic::one());
    }

    #[test]
    fn unramified_twist_examples() {
        let (cat, psi) = q2();
        assert_eq!(twist_unramified(&cat[1], &cat[0], &psi).unwrap().value, sc(RootOfUnity::i()));
        assert_eq!(twist_unramified(&cat[3], &cat[0], &psi).unwrap().value, ScaledCyclotomic::from_int(-1));
        let triv = LocalMultChar::trivial(LocalFieldDesc::qp(2));
        assert_eq!(twist_unramified(&cat[5], &triv, &psi).unwrap().value, epsilon_sum(&cat[5], &psi, None).unwrap().value);
        assert_eq!(twist_unramified(&cat[0], &cat[1], &psi), Err(EpsilonError::NotUnramified));
    }

    #[test]
    fn deligne_twist_examples() {
        let (cat, psi) = q2();
        let triv = LocalMultChar::trivial(LocalFieldDesc::qp(2));
        let r = deligne_twist(&cat[1], &triv, &psi).unwrap();
        assert!(r.equal);
        let r = deligne_twist(&cat[1], &cat[0], &psi).unwrap();
        assert!(r.equal);
        assert_eq!(r.direct, twist_unramified(&cat[1], &cat[0], &psi).unwrap().value);
        let q3 = LocalFieldDesc::qp(3);
        let psi3 = LocalAdditiveChar::canonical(q3);
        let beta = LocalMultChar::all_with_conductor(3, 1, RootOfUnity::one()).remove(0);
        for alpha in LocalMultChar::all_with_conductor(3, 4, RootOfUnity::one()).iter().take(6) {
            assert!(deligne_twist(alpha, &beta, &psi3).unwrap().equal);
        }
        assert!(matches!(deligne_twist(&beta, &cat[1], &psi), Err(_)));
    }

    #[test]
    fn lamprecht_tate_examples() {
        let q3 = LocalFieldDesc::qp(3);
        let psi3 = LocalAdditiveChar::canonical(q3);
        for chi in LocalMultChar::all_with_conductor(3, 4, RootOfUnity::one()) {
            let full = epsilon_sum(&chi, &psi3, None).unwrap().value;
            assert_eq!(lamprecht_tate(&chi, &psi3, 0).unwrap().value, full);
            assert_eq!(lamprecht_tate(&chi, &psi3, 2).unwrap().value, full);
            assert_eq!(closed_form_by_parity(&chi, &psi3).unwrap().0.value(), full);
        }
        let psi2 = LocalAdditiveChar::canonical(LocalFieldDesc::qp(2));
        for chi in LocalMultChar::all_with_conductor(2, 5, RootOfUnity::one()) {
            let (full, _) = epsilon_terms(&chi, &psi2, None).unwrap();
            assert!(lamprecht_tate_terms(&chi, &psi2, 2).unwrap().0.equals(&full));
            assert!(closed_form_by_parity(&chi, &psi2).unwrap().0.equals(&full));
        }
        let chi = LocalMultChar::all_with_conductor(3, 2, RootOfUnity::one()).remove(0);
        assert!(matches!(lamprecht_tate(&chi, &psi3, 2), Err(EpsilonError::PreconditionViolated(_))));
    }

    #[test]
    fn convention_examples() {
        let (cat, psi) = q2();
        let w = epsilon_sum(&cat[1], &psi, None).unwrap();
        assert_eq!(convert_convention(&w, 1, 2).unwrap().value, w.value);
        // a + n = 2, s = 0 → q·W
        assert_eq!(convert_convention(&w, 0, 1).unwrap().value, w.value.mul(&ScaledCyclotomic::from_int(2)));
        let q3 = LocalFieldDesc::qp(3);
        let chi = LocalMultChar::all_with_conductor(3, 1, RootOfUnity::one()).remove(0);
        let w3 = epsilon_sum(&chi, &LocalAdditiveChar::canonical(q3), None).unwrap();
        assert_eq!(
            convert_convention(&w3, 1, 1).unwrap().value,
            w3.value.mul(&ScaledCyclotomic::new(3, -1, Cyclotomic::one(1)))
        );
        assert!(matches!(convert_convention(&w, 1, 3), Err(EpsilonError::UnsupportedExponent(_))));
    }

    #[test]
    fn residue_model_matches_integer_model_over_qp() {
        let q7 = LocalFieldDesc::qp(7);
        let f = q7.residue_field().unwrap();
        for k in 1..6 {
            let tame = LocalMultChar::tame(q7, RootOfUnity::one(), FFMultChar::new(f.clone(), k)).unwrap();
            let int = LocalMultChar::all_with_conductor(7, 1, RootOfUnity::one())
                .into_iter()
                .find(|c| (1..7).all(|x| c.eval_unit_int(x).unwrap() == tame.eval_unit_int(x).unwrap()))
                .unwrap();
            let psi = LocalAdditiveChar::canonical(q7);
            assert_eq!(epsilon_sum(&tame, &psi, None).unwrap().value, epsilon_sum(&int, &psi, None).unwrap().value);
        }
    }
}
