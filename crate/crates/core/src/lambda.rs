//! Langlands λ-functions `λ_{K/F}(ψ) = W(Ind_{K/F} 1, ψ)`.

use std::fmt;

use thiserror::Error;

use crate::arith;
use crate::cyclo::{RootOfUnity, ScaledCyclotomic};
use crate::epsilon::{epsilon_sum, EpsilonError};
use crate::finite_field::{gauss_sum, Elem, FFMultChar, FieldError, FqField};
use crate::group_core::{sylow2_type, FiniteGroup, GroupError, Sylow2Type};
use crate::local_field::{q2_quadratic_catalogue, LocalAdditiveChar, LocalError, LocalFieldDesc, LocalMultChar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("odd degree: use the odd-degree formula")]
    OddDegree,
    #[error("degree {0} is even")]
    EvenDegree(u64),
    #[error("p = 2 is wild")]
    WildPrime,
    #[error("open problem: {0}")]
    OpenProblem(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("not a group: {0}")]
    NotAGroup(#[from] GroupError),
    #[error(transparent)]
    Epsilon(#[from] EpsilonError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<LocalError> for LambdaError {
    fn from(e: LocalError) -> Self {
        LambdaError::Epsilon(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    GaussSum,
    EpsilonProduct,
    Classifier,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::GaussSum => "gauss_sum",
            Provenance::EpsilonProduct => "epsilon_product",
            Provenance::Classifier => "classifier",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaValue {
    pub value: ScaledCyclotomic,
    pub provenance: Provenance,
}

impl LambdaValue {
    fn new(value: ScaledCyclotomic, provenance: Provenance) -> Self {
        LambdaValue { value, provenance }
    }

    fn root(r: RootOfUnity, provenance: Provenance) -> Self {
        Self::new(r.to_scaled(), provenance)
    }

    pub fn is_fourth_root_of_unity(&self) -> bool {
        self.value.pow(4).is_ok_and(|v| v == ScaledCyclotomic::one())
    }
}

fn sign(n: i64) -> RootOfUnity {
    if n.rem_euclid(2) == 0 {
        RootOfUnity::one()
    } else {
        RootOfUnity::minus_one()
    }
}

/// `(−1)^{n(ψ)}` for an even-degree unramified extension.
pub fn lambda_unramified(_field: &LocalFieldDesc, n_psi: i64, degree: u64) -> Result<LambdaValue, LambdaError> {
    if degree % 2 == 1 {
        return Err(LambdaError::OddDegree);
    }
    Ok(LambdaValue::root(sign(n_psi), Provenance::ClosedForm))
}

/// `1` for an odd-degree Galois extension.
pub fn lambda_odd(_field: &LocalFieldDesc, degree: u64) -> Result<LambdaValue, LambdaError> {
    if degree % 2 == 0 {
        return Err(LambdaError::EvenDegree(degree));
    }
    Ok(LambdaValue::root(RootOfUnity::one(), Provenance::ClosedForm))
}

/// `(−1)^{n(ψ)}` for an even-degree Galois extension with odd ramification
/// index, assembled as `λ_odd · λ_unramified^e`.
pub fn lambda_odd_ramification(field: &LocalFieldDesc, n_psi: i64, degree: u64, e: u64) -> Result<LambdaValue, LambdaError> {
    if e % 2 == 0 || degree % e != 0 {
        return Err(LambdaError::PreconditionViolated(format!("ramification {e} in degree {degree}")));
    }
    let odd = lambda_odd(field, e)?;
    let unr = lambda_unramified(field, n_psi, degree / e)?;
    Ok(LambdaValue::new(odd.value.mul(&unr.value.pow(e as i64).expect("λ is a unit")), Provenance::ClosedForm))
}

/// Choice of additive character for the tame quadratic formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiChoice {
    /// A character of conductor −1 restricting to `ψ_q` on the integers.
    ConductorMinusOne,
    /// The canonical `ψ_F`. `trace_residue` is the residue of
    /// `Tr_{F/F_0}(pc)` for `c = π^{−1−d}`; required unless `F = Q_p`.
    Canonical { trace_residue: Option<Elem> },
}

/// `λ_{K/F}(ψ_{−1}) = (−1)^{s−1}` (`p ≡ 1 mod 4`) or `(−1)^{s−1} i^s`
/// (`p ≡ 3 mod 4`), times `Δ_{K/F}(c′)` for the canonical character.
pub fn lambda_tame_quadratic(field: &LocalFieldDesc, psi: PsiChoice) -> Result<LambdaValue, LambdaError> {
    let p = field.p;
    if p == 2 {
        return Err(LambdaError::WildPrime);
    }
    let (_, s) = arith::prime_power(field.q()).expect("residue field size is a prime power");
    let mut v = sign(s as i64 - 1);
    if p % 4 == 3 {
        v = v.mul(&RootOfUnity::i().pow(s as i64));
    }
    if let PsiChoice::Canonical { trace_residue } = psi {
        let square = match (trace_residue, field.is_qp()) {
            (Some(t), _) => {
                let k = field.residue_field()?;
                if t == 0 || t as u64 >= k.q() {
                    return Err(LambdaError::PreconditionViolated("trace residue must be a nonzero residue".into()));
                }
                k.is_square(t)
            }
            // c = p^{-1}, so Tr(pc) = 1
            (None, true) => true,
            (None, false) => {
                return Err(LambdaError::PreconditionViolated("the residue of Tr(pc) is needed off Q_p".into()));
            }
        };
        if !square {
            v = v.mul(&RootOfUnity::minus_one());
        }
    }
    Ok(LambdaValue::root(v, Provenance::ClosedForm))
}

/// `q^{−1/2}·G(quadratic, ψ_q)` on the residue field, the Gauss-sum route to
/// `λ_{K/F}(ψ_{−1})`.
pub fn lambda_tame_quadratic_gauss(field: &LocalFieldDesc) -> Result<LambdaValue, LambdaError> {
    if field.p == 2 {
        return Err(LambdaError::WildPrime);
    }
    let k = field.residue_field()?;
    let chi = FFMultChar::quadratic(k.clone()).expect("odd q has a quadratic character");
    let g = gauss_sum(&chi, 1);
    let scale = ScaledCyclotomic::new(k.q(), -1, crate::cyclo::Cyclotomic::one(1));
    Ok(LambdaValue::new(g.mul(&scale), Provenance::GaussSum))
}

/// Biquadratic `K/F` with `p` odd: `−1` if `q ≡ 1 mod 4`, else `1`.
pub fn lambda_klein4(q: u64) -> Result<LambdaValue, LambdaError> {
    let (p, _) = arith::prime_power(q).ok_or_else(|| LambdaError::PreconditionViolated(format!("{q} is not a prime power")))?;
    if p == 2 {
        return Err(LambdaError::WildPrime);
    }
    let v = if q % 4 == 1 { RootOfUnity::minus_one() } else { RootOfUnity::one() };
    Ok(LambdaValue::root(v, Provenance::ClosedForm))
}

/// Wild quadratic λ beyond `Q_2` has no formula here.
pub fn lambda_wild_quadratic(field: &LocalFieldDesc) -> Result<LambdaValue, LambdaError> {
    if field.p != 2 {
        return Err(LambdaError::PreconditionViolated("wild quadratic extensions need p = 2".into()));
    }
    if field.is_qp() {
        return Err(LambdaError::PreconditionViolated("use the Q_2 table".into()));
    }
    Err(LambdaError::OpenProblem(format!("wild quadratic λ over {field}")))
}

#[derive(Clone, Debug)]
pub struct Q2LambdaTable {
    /// `(d, λ_{Q_2(√d)/Q_2})` in catalogue order.
    pub rows: Vec<(i64, LambdaValue)>,
    pub product: ScaledCyclotomic,
}

impl Q2LambdaTable {
    pub fn product_is_one(&self) -> bool {
        self.product == ScaledCyclotomic::one()
    }
}

/// `λ_{Q_2(√d)/Q_2} = W(χ_d, ψ_{Q_2})` for the seven quadratic extensions.
pub fn lambda_q2_table() -> Result<Q2LambdaTable, LambdaError> {
    let psi = LocalAdditiveChar::canonical(LocalFieldDesc::qp(2));
    let mut rows = Vec::new();
    let mut product = ScaledCyclotomic::one();
    for entry in q2_quadratic_catalogue() {
        let w = epsilon_sum(&entry.chi, &psi, None)?.value;
        product = product.mul(&w);
        rows.push((entry.d, LambdaValue::new(w, Provenance::EpsilonProduct)));
    }
    Ok(Q2LambdaTable { rows, product })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifierCase {
    /// Trivial Sylow 2-subgroup.
    OddOrder,
    /// Nontrivial cyclic Sylow 2-subgroup.
    Exceptional { sylow_order: usize },
    /// Metacyclic, not cyclic.
    Invariant { sylow_order: usize, contains_klein: bool },
    NotMetacyclic { sylow_order: usize },
}

impl ClassifierCase {
    pub fn number(&self) -> u8 {
        match self {
            ClassifierCase::OddOrder => 1,
            ClassifierCase::Exceptional { .. } => 2,
            ClassifierCase::Invariant { .. } => 3,
            ClassifierCase::NotMetacyclic { .. } => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifierContext {
    /// Residue field size of the base field.
    pub q: u64,
    pub n_psi: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifierOutcome {
    pub case: ClassifierCase,
    pub value: Option<LambdaValue>,
    /// Unresolved expression when `value` is absent.
    pub symbolic: Option<String>,
}

/// `λ_1^G` for a Galois group `G` from the shape of its Sylow 2-subgroup.
pub fn lambda_classifier(g: &FiniteGroup, context: Option<ClassifierContext>) -> Result<ClassifierOutcome, LambdaError> {
    let one = || Some(LambdaValue::root(RootOfUnity::one(), Provenance::Classifier));
    let (t, _) = sylow2_type(g);
    let out = match t {
        Sylow2Type::Trivial => ClassifierOutcome { case: ClassifierCase::OddOrder, value: one(), symbolic: None },
        Sylow2Type::Cyclic(order) => ClassifierOutcome {
            case: ClassifierCase::Exceptional { sylow_order: order },
            value: None,
            symbolic: Some(if order >= 8 { "W(alpha)".into() } else { "c_1^G * W(alpha)".into() }),
        },
        Sylow2Type::MetacyclicNotCyclic { order, contains_klein } => {
            let case = ClassifierCase::Invariant { sylow_order: order, contains_klein };
            if !contains_klein {
                ClassifierOutcome { case, value: one(), symbolic: None }
            } else {
                match context.filter(|c| c.q % 2 == 1) {
                    Some(c) => {
                        let v = lambda_klein4(c.q)?;
                        ClassifierOutcome { case, value: Some(LambdaValue::new(v.value, Provenance::Classifier)), symbolic: None }
                    }
                    None => ClassifierOutcome { case, value: None, symbolic: Some("lambda_1^V".into()) },
                }
            }
        }
        Sylow2Type::NotMetacyclic { order, .. } => {
            ClassifierOutcome { case: ClassifierCase::NotMetacyclic { sylow_order: order }, value: one(), symbolic: None }
        }
    };
    Ok(out)
}

/// One grid point of the biquadratic identity check.
#[derive(Clone, Debug)]
pub struct IdentityRow {
    pub field: LocalFieldDesc,
    pub n_psi: i64,
    pub lambda_k: ScaledCyclotomic,
    pub lambda1: ScaledCyclotomic,
    /// The ramified value of positive sign when the two differ in sign.
    pub lambda2: ScaledCyclotomic,
    pub lambda3: ScaledCyclotomic,
    pub product_matches_klein: bool,
    pub relation_13: bool,
    pub relation_12: bool,
    pub table_row: bool,
    pub squares_match_delta: bool,
}

impl IdentityRow {
    pub fn ok(&self) -> bool {
        self.product_matches_klein && self.relation_13 && self.relation_12 && self.table_row && self.squares_match_delta
    }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub q2: Q2LambdaTable,
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn ok(&self) -> bool {
        self.q2.product_is_one() && self.rows.iter().all(IdentityRow::ok)
    }
}

fn square(x: &ScaledCyclotomic) -> ScaledCyclotomic {
    x.mul(x)
}

fn is_positive(x: &ScaledCyclotomic) -> bool {
    *x == ScaledCyclotomic::one() || *x == RootOfUnity::i().to_scaled()
}

/// The three quadratic λ's of an odd-residue field for `ψ` of conductor
/// `n_psi`, with `λ_1` from the unramified formula and `λ_2`, `λ_3` as
/// epsilon sums of the two tamely ramified quadratic characters.
pub fn biquadratic_identities(field: &LocalFieldDesc, n_psi: i64) -> Result<IdentityRow, LambdaError> {
    if field.p == 2 {
        return Err(LambdaError::WildPrime);
    }
    if field.e != 1 {
        return Err(LambdaError::PreconditionViolated("the identity grid uses unramified base fields".into()));
    }
    let k: std::sync::Arc<FqField> = field.residue_field()?;
    let q = k.q();
    let quad = FFMultChar::quadratic(k.clone()).expect("odd q");
    let psi = LocalAdditiveChar::residue(*field, n_psi - field.d as i64, 1)?;
    let lambda1 = lambda_unramified(field, n_psi, 2)?.value;
    let mut ram = Vec::new();
    let mut deltas = Vec::new();
    for s in [RootOfUnity::one(), RootOfUnity::minus_one()] {
        let chi = LocalMultChar::tame(*field, s, quad.clone())?;
        ram.push(epsilon_sum(&chi, &psi, None)?.value);
        deltas.push(chi.eval_residue(0, k.neg(1))?);
    }
    let (lambda2, lambda3) = if is_positive(&ram[1]) && !is_positive(&ram[0]) {
        (ram[1].clone(), ram[0].clone())
    } else {
        (ram[0].clone(), ram[1].clone())
    };
    let lambda_k = lambda1.mul(&lambda2).mul(&lambda3);
    let klein = lambda_klein4(q)?.value;
    let minus = ScaledCyclotomic::from_int(-1);
    let relation_13 = lambda1.mul(&lambda3) == lambda2.mul(&minus);
    let relation_12 = lambda1.mul(&lambda2) == lambda3.mul(&minus);
    let even = n_psi.rem_euclid(2) == 0;
    let one = ScaledCyclotomic::one();
    let i = RootOfUnity::i().to_scaled();
    let table_row = match (q % 4 == 1, even) {
        (true, true) => klein == minus && lambda1 == one && lambda2 == one && lambda3 == minus,
        (true, false) => klein == minus && lambda1 == minus && lambda2 == lambda3 && square(&lambda2) == one,
        (false, true) => klein == one && lambda1 == one && lambda2 == i && lambda3 == i.conj(),
        (false, false) => klein == one && lambda1 == minus && lambda2 == lambda3 && square(&lambda2) == minus,
    };
    // Δ_{L/F} is the quadratic character of L/F, and Δ(−1) is trivial for L/F unramified
    let squares_match_delta = square(&lambda1) == one
        && ram.iter().zip(&deltas).all(|(l, d)| square(&l) == d.to_scaled());
    Ok(IdentityRow {
        field: *field,
        n_psi,
        product_matches_klein: lambda_k == klein,
        lambda_k,
        lambda1,
        lambda2,
        lambda3,
        relation_13,
        relation_12,
        table_row,
        squares_match_delta,
    })
}

/// Identity suite over the `Q_2` table and an odd grid of `(q, n(ψ))`.
pub fn lambda_identity_suite(q_max: u64, n_range: std::ops::RangeInclusive<i64>) -> Result<IdentityReport, LambdaError> {
    let q2 = lambda_q2_table()?;
    let mut rows = Vec::new();
    for q in 3..=q_max {
        let Some((p, f)) = arith::prime_power(q) else { continue };
        if p == 2 {
            continue;
        }
        let field = LocalFieldDesc::new(p, 1, f, 0)?;
        for n in n_range.clone() {
            rows.push(biquadratic_identities(&field, n)?);
        }
    }
    Ok(IdentityReport { q2, rows })
}
