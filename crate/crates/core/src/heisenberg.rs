//! Heisenberg representations of finite groups and the arithmetic data
//! attached to U-isotropic Heisenberg representations of `G_F`.
//!
//! The group layer builds `ρ = Ind_H^G χ_H` monomially and computes `det ρ`
//! three ways: from the matrices, through the transfer, and from the
//! invariant formula `ε(g)·χ_Z(g^d)`. The arithmetic layer works at residue
//! level with `θ = χ_K∘N_{E₁/F}⁻¹` and `Δ_{E/F}` supplied as inputs.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith;
use crate::cyclo::{CycloError, Cyclotomic, RootOfUnity, ScaledCyclotomic};
use crate::epsilon::{self, EpsilonError};
use crate::finite_field::{gauss_sum, Elem, FFMultChar, FieldError, FqField};
use crate::group_core::{
    self, elementary_divisors, maximal_isotropic, AltBichar, FiniteGroup, GroupError, Subgroup,
};
use crate::lambda::LambdaValue;
use crate::local_field::{IntUnitChar, LocalAdditiveChar, LocalError, LocalFieldDesc, LocalMultChar, PAdic};

#[derive(Debug, Error)]
pub enum HeisenbergError {
    #[error("X is degenerate on G/Z; radical has {} elements", .0.len())]
    Degenerate(Vec<usize>),
    #[error("χ_Z is not G-invariant: {0}")]
    NotInvariant(String),
    #[error("χ_Z is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("commutator [{0}, {1}] lies outside Z")]
    CommutatorOutsideZ(usize, usize),
    #[error("[G:Z] = {0} is not a perfect square")]
    NotSquareIndex(usize),
    #[error("g^d ∉ Z for g = {0}")]
    GdNotInZ(usize),
    #[error("H is not a maximal isotropic subgroup containing Z")]
    NotMaximalIsotropic,
    #[error("χ_H does not extend χ_Z: {0}")]
    NotAnExtension(String),
    #[error("the induced matrices are not a representation: {0}")]
    NotARepresentation(String),
    #[error("dimension {m} is not tame for q = {q}")]
    DimensionNotTame { m: u64, q: u64 },
    #[error("missing character data: {0}")]
    MissingCharacterData(String),
    #[error("invalid character data: {0}")]
    InvalidCharacterData(String),
    #[error("inconsistent extension data: {0}")]
    InconsistentExtensionData(String),
    #[error("ratio is not a root of unity")]
    NotARoot,
    #[error("conductor {0} is below 2")]
    ConductorTooSmall(u32),
    #[error("no valid c for the Deligne condition")]
    NoValidC,
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Epsilon(#[from] EpsilonError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

type Result<T> = std::result::Result<T, HeisenbergError>;

/// A class function supported on a subgroup, indexed by element id.
pub type PartialChar = Vec<Option<RootOfUnity>>;

/// Every linear character of the subgroup `h`, in lexicographic order of the
/// exponents on an invariant-factor basis of `h/[h,h]`.
pub fn linear_characters(g: &FiniteGroup, h: &[usize]) -> Result<Vec<PartialChar>> {
    let (hg, incl) = g.subgroup_group(h)?;
    let dh = hg.derived_subgroup();
    let (ab, proj) = hg.quotient(&dh)?;
    let ed = elementary_divisors(&ab)?;
    let s = ed.factors.len();
    let mut out = Vec::new();
    let mut k = vec![0u64; s];
    loop {
        let mut values = vec![None; g.order()];
        for (i, &x) in incl.iter().enumerate() {
            let c = ed.coordinates(proj[i]);
            let v = (0..s).fold(RootOfUnity::one(), |acc, j| {
                acc.mul(&RootOfUnity::new((k[j] * c[j]) as i64, ed.factors[j]))
            });
            values[x] = Some(v);
        }
        out.push(values);
        let mut j = s;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            k[j] += 1;
            if k[j] < ed.factors[j] {
                break;
            }
            k[j] = 0;
        }
    }
}

// ---------------------------------------------------------------- datum

/// A finite group with a `G`-invariant character `χ_Z` of a normal subgroup
/// `Z` whose commutator pairing on `G/Z` is nondegenerate.
#[derive(Clone, Debug)]
pub struct HeisenbergDatum {
    name: String,
    g: Arc<FiniteGroup>,
    z: Subgroup,
    chi: PartialChar,
    gz: Arc<FiniteGroup>,
    proj: Vec<usize>,
    x: AltBichar,
    dim: usize,
    two_rank: usize,
    g2z: Subgroup,
}

impl HeisenbergDatum {
    /// `chi_z[i]` is the value on `z[i]`; `z` must be sorted.
    pub fn new(g: Arc<FiniteGroup>, z: Subgroup, chi_z: Vec<RootOfUnity>) -> Result<Self> {
        if !g.is_subgroup(&z) {
            return Err(GroupError::NotSubgroup.into());
        }
        if !g.is_normal(&z) {
            return Err(GroupError::NotNormal.into());
        }
        if chi_z.len() != z.len() {
            return Err(HeisenbergError::InvalidCharacterData(format!("{} values for |Z| = {}", chi_z.len(), z.len())));
        }
        let mut chi = vec![None; g.order()];
        for (&x, &v) in z.iter().zip(&chi_z) {
            chi[x] = Some(v);
        }
        let at = |x: usize| chi[x].expect("element of Z");
        for &a in &z {
            for &b in &z {
                if at(g.mul(a, b)) != at(a).mul(&at(b)) {
                    return Err(HeisenbergError::NotHomomorphism(format!("at ({}, {})", g.label(a), g.label(b))));
                }
            }
        }
        for s in g.elements() {
            for &a in &z {
                if at(g.conj(s, a)) != at(a) {
                    return Err(HeisenbergError::NotInvariant(format!("conjugating {} by {}", g.label(a), g.label(s))));
                }
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                if chi[g.commutator(a, b)].is_none() {
                    return Err(HeisenbergError::CommutatorOutsideZ(a, b));
                }
            }
        }
        let (gz, proj) = g.quotient(&z)?;
        let gz = Arc::new(gz);
        let mut reps = vec![usize::MAX; gz.order()];
        for x in g.elements().rev() {
            reps[proj[x]] = x;
        }
        let x = AltBichar::new(gz.clone(), |a, b| at(g.commutator(reps[a], reps[b])))?;
        for a in g.elements() {
            for b in g.elements() {
                if at(g.commutator(a, b)) != x.value(proj[a], proj[b]) {
                    return Err(HeisenbergError::NotInvariant(format!(
                        "χ_Z([{}, {}]) depends on coset representatives",
                        g.label(a),
                        g.label(b)
                    )));
                }
            }
        }
        let rad = x.radical();
        if rad.len() > 1 {
            return Err(HeisenbergError::Degenerate(rad));
        }
        let index = gz.order();
        let dim = (index as f64).sqrt().round() as usize;
        if dim * dim != index {
            return Err(HeisenbergError::NotSquareIndex(index));
        }
        let two_rank = elementary_divisors(&gz)?.two_rank;
        let mut gens: Vec<usize> = g.elements().map(|s| g.mul(s, s)).collect();
        gens.extend(&z);
        gens.sort_unstable();
        gens.dedup();
        let g2z = g.generate(&gens);
        let name = g.name().to_string();
        Ok(HeisenbergDatum { name, g, z, chi, gz, proj, x, dim, two_rank, g2z })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.g
    }

    pub fn z(&self) -> &[usize] {
        &self.z
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `rk₂(G/Z)`.
    pub fn two_rank(&self) -> usize {
        self.two_rank
    }

    pub fn chi_z(&self, x: usize) -> Option<RootOfUnity> {
        self.chi[x]
    }

    pub fn pairing(&self) -> &AltBichar {
        &self.x
    }

    pub fn quotient(&self) -> (&Arc<FiniteGroup>, &[usize]) {
        (&self.gz, &self.proj)
    }

    fn lift(&self, hbar: &[usize]) -> Subgroup {
        self.g.elements().filter(|&x| hbar.binary_search(&self.proj[x]).is_ok()).collect()
    }

    /// The preimage of the maximal isotropic subgroup chosen by
    /// `group_core::maximal_isotropic`.
    pub fn default_isotropic(&self) -> Result<Subgroup> {
        Ok(self.lift(&maximal_isotropic(&self.x, None)?))
    }

    /// Preimages of every maximal isotropic subgroup of `G/Z`.
    pub fn all_isotropic(&self) -> Vec<Subgroup> {
        self.gz
            .all_subgroups()
            .into_iter()
            .filter(|h| h.len() == self.dim && self.x.is_isotropic(h))
            .map(|h| self.lift(&h))
            .collect()
    }

    /// Every character of `h` restricting to `χ_Z`.
    pub fn extensions(&self, h: &[usize]) -> Result<Vec<PartialChar>> {
        Ok(linear_characters(&self.g, h)?
            .into_iter()
            .filter(|c| self.z.iter().all(|&x| c[x] == self.chi[x]))
            .collect())
    }

    fn check_isotropic(&self, h: &[usize]) -> Result<()> {
        let hbar: BTreeSet<usize> = h.iter().map(|&x| self.proj[x]).collect();
        let hbar: Vec<usize> = hbar.into_iter().collect();
        let ok = self.g.is_subgroup(h)
            && self.z.iter().all(|x| h.binary_search(x).is_ok())
            && hbar.len() == self.dim
            && self.x.is_isotropic(&hbar);
        if ok {
            Ok(())
        } else {
            Err(HeisenbergError::NotMaximalIsotropic)
        }
    }
}

impl fmt::Display for HeisenbergDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (|G| = {}, |Z| = {}, dim {})", self.name, self.g.order(), self.z.len(), self.dim)
    }
}

/// Data with `Z` the centre and every `χ_Z` giving a nondegenerate pairing;
/// for abelian `g` these are the linear characters with `Z = G`.
pub fn data_for_group(g: FiniteGroup) -> Result<Vec<HeisenbergDatum>> {
    let g = Arc::new(g);
    let z = g.center();
    let mut out = Vec::new();
    for (k, c) in linear_characters(&g, &z)?.into_iter().enumerate() {
        let values = z.iter().map(|&x| c[x].expect("on Z")).collect();
        match HeisenbergDatum::new(g.clone(), z.clone(), values) {
            Ok(d) => {
                let name = format!("{}/chi{k}", g.name());
                out.push(d.with_name(name));
            }
            Err(HeisenbergError::Degenerate(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// The named-group catalogue used by the oracle checks.
pub fn catalogue() -> Result<Vec<HeisenbergDatum>> {
    let groups = [
        group_core::dihedral(4)?,
        group_core::quaternion(2)?,
        group_core::heisenberg_group(3)?,
        group_core::heisenberg_group(5)?,
        group_core::extraspecial_exp_p2(3)?,
        group_core::extraspecial_exp_p2(5)?,
        group_core::direct_product(&group_core::dihedral(4)?, &group_core::cyclic(3)?)?,
        group_core::abelian(&[2, 2])?,
        group_core::cyclic(6)?,
    ];
    let mut out = Vec::new();
    for g in groups {
        out.extend(data_for_group(g)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------- monomial matrices

/// Column `i` is sent to row `perm[i]` with coefficient `entries[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    pub perm: Vec<usize>,
    pub entries: Vec<RootOfUnity>,
}

impl MonomialMatrix {
    pub fn identity(n: usize) -> Self {
        MonomialMatrix { perm: (0..n).collect(), entries: vec![RootOfUnity::one(); n] }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let entries = other.perm.iter().zip(&other.entries).map(|(&j, e)| self.entries[j].mul(e)).collect();
        MonomialMatrix { perm, entries }
    }

    pub fn sign(&self) -> RootOfUnity {
        permutation_sign(&self.perm)
    }

    pub fn det(&self) -> RootOfUnity {
        self.entries.iter().fold(self.sign(), |acc, e| acc.mul(e))
    }

    pub fn trace(&self) -> Cyclotomic {
        let diag: Vec<&RootOfUnity> = (0..self.perm.len()).filter(|&i| self.perm[i] == i).map(|i| &self.entries[i]).collect();
        let n = diag.iter().fold(1, |acc, e| arith::lcm(acc, e.order()));
        let mut counts = vec![0i64; n as usize];
        diag.iter().for_each(|e| counts[e.exponent_in(n) as usize] += 1);
        Cyclotomic::from_exponent_counts(n, &counts)
    }
}

fn permutation_sign(perm: &[usize]) -> RootOfUnity {
    let mut seen = vec![false; perm.len()];
    let mut transpositions = 0;
    for i in 0..perm.len() {
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        transpositions += len.max(1) - 1;
    }
    if transpositions % 2 == 0 {
        RootOfUnity::one()
    } else {
        RootOfUnity::minus_one()
    }
}

/// `Ind_H^G χ_H` on the least-id left transversal.
#[derive(Clone, Debug)]
pub struct MonomialRep {
    pub dim: usize,
    pub h: Subgroup,
    pub chi_h: PartialChar,
    pub transversal: Vec<usize>,
    pub gens: Vec<usize>,
    pub images: Vec<MonomialMatrix>,
    matrices: Vec<MonomialMatrix>,
}

impl MonomialRep {
    /// `ρ(x)`, assembled from generator images along a BFS word.
    pub fn matrix(&self, x: usize) -> &MonomialMatrix {
        &self.matrices[x]
    }

    pub fn trace(&self, x: usize) -> Cyclotomic {
        self.matrices[x].trace()
    }
}

fn small_generating_set(g: &FiniteGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = vec![0];
    for x in g.elements() {
        if span.len() == g.order() {
            break;
        }
        if span.binary_search(&x).is_err() {
            gens.push(x);
            span = g.generate(&gens);
        }
    }
    gens
}

fn induced_matrix(g: &FiniteGroup, in_h: &[bool], transversal: &[usize], coset_of: &[usize], chi_h: &PartialChar, x: usize) -> MonomialMatrix {
    let mut perm = Vec::with_capacity(transversal.len());
    let mut entries = Vec::with_capacity(transversal.len());
    for &t in transversal {
        let xt = g.mul(x, t);
        let j = coset_of[xt];
        let k = g.mul(g.inv(transversal[j]), xt);
        debug_assert!(in_h[k]);
        perm.push(j);
        entries.push(chi_h[k].expect("χ_H is defined on H"));
    }
    MonomialMatrix { perm, entries }
}

/// Induces `chi_h` from `h` and checks multiplicativity on the whole group.
pub fn build_rho_with(d: &HeisenbergDatum, h: &[usize], chi_h: &PartialChar) -> Result<MonomialRep> {
    d.check_isotropic(h)?;
    for &x in h {
        if chi_h[x].is_none() {
            return Err(HeisenbergError::NotAnExtension(format!("undefined at {}", d.g.label(x))));
        }
    }
    for &x in &d.z {
        if chi_h[x] != d.chi[x] {
            return Err(HeisenbergError::NotAnExtension(format!("differs from χ_Z at {}", d.g.label(x))));
        }
    }
    let g = &*d.g;
    let mut in_h = vec![false; g.order()];
    h.iter().for_each(|&x| in_h[x] = true);
    let transversal = g.left_transversal(h);
    let mut coset_of = vec![0; g.order()];
    for (j, &t) in transversal.iter().enumerate() {
        for &k in h {
            coset_of[g.mul(t, k)] = j;
        }
    }
    let gens = small_generating_set(g);
    let images: Vec<MonomialMatrix> = gens.iter().map(|&s| induced_matrix(g, &in_h, &transversal, &coset_of, chi_h, s)).collect();
    let dim = transversal.len();
    let mut matrices: Vec<Option<MonomialMatrix>> = vec![None; g.order()];
    matrices[0] = Some(MonomialMatrix::identity(dim));
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (s, img) in gens.iter().zip(&images) {
            let y = g.mul(x, *s);
            if matrices[y].is_none() {
                matrices[y] = Some(matrices[x].as_ref().unwrap().mul(img));
                queue.push_back(y);
            }
        }
    }
    let matrices: Vec<MonomialMatrix> = matrices.into_iter().map(|m| m.expect("generators span G")).collect();
    for x in g.elements() {
        for y in g.elements() {
            if matrices[x].mul(&matrices[y]) != matrices[g.mul(x, y)] {
                return Err(HeisenbergError::NotARepresentation(format!("ρ({})ρ({}) ≠ ρ(product)", g.label(x), g.label(y))));
            }
        }
    }
    let rep = MonomialRep { dim, h: h.to_vec(), chi_h: chi_h.clone(), transversal, gens, images, matrices };
    Ok(rep)
}

/// `ρ = Ind_H^G χ_H` with the default isotropic `H` and the first extension.
pub fn build_rho(d: &HeisenbergDatum) -> Result<MonomialRep> {
    let h = d.default_isotropic()?;
    let chi_h = d.extensions(&h)?.into_iter().next().ok_or_else(|| HeisenbergError::NotAnExtension("χ_Z has no extension to H".into()))?;
    build_rho_with(d, &h, &chi_h)
}

// ---------------------------------------------------------------- determinants

/// Permutation sign times the product of the entries of `ρ(x)`.
pub fn det_brute(rep: &MonomialRep, x: usize) -> RootOfUnity {
    rep.matrix(x).det()
}

/// `Δ_H^G(x)·χ_H(T_{G/H}(x))`.
pub fn gallagher_det(d: &HeisenbergDatum, h: &[usize], chi_h: &PartialChar, x: usize) -> Result<RootOfUnity> {
    d.check_isotropic(h)?;
    let g = &*d.g;
    let cosets = g.left_cosets(h);
    let mut which = vec![0; g.order()];
    for (j, c) in cosets.iter().enumerate() {
        c.iter().for_each(|&y| which[y] = j);
    }
    let perm: Vec<usize> = cosets.iter().map(|c| which[g.mul(x, c[0])]).collect();
    let t = group_core::transfer(g, h, x)?;
    let v = chi_h[t].ok_or_else(|| HeisenbergError::NotAnExtension("χ_H undefined at the transfer".into()))?;
    Ok(permutation_sign(&perm).mul(&v))
}

/// `ε(g)·χ_Z(g^d)` with `ε(g) = −1` exactly when `d` is even, `rk₂(G/Z) = 2`
/// and `g ∉ G²Z`.
pub fn det_invariant(d: &HeisenbergDatum, x: usize) -> Result<RootOfUnity> {
    let gd = d.g.pow(x, d.dim as i64);
    let v = d.chi[gd].ok_or(HeisenbergError::GdNotInZ(x))?;
    let flip = d.dim % 2 == 0 && d.two_rank == 2 && d.g2z.binary_search(&x).is_err();
    Ok(if flip { v.mul(&RootOfUnity::minus_one()) } else { v })
}

/// `0` off `Z` and `d·χ_Z` on `Z`.
pub fn expected_trace(d: &HeisenbergDatum, x: usize) -> Cyclotomic {
    match d.chi[x] {
        None => Cyclotomic::zero(1),
        Some(v) => {
            let c = v.to_cyclotomic();
            (1..d.dim).fold(c.clone(), |acc, _| acc.add(&c))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetRow {
    pub element: usize,
    pub label: String,
    pub det_brute: RootOfUnity,
    pub det_invariant: RootOfUnity,
    pub gallagher: RootOfUnity,
}

impl DetRow {
    pub fn agree(&self) -> bool {
        self.det_brute == self.det_invariant && self.det_brute == self.gallagher
    }
}

/// The three determinant routes on every element, for the default `ρ`.
pub fn det_table(d: &HeisenbergDatum) -> Result<Vec<DetRow>> {
    let rep = build_rho(d)?;
    d.g.elements()
        .map(|x| {
            Ok(DetRow {
                element: x,
                label: d.g.label(x).to_string(),
                det_brute: det_brute(&rep, x),
                det_invariant: det_invariant(d, x)?,
                gallagher: gallagher_det(d, &rep.h, &rep.chi_h, x)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatumReport {
    pub name: String,
    pub dim: usize,
    /// Pairs `(H, χ_H)` tried.
    pub choices: usize,
    pub dets_agree: bool,
    pub trace_formula: bool,
    pub independent_of_choice: bool,
}

impl DatumReport {
    pub fn ok(&self) -> bool {
        self.dets_agree && self.trace_formula && self.independent_of_choice
    }
}

/// Runs the determinant triangle and the trace formula over every maximal
/// isotropic `H` and every extension `χ_H`.
pub fn verify_datum(d: &HeisenbergDatum) -> Result<DatumReport> {
    let g = &*d.g;
    let expected: Vec<Cyclotomic> = g.elements().map(|x| expected_trace(d, x)).collect();
    let invariant: Vec<RootOfUnity> = g.elements().map(|x| det_invariant(d, x)).collect::<Result<_>>()?;
    let mut report = DatumReport {
        name: d.name.clone(),
        dim: d.dim,
        choices: 0,
        dets_agree: true,
        trace_formula: true,
        independent_of_choice: true,
    };
    let mut first: Option<Vec<Cyclotomic>> = None;
    for h in d.all_isotropic() {
        for chi_h in d.extensions(&h)? {
            let rep = build_rho_with(d, &h, &chi_h)?;
            report.choices += 1;
            let traces: Vec<Cyclotomic> = g.elements().map(|x| rep.trace(x)).collect();
            report.trace_formula &= traces == expected;
            for x in g.elements() {
                let b = det_brute(&rep, x);
                report.dets_agree &= b == invariant[x] && b == gallagher_det(d, &h, &chi_h, x)?;
            }
            match &first {
                None => first = Some(traces),
                Some(t0) => report.independent_of_choice &= *t0 == traces,
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------- U-isotropic layer

/// The character `η` of `U_F` defining `X_η`: residue level, or integral on
/// `(Z/p^a)^×` over `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaChar {
    Residue(FFMultChar),
    Integral(IntUnitChar),
}

impl EtaChar {
    pub fn eval(&self, unit: u64) -> Result<RootOfUnity> {
        match self {
            EtaChar::Residue(c) => Ok(c.eval(unit as Elem)?),
            EtaChar::Integral(c) => {
                let m = arith::ipow(c.group().p, c.group().a);
                if unit % c.group().p == 0 {
                    return Err(HeisenbergError::UnsupportedModel(format!("{unit} is not a unit mod {m}")));
                }
                Ok(c.eval(unit % m))
            }
        }
    }

    pub fn order(&self) -> u64 {
        match self {
            EtaChar::Residue(c) => c.order(),
            EtaChar::Integral(c) => c.group().reps().iter().fold(1, |acc, &u| arith::lcm(acc, c.eval(u).order())),
        }
    }

    pub fn conductor(&self) -> u32 {
        match self {
            EtaChar::Residue(c) => u32::from(!c.is_trivial()),
            EtaChar::Integral(c) => c.exact_conductor(),
        }
    }

    /// Representatives of the unit group the character lives on.
    pub fn units(&self) -> Vec<u64> {
        match self {
            EtaChar::Residue(c) => c.field().units().map(u64::from).collect(),
            EtaChar::Integral(c) => c.group().reps(),
        }
    }

    fn unit_mul(&self, a: u64, b: u64) -> u64 {
        match self {
            EtaChar::Residue(c) => u64::from(c.field().mul(a as Elem, b as Elem)),
            EtaChar::Integral(c) => {
                let m = arith::ipow(c.group().p, c.group().a);
                (a as u128 * b as u128 % m as u128) as u64
            }
        }
    }

    fn unit_pow(&self, a: u64, e: i64) -> Result<u64> {
        let base = if e < 0 { self.unit_inv(a)? } else { a };
        Ok((0..e.unsigned_abs()).fold(1, |acc, _| self.unit_mul(acc, base)))
    }

    fn unit_inv(&self, a: u64) -> Result<u64> {
        match self {
            EtaChar::Residue(c) => Ok(u64::from(c.field().inv(a as Elem)?)),
            EtaChar::Integral(c) => {
                let m = arith::ipow(c.group().p, c.group().a);
                arith::mod_inv(a as i64, m).ok_or_else(|| HeisenbergError::UnsupportedModel(format!("{a} is not a unit")))
            }
        }
    }
}

/// `π_F^a·ε` with `ε` in the unit model of the datum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FElt {
    pub val: i64,
    pub unit: u64,
}

impl FElt {
    pub fn new(val: i64, unit: u64) -> Self {
        FElt { val, unit }
    }
}

/// Residue-level data of a U-isotropic Heisenberg representation.
#[derive(Clone, Debug)]
pub struct UIsotropicDatum {
    pub field: LocalFieldDesc,
    pub eta: EtaChar,
    /// `χ_K∘N_{E₁/F}⁻¹` on `k_F^×`.
    pub theta: Option<FFMultChar>,
    /// `Δ_{E/F}(π_F)`.
    pub delta_pi: RootOfUnity,
    /// `det ρ(π_F)`.
    pub det_pi: Option<RootOfUnity>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalDescriptor {
    /// `Rad(X_η) = ⟨π^{pi_exponent}⟩ × Ker η`.
    pub pi_exponent: u64,
    pub kernel: Vec<u64>,
    /// `[F^× : Rad] = (#η)²`.
    pub index: u64,
}

impl UIsotropicDatum {
    pub fn new(field: LocalFieldDesc, eta: EtaChar) -> Result<Self> {
        match &eta {
            EtaChar::Residue(c) if c.field().q() != field.q() => {
                return Err(HeisenbergError::InvalidCharacterData("η lives on the wrong residue field".into()));
            }
            EtaChar::Integral(c) if !field.is_qp() || c.group().p != field.p => {
                return Err(HeisenbergError::UnsupportedModel("integral η needs Q_p".into()));
            }
            _ => {}
        }
        Ok(UIsotropicDatum { field, eta, theta: None, delta_pi: RootOfUnity::one(), det_pi: None })
    }

    /// Adds the data consumed by the minimal-conductor formula.
    pub fn with_minimal_data(mut self, theta: FFMultChar, delta_pi: RootOfUnity, det_pi: RootOfUnity) -> Result<Self> {
        if theta.field().q() != self.field.q() {
            return Err(HeisenbergError::InvalidCharacterData("θ lives on the wrong residue field".into()));
        }
        if theta.is_trivial() {
            return Err(HeisenbergError::InvalidCharacterData("θ must be ramified: a(χ_K) = 1 at minimal conductor".into()));
        }
        if !delta_pi.pow(2).is_one() {
            return Err(HeisenbergError::InvalidCharacterData(format!("Δ(π) = {delta_pi} is not ±1")));
        }
        self.theta = Some(theta);
        self.delta_pi = delta_pi;
        self.det_pi = Some(det_pi);
        Ok(self)
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    /// `m = #η`.
    pub fn m(&self) -> u64 {
        self.eta.order()
    }

    pub fn dim(&self) -> u64 {
        self.m()
    }

    /// `X_η(π^a ε₁, π^b ε₂) = η(ε₁)^b·η(ε₂)^{−a}`.
    pub fn x_eta_eval(&self, x: FElt, y: FElt) -> Result<RootOfUnity> {
        Ok(self.eta.eval(x.unit)?.pow(y.val).mul(&self.eta.eval(y.unit)?.pow(-x.val)))
    }

    pub fn radical_descriptor(&self) -> Result<RadicalDescriptor> {
        let m = self.m();
        let mut kernel = Vec::new();
        for u in self.eta.units() {
            if self.eta.eval(u)?.is_one() {
                kernel.push(u);
            }
        }
        Ok(RadicalDescriptor { pi_exponent: m, kernel, index: m * m })
    }

    /// The radical of `X_η` on `F^×/⟨π^N⟩U^{a(η)}` computed by enumeration, with
    /// `X` evaluated in coordinates for the uniformizer `π·u`, and returned in
    /// `π`-coordinates.
    pub fn radical_brute(&self, n: u64, u: u64) -> Result<BTreeSet<FElt>> {
        let units = self.eta.units();
        let elts: Vec<FElt> = (0..n as i64).flat_map(|a| units.iter().map(move |&e| FElt::new(a, e))).collect();
        let mut recoord = Vec::with_capacity(elts.len());
        for x in &elts {
            recoord.push(FElt::new(x.val, self.eta.unit_mul(x.unit, self.eta.unit_pow(u, -x.val)?)));
        }
        let mut rad = BTreeSet::new();
        for (i, x) in elts.iter().enumerate() {
            let mut inside = true;
            for y in &recoord {
                if !self.x_eta_eval(recoord[i], *y)?.is_one() {
                    inside = false;
                    break;
                }
            }
            if inside {
                rad.insert(*x);
            }
        }
        Ok(rad)
    }

    /// `Δ_{E/F}` on units: quadratic when `m` is even, trivial when odd.
    pub fn delta_unit(&self, eps: Elem) -> Result<RootOfUnity> {
        let f = self.field.residue_field()?;
        if self.m() % 2 == 1 {
            return Ok(RootOfUnity::one());
        }
        let quad = FFMultChar::quadratic(f).ok_or_else(|| HeisenbergError::UnsupportedModel("no quadratic character in characteristic 2".into()))?;
        Ok(quad.eval(eps)?)
    }

    /// `Δ_{E/F}(π^v ε)`.
    pub fn delta(&self, v: i64, eps: Elem) -> Result<RootOfUnity> {
        Ok(self.delta_pi.pow(v).mul(&self.delta_unit(eps)?))
    }

    /// `det ρ(π^v ε) = det ρ(π)^v·Δ(ε)·θ(ε)`.
    pub fn det_rho(&self, v: i64, eps: Elem) -> Result<RootOfUnity> {
        let (theta, det_pi) = self.minimal_data()?;
        Ok(det_pi.pow(v).mul(&self.delta_unit(eps)?).mul(&theta.eval(eps)?))
    }

    fn minimal_data(&self) -> Result<(&FFMultChar, RootOfUnity)> {
        match (&self.theta, self.det_pi) {
            (Some(t), Some(d)) => Ok((t, d)),
            _ => Err(HeisenbergError::MissingCharacterData("θ and det ρ(π) are required".into())),
        }
    }
}

// ---------------------------------------------------------------- conductors

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtensionData {
    pub d_ef: u32,
    pub d_kf: u32,
    pub f_e1f: u32,
}

impl ExtensionData {
    /// Tamely ramified data for `m` prime to `p`.
    pub fn tame(m: u32) -> Self {
        ExtensionData { d_ef: m - 1, d_kf: m - 1, f_e1f: m }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conductors {
    pub sw: i64,
    pub a_rho: i64,
    pub a_chi_e: i64,
    pub a_chi_e1: i64,
    pub a_chi_k: i64,
    /// `f_{E/F}·(d_{E/F} + a_E(χ_E))`.
    pub via_e: i64,
    /// `f_{E₁/F}·a_{E₁}(χ_{E₁})`.
    pub via_e1: i64,
    /// `f_{K/F}·(d_{K/F} + a_K(χ_K)) / m`.
    pub via_k: i64,
}

impl Conductors {
    pub fn routes_agree(&self) -> bool {
        self.via_e == self.a_rho && self.via_e1 == self.a_rho && self.via_k == self.a_rho
    }
}

pub fn conductors_from(m: u64, a_eta: u32, p: u64, ext: ExtensionData) -> Result<Conductors> {
    let bad = |s: String| Err(HeisenbergError::InconsistentExtensionData(s));
    if a_eta == 0 || m == 0 {
        return bad(format!("a(η) = {a_eta}, m = {m}"));
    }
    if ext.d_ef != ext.d_kf {
        return bad(format!("d_E/F = {} ≠ d_K/F = {}", ext.d_ef, ext.d_kf));
    }
    if ext.f_e1f as u64 != m {
        return bad(format!("f_E1/F = {} but m = {m}", ext.f_e1f));
    }
    if m % p != 0 {
        if ext.d_ef as u64 != m - 1 {
            return bad(format!("tame degree {m} forces d = {}, got {}", m - 1, ext.d_ef));
        }
    } else if (ext.d_ef as u64) < m {
        return bad(format!("wild degree {m} needs d ≥ {m}, got {}", ext.d_ef));
    }
    let (m, a) = (m as i64, a_eta as i64);
    let (d_ef, d_kf) = (ext.d_ef as i64, ext.d_kf as i64);
    let a_rho = m * a;
    let a_chi_e = m * a - d_ef;
    let a_chi_e1 = a;
    let a_chi_k = m * a - d_kf;
    Ok(Conductors {
        sw: m * (a - 1),
        a_rho,
        a_chi_e,
        a_chi_e1,
        a_chi_k,
        via_e: d_ef + a_chi_e,
        via_e1: ext.f_e1f as i64 * a_chi_e1,
        via_k: m * (d_kf + a_chi_k) / m,
    })
}

pub fn conductors(u: &UIsotropicDatum, ext: ExtensionData) -> Result<Conductors> {
    conductors_from(u.m(), u.eta.conductor(), u.field.p, ext)
}

/// `a(ρ₀⊗χ_F) = dim·max(a(χ_F), a(ρ₀)/dim)`.
pub fn twisted_conductor(dim: u64, a_rho0: u64, a_chi_f: u64) -> u64 {
    (dim * a_chi_f).max(a_rho0)
}

/// Whether `dim | a_F(ρ)` is predicted: `X` is U-isotropic or `ρ` is not of
/// minimal conductor.
pub fn dimension_divides_conductor(u_isotropic: bool, minimal: bool) -> bool {
    u_isotropic || !minimal
}

// ---------------------------------------------------------------- minimal conductor W

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalW {
    pub c_val: i64,
    pub c_unit: Elem,
    pub r: ScaledCyclotomic,
    pub l: ScaledCyclotomic,
    pub w: ScaledCyclotomic,
    /// `L` recomputed from `G(θ⁻¹)` by substitution.
    pub l_via_gauss: ScaledCyclotomic,
}

fn tame_residue(u: &UIsotropicDatum) -> Result<Arc<FqField>> {
    let m = u.m();
    let q = u.q();
    if m % u.field.p == 0 || (q - 1) % m != 0 {
        return Err(HeisenbergError::DimensionNotTame { m, q });
    }
    Ok(u.field.residue_field()?)
}

/// `W(ρ, ψ) = R(ψ, c)·L(ψ, c)` with `c = π^{1+n(ψ)}·c_unit`.
pub fn minimal_w(u: &UIsotropicDatum, psi: &LocalAdditiveChar, c_unit: Elem, lambda_ef: &LambdaValue) -> Result<MinimalW> {
    let f = tame_residue(u)?;
    let (theta, _) = u.minimal_data()?;
    if psi.field() != &u.field {
        return Err(HeisenbergError::InvalidCharacterData("ψ lives on another field".into()));
    }
    let c_val = 1 + psi.conductor();
    let det_c = u.det_rho(c_val, c_unit)?;
    let b = f.mul(f.mul(psi.angle(), f.from_int(u.m() as i64)), f.inv(c_unit)?);
    let p = f.p();
    let n = arith::lcm(arith::lcm(theta.order(), p), det_c.order());
    let mut counts = vec![0i64; n as usize];
    let shift = det_c.exponent_in(n);
    for x in f.units() {
        let e = theta.eval(x)?.inv().exponent_in(n) + f.trace(f.mul(b, x)) * (n / p) + shift;
        counts[(e % n) as usize] += 1;
    }
    let l = ScaledCyclotomic::new(u.q(), -1, Cyclotomic::from_exponent_counts(n, &counts));
    let g = gauss_sum(&theta.inverse(), f.one());
    let l_via_gauss = g
        .mul(&theta.eval(b)?.mul(&det_c).to_scaled())
        .mul(&ScaledCyclotomic::new(u.q(), -1, Cyclotomic::one(1)));
    let r = lambda_ef.value.mul(&u.delta(c_val, c_unit)?.to_scaled());
    let w = r.mul(&l);
    Ok(MinimalW { c_val, c_unit, r, l, w, l_via_gauss })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CInvariance {
    pub units_checked: usize,
    pub l_rule: bool,
    pub r_rule: bool,
    pub w_invariant: bool,
    pub gauss_route: bool,
}

impl CInvariance {
    pub fn ok(&self) -> bool {
        self.l_rule && self.r_rule && self.w_invariant && self.gauss_route
    }
}

/// Checks `L(εc) = Δ(ε)L(c)`, `R(εc) = Δ(ε)R(c)` and `W(εc) = W(c)` over all
/// residue units `ε`.
pub fn check_c_invariance(u: &UIsotropicDatum, psi: &LocalAdditiveChar, lambda_ef: &LambdaValue) -> Result<CInvariance> {
    let f = tame_residue(u)?;
    let base = minimal_w(u, psi, f.one(), lambda_ef)?;
    let mut out = CInvariance { units_checked: 0, l_rule: true, r_rule: true, w_invariant: true, gauss_route: true };
    for eps in f.units() {
        let cur = minimal_w(u, psi, eps, lambda_ef)?;
        let d = u.delta_unit(eps)?.to_scaled();
        out.units_checked += 1;
        out.l_rule &= cur.l == base.l.mul(&d);
        out.r_rule &= cur.r == base.r.mul(&d);
        out.w_invariant &= cur.w == base.w;
        out.gauss_route &= cur.l == cur.l_via_gauss;
    }
    Ok(out)
}

// ---------------------------------------------------------------- invariant formula

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCheck {
    /// `candidate^d / W(χ_K, ψ_K)`.
    pub power_ratio: RootOfUnity,
    /// `d` for odd `d`, `lcm(4, d)` for even `d`.
    pub modulus: u64,
    pub consistent: bool,
}

/// `candidate^d = λ_{K/F}·W(χ_K)` exactly for odd `d`, and up to `μ_4` for
/// even `d`.
pub fn invariant_mod_roots(w_chi_k: &ScaledCyclotomic, d: u64, lambda_kf: &LambdaValue, candidate: &ScaledCyclotomic) -> Result<InvariantCheck> {
    let ratio = candidate.pow(d as i64)?.div(w_chi_k)?;
    let (k, n) = ratio.as_root_of_unity().ok_or(HeisenbergError::NotARoot)?;
    let power_ratio = RootOfUnity::new(k as i64, n);
    let (modulus, consistent) = if d % 2 == 1 {
        (d, power_ratio.to_scaled() == lambda_kf.value)
    } else {
        (arith::lcm(4, d), power_ratio.pow(4).is_one())
    };
    Ok(InvariantCheck { power_ratio, modulus, consistent })
}

/// `candidate / root` as a root of unity, and whether it lies in `μ_modulus`.
pub fn coset_ratio(candidate: &ScaledCyclotomic, root: &ScaledCyclotomic, modulus: u64) -> Result<(RootOfUnity, bool)> {
    let (k, n) = candidate.div(root)?.as_root_of_unity().ok_or(HeisenbergError::NotARoot)?;
    let r = RootOfUnity::new(k as i64, n);
    Ok((r, modulus % r.order() == 0))
}

// ---------------------------------------------------------------- Deligne–Henniart

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeligneHenniart {
    pub c: PAdic,
    pub w_chi_f: ScaledCyclotomic,
    /// `W(χ_F, ψ)^m·det ρ₀(c)`.
    pub value: ScaledCyclotomic,
}

pub fn deligne_henniart_w(chi_f: &LocalMultChar, m: u64, det_rho0_at_c: RootOfUnity, psi: &LocalAdditiveChar) -> Result<DeligneHenniart> {
    let a = chi_f.conductor();
    if a < 2 {
        return Err(HeisenbergError::ConductorTooSmall(a));
    }
    let y = epsilon::find_y(chi_f, psi).map_err(|e| match e {
        EpsilonError::NoValidY => HeisenbergError::NoValidC,
        e => e.into(),
    })?;
    let w_chi_f = epsilon::epsilon_sum(chi_f, psi, None)?.value;
    let value = w_chi_f.pow(m as i64)?.mul(&det_rho0_at_c.to_scaled());
    Ok(DeligneHenniart { c: y.inv(), w_chi_f, value })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistInvarianceRow {
    pub chi: LocalMultChar,
    /// `W(χχ_F, ψ)^m` by the full sum.
    pub lhs: ScaledCyclotomic,
    /// `χ(c)^m·W(χ_F, ψ)^m`.
    pub rhs: ScaledCyclotomic,
}

impl TwistInvarianceRow {
    pub fn equal(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `W(χχ_F, ψ)^m` against `W(χ_F, ψ)^m` for every tame `χ` of `Q_p^×` with
/// `χ^m = 1`.
pub fn twist_invariance(chi_f: &LocalMultChar, m: u64, psi: &LocalAdditiveChar) -> Result<Vec<TwistInvarianceRow>> {
    let field = *chi_f.field();
    if !field.is_qp() {
        return Err(HeisenbergError::UnsupportedModel("twist invariance runs over Q_p".into()));
    }
    let dh = deligne_henniart_w(chi_f, m, RootOfUnity::one(), psi)?;
    let f = field.residue_field()?;
    let mut rows = Vec::new();
    for k in 0..m {
        let pi_val = RootOfUnity::new(k as i64, m);
        for unit in FFMultChar::all(&f).into_iter().filter(|c| m % c.order() == 0) {
            let chi = LocalMultChar::tame(field, pi_val, unit)?;
            let lhs = epsilon::epsilon_sum(&chi_f.mul(&chi)?, psi, None)?.value.pow(m as i64)?;
            let rhs = dh.w_chi_f.pow(m as i64)?.mul(&chi.eval_qp(&dh.c)?.pow(m as i64).to_scaled());
            rows.push(TwistInvarianceRow { chi, lhs, rhs });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------- dimension gates

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimGate {
    pub p_part: u64,
    pub tame_part: u64,
    /// `d′ | q − 1`.
    pub tame_divides: bool,
    /// `dim | q − 1`.
    pub divides: bool,
}

pub fn dim_gate(q: u64, dim: u64) -> Result<DimGate> {
    let (p, _) = arith::prime_power(q).ok_or_else(|| HeisenbergError::UnsupportedModel(format!("{q} is not a prime power")))?;
    if dim == 0 {
        return Err(HeisenbergError::InvalidCharacterData("dimension 0".into()));
    }
    let p_part = arith::ipow(p, arith::valuation(dim, p));
    let tame_part = dim / p_part;
    Ok(DimGate { p_part, tame_part, tame_divides: (q - 1) % tame_part == 0, divides: (q - 1) % dim == 0 })
}

/// `m_{q−1} = ∏_{l | m} l^{ν_l(q−1)}`.
pub fn m_q_minus_one(m: u64, q: u64) -> u64 {
    arith::prime_divisors(m).into_iter().map(|l| arith::ipow(l, arith::valuation(q - 1, l))).product()
}
