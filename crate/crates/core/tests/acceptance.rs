//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or exceeds its time limit.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use locon_core::arith;
use locon_core::cyclo::{RootOfUnity, ScaledCyclotomic};
use locon_core::epsilon::{self, closed_form_by_parity, epsilon_terms, lamprecht_tate_terms};
use locon_core::finite_field::{gauss_sum, lift_and_check_davenport_hasse, quadratic_gauss_closed_form, FFMultChar, FqField};
use locon_core::group_core::{
    self, bicyclic_counts, miller_product, transfer_with_transversal, DecomposedTransfer, FiniteGroup,
};
use locon_core::heisenberg::{
    self, catalogue, check_c_invariance, conductors_from, dim_gate, invariant_mod_roots, minimal_w, verify_datum,
    EtaChar, ExtensionData, FElt, UIsotropicDatum,
};
use locon_core::lambda::{self, LambdaValue, PsiChoice, Provenance};
use locon_core::local_field::{LocalAdditiveChar, LocalFieldDesc, LocalMultChar, PAdic};

const LIMIT_Q2_TABLE: Duration = Duration::from_secs(1);
const LIMIT_GAUSS: Duration = Duration::from_secs(30);
const LIMIT_DAVENPORT_HASSE: Duration = Duration::from_secs(60);
const LIMIT_DETERMINANTS: Duration = Duration::from_secs(10);

const GAUSS_Q_MAX: u64 = 2000;
const DH_Q_POWER_MAX: u64 = 3000;
const FE_PRIMES: [u64; 3] = [2, 3, 5];
const FE_CONDUCTOR_MAX: u32 = 4;
const LT_CONDUCTOR_MAX: u32 = 6;
const TAME_Q_MAX: u64 = 1000;
const IDENTITY_Q_MAX: u64 = 1000;
const BICYCLIC_M_MAX: u64 = 12;
const MILLER_ORDER_MAX: usize = 64;
const POWER_IDENTITY_N_MAX: i64 = 12;
const U_ISOTROPIC_Q_MAX: u64 = 13;
const GATE_Q_MAX: u64 = 64;
const GATE_DIM_MAX: u64 = 16;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn odd_prime_powers(max: u64) -> impl Iterator<Item = (u64, u64, u32)> {
    (3..=max).filter_map(|q| arith::prime_power(q).filter(|(p, _)| *p != 2).map(|(p, s)| (q, p, s)))
}

fn local_field(p: u64, f: u32) -> LocalFieldDesc {
    if f == 1 {
        LocalFieldDesc::qp(p)
    } else {
        LocalFieldDesc::new(p, 1, f, 0).expect("unramified field")
    }
}

// ---------------------------------------------------------------- 1

fn q2_table() -> Outcome {
    let expected = [
        (5, RootOfUnity::one()),
        (-1, RootOfUnity::i()),
        (-5, RootOfUnity::i()),
        (2, RootOfUnity::one()),
        (10, RootOfUnity::minus_one()),
        (-2, RootOfUnity::i()),
        (-10, RootOfUnity::i().inv()),
    ];
    let t = lambda::lambda_q2_table().map_err(|e| e.to_string())?;
    ensure(t.rows.len() == 7, || format!("{} rows", t.rows.len()))?;
    for ((d, v), (d0, want)) in t.rows.iter().zip(expected) {
        ensure(*d == d0 && v.value == want.to_scaled(), || format!("d = {d}: got {}, want {want}", v.value.human()))?;
    }
    ensure(t.product_is_one(), || format!("product {}", t.product.human()))?;
    Ok("seven rows exact, product = 1".into())
}

// ---------------------------------------------------------------- 2

fn gauss_closed_form() -> Outcome {
    let mut n = 0;
    for (q, p, s) in odd_prime_powers(GAUSS_Q_MAX) {
        let f = FqField::new(p, s).map_err(|e| e.to_string())?;
        let g = gauss_sum(&FFMultChar::quadratic(f.clone()).expect("odd q"), f.one());
        let c = quadratic_gauss_closed_form(p, s).map_err(|e| e.to_string())?;
        ensure(g == c, || format!("q = {q}: {} vs {}", g.human(), c.human()))?;
        n += 1;
    }
    Ok(format!("{n} odd prime powers q ≤ {GAUSS_Q_MAX}"))
}

// ---------------------------------------------------------------- 3

fn davenport_hasse() -> Outcome {
    let mut n = 0;
    for q in 2..=DH_Q_POWER_MAX {
        let Some((p, s0)) = arith::prime_power(q) else { continue };
        let f = FqField::new(p, s0).map_err(|e| e.to_string())?;
        let mut s = 2;
        while q.pow(s) <= DH_Q_POWER_MAX {
            for chi in FFMultChar::all(&f) {
                let r = lift_and_check_davenport_hasse(&chi, f.one(), s).map_err(|e| e.to_string())?;
                ensure(r.equal, || format!("q = {q}, s = {s}, χ = {chi}"))?;
                n += 1;
            }
            s += 1;
        }
    }
    Ok(format!("{n} (χ, s) pairs with q^s ≤ {DH_Q_POWER_MAX}"))
}

// ---------------------------------------------------------------- 4

fn functional_equation() -> Outcome {
    let mut n = 0;
    for p in FE_PRIMES {
        let psis = [
            LocalAdditiveChar::canonical(LocalFieldDesc::qp(p)),
            LocalAdditiveChar::qp(p, PAdic::monomial(p, -1, -1)),
            LocalAdditiveChar::qp(p, PAdic::monomial(p, 2, 1)),
        ];
        for a in 0..=FE_CONDUCTOR_MAX {
            for pi_val in [RootOfUnity::one(), RootOfUnity::i()] {
                for chi in LocalMultChar::all_with_conductor(p, a, pi_val) {
                    for psi in &psis {
                        let r = epsilon::check_functional_equation(&chi, psi).map_err(|e| e.to_string())?;
                        ensure(r.equal && r.unitary, || format!("p = {p}, a = {a}, χ = {chi}"))?;
                        n += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{n} (χ, ψ) pairs, p ∈ {{2,3,5}}, a ≤ {FE_CONDUCTOR_MAX}"))
}

// ---------------------------------------------------------------- 5

fn lamprecht_tate() -> Outcome {
    let (mut sums, mut closed) = (0, 0);
    for p in FE_PRIMES {
        let psi = LocalAdditiveChar::canonical(LocalFieldDesc::qp(p));
        for a in 1..=LT_CONDUCTOR_MAX {
            for chi in LocalMultChar::all_with_conductor(p, a, RootOfUnity::one()) {
                let (full, _) = epsilon_terms(&chi, &psi, None).map_err(|e| e.to_string())?;
                for m in 0..=a / 2 {
                    let (reduced, _) = lamprecht_tate_terms(&chi, &psi, m).map_err(|e| e.to_string())?;
                    ensure(reduced.equals(&full), || format!("p = {p}, a = {a}, m = {m}"))?;
                    sums += 1;
                }
                if a >= 2 {
                    let (c, _) = closed_form_by_parity(&chi, &psi).map_err(|e| e.to_string())?;
                    ensure(c.equals(&full), || format!("closed form, p = {p}, a = {a}"))?;
                    closed += 1;
                }
            }
        }
    }
    Ok(format!("{sums} reduced sums, {closed} closed forms (a ≤ {LT_CONDUCTOR_MAX})"))
}

// ---------------------------------------------------------------- 6

fn tame_lambda() -> Outcome {
    let mut n = 0;
    for (q, p, s) in odd_prime_powers(TAME_Q_MAX) {
        let field = local_field(p, s);
        let closed = lambda::lambda_tame_quadratic(&field, PsiChoice::ConductorMinusOne).map_err(|e| e.to_string())?;
        let gauss = lambda::lambda_tame_quadratic_gauss(&field).map_err(|e| e.to_string())?;
        ensure(closed.value == gauss.value, || format!("q = {q}: {} vs {}", closed.value.human(), gauss.value.human()))?;
        let klein = lambda::lambda_klein4(q).map_err(|e| e.to_string())?;
        let minus = klein.value == ScaledCyclotomic::from_int(-1);
        ensure(minus == (q % 4 == 1), || format!("biquadratic sign at q = {q}"))?;
        n += 1;
    }
    let report = lambda::lambda_identity_suite(IDENTITY_Q_MAX, -1..=2).map_err(|e| e.to_string())?;
    if let Some(bad) = report.rows.iter().find(|r| !r.ok()) {
        return Err(format!("identity row failed at {} n = {}", bad.field, bad.n_psi));
    }
    ensure(report.ok(), || "Q_2 product".into())?;
    Ok(format!("{n} fields closed = Gauss; {} identity rows", report.rows.len()))
}

// ---------------------------------------------------------------- 7

fn determinants() -> Outcome {
    let data = catalogue().map_err(|e| e.to_string())?;
    let mut seen = BTreeSet::new();
    for d in &data {
        let r = verify_datum(d).map_err(|e| format!("{}: {e}", d.name()))?;
        ensure(r.ok(), || format!("{r:?}"))?;
        let g = d.group();
        let rows = heisenberg::det_table(d).map_err(|e| e.to_string())?;
        let name = g.name().to_string();
        if name.starts_with("Heis") || name.starts_with("heis") {
            ensure(rows.iter().all(|r| r.det_brute.is_one()), || format!("{}: det ≢ 1", d.name()))?;
        }
        if name.starts_with("M(") {
            ensure(rows.iter().any(|r| !r.det_brute.is_one()), || format!("{}: det ≡ 1", d.name()))?;
        }
        if name == "D8" {
            for x in g.elements() {
                let sq = d.chi_z(g.mul(x, x)).expect("squares are central");
                let want = if d.z().contains(&x) { sq } else { sq.mul(&RootOfUnity::minus_one()) };
                ensure(rows[x].det_brute == want, || format!("D8 sign pattern at {}", g.label(x)))?;
            }
        }
        seen.insert(name);
    }
    for want in ["D8", "Q8"] {
        ensure(seen.contains(want), || format!("{want} missing from the catalogue"))?;
    }
    ensure(seen.iter().filter(|n| n.starts_with("M(")).count() == 2, || format!("{seen:?}"))?;
    Ok(format!("{} data over {} groups", data.len(), seen.len()))
}

// ---------------------------------------------------------------- 8

/// Abelian normal subgroups containing `[G,G]`, through the subgroups of `G^ab`.
fn abelian_normal_over_derived(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let dg = g.derived_subgroup();
    let (ab, proj) = g.quotient(&dg).expect("derived subgroup is normal");
    ab.all_subgroups()
        .into_iter()
        .map(|s| g.elements().filter(|&x| s.binary_search(&proj[x]).is_ok()).collect::<Vec<_>>())
        .filter(|h| h.iter().all(|&a| h.iter().all(|&b| g.mul(a, b) == g.mul(b, a))))
        .collect()
}

fn transfer_laws() -> Outcome {
    let mut groups = group_core::two_step_examples().map_err(|e| e.to_string())?;
    let (mut furt, mut odd, mut general, mut power) = (0, 0, 0, 0);
    for g in [group_core::symmetric(3), group_core::symmetric(4), group_core::dihedral(8)] {
        groups.push(g.map_err(|e| e.to_string())?);
    }
    for g in &groups {
        let dg = g.derived_subgroup();
        let tv = g.left_transversal(&dg);
        for x in g.elements() {
            let t = transfer_with_transversal(g, &dg, &tv, x).map_err(|e| e.to_string())?;
            ensure(t == 0, || format!("{}: T_{{G/[G,G]}}({}) ≠ 1", g.name(), g.label(x)))?;
        }
        furt += 1;
    }
    let center_of = |g: &FiniteGroup| g.center();
    for g in groups.iter().filter(|g| g.is_two_step_nilpotent() && !g.is_abelian()) {
        ensure(g.order() <= 128, || format!("{} is too large", g.name()))?;
        let z = center_of(g);
        for h in abelian_normal_over_derived(g) {
            let d = (g.order() / h.len()) as i64;
            let tv = g.left_transversal(&h);
            let dec = DecomposedTransfer::new(g, &h).map_err(|e| e.to_string())?;
            for x in g.elements() {
                let t = transfer_with_transversal(g, &h, &tv, x).map_err(|e| e.to_string())?;
                if d % 2 == 1 {
                    ensure(t == g.pow(x, d), || format!("{}: T(g) ≠ g^d for odd index {d}", g.name()))?;
                }
                let phi = g.mul(g.pow(x, -d), t);
                ensure(g.element_order(phi) <= 2 && z.binary_search(&phi).is_ok(), || {
                    format!("{}: correction at {} is not a central involution", g.name(), g.label(x))
                })?;
                ensure(dec.apply(g, x) == t, || format!("{}: decomposition route differs at {}", g.name(), g.label(x)))?;
            }
            if d % 2 == 1 {
                odd += 1;
            }
            general += 1;
        }
        for x in g.elements() {
            for y in g.elements() {
                let c = g.commutator(x, y);
                for n in 1..=POWER_IDENTITY_N_MAX {
                    ensure(g.commutator(g.pow(x, n), y) == g.pow(c, n), || format!("{}: [x^n,y] ≠ [x,y]^n", g.name()))?;
                    let lhs = g.mul(g.pow(x, n), g.pow(y, n));
                    let rhs = g.mul(g.pow(g.mul(x, y), n), g.pow(c, n * (n - 1) / 2));
                    ensure(lhs == rhs, || format!("{}: x^n y^n ≠ (xy)^n [x,y]^C(n,2)", g.name()))?;
                }
            }
        }
        power += 1;
    }
    Ok(format!("{furt} groups trivial onto [G,G]; {general} (G,H) pairs, {odd} of odd index; power laws on {power} groups"))
}

// ---------------------------------------------------------------- 9

fn span(m: u64, gens: &[(u64, u64)]) -> BTreeSet<(u64, u64)> {
    let idx = |(a, b): (u64, u64)| (a * m + b) as usize;
    let mut seen = vec![false; (m * m) as usize];
    let mut queue = vec![(0, 0)];
    seen[0] = true;
    while let Some((a, b)) = queue.pop() {
        for &(u, v) in gens {
            let next = ((a + u) % m, (b + v) % m);
            if !seen[idx(next)] {
                seen[idx(next)] = true;
                queue.push(next);
            }
        }
    }
    (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).filter(|&x| seen[idx(x)]).collect()
}

fn bicyclic() -> Outcome {
    for m in 1..=BICYCLIC_M_MAX {
        let elems: Vec<(u64, u64)> = (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
        let ord = |x: (u64, u64)| span(m, &[x]).len() as u64;
        let order_m: Vec<(u64, u64)> = elems.iter().copied().filter(|&x| ord(x) == m).collect();
        let cyclic: BTreeSet<BTreeSet<(u64, u64)>> = order_m.iter().map(|&x| span(m, &[x])).collect();
        let b = span(m, &[(1, 0)]);
        let mut subgroups = BTreeSet::new();
        for &x in &elems {
            for &y in &elems {
                subgroups.insert(span(m, &[x, y]));
            }
        }
        let complements = subgroups
            .iter()
            .filter(|c| c.len() as u64 == m && c.intersection(&b).count() == 1)
            .count() as u64;
        let got = bicyclic_counts(m);
        let brute = (cyclic.len() as u64, order_m.len() as u64, complements);
        ensure((got.psi, got.order_m_elements, got.complements) == brute, || format!("m = {m}: {got:?} vs {brute:?}"))?;
    }
    Ok(format!("m ≤ {BICYCLIC_M_MAX} against enumeration in Z_m × Z_m"))
}

// ---------------------------------------------------------------- 10

fn chains(n: usize, min: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (min.max(2)..=n).filter(|f| n % f == 0 && f % min == 0) {
        for mut rest in chains(n / first, first) {
            if rest.first().map_or(true, |r| r % first == 0) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

fn miller() -> Outcome {
    let mut n = 0;
    for order in 1..=MILLER_ORDER_MAX {
        for factors in chains(order, 1) {
            let a = if factors.is_empty() { group_core::cyclic(1) } else { group_core::abelian(&factors) }.map_err(|e| e.to_string())?;
            let direct = a.elements().fold(0, |acc, x| a.mul(acc, x));
            let involutions: Vec<usize> = a.elements().filter(|&x| a.element_order(x) == 2).collect();
            let predicted = if involutions.len() == 1 { involutions[0] } else { 0 };
            let got = miller_product(&a).map_err(|e| e.to_string())?;
            ensure(got == direct && got == predicted, || format!("{factors:?}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} abelian groups of order ≤ {MILLER_ORDER_MAX}"))
}

// ---------------------------------------------------------------- 11

fn u_isotropic() -> Outcome {
    let (mut etas, mut w_cases) = (0, 0);
    for q in 2..=U_ISOTROPIC_Q_MAX {
        let Some((p, f)) = arith::prime_power(q) else { continue };
        let field = local_field(p, f as u32);
        let k = field.residue_field().map_err(|e| e.to_string())?;
        for eta in FFMultChar::all(&k) {
            let m = eta.order();
            let u = UIsotropicDatum::new(field, EtaChar::Residue(eta.clone())).map_err(|e| e.to_string())?;
            ensure(u.dim() == m, || format!("q = {q}: dim {} vs #η {m}", u.dim()))?;
            let n = 2 * m;
            let units: Vec<u64> = k.units().map(u64::from).collect();
            for a in 0..n as i64 {
                for &e in &units {
                    let x = FElt::new(a, e);
                    ensure(u.x_eta_eval(x, x).map_err(|e| e.to_string())?.is_one(), || format!("q = {q}: X(x,x) ≠ 1"))?;
                }
            }
            let rad = u.radical_brute(n, 1).map_err(|e| e.to_string())?;
            let desc = u.radical_descriptor().map_err(|e| e.to_string())?;
            let predicted: BTreeSet<FElt> = (0..n as i64)
                .filter(|a| a % m as i64 == 0)
                .flat_map(|a| desc.kernel.iter().map(move |&e| FElt::new(a, e)))
                .collect();
            ensure(rad == predicted, || format!("q = {q}, #η = {m}: radical"))?;
            ensure(n * units.len() as u64 / rad.len() as u64 == desc.index, || format!("q = {q}: index"))?;
            for &twist in &units {
                ensure(u.radical_brute(n, twist).map_err(|e| e.to_string())? == rad, || format!("q = {q}: π ↦ π·{twist}"))?;
            }
            etas += 1;
        }
        for eta in FFMultChar::all(&k) {
            let m = eta.order();
            let lam = if m % 2 == 0 {
                lambda::lambda_tame_quadratic_gauss(&field).map_err(|e| e.to_string())?
            } else {
                LambdaValue { value: ScaledCyclotomic::one(), provenance: Provenance::ClosedForm }
            };
            for theta in FFMultChar::all(&k).into_iter().filter(|t| !t.is_trivial()) {
                for delta_pi in [RootOfUnity::one(), RootOfUnity::minus_one()] {
                    let u = UIsotropicDatum::new(field, EtaChar::Residue(eta.clone()))
                        .and_then(|u| u.with_minimal_data(theta.clone(), delta_pi, RootOfUnity::i()))
                        .map_err(|e| e.to_string())?;
                    for psi in [LocalAdditiveChar::canonical(field), LocalAdditiveChar::residue(field, -1, k.generator()).map_err(|e| e.to_string())?] {
                        let r = check_c_invariance(&u, &psi, &lam).map_err(|e| e.to_string())?;
                        ensure(r.ok(), || format!("q = {q}, m = {m}: {r:?}"))?;
                        w_cases += 1;
                    }
                }
            }
        }
    }
    let mut grid = 0;
    for p in [3u64, 5, 7, 11, 13] {
        for m in (1..=12u64).filter(|m| m % p != 0) {
            for a in 1..=5u32 {
                let c = conductors_from(m, a, p, ExtensionData::tame(m as u32)).map_err(|e| e.to_string())?;
                let d = (m - 1) as i64;
                let (mi, ai) = (m as i64, a as i64);
                let via_e = d + c.a_chi_e;
                let via_e1 = mi * c.a_chi_e1;
                let via_k = mi * (d + c.a_chi_k);
                ensure(c.routes_agree() && via_e == c.a_rho && via_e1 == c.a_rho && via_k == mi * c.a_rho, || format!("p = {p}, m = {m}, a = {a}"))?;
                ensure(c.a_rho == mi * ai && c.sw == mi * (ai - 1), || format!("direct formulas at m = {m}, a = {a}"))?;
                if a == 1 {
                    ensure((c.a_chi_e, c.a_chi_e1, c.a_chi_k) == (1, 1, 1), || format!("tame conductors at m = {m}"))?;
                }
                grid += 1;
            }
        }
    }
    Ok(format!("{etas} characters η; {w_cases} minimal-W invariance sweeps; {grid} conductor grid points"))
}

// ---------------------------------------------------------------- 12

fn substitutes() -> Outcome {
    let one = LambdaValue { value: ScaledCyclotomic::one(), provenance: Provenance::ClosedForm };
    let mut dim_one = 0;
    for q in [3u64, 5, 7] {
        let field = LocalFieldDesc::qp(q);
        let psi = LocalAdditiveChar::canonical(field);
        for a in 0..=2 {
            for chi in LocalMultChar::all_with_conductor(q, a, RootOfUnity::one()) {
                let w = epsilon::epsilon_sum(&chi, &psi, None).map_err(|e| e.to_string())?.value;
                let chk = invariant_mod_roots(&w, 1, &one, &w).map_err(|e| e.to_string())?;
                ensure(chk.consistent && chk.power_ratio.is_one(), || format!("dim 1 at p = {q}"))?;
                let wrong = w.mul(&RootOfUnity::new(1, 3).to_scaled());
                let chk = invariant_mod_roots(&w, 1, &one, &wrong).map_err(|e| e.to_string())?;
                ensure(!chk.consistent, || "a wrong candidate passed".into())?;
                dim_one += 1;
            }
        }
    }
    let mut tame = 0;
    for q in [5u64, 7, 9, 11, 13] {
        let (p, f) = arith::prime_power(q).expect("prime power");
        let field = local_field(p, f);
        let k = field.residue_field().map_err(|e| e.to_string())?;
        for eta in FFMultChar::all(&k).into_iter().filter(|e| e.order() > 1) {
            let m = eta.order();
            let lam = if m % 2 == 0 { lambda::lambda_tame_quadratic_gauss(&field).map_err(|e| e.to_string())? } else { one.clone() };
            let u = UIsotropicDatum::new(field, EtaChar::Residue(eta))
                .and_then(|u| u.with_minimal_data(FFMultChar::new(k.clone(), 1), RootOfUnity::one(), RootOfUnity::one()))
                .map_err(|e| e.to_string())?;
            let w = minimal_w(&u, &LocalAdditiveChar::canonical(field), 1, &lam).map_err(|e| e.to_string())?.w;
            ensure(w.mul(&w.conj()) == ScaledCyclotomic::one(), || format!("|W| ≠ 1 at q = {q}, m = {m}"))?;
            let gate = dim_gate(q, m).map_err(|e| e.to_string())?;
            ensure(w.as_root_of_unity().is_some() || gate.divides, || format!("gate at q = {q}, m = {m}"))?;
            let root = w.pow(m as i64).map_err(|e| e.to_string())?;
            let chk = invariant_mod_roots(&root, m, &LambdaValue { value: ScaledCyclotomic::one(), provenance: Provenance::ClosedForm }, &w)
                .map_err(|e| e.to_string())?;
            ensure(chk.power_ratio.is_one(), || format!("coset check at q = {q}, m = {m}"))?;
            tame += 1;
        }
    }
    let mut gates = 0;
    for q in (2..=GATE_Q_MAX).filter(|&q| arith::prime_power(q).is_some()) {
        let (p, _) = arith::prime_power(q).expect("prime power");
        for dim in 1..=GATE_DIM_MAX {
            let g = dim_gate(q, dim).map_err(|e| e.to_string())?;
            let mut tp = dim;
            while tp % p == 0 {
                tp /= p;
            }
            ensure(g.tame_part == tp && g.p_part * tp == dim, || format!("split of {dim} at q = {q}"))?;
            ensure(g.divides == ((q - 1) % dim == 0) && g.tame_divides == ((q - 1) % tp == 0), || format!("gate at q = {q}, dim = {dim}"))?;
            gates += 1;
        }
    }
    Ok(format!(
        "not reproducible: W(ρ) for wild Heisenberg ρ and the coset theorem for such ρ; \
         substitutes: {dim_one} dim-1 coset checks, {tame} tame minimal cases, {gates} divisibility gates"
    ))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, fn() -> Outcome, Option<Duration>); 12] = [
        (1, "Q_2 quadratic lambda table", q2_table, Some(LIMIT_Q2_TABLE)),
        (2, "quadratic Gauss sum closed form", gauss_closed_form, Some(LIMIT_GAUSS)),
        (3, "Davenport-Hasse lifting", davenport_hasse, Some(LIMIT_DAVENPORT_HASSE)),
        (4, "epsilon functional equation", functional_equation, None),
        (5, "reduced epsilon sums and parity closed forms", lamprecht_tate, None),
        (6, "tame quadratic lambda and biquadratic relations", tame_lambda, None),
        (7, "Heisenberg determinant triangle", determinants, Some(LIMIT_DETERMINANTS)),
        (8, "transfer laws", transfer_laws, None),
        (9, "bicyclic counts", bicyclic, None),
        (10, "Miller products", miller, None),
        (11, "U-isotropic layer", u_isotropic, None),
        (12, "desk-scale substitutes", substitutes, None),
    ];
    let mut failed = 0;
    for (k, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = limit.is_some_and(|l| elapsed > l);
        let limit_text = limit.map_or(String::new(), |l| format!(", limit {:.0} s", l.as_secs_f64()));
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("time limit exceeded; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {k:>2} {status} {name} ({:.2} s{limit_text}): {detail}", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
