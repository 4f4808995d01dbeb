use std::io::Write;

use locon_core::arith;
use locon_core::cyclo::{RootOfUnity, ScaledCyclotomic};
use locon_core::epsilon::{self, lamprecht_tate_terms};
use locon_core::finite_field::{gauss_sum, lift_and_check_davenport_hasse, quadratic_gauss_closed_form, FFMultChar, FqField};
use locon_core::group_core::{self, transfer_with_transversal};
use locon_core::heisenberg::{self, catalogue, check_c_invariance, EtaChar, UIsotropicDatum};
use locon_core::lambda::{self, PsiChoice};
use locon_core::local_field::{LocalAdditiveChar, LocalFieldDesc, LocalMultChar, PAdic};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::commands::{q2_tables, tame_row};
use crate::error::{CliError, EXIT_MISMATCH, EXIT_OK};
use crate::output::{pass, value_cells, Table};
use crate::{Ctx, Fault};

/// One suite: how many cases ran and the first failure, if any.
struct Suite {
    name: &'static str,
    cases: usize,
    failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, cases: 0, failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }
}

fn odd_prime_powers(max: u64) -> Vec<(u64, u64, u32)> {
    (3..=max).filter_map(|q| arith::prime_power(q).filter(|(p, _)| *p != 2).map(|(p, s)| (q, p, s))).collect()
}

fn primes(max: u64) -> Vec<u64> {
    (2..=max).filter(|&p| arith::is_prime(p)).collect()
}

fn field(p: u64, s: u32) -> Result<LocalFieldDesc, CliError> {
    Ok(LocalFieldDesc::new(p, 1, s, 0)?)
}

fn q2_suite(ctx: &Ctx) -> Result<Suite, CliError> {
    let mut s = Suite::new("Q_2 lambda table");
    let (_, _, ok) = q2_tables(ctx)?;
    s.check(ok, || "table or product differs from the reference".into());
    Ok(s)
}

fn gauss_suite(ctx: &Ctx) -> Result<Suite, CliError> {
    let mut s = Suite::new("quadratic Gauss sums");
    for (q, p, e) in odd_prime_powers(ctx.settings.q_max) {
        let f = FqField::new(p, e)?;
        let g = gauss_sum(&FFMultChar::quadratic(f.clone()).expect("odd q"), f.one());
        s.check(g == quadratic_gauss_closed_form(p, e)?, || format!("q = {q}"));
    }
    Ok(s)
}

fn davenport_hasse_suite(ctx: &Ctx) -> Result<Suite, CliError> {
    let mut s = Suite::new("Davenport-Hasse lifting");
    let bound = ctx.settings.q_max * ctx.settings.q_max;
    for q in 2..=ctx.settings.q_max {
        let Some((p, e)) = arith::prime_power(q) else { continue };
        let f = FqField::new(p, e)?;
        let mut lift = 2;
        while q.pow(lift) <= bound {
            for chi in FFMultChar::all(&f) {
                let r = lift_and_check_davenport_hasse(&chi, f.one(), lift)?;
                s.check(r.equal, || format!("{chi} over F_{q}, s = {lift}"));
            }
            lift += 1;
        }
    }
    Ok(s)
}

fn epsilon_suites(ctx: &Ctx) -> Result<(Suite, Suite), CliError> {
    let mut fe = Suite::new("functional equation and |W| = 1");
    let mut lt = Suite::new("reduced epsilon sums");
    for p in primes(ctx.settings.p_max) {
        let psis = [LocalAdditiveChar::canonical(LocalFieldDesc::qp(p)), LocalAdditiveChar::qp(p, PAdic::monomial(p, -1, -1))];
        for a in 0..=ctx.settings.conductor_max {
            for chi in LocalMultChar::all_with_conductor(p, a, RootOfUnity::i()) {
                for psi in &psis {
                    let r = epsilon::check_functional_equation(&chi, psi)?;
                    fe.check(r.equal && r.unitary, || format!("{chi}"));
                }
                if a == 0 {
                    continue;
                }
                let (full, _) = epsilon::epsilon_terms(&chi, &psis[0], None)?;
                for m in 0..=a / 2 {
                    let (reduced, _) = lamprecht_tate_terms(&chi, &psis[0], m)?;
                    lt.check(reduced.equals(&full), || format!("{chi}, m = {m}"));
                }
            }
        }
    }
    Ok((fe, lt))
}

fn lambda_suite(ctx: &Ctx) -> Result<Suite, CliError> {
    let mut s = Suite::new("tame quadratic and biquadratic lambda");
    for (q, p, e) in odd_prime_powers(ctx.settings.q_max) {
        let (closed, gauss) = tame_row(&field(p, e)?, PsiChoice::ConductorMinusOne)?;
        s.check(closed.value == gauss.value, || format!("q = {q}"));
        let k = lambda::lambda_klein4(q)?;
        s.check((k.value == ScaledCyclotomic::from_int(-1)) == (q % 4 == 1), || format!("biquadratic, q = {q}"));
    }
    let report = lambda::lambda_identity_suite(ctx.settings.q_max, -1..=1)?;
    for r in &report.rows {
        s.check(r.ok(), || format!("identities over {} with n = {}", r.field, r.n_psi));
    }
    Ok(s)
}

fn heisenberg_suite(ctx: &Ctx) -> Result<Suite, CliError> {
    let mut s = Suite::new("Heisenberg determinants");
    for (k, d) in catalogue()?.iter().enumerate() {
        let r = heisenberg::verify_datum(d)?;
        s.check(r.ok(), || d.name().to_string());
        if ctx.fault == Some(Fault::Catalogue) && k == 0 {
            let rows = heisenberg::det_table(d)?;
            let corrupted = rows[0].det_invariant.mul(&RootOfUnity::minus_one());
            s.check(corrupted == rows[0].det_brute, || format!("{} (injected)", d.name()));
        }
    }
    Ok(s)
}

fn transfer_suite(ctx: &Ctx) -> Result<Suite, CliError> {
    let mut s = Suite::new("transfer laws");
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.settings.seed);
    for g in group_core::two_step_examples()?.into_iter().filter(|g| g.order() <= 32) {
        let dg = g.derived_subgroup();
        let center = g.center();
        for h in [dg.clone(), center] {
            if h.iter().any(|&a| h.iter().any(|&b| g.mul(a, b) != g.mul(b, a))) {
                continue;
            }
            let d = (g.order() / h.len()) as i64;
            let base = g.left_transversal(&h);
            let cosets = g.left_cosets(&h);
            for _ in 0..4 {
                let random: Vec<usize> = cosets.iter().map(|c| *c.choose(&mut rng).expect("nonempty coset")).collect();
                for x in g.elements() {
                    let t = transfer_with_transversal(&g, &h, &base, x)?;
                    let t2 = transfer_with_transversal(&g, &h, &random, x)?;
                    s.check(t == t2, || format!("{}: transversal dependence at {}", g.name(), g.label(x)));
                    let phi = g.mul(g.pow(x, -d), t);
                    s.check(g.element_order(phi) <= 2, || format!("{}: correction at {}", g.name(), g.label(x)));
                }
            }
        }
        for x in g.elements() {
            let t = transfer_with_transversal(&g, &dg, &g.left_transversal(&dg), x)?;
            s.check(t == 0, || format!("{}: transfer onto [G,G]", g.name()));
        }
    }
    Ok(s)
}

fn counting_suite(ctx: &Ctx) -> Result<Suite, CliError> {
    let mut s = Suite::new("bicyclic counts and Miller products");
    for m in 1..=ctx.settings.q_max {
        let c = group_core::bicyclic_counts(m);
        let psi = arith::prime_divisors(m).iter().fold(m, |acc, &p| acc / p * (p + 1));
        s.check(c.psi == psi && c.order_m_elements == psi * arith::euler_phi(m) && c.complements == m, || format!("m = {m}"));
    }
    for n in 1..=ctx.settings.q_max as usize {
        let g = group_core::cyclic(n)?;
        let direct = g.elements().fold(0, |acc, x| g.mul(acc, x));
        s.check(group_core::miller_product(&g)? == direct, || format!("C{n}"));
    }
    Ok(s)
}

fn u_isotropic_suite(ctx: &Ctx) -> Result<Suite, CliError> {
    let mut s = Suite::new("U-isotropic minimal W");
    for q in 3..=ctx.settings.q_max {
        let Some((p, e)) = arith::prime_power(q) else { continue };
        if p == 2 {
            continue;
        }
        let f = field(p, e)?;
        let k = f.residue_field()?;
        for eta in FFMultChar::all(&k) {
            let m = eta.order();
            let lam = if m % 2 == 0 { lambda::lambda_tame_quadratic_gauss(&f)? } else { lambda::lambda_odd(&f, m)? };
            let u = UIsotropicDatum::new(f, EtaChar::Residue(eta.clone()))?;
            let desc = u.radical_descriptor()?;
            s.check(desc.index == m * m, || format!("radical index at q = {q}"));
            let u = u.with_minimal_data(FFMultChar::new(k.clone(), 1), RootOfUnity::minus_one(), RootOfUnity::i())?;
            let r = check_c_invariance(&u, &LocalAdditiveChar::canonical(f), &lam)?;
            s.check(r.ok(), || format!("{eta} over F_{q}"));
        }
    }
    Ok(s)
}

pub fn verify(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let (fe, lt) = epsilon_suites(ctx)?;
    let suites = [
        q2_suite(ctx)?,
        gauss_suite(ctx)?,
        davenport_hasse_suite(ctx)?,
        fe,
        lt,
        lambda_suite(ctx)?,
        heisenberg_suite(ctx)?,
        transfer_suite(ctx)?,
        counting_suite(ctx)?,
        u_isotropic_suite(ctx)?,
    ];
    let st = &ctx.settings;
    let mut table = Table::new(
        format!("verification (q_max = {}, p_max = {}, conductor_max = {}, seed = {})", st.q_max, st.p_max, st.conductor_max, st.seed),
        &["suite", "cases", "status", "first failure"],
    );
    let mut ok = true;
    for s in &suites {
        ok &= s.failure.is_none();
        table.push(vec![s.name.into(), s.cases.to_string(), pass(s.failure.is_none()), s.failure.clone().unwrap_or_default()]);
    }
    table.write(out, ctx.format())?;
    writeln!(out, "verify: {}", pass(ok))?;
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

pub fn epsilon_grid(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut table = Table::new(
        "epsilon factors over Q_p",
        &["chi", "psi", "a", "n", "W", "human", "|W| = 1", "functional equation", "reduced sums"],
    );
    let mut ok = true;
    for p in primes(ctx.settings.p_max) {
        let psi = LocalAdditiveChar::canonical(LocalFieldDesc::qp(p));
        for a in 0..=ctx.settings.conductor_max {
            for chi in LocalMultChar::all_with_conductor(p, a, RootOfUnity::one()) {
                let r = epsilon::epsilon_sum(&chi, &psi, None)?;
                let unitary = r.value.mul(&r.value.conj()) == ScaledCyclotomic::one();
                let fe = epsilon::check_functional_equation(&chi, &psi)?;
                let (full, _) = epsilon::epsilon_terms(&chi, &psi, None)?;
                let mut reduced = true;
                for m in (0..=a / 2).filter(|_| a > 0) {
                    reduced &= lamprecht_tate_terms(&chi, &psi, m)?.0.equals(&full);
                }
                let row_ok = unitary && fe.equal && reduced;
                ok &= row_ok;
                let [ser, human] = value_cells(&r.value);
                table.push(vec![
                    chi.to_string(),
                    format!("psi_Q{p}"),
                    r.a.to_string(),
                    r.n.to_string(),
                    ser,
                    human,
                    pass(unitary),
                    pass(fe.equal),
                    pass(reduced),
                ]);
            }
        }
    }
    table.write(out, ctx.format())?;
    writeln!(out, "{} characters: {}", table.len(), pass(ok))?;
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

pub fn report(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let fmt = ctx.format();
    let (q2, product, mut ok) = q2_tables(ctx)?;
    q2.write(out, fmt)?;
    product.write(out, fmt)?;

    let mut gauss = Table::new("quadratic Gauss sums", &["q", "G", "human", "closed form"]);
    let mut tame = Table::new(
        "lambda for unramified quadratic and biquadratic extensions",
        &["q", "lambda quadratic", "Gauss route", "lambda biquadratic"],
    );
    for (q, p, e) in odd_prime_powers(ctx.settings.q_max) {
        let f = FqField::new(p, e)?;
        let g = gauss_sum(&FFMultChar::quadratic(f.clone()).expect("odd q"), f.one());
        let agree = g == quadratic_gauss_closed_form(p, e)?;
        ok &= agree;
        let [ser, human] = value_cells(&g);
        gauss.push(vec![q.to_string(), ser, human, pass(agree)]);
        let (closed, route) = tame_row(&field(p, e)?, PsiChoice::ConductorMinusOne)?;
        ok &= closed.value == route.value;
        tame.push(vec![q.to_string(), closed.value.human(), route.value.human(), lambda::lambda_klein4(q)?.value.human()]);
    }
    gauss.write(out, fmt)?;
    tame.write(out, fmt)?;

    let mut heis = Table::new("Heisenberg catalogue", &["datum", "dim", "choices of H", "det routes", "trace formula", "choice-free", "det = 1"]);
    for d in catalogue()? {
        let r = heisenberg::verify_datum(&d)?;
        ok &= r.ok();
        let trivial = heisenberg::det_table(&d)?.iter().all(|row| row.det_brute.is_one());
        heis.push(vec![
            r.name.clone(),
            r.dim.to_string(),
            r.choices.to_string(),
            pass(r.dets_agree),
            pass(r.trace_formula),
            pass(r.independent_of_choice),
            trivial.to_string(),
        ]);
    }
    heis.write(out, fmt)?;
    writeln!(out, "report: {}", pass(ok))?;
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}
