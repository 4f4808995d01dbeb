use std::io::Write;
use std::sync::Arc;

use locon_core::arith;
use locon_core::cyclo::{RootOfUnity, ScaledCyclotomic};
use locon_core::epsilon::{self, check_functional_equation};
use locon_core::finite_field::{gauss_sum, quadratic_gauss_closed_form, FFMultChar, FqField};
use locon_core::group_core::{self, parse_group_spec, sylow2_type, FiniteGroup};
use locon_core::heisenberg::{self, data_for_group, ExtensionData, UIsotropicDatum};
use locon_core::lambda::{self, ClassifierContext, LambdaValue, PsiChoice};
use locon_core::local_field::{q2_quadratic_catalogue, LocalAdditiveChar, LocalFieldDesc, LocalMultChar};

use crate::error::{CliError, EXIT_MISMATCH, EXIT_OK};
use crate::output::{pass, value_cells, Table};
use crate::{Ctx, Fault, GaussArgs, MinimalWArgs, TameArgs};

fn status(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

/// Reference values of the Q_2 table, in catalogue order.
pub(crate) fn q2_expected(fault: Option<Fault>) -> Vec<(i64, RootOfUnity)> {
    let mut v = vec![
        (5, RootOfUnity::one()),
        (-1, RootOfUnity::i()),
        (-5, RootOfUnity::i()),
        (2, RootOfUnity::one()),
        (10, RootOfUnity::minus_one()),
        (-2, RootOfUnity::i()),
        (-10, RootOfUnity::i().inv()),
    ];
    if fault == Some(Fault::Q2Table) {
        v[0].1 = RootOfUnity::minus_one();
    }
    v
}

pub(crate) fn q2_tables(ctx: &Ctx) -> Result<(Table, Table, bool), CliError> {
    let t = lambda::lambda_q2_table()?;
    let catalogue = q2_quadratic_catalogue();
    let expected = q2_expected(ctx.fault);
    let mut table = Table::new(
        "lambda for the quadratic extensions of Q_2",
        &["k", "extension", "conductor", "norm group", "lambda", "human", "expected", "status"],
    );
    let mut ok = t.rows.len() == expected.len();
    for (k, (((d, v), entry), (d0, want))) in t.rows.iter().zip(&catalogue).zip(&expected).enumerate() {
        let row_ok = d == d0 && v.value == want.to_scaled();
        ok &= row_ok;
        let [ser, human] = value_cells(&v.value);
        table.push(vec![
            (k + 1).to_string(),
            format!("Q2(sqrt({d}))"),
            entry.conductor.to_string(),
            entry.norm_group.to_string(),
            ser,
            human,
            want.symbol(),
            pass(row_ok),
        ]);
    }
    let product_ok = t.product_is_one();
    let mut summary = Table::new("product of the seven values", &["check", "value", "status"]);
    summary.push(vec!["product = 1".into(), t.product.human(), pass(product_ok)]);
    Ok((table, summary, ok && product_ok))
}

pub fn q2_table(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, CliError> {
    let (table, summary, ok) = q2_tables(ctx)?;
    table.write(out, ctx.format())?;
    summary.write(out, ctx.format())?;
    writeln!(out, "product = 1: {}", pass(ok))?;
    Ok(status(ok))
}

pub fn gauss(ctx: &Ctx, a: &GaussArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = FqField::new(a.p, a.s)?;
    let chi = match a.chi {
        Some(k) => FFMultChar::new(f.clone(), k),
        None => FFMultChar::quadratic(f.clone()).ok_or_else(|| CliError::usage("q is even: pass --chi"))?,
    };
    let b = a.b.unwrap_or(f.one());
    if b == f.zero() || u64::from(b) >= f.q() {
        return Err(CliError::usage("--b must be a nonzero element code"));
    }
    let g = gauss_sum(&chi, b);
    let mut table = Table::new(format!("Gauss sum over {f}"), &["chi", "b", "G", "human"]);
    let [ser, human] = value_cells(&g);
    table.push(vec![chi.to_string(), b.to_string(), ser, human.clone()]);
    table.write(out, ctx.format())?;
    writeln!(out, "G = {human}")?;
    let mut ok = g.mul(&g.conj()) == ScaledCyclotomic::from_int(f.q() as i64) || chi.is_trivial();
    if a.chi.is_none() && b == f.one() {
        let closed = quadratic_gauss_closed_form(a.p, a.s)?;
        let agree = closed == g;
        writeln!(out, "closed form: {} : {}", closed.human(), pass(agree))?;
        ok &= agree;
    }
    Ok(status(ok))
}

fn local_field(p: u64, s: u32) -> Result<LocalFieldDesc, CliError> {
    if !arith::is_prime(p) || s == 0 {
        return Err(CliError::usage(format!("need a prime p and s >= 1, got p = {p}, s = {s}")));
    }
    Ok(LocalFieldDesc::new(p, 1, s, 0)?)
}

pub(crate) fn tame_row(field: &LocalFieldDesc, psi: PsiChoice) -> Result<(LambdaValue, LambdaValue), CliError> {
    Ok((lambda::lambda_tame_quadratic(field, psi)?, lambda::lambda_tame_quadratic_gauss(field)?))
}

pub fn tame_lambda(ctx: &Ctx, a: &TameArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let field = local_field(a.p, a.s)?;
    let psi = if a.canonical {
        PsiChoice::Canonical { trace_residue: a.trace_residue }
    } else {
        PsiChoice::ConductorMinusOne
    };
    let (closed, gauss) = tame_row(&field, psi)?;
    let mut table = Table::new(
        format!("lambda for the unramified quadratic extension of {field}"),
        &["route", "lambda", "human", "provenance"],
    );
    for v in [&closed, &gauss] {
        let [ser, human] = value_cells(&v.value);
        table.push(vec![if v == &closed { "closed form" } else { "Gauss sum" }.into(), ser, human, v.provenance.to_string()]);
    }
    table.write(out, ctx.format())?;
    if a.canonical {
        writeln!(out, "the Gauss sum route uses a character of conductor -1")?;
        return Ok(EXIT_OK);
    }
    let ok = closed.value == gauss.value;
    writeln!(out, "closed form = Gauss sum: {}", pass(ok))?;
    Ok(status(ok))
}

pub fn klein4(ctx: &Ctx, q: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let v = lambda::lambda_klein4(q)?;
    let mut table = Table::new("lambda for the biquadratic extension", &["q", "q mod 4", "lambda", "human"]);
    let [ser, human] = value_cells(&v.value);
    table.push(vec![q.to_string(), (q % 4).to_string(), ser, human]);
    table.write(out, ctx.format())?;
    Ok(EXIT_OK)
}

fn group(spec: &str) -> Result<FiniteGroup, CliError> {
    let spec = if spec.starts_with("group:") { spec.to_string() } else { format!("group:{spec}") };
    Ok(parse_group_spec(&spec)?)
}

pub fn classify(ctx: &Ctx, spec: &str, q: Option<u64>, n_psi: i64, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = group(spec)?;
    let context = q.map(|q| ClassifierContext { q, n_psi });
    let r = lambda::lambda_classifier(&g, context)?;
    let (value, human) = match (&r.value, &r.symbolic) {
        (Some(v), _) => {
            let [a, b] = value_cells(&v.value);
            (a, b)
        }
        (None, Some(s)) => (s.clone(), s.clone()),
        (None, None) => ("?".into(), "?".into()),
    };
    let mut table = Table::new(format!("lambda_1^G for G = {}", g.name()), &["group", "order", "case", "detail", "value", "human"]);
    table.push(vec![g.name().into(), g.order().to_string(), r.case.number().to_string(), format!("{:?}", r.case), value, human]);
    table.write(out, ctx.format())?;
    Ok(EXIT_OK)
}

pub fn group_info(ctx: &Ctx, spec: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = group(spec)?;
    let dd = g.derived_data();
    let (sylow, _) = sylow2_type(&g);
    let mut table = Table::new(format!("structure of {}", g.name()), &["property", "value"]);
    let mut add = |k: &str, v: String| table.push(vec![k.into(), v]);
    add("order", g.order().to_string());
    add("exponent", g.exponent().to_string());
    add("abelian", dd.is_abelian.to_string());
    add("two-step nilpotent", dd.is_two_step_nilpotent.to_string());
    add("|Z(G)|", dd.center.len().to_string());
    add("|[G,G]|", dd.commutator.len().to_string());
    add("Sylow 2-subgroup", format!("{sylow:?}"));
    if dd.is_abelian {
        let e = group_core::elementary_divisors(&g)?;
        let f: Vec<String> = e.factors.iter().map(u64::to_string).collect();
        add("invariant factors", f.join(" x "));
        add("2-rank", e.two_rank.to_string());
        add("Miller product", g.label(group_core::miller_product(&g)?).to_string());
    }
    table.write(out, ctx.format())?;
    Ok(EXIT_OK)
}

fn subgroup(g: &FiniteGroup, spec: &str) -> Result<Vec<usize>, CliError> {
    match spec.trim() {
        "derived" => Ok(g.derived_subgroup()),
        "center" => Ok(g.center()),
        list => {
            let gens = list
                .split(',')
                .map(|t| t.trim().parse::<usize>().ok().filter(|&x| x < g.order()))
                .collect::<Option<Vec<usize>>>()
                .ok_or_else(|| CliError::usage(format!("bad subgroup '{spec}'")))?;
            Ok(g.generate(&gens))
        }
    }
}

pub fn group_transfer(ctx: &Ctx, spec: &str, h_spec: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = group(spec)?;
    let h = subgroup(&g, h_spec)?;
    let d = (g.order() / h.len()) as i64;
    let tv = g.left_transversal(&h);
    let decomposed = if g.is_normal(&h) && g.is_two_step_nilpotent() && g.commutator_of(&h, &h).len() == 1 {
        Some(group_core::DecomposedTransfer::new(&g, &h)?)
    } else {
        None
    };
    let mut table = Table::new(
        format!("transfer of {} to a subgroup of index {d}", g.name()),
        &["x", "T(x)", "x^d", "x^-d T(x)", "decomposition", "agree"],
    );
    let mut ok = true;
    for x in g.elements() {
        let t = group_core::transfer_with_transversal(&g, &h, &tv, x)?;
        let (dec, agree) = match &decomposed {
            Some(dt) => {
                let v = dt.apply(&g, x);
                (g.label(v).to_string(), v == t)
            }
            None => ("-".to_string(), true),
        };
        ok &= agree;
        let phi = g.mul(g.pow(x, -d), t);
        table.push(vec![
            g.label(x).into(),
            g.label(t).into(),
            g.label(g.pow(x, d)).into(),
            g.label(phi).into(),
            dec,
            pass(agree),
        ]);
    }
    table.write(out, ctx.format())?;
    Ok(status(ok))
}

pub fn heisenberg_det(ctx: &Ctx, spec: &str, chi: Option<usize>, out: &mut dyn Write) -> Result<i32, CliError> {
    let data = data_for_group(group(spec)?)?;
    if data.is_empty() {
        return Err(CliError::usage("no central character gives a nondegenerate pairing"));
    }
    let names: Vec<&str> = data.iter().map(|d| d.name()).collect();
    let d = match chi {
        None => &data[0],
        Some(k) => data
            .iter()
            .find(|d| d.name().ends_with(&format!("/chi{k}")))
            .ok_or_else(|| CliError::usage(format!("--chi {k} is not available; choose from {names:?}")))?,
    };
    let rows = heisenberg::det_table(d)?;
    let mut table = Table::new(
        format!("det rho for {} (dim {}, 2-rank {})", d.name(), d.dim(), d.two_rank()),
        &["g", "det_brute", "det_invariant", "gallagher", "agree"],
    );
    let mut ok = true;
    for r in &rows {
        ok &= r.agree();
        table.push(vec![r.label.clone(), r.det_brute.symbol(), r.det_invariant.symbol(), r.gallagher.symbol(), pass(r.agree())]);
    }
    table.write(out, ctx.format())?;
    Ok(status(ok))
}

pub fn conductors(
    ctx: &Ctx,
    m: u64,
    a: u32,
    p: u64,
    ext: (Option<u32>, Option<u32>, Option<u32>),
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    if m == 0 || m > u64::from(u32::MAX) {
        return Err(CliError::usage("--m must be positive"));
    }
    let tame = ExtensionData::tame(m as u32);
    let ext = ExtensionData { d_ef: ext.0.unwrap_or(tame.d_ef), d_kf: ext.1.unwrap_or(tame.d_kf), f_e1f: ext.2.unwrap_or(tame.f_e1f) };
    let c = heisenberg::conductors_from(m, a, p, ext)?;
    let mut table = Table::new(format!("conductors for dim {m}, a(eta) = {a}, p = {p}"), &["quantity", "value"]);
    for (k, v) in [
        ("sw(rho)", c.sw),
        ("a(rho)", c.a_rho),
        ("a(chi_E)", c.a_chi_e),
        ("a(chi_E1)", c.a_chi_e1),
        ("a(chi_K)", c.a_chi_k),
        ("a(rho) via E", c.via_e),
        ("a(rho) via E1", c.via_e1),
        ("a(rho) via K", c.via_k),
    ] {
        table.push(vec![k.into(), v.to_string()]);
    }
    table.write(out, ctx.format())?;
    writeln!(out, "routes agree: {}", pass(c.routes_agree()))?;
    Ok(status(c.routes_agree()))
}

fn parse_root(s: &str) -> Result<RootOfUnity, CliError> {
    let bad = || CliError::usage(format!("bad root of unity '{s}'"));
    match s.trim() {
        "1" => Ok(RootOfUnity::one()),
        "-1" => Ok(RootOfUnity::minus_one()),
        "i" => Ok(RootOfUnity::i()),
        "-i" => Ok(RootOfUnity::i().inv()),
        t => {
            let (k, n) = t.split_once('/').ok_or_else(bad)?;
            let k: i64 = k.trim().parse().map_err(|_| bad())?;
            let n: u64 = n.trim().parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            Ok(RootOfUnity::new(k, n))
        }
    }
}

pub fn minimal_w(ctx: &Ctx, a: &MinimalWArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (p, s) = arith::prime_power(a.q).ok_or_else(|| CliError::usage(format!("{} is not a prime power", a.q)))?;
    let field = local_field(p, s)?;
    let k: Arc<FqField> = field.residue_field()?;
    let eta = FFMultChar::new(k.clone(), a.eta);
    let m = eta.order();
    let delta_pi = parse_root(&a.delta_pi)?;
    if delta_pi.order() > 2 {
        return Err(CliError::usage("--delta-pi must be 1 or -1"));
    }
    let u = UIsotropicDatum::new(field, heisenberg::EtaChar::Residue(eta))?.with_minimal_data(
        FFMultChar::new(k.clone(), a.theta),
        delta_pi,
        parse_root(&a.det_pi)?,
    )?;
    let lam = if m % 2 == 0 {
        lambda::lambda_tame_quadratic_gauss(&field)?
    } else {
        lambda::lambda_odd(&field, m)?
    };
    if a.c_unit == 0 || u64::from(a.c_unit) >= k.q() {
        return Err(CliError::usage("--c-unit must be a nonzero residue"));
    }
    let psi = LocalAdditiveChar::canonical(field);
    let w = heisenberg::minimal_w(&u, &psi, a.c_unit, &lam)?;
    let mut table = Table::new(format!("minimal W for dim {m} over {field}"), &["quantity", "value", "human"]);
    for (name, v) in [("lambda_E/F", &lam.value), ("R", &w.r), ("L", &w.l), ("L via Gauss sum", &w.l_via_gauss), ("W", &w.w)] {
        let [ser, human] = value_cells(v);
        table.push(vec![name.into(), ser, human]);
    }
    table.push(vec!["c".into(), format!("pi^{} * {}", w.c_val, w.c_unit), String::new()]);
    table.write(out, ctx.format())?;
    let inv = heisenberg::check_c_invariance(&u, &psi, &lam)?;
    writeln!(out, "independent of c: {}", pass(inv.ok()))?;
    Ok(status(inv.ok()))
}

pub fn epsilon_eval(ctx: &Ctx, a: &crate::EpsilonEvalArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let field = LocalFieldDesc::parse(&a.field)?;
    let chi = LocalMultChar::parse(&a.chi, field)?;
    let psi = LocalAdditiveChar::residue(field, a.psi_val, a.psi_unit)?;
    let r = epsilon::epsilon_sum(&chi, &psi, None)?;
    let unitary = r.value.mul(&r.value.conj()) == ScaledCyclotomic::one();
    let fe = if field.is_qp() { Some(check_functional_equation(&chi, &psi)?) } else { None };
    let mut table = Table::new(
        format!("epsilon factor over {field}"),
        &["chi", "psi", "a", "n", "W", "human", "|W| = 1", "functional equation"],
    );
    let [ser, human] = value_cells(&r.value);
    table.push(vec![
        chi.to_string(),
        format!("b = pi^{} * {}", a.psi_val, a.psi_unit),
        r.a.to_string(),
        r.n.to_string(),
        ser,
        human,
        pass(unitary),
        fe.as_ref().map_or("-".into(), |f| pass(f.equal && f.unitary)),
    ]);
    table.write(out, ctx.format())?;
    Ok(status(unitary && fe.map_or(true, |f| f.equal && f.unitary)))
}
