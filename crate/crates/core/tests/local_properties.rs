use locon_core::arith;
use locon_core::cyclo::{RootOfUnity, ScaledCyclotomic};
use locon_core::epsilon::{epsilon_sum, residual_root};
use locon_core::finite_field::{gauss_sum, FFMultChar, FqField};
use locon_core::lambda::{self, PsiChoice};
use locon_core::local_field::{LocalAdditiveChar, LocalElem, LocalFieldDesc, LocalMultChar, PAdic};
use proptest::prelude::*;

#[test]
fn gauss_sums_have_absolute_value_sqrt_q() {
    for q in [3u64, 5, 7, 9, 11, 13, 25, 27, 49] {
        let (p, s) = arith::prime_power(q).unwrap();
        let f = FqField::new(p, s).unwrap();
        for chi in FFMultChar::all(&f).into_iter().filter(|c| !c.is_trivial()) {
            for b in f.units() {
                let g = gauss_sum(&chi, b);
                assert_eq!(g.mul(&g.conj()), ScaledCyclotomic::from_int(q as i64), "q = {q}, {chi}, b = {b}");
            }
        }
    }
}

#[test]
fn local_characters_are_multiplicative_with_exact_conductor() {
    for p in [2u64, 3, 5] {
        for a in 1..=4u32 {
            let pa = arith::ipow(p, a) as i64;
            let units: Vec<i64> = (1..pa).filter(|u| u % p as i64 != 0).collect();
            for chi in LocalMultChar::all_with_conductor(p, a, RootOfUnity::one()) {
                for &u in &units {
                    for &v in &units {
                        let lhs = chi.eval_unit_int(u * v % pa).unwrap();
                        let rhs = chi.eval_unit_int(u).unwrap().mul(&chi.eval_unit_int(v).unwrap());
                        assert_eq!(lhs, rhs, "{chi}");
                    }
                    assert_eq!(chi.eval_unit_int(u).unwrap(), chi.eval_unit_int(u + pa).unwrap());
                }
                // a witness that the character is not trivial one level down
                let below = arith::ipow(p, a - 1) as i64;
                let witness = units.iter().any(|&u| (u - 1) % below == 0 && !chi.eval_unit_int(u).unwrap().is_one());
                assert!(witness, "{chi} has conductor below {a}");
            }
        }
    }
}

#[test]
fn epsilon_is_independent_of_the_unit_in_c() {
    for p in [2u64, 3, 5] {
        let psi = LocalAdditiveChar::canonical(LocalFieldDesc::qp(p));
        for a in 1..=4u32 {
            let pa = arith::ipow(p, a) as i64;
            for chi in LocalMultChar::all_with_conductor(p, a, RootOfUnity::i()) {
                let w = epsilon_sum(&chi, &psi, None).unwrap().value;
                for u in (1..pa).filter(|u| u % p as i64 != 0) {
                    let c = LocalElem::Qp(PAdic::from_int(p, u));
                    assert_eq!(epsilon_sum(&chi, &psi, Some(&c)).unwrap().value, w, "{chi}, u = {u}");
                }
            }
        }
    }
}

#[test]
fn epsilon_modulo_p_power_roots() {
    for p in [2u64, 3, 5] {
        let psi = LocalAdditiveChar::canonical(LocalFieldDesc::qp(p));
        for a in 2..=5u32 {
            for chi in LocalMultChar::all_with_conductor(p, a, RootOfUnity::one()) {
                let (_, n) = residual_root(&chi, &psi).unwrap().expect("a root of unity");
                assert!(arith::prime_divisors(n).iter().all(|&l| l == p), "{chi}: order {n}");
            }
        }
    }
}

fn odd_prime_power() -> impl Strategy<Value = (u64, u64, u32)> {
    prop::sample::select(
        (3..=500u64).filter_map(|q| arith::prime_power(q).filter(|(p, _)| *p != 2).map(|(p, s)| (q, p, s))).collect::<Vec<_>>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn shifted_additive_conductor(p in prop::sample::select(vec![2u64, 3, 5]), v in -5i64..=5, u in 1i64..200) {
        prop_assume!(u % p as i64 != 0);
        let psi = LocalAdditiveChar::canonical(LocalFieldDesc::qp(p));
        let b = PAdic::monomial(p, v, u);
        prop_assert_eq!(psi.shifted_qp(&b).unwrap().conductor(), v + psi.conductor());
    }

    #[test]
    fn gauss_sum_under_scaling(q in prop::sample::select(vec![5u64, 7, 9, 11, 13, 16, 25, 27]), k in 0i64..30, j in 0i64..30) {
        let (p, s) = arith::prime_power(q).unwrap();
        let f = FqField::new(p, s).unwrap();
        let chi = FFMultChar::new(f.clone(), k);
        let b = f.gen_pow(j);
        let lhs = gauss_sum(&chi, b);
        let rhs = gauss_sum(&chi, f.one()).mul(&chi.eval(b).unwrap().inv().to_scaled());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lambda_values_are_fourth_roots((q, p, s) in odd_prime_power(), n_psi in -3i64..=3, e in prop::sample::select(vec![1u64, 3, 5])) {
        let field = LocalFieldDesc::new(p, 1, s, 0).unwrap();
        let mut values = vec![
            lambda::lambda_tame_quadratic(&field, PsiChoice::ConductorMinusOne).unwrap(),
            lambda::lambda_tame_quadratic_gauss(&field).unwrap(),
            lambda::lambda_klein4(q).unwrap(),
            lambda::lambda_unramified(&field, n_psi, 2).unwrap(),
            lambda::lambda_odd(&field, e).unwrap(),
        ];
        let composite = lambda::lambda_odd_ramification(&field, n_psi, 2 * e, e).unwrap();
        let sign = if n_psi % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(&composite.value, &ScaledCyclotomic::from_int(sign));
        values.push(composite);
        for v in values {
            prop_assert!(v.is_fourth_root_of_unity());
        }
    }
}
