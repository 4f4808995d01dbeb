use std::sync::OnceLock;

use locon_core::arith;
use locon_core::cyclo::RootOfUnity;
use locon_core::finite_field::{FFMultChar, FqField};
use locon_core::group_core::{self, transfer_with_transversal, FiniteGroup};
use locon_core::heisenberg::{check_c_invariance, minimal_w, EtaChar, FElt, UIsotropicDatum};
use locon_core::lambda;
use locon_core::local_field::{LocalAdditiveChar, LocalFieldDesc};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn groups() -> &'static [FiniteGroup] {
    static GROUPS: OnceLock<Vec<FiniteGroup>> = OnceLock::new();
    GROUPS.get_or_init(|| group_core::two_step_examples().unwrap().into_iter().filter(|g| g.order() <= 64).collect())
}

fn abelian_subgroups_with_abelian_quotient(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let dg = g.derived_subgroup();
    let z = g.center();
    let mut out = vec![dg.clone(), z.clone()];
    for x in g.elements() {
        let mut gens = z.clone();
        gens.push(x);
        out.push(g.generate(&gens));
    }
    out.retain(|h| h.iter().all(|&a| h.iter().all(|&b| g.mul(a, b) == g.mul(b, a))));
    out.retain(|h| dg.iter().all(|c| h.binary_search(c).is_ok()));
    out.sort();
    out.dedup();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn transfer_is_transversal_independent(gi in 0usize..64, hi in 0usize..64, seed in any::<u64>()) {
        let gs = groups();
        let g = &gs[gi % gs.len()];
        let hs = abelian_subgroups_with_abelian_quotient(g);
        let h = &hs[hi % hs.len()];
        let cosets = g.left_cosets(h);
        let base = g.left_transversal(h);
        let expected: Vec<usize> = g.elements().map(|x| transfer_with_transversal(g, h, &base, x).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let mut tv: Vec<usize> = cosets.iter().map(|c| *c.choose(&mut rng).unwrap()).collect();
            tv.shuffle(&mut rng);
            for x in g.elements() {
                prop_assert_eq!(transfer_with_transversal(g, h, &tv, x).unwrap(), expected[x]);
            }
        }
        let d = (g.order() / h.len()) as i64;
        let z = g.center();
        for x in g.elements() {
            let phi = g.mul(g.pow(x, -d), expected[x]);
            prop_assert!(g.element_order(phi) <= 2 && z.binary_search(&phi).is_ok());
        }
    }

    #[test]
    fn two_step_commutator_identities(gi in 0usize..64, x in 0usize..1024, y in 0usize..1024, n in -12i64..=12) {
        let gs = groups();
        let g = &gs[gi % gs.len()];
        let (x, y) = (x % g.order(), y % g.order());
        let c = g.commutator(x, y);
        prop_assert_eq!(g.commutator(g.pow(x, n), y), g.pow(c, n));
        prop_assert_eq!(g.commutator(x, g.pow(y, n)), g.pow(c, n));
        let lhs = g.mul(g.pow(x, n), g.pow(y, n));
        let rhs = g.mul(g.pow(g.mul(x, y), n), g.pow(c, n * (n - 1) / 2));
        prop_assert_eq!(lhs, rhs);
    }
}

fn tame_field() -> impl Strategy<Value = (LocalFieldDesc, u64)> {
    prop::sample::select(vec![3u64, 4, 5, 7, 8, 9, 11, 13]).prop_map(|q| {
        let (p, s) = arith::prime_power(q).unwrap();
        (LocalFieldDesc::new(p, 1, s, 0).unwrap(), q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn x_eta_is_alternating_and_bimultiplicative((field, q) in tame_field(), k in 0i64..12, a in -4i64..4, b in -4i64..4, c in -4i64..4, e in 1u64..13, f in 1u64..13, g in 1u64..13) {
        let k_field = field.residue_field().unwrap();
        let unit = |x: u64| u64::from(k_field.gen_pow(x as i64));
        let eta = FFMultChar::new(k_field.clone(), k % (q as i64 - 1));
        let u = UIsotropicDatum::new(field, EtaChar::Residue(eta)).unwrap();
        let (x, y, z) = (FElt::new(a, unit(e)), FElt::new(b, unit(f)), FElt::new(c, unit(g)));
        prop_assert!(u.x_eta_eval(x, x).unwrap().is_one());
        prop_assert_eq!(u.x_eta_eval(x, y).unwrap(), u.x_eta_eval(y, x).unwrap().inv());
        let xz = FElt::new(a + c, u64::from(k_field.mul(unit(e) as u32, unit(g) as u32)));
        prop_assert_eq!(u.x_eta_eval(xz, y).unwrap(), u.x_eta_eval(x, y).unwrap().mul(&u.x_eta_eval(z, y).unwrap()));
    }

    #[test]
    fn minimal_w_is_independent_of_c((field, q) in tame_field(), k in 1i64..12, theta in 1i64..12, flip in any::<bool>(), det in 0i64..8, c1 in 1u64..13, c2 in 1u64..13) {
        let kf = field.residue_field().unwrap();
        let eta = FFMultChar::new(kf.clone(), k % (q as i64 - 1));
        let m = eta.order();
        let theta = FFMultChar::new(kf.clone(), theta % (q as i64 - 1));
        prop_assume!(!theta.is_trivial());
        let lam = if m % 2 == 0 {
            lambda::lambda_tame_quadratic_gauss(&field).unwrap()
        } else {
            lambda::lambda_odd(&field, m).unwrap()
        };
        let delta_pi = if flip { RootOfUnity::minus_one() } else { RootOfUnity::one() };
        let u = UIsotropicDatum::new(field, EtaChar::Residue(eta))
            .and_then(|u| u.with_minimal_data(theta, delta_pi, RootOfUnity::new(det, 8)))
            .unwrap();
        let psi = LocalAdditiveChar::canonical(field);
        let (e1, e2) = (kf.gen_pow(c1 as i64), kf.gen_pow(c2 as i64));
        let w1 = minimal_w(&u, &psi, e1, &lam).unwrap();
        let w2 = minimal_w(&u, &psi, e2, &lam).unwrap();
        prop_assert_eq!(&w1.w, &w2.w);
        prop_assert_eq!(&w1.l, &w1.l_via_gauss);
        prop_assert_eq!(w1.w.mul(&w1.w.conj()), locon_core::ScaledCyclotomic::one());
        prop_assert!(check_c_invariance(&u, &psi, &lam).unwrap().ok());
    }
}

#[test]
fn finite_field_generator_has_full_order() {
    for q in [4u64, 8, 9, 16, 25, 27, 49] {
        let (p, s) = arith::prime_power(q).unwrap();
        let f = FqField::new(p, s).unwrap();
        let g = f.generator();
        let order = (1..q).find(|&k| f.pow(g, k) == f.one()).unwrap();
        assert_eq!(order, q - 1);
    }
}
