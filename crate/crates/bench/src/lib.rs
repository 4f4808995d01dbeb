//! Fixtures shared by the `kernels` benchmarks.

use locon_core::cyclo::RootOfUnity;
use locon_core::finite_field::{FFMultChar, FqField};
use locon_core::heisenberg::{catalogue, HeisenbergDatum};
use locon_core::local_field::{LocalAdditiveChar, LocalFieldDesc, LocalMultChar};

/// The quadratic character of `F_q`.
pub fn quadratic_char(p: u64, s: u32) -> FFMultChar {
    let f = FqField::new(p, s).expect("prime power");
    let half = (f.q() as i64 - 1) / 2;
    FFMultChar::new(f, half)
}

/// The first character of `Q_p^×` with conductor `a` and `χ(p) = 1`, with the canonical `ψ`.
pub fn local_pair(p: u64, a: u32) -> (LocalMultChar, LocalAdditiveChar) {
    let chi = LocalMultChar::all_with_conductor(p, a, RootOfUnity::one())
        .into_iter()
        .next()
        .expect("a character of that conductor");
    (chi, LocalAdditiveChar::canonical(LocalFieldDesc::qp(p)))
}

/// A catalogue entry by group name.
pub fn datum(group: &str) -> HeisenbergDatum {
    catalogue()
        .expect("catalogue builds")
        .into_iter()
        .find(|d| d.group().name() == group)
        .expect("group in catalogue")
}
