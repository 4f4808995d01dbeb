//! Exact computation of local epsilon factors, Langlands lambda-functions and
//! determinants of Heisenberg representations at desk scale.

pub mod arith;
pub mod cyclo;
pub mod epsilon;
pub mod finite_field;
pub mod group_core;
pub mod heisenberg;
pub mod lambda;
pub mod local_field;

pub use cyclo::{Cyclotomic, CycloError, RootOfUnity, ScaledCyclotomic};
pub use epsilon::{CharacterSum, Convention, EpsilonError, EpsilonResult};
pub use finite_field::{FFMultChar, FieldError, FqField};
pub use group_core::{FiniteGroup, GroupError};
pub use heisenberg::{HeisenbergDatum, HeisenbergError, MonomialRep, UIsotropicDatum};
pub use lambda::{LambdaError, LambdaValue, Provenance};
pub use local_field::{LocalAdditiveChar, LocalError, LocalFieldDesc, LocalMultChar, PAdic};
