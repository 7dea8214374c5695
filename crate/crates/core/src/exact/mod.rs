//! Exact special values in cyclotomic fields.

pub mod gen;
pub mod hecke;
pub mod lerch;
pub mod zeta;

pub use zeta::{cone_zeta, cone_zeta_coset, norm_form_power, Exact, ValueRing};
