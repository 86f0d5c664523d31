//! Constructive lower-bound coding schemes.

mod scheme_a;
mod scheme_b;
mod scheme_c;

pub use scheme_a::{SchemeABound, SchemeAParams};
pub use scheme_b::{scheme_b_bound, SchemeBBound, SchemeBParams};
pub use scheme_c::{
    binarize, scheme_c_gammas, scheme_c_mc_validate, McEstimate, SchemeCBound, SchemeCParams,
};
