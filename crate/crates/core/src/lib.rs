//! Exact arithmetic for real quadratic irrationals and the invariants built
//! on them: continued fractions and fundamental units, endomorphism orders
//! of pseudo-lattices `Z + θZ`, class groups of real quadratic orders via
//! indefinite binary quadratic forms, the `K₀` descriptor of the associated
//! crossed product, and the rank / Shafarevich-Tate predictions derived from
//! the class number.
//!
//! ```
//! use qde_core::{parse_theta, predict, DiscBound};
//!
//! let theta = parse_theta("sqrt(10)").unwrap();
//! let p = predict(&theta, DiscBound::default()).unwrap();
//! assert_eq!((p.h_lambda, p.rank, p.sha_order), (2, 1, 4));
//! ```

pub mod arith;
pub mod classgroup;
mod error;
pub mod harness;
pub mod ktheory;
pub mod lattice;
pub mod predict;
pub mod quadratic;

use std::fmt::Display;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

pub use classgroup::{
    class_group_structure, class_number_maximal, class_number_order, compose, form_class_group, galois_group_kab,
    reduce_cycle, reduced_forms, unit_index, AbelianGroupStructure, BinaryQuadraticForm, DiscBound, FormClassGroup,
};
pub use error::{Error, Result, RowError};
pub use harness::{parse_curves, validate, validate_parallel, CurveRecord, Format, ValidationReport};
pub use ktheory::{
    af_k0_truncated, crossed_product_k0, group_algebra_decomposition, FiniteGroupTower, KTheoryDescriptor,
    TraceGenerator,
};
pub use lattice::{
    companion_tori, companions, distinguished_index, endomorphism_ring, normalize_pseudolattice, Companion,
    PseudoLattice, QuadraticOrder,
};
pub use predict::{predict, predict_order, sha_doubling, Prediction};
pub use quadratic::{
    cf_expand, cf_value, fundamental_unit, gl2z_equivalent, kronecker, order_fundamental_unit, parse_theta,
    ContinuedFraction, FundamentalUnit, QuadraticInteger, QuadraticIrrational, QuadraticNumber,
};

/// JSON number when it fits in 64 bits, decimal string otherwise.
pub(crate) fn json_int(n: &BigInt) -> serde_json::Value {
    if let Some(v) = n.to_i64() {
        v.into()
    } else if let Some(v) = n.to_u64() {
        v.into()
    } else {
        n.to_string().into()
    }
}

pub(crate) fn serialize_display<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `{"invariant_factors": [...], "order": n}`
pub(crate) struct GroupJson<'a>(pub &'a AbelianGroupStructure);

impl Serialize for GroupJson<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Group", 2)?;
        st.serialize_field("invariant_factors", self.0.invariant_factors())?;
        st.serialize_field("order", &self.0.order())?;
        st.end()
    }
}
