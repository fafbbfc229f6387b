//! Rank and Shafarevich-Tate predictions from the class group of `End(Z + θZ)`.

use serde::Serialize;

use crate::classgroup::{class_group_structure, AbelianGroupStructure, DiscBound};
use crate::error::{Error, Result};
use crate::lattice::{endomorphism_ring, QuadraticOrder};
use crate::quadratic::QuadraticIrrational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub order: QuadraticOrder,
    pub h_lambda: u64,
    /// `h_Λ − 1`
    pub rank: u64,
    /// `Cl(Λ) ⊕ Cl(Λ)`
    pub sha_structure: AbelianGroupStructure,
    pub sha_order: u64,
    pub k0_rank: u64,
}

impl Prediction {
    fn check(&self) -> Result<()> {
        let ok = self.rank + 1 == self.h_lambda
            && self.sha_order == self.sha_structure.order()
            && Some(self.sha_order) == self.h_lambda.checked_mul(self.h_lambda)
            && self.sha_order == (1 + self.rank) * (1 + self.rank)
            && self.k0_rank == self.h_lambda + 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!("inconsistent prediction {self:?}")))
        }
    }
}

#[derive(Serialize)]
struct PredictionJson<'a> {
    #[serde(rename = "D")]
    d: serde_json::Value,
    f: serde_json::Value,
    h: u64,
    rank: u64,
    sha: crate::GroupJson<'a>,
    k0_rank: u64,
}

impl Serialize for Prediction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PredictionJson {
            d: crate::json_int(self.order.d()),
            f: crate::json_int(self.order.conductor()),
            h: self.h_lambda,
            rank: self.rank,
            sha: crate::GroupJson(&self.sha_structure),
            k0_rank: self.k0_rank,
        }
        .serialize(s)
    }
}

/// `Cl ⊕ Cl` in invariant-factor form.
pub fn sha_doubling(cl: &AbelianGroupStructure) -> AbelianGroupStructure {
    cl.direct_sum(cl)
}

pub fn predict_order(order: &QuadraticOrder, bound: DiscBound) -> Result<Prediction> {
    let cl = class_group_structure(order, bound)?;
    let h = cl.order();
    let sha_structure = sha_doubling(&cl);
    let p = Prediction {
        order: order.clone(),
        h_lambda: h,
        rank: h - 1,
        sha_order: sha_structure.order(),
        sha_structure,
        k0_rank: h + 1,
    };
    p.check()?;
    Ok(p)
}

/// Predicted Mordell-Weil rank and Shafarevich-Tate group for the curve
/// attached to the torus with parameter `theta`.
pub fn predict(theta: &QuadraticIrrational, bound: DiscBound) -> Result<Prediction> {
    predict_order(&endomorphism_ring(theta), bound)
}
