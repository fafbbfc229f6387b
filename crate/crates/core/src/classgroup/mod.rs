//! Class numbers and class groups of real quadratic orders.
//!
//! Ideal classes are computed through indefinite binary quadratic forms:
//! proper equivalence classes of primitive forms of discriminant `Δ` give the
//! narrow class group, and the (wide) class group is its quotient by the
//! class of the form representing `−1`.

mod form;
mod group;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::QuadraticOrder;
use crate::quadratic::{fundamental_unit, kronecker, QuadraticInteger};

pub use form::{compose, reduce_cycle, reduced_forms, BinaryQuadraticForm, FormClassGroup};
pub use group::AbelianGroupStructure;

/// Largest discriminant the brute-force class-group routines accept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscBound(u64);

impl DiscBound {
    pub const DEFAULT: u64 = 1_000_000;
    /// Hard ceiling: keeps composition intermediates inside `i128`.
    pub const CEILING: u64 = 1_000_000_000_000;

    pub fn new(bound: u64) -> Result<Self> {
        if bound == 0 || bound > Self::CEILING {
            Err(Error::InvalidBound(bound))
        } else {
            Ok(Self(bound))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// The discriminant as a machine integer, if it is within the bound.
    pub fn check(self, disc: &BigInt) -> Result<i64> {
        match disc.to_u64() {
            Some(d) if d <= self.0 => Ok(d as i64),
            _ => Err(Error::DiscriminantTooLarge {
                disc: disc.clone(),
                bound: self.0,
            }),
        }
    }
}

impl Default for DiscBound {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

/// Narrow form classes of the order's discriminant.
pub fn form_class_group(order: &QuadraticOrder, bound: DiscBound) -> Result<FormClassGroup> {
    FormClassGroup::new(bound.check(&order.discriminant())?)
}

/// Wide class number `h` of `O_k`, `k = Q(√D)`: the number of reduced-form
/// cycles of discriminant `d_K` is `h⁺`, and `h = h⁺` when `N(ε) = −1`,
/// `h = h⁺/2` otherwise.
pub fn class_number_maximal(d: &BigInt, bound: DiscBound) -> Result<u64> {
    let order = QuadraticOrder::maximal(d.clone())?;
    let narrow = form_class_group(&order, bound)?.narrow_class_number() as u64;
    if fundamental_unit(d).norm == -1 {
        Ok(narrow)
    } else if narrow % 2 == 0 {
        Ok(narrow / 2)
    } else {
        Err(Error::Invariant(format!(
            "odd narrow class number {narrow} with N(ε) = +1 for D = {d}"
        )))
    }
}

/// `[O_k^× : Λ^×]`: the least `n ≥ 1` with `εⁿ ∈ Z + fO_k`.
///
/// Powers are tracked modulo `f`; `x + yω ∈ Z + fO_k ⇔ f | y`. The search is
/// bounded by `f²`, which exceeds the order of `(O_k/fO_k)^×`.
pub fn unit_index(order: &QuadraticOrder) -> Result<BigInt> {
    let f = order.conductor();
    if f.is_one() {
        return Ok(BigInt::one());
    }
    let eps = fundamental_unit(order.d()).unit;
    let reduce = |q: QuadraticInteger| {
        QuadraticInteger::new(q.x.mod_floor(f), q.y.mod_floor(f), q.d)
    };
    let eps = reduce(eps);
    let mut pow = eps.clone();
    let mut n = BigInt::one();
    let limit = f * f;
    while !pow.y.is_zero() {
        pow = reduce(pow.mul(&eps));
        n += 1;
        if n > limit {
            return Err(Error::Invariant(format!(
                "unit index search for {order} exceeded the bound f² = {limit}"
            )));
        }
    }
    Ok(n)
}

/// `h_Λ = h · (f/e_f) · ∏_{p | f} (1 − (d_K|p)/p)`, evaluated in exact
/// rationals.
pub fn class_number_order(order: &QuadraticOrder, bound: DiscBound) -> Result<u64> {
    let h = class_number_maximal(order.d(), bound)?;
    let f = order.conductor();
    let e = unit_index(order)?;
    let d_k = order.field_discriminant();
    let mut value = BigRational::new(BigInt::from(h) * f, e);
    for p in arith::prime_divisors(f) {
        let chi = BigInt::from(kronecker(&d_k, &p));
        value *= BigRational::new(&p - chi, p);
    }
    if !value.is_integer() || !value.is_positive() {
        return Err(Error::Invariant(format!(
            "conductor formula gave non-integral h = {value} for {order}"
        )));
    }
    let h_order = value
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Invariant(format!("class number of {order} overflows u64")))?;
    if h_order % h != 0 {
        return Err(Error::Invariant(format!(
            "h = {h} does not divide h_Λ = {h_order} for {order}"
        )));
    }
    Ok(h_order)
}

/// Invariant factors of `Cl(Λ)`, computed by composing reduced forms and
/// cross-checked against [`class_number_order`].
pub fn class_group_structure(order: &QuadraticOrder, bound: DiscBound) -> Result<AbelianGroupStructure> {
    let group = form_class_group(order, bound)?.wide_structure()?;
    let h = class_number_order(order, bound)?;
    if group.order() != h {
        return Err(Error::Invariant(format!(
            "composition group of {order} has order {} but the conductor formula gives {h}",
            group.order()
        )));
    }
    Ok(group)
}

/// `Gal(K_ab | k) ≅ Cl(Λ)`, with `K_ab` the ring class field of conductor `f`.
pub fn galois_group_kab(order: &QuadraticOrder, bound: DiscBound) -> Result<AbelianGroupStructure> {
    class_group_structure(order, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(d: i64, f: i64) -> QuadraticOrder {
        QuadraticOrder::new(d.into(), f.into()).unwrap()
    }

    /// Exact powers of ε until the `ω`-coefficient is divisible by `f`.
    fn unit_index_oracle(d: i64, f: i64) -> u64 {
        let eps = fundamental_unit(&d.into()).unit;
        let mut pow = eps.clone();
        let mut n = 1;
        while !(&pow.y % BigInt::from(f)).is_zero() {
            pow = pow.mul(&eps);
            n += 1;
        }
        n
    }

    #[test]
    fn unit_index_spot_values() {
        assert_eq!(unit_index_oracle(5, 2), 3);
        assert_eq!(unit_index(&order(5, 2)).unwrap(), 3.into());
        assert_eq!(unit_index_oracle(2, 2), 2);
        assert_eq!(unit_index(&order(2, 2)).unwrap(), 2.into());
        assert_eq!(unit_index(&order(7, 1)).unwrap(), 1.into());
    }

    #[test]
    fn unit_index_matches_exact_powers() {
        for d in [2i64, 3, 5, 6, 7, 10, 13, 17, 21, 29, 41] {
            for f in 1..=12 {
                assert_eq!(unit_index(&order(d, f)).unwrap(), unit_index_oracle(d, f).into(), "D={d} f={f}");
            }
        }
    }

    #[test]
    fn unit_index_agrees_with_order_unit() {
        // ε^{e_f} is the fundamental unit of Z + fO_k, read off the
        // continued fraction of f·ω.
        use crate::quadratic::{order_fundamental_unit, QuadraticIrrational};
        for d in [2i64, 3, 5, 13, 19, 46] {
            for f in 1..=8i64 {
                let omega = QuadraticInteger::omega(&d.into());
                let f_omega = QuadraticIrrational::try_from(omega.as_number().scale(&f.into())).unwrap();
                let eta = order_fundamental_unit(&f_omega);
                let e = unit_index(&order(d, f)).unwrap();
                let eps = fundamental_unit(&d.into()).unit.to_number();
                let mut pow = eps.clone();
                for _ in 1..e.to_u64().unwrap() {
                    pow = pow.try_mul(&eps).unwrap();
                }
                assert_eq!(eta, pow, "D={d} f={f}");
            }
        }
    }

    #[test]
    fn class_number_spot_values() {
        let b = DiscBound::default();
        assert_eq!(class_number_maximal(&5.into(), b).unwrap(), 1);
        assert_eq!(class_number_maximal(&10.into(), b).unwrap(), 2);
        assert_eq!(class_number_maximal(&2.into(), b).unwrap(), 1);
        assert_eq!(class_number_maximal(&3.into(), b).unwrap(), 1);
        assert_eq!(class_number_maximal(&79.into(), b).unwrap(), 3);
        assert_eq!(class_number_order(&order(5, 2), b).unwrap(), 1);
        assert_eq!(class_number_order(&order(2, 2), b).unwrap(), 1);
        assert_eq!(class_number_order(&order(10, 1), b).unwrap(), 2);
        // d_K = 12, p = 2 divides d_K: (12|2) = 0, whereas (3|2) = −1 would give 3/2.
        assert_eq!(class_number_order(&order(3, 2), b).unwrap(), 1);
    }

    #[test]
    fn structures() {
        let b = DiscBound::default();
        assert!(class_group_structure(&order(5, 1), b).unwrap().is_trivial());
        assert_eq!(class_group_structure(&order(10, 1), b).unwrap().invariant_factors(), &[2]);
        assert_eq!(galois_group_kab(&order(10, 1), b).unwrap(), class_group_structure(&order(10, 1), b).unwrap());
        // Q(√79): h = 3
        assert_eq!(class_group_structure(&order(79, 1), b).unwrap().invariant_factors(), &[3]);
    }

    #[test]
    fn bound_enforced() {
        let small = DiscBound::new(100).unwrap();
        match class_group_structure(&order(101, 1), small) {
            Err(Error::DiscriminantTooLarge { bound, .. }) => assert_eq!(bound, 100),
            other => panic!("{other:?}"),
        }
        assert!(DiscBound::new(0).is_err());
        assert!(DiscBound::new(DiscBound::CEILING + 1).is_err());
    }
}
