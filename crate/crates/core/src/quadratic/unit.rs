use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::cf::{convergent_matrix, expand};
use super::{QuadraticIrrational, QuadraticNumber};

/// `x + y·ω` in the ring of integers of `Q(√D)`, where `ω = √D` for
/// `D ≡ 2, 3 (mod 4)` and `ω = (1 + √D)/2` for `D ≡ 1 (mod 4)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticInteger {
    pub x: BigInt,
    pub y: BigInt,
    pub d: BigInt,
}

pub(crate) fn is_one_mod_four(d: &BigInt) -> bool {
    d.mod_floor(&BigInt::from(4)).is_one()
}

impl QuadraticInteger {
    pub fn new(x: BigInt, y: BigInt, d: BigInt) -> Self {
        Self { x, y, d }
    }

    /// The generator `ω` of `O_k = Z[ω]`.
    pub fn omega(d: &BigInt) -> QuadraticIrrational {
        let n = if is_one_mod_four(d) {
            QuadraticNumber::from_parts(BigInt::one(), BigInt::one(), BigInt::from(2), d.clone())
        } else {
            QuadraticNumber::sqrt_d(d)
        };
        QuadraticIrrational::try_from(n).expect("ω is irrational")
    }

    /// Coordinates of `n` in the `ω`-basis, or `None` when `n ∉ O_k`.
    pub fn from_number(n: &QuadraticNumber) -> Option<Self> {
        let (a, b) = n.coords();
        let (x, y) = if is_one_mod_four(n.d()) {
            let y = &b * BigInt::from(2);
            (a - &b, y)
        } else {
            (a, b)
        };
        if x.is_integer() && y.is_integer() {
            Some(Self::new(x.to_integer(), y.to_integer(), n.d().clone()))
        } else {
            None
        }
    }

    pub fn to_number(&self) -> QuadraticNumber {
        if is_one_mod_four(&self.d) {
            QuadraticNumber::from_parts(
                BigInt::from(2) * &self.x + &self.y,
                self.y.clone(),
                BigInt::from(2),
                self.d.clone(),
            )
        } else {
            QuadraticNumber::from_parts(self.x.clone(), self.y.clone(), BigInt::one(), self.d.clone())
        }
    }

    pub fn norm(&self) -> BigInt {
        let (x, y) = (&self.x, &self.y);
        if is_one_mod_four(&self.d) {
            let k: BigInt = (&self.d - 1) / 4;
            x * x + x * y - k * y * y
        } else {
            x * x - &self.d * y * y
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.d, other.d);
        // ω² = ω + (D−1)/4  or  ω² = D
        let (x1, y1, x2, y2) = (&self.x, &self.y, &other.x, &other.y);
        let yy = y1 * y2;
        if is_one_mod_four(&self.d) {
            let k: BigInt = (&self.d - 1) / 4;
            Self::new(x1 * x2 + &k * &yy, x1 * y2 + x2 * y1 + yy, self.d.clone())
        } else {
            Self::new(x1 * x2 + &self.d * yy, x1 * y2 + x2 * y1, self.d.clone())
        }
    }
}

impl fmt::Display for QuadraticInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_number())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub unit: QuadraticInteger,
    /// `N(ε) ∈ {+1, −1}`.
    pub norm: i8,
}

/// Fundamental unit `> 1` of the endomorphism order of `Z + θZ`.
///
/// With `θ_m` the first purely periodic complete quotient and `q_k` the
/// convergent denominators of one period of length `l`, the unit is
/// `q_{l−1}·θ_m + q_{l−2}`: multiplication by it maps the basis `{1, θ_m}`
/// onto itself through a unimodular matrix.
pub fn order_fundamental_unit(theta: &QuadraticIrrational) -> QuadraticNumber {
    let ex = expand(theta);
    let period = &ex.quotients[ex.period_start..];
    let [_, [q, q_prev]] = convergent_matrix(period);
    let head = ex.period_state.value();
    head.scale(&q).add_integer(&q_prev)
}

/// Fundamental unit `ε > 1` of `O_k`, `k = Q(√D)`, and its norm.
pub fn fundamental_unit(d: &BigInt) -> FundamentalUnit {
    let eps = order_fundamental_unit(&QuadraticInteger::omega(d));
    let unit = QuadraticInteger::from_number(&eps).expect("unit of O_k is integral");
    let n = unit.norm();
    let norm = if n.is_one() {
        1
    } else {
        debug_assert_eq!(n, BigInt::from(-1));
        -1
    };
    FundamentalUnit { unit, norm }
}
