//! Exact arithmetic in real quadratic fields `Q(√D)`.
//!
//! Every value is stored as `(a + b√D)/c` with `D` squarefree, `c > 0` and
//! `gcd(a, b, c) = 1`, so two values are equal exactly when their fields are.
//! Nothing in here touches floating point.

mod cf;
mod kronecker;
mod parse;
pub(crate) mod unit;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};

pub use cf::{cf_expand, cf_value, gl2z_equivalent, ContinuedFraction};
pub use kronecker::kronecker;
pub use parse::parse_theta;
pub use unit::{fundamental_unit, order_fundamental_unit, FundamentalUnit, QuadraticInteger};

/// An element `(a + b√D)/c` of the real quadratic field `Q(√D)`.
///
/// Rational values (`b = 0`) are allowed; they still carry the field label `D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl QuadraticNumber {
    /// Builds `(a + b√d)/c`, absorbing any square factor of `d` into `b`.
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if d < BigInt::from(2) {
            return Err(Error::InvalidRadicand(d));
        }
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (s, r) = arith::square_part(&d);
        if r.is_one() {
            return Err(Error::InvalidRadicand(d));
        }
        Ok(Self::from_parts(a, b * s, c, r))
    }

    /// `d` must already be squarefree and > 1.
    pub(crate) fn from_parts(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        debug_assert!(!c.is_zero());
        let mut x = Self { a, b, c, d };
        x.normalize();
        x
    }

    pub fn from_integer(n: BigInt, d: &BigInt) -> Self {
        Self::from_parts(n, BigInt::zero(), BigInt::one(), d.clone())
    }

    pub fn from_rational(q: &BigRational, d: &BigInt) -> Self {
        Self::from_parts(q.numer().clone(), BigInt::zero(), q.denom().clone(), d.clone())
    }

    /// `√D` itself.
    pub fn sqrt_d(d: &BigInt) -> Self {
        Self::from_parts(BigInt::zero(), BigInt::one(), BigInt::one(), d.clone())
    }

    fn normalize(&mut self) {
        let g = arith::gcd3(&self.a, &self.b, &self.c);
        if !g.is_one() && !g.is_zero() {
            self.a /= &g;
            self.b /= &g;
            self.c /= &g;
        }
        if self.c.is_negative() {
            self.a = -&self.a;
            self.b = -&self.b;
            self.c = -&self.c;
        }
        if self.a.is_zero() && self.b.is_zero() {
            self.c = BigInt::one();
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    /// The squarefree field label.
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one() && self.c.is_one()
    }

    /// Rational coordinates `(x, y)` with value `x + y√D`.
    pub fn coords(&self) -> (BigRational, BigRational) {
        (
            BigRational::new(self.a.clone(), self.c.clone()),
            BigRational::new(self.b.clone(), self.c.clone()),
        )
    }

    pub fn conjugate(&self) -> Self {
        Self::from_parts(self.a.clone(), -&self.b, self.c.clone(), self.d.clone())
    }

    pub fn norm(&self) -> BigRational {
        BigRational::new(
            &self.a * &self.a - &self.b * &self.b * &self.d,
            &self.c * &self.c,
        )
    }

    pub fn trace(&self) -> BigRational {
        BigRational::new(BigInt::from(2) * &self.a, self.c.clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(-&self.a, -&self.b, self.c.clone(), self.d.clone())
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.d.clone(),
                right: other.d.clone(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self::from_parts(
            &self.a * &other.c + &other.a * &self.c,
            &self.b * &other.c + &other.b * &self.c,
            &self.c * &other.c,
            self.d.clone(),
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(Self::from_parts(
            &self.a * &other.a + &self.b * &other.b * &self.d,
            &self.a * &other.b + &self.b * &other.a,
            &self.c * &other.c,
            self.d.clone(),
        ))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // c/(a + b√D) = c(a − b√D)/(a² − b²D)
        let n = &self.a * &self.a - &self.b * &self.b * &self.d;
        Ok(Self::from_parts(
            &self.c * &self.a,
            -(&self.c * &self.b),
            n,
            self.d.clone(),
        ))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        self.try_mul(&other.recip()?)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_parts(&self.a * k, &self.b * k, self.c.clone(), self.d.clone())
    }

    pub fn add_integer(&self, k: &BigInt) -> Self {
        Self::from_parts(&self.a + k * &self.c, self.b.clone(), self.c.clone(), self.d.clone())
    }

    /// Sign of the real value.
    pub fn signum(&self) -> Ordering {
        sign_of_sum(&self.a, &self.b, &self.d)
    }

    /// `⌊value⌋`, computed exactly.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.div_floor(&self.c);
        }
        let r = arith::isqrt(&(&self.b * &self.b * &self.d));
        let fl = if self.b.is_positive() { r } else { -r - 1 };
        (&self.a + fl).div_floor(&self.c)
    }

    /// Exact comparison of two values in the same field.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(self.try_sub(other)?.signum())
    }

    /// Primitive integral polynomial `(A, B, C)` with positive leading
    /// coefficient vanishing at this value: `Ax² + Bx + C` for irrationals,
    /// `Bx + C` (with `A = 0`) for rationals.
    pub fn minimal_polynomial(&self) -> (BigInt, BigInt, BigInt) {
        if self.b.is_zero() {
            return (BigInt::zero(), self.c.clone(), -&self.a);
        }
        // (c x − a)² = b² D
        let aa = &self.c * &self.c;
        let bb = BigInt::from(-2) * &self.a * &self.c;
        let cc = &self.a * &self.a - &self.b * &self.b * &self.d;
        let g = arith::gcd3(&aa, &bb, &cc);
        (aa / &g, bb / &g, cc / &g)
    }

    /// Whether the value is an algebraic integer.
    pub fn is_algebraic_integer(&self) -> bool {
        let (lead, lin, _) = self.minimal_polynomial();
        if lead.is_zero() {
            lin.is_one()
        } else {
            lead.is_one()
        }
    }
}

/// Sign of `a + b√d`, `d` non-square positive.
pub(crate) fn sign_of_sum(a: &BigInt, b: &BigInt, d: &BigInt) -> Ordering {
    let sa = a.sign_cmp();
    let sb = b.sign_cmp();
    match (sa, sb) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (x, y) if x == y => x,
        _ => {
            // opposite signs: compare a² with b²d
            let lhs = a * a;
            let rhs = b * b * d;
            match lhs.cmp(&rhs) {
                Ordering::Greater => sa,
                Ordering::Less => sb,
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_surd(f, &self.a, &self.b, &self.c, &self.d)
    }
}

/// Renders in the same grammar `parse_theta` accepts.
fn write_surd(
    f: &mut fmt::Formatter<'_>,
    a: &BigInt,
    b: &BigInt,
    c: &BigInt,
    d: &BigInt,
) -> fmt::Result {
    let mut body = String::new();
    if b.is_zero() {
        body.push_str(&a.to_string());
    } else {
        let coeff = b.abs();
        let surd = if coeff.is_one() {
            format!("sqrt({d})")
        } else {
            format!("{coeff}*sqrt({d})")
        };
        if a.is_zero() {
            if b.is_negative() {
                body.push('-');
            }
            body.push_str(&surd);
        } else {
            let op = if b.is_negative() { '-' } else { '+' };
            body.push_str(&format!("{a} {op} {surd}"));
        }
    }
    if c.is_one() {
        f.write_str(&body)
    } else {
        write!(f, "({body})/{c}")
    }
}

/// A canonical irrational element `(a + b√D)/c`, `b ≠ 0`: the `θ` of a
/// noncommutative torus with real multiplication.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticIrrational(QuadraticNumber);

impl QuadraticIrrational {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        Self::try_from(QuadraticNumber::new(a, b, c, d)?)
    }

    pub fn a(&self) -> &BigInt {
        &self.0.a
    }
    pub fn b(&self) -> &BigInt {
        &self.0.b
    }
    pub fn c(&self) -> &BigInt {
        &self.0.c
    }
    pub fn d(&self) -> &BigInt {
        &self.0.d
    }

    pub fn as_number(&self) -> &QuadraticNumber {
        &self.0
    }

    pub fn into_number(self) -> QuadraticNumber {
        self.0
    }

    /// Primitive `(A, B, C)` with `A > 0` and `Aθ² + Bθ + C = 0`.
    pub fn minimal_polynomial(&self) -> (BigInt, BigInt, BigInt) {
        self.0.minimal_polynomial()
    }

    /// `B² − 4AC` of the primitive minimal polynomial.
    pub fn discriminant(&self) -> BigInt {
        let (a, b, c) = self.minimal_polynomial();
        &b * &b - BigInt::from(4) * a * c
    }

    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }
}

impl TryFrom<QuadraticNumber> for QuadraticIrrational {
    type Error = Error;

    fn try_from(x: QuadraticNumber) -> Result<Self> {
        if x.is_rational() {
            Err(Error::RationalValue(x.to_string()))
        } else {
            Ok(Self(x))
        }
    }
}

impl From<QuadraticIrrational> for QuadraticNumber {
    fn from(x: QuadraticIrrational) -> Self {
        x.0
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for QuadraticIrrational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_theta(s)
    }
}
