//! Periodic continued fractions of quadratic irrationals.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{QuadraticIrrational, QuadraticNumber};
use crate::arith;
use crate::error::{Error, Result};

/// Complete quotient `(p + √n)/q` with `q | n − p²`, where `n = s²·D`.
///
/// This is the exact recurrence state of the expansion; `s` and `D` are kept
/// separately so a state can be turned back into a field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Surd {
    pub p: BigInt,
    pub q: BigInt,
    pub s: BigInt,
    pub d: BigInt,
    /// `s²·D`, cached.
    n: BigInt,
    /// `⌊√n⌋`, cached.
    root: BigInt,
}

impl Surd {
    pub fn from_irrational(theta: &QuadraticIrrational) -> Self {
        let (a, b, c, d) = (theta.a(), theta.b(), theta.c(), theta.d());
        let (mut p, mut q) = if b.is_positive() {
            (a.clone(), c.clone())
        } else {
            (-a, -c)
        };
        let mut s = b.abs();
        let mut n = &s * &s * d;
        if !((&n - &p * &p) % &q).is_zero() {
            let m = q.abs();
            p *= &m;
            s *= &m;
            n *= &m * &m;
            q *= m;
        }
        let root = arith::isqrt(&n);
        Self {
            p,
            q,
            s,
            d: d.clone(),
            n,
            root,
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.q.is_positive() {
            (&self.p + &self.root).div_floor(&self.q)
        } else {
            (-&self.p - &self.root - 1i32).div_floor(&(-&self.q))
        }
    }

    /// Returns the partial quotient and advances to the next complete quotient.
    pub fn step(&mut self) -> BigInt {
        let a = self.floor();
        let p = &a * &self.q - &self.p;
        let q = (&self.n - &p * &p) / &self.q;
        debug_assert!(((&self.n - &p * &p) % &self.q).is_zero());
        self.p = p;
        self.q = q;
        a
    }

    pub fn key(&self) -> (BigInt, BigInt) {
        (self.p.clone(), self.q.clone())
    }

    pub fn value(&self) -> QuadraticNumber {
        QuadraticNumber::from_parts(self.p.clone(), self.s.clone(), self.q.clone(), self.d.clone())
    }

    /// `n = s²D`; the classical bounds `0 < p < √n`, `0 < q < 2√n` hold on the period.
    #[cfg(test)]
    pub fn radicand(&self) -> &BigInt {
        &self.n
    }
}

/// An eventually periodic continued fraction `[preperiod; period̅]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    preperiod: Vec<BigInt>,
    period: Vec<BigInt>,
}

impl ContinuedFraction {
    /// Validates the quotients and reduces both parts to their minimal form.
    pub fn new(preperiod: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidContinuedFraction("continued fraction period is empty".into()));
        }
        if period.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidContinuedFraction("period quotients must be >= 1".into()));
        }
        if preperiod.iter().skip(1).any(|x| !x.is_positive()) {
            return Err(Error::InvalidContinuedFraction(
                "partial quotients after the first must be >= 1".into(),
            ));
        }
        let mut cf = Self { preperiod, period };
        cf.minimize();
        Ok(cf)
    }

    fn minimize(&mut self) {
        let l = self.period.len();
        if let Some(k) = (1..=l)
            .filter(|k| l % k == 0)
            .find(|&k| (k..l).all(|i| self.period[i] == self.period[i - k]))
        {
            self.period.truncate(k);
        }
        while self.preperiod.last() == self.period.last() && !self.preperiod.is_empty() {
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn preperiod(&self) -> &[BigInt] {
        &self.preperiod
    }

    pub fn period(&self) -> &[BigInt] {
        &self.period
    }

    /// Whether the two minimal periods agree up to cyclic rotation.
    pub fn same_tail(&self, other: &Self) -> bool {
        let (x, y) = (&self.period, &other.period);
        x.len() == y.len() && (0..x.len()).any(|r| (0..x.len()).all(|i| x[(i + r) % x.len()] == y[i]))
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        write!(
            f,
            "preperiod=[{}] period=[{}]",
            join(&self.preperiod),
            join(&self.period)
        )
    }
}

impl Serialize for ContinuedFraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let nums = |v: &[BigInt]| -> Vec<serde_json::Value> { v.iter().map(crate::json_int).collect() };
        let mut st = s.serialize_struct("ContinuedFraction", 2)?;
        st.serialize_field("preperiod", &nums(&self.preperiod))?;
        st.serialize_field("period", &nums(&self.period))?;
        st.end()
    }
}

/// Expansion trace: partial quotients, the complete quotient at the start of
/// the period, and the index at which the period starts.
pub(crate) struct Expansion {
    pub quotients: Vec<BigInt>,
    pub period_start: usize,
    pub period_state: Surd,
}

pub(crate) fn expand(theta: &QuadraticIrrational) -> Expansion {
    let mut state = Surd::from_irrational(theta);
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients = Vec::new();
    loop {
        if let Some(&start) = seen.get(&state.key()) {
            return Expansion {
                quotients,
                period_start: start,
                period_state: state,
            };
        }
        seen.insert(state.key(), quotients.len());
        quotients.push(state.step());
    }
}

/// Periodic continued fraction of `theta`, found by detecting the first
/// repeated `(p, q)` state of the exact recurrence.
pub fn cf_expand(theta: &QuadraticIrrational) -> ContinuedFraction {
    let Expansion {
        mut quotients,
        period_start,
        ..
    } = expand(theta);
    let period = quotients.split_off(period_start);
    // The state sequence is injective before the first repeat, so both parts are minimal already.
    ContinuedFraction {
        preperiod: quotients,
        period,
    }
}

/// Convergent matrix `[[p_k, p_{k-1}], [q_k, q_{k-1}]]` of a quotient block.
pub(crate) fn convergent_matrix(quotients: &[BigInt]) -> [[BigInt; 2]; 2] {
    let mut m = [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ];
    for a in quotients {
        let p = a * &m[0][0] + &m[0][1];
        let q = a * &m[1][0] + &m[1][1];
        m = [
            [p, std::mem::take(&mut m[0][0])],
            [q, std::mem::take(&mut m[1][0])],
        ];
    }
    m
}

/// The quadratic irrational whose expansion is `cf`.
pub fn cf_value(cf: &ContinuedFraction) -> Result<QuadraticIrrational> {
    // x = (P x + P')/(Q x + Q')  ⇒  Q x² + (Q' − P) x − P' = 0, x > 1
    let [[p, p1], [q, q1]] = convergent_matrix(&cf.period);
    // Primitive first, so the radicand stays the size of the order's discriminant.
    let g = arith::gcd3(&q, &(&q1 - &p), &p1);
    let (q, p1) = (&q / &g, &p1 / &g);
    let lin = (&q1 - &p) / &g;
    let disc = &lin * &lin + BigInt::from(4) * &q * &p1;
    if arith::is_square(&disc) {
        return Err(Error::RationalValue(format!("period {cf} has a rational fixed point")));
    }
    let tail = QuadraticNumber::new(-lin, BigInt::one(), BigInt::from(2) * q, disc)?;
    let [[a, b], [c, d]] = convergent_matrix(&cf.preperiod);
    let d_field = tail.d().clone();
    let lift = |k: &BigInt| QuadraticNumber::from_integer(k.clone(), &d_field);
    let num = tail.try_mul(&lift(&a))?.try_add(&lift(&b))?;
    let den = tail.try_mul(&lift(&c))?.try_add(&lift(&d))?;
    QuadraticIrrational::try_from(num.try_div(&den)?)
}

/// Whether `t2 = (p·t1 + q)/(r·t1 + s)` for an integer matrix of determinant
/// ±1, decided by comparing the period cycles of the two expansions.
pub fn gl2z_equivalent(t1: &QuadraticIrrational, t2: &QuadraticIrrational) -> Result<bool> {
    if t1.d() != t2.d() {
        return Err(Error::FieldMismatch {
            left: t1.d().clone(),
            right: t2.d().clone(),
        });
    }
    Ok(cf_expand(t1).same_tail(&cf_expand(t2)))
}
