//! Pseudo-lattices `Z + θZ` in a real quadratic field, their endomorphism
//! orders, and the companion tori sharing one order.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::classgroup::{form_class_group, BinaryQuadraticForm, DiscBound};
use crate::error::{Error, Result};
use crate::quadratic::{gl2z_equivalent, unit, QuadraticIrrational, QuadraticNumber};

/// The order `Λ = Z + f·O_k` of conductor `f` in `k = Q(√D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticOrder {
    d: BigInt,
    f: BigInt,
}

impl QuadraticOrder {
    pub fn new(d: BigInt, f: BigInt) -> Result<Self> {
        if d < BigInt::from(2) || !arith::is_squarefree(&d) {
            return Err(Error::InvalidRadicand(d));
        }
        if !f.is_positive() {
            return Err(Error::InvalidConductor(f));
        }
        Ok(Self { d, f })
    }

    pub fn maximal(d: BigInt) -> Result<Self> {
        Self::new(d, BigInt::one())
    }

    /// The order of discriminant `Δ`, for `Δ > 0` a non-square `≡ 0, 1 (mod 4)`.
    pub fn from_discriminant(disc: &BigInt) -> Result<Self> {
        let four = BigInt::from(4);
        let residue = disc.mod_floor(&four);
        let bad = || Error::BadDiscriminant(disc.to_i128().unwrap_or(i128::MAX));
        if !disc.is_positive() || arith::is_square(disc) || !(residue.is_zero() || residue.is_one()) {
            return Err(bad());
        }
        let (s, d) = arith::square_part(disc);
        let f = if unit::is_one_mod_four(&d) {
            s
        } else if (&s % 2u32).is_zero() {
            s / 2u32
        } else {
            return Err(bad());
        };
        Self::new(d, f)
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn conductor(&self) -> &BigInt {
        &self.f
    }

    /// `d_K = D` for `D ≡ 1 (mod 4)`, `4D` otherwise.
    pub fn field_discriminant(&self) -> BigInt {
        if unit::is_one_mod_four(&self.d) {
            self.d.clone()
        } else {
            BigInt::from(4) * &self.d
        }
    }

    /// `Δ = f²·d_K`.
    pub fn discriminant(&self) -> BigInt {
        &self.f * &self.f * self.field_discriminant()
    }

    pub fn is_maximal(&self) -> bool {
        self.f.is_one()
    }
}

impl fmt::Display for QuadraticOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order of conductor {} in Q(sqrt({}))", self.f, self.d)
    }
}

impl Serialize for QuadraticOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadraticOrder", 3)?;
        st.serialize_field("D", &crate::json_int(&self.d))?;
        st.serialize_field("f", &crate::json_int(&self.f))?;
        st.serialize_field("discriminant", &crate::json_int(&self.discriminant()))?;
        st.end()
    }
}

/// `End(Z + θZ)`: the order whose discriminant is that of the primitive
/// minimal polynomial of `θ`.
pub fn endomorphism_ring(theta: &QuadraticIrrational) -> QuadraticOrder {
    let disc = theta.discriminant();
    let d = theta.d().clone();
    let d_k = if unit::is_one_mod_four(&d) {
        d.clone()
    } else {
        BigInt::from(4) * &d
    };
    let f2 = &disc / &d_k;
    debug_assert!((&disc % &d_k).is_zero() && arith::is_square(&f2));
    QuadraticOrder {
        d,
        f: arith::isqrt(&f2),
    }
}

/// A finitely generated subgroup of `R` spanned by Z-independent elements of
/// one quadratic field; generator 0 is `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PseudoLattice {
    generators: Vec<QuadraticNumber>,
}

impl PseudoLattice {
    pub fn generators(&self) -> &[QuadraticNumber] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn field(&self) -> &BigInt {
        self.generators[0].d()
    }

    /// Endomorphism order of a rank-2 pseudo-lattice `Z + θZ`.
    pub fn endomorphism_ring(&self) -> Option<QuadraticOrder> {
        match self.generators.as_slice() {
            [_, theta] => QuadraticIrrational::try_from(theta.clone())
                .ok()
                .map(|t| endomorphism_ring(&t)),
            _ => None,
        }
    }
}

/// Rescales `gens` so that the leading generator becomes `1`.
///
/// A pseudo-lattice is only defined up to a real scalar, so the result is
/// the same for `gens` and `s·gens` for any nonzero `s` in the field.
pub fn normalize_pseudolattice(gens: &[QuadraticNumber]) -> Result<PseudoLattice> {
    let Some(lead) = gens.first() else {
        return Err(Error::EmptyGenerators);
    };
    for g in gens {
        if g.d() != lead.d() {
            return Err(Error::FieldMismatch {
                left: lead.d().clone(),
                right: g.d().clone(),
            });
        }
    }
    if lead.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let generators = gens
        .iter()
        .map(|g| g.try_div(lead))
        .collect::<Result<Vec<_>>>()?;
    if !independent(&generators) {
        return Err(Error::LinearDependence);
    }
    Ok(PseudoLattice { generators })
}

/// Z-independence of field elements, i.e. Q-independence of their
/// coordinate vectors in `Q ⊕ Q√D`.
fn independent(gens: &[QuadraticNumber]) -> bool {
    match gens {
        [] => true,
        [x] => !x.is_zero(),
        [x, y] => {
            let (x0, x1) = x.coords();
            let (y0, y1) = y.coords();
            !(x0 * y1 - x1 * y0).is_zero()
        }
        _ => false,
    }
}

/// One companion torus: the form class it comes from and its `θ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Companion {
    pub form: BinaryQuadraticForm,
    #[serde(serialize_with = "crate::serialize_display")]
    pub theta: QuadraticIrrational,
}

/// One companion per ideal class of `order`, ordered by `(a, b)` of the
/// chosen reduced form: the least form with `a > 0` over the class's cycles.
pub fn companions(order: &QuadraticOrder, bound: DiscBound) -> Result<Vec<Companion>> {
    let group = form_class_group(order, bound)?;
    let mut reps: Vec<BinaryQuadraticForm> = group
        .wide_classes()
        .iter()
        .map(|classes| {
            classes
                .iter()
                .flat_map(|&i| group.cycles()[i].iter())
                .filter(|f| f.a > 0)
                .min_by_key(|f| (f.a, f.b))
                .copied()
                .ok_or_else(|| Error::Invariant("form cycle without a positive leading coefficient".into()))
        })
        .collect::<Result<_>>()?;
    reps.sort_by_key(|f| (f.a, f.b));
    Ok(reps
        .into_iter()
        .map(|form| Companion {
            form,
            theta: form.root(),
        })
        .collect())
}

/// The `θ`s of [`companions`].
pub fn companion_tori(order: &QuadraticOrder, bound: DiscBound) -> Result<Vec<QuadraticIrrational>> {
    Ok(companions(order, bound)?.into_iter().map(|c| c.theta).collect())
}

/// Index of the companion that is `GL(2, Z)`-equivalent to `theta`.
pub fn distinguished_index(theta: &QuadraticIrrational, companions: &[Companion]) -> Result<usize> {
    for (i, c) in companions.iter().enumerate() {
        if gl2z_equivalent(theta, &c.theta)? {
            return Ok(i);
        }
    }
    Err(Error::Invariant(format!("{theta} matches none of its companions")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::parse_theta;

    fn qn(a: i64, b: i64, c: i64, d: i64) -> QuadraticNumber {
        QuadraticNumber::new(a.into(), b.into(), c.into(), d.into()).unwrap()
    }

    fn order(d: i64, f: i64) -> QuadraticOrder {
        QuadraticOrder::new(d.into(), f.into()).unwrap()
    }

    /// Minimal polynomial straight from `(cθ − a)² = b²D`, then the square
    /// part of its discriminant divided by `d_K`.
    fn conductor_oracle(a: i64, b: i64, c: i64, d: i64) -> i64 {
        let (p, q, r) = (c * c, -2 * a * c, a * a - b * b * d);
        let g = num_integer::gcd(num_integer::gcd(p, q), r);
        let (p, q, r) = (p / g, q / g, r / g);
        let disc = q * q - 4 * p * r;
        let dk = if d % 4 == 1 { d } else { 4 * d };
        let f = ((disc / dk) as f64).sqrt().round() as i64;
        assert_eq!(f * f * dk, disc);
        f
    }

    #[test]
    fn endomorphism_examples() {
        let phi = parse_theta("(1+sqrt(5))/2").unwrap();
        assert_eq!(endomorphism_ring(&phi), order(5, 1));
        assert_eq!(conductor_oracle(1, 1, 2, 5), 1);
        assert_eq!(endomorphism_ring(&parse_theta("sqrt(8)").unwrap()), order(2, 2));
        assert_eq!(conductor_oracle(0, 2, 1, 2), 2);
        assert_eq!(endomorphism_ring(&parse_theta("sqrt(2)").unwrap()), order(2, 1));
        assert_eq!(order(2, 2).discriminant(), 32.into());
    }

    #[test]
    fn from_discriminant_round_trip() {
        for d in [2i64, 3, 5, 6, 7, 10, 13, 15, 17] {
            for f in 1..=9 {
                let o = order(d, f);
                assert_eq!(QuadraticOrder::from_discriminant(&o.discriminant()).unwrap(), o);
            }
        }
        for bad in [0i64, -8, 16, 6, 7, 4 * 9] {
            assert!(QuadraticOrder::from_discriminant(&bad.into()).is_err(), "{bad}");
        }
    }

    #[test]
    fn endomorphism_matches_oracle() {
        for d in [2i64, 3, 5, 7, 13, 21] {
            for a in -6..=6 {
                for b in [-3i64, -1, 1, 2, 5] {
                    for c in 1..=7 {
                        let t = QuadraticIrrational::new(a.into(), b.into(), c.into(), d.into()).unwrap();
                        let (a, b, c) = (
                            i64::try_from(t.a()).unwrap(),
                            i64::try_from(t.b()).unwrap(),
                            i64::try_from(t.c()).unwrap(),
                        );
                        assert_eq!(endomorphism_ring(&t).conductor(), &conductor_oracle(a, b, c, d).into());
                    }
                }
            }
        }
    }

    #[test]
    fn order_validation() {
        assert!(QuadraticOrder::new(12.into(), 1.into()).is_err());
        assert!(QuadraticOrder::new(1.into(), 1.into()).is_err());
        assert!(QuadraticOrder::new(5.into(), 0.into()).is_err());
        for (d, f) in [(5, 1), (5, 3), (2, 1), (7, 2)] {
            let disc = order(d, f).discriminant();
            let r = disc.clone() % 4;
            assert!(r == 0.into() || r == 1.into());
        }
    }

    #[test]
    fn normalize_examples() {
        let theta = qn(1, 1, 2, 5);
        let one = QuadraticNumber::from_integer(1.into(), &5.into());
        let theta2 = theta.try_mul(&theta).unwrap();
        let pl = normalize_pseudolattice(&[theta.clone(), theta2]).unwrap();
        assert_eq!(pl.generators(), &[one.clone(), theta.clone()]);
        let two = QuadraticNumber::from_integer(2.into(), &5.into());
        let pl = normalize_pseudolattice(&[two.clone(), theta.scale(&2.into())]).unwrap();
        assert_eq!(pl.generators(), &[one.clone(), theta.clone()]);
        let dep = [one.clone(), theta.clone(), theta.add_integer(&1.into())];
        assert_eq!(normalize_pseudolattice(&dep), Err(Error::LinearDependence));
        assert_eq!(
            normalize_pseudolattice(&[one.clone(), two]),
            Err(Error::LinearDependence)
        );
        let zero = QuadraticNumber::from_integer(0.into(), &5.into());
        assert_eq!(normalize_pseudolattice(&[zero, theta.clone()]), Err(Error::DivisionByZero));
        assert!(normalize_pseudolattice(&[one, qn(0, 1, 1, 2)]).is_err());
        assert_eq!(normalize_pseudolattice(&[]), Err(Error::EmptyGenerators));
    }

    #[test]
    fn normalize_idempotent_and_scale_invariant() {
        let gens = [qn(3, -2, 5, 7), qn(1, 4, 3, 7)];
        let n1 = normalize_pseudolattice(&gens).unwrap();
        assert_eq!(normalize_pseudolattice(n1.generators()).unwrap(), n1);
        for s in [qn(2, 0, 1, 7), qn(-1, 3, 4, 7), qn(0, -5, 2, 7)] {
            let scaled: Vec<_> = gens.iter().map(|g| g.try_mul(&s).unwrap()).collect();
            assert_eq!(normalize_pseudolattice(&scaled).unwrap(), n1);
        }
    }

    #[test]
    fn companion_examples() {
        let b = DiscBound::default();
        let c5 = companion_tori(&order(5, 1), b).unwrap();
        assert_eq!(c5, vec![parse_theta("(-1+sqrt(5))/2").unwrap()]);
        let c10 = companion_tori(&order(10, 1), b).unwrap();
        assert_eq!(c10.len(), 2);
        assert!(!gl2z_equivalent(&c10[0], &c10[1]).unwrap());
        assert_eq!(companion_tori(&order(2, 1), b).unwrap().len(), 1);
    }

    #[test]
    fn companions_are_integral_after_scaling() {
        let b = DiscBound::default();
        for (d, f) in [(10, 1), (79, 1), (5, 4), (3, 5)] {
            for c in companions(&order(d, f), b).unwrap() {
                // a·θ is a root of x² + bx + ac
                let scaled = c.theta.as_number().scale(&c.form.a.into());
                assert!(scaled.is_algebraic_integer());
                assert_eq!(endomorphism_ring(&c.theta), order(d, f));
            }
        }
    }

    #[test]
    fn distinguished_class_of_input() {
        let b = DiscBound::default();
        let theta = parse_theta("sqrt(10)").unwrap();
        let comps = companions(&endomorphism_ring(&theta), b).unwrap();
        let i = distinguished_index(&theta, &comps).unwrap();
        assert!(gl2z_equivalent(&theta, &comps[i].theta).unwrap());
    }
}
