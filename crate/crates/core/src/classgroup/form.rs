use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use serde::Serialize;

use crate::arith::ext_gcd_i128;
use crate::error::{Error, Result};
use crate::quadratic::{QuadraticIrrational, QuadraticNumber};

/// Indefinite binary quadratic form `ax² + bxy + cy²` with positive
/// non-square discriminant `b² − 4ac`.
///
/// Coefficients are machine integers: every form handled here has
/// discriminant below the desk-scale bound, and reduced forms satisfy
/// `|a|, |b|, |c| < √Δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BinaryQuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryQuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
        if disc <= 0 || is_square_i128(disc) || disc > i64::MAX as i128 {
            return Err(Error::BadDiscriminant(disc));
        }
        Ok(Self { a, b, c })
    }

    /// `(1, b₀, (b₀² − Δ)/4)` with `b₀ ∈ {0, 1}`, `b₀ ≡ Δ (mod 2)`.
    pub fn principal(disc: i64) -> Self {
        let b = disc & 1;
        Self {
            a: 1,
            b,
            c: (b * b - disc) / 4,
        }
    }

    /// `(−1, b₀, (Δ − b₀²)/4)`: represents `−1`; its narrow class is
    /// principal exactly when the order has a unit of norm `−1`.
    pub fn negative_principal(disc: i64) -> Self {
        let b = disc & 1;
        Self {
            a: -1,
            b,
            c: (disc - b * b) / 4,
        }
    }

    pub fn discriminant(&self) -> i64 {
        (self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128) as i64
    }

    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// `(a, −b, c)`, the inverse class under composition.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.a,
            b: -self.b,
            c: self.c,
        }
    }

    /// `0 < b < √Δ` and `√Δ − b < 2|a| < √Δ + b`.
    pub fn is_reduced(&self) -> bool {
        let s = self.discriminant().sqrt();
        let two_a = 2 * self.a.abs();
        self.b > 0 && self.b <= s && self.b + two_a > s && two_a - self.b <= s
    }

    /// One step of the reduction operator: `(a, b, c) ↦ (c, b', (b'² − Δ)/4c)`
    /// with `b' ≡ −b (mod 2c)` in the normalizing interval. Properly
    /// equivalent to `self`; maps reduced forms to reduced forms.
    pub fn rho(&self) -> Self {
        let disc = self.discriminant() as i128;
        let s = (self.discriminant().sqrt()) as i128;
        let c = self.c as i128;
        let m = 2 * c.abs();
        let lo = if c.abs() > s { -c.abs() + 1 } else { s - m + 1 };
        let b = lo + (-(self.b as i128) - lo).rem_euclid(m);
        let c_new = (b * b - disc) / (4 * c);
        debug_assert_eq!((b * b - disc) % (4 * c), 0);
        Self {
            a: self.c,
            b: b as i64,
            c: c_new as i64,
        }
    }

    /// A reduced form properly equivalent to `self`.
    pub fn reduce(&self) -> Self {
        let mut f = *self;
        while !f.is_reduced() {
            f = f.rho();
        }
        f
    }

    /// The cycle of reduced forms through `self` (which must be reduced),
    /// starting at `self`.
    pub(crate) fn cycle_from(&self) -> Vec<Self> {
        debug_assert!(self.is_reduced());
        let mut out = vec![*self];
        let mut g = self.rho();
        while g != *self {
            out.push(g);
            g = g.rho();
        }
        out
    }

    /// Root `(−b + √Δ)/(2a)` of `ax² + bx + c`; the larger root when `a > 0`.
    pub fn root(&self) -> QuadraticIrrational {
        let n = QuadraticNumber::new(
            BigInt::from(-self.b),
            BigInt::from(1),
            BigInt::from(2 * self.a),
            BigInt::from(self.discriminant()),
        )
        .expect("non-square discriminant");
        QuadraticIrrational::try_from(n).expect("non-square discriminant")
    }

    /// Gauss composition of two forms of the same discriminant; the result
    /// is in the product narrow class but is not reduced.
    pub fn compose_unreduced(&self, other: &Self) -> Result<Self> {
        let disc = self.discriminant();
        if disc != other.discriminant() {
            return Err(Error::DiscriminantMismatch {
                left: disc,
                right: other.discriminant(),
            });
        }
        let (a1, b1) = (self.a as i128, self.b as i128);
        let (a2, b2) = (other.a as i128, other.b as i128);
        let d = disc as i128;
        let m = (b1 + b2) / 2;
        // e = gcd(a1, a2, m) = x·a1 + y·a2 + z·m
        let (g, x1, y1) = ext_gcd_i128(a1, a2);
        let (e, x2, z) = ext_gcd_i128(g, m);
        let (x, y) = (x2 * x1, x2 * y1);
        let a3 = a1 * a2 / (e * e);
        let num = a1 * b2 * x + a2 * b1 * y + z * ((b1 * b2 + d) / 2);
        debug_assert_eq!(num % e, 0);
        let two_a = 2 * a3.abs();
        let b3 = (num / e).rem_euclid(two_a);
        let c_num = b3 * b3 - d;
        if c_num % (4 * a3) != 0 {
            return Err(Error::Invariant(format!("composition of {self} and {other} is not integral")));
        }
        Ok(Self {
            a: a3 as i64,
            b: b3 as i64,
            c: (c_num / (4 * a3)) as i64,
        })
    }

    fn check_primitive(&self) -> Result<()> {
        if self.is_primitive() {
            Ok(())
        } else {
            Err(Error::ImprimitiveForm {
                a: self.a,
                b: self.b,
                c: self.c,
            })
        }
    }
}

impl fmt::Display for BinaryQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn is_square_i128(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = n.sqrt();
    r * r == n
}

/// The full cycle of reduced forms equivalent to `form`, starting from its
/// lexicographically least `(a, b)` member.
pub fn reduce_cycle(form: &BinaryQuadraticForm) -> Result<Vec<BinaryQuadraticForm>> {
    let form = BinaryQuadraticForm::new(form.a, form.b, form.c)?;
    form.check_primitive()?;
    let mut cycle = form.reduce().cycle_from();
    let (least, _) = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, f)| (f.a, f.b))
        .expect("cycle nonempty");
    cycle.rotate_left(least);
    Ok(cycle)
}

/// Gauss composition; the result is the least member of its reduced cycle.
pub fn compose(f: &BinaryQuadraticForm, g: &BinaryQuadraticForm) -> Result<BinaryQuadraticForm> {
    f.check_primitive()?;
    g.check_primitive()?;
    let h = f.compose_unreduced(g)?;
    Ok(reduce_cycle(&h)?[0])
}

/// Every primitive reduced form of discriminant `disc`, ascending.
pub fn reduced_forms(disc: i64) -> Vec<BinaryQuadraticForm> {
    let s = disc.sqrt();
    let mut out = Vec::new();
    let mut b = if (disc - s) % 2 == 0 { s } else { s - 1 };
    while b > 0 {
        let n = (disc - b * b) / 4;
        let lo = (s - b) / 2 + 1;
        let hi = (s + b) / 2;
        for a in lo..=hi {
            if n % a == 0 {
                let c = n / a;
                if a.gcd(&b).gcd(&c) == 1 {
                    out.push(BinaryQuadraticForm { a, b, c: -c });
                    out.push(BinaryQuadraticForm { a: -a, b, c });
                }
            }
        }
        b -= 2;
    }
    out.sort_unstable();
    out
}

/// The narrow (proper-equivalence) form classes of one discriminant, each
/// held as its cycle of reduced forms.
#[derive(Clone, Debug)]
pub struct FormClassGroup {
    disc: i64,
    cycles: Vec<Vec<BinaryQuadraticForm>>,
    index: HashMap<BinaryQuadraticForm, usize>,
    principal: usize,
    negative: usize,
}

impl FormClassGroup {
    /// Enumerates and partitions the reduced forms. `disc` must be a positive
    /// non-square `≡ 0, 1 (mod 4)`.
    pub fn new(disc: i64) -> Result<Self> {
        if disc <= 0 || is_square_i128(disc as i128) || disc.rem_euclid(4) > 1 {
            return Err(Error::BadDiscriminant(disc as i128));
        }
        let mut remaining: BTreeSet<BinaryQuadraticForm> = reduced_forms(disc).into_iter().collect();
        let mut cycles = Vec::new();
        let mut index = HashMap::new();
        while let Some(first) = remaining.pop_first() {
            let mut cycle = first.cycle_from();
            let (least, _) = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, f)| (f.a, f.b))
                .expect("nonempty");
            cycle.rotate_left(least);
            for f in &cycle {
                remaining.remove(f);
                index.insert(*f, cycles.len());
            }
            cycles.push(cycle);
        }
        let lookup = |f: BinaryQuadraticForm| index[&f.reduce()];
        let principal = lookup(BinaryQuadraticForm::principal(disc));
        let negative = lookup(BinaryQuadraticForm::negative_principal(disc));
        Ok(Self {
            disc,
            cycles,
            index,
            principal,
            negative,
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    /// Narrow class number `h⁺`.
    pub fn narrow_class_number(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycles(&self) -> &[Vec<BinaryQuadraticForm>] {
        &self.cycles
    }

    pub fn principal_class(&self) -> usize {
        self.principal
    }

    /// Narrow class of the form representing `−1`.
    pub fn negative_class(&self) -> usize {
        self.negative
    }

    /// Whether `−1` is represented by the principal form, i.e. the order has a
    /// unit of norm `−1`.
    pub fn has_negative_unit(&self) -> bool {
        self.negative == self.principal
    }

    pub fn class_of(&self, f: &BinaryQuadraticForm) -> Result<usize> {
        if f.discriminant() != self.disc {
            return Err(Error::DiscriminantMismatch {
                left: self.disc,
                right: f.discriminant(),
            });
        }
        f.check_primitive()?;
        Ok(self.index[&f.reduce()])
    }

    pub fn representative(&self, class: usize) -> BinaryQuadraticForm {
        self.cycles[class][0]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let h = self
            .representative(i)
            .compose_unreduced(&self.representative(j))
            .expect("same discriminant");
        self.index[&h.reduce()]
    }

    fn order_of(&self, mut step: impl FnMut(usize) -> usize, g: usize, identity: usize) -> u64 {
        let mut x = g;
        let mut n = 1;
        while x != identity {
            x = step(x);
            n += 1;
        }
        n
    }

    /// Structure of the narrow class group under composition.
    pub fn narrow_structure(&self) -> Result<super::AbelianGroupStructure> {
        let orders: Vec<u64> = (0..self.cycles.len())
            .map(|g| self.order_of(|x| self.mul(x, g), g, self.principal))
            .collect();
        super::AbelianGroupStructure::from_element_orders(&orders)
    }

    /// Label of the wide class containing narrow class `i`: the smaller of
    /// `i` and `i·[−1]`.
    pub fn wide_label(&self, i: usize) -> usize {
        if self.has_negative_unit() {
            i
        } else {
            i.min(self.mul(i, self.negative))
        }
    }

    /// Wide classes as groups of narrow class indices, ordered by label.
    pub fn wide_classes(&self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.cycles.len() {
            groups.entry(self.wide_label(i)).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Wide class number `h`: narrow classes modulo the class of `−1`.
    pub fn wide_class_number(&self) -> usize {
        self.wide_classes().len()
    }

    /// Structure of the wide (ordinary) class group: the narrow group
    /// modulo the subgroup generated by the class of `−1`.
    pub fn wide_structure(&self) -> Result<super::AbelianGroupStructure> {
        let identity = self.wide_label(self.principal);
        let orders: Vec<u64> = self
            .wide_classes()
            .iter()
            .map(|cls| {
                let g = cls[0];
                self.order_of(|x| self.wide_label(self.mul(x, g)), self.wide_label(g), identity)
            })
            .collect();
        super::AbelianGroupStructure::from_element_orders(&orders)
    }
}
