//! K-theory of the crossed product by the curve's Mordell-Weil group, and a
//! finite-depth model of the AF-algebra built from local cohomology.
//!
//! `K₀` of the crossed product is free of rank `h_Λ + 1`, with trace image
//! `Z + θZ + λ₁Z + … + λ_{h_Λ−1}Z`. The `λᵢ` are conjugate generators of
//! the ring class field normalized by the last one; no closed form for them
//! is used here, so they appear as labels attached to the nonprincipal
//! ideal classes.

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::classgroup::{galois_group_kab, AbelianGroupStructure, BinaryQuadraticForm, DiscBound};
use crate::error::{Error, Result};
use crate::lattice::{companions, endomorphism_ring, QuadraticOrder};
use crate::quadratic::QuadraticIrrational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TraceGenerator {
    One,
    Theta,
    /// `λ_index`, tied to a nonprincipal ideal class.
    Lambda {
        index: usize,
        class: BinaryQuadraticForm,
    },
}

impl fmt::Display for TraceGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::One => f.write_str("1"),
            Self::Theta => f.write_str("theta"),
            Self::Lambda { index, .. } => write!(f, "lambda_{index}"),
        }
    }
}

impl Serialize for TraceGenerator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KTheoryDescriptor {
    pub theta: QuadraticIrrational,
    pub order: QuadraticOrder,
    pub k0_rank: u64,
    pub trace_generators: Vec<TraceGenerator>,
    pub galois_group: AbelianGroupStructure,
}

impl KTheoryDescriptor {
    /// Nonprincipal classes carried by the `λ` labels.
    pub fn lambda_classes(&self) -> Vec<BinaryQuadraticForm> {
        self.trace_generators
            .iter()
            .filter_map(|g| match g {
                TraceGenerator::Lambda { class, .. } => Some(*class),
                _ => None,
            })
            .collect()
    }

    fn check(&self) -> Result<()> {
        let h = self.galois_group.order();
        let lambdas = self.lambda_classes();
        let distinct: HashSet<_> = lambdas.iter().collect();
        if self.k0_rank != h + 1
            || self.trace_generators.len() as u64 != self.k0_rank
            || distinct.len() != lambdas.len()
        {
            return Err(Error::Invariant(format!(
                "inconsistent K-theory descriptor for {}: rank {}, {} generators, |Gal| = {h}",
                self.theta,
                self.k0_rank,
                self.trace_generators.len()
            )));
        }
        Ok(())
    }
}

impl Serialize for KTheoryDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("KTheoryDescriptor", 7)?;
        st.serialize_field("theta", &self.theta.to_string())?;
        st.serialize_field("D", &crate::json_int(self.order.d()))?;
        st.serialize_field("f", &crate::json_int(self.order.conductor()))?;
        st.serialize_field("h", &self.galois_group.order())?;
        st.serialize_field("k0_rank", &self.k0_rank)?;
        st.serialize_field("trace_generators", &self.trace_generators)?;
        st.serialize_field("galois_group", &crate::GroupJson(&self.galois_group))?;
        st.end()
    }
}

/// K-theory descriptor of the crossed product for the torus with parameter
/// `theta`.
pub fn crossed_product_k0(theta: &QuadraticIrrational, bound: DiscBound) -> Result<KTheoryDescriptor> {
    let order = endomorphism_ring(theta);
    let galois_group = galois_group_kab(&order, bound)?;
    let classes = companions(&order, bound)?;
    // companions[0] is the principal class; the λ-tagged generators run over the rest.
    let mut trace_generators = vec![TraceGenerator::One, TraceGenerator::Theta];
    trace_generators.extend(classes.iter().skip(1).enumerate().map(|(i, c)| TraceGenerator::Lambda {
        index: i + 1,
        class: c.form,
    }));
    let descriptor = KTheoryDescriptor {
        theta: theta.clone(),
        order,
        k0_rank: galois_group.order() + 1,
        trace_generators,
        galois_group,
    };
    descriptor.check()?;
    Ok(descriptor)
}

/// Block sizes of `C[G] ≅ ⊕ M_{nᵢ}(C)`; for abelian `G` there are `|G|`
/// one-dimensional blocks, one per character.
pub fn group_algebra_decomposition(group: &AbelianGroupStructure) -> Vec<u64> {
    vec![1; group.order() as usize]
}

/// Element of a group `Z/d₁ ⊕ … ⊕ Z/d_r` as residues.
pub type GroupElement = Vec<u64>;

/// An ascending chain `G₁ ⊂ G₂ ⊂ …` of finite abelian groups. Inclusion `i`
/// maps `levels[i]` into `levels[i + 1]` and is given by the images of the
/// standard generators of `levels[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTower {
    levels: Vec<AbelianGroupStructure>,
    inclusions: Vec<Vec<GroupElement>>,
}

impl FiniteGroupTower {
    pub fn new(levels: Vec<AbelianGroupStructure>, inclusions: Vec<Vec<GroupElement>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidGroup("tower has no levels".into()));
        }
        if inclusions.len() + 1 != levels.len() {
            return Err(Error::InvalidGroup(format!(
                "{} levels need {} inclusions, got {}",
                levels.len(),
                levels.len() - 1,
                inclusions.len()
            )));
        }
        let tower = Self { levels, inclusions };
        for i in 0..tower.inclusions.len() {
            tower.check_inclusion(i)?;
        }
        Ok(tower)
    }

    /// A tower with the same group at every level and identity inclusions.
    pub fn constant(group: AbelianGroupStructure, depth: usize) -> Self {
        let r = group.rank();
        let identity: Vec<GroupElement> = (0..r)
            .map(|j| (0..r).map(|k| u64::from(j == k)).collect())
            .collect();
        Self {
            levels: vec![group; depth.max(1)],
            inclusions: vec![identity; depth.max(1) - 1],
        }
    }

    pub fn levels(&self) -> &[AbelianGroupStructure] {
        &self.levels
    }

    fn image(&self, level: usize, x: &[u64]) -> GroupElement {
        let target = self.levels[level + 1].invariant_factors();
        let mut out = vec![0u64; target.len()];
        for (coef, gen) in x.iter().zip(&self.inclusions[level]) {
            for (k, &d) in target.iter().enumerate() {
                out[k] = (out[k] + coef * gen[k]) % d;
            }
        }
        out
    }

    fn check_inclusion(&self, level: usize) -> Result<()> {
        let src = &self.levels[level];
        let dst = self.levels[level + 1].invariant_factors();
        let gens = &self.inclusions[level];
        let fail = |reason: String| Error::NonInjectiveInclusion { level, reason };
        if gens.len() != src.rank() {
            return Err(fail(format!("{} generator images for a group of rank {}", gens.len(), src.rank())));
        }
        for (j, (img, &d)) in gens.iter().zip(src.invariant_factors()).enumerate() {
            if img.len() != dst.len() {
                return Err(fail(format!("image of generator {j} has the wrong length")));
            }
            // A homomorphism sends a generator of order d to an element of order exactly d when injective.
            let ord = self.levels[level + 1].element_order(img);
            if ord != d {
                return Err(fail(format!("generator {j} has order {d} but its image has order {ord}")));
            }
        }
        let mut seen = HashSet::new();
        for x in elements(src) {
            if !seen.insert(self.image(level, &x)) {
                return Err(fail("two elements share an image".into()));
            }
        }
        Ok(())
    }
}

fn elements(g: &AbelianGroupStructure) -> Vec<GroupElement> {
    let mut out: Vec<GroupElement> = vec![vec![]];
    for &d in g.invariant_factors() {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..d).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// `K₀` of the AF-algebra of a tower truncated at finite depth: the direct
/// limit of an injective chain of finite groups stops at its top level.
pub fn af_k0_truncated(tower: &FiniteGroupTower) -> Result<AbelianGroupStructure> {
    for i in 0..tower.inclusions.len() {
        tower.check_inclusion(i)?;
    }
    Ok(tower.levels.last().cloned().expect("tower has a level"))
}
