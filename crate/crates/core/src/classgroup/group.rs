use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::factor_u64;
use crate::error::{Error, Result};

/// A finite abelian group `Z/d₁ ⊕ … ⊕ Z/d_r` in invariant-factor form,
/// `d₁ | d₂ | … | d_r`, every `dᵢ ≥ 2`. The empty list is the trivial group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct AbelianGroupStructure {
    invariant_factors: Vec<u64>,
}

impl AbelianGroupStructure {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Validates an invariant-factor chain.
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self> {
        if invariant_factors.iter().any(|&d| d < 2) {
            return Err(Error::InvalidGroup(format!(
                "invariant factors must be >= 2, got {invariant_factors:?}"
            )));
        }
        if invariant_factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidGroup(format!(
                "{invariant_factors:?} is not a divisibility chain"
            )));
        }
        Ok(Self { invariant_factors })
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_cyclic_orders(&[n])
    }

    /// Normal form of `Z/n₁ ⊕ … ⊕ Z/n_k` for arbitrary `nᵢ ≥ 1`.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &n in orders {
            for (p, e) in factor_u64(n) {
                by_prime.entry(p).or_default().push(e);
            }
        }
        Self::from_prime_powers(by_prime)
    }

    /// Assembles invariant factors from the exponents of each primary part.
    fn from_prime_powers(mut by_prime: BTreeMap<u64, Vec<u32>>) -> Self {
        let rank = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for (p, exps) in by_prime.iter_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (i, &e) in exps.iter().enumerate() {
                factors[i] *= p.pow(e);
            }
        }
        factors.reverse();
        Self {
            invariant_factors: factors,
        }
    }

    /// Structure of a finite abelian group from the multiset of its element
    /// orders: `#{g : g^{p^k} = 1} = p^{Σ min(k, eᵢ)}` fixes every primary part.
    pub fn from_element_orders(orders: &[u64]) -> Result<Self> {
        let n = orders.len() as u64;
        let mut by_prime = BTreeMap::new();
        for (p, e) in factor_u64(n) {
            let mut prev_log = 0u32;
            let mut at_least: Vec<u32> = Vec::new();
            for k in 1..=e {
                let pk = p.pow(k);
                let count = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                let log = ilog_exact(count, p).ok_or_else(|| {
                    Error::Invariant(format!("{count} elements of order dividing {pk} is not a power of {p}"))
                })?;
                at_least.push(log - prev_log);
                prev_log = log;
            }
            if prev_log != e {
                return Err(Error::Invariant(format!(
                    "element orders do not describe an abelian group of order {n}"
                )));
            }
            // at_least[k-1] = number of cyclic factors with exponent ≥ k
            let mut exps = Vec::new();
            for k in 1..=e as usize {
                let here = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
                exps.extend(std::iter::repeat(k as u32).take(here as usize));
            }
            by_prime.insert(p, exps);
        }
        Ok(Self::from_prime_powers(by_prime))
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// `G ⊕ H` in normal form.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let all: Vec<u64> = self
            .invariant_factors
            .iter()
            .chain(&other.invariant_factors)
            .copied()
            .collect();
        Self::from_cyclic_orders(&all)
    }

    /// Order of the element with coordinates `x` (`xᵢ` taken mod `dᵢ`).
    pub fn element_order(&self, x: &[u64]) -> u64 {
        self.invariant_factors
            .iter()
            .zip(x)
            .map(|(&d, &xi)| d / num_integer::gcd(d, xi % d))
            .fold(1, num_integer::lcm)
    }
}

fn ilog_exact(mut n: u64, p: u64) -> Option<u32> {
    let mut e = 0;
    while n > 1 {
        if n % p != 0 {
            return None;
        }
        n /= p;
        e += 1;
    }
    (n == 1).then_some(e)
}

impl TryFrom<Vec<u64>> for AbelianGroupStructure {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<AbelianGroupStructure> for Vec<u64> {
    fn from(g: AbelianGroupStructure) -> Self {
        g.invariant_factors
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return f.write_str("trivial");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        f.write_str(&parts.join(" + "))
    }
}
