//! Finitely generated abelian groups given by relation matrices.
//!
//! A group on `n` generators is `Z^n` modulo the row span of its relation
//! matrix. Everything is decided through the Smith normal form computed once
//! at construction: the invariant factors are the canonical form, and two
//! groups are isomorphic exactly when their invariant factor lists agree.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{smith_normal_form, IntMatrix};
use crate::primes::require_prime;

#[derive(Clone, Debug)]
pub struct FgAbelianGroup {
    num_generators: usize,
    relations: IntMatrix,
    /// Full SNF diagonal padded to `num_generators` (0 marks a free factor).
    diagonal: Vec<BigInt>,
    /// Right transform of the SNF; `x * coords` gives canonical coordinates.
    coords: IntMatrix,
    invariant_factors: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn new(num_generators: usize, relations: IntMatrix) -> Result<Self> {
        if relations.cols() != num_generators {
            return Err(Error::DimensionMismatch(format!(
                "relations have {} columns but the group has {num_generators} generators",
                relations.cols()
            )));
        }
        let snf = smith_normal_form(&relations);
        let mut diagonal = snf.diagonal();
        diagonal.resize(num_generators, BigInt::zero());
        let invariant_factors = diagonal.iter().filter(|d| !d.is_one()).cloned().collect();
        Ok(FgAbelianGroup {
            num_generators,
            relations,
            diagonal,
            coords: snf.v,
            invariant_factors,
        })
    }

    pub fn free(rank: usize) -> Self {
        Self::new(rank, IntMatrix::zeros(0, rank)).expect("shapes agree")
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn cyclic(order: u64) -> Self {
        Self::new(1, IntMatrix::from_i64(&[&[order as i64]])).expect("shapes agree")
    }

    /// The diagonal group `Z/d_0 ⊕ Z/d_1 ⊕ ...` (a zero entry is a copy of `Z`).
    pub fn from_invariant_factors(factors: &[BigInt]) -> Self {
        Self::new(factors.len(), IntMatrix::diagonal(factors)).expect("shapes agree")
    }

    pub fn num_generators(&self) -> usize {
        self.num_generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Canonical invariant factors: torsion `d_1 | d_2 | ...` followed by one
    /// zero per free summand. Trivial factors are omitted.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn torsion_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_zero())
            .cloned()
            .collect()
    }

    pub fn free_rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    pub fn is_isomorphic(&self, other: &FgAbelianGroup) -> bool {
        self.invariant_factors == other.invariant_factors
    }

    /// The same group presented on its canonical generators, one per
    /// invariant factor.
    pub fn canonical(&self) -> FgAbelianGroup {
        Self::from_invariant_factors(&self.invariant_factors)
    }

    fn check_len(&self, x: &[BigInt]) -> Result<()> {
        if x.len() != self.num_generators {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a group with {} generators",
                x.len(),
                self.num_generators
            )));
        }
        Ok(())
    }

    /// Coordinates of `x` along the SNF generators, reduced modulo each
    /// diagonal entry. Two vectors name the same element iff these agree.
    pub fn canonical_coordinates(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_len(x)?;
        let y = self.coords.vec_mul(x)?;
        Ok(y.into_iter()
            .zip(&self.diagonal)
            .map(|(yi, d)| if d.is_zero() { yi } else { yi.mod_floor(d) })
            .collect())
    }

    pub fn is_zero(&self, x: &[BigInt]) -> Result<bool> {
        Ok(self.canonical_coordinates(x)?.iter().all(Zero::is_zero))
    }

    /// Quotient by the subgroup generated by `subgens`.
    pub fn quotient_by(&self, subgens: &[Vec<BigInt>]) -> Result<FgAbelianGroup> {
        for g in subgens {
            self.check_len(g)?;
        }
        let extra = IntMatrix::from_rows(subgens.to_vec(), self.num_generators)?;
        let stacked = self.relations.vstack(&extra)?;
        Ok(FgAbelianGroup::new(self.num_generators, stacked)?.canonical())
    }

    /// Multiplication by `n` is surjective, i.e. `G / nG` is trivial.
    pub fn is_n_divisible(&self, n: u64) -> bool {
        let n = BigInt::from(n);
        let gens: Vec<Vec<BigInt>> = (0..self.num_generators)
            .map(|i| {
                let mut v = vec![BigInt::zero(); self.num_generators];
                v[i] = n.clone();
                v
            })
            .collect();
        self.quotient_by(&gens).expect("lengths agree").is_trivial()
    }

    /// Multiplication by `n` is bijective. Injectivity fails exactly when a
    /// torsion factor shares a divisor with `n`.
    pub fn is_uniquely_n_divisible(&self, n: u64) -> bool {
        let nb = BigInt::from(n);
        let injective = self
            .torsion_factors()
            .iter()
            .all(|d| d.gcd(&nb).is_one());
        injective && self.is_n_divisible(n)
    }

    /// `G ⊗ Z[1/p]`.
    pub fn localize(&self, p: u64) -> Result<LocalizedGroupDescriptor> {
        LocalizedGroupDescriptor::from_group(self).localize(p)
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| if d.is_zero() { "Z".to_string() } else { format!("Z/{d}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Z[1/S]^r ⊕ T`, the localization of a finitely generated group at a
/// finite set `S` of primes. `T` is finite with no `S`-torsion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedGroupDescriptor {
    pub inverted_primes: BTreeSet<u64>,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl LocalizedGroupDescriptor {
    /// The unlocalized group itself (`S` empty).
    pub fn from_group(g: &FgAbelianGroup) -> Self {
        LocalizedGroupDescriptor {
            inverted_primes: BTreeSet::new(),
            free_rank: g.free_rank(),
            torsion: g.torsion_factors(),
        }
    }

    pub fn localize(&self, p: u64) -> Result<Self> {
        let p = require_prime(p)?;
        let pb = BigInt::from(p);
        let torsion = self
            .torsion
            .iter()
            .map(|d| {
                let mut d = d.clone();
                while (&d % &pb).is_zero() {
                    d /= &pb;
                }
                d
            })
            .filter(|d| !d.is_one())
            .collect();
        let mut inverted_primes = self.inverted_primes.clone();
        inverted_primes.insert(p);
        Ok(LocalizedGroupDescriptor {
            inverted_primes,
            free_rank: self.free_rank,
            torsion,
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// The inverted primes only matter when there is a free part.
    pub fn is_isomorphic(&self, other: &LocalizedGroupDescriptor) -> bool {
        self.free_rank == other.free_rank
            && self.torsion == other.torsion
            && (self.free_rank == 0 || self.inverted_primes == other.inverted_primes)
    }

    pub fn is_isomorphic_to_group(&self, g: &FgAbelianGroup) -> bool {
        self.is_isomorphic(&LocalizedGroupDescriptor::from_group(g))
    }

    pub fn is_uniquely_n_divisible(&self, n: u64) -> bool {
        let nb = BigInt::from(n);
        let torsion_ok = self.torsion.iter().all(|d| d.gcd(&nb).is_one());
        let free_ok = self.free_rank == 0 || {
            // Z[1/S] is uniquely n-divisible iff every prime factor of n is in S.
            let mut m = n;
            for &p in &self.inverted_primes {
                while m % p == 0 {
                    m /= p;
                }
            }
            m == 1
        };
        torsion_ok && free_ok && !nb.is_negative()
    }
}

impl fmt::Display for LocalizedGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let ring = if self.inverted_primes.is_empty() {
            "Z".to_string()
        } else {
            let ps: Vec<String> = self.inverted_primes.iter().map(|p| format!("1/{p}")).collect();
            format!("Z[{}]", ps.join(","))
        };
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        parts.extend(std::iter::repeat_n(ring, self.free_rank));
        write!(f, "{}", parts.join(" + "))
    }
}
