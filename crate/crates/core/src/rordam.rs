//! A torsion-free group with an automorphism whose `id - alpha` has a
//! prescribed finitely generated cokernel.
//!
//! `G` is first put in diagonal form `Z/d_0 ⊕ ... ⊕ Z/d_{k-1}` (a free factor
//! has `d = 0`). The lattice `F` has coordinates `x_{n,m}` for `n < k` and
//! `m < width`, and `delta` sends `x_{n,m}` to `x_{n,m+1}`, except that the
//! last coordinate of each block wraps to `d_n · x_{n,0}`. Then
//! `F / delta F = G`, and `H` is the limit of `F` under `beta = id - delta`
//! with `alpha` the induced shift automorphism, so `id - alpha` acts as
//! `delta` at every stage.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::abelian::FgAbelianGroup;
use crate::error::{Error, Result};
use crate::limits::{endomorphism_homology, LimitEndomorphism, StagedSystem};
use crate::matrix::IntMatrix;

#[derive(Clone, Debug)]
pub struct RordamPair {
    width: usize,
    diagonal: Vec<BigInt>,
    delta: IntMatrix,
    beta: IntMatrix,
    system: StagedSystem,
}

impl RordamPair {
    pub fn width(&self) -> usize {
        self.width
    }

    /// The diagonal entries `d_n` of the canonical presentation of `G`.
    pub fn diagonal(&self) -> &[BigInt] {
        &self.diagonal
    }

    pub fn delta(&self) -> &IntMatrix {
        &self.delta
    }

    pub fn beta(&self) -> &IntMatrix {
        &self.beta
    }

    /// The stationary system `(F, beta)` whose limit is `H`.
    pub fn system(&self) -> &StagedSystem {
        &self.system
    }

    pub fn rank(&self) -> usize {
        self.delta.rows()
    }

    /// Lattice index of `x_{n,m}`.
    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.width + m
    }

    /// Inverse of [`Self::index`].
    pub fn coordinate(&self, index: usize) -> (usize, usize) {
        (index / self.width, index % self.width)
    }

    /// The value placed in the wrapping column of block `n` is killed by the
    /// coordinate map `x_{n,m} -> [m = 0] g_n` onto `G`.
    pub fn kernel_data_check(&self) -> bool {
        let g = FgAbelianGroup::from_invariant_factors(&self.diagonal);
        (0..self.diagonal.len()).all(|n| {
            let col = self.delta.column(self.index(n, self.width - 1));
            let image: Vec<BigInt> = (0..self.diagonal.len())
                .map(|k| col[self.index(k, 0)].clone())
                .collect();
            g.is_zero(&image).unwrap_or(false)
        })
    }
}

pub fn rordam_pair(g: &FgAbelianGroup, width: usize) -> Result<RordamPair> {
    if width < 2 {
        return Err(Error::WidthTooSmall { width });
    }
    let diagonal = g.invariant_factors().to_vec();
    let rank = diagonal.len() * width;
    let mut delta = IntMatrix::zeros(rank, rank);
    for (n, d) in diagonal.iter().enumerate() {
        for m in 0..width - 1 {
            delta[(n * width + m + 1, n * width + m)] = BigInt::from(1);
        }
        delta[(n * width, n * width + width - 1)] = d.clone();
    }
    let beta = IntMatrix::identity(rank).checked_sub(&delta)?;
    let system = StagedSystem::stationary(beta.clone())?;
    Ok(RordamPair { width, diagonal, delta, beta, system })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RordamReport {
    pub pass: bool,
    pub expected: Vec<BigInt>,
    /// Cokernel invariant factors at depths `depth - 1` and `depth`.
    pub observed: Vec<Vec<BigInt>>,
    pub depth: usize,
}

/// Computes `coker(id - alpha)` at the truncations `depth - 1` and `depth`
/// and compares both with `G`.
pub fn rordam_verify(pair: &RordamPair, g: &FgAbelianGroup, depth: usize) -> Result<RordamReport> {
    let expected = g.invariant_factors().to_vec();
    let depths = [depth.saturating_sub(1), depth];
    let mut observed = Vec::new();
    for d in depths {
        if pair.rank() == 0 {
            observed.push(Vec::new());
            continue;
        }
        let h = endomorphism_homology(&pair.system, &LimitEndomorphism::AlphaInfinity, d)?;
        observed.push(h.cokernel);
    }
    let pass = observed.iter().all(|o| *o == expected);
    Ok(RordamReport { pass, expected, observed, depth })
}

/// `true` iff every column of `delta` outside the wrap positions is a
/// standard basis vector one step further along its block.
pub fn shift_columns_are_elementary(pair: &RordamPair) -> bool {
    let w = pair.width;
    (0..pair.rank()).all(|j| {
        let (n, m) = pair.coordinate(j);
        if m == w - 1 {
            return true;
        }
        let col = pair.delta.column(j);
        col.iter().enumerate().all(|(i, x)| {
            if i == pair.index(n, m + 1) {
                *x == BigInt::from(1)
            } else {
                x.is_zero()
            }
        })
    })
}
