//! Inductive systems of free lattices and their direct limits.
//!
//! A [`StagedSystem`] stores the map from stage `n` to stage `n + 1` as an
//! integer matrix acting on column vectors. Elements of the limit are pairs
//! `(stage, vector)` and are compared by pushing to a common stage.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::abelian::FgAbelianGroup;
use crate::error::{Error, Result};
use crate::matrix::{column_lattice_basis, kernel_basis, lattice_quotient, smith_normal_form, IntMatrix};
use crate::Truth;

/// A sequence of matrices indexed by stage: either one matrix repeated
/// forever, or a finite prefix followed by a repeating period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixSequence {
    Stationary(IntMatrix),
    PrefixTail { prefix: Vec<IntMatrix>, period: Vec<IntMatrix> },
}

impl MatrixSequence {
    pub fn get(&self, n: usize) -> &IntMatrix {
        match self {
            MatrixSequence::Stationary(m) => m,
            MatrixSequence::PrefixTail { prefix, period } => {
                if n < prefix.len() {
                    &prefix[n]
                } else {
                    &period[(n - prefix.len()) % period.len()]
                }
            }
        }
    }

    /// Every distinct matrix, in stage order for one pass through the prefix
    /// and one period.
    pub fn distinct(&self) -> Vec<&IntMatrix> {
        match self {
            MatrixSequence::Stationary(m) => vec![m],
            MatrixSequence::PrefixTail { prefix, period } => prefix.iter().chain(period).collect(),
        }
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self, MatrixSequence::Stationary(_))
    }

    /// Stages after which the sequence is periodic, and the period length.
    pub fn tail(&self) -> (usize, usize) {
        match self {
            MatrixSequence::Stationary(_) => (0, 1),
            MatrixSequence::PrefixTail { prefix, period } => (prefix.len(), period.len()),
        }
    }

    fn validate(&self) -> Result<()> {
        if let MatrixSequence::PrefixTail { period, .. } = self {
            if period.is_empty() {
                return Err(Error::InvalidInput("periodic tail must contain at least one matrix".into()));
            }
        }
        Ok(())
    }
}

/// An inductive system `Z^{l(0)} -> Z^{l(1)} -> ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagedSystem {
    connect: MatrixSequence,
    injective: bool,
}

impl StagedSystem {
    /// Builds a system and checks that the shapes chain. Injectivity is
    /// detected exactly, since only finitely many distinct matrices occur.
    pub fn new(connect: MatrixSequence) -> Result<Self> {
        connect.validate()?;
        let (start, period) = connect.tail();
        for n in 0..start + period {
            let a = connect.get(n);
            let b = connect.get(n + 1);
            if a.rows() != b.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "map at stage {n} lands in rank {} but the next map starts from rank {}",
                    a.rows(),
                    b.cols()
                )));
            }
        }
        let injective = connect.distinct().iter().all(|m| m.has_full_column_rank());
        Ok(StagedSystem { connect, injective })
    }

    pub fn stationary(m: IntMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("stationary map must be square".into()));
        }
        Self::new(MatrixSequence::Stationary(m))
    }

    pub fn prefix_tail(prefix: Vec<IntMatrix>, period: Vec<IntMatrix>) -> Result<Self> {
        Self::new(MatrixSequence::PrefixTail { prefix, period })
    }

    /// Overrides the detected injectivity. Claiming injectivity for a
    /// non-injective system is an error; dropping it is always allowed.
    pub fn with_injective_flag(mut self, flag: bool) -> Result<Self> {
        if flag && !self.injective {
            return Err(Error::InvalidInput("system declared injective but a connecting map has a kernel".into()));
        }
        self.injective = flag;
        Ok(self)
    }

    pub fn connect(&self, n: usize) -> &IntMatrix {
        self.connect.get(n)
    }

    pub fn matrices(&self) -> &MatrixSequence {
        &self.connect
    }

    pub fn stage_rank(&self, n: usize) -> usize {
        self.connect.get(n).cols()
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    pub fn is_stationary(&self) -> bool {
        self.connect.is_stationary()
    }

    /// The composite map from stage `from` to stage `to`.
    pub fn composite(&self, from: usize, to: usize) -> Result<IntMatrix> {
        if to < from {
            return Err(Error::InvalidStage(format!("cannot map stage {from} back to stage {to}")));
        }
        let mut acc = IntMatrix::identity(self.stage_rank(from));
        for n in from..to {
            acc = self.connect(n).checked_mul(&acc)?;
        }
        Ok(acc)
    }

    pub fn element(&self, stage: usize, vector: Vec<BigInt>) -> Result<LimitElement> {
        let e = LimitElement { stage, vector };
        self.check(&e)?;
        Ok(e)
    }

    fn check(&self, e: &LimitElement) -> Result<()> {
        if e.vector.len() != self.stage_rank(e.stage) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} at stage {} of rank {}",
                e.vector.len(),
                e.stage,
                self.stage_rank(e.stage)
            )));
        }
        Ok(())
    }

    /// The image of `e` at a later stage.
    pub fn push(&self, e: &LimitElement, to_stage: usize) -> Result<LimitElement> {
        self.check(e)?;
        if to_stage < e.stage {
            return Err(Error::InvalidStage(format!(
                "cannot push an element at stage {} down to stage {to_stage}",
                e.stage
            )));
        }
        let mut v = e.vector.clone();
        for n in e.stage..to_stage {
            v = self.connect(n).mul_vec(&v)?;
        }
        Ok(LimitElement { stage: to_stage, vector: v })
    }

    /// Both elements pushed to their common stage.
    pub fn align(&self, a: &LimitElement, b: &LimitElement) -> Result<(Vec<BigInt>, Vec<BigInt>, usize)> {
        let s = a.stage.max(b.stage);
        Ok((self.push(a, s)?.vector, self.push(b, s)?.vector, s))
    }

    /// Equality in the limit. Injective systems decide at the common stage.
    /// A stationary system decides after `l` further steps, because the
    /// kernels of the powers of an `l x l` matrix stabilise by then.
    /// Otherwise stages up to `depth + 1` past the common one are tried.
    pub fn limit_equal(&self, a: &LimitElement, b: &LimitElement, depth: usize) -> Result<Truth> {
        let (mut x, mut y, s) = self.align(a, b)?;
        if x == y {
            return Ok(Truth::True);
        }
        if self.injective {
            return Ok(Truth::False);
        }
        let (steps, exact) = if self.is_stationary() {
            (self.stage_rank(0).max(depth + 1), true)
        } else {
            (depth + 1, false)
        };
        for n in s..s + steps {
            let c = self.connect(n);
            x = c.mul_vec(&x)?;
            y = c.mul_vec(&y)?;
            if x == y {
                return Ok(Truth::True);
            }
        }
        Ok(if exact { Truth::False } else { Truth::Unknown })
    }

    /// Adds two limit elements at their common stage.
    pub fn add(&self, a: &LimitElement, b: &LimitElement) -> Result<LimitElement> {
        let (x, y, s) = self.align(a, b)?;
        Ok(LimitElement { stage: s, vector: x.iter().zip(&y).map(|(p, q)| p + q).collect() })
    }

    pub fn scale(&self, a: &LimitElement, k: &BigInt) -> LimitElement {
        LimitElement { stage: a.stage, vector: a.vector.iter().map(|x| x * k).collect() }
    }

    /// The shift automorphism of a stationary system: `(n + 1, x) -> (n, x)`.
    /// It agrees with applying the connecting matrix at a fixed stage.
    pub fn alpha_infinity_apply(&self, e: &LimitElement) -> Result<LimitElement> {
        self.require_stationary()?;
        self.check(e)?;
        if e.stage >= 1 {
            Ok(LimitElement { stage: e.stage - 1, vector: e.vector.clone() })
        } else {
            Ok(LimitElement { stage: 0, vector: self.connect(0).mul_vec(&e.vector)? })
        }
    }

    /// Inverse of [`Self::alpha_infinity_apply`]: `(n, x) -> (n + 1, x)`.
    pub fn alpha_infinity_inverse(&self, e: &LimitElement) -> Result<LimitElement> {
        self.require_stationary()?;
        self.check(e)?;
        Ok(LimitElement { stage: e.stage + 1, vector: e.vector.clone() })
    }

    fn require_stationary(&self) -> Result<()> {
        if self.is_stationary() {
            Ok(())
        } else {
            Err(Error::InvalidInput("the shift automorphism needs a stationary system".into()))
        }
    }

    /// The periodic part of the system telescoped to a single square matrix
    /// (product of one period), starting at the first periodic stage.
    pub fn period_matrix(&self) -> Result<(usize, IntMatrix)> {
        let (start, period) = self.connect.tail();
        Ok((start, self.composite(start, start + period)?))
    }

    /// The direct limit as a finitely generated group, when it is one.
    ///
    /// The limit only depends on the periodic tail, so it equals the limit of
    /// the stationary system given by one period matrix `A`. Every element
    /// lands in the saturated eventual image `S` of `A` after `rank` steps,
    /// and `A` restricts to an injective map `B` on `S`. The limit is
    /// `S[B^-1]`, which is finitely generated exactly when `B` is unimodular.
    pub fn build_limit_group(&self, depth: usize) -> Result<FgAbelianGroup> {
        let (_, a) = self.period_matrix()?;
        let l = a.rows();
        let eventual = a.pow(l)?;
        let basis = saturate(&eventual);
        let r = basis.cols();
        if r == 0 {
            return Ok(FgAbelianGroup::trivial());
        }
        // Coordinates of A·s_j in the basis of S.
        let image = a.checked_mul(&basis)?;
        let snf = smith_normal_form(&basis);
        let mut cols = Vec::with_capacity(r);
        for j in 0..r {
            let c = crate::matrix::solve_with(&snf, &image.column(j))
                .ok_or_else(|| Error::InvalidInput("eventual image is not invariant".into()))?;
            cols.push(c);
        }
        let b = IntMatrix::from_columns(&cols, r)?;
        if b.determinant()?.abs().is_one() {
            Ok(FgAbelianGroup::free(r))
        } else {
            Err(Error::NotFinitelyGenerated { depth })
        }
    }
}

/// Basis (as columns) of `span_Q(columns of m) ∩ Z^rows`.
pub fn saturate(m: &IntMatrix) -> IntMatrix {
    let rows = m.rows();
    if m.cols() == 0 || m.is_zero() {
        return IntMatrix::zeros(rows, 0);
    }
    // The saturation is the kernel of a basis of the left kernel.
    let left = kernel_basis(&m.transpose());
    if left.cols() == 0 {
        return IntMatrix::identity(rows);
    }
    let sat = kernel_basis(&left.transpose());
    column_lattice_basis(&sat)
}

/// A class in the direct limit, represented at some stage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LimitElement {
    pub stage: usize,
    pub vector: Vec<BigInt>,
}

impl LimitElement {
    pub fn new(stage: usize, vector: Vec<BigInt>) -> Self {
        LimitElement { stage, vector }
    }

    pub fn from_i64(stage: usize, vector: &[i64]) -> Self {
        LimitElement { stage, vector: vector.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn is_zero_vector(&self) -> bool {
        self.vector.iter().all(Zero::is_zero)
    }
}

/// An endomorphism of a direct limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitEndomorphism {
    /// The shift automorphism of a stationary system.
    AlphaInfinity,
    /// Maps `psi_n` from stage `n` to stage `n + shift`.
    Staged { shift: usize, maps: MatrixSequence },
}

impl LimitEndomorphism {
    pub fn staged(shift: usize, maps: MatrixSequence) -> Self {
        LimitEndomorphism::Staged { shift, maps }
    }

    pub fn stationary(shift: usize, m: IntMatrix) -> Self {
        LimitEndomorphism::Staged { shift, maps: MatrixSequence::Stationary(m) }
    }

    /// The shift and the stage-`n` matrix realising this endomorphism on
    /// `sys`.
    pub fn stage_map(&self, sys: &StagedSystem, n: usize) -> Result<(usize, IntMatrix)> {
        match self {
            LimitEndomorphism::AlphaInfinity => {
                sys.require_stationary()?;
                Ok((0, sys.connect(n).clone()))
            }
            LimitEndomorphism::Staged { shift, maps } => Ok((*shift, maps.get(n).clone())),
        }
    }

    pub fn apply(&self, sys: &StagedSystem, e: &LimitElement) -> Result<LimitElement> {
        if let LimitEndomorphism::AlphaInfinity = self {
            return sys.alpha_infinity_apply(e);
        }
        sys.check(e)?;
        let (shift, m) = self.stage_map(sys, e.stage)?;
        if m.cols() != e.vector.len() || m.rows() != sys.stage_rank(e.stage + shift) {
            return Err(Error::DimensionMismatch(format!(
                "endomorphism matrix at stage {} has shape {}x{}",
                e.stage,
                m.rows(),
                m.cols()
            )));
        }
        Ok(LimitElement { stage: e.stage + shift, vector: m.mul_vec(&e.vector)? })
    }

    /// Checks `C_{n+s} psi_n = psi_{n+1} C_n` for all `n < depth`, which makes
    /// the stage maps compatible with the system.
    pub fn check_commutes(&self, sys: &StagedSystem, depth: usize) -> Result<bool> {
        for n in 0..depth {
            let (s, psi) = self.stage_map(sys, n)?;
            let (_, psi_next) = self.stage_map(sys, n + 1)?;
            let lhs = sys.connect(n + s).checked_mul(&psi)?;
            let rhs = psi_next.checked_mul(sys.connect(n))?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Truncated cokernel and kernel of `id - phi` on a direct limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoHomology {
    pub depth: usize,
    pub cokernel: Vec<BigInt>,
    pub kernel_rank: usize,
}

/// Computes `coker(id - phi)` and the rank of `ker(id - phi)` at truncation
/// `depth`. With `s` the shift of `phi`, `A = C^{(depth -> depth+s)} - psi_depth`
/// realises `id - phi` on stage `depth`. The cokernel reported is the image
/// of stage 0 in `Z^{l(depth+s)} / A Z^{l(depth)}`.
pub fn endomorphism_homology(
    sys: &StagedSystem,
    phi: &LimitEndomorphism,
    depth: usize,
) -> Result<EndoHomology> {
    let (s, psi) = phi.stage_map(sys, depth)?;
    let c = sys.composite(depth, depth + s)?;
    if psi.rows() != c.rows() || psi.cols() != c.cols() {
        return Err(Error::DimensionMismatch(format!(
            "endomorphism matrix at stage {depth} does not match the system"
        )));
    }
    let a = c.checked_sub(&psi)?;
    let p = sys.composite(0, depth + s)?;
    let big = p.hstack(&a)?;
    let cokernel = lattice_quotient(&big, &a)?;
    let kernel_rank = a.cols() - a.rank();
    Ok(EndoHomology { depth, cokernel, kernel_rank })
}

impl EndoHomology {
    pub fn as_group(&self) -> FgAbelianGroup {
        FgAbelianGroup::from_invariant_factors(&self.cokernel)
    }
}
