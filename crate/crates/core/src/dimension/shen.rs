//! Factoring finitely many positive elements through positive generators
//! while respecting every integer relation among them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dimension::ordered::{Cone, OrderedStagedSystem};
use crate::error::{Error, Result};
use crate::limits::LimitElement;
use crate::matrix::{column_lattice_basis, kernel_basis, smith_normal_form, solve_with, IntMatrix};
use crate::Truth;

/// `theta(i) = sum_j g(i,j) phi(j)` with `g >= 0`, `phi` positive, and
/// every relation `sum_i k_i theta(i) = 0` forcing `sum_i k_i g(i,j) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShenCertificate {
    pub phi: Vec<LimitElement>,
    pub g: IntMatrix,
}

impl ShenCertificate {
    pub fn n(&self) -> usize {
        self.phi.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShenCheck {
    pub factorisation: bool,
    pub relations: bool,
    pub positive: bool,
    pub nonnegative: bool,
}

impl ShenCheck {
    pub fn ok(&self) -> bool {
        self.factorisation && self.relations && self.positive && self.nonnegative
    }
}

/// A stage at which equality of pushed vectors coincides with equality in
/// the limit for all of `theta`.
fn relation_stage(d: &OrderedStagedSystem, theta: &[LimitElement]) -> Result<usize> {
    let s = theta.iter().map(|t| t.stage).max().unwrap_or(0);
    if d.system.is_injective() {
        Ok(s)
    } else if d.system.is_stationary() {
        Ok(s + d.system.stage_rank(0))
    } else {
        Err(Error::InvalidInput(
            "relations among limit elements are only decided for injective or stationary systems".into(),
        ))
    }
}

fn check_positive(d: &OrderedStagedSystem, theta: &[LimitElement], bound: usize) -> Result<()> {
    for (i, t) in theta.iter().enumerate() {
        match d.is_positive(t, bound)? {
            Truth::True => {}
            Truth::False => return Err(Error::InvalidInput(format!("theta({i}) is not positive"))),
            Truth::Unknown => {
                return Err(Error::ShenDepthExceeded(format!("positivity of theta({i}) undecided within bound")))
            }
        }
    }
    Ok(())
}

pub fn shen_solve(d: &OrderedStagedSystem, theta: &[LimitElement], search_bound: usize) -> Result<ShenCertificate> {
    shen_solve_covering(d, theta, theta.len(), search_bound)
}

/// As [`shen_solve`], additionally requiring every `phi(j)` to be used by
/// some `theta(i)` with `i < cover`.
pub fn shen_solve_covering(
    d: &OrderedStagedSystem,
    theta: &[LimitElement],
    cover: usize,
    search_bound: usize,
) -> Result<ShenCertificate> {
    check_positive(d, theta, search_bound)?;
    match d.cone {
        Cone::Simplicial => solve_simplicial(d, theta, cover, search_bound),
        Cone::StrictFirst => solve_strict_first(d, theta, cover, search_bound),
    }
}

fn solve_simplicial(
    d: &OrderedStagedSystem,
    theta: &[LimitElement],
    cover: usize,
    bound: usize,
) -> Result<ShenCertificate> {
    let start = relation_stage(d, theta)?;
    for t in start..=start + bound {
        let rows: Vec<Vec<BigInt>> =
            theta.iter().map(|x| d.system.push(x, t).map(|e| e.vector)).collect::<Result<_>>()?;
        if rows.iter().flatten().any(|x| x.is_negative()) {
            continue;
        }
        let width = d.system.stage_rank(t);
        let used: Vec<usize> = (0..width).filter(|&j| rows.iter().any(|r| !r[j].is_zero())).collect();
        let covered = |j: usize| rows.iter().take(cover).any(|r| !r[j].is_zero());
        if !used.iter().all(|&j| covered(j)) {
            continue;
        }
        let phi = used
            .iter()
            .map(|&j| {
                let mut v = vec![BigInt::zero(); width];
                v[j] = BigInt::one();
                LimitElement::new(t, v)
            })
            .collect();
        let g_rows = rows.iter().map(|r| used.iter().map(|&j| r[j].clone()).collect()).collect();
        let g = IntMatrix::from_rows(g_rows, used.len())?;
        return Ok(ShenCertificate { phi, g });
    }
    Err(Error::ShenDepthExceeded(format!("no suitable stage within {bound} steps")))
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// Writes every `theta(i) = (T_i, h_i)` at a common stage `S` in terms of a
/// basis `eta` of the lattice spanned by the `h_i`. At stage `S + q`, with
/// `L` the product of the leading scalars, the generators are `(1, 0)` and
/// `(1, ±eta_s)` pushed forward, and the coefficients are
/// `g_i = (A T_i - sum c_is, M T_i + c_is, M T_i, ...)` with `A = L - 2 M rho`.
fn solve_strict_first(
    d: &OrderedStagedSystem,
    theta: &[LimitElement],
    cover: usize,
    bound: usize,
) -> Result<ShenCertificate> {
    let k = theta.len();
    let s = relation_stage(d, theta)?;
    let width = d.system.stage_rank(s);
    let pushed: Vec<Vec<BigInt>> =
        theta.iter().map(|x| d.system.push(x, s).map(|e| e.vector)).collect::<Result<_>>()?;
    let nonzero: Vec<bool> = pushed.iter().map(|v| v.iter().any(|x| !x.is_zero())).collect();
    if !nonzero.iter().any(|&b| b) {
        return Ok(ShenCertificate { phi: vec![], g: IntMatrix::zeros(k, 0) });
    }
    if !nonzero.iter().take(cover).any(|&b| b) {
        return Err(Error::InvalidInput("no nonzero element among the covering rows".into()));
    }
    let h_cols: Vec<Vec<BigInt>> = pushed.iter().map(|v| v[1..].to_vec()).collect();
    let h = IntMatrix::from_columns(&h_cols, width - 1)?;
    let eta = column_lattice_basis(&h);
    let rho = eta.cols();
    let snf = smith_normal_form(&eta);
    let coeffs: Vec<Vec<BigInt>> = h_cols
        .iter()
        .map(|hi| solve_with(&snf, hi).ok_or_else(|| Error::InvalidInput("lattice basis does not span".into())))
        .collect::<Result<_>>()?;
    let t: Vec<BigInt> = pushed.iter().map(|v| v[0].clone()).collect();

    let mut m = BigInt::one();
    for i in (0..k).filter(|&i| nonzero[i]) {
        for c in &coeffs[i] {
            m = m.max(BigInt::one() + ceil_div(&c.abs(), &t[i]));
        }
    }
    let two_m_rho = BigInt::from(2) * &m * BigInt::from(rho);
    let mut lead = BigInt::one();
    for q in 0..=bound {
        if q > 0 {
            lead *= d
                .leading_scalar(s + q - 1)
                .ok_or_else(|| Error::InvalidInput("connecting map is not block diagonal".into()))?;
        }
        let a = &lead - &two_m_rho;
        if !a.is_positive() {
            continue;
        }
        let g0: Vec<BigInt> = (0..k)
            .map(|i| if nonzero[i] { &a * &t[i] - coeffs[i].iter().sum::<BigInt>() } else { BigInt::zero() })
            .collect();
        if (0..k).any(|i| nonzero[i] && !g0[i].is_positive()) {
            continue;
        }
        let stage = s + q;
        let top = d.system.stage_rank(stage);
        let mut base = vec![BigInt::zero(); top];
        base[0] = BigInt::one();
        let mut phi = vec![LimitElement::new(stage, base)];
        for j in 0..rho {
            let mut v = vec![BigInt::zero()];
            v.extend(eta.column(j));
            let pushed = d.system.push(&LimitElement::new(s, v), stage)?.vector;
            let mut plus = pushed.clone();
            plus[0] = BigInt::one();
            let mut minus: Vec<BigInt> = pushed.iter().map(|x| -x).collect();
            minus[0] = BigInt::one();
            phi.push(LimitElement::new(stage, plus));
            phi.push(LimitElement::new(stage, minus));
        }
        let mut g = IntMatrix::zeros(k, 1 + 2 * rho);
        for i in (0..k).filter(|&i| nonzero[i]) {
            g[(i, 0)] = g0[i].clone();
            let mt = &m * &t[i];
            for j in 0..rho {
                g[(i, 1 + 2 * j)] = &mt + &coeffs[i][j];
                g[(i, 2 + 2 * j)] = mt.clone();
            }
        }
        return Ok(ShenCertificate { phi, g });
    }
    Err(Error::ShenDepthExceeded(format!("leading scalars did not outgrow {two_m_rho} within {bound} stages")))
}

/// Re-checks a certificate without reference to how it was produced.
/// Relations are read off the kernel of the matrix of `theta` vectors at a
/// stage where stage equality is limit equality.
pub fn verify_certificate(
    d: &OrderedStagedSystem,
    theta: &[LimitElement],
    cert: &ShenCertificate,
) -> Result<ShenCheck> {
    let k = theta.len();
    let n = cert.n();
    if cert.g.rows() != k || cert.g.cols() != n {
        return Err(Error::DimensionMismatch("certificate matrix has the wrong shape".into()));
    }
    let nonnegative = cert.g.has_nonnegative_entries();
    let mut positive = true;
    for p in &cert.phi {
        positive &= d.is_positive(p, 16)? == Truth::True;
    }

    let top = cert.phi.iter().map(|p| p.stage).max().unwrap_or(0);
    let phi_top: Vec<Vec<BigInt>> =
        cert.phi.iter().map(|p| d.system.push(p, top).map(|e| e.vector)).collect::<Result<_>>()?;
    let mut factorisation = true;
    for (i, th) in theta.iter().enumerate() {
        let mut sum = vec![BigInt::zero(); d.system.stage_rank(top)];
        for (j, v) in phi_top.iter().enumerate() {
            for (acc, x) in sum.iter_mut().zip(v) {
                *acc += &cert.g[(i, j)] * x;
            }
        }
        let eq = d.system.limit_equal(th, &LimitElement::new(top, sum), 8)?;
        factorisation &= eq == Truth::True;
    }

    let r = relation_stage(d, theta)?;
    let cols: Vec<Vec<BigInt>> = theta.iter().map(|x| d.system.push(x, r).map(|e| e.vector)).collect::<Result<_>>()?;
    let theta_mat = IntMatrix::from_columns(&cols, d.system.stage_rank(r))?;
    let kernel = kernel_basis(&theta_mat);
    let relations = kernel.transpose().checked_mul(&cert.g)?.is_zero();
    Ok(ShenCheck { factorisation, relations, positive, nonnegative })
}
