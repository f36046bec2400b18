//! Realising a dimension group, optionally with an endomorphism, as a
//! Bratteli diagram by repeated Shen factorisation.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::dimension::diagram::{BratteliDiagram, DiagramEndomorphism, Level};
use crate::dimension::ordered::OrderedStagedSystem;
use crate::dimension::shen::{shen_solve_covering, ShenCertificate};
use crate::error::{Error, Result};
use crate::limits::{LimitElement, LimitEndomorphism};
use crate::matrix::IntMatrix;
use crate::Truth;

/// How the `n`-th enumerated positive is reached at level `n + 1`: it is
/// the nonnegative combination `coefficients` of `theta_{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub element: LimitElement,
    pub level: usize,
    pub coefficients: Vec<BigInt>,
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct EhsResult {
    pub diagram: BratteliDiagram,
    /// `theta[n][i]` is the group element attached to vertex `i` of level `n`.
    pub theta: Vec<Vec<LimitElement>>,
    pub certificates: Vec<ShenCertificate>,
    /// The element list handed to Shen at each step.
    pub shen_inputs: Vec<Vec<LimitElement>>,
    pub coverage: Vec<Coverage>,
}

#[derive(Clone, Debug)]
pub struct EhsEndoResult {
    pub diagram: BratteliDiagram,
    pub endomorphism: DiagramEndomorphism,
    pub theta: Vec<Vec<LimitElement>>,
    /// Both factorisations of each step with their inputs.
    pub certificates: Vec<(ShenCertificate, ShenCertificate)>,
    pub shen_inputs: Vec<(Vec<LimitElement>, Vec<LimitElement>)>,
    pub coverage: Vec<Coverage>,
}

fn rows(m: &IntMatrix, range: std::ops::Range<usize>) -> IntMatrix {
    let rs = range.map(|i| m.row(i).to_vec()).collect();
    IntMatrix::from_rows(rs, m.cols()).expect("rows of a matrix")
}

/// `sum_j coeffs[j] * elems[j]` at the largest stage among `elems`.
pub fn combine(d: &OrderedStagedSystem, coeffs: &[BigInt], elems: &[LimitElement]) -> Result<LimitElement> {
    let top = elems.iter().map(|e| e.stage).max().unwrap_or(0);
    let mut sum = vec![BigInt::zero(); d.system.stage_rank(top)];
    for (c, e) in coeffs.iter().zip(elems) {
        let v = d.system.push(e, top)?.vector;
        for (a, x) in sum.iter_mut().zip(v) {
            *a += c * x;
        }
    }
    Ok(LimitElement::new(top, sum))
}

fn coverage(
    d: &OrderedStagedSystem,
    x: &LimitElement,
    level: usize,
    coefficients: Vec<BigInt>,
    theta: &[LimitElement],
) -> Result<Coverage> {
    let back = combine(d, &coefficients, theta)?;
    let verified = coefficients.iter().all(|c| c >= &BigInt::zero())
        && d.system.limit_equal(&back, x, 8)? == Truth::True;
    Ok(Coverage { element: x.clone(), level, coefficients, verified })
}

fn build_diagram(incidences: Vec<IntMatrix>) -> Result<BratteliDiagram> {
    let mut w = vec![BigInt::from(1)];
    let mut levels = Vec::with_capacity(incidences.len() + 1);
    for m in incidences {
        let next = m.vec_mul(&w)?;
        levels.push(Level { l: w.len(), w, m: Some(m) });
        w = next;
    }
    levels.push(Level { l: w.len(), w, m: None });
    Ok(BratteliDiagram { levels, tail: None })
}

/// Runs `depth` steps. At step `n` the list `theta_n` is extended by the
/// `n`-th of `positives` (the unit once they run out) and factored; the
/// rows of `theta_n` become `m_n` and the generators become `theta_{n+1}`.
pub fn ehs_realize(
    d: &OrderedStagedSystem,
    positives: &[LimitElement],
    depth: usize,
    search_bound: usize,
) -> Result<EhsResult> {
    let mut theta = vec![vec![d.unit.clone()]];
    let mut incidences = Vec::new();
    let mut certificates = Vec::new();
    let mut shen_inputs = Vec::new();
    let mut covered = Vec::new();
    for n in 0..depth {
        let current = theta.last().expect("level 0 exists").clone();
        let l = current.len();
        let x = positives.get(n).cloned().unwrap_or_else(|| d.unit.clone());
        let mut ext = current.clone();
        ext.push(x.clone());
        let cert = shen_solve_covering(d, &ext, l, search_bound)?;
        incidences.push(rows(&cert.g, 0..l));
        covered.push(coverage(d, &x, n + 1, cert.g.row(l).to_vec(), &cert.phi)?);
        theta.push(cert.phi.clone());
        certificates.push(cert);
        shen_inputs.push(ext);
    }
    Ok(EhsResult { diagram: build_diagram(incidences)?, theta, certificates, shen_inputs, coverage: covered })
}

/// As [`ehs_realize`] but the factored list is `(theta_n, phi(theta_n), x)`
/// and the generators are factored a second time. With `G = g g'`, the first
/// `l` rows of `G` give `m_n` and rows `l..2l` give `q_n`.
pub fn ehs_realize_with_endo(
    d: &OrderedStagedSystem,
    phi: &LimitEndomorphism,
    positives: &[LimitElement],
    depth: usize,
    search_bound: usize,
) -> Result<EhsEndoResult> {
    let mut theta = vec![vec![d.unit.clone()]];
    let mut incidences = Vec::new();
    let mut qs = Vec::new();
    let mut certificates = Vec::new();
    let mut shen_inputs = Vec::new();
    let mut covered = Vec::new();
    for n in 0..depth {
        let current = theta.last().expect("level 0 exists").clone();
        let l = current.len();
        let x = positives.get(n).cloned().unwrap_or_else(|| d.unit.clone());
        let mut ext = current.clone();
        for (i, t) in current.iter().enumerate() {
            let image = phi.apply(&d.system, t)?;
            if d.is_positive(&image, search_bound)? != Truth::True {
                return Err(Error::EndomorphismNotPositive(format!("image of theta_{n}({i}) is not positive")));
            }
            ext.push(image);
        }
        ext.push(x.clone());
        let first = shen_solve_covering(d, &ext, l, search_bound)?;
        let second = shen_solve_covering(d, &first.phi, first.n(), search_bound)?;
        let g = first.g.checked_mul(&second.g)?;
        incidences.push(rows(&g, 0..l));
        qs.push(rows(&g, l..2 * l));
        covered.push(coverage(d, &x, n + 1, g.row(2 * l).to_vec(), &second.phi)?);
        theta.push(second.phi.clone());
        shen_inputs.push((ext, first.phi.clone()));
        certificates.push((first, second));
    }
    Ok(EhsEndoResult {
        diagram: build_diagram(incidences)?,
        endomorphism: DiagramEndomorphism { q: qs },
        theta,
        certificates,
        shen_inputs,
        coverage: covered,
    })
}

/// `theta_n(i) = sum_j m_n(i,j) theta_{n+1}(j)` at every level.
pub fn check_theta_identities(d: &OrderedStagedSystem, diagram: &BratteliDiagram, theta: &[Vec<LimitElement>]) -> Result<bool> {
    for n in 0..theta.len().saturating_sub(1) {
        let m = diagram
            .incidence(n)
            .ok_or_else(|| Error::InvalidDiagram(format!("missing incidence at level {n}")))?;
        for (i, t) in theta[n].iter().enumerate() {
            let rhs = combine(d, m.row(i), &theta[n + 1])?;
            if d.system.limit_equal(t, &rhs, 8)? != Truth::True {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `phi(theta_n(i)) = sum_j q_n(i,j) theta_{n+1}(j)` at every level.
pub fn check_intertwining(
    d: &OrderedStagedSystem,
    phi: &LimitEndomorphism,
    q: &DiagramEndomorphism,
    theta: &[Vec<LimitElement>],
) -> Result<bool> {
    for (n, qn) in q.q.iter().enumerate() {
        for (i, t) in theta[n].iter().enumerate() {
            let lhs = phi.apply(&d.system, t)?;
            let rhs = combine(d, qn.row(i), &theta[n + 1])?;
            if d.system.limit_equal(&lhs, &rhs, 8)? != Truth::True {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
