//! Staged systems carrying a positive cone and an order unit.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dimension::diagram::{validate_diagram, BratteliDiagram};
use crate::error::{Error, Result};
use crate::limits::{LimitElement, StagedSystem};
use crate::matrix::IntMatrix;
use crate::Truth;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    /// Coordinatewise nonnegative vectors at some stage.
    Simplicial,
    /// Vectors with positive first coordinate, plus zero. Connecting maps
    /// must be block diagonal with a positive scalar in the first block.
    StrictFirst,
}

#[derive(Clone, Debug)]
pub struct OrderedStagedSystem {
    pub system: StagedSystem,
    pub cone: Cone,
    pub unit: LimitElement,
}

/// The scalar in the first block of a strict-first connecting map.
fn leading_scalar(m: &IntMatrix) -> Option<BigInt> {
    if m.rows() == 0 || m.cols() == 0 {
        return None;
    }
    let lead = m[(0, 0)].clone();
    let row_ok = (1..m.cols()).all(|j| m[(0, j)].is_zero());
    let col_ok = (1..m.rows()).all(|i| m[(i, 0)].is_zero());
    (lead.is_positive() && row_ok && col_ok).then_some(lead)
}

impl OrderedStagedSystem {
    pub fn new(system: StagedSystem, cone: Cone, unit: LimitElement) -> Result<Self> {
        if unit.vector.len() != system.stage_rank(unit.stage) {
            return Err(Error::DimensionMismatch("order unit does not fit its stage".into()));
        }
        if cone == Cone::StrictFirst && system.matrices().distinct().iter().any(|m| leading_scalar(m).is_none()) {
            return Err(Error::InvalidInput(
                "strict-first cone needs block-diagonal connecting maps with a positive leading scalar".into(),
            ));
        }
        let d = OrderedStagedSystem { system, cone, unit };
        if d.is_positive(&d.unit, 8)? != Truth::True || d.unit.is_zero_vector() {
            return Err(Error::InvalidInput("order unit is not a nonzero positive element".into()));
        }
        Ok(d)
    }

    /// The leading scalar of the stage-`n` map (strict-first cones only).
    pub fn leading_scalar(&self, n: usize) -> Option<BigInt> {
        leading_scalar(self.system.connect(n))
    }

    /// The unit represented at stage `n` (pushed forward from its own stage).
    pub fn unit_at(&self, n: usize) -> Result<LimitElement> {
        self.system.push(&self.unit, n.max(self.unit.stage))
    }

    /// Positivity in the limit. Simplicial cones look for a stage (at most
    /// `bound` steps ahead) where all coordinates are nonnegative; negative
    /// verdicts are final only for injective systems pushed that far.
    pub fn is_positive(&self, e: &LimitElement, bound: usize) -> Result<Truth> {
        match self.cone {
            Cone::StrictFirst => {
                let v = &e.vector;
                if v.is_empty() {
                    return Ok(Truth::True);
                }
                if v[0].is_positive() || v.iter().all(Zero::is_zero) {
                    Ok(Truth::True)
                } else {
                    Ok(Truth::False)
                }
            }
            Cone::Simplicial => {
                let mut cur = self.system.push(e, e.stage)?;
                for _ in 0..=bound {
                    if cur.vector.iter().all(|x| !x.is_negative()) {
                        return Ok(Truth::True);
                    }
                    cur = self.system.push(&cur, cur.stage + 1)?;
                }
                Ok(Truth::Unknown)
            }
        }
    }

    /// First `count` positive (nonzero) elements in order of height
    /// `stage + |v|_1`, then stage, then vector.
    pub fn enumerate_positives(&self, count: usize) -> Vec<LimitElement> {
        enumerate_positives(self, count)
    }
}

/// Vectors of length `len` with `|v|_1 = total`, satisfying `keep`.
fn vectors_with_norm(len: usize, total: usize, signed: bool, out: &mut Vec<Vec<BigInt>>) {
    fn rec(cur: &mut Vec<i64>, len: usize, left: usize, signed: bool, out: &mut Vec<Vec<BigInt>>) {
        if cur.len() == len {
            if left == 0 {
                out.push(cur.iter().map(|&x| BigInt::from(x)).collect());
            }
            return;
        }
        for a in (0..=left).rev() {
            cur.push(a as i64);
            rec(cur, len, left - a, signed, out);
            cur.pop();
            if signed && a > 0 && !cur.is_empty() {
                cur.push(-(a as i64));
                rec(cur, len, left - a, signed, out);
                cur.pop();
            }
        }
    }
    let mut cur = Vec::with_capacity(len);
    rec(&mut cur, len, total, signed, out);
}

pub fn enumerate_positives(d: &OrderedStagedSystem, count: usize) -> Vec<LimitElement> {
    let mut out = Vec::with_capacity(count);
    let mut height = 1;
    while out.len() < count {
        for stage in 0..height {
            let len = d.system.stage_rank(stage);
            if len == 0 {
                continue;
            }
            let mut vs = Vec::new();
            match d.cone {
                Cone::Simplicial => vectors_with_norm(len, height - stage, false, &mut vs),
                Cone::StrictFirst => vectors_with_norm(len, height - stage, true, &mut vs),
            }
            for v in vs {
                let nonzero = v.iter().any(|x| !x.is_zero());
                let ok = match d.cone {
                    Cone::Simplicial => nonzero,
                    Cone::StrictFirst => v[0].is_positive(),
                };
                if ok {
                    out.push(LimitElement::new(stage, v));
                    if out.len() == count {
                        return out;
                    }
                }
            }
        }
        height += 1;
        if height > 64 + count {
            break;
        }
    }
    out
}

/// The dimension group of a diagram: `Z^{l(n)}` with the simplicial cone,
/// connecting maps `m_n^T` and unit `w_0 = (1)` at stage 0.
pub fn diagram_to_system(d: &BratteliDiagram) -> Result<OrderedStagedSystem> {
    let violations = validate_diagram(d);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidDiagram(v.to_string()));
    }
    let system = d.to_staged_system()?;
    OrderedStagedSystem::new(system, Cone::Simplicial, LimitElement::new(0, vec![BigInt::one()]))
}
