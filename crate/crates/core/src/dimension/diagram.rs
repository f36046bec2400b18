//! Bratteli diagrams: levels of weighted vertices joined by multi-edges.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{MatrixSequence, StagedSystem};
use crate::matrix::IntMatrix;

/// One level: `l` vertices with weights `w`, and (except possibly for the
/// last stored level) the `l(n) x l(n+1)` incidence matrix `m` to the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub l: usize,
    pub w: Vec<BigInt>,
    pub m: Option<IntMatrix>,
}

/// From level `start` on, incidence matrices repeat with the given period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tail {
    pub start: usize,
    pub period: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BratteliDiagram {
    pub levels: Vec<Level>,
    pub tail: Option<Tail>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub level: usize,
    pub condition: u8,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} at level {}: {}", self.condition, self.level, self.message)
    }
}

/// Per-level incidence data for an endomorphism of a diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramEndomorphism {
    pub q: Vec<IntMatrix>,
}

fn ints(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

impl BratteliDiagram {
    /// A diagram whose single incidence matrix `m` repeats forever, with the
    /// first `levels` levels stored explicitly.
    pub fn stationary(m: IntMatrix, levels: usize) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDiagram("a stationary incidence matrix must be square".into()));
        }
        if m.rows() != 1 {
            return Err(Error::InvalidDiagram("level 0 has one vertex, so the repeated matrix must be 1x1".into()));
        }
        Self::from_incidences(vec![], vec![m], levels)
    }

    /// Weights from the recursion and incidence matrices from the prefix
    /// then the repeating period. At least `levels` levels are stored, and
    /// always enough to hold one full period.
    pub fn from_incidences(prefix: Vec<IntMatrix>, period: Vec<IntMatrix>, levels: usize) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidDiagram("empty period".into()));
        }
        let tail = Tail { start: prefix.len(), period: period.len() };
        let seq = MatrixSequence::PrefixTail { prefix, period };
        let count = levels.max(tail.start + tail.period + 1);
        let mut w = ints(&[1]);
        let mut out = Vec::with_capacity(count);
        for n in 0..count {
            let m = seq.get(n).clone();
            if m.rows() != w.len() {
                return Err(Error::InvalidDiagram(format!("incidence {n} does not start from level {n}")));
            }
            let next = m.vec_mul(&w)?;
            out.push(Level { l: w.len(), w, m: (n + 1 < count).then_some(m) });
            w = next;
        }
        Ok(BratteliDiagram { levels: out, tail: Some(tail) })
    }

    pub fn num_stored_levels(&self) -> usize {
        self.levels.len()
    }

    /// Incidence matrix `m_n`, using the tail beyond the stored levels.
    pub fn incidence(&self, n: usize) -> Option<&IntMatrix> {
        if let Some(m) = self.levels.get(n).and_then(|lv| lv.m.as_ref()) {
            return Some(m);
        }
        let t = self.tail?;
        if t.period == 0 || n < t.start {
            return None;
        }
        let k = t.start + (n - t.start) % t.period;
        self.levels.get(k).and_then(|lv| lv.m.as_ref())
    }

    /// Weights `w_n`, extended past the stored levels with the recursion.
    pub fn weights(&self, n: usize) -> Result<Vec<BigInt>> {
        if let Some(lv) = self.levels.get(n) {
            return Ok(lv.w.clone());
        }
        let last = self
            .levels
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidDiagram("diagram has no levels".into()))?;
        let mut w = self.levels[last].w.clone();
        for k in last..n {
            let m = self
                .incidence(k)
                .ok_or_else(|| Error::InvalidInput(format!("level {n} is beyond the stored diagram")))?;
            w = m.vec_mul(&w)?;
        }
        Ok(w)
    }

    pub fn vertex_count(&self, n: usize) -> Result<usize> {
        match self.levels.get(n) {
            Some(lv) => Ok(lv.l),
            None => Ok(self.weights(n)?.len()),
        }
    }

    /// The connecting matrices in column convention: `C_n = m_n^T`. Without
    /// an explicit tail, the last stored incidence repeats and must be square.
    pub fn connecting_sequence(&self) -> Result<MatrixSequence> {
        let stored: Vec<IntMatrix> = self.levels.iter().map_while(|lv| lv.m.clone()).collect();
        if stored.is_empty() {
            return Err(Error::InvalidDiagram("no incidence matrices".into()));
        }
        let tail = match self.tail {
            Some(t) => t,
            None => {
                let last = stored.last().expect("non-empty");
                if !last.is_square() {
                    return Err(Error::InvalidDiagram(
                        "without a tail the last incidence matrix repeats and must be square".into(),
                    ));
                }
                Tail { start: stored.len() - 1, period: 1 }
            }
        };
        if tail.period == 0 || tail.start + tail.period > stored.len() {
            return Err(Error::InvalidDiagram("tail refers to incidence matrices that are not stored".into()));
        }
        let prefix = stored[..tail.start].iter().map(IntMatrix::transpose).collect();
        let period = stored[tail.start..tail.start + tail.period].iter().map(IntMatrix::transpose).collect();
        Ok(MatrixSequence::PrefixTail { prefix, period })
    }

    pub fn to_staged_system(&self) -> Result<StagedSystem> {
        StagedSystem::new(self.connecting_sequence()?)
    }
}

/// Lists every violated condition; empty iff the diagram is valid.
pub fn validate_diagram(d: &BratteliDiagram) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |level: usize, condition: u8, message: String| out.push(Violation { level, condition, message });
    let Some(first) = d.levels.first() else {
        push(0, 1, "diagram has no levels".into());
        return out;
    };
    if first.l != 1 {
        push(0, 1, format!("level 0 has {} vertices", first.l));
    }
    if first.w.first().is_none_or(|w| *w != BigInt::from(1)) {
        push(0, 2, "the root weight is not 1".into());
    }
    for (n, lv) in d.levels.iter().enumerate() {
        if lv.w.len() != lv.l {
            push(n, 3, format!("{} weights for {} vertices", lv.w.len(), lv.l));
        }
        if lv.w.iter().any(|w| !w.is_positive()) {
            push(n, 3, "a weight is not positive".into());
        }
        let Some(m) = &lv.m else {
            if n + 1 < d.levels.len() {
                push(n, 4, "missing incidence matrix".into());
            }
            continue;
        };
        if m.rows() != lv.l {
            push(n, 4, format!("incidence has {} rows for {} vertices", m.rows(), lv.l));
            continue;
        }
        if m.entries().iter().any(|x| x.is_negative()) {
            push(n, 4, "negative edge multiplicity".into());
        }
        let Some(next) = d.levels.get(n + 1) else { continue };
        if m.cols() != next.l {
            push(n, 4, format!("incidence has {} columns for {} vertices", m.cols(), next.l));
            continue;
        }
        if lv.w.len() == lv.l && next.w.len() == next.l {
            let expect = m.vec_mul(&lv.w).expect("shape checked");
            if expect != next.w {
                push(n + 1, 5, "weights do not follow the path count recursion".into());
            }
        }
    }
    if let Some(t) = d.tail {
        let stored = d.levels.iter().take_while(|lv| lv.m.is_some()).count();
        if t.period == 0 || t.start + t.period > stored {
            push(t.start, 4, "tail refers to incidence matrices that are not stored".into());
        } else {
            let last = d.levels[t.start + t.period - 1].m.as_ref().expect("stored");
            if last.cols() != d.levels[t.start].l {
                push(t.start, 4, "periodic tail does not close up".into());
            }
        }
    }
    out
}

/// Block sizes of the multimatrix algebra at level `n`.
pub fn multimatrix_dims(d: &BratteliDiagram, n: usize) -> Result<Vec<BigInt>> {
    d.weights(n)
}

/// Checks `sum_t m_n(i,t) q_{n+1}(t,t') = sum_t q_n(i,t) m_{n+1}(t,t')` for
/// every `n` where all four matrices are available.
pub fn validate_endomorphism(d: &BratteliDiagram, q: &DiagramEndomorphism) -> Result<bool> {
    for (n, qn) in q.q.iter().enumerate() {
        let (rows, cols) = (d.vertex_count(n)?, d.vertex_count(n + 1)?);
        if qn.rows() != rows || qn.cols() != cols {
            return Err(Error::DimensionMismatch(format!(
                "q_{n} is {}x{} but levels {n}, {} have {rows} and {cols} vertices",
                qn.rows(),
                qn.cols(),
                n + 1
            )));
        }
    }
    for n in 0..q.q.len().saturating_sub(1) {
        let (Some(m0), Some(m1)) = (d.incidence(n), d.incidence(n + 1)) else {
            break;
        };
        let lhs = m0.checked_mul(&q.q[n + 1])?;
        let rhs = q.q[n].checked_mul(m1)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Contracts the diagram to the levels in `cuts`, multiplying the
/// incidence matrices in between.
pub fn telescope(d: &BratteliDiagram, cuts: &[usize]) -> Result<BratteliDiagram> {
    if cuts.first() != Some(&0) {
        return Err(Error::InvalidInput("cut points must start at 0".into()));
    }
    if cuts.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidInput("cut points must be strictly increasing".into()));
    }
    let mut levels = Vec::with_capacity(cuts.len());
    for (j, &c) in cuts.iter().enumerate() {
        let w = d.weights(c)?;
        let m = match cuts.get(j + 1) {
            Some(&next) => {
                let mut acc = IntMatrix::identity(w.len());
                for n in c..next {
                    let m = d
                        .incidence(n)
                        .ok_or_else(|| Error::InvalidInput(format!("level {n} is beyond the stored diagram")))?;
                    acc = acc.checked_mul(m)?;
                }
                Some(acc)
            }
            None => None,
        };
        levels.push(Level { l: w.len(), w, m });
    }
    Ok(BratteliDiagram { levels, tail: None })
}

/// Graphviz rendering: one rank per level, vertices labelled `index:weight`,
/// edges labelled with their multiplicity.
pub fn to_dot(d: &BratteliDiagram) -> String {
    let mut s = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
    for (n, lv) in d.levels.iter().enumerate() {
        s.push_str(&format!("  subgraph level_{n} {{\n    rank=same;\n"));
        for (i, w) in lv.w.iter().enumerate() {
            s.push_str(&format!("    v{n}_{i} [label=\"{i}:{w}\"];\n"));
        }
        s.push_str("  }\n");
    }
    for (n, lv) in d.levels.iter().enumerate() {
        let Some(m) = &lv.m else { continue };
        if n + 1 >= d.levels.len() {
            continue;
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let k = &m[(i, j)];
                if !k.is_zero() {
                    s.push_str(&format!("  v{n}_{i} -> v{}_{j} [label=\"{k}\"];\n", n + 1));
                }
            }
        }
    }
    s.push_str("}\n");
    s
}
