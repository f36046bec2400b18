//! JSON encodings. Integers are written as decimal strings so that values of
//! any size survive; on input both strings and JSON integers are accepted.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::abelian::{FgAbelianGroup, LocalizedGroupDescriptor};
use crate::dimension::diagram::{BratteliDiagram, DiagramEndomorphism, Level, Tail};
use crate::dimension::ordered::{Cone, OrderedStagedSystem};
use crate::dimension::shen::ShenCertificate;
use crate::eplag::{PrimeLabeledGraph, Tree};
use crate::error::{Error, Result};
use crate::invariants::{GroupDescriptor, KirchbergInvariant, PipelineReport, UnitClass};
use crate::limits::{LimitElement, LimitEndomorphism, MatrixSequence, StagedSystem};
use crate::matrix::IntMatrix;
use crate::Truth;

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| err(path, format!("missing field '{key}'")))
}

pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let msg = full.rsplit_once(" at line ").map_or(full.as_str(), |(m, _)| m);
        Error::Parse(format!("line {} column {}: {msg}", e.line(), e.column()))
    })
}

pub fn int_to_json(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn int_from_json(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| err(path, format!("'{s}' is not an integer"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(err(path, format!("{n} is not an integer")))
            }
        }
        _ => Err(err(path, "expected an integer")),
    }
}

pub fn usize_from_json(v: &Value, path: &str) -> Result<usize> {
    let i = int_from_json(v, path)?;
    usize::try_from(i).map_err(|_| err(path, "expected a nonnegative machine-size integer"))
}

pub fn u64_from_json(v: &Value, path: &str) -> Result<u64> {
    let i = int_from_json(v, path)?;
    u64::try_from(i).map_err(|_| err(path, "expected a nonnegative machine-size integer"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

pub fn vector_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn vector_from_json(v: &Value, path: &str) -> Result<Vec<BigInt>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| int_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector_to_json(r)).collect())
}

/// A list of rows. An empty list needs `cols` to fix the shape.
pub fn matrix_from_json(v: &Value, cols: Option<usize>, path: &str) -> Result<IntMatrix> {
    let rows = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_json(r, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let cols = match (rows.first(), cols) {
        (Some(r), _) => r.len(),
        (None, Some(c)) => c,
        (None, None) => 0,
    };
    IntMatrix::from_rows(rows, cols).map_err(|e| err(path, e))
}

pub fn group_to_json(g: &FgAbelianGroup) -> Value {
    json!({"generators": g.num_generators(), "relations": matrix_to_json(g.relations())})
}

pub fn group_from_json(v: &Value) -> Result<FgAbelianGroup> {
    let n = usize_from_json(field(v, "generators", "group")?, "group.generators")?;
    let rel = match v.get("relations") {
        Some(r) => matrix_from_json(r, Some(n), "group.relations")?,
        None => IntMatrix::zeros(0, n),
    };
    FgAbelianGroup::new(n, rel).map_err(|e| err("group.relations", e))
}

/// Canonical summary of a group: invariant factors, free rank, torsion.
pub fn group_summary_json(g: &FgAbelianGroup) -> Value {
    json!({
        "invariant_factors": vector_to_json(g.invariant_factors()),
        "free_rank": g.free_rank(),
        "torsion": vector_to_json(&g.torsion_factors()),
        "order": g.order().map(|o| int_to_json(&o)),
        "description": g.to_string(),
    })
}

pub fn localized_to_json(l: &LocalizedGroupDescriptor) -> Value {
    json!({
        "inverted_primes": l.inverted_primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "free_rank": l.free_rank,
        "torsion": vector_to_json(&l.torsion),
        "description": l.to_string(),
    })
}

fn sequence_to_json(seq: &MatrixSequence) -> (Value, Value, Option<usize>) {
    match seq {
        MatrixSequence::Stationary(m) => (json!("stationary"), json!([matrix_to_json(m)]), None),
        MatrixSequence::PrefixTail { prefix, period } => {
            let all: Vec<Value> = prefix.iter().chain(period).map(matrix_to_json).collect();
            (json!("prefix+tail"), Value::Array(all), Some(prefix.len()))
        }
    }
}

fn sequence_from_json(v: &Value, path: &str) -> Result<MatrixSequence> {
    let kind = field(v, "kind", path)?.as_str().ok_or_else(|| err(path, "'kind' must be a string"))?;
    let mats = array(field(v, "matrices", path)?, &format!("{path}.matrices"))?
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, None, &format!("{path}.matrices[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    match kind {
        "stationary" => {
            if mats.len() != 1 {
                return Err(err(path, "a stationary sequence has exactly one matrix"));
            }
            Ok(MatrixSequence::Stationary(mats.into_iter().next().expect("one matrix")))
        }
        "prefix+tail" => {
            let k = match v.get("prefix") {
                Some(p) => usize_from_json(p, &format!("{path}.prefix"))?,
                None => 0,
            };
            if k >= mats.len() {
                return Err(err(path, "the periodic tail needs at least one matrix after the prefix"));
            }
            let mut prefix = mats;
            let period = prefix.split_off(k);
            Ok(MatrixSequence::PrefixTail { prefix, period })
        }
        other => Err(err(&format!("{path}.kind"), format!("unknown kind '{other}'"))),
    }
}

pub fn system_to_json(s: &StagedSystem) -> Value {
    let (kind, matrices, prefix) = sequence_to_json(s.matrices());
    let mut m = Map::new();
    m.insert("kind".into(), kind);
    m.insert("matrices".into(), matrices);
    if let Some(p) = prefix {
        m.insert("prefix".into(), json!(p));
    }
    m.insert("injective".into(), json!(s.is_injective()));
    Value::Object(m)
}

pub fn system_from_json(v: &Value) -> Result<StagedSystem> {
    let seq = sequence_from_json(v, "system")?;
    if let MatrixSequence::Stationary(m) = &seq {
        if !m.is_square() {
            return Err(err("system.matrices[0]", "a stationary map must be square"));
        }
    }
    let mut s = StagedSystem::new(seq).map_err(|e| err("system", e))?;
    if let Some(flag) = v.get("injective") {
        let flag = flag.as_bool().ok_or_else(|| err("system.injective", "expected a boolean"))?;
        s = s.with_injective_flag(flag).map_err(|e| err("system.injective", e))?;
    }
    Ok(s)
}

pub fn element_to_json(e: &LimitElement) -> Value {
    json!({"stage": e.stage, "vector": vector_to_json(&e.vector)})
}

pub fn element_from_json(v: &Value, path: &str) -> Result<LimitElement> {
    let stage = usize_from_json(field(v, "stage", path)?, &format!("{path}.stage"))?;
    let vector = vector_from_json(field(v, "vector", path)?, &format!("{path}.vector"))?;
    Ok(LimitElement { stage, vector })
}

pub fn ordered_to_json(d: &OrderedStagedSystem) -> Value {
    let cone = match d.cone {
        Cone::Simplicial => "simplicial",
        Cone::StrictFirst => "strict_first",
    };
    json!({"system": system_to_json(&d.system), "cone": cone, "unit": element_to_json(&d.unit)})
}

/// An ordered system, or a bare system (simplicial cone, unit `(1,...,1)`
/// at stage 0).
pub fn ordered_from_json(v: &Value) -> Result<OrderedStagedSystem> {
    let (sys_v, cone_v, unit_v) = match v.get("system") {
        Some(s) => (s, v.get("cone"), v.get("unit")),
        None => (v, None, None),
    };
    let system = system_from_json(sys_v)?;
    let cone = match cone_v.map(|c| c.as_str()) {
        None | Some(Some("simplicial")) => Cone::Simplicial,
        Some(Some("strict_first")) => Cone::StrictFirst,
        _ => return Err(err("cone", "expected \"simplicial\" or \"strict_first\"")),
    };
    let unit = match unit_v {
        Some(u) => element_from_json(u, "unit")?,
        None => LimitElement::new(0, vec![BigInt::from(1); system.stage_rank(0)]),
    };
    OrderedStagedSystem::new(system, cone, unit).map_err(|e| err("unit", e))
}

pub fn endo_to_json(e: &LimitEndomorphism) -> Value {
    match e {
        LimitEndomorphism::AlphaInfinity => json!({"kind": "alpha_infinity"}),
        LimitEndomorphism::Staged { shift, maps } => {
            let (kind, matrices, prefix) = sequence_to_json(maps);
            let mut m = Map::new();
            m.insert("kind".into(), kind);
            m.insert("shift".into(), json!(shift));
            m.insert("matrices".into(), matrices);
            if let Some(p) = prefix {
                m.insert("prefix".into(), json!(p));
            }
            Value::Object(m)
        }
    }
}

pub fn endo_from_json(v: &Value) -> Result<LimitEndomorphism> {
    if v.get("kind").and_then(Value::as_str) == Some("alpha_infinity") {
        return Ok(LimitEndomorphism::AlphaInfinity);
    }
    let shift = match v.get("shift") {
        Some(s) => usize_from_json(s, "endo.shift")?,
        None => 0,
    };
    Ok(LimitEndomorphism::Staged { shift, maps: sequence_from_json(v, "endo")? })
}

pub fn diagram_to_json(d: &BratteliDiagram) -> Value {
    let levels: Vec<Value> = d
        .levels
        .iter()
        .map(|lv| {
            let mut m = Map::new();
            m.insert("l".into(), json!(lv.l));
            m.insert("w".into(), vector_to_json(&lv.w));
            if let Some(inc) = &lv.m {
                m.insert("m".into(), matrix_to_json(inc));
            }
            Value::Object(m)
        })
        .collect();
    let mut m = Map::new();
    m.insert("levels".into(), Value::Array(levels));
    if let Some(t) = d.tail {
        m.insert("tail".into(), json!({"start": t.start, "period": t.period}));
    }
    Value::Object(m)
}

pub fn diagram_from_json(v: &Value) -> Result<BratteliDiagram> {
    let levels = array(field(v, "levels", "diagram")?, "levels")?
        .iter()
        .enumerate()
        .map(|(n, lv)| {
            let path = format!("levels[{n}]");
            let w = vector_from_json(field(lv, "w", &path)?, &format!("{path}.w"))?;
            let l = match lv.get("l") {
                Some(l) => usize_from_json(l, &format!("{path}.l"))?,
                None => w.len(),
            };
            let m = match lv.get("m") {
                Some(Value::Null) | None => None,
                Some(m) => Some(matrix_from_json(m, Some(0), &format!("{path}.m"))?),
            };
            Ok(Level { l, w, m })
        })
        .collect::<Result<Vec<_>>>()?;
    let tail = match v.get("tail") {
        Some(Value::Null) | None => None,
        Some(t) => Some(Tail {
            start: usize_from_json(field(t, "start", "tail")?, "tail.start")?,
            period: usize_from_json(field(t, "period", "tail")?, "tail.period")?,
        }),
    };
    Ok(BratteliDiagram { levels, tail })
}

pub fn diagram_endo_to_json(q: &DiagramEndomorphism) -> Value {
    json!({"q": q.q.iter().map(matrix_to_json).collect::<Vec<_>>()})
}

pub fn diagram_endo_from_json(v: &Value) -> Result<DiagramEndomorphism> {
    let q = array(field(v, "q", "endomorphism")?, "q")?
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, Some(0), &format!("q[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagramEndomorphism { q })
}

pub fn certificate_to_json(c: &ShenCertificate) -> Value {
    json!({
        "N": c.n(),
        "phi": c.phi.iter().map(element_to_json).collect::<Vec<_>>(),
        "g": matrix_to_json(&c.g),
    })
}

pub fn tree_from_json(v: &Value) -> Result<Tree> {
    serde_json::from_value(v.clone()).map_err(|e| err("tree", e))
}

pub fn tree_to_json(t: &Tree) -> Value {
    serde_json::to_value(t).expect("trees serialise")
}

fn u64_list(v: &Value, path: &str) -> Result<Vec<u64>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| u64_from_json(x, &format!("{path}[{i}]"))).collect()
}

pub fn primes_from_json(v: Option<&Value>, path: &str) -> Result<BTreeSet<u64>> {
    match v {
        None | Some(Value::Null) => Ok(BTreeSet::new()),
        Some(v) => Ok(u64_list(v, path)?.into_iter().collect()),
    }
}

pub fn graph_to_json(g: &PrimeLabeledGraph) -> Value {
    let s = |xs: &[u64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    json!({
        "vertices": g.vertices,
        "vertex_labels": s(&g.vertex_labels),
        "edges": g.edges.iter().map(|&(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>(),
        "edge_labels": s(&g.edge_labels),
        "primes": g.primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    })
}

/// `vertices` may be a list of names or a count.
pub fn graph_from_json(v: &Value) -> Result<PrimeLabeledGraph> {
    let vertices = match field(v, "vertices", "graph")? {
        Value::Array(a) => a
            .iter()
            .enumerate()
            .map(|(i, x)| match x {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                _ => Err(err(&format!("vertices[{i}]"), "expected a name")),
            })
            .collect::<Result<Vec<_>>>()?,
        n => (0..usize_from_json(n, "vertices")?).map(|i| format!("v{i}")).collect(),
    };
    let vertex_labels = u64_list(field(v, "vertex_labels", "graph")?, "vertex_labels")?;
    let edges = match v.get("edges") {
        None => Vec::new(),
        Some(e) => array(e, "edges")?
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let path = format!("edges[{i}]");
                let pair = array(p, &path)?;
                if pair.len() != 2 {
                    return Err(err(&path, "an edge has two endpoints"));
                }
                Ok((usize_from_json(&pair[0], &path)?, usize_from_json(&pair[1], &path)?))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let edge_labels = match v.get("edge_labels") {
        None => Vec::new(),
        Some(e) => u64_list(e, "edge_labels")?,
    };
    let primes = primes_from_json(v.get("primes"), "primes")?;
    PrimeLabeledGraph::new(vertices, vertex_labels, edges, edge_labels, primes).map_err(|e| err("graph", e))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<BigRational> {
    if let Value::String(s) = v {
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err(path, format!("bad numerator in '{s}'")))?;
            let d: BigInt = d.trim().parse().map_err(|_| err(path, format!("bad denominator in '{s}'")))?;
            if d == BigInt::from(0) {
                return Err(err(path, "zero denominator"));
            }
            return Ok(BigRational::new(n, d));
        }
    }
    Ok(BigRational::from_integer(int_from_json(v, path)?))
}

pub fn rational_to_json(q: &BigRational) -> Value {
    if q.is_integer() {
        Value::String(q.numer().to_string())
    } else {
        Value::String(format!("{}/{}", q.numer(), q.denom()))
    }
}

pub fn qvector_from_json(v: &Value, path: &str) -> Result<Vec<BigRational>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| rational_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn truth_to_json(t: Truth) -> Value {
    json!(match t {
        Truth::True => "true",
        Truth::False => "false",
        Truth::Unknown => "unknown",
    })
}

pub fn descriptor_to_json(g: &GroupDescriptor) -> Value {
    match g {
        GroupDescriptor::Fg(g) => json!({"kind": "fg", "group": group_to_json(g), "summary": group_summary_json(g)}),
        GroupDescriptor::Localized(l) => json!({"kind": "localized", "group": localized_to_json(l)}),
        GroupDescriptor::Eplag(e) => json!({"kind": "eplag", "graph": graph_to_json(&e.graph)}),
    }
}

pub fn invariant_to_json(inv: &KirchbergInvariant) -> Value {
    let unit = match &inv.unit {
        UnitClass::Zero => json!("0"),
        UnitClass::Element(v) => vector_to_json(v),
    };
    json!({
        "k0": descriptor_to_json(&inv.k0),
        "unit": unit,
        "k1": descriptor_to_json(&inv.k1),
        "description": inv.describe(),
    })
}

pub fn pipeline_report_to_json(r: &PipelineReport) -> Value {
    json!({
        "group": group_summary_json(&r.group),
        "prime": r.prime.to_string(),
        "depth": r.depth,
        "pass": r.pass(),
        "rordam": {
            "pass": r.rordam.pass,
            "expected": vector_to_json(&r.rordam.expected),
            "observed": r.rordam.observed.iter().map(|o| vector_to_json(o)).collect::<Vec<_>>(),
        },
        "system_rank": r.system_rank,
        "beta_commutes": r.beta_commutes,
        "ehs": {
            "pass": r.ehs.pass(),
            "diagram_valid": r.ehs.diagram_valid,
            "endomorphism_valid": r.ehs.endomorphism_valid,
            "intertwining": r.ehs.intertwining,
            "theta_identities": r.ehs.theta_identities,
            "shen_certificates": r.ehs.shen_certificates,
            "shen_verified": r.ehs.shen_verified,
            "diagram": diagram_to_json(&r.diagram),
            "endomorphism": diagram_endo_to_json(&r.endomorphism),
        },
        "pv": {
            "pass": r.pv.pass,
            "expected": vector_to_json(&r.pv.expected),
            "observed": r.pv.observed.iter().map(|(d, c, k)| json!({
                "depth": d, "cokernel": vector_to_json(c), "kernel_rank": k,
            })).collect::<Vec<_>>(),
        },
        "invariant": invariant_to_json(&r.invariant),
        "o_infty_st_absorbing": r.o_infty_st_absorbing,
        "d_p_absorbing": r.d_p_absorbing,
        "crossed_product": invariant_to_json(&r.crossed_product),
        "crossed_product_matches": truth_to_json(r.crossed_product_matches),
    })
}
