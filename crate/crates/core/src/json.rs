//! JSON encoding of groups, matrices, stacky fans, extensions and results.
//!
//! Integers that fit in `i64` are written as JSON numbers, larger ones as
//! decimal strings; both forms are accepted on input. Objects use sorted
//! keys, so `to_canonical_string` is byte-stable.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::abgroup::{normalize, DiagGroup, FgAbGroup, PresentedGroup};
use crate::error::{Error, Result};
use crate::exactla::{IntMatrix, SmithDecomposition};
use crate::galedual::{DisplayMap, GaleDualResult, GaleSequenceReport};
use crate::gerbe::{ExtensionSpec, GerbeResult, KernelSequenceReport};
use crate::momentangle::LemmaReport;
use crate::stackyfan::{Codim, Fan, FanDiagnostic, QuotientPresentation, StackyFan};

fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("values serialize")
}

pub fn bigint_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(x.to_string()),
    }
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| input(format!("{n} is not an integer"))),
        Value::String(s) => s.trim().parse().map_err(|_| input(format!("{s:?} is not an integer"))),
        other => Err(input(format!("expected an integer, got {other}"))),
    }
}

fn usize_from_json(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| input(format!("{what} must be a non-negative integer, got {v}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| input(format!("{what} must be an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| input(format!("missing field {key:?}")))
}

pub fn vector_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(bigint_to_json).collect())
}

pub fn vector_from_json(v: &Value) -> Result<Vec<BigInt>> {
    array(v, "vector")?.iter().map(bigint_from_json).collect()
}

/// Array of rows.
pub fn matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_to_json(m.row(i))).collect())
}

/// Array of equal-length rows; `[]` is the 0x0 matrix.
pub fn matrix_from_json(v: &Value) -> Result<IntMatrix> {
    let rows: Vec<Vec<BigInt>> = array(v, "matrix")?
        .iter()
        .map(vector_from_json)
        .collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(input("matrix rows have different lengths"));
    }
    IntMatrix::from_rows(rows, cols)
}

pub fn group_to_json(g: &FgAbGroup) -> Value {
    json!({ "rank": g.free_rank(), "torsion": vector_to_json(g.torsion()) })
}

/// A group as written, which may list any positive orders.
pub struct ParsedGroup {
    pub group: FgAbGroup,
    /// canonical coordinates of each written generator
    pub to_canonical: IntMatrix,
}

impl ParsedGroup {
    /// Rewrites columns given in written coordinates into canonical ones.
    pub fn convert(&self, m: &IntMatrix) -> Result<IntMatrix> {
        let mut out = self.to_canonical.checked_mul(m)?;
        self.group.reduce_columns(&mut out);
        Ok(out)
    }
}

/// Accepts `{"rank": r, "torsion": [...]}` with arbitrary positive orders
/// (orders of 1 allowed); non-canonical lists are normalized.
pub fn group_from_json(v: &Value) -> Result<ParsedGroup> {
    let rank = usize_from_json(field(v, "rank")?, "rank")?;
    let torsion = match v.get("torsion") {
        Some(t) => vector_from_json(t)?,
        None => Vec::new(),
    };
    if let Some(bad) = torsion.iter().find(|t| **t <= BigInt::zero()) {
        return Err(input(format!("torsion orders must be positive, got {bad}")));
    }
    if let Ok(group) = FgAbGroup::new(rank, torsion.clone()) {
        let to_canonical = IntMatrix::identity(group.num_generators());
        return Ok(ParsedGroup { group, to_canonical });
    }
    let k = rank + torsion.len();
    let mut rel = IntMatrix::zeros(k, torsion.len());
    for (j, t) in torsion.iter().enumerate() {
        rel[(rank + j, j)] = t.clone();
    }
    let n = normalize(&PresentedGroup {
        generators: k,
        relations: rel,
    })?;
    Ok(ParsedGroup {
        group: n.group,
        to_canonical: n.to_canonical,
    })
}

pub fn fan_to_json(f: &Fan) -> Value {
    Value::Array(f.max_cones().iter().map(|c| json!(c)).collect())
}

/// `{"N": ..., "beta": [b_1, ...], "cones": [...]}`; `beta` rows are the
/// elements `b_i` of `N`.
pub fn stacky_fan_to_json(x: &StackyFan) -> Value {
    json!({
        "N": group_to_json(x.group()),
        "beta": matrix_to_json(&x.beta().matrix().transpose()),
        "cones": fan_to_json(x.fan()),
    })
}

pub fn stacky_fan_from_json(v: &Value) -> Result<StackyFan> {
    let parsed = group_from_json(field(v, "N")?)?;
    let written = parsed.to_canonical.cols();
    let rows = array(field(v, "beta")?, "beta")?;
    let mut columns = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let b = vector_from_json(r)?;
        if b.len() != written {
            return Err(input(format!("b_{i} has {} coordinates, N has {written} generators", b.len())));
        }
        columns.push(b);
    }
    let beta = parsed.convert(&IntMatrix::from_columns(written, &columns)?)?;
    let cones = array(field(v, "cones")?, "cones")?
        .iter()
        .map(|c| {
            array(c, "cone")?
                .iter()
                .map(|i| usize_from_json(i, "ray index"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    StackyFan::new(parsed.group, Fan::new(rows.len(), cones), beta)
}

/// `{"target": group, "matrix": rows}`; column `j` is the image of the
/// `j`-th canonical generator of the fan's `DG(β)`.
pub fn extension_from_json(v: &Value, x: &StackyFan) -> Result<ExtensionSpec> {
    let parsed = group_from_json(field(v, "target")?)?;
    let mut m = matrix_from_json(field(v, "matrix")?)?;
    let written = parsed.to_canonical.cols();
    if m.rows() == 0 && m.cols() == 0 {
        let dg = crate::galedual::gale_dual(x.beta())?.dg;
        m = IntMatrix::zeros(written, dg.num_generators());
    }
    if m.rows() != written {
        return Err(input(format!("extension matrix has {} rows, target has {written} generators", m.rows())));
    }
    ExtensionSpec::for_fan(x, parsed.group.clone(), parsed.convert(&m)?)
}

pub fn extension_to_json(e: &ExtensionSpec) -> Value {
    json!({ "target": group_to_json(e.p.target()), "matrix": matrix_to_json(e.p.matrix()) })
}

pub fn diag_group_to_json(g: &DiagGroup) -> Value {
    json!({
        "torus_rank": g.torus_rank,
        "cyclic_orders": vector_to_json(&g.cyclic_orders),
        "order_of_finite_part": bigint_to_json(&g.order_of_finite_part()),
        "display": g.to_string(),
    })
}

pub fn codim_to_json(c: Codim) -> Value {
    match c {
        Codim::Finite(k) => Value::from(k),
        Codim::Infinite => Value::from("inf"),
    }
}

pub fn diagnostic_to_json(d: &FanDiagnostic) -> Value {
    json!({ "code": d.code(), "message": d.to_string() })
}

pub fn display_map_to_json(d: &DisplayMap) -> Value {
    json!({
        "group": d.group_string(),
        "rank": d.free_rank,
        "orders": vector_to_json(&d.orders),
        "beta": matrix_to_json(&d.matrix.transpose()),
    })
}

pub fn gale_dual_to_json(g: &GaleDualResult, report: &GaleSequenceReport) -> Value {
    let nodes: Vec<Value> = report
        .nodes
        .iter()
        .map(|n| {
            json!({
                "sequence": match n.sequence {
                    crate::galedual::GaleSequence::Beta => "beta",
                    crate::galedual::GaleSequence::BetaVee => "beta_vee",
                },
                "node": n.node,
                "exact": n.pass,
            })
        })
        .collect();
    json!({
        "DG": group_to_json(&g.dg),
        "DG_display": g.dg.to_string(),
        "beta_vee": matrix_to_json(g.beta_vee.matrix()),
        "coker_beta_vee": group_to_json(&g.coker_beta_vee),
        "n_star_rank": g.n_star_rank,
        "display": {
            "group": g.display.group_string(),
            "rank": g.display.free_rank,
            "orders": vector_to_json(&g.display.orders),
            "beta_vee": matrix_to_json(&g.display.matrix),
        },
        "canonical_exact": g.canonical_exact,
        "sequences": nodes,
        "sequences_exact": report.all_pass(),
    })
}

pub fn presentation_to_json(q: &QuotientPresentation) -> Value {
    json!({
        "G": diag_group_to_json(&q.g),
        "weights": matrix_to_json(&q.weight_matrix),
        "mu": diag_group_to_json(&q.mu),
        "torus_rank_T": q.torus_rank_t,
        "codim_V": codim_to_json(q.excluded_codim),
        "irrelevant_ideal": q.ideal_generators,
        "action": q.action_formula(),
    })
}

pub fn kernel_sequence_to_json(r: &KernelSequenceReport) -> Value {
    json!({
        "mu_order": bigint_to_json(&r.mu_order),
        "nu_order": bigint_to_json(&r.nu_order),
        "ker_alpha_order": bigint_to_json(&r.kernel_order),
        "order_law": r.order_law,
        "injective": r.injective,
        "exact_middle": r.exact_middle,
        "surjective": r.surjective,
        "fan_unchanged": r.fan_unchanged,
        "new_fan_valid": r.new_fan_valid,
        "gale_sequences_exact": r.gale_sequences_exact,
        "pass": r.all_pass(),
    })
}

pub fn gerbe_to_json(g: &GerbeResult) -> Value {
    json!({
        "stacky_fan": stacky_fan_to_json(&g.stacky_fan),
        "N_display": g.stacky_fan.group().to_string(),
        "display": display_map_to_json(&g.display),
        "nu": diag_group_to_json(&g.nu),
        "G_tilde": diag_group_to_json(&g.g_tilde),
        "weights": matrix_to_json(g.weights.matrix()),
        "extension": extension_to_json(&g.extension),
        "kernel_sequence": kernel_sequence_to_json(&g.report),
    })
}

pub fn lemma_to_json(r: &LemmaReport) -> Value {
    json!({
        "codim_V": codim_to_json(r.codim),
        "coefficients": bigint_to_json(&r.modulus),
        "H1": group_to_json(&r.h1),
        "H2": group_to_json(&r.h2),
        "pass": r.pass,
    })
}

pub fn smith_to_json(s: &SmithDecomposition) -> Value {
    json!({
        "U": matrix_to_json(&s.u),
        "D": matrix_to_json(&s.d),
        "V": matrix_to_json(&s.v),
        "rank": s.rank(),
        "invariant_factors": vector_to_json(&s.invariant_factors()),
    })
}

/// Wraps a map of outputs in an object.
pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn integers_round_trip() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(bigint_to_json(&big), Value::from("123456789012345678901234567890"));
        assert_eq!(bigint_from_json(&bigint_to_json(&big)).unwrap(), big);
        assert_eq!(bigint_to_json(&bi(-7)), json!(-7));
        assert!(bigint_from_json(&json!(1.5)).is_err());
        assert!(bigint_from_json(&json!("x")).is_err());
    }

    #[test]
    fn matrices() {
        let m = IntMatrix::from_i64(&[[1, 2], [3, 4]]);
        assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
        assert_eq!(matrix_from_json(&json!([])).unwrap(), IntMatrix::zeros(0, 0));
        assert!(matrix_from_json(&json!([[1], [2, 3]])).is_err());
    }

    #[test]
    fn stacky_fan_round_trip() {
        let v = json!({"N": {"rank": 1, "torsion": [3]}, "beta": [[1, 0], [-1, 1]], "cones": [[0], [1]]});
        let x = stacky_fan_from_json(&v).unwrap();
        assert_eq!(x.beta().matrix(), &IntMatrix::from_i64(&[[1, -1], [0, 1]]));
        assert_eq!(stacky_fan_to_json(&x), v);
    }

    #[test]
    fn non_canonical_torsion_is_normalized() {
        let v = json!({"N": {"rank": 1, "torsion": [3, 2]}, "beta": [[1, 0, 0], [-1, 1, 0]], "cones": [[0], [1]]});
        let x = stacky_fan_from_json(&v).unwrap();
        assert_eq!(x.group(), &FgAbGroup::new(1, vec![bi(6)]).unwrap());
        // the Z/3 generator lands on an element of order 3 in Z/6
        assert_eq!(x.beta().matrix()[(0, 1)], bi(-1));
        let t = &x.beta().matrix()[(1, 1)];
        assert!(t == &bi(2) || t == &bi(4));
    }

    #[test]
    fn shape_errors() {
        let v = json!({"N": {"rank": 1, "torsion": []}, "beta": [[1, 0]], "cones": [[0]]});
        assert!(stacky_fan_from_json(&v).is_err());
        let v = json!({"N": {"rank": 1, "torsion": [0]}, "beta": [[1, 0]], "cones": [[0]]});
        assert!(stacky_fan_from_json(&v).is_err());
        let v = json!({"beta": [[1]], "cones": [[0]]});
        assert!(stacky_fan_from_json(&v).is_err());
    }
}
