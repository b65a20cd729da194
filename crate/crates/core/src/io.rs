//! Serialization of patterns, operators and operator bundles.
//!
//! JSON documents are emitted with sorted keys and a fixed layout so that
//! serialize, parse, serialize is byte-identical. Matrix Market export is a
//! lossy float view for numeric tooling.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{AlgMatrix, SparseOperator};
use crate::algebra::{AlgebraError, AlgebraLabel, GeneratorId};
use crate::numeric::{format_rational, parse_rational, AlgebraicValue, NumericError, Rational};
use crate::pattern::{BcdPattern, PatternError, PatternRecord};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

fn malformed(what: &str) -> IoError {
    IoError::Malformed(what.to_string())
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Pattern list in record form.
pub fn patterns_to_json(patterns: &[BcdPattern]) -> Value {
    let records: Vec<PatternRecord> = patterns.iter().map(BcdPattern::to_record).collect();
    serde_json::to_value(records).expect("records serialize")
}

/// Inverse of [`patterns_to_json`]; checks shape, not validity.
pub fn patterns_from_json(v: &Value) -> Result<Vec<BcdPattern>, IoError> {
    let records: Vec<PatternRecord> = serde_json::from_value(v.clone())?;
    Ok(records.iter().map(BcdPattern::from_record).collect::<Result<_, _>>()?)
}

fn weight_json(hw: &[Rational]) -> Value {
    Value::Array(hw.iter().map(|q| Value::String(format_rational(q))).collect())
}

fn weight_from(v: &Value) -> Result<Vec<Rational>, IoError> {
    v.as_array()
        .ok_or_else(|| malformed("hw"))?
        .iter()
        .map(|x| Ok(parse_rational(x.as_str().ok_or_else(|| malformed("hw entry"))?)?))
        .collect()
}

fn label_from(v: &Value) -> Result<AlgebraLabel, IoError> {
    let family = v["family"].as_str().ok_or_else(|| malformed("family"))?.parse()?;
    let rank = v["rank"].as_u64().ok_or_else(|| malformed("rank"))? as usize;
    Ok(AlgebraLabel::new(family, rank)?)
}

fn generator_text(g: GeneratorId) -> String {
    format!("{},{}", g.i, g.j)
}

/// `{family, rank, hw, gen, dim, entries: [{row, col, value}]}`; entries in
/// row-major order, values in the exact encoding.
pub fn operator_to_json(op: &SparseOperator) -> Value {
    let mut entries: Vec<(&(usize, usize), &AlgebraicValue)> = op.matrix.entries.iter().collect();
    entries.sort_by_key(|(k, _)| **k);
    let entries: Vec<Value> = entries
        .into_iter()
        .map(|(&(row, col), v)| json!({"row": row, "col": col, "value": v.to_json()}))
        .collect();
    json!({
        "family": op.label.family.to_string(),
        "rank": op.label.rank,
        "hw": weight_json(&op.highest_weight),
        "gen": generator_text(op.generator),
        "dim": op.matrix.rows,
        "entries": entries,
    })
}

/// Inverse of [`operator_to_json`].
pub fn operator_from_json(v: &Value) -> Result<SparseOperator, IoError> {
    let label = label_from(v)?;
    let dim = v["dim"].as_u64().ok_or_else(|| malformed("dim"))? as usize;
    let generator = GeneratorId::parse(v["gen"].as_str().ok_or_else(|| malformed("gen"))?)?;
    let mut matrix = AlgMatrix::zeros(dim, dim);
    for e in v["entries"].as_array().ok_or_else(|| malformed("entries"))? {
        let row = e["row"].as_u64().ok_or_else(|| malformed("row"))? as usize;
        let col = e["col"].as_u64().ok_or_else(|| malformed("col"))? as usize;
        if row >= dim || col >= dim {
            return Err(malformed("entry outside the matrix"));
        }
        matrix.add_to(row, col, &AlgebraicValue::from_json(&e["value"])?);
    }
    Ok(SparseOperator {
        label,
        highest_weight: weight_from(&v["hw"])?,
        generator,
        matrix,
    })
}

/// Operators of one module keyed by generator, for offline verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorBundle {
    pub label: AlgebraLabel,
    pub highest_weight: Vec<Rational>,
    pub operators: BTreeMap<GeneratorId, AlgMatrix>,
}

/// `{family, rank, hw, operators: [operator documents]}`.
pub fn bundle_to_json(bundle: &OperatorBundle) -> Value {
    let ops: Vec<Value> = bundle
        .operators
        .iter()
        .map(|(&g, m)| {
            operator_to_json(&SparseOperator {
                label: bundle.label,
                highest_weight: bundle.highest_weight.clone(),
                generator: g,
                matrix: m.clone(),
            })
        })
        .collect();
    json!({
        "family": bundle.label.family.to_string(),
        "rank": bundle.label.rank,
        "hw": weight_json(&bundle.highest_weight),
        "operators": ops,
    })
}

/// Inverse of [`bundle_to_json`]; every operator must match the bundle's module.
pub fn bundle_from_json(v: &Value) -> Result<OperatorBundle, IoError> {
    let label = label_from(v)?;
    let highest_weight = weight_from(&v["hw"])?;
    let mut operators = BTreeMap::new();
    for o in v["operators"].as_array().ok_or_else(|| malformed("operators"))? {
        let op = operator_from_json(o)?;
        if op.label != label || op.highest_weight != highest_weight {
            return Err(malformed("operator from a different module"));
        }
        operators.insert(op.generator, op.matrix);
    }
    Ok(OperatorBundle { label, highest_weight, operators })
}

/// Matrix Market coordinate format, 1-based, values at 17 significant digits.
pub fn operator_to_matrix_market(op: &SparseOperator) -> String {
    let hw: Vec<String> = op.highest_weight.iter().map(format_rational).collect();
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "% lossy float export of exact values; use the JSON form for exact entries");
    let _ = writeln!(
        out,
        "% family {} rank {} hw {} gen {}",
        op.label.family,
        op.label.rank,
        hw.join(","),
        generator_text(op.generator)
    );
    let _ = writeln!(out, "{} {} {}", op.matrix.rows, op.matrix.cols, op.matrix.entries.len());
    for (&(r, c), v) in &op.matrix.entries {
        let _ = writeln!(out, "{} {} {:.16e}", r + 1, c + 1, v.to_f64());
    }
    out
}

/// Parses the entries of a Matrix Market coordinate document, 0-based.
pub fn matrix_market_entries(text: &str) -> Result<Vec<(usize, usize, f64)>, IoError> {
    let mut lines = text.lines().filter(|l| !l.starts_with('%') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| malformed("size line"))?;
    let count: usize = header
        .split_whitespace()
        .nth(2)
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed("size line"))?;
    let mut out = Vec::with_capacity(count);
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [r, c, v] = parts.as_slice() else { return Err(malformed(line)) };
        let r: usize = r.parse().map_err(|_| malformed(line))?;
        let c: usize = c.parse().map_err(|_| malformed(line))?;
        let v: f64 = v.parse().map_err(|_| malformed(line))?;
        out.push((r - 1, c - 1, v));
    }
    if out.len() != count {
        return Err(malformed("entry count"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Representation;
    use crate::algebra::{DominantWeight, Family};
    use crate::pattern::enumerate;

    fn rep(f: Family, n: usize, hw: &str) -> Representation {
        let label = AlgebraLabel::new(f, n).unwrap();
        Representation::new(label, DominantWeight::parse(&label, hw).unwrap().components()).unwrap()
    }

    #[test]
    fn operator_round_trip_is_byte_identical() {
        let r = rep(Family::B, 2, "1,0");
        let op = r.operator(GeneratorId::new(-1, -2)).unwrap();
        let text = render(&operator_to_json(&op));
        let back = operator_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, op);
        assert_eq!(render(&operator_to_json(&back)), text);
    }

    #[test]
    fn pattern_round_trip_is_byte_identical() {
        let label = AlgebraLabel::new(Family::B, 2).unwrap();
        let ps = enumerate(&label, &DominantWeight::parse(&label, "3/2,1/2").unwrap()).unwrap();
        let text = render(&patterns_to_json(&ps));
        let back = patterns_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, ps);
        assert_eq!(render(&patterns_to_json(&back)), text);
    }

    #[test]
    fn matrix_market_matches_exact_values() {
        let r = rep(Family::C, 2, "2,1");
        let op = r.operator(GeneratorId::new(1, -2)).unwrap();
        let parsed = matrix_market_entries(&operator_to_matrix_market(&op)).unwrap();
        assert_eq!(parsed.len(), op.matrix.entries.len());
        for (row, col, v) in parsed {
            let exact = op.matrix.entries[&(row, col)].to_f64();
            assert!((v - exact).abs() <= 1e-15 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn bundle_round_trip() {
        let r = rep(Family::D, 2, "1,0");
        let operators = r.all_operators().unwrap().into_iter().map(|(g, m)| (g, (*m).clone())).collect();
        let b = OperatorBundle { label: r.label(), highest_weight: r.basis.highest_weight.clone(), operators };
        let text = render(&bundle_to_json(&b));
        let back = bundle_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn rejects_out_of_range_entries() {
        let v = json!({"family": "B", "rank": 1, "hw": ["1"], "gen": "0,-1", "dim": 1,
                       "entries": [{"row": 3, "col": 0, "value": [[1, 1, 1]]}]});
        assert!(operator_from_json(&v).is_err());
    }
}
