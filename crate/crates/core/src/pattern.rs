//! Gelfand–Tsetlin-type patterns for `gl_n` and the B/C/D series.
//!
//! A B/C/D pattern of rank `n` is a stack of levels `n, n-1, …, 1`. Level `k`
//! holds an unprimed row of length `k`, a primed row (length `k` for B/C,
//! `k-1` for D, absent at D level 1) and, for B only, a bit `σ`. The
//! unprimed row of level `k-1` is the "next row" of level `k`.
//!
//! Interlacing at level `k` with rows `a` (unprimed), `b` (primed), `c` (next):
//! * B/C: `a_1 ≥ b_1 ≥ a_2 ≥ … ≥ a_k ≥ b_k ≥ 0` and `b_1 ≥ c_1 ≥ b_2 ≥ … ≥ c_{k-1} ≥ b_k`;
//! * D: `a_i ≥ b_i ≥ a_{i+1}` for `i < k-1`, `a_{k-1} ≥ b_{k-1} ≥ |a_k|`,
//!   `b_i ≥ c_i ≥ b_{i+1}` for `i < k-1` and `b_{k-1} ≥ |c_{k-1}|`.
//!
//! All entries share the integrality class of the highest weight. Level `k`
//! determines the weight component `Δ_{-(n-k+1)}`.

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraLabel, DominantWeight, Family};
use crate::numeric::{format_rational, parse_rational, rat, NumericError, Rational};
use crate::oracle::WeightVector;

/// A violated pattern constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The top row is not a dominant weight.
    TopRow(String),
    /// An entry is not in the integrality class of the top row.
    Integrality { level: usize },
    /// An interlacing inequality fails at `level`.
    Interlacing { level: usize, detail: String },
    /// B series: `σ = 1` while the last primed entry is zero.
    Sigma { level: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TopRow(s) => write!(f, "top row: {s}"),
            Violation::Integrality { level } => write!(f, "integrality at level {level}"),
            Violation::Interlacing { level, detail } => {
                write!(f, "interlacing at level {level}: {detail}")
            }
            Violation::Sigma { level } => write!(f, "σ constraint at level {level}"),
        }
    }
}

/// Pattern errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern shape does not match {label}: {detail}")]
    Shape { label: AlgebraLabel, detail: String },
    #[error("invalid pattern: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// One level of a B/C/D pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Level {
    pub row: Vec<Rational>,
    pub primed: Vec<Rational>,
    /// Always 0 outside the B series.
    pub sigma: u8,
}

/// A B/C/D Gelfand–Tsetlin-type pattern; `levels[0]` is level `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BcdPattern {
    pub label: AlgebraLabel,
    pub levels: Vec<Level>,
}

impl PartialOrd for BcdPattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Pattern order: lexicographic on rows top to bottom, each primed row
/// followed by its `σ`.
impl Ord for BcdPattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.label
            .cmp(&other.label)
            .then_with(|| self.order_key().cmp(&other.order_key()))
    }
}

/// Values `x` with `lo ≤ x ≤ hi` and `x - class` integral.
fn class_range(lo: &Rational, hi: &Rational, class: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut x = (lo - class).ceil() + class;
    while &x <= hi {
        out.push(x.clone());
        x += rat(1);
    }
    out
}

fn cartesian(ranges: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for r in ranges {
        let mut next = Vec::with_capacity(out.len() * r.len());
        for prefix in &out {
            for x in r {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn fractional(q: &Rational) -> Rational {
    q - q.floor()
}

fn primed_rows(family: Family, a: &[Rational], class: &Rational) -> Vec<Vec<Rational>> {
    let k = a.len();
    let ranges: Vec<Vec<Rational>> = match family {
        Family::D => {
            let last = a[k - 1].abs();
            (0..k - 1)
                .map(|i| {
                    let lo = if i + 2 < k { a[i + 1].clone().max(last.clone()) } else { last.clone() };
                    class_range(&lo, &a[i], class)
                })
                .collect()
        }
        _ => (0..k)
            .map(|i| {
                let lo = if i + 1 < k { a[i + 1].clone() } else { Rational::zero() };
                class_range(&lo, &a[i], class)
            })
            .collect(),
    };
    cartesian(&ranges)
}

fn next_rows(family: Family, b: &[Rational], k: usize, class: &Rational) -> Vec<Vec<Rational>> {
    let ranges: Vec<Vec<Rational>> = match family {
        Family::D => {
            let mut r: Vec<Vec<Rational>> = (0..k.saturating_sub(2))
                .map(|i| class_range(&b[i + 1], &b[i], class))
                .collect();
            if k >= 2 {
                let top = &b[k - 2];
                r.push(class_range(&-top.clone(), top, class));
            }
            r
        }
        _ => (0..k - 1).map(|i| class_range(&b[i + 1], &b[i], class)).collect(),
    };
    cartesian(&ranges)
}

fn sum(v: &[Rational]) -> Rational {
    v.iter().sum()
}

/// Weight contributed by one level given the next row (empty at level 1).
fn level_weight(family: Family, level: &Level, next: &[Rational]) -> Rational {
    let a = &level.row;
    let b = &level.primed;
    match family {
        Family::D => {
            let k = a.len();
            if k == 1 {
                return a[0].clone();
            }
            sum(&a[..k - 1]) + sum(&next[..k - 2]) + (&a[k - 1] + &next[k - 2]).abs() - rat(2) * sum(b)
        }
        _ => rat(2) * sum(b) - sum(a) - sum(next) - rat(level.sigma as i64),
    }
}

impl BcdPattern {
    /// Rank of the pattern's algebra.
    pub fn rank(&self) -> usize {
        self.label.rank
    }

    /// The top row.
    pub fn highest_weight(&self) -> &[Rational] {
        &self.levels[0].row
    }

    /// Level `k`, `1 ≤ k ≤ n`.
    pub fn level(&self, k: usize) -> &Level {
        &self.levels[self.rank() - k]
    }

    fn order_key(&self) -> Vec<Rational> {
        let mut key = Vec::new();
        for l in &self.levels {
            key.extend(l.row.iter().cloned());
            key.extend(l.primed.iter().cloned());
            if self.label.family == Family::B {
                key.push(rat(l.sigma as i64));
            }
        }
        key
    }

    fn check_shape(&self) -> Result<(), PatternError> {
        let n = self.rank();
        let bad = |detail: String| PatternError::Shape { label: self.label, detail };
        if self.label.family == Family::A {
            return Err(PatternError::Unsupported("gl_n patterns use GlPattern".into()));
        }
        if self.levels.len() != n {
            return Err(bad(format!("{} levels, expected {n}", self.levels.len())));
        }
        for (idx, l) in self.levels.iter().enumerate() {
            let k = n - idx;
            let primed_len = match self.label.family {
                Family::D => k - 1,
                _ => k,
            };
            if l.row.len() != k || l.primed.len() != primed_len {
                return Err(bad(format!("level {k} has row/primed lengths {}/{}", l.row.len(), l.primed.len())));
            }
            if l.sigma > 1 || (l.sigma == 1 && self.label.family != Family::B) {
                return Err(bad(format!("level {k} has σ = {}", l.sigma)));
            }
        }
        Ok(())
    }

    /// Checks every pattern constraint; lists all violations.
    pub fn validate(&self) -> Result<(), PatternError> {
        self.check_shape()?;
        let family = self.label.family;
        let n = self.rank();
        let mut violations = Vec::new();
        if let Err(e) = DominantWeight::new(&self.label, self.highest_weight().to_vec()) {
            violations.push(Violation::TopRow(e.to_string()));
        }
        let class = fractional(&self.highest_weight()[0]);
        for (idx, l) in self.levels.iter().enumerate() {
            let k = n - idx;
            let next: &[Rational] = self.levels.get(idx + 1).map(|x| x.row.as_slice()).unwrap_or(&[]);
            let all_in_class = l.row.iter().chain(&l.primed).all(|x| fractional(x) == class);
            if !all_in_class {
                violations.push(Violation::Integrality { level: k });
            }
            let mut fail = |detail: String| violations.push(Violation::Interlacing { level: k, detail });
            let (a, b, c) = (&l.row, &l.primed, next);
            match family {
                Family::D => {
                    if k >= 2 {
                        let last = a[k - 1].abs();
                        for i in 0..k - 1 {
                            let lo = if i + 2 < k { a[i + 1].clone().max(last.clone()) } else { last.clone() };
                            if !(a[i] >= b[i] && b[i] >= lo) {
                                fail(format!("primed entry {i} outside [{}, {}]", format_rational(&lo), format_rational(&a[i])));
                            }
                        }
                        for i in 0..k - 1 {
                            let (lo, hi) = if i + 2 < k {
                                (b[i + 1].clone(), b[i].clone())
                            } else {
                                (-b[i].clone(), b[i].clone())
                            };
                            if !(c[i] >= lo && c[i] <= hi) {
                                fail(format!("next-row entry {i} outside [{}, {}]", format_rational(&lo), format_rational(&hi)));
                            }
                        }
                    }
                }
                _ => {
                    for i in 0..k {
                        let lo = if i + 1 < k { a[i + 1].clone() } else { Rational::zero() };
                        if !(a[i] >= b[i] && b[i] >= lo) {
                            fail(format!("primed entry {i} outside [{}, {}]", format_rational(&lo), format_rational(&a[i])));
                        }
                    }
                    for i in 0..k.saturating_sub(1) {
                        if !(b[i] >= c[i] && c[i] >= b[i + 1]) {
                            fail(format!("next-row entry {i} outside [{}, {}]", format_rational(&b[i + 1]), format_rational(&b[i])));
                        }
                    }
                }
            }
            if family == Family::B && l.sigma == 1 && l.primed[k - 1].is_zero() {
                violations.push(Violation::Sigma { level: k });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(PatternError::Invalid(violations))
        }
    }

    /// Weight `[Δ_{-n}, …, Δ_{-1}]`.
    pub fn weight(&self) -> Result<WeightVector, PatternError> {
        self.validate()?;
        Ok(self.weight_unchecked())
    }

    /// Weight without validation; meaningful only for valid patterns.
    pub fn weight_unchecked(&self) -> WeightVector {
        let n = self.rank();
        let mut w = vec![Rational::zero(); n];
        for (idx, l) in self.levels.iter().enumerate() {
            let k = n - idx;
            let next: &[Rational] = self.levels.get(idx + 1).map(|x| x.row.as_slice()).unwrap_or(&[]);
            w[k - 1] = level_weight(self.label.family, l, next);
        }
        WeightVector(w)
    }

    /// The part of the pattern below level `k` inclusive, as a pattern for `g_k`.
    pub fn sub_pattern(&self, k: usize) -> BcdPattern {
        assert!(k >= 1 && k <= self.rank(), "level out of range");
        BcdPattern {
            label: AlgebraLabel {
                family: self.label.family,
                rank: k,
            },
            levels: self.levels[self.rank() - k..].to_vec(),
        }
    }

    /// The `gl_3` pattern of the rank-2 block of a B/C pattern: the level-2 row
    /// with a zero appended, the level-2 primed row, and the level-1 row.
    pub fn gl_pattern_of_block(&self) -> Result<GlPattern, PatternError> {
        match self.label.family {
            Family::B | Family::C if self.rank() >= 2 => {
                let l2 = self.level(2);
                let mut top = l2.row.clone();
                top.push(Rational::zero());
                Ok(GlPattern {
                    rows: vec![top, l2.primed.clone(), self.level(1).row.clone()],
                })
            }
            _ => Err(PatternError::Unsupported(format!("{} has no gl3 block image", self.label))),
        }
    }

    /// Serializable record: rows top-down as row_n, primed_n, …, row_1[, primed_1].
    pub fn to_record(&self) -> PatternRecord {
        let mut rows = Vec::new();
        for l in &self.levels {
            rows.push(l.row.iter().map(format_rational).collect());
            if !(self.label.family == Family::D && l.row.len() == 1) {
                rows.push(l.primed.iter().map(format_rational).collect());
            }
        }
        PatternRecord {
            family: self.label.family,
            rank: self.rank(),
            hw: self.highest_weight().iter().map(format_rational).collect(),
            rows,
            sigmas: if self.label.family == Family::B {
                self.levels.iter().map(|l| l.sigma).collect()
            } else {
                Vec::new()
            },
        }
    }

    /// Inverse of [`BcdPattern::to_record`]; checks shape, not validity.
    pub fn from_record(rec: &PatternRecord) -> Result<Self, PatternError> {
        let label = AlgebraLabel::new(rec.family, rec.rank)?;
        let bad = |detail: &str| PatternError::Shape { label, detail: detail.to_string() };
        let parse_row = |r: &Vec<String>| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>();
        let mut rows = rec.rows.iter();
        let mut levels = Vec::new();
        for idx in 0..rec.rank {
            let k = rec.rank - idx;
            let row = parse_row(rows.next().ok_or_else(|| bad("missing row"))?)?;
            let primed = if rec.family == Family::D && k == 1 {
                Vec::new()
            } else {
                parse_row(rows.next().ok_or_else(|| bad("missing primed row"))?)?
            };
            let sigma = if rec.family == Family::B {
                *rec.sigmas.get(idx).ok_or_else(|| bad("missing σ"))?
            } else {
                0
            };
            levels.push(Level { row, primed, sigma });
        }
        if rows.next().is_some() {
            return Err(bad("extra rows"));
        }
        let hw = rec.hw.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
        let p = BcdPattern { label, levels };
        p.check_shape()?;
        if hw != p.highest_weight() {
            return Err(bad("hw differs from the top row"));
        }
        Ok(p)
    }
}

impl fmt::Display for BcdPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(" ");
        let parts: Vec<String> = self
            .levels
            .iter()
            .map(|l| {
                let sigma = if self.label.family == Family::B { format!(" σ{}", l.sigma) } else { String::new() };
                format!("{} | {}{}", show(&l.row), show(&l.primed), sigma)
            })
            .collect();
        write!(f, "({})", parts.join(" / "))
    }
}

/// JSON form of a pattern: rationals as `"a"` or `"a/b"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRecord {
    pub family: Family,
    pub rank: usize,
    pub hw: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub sigmas: Vec<u8>,
}

/// All valid patterns of `V(λ)` in pattern order.
pub fn enumerate(label: &AlgebraLabel, hw: &DominantWeight) -> Result<Vec<BcdPattern>, PatternError> {
    if label.family == Family::A {
        return Err(PatternError::Unsupported("use enumerate_gl for gl_n".into()));
    }
    let lam = DominantWeight::new(label, hw.components().to_vec())?;
    let class = fractional(&lam.components()[0]);
    let mut out = Vec::new();
    let mut stack = Vec::new();
    enumerate_rec(label, lam.components().to_vec(), &class, &mut stack, &mut out);
    out.sort();
    Ok(out)
}

fn enumerate_rec(
    label: &AlgebraLabel,
    row: Vec<Rational>,
    class: &Rational,
    stack: &mut Vec<Level>,
    out: &mut Vec<BcdPattern>,
) {
    let family = label.family;
    let k = row.len();
    let finish = |stack: &Vec<Level>, out: &mut Vec<BcdPattern>| {
        out.push(BcdPattern {
            label: *label,
            levels: stack.clone(),
        })
    };
    if family == Family::D && k == 1 {
        stack.push(Level { row, primed: Vec::new(), sigma: 0 });
        finish(stack, out);
        stack.pop();
        return;
    }
    for b in primed_rows(family, &row, class) {
        let sigmas: &[u8] = if family == Family::B && !b[k - 1].is_zero() { &[0, 1] } else { &[0] };
        for &sigma in sigmas {
            if k == 1 {
                stack.push(Level { row: row.clone(), primed: b.clone(), sigma });
                finish(stack, out);
                stack.pop();
                continue;
            }
            for c in next_rows(family, &b, k, class) {
                stack.push(Level { row: row.clone(), primed: b.clone(), sigma });
                enumerate_rec(label, c, class, stack, out);
                stack.pop();
            }
        }
    }
}

/// The pattern whose rows repeat the highest weight maximally.
pub fn max_pattern(label: &AlgebraLabel, hw: &DominantWeight) -> Result<BcdPattern, PatternError> {
    if label.family == Family::A {
        return Err(PatternError::Unsupported("use GlPattern::max for gl_n".into()));
    }
    let lam = DominantWeight::new(label, hw.components().to_vec())?;
    let c = lam.components();
    let n = label.rank;
    let levels = (1..=n)
        .rev()
        .map(|k| {
            let primed_len = if label.family == Family::D { k - 1 } else { k };
            Level {
                row: c[..k].to_vec(),
                primed: c[..primed_len].to_vec(),
                sigma: 0,
            }
        })
        .collect();
    Ok(BcdPattern { label: *label, levels })
}

/// The `(p, q)` labels of the `o_4 ≅ sl_2 ⊕ sl_2` basis for the rank-2 block
/// of a D pattern.
pub fn o4_pq(p: &BcdPattern) -> Result<(u64, u64), PatternError> {
    if p.label.family != Family::D || p.rank() < 2 {
        return Err(PatternError::Unsupported("o4 labels need a D pattern of rank ≥ 2".into()));
    }
    let l2 = p.level(2);
    let (top, low) = (&l2.row[0], &l2.row[1]);
    let primed = &l2.primed[0];
    let next = &p.level(1).row[0];
    let gap = next - low;
    let (pp, qq) = if gap.is_positive() {
        let pp = top - primed;
        let qq = &pp + &gap;
        (pp, qq)
    } else {
        let qq = top - primed;
        let pp = &qq - &gap;
        (pp, qq)
    };
    let to_u64 = |x: &Rational| {
        (x.is_integer() && !x.is_negative())
            .then(|| x.to_integer().to_u64())
            .flatten()
            .ok_or_else(|| PatternError::Unsupported(format!("o4 label {} is not a nonnegative integer", format_rational(x))))
    };
    Ok((to_u64(&pp)?, to_u64(&qq)?))
}

/// A `gl_n` Gelfand–Tsetlin pattern; `rows[0]` is the top row of length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlPattern {
    pub rows: Vec<Vec<Rational>>,
}

impl GlPattern {
    /// Rank `n` (length of the top row).
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Row of length `k`.
    pub fn row(&self, k: usize) -> &[Rational] {
        &self.rows[self.rank() - k]
    }

    /// Checks shape and betweenness `m_{i,k+1} ≥ m_{i,k} ≥ m_{i+1,k+1}`.
    pub fn validate(&self) -> Result<(), PatternError> {
        let n = self.rank();
        let label = AlgebraLabel { family: Family::A, rank: n.max(1) };
        for (idx, r) in self.rows.iter().enumerate() {
            if r.len() != n - idx {
                return Err(PatternError::Shape { label, detail: format!("row {idx} has length {}", r.len()) });
            }
        }
        let mut violations = Vec::new();
        for idx in 1..n {
            let (up, lo) = (&self.rows[idx - 1], &self.rows[idx]);
            for i in 0..lo.len() {
                if !(up[i] >= lo[i] && lo[i] >= up[i + 1]) {
                    violations.push(Violation::Interlacing {
                        level: n - idx,
                        detail: format!("entry {i}"),
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(PatternError::Invalid(violations))
        }
    }

    /// `gl_n` weight: component `k` is `Σ row_k - Σ row_{k-1}`.
    pub fn weight(&self) -> WeightVector {
        let n = self.rank();
        WeightVector(
            (1..=n)
                .map(|k| {
                    let below = if k > 1 { sum(self.row(k - 1)) } else { Rational::zero() };
                    sum(self.row(k)) - below
                })
                .collect(),
        )
    }

    /// The maximal pattern of a top row.
    pub fn max(top: &[Rational]) -> Self {
        Self {
            rows: (1..=top.len()).rev().map(|k| top[..k].to_vec()).collect(),
        }
    }

    /// Record form with `family = A` and no σ bits.
    pub fn to_record(&self) -> PatternRecord {
        PatternRecord {
            family: Family::A,
            rank: self.rank(),
            hw: self.rows[0].iter().map(format_rational).collect(),
            rows: self.rows.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
            sigmas: Vec::new(),
        }
    }
}

/// All `gl_n` patterns with top row `top`, in lexicographic order.
pub fn enumerate_gl(top: &[Rational]) -> Vec<GlPattern> {
    let class = top.first().map(fractional).unwrap_or_else(Rational::zero);
    let mut out = Vec::new();
    let mut rows = vec![top.to_vec()];
    enumerate_gl_rec(&class, &mut rows, &mut out);
    out.sort();
    out
}

fn enumerate_gl_rec(class: &Rational, rows: &mut Vec<Vec<Rational>>, out: &mut Vec<GlPattern>) {
    let up = rows.last().expect("nonempty").clone();
    if up.len() <= 1 {
        out.push(GlPattern { rows: rows.clone() });
        return;
    }
    let ranges: Vec<Vec<Rational>> = (0..up.len() - 1).map(|i| class_range(&up[i + 1], &up[i], class)).collect();
    for lo in cartesian(&ranges) {
        rows.push(lo);
        enumerate_gl_rec(class, rows, out);
        rows.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{freudenthal, weyl_dim};
    use std::collections::BTreeMap;

    fn lab(f: Family, n: usize) -> AlgebraLabel {
        AlgebraLabel::new(f, n).unwrap()
    }

    fn hw(l: &AlgebraLabel, s: &str) -> DominantWeight {
        DominantWeight::parse(l, s).unwrap()
    }

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    const CASES: &[(Family, usize, &str)] = &[
        (Family::B, 1, "1"),
        (Family::B, 1, "1/2"),
        (Family::B, 1, "3"),
        (Family::B, 2, "1,0"),
        (Family::B, 2, "3/2,1/2"),
        (Family::B, 3, "1,1,1"),
        (Family::B, 3, "2,1,0"),
        (Family::B, 3, "1/2,1/2,1/2"),
        (Family::C, 1, "2"),
        (Family::C, 2, "2,1"),
        (Family::C, 3, "2,1,1"),
        (Family::D, 2, "1,-1"),
        (Family::D, 2, "1/2,-1/2"),
        (Family::D, 3, "1,1,-1"),
        (Family::D, 3, "1/2,1/2,1/2"),
        (Family::D, 4, "2,1,1,-1"),
    ];

    #[test]
    fn counts_and_weights_match_oracles() {
        for &(f, n, s) in CASES {
            let l = lab(f, n);
            let w = hw(&l, s);
            let ps = enumerate(&l, &w).unwrap();
            assert_eq!(ps.len() as u64, weyl_dim(&l, &w).unwrap(), "{l} {s}");
            let mut got: BTreeMap<WeightVector, u64> = BTreeMap::new();
            for p in &ps {
                p.validate().unwrap();
                *got.entry(p.weight().unwrap()).or_insert(0) += 1;
            }
            assert_eq!(got, *freudenthal(&l, &w).unwrap(), "{l} {s}");
            assert!(ps.windows(2).all(|x| x[0] < x[1]));
        }
    }

    #[test]
    fn max_pattern_is_valid_with_weight_lambda() {
        for &(f, n, s) in CASES {
            let l = lab(f, n);
            let w = hw(&l, s);
            let m = max_pattern(&l, &w).unwrap();
            m.validate().unwrap();
            assert_eq!(m.weight().unwrap().0, w.components().to_vec(), "{l} {s}");
            assert!(enumerate(&l, &w).unwrap().contains(&m));
        }
    }

    #[test]
    fn zero_weight_has_only_the_zero_pattern() {
        for (f, n) in [(Family::B, 3), (Family::C, 2), (Family::D, 3)] {
            let l = lab(f, n);
            let ps = enumerate(&l, &DominantWeight::zero(&l)).unwrap();
            assert_eq!(ps, vec![max_pattern(&l, &DominantWeight::zero(&l)).unwrap()]);
        }
    }

    #[test]
    fn sigma_violation_is_reported() {
        let l = lab(Family::B, 2);
        let mut p = max_pattern(&l, &hw(&l, "1,0")).unwrap();
        p.levels[0].sigma = 1;
        match p.validate() {
            Err(PatternError::Invalid(v)) => assert!(v.contains(&Violation::Sigma { level: 2 })),
            other => panic!("unexpected {other:?}"),
        }
        assert!(format!("{}", Violation::Sigma { level: 2 }).contains("σ constraint"));
    }

    #[test]
    fn interlacing_violation_is_reported() {
        let l = lab(Family::C, 2);
        let mut p = max_pattern(&l, &hw(&l, "2,1")).unwrap();
        p.levels[0].primed = r(&[1, 2]);
        match p.validate() {
            Err(PatternError::Invalid(v)) => {
                assert!(v.iter().any(|x| matches!(x, Violation::Interlacing { level: 2, .. })))
            }
            other => panic!("unexpected {other:?}"),
        }
        p.levels[0].primed = r(&[1]);
        assert!(matches!(p.validate(), Err(PatternError::Shape { .. })));
    }

    #[test]
    fn o4_labels() {
        let l = lab(Family::D, 2);
        let mk = |primed: i64, next: i64| BcdPattern {
            label: l,
            levels: vec![
                Level { row: r(&[2, 0]), primed: r(&[primed]), sigma: 0 },
                Level { row: r(&[next]), primed: vec![], sigma: 0 },
            ],
        };
        assert_eq!(o4_pq(&mk(2, 0)).unwrap(), (0, 0));
        assert_eq!(o4_pq(&mk(1, 1)).unwrap(), (1, 2));
        assert_eq!(o4_pq(&mk(1, -1)).unwrap(), (2, 1));
    }

    #[test]
    fn o4_labels_fill_the_box_for_nonnegative_weights() {
        for s in ["1,0", "1,1", "2,1", "2,0", "3,1"] {
            let l = lab(Family::D, 2);
            let w = hw(&l, s);
            let (a1, a2) = (w.components()[0].to_integer(), w.components()[1].to_integer());
            // p runs up to a1 + a2 and q up to a1 - a2.
            let p_max = (&a1 + &a2).to_u64().unwrap();
            let q_max = (&a1 - &a2).to_u64().unwrap();
            let mut labels: Vec<(u64, u64)> = enumerate(&l, &w).unwrap().iter().map(|p| o4_pq(p).unwrap()).collect();
            labels.sort();
            let mut expect: Vec<(u64, u64)> = (0..=p_max).flat_map(|p| (0..=q_max).map(move |q| (p, q))).collect();
            expect.sort();
            assert_eq!(labels, expect, "{s}");
        }
    }

    #[test]
    fn gl_block_of_max_pattern_is_gl_max() {
        for (f, s) in [(Family::B, "2,1"), (Family::C, "3,1")] {
            let l = lab(f, 2);
            let w = hw(&l, s);
            let g = max_pattern(&l, &w).unwrap().gl_pattern_of_block().unwrap();
            let mut top = w.components().to_vec();
            top.push(Rational::zero());
            assert_eq!(g, GlPattern::max(&top));
        }
        let d = lab(Family::D, 2);
        assert!(max_pattern(&d, &hw(&d, "1,0")).unwrap().gl_pattern_of_block().is_err());
    }

    #[test]
    fn records_round_trip() {
        for &(f, n, s) in CASES {
            let l = lab(f, n);
            for p in enumerate(&l, &hw(&l, s)).unwrap() {
                let rec = p.to_record();
                let json = serde_json::to_string(&rec).unwrap();
                let back: PatternRecord = serde_json::from_str(&json).unwrap();
                assert_eq!(BcdPattern::from_record(&back).unwrap(), p);
                assert_eq!(serde_json::to_string(&back.clone()).unwrap(), json);
            }
        }
    }

    #[test]
    fn gl_patterns() {
        let ps = enumerate_gl(&r(&[2, 1, 0]));
        assert_eq!(ps.len(), 8);
        let total = ps.iter().fold(vec![Rational::zero(); 3], |acc, p| {
            acc.iter().zip(p.weight().0).map(|(a, b)| a + b).collect()
        });
        assert_eq!(total, r(&[8, 8, 8]));
        for p in &ps {
            p.validate().unwrap();
        }
        assert_eq!(GlPattern::max(&r(&[2, 1, 0])).weight().0, r(&[2, 1, 0]));
    }
}
