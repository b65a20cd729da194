//! `gl_n` building blocks: reduced matrix elements, reduced Wigner
//! coefficients, Wigner coefficients of the fundamental tensor operator, and
//! the rational Gelfand–Tsetlin lowering formula.
//!
//! Rows use negative indexing. An upper row of length `n` has indices
//! `-n..=-1`; the lower row of length `n-1` shares the same offset and has
//! indices `-n..=-2`. Every square-root value is `sign · √(ratio of products)`
//! and hence a single-term [`AlgebraicValue`].

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::{rat, AlgebraicValue, NumericError, Rational};
use crate::pattern::GlPattern;

/// Kernel evaluation errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("lower row must be one shorter than the upper row (got {upper} and {lower})")]
    Shape { upper: usize, lower: usize },
    #[error("index {index} outside {range}")]
    Index { index: i32, range: String },
    #[error("a denominator factor vanishes; the requested change violates a selection rule")]
    ZeroDenominator,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// An upper row `[m]_n` and the lower row `[m]_{n-1}` below it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlRowPair {
    upper: Vec<Rational>,
    lower: Vec<Rational>,
}

impl GlRowPair {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>) -> Result<Self, KernelError> {
        if upper.is_empty() || lower.len() + 1 != upper.len() {
            return Err(KernelError::Shape {
                upper: upper.len(),
                lower: lower.len(),
            });
        }
        Ok(Self { upper, lower })
    }

    /// Length of the upper row.
    pub fn n(&self) -> i32 {
        self.upper.len() as i32
    }

    fn upper_indices(&self) -> std::ops::RangeInclusive<i32> {
        -self.n()..=-1
    }

    fn lower_indices(&self) -> std::ops::RangeInclusive<i32> {
        -self.n()..=-2
    }

    /// Upper entry `m_{j,n}`, `j ∈ -n..=-1`.
    pub fn up(&self, j: i32) -> &Rational {
        &self.upper[(j + self.n()) as usize]
    }

    /// Lower entry `m_{j,n-1}`, `j ∈ -n..=-2`.
    pub fn lo(&self, j: i32) -> &Rational {
        &self.lower[(j + self.n()) as usize]
    }

    fn check_upper(&self, i: i32) -> Result<(), KernelError> {
        if self.upper_indices().contains(&i) {
            Ok(())
        } else {
            Err(KernelError::Index {
                index: i,
                range: format!("{}..=-1", -self.n()),
            })
        }
    }

    fn check_lower(&self, i: i32) -> Result<(), KernelError> {
        if self.lower_indices().contains(&i) {
            Ok(())
        } else {
            Err(KernelError::Index {
                index: i,
                range: format!("{}..=-2", -self.n()),
            })
        }
    }
}

fn ratio(num: Rational, den: Rational) -> Result<Rational, KernelError> {
    if den.is_zero() {
        return Err(KernelError::ZeroDenominator);
    }
    Ok(num / den)
}

fn signed_root(sign: i8, square: &Rational) -> Result<AlgebraicValue, KernelError> {
    if square.is_negative() {
        return Err(NumericError::NegativeRadicand(square.to_string()).into());
    }
    Ok(AlgebraicValue::from_signed_square(sign, square)?)
}

/// Square of the reduced matrix element of the `gl_{n-1}` tensor operator that
/// lowers `m_{i1,n-1}` by one:
/// `(m_{i1,n-1} - m_{-1,n} - i1 - 2) · Π_{j=-n}^{-2}(m_{j,n} - m_{i1,n-1} - j + i1 + 1)
///  / Π_{j≠i1}(m_{j,n-1} - m_{i1,n-1} - j + i1 + 1)`.
pub fn red_me_squared(rows: &GlRowPair, i1: i32) -> Result<Rational, KernelError> {
    rows.check_lower(i1)?;
    let target = rows.lo(i1);
    let shift = |j: i32| rat((i1 - j + 1) as i64);
    let mut num = target - rows.up(-1) - rat(i1 as i64 + 2);
    for j in rows.lower_indices() {
        num *= rows.up(j) - target + shift(j);
    }
    let mut den = Rational::one();
    for j in rows.lower_indices().filter(|&j| j != i1) {
        den *= rows.lo(j) - target + shift(j);
    }
    ratio(num, den)
}

/// Reduced matrix element: the nonnegative root of [`red_me_squared`].
pub fn red_me(rows: &GlRowPair, i1: i32) -> Result<AlgebraicValue, KernelError> {
    signed_root(1, &red_me_squared(rows, i1)?)
}

/// Reduced Wigner coefficient `S(i2 - i1)·√(A·B)` with
/// `A = Π_{j≠i2}(m_{j,n-1} - m_{i1,n} - j + i1) / Π_{j≠i1}(m_{j,n} - m_{i1,n} - j + i1)` and
/// `B = Π_{j≠i1}(m_{j,n} - m_{i2,n-1} - j + i2 + 1) / Π_{j≠i2}(m_{j,n-1} - m_{i2,n-1} - j + i2 + 1)`,
/// upper-row products over `-n..=-1`, lower-row products over `-n..=-2`.
pub fn red_wigner(rows: &GlRowPair, i1: i32, i2: i32) -> Result<AlgebraicValue, KernelError> {
    rows.check_upper(i1)?;
    rows.check_lower(i2)?;
    let u1 = rows.up(i1);
    let l2 = rows.lo(i2);
    let mut a_num = Rational::one();
    let mut b_den = Rational::one();
    for j in rows.lower_indices().filter(|&j| j != i2) {
        a_num *= rows.lo(j) - u1 + rat((i1 - j) as i64);
        b_den *= rows.lo(j) - l2 + rat((i2 - j + 1) as i64);
    }
    let mut a_den = Rational::one();
    let mut b_num = Rational::one();
    for j in rows.upper_indices().filter(|&j| j != i1) {
        a_den *= rows.up(j) - u1 + rat((i1 - j) as i64);
        b_num *= rows.up(j) - l2 + rat((i2 - j + 1) as i64);
    }
    let square = ratio(a_num, a_den)? * ratio(b_num, b_den)?;
    let sign = if i2 - i1 >= 0 { 1 } else { -1 };
    signed_root(sign, &square)
}

/// Wigner coefficient for lowering `m_{i,n}` with the lower row fixed:
/// `√(Π_{j=-n}^{-2}(m_{j,n-1} - m_{i,n} - j + i) / Π_{j≠i}(m_{j,n} - m_{i,n} - j + i))`.
pub fn wigner(rows: &GlRowPair, i: i32) -> Result<AlgebraicValue, KernelError> {
    rows.check_upper(i)?;
    let ui = rows.up(i);
    let mut num = Rational::one();
    for j in rows.lower_indices() {
        num *= rows.lo(j) - ui + rat((i - j) as i64);
    }
    let mut den = Rational::one();
    for j in rows.upper_indices().filter(|&j| j != i) {
        den *= rows.up(j) - ui + rat((i - j) as i64);
    }
    signed_root(1, &ratio(num, den)?)
}

/// Shifted entries `l_p = m_p - p` of a row (0-based position `p`).
fn shifted(row: &[Rational]) -> Vec<Rational> {
    row.iter().enumerate().map(|(p, m)| m - rat(p as i64)).collect()
}

fn with_entry(p: &GlPattern, k: usize, pos: usize, delta: i64) -> GlPattern {
    let mut q = p.clone();
    let n = q.rank();
    q.rows[n - k][pos] += rat(delta);
    q
}

/// Action of the elementary lowering generator between rows `k` and `k-1`
/// (`2 ≤ k ≤ n`) in the rational, non-normalized Gelfand–Tsetlin basis.
///
/// Lowering `m_{i,k-1}` has coefficient
/// `Π_j(l_{j,k} - l_{i,k-1} + 1) / Π_{j≠i}(l_{j,k-1} - l_{i,k-1})` with
/// `l = m - position`; the `+1` evaluates the numerator at the lowered entry.
/// Targets violating interlacing are dropped.
pub fn gl_gt_lowering(p: &GlPattern, k: usize) -> Vec<(GlPattern, Rational)> {
    assert!(k >= 2 && k <= p.rank(), "level out of range");
    let up = shifted(p.row(k));
    let lo = shifted(p.row(k - 1));
    let mut out = Vec::new();
    for (i, li) in lo.iter().enumerate() {
        let target = with_entry(p, k - 1, i, -1);
        if target.validate().is_err() {
            continue;
        }
        let num: Rational = up.iter().map(|lj| lj - li + rat(1)).product();
        let den: Rational = lo
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, lj)| lj - li)
            .product();
        let c = num / den;
        if !c.is_zero() {
            out.push((target, c));
        }
    }
    out
}

/// Companion raising generator between rows `k-1` and `k` for
/// [`gl_gt_lowering`]: raising `m_{i,k-1}` has coefficient
/// `-Π_j(l_{i,k-1} - l_{j,k-2} + 1) / Π_{j≠i}(l_{i,k-1} - l_{j,k-1})`.
pub fn gl_gt_raising(p: &GlPattern, k: usize) -> Vec<(GlPattern, Rational)> {
    assert!(k >= 2 && k <= p.rank(), "level out of range");
    let mid = shifted(p.row(k - 1));
    let below = if k >= 3 { shifted(p.row(k - 2)) } else { Vec::new() };
    let mut out = Vec::new();
    for (i, li) in mid.iter().enumerate() {
        let target = with_entry(p, k - 1, i, 1);
        if target.validate().is_err() {
            continue;
        }
        let num: Rational = below.iter().map(|lj| li - lj + rat(1)).product();
        let den: Rational = mid
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, lj)| li - lj)
            .product();
        let c = -num / den;
        if !c.is_zero() {
            out.push((target, c));
        }
    }
    out
}
