//! Classical Lie algebras in split realization.
//!
//! Coordinates run over `-n..=-1`, `0` (odd orthogonal only) and `1..=n`.
//! Generators are `F_ij = E_ij - E_{-j,-i}` (orthogonal) and
//! `F_ij = E_ij - sign(i) sign(j) E_{-j,-i}` (symplectic); `F_ij` with `i < j`
//! is a raising operator, `i > j` lowering, `i = j` Cartan.
//! Weight vectors list the eigenvalues of `F_{-n,-n}, …, F_{-1,-1}`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{format_rational, parse_rational, rat, Rational};

/// Errors about algebra labels, weights and generators.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("rank {rank} is not allowed for family {family}")]
    BadRank { family: Family, rank: usize },
    #[error("weight has {got} components, rank is {rank}")]
    WeightLength { got: usize, rank: usize },
    #[error("weight [{0}] is not dominant for this algebra")]
    NotDominant(String),
    #[error("weight [{0}] is not integral for this algebra")]
    NotIntegral(String),
    #[error("coordinate {coord} is not valid for {label}")]
    BadCoordinate { coord: i32, label: AlgebraLabel },
    #[error("generator F({i},{j}) vanishes identically in {label}")]
    ZeroGenerator { i: i32, j: i32, label: AlgebraLabel },
    #[error("malformed number: {0}")]
    Parse(String),
}

/// Series of a classical Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `gl_n` (patterns and oracles only).
    A,
    /// `o_{2n+1}`.
    B,
    /// `sp_{2n}`.
    C,
    /// `o_{2n}`.
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(AlgebraError::UnknownFamily(other.to_string())),
        }
    }
}

/// A classical Lie algebra: family and rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgebraLabel {
    pub family: Family,
    pub rank: usize,
}

impl fmt::Display for AlgebraLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

impl AlgebraLabel {
    /// Validated constructor: rank ≥ 1, and rank ≥ 2 for `D`.
    pub fn new(family: Family, rank: usize) -> Result<Self, AlgebraError> {
        let min = if family == Family::D { 2 } else { 1 };
        if rank < min {
            return Err(AlgebraError::BadRank { family, rank });
        }
        Ok(Self { family, rank })
    }

    /// The chain subalgebra `g_{n-1}` acting on `x_{±2},…,x_{±n}`; `None` at rank 1.
    ///
    /// For `D2` this is the abelian `o_2`, represented as rank-1 `D`.
    pub fn subalgebra(&self) -> Option<Self> {
        (self.rank > 1).then(|| Self {
            family: self.family,
            rank: self.rank - 1,
        })
    }

    /// Symplectic series.
    pub fn is_symplectic(&self) -> bool {
        self.family == Family::C
    }

    /// Coordinates in matrix order: `-n..=-1`, `0` for B, `1..=n`.
    pub fn coords(&self) -> Vec<i32> {
        let n = self.rank as i32;
        let mut out: Vec<i32> = (-n..=-1).collect();
        if self.family == Family::B {
            out.push(0);
        }
        out.extend(1..=n);
        out
    }

    /// Size of the defining representation.
    pub fn defining_dim(&self) -> usize {
        match self.family {
            Family::A => self.rank,
            Family::B => 2 * self.rank + 1,
            Family::C | Family::D => 2 * self.rank,
        }
    }

    /// Matrix position of a coordinate in the defining representation.
    pub fn position(&self, coord: i32) -> Result<usize, AlgebraError> {
        let n = self.rank as i32;
        let bad = || AlgebraError::BadCoordinate { coord, label: *self };
        if coord == 0 {
            return if self.family == Family::B {
                Ok(self.rank)
            } else {
                Err(bad())
            };
        }
        if coord.abs() > n {
            return Err(bad());
        }
        if coord < 0 {
            Ok((coord + n) as usize)
        } else {
            let shift = if self.family == Family::B { 1 } else { 0 };
            Ok(self.rank + shift + (coord - 1) as usize)
        }
    }

    /// Weight-vector component index of `ε_{-k}`: `-n ↦ 0`, `-1 ↦ n-1`.
    pub fn weight_index(&self, k: usize) -> usize {
        self.rank - k
    }

    /// Weight `ε_c` of the basis vector `e_c` (`ε_{+k} = -ε_{-k}`, `ε_0 = 0`).
    pub fn coord_weight(&self, coord: i32) -> Vec<i32> {
        let mut w = vec![0; self.rank];
        if coord != 0 {
            let k = coord.unsigned_abs() as usize;
            w[self.weight_index(k)] = if coord < 0 { 1 } else { -1 };
        }
        w
    }

    /// Coordinate whose weight is `w`, if `w` is a weight of the defining representation.
    pub fn coord_of_weight(&self, w: &[Rational]) -> Option<i32> {
        self.coords()
            .into_iter()
            .find(|&c| self.coord_weight(c).iter().zip(w).all(|(a, b)| rat(*a as i64) == *b))
    }

    /// Embedding of `g_{n-1}` coordinates into `g_n`: `±k ↦ ±(k+1)`, `0 ↦ 0`.
    pub fn embed_coord(coord: i32) -> i32 {
        coord + coord.signum()
    }
}

/// Dominant integral highest weight `[m_{-n}, …, m_{-1}]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DominantWeight(Vec<Rational>);

impl DominantWeight {
    /// Validates dominance and integrality for `label`.
    pub fn new(label: &AlgebraLabel, comps: Vec<Rational>) -> Result<Self, AlgebraError> {
        if comps.len() != label.rank {
            return Err(AlgebraError::WeightLength {
                got: comps.len(),
                rank: label.rank,
            });
        }
        let show = || {
            comps
                .iter()
                .map(format_rational)
                .collect::<Vec<_>>()
                .join(",")
        };
        let two = rat(2);
        let is_int = |q: &Rational| q.is_integer();
        let is_half = |q: &Rational| !q.is_integer() && (q * &two).is_integer();
        let integral = match label.family {
            Family::A | Family::C => comps.iter().all(is_int),
            Family::B | Family::D => comps.iter().all(is_int) || comps.iter().all(is_half),
        };
        if !integral {
            return Err(AlgebraError::NotIntegral(show()));
        }
        let n = comps.len();
        let decreasing = comps.windows(2).all(|w| w[0] >= w[1]);
        let dominant = match label.family {
            Family::A => decreasing,
            Family::B | Family::C => decreasing && !comps[n - 1].is_negative(),
            Family::D => {
                let last = comps[n - 1].abs();
                let head_ok = comps[..n - 1].windows(2).all(|w| w[0] >= w[1]);
                head_ok && (n == 1 || comps[n - 2] >= last)
            }
        };
        if !dominant {
            return Err(AlgebraError::NotDominant(show()));
        }
        Ok(Self(comps))
    }

    /// Parses `"3/2,1/2"`.
    pub fn parse(label: &AlgebraLabel, text: &str) -> Result<Self, AlgebraError> {
        let comps = text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_rational(s).map_err(|e| AlgebraError::Parse(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(label, comps)
    }

    /// The zero weight.
    pub fn zero(label: &AlgebraLabel) -> Self {
        Self(vec![Rational::zero(); label.rank])
    }

    /// Highest weight of the defining representation.
    pub fn standard(label: &AlgebraLabel) -> Self {
        let mut v = vec![Rational::zero(); label.rank];
        v[0] = Rational::one();
        Self(v)
    }

    /// Components `[m_{-n}, …, m_{-1}]`.
    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    /// Whether all components are half-odd integers.
    pub fn is_spinor(&self) -> bool {
        self.0.first().is_some_and(|q| !q.is_integer())
    }
}

impl fmt::Display for DominantWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Generator `F_ij` of the split realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorId {
    pub i: i32,
    pub j: i32,
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({},{})", self.i, self.j)
    }
}

impl GeneratorId {
    pub fn new(i: i32, j: i32) -> Self {
        Self { i, j }
    }

    /// The generator with the transposed defining matrix.
    pub fn transpose(&self) -> Self {
        Self::new(self.j, self.i)
    }

    /// Parses `"i,j"`.
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 2 {
            return Err(AlgebraError::Parse(text.to_string()));
        }
        let p = |s: &str| {
            s.trim()
                .parse::<i32>()
                .map_err(|_| AlgebraError::Parse(text.to_string()))
        };
        Ok(Self::new(p(parts[0])?, p(parts[1])?))
    }
}

/// Dense integer matrix in the defining representation.
pub type IntMatrix = Vec<Vec<i64>>;

fn sign(c: i32) -> i64 {
    c.signum() as i64
}

/// Root data and defining-representation matrices of a B/C/D algebra.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub label: AlgebraLabel,
}

impl RootSystem {
    pub fn new(label: AlgebraLabel) -> Self {
        Self { label }
    }

    fn check(&self, g: GeneratorId) -> Result<(), AlgebraError> {
        self.label.position(g.i)?;
        self.label.position(g.j)?;
        Ok(())
    }

    /// Canonical representative: `F_ij = sign · F_rep`, or `None` when `F_ij = 0`.
    ///
    /// Representatives satisfy `i + j < 0`, plus `(i, -i)` for the symplectic series.
    pub fn canonical(&self, g: GeneratorId) -> Result<Option<(GeneratorId, i64)>, AlgebraError> {
        self.check(g)?;
        let (i, j) = (g.i, g.j);
        if i + j < 0 {
            return Ok(Some((g, 1)));
        }
        if i + j == 0 {
            return Ok(if self.label.is_symplectic() && i != 0 {
                Some((g, 1))
            } else {
                None
            });
        }
        let rep = GeneratorId::new(-j, -i);
        let s = if self.label.is_symplectic() {
            -sign(i) * sign(j)
        } else {
            -1
        };
        Ok(Some((rep, s)))
    }

    /// All canonical generators in lexicographic `(i, j)` order.
    pub fn generators(&self) -> Vec<GeneratorId> {
        let coords = self.label.coords();
        let mut out = Vec::new();
        for &i in &coords {
            for &j in &coords {
                let g = GeneratorId::new(i, j);
                if let Ok(Some((rep, _))) = self.canonical(g) {
                    if rep == g {
                        out.push(g);
                    }
                }
            }
        }
        out
    }

    /// Dimension of the algebra.
    pub fn dim(&self) -> usize {
        self.generators().len()
    }

    /// Defining-representation matrix of `F_ij`.
    pub fn matrix(&self, g: GeneratorId) -> Result<IntMatrix, AlgebraError> {
        self.check(g)?;
        let n = self.label.defining_dim();
        let mut m = vec![vec![0i64; n]; n];
        let p = |c: i32| self.label.position(c).expect("checked");
        m[p(g.i)][p(g.j)] += 1;
        let s = if self.label.is_symplectic() {
            sign(g.i) * sign(g.j)
        } else {
            1
        };
        m[p(-g.j)][p(-g.i)] -= s;
        Ok(m)
    }

    /// Weight `ε_i - ε_j` of `F_ij`.
    pub fn root(&self, g: GeneratorId) -> Vec<i32> {
        let a = self.label.coord_weight(g.i);
        let b = self.label.coord_weight(g.j);
        a.iter().zip(&b).map(|(x, y)| x - y).collect()
    }

    /// Raising generators of the simple roots, in chain order.
    pub fn simple_raising(&self) -> Vec<GeneratorId> {
        let n = self.label.rank as i32;
        let mut out: Vec<GeneratorId> = (1..n).map(|k| GeneratorId::new(-n + k - 1, -n + k)).collect();
        match self.label.family {
            Family::B => out.push(GeneratorId::new(-1, 0)),
            Family::C => out.push(GeneratorId::new(-1, 1)),
            Family::D if n >= 2 => out.push(GeneratorId::new(-2, 1)),
            _ => {}
        }
        out
    }

    /// Expresses a defining-representation matrix in the canonical generator
    /// basis; `None` if it is not in the algebra.
    pub fn decompose(&self, m: &IntMatrix) -> Option<Vec<(GeneratorId, Rational)>> {
        let p = |c: i32| self.label.position(c).expect("valid");
        let size = m.len();
        let mut out = Vec::new();
        let mut rebuilt = vec![vec![Rational::zero(); size]; size];
        for g in self.generators() {
            let entry = m[p(g.i)][p(g.j)];
            if entry == 0 {
                continue;
            }
            let gm = self.matrix(g).expect("valid");
            let c = Rational::new(entry.into(), gm[p(g.i)][p(g.j)].into());
            for (ra, rg) in rebuilt.iter_mut().zip(&gm) {
                for (a, x) in ra.iter_mut().zip(rg) {
                    *a += &c * rat(*x);
                }
            }
            out.push((g, c));
        }
        let matches = rebuilt
            .iter()
            .flatten()
            .zip(m.iter().flatten())
            .all(|(a, b)| *a == rat(*b));
        matches.then_some(out)
    }

    /// Structure constants: `[F_a, F_b]` in the canonical basis.
    pub fn bracket(&self, a: GeneratorId, b: GeneratorId) -> Vec<(GeneratorId, Rational)> {
        let ma = self.matrix(a).expect("valid generator");
        let mb = self.matrix(b).expect("valid generator");
        let c = commutator(&ma, &mb);
        self.decompose(&c).expect("the algebra is closed under brackets")
    }

    /// Diagonal of a Cartan matrix as coefficients on `F_{-n,-n}, …, F_{-1,-1}`.
    pub fn cartan_coefficients(&self, m: &IntMatrix) -> Vec<i64> {
        (1..=self.label.rank)
            .rev()
            .map(|k| {
                let p = self.label.position(-(k as i32)).expect("valid");
                m[p][p]
            })
            .collect()
    }

    /// `½ tr(XY)` in the defining representation: Euclidean on the Cartan subalgebra.
    pub fn trace_form(&self, a: GeneratorId, b: GeneratorId) -> Rational {
        let ma = self.matrix(a).expect("valid");
        let mb = self.matrix(b).expect("valid");
        let prod = mat_mul(&ma, &mb);
        let tr: i64 = (0..prod.len()).map(|k| prod[k][k]).sum();
        Rational::new(tr.into(), 2.into())
    }

    /// Half the sum of positive roots, in weight coordinates.
    pub fn rho(&self) -> Vec<Rational> {
        let n = self.label.rank;
        let mut acc = vec![Rational::zero(); n];
        for g in self.generators() {
            if g.i < g.j {
                for (a, r) in acc.iter_mut().zip(self.root(g)) {
                    *a += rat(r as i64);
                }
            }
        }
        acc.into_iter().map(|x| x / rat(2)).collect()
    }
}

/// Dense integer matrix product.
pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// `AB - BA`.
pub fn commutator(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let ab = mat_mul(a, b);
    let ba = mat_mul(b, a);
    ab.iter()
        .zip(&ba)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(f: Family, n: usize) -> RootSystem {
        RootSystem::new(AlgebraLabel::new(f, n).unwrap())
    }

    #[test]
    fn dimensions() {
        assert_eq!(rs(Family::B, 2).dim(), 10);
        assert_eq!(rs(Family::C, 2).dim(), 10);
        assert_eq!(rs(Family::D, 2).dim(), 6);
        assert_eq!(rs(Family::B, 3).dim(), 21);
        assert_eq!(rs(Family::C, 3).dim(), 21);
        assert_eq!(rs(Family::D, 3).dim(), 15);
    }

    #[test]
    fn antisymmetry_relations() {
        for f in [Family::B, Family::C, Family::D] {
            let r = rs(f, 2);
            let coords = r.label.coords();
            for &i in &coords {
                for &j in &coords {
                    let g = GeneratorId::new(i, j);
                    let m = r.matrix(g).unwrap();
                    match r.canonical(g).unwrap() {
                        None => assert!(m.iter().flatten().all(|&x| x == 0)),
                        Some((rep, s)) => {
                            let mr = r.matrix(rep).unwrap();
                            for (a, b) in m.iter().flatten().zip(mr.iter().flatten()) {
                                assert_eq!(*a, s * b);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rho_values() {
        assert_eq!(rs(Family::B, 2).rho(), vec![crate::numeric::ratio(3, 2), crate::numeric::ratio(1, 2)]);
        assert_eq!(rs(Family::C, 2).rho(), vec![rat(2), rat(1)]);
        assert_eq!(rs(Family::D, 3).rho(), vec![rat(2), rat(1), rat(0)]);
    }

    #[test]
    fn simple_roots_are_positive_and_independent() {
        for (f, n) in [(Family::B, 3), (Family::C, 3), (Family::D, 3), (Family::B, 1), (Family::C, 1)] {
            let r = rs(f, n);
            let s = r.simple_raising();
            assert_eq!(s.len(), n);
            for g in s {
                assert!(g.i < g.j);
                assert_eq!(r.canonical(g).unwrap().unwrap().0, g);
            }
        }
    }

    #[test]
    fn dominance_checks() {
        let b2 = AlgebraLabel::new(Family::B, 2).unwrap();
        assert!(DominantWeight::parse(&b2, "3/2,1/2").is_ok());
        assert!(DominantWeight::parse(&b2, "1,1/2").is_err());
        assert!(DominantWeight::parse(&b2, "0,1").is_err());
        let d2 = AlgebraLabel::new(Family::D, 2).unwrap();
        assert!(DominantWeight::parse(&d2, "1,-1").is_ok());
        let c2 = AlgebraLabel::new(Family::C, 2).unwrap();
        assert!(DominantWeight::parse(&c2, "1/2,1/2").is_err());
        assert!(AlgebraLabel::new(Family::D, 1).is_err());
    }

    #[test]
    fn trace_form_is_euclidean_on_cartan() {
        let r = rs(Family::C, 2);
        let h = GeneratorId::new(-2, -2);
        assert_eq!(r.trace_form(h, h), rat(1));
        let e = GeneratorId::new(-1, 1);
        assert_eq!(r.trace_form(e, e.transpose()), rat(2));
    }
}
