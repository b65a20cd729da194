//! Fundamental Wigner coefficients: the intertwiner `V(λ+δ) → V(std) ⊗ V(λ)`
//! in Gelfand–Tsetlin bases.
//!
//! The highest vector of weight `λ+δ` in the tensor product is the common
//! kernel of the diagonal simple raising operators. The embedding is then
//! built on the weight basis of `V(λ+δ)` by replaying its lowering recipes,
//! and finally expressed between orthonormal Gelfand–Tsetlin bases. The
//! table is normalized so that the coefficient of `e_δ ⊗ (λ)_max` in the image
//! of `(λ+δ)_max` is 1.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{ActionError, AlgMatrix, Representation};
use crate::algebra::{AlgebraError, AlgebraLabel, DominantWeight, GeneratorId, RootSystem};
use crate::gt_basis::{gt_basis, BasisError, GtBasis};
use crate::hwmodule::{HwModule, ModuleError, Recipe};
use crate::linalg::{sparse_axpy, DenseMatrix, SparseMatrix, SparseVec};
use crate::numeric::{format_rational, rat, AlgebraicValue, NumericError, Rational};
use crate::oracle::{tensor_with_standard, OracleError};

#[derive(Debug, Error)]
pub enum WignerError {
    #[error("shift {0} is not a coordinate of the standard representation")]
    NotStandardWeight(i32),
    #[error("λ+δ = {0} does not occur in V(std) ⊗ V(λ)")]
    NotConstituent(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Pattern(#[from] crate::pattern::PatternError),
    #[error("integrity failure: {0}")]
    Integrity(String),
}

/// Fundamental Wigner coefficients for one `(λ, δ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WignerTable {
    pub label: AlgebraLabel,
    pub highest_weight: Vec<Rational>,
    /// Standard-representation coordinate whose weight is `δ`.
    pub shift: i32,
    pub bar_weight: Vec<Rational>,
    /// `(λ̄-pattern, standard coordinate, λ-pattern)` ↦ coefficient.
    pub entries: BTreeMap<(usize, i32, usize), AlgebraicValue>,
    /// `δ = 0` in the B series: `V(λ)` inside `V(std) ⊗ V(λ)`.
    pub zero_shift: bool,
    /// The leading coefficient vanished and the first nonzero entry of the
    /// maximal column was normalized to 1 instead.
    pub leading_fallback: bool,
}

impl WignerTable {
    pub fn get(&self, bar: usize, coord: i32, ket: usize) -> AlgebraicValue {
        self.entries.get(&(bar, coord, ket)).cloned().unwrap_or_default()
    }

    /// JSON form using the exact value encoding.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(&(bar, i, ket), v)| json!({"bar": bar, "i": i, "ket": ket, "value": v.to_json()}))
            .collect();
        json!({
            "family": self.label.family.to_string(),
            "rank": self.label.rank,
            "hw": self.highest_weight.iter().map(format_rational).collect::<Vec<_>>(),
            "shift": self.shift,
            "bar_hw": self.bar_weight.iter().map(format_rational).collect::<Vec<_>>(),
            "zero_shift": self.zero_shift,
            "leading_fallback": self.leading_fallback,
            "entries": entries,
        })
    }

    /// Parses the output of [`WignerTable::to_json`].
    pub fn from_json(v: &Value) -> Result<Self, WignerError> {
        let bad = |what: &str| WignerError::Integrity(format!("malformed Wigner table: {what}"));
        let family = v["family"].as_str().ok_or_else(|| bad("family"))?.parse()?;
        let rank = v["rank"].as_u64().ok_or_else(|| bad("rank"))? as usize;
        let label = AlgebraLabel::new(family, rank)?;
        let weights = |key: &str| -> Result<Vec<Rational>, WignerError> {
            v[key]
                .as_array()
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|x| {
                    let s = x.as_str().ok_or_else(|| bad(key))?;
                    Ok(crate::numeric::parse_rational(s)?)
                })
                .collect()
        };
        let mut entries = BTreeMap::new();
        for e in v["entries"].as_array().ok_or_else(|| bad("entries"))? {
            let bar = e["bar"].as_u64().ok_or_else(|| bad("bar"))? as usize;
            let i = e["i"].as_i64().ok_or_else(|| bad("i"))? as i32;
            let ket = e["ket"].as_u64().ok_or_else(|| bad("ket"))? as usize;
            entries.insert((bar, i, ket), AlgebraicValue::from_json(&e["value"])?);
        }
        Ok(Self {
            label,
            highest_weight: weights("hw")?,
            shift: v["shift"].as_i64().ok_or_else(|| bad("shift"))? as i32,
            bar_weight: weights("bar_hw")?,
            entries,
            zero_shift: v["zero_shift"].as_bool().unwrap_or(false),
            leading_fallback: v["leading_fallback"].as_bool().unwrap_or(false),
        })
    }
}

/// Standard coordinate of each basis pattern of the standard representation.
fn std_coordinates(label: &AlgebraLabel, std: &GtBasis) -> Result<Vec<i32>, WignerError> {
    std.patterns
        .iter()
        .map(|p| {
            label
                .coord_of_weight(p.weight_unchecked().components())
                .ok_or_else(|| WignerError::Integrity("standard weight without a coordinate".into()))
        })
        .collect()
}

/// `G·v` restricted to the weight space of `v`: the covector pairing with `v`.
fn covector(module: &HwModule, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    if let Some((&first, _)) = v.iter().next() {
        let sp = module.space_of_index(first);
        for b in 0..sp.dim() {
            let mut acc = Rational::zero();
            for (&k, x) in v {
                let g = sp.gram.get(k - sp.offset, b);
                if !g.is_zero() {
                    acc += g * x;
                }
            }
            if !acc.is_zero() {
                out.insert(sp.offset + b, acc);
            }
        }
    }
    out
}

/// Diagonal action `X ⊗ 1 + 1 ⊗ Y` on the tensor weight basis.
fn tensor_action(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    SparseMatrix::identity(a.rows)
        .kron(b)
        .add(&a.kron(&SparseMatrix::identity(b.rows)))
}

/// Builds the fundamental Wigner table for `(λ, shift)`.
pub fn build_intertwiner(label: AlgebraLabel, hw: &[Rational], shift: i32) -> Result<WignerTable, WignerError> {
    if label.position(shift).is_err() || (shift == 0 && label.family != crate::algebra::Family::B) {
        return Err(WignerError::NotStandardWeight(shift));
    }
    let delta = label.coord_weight(shift);
    let bar: Vec<Rational> = hw.iter().zip(&delta).map(|(x, &d)| x + rat(d as i64)).collect();
    let lam = DominantWeight::new(&label, hw.to_vec())?;
    let bar_dom = DominantWeight::new(&label, bar.clone())
        .map_err(|_| WignerError::NotConstituent(show(&bar)))?;
    if !tensor_with_standard(&label, &lam)?.contains_key(&bar_dom) {
        return Err(WignerError::NotConstituent(show(&bar)));
    }
    let std_basis = gt_basis(label, DominantWeight::standard(&label).components())?;
    let ket_basis = gt_basis(label, hw)?;
    let bar_basis = gt_basis(label, &bar)?;
    let (ms, ml, mb) = (&std_basis.module, &ket_basis.module, &bar_basis.module);
    let dl = ml.dim();
    let roots = RootSystem::new(label);
    let simple = roots.simple_raising();

    // Highest vector of weight λ̄ in the tensor product.
    let columns: Vec<usize> = (0..ms.dim())
        .flat_map(|a| (0..dl).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            let wa = &ms.space_of_index(a).weight;
            let wb = &ml.space_of_index(b).weight;
            wa.iter().zip(wb).zip(&bar).all(|((x, y), z)| &(x + y) == z)
        })
        .map(|(a, b)| a * dl + b)
        .collect();
    let raising: Vec<SparseMatrix> = simple
        .iter()
        .map(|&e| Ok(tensor_action(&*ms.operator(e)?, &*ml.operator(e)?)))
        .collect::<Result<_, ModuleError>>()?;
    let mut rows: BTreeMap<(usize, usize), Vec<Rational>> = BTreeMap::new();
    for (s, op) in raising.iter().enumerate() {
        for (c, &col) in columns.iter().enumerate() {
            for (&r, v) in &op.columns[col] {
                rows.entry((s, r)).or_insert_with(|| vec![Rational::zero(); columns.len()])[c] = v.clone();
            }
        }
    }
    let mut system = DenseMatrix::zeros(rows.len(), columns.len());
    for (r, row) in rows.into_values().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            system.set(r, c, v);
        }
    }
    let kernel = if system.rows == 0 {
        (0..columns.len())
            .map(|k| {
                let mut v = vec![Rational::zero(); columns.len()];
                v[k] = rat(1);
                v
            })
            .collect()
    } else {
        system.null_space()
    };
    if kernel.len() != 1 {
        return Err(WignerError::Integrity(format!(
            "{} highest vectors of weight {} in the tensor product",
            kernel.len(),
            show(&bar)
        )));
    }
    let top: SparseVec = kernel[0]
        .iter()
        .zip(&columns)
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, &c)| (c, x.clone()))
        .collect();

    // Image of the weight basis of V(λ̄).
    let lowering: Vec<SparseMatrix> = simple
        .iter()
        .map(|&e| Ok(tensor_action(&*ms.operator(e.transpose())?, &*ml.operator(e.transpose())?)))
        .collect::<Result<_, ModuleError>>()?;
    let mut image: Vec<SparseVec> = Vec::with_capacity(mb.dim());
    for sp in mb.spaces() {
        for recipe in &sp.recipes {
            let v = match *recipe {
                Recipe::Top => top.clone(),
                Recipe::Lower { simple, parent } => {
                    let ps = mb.parent_space(sp, simple).expect("recipe parent");
                    lowering[simple].apply_sparse(&image[ps.offset + parent])
                }
            };
            image.push(v);
        }
    }

    let coords = std_coordinates(&label, &std_basis)?;
    let std_co: Vec<SparseVec> = std_basis.vectors.iter().map(|v| covector(ms, v)).collect();
    let ket_co: Vec<SparseVec> = ket_basis.vectors.iter().map(|v| covector(ml, v)).collect();
    let mut ket_by_weight: HashMap<Vec<Rational>, Vec<usize>> = HashMap::new();
    for (q, p) in ket_basis.patterns.iter().enumerate() {
        ket_by_weight
            .entry(p.weight_unchecked().components().to_vec())
            .or_default()
            .push(q);
    }
    let mut entries = BTreeMap::new();
    for (pb, wv) in bar_basis.vectors.iter().enumerate() {
        let mut y = SparseVec::new();
        for (&k, c) in wv {
            sparse_axpy(&mut y, c, &image[k]);
        }
        let wbar = bar_basis.patterns[pb].weight_unchecked();
        for (i, sc) in std_co.iter().enumerate() {
            let ws = std_basis.patterns[i].weight_unchecked();
            let target: Vec<Rational> = wbar
                .components()
                .iter()
                .zip(ws.components())
                .map(|(a, b)| a - b)
                .collect();
            let Some(kets) = ket_by_weight.get(&target) else { continue };
            for &q in kets {
                let kc = &ket_co[q];
                let mut acc = Rational::zero();
                for (&idx, yv) in &y {
                    let (a, b) = (idx / dl, idx % dl);
                    if let (Some(x), Some(z)) = (sc.get(&a), kc.get(&b)) {
                        acc += x * z * yv;
                    }
                }
                if acc.is_zero() {
                    continue;
                }
                let scale = (&std_basis.norms[i] * &ket_basis.norms[q] * &bar_basis.norms[pb]).recip();
                entries.insert((pb, coords[i], q), AlgebraicValue::scaled_sqrt(&acc, &scale)?);
            }
        }
    }

    // Normalize the leading coefficient.
    let bar_max = bar_basis
        .index_of(&crate::pattern::max_pattern(&label, &bar_dom)?)
        .ok_or_else(|| WignerError::Integrity("maximal pattern missing".into()))?;
    let ket_max = ket_basis
        .index_of(&crate::pattern::max_pattern(&label, &lam)?)
        .ok_or_else(|| WignerError::Integrity("maximal pattern missing".into()))?;
    let leading = entries.get(&(bar_max, shift, ket_max)).cloned();
    let (norm, leading_fallback) = match leading {
        Some(v) => (v, false),
        None => (
            entries
                .iter()
                .find(|(&(b, _, _), _)| b == bar_max)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| WignerError::Integrity("maximal column vanishes".into()))?,
            true,
        ),
    };
    let inv = norm.inverse()?;
    for v in entries.values_mut() {
        *v = &*v * &inv;
    }
    Ok(WignerTable {
        label,
        highest_weight: hw.to_vec(),
        shift,
        bar_weight: bar,
        entries,
        zero_shift: shift == 0,
        leading_fallback,
    })
}

fn show(w: &[Rational]) -> String {
    format!("[{}]", w.iter().map(format_rational).collect::<Vec<_>>().join(","))
}

/// Shifts `δ` (as standard coordinates) with `λ+δ` a constituent of `V(std) ⊗ V(λ)`.
pub fn constituent_shifts(label: AlgebraLabel, hw: &[Rational]) -> Result<Vec<i32>, WignerError> {
    let lam = DominantWeight::new(&label, hw.to_vec())?;
    let parts = tensor_with_standard(&label, &lam)?;
    let mut out = Vec::new();
    for c in label.coords() {
        let d = label.coord_weight(c);
        let bar: Vec<Rational> = hw.iter().zip(&d).map(|(x, &y)| x + rat(y as i64)).collect();
        if let Ok(b) = DominantWeight::new(&label, bar) {
            if parts.contains_key(&b) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// The table as a matrix from `V(λ̄)` to `V(std) ⊗ V(λ)`, rows indexed
/// `std_index · dim λ + ket`.
pub fn intertwiner_matrix(table: &WignerTable, std: &GtBasis, ket_dim: usize, bar_dim: usize) -> Result<AlgMatrix, WignerError> {
    let coords = std_coordinates(&table.label, std)?;
    let pos: HashMap<i32, usize> = coords.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut m = AlgMatrix::zeros(std.dim() * ket_dim, bar_dim);
    for (&(bar, c, ket), v) in &table.entries {
        m.add_to(pos[&c] * ket_dim + ket, bar, v);
    }
    Ok(m)
}

/// Outcome of the equivariance check; `max_residual` is the largest entry of
/// `Φ π_λ̄(g) − (π_std ⊗ π_λ)(g) Φ` over all generators.
pub struct Equivariance {
    pub exact: bool,
    pub max_residual: f64,
    pub witness: Option<GeneratorId>,
}

/// Checks `Φ ∘ π_λ̄(g) = (π_std ⊗ π_λ)(g) ∘ Φ` for every canonical generator.
pub fn check_equivariance(table: &WignerTable) -> Result<Equivariance, WignerError> {
    let label = table.label;
    let std = Representation::new(label, DominantWeight::standard(&label).components())?;
    let ket = Representation::new(label, &table.highest_weight)?;
    let bar = Representation::new(label, &table.bar_weight)?;
    let phi = intertwiner_matrix(table, &std.basis, ket.dim(), bar.dim())?;
    let mut out = Equivariance {
        exact: true,
        max_residual: 0.0,
        witness: None,
    };
    for g in RootSystem::new(label).generators() {
        let lhs = phi.mul(&*bar.matrix(g)?);
        let tensor = std
            .matrix(g)?
            .kron(&AlgMatrix::identity(ket.dim()))
            .add(&AlgMatrix::identity(std.dim()).kron(&*ket.matrix(g)?));
        let diff = lhs.sub(&tensor.mul(&phi));
        if !diff.is_zero() {
            out.exact = false;
            let r = diff.max_abs();
            if out.witness.is_none() || r > out.max_residual {
                out.max_residual = r;
                out.witness = Some(g);
            }
        }
    }
    Ok(out)
}

/// Float null-space oracle for intertwiners `V(λ̄) → V(std) ⊗ V(λ)`.
pub struct NullSpaceReport {
    /// Dimension of the solution space.
    pub nullity: usize,
    /// Expected multiplicity of `λ̄` in the tensor product.
    pub expected: u64,
    /// Relative distance of the table from the span of the solution space.
    pub residual: f64,
}

/// Solves `X π_λ̄(x) = (π_std ⊗ π_λ)(x) X` for the simple generators in floats,
/// unknowns restricted by weight additivity.
pub fn null_space_oracle(table: &WignerTable) -> Result<NullSpaceReport, WignerError> {
    let label = table.label;
    let std = Representation::new(label, DominantWeight::standard(&label).components())?;
    let ket = Representation::new(label, &table.highest_weight)?;
    let bar = Representation::new(label, &table.bar_weight)?;
    let (ds, dk, db) = (std.dim(), ket.dim(), bar.dim());
    let weight = |b: &GtBasis, i: usize| b.patterns[i].weight_unchecked().components().to_vec();
    let mut unknowns: HashMap<(usize, usize), usize> = HashMap::new();
    for s in 0..ds {
        for k in 0..dk {
            let w: Vec<Rational> = weight(&std.basis, s)
                .iter()
                .zip(weight(&ket.basis, k))
                .map(|(a, b)| a + b)
                .collect();
            for c in 0..db {
                if weight(&bar.basis, c) == w {
                    let n = unknowns.len();
                    unknowns.insert((s * dk + k, c), n);
                }
            }
        }
    }
    let nu = unknowns.len();
    let mut normal = DMatrix::<f64>::zeros(nu, nu);
    let roots = RootSystem::new(label);
    for e in roots.simple_raising() {
        for g in [e, e.transpose()] {
            let a = bar.matrix(g)?;
            let t = std
                .matrix(g)?
                .kron(&AlgMatrix::identity(dk))
                .add(&AlgMatrix::identity(ds).kron(&*ket.matrix(g)?));
            // Equation (r, c): Σ_k X[r,k] A[k,c] − Σ_k T[r,k] X[k,c].
            let mut eqs: HashMap<(usize, usize), Vec<(usize, f64)>> = HashMap::new();
            for (&(k, c), v) in &a.entries {
                for r in 0..ds * dk {
                    if let Some(&u) = unknowns.get(&(r, k)) {
                        eqs.entry((r, c)).or_default().push((u, v.to_f64()));
                    }
                }
            }
            for (&(r, k), v) in &t.entries {
                for c in 0..db {
                    if let Some(&u) = unknowns.get(&(k, c)) {
                        eqs.entry((r, c)).or_default().push((u, -v.to_f64()));
                    }
                }
            }
            for row in eqs.values() {
                for &(u1, a1) in row {
                    for &(u2, a2) in row {
                        normal[(u1, u2)] += a1 * a2;
                    }
                }
            }
        }
    }
    let eig = SymmetricEigen::new(normal);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let null: Vec<usize> = (0..nu).filter(|&k| eig.eigenvalues[k].abs() < 1e-10 * scale).collect();
    let lam = DominantWeight::new(&label, table.highest_weight.clone())?;
    let bar_dom = DominantWeight::new(&label, table.bar_weight.clone())?;
    let expected = tensor_with_standard(&label, &lam)?.get(&bar_dom).copied().unwrap_or(0);
    // Project the table onto the null space.
    let phi = intertwiner_matrix(table, &std.basis, dk, db)?;
    let mut x = vec![0.0f64; nu];
    for (&(r, c), v) in &phi.entries {
        let u = unknowns
            .get(&(r, c))
            .ok_or_else(|| WignerError::Integrity(format!("table entry ({r},{c}) violates weight additivity")))?;
        x[*u] = v.to_f64();
    }
    let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut proj = vec![0.0f64; nu];
    for &k in &null {
        let col = eig.eigenvectors.column(k);
        let dot: f64 = col.iter().zip(&x).map(|(a, b)| a * b).sum();
        for (p, a) in proj.iter_mut().zip(col.iter()) {
            *p += dot * a;
        }
    }
    let resid: f64 = x.iter().zip(&proj).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    Ok(NullSpaceReport {
        nullity: null.len(),
        expected,
        residual: if norm > 0.0 { resid / norm } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Family;

    fn lam(f: Family, n: usize, hw: &str) -> (AlgebraLabel, Vec<Rational>) {
        let label = AlgebraLabel::new(f, n).unwrap();
        (label, DominantWeight::parse(&label, hw).unwrap().components().to_vec())
    }

    #[test]
    fn tables_are_equivariant_and_match_the_oracle() {
        for (f, n, hw) in [(Family::B, 2, "1,1"), (Family::C, 2, "1,0"), (Family::D, 2, "1,0"), (Family::B, 2, "1/2,1/2")] {
            let (label, w) = lam(f, n, hw);
            for shift in constituent_shifts(label, &w).unwrap() {
                let t = build_intertwiner(label, &w, shift).unwrap();
                let eq = check_equivariance(&t).unwrap();
                assert!(eq.exact, "{label} {hw} shift {shift}: {:?}", eq.witness);
                let ns = null_space_oracle(&t).unwrap();
                assert_eq!(ns.nullity as u64, ns.expected);
                assert_eq!(ns.nullity, 1);
                assert!(ns.residual < 1e-9, "{}", ns.residual);
            }
        }
    }

    #[test]
    fn leading_coefficient_is_one_and_weights_add() {
        let (label, w) = lam(Family::C, 2, "1,0");
        let t = build_intertwiner(label, &w, -2).unwrap();
        assert!(!t.leading_fallback);
        let bar = gt_basis(label, &t.bar_weight).unwrap();
        let ket = gt_basis(label, &w).unwrap();
        for &(b, i, k) in t.entries.keys() {
            let wb = bar.patterns[b].weight_unchecked();
            let wk = ket.patterns[k].weight_unchecked();
            let d = label.coord_weight(i);
            for ((a, b), r) in wb.components().iter().zip(wk.components()).zip(&d) {
                assert_eq!(a - b, rat(*r as i64));
            }
        }
        assert!(t.entries.values().any(|v| *v == AlgebraicValue::one()));
    }

    #[test]
    fn trivial_weight_gives_the_identity_embedding() {
        let (label, w) = lam(Family::B, 2, "0,0");
        let t = build_intertwiner(label, &w, -2).unwrap();
        assert_eq!(t.entries.len(), 5);
        assert!(t.entries.iter().all(|(&(b, _, k), v)| k == 0 && b < 5 && *v == AlgebraicValue::one()));
    }

    #[test]
    fn non_standard_shift_is_rejected() {
        let (label, w) = lam(Family::C, 2, "1,0");
        assert!(matches!(build_intertwiner(label, &w, 0), Err(WignerError::NotStandardWeight(0))));
        assert!(matches!(build_intertwiner(label, &w, 5), Err(WignerError::NotStandardWeight(5))));
    }

    #[test]
    fn json_round_trip() {
        let (label, w) = lam(Family::B, 2, "1,0");
        let t = build_intertwiner(label, &w, 0).unwrap_or_else(|_| build_intertwiner(label, &w, -2).unwrap());
        let back = WignerTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json().to_string(), t.to_json().to_string());
    }
}
