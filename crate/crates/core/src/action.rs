//! Generator matrices `π(F_ij)` in the orthonormal Gelfand–Tsetlin basis.
//!
//! Lowering and Cartan operators are read off the exact module: the entry
//! `(p, q)` is `⟨w_p, π(F) w_q⟩ / √(r_p r_q)`, a single-term algebraic value.
//! Raising operators are transposes of lowering operators, which is exact
//! because the basis is orthonormal for a form in which `F_ji` is adjoint to
//! `F_ij`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraLabel, GeneratorId, RootSystem};
use crate::gt_basis::{gt_basis, BasisError, GtBasis};
use crate::hwmodule::ModuleError;
use crate::linalg::DenseMatrix;
use crate::numeric::{rat, AlgebraicValue, NumericError, Rational};

#[derive(Debug, Error)]
pub enum ActionError {
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("integrity failure: {0}")]
    Integrity(String),
}

/// Sparse matrix with exact algebraic entries; no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: BTreeMap<(usize, usize), AlgebraicValue>,
}

impl AlgMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.add_to(k, k, &AlgebraicValue::one());
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> AlgebraicValue {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &AlgebraicValue) {
        if v.is_zero() {
            return;
        }
        let e = self.entries.entry((r, c)).or_default();
        *e = &*e + v;
        if e.is_zero() {
            self.entries.remove(&(r, c));
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(r, c), v)| ((c, r), v.clone())).collect(),
        }
    }

    pub fn scale(&self, f: &AlgebraicValue) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            out.add_to(r, c, &(v * f));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_to(r, c, &-v);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut by_row: HashMap<usize, Vec<(usize, &AlgebraicValue)>> = HashMap::new();
        for (&(k, c), v) in &other.entries {
            by_row.entry(k).or_default().push((c, v));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (&(r, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, b) in row {
                    out.add_to(r, c, &(a * b));
                }
            }
        }
        out
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product with index `(a, b) ↦ a·other.rows + b`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for (&(ra, ca), a) in &self.entries {
            for (&(rb, cb), b) in &other.entries {
                out.entries
                    .insert((ra * other.rows + rb, ca * other.cols + cb), a * b);
            }
        }
        out
    }

    /// Largest entry magnitude, in floating point.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Whether every entry is a single-term value.
    pub fn is_single_term(&self) -> bool {
        self.entries.values().all(|v| v.term_count() <= 1)
    }
}

/// `π(F_ij)` for one module, in pattern order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseOperator {
    pub label: AlgebraLabel,
    pub highest_weight: Vec<Rational>,
    pub generator: GeneratorId,
    pub matrix: AlgMatrix,
}

/// The transpose of a lowering operator, labelled with the transposed generator.
pub fn raising_of(lowering: &SparseOperator) -> SparseOperator {
    SparseOperator {
        label: lowering.label,
        highest_weight: lowering.highest_weight.clone(),
        generator: lowering.generator.transpose(),
        matrix: lowering.matrix.transpose(),
    }
}

/// Representation on the Gelfand–Tsetlin basis of one irreducible module.
#[derive(Debug)]
pub struct Representation {
    pub basis: Arc<GtBasis>,
    roots: RootSystem,
    by_weight: HashMap<Vec<Rational>, Vec<usize>>,
    cache: RwLock<HashMap<GeneratorId, Arc<AlgMatrix>>>,
}

impl Representation {
    pub fn new(label: AlgebraLabel, hw: &[Rational]) -> Result<Self, ActionError> {
        let basis = gt_basis(label, hw)?;
        let mut by_weight: HashMap<Vec<Rational>, Vec<usize>> = HashMap::new();
        for (i, p) in basis.patterns.iter().enumerate() {
            by_weight
                .entry(p.weight_unchecked().components().to_vec())
                .or_default()
                .push(i);
        }
        Ok(Self {
            basis,
            roots: RootSystem::new(label),
            by_weight,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn label(&self) -> AlgebraLabel {
        self.basis.label
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.roots
    }

    /// Diagonal operator `F_kk`, `k < 0`: entries are weight component `Δ_k`.
    pub fn cartan(&self, k: i32) -> Result<SparseOperator, ActionError> {
        let g = GeneratorId::new(k, k);
        if k >= 0 {
            return Err(ActionError::Integrity(format!("Cartan index {k} must be negative")));
        }
        self.roots.label.position(k)?;
        Ok(self.wrap(g, self.cartan_matrix(k)))
    }

    fn cartan_matrix(&self, k: i32) -> AlgMatrix {
        let idx = self.label().weight_index(k.unsigned_abs() as usize);
        let mut m = AlgMatrix::zeros(self.dim(), self.dim());
        for (i, p) in self.basis.patterns.iter().enumerate() {
            let w = p.weight_unchecked();
            m.add_to(i, i, &AlgebraicValue::from_rational(w.components()[idx].clone()));
        }
        m
    }

    fn wrap(&self, g: GeneratorId, matrix: AlgMatrix) -> SparseOperator {
        SparseOperator {
            label: self.label(),
            highest_weight: self.basis.highest_weight.clone(),
            generator: g,
            matrix,
        }
    }

    /// `π(F_ij)` for any valid index pair.
    pub fn operator(&self, g: GeneratorId) -> Result<SparseOperator, ActionError> {
        Ok(self.wrap(g, (*self.matrix(g)?).clone()))
    }

    /// Matrix of `π(F_ij)`, shared.
    pub fn matrix(&self, g: GeneratorId) -> Result<Arc<AlgMatrix>, ActionError> {
        let Some((rep, sign)) = self.roots.canonical(g)? else {
            return Ok(Arc::new(AlgMatrix::zeros(self.dim(), self.dim())));
        };
        let base = self.canonical_matrix(rep)?;
        Ok(if sign == 1 {
            base
        } else {
            Arc::new(base.scale(&AlgebraicValue::from_int(sign)))
        })
    }

    fn canonical_matrix(&self, g: GeneratorId) -> Result<Arc<AlgMatrix>, ActionError> {
        if let Some(m) = self.cache.read().expect("lock").get(&g) {
            return Ok(m.clone());
        }
        let m = if g.i == g.j {
            self.cartan_matrix(g.i)
        } else if g.i < g.j {
            let lowering = self.canonical_matrix(g.transpose())?;
            lowering.transpose()
        } else {
            self.lowering_from_module(g)?
        };
        let m = Arc::new(m);
        self.cache.write().expect("lock").insert(g, m.clone());
        Ok(m)
    }

    /// Matrix elements of a lowering generator read off the exact module.
    fn lowering_from_module(&self, g: GeneratorId) -> Result<AlgMatrix, ActionError> {
        let b = &self.basis;
        let op = b.module.operator(g)?;
        let root = self.roots.root(g);
        let mut m = AlgMatrix::zeros(self.dim(), self.dim());
        for q in 0..self.dim() {
            let y = op.apply_sparse(&b.vectors[q]);
            if y.is_empty() {
                continue;
            }
            let target: Vec<Rational> = b.patterns[q]
                .weight_unchecked()
                .components()
                .iter()
                .zip(&root)
                .map(|(w, &a)| w + rat(a as i64))
                .collect();
            let Some(rows) = self.by_weight.get(&target) else {
                return Err(ActionError::Integrity(format!("{g} maps pattern {q} to a missing weight")));
            };
            for &p in rows {
                let num = b.module.inner(&b.vectors[p], &y);
                if num.is_zero() {
                    continue;
                }
                let scale = (&b.norms[p] * &b.norms[q]).recip();
                m.add_to(p, q, &AlgebraicValue::scaled_sqrt(&num, &scale)?);
            }
        }
        Ok(m)
    }

    /// Operators for every canonical generator.
    pub fn all_operators(&self) -> Result<BTreeMap<GeneratorId, Arc<AlgMatrix>>, ActionError> {
        self.roots
            .generators()
            .into_iter()
            .map(|g| Ok((g, self.canonical_matrix(g)?)))
            .collect()
    }

    /// Quadratic Casimir `Σ B⁻¹_{gh} π(g) π(h)` for the trace form `B`.
    pub fn casimir(&self) -> Result<AlgMatrix, ActionError> {
        let gens = self.roots.generators();
        let n = gens.len();
        let mut form = DenseMatrix::zeros(n, n);
        for (a, &x) in gens.iter().enumerate() {
            for (b, &y) in gens.iter().enumerate() {
                form.set(a, b, self.roots.trace_form(x, y));
            }
        }
        let inv = form
            .inverse()
            .ok_or_else(|| ActionError::Integrity("degenerate trace form".into()))?;
        let mut c = AlgMatrix::zeros(self.dim(), self.dim());
        for (a, &x) in gens.iter().enumerate() {
            for (b, &y) in gens.iter().enumerate() {
                let k = inv.get(a, b);
                if k.is_zero() {
                    continue;
                }
                let term = self.canonical_matrix(x)?.mul(&*self.canonical_matrix(y)?);
                c = c.add(&term.scale(&AlgebraicValue::from_rational(k.clone())));
            }
        }
        Ok(c)
    }
}

/// Completes a generator map from the simple root operators and Cartans by
/// iterated commutators, checking each result against any operator already
/// present in `known`.
///
/// `known` must contain the Cartans `F_kk` and both `F` and `Fᵀ` for every simple root.
pub fn close_under_brackets(
    roots: &RootSystem,
    known: &BTreeMap<GeneratorId, AlgMatrix>,
    direct: Option<&BTreeMap<GeneratorId, Arc<AlgMatrix>>>,
) -> Result<BTreeMap<GeneratorId, AlgMatrix>, ActionError> {
    let mut out = known.clone();
    let simple: Vec<GeneratorId> = roots.simple_raising();
    let mut pending: Vec<GeneratorId> = roots
        .generators()
        .into_iter()
        .filter(|g| !out.contains_key(g))
        .collect();
    let height = |g: &GeneratorId| roots.root(*g).iter().map(|x| x.abs()).sum::<i32>();
    pending.sort_by_key(height);
    while !pending.is_empty() {
        let mut progressed = false;
        let mut rest = Vec::new();
        for g in pending {
            let raising = g.i < g.j;
            let mut built = None;
            'search: for &e in &simple {
                let x = if raising { e } else { e.transpose() };
                let Some(px) = out.get(&x) else { continue };
                for (k, pk) in &out {
                    if k.i == k.j || (k.i < k.j) != raising {
                        continue;
                    }
                    if let [(h, c)] = roots.bracket(x, *k).as_slice() {
                        if *h == g && !c.is_zero() {
                            let inv = AlgebraicValue::from_rational(c.recip());
                            built = Some(px.commutator(pk).scale(&inv));
                            break 'search;
                        }
                    }
                }
            }
            match built {
                Some(m) => {
                    if let Some(d) = direct.and_then(|d| d.get(&g)) {
                        if **d != m {
                            return Err(ActionError::Integrity(format!(
                                "closure of {g} disagrees with the direct operator"
                            )));
                        }
                    }
                    out.insert(g, m);
                    progressed = true;
                }
                None => rest.push(g),
            }
        }
        if !progressed && !rest.is_empty() {
            return Err(ActionError::Integrity(format!("generators unreachable by brackets: {rest:?}")));
        }
        pending = rest;
    }
    Ok(out)
}

/// The simple root operators, their transposes, and the Cartans of a representation.
pub fn simple_operators(rep: &Representation) -> Result<BTreeMap<GeneratorId, AlgMatrix>, ActionError> {
    let mut out = BTreeMap::new();
    for e in rep.root_system().simple_raising() {
        out.insert(e, (*rep.matrix(e)?).clone());
        out.insert(e.transpose(), (*rep.matrix(e.transpose())?).clone());
    }
    for g in rep.root_system().generators() {
        if g.i == g.j {
            out.insert(g, (*rep.matrix(g)?).clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{DominantWeight, Family};
    use crate::oracle::casimir_eigenvalue;

    fn rep(f: Family, n: usize, hw: &str) -> Representation {
        let label = AlgebraLabel::new(f, n).unwrap();
        let w = DominantWeight::parse(&label, hw).unwrap();
        Representation::new(label, w.components()).unwrap()
    }

    fn assert_brackets(r: &Representation) {
        let ops = r.all_operators().unwrap();
        for (&a, ma) in &ops {
            for (&b, mb) in &ops {
                let lhs = ma.commutator(mb);
                let mut rhs = AlgMatrix::zeros(r.dim(), r.dim());
                for (g, c) in r.root_system().bracket(a, b) {
                    rhs = rhs.add(&r.matrix(g).unwrap().scale(&AlgebraicValue::from_rational(c)));
                }
                assert_eq!(lhs, rhs, "[{a},{b}]");
            }
        }
    }

    #[test]
    fn brackets_hold_exactly() {
        assert_brackets(&rep(Family::B, 2, "1,0"));
        assert_brackets(&rep(Family::B, 2, "3/2,1/2"));
        assert_brackets(&rep(Family::C, 2, "1,0"));
        assert_brackets(&rep(Family::D, 2, "1,0"));
        assert_brackets(&rep(Family::B, 1, "1/2"));
    }

    #[test]
    fn casimir_spot_values() {
        for (f, hw, want) in [(Family::B, "1,0", 4), (Family::C, "1,0", 5)] {
            let r = rep(f, 2, hw);
            let c = r.casimir().unwrap();
            assert_eq!(c, AlgMatrix::identity(r.dim()).scale(&AlgebraicValue::from_int(want)));
            let w = DominantWeight::parse(&r.label(), hw).unwrap();
            assert_eq!(casimir_eigenvalue(&r.label(), &w).unwrap(), rat(want));
        }
    }

    #[test]
    fn raising_is_an_involutive_transpose() {
        let r = rep(Family::C, 2, "1,1");
        let low = r.operator(GeneratorId::new(1, -2)).unwrap();
        let up = raising_of(&low);
        assert_eq!(up.generator, GeneratorId::new(-2, 1));
        assert_eq!(raising_of(&up), low);
        assert_eq!(up.matrix, *r.matrix(GeneratorId::new(-2, 1)).unwrap());
    }

    #[test]
    fn closure_matches_direct_operators() {
        for (f, n, hw) in [(Family::B, 2, "1,1"), (Family::C, 3, "1,0,0"), (Family::D, 3, "1,0,0")] {
            let r = rep(f, n, hw);
            let direct = r.all_operators().unwrap();
            let closed = close_under_brackets(r.root_system(), &simple_operators(&r).unwrap(), Some(&direct)).unwrap();
            assert_eq!(closed.len(), direct.len());
        }
    }

    #[test]
    fn orthogonal_antisymmetry_holds_entrywise() {
        let r = rep(Family::B, 2, "1,0");
        let a = r.operator(GeneratorId::new(-1, -2)).unwrap().matrix;
        let b = r.operator(GeneratorId::new(2, 1)).unwrap().matrix;
        assert_eq!(a, b.scale(&AlgebraicValue::from_int(-1)));
    }

    #[test]
    fn lowering_entries_shift_weight_by_the_root() {
        let r = rep(Family::C, 2, "2,1");
        for g in r.root_system().generators() {
            let m = r.matrix(g).unwrap();
            let root = r.root_system().root(g);
            for &(p, q) in m.entries.keys() {
                let wp = r.basis.patterns[p].weight_unchecked();
                let wq = r.basis.patterns[q].weight_unchecked();
                for ((a, b), r) in wp.components().iter().zip(wq.components()).zip(&root) {
                    assert_eq!(a - b, rat(*r as i64));
                }
            }
        }
    }

    #[test]
    fn trivial_module_is_all_zero() {
        let r = rep(Family::D, 3, "0,0,0");
        assert!(r.all_operators().unwrap().values().all(|m| m.is_zero()));
    }
}
