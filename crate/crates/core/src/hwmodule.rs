//! Exact construction of a finite-dimensional irreducible module from its
//! highest weight.
//!
//! Weight spaces are built depth by depth below the highest weight. Every
//! basis vector is `f_s` applied to a basis vector one level up, and the
//! contravariant form (`e_s` adjoint to `f_s`, highest vector of norm 1) is
//! computed recursively from the commutation relations. Over a finite-dimensional
//! irreducible module this form is positive definite, so a candidate set is a
//! basis exactly when its Gram matrix is nonsingular.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraLabel, GeneratorId, RootSystem};
use crate::linalg::{DenseMatrix, SparseMatrix, SparseVec};
use crate::numeric::{rat, Rational};

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("highest weight has {got} components, algebra rank is {rank}")]
    WeightLength { got: usize, rank: usize },
    #[error("generator {0} is not reachable from the simple root generators")]
    Unreachable(GeneratorId),
    #[error("module exceeds the dimension limit {0}")]
    TooLarge(usize),
}

/// Multiplicities of simple roots subtracted from the highest weight.
pub type Deficit = Vec<u32>;

/// How a weight basis vector was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recipe {
    /// The highest weight vector.
    Top,
    /// `f_simple` applied to basis vector `parent` of the weight space one
    /// simple root higher.
    Lower { simple: usize, parent: usize },
}

/// One weight space with its basis data.
#[derive(Clone, Debug)]
pub struct WeightSpace {
    pub deficit: Deficit,
    pub weight: Vec<Rational>,
    /// Global index of the first basis vector.
    pub offset: usize,
    /// Contravariant form on the basis; positive definite.
    pub gram: DenseMatrix,
    pub recipes: Vec<Recipe>,
}

impl WeightSpace {
    pub fn dim(&self) -> usize {
        self.recipes.len()
    }
}

/// Upper bound on module dimension accepted by the construction.
pub const MAX_DIM: usize = 20_000;

/// Irreducible highest-weight module with a rational weight basis.
#[derive(Debug)]
pub struct HwModule {
    pub label: AlgebraLabel,
    pub highest_weight: Vec<Rational>,
    roots: RootSystem,
    simple: Vec<GeneratorId>,
    simple_roots: Vec<Vec<i32>>,
    spaces: Vec<WeightSpace>,
    by_deficit: HashMap<Deficit, usize>,
    by_weight: HashMap<Vec<Rational>, usize>,
    /// `(s, space)` ↦ matrix of `f_s` from the space one root up into `space`.
    lower_blocks: HashMap<(usize, usize), DenseMatrix>,
    /// `(s, space)` ↦ matrix of `e_s` from `space` into the space one root up.
    raise_blocks: HashMap<(usize, usize), DenseMatrix>,
    dim: usize,
    operators: RwLock<HashMap<GeneratorId, Arc<SparseMatrix>>>,
}

fn minus_unit(d: &Deficit, s: usize) -> Option<Deficit> {
    if d[s] == 0 {
        return None;
    }
    let mut out = d.clone();
    out[s] -= 1;
    Some(out)
}

impl HwModule {
    /// Builds the module with highest weight `hw` (weight coordinates).
    pub fn new(label: AlgebraLabel, hw: &[Rational]) -> Result<Self, ModuleError> {
        if hw.len() != label.rank {
            return Err(ModuleError::WeightLength {
                got: hw.len(),
                rank: label.rank,
            });
        }
        let roots = RootSystem::new(label);
        let simple = roots.simple_raising();
        let simple_roots: Vec<Vec<i32>> = simple.iter().map(|&g| roots.root(g)).collect();
        // h_s = [e_s, f_s] acts on weight μ by Σ coeff·μ.
        let mut h_coeffs = Vec::new();
        for &g in &simple {
            let c = crate::algebra::commutator(&roots.matrix(g)?, &roots.matrix(g.transpose())?);
            h_coeffs.push(roots.cartan_coefficients(&c));
        }
        let r = simple.len();
        let mut module = Self {
            label,
            highest_weight: hw.to_vec(),
            roots,
            simple,
            simple_roots,
            spaces: Vec::new(),
            by_deficit: HashMap::new(),
            by_weight: HashMap::new(),
            lower_blocks: HashMap::new(),
            raise_blocks: HashMap::new(),
            dim: 0,
            operators: RwLock::new(HashMap::new()),
        };
        module.push_space(WeightSpace {
            deficit: vec![0; r],
            weight: hw.to_vec(),
            offset: 0,
            gram: DenseMatrix::identity(1),
            recipes: vec![Recipe::Top],
        });
        let mut previous: Vec<usize> = vec![0];
        while !previous.is_empty() {
            let mut next_deficits: Vec<Deficit> = Vec::new();
            for &idx in &previous {
                for s in 0..r {
                    let mut d = module.spaces[idx].deficit.clone();
                    d[s] += 1;
                    next_deficits.push(d);
                }
            }
            next_deficits.sort();
            next_deficits.dedup();
            let mut current = Vec::new();
            for d in next_deficits {
                if let Some(idx) = module.build_space(d, &h_coeffs)? {
                    current.push(idx);
                }
            }
            previous = current;
        }
        Ok(module)
    }

    fn push_space(&mut self, mut space: WeightSpace) -> usize {
        space.offset = self.dim;
        self.dim += space.dim();
        let idx = self.spaces.len();
        self.by_deficit.insert(space.deficit.clone(), idx);
        self.by_weight.insert(space.weight.clone(), idx);
        self.spaces.push(space);
        idx
    }

    fn weight_of_deficit(&self, d: &Deficit) -> Vec<Rational> {
        let mut w = self.highest_weight.clone();
        for (s, &k) in d.iter().enumerate() {
            for (x, &a) in w.iter_mut().zip(&self.simple_roots[s]) {
                *x -= rat(a as i64 * k as i64);
            }
        }
        w
    }

    fn space_index(&self, d: &Deficit) -> Option<usize> {
        self.by_deficit.get(d).copied()
    }

    /// Builds the weight space at deficit `d`; `None` when it is zero.
    fn build_space(&mut self, d: Deficit, h_coeffs: &[Vec<i64>]) -> Result<Option<usize>, ModuleError> {
        let r = self.simple.len();
        // Candidates (s, b): f_s applied to basis vector b of space d − e_s.
        let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
        for s in 0..r {
            if let Some(p) = minus_unit(&d, s).and_then(|pd| self.space_index(&pd)) {
                for b in 0..self.spaces[p].dim() {
                    candidates.push((s, p, b));
                }
            }
        }
        if candidates.is_empty() {
            return Ok(None);
        }
        let m = candidates.len();
        // Blocks M_{s,t} = G_{d−e_s} · f_t e_s restricted to d − e_t → d − e_s.
        let mut pair_blocks: HashMap<(usize, usize), DenseMatrix> = HashMap::new();
        let parents: BTreeMap<usize, usize> = candidates.iter().map(|&(s, p, _)| (s, p)).collect();
        for (&s, &ps) in &parents {
            for (&t, &pt) in &parents {
                let ds = &self.spaces[ps];
                let mut block = DenseMatrix::zeros(ds.dim(), self.spaces[pt].dim());
                let q = minus_unit(&self.spaces[pt].deficit, s).and_then(|qd| self.space_index(&qd));
                if let Some(q) = q {
                    let e = &self.raise_blocks[&(s, pt)];
                    let f = &self.lower_blocks[&(t, ps)];
                    debug_assert_eq!(e.rows, self.spaces[q].dim());
                    block = ds.gram.mul(&f.mul(e));
                }
                if s == t {
                    let h: Rational = h_coeffs[s]
                        .iter()
                        .zip(&ds.weight)
                        .map(|(&c, w)| rat(c) * w)
                        .sum();
                    for a in 0..block.rows {
                        for b in 0..block.cols {
                            let v = block.get(a, b) + &h * ds.gram.get(a, b);
                            block.set(a, b, v);
                        }
                    }
                }
                pair_blocks.insert((s, t), block);
            }
        }
        let mut gram_all = DenseMatrix::zeros(m, m);
        for (x, &(s, _, a)) in candidates.iter().enumerate() {
            for (y, &(t, _, b)) in candidates.iter().enumerate() {
                gram_all.set(x, y, pair_blocks[&(s, t)].get(a, b).clone());
            }
        }
        // Greedy basis: positive definiteness makes rank growth equivalent to independence.
        let mut selected: Vec<usize> = Vec::new();
        for x in 0..m {
            let mut trial = selected.clone();
            trial.push(x);
            if submatrix(&gram_all, &trial, &trial).rank() == trial.len() {
                selected = trial;
            }
        }
        if selected.is_empty() {
            return Ok(None);
        }
        if self.dim + selected.len() > MAX_DIM {
            return Err(ModuleError::TooLarge(MAX_DIM));
        }
        let gram = submatrix(&gram_all, &selected, &selected);
        let gram_inv = gram.inverse().expect("Gram matrix of an independent set");
        let recipes = selected
            .iter()
            .map(|&x| {
                let (s, _, b) = candidates[x];
                Recipe::Lower { simple: s, parent: b }
            })
            .collect();
        let weight = self.weight_of_deficit(&d);
        let idx = self.push_space(WeightSpace {
            deficit: d,
            weight,
            offset: 0,
            gram: gram.clone(),
            recipes,
        });
        self.spaces[idx].offset = self.dim - selected.len();
        for (&s, &p) in &parents {
            let cols: Vec<usize> = (0..m).filter(|&x| candidates[x].0 == s).collect();
            let f = gram_inv.mul(&submatrix(&gram_all, &selected, &cols));
            // e_s = G_parent⁻¹ f_sᵀ G_d.
            let gp_inv = self.spaces[p].gram.inverse().expect("nonsingular Gram matrix");
            let e = gp_inv.mul(&f.transpose()).mul(&gram);
            self.lower_blocks.insert((s, idx), f);
            self.raise_blocks.insert((s, idx), e);
        }
        Ok(Some(idx))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spaces(&self) -> &[WeightSpace] {
        &self.spaces
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.roots
    }

    /// Simple raising generators `e_s`.
    pub fn simple_generators(&self) -> &[GeneratorId] {
        &self.simple
    }

    pub fn space_of_weight(&self, w: &[Rational]) -> Option<&WeightSpace> {
        self.by_weight.get(w).map(|&i| &self.spaces[i])
    }

    /// Index of the weight space one simple root `s` above `space`.
    pub fn parent_space(&self, space: &WeightSpace, s: usize) -> Option<&WeightSpace> {
        minus_unit(&space.deficit, s)
            .and_then(|d| self.space_index(&d))
            .map(|i| &self.spaces[i])
    }

    /// Weight space containing the global basis index `idx`.
    pub fn space_of_index(&self, idx: usize) -> &WeightSpace {
        let k = self.spaces.partition_point(|s| s.offset <= idx) - 1;
        &self.spaces[k]
    }

    /// Contravariant form of two vectors in the global weight basis.
    pub fn inner(&self, x: &SparseVec, y: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for (&i, xi) in x {
            let sp = self.space_of_index(i);
            let a = i - sp.offset;
            for (&j, yj) in y.range(sp.offset..sp.offset + sp.dim()) {
                let g = sp.gram.get(a, j - sp.offset);
                if !g.is_zero() {
                    acc += g * xi * yj;
                }
            }
        }
        acc
    }

    /// Global matrix of `F_ij` in the weight basis.
    pub fn operator(&self, g: GeneratorId) -> Result<Arc<SparseMatrix>, ModuleError> {
        let Some((rep, sign)) = self.roots.canonical(g)? else {
            return Ok(Arc::new(SparseMatrix::zeros(self.dim, self.dim)));
        };
        let base = self.canonical_operator(rep)?;
        Ok(if sign == 1 {
            base
        } else {
            Arc::new(base.scale(&rat(sign)))
        })
    }

    fn canonical_operator(&self, g: GeneratorId) -> Result<Arc<SparseMatrix>, ModuleError> {
        if let Some(m) = self.operators.read().expect("lock").get(&g) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.compute_operator(g)?);
        self.operators.write().expect("lock").insert(g, m.clone());
        Ok(m)
    }

    fn compute_operator(&self, g: GeneratorId) -> Result<SparseMatrix, ModuleError> {
        if g.i == g.j {
            let k = self.label.weight_index(g.i.unsigned_abs() as usize);
            let diag: Vec<Rational> = self
                .spaces
                .iter()
                .flat_map(|sp| std::iter::repeat_n(sp.weight[k].clone(), sp.dim()))
                .collect();
            return Ok(SparseMatrix::diagonal(&diag));
        }
        if let Some(s) = self.simple.iter().position(|&e| e == g) {
            return Ok(self.assemble(s, true));
        }
        if let Some(s) = self.simple.iter().position(|&e| e.transpose() == g) {
            return Ok(self.assemble(s, false));
        }
        // Non-simple root vector: π(g) = (1/c)[π(x_s), π(k)] with [x_s, k] = c·g.
        let raising = g.i < g.j;
        let target = self.roots.root(g);
        for (s, &e) in self.simple.iter().enumerate() {
            let x = if raising { e } else { e.transpose() };
            let xr = &self.simple_roots[s];
            let needed: Vec<i32> = target
                .iter()
                .zip(xr)
                .map(|(t, a)| if raising { t - a } else { t + a })
                .collect();
            for k in self.roots.generators() {
                if (k.i < k.j) != raising || self.roots.root(k) != needed {
                    continue;
                }
                let br = self.roots.bracket(x, k);
                if let [(h, c)] = br.as_slice() {
                    if *h == g && !c.is_zero() {
                        let px = self.canonical_operator(x)?;
                        let pk = self.canonical_operator(k)?;
                        return Ok(px.commutator(&pk).scale(&c.recip()));
                    }
                }
            }
        }
        Err(ModuleError::Unreachable(g))
    }

    fn assemble(&self, s: usize, raising: bool) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.dim, self.dim);
        for (idx, sp) in self.spaces.iter().enumerate() {
            let Some(parent) = self.parent_space(sp, s) else {
                continue;
            };
            let f = &self.lower_blocks[&(s, idx)];
            if raising {
                let e = &self.raise_blocks[&(s, idx)];
                for r in 0..e.rows {
                    for c in 0..e.cols {
                        out.add_to(parent.offset + r, sp.offset + c, e.get(r, c));
                    }
                }
            } else {
                for r in 0..f.rows {
                    for c in 0..f.cols {
                        out.add_to(sp.offset + r, parent.offset + c, f.get(r, c));
                    }
                }
            }
        }
        out
    }

    /// Unit vector of the highest weight.
    pub fn top_vector(&self) -> SparseVec {
        SparseVec::from([(0, Rational::one())])
    }
}

fn submatrix(m: &DenseMatrix, rows: &[usize], cols: &[usize]) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(rows.len(), cols.len());
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            out.set(a, b, m.get(r, c).clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{DominantWeight, Family};
    use crate::oracle::{freudenthal, weyl_dim, WeightVector};

    fn build(f: Family, n: usize, hw: &str) -> HwModule {
        let label = AlgebraLabel::new(f, n).unwrap();
        let w = DominantWeight::parse(&label, hw).unwrap();
        HwModule::new(label, w.components()).unwrap()
    }

    fn check_brackets(m: &HwModule) {
        let gens = m.root_system().generators();
        for &a in &gens {
            for &b in &gens {
                let lhs = m.operator(a).unwrap().commutator(&m.operator(b).unwrap());
                let mut rhs = SparseMatrix::zeros(m.dim(), m.dim());
                for (g, c) in m.root_system().bracket(a, b) {
                    rhs = rhs.add(&m.operator(g).unwrap().scale(&c));
                }
                assert_eq!(lhs, rhs, "[{a}, {b}] in {}", m.label);
            }
        }
    }

    #[test]
    fn dimensions_and_multiplicities_match_oracles() {
        for (f, n, hw) in [
            (Family::B, 1, "1"),
            (Family::B, 1, "1/2"),
            (Family::B, 2, "1,0"),
            (Family::B, 2, "3/2,1/2"),
            (Family::C, 2, "2,1"),
            (Family::D, 2, "1,-1"),
            (Family::D, 3, "1,1,-1"),
            (Family::B, 3, "1,1,0"),
            (Family::C, 3, "1,1,0"),
        ] {
            let m = build(f, n, hw);
            let label = m.label;
            let w = DominantWeight::parse(&label, hw).unwrap();
            assert_eq!(m.dim() as u64, weyl_dim(&label, &w).unwrap(), "{label} {hw}");
            let mults = freudenthal(&label, &w).unwrap();
            for sp in m.spaces() {
                let key = WeightVector(sp.weight.clone());
                assert_eq!(mults.get(&key).copied(), Some(sp.dim() as u64));
            }
        }
    }

    #[test]
    fn commutation_relations_hold_exactly() {
        check_brackets(&build(Family::B, 2, "1,1"));
        check_brackets(&build(Family::C, 2, "1,0"));
        check_brackets(&build(Family::D, 3, "1,0,0"));
        check_brackets(&build(Family::B, 2, "1/2,1/2"));
    }

    #[test]
    fn transpose_generators_are_adjoint() {
        let m = build(Family::C, 2, "2,1");
        for g in m.root_system().generators() {
            let a = m.operator(g).unwrap();
            let b = m.operator(g.transpose()).unwrap();
            for x in 0..m.dim() {
                for y in 0..m.dim() {
                    let ex = SparseVec::from([(x, rat(1))]);
                    let ey = SparseVec::from([(y, rat(1))]);
                    let lhs = m.inner(&a.apply_sparse(&ex), &ey);
                    let rhs = m.inner(&ex, &b.apply_sparse(&ey));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
