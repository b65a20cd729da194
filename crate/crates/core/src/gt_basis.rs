//! Gelfand–Tsetlin basis vectors inside the exact highest-weight module.
//!
//! At rank `n ≥ 2` the patterns are grouped by their top level and level `n−1`
//! row: each group labels one irreducible `g_{n−1}` summand with highest weight
//! equal to the level `n−1` row. The `g_{n−1}` highest vectors of a given full
//! weight span the common kernel of the embedded simple raising operators; an
//! orthogonal basis of that kernel is assigned to the groups in pattern order.
//! The `g_{n−1}` basis, built recursively, is transported into each summand by
//! replaying its lowering recipes. At rank 1 all weight multiplicities are 1
//! and the basis is the weight basis.
//!
//! Distinct summands are orthogonal for the invariant form, so the normalized
//! vectors form an orthonormal basis.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraLabel, DominantWeight, Family, GeneratorId, RootSystem};
use crate::hwmodule::{HwModule, ModuleError, Recipe};
use crate::linalg::{sparse_axpy, DenseMatrix, SparseVec};
use crate::numeric::Rational;
use crate::pattern::{enumerate, BcdPattern, PatternError};

#[derive(Debug, Error)]
pub enum BasisError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("the A series has no B/C/D Gelfand–Tsetlin basis")]
    Unsupported,
    #[error("integrity failure: {0}")]
    Integrity(String),
}

/// One irreducible `g_{n−1}` summand.
#[derive(Clone, Debug)]
pub struct Summand {
    /// Level `n` primed row.
    pub primed: Vec<Rational>,
    /// Level `n` σ; 0 outside the B series.
    pub sigma: u8,
    /// Highest weight of the summand: the level `n−1` row.
    pub sub_weight: Vec<Rational>,
    /// Full weight of the highest vector.
    pub weight: Vec<Rational>,
    /// Its highest vector in the module's weight basis, unnormalized.
    pub highest: SparseVec,
    pub norm: Rational,
}

/// Orthogonal Gelfand–Tsetlin basis of one irreducible module.
#[derive(Debug)]
pub struct GtBasis {
    pub label: AlgebraLabel,
    pub highest_weight: Vec<Rational>,
    pub module: Arc<HwModule>,
    /// Patterns in pattern order; basis index = position.
    pub patterns: Vec<BcdPattern>,
    /// Unnormalized basis vectors in the module's weight basis.
    pub vectors: Vec<SparseVec>,
    /// Squared norms of `vectors`.
    pub norms: Vec<Rational>,
    /// Summands at rank ≥ 2; empty at rank 1.
    pub summands: Vec<Summand>,
    /// Summand of each pattern, and its index in that summand's `g_{n−1}` basis.
    pub placement: Vec<(usize, usize)>,
    index: HashMap<BcdPattern, usize>,
}

type CacheKey = (AlgebraLabel, Vec<Rational>);

fn cache() -> &'static RwLock<HashMap<CacheKey, Arc<GtBasis>>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Arc<GtBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized basis for `(label, hw)`; `hw` must be dominant for `label`.
pub fn gt_basis(label: AlgebraLabel, hw: &[Rational]) -> Result<Arc<GtBasis>, BasisError> {
    let key = (label, hw.to_vec());
    if let Some(b) = cache().read().expect("lock").get(&key) {
        return Ok(b.clone());
    }
    let built = Arc::new(GtBasis::build(label, hw)?);
    cache().write().expect("lock").insert(key, built.clone());
    Ok(built)
}

impl GtBasis {
    fn build(label: AlgebraLabel, hw: &[Rational]) -> Result<Self, BasisError> {
        if label.family == Family::A {
            return Err(BasisError::Unsupported);
        }
        let dominant = DominantWeight::new(&label, hw.to_vec())?;
        let module = Arc::new(HwModule::new(label, hw)?);
        let patterns = enumerate(&label, &dominant)?;
        if patterns.len() != module.dim() {
            return Err(BasisError::Integrity(format!(
                "{} patterns but module dimension {}",
                patterns.len(),
                module.dim()
            )));
        }
        let index: HashMap<BcdPattern, usize> =
            patterns.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut basis = Self {
            label,
            highest_weight: hw.to_vec(),
            module,
            patterns,
            vectors: Vec::new(),
            norms: Vec::new(),
            summands: Vec::new(),
            placement: Vec::new(),
            index,
        };
        if label.rank == 1 {
            basis.build_rank_one()?;
        } else {
            basis.build_recursive()?;
        }
        Ok(basis)
    }

    fn build_rank_one(&mut self) -> Result<(), BasisError> {
        for p in &self.patterns {
            let w = p.weight_unchecked();
            let sp = self
                .module
                .space_of_weight(w.components())
                .filter(|sp| sp.dim() == 1)
                .ok_or_else(|| BasisError::Integrity(format!("weight {w} is not a simple weight")))?;
            self.vectors.push(SparseVec::from([(sp.offset, Rational::from_integer(1.into()))]));
            self.norms.push(sp.gram.get(0, 0).clone());
        }
        Ok(())
    }

    fn build_recursive(&mut self) -> Result<(), BasisError> {
        let n = self.label.rank;
        let sub_label = self.label.subalgebra().expect("rank ≥ 2");
        // Summand key (primed row n, σ_n, row n−1) in order of first appearance.
        let mut keys: Vec<(Vec<Rational>, u8, Vec<Rational>)> = Vec::new();
        let mut pattern_summand = Vec::with_capacity(self.patterns.len());
        for p in &self.patterns {
            let top = p.level(n);
            let key = (top.primed.clone(), top.sigma, p.level(n - 1).row.clone());
            if keys.last() != Some(&key) {
                keys.push(key);
            }
            pattern_summand.push(keys.len() - 1);
        }
        let first_pattern: Vec<usize> = (0..keys.len())
            .map(|g| pattern_summand.iter().position(|&x| x == g).expect("nonempty"))
            .collect();
        let full_weight = |g: usize| -> Vec<Rational> {
            let p = &self.patterns[first_pattern[g]];
            let mut nu = keys[g].2.clone();
            nu.push(p.weight_unchecked().components()[n - 1].clone());
            nu
        };
        // Embedded simple generators of g_{n−1}.
        let sub_module_gens = RootSystem::new(sub_label).simple_raising();
        let embed = |g: GeneratorId| {
            GeneratorId::new(AlgebraLabel::embed_coord(g.i), AlgebraLabel::embed_coord(g.j))
        };
        let raising_ops = sub_module_gens
            .iter()
            .map(|&g| self.module.operator(embed(g)))
            .collect::<Result<Vec<_>, _>>()?;
        let lowering_ops = sub_module_gens
            .iter()
            .map(|&g| self.module.operator(embed(g.transpose())))
            .collect::<Result<Vec<_>, _>>()?;

        let mut by_weight: HashMap<Vec<Rational>, Vec<usize>> = HashMap::new();
        let weights: Vec<Vec<Rational>> = (0..keys.len()).map(full_weight).collect();
        for (g, nu) in weights.iter().enumerate() {
            by_weight.entry(nu.clone()).or_default().push(g);
        }
        let mut highest: Vec<Option<SparseVec>> = vec![None; keys.len()];
        for (nu, groups) in &by_weight {
            let sp = self
                .module
                .space_of_weight(nu)
                .ok_or_else(|| BasisError::Integrity(format!("no weight space for summand weight {nu:?}")))?;
            // Stack the raising operators restricted to this weight space.
            let mut rows: Vec<Vec<Rational>> = Vec::new();
            for op in &raising_ops {
                let mut block: HashMap<usize, Vec<Rational>> = HashMap::new();
                for c in 0..sp.dim() {
                    for (&r, v) in &op.columns[sp.offset + c] {
                        block.entry(r).or_insert_with(|| vec![Rational::zero(); sp.dim()])[c] = v.clone();
                    }
                }
                rows.extend(block.into_values());
            }
            let kernel = if rows.is_empty() {
                (0..sp.dim())
                    .map(|k| {
                        let mut v = vec![Rational::zero(); sp.dim()];
                        v[k] = Rational::from_integer(1.into());
                        v
                    })
                    .collect()
            } else {
                let mut m = DenseMatrix::zeros(rows.len(), sp.dim());
                for (r, row) in rows.into_iter().enumerate() {
                    for (c, v) in row.into_iter().enumerate() {
                        m.set(r, c, v);
                    }
                }
                m.null_space()
            };
            if kernel.len() != groups.len() {
                return Err(BasisError::Integrity(format!(
                    "weight {nu:?}: {} highest vectors for {} summands",
                    kernel.len(),
                    groups.len()
                )));
            }
            // Gram–Schmidt in the contravariant form.
            let mut ortho: Vec<Vec<Rational>> = Vec::new();
            let mut ortho_norms: Vec<Rational> = Vec::new();
            for v in kernel {
                let mut u = v.clone();
                for (w, r) in ortho.iter().zip(&ortho_norms) {
                    let c = crate::linalg::form(&sp.gram, &v, w) / r;
                    crate::linalg::axpy(&mut u, &-c, w);
                }
                let r = crate::linalg::form(&sp.gram, &u, &u);
                ortho.push(u);
                ortho_norms.push(r);
            }
            let mut sorted = groups.clone();
            sorted.sort_unstable();
            for (g, u) in sorted.into_iter().zip(ortho) {
                let v: SparseVec = u
                    .into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(k, x)| (sp.offset + k, x))
                    .collect();
                highest[g] = Some(v);
            }
        }

        self.vectors = vec![SparseVec::new(); self.patterns.len()];
        self.norms = vec![Rational::zero(); self.patterns.len()];
        self.placement = vec![(0, 0); self.patterns.len()];
        for (g, key) in keys.iter().enumerate() {
            let h = highest[g].take().expect("assigned above");
            let norm = self.module.inner(&h, &h);
            let sub = gt_basis(sub_label, &key.2)?;
            // Transport the sub-module weight basis into this summand.
            let sub_mod = &sub.module;
            let mut image: Vec<SparseVec> = Vec::with_capacity(sub_mod.dim());
            for sp in sub_mod.spaces() {
                for recipe in &sp.recipes {
                    let v = match *recipe {
                        Recipe::Top => h.clone(),
                        Recipe::Lower { simple, parent } => {
                            let ps = sub_mod.parent_space(sp, simple).expect("recipe parent");
                            lowering_ops[simple].apply_sparse(&image[ps.offset + parent])
                        }
                    };
                    image.push(v);
                }
            }
            for (pi, p) in self.patterns.iter().enumerate() {
                if pattern_summand[pi] != g {
                    continue;
                }
                let q = sub.index_of(&p.sub_pattern(n - 1)).ok_or_else(|| {
                    BasisError::Integrity(format!("sub-pattern of pattern {pi} not in the g_{{n-1}} basis"))
                })?;
                let mut w = SparseVec::new();
                for (&k, c) in &sub.vectors[q] {
                    sparse_axpy(&mut w, c, &image[k]);
                }
                self.vectors[pi] = w;
                self.norms[pi] = &norm * &sub.norms[q];
                self.placement[pi] = (g, q);
            }
            self.summands.push(Summand {
                primed: key.0.clone(),
                sigma: key.1,
                sub_weight: key.2.clone(),
                weight: weights[g].clone(),
                highest: h,
                norm,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.patterns.len()
    }

    pub fn index_of(&self, p: &BcdPattern) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// The `g_{n−1}` basis of summand `s`.
    pub fn sub_basis(&self, s: usize) -> Result<Arc<GtBasis>, BasisError> {
        let sub_label = self
            .label
            .subalgebra()
            .ok_or_else(|| BasisError::Integrity("rank-1 basis has no summands".into()))?;
        gt_basis(sub_label, &self.summands[s].sub_weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_rational;

    fn basis(f: Family, n: usize, hw: &str) -> Arc<GtBasis> {
        let label = AlgebraLabel::new(f, n).unwrap();
        let w: Vec<Rational> = hw.split(',').map(|s| parse_rational(s).unwrap()).collect();
        gt_basis(label, &w).unwrap()
    }

    fn assert_orthogonal(b: &GtBasis) {
        for i in 0..b.dim() {
            assert_eq!(b.module.inner(&b.vectors[i], &b.vectors[i]), b.norms[i]);
            assert!(b.norms[i] > Rational::zero());
            for j in 0..i {
                assert!(b.module.inner(&b.vectors[i], &b.vectors[j]).is_zero(), "{i},{j}");
            }
        }
    }

    #[test]
    fn bases_are_orthogonal_with_pattern_weights() {
        for (f, n, hw) in [
            (Family::B, 2, "1,0"),
            (Family::B, 2, "2,1"),
            (Family::B, 2, "3/2,1/2"),
            (Family::C, 2, "2,1"),
            (Family::D, 2, "1,-1"),
            (Family::D, 3, "1,1,-1"),
            (Family::B, 3, "1,1,0"),
            (Family::C, 3, "1,1,0"),
        ] {
            let b = basis(f, n, hw);
            assert_orthogonal(&b);
            for (p, v) in b.patterns.iter().zip(&b.vectors) {
                let (&first, _) = v.iter().next().unwrap();
                let sp = b.module.space_of_index(first);
                assert_eq!(&sp.weight, p.weight_unchecked().components(), "{f:?}{n} {hw}");
                assert!(v.keys().all(|&k| k >= sp.offset && k < sp.offset + sp.dim()));
            }
        }
    }

    #[test]
    fn summand_highest_vectors_are_annihilated() {
        let b = basis(Family::B, 3, "1,1,0");
        let sub = b.label.subalgebra().unwrap();
        for g in RootSystem::new(sub).simple_raising() {
            let e = GeneratorId::new(AlgebraLabel::embed_coord(g.i), AlgebraLabel::embed_coord(g.j));
            let op = b.module.operator(e).unwrap();
            for s in &b.summands {
                assert!(op.apply_sparse(&s.highest).is_empty());
            }
        }
    }
}
