//! Representation-theoretic oracles: Weyl dimension, Freudenthal weight
//! multiplicities, the quadratic Casimir eigenvalue and the decomposition of
//! `V(std) ⊗ V(λ)`.
//!
//! Everything here works in the orthonormal `ε` coordinates with the Euclidean
//! form and shares no code with the pattern or action modules.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraLabel, DominantWeight, Family};
use crate::numeric::{format_rational, rat, Rational};

/// Oracle failures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("character arithmetic left a negative multiplicity at {0}")]
    NegativeMultiplicity(String),
}

/// A weight in `ε` coordinates `[Δ_{-n}, …, Δ_{-1}]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightVector(pub Vec<Rational>);

impl WeightVector {
    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self(v.iter().map(|&x| rat(x)).collect())
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Weight multiplicities of an irreducible module.
pub type WeightMultiplicities = BTreeMap<WeightVector, u64>;

fn unit(n: usize, i: usize, scale: i64) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = rat(scale);
    v
}

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn inner(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive roots in `ε` coordinates.
pub fn positive_roots(label: &AlgebraLabel) -> Vec<Vec<Rational>> {
    let n = label.rank;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(sub(&unit(n, i, 1), &unit(n, j, 1)));
            if label.family != Family::A {
                out.push(add(&unit(n, i, 1), &unit(n, j, 1)));
            }
        }
        match label.family {
            Family::B => out.push(unit(n, i, 1)),
            Family::C => out.push(unit(n, i, 2)),
            _ => {}
        }
    }
    out
}

/// Simple roots in `ε` coordinates, most dominant first.
pub fn simple_roots(label: &AlgebraLabel) -> Vec<Vec<Rational>> {
    let n = label.rank;
    let mut out: Vec<Vec<Rational>> = (0..n.saturating_sub(1))
        .map(|i| sub(&unit(n, i, 1), &unit(n, i + 1, 1)))
        .collect();
    match label.family {
        Family::A => {}
        Family::B => out.push(unit(n, n - 1, 1)),
        Family::C => out.push(unit(n, n - 1, 2)),
        Family::D => out.push(add(&unit(n, n - 2, 1), &unit(n, n - 1, 1))),
    }
    out
}

/// Half the sum of positive roots.
pub fn rho(label: &AlgebraLabel) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); label.rank];
    for r in positive_roots(label) {
        acc = add(&acc, &r);
    }
    acc.into_iter().map(|x| x / rat(2)).collect()
}

fn checked(label: &AlgebraLabel, hw: &DominantWeight) -> Result<Vec<Rational>, OracleError> {
    Ok(DominantWeight::new(label, hw.components().to_vec())?
        .components()
        .to_vec())
}

/// Weyl dimension formula `Π_{α>0} ⟨λ+ρ, α⟩ / ⟨ρ, α⟩`.
pub fn weyl_dim(label: &AlgebraLabel, hw: &DominantWeight) -> Result<u64, OracleError> {
    let lam = checked(label, hw)?;
    let r = rho(label);
    let shifted = add(&lam, &r);
    let mut acc = Rational::one();
    for a in positive_roots(label) {
        acc *= inner(&shifted, &a) / inner(&r, &a);
    }
    Ok(acc.to_integer().to_u64().expect("dimension fits in u64"))
}

/// Quadratic Casimir eigenvalue `⟨λ, λ+2ρ⟩` for the Euclidean form.
pub fn casimir_eigenvalue(label: &AlgebraLabel, hw: &DominantWeight) -> Result<Rational, OracleError> {
    let lam = checked(label, hw)?;
    let two_rho: Vec<Rational> = rho(label).into_iter().map(|x| x * rat(2)).collect();
    Ok(inner(&lam, &add(&lam, &two_rho)))
}

/// Dominant Weyl-group representative of a weight.
pub fn dominant_representative(label: &AlgebraLabel, w: &[Rational]) -> Vec<Rational> {
    let mut v: Vec<Rational> = match label.family {
        Family::A => w.to_vec(),
        _ => w.iter().map(|x| x.abs()).collect(),
    };
    v.sort_by(|a, b| b.cmp(a));
    if label.family == Family::D {
        let negatives = w.iter().filter(|x| x.is_negative()).count();
        let has_zero = w.iter().any(|x| x.is_zero());
        if negatives % 2 == 1 && !has_zero {
            let last = v.len() - 1;
            v[last] = -v[last].clone();
        }
    }
    v
}

/// Whether `diff` is a nonnegative integer combination of simple roots.
pub fn in_positive_root_cone(label: &AlgebraLabel, diff: &[Rational]) -> bool {
    let n = diff.len();
    let nonneg_int = |q: &Rational| q.is_integer() && !q.is_negative();
    let partial: Vec<Rational> = diff
        .iter()
        .scan(Rational::zero(), |s, x| {
            *s += x;
            Some(s.clone())
        })
        .collect();
    match label.family {
        Family::A => partial[..n - 1].iter().all(nonneg_int) && partial[n - 1].is_zero(),
        Family::B => partial.iter().all(nonneg_int),
        Family::C => {
            partial[..n - 1].iter().all(nonneg_int) && nonneg_int(&(&partial[n - 1] / rat(2)))
        }
        Family::D => {
            if n < 2 {
                return diff[0].is_zero();
            }
            let head_ok = partial[..n - 2].iter().all(nonneg_int);
            let last = &partial[n - 1] / rat(2);
            let before = (&partial[n - 2] - &diff[n - 1]) / rat(2);
            head_ok && nonneg_int(&last) && nonneg_int(&before)
        }
    }
}

type MemoKey = (AlgebraLabel, Vec<Rational>);

fn memo() -> &'static RwLock<HashMap<MemoKey, Arc<WeightMultiplicities>>> {
    static TABLE: OnceLock<RwLock<HashMap<MemoKey, Arc<WeightMultiplicities>>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Full weight-multiplicity map of `V(λ)` by Freudenthal's recursion; memoized.
pub fn freudenthal(label: &AlgebraLabel, hw: &DominantWeight) -> Result<Arc<WeightMultiplicities>, OracleError> {
    let lam = checked(label, hw)?;
    let key = (*label, lam.clone());
    if let Some(hit) = memo().read().expect("memo lock").get(&key) {
        return Ok(hit.clone());
    }
    let computed = Arc::new(freudenthal_uncached(label, &lam));
    let mut table = memo().write().expect("memo lock");
    Ok(table.entry(key).or_insert(computed).clone())
}

fn freudenthal_uncached(label: &AlgebraLabel, lam: &[Rational]) -> WeightMultiplicities {
    let simple = simple_roots(label);
    let positive = positive_roots(label);
    let r = rho(label);

    // Weights are reachable from λ by simple-root steps; a lattice point is a
    // weight iff its dominant representative lies below λ.
    let mut seen: HashSet<Vec<Rational>> = HashSet::from([lam.to_vec()]);
    let mut queue = VecDeque::from([lam.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for a in &simple {
            let v = sub(&w, a);
            if seen.contains(&v) {
                continue;
            }
            let d = dominant_representative(label, &v);
            if in_positive_root_cone(label, &sub(lam, &d)) {
                seen.insert(v.clone());
                queue.push_back(v);
            }
        }
    }

    let mut order: Vec<Vec<Rational>> = seen.into_iter().collect();
    order.sort_by(|a, b| inner(b, &r).cmp(&inner(a, &r)).then_with(|| b.cmp(a)));
    let top_height = inner(lam, &r);
    let lr = add(lam, &r);
    let norm_top = inner(&lr, &lr);
    let mut mult: HashMap<Vec<Rational>, Rational> = HashMap::new();
    for w in order {
        if w == lam {
            mult.insert(w, Rational::one());
            continue;
        }
        let wr = add(&w, &r);
        let den = &norm_top - inner(&wr, &wr);
        let mut acc = Rational::zero();
        for a in &positive {
            let mut v = add(&w, a);
            while inner(&v, &r) <= top_height {
                if let Some(m) = mult.get(&v) {
                    acc += m * inner(&v, a);
                }
                v = add(&v, a);
            }
        }
        let m = if den.is_zero() {
            Rational::zero()
        } else {
            acc * rat(2) / den
        };
        mult.insert(w, m);
    }
    mult.into_iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(w, m)| {
            let count = m.to_integer().to_u64().expect("multiplicity is a nonnegative integer");
            (WeightVector(w), count)
        })
        .collect()
}

/// Decomposition of `V(std) ⊗ V(λ)` as highest weight ↦ multiplicity, by
/// peeling irreducible characters off the product character.
pub fn tensor_with_standard(
    label: &AlgebraLabel,
    hw: &DominantWeight,
) -> Result<BTreeMap<DominantWeight, u64>, OracleError> {
    let std_chars = freudenthal(label, &DominantWeight::standard(label))?;
    let lam_chars = freudenthal(label, hw)?;
    let mut product: BTreeMap<Vec<Rational>, i64> = BTreeMap::new();
    for (a, ma) in std_chars.iter() {
        for (b, mb) in lam_chars.iter() {
            *product.entry(add(&a.0, &b.0)).or_insert(0) += (ma * mb) as i64;
        }
    }
    let r = rho(label);
    let mut out = BTreeMap::new();
    loop {
        product.retain(|_, m| *m != 0);
        if let Some((w, m)) = product.iter().find(|(_, m)| **m < 0) {
            return Err(OracleError::NegativeMultiplicity(format!(
                "{} ({m})",
                WeightVector(w.clone())
            )));
        }
        let Some(top) = product.keys().max_by(|a, b| inner(a, &r).cmp(&inner(b, &r)).then_with(|| a.cmp(b))).cloned()
        else {
            break;
        };
        let count = product[&top];
        let dw = DominantWeight::new(label, top)?;
        for (w, m) in freudenthal(label, &dw)?.iter() {
            *product.entry(w.0.clone()).or_insert(0) -= count * (*m as i64);
        }
        *out.entry(dw).or_insert(0) += count as u64;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ratio;

    fn lab(f: Family, n: usize) -> AlgebraLabel {
        AlgebraLabel::new(f, n).unwrap()
    }

    fn hw(l: &AlgebraLabel, s: &str) -> DominantWeight {
        DominantWeight::parse(l, s).unwrap()
    }

    #[test]
    fn weyl_dimension_examples() {
        let b2 = lab(Family::B, 2);
        assert_eq!(weyl_dim(&b2, &hw(&b2, "1,0")).unwrap(), 5);
        assert_eq!(weyl_dim(&b2, &hw(&b2, "1/2,1/2")).unwrap(), 4);
        let c2 = lab(Family::C, 2);
        assert_eq!(weyl_dim(&c2, &hw(&c2, "1,0")).unwrap(), 4);
        assert_eq!(weyl_dim(&c2, &hw(&c2, "1,1")).unwrap(), 5);
        let d3 = lab(Family::D, 3);
        assert_eq!(weyl_dim(&d3, &hw(&d3, "1,1,0")).unwrap(), 15);
        let a3 = lab(Family::A, 3);
        assert_eq!(weyl_dim(&a3, &hw(&a3, "2,1,0")).unwrap(), 8);
        for l in [b2, c2, d3, a3] {
            assert_eq!(weyl_dim(&l, &DominantWeight::zero(&l)).unwrap(), 1);
        }
    }

    #[test]
    fn freudenthal_examples() {
        let b1 = lab(Family::B, 1);
        let m = freudenthal(&b1, &hw(&b1, "1")).unwrap();
        let expect: WeightMultiplicities = [1, 0, -1]
            .iter()
            .map(|&x| (WeightVector::from_ints(&[x]), 1))
            .collect();
        assert_eq!(*m, expect);
        let d2 = lab(Family::D, 2);
        let m = freudenthal(&d2, &hw(&d2, "1,0")).unwrap();
        let expect: WeightMultiplicities = [[1, 0], [-1, 0], [0, 1], [0, -1]]
            .iter()
            .map(|x| (WeightVector::from_ints(x), 1))
            .collect();
        assert_eq!(*m, expect);
        let b2 = lab(Family::B, 2);
        let adj = freudenthal(&b2, &hw(&b2, "1,1")).unwrap();
        assert_eq!(adj[&WeightVector::from_ints(&[0, 0])], 2);
    }

    #[test]
    fn multiplicities_sum_to_dimension() {
        for (f, n, s) in [
            (Family::B, 3, "1,1,1"),
            (Family::B, 3, "3/2,1/2,1/2"),
            (Family::C, 3, "2,1,0"),
            (Family::D, 3, "1,1,-1"),
            (Family::D, 4, "1,1,0,0"),
            (Family::A, 3, "2,1,0"),
        ] {
            let l = lab(f, n);
            let w = hw(&l, s);
            let total: u64 = freudenthal(&l, &w).unwrap().values().sum();
            assert_eq!(total, weyl_dim(&l, &w).unwrap(), "{l} {s}");
        }
    }

    #[test]
    fn casimir_examples() {
        let b2 = lab(Family::B, 2);
        assert_eq!(casimir_eigenvalue(&b2, &hw(&b2, "1,0")).unwrap(), rat(4));
        let c2 = lab(Family::C, 2);
        assert_eq!(casimir_eigenvalue(&c2, &hw(&c2, "1,0")).unwrap(), rat(5));
        assert_eq!(casimir_eigenvalue(&c2, &DominantWeight::zero(&c2)).unwrap(), rat(0));
        assert_eq!(rho(&b2), vec![ratio(3, 2), ratio(1, 2)]);
    }

    #[test]
    fn tensor_products_balance() {
        let c2 = lab(Family::C, 2);
        let t = tensor_with_standard(&c2, &DominantWeight::zero(&c2)).unwrap();
        assert_eq!(t.into_iter().collect::<Vec<_>>(), vec![(hw(&c2, "1,0"), 1)]);
        let b2 = lab(Family::B, 2);
        let t = tensor_with_standard(&b2, &hw(&b2, "1,0")).unwrap();
        let expect: BTreeMap<DominantWeight, u64> = ["2,0", "1,1", "0,0"]
            .iter()
            .map(|s| (hw(&b2, s), 1))
            .collect();
        assert_eq!(t, expect);
        for (f, n, s) in [(Family::D, 2, "1,1"), (Family::B, 3, "1,1,0"), (Family::D, 3, "1,1,-1"), (Family::B, 2, "1,1")] {
            let l = lab(f, n);
            let w = hw(&l, s);
            let t = tensor_with_standard(&l, &w).unwrap();
            let total: u64 = t.iter().map(|(k, m)| m * weyl_dim(&l, k).unwrap()).sum();
            let std = weyl_dim(&l, &DominantWeight::standard(&l)).unwrap();
            assert_eq!(total, std * weyl_dim(&l, &w).unwrap());
            let std_weights = freudenthal(&l, &DominantWeight::standard(&l)).unwrap();
            for k in t.keys() {
                let delta = WeightVector(sub(k.components(), w.components()));
                assert!(std_weights.contains_key(&delta), "{l} {s} -> {k}");
            }
        }
    }
}
