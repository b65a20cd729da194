//! Reduced matrix elements of the chain tensor operators `F_{a,j}`.
//!
//! For `a ∈ {−1, 0, 1}` and `j` a `g_{n−1}` coordinate, the operators `F_{a,j}`
//! transform under `g_{n−1}` as the standard representation, the component
//! being the standard coordinate `−(j − sign j)` of `g_{n−1}`. Between two
//! `g_{n−1}` summands their matrix elements factor as a reduced element times
//! a fundamental Wigner coefficient of `g_{n−1}`; this module extracts the
//! reduced elements, checks the factorization entrywise, and evaluates the
//! closed-form rank-2 values given by the `gl_3` kernel.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::action::{ActionError, AlgMatrix, Representation};
use crate::algebra::{AlgebraLabel, DominantWeight, Family, GeneratorId};
use crate::pattern::max_pattern;
use crate::gl_kernel::{red_me, red_wigner, GlRowPair, KernelError};
use crate::gt_basis::{BasisError, GtBasis};
use crate::numeric::{rat, AlgebraicValue, NumericError, Rational};
use crate::wigner::{build_intertwiner, WignerError, WignerTable};

#[derive(Debug, Error)]
pub enum ReducedError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Wigner(#[from] WignerError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("{0} is not a chain tensor operator of {1}")]
    NotTensorOperator(GeneratorId, AlgebraLabel),
}

/// Standard coordinate of `g_{n−1}` carried by `F_{a,j}`.
pub fn tensor_component(label: &AlgebraLabel, g: GeneratorId) -> Result<i32, ReducedError> {
    let ok = label.rank >= 2 && g.i.abs() <= 1 && g.j.abs() >= 2 && label.position(g.i).is_ok();
    if !ok || label.position(g.j).is_err() {
        return Err(ReducedError::NotTensorOperator(g, *label));
    }
    Ok(-(g.j - g.j.signum()))
}

/// Factorization data of one chain tensor operator.
#[derive(Clone, Debug)]
pub struct ReducedElements {
    pub generator: GeneratorId,
    /// `(bar summand, ket summand)` ↦ reduced element; zero pairs omitted.
    pub values: BTreeMap<(usize, usize), AlgebraicValue>,
    /// Entries `(bar pattern, ket pattern)` that break the factorization.
    pub violations: Vec<(usize, usize)>,
    /// `(bar summand, ket summand)` ↦ the maximal-pattern matrix element, when
    /// the maximal patterns are connected by the operator's weight.
    pub max_elements: BTreeMap<(usize, usize), AlgebraicValue>,
    /// `(bar summand, ket summand)` ↦ reduced element derived from the
    /// non-maximal entries only.
    pub non_max_values: BTreeMap<(usize, usize), AlgebraicValue>,
}

/// Wigner tables of `g_{n−1}` keyed by `(sub highest weight, shift)`.
#[derive(Default)]
pub struct TableCache {
    tables: HashMap<(AlgebraLabel, Vec<Rational>, i32), Option<Arc<WignerTable>>>,
}

impl TableCache {
    /// The table for `λ → λ + δ(shift)`, or `None` when not a constituent.
    pub fn get(&mut self, label: AlgebraLabel, hw: &[Rational], shift: i32) -> Result<Option<Arc<WignerTable>>, ReducedError> {
        let key = (label, hw.to_vec(), shift);
        if let Some(t) = self.tables.get(&key) {
            return Ok(t.clone());
        }
        let t = match build_intertwiner(label, hw, shift) {
            Ok(t) => Some(Arc::new(t)),
            Err(WignerError::NotConstituent(_)) => None,
            Err(e) => return Err(e.into()),
        };
        self.tables.insert(key, t.clone());
        Ok(t)
    }
}

fn shift_between(sub: &AlgebraLabel, from: &[Rational], to: &[Rational]) -> Option<i32> {
    let d: Vec<Rational> = to.iter().zip(from).map(|(a, b)| a - b).collect();
    sub.coord_of_weight(&d)
}

fn max_index(sub: &GtBasis) -> Result<usize, ReducedError> {
    let hw = DominantWeight::new(&sub.label, sub.highest_weight.clone()).map_err(WignerError::from)?;
    let top = max_pattern(&sub.label, &hw).map_err(WignerError::from)?;
    sub.index_of(&top)
        .ok_or_else(|| WignerError::Integrity("maximal pattern missing".into()).into())
}

/// Extracts reduced elements of `F_{a,j}` and checks the factorization.
pub fn reduced_elements(rep: &Representation, g: GeneratorId, cache: &mut TableCache) -> Result<ReducedElements, ReducedError> {
    let label = rep.label();
    let comp = tensor_component(&label, g)?;
    let sub_label = label.subalgebra().expect("rank ≥ 2");
    let basis = &rep.basis;
    let m = rep.matrix(g)?;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); basis.summands.len()];
    for (p, &(s, _)) in basis.placement.iter().enumerate() {
        members[s].push(p);
    }
    let mut out = ReducedElements {
        generator: g,
        values: BTreeMap::new(),
        violations: Vec::new(),
        max_elements: BTreeMap::new(),
        non_max_values: BTreeMap::new(),
    };
    for (sb, bar) in basis.summands.iter().enumerate() {
        for (sk, ket) in basis.summands.iter().enumerate() {
            let table = match shift_between(&sub_label, &ket.sub_weight, &bar.sub_weight) {
                Some(shift) => cache.get(sub_label, &ket.sub_weight, shift)?,
                None => None,
            };
            let sub_bar = basis.sub_basis(sb)?;
            let sub_ket = basis.sub_basis(sk)?;
            let (bar_max, ket_max) = (max_index(&sub_bar)?, max_index(&sub_ket)?);
            let mut reduced: Option<AlgebraicValue> = None;
            let mut non_max: Option<AlgebraicValue> = None;
            let mut consistent = true;
            let mut pending_zero: Vec<(usize, usize)> = Vec::new();
            for &pb in &members[sb] {
                for &pk in &members[sk] {
                    let entry = m.get(pb, pk);
                    let (qb, qk) = (basis.placement[pb].1, basis.placement[pk].1);
                    let w = table.as_ref().map(|t| t.get(qb, comp, qk)).unwrap_or_default();
                    let is_max = qb == bar_max && qk == ket_max;
                    if is_max && !w.is_zero() {
                        out.max_elements.insert((sb, sk), entry.clone());
                    }
                    if w.is_zero() {
                        if !entry.is_zero() {
                            out.violations.push((pb, pk));
                        }
                        continue;
                    }
                    let r = entry.div_single(&w)?;
                    if !is_max {
                        match &non_max {
                            None => non_max = Some(r.clone()),
                            Some(v) if *v != r => consistent = false,
                            _ => {}
                        }
                    }
                    match &reduced {
                        None => reduced = Some(r),
                        Some(v) if *v != r => {
                            consistent = false;
                            out.violations.push((pb, pk));
                        }
                        _ => {}
                    }
                    pending_zero.push((pb, pk));
                }
            }
            if !consistent && out.violations.is_empty() {
                out.violations.extend(pending_zero.first().copied());
            }
            if let Some(r) = reduced.filter(|r| !r.is_zero()) {
                out.values.insert((sb, sk), r);
            }
            if let Some(r) = non_max {
                out.non_max_values.insert((sb, sk), r);
            }
        }
    }
    Ok(out)
}

/// Reassembles `Σ R · W` as a matrix on the module basis.
pub fn wigner_eckart_matrix(rep: &Representation, red: &ReducedElements, cache: &mut TableCache) -> Result<AlgMatrix, ReducedError> {
    let label = rep.label();
    let comp = tensor_component(&label, red.generator)?;
    let sub_label = label.subalgebra().expect("rank ≥ 2");
    let basis = &rep.basis;
    let mut out = AlgMatrix::zeros(rep.dim(), rep.dim());
    for (&(sb, sk), r) in &red.values {
        let (bar, ket) = (&basis.summands[sb], &basis.summands[sk]);
        let Some(shift) = shift_between(&sub_label, &ket.sub_weight, &bar.sub_weight) else { continue };
        let Some(table) = cache.get(sub_label, &ket.sub_weight, shift)? else { continue };
        for (pb, &(s1, qb)) in basis.placement.iter().enumerate() {
            if s1 != sb {
                continue;
            }
            for (pk, &(s2, qk)) in basis.placement.iter().enumerate() {
                if s2 == sk {
                    out.add_to(pb, pk, &(r * &table.get(qb, comp, qk)));
                }
            }
        }
    }
    Ok(out)
}

/// How the closed-form `F_{1,−2}` rule treats the B-series `σ` label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SigmaRule {
    /// `σ` is not constrained.
    Free,
    /// `σ̄ = σ` is required.
    Preserved,
}

/// Closed-form rank-2 reduced elements from the `gl_3` kernel, for
/// `F_{−1,−2}` and `F_{1,−2}` of B2 and C2, keyed by summand pairs.
///
/// `F_{−1,−2}` connects summands with equal level-2 data and level-1 row
/// lowered by one: value `red_me(b, [c]; −2)`. `F_{1,−2}` additionally lowers
/// one primed entry `b_{i1}`: value `red_me([λ, 0], b; i1 − 1) · red_wigner(b, [c]; i1, −2)`
/// in kernel indexing, with `σ` unconstrained.
pub fn kernel_rank2_reduced(basis: &GtBasis, g: GeneratorId, sigma_rule: SigmaRule) -> Result<BTreeMap<(usize, usize), AlgebraicValue>, ReducedError> {
    let label = basis.label;
    let supported = label.rank == 2 && matches!(label.family, Family::B | Family::C);
    if !supported || !(g == GeneratorId::new(-1, -2) || g == GeneratorId::new(1, -2)) {
        return Err(ReducedError::NotTensorOperator(g, label));
    }
    let one = rat(1);
    let lam = &basis.highest_weight;
    let mut out = BTreeMap::new();
    for (sb, bar) in basis.summands.iter().enumerate() {
        for (sk, ket) in basis.summands.iter().enumerate() {
            let c = &ket.sub_weight[0];
            if bar.sub_weight[0] != c - &one {
                continue;
            }
            let b = &ket.primed;
            let value = if g.i == -1 {
                if bar.primed != *b || bar.sigma != ket.sigma {
                    continue;
                }
                red_me(&GlRowPair::new(b.clone(), vec![c.clone()])?, -2)?
            } else {
                if sigma_rule == SigmaRule::Preserved && bar.sigma != ket.sigma {
                    continue;
                }
                let lowered: Vec<usize> = (0..2).filter(|&k| bar.primed[k] != b[k]).collect();
                let [k] = lowered.as_slice() else { continue };
                if bar.primed[*k] != &b[*k] - &one {
                    continue;
                }
                let i1 = *k as i32 - 2;
                let top = vec![lam[0].clone(), lam[1].clone(), Rational::from_integer(0.into())];
                let first = red_me(&GlRowPair::new(top, b.clone())?, i1 - 1)?;
                let second = red_wigner(&GlRowPair::new(b.clone(), vec![c.clone()])?, i1, -2)?;
                &first * &second
            };
            if !value.is_zero() {
                out.insert((sb, sk), value);
            }
        }
    }
    Ok(out)
}

/// Result of comparing two families of reduced elements up to a change of
/// basis that preserves every `g_{n−1}` highest weight space.
#[derive(Clone, Debug)]
pub struct GaugeComparison {
    /// Literal equality on every summand pair.
    pub literal: bool,
    /// Equality of squares and a consistent sign per summand.
    pub signed: bool,
    /// An invertible block-diagonal change of basis exists.
    pub equivalent: bool,
    /// Smallest singular value of the generic solution, per the worst block.
    pub min_block_sigma: f64,
    /// First summand pair where literal values differ.
    pub witness: Option<(usize, usize)>,
}

/// Compares constructed reduced elements with reference ones, for several
/// operators at once. Summands are grouped by full highest weight; the change
/// of basis `S` must satisfy `S_bar · reference = constructed · S_ket`.
pub fn compare_up_to_gauge(
    basis: &GtBasis,
    constructed: &[BTreeMap<(usize, usize), AlgebraicValue>],
    reference: &[BTreeMap<(usize, usize), AlgebraicValue>],
) -> GaugeComparison {
    let ns = basis.summands.len();
    let mut witness = None;
    let mut literal = true;
    for (c, r) in constructed.iter().zip(reference) {
        for sb in 0..ns {
            for sk in 0..ns {
                let a = c.get(&(sb, sk)).cloned().unwrap_or_default();
                let b = r.get(&(sb, sk)).cloned().unwrap_or_default();
                if a != b && literal {
                    literal = false;
                    witness = Some((sb, sk));
                }
            }
        }
    }
    let signed = signed_gauge(ns, constructed, reference);

    // Blocks of summands sharing a full weight.
    let mut blocks: BTreeMap<Vec<Rational>, Vec<usize>> = BTreeMap::new();
    for (s, sm) in basis.summands.iter().enumerate() {
        blocks.entry(sm.weight.clone()).or_default().push(s);
    }
    let members: Vec<&Vec<usize>> = blocks.values().collect();
    // Unknowns: S_block[x][y] for x, y within the block.
    let mut offsets = Vec::new();
    let mut nu = 0;
    for m in &members {
        offsets.push(nu);
        nu += m.len() * m.len();
    }
    let unknown = |bi: usize, x: usize, y: usize| offsets[bi] + x * members[bi].len() + y;
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    for (c, r) in constructed.iter().zip(reference) {
        for (bb, bar_members) in members.iter().enumerate() {
            for (bk, ket_members) in members.iter().enumerate() {
                // (S_bb · R)[x, y] − (C · S_bk)[x, y] = 0
                for x in 0..bar_members.len() {
                    for y in 0..ket_members.len() {
                        let mut row = Vec::new();
                        for z in 0..bar_members.len() {
                            let v = r.get(&(bar_members[z], ket_members[y])).map(|v| v.to_f64()).unwrap_or(0.0);
                            if v != 0.0 {
                                row.push((unknown(bb, x, z), v));
                            }
                        }
                        for z in 0..ket_members.len() {
                            let v = c.get(&(bar_members[x], ket_members[z])).map(|v| v.to_f64()).unwrap_or(0.0);
                            if v != 0.0 {
                                row.push((unknown(bk, z, y), -v));
                            }
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    // Zero rows pad A so the thin SVD yields a full right basis.
    let mut a = DMatrix::<f64>::zeros(rows.len().max(nu).max(1), nu);
    for (k, row) in rows.iter().enumerate() {
        for &(u, v) in row {
            a[(k, u)] += v;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let scale = svd.singular_values.iter().fold(1.0f64, |m, x| m.max(*x));
    let null: Vec<usize> = (0..nu).filter(|&k| svd.singular_values[k] < 1e-9 * scale).collect();
    let mut generic = vec![0.0f64; nu];
    for (t, &k) in null.iter().enumerate() {
        let coeff = 1.0 + 0.37 * (t as f64) + 0.113 * (t as f64).powi(2);
        for (g, v) in generic.iter_mut().zip(v_t.row(k).iter()) {
            *g += coeff * v;
        }
    }
    let mut min_sigma = f64::INFINITY;
    for (bi, m) in members.iter().enumerate() {
        let d = m.len();
        let block = DMatrix::<f64>::from_fn(d, d, |x, y| generic[unknown(bi, x, y)]);
        let sv = block.singular_values();
        let smallest = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        min_sigma = min_sigma.min(smallest);
    }
    GaugeComparison {
        literal,
        signed,
        equivalent: !null.is_empty() && min_sigma > 1e-8,
        min_block_sigma: min_sigma,
        witness,
    }
}

/// Equal squares and signs `s` with `constructed = s_bar · s_ket · reference`.
fn signed_gauge(
    ns: usize,
    constructed: &[BTreeMap<(usize, usize), AlgebraicValue>],
    reference: &[BTreeMap<(usize, usize), AlgebraicValue>],
) -> bool {
    let mut edges: Vec<Vec<(usize, i8)>> = vec![Vec::new(); ns];
    for (c, r) in constructed.iter().zip(reference) {
        for sb in 0..ns {
            for sk in 0..ns {
                let a = c.get(&(sb, sk)).cloned().unwrap_or_default();
                let b = r.get(&(sb, sk)).cloned().unwrap_or_default();
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                let rel = if a == b {
                    1
                } else if a == -b.clone() {
                    -1
                } else {
                    return false;
                };
                edges[sb].push((sk, rel));
                edges[sk].push((sb, rel));
            }
        }
    }
    let mut sign = vec![0i8; ns];
    for start in 0..ns {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, rel) in &edges[u] {
                let want = sign[u] * rel;
                if sign[v] == 0 {
                    sign[v] = want;
                    stack.push(v);
                } else if sign[v] != want {
                    return false;
                }
            }
        }
    }
    true
}

/// The B1 lowering operator read from the closed-form o3 rule: `σ = 0` moves
/// to `σ = 1` with `m'` fixed, `σ = 1` moves to `σ = 0` with `m'` lowered; the
/// coefficient is `red_me([m, 0], [m']; −2)`.
pub fn o3_lowering_rule(basis: &GtBasis) -> Result<AlgMatrix, ReducedError> {
    let label = basis.label;
    if label != (AlgebraLabel { family: Family::B, rank: 1 }) {
        return Err(ReducedError::NotTensorOperator(GeneratorId::new(0, -1), label));
    }
    let m = basis.highest_weight[0].clone();
    let mut out = AlgMatrix::zeros(basis.dim(), basis.dim());
    for (k, p) in basis.patterns.iter().enumerate() {
        let level = p.level(1);
        let mp = level.primed[0].clone();
        let mut target = p.clone();
        if level.sigma == 0 {
            target.levels[0].sigma = 1;
        } else {
            target.levels[0].sigma = 0;
            target.levels[0].primed[0] = &mp - rat(1);
        }
        let Some(t) = basis.index_of(&target) else { continue };
        let v = red_me(&GlRowPair::new(vec![m.clone(), rat(0)], vec![mp])?, -2)?;
        out.add_to(t, k, &v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(f: Family, n: usize, hw: &str) -> Representation {
        let label = AlgebraLabel::new(f, n).unwrap();
        let w = DominantWeight::parse(&label, hw).unwrap();
        Representation::new(label, w.components()).unwrap()
    }

    #[test]
    fn tensor_components() {
        let l = AlgebraLabel::new(Family::B, 3).unwrap();
        assert_eq!(tensor_component(&l, GeneratorId::new(-1, -2)).unwrap(), 1);
        assert_eq!(tensor_component(&l, GeneratorId::new(0, -3)).unwrap(), 2);
        assert_eq!(tensor_component(&l, GeneratorId::new(1, 2)).unwrap(), -1);
        assert!(tensor_component(&l, GeneratorId::new(-2, -3)).is_err());
    }

    #[test]
    fn factorization_holds_and_reassembles() {
        let mut cache = TableCache::default();
        for (f, n, hw) in [(Family::B, 2, "1,0"), (Family::C, 3, "1,0,0"), (Family::D, 3, "1,1,0")] {
            let r = rep(f, n, hw);
            let g = GeneratorId::new(-1, -2);
            let red = reduced_elements(&r, g, &mut cache).unwrap();
            assert!(red.violations.is_empty(), "{f:?}{n} {hw}");
            let back = wigner_eckart_matrix(&r, &red, &mut cache).unwrap();
            assert_eq!(back, *r.matrix(g).unwrap());
        }
    }

    #[test]
    fn maximal_element_equals_the_reduced_element() {
        let mut cache = TableCache::default();
        let r = rep(Family::B, 2, "2,1");
        for g in [GeneratorId::new(-1, -2), GeneratorId::new(1, -2)] {
            let red = reduced_elements(&r, g, &mut cache).unwrap();
            for (key, v) in &red.max_elements {
                assert_eq!(red.values.get(key).cloned().unwrap_or_default(), *v);
            }
        }
    }

    #[test]
    fn gauge_comparison_accepts_itself() {
        let mut cache = TableCache::default();
        let r = rep(Family::C, 2, "2,1");
        let a = reduced_elements(&r, GeneratorId::new(-1, -2), &mut cache).unwrap().values;
        let b = reduced_elements(&r, GeneratorId::new(1, -2), &mut cache).unwrap().values;
        let cmp = compare_up_to_gauge(&r.basis, &[a.clone(), b.clone()], &[a, b]);
        assert!(cmp.literal && cmp.signed && cmp.equivalent);
    }

    #[test]
    fn o3_rule_has_the_constructed_support() {
        for hw in ["1", "1/2", "3"] {
            let r = rep(Family::B, 1, hw);
            let rule = o3_lowering_rule(&r.basis).unwrap();
            let ours = r.matrix(GeneratorId::new(0, -1)).unwrap();
            let support = |m: &AlgMatrix| m.entries.keys().copied().collect::<Vec<_>>();
            assert_eq!(support(&rule), support(&ours), "B1 [{hw}]");
        }
    }
}
