//! Densities of a finite hypergraph in a combinatorial structure,
//! `t(F, 𝒞)` and its weighted form `t(F, 𝒞, P)`.
//!
//! The exact density is `E[Π_E p_E]` over uniform labels of the lower
//! simplices (subsets of edges with fewer than `k` vertices), where `p_E` is
//! the fraction of top labels of `E` completing an admissible cell. The
//! expectation is computed by variable elimination with integer tables.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::{CombinatorialStructure, Hyperpartition};
use crate::combinatorics::{falling_factorial, for_each_subset, Colex};
use crate::error::{same_arity, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{ratio, ratio_big, Rational};
use crate::rng::StreamKey;
use crate::sampling::injective_map;

/// Largest factor table built during elimination.
const MAX_FACTOR_TABLE: u128 = 1 << 24;

/// Injective-map enumeration limit for [`exhaustive_dvh`].
const MAX_EXHAUSTIVE_MAPS: u128 = 10_000_000;

/// Indexes `r(V, k)`: nonempty subsets of `[v]` with at most `k` elements,
/// ordered by size, then colex rank.
#[derive(Clone, Debug)]
pub struct SimplexIndex {
    k: usize,
    colex: Colex,
    offsets: Vec<usize>,
}

impl SimplexIndex {
    pub fn new(v: usize, k: usize) -> Result<Self> {
        let colex = Colex::new(v, k)?;
        let mut offsets = vec![0; k + 2];
        for r in 1..=k {
            offsets[r + 1] = offsets[r] + colex.count(r) as usize;
        }
        Ok(SimplexIndex { k, colex, offsets })
    }

    pub fn len(&self) -> usize {
        self.offsets[self.k + 1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, sorted: &[u32]) -> usize {
        self.offsets[sorted.len()] + self.colex.rank(sorted) as usize
    }

    /// Simplex indices of the sub-subsets of a sorted k-set, by mask
    /// `1..2^k` (entry `mask - 1`).
    pub fn faces(&self, sorted: &[u32]) -> Vec<usize> {
        let k = sorted.len();
        let mut buf = Vec::with_capacity(k);
        (1..1usize << k)
            .map(|mask| {
                buf.clear();
                buf.extend((0..k).filter(|i| mask >> i & 1 == 1).map(|i| sorted[i]));
                self.index(&buf)
            })
            .collect()
    }
}

struct Factor {
    vars: Vec<usize>,
    table: Vec<u128>,
}

fn table_size(l: usize, width: usize) -> Result<usize> {
    let size = (l as u128).checked_pow(width as u32).unwrap_or(u128::MAX);
    if size > MAX_FACTOR_TABLE {
        return Err(Error::cap("elimination table size", size, MAX_FACTOR_TABLE));
    }
    Ok(size as usize)
}

/// Multiplies every factor mentioning `x` and sums `x` out.
fn eliminate(factors: Vec<Factor>, x: usize, l: usize) -> Result<Factor> {
    let mut vars: Vec<usize> = factors.iter().flat_map(|f| f.vars.iter().copied()).collect();
    vars.sort_unstable();
    vars.dedup();
    vars.retain(|&v| v != x);
    let size = table_size(l, vars.len())?;
    // positions of each factor's variables in the joint assignment (x last)
    let maps: Vec<Vec<usize>> = factors
        .iter()
        .map(|f| {
            f.vars
                .iter()
                .map(|v| vars.iter().position(|u| u == v).unwrap_or(vars.len()))
                .collect()
        })
        .collect();
    let mut assign = vec![0usize; vars.len() + 1];
    let mut table = vec![0u128; size];
    for (out, slot) in table.iter_mut().enumerate() {
        let mut c = out;
        for a in assign.iter_mut().take(vars.len()) {
            *a = c % l;
            c /= l;
        }
        let mut sum = 0u128;
        for xv in 0..l {
            assign[vars.len()] = xv;
            let mut prod = 1u128;
            for (f, m) in factors.iter().zip(&maps) {
                let idx = m.iter().rev().fold(0, |acc, &p| acc * l + assign[p]);
                prod *= f.table[idx];
                if prod == 0 {
                    break;
                }
            }
            sum += prod;
        }
        *slot = sum;
    }
    Ok(Factor { vars, table })
}

/// `t(F, 𝒞)` exactly; with `induced` every k-subset of `V(F)` outside
/// `E(F)` must land outside the structure as well.
pub fn structure_density_with(f: &Hypergraph, c: &CombinatorialStructure, induced: bool) -> Result<Rational> {
    same_arity(f.k(), c.k())?;
    c.check_symmetric()?;
    let k = f.k();
    let l = c.l();
    let index = SimplexIndex::new(f.n(), k)?;
    let mut constraints: Vec<(Vec<u32>, bool)> = Vec::new();
    for_each_subset(f.n(), k, |s| {
        let inside = f.contains_sorted(s);
        if inside || induced {
            constraints.push((s.to_vec(), inside));
        }
    });
    // lower simplices used by some constraint, renumbered densely
    let mut var_of = BTreeMap::new();
    let lower_masks = (1usize << k) - 2;
    let top_weight = l.pow(lower_masks as u32);
    let mut factors = Vec::with_capacity(constraints.len());
    for (s, inside) in &constraints {
        let faces = index.faces(s);
        let vars: Vec<usize> = faces[..lower_masks]
            .iter()
            .map(|face| {
                let next = var_of.len();
                *var_of.entry(*face).or_insert(next)
            })
            .collect();
        let size = table_size(l, vars.len())?;
        let table = (0..size)
            .map(|lower| {
                let hits = (0..l)
                    .filter(|&top| c.contains_code(lower + top * top_weight) == *inside)
                    .count();
                hits as u128
            })
            .collect();
        factors.push(Factor { vars, table });
    }
    let lower_vars = var_of.len();
    let bits = ((lower_vars + constraints.len()) as f64) * (l as f64).log2();
    if bits > 126.0 {
        return Err(Error::cap("bits of the exact density numerator", bits as u128, 126));
    }
    // min-width elimination order
    let mut remaining: Vec<bool> = vec![true; lower_vars];
    for _ in 0..lower_vars {
        let x = (0..lower_vars)
            .filter(|&x| remaining[x])
            .min_by_key(|&x| {
                let mut scope: Vec<usize> = factors
                    .iter()
                    .filter(|f| f.vars.contains(&x))
                    .flat_map(|f| f.vars.iter().copied())
                    .collect();
                scope.sort_unstable();
                scope.dedup();
                (scope.len(), x)
            })
            .unwrap();
        remaining[x] = false;
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&x));
        factors = rest;
        factors.push(eliminate(touching, x, l)?);
    }
    let mut num = BigUint::from(1u8);
    for f in &factors {
        debug_assert!(f.vars.is_empty());
        num *= BigUint::from(f.table[0]);
    }
    let den = BigUint::from(l).pow((lower_vars + constraints.len()) as u32);
    Ok(ratio_big(num.into(), den.into()))
}

/// `t(F, 𝒞)`: probability that a uniform labelling of `r(V(F), k)` maps
/// every edge of `F` to a cell of `𝒞`.
pub fn structure_density(f: &Hypergraph, c: &CombinatorialStructure) -> Result<Rational> {
    structure_density_with(f, c, false)
}

/// A probability distribution on labellings `r(V, k) → [l]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LKDistribution {
    Uniform,
    /// Multiset of labellings (indexed by [`SimplexIndex`]) with counts.
    Empirical {
        v: usize,
        k: usize,
        l: usize,
        counts: BTreeMap<Vec<u16>, u64>,
    },
}

impl LKDistribution {
    pub fn total(&self) -> u64 {
        match self {
            LKDistribution::Uniform => 1,
            LKDistribution::Empirical { counts, .. } => counts.values().sum(),
        }
    }

    /// Total-variation distance between two empirical distributions.
    pub fn total_variation(&self, other: &Self) -> Option<f64> {
        let (LKDistribution::Empirical { counts: a, .. }, LKDistribution::Empirical { counts: b, .. }) =
            (self, other)
        else {
            return None;
        };
        let (ta, tb) = (self.total() as f64, other.total() as f64);
        let mut keys: Vec<&Vec<u16>> = a.keys().chain(b.keys()).collect();
        keys.sort();
        keys.dedup();
        let sum: f64 = keys
            .iter()
            .map(|key| {
                let pa = a.get(*key).copied().unwrap_or(0) as f64 / ta;
                let pb = b.get(*key).copied().unwrap_or(0) as f64 / tb;
                (pa - pb).abs()
            })
            .sum();
        Some(sum / 2.0)
    }
}

/// `t(F, 𝒞, P)`: the `P`-probability that a labelling is a homomorphism.
pub fn structure_density_weighted(
    f: &Hypergraph,
    c: &CombinatorialStructure,
    p: &LKDistribution,
) -> Result<Rational> {
    let (v, k, l, counts) = match p {
        LKDistribution::Uniform => return structure_density(f, c),
        LKDistribution::Empirical { v, k, l, counts } => (*v, *k, *l, counts),
    };
    same_arity(f.k(), c.k())?;
    same_arity(f.k(), k)?;
    c.check_symmetric()?;
    if v != f.n() || l != c.l() {
        return Err(Error::ShapeMismatch {
            field: "distribution",
            detail: format!("labels r([{v}],{k}) into [{l}] vs F on {} vertices, l={}", f.n(), c.l()),
        });
    }
    let index = SimplexIndex::new(v, k)?;
    let faces: Vec<Vec<usize>> = f.edges().map(|e| index.faces(&e)).collect();
    let mut hits = 0u128;
    let mut total = 0u128;
    for (labels, &count) in counts {
        total += count as u128;
        let hom = faces.iter().all(|fs| {
            let code = fs.iter().rev().fold(0, |acc, &s| acc * l + labels[s] as usize);
            c.contains_code(code)
        });
        if hom {
            hits += count as u128;
        }
    }
    if total == 0 {
        return Err(Error::Undefined("density under an empty distribution"));
    }
    Ok(ratio(hits, total))
}

fn labelling(hp: &Hyperpartition, index: &SimplexIndex, v: usize, image: &[u32]) -> Vec<u16> {
    let mut out = vec![0u16; index.len()];
    let mut buf = Vec::with_capacity(hp.k());
    for r in 1..=hp.k().min(v) {
        for_each_subset(v, r, |s| {
            buf.clear();
            buf.extend(s.iter().map(|&x| image[x as usize]));
            buf.sort_unstable();
            out[index.index(s)] = hp.label_of(&buf);
        });
    }
    out
}

fn check_v(v: usize, hp: &Hyperpartition) -> Result<SimplexIndex> {
    if v > hp.n() {
        return Err(Error::invalid("V_size", format!("{v} exceeds n={}", hp.n())));
    }
    SimplexIndex::new(v, hp.k())
}

/// `D(V, ℋ)` estimated from `samples` uniform injective maps `V → [n]`.
pub fn empirical_dvh(v: usize, hp: &Hyperpartition, samples: u64, seed: u64) -> Result<LKDistribution> {
    let index = check_v(v, hp)?;
    let key = StreamKey::new(seed).derive(0xd7);
    let n = hp.n();
    let counts = (0..samples)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<Vec<u16>, u64>, s| {
            let image = injective_map(v, n, key.derive(s));
            *acc.entry(labelling(hp, &index, v, &image)).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (key, c) in b {
                *a.entry(key).or_insert(0) += c;
            }
            a
        });
    Ok(LKDistribution::Empirical { v, k: hp.k(), l: hp.l(), counts })
}

/// `D(V, ℋ)` exactly, by running over every injective map `V → [n]`.
pub fn exhaustive_dvh(v: usize, hp: &Hyperpartition) -> Result<LKDistribution> {
    let index = check_v(v, hp)?;
    let maps = falling_factorial(hp.n() as u64, v as u64).unwrap_or(u128::MAX);
    if maps > MAX_EXHAUSTIVE_MAPS {
        return Err(Error::cap("injective maps for exhaustive D(V,H)", maps, MAX_EXHAUSTIVE_MAPS));
    }
    let n = hp.n() as u32;
    let mut counts = BTreeMap::new();
    let mut image = Vec::with_capacity(v);
    let mut used = vec![false; hp.n()];
    fn walk(
        depth: usize,
        v: usize,
        n: u32,
        image: &mut Vec<u32>,
        used: &mut [bool],
        emit: &mut dyn FnMut(&[u32]),
    ) {
        if depth == v {
            emit(image);
            return;
        }
        for x in 0..n {
            if !used[x as usize] {
                used[x as usize] = true;
                image.push(x);
                walk(depth + 1, v, n, image, used, emit);
                image.pop();
                used[x as usize] = false;
            }
        }
    }
    walk(0, v, n, &mut image, &mut used, &mut |img| {
        *counts.entry(labelling(hp, &index, v, img)).or_insert(0u64) += 1;
    });
    Ok(LKDistribution::Empirical { v, k: hp.k(), l: hp.l(), counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::one;

    fn top_two() -> CombinatorialStructure {
        CombinatorialStructure::from_predicate(2, 2, |c| c.level(3) == 1).unwrap()
    }

    #[test]
    fn examples() {
        let edge = Hypergraph::new(2, 2, [[0u32, 1]]).unwrap();
        let tri = Hypergraph::new(2, 3, [[0u32, 1], [1, 2], [0, 2]]).unwrap();
        assert_eq!(structure_density(&tri, &CombinatorialStructure::full(2, 3).unwrap()).unwrap(), one());
        assert_eq!(structure_density(&edge, &top_two()).unwrap(), ratio(1, 2));
        assert_eq!(structure_density(&tri, &top_two()).unwrap(), ratio(1, 8));
    }

    #[test]
    fn induced_uses_complement_cells() {
        // F = two vertices without the edge: probability the pair is outside C
        let non_edge = Hypergraph::empty(2, 2).unwrap();
        assert_eq!(structure_density_with(&non_edge, &top_two(), true).unwrap(), ratio(1, 2));
        assert_eq!(structure_density_with(&non_edge, &top_two(), false).unwrap(), one());
    }

    #[test]
    fn constant_partition_concentrates() {
        let hp = Hyperpartition::constant(6, 2, 2, 0).unwrap();
        let d = empirical_dvh(3, &hp, 50, 3).unwrap();
        match d {
            LKDistribution::Empirical { counts, .. } => {
                assert_eq!(counts.len(), 1);
                assert_eq!(counts.keys().next().unwrap(), &vec![0u16; 6]);
            }
            LKDistribution::Uniform => unreachable!(),
        }
        assert!(empirical_dvh(7, &hp, 1, 0).is_err());
    }

    #[test]
    fn exhaustive_counts_all_maps() {
        let hp = Hyperpartition::random(5, 2, 2, 9).unwrap();
        assert_eq!(exhaustive_dvh(3, &hp).unwrap().total(), 60);
    }
}
