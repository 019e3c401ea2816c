//! l-hyperpartitions: for every arity `r ≤ k`, a labelling of the r-subsets
//! of `[n]` by `l` classes, stored as flat arrays indexed by colex rank.

mod cell;
mod cylinder;
mod density;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use cell::{permute_mask, CellCoordinate, CombinatorialStructure, StructureJson, MAX_CELL_SPACE};
pub use cylinder::{regularity_deficit, CylinderFamily, Deficit};
pub use density::{
    empirical_dvh, exhaustive_dvh, structure_density, structure_density_weighted,
    structure_density_with, LKDistribution, SimplexIndex,
};

use crate::combinatorics::{for_each_subset, Colex};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{ratio, zero, Rational};
use crate::rng::{unit_level, StreamKey};

#[derive(Clone, Debug)]
pub struct Hyperpartition {
    n: usize,
    k: usize,
    l: usize,
    /// `labels[r-1][rank]` in `0..l`.
    labels: Vec<Vec<u16>>,
    colex: Arc<Colex>,
}

impl PartialEq for Hyperpartition {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.l == other.l && self.labels == other.labels
    }
}

impl Eq for Hyperpartition {}

fn check_shape(k: usize, l: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k", "arity must be at least 1"));
    }
    if l == 0 || l > u16::MAX as usize {
        return Err(Error::invalid("l", format!("class count {l} not in 1..=65535")));
    }
    Ok(())
}

impl Hyperpartition {
    /// From 0-based label arrays, one per arity `1..=k`.
    pub fn new(n: usize, k: usize, l: usize, labels: Vec<Vec<u16>>) -> Result<Self> {
        check_shape(k, l)?;
        let colex = Arc::new(Colex::new(n, k)?);
        if labels.len() != k {
            return Err(Error::invalid("labels", format!("need arities 1..={k}, got {}", labels.len())));
        }
        for (i, arr) in labels.iter().enumerate() {
            let r = i + 1;
            if arr.len() as u64 != colex.count(r) {
                return Err(Error::invalid(
                    format!("labels.{r}"),
                    format!("expected C({n},{r}) = {} labels, got {}", colex.count(r), arr.len()),
                ));
            }
            if let Some(v) = arr.iter().find(|&&v| v as usize >= l) {
                return Err(Error::invalid(format!("labels.{r}"), format!("label {} not in 1..={l}", v + 1)));
            }
        }
        Ok(Hyperpartition { n, k, l, labels, colex })
    }

    fn build(n: usize, k: usize, l: usize, mut label: impl FnMut(usize, u64) -> u16) -> Result<Self> {
        check_shape(k, l)?;
        let colex = Arc::new(Colex::new(n, k)?);
        let labels = (1..=k)
            .map(|r| (0..colex.count(r)).map(|rank| label(r, rank)).collect())
            .collect();
        Ok(Hyperpartition { n, k, l, labels, colex })
    }

    pub fn constant(n: usize, k: usize, l: usize, level: u16) -> Result<Self> {
        if level as usize >= l.max(1) {
            return Err(Error::invalid("level", "outside 0..l"));
        }
        Self::build(n, k, l, |_, _| level)
    }

    /// Independent uniform labels, a pure function of `seed`.
    pub fn random(n: usize, k: usize, l: usize, seed: u64) -> Result<Self> {
        let key = StreamKey::new(seed).derive(0x4850);
        Self::build(n, k, l, |r, rank| unit_level(key.derive(r as u64).at(rank), l) as u16)
    }

    /// Balanced deterministic labels: colex rank modulo `l`.
    pub fn round_robin(n: usize, k: usize, l: usize) -> Result<Self> {
        Self::build(n, k, l, |_, rank| (rank % l as u64) as u16)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn colex(&self) -> &Colex {
        &self.colex
    }

    /// 0-based labels of the r-subsets, by colex rank.
    pub fn labels(&self, r: usize) -> &[u16] {
        &self.labels[r - 1]
    }

    pub fn set_label(&mut self, r: usize, rank: u64, level: u16) {
        assert!((level as usize) < self.l);
        self.labels[r - 1][rank as usize] = level;
    }

    /// 0-based label of a sorted r-subset.
    #[inline]
    pub fn label_of(&self, sorted: &[u32]) -> u16 {
        self.labels[sorted.len() - 1][self.colex.rank(sorted) as usize]
    }

    pub fn class_sizes(&self, r: usize) -> Vec<u64> {
        let mut sizes = vec![0u64; self.l];
        for &v in &self.labels[r - 1] {
            sizes[v as usize] += 1;
        }
        sizes
    }

    /// `max_{r, i<j} ||P_r^i| - |P_r^j|| / C(n, r)`; the hyperpartition is
    /// δ-equitable iff this is below δ.
    pub fn equitability_deficit(&self) -> Rational {
        let mut worst = zero();
        for r in 1..=self.k {
            let total = self.colex.count(r);
            if total == 0 {
                continue;
            }
            let sizes = self.class_sizes(r);
            let gap = sizes.iter().max().unwrap() - sizes.iter().min().unwrap();
            let d = ratio(gap as u128, total as u128);
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Labels mapped through `sigma[r-1]` on each arity `r`.
    pub fn relabelled(&self, sigma: &[Vec<u16>]) -> Self {
        let labels = self
            .labels
            .iter()
            .zip(sigma)
            .map(|(arr, p)| arr.iter().map(|&v| p[v as usize]).collect())
            .collect();
        Hyperpartition { labels, ..self.clone() }
    }

    /// The r-uniform hypergraph `P_r^j` (0-based `level`).
    pub fn class(&self, r: usize, level: u16) -> Result<Hypergraph> {
        let ranks = self.labels[r - 1]
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == level)
            .map(|(i, _)| i as u64)
            .collect();
        Hypergraph::from_sorted_ranks(r, self.n, ranks)
    }

    /// The coordinate of the directed cell containing an ordered k-tuple of
    /// distinct vertices.
    pub fn cell_coordinate(&self, tuple: &[u32]) -> Result<CellCoordinate> {
        if tuple.len() != self.k {
            return Err(Error::invalid("tuple", format!("expected {} vertices", self.k)));
        }
        if let Some(v) = tuple.iter().find(|&&v| v as usize >= self.n) {
            return Err(Error::invalid("tuple", format!("vertex {v} out of range")));
        }
        let mut seen = tuple.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("tuple", "repeated vertex"));
        }
        let mut buf = Vec::with_capacity(self.k);
        let levels = (1..1usize << self.k)
            .map(|mask| {
                buf.clear();
                buf.extend((0..self.k).filter(|i| mask >> i & 1 == 1).map(|i| tuple[i]));
                buf.sort_unstable();
                self.label_of(&buf)
            })
            .collect();
        CellCoordinate::new(self.k, levels)
    }

    /// Dense-table code of the coordinate of a sorted k-subset.
    #[inline]
    pub(crate) fn sorted_code(&self, sorted: &[u32], buf: &mut Vec<u32>) -> usize {
        let mut code = 0usize;
        for mask in (1..1usize << self.k).rev() {
            buf.clear();
            buf.extend((0..self.k).filter(|i| mask >> i & 1 == 1).map(|i| sorted[i]));
            code = code * self.l + self.label_of(buf) as usize;
        }
        code
    }

    fn check_structure(&self, c: &CombinatorialStructure) -> Result<()> {
        if c.k() != self.k {
            return Err(Error::ArityMismatch { left: self.k, right: c.k() });
        }
        if c.l() != self.l {
            return Err(Error::ShapeMismatch {
                field: "l",
                detail: format!("hyperpartition has l={}, structure has l={}", self.l, c.l()),
            });
        }
        Ok(())
    }

    /// `H(ℋ, 𝒞, [n])`: the union of the cells whose coordinates lie in `C`.
    pub fn cells_union(&self, c: &CombinatorialStructure) -> Result<Hypergraph> {
        self.check_structure(c)?;
        c.check_symmetric()?;
        let mut ranks = Vec::new();
        let mut buf = Vec::with_capacity(self.k);
        let mut rank = 0u64;
        for_each_subset(self.n, self.k, |s| {
            if c.contains_code(self.sorted_code(s, &mut buf)) {
                ranks.push(rank);
            }
            rank += 1;
        });
        Hypergraph::from_sorted_ranks(self.k, self.n, ranks)
    }

    pub fn to_wire(&self) -> HyperpartitionJson {
        HyperpartitionJson {
            n: self.n,
            k: self.k,
            l: self.l,
            labels: self
                .labels
                .iter()
                .enumerate()
                .map(|(i, arr)| ((i + 1).to_string(), arr.iter().map(|&v| v as u32 + 1).collect()))
                .collect(),
        }
    }

    pub fn from_wire(w: &HyperpartitionJson) -> Result<Self> {
        check_shape(w.k, w.l)?;
        let mut labels = Vec::with_capacity(w.k);
        for r in 1..=w.k {
            let field = format!("labels.{r}");
            let arr = w
                .labels
                .get(&r.to_string())
                .ok_or_else(|| Error::invalid(&field, "missing"))?;
            let arr = arr
                .iter()
                .map(|&v| {
                    if v == 0 || v as usize > w.l {
                        Err(Error::invalid(&field, format!("label {v} not in 1..={}", w.l)))
                    } else {
                        Ok((v - 1) as u16)
                    }
                })
                .collect::<Result<Vec<u16>>>()?;
            labels.push(arr);
        }
        if let Some(extra) = w.labels.keys().find(|key| !(1..=w.k).any(|r| r.to_string() == **key)) {
            return Err(Error::invalid(format!("labels.{extra}"), "arity out of range"));
        }
        Self::new(w.n, w.k, w.l, labels)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_wire(&serde_json::from_str(s)?)
    }
}

/// Wire format `{"n", "k", "l", "labels": {"1": [...], ...}}`, 1-based
/// labels listed by colex rank.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperpartitionJson {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub labels: BTreeMap<String, Vec<u32>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::one;

    /// n=4, k=2, l=2; vertices 0,1 in class 1, pairs of rank < 3 in class 1.
    fn balanced() -> Hyperpartition {
        Hyperpartition::new(4, 2, 2, vec![vec![0, 0, 1, 1], vec![0, 0, 0, 1, 1, 1]]).unwrap()
    }

    #[test]
    fn equitability_examples() {
        assert_eq!(Hyperpartition::random(6, 3, 1, 1).unwrap().equitability_deficit(), zero());
        assert_eq!(balanced().equitability_deficit(), zero());
        let lopsided = Hyperpartition::new(4, 2, 2, vec![vec![0, 0, 1, 1], vec![0; 6]]).unwrap();
        assert_eq!(lopsided.equitability_deficit(), one());
    }

    #[test]
    fn coordinates() {
        let hp = balanced();
        // pairs in colex order: 01 02 12 03 13 23
        let c = hp.cell_coordinate(&[0, 3]).unwrap();
        assert_eq!(c.levels(), &[0, 1, 1]);
        let swapped = hp.cell_coordinate(&[3, 0]).unwrap();
        assert_eq!(swapped, c.permuted(&[1, 0]));
        assert!(hp.cell_coordinate(&[1, 1]).is_err());
        let ones = Hyperpartition::constant(5, 3, 2, 0).unwrap();
        assert_eq!(ones.cell_coordinate(&[4, 0, 2]).unwrap(), CellCoordinate::constant(3, 0));
    }

    #[test]
    fn cells_union_examples() {
        let hp = balanced();
        let top = CombinatorialStructure::from_predicate(2, 2, |c| c.level(3) == 1).unwrap();
        let u = hp.cells_union(&top).unwrap();
        assert_eq!(u.ranks(), &[3, 4, 5]);
        assert_eq!(hp.cells_union(&CombinatorialStructure::full(2, 2).unwrap()).unwrap(),
                   Hypergraph::complete(2, 4).unwrap());
        assert_eq!(hp.cells_union(&CombinatorialStructure::empty(2, 2).unwrap()).unwrap().edge_count(), 0);
        // relabelling both sides leaves the union unchanged
        let sigma = vec![vec![1u16, 0], vec![1, 0]];
        assert_eq!(hp.relabelled(&sigma).cells_union(&top.relabelled(&sigma)).unwrap(), u);
    }

    #[test]
    fn json_roundtrip() {
        let hp = balanced();
        let text = hp.to_json();
        assert_eq!(text, r#"{"n":4,"k":2,"l":2,"labels":{"1":[1,1,2,2],"2":[1,1,1,2,2,2]}}"#);
        assert_eq!(Hyperpartition::from_json(&text).unwrap(), hp);
        assert!(Hyperpartition::from_json(r#"{"n":4,"k":2,"l":2,"labels":{"1":[1,1,2,2],"2":[1,1,1,2,2]}}"#).is_err());
        assert!(Hyperpartition::from_json(r#"{"n":2,"k":1,"l":2,"labels":{"1":[1,3]}}"#).is_err());
    }
}
