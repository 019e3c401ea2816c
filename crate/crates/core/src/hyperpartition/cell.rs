//! Cell coordinates `f: r([k]) → [l]` and combinatorial structures.
//!
//! A coordinate stores one level per nonempty subset of `[k]`, indexed by
//! bitmask (bit `i-1` is element `i`). Levels are 0-based in memory and
//! 1-based in JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinatorics::permutations;
use crate::error::{Error, Result};

/// Largest supported `l^{2^k-1}` for dense structure tables.
pub const MAX_CELL_SPACE: u128 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellCoordinate {
    k: usize,
    /// `levels[mask - 1]`, each in `0..l`.
    levels: Vec<u16>,
}

/// Image of a subset mask under a permutation of `[k]` (`perm[i]` is the
/// image of element `i`, 0-based).
#[inline]
pub fn permute_mask(mask: usize, perm: &[usize]) -> usize {
    let mut out = 0;
    for (i, &p) in perm.iter().enumerate() {
        if mask >> i & 1 == 1 {
            out |= 1 << p;
        }
    }
    out
}

impl CellCoordinate {
    pub fn new(k: usize, levels: Vec<u16>) -> Result<Self> {
        if levels.len() != (1 << k) - 1 {
            return Err(Error::invalid(
                "cell",
                format!("expected {} masks for k={k}, got {}", (1 << k) - 1, levels.len()),
            ));
        }
        Ok(CellCoordinate { k, levels })
    }

    pub fn constant(k: usize, level: u16) -> Self {
        CellCoordinate {
            k,
            levels: vec![level; (1 << k) - 1],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Level (0-based) of the subset `mask`, `1 ≤ mask < 2^k`.
    #[inline]
    pub fn level(&self, mask: usize) -> u16 {
        self.levels[mask - 1]
    }

    pub fn levels(&self) -> &[u16] {
        &self.levels
    }

    /// The induced action `(π·c)(A) = c(π⁻¹(A))`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut levels = vec![0; self.levels.len()];
        for mask in 1..=self.levels.len() {
            levels[permute_mask(mask, perm) - 1] = self.levels[mask - 1];
        }
        CellCoordinate { k: self.k, levels }
    }

    /// Mixed-radix index `Σ f(A) l^{A-1}` into a dense table.
    pub fn code(&self, l: usize) -> usize {
        self.levels
            .iter()
            .rev()
            .fold(0usize, |acc, &v| acc * l + v as usize)
    }

    pub fn from_code(k: usize, l: usize, mut code: usize) -> Self {
        let mut levels = Vec::with_capacity((1 << k) - 1);
        for _ in 0..(1 << k) - 1 {
            levels.push((code % l) as u16);
            code /= l;
        }
        CellCoordinate { k, levels }
    }

    /// JSON object `{"<mask>": level, ...}` with 1-based levels.
    pub fn to_wire(&self) -> BTreeMap<String, u32> {
        self.levels
            .iter()
            .enumerate()
            .map(|(i, &v)| ((i + 1).to_string(), v as u32 + 1))
            .collect()
    }

    pub fn from_wire(k: usize, l: usize, wire: &BTreeMap<String, u32>, field: &str) -> Result<Self> {
        let masks = (1usize << k) - 1;
        let mut levels = vec![u16::MAX; masks];
        for (key, &v) in wire {
            let mask: usize = key
                .parse()
                .ok()
                .filter(|m| (1..=masks).contains(m))
                .ok_or_else(|| Error::invalid(field, format!("mask {key:?} is not in 1..={masks}")))?;
            if v == 0 || v as usize > l {
                return Err(Error::invalid(field, format!("label {v} at mask {mask} not in 1..={l}")));
            }
            levels[mask - 1] = (v - 1) as u16;
        }
        if let Some(i) = levels.iter().position(|&v| v == u16::MAX) {
            return Err(Error::invalid(field, format!("mask {} has no label", i + 1)));
        }
        Ok(CellCoordinate { k, levels })
    }
}

/// An S_k-closed set of `(k, l)`-cells, held as a dense membership table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialStructure {
    k: usize,
    l: usize,
    table: Vec<bool>,
}

fn cell_space(k: usize, l: usize) -> Result<usize> {
    if k == 0 || l == 0 {
        return Err(Error::invalid("k/l", "k and l must be positive"));
    }
    let space = (l as u128).checked_pow((1u32 << k) - 1).unwrap_or(u128::MAX);
    if space > MAX_CELL_SPACE {
        return Err(Error::cap("cell space l^(2^k-1)", space, MAX_CELL_SPACE));
    }
    Ok(space as usize)
}

impl CombinatorialStructure {
    pub fn empty(k: usize, l: usize) -> Result<Self> {
        Ok(CombinatorialStructure {
            k,
            l,
            table: vec![false; cell_space(k, l)?],
        })
    }

    pub fn full(k: usize, l: usize) -> Result<Self> {
        Ok(CombinatorialStructure {
            k,
            l,
            table: vec![true; cell_space(k, l)?],
        })
    }

    /// Cells satisfying `keep`; fails if the result is not S_k-closed.
    pub fn from_predicate(k: usize, l: usize, keep: impl Fn(&CellCoordinate) -> bool) -> Result<Self> {
        let space = cell_space(k, l)?;
        let table = (0..space).map(|c| keep(&CellCoordinate::from_code(k, l, c))).collect();
        let s = CombinatorialStructure { k, l, table };
        s.check_symmetric()?;
        Ok(s)
    }

    /// The S_k-closure of the given cells.
    pub fn symmetrized(k: usize, l: usize, cells: impl IntoIterator<Item = CellCoordinate>) -> Result<Self> {
        let mut s = Self::empty(k, l)?;
        let perms = permutations(k);
        for c in cells {
            s.check_cell(&c)?;
            for p in &perms {
                let code = c.permuted(p).code(l);
                s.table[code] = true;
            }
        }
        Ok(s)
    }

    /// Exactly the given cells; rejects sets that are not S_k-closed.
    pub fn from_cells(k: usize, l: usize, cells: impl IntoIterator<Item = CellCoordinate>) -> Result<Self> {
        let mut s = Self::empty(k, l)?;
        for c in cells {
            s.check_cell(&c)?;
            let code = c.code(l);
            s.table[code] = true;
        }
        s.check_symmetric()?;
        Ok(s)
    }

    fn check_cell(&self, c: &CellCoordinate) -> Result<()> {
        if c.k != self.k {
            return Err(Error::ArityMismatch { left: self.k, right: c.k });
        }
        if c.levels.iter().any(|&v| v as usize >= self.l) {
            return Err(Error::invalid("cells", format!("level outside 1..={}", self.l)));
        }
        Ok(())
    }

    pub(crate) fn check_symmetric(&self) -> Result<()> {
        let perms = permutations(self.k);
        for code in 0..self.table.len() {
            if self.table[code] {
                let c = CellCoordinate::from_code(self.k, self.l, code);
                if perms.iter().any(|p| !self.table[c.permuted(p).code(self.l)]) {
                    return Err(Error::NotSymmetric { what: "cells" });
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    #[inline]
    pub fn contains_code(&self, code: usize) -> bool {
        self.table[code]
    }

    pub fn contains(&self, c: &CellCoordinate) -> bool {
        c.k == self.k && c.levels.iter().all(|&v| (v as usize) < self.l) && self.table[c.code(self.l)]
    }

    pub fn len(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of cells in the table, `l^{2^k-1}`.
    pub fn space(&self) -> usize {
        self.table.len()
    }

    /// Member cells in increasing code order.
    pub fn cells(&self) -> impl Iterator<Item = CellCoordinate> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(c, _)| CellCoordinate::from_code(self.k, self.l, c))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.k == other.k
            && self.l == other.l
            && self.table.iter().zip(&other.table).all(|(&a, &b)| !a || b)
    }

    /// Same cells after replacing level `v` on arity `r` by `sigma[r-1][v]`.
    pub fn relabelled(&self, sigma: &[Vec<u16>]) -> Self {
        let mut table = vec![false; self.table.len()];
        for c in self.cells() {
            let levels: Vec<u16> = c
                .levels
                .iter()
                .enumerate()
                .map(|(i, &v)| sigma[((i + 1) as u32).count_ones() as usize - 1][v as usize])
                .collect();
            table[CellCoordinate { k: self.k, levels }.code(self.l)] = true;
        }
        CombinatorialStructure { k: self.k, l: self.l, table }
    }

    /// Same structure on the `m·l` grid: every cell splits into its
    /// `m^{2^k-1}` sub-cells.
    pub fn refine(&self, m: usize) -> Result<Self> {
        let l2 = self.l * m;
        let space = cell_space(self.k, l2)?;
        let table = (0..space)
            .map(|code| {
                let c = CellCoordinate::from_code(self.k, l2, code);
                let coarse: usize = c
                    .levels
                    .iter()
                    .rev()
                    .fold(0, |acc, &v| acc * self.l + v as usize / m);
                self.table[coarse]
            })
            .collect();
        Ok(CombinatorialStructure { k: self.k, l: l2, table })
    }

    pub fn to_wire(&self) -> StructureJson {
        StructureJson {
            k: self.k,
            l: self.l,
            cells: self.cells().map(|c| c.to_wire()).collect(),
        }
    }

    pub fn from_wire(wire: &StructureJson, symmetrize: bool) -> Result<Self> {
        let cells = wire
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| CellCoordinate::from_wire(wire.k, wire.l, c, &format!("cells[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        if symmetrize {
            Self::symmetrized(wire.k, wire.l, cells)
        } else {
            Self::from_cells(wire.k, wire.l, cells)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("serializable")
    }

    pub fn from_json(s: &str, symmetrize: bool) -> Result<Self> {
        Self::from_wire(&serde_json::from_str(s)?, symmetrize)
    }
}

/// Wire format `{"k", "l", "cells": [{"<mask>": label, ...}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureJson {
    pub k: usize,
    pub l: usize,
    pub cells: Vec<BTreeMap<String, u32>>,
}
