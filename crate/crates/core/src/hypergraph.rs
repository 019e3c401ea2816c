//! Finite k-uniform hypergraphs on `[n] = {0, .., n-1}`.
//!
//! Edges are k-subsets stored by their colex rank. The ordered-tuple view of a
//! hypergraph (every ordering of every edge) is never materialized; it
//! contributes the `k!` factor where it matters.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{for_each_subset, Colex};
use crate::error::{Error, Result};

/// Dense bitsets are used for edge lookup up to this many k-subsets.
const DENSE_INDEX_LIMIT: u64 = 1 << 27;

#[derive(Clone, Debug)]
pub struct Hypergraph {
    k: usize,
    n: usize,
    ranks: Vec<u64>,
    colex: Arc<Colex>,
    dense: OnceLock<Option<Vec<u64>>>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.n == other.n && self.ranks == other.ranks
    }
}

impl Eq for Hypergraph {}

impl Hypergraph {
    /// Builds a hypergraph from explicit vertex lists. Each edge is sorted;
    /// repeated vertices, out-of-range vertices and duplicate edges are
    /// rejected.
    pub fn new<E, I>(k: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[u32]>,
    {
        if k == 0 {
            return Err(Error::invalid("k", "arity must be at least 1"));
        }
        let colex = Arc::new(Colex::new(n, k)?);
        let mut ranks = Vec::new();
        let mut buf = Vec::with_capacity(k);
        for (i, e) in edges.into_iter().enumerate() {
            let e = e.as_ref();
            if e.len() != k {
                return Err(Error::invalid(
                    format!("edges[{i}]"),
                    format!("has {} vertices, expected k={k}", e.len()),
                ));
            }
            buf.clear();
            buf.extend_from_slice(e);
            buf.sort_unstable();
            if let Some(&v) = buf.iter().find(|&&v| v as usize >= n) {
                return Err(Error::invalid(
                    format!("edges[{i}]"),
                    format!("vertex {v} out of range for n={n}"),
                ));
            }
            if buf.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("edges[{i}]"), "repeated vertex"));
            }
            ranks.push(colex.rank(&buf));
        }
        let before = ranks.len();
        ranks.sort_unstable();
        ranks.dedup();
        if ranks.len() != before {
            return Err(Error::invalid("edges", "duplicate edge"));
        }
        Ok(Self::from_parts(k, n, ranks, colex))
    }

    pub(crate) fn from_parts(k: usize, n: usize, ranks: Vec<u64>, colex: Arc<Colex>) -> Self {
        debug_assert!(ranks.windows(2).all(|w| w[0] < w[1]));
        Hypergraph {
            k,
            n,
            ranks,
            colex,
            dense: OnceLock::new(),
        }
    }

    /// From sorted, distinct colex ranks.
    pub fn from_sorted_ranks(k: usize, n: usize, ranks: Vec<u64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "arity must be at least 1"));
        }
        let colex = Arc::new(Colex::new(n, k)?);
        if ranks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("edges", "ranks not strictly increasing"));
        }
        if let Some(&last) = ranks.last() {
            if last >= colex.count(k) {
                return Err(Error::invalid("edges", "rank out of range"));
            }
        }
        Ok(Self::from_parts(k, n, ranks, colex))
    }

    pub fn empty(k: usize, n: usize) -> Result<Self> {
        Self::from_sorted_ranks(k, n, Vec::new())
    }

    pub fn complete(k: usize, n: usize) -> Result<Self> {
        let colex = Colex::new(n, k)?;
        Self::from_sorted_ranks(k, n, (0..colex.count(k)).collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.ranks.len()
    }

    /// Number of k-subsets of the vertex set, `C(n, k)`.
    pub fn slots(&self) -> u64 {
        self.colex.count(self.k)
    }

    pub fn colex(&self) -> &Colex {
        &self.colex
    }

    /// Sorted colex ranks of the edges.
    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    fn dense(&self) -> Option<&Vec<u64>> {
        self.dense
            .get_or_init(|| {
                let slots = self.slots();
                (slots <= DENSE_INDEX_LIMIT).then(|| {
                    let mut bits = vec![0u64; slots.div_ceil(64) as usize];
                    for &r in &self.ranks {
                        bits[(r / 64) as usize] |= 1 << (r % 64);
                    }
                    bits
                })
            })
            .as_ref()
    }

    #[inline]
    pub fn contains_rank(&self, rank: u64) -> bool {
        match self.dense() {
            Some(bits) => bits[(rank / 64) as usize] >> (rank % 64) & 1 == 1,
            None => self.ranks.binary_search(&rank).is_ok(),
        }
    }

    /// Membership of a sorted vertex list (no range check).
    #[inline]
    pub fn contains_sorted(&self, sorted: &[u32]) -> bool {
        self.contains_rank(self.colex.rank(sorted))
    }

    /// Membership of an arbitrary vertex list: sorts a copy and reports
    /// `false` on repeated vertices.
    pub fn contains(&self, verts: &[u32]) -> bool {
        if verts.len() != self.k || verts.iter().any(|&v| v as usize >= self.n) {
            return false;
        }
        let mut buf = verts.to_vec();
        buf.sort_unstable();
        if buf.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        self.contains_sorted(&buf)
    }

    /// Edges as sorted vertex lists, in colex order.
    pub fn edges(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.ranks.iter().map(move |&r| {
            let mut v = Vec::with_capacity(self.k);
            self.colex.unrank(r, self.k, &mut v);
            v
        })
    }

    /// All edge vertices in one flat buffer, `k` entries per edge.
    pub fn flat_edges(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k * self.ranks.len());
        let mut buf = Vec::with_capacity(self.k);
        for &r in &self.ranks {
            self.colex.unrank(r, self.k, &mut buf);
            out.extend_from_slice(&buf);
        }
        out
    }

    /// For every vertex, the sorted list of vertices sharing an edge with it.
    pub fn neighbours(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        let flat = self.flat_edges();
        for e in flat.chunks_exact(self.k.max(1)) {
            for &a in e {
                for &b in e {
                    if a != b {
                        adj[a as usize].push(b);
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    pub fn complement(&self) -> Self {
        let slots = self.slots();
        let mut out = Vec::with_capacity((slots as usize).saturating_sub(self.ranks.len()));
        let mut it = self.ranks.iter().peekable();
        for r in 0..slots {
            if it.peek() == Some(&&r) {
                it.next();
            } else {
                out.push(r);
            }
        }
        Self::from_parts(self.k, self.n, out, self.colex.clone())
    }

    /// Same vertex set, the given subset of edges removed.
    pub fn without_ranks(&self, removed: &[u64]) -> Self {
        let ranks = self
            .ranks
            .iter()
            .copied()
            .filter(|r| removed.binary_search(r).is_err())
            .collect();
        Self::from_parts(self.k, self.n, ranks, self.colex.clone())
    }

    /// Relabels vertices by `perm` (new label of vertex v is `perm[v]`).
    pub fn relabel(&self, perm: &[u32]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut ranks: Vec<u64> = self
            .edges()
            .map(|e| {
                let mut m: Vec<u32> = e.iter().map(|&v| perm[v as usize]).collect();
                m.sort_unstable();
                self.colex.rank(&m)
            })
            .collect();
        ranks.sort_unstable();
        Self::from_parts(self.k, self.n, ranks, self.colex.clone())
    }

    /// Sub-hypergraph induced on `verts` (relabelled `0..verts.len()` in the
    /// given order).
    pub fn induced(&self, verts: &[u32]) -> Result<Self> {
        let m = verts.len();
        let mut out = Vec::new();
        for_each_subset(m, self.k, |s| {
            let image: Vec<u32> = s.iter().map(|&i| verts[i as usize]).collect();
            if self.contains(&image) {
                out.push(s.to_vec());
            }
        });
        Self::new(self.k, m, out)
    }

    pub fn to_wire(&self) -> HypergraphJson {
        self.into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&HypergraphJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: HypergraphJson = serde_json::from_str(s)?;
        wire.try_into()
    }
}

/// Wire format: `{"k": int, "n": int, "edges": [[v, ...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphJson {
    pub k: usize,
    pub n: usize,
    pub edges: Vec<Vec<u32>>,
}

impl From<&Hypergraph> for HypergraphJson {
    fn from(h: &Hypergraph) -> Self {
        let mut edges: Vec<Vec<u32>> = h.edges().collect();
        edges.sort_unstable();
        HypergraphJson {
            k: h.k,
            n: h.n,
            edges,
        }
    }
}

impl TryFrom<HypergraphJson> for Hypergraph {
    type Error = Error;

    fn try_from(w: HypergraphJson) -> Result<Self> {
        for (i, e) in w.edges.iter().enumerate() {
            if e.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::invalid(
                    format!("edges[{i}]"),
                    "vertices must be strictly ascending",
                ));
            }
        }
        Hypergraph::new(w.k, w.n, &w.edges)
    }
}

impl Serialize for Hypergraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HypergraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypergraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = HypergraphJson::deserialize(d)?;
        Hypergraph::try_from(wire).map_err(serde::de::Error::custom)
    }
}

/// A partition of the vertex set of some hypergraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    base: usize,
    blocks: Vec<Vec<u32>>,
}

impl VertexPartition {
    pub fn new(base: usize, blocks: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = vec![false; base];
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::invalid(format!("blocks[{i}]"), "empty block"));
            }
            for &v in b {
                let slot = seen.get_mut(v as usize).ok_or_else(|| {
                    Error::invalid(format!("blocks[{i}]"), format!("vertex {v} out of range"))
                })?;
                if *slot {
                    return Err(Error::invalid(
                        format!("blocks[{i}]"),
                        format!("vertex {v} in two blocks"),
                    ));
                }
                *slot = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::invalid("blocks", format!("vertex {v} not covered")));
        }
        Ok(VertexPartition { base, blocks })
    }

    /// From a restricted-growth string (`rgs[v]` is the block of `v`).
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let count = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (v, &b) in rgs.iter().enumerate() {
            blocks[b].push(v as u32);
        }
        VertexPartition {
            base: rgs.len(),
            blocks,
        }
    }

    pub fn singletons(base: usize) -> Self {
        Self::from_rgs(&(0..base).collect::<Vec<_>>())
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// `base − |blocks|`.
    pub fn height(&self) -> usize {
        self.base - self.blocks.len()
    }

    fn block_of(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.base];
        for (i, b) in self.blocks.iter().enumerate() {
            for &v in b {
                out[v as usize] = i as u32;
            }
        }
        out
    }
}

/// Result of collapsing a hypergraph along a vertex partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quotient {
    Hypergraph(Hypergraph),
    /// Some block meets some edge in two or more vertices.
    Degenerate,
}

/// The hypergraph `F(P)` on the blocks of `P`, or [`Quotient::Degenerate`].
pub fn quotient(f: &Hypergraph, p: &VertexPartition) -> Result<Quotient> {
    if p.base() != f.n() {
        return Err(Error::ShapeMismatch {
            field: "partition",
            detail: format!("partition of {} vertices, hypergraph has {}", p.base(), f.n()),
        });
    }
    let block = p.block_of();
    let mut edges = Vec::with_capacity(f.edge_count());
    for e in f.edges() {
        let mut image: Vec<u32> = e.iter().map(|&v| block[v as usize]).collect();
        image.sort_unstable();
        if image.windows(2).any(|w| w[0] == w[1]) {
            return Ok(Quotient::Degenerate);
        }
        edges.push(image);
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(Quotient::Hypergraph(Hypergraph::new(
        f.k(),
        p.blocks().len(),
        edges,
    )?))
}

/// The `t`-fold equitable blowup: vertex `v` becomes `v·t, .., v·t + t − 1`
/// and every edge becomes the complete k-partite hypergraph on its groups.
pub fn blowup(h: &Hypergraph, t: usize) -> Result<Hypergraph> {
    if t == 0 {
        return Err(Error::invalid("t", "blowup factor must be at least 1"));
    }
    let n = h
        .n()
        .checked_mul(t)
        .filter(|&n| n <= u32::MAX as usize)
        .ok_or_else(|| Error::cap("blowup vertex count", (h.n() as u128) * t as u128, u32::MAX as u128))?;
    let k = h.k();
    let colex = Arc::new(Colex::new(n, k)?);
    let bundle = (t as u128).pow(k as u32) * h.edge_count() as u128;
    if bundle > 1 << 32 {
        return Err(Error::cap("blowup edge count", bundle, 1 << 32));
    }
    let mut ranks = Vec::with_capacity(bundle as usize);
    let mut offs = vec![0usize; k];
    let mut img = vec![0u32; k];
    for e in h.edges() {
        offs.iter_mut().for_each(|o| *o = 0);
        loop {
            for j in 0..k {
                img[j] = e[j] * t as u32 + offs[j] as u32;
            }
            ranks.push(colex.rank(&img));
            let mut j = 0;
            while j < k {
                offs[j] += 1;
                if offs[j] < t {
                    break;
                }
                offs[j] = 0;
                j += 1;
            }
            if j == k {
                break;
            }
        }
    }
    ranks.sort_unstable();
    Ok(Hypergraph::from_parts(k, n, ranks, colex))
}
