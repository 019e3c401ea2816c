//! Canonical forms for small hypergraphs, enumeration of test families, and
//! density equivalence.
//!
//! The canonical form is the lexicographically smallest sorted edge-rank list
//! over all vertex orderings compatible with an iterated colour refinement.
//! The refinement colours are isomorphism invariants, so restricting the
//! search to orderings that list colour classes in colour order still yields
//! a canonical representative.

use std::collections::{BTreeMap, BTreeSet};

use crate::combinatorics::{binomial, for_each_subset, permutations, Colex};
use crate::error::{same_arity, Error, Result};
use crate::hom::t;
use crate::hypergraph::{blowup, Hypergraph};
use crate::rng::StreamKey;

/// Largest vertex count accepted by [`canonical_form`].
pub const MAX_CANONICAL_VERTICES: usize = 10;

/// Sizes with at most this many k-subsets are enumerated exhaustively.
pub const EXHAUSTIVE_SLOTS: u128 = 15;

/// Canonical representative: arity, vertex count and sorted colex ranks.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub k: usize,
    pub n: usize,
    pub ranks: Vec<u64>,
}

impl CanonicalForm {
    pub fn to_hypergraph(&self) -> Hypergraph {
        Hypergraph::from_sorted_ranks(self.k, self.n, self.ranks.clone()).expect("valid form")
    }
}

fn refine_colours(h: &Hypergraph) -> Vec<usize> {
    let n = h.n();
    let edges: Vec<Vec<u32>> = h.edges().collect();
    let mut colour = vec![0usize; n];
    let mut classes = 1;
    loop {
        let mut sig: Vec<(usize, Vec<Vec<usize>>)> = (0..n).map(|v| (colour[v], Vec::new())).collect();
        for e in &edges {
            for &v in e {
                let mut others: Vec<usize> = e
                    .iter()
                    .filter(|&&u| u != v)
                    .map(|&u| colour[u as usize])
                    .collect();
                others.sort_unstable();
                sig[v as usize].1.push(others);
            }
        }
        for s in &mut sig {
            s.1.sort();
        }
        let distinct: BTreeSet<&(usize, Vec<Vec<usize>>)> = sig.iter().collect();
        let index: BTreeMap<&(usize, Vec<Vec<usize>>), usize> =
            distinct.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let next: Vec<usize> = sig.iter().map(|s| index[s]).collect();
        let count = distinct.len();
        colour = next;
        if count == classes {
            return colour;
        }
        classes = count;
    }
}

/// Canonical form of `h`; isomorphic inputs give equal forms.
pub fn canonical_form(h: &Hypergraph) -> Result<CanonicalForm> {
    let n = h.n();
    if n > MAX_CANONICAL_VERTICES {
        return Err(Error::cap(
            "vertices for canonical form",
            n as u128,
            MAX_CANONICAL_VERTICES as u128,
        ));
    }
    let colour = refine_colours(h);
    let classes = colour.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); classes];
    for (v, &c) in colour.iter().enumerate() {
        members[c].push(v as u32);
    }
    // positions [offset_c, offset_c + |class c|) belong to class c
    let perms: Vec<Vec<Vec<usize>>> = members.iter().map(|m| permutations(m.len())).collect();
    let colex = Colex::new(n, h.k())?;
    let edges = h.flat_edges();
    let k = h.k();
    let mut best: Option<Vec<u64>> = None;
    let mut choice = vec![0usize; classes];
    let mut position = vec![0u32; n];
    let mut ranks = Vec::with_capacity(h.edge_count());
    let mut buf = Vec::with_capacity(k);
    loop {
        let mut offset = 0u32;
        for c in 0..classes {
            for (i, &p) in perms[c][choice[c]].iter().enumerate() {
                position[members[c][i] as usize] = offset + p as u32;
            }
            offset += members[c].len() as u32;
        }
        ranks.clear();
        for e in edges.chunks_exact(k) {
            buf.clear();
            buf.extend(e.iter().map(|&v| position[v as usize]));
            buf.sort_unstable();
            ranks.push(colex.rank(&buf));
        }
        ranks.sort_unstable();
        if best.as_ref().is_none_or(|b| ranks < *b) {
            best = Some(ranks.clone());
        }
        // odometer over the per-class permutation choices
        let mut c = 0;
        loop {
            if c == classes {
                return Ok(CanonicalForm {
                    k,
                    n,
                    ranks: best.unwrap_or_default(),
                });
            }
            choice[c] += 1;
            if choice[c] < perms[c].len() {
                break;
            }
            choice[c] = 0;
            c += 1;
        }
    }
}

pub fn is_isomorphic(a: &Hypergraph, b: &Hypergraph) -> Result<bool> {
    if a.k() != b.k() || a.n() != b.n() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// All k-uniform hypergraphs on exactly `v` vertices up to isomorphism, in
/// increasing canonical order. Requires `C(v, k) ≤ EXHAUSTIVE_SLOTS`.
pub fn enumerate_canonical(k: usize, v: usize) -> Result<Vec<Hypergraph>> {
    let slots = binomial(v as u64, k as u64).unwrap_or(u128::MAX);
    if slots > EXHAUSTIVE_SLOTS {
        return Err(Error::cap("k-subsets for exhaustive enumeration", slots, EXHAUSTIVE_SLOTS));
    }
    let mut seen = BTreeSet::new();
    for mask in 0u64..1 << slots {
        let ranks: Vec<u64> = (0..slots as u64).filter(|b| mask >> b & 1 == 1).collect();
        let h = Hypergraph::from_sorted_ranks(k, v, ranks)?;
        seen.insert(canonical_form(&h)?);
    }
    Ok(seen.iter().map(CanonicalForm::to_hypergraph).collect())
}

/// How a family of test hypergraphs was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyMode {
    Exhaustive,
    /// Some sizes were sampled with edge probability 1/2.
    Sampled,
}

/// Test hypergraphs with `k ≤ |V(F)| ≤ max_vertices`: every isomorphism type
/// for sizes with at most [`EXHAUSTIVE_SLOTS`] k-subsets, `per_size` seeded
/// random ones (edge probability 1/2) beyond. Edgeless members are dropped
/// when `with_edges` is set.
pub fn test_family(
    k: usize,
    max_vertices: usize,
    per_size: usize,
    seed: u64,
    with_edges: bool,
) -> Result<(Vec<Hypergraph>, FamilyMode)> {
    let key = StreamKey::new(seed).derive(0xfa31);
    let mut out = Vec::new();
    let mut mode = FamilyMode::Exhaustive;
    for v in k..=max_vertices {
        let slots = binomial(v as u64, k as u64).unwrap_or(u128::MAX);
        if slots <= EXHAUSTIVE_SLOTS {
            out.extend(enumerate_canonical(k, v)?);
        } else {
            mode = FamilyMode::Sampled;
            let sub = key.derive(v as u64);
            let mut counter = 0;
            for _ in 0..per_size {
                let mut edges = Vec::new();
                for_each_subset(v, k, |s| {
                    if sub.at(counter) >> 63 == 1 {
                        edges.push(s.to_vec());
                    }
                    counter += 1;
                });
                out.push(Hypergraph::new(k, v, edges)?);
            }
        }
    }
    if with_edges {
        out.retain(|f| f.edge_count() > 0);
    }
    Ok((out, mode))
}

/// Outcome of [`density_equivalent`].
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub equivalent: bool,
    /// True when decided by isomorphism of the common blowups; false when
    /// only the necessary condition over a finite family of `F` was tested.
    pub exact: bool,
    /// An `F` separating the two inputs, if one was found.
    pub witness: Option<Hypergraph>,
}

/// Density equivalence: `H1` and `H2` have isomorphic equitable blowups.
///
/// When the `|V(H2)|`-fold blowup of `H1` (and the `|V(H1)|`-fold blowup of
/// `H2`) has at most `check_size` vertices they are compared up to
/// isomorphism. Otherwise `t(F, ·)` is compared over [`test_family`] with
/// `|V(F)| ≤ check_size`, which can only refute equivalence.
pub fn density_equivalent(h1: &Hypergraph, h2: &Hypergraph, check_size: usize) -> Result<Equivalence> {
    same_arity(h1.k(), h2.k())?;
    if h1.n() == 0 || h2.n() == 0 {
        let eq = h1.n() == h2.n();
        return Ok(Equivalence { equivalent: eq, exact: true, witness: None });
    }
    let size = h1.n() * h2.n();
    if size <= check_size.min(MAX_CANONICAL_VERTICES) {
        let b1 = blowup(h1, h2.n())?;
        let b2 = blowup(h2, h1.n())?;
        return Ok(Equivalence {
            equivalent: is_isomorphic(&b1, &b2)?,
            exact: true,
            witness: None,
        });
    }
    let (family, _) = test_family(h1.k(), check_size, 32, 0, true)?;
    for f in family {
        if t(&f, h1)? != t(&f, h2)? {
            return Ok(Equivalence { equivalent: false, exact: false, witness: Some(f) });
        }
    }
    Ok(Equivalence { equivalent: true, exact: false, witness: None })
}
