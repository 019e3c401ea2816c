//! Homomorphism counts and densities between finite k-uniform hypergraphs.
//!
//! The counting kernel assigns the vertices of `F` one at a time (in an order
//! where each vertex tends to share an edge with an earlier one), draws
//! candidates from the neighbourhood of an already placed co-edge vertex, and
//! checks every constraint as soon as its last vertex is placed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{falling_factorial, for_each_subset, SetPartitions};
use crate::error::{same_arity, Error, Result};
use crate::hypergraph::{quotient, Hypergraph, Quotient, VertexPartition};
use crate::rational::{ratio, Rational};

/// Upper bound on `|V(F)|` for the partition-lattice inversion.
pub const MAX_INVERSION_VERTICES: usize = 10;

/// Map count limit for the plain enumeration oracle.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomMode {
    /// Every map `V(F) → V(H)` sending edges to edges.
    All,
    /// Injective homomorphisms, computed by inversion over the partition
    /// lattice of `V(F)`.
    Injective,
}

/// Which maps are counted by [`count_maps`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MapFilter {
    pub injective: bool,
    /// Non-edges of `F` (k-subsets of `V(F)`) must not land on edges of
    /// `H`; an image with a repeated vertex is not an edge.
    pub induced: bool,
}

impl MapFilter {
    pub const HOM: MapFilter = MapFilter { injective: false, induced: false };
    pub const INJECTIVE: MapFilter = MapFilter { injective: true, induced: false };
    pub const INDUCED: MapFilter = MapFilter { injective: false, induced: true };
    pub const INDUCED_INJECTIVE: MapFilter = MapFilter { injective: true, induced: true };
}

struct Plan {
    k: usize,
    /// Position → list of (sorted positions, must_be_edge) checked there.
    checks: Vec<Vec<(Vec<usize>, bool)>>,
    /// Position → an earlier position sharing an edge, if any.
    anchor: Vec<Option<usize>>,
    /// Position → vertex of `F`.
    order: Vec<usize>,
}

impl Plan {
    fn new(f: &Hypergraph, induced: bool) -> Self {
        let v = f.n();
        let k = f.k();
        let edges: Vec<Vec<u32>> = f.edges().collect();
        // greedy order: most edges into the placed set, ties by degree then index
        let mut degree = vec![0usize; v];
        for e in &edges {
            for &x in e {
                degree[x as usize] += 1;
            }
        }
        let mut placed = vec![false; v];
        let mut order = Vec::with_capacity(v);
        let mut links = vec![0usize; v];
        for _ in 0..v {
            let next = (0..v)
                .filter(|&x| !placed[x])
                .max_by_key(|&x| (links[x], degree[x], std::cmp::Reverse(x)))
                .unwrap();
            placed[next] = true;
            order.push(next);
            for e in &edges {
                if e.contains(&(next as u32)) {
                    for &x in e {
                        links[x as usize] += 1;
                    }
                }
            }
        }
        let mut pos = vec![0usize; v];
        for (i, &x) in order.iter().enumerate() {
            pos[x] = i;
        }
        let mut checks = vec![Vec::new(); v];
        let mut anchor = vec![None; v];
        let push = |sub: &[u32], is_edge: bool, checks: &mut Vec<Vec<(Vec<usize>, bool)>>| {
            let mut ps: Vec<usize> = sub.iter().map(|&x| pos[x as usize]).collect();
            ps.sort_unstable();
            let last = *ps.last().unwrap();
            checks[last].push((ps, is_edge));
        };
        for e in &edges {
            push(e, true, &mut checks);
            let ps: Vec<usize> = e.iter().map(|&x| pos[x as usize]).collect();
            for &a in &ps {
                for &b in &ps {
                    if b < a && anchor[a].is_none_or(|c: usize| b < c) {
                        anchor[a] = Some(b);
                    }
                }
            }
        }
        if induced {
            for_each_subset(v, k, |s| {
                if !f.contains_sorted(s) {
                    push(s, false, &mut checks);
                }
            });
        }
        Plan { k, checks, anchor, order }
    }
}

struct Search<'a> {
    plan: &'a Plan,
    h: &'a Hypergraph,
    adj: &'a [Vec<u32>],
    injective: bool,
    image: Vec<u32>,
    used: Vec<bool>,
    buf: Vec<u32>,
}

impl Search<'_> {
    fn ok_at(&mut self, i: usize) -> bool {
        for (ps, is_edge) in &self.plan.checks[i] {
            self.buf.clear();
            self.buf.extend(ps.iter().map(|&p| self.image[p]));
            self.buf.sort_unstable();
            // a collapsed k-set is never an edge of H
            if self.buf.windows(2).any(|w| w[0] == w[1]) {
                if *is_edge {
                    return false;
                }
                continue;
            }
            if self.h.contains_sorted(&self.buf) != *is_edge {
                return false;
            }
        }
        true
    }

    fn place(&mut self, i: usize, x: u32) -> u128 {
        if self.injective && self.used[x as usize] {
            return 0;
        }
        self.image[i] = x;
        if !self.ok_at(i) {
            return 0;
        }
        if self.injective {
            self.used[x as usize] = true;
        }
        let r = self.descend(i + 1);
        if self.injective {
            self.used[x as usize] = false;
        }
        r
    }

    fn descend(&mut self, i: usize) -> u128 {
        if i == self.image.len() {
            return 1;
        }
        let mut total = 0u128;
        match self.plan.anchor[i] {
            Some(a) => {
                let adj = self.adj;
                for &x in &adj[self.image[a] as usize] {
                    total += self.place(i, x);
                }
            }
            None => {
                for x in 0..self.h.n() as u32 {
                    total += self.place(i, x);
                }
            }
        }
        total
    }
}

/// Counts maps `V(F) → V(H)` passing `filter`, with every edge of `F` sent to
/// an edge of `H`.
pub fn count_maps(f: &Hypergraph, h: &Hypergraph, filter: MapFilter) -> Result<u128> {
    same_arity(f.k(), h.k())?;
    let v = f.n();
    if v == 0 {
        return Ok(1);
    }
    if filter.injective && v > h.n() {
        return Ok(0);
    }
    let plan = Plan::new(f, filter.induced);
    let adj = h.neighbours();
    let n = h.n() as u32;
    let new_search = || Search {
        plan: &plan,
        h,
        adj: &adj,
        injective: filter.injective,
        image: vec![0; v],
        used: vec![false; h.n()],
        buf: Vec::with_capacity(plan.k),
    };
    // first vertex never has an anchor; split its images across workers
    let total = if n >= 64 {
        (0..n)
            .into_par_iter()
            .map(|x| new_search().place(0, x))
            .sum()
    } else {
        let mut s = new_search();
        (0..n).map(|x| s.place(0, x)).sum()
    };
    Ok(total)
}

/// Every homomorphism `F → H` as an image vector (`image[v]` for vertex
/// `v` of `F`), in the search order; fails once more than `limit` exist.
pub fn homomorphisms(f: &Hypergraph, h: &Hypergraph, limit: usize) -> Result<Vec<Vec<u32>>> {
    same_arity(f.k(), h.k())?;
    let v = f.n();
    if v == 0 {
        return Ok(vec![Vec::new()]);
    }
    let plan = Plan::new(f, false);
    let adj = h.neighbours();
    let mut s = Search {
        plan: &plan,
        h,
        adj: &adj,
        injective: false,
        image: vec![0; v],
        used: vec![false; h.n()],
        buf: Vec::with_capacity(plan.k),
    };
    let mut out = Vec::new();
    fn walk(s: &mut Search, i: usize, out: &mut Vec<Vec<u32>>, limit: usize) -> bool {
        if i == s.image.len() {
            out.push(s.image.clone());
            return out.len() <= limit;
        }
        let candidates: Vec<u32> = match s.plan.anchor[i] {
            Some(a) => s.adj[s.image[a] as usize].clone(),
            None => (0..s.h.n() as u32).collect(),
        };
        for x in candidates {
            s.image[i] = x;
            if s.ok_at(i) && !walk(s, i + 1, out, limit) {
                return false;
            }
        }
        true
    }
    if !walk(&mut s, 0, &mut out, limit) {
        return Err(Error::cap("homomorphisms to enumerate", out.len() as u128, limit as u128));
    }
    // the search visits vertices in plan order; report by vertex of F
    let order = plan.order.clone();
    Ok(out
        .into_iter()
        .map(|img| {
            let mut by_vertex = vec![0; v];
            for (pos, &x) in img.iter().enumerate() {
                by_vertex[order[pos]] = x;
            }
            by_vertex
        })
        .collect())
}

/// `hom(F, H)` or `hom⁰(F, H)`.
pub fn hom(f: &Hypergraph, h: &Hypergraph, mode: HomMode) -> Result<u128> {
    match mode {
        HomMode::All => count_maps(f, h, MapFilter::HOM),
        HomMode::Injective => {
            let v = hom_injective_by_inversion(f, h)?;
            Ok(u128::try_from(v).expect("injective count is nonnegative"))
        }
    }
}

/// Möbius coefficient of the partition lattice between the discrete partition
/// and `blocks`: `∏ (−1)^{|B|−1} (|B|−1)!`. Its sign is `(−1)^{h(P)}`.
fn mobius(block_sizes: impl Iterator<Item = usize>) -> i128 {
    block_sizes
        .map(|s| {
            let mag: i128 = (1..s as i128).product();
            if s % 2 == 0 {
                -mag
            } else {
                mag
            }
        })
        .product()
}

/// `hom⁰(F, H) = Σ_P μ(P) hom(F(P), H)` over all partitions `P` of `V(F)`,
/// degenerate quotients contributing zero.
pub fn hom_injective_by_inversion(f: &Hypergraph, h: &Hypergraph) -> Result<i128> {
    same_arity(f.k(), h.k())?;
    if f.n() > MAX_INVERSION_VERTICES {
        return Err(Error::cap(
            "|V(F)| for partition inversion",
            f.n() as u128,
            MAX_INVERSION_VERTICES as u128,
        ));
    }
    let mut parts = SetPartitions::new(f.n());
    let mut total: i128 = 0;
    while let Some(rgs) = parts.next_rgs() {
        let p = VertexPartition::from_rgs(rgs);
        if let Quotient::Hypergraph(q) = quotient(f, &p)? {
            let coeff = mobius(p.blocks().iter().map(Vec::len));
            total += coeff * count_maps(&q, h, MapFilter::HOM)? as i128;
        }
    }
    Ok(total)
}

/// Plain enumeration of all `n^{|V(F)|}` maps, keeping the injective
/// homomorphisms. Independent of the search kernel; used as an oracle.
pub fn hom_injective_brute(f: &Hypergraph, h: &Hypergraph) -> Result<u128> {
    same_arity(f.k(), h.k())?;
    let v = f.n() as u32;
    let n = h.n() as u128;
    let total = n.checked_pow(v).filter(|&t| t <= BRUTE_FORCE_LIMIT);
    let Some(total) = total else {
        return Err(Error::cap("maps for brute force", u128::MAX, BRUTE_FORCE_LIMIT));
    };
    let edges: Vec<Vec<u32>> = f.edges().collect();
    let mut image = vec![0u32; v as usize];
    let mut count = 0;
    for code in 0..total {
        let mut c = code;
        for slot in image.iter_mut() {
            *slot = (c % n) as u32;
            c /= n;
        }
        let mut seen = image.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        if edges.iter().all(|e| {
            let img: Vec<u32> = e.iter().map(|&x| image[x as usize]).collect();
            h.contains(&img)
        }) {
            count += 1;
        }
    }
    Ok(count)
}

/// The four homomorphism densities of `F` in `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityRecord {
    #[serde(with = "crate::rational::string")]
    pub t: Rational,
    /// Injective variant; undefined when `|V(F)| > |V(H)|`.
    #[serde(with = "crate::rational::opt_string")]
    pub t0: Option<Rational>,
    #[serde(with = "crate::rational::string")]
    pub t_ind: Rational,
    #[serde(with = "crate::rational::opt_string")]
    pub t0_ind: Option<Rational>,
}

fn all_maps(f: &Hypergraph, h: &Hypergraph) -> Result<u128> {
    if h.n() == 0 && f.n() > 0 {
        return Err(Error::Undefined("density into a hypergraph without vertices"));
    }
    (h.n() as u128)
        .checked_pow(f.n() as u32)
        .ok_or_else(|| Error::cap("n^|V(F)|", u128::MAX, u128::MAX))
}

/// `t(F, H)`.
pub fn t(f: &Hypergraph, h: &Hypergraph) -> Result<Rational> {
    let den = all_maps(f, h)?;
    Ok(ratio(count_maps(f, h, MapFilter::HOM)?, den))
}

/// `t⁰(F, H)`: probability that a uniform injective map is a homomorphism.
pub fn t0(f: &Hypergraph, h: &Hypergraph) -> Result<Option<Rational>> {
    same_arity(f.k(), h.k())?;
    if f.n() > h.n() {
        return Ok(None);
    }
    let den = falling_factorial(h.n() as u64, f.n() as u64).expect("fits");
    Ok(Some(ratio(count_maps(f, h, MapFilter::INJECTIVE)?, den)))
}

/// `t_ind(F, H)`: the probability that `𝔾(H, |V(F)|)` is exactly `F`.
pub fn t_ind(f: &Hypergraph, h: &Hypergraph) -> Result<Rational> {
    let den = all_maps(f, h)?;
    Ok(ratio(count_maps(f, h, MapFilter::INDUCED)?, den))
}

pub fn densities(f: &Hypergraph, h: &Hypergraph) -> Result<DensityRecord> {
    same_arity(f.k(), h.k())?;
    let den = all_maps(f, h)?;
    let t = ratio(count_maps(f, h, MapFilter::HOM)?, den);
    let t_ind = ratio(count_maps(f, h, MapFilter::INDUCED)?, den);
    let (t0, t0_ind) = if f.n() <= h.n() {
        let inj = falling_factorial(h.n() as u64, f.n() as u64).expect("fits");
        (
            Some(ratio(count_maps(f, h, MapFilter::INJECTIVE)?, inj)),
            Some(ratio(count_maps(f, h, MapFilter::INDUCED_INJECTIVE)?, inj)),
        )
    } else {
        (None, None)
    };
    Ok(DensityRecord { t, t0, t_ind, t0_ind })
}
