//! Brute-force oracles and generators shared by the integration tests.
//!
//! The oracles here deliberately avoid the library's search code: they run
//! over every map or every labelling.

#![allow(dead_code)]

use hyperlimits::combinatorics::for_each_subset;
use hyperlimits::hyperpartition::{CellCoordinate, CombinatorialStructure, Hyperpartition};
use hyperlimits::rational::{ratio, Rational};
use hyperlimits::Hypergraph;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Each k-set is an edge with probability `p`.
pub fn random_hypergraph(rng: &mut StdRng, k: usize, n: usize, p: f64) -> Hypergraph {
    let mut edges = Vec::new();
    for_each_subset(n, k, |s| {
        if rng.gen_bool(p) {
            edges.push(s.to_vec());
        }
    });
    Hypergraph::new(k, n, edges).unwrap()
}

/// Symmetrization of a random set of cells.
pub fn random_structure(rng: &mut StdRng, k: usize, l: usize, p: f64) -> CombinatorialStructure {
    let space = l.pow((1 << k) - 1);
    let cells: Vec<CellCoordinate> = (0..space)
        .filter(|_| rng.gen_bool(p))
        .map(|c| CellCoordinate::from_code(k, l, c))
        .collect();
    CombinatorialStructure::symmetrized(k, l, cells).unwrap()
}

pub fn random_hp(rng: &mut StdRng, n: usize, k: usize, l: usize) -> Hyperpartition {
    Hyperpartition::random(n, k, l, rng.gen()).unwrap()
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

/// Counts maps `V(F) → V(H)` by running over all `n^v` of them.
pub fn brute_count(f: &Hypergraph, h: &Hypergraph, injective: bool, induced: bool) -> u128 {
    let (v, n) = (f.n(), h.n());
    if n == 0 {
        return (v == 0) as u128;
    }
    let mut image = vec![0u32; v];
    let mut total = 0u128;
    let mut non_edges = Vec::new();
    if induced {
        for_each_subset(v, f.k(), |s| {
            if !f.contains_sorted(s) {
                non_edges.push(s.to_vec());
            }
        });
    }
    let edges: Vec<Vec<u32>> = f.edges().collect();
    loop {
        let distinct = sorted(image.clone()).windows(2).all(|w| w[0] != w[1]);
        if !injective || distinct {
            let ok_edges = edges.iter().all(|e| {
                let img = sorted(e.iter().map(|&x| image[x as usize]).collect());
                img.windows(2).all(|w| w[0] != w[1]) && h.contains_sorted(&img)
            });
            let ok_non = non_edges.iter().all(|e| {
                let img = sorted(e.iter().map(|&x| image[x as usize]).collect());
                img.windows(2).any(|w| w[0] == w[1]) || !h.contains_sorted(&img)
            });
            if ok_edges && ok_non {
                total += 1;
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == v {
                return total;
            }
            image[i] += 1;
            if (image[i] as usize) < n {
                break;
            }
            image[i] = 0;
            i += 1;
        }
    }
}

pub fn brute_t(f: &Hypergraph, h: &Hypergraph) -> Rational {
    ratio(brute_count(f, h, false, false), (h.n() as u128).pow(f.n() as u32))
}

/// `t(F, 𝒞)` (or the induced version) by running over every labelling of
/// the nonempty subsets of `V(F)` of size at most k.
pub fn brute_structure_density(f: &Hypergraph, c: &CombinatorialStructure, induced: bool) -> Rational {
    let (k, l, v) = (f.k(), c.l(), f.n());
    let mut simplices: Vec<Vec<u32>> = Vec::new();
    for r in 1..=k {
        for_each_subset(v, r, |s| simplices.push(s.to_vec()));
    }
    let slot = |s: &[u32]| simplices.iter().position(|x| x == s).unwrap();
    let mut checks: Vec<(Vec<usize>, bool)> = Vec::new();
    for_each_subset(v, k, |e| {
        let inside = f.contains_sorted(e);
        if inside || induced {
            let faces = (1..1usize << k)
                .map(|mask| {
                    let sub: Vec<u32> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| e[i]).collect();
                    slot(&sub)
                })
                .collect();
            checks.push((faces, inside));
        }
    });
    let mut labels = vec![0u16; simplices.len()];
    let mut hits = 0u128;
    let total = (l as u128).pow(simplices.len() as u32);
    for _ in 0..total {
        let ok = checks.iter().all(|(faces, inside)| {
            let cell = CellCoordinate::new(k, faces.iter().map(|&s| labels[s]).collect()).unwrap();
            c.contains(&cell) == *inside
        });
        hits += ok as u128;
        for x in labels.iter_mut() {
            *x += 1;
            if (*x as usize) < l {
                break;
            }
            *x = 0;
        }
    }
    ratio(hits, total)
}

/// The k-edge on `[k]`.
pub fn single_edge(k: usize) -> Hypergraph {
    Hypergraph::new(k, k, [(0..k as u32).collect::<Vec<_>>()]).unwrap()
}

pub fn triangle() -> Hypergraph {
    Hypergraph::new(2, 3, [[0, 1], [1, 2], [0, 2]]).unwrap()
}

/// [`random_hypergraph`] on a uniformly chosen number of vertices.
pub fn random_sized(rng: &mut StdRng, k: usize, vertices: std::ops::RangeInclusive<usize>, p: f64) -> Hypergraph {
    let n = rng.gen_range(vertices);
    random_hypergraph(rng, k, n, p)
}
