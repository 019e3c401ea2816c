//! The random hypergraph models `𝔾(H, n)`, `𝔾(W, n)` and `𝔾(W, ℋ, n)`.
//!
//! A random coordinate system assigns one uniform `X_S` to every subset `S`
//! of `[n]` with `1 ≤ |S| ≤ k`. Here `X_S` is a pure function of
//! `(seed, |S|, colex rank of S)`, so samples do not depend on evaluation
//! order and any single value can be recomputed on its own.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{for_each_subset, Colex};
use crate::error::{Error, Result};
use crate::hyperpartition::Hyperpartition;
use crate::hypergraph::Hypergraph;
use crate::hypergraphon::Hypergraphon;
use crate::rng::{mix64, unit_in_level, unit_level, unit_to_f64, StreamKey};

/// Lower-simplex values are cached up to this many subsets per size.
const MAX_CACHED_SIMPLICES: u64 = 1 << 27;

/// Uniform draw from `0..m` (`m > 0`) by the multiply-shift rule.
#[inline]
pub fn below(v: u64, m: u64) -> u64 {
    ((v as u128 * m as u128) >> 64) as u64
}

/// A seeded random coordinate system on `[n]`, optionally confined to a
/// hyperpartition: with `ℋ` given, `X_S` is uniform on
/// `[(g(S)-1)/l, g(S)/l)`.
#[derive(Clone, Debug)]
pub struct CoordinateSystem<'a> {
    n: usize,
    k: usize,
    /// One stream per subset size.
    keys: Vec<StreamKey>,
    colex: Colex,
    hp: Option<&'a Hyperpartition>,
}

impl<'a> CoordinateSystem<'a> {
    pub fn new(n: usize, k: usize, seed: u64, hp: Option<&'a Hyperpartition>) -> Result<Self> {
        if let Some(hp) = hp {
            if hp.n() != n || hp.k() != k {
                return Err(Error::ShapeMismatch {
                    field: "HP",
                    detail: format!("hyperpartition has n={}, k={}; expected n={n}, k={k}", hp.n(), hp.k()),
                });
            }
        }
        Ok(CoordinateSystem {
            n,
            k,
            keys: {
                let key = StreamKey::new(seed).derive(0x7a);
                (0..=k as u64).map(|r| key.derive(r)).collect()
            },
            colex: Colex::new(n, k)?,
            hp,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `X_S` as a 64-bit fixed-point fraction, for a sorted subset `S`.
    #[inline]
    pub fn unit(&self, sorted: &[u32]) -> u64 {
        let r = sorted.len();
        let rank = self.colex.rank(sorted);
        self.unit_by_rank(r, rank)
    }

    #[inline]
    fn unit_by_rank(&self, r: usize, rank: u64) -> u64 {
        let raw = self.keys[r].at(rank);
        match self.hp {
            None => raw,
            Some(hp) => unit_in_level(raw, hp.labels(r)[rank as usize] as usize, hp.l()),
        }
    }

    /// `X_S` as a real in `[0,1)`.
    pub fn value(&self, sorted: &[u32]) -> f64 {
        unit_to_f64(self.unit(sorted))
    }
}

/// `𝔾(H, n)`: `n` vertices of `H` drawn independently with replacement; a
/// k-set is an edge iff its chosen vertices are distinct and form an edge.
pub fn sample_vertex(h: &Hypergraph, n: usize, seed: u64) -> Result<Hypergraph> {
    if h.n() == 0 {
        return Err(Error::invalid("H", "needs at least one vertex"));
    }
    let key = StreamKey::new(seed).derive(0x76);
    let chosen: Vec<u32> = (0..n as u64).map(|i| below(key.at(i), h.n() as u64) as u32).collect();
    let k = h.k();
    let mut ranks = Vec::new();
    let mut img = Vec::with_capacity(k);
    let mut rank = 0u64;
    for_each_subset(n, k, |s| {
        img.clear();
        img.extend(s.iter().map(|&i| chosen[i as usize]));
        if h.contains(&img) {
            ranks.push(rank);
        }
        rank += 1;
    });
    Hypergraph::from_sorted_ranks(k, n, ranks)
}

/// Where a sample came from; replaying `(source, seed)` reproduces it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    /// Fingerprint of the hypergraphon (or its predicate's name).
    pub w: String,
    pub hp: Option<String>,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRecord {
    pub sample: Hypergraph,
    pub seed: u64,
    pub source: Source,
}

/// The sidecar written next to a sampled hypergraph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub seed: u64,
    pub source: Source,
    pub edges: usize,
}

impl SampleRecord {
    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            seed: self.seed,
            source: self.source.clone(),
            edges: self.sample.edge_count(),
        }
    }
}

fn fingerprint(text: &str) -> String {
    let h = text
        .bytes()
        .fold(0x243f_6a88_85a3_08d3u64, |acc, b| mix64(acc ^ b as u64));
    format!("{h:016x}")
}

fn check_hp(w: &Hypergraphon, hp: Option<&Hyperpartition>) -> Result<()> {
    match (w, hp) {
        (_, None) => Ok(()),
        (Hypergraphon::Step(step), Some(hp)) if step.l() == hp.l() => Ok(()),
        (Hypergraphon::Step(step), Some(hp)) => Err(Error::ShapeMismatch {
            field: "HP",
            detail: format!("hyperpartition has l={}, W has l={}", hp.l(), step.l()),
        }),
        (Hypergraphon::General(_), Some(_)) => {
            Err(Error::invalid("HP", "hyperpartition sampling needs a step hypergraphon"))
        }
    }
}

/// Walks every k-subset of `[n]`, grouped by largest vertex (so each group is
/// a colex interval), and folds `(rank, is_edge)` into one accumulator per
/// group.
fn scan_w<T: Send>(
    w: &Hypergraphon,
    n: usize,
    seed: u64,
    hp: Option<&Hyperpartition>,
    init: impl Fn() -> T + Sync,
    fold: impl Fn(&mut T, u64, bool) + Sync,
) -> Result<Vec<T>> {
    check_hp(w, hp)?;
    let k = w.k();
    let coords = CoordinateSystem::new(n, k, seed, hp)?;
    let colex = &coords.colex;
    // cache the values of every lower simplex
    let mut lower: Vec<Vec<u64>> = Vec::with_capacity(k);
    for r in 1..k {
        let count = colex.count(r);
        if count > MAX_CACHED_SIMPLICES {
            return Err(Error::cap("lower simplices to sample", count as u128, MAX_CACHED_SIMPLICES as u128));
        }
        let units: Vec<u64> = (0..count)
            .into_par_iter()
            .map(|rank| coords.unit_by_rank(r, rank))
            .collect();
        if let Some(hp) = hp {
            let ok = units
                .iter()
                .zip(hp.labels(r))
                .all(|(&u, &g)| unit_level(u, hp.l()) == g as usize);
            assert!(ok, "coordinate left its hyperpartition slot");
        }
        lower.push(units);
    }
    let dim = (1usize << k) - 1;
    let positions: Vec<Vec<usize>> = (1..dim)
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    // a step W only needs levels: precompute the lower part of each cell code
    let step = match w {
        Hypergraphon::Step(s) => Some(s),
        Hypergraphon::General(_) => None,
    };
    let key = coords.keys[k];
    let top_levels = hp.map(|hp| (hp.labels(k), hp.l()));
    Ok((k.saturating_sub(1)..n)
        .into_par_iter()
        .map(|m| {
            let mut acc = init();
            let mut s = vec![0u32; k];
            let mut u = vec![0u64; dim];
            let mut top = colex.binom(m, k);
            for_each_subset(m, k - 1, |head| {
                s[..k - 1].copy_from_slice(head);
                s[k - 1] = m as u32;
                for (slot, pos) in u[..dim - 1].iter_mut().zip(&positions) {
                    let mut rank = 0u64;
                    for (i, &p) in pos.iter().enumerate() {
                        rank += colex.binom(s[p] as usize, i + 1);
                    }
                    *slot = lower[pos.len() - 1][rank as usize];
                }
                let raw = key.at(top);
                u[dim - 1] = match top_levels {
                    None => raw,
                    Some((g, l)) => unit_in_level(raw, g[top as usize] as usize, l),
                };
                let edge = match step {
                    Some(st) => {
                        let l = st.l();
                        let code = u.iter().rev().fold(0, |c, &x| c * l + unit_level(x, l));
                        st.boxes().contains_code(code)
                    }
                    None => w.contains_units(&u),
                };
                fold(&mut acc, top, edge);
                top += 1;
            });
            acc
        })
        .collect())
}

/// `𝔾(W, n)`, or `𝔾(W, ℋ, n)` when `hp` is given.
pub fn sample_w(w: &Hypergraphon, n: usize, seed: u64, hp: Option<&Hyperpartition>) -> Result<SampleRecord> {
    let per_top = scan_w(w, n, seed, hp, Vec::new, |out: &mut Vec<u64>, rank, edge| {
        if edge {
            out.push(rank)
        }
    })?;
    let ranks: Vec<u64> = per_top.into_iter().flatten().collect();
    let sample = Hypergraph::from_sorted_ranks(w.k(), n, ranks)?;
    let w_id = match w {
        Hypergraphon::Step(step) => format!("step:{}", fingerprint(&step.to_json())),
        Hypergraphon::General(g) => format!("predicate:{}", g.name()),
    };
    Ok(SampleRecord {
        sample,
        seed,
        source: Source {
            w: w_id,
            hp: hp.map(|hp| format!("hp:{}", fingerprint(&hp.to_json()))),
            n,
        },
    })
}

/// `|E(𝔾(W, n))|` for the same draw as [`sample_w`], without storing edges.
pub fn edge_count_w(w: &Hypergraphon, n: usize, seed: u64, hp: Option<&Hyperpartition>) -> Result<u64> {
    let per_top = scan_w(w, n, seed, hp, || 0u64, |c, _, edge| *c += edge as u64)?;
    Ok(per_top.into_iter().sum())
}

/// A uniform injective map `[v] → [n]` (partial Fisher-Yates on a counter
/// stream).
pub fn injective_map(v: usize, n: usize, key: StreamKey) -> Vec<u32> {
    debug_assert!(v <= n);
    let mut swaps: std::collections::HashMap<u32, u32> = std::collections::HashMap::with_capacity(2 * v);
    let mut image = Vec::with_capacity(v);
    for i in 0..v {
        let j = i as u32 + below(key.at(i as u64), (n - i) as u64) as u32;
        let at_j = *swaps.get(&j).unwrap_or(&j);
        let at_i = *swaps.get(&(i as u32)).unwrap_or(&(i as u32));
        swaps.insert(j, at_i);
        image.push(at_j);
    }
    image
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraphon::{Builtin, StepHypergraphon};

    fn builtin(kind: Builtin, k: usize) -> Hypergraphon {
        StepHypergraphon::builtin(kind, k).unwrap().into()
    }

    #[test]
    fn full_and_empty() {
        let s = sample_w(&builtin(Builtin::Full, 3), 7, 1, None).unwrap();
        assert_eq!(s.sample, Hypergraph::complete(3, 7).unwrap());
        let s = sample_w(&builtin(Builtin::Empty, 2), 7, 1, None).unwrap();
        assert_eq!(s.sample.edge_count(), 0);
        let h = Hypergraph::empty(2, 5).unwrap();
        assert_eq!(sample_vertex(&h, 9, 3).unwrap().edge_count(), 0);
    }

    #[test]
    fn deterministic_replay() {
        let w = builtin(Builtin::Example1, 3);
        let a = sample_w(&w, 12, 99, None).unwrap();
        let b = sample_w(&w, 12, 99, None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.sample, sample_w(&w, 12, 100, None).unwrap().sample);
    }

    #[test]
    fn hyperpartition_sampling_stays_in_slots() {
        let hp = Hyperpartition::random(10, 2, 2, 5).unwrap();
        let coords = CoordinateSystem::new(10, 2, 8, Some(&hp)).unwrap();
        for_each_subset(10, 2, |s| {
            let x = coords.value(s);
            let g = hp.label_of(s) as f64;
            assert!(g / 2.0 <= x && x < (g + 1.0) / 2.0);
        });
        // with matching l the sample is the cell union
        let w = builtin(Builtin::Example1, 2);
        let Hypergraphon::Step(step) = &w else { unreachable!() };
        let s = sample_w(&w, 10, 8, Some(&hp)).unwrap();
        assert_eq!(s.sample, hp.cells_union(step.boxes()).unwrap());
        assert!(s.source.hp.is_some());
    }

    #[test]
    fn injective_maps_are_injective() {
        let key = StreamKey::new(4);
        for t in 0..50 {
            let mut m = injective_map(6, 8, key.derive(t));
            m.sort_unstable();
            m.dedup();
            assert_eq!(m.len(), 6);
            assert!(m.iter().all(|&x| x < 8));
        }
    }
}
