//! Heuristic regular decompositions: an l-hyperpartition `ℋ` and structure
//! `𝒞` whose cell union approximates a given hypergraph.
//!
//! The search alternates three steps. For fixed `ℋ` the best `𝒞` takes an
//! orbit of cells iff strictly more than half of its k-sets are edges. Sweeps
//! then try to relabel single r-subsets, arity by arity in colex order. When
//! a sweep stalls, k-sets are re-sorted between top-arity levels so that
//! every cell of a stuck lower pattern is pure.

use std::collections::HashMap;

use serde::Serialize;

use crate::combinatorics::{binomial, for_each_subset, permutations, Colex};
use crate::error::{Error, Result};
use crate::hyperpartition::{CellCoordinate, CombinatorialStructure, Hyperpartition};
use crate::hypergraph::Hypergraph;
use crate::metrics::{hamming_density, max_regularity_deficit, CylinderOptions};
use crate::rational::{format, ratio, Rational};

/// Largest cell space the search keeps dense counters for.
const MAX_SEARCH_SPACE: usize = 1 << 22;

/// Largest number of lower labellings tried in exhaustive mode.
const MAX_EXHAUSTIVE_LABELLINGS: u128 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Local,
    /// Every labelling of the subsets of size below `k`, each completed
    /// optimally on the top arity.
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct RefineOptions {
    pub l: usize,
    pub iterations: usize,
    pub cylinder_samples: usize,
    pub seed: u64,
    /// Weight of the equitability deficit in the move objective.
    pub lambda: f64,
    pub mode: SearchMode,
}

impl RefineOptions {
    pub fn new(l: usize, seed: u64) -> Self {
        RefineOptions {
            l,
            iterations: 50,
            cylinder_samples: 64,
            seed,
            lambda: 0.1,
            mode: SearchMode::Local,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    #[serde(with = "crate::rational::string")]
    pub eps: Rational,
    #[serde(with = "crate::rational::string")]
    pub equitability: Rational,
    pub accepted: usize,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub hp: Hyperpartition,
    pub c: CombinatorialStructure,
    /// `|H Δ cells_union(ℋ, 𝒞)| / C(n, k)`.
    pub eps: Rational,
    /// `max(equitability, sampled regularity deficit)`.
    pub delta: Rational,
    pub equitability: Rational,
    pub regularity: Rational,
    pub seed: u64,
    pub mode: SearchMode,
    pub trace: Vec<TraceRow>,
}

impl DecompositionReport {
    /// JSON with the hyperpartition and structure in their file formats.
    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "hp": self.hp.to_wire(),
            "c": self.c.to_wire(),
            "eps": format(&self.eps),
            "delta": format(&self.delta),
            "equitability": format(&self.equitability),
            "regularity": format(&self.regularity),
            "seed": self.seed,
            "mode": self.mode,
            "trace": self.trace,
        });
        serde_json::to_string_pretty(&value).expect("serializable")
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,eps,equitability,accepted\n");
        for row in &self.trace {
            out += &std::format!(
                "{},{},{},{}\n",
                row.iteration,
                format(&row.eps),
                format(&row.equitability),
                row.accepted
            );
        }
        out
    }
}

/// Mutable search state: labels, the cell code of every k-set, and edge /
/// total counts per cell orbit.
struct State<'a> {
    h: &'a Hypergraph,
    hp: Hyperpartition,
    colex: Colex,
    k: usize,
    l: usize,
    /// Orbit representative of every cell code.
    orbit: Vec<u32>,
    /// `l^{2^k-2}`: weight of the top-arity level in a code.
    top_weight: usize,
    codes: Vec<u32>,
    edges: Vec<u32>,
    totals: Vec<u32>,
    /// `Some` when refitting against a fixed structure.
    fixed: Option<&'a CombinatorialStructure>,
    errors: i64,
    sizes: Vec<Vec<i64>>,
}

impl<'a> State<'a> {
    fn new(h: &'a Hypergraph, hp: Hyperpartition, fixed: Option<&'a CombinatorialStructure>) -> Result<Self> {
        let (k, l, n) = (hp.k(), hp.l(), hp.n());
        let space = (l as u128).checked_pow((1u32 << k) - 1).unwrap_or(u128::MAX);
        if space > MAX_SEARCH_SPACE as u128 {
            return Err(Error::cap("cell space for the search", space, MAX_SEARCH_SPACE as u128));
        }
        let space = space as usize;
        let perms = permutations(k);
        let orbit = (0..space)
            .map(|code| {
                let c = CellCoordinate::from_code(k, l, code);
                perms.iter().map(|p| c.permuted(p).code(l)).min().unwrap() as u32
            })
            .collect();
        let colex = Colex::new(n, k)?;
        let mut s = State {
            h,
            colex,
            k,
            l,
            orbit,
            top_weight: l.pow((1u32 << k) - 2),
            codes: Vec::new(),
            edges: vec![0; space],
            totals: vec![0; space],
            fixed,
            errors: 0,
            sizes: (1..=k).map(|r| hp.class_sizes(r).iter().map(|&x| x as i64).collect()).collect(),
            hp,
        };
        let mut buf = Vec::with_capacity(k);
        let mut codes = Vec::with_capacity(s.colex.count(k) as usize);
        for_each_subset(n, k, |set| codes.push(s.hp.sorted_code(set, &mut buf) as u32));
        for (rank, &code) in codes.iter().enumerate() {
            let o = s.orbit[code as usize] as usize;
            s.totals[o] += 1;
            s.edges[o] += h.contains_rank(rank as u64) as u32;
        }
        s.codes = codes;
        s.errors = (0..space).map(|o| s.err(o, s.edges[o] as i64, s.totals[o] as i64)).sum();
        Ok(s)
    }

    /// Mismatches contributed by orbit `o` holding `e` edges out of `t`.
    #[inline]
    fn err(&self, o: usize, e: i64, t: i64) -> i64 {
        match self.fixed {
            Some(c) => {
                if c.contains_code(o) {
                    t - e
                } else {
                    e
                }
            }
            None => {
                if 2 * e > t {
                    t - e
                } else {
                    e
                }
            }
        }
    }

    fn structure(&self) -> Result<CombinatorialStructure> {
        if let Some(c) = self.fixed {
            return Ok(c.clone());
        }
        let (k, l) = (self.k, self.l);
        CombinatorialStructure::from_predicate(k, l, |c| {
            let o = self.orbit[c.code(l)] as usize;
            2 * self.edges[o] > self.totals[o]
        })
    }

    fn equitability(&self, sizes: &[Vec<i64>]) -> f64 {
        let n = self.hp.n() as u64;
        sizes
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let total = binomial(n, i as u64 + 1).unwrap() as f64;
                let gap = s.iter().max().unwrap() - s.iter().min().unwrap();
                if total == 0.0 {
                    0.0
                } else {
                    gap as f64 / total
                }
            })
            .fold(0.0, f64::max)
    }

    fn slots(&self) -> f64 {
        self.colex.count(self.k).max(1) as f64
    }

    /// Ranks of the k-sets containing the sorted r-subset `s`.
    fn cofaces(&self, s: &[u32]) -> Vec<u64> {
        let n = self.hp.n();
        let rest: Vec<u32> = (0..n as u32).filter(|v| !s.contains(v)).collect();
        let mut out = Vec::new();
        let mut set = Vec::with_capacity(self.k);
        for_each_subset(rest.len(), self.k - s.len(), |t| {
            set.clear();
            set.extend_from_slice(s);
            set.extend(t.iter().map(|&i| rest[i as usize]));
            set.sort_unstable();
            out.push(self.colex.rank(&set));
        });
        out
    }

    /// Change in mismatches if the listed k-sets moved to `new_codes`.
    fn delta_errors(&self, ranks: &[u64], new_codes: &[u32]) -> i64 {
        let mut change: HashMap<usize, (i64, i64)> = HashMap::new();
        for (&rank, &nc) in ranks.iter().zip(new_codes) {
            let e = self.h.contains_rank(rank) as i64;
            let old = self.orbit[self.codes[rank as usize] as usize] as usize;
            let new = self.orbit[nc as usize] as usize;
            if old != new {
                let a = change.entry(old).or_default();
                a.0 -= e;
                a.1 -= 1;
                let b = change.entry(new).or_default();
                b.0 += e;
                b.1 += 1;
            }
        }
        change
            .iter()
            .map(|(&o, &(de, dt))| {
                let (e, t) = (self.edges[o] as i64, self.totals[o] as i64);
                self.err(o, e + de, t + dt) - self.err(o, e, t)
            })
            .sum()
    }

    fn apply(&mut self, ranks: &[u64], new_codes: &[u32]) {
        for (&rank, &nc) in ranks.iter().zip(new_codes) {
            let e = self.h.contains_rank(rank) as u32;
            let old = self.orbit[self.codes[rank as usize] as usize] as usize;
            let new = self.orbit[nc as usize] as usize;
            self.edges[old] -= e;
            self.totals[old] -= 1;
            self.edges[new] += e;
            self.totals[new] += 1;
            self.codes[rank as usize] = nc;
        }
    }

    /// Codes of `ranks` with the r-subset `rank_s` relabelled to `level`.
    fn codes_with(&mut self, r: usize, rank_s: u64, level: u16, ranks: &[u64]) -> Vec<u32> {
        let old = self.hp.labels(r)[rank_s as usize];
        self.hp.set_label(r, rank_s, level);
        let mut buf = Vec::with_capacity(self.k);
        let mut set = Vec::with_capacity(self.k);
        let out = ranks
            .iter()
            .map(|&rank| {
                self.colex.unrank(rank, self.k, &mut set);
                self.hp.sorted_code(&set, &mut buf) as u32
            })
            .collect();
        self.hp.set_label(r, rank_s, old);
        out
    }

    /// One pass of single-label moves; returns (accepted, eps improved).
    fn sweep(&mut self, lambda: f64) -> (usize, bool) {
        let mut accepted = 0;
        let mut improved = false;
        let mut s = Vec::new();
        for r in 1..=self.k {
            let count = self.colex.count(r);
            for rank_s in 0..count {
                self.colex.unrank(rank_s, r, &mut s);
                let ranks = if r == self.k { vec![rank_s] } else { self.cofaces(&s) };
                let current = self.hp.labels(r)[rank_s as usize];
                let base_eq = self.equitability(&self.sizes);
                let mut best: Option<(f64, i64, u16, Vec<u32>)> = None;
                for level in 0..self.l as u16 {
                    if level == current {
                        continue;
                    }
                    let new_codes = self.codes_with(r, rank_s, level, &ranks);
                    let de = self.delta_errors(&ranks, &new_codes);
                    if de > 0 {
                        continue;
                    }
                    let mut sizes = self.sizes.clone();
                    sizes[r - 1][current as usize] -= 1;
                    sizes[r - 1][level as usize] += 1;
                    let dobj = de as f64 / self.slots() + lambda * (self.equitability(&sizes) - base_eq);
                    if dobj < 0.0 && best.as_ref().is_none_or(|b| dobj < b.0) {
                        best = Some((dobj, de, level, new_codes));
                    }
                }
                if let Some((_, de, level, new_codes)) = best {
                    self.apply(&ranks, &new_codes);
                    self.hp.set_label(r, rank_s, level);
                    self.sizes[r - 1][current as usize] -= 1;
                    self.sizes[r - 1][level as usize] += 1;
                    self.errors += de;
                    accepted += 1;
                    improved |= de < 0;
                }
            }
        }
        (accepted, improved)
    }

    /// Re-sorts the top-arity labels of every lower pattern with mismatches
    /// so that each of its cells is pure, when that lowers the objective.
    fn realign(&mut self, lambda: f64) -> usize {
        if self.l < 2 {
            return 0;
        }
        let mut groups: HashMap<u32, Vec<u64>> = HashMap::new();
        for (rank, &code) in self.codes.iter().enumerate() {
            let lower = code as usize % self.top_weight;
            let rep = self.orbit[lower] as usize % self.top_weight;
            groups.entry(rep as u32).or_default().push(rank as u64);
        }
        let mut keys: Vec<u32> = groups.keys().copied().collect();
        keys.sort_unstable();
        let mut accepted = 0;
        for key in keys {
            let ranks = &groups[&key];
            let mut edge_levels = Vec::new();
            let mut other_levels = Vec::new();
            let n_edges = ranks.iter().filter(|&&r| self.h.contains_rank(r)).count();
            let n_other = ranks.len() - n_edges;
            match self.fixed {
                Some(c) => {
                    for t in 0..self.l {
                        let o = self.orbit[key as usize + t * self.top_weight] as usize;
                        if c.contains_code(o) {
                            edge_levels.push(t as u16);
                        } else {
                            other_levels.push(t as u16);
                        }
                    }
                    if (n_edges > 0 && edge_levels.is_empty()) || (n_other > 0 && other_levels.is_empty()) {
                        continue;
                    }
                }
                None => {
                    let m = if n_other == 0 {
                        self.l
                    } else if n_edges == 0 {
                        0
                    } else {
                        ((self.l * n_edges + ranks.len() / 2) / ranks.len()).clamp(1, self.l - 1)
                    };
                    edge_levels = (0..m as u16).collect();
                    other_levels = (m as u16..self.l as u16).collect();
                }
            }
            // the cells of this lower pattern must see the same lower code,
            // so only the top digit changes
            let (mut ei, mut oi) = (0, 0);
            let mut sizes = self.sizes.clone();
            let new_codes: Vec<u32> = ranks
                .iter()
                .map(|&rank| {
                    let code = self.codes[rank as usize] as usize;
                    let old_top = code / self.top_weight;
                    let top = if self.h.contains_rank(rank) {
                        ei += 1;
                        edge_levels[(ei - 1) % edge_levels.len()]
                    } else {
                        oi += 1;
                        other_levels[(oi - 1) % other_levels.len()]
                    } as usize;
                    sizes[self.k - 1][old_top] -= 1;
                    sizes[self.k - 1][top] += 1;
                    (code % self.top_weight + top * self.top_weight) as u32
                })
                .collect();
            let de = self.delta_errors(ranks, &new_codes);
            let dobj = de as f64 / self.slots()
                + lambda * (self.equitability(&sizes) - self.equitability(&self.sizes));
            if de < 0 && dobj < 0.0 {
                for (&rank, &nc) in ranks.iter().zip(&new_codes) {
                    self.hp.set_label(self.k, rank, (nc as usize / self.top_weight) as u16);
                }
                self.apply(ranks, &new_codes);
                self.sizes = sizes;
                self.errors += de;
                accepted += 1;
            }
        }
        accepted
    }

    fn eps(&self) -> Rational {
        ratio(self.errors as u128, self.colex.count(self.k) as u128)
    }
}

fn check(h: &Hypergraph, l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::invalid("l", "must be at least 1"));
    }
    if h.n() < h.k() {
        return Err(Error::invalid("H", format!("needs at least k={} vertices", h.k())));
    }
    Ok(())
}

fn search(state: &mut State, opts: &RefineOptions) -> Vec<TraceRow> {
    let mut trace = vec![TraceRow {
        iteration: 0,
        eps: state.eps(),
        equitability: state.hp.equitability_deficit(),
        accepted: 0,
    }];
    for it in 1..=opts.iterations {
        let (mut accepted, improved) = state.sweep(opts.lambda);
        if !improved {
            accepted += state.realign(opts.lambda);
        }
        trace.push(TraceRow {
            iteration: it,
            eps: state.eps(),
            equitability: state.hp.equitability_deficit(),
            accepted,
        });
        if accepted == 0 {
            break;
        }
    }
    trace
}

fn finish(
    h: &Hypergraph,
    state: State,
    opts: &RefineOptions,
    trace: Vec<TraceRow>,
) -> Result<DecompositionReport> {
    let c = state.structure()?;
    let hp = state.hp;
    let eps = hamming_density(h, &hp.cells_union(&c)?)?;
    debug_assert_eq!(eps, ratio(state.errors as u128, binomial(h.n() as u64, h.k() as u64).unwrap()));
    let equitability = hp.equitability_deficit();
    let cyl = CylinderOptions {
        count: opts.cylinder_samples.max(1),
        seed: opts.seed,
        ..CylinderOptions::default()
    };
    let regularity = max_regularity_deficit(&hp, &cyl)?;
    let delta = if equitability > regularity { equitability.clone() } else { regularity.clone() };
    Ok(DecompositionReport {
        hp,
        c,
        eps,
        delta,
        equitability,
        regularity,
        seed: opts.seed,
        mode: opts.mode,
        trace,
    })
}

/// Searches for an l-hyperpartition and structure close to `h`.
pub fn refine(h: &Hypergraph, opts: &RefineOptions) -> Result<DecompositionReport> {
    check(h, opts.l)?;
    match opts.mode {
        SearchMode::Local => {
            let init = Hyperpartition::random(h.n(), h.k(), opts.l, opts.seed)?;
            let mut state = State::new(h, init, None)?;
            let trace = search(&mut state, opts);
            finish(h, state, opts, trace)
        }
        SearchMode::Exhaustive => exhaustive(h, opts),
    }
}

/// Like [`refine`] with `𝒞` held fixed, starting from `init`.
pub fn refine_with_structure(
    h: &Hypergraph,
    c: &CombinatorialStructure,
    init: Hyperpartition,
    opts: &RefineOptions,
) -> Result<DecompositionReport> {
    check(h, c.l())?;
    if init.l() != c.l() || init.k() != c.k() || init.n() != h.n() {
        return Err(Error::ShapeMismatch {
            field: "HP",
            detail: "initial hyperpartition does not match H and C".into(),
        });
    }
    c.check_symmetric()?;
    let mut state = State::new(h, init, Some(c))?;
    let trace = search(&mut state, opts);
    finish(h, state, opts, trace)
}

fn exhaustive(h: &Hypergraph, opts: &RefineOptions) -> Result<DecompositionReport> {
    let (n, k, l) = (h.n(), h.k(), opts.l);
    let lower_slots: u64 = (1..k).map(|r| binomial(n as u64, r as u64).unwrap() as u64).sum();
    let total = (l as u128).checked_pow(lower_slots as u32).unwrap_or(u128::MAX);
    if total > MAX_EXHAUSTIVE_LABELLINGS {
        return Err(Error::cap("lower labellings for exhaustive search", total, MAX_EXHAUSTIVE_LABELLINGS));
    }
    let mut digits = vec![0u16; lower_slots as usize];
    let mut best: Option<(i64, Rational, Hyperpartition)> = None;
    let colex = Colex::new(n, k)?;
    for _ in 0..total {
        let mut labels = Vec::with_capacity(k);
        let mut offset = 0;
        for r in 1..k {
            let c = colex.count(r) as usize;
            labels.push(digits[offset..offset + c].to_vec());
            offset += c;
        }
        labels.push(vec![0; colex.count(k) as usize]);
        let hp = Hyperpartition::new(n, k, l, labels)?;
        let mut state = State::new(h, hp, None)?;
        // with no competing objective the top arity is sorted outright
        state.realign(0.0);
        let equit = state.hp.equitability_deficit();
        let better = match &best {
            None => true,
            Some((e, q, _)) => state.errors < *e || (state.errors == *e && equit < *q),
        };
        if better {
            best = Some((state.errors, equit, state.hp.clone()));
        }
        // next labelling
        for d in digits.iter_mut() {
            *d += 1;
            if (*d as usize) < l {
                break;
            }
            *d = 0;
        }
    }
    let (_, _, hp) = best.expect("at least one labelling");
    let mut state = State::new(h, hp, None)?;
    state.realign(0.0);
    let row = TraceRow {
        iteration: 0,
        eps: state.eps(),
        equitability: state.hp.equitability_deficit(),
        accepted: total as usize,
    };
    finish(h, state, opts, vec![row])
}
