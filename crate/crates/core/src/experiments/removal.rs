use std::collections::BTreeMap;

use serde_json::json;

use super::{trial_seed, ExperimentReport, Verdict};
use crate::combinatorics::binomial;
use crate::error::{same_arity, Error, Result};
use crate::hom::{count_maps, hom, homomorphisms, t, HomMode, MapFilter};
use crate::hyperpartition::Hyperpartition;
use crate::hypergraph::Hypergraph;
use crate::hypergraphon::{density_exact, Hypergraphon, StepHypergraphon};
use crate::rational::{format, ratio, zero};
use crate::sampling::sample_w;

/// Homomorphisms enumerated by [`removal_experiment`] at most.
pub const MAX_REMOVAL_HOMS: usize = 10_000_000;

/// Greedily deletes the edge of `H` lying in the most remaining copies of
/// `K` (ties to the lowest colex rank) until `H∖L` is `K`-free.
pub fn removal_experiment(h: &Hypergraph, k: &Hypergraph) -> Result<ExperimentReport> {
    same_arity(k.k(), h.k())?;
    if k.edge_count() == 0 {
        return Err(Error::invalid("K", "needs at least one edge"));
    }
    let homs = homomorphisms(k, h, MAX_REMOVAL_HOMS)?;
    let density = t(k, h)?;
    // edge ranks covered by each homomorphism
    let mut buf = Vec::with_capacity(k.k());
    let covers: Vec<Vec<u64>> = homs
        .iter()
        .map(|img| {
            let mut ranks: Vec<u64> = k
                .edges()
                .map(|e| {
                    buf.clear();
                    buf.extend(e.iter().map(|&x| img[x as usize]));
                    buf.sort_unstable();
                    h.colex().rank(&buf)
                })
                .collect();
            ranks.sort_unstable();
            ranks.dedup();
            ranks
        })
        .collect();
    let mut users: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, c) in covers.iter().enumerate() {
        for &r in c {
            users.entry(r).or_default().push(i);
        }
    }
    let mut load: BTreeMap<u64, usize> = users.iter().map(|(&r, u)| (r, u.len())).collect();
    let mut alive = vec![true; homs.len()];
    let mut remaining = homs.len();
    let mut removed = Vec::new();
    let mut report = ExperimentReport::new("removal", 0, json!({"H": h.to_wire(), "K": k.to_wire()}));
    while remaining > 0 {
        // max_by_key keeps the last maximum; walking ranks downward makes that the lowest rank
        let (&rank, &covered) = load
            .iter()
            .rev()
            .max_by_key(|(_, &c)| c)
            .expect("a live copy uses some edge");
        for &i in &users[&rank] {
            if alive[i] {
                alive[i] = false;
                remaining -= 1;
                for r in &covers[i] {
                    *load.get_mut(r).expect("tracked") -= 1;
                }
            }
        }
        load.retain(|_, c| *c > 0);
        removed.push(rank);
        let mut verts = Vec::new();
        h.colex().unrank(rank, h.k(), &mut verts);
        report.record(json!({
            "step": removed.len(),
            "edge": verts,
            "rank": rank,
            "covered": covered,
            "remaining": remaining,
        }));
    }
    removed.sort_unstable();
    let pruned = h.without_ranks(&removed);
    let left = hom(k, &pruned, HomMode::All)?;
    let slots = binomial(h.n() as u64, h.k() as u64).expect("fits");
    let fraction = if slots == 0 { zero() } else { ratio(removed.len() as u128, slots) };
    report.summarize("homomorphisms", homs.len());
    report.summarize("t", format(&density));
    report.summarize("removed", removed.len());
    report.summarize("removed_fraction", format(&fraction));
    report.verdict(Verdict::new(
        "k_free",
        left == 0,
        format!("hom(K, H minus L) = {left} after removing {} edges", removed.len()),
    ));
    Ok(report)
}

/// Samples `𝔾(W, ℋ, n)` on the round-robin hyperpartition and counts
/// induced copies of every `F` with `t_ind(F, W) = 0`.
pub fn hereditary_experiment(
    w: &StepHypergraphon,
    f_list: &[Hypergraph],
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    for f in f_list {
        same_arity(f.k(), w.k())?;
    }
    let hp = Hyperpartition::round_robin(n, w.k(), w.l())?;
    let t_ind: Vec<_> = f_list
        .iter()
        .map(|f| density_exact(f, w, true))
        .collect::<Result<_>>()?;
    let constrained: Vec<bool> = t_ind.iter().map(|x| *x == zero()).collect();
    let wh: Hypergraphon = w.clone().into();
    let mut report = ExperimentReport::new(
        "hereditary",
        seed,
        json!({
            "W": w.to_wire(),
            "F": f_list.iter().map(|f| f.to_wire()).collect::<Vec<_>>(),
            "n": n,
            "trials": trials,
        }),
    );
    let mut totals = vec![0u128; f_list.len()];
    for trial in 0..trials {
        let s = trial_seed(seed, 0x4e, trial as u64);
        let g = sample_w(&wh, n, s, Some(&hp))?.sample;
        for (i, f) in f_list.iter().enumerate() {
            if !constrained[i] {
                continue;
            }
            let hits = count_maps(f, &g, MapFilter::INDUCED_INJECTIVE)?;
            totals[i] += hits;
            report.record(json!({"trial": trial, "seed": s, "F": i, "hits": hits as u64}));
        }
    }
    report.summarize("t_ind", t_ind.iter().map(format).collect::<Vec<_>>());
    report.summarize("constrained", constrained.clone());
    report.summarize("hits", totals.iter().map(|&x| x as u64).collect::<Vec<_>>());
    let clean = totals.iter().zip(&constrained).all(|(&x, &c)| !c || x == 0);
    report.verdict(Verdict::new(
        "zero_preserved",
        clean,
        format!("induced hits {totals:?} for constrained F (flags {constrained:?})"),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperpartition::CombinatorialStructure;
    use crate::hypergraphon::Builtin;

    fn triangle() -> Hypergraph {
        Hypergraph::new(2, 3, [[0, 1], [1, 2], [0, 2]]).unwrap()
    }

    #[test]
    fn k4_needs_two_removals() {
        let r = removal_experiment(&Hypergraph::complete(2, 4).unwrap(), &triangle()).unwrap();
        assert_eq!(r.summary["removed"], json!(2));
        assert_eq!(r.summary["removed_fraction"], json!("1/3"));
        assert!(r.passed());
    }

    #[test]
    fn single_edge_removes_everything() {
        let h = Hypergraph::new(3, 5, [[0, 1, 2], [1, 2, 3], [0, 3, 4]]).unwrap();
        let e = Hypergraph::new(3, 3, [[0, 1, 2]]).unwrap();
        let r = removal_experiment(&h, &e).unwrap();
        assert_eq!(r.summary["removed"], json!(3));
    }

    #[test]
    fn already_free_removes_nothing() {
        let star = Hypergraph::new(2, 4, [[0, 1], [0, 2], [0, 3]]).unwrap();
        let r = removal_experiment(&star, &triangle()).unwrap();
        assert_eq!(r.summary["removed"], json!(0));
        assert!(r.records.is_empty());
    }

    #[test]
    fn empty_w_never_has_edges() {
        let w = StepHypergraphon::builtin(Builtin::Empty, 2).unwrap();
        let e = Hypergraph::new(2, 2, [[0, 1]]).unwrap();
        let r = hereditary_experiment(&w, &[e], 10, 5, 2).unwrap();
        assert_eq!(r.summary["constrained"], json!([true]));
        assert!(r.passed());
    }

    #[test]
    fn example1_edge_is_unconstrained() {
        let w = StepHypergraphon::builtin(Builtin::Example1, 2).unwrap();
        let e = Hypergraph::new(2, 2, [[0, 1]]).unwrap();
        let r = hereditary_experiment(&w, &[e], 8, 2, 2).unwrap();
        assert_eq!(r.summary["t_ind"], json!(["1/2"]));
        assert_eq!(r.summary["constrained"], json!([false]));
    }

    #[test]
    fn excluded_cell_stays_empty() {
        // edges only between differently labelled vertices: no triangles
        let c = CombinatorialStructure::from_predicate(2, 2, |x| x.level(1) != x.level(2)).unwrap();
        let w = StepHypergraphon::from_structure(c).unwrap();
        let r = hereditary_experiment(&w, &[triangle()], 12, 10, 9).unwrap();
        assert_eq!(r.summary["constrained"], json!([true]));
        assert!(r.passed());
    }
}
