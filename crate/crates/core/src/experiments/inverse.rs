use serde_json::json;

use super::{trial_seed, ExperimentReport, Verdict};
use crate::error::{Error, Result};
use crate::hyperpartition::CombinatorialStructure;
use crate::hypergraph::Hypergraph;
use crate::hypergraphon::{Hypergraphon, StepHypergraphon};
use crate::metrics::{delta1_upper, SearchBudget, Witness};
use crate::rational::{format, to_f64};
use crate::regularity::{refine, refine_with_structure, DecompositionReport, RefineOptions};
use crate::sampling::sample_w;

#[derive(Clone, Debug)]
pub struct InverseParams {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Both decompositions of a trial must reach `eps` at most this.
    pub threshold: f64,
    /// Fraction of trials that must pass.
    pub required: f64,
    pub iterations: usize,
}

impl InverseParams {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        InverseParams {
            n,
            trials,
            seed,
            threshold: 0.2,
            required: 0.7,
            iterations: 50,
        }
    }
}

/// Level permutation (0-based, one per arity) carrying `from` as close as
/// possible onto `to`.
fn align(from: &CombinatorialStructure, to: &CombinatorialStructure, seed: u64) -> Result<Vec<Vec<u16>>> {
    let u = StepHypergraphon::from_structure(from.clone())?;
    let w = StepHypergraphon::from_structure(to.clone())?;
    let budget = SearchBudget { seed, ..SearchBudget::default() };
    match delta1_upper(&u, &w, budget)?.witness {
        Some(Witness::LevelPermutation(sigma)) => {
            Ok(sigma.into_iter().map(|p| p.into_iter().map(|x| x - 1).collect()).collect())
        }
        _ => unreachable!("delta1_upper always reports its permutation"),
    }
}

/// Refits `r` (a decomposition of `h`) against `target` after aligning its
/// levels.
fn refit(
    h: &Hypergraph,
    r: &DecompositionReport,
    target: &CombinatorialStructure,
    opts: &RefineOptions,
) -> Result<(DecompositionReport, bool)> {
    let sigma = align(&r.c, target, opts.seed)?;
    let same = &r.c.relabelled(&sigma) == target;
    let fit = refine_with_structure(h, target, r.hp.relabelled(&sigma), opts)?;
    Ok((fit, same))
}

fn options(l: usize, seed: u64, iterations: usize) -> RefineOptions {
    RefineOptions {
        iterations,
        ..RefineOptions::new(l, seed)
    }
}

/// Two independent samples of `𝔾(W, n)` per trial, each decomposed; the
/// second is refit against the structure found for the first.
pub fn inverse_counting_experiment(w: &StepHypergraphon, p: &InverseParams) -> Result<ExperimentReport> {
    if p.trials == 0 {
        return Err(Error::invalid("trials", "must be positive"));
    }
    let l = w.l();
    let wh: Hypergraphon = w.clone().into();
    let mut report = ExperimentReport::new(
        "inverse",
        p.seed,
        json!({
            "W": w.to_wire(),
            "n": p.n,
            "trials": p.trials,
            "threshold": p.threshold,
            "required": p.required,
            "iterations": p.iterations,
        }),
    );
    let mut passes = 0usize;
    for trial in 0..p.trials {
        let s1 = trial_seed(p.seed, 0xa1, trial as u64);
        let s2 = trial_seed(p.seed, 0xa2, trial as u64);
        let h1 = sample_w(&wh, p.n, s1, None)?.sample;
        let h2 = sample_w(&wh, p.n, s2, None)?.sample;
        let o1 = options(l, s1, p.iterations);
        let o2 = options(l, s2, p.iterations);
        let r1 = refine(&h1, &o1)?;
        let r2 = refine(&h2, &o2)?;
        let (fit, same) = refit(&h2, &r2, &r1.c, &o2)?;
        let planted = delta1_upper(
            &StepHypergraphon::from_structure(r1.c.clone())?,
            w,
            SearchBudget { seed: s1, ..SearchBudget::default() },
        )?;
        let pass = to_f64(&r1.eps) <= p.threshold && to_f64(&fit.eps) <= p.threshold;
        passes += pass as usize;
        report.record(json!({
            "trial": trial,
            "seed1": s1,
            "seed2": s2,
            "eps1": format(&r1.eps),
            "eps2": format(&r2.eps),
            "eps2_shared": format(&fit.eps),
            "structures_agree": same,
            "delta1_to_w": planted.value.as_f64(),
            "pass": pass,
        }));
    }
    let fraction = passes as f64 / p.trials as f64;
    report.summarize("pass_fraction", fraction);
    report.verdict(Verdict::new(
        "shared_structure",
        fraction >= p.required,
        format!("{passes}/{} trials reach eps <= {} on a shared structure", p.trials, p.threshold),
    ));
    Ok(report)
}

/// Checks a finite sequence against the strong convergence clauses: one
/// structure, up to level relabelling, fits every member within `eps`, and
/// the per-member deficits `max(eps, regularity)` do not grow by more than
/// `slack`.
pub fn strong_convergence_report(
    sequence: &[Hypergraph],
    l: usize,
    eps: f64,
    slack: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    let first = sequence.first().ok_or_else(|| Error::invalid("sequence", "is empty"))?;
    if sequence.iter().any(|h| h.k() != first.k()) {
        return Err(Error::invalid("sequence", "members have different arities"));
    }
    if sequence.windows(2).any(|p| p[1].n() <= p[0].n()) {
        return Err(Error::invalid("sequence", "vertex counts must increase"));
    }
    let opts: Vec<RefineOptions> = (0..sequence.len())
        .map(|i| options(l, trial_seed(seed, 0x5c, i as u64), 50))
        .collect();
    let own: Vec<DecompositionReport> = sequence
        .iter()
        .zip(&opts)
        .map(|(h, o)| refine(h, o))
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(
        "sequence",
        seed,
        json!({
            "sizes": sequence.iter().map(|h| h.n()).collect::<Vec<_>>(),
            "k": first.k(),
            "l": l,
            "eps": eps,
            "slack": slack,
        }),
    );
    // (worst eps, candidate index, deficits)
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for (j, cand) in own.iter().enumerate() {
        let mut worst = 0.0f64;
        let mut deficits = Vec::new();
        for (i, h) in sequence.iter().enumerate() {
            let (fit, _) = if i == j {
                (own[i].clone(), true)
            } else {
                refit(h, &own[i], &cand.c, &opts[i])?
            };
            let e = to_f64(&fit.eps);
            let deficit = e.max(to_f64(&fit.regularity));
            worst = worst.max(e);
            deficits.push(deficit);
            report.record(json!({
                "candidate": j,
                "member": i,
                "n": h.n(),
                "eps": format(&fit.eps),
                "regularity": format(&fit.regularity),
                "deficit": deficit,
            }));
        }
        let better = match &best {
            None => true,
            Some((w, _, _)) => worst < *w,
        };
        if better {
            best = Some((worst, j, deficits));
        }
    }
    let (worst, j, deficits) = best.expect("nonempty sequence");
    report.summarize("candidate", j);
    report.summarize("worst_eps", worst);
    report.summarize("structure", serde_json::to_value(own[j].c.to_wire()).expect("serializable"));
    report.verdict(Verdict::new(
        "shared_structure",
        worst <= eps,
        format!("candidate {j} fits every member within {worst} (threshold {eps})"),
    ));
    report.verdict(Verdict::new(
        "deficits_non_increasing",
        deficits.windows(2).all(|d| d[1] <= d[0] + slack),
        format!("deficits {deficits:?} with slack {slack}"),
    ));
    Ok(report)
}
