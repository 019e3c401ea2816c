use serde_json::json;

use super::{trial_seed, ExperimentReport, Verdict};
use crate::combinatorics::{binomial, falling_factorial};
use crate::error::{same_arity, Error, Result};
use crate::hom::{count_maps, MapFilter};
use crate::hypergraph::Hypergraph;
use crate::hypergraphon::{density_exact, Hypergraphon, StepHypergraphon};
use crate::rational::{format, ratio, to_f64};
use crate::rng::StreamKey;
use crate::sampling::{edge_count_w, injective_map, sample_w};

/// Exact `t₀` is used while `(n)_v` stays at or below this.
pub const EXACT_T0_LIMIT: u128 = 100_000_000;

#[derive(Clone, Debug)]
pub struct ConcentrationParams {
    pub n: usize,
    pub eps: f64,
    pub trials: usize,
    /// Injective maps drawn per trial when `t₀` cannot be counted exactly.
    pub t0_budget: u64,
    pub seed: u64,
}

/// `2·exp(−ε²n / (2v²))`.
pub fn azuma_bound(eps: f64, n: usize, v: usize) -> f64 {
    2.0 * (-(eps * eps) * n as f64 / (2.0 * (v * v) as f64)).exp()
}

/// Tail frequency of `|t₀(F, 𝔾(W, n)) − t(F, W)| ≥ ε` against the Azuma
/// bound.
pub fn concentration_experiment(
    w: &StepHypergraphon,
    f: &Hypergraph,
    p: &ConcentrationParams,
) -> Result<ExperimentReport> {
    same_arity(f.k(), w.k())?;
    if !(p.eps > 0.0) || !p.eps.is_finite() {
        return Err(Error::invalid("eps", "must be positive"));
    }
    if p.trials == 0 {
        return Err(Error::invalid("trials", "must be positive"));
    }
    let v = f.n();
    if v == 0 || v > p.n {
        return Err(Error::invalid("n", format!("must be at least |V(F)| = {v} > 0")));
    }
    let exact = falling_factorial(p.n as u64, v as u64).is_some_and(|x| x <= EXACT_T0_LIMIT);
    let single_edge = f.edge_count() == 1 && v == f.k();
    if !exact && !single_edge && p.t0_budget == 0 {
        return Err(Error::invalid("t0_budget", "must be positive when t0 is sampled"));
    }
    let t_exact = density_exact(f, w, false)?;
    let target = to_f64(&t_exact);
    let bound = azuma_bound(p.eps, p.n, v);
    let mut report = ExperimentReport::new(
        "concentration",
        p.seed,
        json!({
            "W": w.to_wire(),
            "F": f.to_wire(),
            "n": p.n,
            "eps": p.eps,
            "trials": p.trials,
            "t0_budget": p.t0_budget,
        }),
    );
    let wh: Hypergraphon = w.clone().into();
    let mut exceed = 0usize;
    for trial in 0..p.trials {
        let seed = trial_seed(p.seed, 0xc0, trial as u64);
        let (t0, method, stderr) = if single_edge {
            let edges = edge_count_w(&wh, p.n, seed, None)?;
            let slots = binomial(p.n as u64, f.k() as u64).expect("fits");
            (to_f64(&ratio(edges as u128, slots)), "edges", 0.0)
        } else {
            let h = sample_w(&wh, p.n, seed, None)?.sample;
            if exact {
                let count = count_maps(f, &h, MapFilter::INJECTIVE)?;
                let den = falling_factorial(p.n as u64, v as u64).expect("checked");
                (to_f64(&ratio(count, den)), "exact", 0.0)
            } else {
                let key = StreamKey::new(seed).derive(0x70);
                let hits = (0..p.t0_budget)
                    .filter(|&s| {
                        let img = injective_map(v, p.n, key.derive(s));
                        f.edges().all(|e| {
                            let mapped: Vec<u32> = e.iter().map(|&x| img[x as usize]).collect();
                            h.contains(&mapped)
                        })
                    })
                    .count();
                let est = hits as f64 / p.t0_budget as f64;
                (est, "sampled", (est * (1.0 - est) / p.t0_budget as f64).sqrt())
            }
        };
        let deviation = (t0 - target).abs();
        let exceeds = deviation >= p.eps;
        exceed += exceeds as usize;
        report.record(json!({
            "trial": trial,
            "seed": seed,
            "t0": t0,
            "t0_stderr": stderr,
            "method": method,
            "deviation": deviation,
            "exceeds": exceeds,
        }));
    }
    let tail = exceed as f64 / p.trials as f64;
    let b = bound.min(1.0);
    let stderr = (b * (1.0 - b) / p.trials as f64).sqrt();
    report.summarize("t_exact", format(&t_exact));
    report.summarize("bound", bound);
    report.summarize("vacuous", bound >= 1.0);
    report.summarize("tail", tail);
    report.summarize("binomial_stderr", stderr);
    report.verdict(Verdict::new(
        "azuma",
        tail <= bound + 3.0 * stderr,
        format!("tail {tail} vs bound {bound:.6} + 3*{stderr:.6}{}", if bound >= 1.0 { " (vacuous)" } else { "" }),
    ));
    Ok(report)
}
