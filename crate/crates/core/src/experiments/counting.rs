use serde_json::json;

use super::{median, trial_seed, ExperimentReport, Verdict};
use crate::error::{same_arity, Error, Result};
use crate::hom::{count_maps, MapFilter};
use crate::hyperpartition::{structure_density, CombinatorialStructure, Hyperpartition};
use crate::hypergraph::Hypergraph;
use crate::rational::{format, ratio, to_f64};
use crate::combinatorics::falling_factorial;
use crate::rng::StreamKey;
use crate::sampling::injective_map;

/// `t₀(F, T)` is counted exactly while `(n)_v` stays at or below this.
pub const EXACT_T_LIMIT: u128 = 100_000_000;

#[derive(Clone, Debug)]
pub struct CountingParams {
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Declared tolerance for the median deviation at the largest `n`.
    pub tolerance: f64,
    /// Allowed rise of the median deviation from one `n` to the next.
    pub slack: f64,
    /// Injective maps drawn per trial when `t₀(F, T)` is estimated.
    pub samples: u64,
}

impl CountingParams {
    pub fn new(n_list: Vec<usize>, trials: usize, seed: u64) -> Self {
        CountingParams {
            n_list,
            trials,
            seed,
            tolerance: 0.05,
            slack: 0.005,
            samples: 20_000,
        }
    }
}

/// `|t₀(F, 𝒞(ℋ)) − t(F, 𝒞)|` for iid-uniform hyperpartitions `ℋ` on `[n]`.
pub fn counting_experiment(
    c: &CombinatorialStructure,
    f: &Hypergraph,
    p: &CountingParams,
) -> Result<ExperimentReport> {
    same_arity(f.k(), c.k())?;
    if p.n_list.is_empty() || p.trials == 0 {
        return Err(Error::invalid("n_list", "needs at least one size and one trial"));
    }
    if p.n_list.iter().any(|&n| n < c.k()) {
        return Err(Error::invalid("n_list", format!("sizes must be at least k = {}", c.k())));
    }
    let target = structure_density(f, c)?;
    let t_c = to_f64(&target);
    let v = f.n();
    let mut report = ExperimentReport::new(
        "counting",
        p.seed,
        json!({
            "C": c.to_wire(),
            "F": f.to_wire(),
            "n_list": p.n_list,
            "trials": p.trials,
            "tolerance": p.tolerance,
            "slack": p.slack,
            "samples": p.samples,
        }),
    );
    let mut medians = Vec::new();
    for (step, &n) in p.n_list.iter().enumerate() {
        let maps = falling_factorial(n as u64, v as u64).unwrap_or(u128::MAX);
        let exact = maps <= EXACT_T_LIMIT;
        let mut deviations = Vec::with_capacity(p.trials);
        for trial in 0..p.trials {
            let seed = trial_seed(p.seed, 0xc1 + step as u64, trial as u64);
            let hp = Hyperpartition::random(n, c.k(), c.l(), seed)?;
            let t = hp.cells_union(c)?;
            let (value, stderr) = if exact {
                let count = count_maps(f, &t, MapFilter::INJECTIVE)?;
                (to_f64(&ratio(count, maps)), 0.0)
            } else {
                estimate_t0(f, &t, p.samples, seed)
            };
            let deviation = (value - t_c).abs();
            deviations.push(deviation);
            report.record(json!({
                "n": n,
                "trial": trial,
                "seed": seed,
                "t": value,
                "stderr": stderr,
                "exact": exact,
                "deviation": deviation,
            }));
        }
        medians.push(median(&deviations));
    }
    let trend = medians.windows(2).all(|w| w[1] <= w[0] + p.slack);
    let last = *medians.last().expect("nonempty");
    report.summarize("t_structure", format(&target));
    report.summarize("median_deviation", json!(medians));
    report.verdict(Verdict::new(
        "trend",
        trend,
        format!("medians {medians:?} non-increasing up to slack {}", p.slack),
    ));
    report.verdict(Verdict::new(
        "final",
        last <= p.tolerance,
        format!("final median {last} <= {}", p.tolerance),
    ));
    Ok(report)
}

/// Monte Carlo `t₀(F, T)` over uniform injective maps.
fn estimate_t0(f: &Hypergraph, t: &Hypergraph, samples: u64, seed: u64) -> (f64, f64) {
    let key = StreamKey::new(seed).derive(0x7e);
    let edges: Vec<Vec<u32>> = f.edges().collect();
    let mut mapped = Vec::with_capacity(f.k());
    let mut hits = 0u64;
    for s in 0..samples {
        let img = injective_map(f.n(), t.n(), key.derive(s));
        let ok = edges.iter().all(|e| {
            mapped.clear();
            mapped.extend(e.iter().map(|&x| img[x as usize]));
            t.contains(&mapped)
        });
        hits += ok as u64;
    }
    let est = hits as f64 / samples as f64;
    (est, (est * (1.0 - est) / samples as f64).sqrt())
}
