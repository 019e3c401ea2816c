//! Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
//!
//! Run with `cargo test --release -p hyperlimits-cli --test acceptance -- --nocapture`
//! to see the table.

use std::process::Command;
use std::time::{Duration, Instant};

use hyperlimits::combinatorics::for_each_subset;
use hyperlimits::experiments::{
    azuma_bound, concentration_experiment, counting_experiment, hereditary_experiment, ConcentrationParams,
    CountingParams,
};
use hyperlimits::hom::{hom_injective_brute, hom_injective_by_inversion};
use hyperlimits::hyperpartition::{
    exhaustive_dvh, structure_density, structure_density_weighted, CellCoordinate, CombinatorialStructure,
    Hyperpartition,
};
use hyperlimits::hypergraphon::{density_exact, Builtin, Hypergraphon, StepHypergraphon};
use hyperlimits::metrics::{d1, delta1_upper, delta_w_lower, SearchBudget, Witness};
use hyperlimits::rational::{half_pow, ratio, to_f64, Rational};
use hyperlimits::regularity::{refine, RefineOptions, SearchMode};
use hyperlimits::rng::StreamKey;
use hyperlimits::sampling::{below, sample_w};
use hyperlimits::{blowup, t, t0, Hypergraph};

/// Seeded draws for building test instances.
struct Draw {
    key: StreamKey,
    i: u64,
}

impl Draw {
    fn new(seed: u64) -> Self {
        Draw { key: StreamKey::new(seed).derive(0xacc), i: 0 }
    }

    fn below(&mut self, m: usize) -> usize {
        self.i += 1;
        below(self.key.at(self.i), m as u64) as usize
    }

    fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    fn coin(&mut self) -> bool {
        self.below(2) == 1
    }

    fn hypergraph(&mut self, k: usize, n: usize) -> Hypergraph {
        let mut edges = Vec::new();
        for_each_subset(n, k, |s| {
            if self.coin() {
                edges.push(s.to_vec());
            }
        });
        Hypergraph::new(k, n, edges).unwrap()
    }

    fn structure(&mut self, k: usize, l: usize) -> CombinatorialStructure {
        let space = l.pow((1 << k) - 1);
        let cells: Vec<CellCoordinate> = (0..space)
            .filter(|_| self.coin())
            .map(|c| CellCoordinate::from_code(k, l, c))
            .collect();
        CombinatorialStructure::symmetrized(k, l, cells).unwrap()
    }

    fn step(&mut self, k: usize, l: usize) -> StepHypergraphon {
        StepHypergraphon::from_structure(self.structure(k, l)).unwrap()
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn exact(r: &hyperlimits::metrics::DistanceReport) -> Rational {
    r.value.exact().unwrap().clone()
}

fn complete(k: usize, n: usize) -> Hypergraph {
    Hypergraph::complete(k, n).unwrap()
}

fn edge(k: usize) -> Hypergraph {
    Hypergraph::new(k, k, [(0..k as u32).collect::<Vec<_>>()]).unwrap()
}

fn c1_example1() -> Outcome {
    let mut d = Draw::new(1);
    let mut checked = 0;
    let mut bad = Vec::new();
    for k in [2usize, 3] {
        let w = StepHypergraphon::builtin(Builtin::Example1, k).unwrap();
        let mut fs = vec![edge(k)];
        if k == 2 {
            fs.push(complete(2, 3));
            fs.push(complete(2, 4));
        } else {
            fs.push(complete(3, 4));
        }
        for _ in 0..3 {
            let v = d.range(k, 5);
            fs.push(d.hypergraph(k, v));
        }
        for f in &fs {
            checked += 1;
            if density_exact(f, &w, false).unwrap() != half_pow(f.edge_count()) {
                bad.push(f.to_json());
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} densities equal (1/2)^|E(F)| exactly; mismatches {bad:?}"))
}

fn c2_example2() -> Outcome {
    let w = StepHypergraphon::builtin(Builtin::Example2, 3).unwrap();
    let cases = [
        (edge(3), 3usize),
        (Hypergraph::new(3, 4, [[0, 1, 2], [0, 1, 3]]).unwrap(), 5),
        (complete(3, 4), 6),
    ];
    let mut ok = true;
    for (f, shadow) in &cases {
        // number of 2-subsets covered by edges, counted directly
        let mut pairs = std::collections::BTreeSet::new();
        for e in f.edges() {
            for_each_subset(3, 2, |s| {
                pairs.insert((e[s[0] as usize], e[s[1] as usize]));
            });
        }
        ok &= pairs.len() == *shadow && density_exact(f, &w, false).unwrap() == half_pow(*shadow);
    }
    outcome(ok, "single edge 1/8, two edges sharing a pair 1/32, K(3)_4 1/64, exact")
}

fn c3_inversion() -> Outcome {
    let mut d = Draw::new(3);
    let mut bad = 0;
    for _ in 0..100 {
        let k = d.range(2, 3);
        let fv = d.range(1, 5);
        let hv = d.range(1, 6);
        let f = d.hypergraph(k, fv);
        let h = d.hypergraph(k, hv);
        if hom_injective_by_inversion(&f, &h).unwrap() != hom_injective_brute(&f, &h).unwrap() as i128 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("100 pairs, {bad} mismatches (exact)"))
}

fn c4_blowup() -> Outcome {
    let mut d = Draw::new(4);
    let mut bad = 0;
    for i in 0..50 {
        let k = d.range(2, 3);
        let fv = d.range(1, 4);
        let hv = d.range(k, 4);
        let f = d.hypergraph(k, fv);
        let h = d.hypergraph(k, hv);
        let factor = 2 + i % 2;
        if t(&f, &h).unwrap() != t(&f, &blowup(&h, factor).unwrap()).unwrap() {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("50 pairs with blowup factors 2 and 3, {bad} mismatches (exact)"))
}

fn c5_cross_path() -> Outcome {
    let mut d = Draw::new(5);
    let mut bad = 0;
    for _ in 0..30 {
        let k = d.range(2, 3);
        let l = d.range(1, 3);
        let c = d.structure(k, l);
        let v = d.range(k, 5);
        let f = d.hypergraph(k, v);
        let w = StepHypergraphon::from_structure(c.clone()).unwrap();
        if density_exact(&f, &w, false).unwrap() != structure_density(&f, &c).unwrap() {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("30 structures (k<=3, l<=3, |V(F)|<=5), {bad} mismatches (exact)"))
}

fn c6_rmwd() -> Outcome {
    let mut d = Draw::new(6);
    let mut bad = 0;
    for i in 0..10 {
        let k = 2 + i % 2;
        let l = d.range(1, 2);
        let n = d.range(k + 1, 7);
        let c = d.structure(k, l);
        let hp = Hyperpartition::random(n, k, l, i as u64).unwrap();
        let v = d.range(k, k + 1);
        let f = d.hypergraph(k, v);
        let lhs = t0(&f, &hp.cells_union(&c).unwrap()).unwrap().unwrap();
        let rhs = structure_density_weighted(&f, &c, &exhaustive_dvh(v, &hp).unwrap()).unwrap();
        if lhs != rhs {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("10 instances with n<=7, {bad} mismatches (exact)"))
}

fn c7_concentration() -> Outcome {
    let w = StepHypergraphon::builtin(Builtin::Example1, 2).unwrap();
    let mut passes = 0;
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let p = ConcentrationParams { n: 2000, eps: 0.08, trials: 100, t0_budget: 0, seed };
        let r = concentration_experiment(&w, &edge(2), &p).unwrap();
        passes += r.passed() as usize;
        worst = worst.max(r.summary["tail"].as_f64().unwrap());
    }
    let bound = azuma_bound(0.08, 2000, 2);
    outcome(
        passes >= 19 && (bound - 0.4038).abs() < 1e-4,
        format!("{passes}/20 seeds with tail <= {bound:.4} + 3 sd (need 19); largest tail {worst}"),
    )
}

fn c8_counting() -> Outcome {
    let c = CombinatorialStructure::from_predicate(2, 2, |x| x.level(3) == 1).unwrap();
    let tri = complete(2, 3);
    let exact = structure_density(&tri, &c).unwrap();
    let p = CountingParams { tolerance: 0.05, ..CountingParams::new(vec![200], 10, 8) };
    let r = counting_experiment(&c, &tri, &p).unwrap();
    let median = r.summary["median_deviation"][0].as_f64().unwrap();
    let stderr = r.records.iter().map(|x| x["stderr"].as_f64().unwrap()).fold(0.0, f64::max);
    outcome(
        exact == ratio(1, 8) && median <= 0.05 && stderr <= 0.01,
        format!("t(F,C) = {exact}; median |t0 - 1/8| at n=200 over 10 seeds = {median:.5} (<= 0.05), stderr {stderr}"),
    )
}

fn c9_sampler() -> Outcome {
    // k = 2, l = 2: the cell space has 8 cells; these sets are S_2-closed
    let all: Vec<CellCoordinate> = (0..8).map(|c| CellCoordinate::from_code(2, 2, c)).collect();
    let zero = CellCoordinate::from_code(2, 2, 0);
    let cases = [
        (CombinatorialStructure::from_cells(2, 2, [zero.clone()]).unwrap(), ratio(1, 8)),
        (StepHypergraphon::builtin(Builtin::Example1, 2).unwrap().boxes().clone(), ratio(1, 2)),
        (CombinatorialStructure::from_cells(2, 2, all.into_iter().filter(|c| *c != zero)).unwrap(), ratio(7, 8)),
    ];
    let trials = 10_000u64;
    let mut lines = Vec::new();
    let mut ok = true;
    for (c, m) in cases {
        let w: Hypergraphon = StepHypergraphon::from_structure(c).unwrap().into();
        let hits = (0..trials).filter(|&s| sample_w(&w, 2, s, None).unwrap().sample.edge_count() == 1).count();
        let p = to_f64(&m);
        let half_width = 3.2905 * (p * (1.0 - p) / trials as f64).sqrt();
        let freq = hits as f64 / trials as f64;
        ok &= (freq - p).abs() <= half_width;
        lines.push(format!("m={m}: {freq:.4} (+-{half_width:.4})"));
    }
    outcome(ok, format!("{} over 10^4 seeds, 99.9% interval", lines.join(", ")))
}

fn c10_zero_preservation() -> Outcome {
    let bipartite = CombinatorialStructure::from_predicate(2, 2, |x| x.level(1) != x.level(2)).unwrap();
    let cliques = CombinatorialStructure::from_predicate(2, 2, |x| x.level(1) == x.level(2)).unwrap();
    let tri = complete(2, 3);
    let path = Hypergraph::new(2, 3, [[0, 1], [1, 2]]).unwrap();
    let mut ok = true;
    let mut hits = Vec::new();
    for (c, f) in [(bipartite, tri), (cliques, path)] {
        let w = StepHypergraphon::from_structure(c).unwrap();
        let r = hereditary_experiment(&w, std::slice::from_ref(&f), 20, 200, 10).unwrap();
        ok &= r.summary["constrained"][0] == true && r.passed();
        hits.push(r.summary["hits"][0].as_u64().unwrap());
    }
    outcome(ok, format!("t_ind(F,W)=0 for triangle/bipartite and P3/two cliques; induced hits {hits:?} over 200 samples at n=20"))
}

fn c11_metrics() -> Outcome {
    let mut d = Draw::new(11);
    let mut triangle_bad = 0;
    for _ in 0..200 {
        let (l1, l2, l3) = (d.range(1, 3), d.range(1, 3), d.range(1, 3));
        let (u, v, w) = (d.step(2, l1), d.step(2, l2), d.step(2, l3));
        let (uv, vw, uw) = (exact(&d1(&u, &v).unwrap()), exact(&d1(&v, &w).unwrap()), exact(&d1(&u, &w).unwrap()));
        if uw > uv + vw {
            triangle_bad += 1;
        }
    }
    let family: Vec<Hypergraph> = vec![edge(2), complete(2, 3), Hypergraph::new(2, 3, [[0, 1], [1, 2]]).unwrap()];
    let mut lower_bad = 0;
    let mut upper_bad = 0;
    for i in 0..200 {
        let (u, w) = (d.step(2, 2), d.step(2, 2));
        let lower = exact(&delta_w_lower(&u, &w, &family).unwrap());
        if lower > exact(&d1(&u, &w).unwrap()) {
            lower_bad += 1;
        }
        if i < 100 && exact(&delta1_upper(&u, &w, SearchBudget::default()).unwrap()) < lower {
            upper_bad += 1;
        }
    }
    let u = d.step(3, 2);
    let swap = vec![vec![0u16, 1], vec![0, 1], vec![1, 0]];
    let swapped = StepHypergraphon::from_structure(u.boxes().relabelled(&swap)).unwrap();
    let rec = delta1_upper(&swapped, &u, SearchBudget::default()).unwrap();
    let witness_ok = match &rec.witness {
        Some(Witness::LevelPermutation(sigma)) => {
            let s: Vec<Vec<u16>> = sigma.iter().map(|p| p.iter().map(|x| x - 1).collect()).collect();
            swapped.boxes().relabelled(&s) == *u.boxes()
        }
        _ => false,
    };
    let swap_ok = exact(&rec) == ratio(0, 1) && witness_ok;
    outcome(
        triangle_bad == 0 && lower_bad == 0 && upper_bad == 0 && swap_ok,
        format!(
            "triangle violations {triangle_bad}/200, delta_w > d1 {lower_bad}/200, delta1 < delta_w {upper_bad}/100, swap recovered {swap_ok}"
        ),
    )
}

fn c12_planted() -> Outcome {
    let c0 = CombinatorialStructure::from_predicate(2, 2, |x| x.level(1) == x.level(2)).unwrap();
    let planted = |n: usize, seed: u64| {
        // balanced vertex classes in a seeded order, random pair labels
        let key = StreamKey::new(seed).derive(0x9a);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| key.at(v as u64));
        let mut vertex = vec![0u16; n];
        for (i, &v) in order.iter().enumerate() {
            vertex[v] = (i % 2) as u16;
        }
        let pairs = Hyperpartition::random(n, 2, 2, seed).unwrap().labels(2).to_vec();
        let hp = Hyperpartition::new(n, 2, 2, vec![vertex, pairs]).unwrap();
        hp.cells_union(&c0).unwrap()
    };
    let mut good = 0;
    for seed in 0..20 {
        let r = refine(&planted(24, seed), &RefineOptions::new(2, seed)).unwrap();
        good += (to_f64(&r.eps) <= 0.05) as usize;
    }
    let mut exhaustive_ok = true;
    for (n, seed) in [(6usize, 1u64), (7, 2), (8, 3)] {
        let opts = RefineOptions { mode: SearchMode::Exhaustive, ..RefineOptions::new(2, seed) };
        exhaustive_ok &= refine(&planted(n, seed), &opts).unwrap().eps == ratio(0, 1);
    }
    outcome(
        good >= 16 && exhaustive_ok,
        format!("local search eps <= 0.05 on {good}/20 seeds at n=24 (need 16); exhaustive eps = 0 at n=6,7,8: {exhaustive_ok}"),
    )
}

fn c13_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let put = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let ex1 = put("ex1.json", &StepHypergraphon::builtin(Builtin::Example1, 2).unwrap().to_json());
    let tri = put("tri.json", &complete(2, 3).to_json());
    let e = put("edge.json", &edge(2).to_json());
    let k5 = put("k5.json", &complete(2, 5).to_json());
    let top2 = put(
        "top2.json",
        &CombinatorialStructure::from_predicate(2, 2, |x| x.level(3) == 1).unwrap().to_json(),
    );
    let hp = put("hp.json", &Hyperpartition::random(5, 2, 2, 1).unwrap().to_json());
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("sample", vec!["sample", "--W", &ex1, "--n", "30", "--seed", "1", "--out", "{out}/s.json"]),
        ("density", vec!["density", "--F", &tri, "--W", &ex1, "--samples", "3000", "--seed", "1"]),
        ("distance", vec!["distance", "--kind", "d1-mc", "--W", &ex1, "--W", &ex1, "--samples", "3000", "--seed", "1"]),
        ("delta", vec!["distance", "--kind", "delta", "--H", &tri, "--H", &k5, "--seed", "1"]),
        ("structure-density", vec!["structure-density", "--F", &e, "--C", &top2, "--HP", &hp, "--mode", "empirical", "--samples", "3000", "--seed", "1"]),
        ("regularize", vec!["regularize", "--H", &k5, "--l", "2", "--seed", "1", "--out", "{out}/r.json"]),
        ("closeness", vec!["closeness", "--H", &k5, "--C", &top2, "--HP", &hp, "--seed", "1"]),
        ("concentration", vec!["experiment", "concentration", "--W", &ex1, "--F", &e, "--n", "50", "--eps", "0.2", "--trials", "4", "--seed", "1", "--out", "{out}"]),
        ("counting", vec!["experiment", "counting", "--C", &top2, "--F", &tri, "--n", "10,20", "--trials", "2", "--seed", "1", "--out", "{out}"]),
        ("inverse", vec!["experiment", "inverse", "--W", &ex1, "--n", "12", "--trials", "2", "--seed", "1", "--out", "{out}"]),
        ("hereditary", vec!["experiment", "hereditary", "--W", &ex1, "--F", &tri, "--n", "8", "--trials", "3", "--seed", "1", "--out", "{out}"]),
        ("sequence", vec!["experiment", "sequence", "--H", &tri, "--H", &k5, "--l", "1", "--eps", "0.5", "--seed", "1", "--out", "{out}"]),
    ];
    let mut differing = Vec::new();
    for (name, args) in &runs {
        let mut seen: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
        for threads in ["1", "4"] {
            let out = dir.path().join(format!("{name}-{threads}"));
            std::fs::create_dir_all(&out).unwrap();
            let args: Vec<String> = args.iter().map(|a| a.replace("{out}", out.to_str().unwrap())).collect();
            let o = Command::new(env!("CARGO_BIN_EXE_hyperlimits"))
                .env_remove("HYPERLIMITS_OUT_DIR")
                .args(["--threads", threads])
                .args(&args)
                .output()
                .unwrap();
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
                })
                .collect();
            files.sort();
            files.push(("status".into(), vec![o.status.success() as u8]));
            files.push(("stdout".into(), o.stdout));
            seen.push(files);
        }
        if seen[0] != seen[1] || seen[0].iter().any(|(n, b)| n == "status" && b[0] != 1) {
            differing.push(*name);
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} stochastic subcommands byte-identical at --threads 1 and 4; differing {differing:?}", runs.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, Duration); 13] = [
        ("Example 1 reproduction", c1_example1, Duration::from_secs(10)),
        ("Example 2 reproduction", c2_example2, Duration::from_secs(10)),
        ("Inversion identity", c3_inversion, Duration::from_secs(60)),
        ("Blowup invariance", c4_blowup, Duration::from_secs(30)),
        ("Cross-path density equality", c5_cross_path, Duration::MAX),
        ("Cells-union identity", c6_rmwd, Duration::MAX),
        ("Concentration", c7_concentration, Duration::from_secs(300)),
        ("Counting lemma at desk scale", c8_counting, Duration::from_secs(120)),
        ("Sampler distribution", c9_sampler, Duration::MAX),
        ("Zero preservation", c10_zero_preservation, Duration::MAX),
        ("Metric properties", c11_metrics, Duration::MAX),
        ("Planted decomposition recovery", c12_planted, Duration::MAX),
        ("Determinism", c13_determinism, Duration::MAX),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *limit;
        let pass = o.passed && in_time;
        let budget = if *limit == Duration::MAX { String::new() } else { format!(", limit {}s", limit.as_secs()) };
        println!(
            "criterion {:>2} {} {name}: {} [{:.2}s{budget}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
