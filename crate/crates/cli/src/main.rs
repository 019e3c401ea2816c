//! `hyperlimits` command line front end.
//!
//! Inputs are JSON files named by flags; scalar results go to stdout and
//! structured results to `--out` (or stdout). Exit status is 0 on success,
//! 2 when an input is rejected and 1 on any other failure.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperlimits::canon::test_family;
use hyperlimits::experiments::{
    concentration_experiment, counting_experiment, hereditary_experiment, inverse_counting_experiment,
    removal_experiment, strong_convergence_report, ConcentrationParams, CountingParams, ExperimentReport,
    InverseParams,
};
use hyperlimits::hyperpartition::{
    empirical_dvh, exhaustive_dvh, structure_density_weighted, structure_density_with, CombinatorialStructure,
    Hyperpartition,
};
use hyperlimits::hypergraphon::{density_exact, density_montecarlo, Builtin, Hypergraphon, StepHypergraphon};
use hyperlimits::metrics::{
    closeness, d1, d1_montecarlo, delta1_upper, delta_metric_estimate, delta_w_lower, hamming_density,
    CylinderOptions, DistanceReport, FamilyBudget, SearchBudget,
};
use hyperlimits::rational::format;
use hyperlimits::regularity::{refine, RefineOptions, SearchMode};
use hyperlimits::sampling::{sample_vertex, sample_w};
use hyperlimits::{densities, t, t0, t_ind, Hypergraph};

const OUT_DIR_ENV: &str = "HYPERLIMITS_OUT_DIR";

#[derive(Parser)]
#[command(name = "hyperlimits", version, about = "Dense k-uniform hypergraph limits toolkit")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homomorphism densities of F in a hypergraph H or a step hypergraphon W.
    Density(DensityArgs),
    /// Draw G(W, n), G(W, HP, n) or G(H, n).
    Sample(SampleArgs),
    /// Distances between two hypergraphs or two step hypergraphons.
    Distance(DistanceArgs),
    /// t(F, C), optionally weighted by the labelling distribution of HP.
    StructureDensity(StructureDensityArgs),
    /// Search for an l-hyperpartition and structure close to H.
    Regularize(RegularizeArgs),
    /// (eps, delta)-closeness of H to a structure C through HP.
    Closeness(ClosenessArgs),
    /// Seeded experiment harnesses.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Print a builtin step hypergraphon.
    BuiltinW(BuiltinArgs),
    /// Parse and validate input files.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long = "F")]
    f: PathBuf,
    #[arg(long = "H", conflicts_with = "w")]
    h: Option<PathBuf>,
    /// Step hypergraphon; read from stdin when neither --H nor --W is given.
    #[arg(long = "W")]
    w: Option<PathBuf>,
    /// With --H: t, t0, t-ind or all. With W: exact or montecarlo.
    #[arg(long)]
    mode: Option<String>,
    /// Exact density against W (the default).
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Monte Carlo samples against W.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    induced: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long = "W", conflicts_with = "h")]
    w: Option<PathBuf>,
    /// Sample G(H, n) instead.
    #[arg(long = "H")]
    h: Option<PathBuf>,
    #[arg(long = "HP", conflicts_with = "h")]
    hp: Option<PathBuf>,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Hypergraph file; a `.meta.json` sidecar with seed and source is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistanceKind {
    D1,
    D1Mc,
    Hamming,
    DeltaWLower,
    Delta,
    Delta1Upper,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long, value_enum)]
    kind: DistanceKind,
    /// Two step hypergraphons (d1, d1-mc, delta-w-lower, delta1-upper).
    #[arg(long = "W", num_args = 1)]
    w: Vec<PathBuf>,
    /// Two hypergraphs (hamming, delta).
    #[arg(long = "H", num_args = 1)]
    h: Vec<PathBuf>,
    #[arg(long)]
    samples: Option<u64>,
    /// Largest test hypergraph size for delta and delta-w-lower.
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DvhMode {
    Exhaustive,
    Empirical,
}

#[derive(Args)]
struct StructureDensityArgs {
    #[arg(long = "F")]
    f: PathBuf,
    #[arg(long = "C")]
    c: PathBuf,
    /// Weight labellings by D(V(F), HP) instead of uniformly.
    #[arg(long = "HP")]
    hp: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: DvhMode,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, conflicts_with = "hp")]
    induced: bool,
    #[arg(long)]
    symmetrize: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefineMode {
    Local,
    Exhaustive,
}

#[derive(Args)]
struct RegularizeArgs {
    #[arg(long = "H")]
    h: PathBuf,
    #[arg(long)]
    l: usize,
    #[arg(long, value_enum, default_value = "local")]
    mode: RefineMode,
    #[arg(long, default_value_t = 50)]
    iterations: usize,
    /// Cylinder intersections sampled per class.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Report file; the trace goes to `<out>.trace.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClosenessArgs {
    #[arg(long = "H")]
    h: PathBuf,
    #[arg(long = "C")]
    c: PathBuf,
    #[arg(long = "HP")]
    hp: PathBuf,
    /// Cylinder intersections sampled per class.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    symmetrize: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentCommon {
    #[arg(long)]
    seed: Option<u64>,
    /// Report directory (default: $HYPERLIMITS_OUT_DIR, else the working directory).
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Tail of |t0(F, G(W, n)) - t(F, W)| against the Azuma bound.
    Concentration {
        #[arg(long = "W")]
        w: PathBuf,
        #[arg(long = "F")]
        f: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Injective maps per trial when t0 is sampled.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[command(flatten)]
        common: ExperimentCommon,
    },
    /// Deviation of t0(F, T) from t(F, C) for random hyperpartitions.
    Counting {
        #[arg(long = "C")]
        c: PathBuf,
        #[arg(long = "F")]
        f: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Tolerance for the final median deviation.
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long)]
        symmetrize: bool,
        #[command(flatten)]
        common: ExperimentCommon,
    },
    /// Decompose two samples of G(W, n) against one shared structure.
    Inverse {
        #[arg(long = "W")]
        w: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Threshold on eps for both decompositions.
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
        #[command(flatten)]
        common: ExperimentCommon,
    },
    /// Greedy removal of edges until H has no homomorphic copy of F.
    Removal {
        #[arg(long = "H")]
        h: PathBuf,
        #[arg(long = "F")]
        f: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Induced copies of zero-density F in G(W, HP, n).
    Hereditary {
        #[arg(long = "W")]
        w: PathBuf,
        #[arg(long = "F", num_args = 1, required = true)]
        f: Vec<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        common: ExperimentCommon,
    },
    /// One structure for a whole sequence of hypergraphs.
    Sequence {
        #[arg(long = "H", num_args = 1, required = true)]
        h: Vec<PathBuf>,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        eps: f64,
        /// Allowed growth of the per-member deficit.
        #[arg(long, default_value_t = 0.05)]
        slack: f64,
        #[command(flatten)]
        common: ExperimentCommon,
    },
}

#[derive(Args)]
struct BuiltinArgs {
    /// example1, example2, full or empty.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long = "H")]
    h: Option<PathBuf>,
    #[arg(long = "F")]
    f: Option<PathBuf>,
    #[arg(long = "W")]
    w: Option<PathBuf>,
    #[arg(long = "HP")]
    hp: Option<PathBuf>,
    #[arg(long = "C", alias = "structure")]
    c: Option<PathBuf>,
    #[arg(long)]
    symmetrize: bool,
}

/// Why a command failed; decides the exit status.
enum Failure {
    Input(String),
    Internal(String),
}

type Outcome<T> = Result<T, Failure>;

fn lib(flag: &str) -> impl Fn(hyperlimits::Error) -> Failure + '_ {
    move |e| {
        if e.is_validation() {
            Failure::Input(format!("--{flag}: {e}"))
        } else {
            Failure::Internal(format!("--{flag}: {e}"))
        }
    }
}

fn op(e: hyperlimits::Error) -> Failure {
    if e.is_validation() {
        Failure::Input(e.to_string())
    } else {
        Failure::Internal(e.to_string())
    }
}

fn read(path: &Path, flag: &str) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("--{flag}: cannot read {}: {e}", path.display())))
}

fn load_h(path: &Path, flag: &str) -> Outcome<Hypergraph> {
    Hypergraph::from_json(&read(path, flag)?).map_err(lib(flag))
}

fn load_w(path: Option<&Path>) -> Outcome<StepHypergraphon> {
    let text = match path {
        Some(p) => read(p, "W")?,
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Input(format!("--W: cannot read stdin: {e}")))?;
            s
        }
    };
    StepHypergraphon::from_json(&text).map_err(lib("W"))
}

fn load_hp(path: &Path) -> Outcome<Hyperpartition> {
    Hyperpartition::from_json(&read(path, "HP")?).map_err(lib("HP"))
}

fn load_c(path: &Path, symmetrize: bool) -> Outcome<CombinatorialStructure> {
    CombinatorialStructure::from_json(&read(path, "C")?, symmetrize).map_err(lib("C"))
}

/// The given seed, or a fresh one announced on stderr.
fn seed_or_fresh(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let nanos = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        let s = hyperlimits::rng::mix64(nanos ^ (std::process::id() as u64).rotate_left(32));
        eprintln!("seed: {s}");
        s
    })
}

fn emit(text: &str, out: Option<&Path>) -> Outcome<()> {
    match out {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(p) => write_file(p, &format!("{text}\n")),
    }
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    std::fs::write(path, text).map_err(|e| Failure::Internal(format!("--out: cannot write {}: {e}", path.display())))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn density(a: DensityArgs) -> Outcome<()> {
    let f = load_h(&a.f, "F")?;
    if let Some(h) = &a.h {
        let h = load_h(h, "H")?;
        let mode = a.mode.as_deref().unwrap_or(if a.induced { "t-ind" } else { "t" });
        let line = match mode {
            "t" => format(&t(&f, &h).map_err(op)?),
            "t0" => match t0(&f, &h).map_err(op)? {
                Some(x) => format(&x),
                None => return Err(Failure::Input("--F: t0 is undefined when |V(F)| > |V(H)|".into())),
            },
            "t-ind" => format(&t_ind(&f, &h).map_err(op)?),
            "all" => pretty(&densities(&f, &h).map_err(op)?),
            other => return Err(Failure::Input(format!("--mode: expected t, t0, t-ind or all, got {other:?}"))),
        };
        println!("{line}");
        return Ok(());
    }
    let w = load_w(a.w.as_deref())?;
    let montecarlo = match a.mode.as_deref() {
        None | Some("exact") => a.samples.is_some(),
        Some("montecarlo") => true,
        Some(other) => return Err(Failure::Input(format!("--mode: expected exact or montecarlo, got {other:?}"))),
    };
    if a.exact && montecarlo {
        return Err(Failure::Input("--exact: conflicts with --mode montecarlo".into()));
    }
    if montecarlo {
        let samples = a.samples.unwrap_or(100_000);
        let seed = seed_or_fresh(a.seed);
        let est = density_montecarlo(&f, &Hypergraphon::Step(w), a.induced, samples, seed).map_err(op)?;
        println!(
            "{:.6} stderr={:.6} samples={} seed={}",
            est.estimate, est.stderr, est.samples, est.seed
        );
    } else {
        println!("{}", format(&density_exact(&f, &w, a.induced).map_err(op)?));
    }
    Ok(())
}

fn sample(a: SampleArgs) -> Outcome<()> {
    let seed = seed_or_fresh(a.seed);
    let (h, meta) = if let Some(path) = &a.h {
        let base = load_h(path, "H")?;
        let h = sample_vertex(&base, a.n, seed).map_err(op)?;
        let meta = serde_json::json!({"seed": seed, "source": {"h": base.to_wire(), "n": a.n}, "edges": h.edge_count()});
        (h, meta)
    } else {
        let w = load_w(a.w.as_deref())?;
        let hp = a.hp.as_deref().map(load_hp).transpose()?;
        let rec = sample_w(&Hypergraphon::Step(w), a.n, seed, hp.as_ref()).map_err(op)?;
        let meta = serde_json::to_value(rec.sidecar()).expect("serializable");
        (rec.sample, meta)
    };
    match &a.out {
        None => println!("{}", h.to_json()),
        Some(p) => {
            write_file(p, &format!("{}\n", h.to_json()))?;
            write_file(&sidecar_path(p), &format!("{}\n", pretty(&meta)))?;
        }
    }
    Ok(())
}

fn two<T>(items: &[PathBuf], flag: &str, load: impl Fn(&Path) -> Outcome<T>) -> Outcome<(T, T)> {
    match items {
        [a, b] => Ok((load(a)?, load(b)?)),
        _ => Err(Failure::Input(format!("--{flag}: expected exactly two files, got {}", items.len()))),
    }
}

fn distance(a: DistanceArgs) -> Outcome<()> {
    let load_step = |p: &Path| load_w(Some(p));
    let report: DistanceReport = match a.kind {
        DistanceKind::D1 => {
            let (u, w) = two(&a.w, "W", load_step)?;
            d1(&u, &w).map_err(op)?
        }
        DistanceKind::D1Mc => {
            let (u, w) = two(&a.w, "W", load_step)?;
            let seed = seed_or_fresh(a.seed);
            d1_montecarlo(&u.into(), &w.into(), a.samples.unwrap_or(100_000), seed).map_err(op)?
        }
        DistanceKind::Hamming => {
            let (g, h) = two(&a.h, "H", |p| load_h(p, "H"))?;
            let value = hamming_density(&g, &h).map_err(op)?;
            println!("{}", format(&value));
            return Ok(());
        }
        DistanceKind::DeltaWLower => {
            let (u, w) = two(&a.w, "W", load_step)?;
            let seed = seed_or_fresh(a.seed);
            let per_size = a.samples.unwrap_or(64) as usize;
            let (family, _) = test_family(u.k(), a.n, per_size, seed, true).map_err(op)?;
            let mut r = delta_w_lower(&u, &w, &family).map_err(op)?;
            r.seed = Some(seed);
            r
        }
        DistanceKind::Delta => {
            let (g, h) = two(&a.h, "H", |p| load_h(p, "H"))?;
            let seed = seed_or_fresh(a.seed);
            let budget = FamilyBudget {
                per_size: a.samples.unwrap_or(64) as usize,
                seed,
            };
            delta_metric_estimate(&g, &h, a.n, budget).map_err(op)?
        }
        DistanceKind::Delta1Upper => {
            let (u, w) = two(&a.w, "W", load_step)?;
            let budget = SearchBudget {
                seed: a.seed.unwrap_or(0),
                ..SearchBudget::default()
            };
            delta1_upper(&u, &w, budget).map_err(op)?
        }
    };
    emit(&pretty(&report), a.out.as_deref())
}

fn structure_density(a: StructureDensityArgs) -> Outcome<()> {
    let f = load_h(&a.f, "F")?;
    let c = load_c(&a.c, a.symmetrize)?;
    let value = match &a.hp {
        None => structure_density_with(&f, &c, a.induced).map_err(op)?,
        Some(p) => {
            let hp = load_hp(p)?;
            let dist = match a.mode {
                DvhMode::Exhaustive => exhaustive_dvh(f.n(), &hp).map_err(op)?,
                DvhMode::Empirical => empirical_dvh(f.n(), &hp, a.samples, seed_or_fresh(a.seed)).map_err(op)?,
            };
            structure_density_weighted(&f, &c, &dist).map_err(op)?
        }
    };
    println!("{}", format(&value));
    Ok(())
}

fn regularize(a: RegularizeArgs) -> Outcome<()> {
    let h = load_h(&a.h, "H")?;
    let seed = seed_or_fresh(a.seed);
    let opts = RefineOptions {
        iterations: a.iterations,
        cylinder_samples: a.samples,
        mode: match a.mode {
            RefineMode::Local => SearchMode::Local,
            RefineMode::Exhaustive => SearchMode::Exhaustive,
        },
        ..RefineOptions::new(a.l, seed)
    };
    let report = refine(&h, &opts).map_err(op)?;
    emit(&report.to_json(), a.out.as_deref())?;
    if let Some(out) = &a.out {
        let mut name = out.file_stem().unwrap_or_default().to_os_string();
        name.push(".trace.csv");
        write_file(&out.with_file_name(name), &report.trace_csv())?;
    }
    Ok(())
}

fn closeness_cmd(a: ClosenessArgs) -> Outcome<()> {
    let h = load_h(&a.h, "H")?;
    let c = load_c(&a.c, a.symmetrize)?;
    let hp = load_hp(&a.hp)?;
    let seed = seed_or_fresh(a.seed);
    let opts = CylinderOptions {
        count: a.samples,
        seed,
        ..CylinderOptions::default()
    };
    let report = closeness(&h, &c, &hp, &opts).map_err(op)?;
    emit(&pretty(&report), a.out.as_deref())
}

fn finish_experiment(report: ExperimentReport, out: Option<PathBuf>) -> Outcome<()> {
    let dir = out.unwrap_or_else(|| PathBuf::from("."));
    let (json, csv) = report.write(&dir).map_err(op)?;
    for v in &report.verdicts {
        println!("{}: {} ({})", v.name, if v.passed { "pass" } else { "fail" }, v.detail);
    }
    eprintln!("wrote {} and {}", json.display(), csv.display());
    Ok(())
}

fn experiment(e: Experiment) -> Outcome<()> {
    match e {
        Experiment::Concentration { w, f, n, eps, trials, samples, common } => {
            let w = load_w(Some(&w))?;
            let f = load_h(&f, "F")?;
            let seed = seed_or_fresh(common.seed);
            let p = ConcentrationParams { n, eps, trials, t0_budget: samples, seed };
            finish_experiment(concentration_experiment(&w, &f, &p).map_err(op)?, common.out)
        }
        Experiment::Counting { c, f, n, trials, eps, samples, symmetrize, common } => {
            let c = load_c(&c, symmetrize)?;
            let f = load_h(&f, "F")?;
            let seed = seed_or_fresh(common.seed);
            let p = CountingParams {
                tolerance: eps,
                samples,
                ..CountingParams::new(n, trials, seed)
            };
            finish_experiment(counting_experiment(&c, &f, &p).map_err(op)?, common.out)
        }
        Experiment::Inverse { w, n, trials, eps, common } => {
            let w = load_w(Some(&w))?;
            let seed = seed_or_fresh(common.seed);
            let p = InverseParams {
                threshold: eps,
                ..InverseParams::new(n, trials, seed)
            };
            finish_experiment(inverse_counting_experiment(&w, &p).map_err(op)?, common.out)
        }
        Experiment::Removal { h, f, out } => {
            let h = load_h(&h, "H")?;
            let k = load_h(&f, "F")?;
            let out = out.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
            finish_experiment(removal_experiment(&h, &k).map_err(op)?, out)
        }
        Experiment::Hereditary { w, f, n, trials, common } => {
            let w = load_w(Some(&w))?;
            let fs = f.iter().map(|p| load_h(p, "F")).collect::<Outcome<Vec<_>>>()?;
            let seed = seed_or_fresh(common.seed);
            finish_experiment(hereditary_experiment(&w, &fs, n, trials, seed).map_err(op)?, common.out)
        }
        Experiment::Sequence { h, l, eps, slack, common } => {
            let seq = h.iter().map(|p| load_h(p, "H")).collect::<Outcome<Vec<_>>>()?;
            let seed = seed_or_fresh(common.seed);
            finish_experiment(strong_convergence_report(&seq, l, eps, slack, seed).map_err(op)?, common.out)
        }
    }
}

fn builtin(a: BuiltinArgs) -> Outcome<()> {
    let kind: Builtin = a.kind.parse().map_err(lib("kind"))?;
    let w = StepHypergraphon::builtin(kind, a.k).map_err(lib("k"))?;
    emit(&w.to_json(), a.out.as_deref())
}

fn validate(a: ValidateArgs) -> Outcome<()> {
    let mut checked = 0;
    if let Some(p) = &a.h {
        load_h(p, "H")?;
        checked += 1;
    }
    if let Some(p) = &a.f {
        load_h(p, "F")?;
        checked += 1;
    }
    if let Some(p) = &a.w {
        load_w(Some(p))?;
        checked += 1;
    }
    if let Some(p) = &a.hp {
        load_hp(p)?;
        checked += 1;
    }
    if let Some(p) = &a.c {
        load_c(p, a.symmetrize)?;
        checked += 1;
    }
    if checked == 0 {
        return Err(Failure::Input("nothing to validate: pass --H, --F, --W, --HP or --C".into()));
    }
    println!("ok");
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Density(a) => density(a),
        Command::Sample(a) => sample(a),
        Command::Distance(a) => distance(a),
        Command::StructureDensity(a) => structure_density(a),
        Command::Regularize(a) => regularize(a),
        Command::Closeness(a) => closeness_cmd(a),
        Command::Experiment(e) => experiment(e),
        Command::BuiltinW(a) => builtin(a),
        Command::Validate(a) => validate(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
