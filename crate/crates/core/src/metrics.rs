//! Distances between hypergraphs and hypergraphons, and `(ε, δ)`-closeness.

use num_integer::Integer;
use num_traits::Signed;
use rayon::prelude::*;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::canon::{test_family, FamilyMode};
use crate::combinatorics::{binomial, permutations};
use crate::error::{same_arity, Error, Result};
use crate::hom::t;
use crate::hyperpartition::{regularity_deficit, CombinatorialStructure, CylinderFamily, Deficit, Hyperpartition};
use crate::hypergraph::Hypergraph;
use crate::hypergraphon::{density_exact, Estimate, Hypergraphon, StepHypergraphon};
use crate::rational::{ratio, zero, Rational};
use crate::rng::{StreamKey};

/// The guarantee attached to a reported distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    Exact,
    LowerBound,
    UpperBound,
    Estimate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistanceValue {
    Exact(Rational),
    Real(Estimate),
}

impl DistanceValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            DistanceValue::Exact(r) => crate::rational::to_f64(r),
            DistanceValue::Real(e) => e.estimate,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            DistanceValue::Exact(r) => Some(r),
            DistanceValue::Real(_) => None,
        }
    }
}

/// What realizes a reported value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// A test hypergraph `F`.
    Hypergraph(Hypergraph),
    /// Level permutations `σ_r` (1-based images of levels `1..=l`), one per
    /// arity, applied to the first argument.
    LevelPermutation(Vec<Vec<u16>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceReport {
    pub kind: DistanceKind,
    pub value: DistanceValue,
    pub witness: Option<Witness>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

impl Serialize for DistanceReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("kind", &self.kind)?;
        match &self.value {
            DistanceValue::Exact(r) => m.serialize_entry("value", &crate::rational::format(r))?,
            DistanceValue::Real(e) => {
                m.serialize_entry("value", &e.estimate)?;
                m.serialize_entry("stderr", &e.stderr)?;
                m.serialize_entry("samples", &e.samples)?;
            }
        }
        m.serialize_entry("witness", &self.witness)?;
        m.serialize_entry("seed", &self.seed)?;
        m.serialize_entry("budget", &self.budget)?;
        m.end()
    }
}

impl DistanceReport {
    fn exact(kind: DistanceKind, value: Rational) -> Self {
        DistanceReport {
            kind,
            value: DistanceValue::Exact(value),
            witness: None,
            seed: None,
            budget: None,
        }
    }
}

/// Overlap of `[i/a, (i+1)/a)` and `[j/b, (j+1)/b)` in units of `1/lcm`.
fn overlap(i: usize, a: usize, j: usize, b: usize, lcm: usize) -> u128 {
    let (sa, sb) = (lcm / a, lcm / b);
    let lo = (i * sa).max(j * sb);
    let hi = ((i + 1) * sa).min((j + 1) * sb);
    hi.saturating_sub(lo) as u128
}

/// Lebesgue measure of `U ∩ W` for step hypergraphons.
fn intersection_measure(u: &StepHypergraphon, w: &StepHypergraphon) -> Rational {
    let (a, b) = (u.l(), w.l());
    if a == b {
        let both = u
            .boxes()
            .cells()
            .filter(|c| w.boxes().contains(c))
            .count();
        return ratio(both as u128, u.boxes().space() as u128);
    }
    let lcm = a.lcm(&b);
    let dim = (1u32 << u.k()) - 1;
    let ws: Vec<_> = w.boxes().cells().collect();
    let num: num_bigint::BigUint = u
        .boxes()
        .cells()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|cu| {
            let mut acc = num_bigint::BigUint::from(0u8);
            for cw in &ws {
                let mut prod = 1u128;
                for (&x, &y) in cu.levels().iter().zip(cw.levels()) {
                    prod *= overlap(x as usize, a, y as usize, b, lcm);
                    if prod == 0 {
                        break;
                    }
                }
                acc += prod;
            }
            acc
        })
        .sum();
    let den = num_bigint::BigUint::from(lcm).pow(dim);
    crate::rational::ratio_big(num.into(), den.into())
}

/// `d₁(U, W)`: the measure of the symmetric difference, exactly.
pub fn d1(u: &StepHypergraphon, w: &StepHypergraphon) -> Result<DistanceReport> {
    same_arity(u.k(), w.k())?;
    let inter = intersection_measure(u, w);
    let value = u.measure() + w.measure() - inter * Rational::from_integer(2.into());
    Ok(DistanceReport::exact(DistanceKind::Exact, value))
}

/// `d₁(U, W)` estimated from `samples` uniform points.
pub fn d1_montecarlo(u: &Hypergraphon, w: &Hypergraphon, samples: u64, seed: u64) -> Result<DistanceReport> {
    same_arity(u.k(), w.k())?;
    if samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    let dim = (1u64 << u.k()) - 1;
    let key = StreamKey::new(seed).derive(0xd1);
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map_init(
            || vec![0u64; dim as usize],
            |p, s| {
                let sk = key.derive(s);
                for (i, x) in p.iter_mut().enumerate() {
                    *x = sk.at(i as u64);
                }
                (u.contains_units(p) != w.contains_units(p)) as u64
            },
        )
        .sum();
    Ok(DistanceReport {
        kind: DistanceKind::Estimate,
        value: DistanceValue::Real(Estimate::from_hits(hits, samples, seed)),
        witness: None,
        seed: Some(seed),
        budget: Some(samples),
    })
}

/// `|E(H) Δ E(T)| / C(n, k)`.
pub fn hamming_density(h: &Hypergraph, t: &Hypergraph) -> Result<Rational> {
    same_arity(h.k(), t.k())?;
    if h.n() != t.n() {
        return Err(Error::ShapeMismatch {
            field: "n",
            detail: format!("{} vs {} vertices", h.n(), t.n()),
        });
    }
    let total = binomial(h.n() as u64, h.k() as u64).expect("fits");
    if total == 0 {
        return Ok(zero());
    }
    let (a, b) = (h.ranks(), t.ranks());
    let (mut i, mut j, mut common) = (0, 0, 0u128);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let diff = a.len() as u128 + b.len() as u128 - 2 * common;
    Ok(ratio(diff, total))
}

/// `max_F |t(F,U) − t(F,W)| / |E(F)|` over `family`: a lower bound on
/// `δ_w(U, W)`.
pub fn delta_w_lower(u: &StepHypergraphon, w: &StepHypergraphon, family: &[Hypergraph]) -> Result<DistanceReport> {
    same_arity(u.k(), w.k())?;
    if family.is_empty() {
        return Err(Error::invalid("family", "empty"));
    }
    let mut best = zero();
    let mut witness = None;
    for (i, f) in family.iter().enumerate() {
        same_arity(f.k(), u.k())?;
        if f.edge_count() == 0 {
            return Err(Error::invalid(format!("family[{i}]"), "has no edges"));
        }
        let gap = (density_exact(f, u, false)? - density_exact(f, w, false)?).abs()
            / Rational::from_integer(f.edge_count().into());
        if gap > best || witness.is_none() {
            best = gap;
            witness = Some(f.clone());
        }
    }
    Ok(DistanceReport {
        kind: DistanceKind::LowerBound,
        value: DistanceValue::Exact(best),
        witness: witness.map(Witness::Hypergraph),
        seed: None,
        budget: Some(family.len() as u64),
    })
}

/// Options for [`delta_metric_estimate`].
#[derive(Clone, Copy, Debug)]
pub struct FamilyBudget {
    /// Random test hypergraphs per vertex count beyond the exhaustive sizes.
    pub per_size: usize,
    pub seed: u64,
}

impl Default for FamilyBudget {
    fn default() -> Self {
        FamilyBudget { per_size: 64, seed: 0 }
    }
}

/// The δ-distance on the grid `{0, 1/m, 2/m, …, 1}` (`m = max_size`): the
/// smallest grid value `ε` with `|t(F,H1) − t(F,H2)| ≤ ε` for every tested
/// `F` on at most `1/ε` vertices (all tested `F` when `ε = 0`). The witness
/// is an `F` ruling out the next smaller grid value.
pub fn delta_metric_estimate(
    h1: &Hypergraph,
    h2: &Hypergraph,
    max_size: usize,
    budget: FamilyBudget,
) -> Result<DistanceReport> {
    same_arity(h1.k(), h2.k())?;
    let k = h1.k();
    if max_size < k {
        return Err(Error::invalid("max_size", format!("must be at least k={k}")));
    }
    let (family, mode) = test_family(k, max_size, budget.per_size, budget.seed, true)?;
    let gaps: Vec<(usize, Rational)> = family
        .par_iter()
        .map(|f| Ok((f.n(), (t(f, h1)? - t(f, h2)?).abs())))
        .collect::<Result<_>>()?;
    let m = max_size;
    let mut value = None;
    let mut blocker: Option<usize> = None;
    for j in 0..=m {
        let eps = ratio(j as u128, m as u128);
        let limit = if j == 0 { usize::MAX } else { m / j };
        let bad = gaps.iter().position(|(v, g)| *v <= limit && *g > eps);
        match bad {
            None => {
                value = Some(eps);
                break;
            }
            Some(i) => blocker = Some(i),
        }
    }
    Ok(DistanceReport {
        kind: DistanceKind::Estimate,
        value: DistanceValue::Exact(value.expect("every gap is at most 1")),
        witness: blocker.map(|i| Witness::Hypergraph(family[i].clone())),
        seed: (mode == FamilyMode::Sampled).then_some(budget.seed),
        budget: Some(family.len() as u64),
    })
}

fn d1_same_grid(u: &CombinatorialStructure, w: &CombinatorialStructure) -> usize {
    u.cells().filter(|c| !w.contains(c)).count() + w.cells().filter(|c| !u.contains(c)).count()
}

/// Search budget for [`delta1_upper`].
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    /// Exhaustive search when `(l!)^k` is at most this.
    pub exhaustive_limit: u64,
    pub restarts: u64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            exhaustive_limit: 100_000,
            restarts: 16,
            seed: 0,
        }
    }
}

/// Upper bound on `δ₁(U, W)`: the least `d₁(σU, W)` over per-arity level
/// permutations `σ = (σ_1, …, σ_k)`, searched exhaustively when affordable
/// and by seeded hill climbing otherwise. Ties go to the lexicographically
/// smallest `σ`.
pub fn delta1_upper(u: &StepHypergraphon, w: &StepHypergraphon, budget: SearchBudget) -> Result<DistanceReport> {
    same_arity(u.k(), w.k())?;
    let k = u.k();
    let l = u.l().lcm(&w.l());
    let u2 = u.refine(l / u.l())?;
    let w2 = w.refine(l / w.l())?;
    let (ub, wb) = (u2.boxes(), w2.boxes());
    let space = ub.space() as u128;
    let cost = |sigma: &[Vec<u16>]| d1_same_grid(&ub.relabelled(sigma), wb);
    let per_arity = (1..=l as u64).product::<u64>();
    let total = (per_arity as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    let (best, sigma) = if total <= budget.exhaustive_limit as u128 {
        let perms: Vec<Vec<u16>> = permutations(l)
            .into_iter()
            .map(|p| p.into_iter().map(|x| x as u16).collect())
            .collect();
        // odometer over (σ_1..σ_k) in lexicographic order
        (0..total as u64)
            .into_par_iter()
            .map(|mut code| {
                let mut digits = vec![0usize; k];
                for d in digits.iter_mut().rev() {
                    *d = (code % per_arity) as usize;
                    code /= per_arity;
                }
                let sigma: Vec<Vec<u16>> = digits.iter().map(|&d| perms[d].clone()).collect();
                (cost(&sigma), sigma)
            })
            .min()
            .expect("at least one permutation")
    } else {
        let key = StreamKey::new(budget.seed).derive(0xd5);
        (0..budget.restarts)
            .into_par_iter()
            .map(|start| {
                let mut rng = key.derive(start).rng();
                let mut sigma: Vec<Vec<u16>> = (0..k)
                    .map(|_| {
                        let mut p: Vec<u16> = (0..l as u16).collect();
                        rand::seq::SliceRandom::shuffle(&mut p[..], &mut rng);
                        p
                    })
                    .collect();
                let mut value = cost(&sigma);
                loop {
                    let mut improved = false;
                    for r in 0..k {
                        for a in 0..l {
                            for b in a + 1..l {
                                sigma[r].swap(a, b);
                                let c = cost(&sigma);
                                if c < value {
                                    value = c;
                                    improved = true;
                                } else {
                                    sigma[r].swap(a, b);
                                }
                            }
                        }
                    }
                    if !improved {
                        break;
                    }
                }
                (value, sigma)
            })
            .min()
            .expect("at least one restart")
    };
    let exhaustive = total <= budget.exhaustive_limit as u128;
    Ok(DistanceReport {
        kind: DistanceKind::UpperBound,
        value: DistanceValue::Exact(ratio(best as u128, space)),
        witness: Some(Witness::LevelPermutation(
            sigma.iter().map(|p| p.iter().map(|&x| x + 1).collect()).collect(),
        )),
        seed: (!exhaustive).then_some(budget.seed),
        budget: Some(if exhaustive { total as u64 } else { budget.restarts }),
    })
}

/// Cylinder family used when estimating regularity deficits.
#[derive(Clone, Debug)]
pub struct CylinderOptions {
    pub count: usize,
    pub seed: u64,
    /// Only cylinder intersections with `|L| ≥ min_fraction·C(n, r)` count.
    pub min_fraction: Rational,
}

impl Default for CylinderOptions {
    fn default() -> Self {
        CylinderOptions {
            count: 64,
            seed: 0,
            min_fraction: ratio(1, 10),
        }
    }
}

/// Evidence for `(ε, δ)`-closeness of `W_𝒞` to `H` via `ℋ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Closeness {
    #[serde(with = "crate::rational::string")]
    pub eps: Rational,
    #[serde(with = "crate::rational::string")]
    pub delta: Rational,
    #[serde(with = "crate::rational::string")]
    pub equitability: Rational,
    /// Largest regularity deficit among the classes `P_r^j`.
    #[serde(with = "crate::rational::string")]
    pub regularity: Rational,
    pub cylinders: usize,
    pub seed: u64,
}

/// Largest sampled regularity deficit over all classes of `hp`.
pub fn max_regularity_deficit(hp: &Hyperpartition, opts: &CylinderOptions) -> Result<Rational> {
    let mut worst = zero();
    for r in 1..=hp.k() {
        for level in 0..hp.l() as u16 {
            let class = hp.class(r, level)?;
            let family = CylinderFamily::Sampled {
                count: opts.count,
                seed: opts.seed,
            };
            let Deficit { value, .. } = regularity_deficit(&class, &family, &opts.min_fraction)?;
            if value > worst {
                worst = value;
            }
        }
    }
    Ok(worst)
}

/// `eps = hamming(H, cells_union(ℋ, 𝒞))`, `delta = max(equitability,
/// sampled regularity deficits)`.
pub fn closeness(
    h: &Hypergraph,
    c: &CombinatorialStructure,
    hp: &Hyperpartition,
    opts: &CylinderOptions,
) -> Result<Closeness> {
    if hp.n() != h.n() {
        return Err(Error::ShapeMismatch {
            field: "HP",
            detail: format!("hyperpartition on {} vertices, H on {}", hp.n(), h.n()),
        });
    }
    same_arity(h.k(), hp.k())?;
    let union = hp.cells_union(c)?;
    let eps = hamming_density(h, &union)?;
    let equitability = hp.equitability_deficit();
    let regularity = max_regularity_deficit(hp, opts)?;
    let delta = if equitability > regularity { equitability.clone() } else { regularity.clone() };
    Ok(Closeness {
        eps,
        delta,
        equitability,
        regularity,
        cylinders: opts.count,
        seed: opts.seed,
    })
}
