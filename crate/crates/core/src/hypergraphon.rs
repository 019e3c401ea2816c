//! Hypergraphons: S_k-invariant subsets of `[0,1]^{2^k-1}` with coordinates
//! indexed by the nonempty subsets of `[k]`.
//!
//! Step hypergraphons are unions of half-open l-boxes
//! `∏_A [(f(A)-1)/l, f(A)/l)` and get exact densities; anything else enters
//! through a membership predicate and Monte Carlo.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{for_each_subset, permutations};
use crate::error::{same_arity, Error, Result};
use crate::hyperpartition::{permute_mask, CellCoordinate, CombinatorialStructure, SimplexIndex};
use crate::hypergraph::Hypergraph;
use crate::rational::{ratio, Rational};
use crate::rng::{unit_level, unit_to_f64, StreamKey};

/// A point of `[0,1)^{2^k-1}`; `coords[mask - 1]` is the coordinate of the
/// subset `mask`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(k: usize, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != (1 << k) - 1 {
            return Err(Error::invalid("point", format!("expected {} coordinates", (1 << k) - 1)));
        }
        if let Some(x) = coords.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(Error::invalid("point", format!("coordinate {x} outside [0,1)")));
        }
        Ok(Point { coords })
    }

    #[inline]
    pub fn get(&self, mask: usize) -> f64 {
        self.coords[mask - 1]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The point with coordinates moved by the S_k action.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut coords = vec![0.0; self.coords.len()];
        for mask in 1..=self.coords.len() {
            coords[permute_mask(mask, perm) - 1] = self.coords[mask - 1];
        }
        Point { coords }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// `x_[k] < 1/2`, every other coordinate free.
    Example1,
    /// Every (k-1)-subset coordinate below 1/2.
    Example2,
    Full,
    Empty,
}

impl std::str::FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(Builtin::Example1),
            "example2" => Ok(Builtin::Example2),
            "full" => Ok(Builtin::Full),
            "empty" => Ok(Builtin::Empty),
            other => Err(Error::invalid("kind", format!("unknown builtin {other:?}"))),
        }
    }
}

/// A union of l-boxes; the boxes form a combinatorial structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepHypergraphon {
    boxes: CombinatorialStructure,
}

impl StepHypergraphon {
    /// `W_𝒞`.
    pub fn from_structure(c: CombinatorialStructure) -> Result<Self> {
        c.check_symmetric()?;
        Ok(StepHypergraphon { boxes: c })
    }

    pub fn builtin(kind: Builtin, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "arity must be at least 1"));
        }
        let boxes = match kind {
            Builtin::Example1 => CombinatorialStructure::from_predicate(k, 2, |c| c.level((1 << k) - 1) == 0)?,
            Builtin::Example2 => {
                if k < 2 {
                    return Err(Error::invalid("k", "example2 needs k >= 2"));
                }
                CombinatorialStructure::from_predicate(k, 2, |c| {
                    (0..k).all(|i| c.level(((1 << k) - 1) ^ (1 << i)) == 0)
                })?
            }
            Builtin::Full => CombinatorialStructure::full(k, 1)?,
            Builtin::Empty => CombinatorialStructure::empty(k, 1)?,
        };
        Ok(StepHypergraphon { boxes })
    }

    pub fn k(&self) -> usize {
        self.boxes.k()
    }

    pub fn l(&self) -> usize {
        self.boxes.l()
    }

    pub fn boxes(&self) -> &CombinatorialStructure {
        &self.boxes
    }

    /// Lebesgue measure, `|boxes| / l^{2^k-1}`.
    pub fn measure(&self) -> Rational {
        ratio(self.boxes.len() as u128, self.boxes.space() as u128)
    }

    #[inline]
    fn level(&self, x: f64) -> usize {
        ((x * self.l() as f64) as usize).min(self.l() - 1)
    }

    pub fn contains(&self, p: &Point) -> bool {
        if p.coords.len() != (1 << self.k()) - 1 {
            return false;
        }
        let l = self.l();
        let code = p.coords.iter().rev().fold(0, |acc, &x| acc * l + self.level(x));
        self.boxes.contains_code(code)
    }

    /// `W̃(q)`: the measure of `{x_[k] : (q, x_[k]) ∈ W}` for a point `q` on
    /// the `2^k - 2` proper-subset coordinates.
    pub fn projected_value(&self, q: &[f64]) -> Result<Rational> {
        let lower = (1 << self.k()) - 2;
        if q.len() != lower {
            return Err(Error::invalid("point", format!("expected {lower} coordinates")));
        }
        if let Some(x) = q.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(Error::invalid("point", format!("coordinate {x} outside [0,1)")));
        }
        let l = self.l();
        let code = q.iter().rev().fold(0, |acc, &x| acc * l + self.level(x));
        Ok(ratio(self.top_count(code) as u128, l as u128))
    }

    /// Number of top levels completing the lower code to a box.
    #[inline]
    fn top_count(&self, lower_code: usize) -> usize {
        let step = self.l().pow((1u32 << self.k()) - 2);
        (0..self.l())
            .filter(|&t| self.boxes.contains_code(lower_code + t * step))
            .count()
    }

    /// The same set on the `m·l` grid.
    pub fn refine(&self, m: usize) -> Result<Self> {
        Ok(StepHypergraphon { boxes: self.boxes.refine(m)? })
    }

    pub fn to_wire(&self) -> StepJson {
        let s = self.boxes.to_wire();
        StepJson { k: s.k, l: s.l, boxes: s.cells }
    }

    pub fn from_wire(w: &StepJson) -> Result<Self> {
        let cells = w
            .boxes
            .iter()
            .enumerate()
            .map(|(i, b)| CellCoordinate::from_wire(w.k, w.l, b, &format!("boxes[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let boxes = CombinatorialStructure::from_cells(w.k, w.l, cells)
            .map_err(|e| match e {
                Error::NotSymmetric { .. } => Error::NotSymmetric { what: "boxes" },
                other => other,
            })?;
        Ok(StepHypergraphon { boxes })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_wire(&serde_json::from_str(s)?)
    }
}

/// Wire format `{"k", "l", "boxes": [{"<mask>": label, ...}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepJson {
    pub k: usize,
    pub l: usize,
    pub boxes: Vec<std::collections::BTreeMap<String, u32>>,
}

type Predicate = Arc<dyn Fn(&Point) -> bool + Send + Sync>;

/// A hypergraphon given only by its membership predicate.
#[derive(Clone)]
pub struct GeneralHypergraphon {
    k: usize,
    name: String,
    member: Predicate,
}

impl fmt::Debug for GeneralHypergraphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralHypergraphon")
            .field("k", &self.k)
            .field("name", &self.name)
            .finish()
    }
}

impl GeneralHypergraphon {
    pub fn new(k: usize, name: impl Into<String>, member: impl Fn(&Point) -> bool + Send + Sync + 'static) -> Self {
        GeneralHypergraphon {
            k,
            name: name.into(),
            member: Arc::new(member),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.member)(p)
    }

    /// Checks invariance under every permutation of `[k]` at `samples`
    /// random points.
    pub fn check_invariance(&self, samples: u64, seed: u64) -> Result<()> {
        let key = StreamKey::new(seed).derive(0x51);
        let perms = permutations(self.k);
        let dim = (1u64 << self.k) - 1;
        for s in 0..samples {
            let sk = key.derive(s);
            let p = Point {
                coords: (0..dim).map(|i| unit_to_f64(sk.at(i))).collect(),
            };
            let base = self.contains(&p);
            if perms.iter().any(|perm| self.contains(&p.permuted(perm)) != base) {
                return Err(Error::NotSymmetric { what: "membership predicate" });
            }
        }
        Ok(())
    }
}

/// Either kind of hypergraphon.
#[derive(Clone, Debug)]
pub enum Hypergraphon {
    Step(StepHypergraphon),
    General(GeneralHypergraphon),
}

impl Hypergraphon {
    pub fn k(&self) -> usize {
        match self {
            Hypergraphon::Step(w) => w.k(),
            Hypergraphon::General(w) => w.k(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Hypergraphon::Step(w) => w.contains(p),
            Hypergraphon::General(w) => w.contains(p),
        }
    }

    /// Membership of the point whose coordinates are the fixed-point
    /// uniforms `u[mask - 1]`.
    #[inline]
    pub(crate) fn contains_units(&self, u: &[u64]) -> bool {
        match self {
            Hypergraphon::Step(w) => {
                let l = w.l();
                let code = u.iter().rev().fold(0, |acc, &x| acc * l + unit_level(x, l));
                w.boxes.contains_code(code)
            }
            Hypergraphon::General(w) => w.contains(&Point {
                coords: u.iter().map(|&x| unit_to_f64(x)).collect(),
            }),
        }
    }
}

impl From<StepHypergraphon> for Hypergraphon {
    fn from(w: StepHypergraphon) -> Self {
        Hypergraphon::Step(w)
    }
}

/// The k-subsets constrained by `F`: edges, and non-edges when `induced`.
fn constraints(f: &Hypergraph, induced: bool) -> Vec<(Vec<u32>, bool)> {
    let mut out = Vec::new();
    for_each_subset(f.n(), f.k(), |s| {
        let inside = f.contains_sorted(s);
        if inside || induced {
            out.push((s.to_vec(), inside));
        }
    });
    out
}

/// `t(F, W)` (or `t_ind`) for a step hypergraphon, exactly.
///
/// Integrates out each edge's top coordinate first, which leaves the product
/// of projected values `W̃` over the edges; the remaining lower coordinates
/// only matter through their grid cells, which are enumerated with pruning
/// as soon as some factor vanishes.
pub fn density_exact(f: &Hypergraph, w: &StepHypergraphon, induced: bool) -> Result<Rational> {
    same_arity(f.k(), w.k())?;
    let k = f.k();
    let l = w.l();
    let index = SimplexIndex::new(f.n(), k)?;
    let cons = constraints(f, induced);
    // lower simplices in order of their largest vertex, then size
    let mut lower: Vec<Vec<u32>> = Vec::new();
    for (s, _) in &cons {
        for mask in 1..(1usize << k) - 1 {
            let sub: Vec<u32> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            lower.push(sub);
        }
    }
    lower.sort_by(|a, b| (a.last(), a.len(), a).cmp(&(b.last(), b.len(), b)));
    lower.dedup();
    let mut slot_of = vec![usize::MAX; index.len()];
    for (i, s) in lower.iter().enumerate() {
        slot_of[index.index(s)] = i;
    }
    // each constraint becomes checkable once its last lower simplex is set
    let mut due: Vec<Vec<(Vec<usize>, bool)>> = vec![Vec::new(); lower.len().max(1)];
    let mut free_factor = 1u128;
    for (s, inside) in &cons {
        let faces = index.faces(s);
        let slots: Vec<usize> = faces[..(1 << k) - 2].iter().map(|&x| slot_of[x]).collect();
        match slots.iter().max() {
            Some(&last) => due[last].push((slots, *inside)),
            None => {
                let hits = w.top_count(0);
                free_factor *= if *inside { hits } else { l - hits } as u128;
            }
        }
    }
    let bits = ((lower.len() + cons.len()) as f64) * (l as f64).log2();
    if bits > 126.0 {
        return Err(Error::cap("bits of the exact density numerator", bits as u128, 126));
    }
    fn walk(
        depth: usize,
        levels: &mut Vec<usize>,
        due: &[Vec<(Vec<usize>, bool)>],
        w: &StepHypergraphon,
        acc: u128,
    ) -> u128 {
        if depth == levels.len() {
            return acc;
        }
        let l = w.l();
        let mut total = 0;
        for v in 0..l {
            levels[depth] = v;
            let mut prod = acc;
            for (slots, inside) in &due[depth] {
                let code = slots.iter().rev().fold(0, |a, &s| a * l + levels[s]);
                let hits = w.top_count(code);
                prod *= if *inside { hits } else { l - hits } as u128;
                if prod == 0 {
                    break;
                }
            }
            if prod != 0 {
                total += walk(depth + 1, levels, due, w, prod);
            }
        }
        total
    }
    let mut levels = vec![0; lower.len()];
    let num = if free_factor == 0 { 0 } else { walk(0, &mut levels, &due, w, free_factor) };
    let den = (l as u128).pow((lower.len() + cons.len()) as u32);
    Ok(ratio(num, den))
}

/// A Monte Carlo estimate with its binomial standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_hits(hits: u64, samples: u64, seed: u64) -> Self {
        let p = hits as f64 / samples.max(1) as f64;
        Estimate {
            estimate: p,
            stderr: (p * (1.0 - p) / samples.max(1) as f64).sqrt(),
            hits,
            samples,
            seed,
        }
    }
}

/// `t(F, W)` (or `t_ind`) by sampling independent uniforms for every simplex
/// of `r(V(F), k)` that a constraint touches.
pub fn density_montecarlo(
    f: &Hypergraph,
    w: &Hypergraphon,
    induced: bool,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    same_arity(f.k(), w.k())?;
    if samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    let index = SimplexIndex::new(f.n(), f.k())?;
    let cons: Vec<(Vec<usize>, bool)> = constraints(f, induced)
        .into_iter()
        .map(|(s, inside)| (index.faces(&s), inside))
        .collect();
    let key = StreamKey::new(seed).derive(0x3c);
    let dim = (1usize << f.k()) - 1;
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map_init(
            || vec![0u64; dim],
            |u, s| {
                let sk = key.derive(s);
                let ok = cons.iter().all(|(faces, inside)| {
                    for (slot, &face) in u.iter_mut().zip(faces) {
                        *slot = sk.at(face as u64);
                    }
                    w.contains_units(u) == *inside
                });
                ok as u64
            },
        )
        .sum();
    Ok(Estimate::from_hits(hits, samples, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{half_pow, one, zero};

    fn tri() -> Hypergraph {
        Hypergraph::new(2, 3, [[0u32, 1], [1, 2], [0, 2]]).unwrap()
    }

    #[test]
    fn builtin_measures() {
        let w = StepHypergraphon::builtin(Builtin::Example1, 3).unwrap();
        assert_eq!(w.measure(), ratio(1, 2));
        assert_eq!(w.boxes().len(), 64);
        assert_eq!(StepHypergraphon::builtin(Builtin::Full, 2).unwrap().measure(), one());
        assert!(StepHypergraphon::builtin(Builtin::Example2, 1).is_err());
        let e2 = StepHypergraphon::builtin(Builtin::Example2, 3).unwrap();
        assert_eq!(e2.measure(), ratio(1, 8));
    }

    #[test]
    fn containment_is_half_open() {
        let w = StepHypergraphon::builtin(Builtin::Example1, 2).unwrap();
        let p = |top: f64| Point::new(2, vec![0.9, 0.1, top]).unwrap();
        assert!(w.contains(&p(0.3)));
        assert!(!w.contains(&p(0.7)));
        assert!(!w.contains(&p(0.5)));
        assert!(Point::new(2, vec![0.1, 0.2, 1.0]).is_err());
    }

    #[test]
    fn projected_values() {
        let w = StepHypergraphon::builtin(Builtin::Example1, 2).unwrap();
        assert_eq!(w.projected_value(&[0.2, 0.9]).unwrap(), ratio(1, 2));
        let full = StepHypergraphon::builtin(Builtin::Full, 2).unwrap();
        assert_eq!(full.projected_value(&[0.2, 0.9]).unwrap(), one());
        // both vertex coordinates in level 1, any top level
        let c = CombinatorialStructure::from_predicate(2, 2, |c| c.level(1) == 0 && c.level(2) == 0).unwrap();
        let w = StepHypergraphon::from_structure(c).unwrap();
        assert_eq!(w.projected_value(&[0.1, 0.4]).unwrap(), one());
        assert_eq!(w.projected_value(&[0.1, 0.6]).unwrap(), zero());
    }

    #[test]
    fn example_densities() {
        let w = StepHypergraphon::builtin(Builtin::Example1, 2).unwrap();
        assert_eq!(density_exact(&tri(), &w, false).unwrap(), half_pow(3));
        let e2 = StepHypergraphon::builtin(Builtin::Example2, 3).unwrap();
        let edge = Hypergraph::new(3, 3, [[0u32, 1, 2]]).unwrap();
        assert_eq!(density_exact(&edge, &e2, false).unwrap(), half_pow(3));
        let full = StepHypergraphon::builtin(Builtin::Full, 2).unwrap();
        assert_eq!(density_exact(&tri(), &full, true).unwrap(), one());
        let empty = StepHypergraphon::builtin(Builtin::Empty, 2).unwrap();
        assert_eq!(density_exact(&Hypergraph::empty(2, 3).unwrap(), &empty, true).unwrap(), one());
    }

    #[test]
    fn montecarlo_agrees() {
        let w: Hypergraphon = StepHypergraphon::builtin(Builtin::Example1, 2).unwrap().into();
        let e = density_montecarlo(&tri(), &w, false, 100_000, 7).unwrap();
        assert!((e.estimate - 0.125).abs() <= 4.0 * e.stderr, "{e:?}");
    }

    #[test]
    fn general_predicate_invariance() {
        let sym = GeneralHypergraphon::new(2, "sum", |p| p.get(1) + p.get(2) < 1.0);
        sym.check_invariance(200, 1).unwrap();
        let skew = GeneralHypergraphon::new(2, "skew", |p| p.get(1) < 0.5);
        assert!(skew.check_invariance(200, 1).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let w = StepHypergraphon::builtin(Builtin::Example1, 2).unwrap();
        let text = w.to_json();
        assert!(text.contains(r#""boxes":"#));
        assert_eq!(StepHypergraphon::from_json(&text).unwrap(), w);
    }
}
