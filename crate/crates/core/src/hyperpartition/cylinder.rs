//! Cylinder intersections and the regularity deficit of one r-uniform class.
//!
//! A cylinder intersection is built from r hypergraphs `B_1..B_r` that are
//! (r-1)-uniform on `[n]`: an r-set is in `L` when its r faces can be matched
//! to `B_1..B_r`, face omitting the i-th vertex (under some ordering) lying
//! in `B_i`.

use num_traits::Signed;

use crate::combinatorics::{for_each_subset, permutations, Colex};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::{ratio, zero, Rational};
use crate::rng::StreamKey;

/// Which cylinder intersections to test.
#[derive(Clone, Debug)]
pub enum CylinderFamily {
    /// Every r-tuple (with repetition) drawn from a pool of (r-1)-uniform
    /// hypergraphs, each given as membership by colex rank.
    Pool(Vec<Vec<bool>>),
    /// `count` tuples of independent random (r-1)-uniform hypergraphs with
    /// edge probability 1/2.
    Sampled { count: usize, seed: u64 },
}

impl CylinderFamily {
    /// Pool from explicit (r-1)-uniform hypergraphs (r ≥ 2).
    pub fn pool(hypergraphs: &[Hypergraph]) -> Self {
        CylinderFamily::Pool(
            hypergraphs
                .iter()
                .map(|b| (0..b.slots()).map(|rank| b.contains_rank(rank)).collect())
                .collect(),
        )
    }
}

/// Result of [`regularity_deficit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deficit {
    /// Largest `| |G|/C(n,r) − |G∩L|/|L| |` over qualifying `L`.
    pub value: Rational,
    /// Number of generated `L` with `|L| ≥ eps·C(n,r)`.
    pub qualifying: usize,
    pub tested: usize,
}

/// Largest density deviation of the r-uniform `g` on the tested cylinder
/// intersections of size at least `eps·C(n, r)`. A lower bound for the
/// smallest ε making `g` ε-regular.
pub fn regularity_deficit(g: &Hypergraph, family: &CylinderFamily, eps: &Rational) -> Result<Deficit> {
    let r = g.k();
    let n = g.n();
    let colex = Colex::new(n, r)?;
    let faces = colex.count(r - 1) as usize;
    let total = colex.count(r);
    let tuples: Box<dyn Iterator<Item = Vec<Vec<bool>>>> = match family {
        CylinderFamily::Pool(pool) => {
            if pool.is_empty() {
                return Err(Error::invalid("cylinders", "empty pool"));
            }
            if let Some(b) = pool.iter().find(|b| b.len() != faces) {
                return Err(Error::invalid(
                    "cylinders",
                    format!("pool member has {} slots, expected C({n},{}) = {faces}", b.len(), r - 1),
                ));
            }
            let count = pool.len().pow(r as u32);
            Box::new((0..count).map(move |mut code| {
                (0..r)
                    .map(|_| {
                        let b = pool[code % pool.len()].clone();
                        code /= pool.len();
                        b
                    })
                    .collect()
            }))
        }
        CylinderFamily::Sampled { count, seed } => {
            if *count == 0 {
                return Err(Error::invalid("cylinders", "empty sampled family"));
            }
            let key = StreamKey::new(*seed).derive(0xc7 + r as u64);
            Box::new((0..*count as u64).map(move |t| {
                (0..r as u64)
                    .map(|i| {
                        let sk = key.derive(t).derive(i);
                        (0..faces as u64).map(|rank| sk.at(rank) >> 63 == 1).collect()
                    })
                    .collect()
            }))
        }
    };
    let global = ratio(g.edge_count() as u128, total as u128);
    let threshold = eps * Rational::from_integer(total.into());
    let perms = permutations(r);
    let mut worst = zero();
    let mut qualifying = 0;
    let mut tested = 0;
    let mut face_rank = vec![0u64; r];
    let mut buf = Vec::with_capacity(r);
    for bs in tuples {
        tested += 1;
        let mut size = 0u64;
        let mut hits = 0u64;
        let mut rank = 0u64;
        for_each_subset(n, r, |s| {
            for (i, slot) in face_rank.iter_mut().enumerate() {
                buf.clear();
                buf.extend(s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
                *slot = colex.rank(&buf);
            }
            // ordering σ: face omitting s[σ(i)] must lie in B_i
            let member = perms
                .iter()
                .any(|p| p.iter().enumerate().all(|(i, &j)| bs[i][face_rank[j] as usize]));
            if member {
                size += 1;
                if g.contains_rank(rank) {
                    hits += 1;
                }
            }
            rank += 1;
        });
        if size > 0 && Rational::from_integer(size.into()) >= threshold {
            qualifying += 1;
            let dev = (&global - ratio(hits as u128, size as u128)).abs();
            if dev > worst {
                worst = dev;
            }
        }
    }
    Ok(Deficit { value: worst, qualifying, tested })
}
