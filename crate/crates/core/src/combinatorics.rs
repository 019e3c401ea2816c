//! Counting and enumeration helpers: binomials, colex ranking of subsets,
//! set partitions as restricted-growth strings, permutations.

use crate::error::{Error, Result};

/// `C(n, r)` in 128 bits, `None` on overflow.
pub fn binomial(n: u64, r: u64) -> Option<u128> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `n (n-1) ... (n-m+1)`.
pub fn falling_factorial(n: u64, m: u64) -> Option<u128> {
    if m > n {
        return Some(0);
    }
    (0..m).try_fold(1u128, |acc, i| acc.checked_mul((n - i) as u128))
}

pub fn factorial(m: u64) -> u128 {
    (1..=m as u128).product()
}

/// Pascal table `C(v, i)` for `v ≤ n`, `i ≤ r`, used for colex ranking of
/// `r`-subsets of `[n]`.
#[derive(Clone, Debug)]
pub struct Colex {
    n: usize,
    r: usize,
    table: Vec<u64>,
}

impl Colex {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        let width = r + 1;
        let mut table = vec![0u64; (n + 1) * width];
        for v in 0..=n {
            table[v * width] = 1;
            for i in 1..=r.min(v) {
                let above = table[(v - 1) * width + i - 1];
                let left = if i <= v - 1 { table[(v - 1) * width + i] } else { 0 };
                table[v * width + i] = above
                    .checked_add(left)
                    .ok_or_else(|| Error::cap("binomial C(n, r) in 64 bits", v as u128, n as u128))?;
            }
        }
        Ok(Colex { n, r, table })
    }

    #[inline]
    pub fn binom(&self, v: usize, i: usize) -> u64 {
        if i > v {
            0
        } else {
            self.table[v * (self.r + 1) + i]
        }
    }

    pub fn count(&self, size: usize) -> u64 {
        self.binom(self.n, size)
    }

    /// Colex rank of a strictly increasing vertex list.
    #[inline]
    pub fn rank(&self, sorted: &[u32]) -> u64 {
        sorted
            .iter()
            .enumerate()
            .map(|(i, &v)| self.binom(v as usize, i + 1))
            .sum()
    }

    /// Inverse of [`Colex::rank`] for subsets of size `size`.
    pub fn unrank(&self, mut rank: u64, size: usize, out: &mut Vec<u32>) {
        out.clear();
        out.resize(size, 0);
        let mut hi = self.n;
        for i in (1..=size).rev() {
            // largest v < hi with C(v, i) <= rank
            let mut v = hi - 1;
            while self.binom(v, i) > rank {
                v -= 1;
            }
            out[i - 1] = v as u32;
            rank -= self.binom(v, i);
            hi = v;
        }
    }
}

/// Advances a strictly increasing combination of `[n]` to its colex successor.
/// Returns `false` after the last one.
pub fn next_colex(comb: &mut [u32], n: usize) -> bool {
    let r = comb.len();
    for i in 0..r {
        let limit = if i + 1 < r { comb[i + 1] } else { n as u32 };
        if comb[i] + 1 < limit {
            comb[i] += 1;
            for (j, c) in comb.iter_mut().take(i).enumerate() {
                *c = j as u32;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every `r`-subset of `[n]` in colex order (so the i-th call has
/// colex rank i).
pub fn for_each_subset(n: usize, r: usize, mut f: impl FnMut(&[u32])) {
    if r > n {
        return;
    }
    let mut comb: Vec<u32> = (0..r as u32).collect();
    loop {
        f(&comb);
        if !next_colex(&mut comb, n) {
            break;
        }
    }
}

/// Set partitions of `[m]` as restricted-growth strings: `a[0] = 0` and
/// `a[i] ≤ 1 + max(a[..i])`. Every partition appears exactly once.
pub struct SetPartitions {
    a: Vec<usize>,
    b: Vec<usize>,
    started: bool,
    done: bool,
}

impl SetPartitions {
    pub fn new(m: usize) -> Self {
        SetPartitions {
            a: vec![0; m],
            b: vec![1; m],
            started: false,
            done: false,
        }
    }

    /// Returns the next restricted-growth string, or `None` when exhausted.
    pub fn next_rgs(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.a);
        }
        let m = self.a.len();
        // b[i] = 1 + max(a[..i]) is the largest value a[i] may take.
        let mut i = m;
        while i > 1 {
            i -= 1;
            if self.a[i] < self.b[i] {
                self.a[i] += 1;
                let next_max = self.b[i].max(self.a[i] + 1);
                for j in i + 1..m {
                    self.a[j] = 0;
                    self.b[j] = next_max;
                }
                return Some(&self.a);
            }
        }
        self.done = true;
        None
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..k).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
    out
}
