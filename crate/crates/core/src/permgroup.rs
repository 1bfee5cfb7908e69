//! Permutations of `N` objects, their cycle types, and sums over the full
//! symmetric group.
//!
//! A [`Permutation`] is stored as its target array: slot `k` is sent to
//! `sigma(k)`. Composition follows function notation,
//! `(p ∘ q)(k) = p(q(k))`.
//!
//! Acting on a tuple, `σ` moves the entry in slot `k` to slot `σ(k)`, so the
//! permuted tuple is `x'_k = x_{σ⁻¹(k)}`. For `σ = [1, 2, 0]` (0 ↦ 1, 1 ↦ 2,
//! 2 ↦ 0) and `x = (a, b, c)` the result is `(c, a, b)`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest group whose elements may be enumerated (10! ≈ 3.6M).
pub const MAX_GROUP_ORDER_N: usize = 10;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its target array, checking bijectivity.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::InvalidPermutation("empty target array".into()));
        }
        let n = map.len();
        let mut seen = vec![false; n];
        for &target in &map {
            if target >= n {
                return Err(Error::InvalidPermutation(format!(
                    "target {target} out of range for {n} elements"
                )));
            }
            if std::mem::replace(&mut seen[target], true) {
                return Err(Error::InvalidPermutation(format!(
                    "target {target} appears twice"
                )));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// The transposition swapping `i` and `j` on `n` elements.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut map: Vec<usize> = (0..n).collect();
        if i >= n || j >= n {
            return Err(Error::OutOfRange {
                what: "transposition index",
                index: i.max(j),
                bound: n,
            });
        }
        map.swap(i, j);
        Ok(Self { map })
    }

    /// The cycle `0 → 1 → … → n-1 → 0`.
    pub fn cycle(n: usize) -> Self {
        Self {
            map: (0..n).map(|k| (k + 1) % n).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        self.map[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &t)| k == t)
    }

    /// `self ∘ other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "cannot compose permutations of {} and {} elements",
                self.len(),
                other.len()
            )));
        }
        Ok(Permutation {
            map: other.map.iter().map(|&k| self.map[k]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (k, &t) in self.map.iter().enumerate() {
            inv[t] = k;
        }
        Permutation { map: inv }
    }

    /// Moves the entry in slot `k` to slot `σ(k)`: returns `x'` with
    /// `x'_k = x_{σ⁻¹(k)}`.
    pub fn permute_tuple<T: Clone>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.len() {
            return Err(Error::Dimension(format!(
                "tuple of length {} for permutation of {} elements",
                x.len(),
                self.len()
            )));
        }
        let mut out = x.to_vec();
        for (k, &t) in self.map.iter().enumerate() {
            out[t] = x[k].clone();
        }
        Ok(out)
    }

    /// Disjoint cycles, each listed from its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                cycle.push(k);
                k = self.map[k];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn cycle_type(&self) -> CycleType {
        cycle_type(self)
    }

    /// Number of fixed points, `C₁(σ)`.
    pub fn fixed_points(&self) -> usize {
        self.map
            .iter()
            .enumerate()
            .filter(|(k, &t)| *k == t)
            .count()
    }

    /// Position of this permutation in lexicographic order (Lehmer code).
    pub fn lex_rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller_later = self.map[i + 1..]
                .iter()
                .filter(|&&v| v < self.map[i])
                .count();
            rank = rank * (n - i) + smaller_later;
        }
        rank
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.map)
    }
}

/// Cycle-length multiset: `count(n)` is the number of `n`-cycles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycleType {
    // counts[n] = C_n, index 0 unused
    counts: Vec<usize>,
}

impl CycleType {
    /// Number of elements permuted.
    pub fn degree(&self) -> usize {
        self.counts.len() - 1
    }

    /// `C_n`, zero outside `1..=N`.
    pub fn count(&self, n: usize) -> usize {
        self.counts.get(n).copied().unwrap_or(0)
    }

    /// `(n, C_n)` for every cycle length that occurs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .map(|(n, &c)| (n, c))
    }

    /// `Σ n·C_n`, which equals the degree.
    pub fn weight(&self) -> usize {
        self.iter().map(|(n, c)| n * c).sum()
    }
}

pub fn cycle_type(p: &Permutation) -> CycleType {
    let mut counts = vec![0; p.len() + 1];
    for cycle in p.cycles() {
        counts[cycle.len()] += 1;
    }
    CycleType { counts }
}

/// Lexicographic enumeration of all permutations of `n` elements.
#[derive(Debug, Clone)]
pub struct Permutations {
    current: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.current.as_mut()?;
        let out = Permutation { map: cur.clone() };
        if !next_lexicographic(cur) {
            self.current = None;
        }
        Some(out)
    }
}

fn next_lexicographic(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Every element of the symmetric group on `n` objects, in lexicographic
/// order, identity first.
pub fn iterate_group(n: usize) -> Result<Permutations> {
    if n > MAX_GROUP_ORDER_N {
        return Err(Error::size("group degree", n, MAX_GROUP_ORDER_N));
    }
    if n == 0 {
        return Err(Error::Domain("group degree must be at least 1".into()));
    }
    Ok(Permutations {
        current: Some((0..n).collect()),
    })
}

pub(crate) fn all_permutations(n: usize) -> Result<Vec<Permutation>> {
    Ok(iterate_group(n)?.collect())
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `Σ_{k=0}^{n} (ζ-1)^k / k!`, the closed form of the group average
/// `(1/N!) Σ_σ ζ^{C₁(σ)}`.
pub fn z_fixed_point_sum(n: usize, zeta: f64) -> f64 {
    let x = zeta - 1.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=n {
        term *= x / k as f64;
        sum += term;
    }
    sum
}

/// Lookup table for relative permutations over a whole group:
/// `relative(i, j)` is the index of `perms[j]⁻¹ ∘ perms[i]`.
#[derive(Debug, Clone)]
pub(crate) struct GroupTable {
    pub perms: Vec<Permutation>,
    relative: Vec<u32>,
}

impl GroupTable {
    pub fn new(n: usize, max_n: usize) -> Result<Self> {
        if n > max_n {
            return Err(Error::size("photon number", n, max_n));
        }
        let perms = all_permutations(n)?;
        let inverses: Vec<Permutation> = perms.iter().map(Permutation::inverse).collect();
        let order = perms.len();
        let mut relative = Vec::with_capacity(order * order);
        for p in &perms {
            for q_inv in &inverses {
                // compose cannot fail: equal sizes
                let rel = q_inv.compose(p)?;
                relative.push(rel.lex_rank() as u32);
            }
        }
        Ok(Self { perms, relative })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.perms.len()
    }

    #[inline]
    pub fn relative(&self, i: usize, j: usize) -> usize {
        self.relative[i * self.perms.len() + j] as usize
    }
}
