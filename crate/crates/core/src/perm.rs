//! Permutations of `n` uniform atoms, the Halmos metric and weak-topology
//! neighborhoods.
//!
//! The atom space is `{0, …, n-1}` with measure `1/n` per atom. A
//! `PermSystem` is a bijection of that space; ergodicity means a single
//! n-cycle and an M-periodic system is one all of whose cycles have
//! length exactly M. All distances and measures are exact rationals.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Rational, Result};

/// A bijection of the atoms `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermSystem {
    map: Vec<usize>,
}

impl PermSystem {
    /// Builds a system from the image vector `map[x] = image of x`.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(Error::Invalid("atom count must be positive".into()));
        }
        let mut seen = vec![false; n];
        for &y in &map {
            if y >= n || seen[y] {
                return Err(Error::NotBijection { n });
            }
            seen[y] = true;
        }
        Ok(PermSystem { map })
    }

    pub fn identity(n: usize) -> Self {
        PermSystem {
            map: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &PermSystem) -> Result<PermSystem> {
        check_dim(self.n(), other.n())?;
        let map = (0..self.n()).map(|x| self.map[other.map[x]]).collect();
        Ok(PermSystem { map })
    }

    pub fn inverse(&self) -> PermSystem {
        let mut map = vec![0; self.n()];
        for (x, &y) in self.map.iter().enumerate() {
            map[y] = x;
        }
        PermSystem { map }
    }

    /// Applies the k-th power to a single atom, `k` may be negative.
    pub fn apply_pow(&self, x: usize, k: i64) -> usize {
        let n = self.n() as i64;
        let mut steps = k.rem_euclid(n);
        let mut cur = x;
        while steps > 0 {
            cur = self.map[cur];
            steps -= 1;
        }
        cur
    }

    /// The orbit of `start` under repeated application, in visit order.
    pub fn orbit_from(&self, start: usize) -> Vec<usize> {
        let mut orbit = vec![start];
        let mut cur = self.map[start];
        while cur != start {
            orbit.push(cur);
            cur = self.map[cur];
        }
        orbit
    }

    /// Cycle decomposition. Each cycle starts at its minimal element and
    /// the cycles are listed in increasing order of minimal element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.map[cur];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Sorted cycle lengths.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        lens.sort_unstable();
        lens
    }

    /// Ergodic in the finite model: a single n-cycle.
    pub fn is_ergodic(&self) -> bool {
        self.orbit_from(0).len() == self.n()
    }

    /// True iff every cycle has length exactly `m`, so the m-th power is
    /// the identity while no smaller positive power fixes any atom.
    pub fn is_m_periodic(&self, m: usize) -> bool {
        if m == 0 {
            return false;
        }
        self.cycles().iter().all(|c| c.len() == m)
    }
}

fn check_dim(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::Dimension { left, right });
    }
    Ok(())
}

/// `h ∘ t ∘ h⁻¹`, the conjugate of `t` by `h`.
pub fn conjugate(h: &PermSystem, t: &PermSystem) -> Result<PermSystem> {
    check_dim(h.n(), t.n())?;
    let h_inv = h.inverse();
    let map = (0..h.n())
        .map(|x| h.apply(t.apply(h_inv.apply(x))))
        .collect();
    Ok(PermSystem { map })
}

/// The Halmos distance `d(s,t) = |{x : s(x) ≠ t(x)}| / n`, exact.
pub fn halmos_distance(s: &PermSystem, t: &PermSystem) -> Result<Rational> {
    check_dim(s.n(), t.n())?;
    let moved = s
        .images()
        .iter()
        .zip(t.images())
        .filter(|(a, b)| a != b)
        .count();
    Ok(Rational::new(moved as i64, s.n() as i64))
}

/// Performs one orbit-local edit on a single n-cycle: the two orbit
/// points following position `j` swap their visit order. The result is
/// again a single n-cycle and differs from the input on at most three
/// atoms.
pub fn orbit_local_edit(p: &PermSystem, j: usize) -> Result<PermSystem> {
    let n = p.n();
    if !p.is_ergodic() {
        return Err(Error::NotErgodic {
            cycles: p.cycles().len(),
        });
    }
    if n < 3 {
        return Err(Error::Invalid(
            "orbit-local edit needs at least 3 atoms".into(),
        ));
    }
    let orbit = p.orbit_from(0);
    let prev = orbit[j % n];
    let a = orbit[(j + 1) % n];
    let b = orbit[(j + 2) % n];
    let next = orbit[(j + 3) % n];
    let mut map = p.images().to_vec();
    map[prev] = b;
    map[b] = a;
    map[a] = next;
    PermSystem::from_map(map)
}

/// A measurable set of atoms inside an ambient space of `n` atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSet {
    n: usize,
    members: Vec<usize>,
}

impl AtomSet {
    pub fn new(n: usize, mut members: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("atom count must be positive".into()));
        }
        members.sort_unstable();
        members.dedup();
        if let Some(&value) = members.iter().find(|&&x| x >= n) {
            return Err(Error::OutOfRange { value, n });
        }
        Ok(AtomSet { n, members })
    }

    pub fn empty(n: usize) -> Self {
        AtomSet {
            n,
            members: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn measure(&self) -> Rational {
        Rational::new(self.members.len() as i64, self.n as i64)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Image of the set under a permutation of the same atom space.
    pub fn image(&self, p: &PermSystem) -> Result<AtomSet> {
        check_dim(self.n, p.n())?;
        let mut members: Vec<usize> = self.members.iter().map(|&x| p.apply(x)).collect();
        members.sort_unstable();
        Ok(AtomSet { n: self.n, members })
    }

    pub fn union(&self, other: &AtomSet) -> Result<AtomSet> {
        check_dim(self.n, other.n)?;
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        members.sort_unstable();
        members.dedup();
        Ok(AtomSet { n: self.n, members })
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    /// Number of atoms in the symmetric difference.
    pub fn symmetric_difference_len(&self, other: &AtomSet) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => {
                    count += 1;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    count += 1;
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        count + (self.members.len() - i) + (other.members.len() - j)
    }
}

/// A basic weak-topology neighborhood: all systems `S` with
/// `μ(S(Aᵢ) Δ center(Aᵢ)) < ε` for every marker set `Aᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakNeighborhood {
    center: PermSystem,
    sets: Vec<AtomSet>,
    epsilon: Rational,
}

impl WeakNeighborhood {
    pub fn new(center: PermSystem, sets: Vec<AtomSet>, epsilon: Rational) -> Result<Self> {
        if epsilon <= Rational::new(0, 1) {
            return Err(Error::Invalid("epsilon must be positive".into()));
        }
        for set in &sets {
            check_dim(center.n(), set.n())?;
        }
        for (i, a) in sets.iter().enumerate() {
            for b in sets.iter().skip(i + 1) {
                if !a.is_disjoint(b) {
                    return Err(Error::Invalid("marker sets must be pairwise disjoint".into()));
                }
            }
        }
        Ok(WeakNeighborhood {
            center,
            sets,
            epsilon,
        })
    }

    pub fn center(&self) -> &PermSystem {
        &self.center
    }

    pub fn sets(&self) -> &[AtomSet] {
        &self.sets
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    /// Membership test; inequalities are strict, matching the basis
    /// definition.
    pub fn contains(&self, s: &PermSystem) -> Result<bool> {
        check_dim(self.center.n(), s.n())?;
        let n = self.center.n() as i64;
        for set in &self.sets {
            let a = set.image(s)?;
            let b = set.image(&self.center)?;
            let diff = a.symmetric_difference_len(&b);
            if Rational::new(diff as i64, n) >= self.epsilon {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Deterministic test-system factory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `x ↦ x + a mod n`.
    Rotation(usize),
    /// A seeded uniform single n-cycle.
    RandomCycle,
    /// A seeded uniform permutation.
    RandomPermutation,
    /// A seeded permutation all of whose cycles have length `m`; needs `m | n`.
    MPeriodic(usize),
}

fn shuffle(rng: &mut ChaCha8Rng, v: &mut [usize]) {
    // Fisher-Yates over a ChaCha8 stream.
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
}

/// Builds a system of the requested kind; identical `(kind, n, seed)`
/// always yields the identical map.
pub fn generate(kind: GeneratorKind, n: usize, seed: u64) -> Result<PermSystem> {
    if n == 0 {
        return Err(Error::Invalid("atom count must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GeneratorKind::Rotation(a) => {
            let map = (0..n).map(|x| (x + a) % n).collect();
            PermSystem::from_map(map)
        }
        GeneratorKind::RandomCycle => {
            let mut order: Vec<usize> = (0..n).collect();
            shuffle(&mut rng, &mut order);
            let mut map = vec![0; n];
            for i in 0..n {
                map[order[i]] = order[(i + 1) % n];
            }
            PermSystem::from_map(map)
        }
        GeneratorKind::RandomPermutation => {
            let mut map: Vec<usize> = (0..n).collect();
            shuffle(&mut rng, &mut map);
            PermSystem::from_map(map)
        }
        GeneratorKind::MPeriodic(m) => {
            if m == 0 || n % m != 0 {
                return Err(Error::Divisibility { n, m });
            }
            let mut order: Vec<usize> = (0..n).collect();
            shuffle(&mut rng, &mut order);
            let mut map = vec![0; n];
            for block in order.chunks(m) {
                for i in 0..m {
                    map[block[i]] = block[(i + 1) % m];
                }
            }
            PermSystem::from_map(map)
        }
    }
}
