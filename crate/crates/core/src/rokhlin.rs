//! Rokhlin towers, periodic approximation and orbit-displacement
//! cocycles for single n-cycles.
//!
//! For an ergodic system the full orbit is one cycle, so a tower of
//! height `m` is read off directly: the base collects every m-th orbit
//! point starting from atom 0, and the last `n mod m` orbit points form
//! the residual. All the classical bounds become exact identities here:
//! the residual has measure `(n mod m)/n` and the m-periodic
//! approximation sits at distance exactly `1/m` when `m < n`.

use crate::perm::{conjugate, halmos_distance, AtomSet, PermSystem};
use crate::{Error, Rational, Result};

/// A tower `B, T(B), …, T^{M-1}(B)` plus the leftover atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RokhlinTower {
    transform: PermSystem,
    height: usize,
    base: AtomSet,
    residual: AtomSet,
}

impl RokhlinTower {
    /// Reassembles a tower from raw parts, validating every invariant.
    pub fn from_parts(
        transform: PermSystem,
        height: usize,
        base: AtomSet,
        residual: AtomSet,
    ) -> Result<Self> {
        let n = transform.n();
        if height == 0 || height > n {
            return Err(Error::Height { n, m: height });
        }
        if base.n() != n || residual.n() != n {
            return Err(Error::Dimension {
                left: n,
                right: if base.n() != n { base.n() } else { residual.n() },
            });
        }
        if base.len() != n / height || residual.len() != n % height {
            return Err(Error::Invalid("tower parts have wrong sizes".into()));
        }
        // levels pairwise disjoint and disjoint from the residual: the
        // level atoms together with the residual must exhaust the space.
        let mut seen = vec![false; n];
        for &r in residual.members() {
            seen[r] = true;
        }
        let mut covered = residual.len();
        for &b in base.members() {
            let mut cur = b;
            for _ in 0..height {
                if seen[cur] {
                    return Err(Error::Invalid("tower levels overlap".into()));
                }
                seen[cur] = true;
                covered += 1;
                cur = transform.apply(cur);
            }
        }
        if covered != n {
            return Err(Error::Invalid("tower does not cover the space".into()));
        }
        Ok(RokhlinTower {
            transform,
            height,
            base,
            residual,
        })
    }

    pub fn transform(&self) -> &PermSystem {
        &self.transform
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn base(&self) -> &AtomSet {
        &self.base
    }

    pub fn residual(&self) -> &AtomSet {
        &self.residual
    }

    pub fn residual_measure(&self) -> Rational {
        self.residual.measure()
    }

    /// The i-th level `T^i(base)`.
    pub fn level(&self, i: usize) -> AtomSet {
        let members = self
            .base
            .members()
            .iter()
            .map(|&b| self.transform.apply_pow(b, i as i64))
            .collect();
        AtomSet::new(self.transform.n(), members).expect("level atoms in range")
    }

    /// Union of the levels whose index lies in `range`.
    pub fn levels_union(&self, range: std::ops::Range<usize>) -> AtomSet {
        let mut members = Vec::new();
        for &b in self.base.members() {
            let mut cur = b;
            for i in 0..self.height {
                if range.contains(&i) {
                    members.push(cur);
                }
                cur = self.transform.apply(cur);
            }
        }
        AtomSet::new(self.transform.n(), members).expect("level atoms in range")
    }

    /// Re-validates every invariant; used by certificate verifiers.
    pub fn check(&self) -> bool {
        RokhlinTower::from_parts(
            self.transform.clone(),
            self.height,
            self.base.clone(),
            self.residual.clone(),
        )
        .is_ok()
    }
}

fn require_ergodic(t: &PermSystem) -> Result<()> {
    if !t.is_ergodic() {
        return Err(Error::NotErgodic {
            cycles: t.cycles().len(),
        });
    }
    Ok(())
}

/// Extracts the canonical height-`m` tower of an ergodic system: the
/// base holds every m-th point along the orbit of atom 0 and the last
/// `n mod m` orbit points are left over.
pub fn rokhlin_tower(t: &PermSystem, m: usize) -> Result<RokhlinTower> {
    require_ergodic(t)?;
    let n = t.n();
    if m == 0 || m > n {
        return Err(Error::Height { n, m });
    }
    let orbit = t.orbit_from(0);
    let columns = n / m;
    let base: Vec<usize> = (0..columns).map(|j| orbit[j * m]).collect();
    let residual: Vec<usize> = orbit[columns * m..].to_vec();
    RokhlinTower::from_parts(
        t.clone(),
        m,
        AtomSet::new(n, base)?,
        AtomSet::new(n, residual)?,
    )
}

/// The m-periodic approximation of Corollary-style quality: equal to `t`
/// everywhere except on the top tower level, where each atom is sent
/// back to the base of its own column. Requires `m | n`; the distance to
/// `t` is then exactly `1/m` for `m < n` and `0` for `m = n`.
pub fn periodic_approximation(t: &PermSystem, m: usize) -> Result<PermSystem> {
    require_ergodic(t)?;
    let n = t.n();
    if m == 0 || n % m != 0 {
        return Err(Error::Divisibility { n, m });
    }
    let orbit = t.orbit_from(0);
    let mut map = t.images().to_vec();
    for j in 0..n / m {
        let top = orbit[j * m + m - 1];
        map[top] = orbit[j * m];
    }
    PermSystem::from_map(map)
}

/// A deterministic conjugator between systems of identical cycle type:
/// cycles of equal length are paired in increasing order of minimal
/// element and aligned orbit-by-orbit.
pub fn conjugate_periodic(p1: &PermSystem, p2: &PermSystem) -> Result<PermSystem> {
    if p1.n() != p2.n() {
        return Err(Error::Dimension {
            left: p1.n(),
            right: p2.n(),
        });
    }
    if p1.cycle_type() != p2.cycle_type() {
        return Err(Error::CycleTypeMismatch);
    }
    let group_by_len = |p: &PermSystem| {
        let mut by_len: std::collections::BTreeMap<usize, Vec<Vec<usize>>> = Default::default();
        for c in p.cycles() {
            by_len.entry(c.len()).or_default().push(c);
        }
        by_len
    };
    let c1 = group_by_len(p1);
    let c2 = group_by_len(p2);
    let mut map = vec![0; p1.n()];
    for (len, cycles1) in &c1 {
        let cycles2 = &c2[len];
        for (a, b) in cycles1.iter().zip(cycles2) {
            for k in 0..*len {
                map[a[k]] = b[k];
            }
        }
    }
    let h = PermSystem::from_map(map)?;
    debug_assert_eq!(&conjugate(&h, p1).unwrap(), p2);
    Ok(h)
}

/// Merges the cycles of `s` into a single n-cycle by redirecting one
/// outgoing edge per cycle: the images of the cycle minima are rotated
/// cyclically among the cycles, in increasing order of minimum. Returns
/// the smoothed system together with its exact distance from `s`, which
/// is `c/n` for `c > 1` cycles and `0` when `s` is already a cycle.
pub fn ergodic_smoothing(s: &PermSystem) -> (PermSystem, Rational) {
    let cycles = s.cycles();
    if cycles.len() == 1 {
        return (s.clone(), Rational::new(0, 1));
    }
    let reps: Vec<usize> = cycles.iter().map(|c| c[0]).collect();
    let mut map = s.images().to_vec();
    for (i, &r) in reps.iter().enumerate() {
        map[r] = s.apply(reps[(i + 1) % reps.len()]);
    }
    let smoothed = PermSystem::from_map(map).expect("surgery preserves bijectivity");
    let cost = halmos_distance(s, &smoothed).expect("equal atom counts");
    debug_assert!(smoothed.is_ergodic());
    (smoothed, cost)
}

/// The displacement of `s` along the orbit of `t`: for every atom,
/// `s(x) = t^{k(x)}(x)` with the exponent normalized into `(-n/2, n/2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplacementCocycle {
    s: PermSystem,
    t: PermSystem,
    exponents: Vec<i64>,
}

impl DisplacementCocycle {
    pub fn exponent(&self, x: usize) -> i64 {
        self.exponents[x]
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn s(&self) -> &PermSystem {
        &self.s
    }

    pub fn t(&self) -> &PermSystem {
        &self.t
    }
}

pub fn displacement_cocycle(s: &PermSystem, t: &PermSystem) -> Result<DisplacementCocycle> {
    if s.n() != t.n() {
        return Err(Error::Dimension {
            left: s.n(),
            right: t.n(),
        });
    }
    require_ergodic(s)?;
    require_ergodic(t)?;
    let n = s.n();
    let orbit = t.orbit_from(0);
    let mut position = vec![0usize; n];
    for (j, &x) in orbit.iter().enumerate() {
        position[x] = j;
    }
    let half = (n / 2) as i64;
    let exponents = (0..n)
        .map(|x| {
            let d = (position[s.apply(x)] as i64 - position[x] as i64).rem_euclid(n as i64);
            if d > half {
                d - n as i64
            } else {
                d
            }
        })
        .collect();
    Ok(DisplacementCocycle {
        s: s.clone(),
        t: t.clone(),
        exponents,
    })
}

fn worst_displacement(s: &PermSystem, t: &PermSystem) -> Result<Vec<i64>> {
    let fwd = displacement_cocycle(s, t)?;
    let bwd = displacement_cocycle(&s.inverse(), t)?;
    Ok(fwd
        .exponents
        .iter()
        .zip(&bwd.exponents)
        .map(|(a, b)| a.abs().max(b.abs()))
        .collect())
}

/// Atoms whose displacement under `s` or `s⁻¹` along the `t`-orbit
/// reaches the window boundary `m`.
pub fn window_exceptional_set(s: &PermSystem, t: &PermSystem, m: usize) -> Result<AtomSet> {
    let worst = worst_displacement(s, t)?;
    let members = (0..s.n()).filter(|&x| worst[x] >= m as i64).collect();
    AtomSet::new(s.n(), members)
}

/// The least window `M ≥ 1` for which the exceptional set has measure
/// strictly below `bound`. Always exists: `M = ⌊n/2⌋ + 1` empties it.
pub fn min_window(s: &PermSystem, t: &PermSystem, bound: Rational) -> Result<usize> {
    if bound <= Rational::new(0, 1) || bound > Rational::new(1, 1) {
        return Err(Error::Invalid("bound must lie in (0, 1]".into()));
    }
    let worst = worst_displacement(s, t)?;
    let n = s.n();
    // suffix[m] = #atoms with worst displacement >= m
    let top = n / 2 + 1;
    let mut suffix = vec![0usize; top + 2];
    for &w in &worst {
        debug_assert!(w >= 0 && (w as usize) <= top);
        suffix[w as usize] += 1;
    }
    for m in (0..=top).rev() {
        suffix[m] += suffix[m + 1];
    }
    for m in 1..=top {
        if Rational::new(suffix[m] as i64, n as i64) < bound {
            return Ok(m);
        }
    }
    unreachable!("window n/2 + 1 always empties the exceptional set");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{generate, orbit_local_edit, GeneratorKind};
    use proptest::prelude::*;

    fn rotation(n: usize, a: usize) -> PermSystem {
        generate(GeneratorKind::Rotation(a), n, 0).unwrap()
    }

    #[test]
    fn tower_on_rotation_10_3() {
        let t = rotation(10, 1);
        let tower = rokhlin_tower(&t, 3).unwrap();
        assert_eq!(tower.base().members(), &[0, 3, 6]);
        assert_eq!(tower.level(1).members(), &[1, 4, 7]);
        assert_eq!(tower.level(2).members(), &[2, 5, 8]);
        assert_eq!(tower.residual().members(), &[9]);
        assert_eq!(tower.residual_measure(), Rational::new(1, 10));
        assert!(tower.check());
    }

    #[test]
    fn tower_divisible_height_has_empty_residual() {
        let t = rotation(12, 1);
        let tower = rokhlin_tower(&t, 4).unwrap();
        assert!(tower.residual().is_empty());
        assert_eq!(tower.residual_measure(), Rational::new(0, 1));
    }

    #[test]
    fn tower_rejects_non_ergodic_and_tall() {
        assert!(matches!(
            rokhlin_tower(&rotation(4, 2), 2),
            Err(Error::NotErgodic { cycles: 2 })
        ));
        assert!(matches!(
            rokhlin_tower(&rotation(4, 1), 5),
            Err(Error::Height { n: 4, m: 5 })
        ));
    }

    #[test]
    fn approximation_of_rotation_12_4() {
        let t = rotation(12, 1);
        let p = periodic_approximation(&t, 4).unwrap();
        assert!(p.is_m_periodic(4));
        assert_eq!(p.apply(3), 0);
        assert_eq!(p.apply(7), 4);
        assert_eq!(p.apply(11), 8);
        for x in 0..12 {
            if x != 3 && x != 7 && x != 11 {
                assert_eq!(p.apply(x), t.apply(x));
            }
        }
        assert_eq!(halmos_distance(&t, &p).unwrap(), Rational::new(1, 4));
    }

    #[test]
    fn approximation_at_full_period_is_exact() {
        let t = rotation(8, 1);
        let p = periodic_approximation(&t, 8).unwrap();
        assert_eq!(p, t);
    }

    #[test]
    fn approximation_requires_divisibility() {
        assert!(matches!(
            periodic_approximation(&rotation(10, 1), 4),
            Err(Error::Divisibility { n: 10, m: 4 })
        ));
    }

    #[test]
    fn conjugate_periodic_cases() {
        let r = rotation(4, 1);
        let h = conjugate_periodic(&r, &r).unwrap();
        assert!(h.is_identity());

        // (0 1)(2 3) vs (0 2)(1 3)
        let p1 = PermSystem::from_map(vec![1, 0, 3, 2]).unwrap();
        let p2 = PermSystem::from_map(vec![2, 3, 0, 1]).unwrap();
        let h = conjugate_periodic(&p1, &p2).unwrap();
        assert_eq!(conjugate(&h, &p1).unwrap(), p2);

        assert!(matches!(
            conjugate_periodic(&r, &p1),
            Err(Error::CycleTypeMismatch)
        ));
    }

    #[test]
    fn smoothing_examples() {
        let c = generate(GeneratorKind::RandomCycle, 9, 4).unwrap();
        let (smoothed, cost) = ergodic_smoothing(&c);
        assert_eq!(smoothed, c);
        assert_eq!(cost, Rational::new(0, 1));

        let pairs = PermSystem::from_map(vec![1, 0, 3, 2]).unwrap();
        let (smoothed, cost) = ergodic_smoothing(&pairs);
        assert!(smoothed.is_ergodic());
        assert_eq!(cost, Rational::new(2, 4));

        let (smoothed, cost) = ergodic_smoothing(&PermSystem::identity(6));
        assert!(smoothed.is_ergodic());
        assert_eq!(cost, Rational::new(1, 1));
    }

    #[test]
    fn displacement_of_powers() {
        let t = generate(GeneratorKind::RandomCycle, 10, 11).unwrap();
        let d = displacement_cocycle(&t, &t).unwrap();
        assert!(d.exponents().iter().all(|&k| k == 1));

        let n = 7;
        let t = rotation(n, 1);
        let s = rotation(n, 3); // t^3, ergodic since gcd(3,7)=1
        let d = displacement_cocycle(&s, &t).unwrap();
        assert!(d.exponents().iter().all(|&k| k == 3));
    }

    #[test]
    fn min_window_examples() {
        let t = generate(GeneratorKind::RandomCycle, 12, 3).unwrap();
        assert_eq!(min_window(&t, &t, Rational::new(1, 100)).unwrap(), 2);

        let t = rotation(7, 1);
        let s = rotation(7, 2);
        assert_eq!(min_window(&s, &t, Rational::new(1, 2)).unwrap(), 3);

        // bound = 1: the smallest window whose exceptional set is not everything
        assert_eq!(min_window(&t, &t, Rational::new(1, 1)).unwrap(), 2);
    }

    #[test]
    fn exceptional_set_matches_window() {
        let t = rotation(16, 1);
        let s = orbit_local_edit(&t, 5).unwrap();
        let bound = Rational::new(1, 4);
        let m = min_window(&s, &t, bound).unwrap();
        let l0 = window_exceptional_set(&s, &t, m).unwrap();
        assert!(l0.measure() < bound);
        if m > 1 {
            let prev = window_exceptional_set(&s, &t, m - 1).unwrap();
            assert!(prev.measure() >= bound);
        }
    }

    proptest! {
        #[test]
        fn tower_invariants(n in 2usize..80, m in 1usize..80, seed in 0u64..300) {
            prop_assume!(m <= n);
            let t = generate(GeneratorKind::RandomCycle, n, seed).unwrap();
            let tower = rokhlin_tower(&t, m).unwrap();
            prop_assert!(tower.check());
            prop_assert_eq!(tower.residual_measure(), Rational::new((n % m) as i64, n as i64));
            for i in 0..m {
                prop_assert_eq!(tower.level(i).len(), n / m);
            }
        }

        #[test]
        fn approximation_distance(seed in 0u64..200, pick in 0usize..3) {
            let n = 24;
            let m = [2usize, 4, 8][pick];
            let t = generate(GeneratorKind::RandomCycle, n, seed).unwrap();
            let p = periodic_approximation(&t, m).unwrap();
            prop_assert!(p.is_m_periodic(m));
            prop_assert_eq!(halmos_distance(&t, &p).unwrap(), Rational::new(1, m as i64));
            // disagreement is exactly the top level
            let tower = rokhlin_tower(&t, m).unwrap();
            let top = tower.level(m - 1);
            for x in 0..n {
                prop_assert_eq!(p.apply(x) != t.apply(x), top.contains(x));
            }
        }

        #[test]
        fn displacement_reapplies(n in 2usize..48, sa in 0u64..200, sb in 200u64..400) {
            let s = generate(GeneratorKind::RandomCycle, n, sa).unwrap();
            let t = generate(GeneratorKind::RandomCycle, n, sb).unwrap();
            let d = displacement_cocycle(&s, &t).unwrap();
            let half = (n / 2) as i64;
            for x in 0..n {
                let k = d.exponent(x);
                // representative lies in (-n/2, n/2]
                prop_assert!(2 * k > -(n as i64) && 2 * k <= n as i64 || n == 1);
                prop_assert!(k <= half);
                prop_assert_eq!(t.apply_pow(x, k), s.apply(x));
            }
        }

        #[test]
        fn smoothing_cost_is_cycle_count(n in 2usize..40, seed in 0u64..300) {
            let s = generate(GeneratorKind::RandomPermutation, n, seed).unwrap();
            let c = s.cycles().len();
            let (smoothed, cost) = ergodic_smoothing(&s);
            prop_assert!(smoothed.is_ergodic());
            let expected = if c == 1 { Rational::new(0, 1) } else { Rational::new(c as i64, n as i64) };
            prop_assert_eq!(cost, expected);
            prop_assert_eq!(halmos_distance(&s, &smoothed).unwrap(), expected);
        }
    }
}
