//! The unbalancedness harness: for ergodic systems `t1`, `t2`, an open
//! target neighborhood `U`, an identity ball of radius `v_eps` and a
//! budget `delta`, produce conjugates of both systems inside `U`
//! together with a near-identity `h` carrying one onto the other up to
//! `2·delta`, and verify the whole package independently.
//!
//! All n-cycles are conjugate, so a zero-distance witness always exists
//! in the finite model; the harness deliberately picks two *distinct*
//! cycles inside `U` (a seeded orbit-local perturbation) so that the
//! conjugator pipeline is genuinely exercised.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conjugator::{build_conjugator_jobs, verify_conjugator, ConjugatorCertificate};
use crate::perm::{
    conjugate, generate, halmos_distance, orbit_local_edit, GeneratorKind, PermSystem,
    WeakNeighborhood,
};
use crate::rokhlin::ergodic_smoothing;
use crate::{Error, Rational, Result};

/// A fully populated unbalancedness witness for one `(V, U, delta)`
/// instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnbalancedWitness {
    pub t1: PermSystem,
    pub t2: PermSystem,
    pub u_spec: WeakNeighborhood,
    /// Radius of the Halmos ball around the identity standing in for `V`.
    pub v_eps: Rational,
    pub delta: Rational,
    /// Conjugators moving `t1`, `t2` into `U`.
    pub g1: PermSystem,
    pub g2: PermSystem,
    /// The near-identity element of `V`.
    pub h: PermSystem,
    /// `g1 t1 g1⁻¹` and `g2 t2 g2⁻¹`.
    pub conj1: PermSystem,
    pub conj2: PermSystem,
    /// `d(h conj1 h⁻¹, conj2)`.
    pub final_dist: Rational,
    pub inner_cert: ConjugatorCertificate,
}

/// Builds `g` with `conjugate(g, t) = target` exactly, by aligning the
/// orbit of `t` starting at atom 0 with the orbit of `target` starting
/// at atom 0. Requires `target` to lie inside the neighborhood.
pub fn find_conjugate_in_neighborhood(
    t: &PermSystem,
    u_spec: &WeakNeighborhood,
    target: &PermSystem,
) -> Result<PermSystem> {
    if t.n() != target.n() {
        return Err(Error::Dimension {
            left: t.n(),
            right: target.n(),
        });
    }
    for p in [t, target] {
        if !p.is_ergodic() {
            return Err(Error::NotErgodic {
                cycles: p.cycles().len(),
            });
        }
    }
    if !u_spec.contains(target)? {
        return Err(Error::TargetOutside);
    }
    let from = t.orbit_from(0);
    let to = target.orbit_from(0);
    let mut map = vec![0; t.n()];
    for (a, b) in from.iter().zip(&to) {
        map[*a] = *b;
    }
    let g = PermSystem::from_map(map)?;
    debug_assert_eq!(&conjugate(&g, t).unwrap(), target);
    Ok(g)
}

pub fn build_unbalanced_witness(
    t1: &PermSystem,
    t2: &PermSystem,
    u_spec: &WeakNeighborhood,
    v_eps: Rational,
    delta: Rational,
    seed: u64,
) -> Result<UnbalancedWitness> {
    build_unbalanced_witness_jobs(t1, t2, u_spec, v_eps, delta, seed, 1)
}

/// As [`build_unbalanced_witness`]; `jobs` threads are used inside the
/// conjugator stage. The output does not depend on the job count.
pub fn build_unbalanced_witness_jobs(
    t1: &PermSystem,
    t2: &PermSystem,
    u_spec: &WeakNeighborhood,
    v_eps: Rational,
    delta: Rational,
    seed: u64,
    jobs: usize,
) -> Result<UnbalancedWitness> {
    let n = u_spec.center().n();
    for t in [t1, t2] {
        if t.n() != n {
            return Err(Error::Dimension {
                left: t.n(),
                right: n,
            });
        }
        if !t.is_ergodic() {
            return Err(Error::NotErgodic {
                cycles: t.cycles().len(),
            });
        }
    }
    let zero = Rational::new(0, 1);
    let one = Rational::new(1, 1);
    if delta <= zero || delta > one || v_eps <= zero || v_eps > one {
        return Err(Error::Invalid("delta and v_eps must lie in (0, 1]".into()));
    }

    // (1) a first n-cycle inside U: the center when possible, its
    // ergodic smoothing otherwise, then seeded cycles as a last resort
    let mut candidates: Vec<PermSystem> = Vec::new();
    if u_spec.center().is_ergodic() {
        candidates.push(u_spec.center().clone());
    } else {
        candidates.push(ergodic_smoothing(u_spec.center()).0);
    }
    for i in 0..32u64 {
        candidates.push(generate(
            GeneratorKind::RandomCycle,
            n,
            seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i + 1)),
        )?);
    }
    let p1 = candidates
        .into_iter()
        .find(|p| u_spec.contains(p).unwrap_or(false))
        .ok_or(Error::Infeasible)?;

    // a second, distinct cycle close to the first and still inside U
    let bound = delta.min(v_eps * Rational::new(1, 2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p2 = None;
    for _ in 0..64 {
        let j = rng.random_range(0..n);
        let candidate = match orbit_local_edit(&p1, j) {
            Ok(c) => c,
            Err(_) => break,
        };
        if candidate != p1
            && halmos_distance(&p1, &candidate)? < bound
            && u_spec.contains(&candidate)?
        {
            p2 = Some(candidate);
            break;
        }
    }
    let p2 = p2.ok_or(Error::Infeasible)?;

    // (2) conjugate t1, t2 onto the chosen cycles
    let g1 = find_conjugate_in_neighborhood(t1, u_spec, &p1)?;
    let g2 = find_conjugate_in_neighborhood(t2, u_spec, &p2)?;
    let conj1 = conjugate(&g1, t1)?;
    let conj2 = conjugate(&g2, t2)?;
    debug_assert_eq!(conj1, p1);
    debug_assert_eq!(conj2, p2);

    // (3) the near-identity conjugator carrying conj1 toward conj2
    let inner_cert = build_conjugator_jobs(&conj2, &conj1, delta, jobs)?;
    let h = inner_cert.h.clone();
    if inner_cert.measured_id_dist >= v_eps {
        return Err(Error::IdentityBall {
            measured: inner_cert.measured_id_dist,
        });
    }

    // (4) the final bound
    let final_dist = halmos_distance(&conjugate(&h, &conj1)?, &conj2)?;
    assert!(
        final_dist < delta * Rational::new(2, 1),
        "pipeline bound exceeded"
    );

    Ok(UnbalancedWitness {
        t1: t1.clone(),
        t2: t2.clone(),
        u_spec: u_spec.clone(),
        v_eps,
        delta,
        g1,
        g2,
        h,
        conj1,
        conj2,
        final_dist,
        inner_cert,
    })
}

/// Recomputes every invariant of the witness from its raw fields:
/// conjugations by composition, all distances, neighborhood memberships,
/// the embedded conjugator certificate, and the symmetric direction
/// realized by `h⁻¹`.
pub fn verify_witness(w: &UnbalancedWitness) -> bool {
    let n = w.u_spec.center().n();
    let dims_ok = [&w.t1, &w.t2, &w.g1, &w.g2, &w.h, &w.conj1, &w.conj2]
        .iter()
        .all(|p| p.n() == n);
    if !dims_ok {
        return false;
    }
    let zero = Rational::new(0, 1);
    let one = Rational::new(1, 1);
    if w.delta <= zero || w.delta > one || w.v_eps <= zero || w.v_eps > one {
        return false;
    }
    if !w.t1.is_ergodic() || !w.t2.is_ergodic() {
        return false;
    }

    // exact conjugation bookkeeping
    let conj1 = match conjugate(&w.g1, &w.t1) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let conj2 = match conjugate(&w.g2, &w.t2) {
        Ok(p) => p,
        Err(_) => return false,
    };
    if conj1 != w.conj1 || conj2 != w.conj2 {
        return false;
    }

    // both conjugates land in U
    match (w.u_spec.contains(&conj1), w.u_spec.contains(&conj2)) {
        (Ok(true), Ok(true)) => {}
        _ => return false,
    }

    // proximity chain: the conjugates are close, h is near the identity
    let half_eps = w.v_eps * Rational::new(1, 2);
    match halmos_distance(&conj1, &conj2) {
        Ok(d) if d < half_eps => {}
        _ => return false,
    }
    match halmos_distance(&w.h, &PermSystem::identity(n)) {
        Ok(d) if d < w.v_eps => {}
        _ => return false,
    }

    // the final bound, forward and symmetric
    let two_delta = w.delta * Rational::new(2, 1);
    let forward = match conjugate(&w.h, &conj1).and_then(|p| halmos_distance(&p, &conj2)) {
        Ok(d) => d,
        Err(_) => return false,
    };
    if forward != w.final_dist || forward >= two_delta {
        return false;
    }
    let backward = match conjugate(&w.h.inverse(), &conj2).and_then(|p| halmos_distance(&p, &conj1))
    {
        Ok(d) => d,
        Err(_) => return false,
    };
    if backward >= two_delta {
        return false;
    }

    // the embedded certificate must be valid and must be about this very
    // pair of conjugates
    if w.inner_cert.s != conj2
        || w.inner_cert.t != conj1
        || w.inner_cert.h != w.h
        || w.inner_cert.delta_target != w.delta
    {
        return false;
    }
    verify_conjugator(&w.inner_cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::AtomSet;

    fn whole_space(center: PermSystem) -> WeakNeighborhood {
        WeakNeighborhood::new(center, vec![], Rational::new(1, 1)).unwrap()
    }

    #[test]
    fn conjugate_into_neighborhood() {
        let n = 64;
        let t = generate(GeneratorKind::Rotation(1), n, 0).unwrap();
        let target = generate(GeneratorKind::RandomCycle, n, 5).unwrap();
        let u = whole_space(target.clone());
        let g = find_conjugate_in_neighborhood(&t, &u, &target).unwrap();
        assert_eq!(conjugate(&g, &t).unwrap(), target);

        let same = find_conjugate_in_neighborhood(&target, &u, &target).unwrap();
        assert!(same.is_identity());
    }

    #[test]
    fn conjugate_rejects_outside_targets() {
        let n = 16;
        let center = generate(GeneratorKind::Rotation(1), n, 0).unwrap();
        let set = AtomSet::new(n, vec![0]).unwrap();
        let u = WeakNeighborhood::new(center.clone(), vec![set], Rational::new(1, 16)).unwrap();
        let far = generate(GeneratorKind::Rotation(5), n, 0).unwrap();
        assert!(matches!(
            find_conjugate_in_neighborhood(&center, &u, &far),
            Err(Error::TargetOutside)
        ));
        let non_ergodic = PermSystem::identity(n);
        assert!(matches!(
            find_conjugate_in_neighborhood(&center, &u, &non_ergodic),
            Err(Error::NotErgodic { .. })
        ));
    }

    #[test]
    fn witness_round_trip() {
        let n = 512;
        let t1 = generate(GeneratorKind::Rotation(1), n, 0).unwrap();
        let t2 = generate(GeneratorKind::RandomCycle, n, 7).unwrap();
        let center = generate(GeneratorKind::RandomCycle, n, 13).unwrap();
        let marker = AtomSet::new(n, (0..n / 8).collect()).unwrap();
        let u = WeakNeighborhood::new(center, vec![marker], Rational::new(1, 4)).unwrap();
        let w = build_unbalanced_witness(&t1, &t2, &u, Rational::new(3, 10), Rational::new(1, 10), 42)
            .unwrap();
        assert!(verify_witness(&w));
        assert!(w.final_dist < Rational::new(2, 10));
        assert_eq!(conjugate(&w.g1, &w.t1).unwrap(), w.conj1);
    }

    #[test]
    fn witness_respects_seed() {
        let n = 256;
        let t1 = generate(GeneratorKind::RandomCycle, n, 1).unwrap();
        let t2 = generate(GeneratorKind::RandomCycle, n, 2).unwrap();
        let u = whole_space(generate(GeneratorKind::RandomCycle, n, 3).unwrap());
        let a = build_unbalanced_witness(&t1, &t2, &u, Rational::new(1, 2), Rational::new(1, 4), 9)
            .unwrap();
        let b = build_unbalanced_witness(&t1, &t2, &u, Rational::new(1, 2), Rational::new(1, 4), 9)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_neighborhood_reports() {
        // every atom is a singleton marker and epsilon is the resolution
        // floor: only the center itself fits, so no distinct pair exists
        let n = 8;
        let center = generate(GeneratorKind::Rotation(1), n, 0).unwrap();
        let sets: Vec<AtomSet> = (0..n).map(|x| AtomSet::new(n, vec![x]).unwrap()).collect();
        let u = WeakNeighborhood::new(center.clone(), sets, Rational::new(1, 8)).unwrap();
        let r = build_unbalanced_witness(
            &center,
            &center,
            &u,
            Rational::new(1, 2),
            Rational::new(1, 2),
            4,
        );
        assert!(matches!(r, Err(Error::Infeasible)));
    }

    #[test]
    fn tampered_witnesses_fail() {
        let n = 256;
        let t1 = generate(GeneratorKind::RandomCycle, n, 11).unwrap();
        let t2 = generate(GeneratorKind::RandomCycle, n, 12).unwrap();
        let u = whole_space(generate(GeneratorKind::RandomCycle, n, 13).unwrap());
        let w = build_unbalanced_witness(&t1, &t2, &u, Rational::new(1, 2), Rational::new(1, 4), 1)
            .unwrap();
        assert!(verify_witness(&w));

        let mut tampered = w.clone();
        let mut images = tampered.g1.images().to_vec();
        images.swap(0, 1);
        tampered.g1 = PermSystem::from_map(images).unwrap();
        assert!(!verify_witness(&tampered));

        let mut lowered = w.clone();
        lowered.delta = w.final_dist * Rational::new(1, 4);
        assert!(!verify_witness(&lowered));
    }
}
