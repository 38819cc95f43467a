//! Brute-force oracles at small n: exhaustive enumerations that confirm
//! the constructive routines against definitions, independently of the
//! construction paths they check.

use halmos::perm::{generate, halmos_distance, GeneratorKind, PermSystem};
use halmos::rokhlin::{displacement_cocycle, ergodic_smoothing, min_window, window_exceptional_set};
use halmos::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut result = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    result.push(a.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            result.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    result
}

fn all_cycles(n: usize) -> Vec<PermSystem> {
    all_permutations(n)
        .into_iter()
        .map(|m| PermSystem::from_map(m).unwrap())
        .filter(|p| p.is_ergodic())
        .collect()
}

/// Exhaustive minimum of d(s, c) over all n-cycles c.
fn brute_min_cycle_distance(s: &PermSystem, cycles: &[PermSystem]) -> Rational {
    cycles
        .iter()
        .map(|c| halmos_distance(s, c).unwrap())
        .min()
        .expect("at least one cycle exists")
}

#[test]
fn smoothing_matches_exhaustive_minimum_small_n() {
    // every permutation, for n small enough to enumerate both sides
    for n in 2..=6 {
        let cycles = all_cycles(n);
        for map in all_permutations(n) {
            let s = PermSystem::from_map(map).unwrap();
            let (smoothed, cost) = ergodic_smoothing(&s);
            assert!(smoothed.is_ergodic());
            assert_eq!(
                cost,
                brute_min_cycle_distance(&s, &cycles),
                "smoothing of {:?} is not optimal",
                s.images()
            );
        }
    }
}

#[test]
fn smoothing_matches_exhaustive_minimum_n7() {
    let n = 7;
    let cycles = all_cycles(n);
    for map in all_permutations(n) {
        let s = PermSystem::from_map(map).unwrap();
        let (_, cost) = ergodic_smoothing(&s);
        assert_eq!(cost, brute_min_cycle_distance(&s, &cycles));
    }
}

#[test]
fn smoothing_matches_exhaustive_minimum_sampled_n8() {
    let n = 8;
    let cycles = all_cycles(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_8ACE);
    for _ in 0..300 {
        let s = generate(GeneratorKind::RandomPermutation, n, rng.random()).unwrap();
        let (_, cost) = ergodic_smoothing(&s);
        assert_eq!(cost, brute_min_cycle_distance(&s, &cycles));
    }
}

#[test]
fn displacement_matches_brute_force_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD15);
    for n in 2usize..=10 {
        for _ in 0..40 {
            let s = generate(GeneratorKind::RandomCycle, n, rng.random()).unwrap();
            let t = generate(GeneratorKind::RandomCycle, n, rng.random()).unwrap();
            let cocycle = displacement_cocycle(&s, &t).unwrap();
            for x in 0..n {
                // the unique exponent in (-n/2, n/2] with t^k(x) = s(x)
                let lo = -((n as i64 - 1) / 2);
                let hi = (n / 2) as i64;
                let mut found = Vec::new();
                for k in lo..=hi {
                    if t.apply_pow(x, k) == s.apply(x) {
                        found.push(k);
                    }
                }
                assert_eq!(found.len(), 1, "exponent not unique at x={x}");
                assert_eq!(found[0], cocycle.exponent(x));
            }
        }
    }
}

#[test]
fn min_window_is_minimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x333);
    for _ in 0..60 {
        let n = rng.random_range(2..=48usize);
        let s = generate(GeneratorKind::RandomCycle, n, rng.random()).unwrap();
        let t = generate(GeneratorKind::RandomCycle, n, rng.random()).unwrap();
        let bound = Rational::new(rng.random_range(1..=8), 8);
        let m = min_window(&s, &t, bound).unwrap();
        assert!(window_exceptional_set(&s, &t, m).unwrap().measure() < bound);
        for below in 1..m {
            assert!(
                window_exceptional_set(&s, &t, below).unwrap().measure() >= bound,
                "window {below} already satisfies the bound"
            );
        }
    }
}

#[test]
fn exact_conjugator_exists_between_any_cycles() {
    // between n-cycles an exact conjugator always exists; the aligned
    // construction must achieve distance zero
    let mut rng = ChaCha8Rng::seed_from_u64(0xE0);
    for n in 2usize..=8 {
        for _ in 0..20 {
            let s = generate(GeneratorKind::RandomCycle, n, rng.random()).unwrap();
            let t = generate(GeneratorKind::RandomCycle, n, rng.random()).unwrap();
            let h = halmos::rokhlin::conjugate_periodic(&t, &s).unwrap();
            let c = halmos::perm::conjugate(&h, &t).unwrap();
            assert_eq!(halmos_distance(&c, &s).unwrap(), Rational::new(0, 1));
        }
    }
}
