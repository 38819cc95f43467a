//! Exact finite models of measure-preserving dynamics.
//!
//! A transformation of a standard probability space is modeled as a
//! permutation of `n` atoms carrying uniform measure `1/n`; ergodicity
//! becomes "single n-cycle" and every measure, distance and bound is an
//! exact rational. On top of that base the crate builds Rokhlin towers,
//! periodic approximations, orbit-displacement cocycles, near-identity
//! conjugators with full exceptional-set accounting, and unbalancedness
//! witnesses for pairs of ergodic systems. Each construction emits a
//! self-contained certificate that an independent verifier rechecks by
//! composition and counting alone.

pub mod cli;
pub mod conjugator;
pub mod perm;
pub mod rokhlin;
pub mod splus;
pub mod textio;
pub mod witness;

pub use conjugator::{build_conjugator, verify_conjugator, ConjugatorCertificate};
pub use perm::{
    generate, halmos_distance, orbit_local_edit, AtomSet, GeneratorKind, PermSystem,
    WeakNeighborhood,
};
pub use rokhlin::{
    conjugate_periodic, displacement_cocycle, ergodic_smoothing, min_window,
    periodic_approximation, rokhlin_tower, DisplacementCocycle, RokhlinTower,
};
pub use splus::{
    eplus_check, interleave, shared_subset_witness, squiggle_path, squiggle_witness,
    verify_squiggle, FinitePermWitness, FiniteSequence, OpenInterval,
};
pub use witness::{
    build_unbalanced_witness, find_conjugate_in_neighborhood, verify_witness, UnbalancedWitness,
};

/// Exact rational scalar used for every measure, distance and bound.
pub type Rational = num_rational::Rational64;

/// Convenience constructor for `p/q` values.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("atom counts differ: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("map of length {n} is not a bijection of 0..{n}")]
    NotBijection { n: usize },
    #[error("atom {value} out of range for {n} atoms")]
    OutOfRange { value: usize, n: usize },
    #[error("transformation with {cycles} cycles is not ergodic")]
    NotErgodic { cycles: usize },
    #[error("period {m} does not divide atom count {n}")]
    Divisibility { n: usize, m: usize },
    #[error("tower height {m} invalid for {n} atoms")]
    Height { n: usize, m: usize },
    #[error("cycle types differ: no conjugacy exists")]
    CycleTypeMismatch,
    #[error("constraints close a cycle of length {len} below height {height}")]
    Completion { len: usize, height: usize },
    #[error("permutation is not a single cycle of its height")]
    NotCyclic,
    #[error("delta {delta} lies below the resolution floor at n = {n}")]
    Resolution { n: usize, delta: Rational },
    #[error("target transformation lies outside the neighborhood")]
    TargetOutside,
    #[error("no admissible pair of cycles fits the neighborhood")]
    Infeasible,
    #[error("conjugator misses the identity ball: d(h, id) = {measured}")]
    IdentityBall { measured: Rational },
    #[error("no unused shared value hits interval {index}")]
    Density { index: usize },
    #[error("sequences share values: interleaving would repeat an entry")]
    Overlap,
    #[error("{0}")]
    Invalid(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
