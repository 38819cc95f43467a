//! Finite-resolution machinery for sequences of distinct rationals:
//! equality up to index permutation, shared-subset witnesses, the
//! interleaving construction and prefix-agreement witnesses against
//! cylinder sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::{Error, Rational, Result};

/// A finite sequence of pairwise distinct rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSequence {
    entries: Vec<Rational>,
}

impl FiniteSequence {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("sequence must be non-empty".into()));
        }
        let distinct: BTreeSet<&Rational> = entries.iter().collect();
        if distinct.len() != entries.len() {
            return Err(Error::Invalid("sequence entries must be distinct".into()));
        }
        Ok(FiniteSequence { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Rational {
        self.entries[i]
    }

    pub fn value_set(&self) -> BTreeSet<Rational> {
        self.entries.iter().copied().collect()
    }
}

/// Equality up to a permutation of indices. With distinct entries this
/// is exactly equality of length and underlying value set.
pub fn eplus_check(x: &FiniteSequence, y: &FiniteSequence) -> bool {
    x.len() == y.len() && x.value_set() == y.value_set()
}

/// `z(2i) = x(i)`, `z(2i+1) = y(i)`. The inputs must have equal length
/// and disjoint value sets so that `z` again has distinct entries.
pub fn interleave(x: &FiniteSequence, y: &FiniteSequence) -> Result<FiniteSequence> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            left: x.len(),
            right: y.len(),
        });
    }
    if !x.value_set().is_disjoint(&y.value_set()) {
        return Err(Error::Overlap);
    }
    let mut entries = Vec::with_capacity(2 * x.len());
    for i in 0..x.len() {
        entries.push(x.get(i));
        entries.push(y.get(i));
    }
    FiniteSequence::new(entries)
}

/// Splits a sequence back into its even and odd positions.
pub fn deinterleave(z: &FiniteSequence) -> Result<(FiniteSequence, FiniteSequence)> {
    if z.len() % 2 != 0 {
        return Err(Error::Invalid("sequence length must be even".into()));
    }
    let evens: Vec<Rational> = z.entries().iter().copied().step_by(2).collect();
    let odds: Vec<Rational> = z.entries().iter().copied().skip(1).step_by(2).collect();
    Ok((FiniteSequence::new(evens)?, FiniteSequence::new(odds)?))
}

/// Index lists `p`, `q` with `{x_{p_i}} = {y_{q_i}}` equal to the full
/// intersection of the two value sets, both ordered by value. Empty
/// lists when the sequences are disjoint.
pub fn shared_subset_witness(x: &FiniteSequence, y: &FiniteSequence) -> (Vec<usize>, Vec<usize>) {
    let pos_x: BTreeMap<Rational, usize> = x
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let pos_y: BTreeMap<Rational, usize> = y
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut p = Vec::new();
    let mut q = Vec::new();
    // BTreeMap iteration is value-ordered, which fixes the output order
    for (v, &i) in &pos_x {
        if let Some(&j) = pos_y.get(v) {
            p.push(i);
            q.push(j);
        }
    }
    (p, q)
}

/// An open interval with rational endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl OpenInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::Invalid("interval endpoints must satisfy lo < hi".into()));
        }
        Ok(OpenInterval { lo, hi })
    }

    pub fn contains(&self, v: Rational) -> bool {
        self.lo < v && v < self.hi
    }
}

/// Index permutations bringing a common prefix to the front of two
/// sequences: the first `r = intervals.len()` entries of the permuted
/// sequences coincide and hit the respective intervals, certifying that
/// both permuted sequences lie in the cylinder while agreeing on the
/// first `k ≤ r` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePermWitness {
    /// Position permutation for `x`: entry `i` of the permuted sequence
    /// is `x[gx[i]]`.
    pub gx: Vec<usize>,
    /// Position permutation for `y`.
    pub gy: Vec<usize>,
    /// Stabilizer depth: the permuted sequences agree on the first `k`
    /// coordinates.
    pub k: usize,
    /// The cylinder: one open interval per constrained coordinate.
    pub intervals: Vec<OpenInterval>,
}

/// Builds the prefix-agreement witness. For each interval, in order, the
/// smallest still-unused shared value inside it is selected; a
/// [`Error::Density`] names the first interval no shared value hits.
pub fn squiggle_witness(
    x: &FiniteSequence,
    y: &FiniteSequence,
    intervals: &[OpenInterval],
    k: usize,
) -> Result<FinitePermWitness> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            left: x.len(),
            right: y.len(),
        });
    }
    let r = intervals.len();
    if k > r {
        return Err(Error::Invalid(format!(
            "stabilizer depth {k} exceeds the {r} constrained coordinates"
        )));
    }
    if r > x.len() {
        return Err(Error::Invalid(format!(
            "cylinder constrains {r} coordinates but sequences have length {}",
            x.len()
        )));
    }
    let shared: BTreeSet<Rational> = x
        .value_set()
        .intersection(&y.value_set())
        .copied()
        .collect();
    let mut used: BTreeSet<Rational> = BTreeSet::new();
    let mut chosen = Vec::with_capacity(r);
    for (index, interval) in intervals.iter().enumerate() {
        let pick = shared
            .iter()
            .copied()
            .find(|&v| interval.contains(v) && !used.contains(&v));
        match pick {
            Some(v) => {
                used.insert(v);
                chosen.push(v);
            }
            None => return Err(Error::Density { index }),
        }
    }

    let front_perm = |seq: &FiniteSequence| -> Vec<usize> {
        let pos: BTreeMap<Rational, usize> = seq
            .entries()
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let mut g: Vec<usize> = chosen.iter().map(|v| pos[v]).collect();
        let taken: BTreeSet<usize> = g.iter().copied().collect();
        g.extend((0..seq.len()).filter(|i| !taken.contains(i)));
        g
    };

    let witness = FinitePermWitness {
        gx: front_perm(x),
        gy: front_perm(y),
        k,
        intervals: intervals.to_vec(),
    };
    debug_assert!(verify_squiggle(x, y, &witness));
    Ok(witness)
}

/// Recomputes the prefix agreement claimed by a witness: exact equality
/// of the first `r` permuted entries, interval membership for each, and
/// `k ≤ r`.
pub fn verify_squiggle(x: &FiniteSequence, y: &FiniteSequence, w: &FinitePermWitness) -> bool {
    let len = x.len();
    if y.len() != len || w.gx.len() != len || w.gy.len() != len {
        return false;
    }
    let is_perm = |g: &[usize]| {
        let mut seen = vec![false; len];
        g.iter().all(|&i| {
            if i >= len || seen[i] {
                false
            } else {
                seen[i] = true;
                true
            }
        })
    };
    if !is_perm(&w.gx) || !is_perm(&w.gy) {
        return false;
    }
    let r = w.intervals.len();
    if w.k > r || r > len {
        return false;
    }
    for i in 0..r {
        let vx = x.get(w.gx[i]);
        let vy = y.get(w.gy[i]);
        if vx != vy || !w.intervals[i].contains(vx) {
            return false;
        }
    }
    true
}

/// The two-edge path `x ↔ z ↔ y` through the interleaving `z`, together
/// with the shared-subset witnesses for both edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquigglePath {
    pub z: FiniteSequence,
    /// Shared-subset witness between `x` and `z`; the z-side indices are
    /// exactly the even positions.
    pub x_edge: (Vec<usize>, Vec<usize>),
    /// Shared-subset witness between `y` and `z`; the z-side indices are
    /// exactly the odd positions.
    pub y_edge: (Vec<usize>, Vec<usize>),
}

pub fn squiggle_path(x: &FiniteSequence, y: &FiniteSequence) -> Result<SquigglePath> {
    let z = interleave(x, y)?;
    Ok(SquigglePath {
        x_edge: shared_subset_witness(x, &z),
        y_edge: shared_subset_witness(y, &z),
        z,
    })
}
