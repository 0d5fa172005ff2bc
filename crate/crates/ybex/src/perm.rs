//! Permutation algebra over the alphabet `{0..n-1}`.
//!
//! Everything downstream (two-site maps, twists, sector labels) is built on
//! top of these bijections, their cycle decompositions and the species/charge
//! relabeling derived from the cycles.

use std::fmt;

use num::integer::{gcd, lcm};
use thiserror::Error;

/// Default alphabet bound for the exhaustive L-th root search.
pub const DEFAULT_ROOT_SEARCH_BOUND: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("permutation sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("image table is not a bijection: value {value} appears more than once")]
    NotBijective { value: usize },
    #[error("value {value} out of range for alphabet of size {n}")]
    OutOfRange { value: usize, n: usize },
    #[error("species set is empty")]
    EmptySpeciesSet,
    #[error("species index {species} invalid: permutation has {available} cycles (1-based)")]
    UnknownSpecies { species: usize, available: usize },
    #[error("alphabet size {n} exceeds root search bound {bound}")]
    RootSearchBound { n: usize, bound: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid permutation `{text}`: {reason}")]
pub struct PermParseError {
    pub text: String,
    pub reason: String,
}

/// A bijection of `{0..n-1}` stored as an image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    /// The full cycle (0 1 ... n-1).
    pub fn full_cycle(n: usize) -> Self {
        Permutation {
            image: (0..n).map(|i| (i + 1) % n.max(1)).collect(),
        }
    }

    /// Builds a permutation from its image table; `image[i]` is the image of `i`.
    pub fn from_image(image: Vec<usize>) -> Result<Self, PermError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n {
                return Err(PermError::OutOfRange { value: v, n });
            }
            if seen[v] {
                return Err(PermError::NotBijective { value: v });
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    /// Builds a permutation of `{0..n-1}` from disjoint cycles; values not
    /// mentioned are fixed points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for cycle in cycles {
            for (k, &v) in cycle.iter().enumerate() {
                if v >= n {
                    return Err(PermError::OutOfRange { value: v, n });
                }
                if seen[v] {
                    return Err(PermError::NotBijective { value: v });
                }
                seen[v] = true;
                image[v] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { image: inv }
    }

    /// Composition `(self . other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self, PermError> {
        if self.n() != other.n() {
            return Err(PermError::SizeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(Permutation {
            image: other.image.iter().map(|&v| self.image[v]).collect(),
        })
    }

    /// `self` applied `k` times; negative `k` powers the inverse.
    pub fn power(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut exp = k.unsigned_abs();
        let mut acc = Permutation::identity(self.n());
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.compose(&sq).expect("same alphabet");
            }
            sq = sq.compose(&sq).expect("same alphabet");
            exp >>= 1;
        }
        acc
    }

    /// Order of the permutation: lcm of its cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycle_decomposition()
            .lengths()
            .iter()
            .fold(1u64, |acc, &c| lcm(acc, c as u64))
    }

    /// Canonical cycle decomposition: each cycle starts at its minimal
    /// element, cycles sorted by that element, fixed points included.
    pub fn cycle_decomposition(&self) -> CycleDecomposition {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut v = self.image[start];
            while v != start {
                seen[v] = true;
                cycle.push(v);
                v = self.image[v];
            }
            cycles.push(cycle);
        }
        CycleDecomposition { n, cycles }
    }

    /// Species/charge relabeling read off the canonical cycle decomposition:
    /// value `v` has species `s` (1-based cycle index) and charge `e` when it
    /// is the `e`-th element of cycle `s`.
    pub fn charge_coordinates(&self) -> ChargeCoordinates {
        let decomp = self.cycle_decomposition();
        let n = self.n();
        let mut species_of = vec![0; n];
        let mut charge_of = vec![0; n];
        let mut cycle_lengths = Vec::with_capacity(decomp.cycles.len());
        for (idx, cycle) in decomp.cycles.iter().enumerate() {
            for (e, &v) in cycle.iter().enumerate() {
                species_of[v] = idx + 1;
                charge_of[v] = e;
            }
            cycle_lengths.push(cycle.len());
        }
        ChargeCoordinates {
            species_of,
            charge_of,
            cycle_lengths,
        }
    }

    /// All permutations of `{0..n-1}` in lexicographic image-table order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut image: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation {
                image: image.clone(),
            });
            if !next_lex(&mut image) {
                return out;
            }
        }
    }

    /// Parses cycle notation `"(0 2)(1)"`, image notation `"[2,1,0]"`, or
    /// `"id"`. Values omitted from cycle notation are fixed points.
    pub fn parse(text: &str, n: usize) -> Result<Self, PermParseError> {
        let err = |reason: &str| PermParseError {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = text.trim();
        if trimmed.eq_ignore_ascii_case("id") || trimmed == "()" {
            return Ok(Permutation::identity(n));
        }
        if trimmed.starts_with('[') {
            if !trimmed.ends_with(']') {
                return Err(err("missing closing bracket"));
            }
            let inner = &trimmed[1..trimmed.len() - 1];
            let values: Result<Vec<usize>, _> = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>())
                .collect();
            let values = values.map_err(|_| err("image entries must be nonnegative integers"))?;
            if values.len() != n {
                return Err(err(&format!(
                    "image table has {} entries, expected {}",
                    values.len(),
                    n
                )));
            }
            return Permutation::from_image(values).map_err(|e| err(&e.to_string()));
        }
        if !trimmed.starts_with('(') {
            return Err(err("expected cycle notation `(..)(..)`, image `[..]`, or `id`"));
        }
        let mut cycles = Vec::new();
        let mut rest = trimmed;
        while !rest.is_empty() {
            let rest2 = rest.trim_start();
            if rest2.is_empty() {
                break;
            }
            if !rest2.starts_with('(') {
                return Err(err("expected `(` to open a cycle"));
            }
            let close = rest2.find(')').ok_or_else(|| err("unclosed cycle"))?;
            let inner = &rest2[1..close];
            let values: Result<Vec<usize>, _> = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>())
                .collect();
            let values = values.map_err(|_| err("cycle entries must be nonnegative integers"))?;
            if values.is_empty() {
                return Err(err("empty cycle"));
            }
            cycles.push(values);
            rest = &rest2[close + 1..];
        }
        Permutation::from_cycles(n, &cycles).map_err(|e| err(&e.to_string()))
    }
}

impl fmt::Display for Permutation {
    // Canonical cycle notation, so golden outputs are stable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_decomposition())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self)
    }
}

/// Advances `image` to the next permutation in lexicographic order.
fn next_lex(image: &mut [usize]) -> bool {
    if image.len() < 2 {
        return false;
    }
    let mut i = image.len() - 1;
    while i > 0 && image[i - 1] >= image[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = image.len() - 1;
    while image[j] <= image[i - 1] {
        j -= 1;
    }
    image.swap(i - 1, j);
    image[i..].reverse();
    true
}

/// Disjoint cycles covering `{0..n-1}`, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    n: usize,
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(|c| c.len()).collect()
    }

    /// Reassembles the permutation the cycles came from.
    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_cycles(self.n, &self.cycles).expect("cycles are disjoint by construction")
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in &self.cycles {
            write!(f, "(")?;
            for (k, v) in cycle.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", v)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Species and charge labels for each value, relative to a permutation `f`:
/// species = 1-based index of the cycle containing the value, charge = the
/// value's position along that cycle. `f` raises the charge by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeCoordinates {
    species_of: Vec<usize>,
    charge_of: Vec<usize>,
    cycle_lengths: Vec<usize>,
}

impl ChargeCoordinates {
    pub fn n(&self) -> usize {
        self.species_of.len()
    }

    pub fn n_species(&self) -> usize {
        self.cycle_lengths.len()
    }

    /// 1-based species index of a value.
    pub fn species_of(&self, value: usize) -> usize {
        self.species_of[value]
    }

    pub fn charge_of(&self, value: usize) -> usize {
        self.charge_of[value]
    }

    /// Cycle length of a 1-based species index.
    pub fn cycle_length(&self, species: usize) -> usize {
        self.cycle_lengths[species - 1]
    }

    pub fn cycle_lengths(&self) -> &[usize] {
        &self.cycle_lengths
    }
}

/// gcd of the cycle lengths of the listed (1-based) species.
pub fn gcd_cycle_lengths(p: &Permutation, relevant: &[usize]) -> Result<u64, PermError> {
    if relevant.is_empty() {
        return Err(PermError::EmptySpeciesSet);
    }
    let coords = p.charge_coordinates();
    let mut acc = 0u64;
    for &s in relevant {
        if s == 0 || s > coords.n_species() {
            return Err(PermError::UnknownSpecies {
                species: s,
                available: coords.n_species(),
            });
        }
        acc = gcd(acc, coords.cycle_length(s) as u64);
    }
    Ok(acc)
}

/// Exhaustive search for some `g` with `g^l == f`, trying image tables in
/// lexicographic order so the returned root is deterministic. Returns `None`
/// when no root exists. Root existence is not guaranteed in general, which is
/// why this is a search rather than a formula.
pub fn lth_root(f: &Permutation, l: u32) -> Result<Option<Permutation>, PermError> {
    lth_root_bounded(f, l, DEFAULT_ROOT_SEARCH_BOUND)
}

pub fn lth_root_bounded(
    f: &Permutation,
    l: u32,
    bound: usize,
) -> Result<Option<Permutation>, PermError> {
    let n = f.n();
    if n > bound {
        return Err(PermError::RootSearchBound { n, bound });
    }
    let mut image: Vec<usize> = (0..n).collect();
    loop {
        let g = Permutation {
            image: image.clone(),
        };
        if &g.power(l as i64) == f {
            return Ok(Some(g));
        }
        if !next_lex(&mut image) {
            return Ok(None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(image: &[usize]) -> Permutation {
        Permutation::from_image(image.to_vec()).unwrap()
    }

    #[test]
    fn compose_identity_and_inverse() {
        let p = perm(&[2, 0, 1]);
        let id = Permutation::identity(3);
        assert_eq!(id.compose(&p).unwrap(), p);
        assert_eq!(p.compose(&id).unwrap(), p);
        assert_eq!(p.compose(&p.inverse()).unwrap(), id);
        let swap = perm(&[1, 0]);
        assert_eq!(swap.compose(&swap).unwrap(), Permutation::identity(2));
    }

    #[test]
    fn compose_rejects_size_mismatch() {
        let p = Permutation::identity(2);
        let q = Permutation::identity(3);
        assert_eq!(
            p.compose(&q),
            Err(PermError::SizeMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn power_of_three_cycle_is_identity() {
        let c3 = Permutation::full_cycle(3);
        assert!(c3.power(3).is_identity());
        assert_eq!(c3.power(-1), c3.inverse());
    }

    #[test]
    fn square_of_full_even_cycle_splits() {
        // (0 1 2 3)^2 = (0 2)(1 3)
        let c4 = Permutation::full_cycle(4);
        let expected = Permutation::from_cycles(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(c4.power(2), expected);
    }

    #[test]
    fn power_matches_repeated_composition() {
        // (0 2 1)^2 computed by composing the image table twice.
        let p = Permutation::from_cycles(3, &[vec![0, 2, 1]]).unwrap();
        let twice = p.compose(&p).unwrap();
        assert_eq!(p.power(2), twice);
        assert_eq!(twice, Permutation::full_cycle(3));
    }

    #[test]
    fn cycle_decomposition_canonical_form() {
        assert_eq!(Permutation::identity(3).to_string(), "(0)(1)(2)");
        assert_eq!(Permutation::full_cycle(4).power(2).to_string(), "(0 2)(1 3)");
        // image table 0->2, 1->1, 2->0
        assert_eq!(perm(&[2, 1, 0]).to_string(), "(0 2)(1)");
    }

    #[test]
    fn cycle_reassembly_is_exhaustive_up_to_s5() {
        for n in 1..=5 {
            for p in Permutation::all(n) {
                assert_eq!(p.cycle_decomposition().to_permutation(), p);
            }
        }
    }

    #[test]
    fn order_divides_out() {
        for p in Permutation::all(4) {
            assert!(p.power(p.order() as i64).is_identity());
        }
    }

    #[test]
    fn charge_coordinates_identity_and_full_cycle() {
        let id = Permutation::identity(3).charge_coordinates();
        assert_eq!(id.n_species(), 3);
        for v in 0..3 {
            assert_eq!(id.charge_of(v), 0);
        }
        let full = Permutation::full_cycle(5).charge_coordinates();
        assert_eq!(full.n_species(), 1);
        for v in 0..5 {
            assert_eq!(full.species_of(v), 1);
            assert_eq!(full.charge_of(v), v);
        }
    }

    #[test]
    fn charge_coordinates_transposition_with_fixed_point() {
        // (0 2)(1): value 2 is the second element of the first cycle.
        let coords = perm(&[2, 1, 0]).charge_coordinates();
        assert_eq!(coords.species_of(2), 1);
        assert_eq!(coords.charge_of(2), 1);
        assert_eq!(coords.species_of(1), 2);
        assert_eq!(coords.cycle_lengths(), &[2, 1]);
    }

    #[test]
    fn applying_f_increments_charge() {
        for p in Permutation::all(5) {
            let coords = p.charge_coordinates();
            for v in 0..5 {
                let w = p.apply(v);
                assert_eq!(coords.species_of(w), coords.species_of(v));
                let c = coords.cycle_length(coords.species_of(v));
                assert_eq!(coords.charge_of(w), (coords.charge_of(v) + 1) % c);
            }
        }
    }

    #[test]
    fn gcd_of_cycle_lengths() {
        // All cycles the same length c -> c.
        let p = Permutation::from_cycles(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(gcd_cycle_lengths(&p, &[1, 2]).unwrap(), 3);
        // Lengths {2, 1} -> 1.
        let q = perm(&[2, 1, 0]);
        assert_eq!(gcd_cycle_lengths(&q, &[1, 2]).unwrap(), 1);
        // Lengths {4, 6} -> 2.
        let r = Permutation::from_cycles(
            10,
            &[vec![0, 1, 2, 3], vec![4, 5, 6, 7, 8, 9]],
        )
        .unwrap();
        assert_eq!(gcd_cycle_lengths(&r, &[1, 2]).unwrap(), 2);
        assert_eq!(gcd_cycle_lengths(&r, &[1]).unwrap(), 4);
        assert_eq!(
            gcd_cycle_lengths(&r, &[]),
            Err(PermError::EmptySpeciesSet)
        );
    }

    #[test]
    fn lth_root_examples() {
        let id = Permutation::identity(4);
        let g = lth_root(&id, 5).unwrap().expect("identity always has a root");
        assert_eq!(g.power(5), id);

        let c3 = Permutation::full_cycle(3);
        let g = lth_root(&c3, 2).unwrap().expect("3-cycle has a square root");
        assert_eq!(g.power(2), c3);
        // lexicographically smallest solution is (0 2 1) = [2, 0, 1]
        assert_eq!(g, perm(&[2, 0, 1]));

        let swap = perm(&[1, 0]);
        assert_eq!(lth_root(&swap, 2).unwrap(), None);
    }

    #[test]
    fn lth_root_respects_bound() {
        let f = Permutation::identity(9);
        assert_eq!(
            lth_root(&f, 2),
            Err(PermError::RootSearchBound { n: 9, bound: 8 })
        );
        assert!(lth_root_bounded(&f, 2, 9).unwrap().is_some());
    }

    #[test]
    fn roots_verified_never_trusted() {
        // every returned root g satisfies g^L == f, over all of S_4 and L <= 4
        for f in Permutation::all(4) {
            for l in 1..=4 {
                if let Some(g) = lth_root(&f, l).unwrap() {
                    assert_eq!(g.power(l as i64), f);
                }
            }
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let p = Permutation::parse("(0 2)(1)", 3).unwrap();
        assert_eq!(p, perm(&[2, 1, 0]));
        assert_eq!(p.to_string(), "(0 2)(1)");
        // omitted fixed points
        assert_eq!(Permutation::parse("(0 2)", 3).unwrap(), p);
        // commas inside cycles
        assert_eq!(Permutation::parse("(0,2)(1)", 3).unwrap(), p);
        // image notation
        assert_eq!(Permutation::parse("[2,1,0]", 3).unwrap(), p);
        assert_eq!(Permutation::parse("id", 4).unwrap(), Permutation::identity(4));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(Permutation::parse("(0 3)", 3).is_err());
        assert!(Permutation::parse("(0 1)(1 2)", 3).is_err());
        assert!(Permutation::parse("[1,1,0]", 3).is_err());
        assert!(Permutation::parse("[0,1]", 3).is_err());
        assert!(Permutation::parse("(0 1", 3).is_err());
        assert!(Permutation::parse("garbage", 3).is_err());
    }

    #[test]
    fn all_is_lexicographic_and_complete() {
        let all = Permutation::all(3);
        assert_eq!(all.len(), 6);
        for w in all.windows(2) {
            assert!(w[0].image() < w[1].image());
        }
    }
}
