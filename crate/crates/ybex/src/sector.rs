//! Decomposition of the configuration space into dynamical sectors.
//!
//! The generator never connects configurations in different orbits of the
//! bond moves, so the state space splits into sectors that each carry one
//! uniform stationary state. For the twisted exclusion process the sectors
//! have an explicit description: a species-count profile together with a
//! total charge modulo D, where D is the gcd of the cycle lengths of the
//! species present. Orbits are computed by union-find over the bond moves;
//! every closed-form count or cardinality here is a cross-check against that
//! enumeration, never a replacement for it.

use std::collections::HashMap;

use num::bigint::BigUint;
use num::integer::{binomial, gcd};
use num::{One, Zero};
use thiserror::Error;

use crate::markov::{decode_config, MarkovModel, ModelError, RateMatrix};
use crate::perm::{ChargeCoordinates, Permutation};
use crate::rat::{self, Rat};
use crate::report::CheckReport;

#[derive(Debug, Error)]
pub enum SectorError {
    #[error("sector combinatorics needs at least two sites, got {l}")]
    ChainTooShort { l: usize },
    #[error("{d} does not divide the alphabet size {n}")]
    NotADivisor { d: usize, n: usize },
    #[error("profile has {got} species counts, the twist has {expected} cycles")]
    ProfileShape { expected: usize, got: usize },
    #[error("profile sums to {got} but the chain has {expected} sites")]
    ProfileSum { expected: usize, got: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Union-find with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Partition of the configuration space into bond-move orbits. Sectors are
/// indexed in order of their minimal member encoding; member lists are
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorDecomposition {
    sector_of: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl SectorDecomposition {
    /// Computes orbits of the model's bond moves by union-find.
    pub fn from_model(model: &MarkovModel) -> Self {
        let dim = model.state_count();
        let mut uf = UnionFind::new(dim);
        for x in 0..dim {
            for (_, y) in model.active_bonds(x) {
                uf.union(x, y);
            }
        }
        Self::from_union_find(uf, dim)
    }

    /// Connected components of the off-diagonal support of a generator. The
    /// generators here are symmetric, so directed support and undirected
    /// reachability coincide.
    pub fn from_generator(gen: &RateMatrix) -> Self {
        let dim = gen.dim();
        let mut uf = UnionFind::new(dim);
        for x in 0..dim {
            for &(y, _) in gen.moves_from(x) {
                uf.union(x, y);
            }
        }
        Self::from_union_find(uf, dim)
    }

    fn from_union_find(mut uf: UnionFind, dim: usize) -> Self {
        let mut sector_of = vec![usize::MAX; dim];
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut index_of_root = HashMap::new();
        for (x, slot) in sector_of.iter_mut().enumerate() {
            let root = uf.find(x);
            let idx = *index_of_root.entry(root).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            *slot = idx;
            members[idx].push(x);
        }
        SectorDecomposition { sector_of, members }
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn state_count(&self) -> usize {
        self.sector_of.len()
    }

    pub fn sector_of(&self, x: usize) -> usize {
        self.sector_of[x]
    }

    pub fn members(&self, sector: usize) -> &[usize] {
        &self.members[sector]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn sector_containing(&self, x: usize) -> &[usize] {
        self.members(self.sector_of(x))
    }
}

/// Conserved label of a twisted-exclusion sector: how many sites hold each
/// species, plus the total charge modulo the gcd of the cycle lengths
/// present. `modulus` 1 forces charge 0, the canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SectorLabel {
    pub profile: Vec<usize>,
    pub charge: usize,
    pub modulus: usize,
}

impl std::fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let counts: Vec<String> = self.profile.iter().map(|p| p.to_string()).collect();
        write!(
            f,
            "p=[{}] E={} (mod {})",
            counts.join(","),
            self.charge,
            self.modulus
        )
    }
}

/// Gcd of cycle lengths over the species a profile actually uses; 1 for the
/// empty profile.
fn profile_modulus(coords: &ChargeCoordinates, profile: &[usize]) -> usize {
    let mut d = 0;
    for (s, &count) in profile.iter().enumerate() {
        if count > 0 {
            d = gcd(d, coords.cycle_lengths()[s]);
        }
    }
    d.max(1)
}

/// Labels a configuration of the twisted exclusion process with twist
/// coordinates `coords`.
pub fn label_of_config(coords: &ChargeCoordinates, sites: &[usize]) -> SectorLabel {
    let mut profile = vec![0usize; coords.n_species()];
    let mut charge_sum = 0usize;
    for &v in sites {
        profile[coords.species_of(v) - 1] += 1;
        charge_sum += coords.charge_of(v);
    }
    let modulus = profile_modulus(coords, &profile);
    SectorLabel {
        profile,
        charge: charge_sum % modulus,
        modulus,
    }
}

pub(crate) fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

/// Label of every sector of the twisted exclusion process, indexed like the
/// decomposition (labels are constant on sectors, so the first member
/// represents).
pub fn sector_labels(f: &Permutation, l: usize, dec: &SectorDecomposition) -> Vec<SectorLabel> {
    let coords = f.charge_coordinates();
    (0..dec.count())
        .map(|s| label_of_config(&coords, &decode_config(dec.members(s)[0], f.n(), l)))
        .collect()
}

/// Number of sectors of the twisted exclusion process, by the closed form
/// Σ over nonempty species subsets X of C(L-1, |X|-1) · gcd of the cycle
/// lengths in X.
pub fn count_sectors(f: &Permutation, l: usize) -> Result<BigUint, SectorError> {
    if l < 2 {
        return Err(SectorError::ChainTooShort { l });
    }
    let coords = f.charge_coordinates();
    let lengths = coords.cycle_lengths();
    let species = lengths.len();
    let mut total = BigUint::zero();
    for mask in 1u64..(1 << species) {
        let mut d = 0usize;
        let mut picked = 0usize;
        for (s, &c) in lengths.iter().enumerate() {
            if mask & (1 << s) != 0 {
                d = gcd(d, c);
                picked += 1;
            }
        }
        total += binomial(BigUint::from(l - 1), BigUint::from(picked - 1)) * BigUint::from(d);
    }
    Ok(total)
}

/// Sector count when the twist has d cycles of equal length N/d:
/// (N/d) · C(L+d-1, L).
pub fn count_sectors_equal_cycles(n: usize, d: usize, l: usize) -> Result<BigUint, SectorError> {
    if l < 2 {
        return Err(SectorError::ChainTooShort { l });
    }
    if d == 0 || !n.is_multiple_of(d) {
        return Err(SectorError::NotADivisor { d, n });
    }
    Ok(BigUint::from(n / d) * binomial(BigUint::from(l + d - 1), BigUint::from(l)))
}

/// Sector count of the untwisted exclusion process, C(L+N-1, L).
pub fn ssep_sector_count(n: usize, l: usize) -> Result<BigUint, SectorError> {
    count_sectors_equal_cycles(n, n, l)
}

/// Number of configurations in the sector with the given label:
/// (L! / Π p_s!) · (Π c_s^{p_s}) / D. Both divisions are exact.
pub fn sector_cardinality(
    f: &Permutation,
    l: usize,
    label: &SectorLabel,
) -> Result<BigUint, SectorError> {
    let coords = f.charge_coordinates();
    let species = coords.n_species();
    if label.profile.len() != species {
        return Err(SectorError::ProfileShape {
            expected: species,
            got: label.profile.len(),
        });
    }
    let total: usize = label.profile.iter().sum();
    if total != l {
        return Err(SectorError::ProfileSum {
            expected: l,
            got: total,
        });
    }
    let mut value = factorial(l);
    for (s, &p) in label.profile.iter().enumerate() {
        value /= factorial(p);
        value *= BigUint::from(coords.cycle_lengths()[s]).pow(p as u32);
    }
    let modulus = profile_modulus(&coords, &label.profile);
    Ok(value / BigUint::from(modulus))
}

/// Uniform distribution supported on one sector.
pub fn stationary_state(dim: usize, members: &[usize]) -> Vec<Rat> {
    assert!(!members.is_empty(), "a sector has at least one member");
    let weight = rat::rat(1, members.len() as i64);
    let mut v = vec![Rat::zero(); dim];
    for &x in members {
        v[x] = weight.clone();
    }
    v
}

/// Verifies M·v = 0 exactly and that v is a probability vector.
pub fn check_stationary(gen: &RateMatrix, v: &[Rat]) -> CheckReport {
    let mut report = CheckReport::new("state is stationary and normalized");
    let image = gen.apply(v);
    for (x, entry) in image.iter().enumerate() {
        report.record(entry.is_zero(), || {
            format!("(M v)[{}] = {}", x, rat::display(entry))
        });
    }
    let total: Rat = v.iter().cloned().sum();
    report.record(total == Rat::one(), || {
        format!("mass sums to {}", rat::display(&total))
    });
    let nonneg = v.iter().all(|w| *w >= Rat::zero());
    report.record(nonneg, || "negative mass entry".to_string());
    report
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|&d| n.is_multiple_of(d)).collect()
}

/// Cross-checks the sector theory for one twist and chain length:
/// enumerated orbits agree with the label partition, the closed-form count,
/// and the cardinality formula; the equal-cycle count specializes correctly
/// and grows strictly with the number of cycles; and the count sits between
/// N and the untwisted count.
pub fn verify_sector_theory(f: &Permutation, l: usize) -> Result<CheckReport, SectorError> {
    if l < 2 {
        return Err(SectorError::ChainTooShort { l });
    }
    let n = f.n();
    let model = MarkovModel::twisted_ssep(n, l, f)?;
    let dec = SectorDecomposition::from_model(&model);
    let coords = f.charge_coordinates();
    let mut report = CheckReport::new("sector structure matches the label theory");

    // Orbits and labels induce the same partition: labels are constant on
    // each orbit and distinct across orbits.
    let mut sector_of_label: HashMap<SectorLabel, usize> = HashMap::new();
    for sector in 0..dec.count() {
        let members = dec.members(sector);
        let first = label_of_config(&coords, &decode_config(members[0], n, l));
        for &x in members {
            let label = label_of_config(&coords, &decode_config(x, n, l));
            report.record(label == first, || {
                format!(
                    "configuration {:?} in sector {} has label {} instead of {}",
                    decode_config(x, n, l),
                    sector,
                    label,
                    first
                )
            });
        }
        let clash = sector_of_label.insert(first.clone(), sector);
        report.record(clash.is_none(), || {
            format!(
                "label {} shared by sectors {} and {}",
                first,
                clash.unwrap_or(0),
                sector
            )
        });

        // Enumerated size against the cardinality formula.
        let size = sector_cardinality(f, l, &first)?;
        report.record(size == BigUint::from(members.len()), || {
            format!(
                "sector {} has {} members, formula gives {}",
                sector,
                members.len(),
                size
            )
        });
    }

    // Enumerated count against the closed form.
    let closed = count_sectors(f, l)?;
    report.record(closed == BigUint::from(dec.count()), || {
        format!("enumerated {} sectors, closed form gives {}", dec.count(), closed)
    });

    // Equal-cycle specialization when the twist has uniform cycle type.
    let lengths = coords.cycle_lengths();
    if lengths.iter().all(|&c| c == lengths[0]) {
        let d = lengths.len();
        let special = count_sectors_equal_cycles(n, d, l)?;
        report.record(special == closed, || {
            format!(
                "equal-cycle count {} disagrees with the general form {}",
                special, closed
            )
        });
    }

    // The equal-cycle count is strictly increasing in the number of cycles.
    let counts: Vec<BigUint> = divisors(n)
        .into_iter()
        .map(|d| count_sectors_equal_cycles(n, d, l))
        .collect::<Result<_, _>>()?;
    for pair in counts.windows(2) {
        report.record(pair[0] < pair[1], || {
            format!("equal-cycle counts not increasing: {} then {}", pair[0], pair[1])
        });
    }

    // N ≤ count ≤ untwisted count.
    let ssep = ssep_sector_count(n, l)?;
    report.record(BigUint::from(n) <= closed && closed <= ssep, || {
        format!("count {} outside [{}, {}]", closed, n, ssep)
    });

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::encode_config;
    use crate::twosite::{counterexample_family, TwoSiteMap};

    fn perm(text: &str, n: usize) -> Permutation {
        Permutation::parse(text, n).unwrap()
    }

    /// Plain breadth-first orbit search, kept independent of the union-find
    /// path so the two enumerations check each other.
    fn bfs_partition(model: &MarkovModel) -> Vec<Vec<usize>> {
        let dim = model.state_count();
        let mut seen = vec![false; dim];
        let mut orbits = Vec::new();
        for start in 0..dim {
            if seen[start] {
                continue;
            }
            let mut queue = vec![start];
            let mut orbit = Vec::new();
            seen[start] = true;
            while let Some(x) = queue.pop() {
                orbit.push(x);
                for (_, y) in model.active_bonds(x) {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    #[test]
    fn union_find_merges_and_compresses() {
        let mut uf = UnionFind::new(5);
        uf.union(0, 1);
        uf.union(3, 4);
        assert!(uf.same(0, 1));
        assert!(!uf.same(1, 3));
        uf.union(1, 4);
        assert!(uf.same(0, 3));
        assert!(!uf.same(2, 0));
    }

    #[test]
    fn decomposition_matches_bfs_oracle() {
        let cases: Vec<MarkovModel> = vec![
            MarkovModel::twisted_ssep(2, 4, &Permutation::identity(2)).unwrap(),
            MarkovModel::twisted_ssep(3, 3, &perm("(0 1 2)", 3)).unwrap(),
            MarkovModel::twisted_ssep(3, 3, &perm("(0 1)", 3)).unwrap(),
            MarkovModel::from_family(&counterexample_family(), 3).unwrap(),
        ];
        for model in &cases {
            let dec = SectorDecomposition::from_model(model);
            let oracle = bfs_partition(model);
            assert_eq!(dec.count(), oracle.len());
            let mut listed: Vec<Vec<usize>> =
                (0..dec.count()).map(|s| dec.members(s).to_vec()).collect();
            listed.sort();
            let mut expected = oracle;
            expected.sort();
            assert_eq!(listed, expected);
        }
    }

    #[test]
    fn sectors_are_ordered_by_minimal_member() {
        let model = MarkovModel::twisted_ssep(3, 3, &perm("(0 1 2)", 3)).unwrap();
        let dec = SectorDecomposition::from_model(&model);
        let minima: Vec<usize> = (0..dec.count()).map(|s| dec.members(s)[0]).collect();
        assert!(minima.windows(2).all(|w| w[0] < w[1]));
        for s in 0..dec.count() {
            assert!(dec.members(s).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn three_letter_counts_at_three_sites() {
        // twist with 3 fixed points, a transposition, and a 3-cycle give
        // 10, 5, 3 sectors; the family model has 7, matching none of them
        let id = Permutation::identity(3);
        let cases = vec![(id, 10usize), (perm("(0 1)", 3), 5), (perm("(0 1 2)", 3), 3)];
        for (f, expected) in cases {
            let model = MarkovModel::twisted_ssep(3, 3, &f).unwrap();
            let dec = SectorDecomposition::from_model(&model);
            assert_eq!(dec.count(), expected, "f = {}", f);
            assert_eq!(count_sectors(&f, 3).unwrap(), BigUint::from(expected));
        }
        let family_model = MarkovModel::from_family(&counterexample_family(), 3).unwrap();
        assert_eq!(SectorDecomposition::from_model(&family_model).count(), 7);
    }

    #[test]
    fn sector_count_equals_generator_kernel_dimension() {
        // the generators are symmetric, so independent sectors contribute
        // exactly one zero mode each
        let models = vec![
            MarkovModel::twisted_ssep(3, 3, &Permutation::identity(3)).unwrap(),
            MarkovModel::twisted_ssep(3, 3, &perm("(0 1)", 3)).unwrap(),
            MarkovModel::twisted_ssep(3, 3, &perm("(0 1 2)", 3)).unwrap(),
            MarkovModel::from_family(&counterexample_family(), 3).unwrap(),
        ];
        for model in &models {
            let dec = SectorDecomposition::from_model(model);
            let kernel = model.generator().to_matrix().kernel_dimension();
            assert_eq!(dec.count(), kernel);
        }
    }

    #[test]
    fn label_values_small_case() {
        // f = (0 1): one species of length 2, charges 0 and 1
        let f = perm("(0 1)", 2);
        let coords = f.charge_coordinates();
        let label = label_of_config(&coords, &[0, 0]);
        assert_eq!(label.profile, vec![2]);
        assert_eq!((label.charge, label.modulus), (0, 2));
        // charge 2 wraps to 0
        assert_eq!(label_of_config(&coords, &[1, 1]).charge, 0);
        assert_eq!(label_of_config(&coords, &[0, 1]).charge, 1);
    }

    #[test]
    fn mixed_species_collapse_charge_when_lengths_are_coprime() {
        // f = (0 1)(2 3 4): cycle lengths 2 and 3, so mixed profiles have
        // modulus 1 and charge 0
        let f = perm("(0 1)(2 3 4)", 5);
        let coords = f.charge_coordinates();
        let mixed = label_of_config(&coords, &[1, 4]);
        assert_eq!(mixed.profile, vec![1, 1]);
        assert_eq!((mixed.charge, mixed.modulus), (0, 1));
        let pure = label_of_config(&coords, &[3, 4]);
        assert_eq!((pure.charge, pure.modulus), (0, 3));
    }

    #[test]
    fn closed_form_counts_agree_with_enumeration_broadly() {
        for n in 2..=4 {
            for f in Permutation::all(n) {
                for l in 2..=3 {
                    let model = MarkovModel::twisted_ssep(n, l, &f).unwrap();
                    let dec = SectorDecomposition::from_model(&model);
                    assert_eq!(
                        BigUint::from(dec.count()),
                        count_sectors(&f, l).unwrap(),
                        "n = {}, l = {}, f = {}",
                        n,
                        l,
                        f
                    );
                }
            }
        }
    }

    #[test]
    fn equal_cycle_count_table() {
        // twelve letters, four sites: one row per divisor
        let expected: Vec<(usize, usize)> = vec![
            (1, 12),
            (2, 30),
            (3, 60),
            (4, 105),
            (6, 252),
            (12, 1365),
        ];
        for (d, count) in expected {
            assert_eq!(
                count_sectors_equal_cycles(12, d, 4).unwrap(),
                BigUint::from(count),
                "d = {}",
                d
            );
        }
        assert!(matches!(
            count_sectors_equal_cycles(12, 5, 4),
            Err(SectorError::NotADivisor { d: 5, n: 12 })
        ));
    }

    #[test]
    fn ssep_count_is_the_equal_cycle_case_at_full_split() {
        assert_eq!(ssep_sector_count(2, 4).unwrap(), BigUint::from(5u32));
        assert_eq!(
            ssep_sector_count(3, 3).unwrap(),
            count_sectors(&Permutation::identity(3), 3).unwrap()
        );
    }

    #[test]
    fn cardinality_formula_small_cases() {
        // f = (0 1), L = 2: two sectors of size 2
        let f = perm("(0 1)", 2);
        let coords = f.charge_coordinates();
        for sites in [[0usize, 0], [0, 1]] {
            let label = label_of_config(&coords, &sites);
            assert_eq!(sector_cardinality(&f, 2, &label).unwrap(), BigUint::from(2u32));
        }
        // mismatched profile shapes are rejected
        let bad = SectorLabel {
            profile: vec![2, 0],
            charge: 0,
            modulus: 2,
        };
        assert!(matches!(
            sector_cardinality(&f, 2, &bad),
            Err(SectorError::ProfileShape { .. })
        ));
        let short = SectorLabel {
            profile: vec![1],
            charge: 0,
            modulus: 2,
        };
        assert!(matches!(
            sector_cardinality(&f, 2, &short),
            Err(SectorError::ProfileSum { .. })
        ));
    }

    #[test]
    fn uniform_state_is_stationary_on_each_sector() {
        let model = MarkovModel::twisted_ssep(3, 3, &perm("(0 1 2)", 3)).unwrap();
        let dec = SectorDecomposition::from_model(&model);
        for s in 0..dec.count() {
            let v = stationary_state(model.state_count(), dec.members(s));
            let report = check_stationary(model.generator(), &v);
            assert!(report.passed(), "sector {}: {}", s, report);
        }
        // a non-stationary vector is caught
        let mut v = stationary_state(model.state_count(), dec.members(0));
        let donor = dec.members(1)[0];
        let recipient = dec.members(0)[0];
        v[donor] = v[recipient].clone();
        v[recipient] = Rat::zero();
        assert!(!check_stationary(model.generator(), &v).passed());
    }

    #[test]
    fn family_model_sectors_carry_uniform_stationary_states() {
        let model = MarkovModel::from_family(&counterexample_family(), 3).unwrap();
        let dec = SectorDecomposition::from_model(&model);
        for s in 0..dec.count() {
            let v = stationary_state(model.state_count(), dec.members(s));
            assert!(check_stationary(model.generator(), &v).passed());
        }
    }

    #[test]
    fn verify_sector_theory_across_twists() {
        let cases = vec![
            (Permutation::identity(2), 3),
            (perm("(0 1)", 2), 3),
            (perm("(0 1)", 2), 4),
            (perm("(0 1 2)", 3), 3),
            (perm("(0 1)", 3), 3),
            (perm("(0 1)(2 3)", 4), 2),
            (perm("(0 1 2 3)", 4), 3),
        ];
        for (f, l) in cases {
            let report = verify_sector_theory(&f, l).unwrap();
            assert!(report.passed(), "f = {}, l = {}: {}", f, l, report);
        }
    }

    #[test]
    fn short_chains_are_rejected() {
        let f = perm("(0 1)", 2);
        assert!(matches!(
            count_sectors(&f, 1),
            Err(SectorError::ChainTooShort { l: 1 })
        ));
        assert!(matches!(
            verify_sector_theory(&f, 0),
            Err(SectorError::ChainTooShort { l: 0 })
        ));
    }

    #[test]
    fn sector_containing_returns_the_member_list() {
        let model = MarkovModel::set_theoretical(&TwoSiteMap::swap(2), 2).unwrap();
        let dec = SectorDecomposition::from_model(&model);
        let x = encode_config(&[0, 1], 2);
        assert!(dec.sector_containing(x).contains(&encode_config(&[1, 0], 2)));
        assert_eq!(dec.state_count(), 4);
    }

    #[test]
    fn two_site_exclusion_partitions() {
        // plain SSEP: {00}, {01,10}, {11}; twist (0 1) merges the frozen
        // configurations: {00,11}, {01,10}
        let plain = MarkovModel::twisted_ssep(2, 2, &Permutation::identity(2)).unwrap();
        assert_eq!(SectorDecomposition::from_model(&plain).count(), 3);
        let twisted = MarkovModel::twisted_ssep(2, 2, &perm("(0 1)", 2)).unwrap();
        let dec = SectorDecomposition::from_model(&twisted);
        assert_eq!(dec.count(), 2);
        assert_eq!(dec.members(0), &[0b00, 0b11]);
        assert_eq!(dec.members(1), &[0b01, 0b10]);
    }

    #[test]
    fn generator_support_gives_the_same_partition() {
        let model = MarkovModel::twisted_ssep(3, 3, &perm("(0 1)", 3)).unwrap();
        assert_eq!(
            SectorDecomposition::from_generator(model.generator()),
            SectorDecomposition::from_model(&model)
        );
    }

    #[test]
    fn equal_cycle_count_agrees_with_enumeration_at_four_letters() {
        // f = (0 2)(1 3): two cycles of length two
        let f = perm("(0 2)(1 3)", 4);
        let model = MarkovModel::twisted_ssep(4, 3, &f).unwrap();
        let dec = SectorDecomposition::from_model(&model);
        assert_eq!(dec.count(), 8);
        assert_eq!(count_sectors_equal_cycles(4, 2, 3).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn equal_cycle_parameter_counts_cycles_not_lengths() {
        // f = (0 3)(1 4)(2 5): three cycles of length two, so the cycle
        // count and the cycle length disagree and pin down the convention
        let f = perm("(0 3)(1 4)(2 5)", 6);
        let model = MarkovModel::twisted_ssep(6, 2, &f).unwrap();
        let dec = SectorDecomposition::from_model(&model);
        assert_eq!(dec.count(), 12);
        assert_eq!(count_sectors_equal_cycles(6, 3, 2).unwrap(), BigUint::from(12u32));
        assert_ne!(count_sectors_equal_cycles(6, 2, 2).unwrap(), BigUint::from(12u32));
    }

    #[test]
    fn full_cycle_sectors_have_cardinality_n_to_l_minus_one() {
        let f = perm("(0 1 2)", 3);
        let coords = f.charge_coordinates();
        let label = label_of_config(&coords, &[0, 0, 0, 0]);
        assert_eq!(sector_cardinality(&f, 4, &label).unwrap(), BigUint::from(27u32));
        // the identity twist gives plain multinomials
        let id = Permutation::identity(3);
        let multi = label_of_config(&id.charge_coordinates(), &[0, 1, 1, 2]);
        assert_eq!(sector_cardinality(&id, 4, &multi).unwrap(), BigUint::from(12u32));
    }
}
