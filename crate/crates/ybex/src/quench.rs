//! Quenches between twists: branching probabilities, sector-relation
//! classification, alternating-twist chains, and schedule execution.
//!
//! A quench replaces one twist by another instantaneously. The old
//! stationary state then relaxes within the new sector structure, landing on
//! each new sector with probability |C⁽¹⁾ ∩ C⁽²⁾_γ| / |C⁽¹⁾|. Everything
//! here is computed from exact set intersections; the closed forms for the
//! full-cycle cases are provided as independent cross-checks because their
//! congruence conditions are easy to get subtly wrong.

use num::bigint::{BigInt, BigUint};
use num::{One, Zero};
use thiserror::Error;

use crate::dynamics::{evolve, long_time_limit, long_time_limit_f64, DynamicsError};
use crate::markov::{MarkovModel, ModelError};
use crate::perm::Permutation;
use crate::rat::{self, Rat};
use crate::sector::{factorial, SectorDecomposition, SectorError};

#[derive(Debug, Error)]
pub enum QuenchError {
    #[error("twists act on different alphabets: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("decompositions cover {left} and {right} states")]
    StateMismatch { left: usize, right: usize },
    #[error("the two-cycle closed form needs an even alphabet, got {n}")]
    OddAlphabet { n: usize },
    #[error("{d} does not divide the alphabet size {n}")]
    BadFactorization { n: usize, d: usize },
    #[error("profile has {got} entries, expected {expected}")]
    ProfileShape { expected: usize, got: usize },
    #[error("profile sums to {got}, the chain has {expected} sites")]
    ProfileSum { expected: usize, got: usize },
    #[error("sector index {sector} out of range ({count} sectors)")]
    BadSector { sector: usize, count: usize },
    #[error("configuration {config} outside the {dim}-state space")]
    BadConfiguration { config: usize, dim: usize },
    #[error("schedule has no steps")]
    EmptySchedule,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sector(#[from] SectorError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Row-stochastic matrix of quench probabilities: rows are sectors of the
/// source decomposition, columns sectors of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingMatrix {
    rows: Vec<Vec<Rat>>,
    cols: usize,
}

impl BranchingMatrix {
    /// Exact intersection counts over two partitions of the same states.
    pub fn from_decompositions(
        from: &SectorDecomposition,
        to: &SectorDecomposition,
    ) -> Result<Self, QuenchError> {
        if from.state_count() != to.state_count() {
            return Err(QuenchError::StateMismatch {
                left: from.state_count(),
                right: to.state_count(),
            });
        }
        let mut counts = vec![vec![0usize; to.count()]; from.count()];
        for x in 0..from.state_count() {
            counts[from.sector_of(x)][to.sector_of(x)] += 1;
        }
        let rows = counts
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let size = from.members(i).len() as i64;
                row.iter()
                    .map(|&c| rat::rat(c as i64, size))
                    .collect()
            })
            .collect();
        Ok(BranchingMatrix {
            rows,
            cols: to.count(),
        })
    }

    pub fn n_from(&self) -> usize {
        self.rows.len()
    }

    pub fn n_to(&self) -> usize {
        self.cols
    }

    pub fn probability(&self, from: usize, to: usize) -> &Rat {
        &self.rows[from][to]
    }

    pub fn row(&self, from: usize) -> &[Rat] {
        &self.rows[from]
    }

    pub fn row_sums_are_one(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().cloned().sum::<Rat>() == Rat::one())
    }

    pub fn is_identity(&self) -> bool {
        self.rows.len() == self.cols
            && self.rows.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, p)| (i == j) == (*p == Rat::one()) && (i == j || p.is_zero()))
            })
    }

    /// Pushes sector masses forward through the quench (row-vector product).
    pub fn apply_to_masses(&self, masses: &[Rat]) -> Vec<Rat> {
        assert_eq!(masses.len(), self.rows.len());
        let mut out = vec![Rat::zero(); self.cols];
        for (m, row) in masses.iter().zip(&self.rows) {
            if m.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(row) {
                *o += m * p;
            }
        }
        out
    }

    /// Chains two quenches: (self · other) as stochastic matrices.
    pub fn compose(&self, other: &BranchingMatrix) -> Result<BranchingMatrix, QuenchError> {
        if self.cols != other.rows.len() {
            return Err(QuenchError::StateMismatch {
                left: self.cols,
                right: other.rows.len(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| other.apply_to_masses(row))
            .collect();
        Ok(BranchingMatrix {
            rows,
            cols: other.cols,
        })
    }
}

/// Branching matrix between the twisted exclusion processes of two twists.
pub fn branching_matrix(
    f1: &Permutation,
    f2: &Permutation,
    l: usize,
) -> Result<BranchingMatrix, QuenchError> {
    let (_, _, b) = branching_with_decompositions(f1, f2, l)?;
    Ok(b)
}

/// Same as [`branching_matrix`] but also returns both decompositions, whose
/// sector indices label the rows and columns.
pub fn branching_with_decompositions(
    f1: &Permutation,
    f2: &Permutation,
    l: usize,
) -> Result<(SectorDecomposition, SectorDecomposition, BranchingMatrix), QuenchError> {
    if f1.n() != f2.n() {
        return Err(QuenchError::AlphabetMismatch {
            left: f1.n(),
            right: f2.n(),
        });
    }
    let n = f1.n();
    let dec1 = SectorDecomposition::from_model(&MarkovModel::twisted_ssep(n, l, f1)?);
    let dec2 = SectorDecomposition::from_model(&MarkovModel::twisted_ssep(n, l, f2)?);
    let b = BranchingMatrix::from_decompositions(&dec1, &dec2)?;
    Ok((dec1, dec2, b))
}

/// How one source sector sits relative to one target sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRelation {
    Disjoint,
    Equal,
    FirstInsideSecond,
    SecondInsideFirst,
    ProperOverlap,
}

/// Global shape of the two partitions, read in the quench direction
/// (from partition 1 into partition 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationVerdict {
    /// The partitions coincide.
    Equal,
    /// Every source sector is contained in a target sector: mass spreads
    /// into the larger sectors.
    Spreading,
    /// Every target sector is contained in a source sector: mass splits
    /// across the finer sectors.
    Splitting,
    /// Neither refinement holds throughout.
    Mixed,
}

impl std::fmt::Display for RelationVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let word = match self {
            RelationVerdict::Equal => "equal",
            RelationVerdict::Spreading => "spreading",
            RelationVerdict::Splitting => "splitting",
            RelationVerdict::Mixed => "mixed",
        };
        write!(f, "{}", word)
    }
}

/// Classification of a twist pair: the pairwise table, the global verdict,
/// and the power cross-check when f1 is a power of f2.
#[derive(Debug, Clone)]
pub struct RelationReport {
    pub table: Vec<Vec<PairRelation>>,
    pub verdict: RelationVerdict,
    /// Some(k) when f1 = f2^k; refinement must then hold, recorded in
    /// `power_consistent`.
    pub power_exponent: Option<usize>,
    pub power_consistent: bool,
}

impl RelationReport {
    pub fn has_proper_overlap(&self) -> bool {
        self.table
            .iter()
            .flatten()
            .any(|r| *r == PairRelation::ProperOverlap)
    }
}

fn smallest_power_exponent(f1: &Permutation, f2: &Permutation) -> Option<usize> {
    let mut power = Permutation::identity(f2.n());
    for k in 0..f2.order() {
        if power == *f1 {
            return Some(k as usize);
        }
        power = f2.compose(&power).expect("same alphabet");
    }
    None
}

/// Classifies every sector pair of two decompositions of the same state
/// space and derives the global verdict.
pub fn classify_partitions(
    from: &SectorDecomposition,
    to: &SectorDecomposition,
) -> Result<(Vec<Vec<PairRelation>>, RelationVerdict), QuenchError> {
    let b = BranchingMatrix::from_decompositions(from, to)?;
    let mut table = vec![vec![PairRelation::Disjoint; to.count()]; from.count()];
    for (i, row) in table.iter_mut().enumerate() {
        let size1 = from.members(i).len();
        for (j, cell) in row.iter_mut().enumerate() {
            let size2 = to.members(j).len();
            // |C1 ∩ C2| = prob · |C1|, recovered exactly
            let inter = (b.probability(i, j) * rat::int(size1 as i64))
                .to_integer()
                .to_string()
                .parse::<usize>()
                .expect("intersection count fits");
            *cell = match inter {
                0 => PairRelation::Disjoint,
                c if c == size1 && c == size2 => PairRelation::Equal,
                c if c == size1 => PairRelation::FirstInsideSecond,
                c if c == size2 => PairRelation::SecondInsideFirst,
                _ => PairRelation::ProperOverlap,
            };
        }
    }
    let flat: Vec<PairRelation> = table.iter().flatten().copied().collect();
    let all_equalish = flat
        .iter()
        .all(|r| matches!(r, PairRelation::Disjoint | PairRelation::Equal));
    let spreading = flat.iter().all(|r| {
        matches!(
            r,
            PairRelation::Disjoint | PairRelation::Equal | PairRelation::FirstInsideSecond
        )
    });
    let splitting = flat.iter().all(|r| {
        matches!(
            r,
            PairRelation::Disjoint | PairRelation::Equal | PairRelation::SecondInsideFirst
        )
    });
    let verdict = if all_equalish {
        RelationVerdict::Equal
    } else if spreading {
        RelationVerdict::Spreading
    } else if splitting {
        RelationVerdict::Splitting
    } else {
        RelationVerdict::Mixed
    };
    Ok((table, verdict))
}

/// Classifies every sector pair of the two twists and derives the global
/// verdict. When f1 is a power of f2, partition 1 refines partition 2, so
/// the verdict must be equal or spreading; the report records that check.
pub fn classify_relation(
    f1: &Permutation,
    f2: &Permutation,
    l: usize,
) -> Result<RelationReport, QuenchError> {
    let (dec1, dec2, _) = branching_with_decompositions(f1, f2, l)?;
    let (table, verdict) = classify_partitions(&dec1, &dec2)?;
    let power_exponent = smallest_power_exponent(f1, f2);
    let power_consistent = power_exponent.is_none()
        || matches!(verdict, RelationVerdict::Equal | RelationVerdict::Spreading);
    Ok(RelationReport {
        table,
        verdict,
        power_exponent,
        power_consistent,
    })
}

/// Decides whether the untwisted sector with per-value counts `p1` is
/// contained in the twisted sector (p2, e2) of `f2`: species totals must
/// aggregate to p2 and the summed charge must hit e2 modulo the sector's
/// cycle gcd.
pub fn ssep_inclusion_condition(
    p1: &[usize],
    p2: &[usize],
    e2: usize,
    f2: &Permutation,
) -> Result<bool, QuenchError> {
    let n = f2.n();
    if p1.len() != n {
        return Err(QuenchError::ProfileShape {
            expected: n,
            got: p1.len(),
        });
    }
    let coords = f2.charge_coordinates();
    if p2.len() != coords.n_species() {
        return Err(QuenchError::ProfileShape {
            expected: coords.n_species(),
            got: p2.len(),
        });
    }
    let mut aggregated = vec![0usize; coords.n_species()];
    let mut charge = 0usize;
    for (v, &count) in p1.iter().enumerate() {
        aggregated[coords.species_of(v) - 1] += count;
        charge += coords.charge_of(v) * count;
    }
    if aggregated != p2 {
        return Ok(false);
    }
    let mut modulus = 0usize;
    for (s, &count) in p2.iter().enumerate() {
        if count > 0 {
            modulus = num::integer::gcd(modulus, coords.cycle_lengths()[s]);
        }
    }
    let modulus = modulus.max(1);
    Ok(charge % modulus == e2 % modulus)
}

fn multinomial_over(l: usize, parts: &[usize]) -> Rat {
    let mut value = factorial(l);
    for &p in parts {
        value /= factorial(p);
    }
    Rat::from_integer(BigInt::from(value))
}

/// Branching probability for a quench from a full N-cycle into its square:
/// L!/(p2!·p3!)·(1/2)^{L-1} when k ≡ 2ℓ + p3 (mod N), else 0. Here k is
/// the source charge, (p2, p3) the even/odd species counts, and ℓ the target
/// charge modulo N/2.
pub fn closed_form_branching_fullcycle_square(
    n: usize,
    l: usize,
    k: usize,
    p2: usize,
    p3: usize,
    target_charge: usize,
) -> Result<Rat, QuenchError> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(QuenchError::OddAlphabet { n });
    }
    if p2 + p3 != l {
        return Err(QuenchError::ProfileSum {
            expected: l,
            got: p2 + p3,
        });
    }
    if (2 * target_charge + p3) % n != k % n {
        return Ok(Rat::zero());
    }
    let half_power = Rat::new(BigInt::one(), BigInt::from(BigUint::from(2u32).pow(l as u32 - 1)));
    Ok(multinomial_over(l, &[p2, p3]) * half_power)
}

/// Branching probability for a quench from a full N-cycle into its (N/D)-th
/// power, which has N/D cycles of length D: L!/(Π p_r!)·(D/N)^{L-1} when
/// (N/D)·ℓ + Σ_r r·p_r ≡ k (mod N), else 0. The profile is indexed by the
/// canonical species order, species r+1 holding the values ≡ r mod N/D.
pub fn closed_form_branching_power(
    n: usize,
    d: usize,
    l: usize,
    k: usize,
    profile: &[usize],
    target_charge: usize,
) -> Result<Rat, QuenchError> {
    if d == 0 || !n.is_multiple_of(d) {
        return Err(QuenchError::BadFactorization { n, d });
    }
    let m = n / d;
    if profile.len() != m {
        return Err(QuenchError::ProfileShape {
            expected: m,
            got: profile.len(),
        });
    }
    let total: usize = profile.iter().sum();
    if total != l {
        return Err(QuenchError::ProfileSum {
            expected: l,
            got: total,
        });
    }
    let offset: usize = profile.iter().enumerate().map(|(r, &p)| r * p).sum();
    if (m * target_charge + offset) % n != k % n {
        return Ok(Rat::zero());
    }
    let m_power = Rat::new(
        BigInt::one(),
        BigInt::from(BigUint::from(m).pow(l as u32 - 1)),
    );
    Ok(multinomial_over(l, profile) * m_power)
}

/// The induced chain on source sectors under alternating twists.
#[derive(Debug, Clone)]
pub struct OscillationResult {
    /// One double switch (to f2 and back): B₁₂·B₂₁, row-stochastic on the
    /// f1-sectors.
    pub transition: BranchingMatrix,
    /// Distribution after the requested number of double switches.
    pub after: Vec<Rat>,
    /// Exact fixed point if iteration reaches one within the cap.
    pub fixed_point: Option<Vec<Rat>>,
    pub switches: usize,
}

/// Iteration cap for the exact fixed-point search. Nested partitions reach
/// the fixed point after a single double switch; the cap only matters for
/// proper-overlap pairs, where an exact cycle may never close.
pub const FIXED_POINT_CAP: usize = 64;

/// Runs the alternating-twist protocol started from one f1-sector: switch
/// to f2, relax, switch back, relax, `switches` times.
pub fn oscillation_chain(
    f1: &Permutation,
    f2: &Permutation,
    l: usize,
    start: usize,
    switches: usize,
) -> Result<OscillationResult, QuenchError> {
    let (dec1, dec2, b12) = branching_with_decompositions(f1, f2, l)?;
    if start >= dec1.count() {
        return Err(QuenchError::BadSector {
            sector: start,
            count: dec1.count(),
        });
    }
    let b21 = BranchingMatrix::from_decompositions(&dec2, &dec1)?;
    let transition = b12.compose(&b21)?;
    let mut after = vec![Rat::zero(); dec1.count()];
    after[start] = Rat::one();
    for _ in 0..switches {
        after = transition.apply_to_masses(&after);
    }
    let mut fixed_point = None;
    let mut probe = after.clone();
    for _ in 0..=FIXED_POINT_CAP {
        let next = transition.apply_to_masses(&probe);
        if next == probe {
            fixed_point = Some(probe);
            break;
        }
        probe = next;
    }
    Ok(OscillationResult {
        transition,
        after,
        fixed_point,
        switches,
    })
}

/// One stage of a schedule: install the twist, then either relax fully or
/// run the clock for a fixed span.
#[derive(Debug, Clone, PartialEq)]
pub enum QuenchMode {
    UntilStationary,
    Duration(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchStep {
    pub twist: Permutation,
    pub mode: QuenchMode,
}

/// Where the schedule starts: a single configuration, or uniform on one
/// sector of the first step's twist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuenchStart {
    Configuration(usize),
    SectorOfFirstTwist(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchSchedule {
    pub n: usize,
    pub l: usize,
    pub start: QuenchStart,
    pub steps: Vec<QuenchStep>,
}

/// Distribution data that stays exact as long as only full relaxations are
/// requested; any fixed-duration step drops to floats.
#[derive(Debug, Clone, PartialEq)]
pub enum MassVector {
    Exact(Vec<Rat>),
    Float(Vec<f64>),
}

impl MassVector {
    pub fn len(&self) -> usize {
        match self {
            MassVector::Exact(v) => v.len(),
            MassVector::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MassVector::Exact(_))
    }

    pub fn to_floats(&self) -> Vec<f64> {
        match self {
            MassVector::Exact(v) => v.iter().map(rat::to_f64).collect(),
            MassVector::Float(v) => v.clone(),
        }
    }
}

/// Per-step record: the twist in force and the mass on each of its sectors.
#[derive(Debug, Clone)]
pub struct QuenchStepOutcome {
    pub twist: Permutation,
    pub mode: QuenchMode,
    pub sector_masses: MassVector,
}

#[derive(Debug, Clone)]
pub struct QuenchRun {
    pub outcomes: Vec<QuenchStepOutcome>,
    pub final_state: MassVector,
}

impl QuenchSchedule {
    pub fn new(
        n: usize,
        l: usize,
        start: QuenchStart,
        steps: Vec<QuenchStep>,
    ) -> Result<Self, QuenchError> {
        if steps.is_empty() {
            return Err(QuenchError::EmptySchedule);
        }
        for step in &steps {
            if step.twist.n() != n {
                return Err(QuenchError::AlphabetMismatch {
                    left: n,
                    right: step.twist.n(),
                });
            }
        }
        Ok(QuenchSchedule { n, l, start, steps })
    }

    /// Executes the schedule, recording sector masses after every step.
    /// `tol` bounds the per-step error of fixed-duration evolutions.
    pub fn run(&self, tol: f64) -> Result<QuenchRun, QuenchError> {
        let models: Vec<MarkovModel> = self
            .steps
            .iter()
            .map(|s| MarkovModel::twisted_ssep(self.n, self.l, &s.twist))
            .collect::<Result<_, _>>()?;
        let decs: Vec<SectorDecomposition> =
            models.iter().map(SectorDecomposition::from_model).collect();
        let dim = models[0].state_count();

        let mut state = match self.start {
            QuenchStart::Configuration(c) => {
                if c >= dim {
                    return Err(QuenchError::BadConfiguration { config: c, dim });
                }
                let mut v = vec![Rat::zero(); dim];
                v[c] = Rat::one();
                MassVector::Exact(v)
            }
            QuenchStart::SectorOfFirstTwist(s) => {
                let dec = &decs[0];
                if s >= dec.count() {
                    return Err(QuenchError::BadSector {
                        sector: s,
                        count: dec.count(),
                    });
                }
                MassVector::Exact(crate::sector::stationary_state(dim, dec.members(s)))
            }
        };

        let mut outcomes = Vec::with_capacity(self.steps.len());
        for (step, (model, dec)) in self.steps.iter().zip(models.iter().zip(&decs)) {
            state = match (&step.mode, state) {
                (QuenchMode::UntilStationary, MassVector::Exact(v)) => {
                    MassVector::Exact(long_time_limit(dec, &v))
                }
                (QuenchMode::UntilStationary, MassVector::Float(v)) => {
                    MassVector::Float(long_time_limit_f64(dec, &v))
                }
                (QuenchMode::Duration(t), MassVector::Exact(v)) => {
                    let floats: Vec<f64> = v.iter().map(rat::to_f64).collect();
                    MassVector::Float(evolve(model.generator(), &floats, *t, tol)?)
                }
                (QuenchMode::Duration(t), MassVector::Float(v)) => {
                    MassVector::Float(evolve(model.generator(), &v, *t, tol)?)
                }
            };
            let sector_masses = match &state {
                MassVector::Exact(v) => MassVector::Exact(
                    (0..dec.count())
                        .map(|s| dec.members(s).iter().map(|&x| v[x].clone()).sum())
                        .collect(),
                ),
                MassVector::Float(v) => MassVector::Float(
                    (0..dec.count())
                        .map(|s| dec.members(s).iter().map(|&x| v[x]).sum())
                        .collect(),
                ),
            };
            outcomes.push(QuenchStepOutcome {
                twist: step.twist.clone(),
                mode: step.mode.clone(),
                sector_masses,
            });
        }
        Ok(QuenchRun {
            outcomes,
            final_state: state,
        })
    }
}
