//! End-to-end reproduction suite: every headline identity and number the
//! library implements, run with frozen expected values and pass/fail
//! reporting. The command-line `repro` subcommand and the acceptance tests
//! both execute this table, so there is exactly one source of truth for
//! what "working" means.

use std::fmt;
use std::time::Instant;

use num::bigint::BigUint;
use num::{One, Zero};
use rayon::prelude::*;

use crate::dynamics::{check_currents_vanish, evolve, long_time_limit};
use crate::markov::{
    check_conjugation_identity, check_hamiltonian_extraction, check_transfer_commutation,
    commutation_grid, encode_config, MarkovModel,
};
use crate::perm::Permutation;
use crate::quench::{
    branching_with_decompositions, closed_form_branching_fullcycle_square,
    closed_form_branching_power,
};
use crate::rat::{self, Rat};
use crate::sector::{
    count_sectors, count_sectors_equal_cycles, sector_labels, ssep_sector_count,
    stationary_state, verify_sector_theory, SectorDecomposition,
};
use crate::twosite::{
    check_braided_ybe, check_involutive, check_spectral_ybe, counterexample_family,
    spectral_grid, TwoSiteMap,
};

/// One named check: what was expected, what came out, and whether they agree.
#[derive(Debug, Clone)]
pub struct ReproCheck {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ReproReport {
    pub checks: Vec<ReproCheck>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReproCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn run<F>(&mut self, name: &str, expected: impl Into<String>, body: F)
    where
        F: FnOnce() -> (String, bool),
    {
        let start = Instant::now();
        let (computed, passed) = body();
        self.checks.push(ReproCheck {
            name: name.to_string(),
            expected: expected.into(),
            computed,
            passed,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
}

impl fmt::Display for ReproReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            let status = if check.passed { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "[{}] {:<32} expected {} | computed {} ({:.2} s)",
                status, check.name, check.expected, check.computed, check.seconds
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "{} checks, {} failed",
            self.checks.len(),
            failed
        )
    }
}

fn count_failures(reports: Vec<Result<crate::CheckReport, String>>) -> (usize, Vec<String>) {
    let mut failures = 0;
    let mut notes = Vec::new();
    for report in reports {
        match report {
            Ok(r) if r.passed() => {}
            Ok(r) => {
                failures += r.failures;
                notes.extend(r.violations.iter().take(1).cloned());
            }
            Err(e) => {
                failures += 1;
                notes.push(e);
            }
        }
    }
    (failures, notes)
}

fn violations_line(maps: usize, failures: usize, notes: &[String]) -> String {
    if failures == 0 {
        format!("{} cases, 0 violations", maps)
    } else {
        format!(
            "{} cases, {} violations (first: {})",
            maps,
            failures,
            notes.first().map(String::as_str).unwrap_or("?")
        )
    }
}

/// Runs the whole table. Failures never abort the suite; each check records
/// its own outcome.
pub fn run_repro_suite() -> ReproReport {
    let mut report = ReproReport::default();
    let three_cycle = Permutation::parse("(0 1 2)", 3).expect("literal");
    let transposition = Permutation::parse("(0 1)", 2).expect("literal");

    // involutivity and the braided identity for every solution on small
    // alphabets
    report.run("yang-baxter-exhaustive", "32 cases, 0 violations", || {
        let maps: Vec<TwoSiteMap> = (2..=4)
            .flat_map(Permutation::all)
            .map(|g| TwoSiteMap::lyubashenko(&g))
            .collect();
        let total = maps.len();
        let reports: Vec<Result<crate::CheckReport, String>> = maps
            .par_iter()
            .flat_map_iter(|m| [Ok(check_involutive(m)), Ok(check_braided_ybe(m))])
            .collect();
        let (failures, notes) = count_failures(reports);
        (violations_line(total, failures, &notes), failures == 0)
    });

    // the spectral identity on the rational grid, for the three-letter cycle
    report.run("spectral-grid", "16 cases, 0 violations", || {
        let map = TwoSiteMap::lyubashenko(&three_cycle);
        let grid = spectral_grid();
        let mut pairs = Vec::new();
        for u in &grid {
            for v in &grid {
                pairs.push((u.clone(), v.clone()));
            }
        }
        let total = pairs.len();
        let reports: Vec<Result<crate::CheckReport, String>> = pairs
            .par_iter()
            .map(|(u, v)| check_spectral_ybe(&map, u, v).map_err(|e| e.to_string()))
            .collect();
        let (failures, notes) = count_failures(reports);
        (violations_line(total, failures, &notes), failures == 0)
    });

    // transfer matrices commute pairwise on the certifying grid
    report.run("transfer-commutation", "2 cases, 0 violations", || {
        let map = TwoSiteMap::lyubashenko(&three_cycle);
        let reports: Vec<Result<crate::CheckReport, String>> = [2usize, 3]
            .par_iter()
            .map(|&l| {
                check_transfer_commutation(&map, l, None, &commutation_grid(l))
                    .map_err(|e| e.to_string())
            })
            .collect();
        let (failures, notes) = count_failures(reports);
        (violations_line(2, failures, &notes), failures == 0)
    });

    // the generator is recovered from the transfer matrix exactly
    report.run("hamiltonian-extraction", "3 cases, 0 violations", || {
        let cases: Vec<(TwoSiteMap, usize, Option<Permutation>)> = vec![
            (TwoSiteMap::swap(2), 3, None),
            (TwoSiteMap::lyubashenko(&three_cycle), 3, None),
            (TwoSiteMap::swap(2), 3, Some(transposition.clone())),
        ];
        let reports: Vec<Result<crate::CheckReport, String>> = cases
            .par_iter()
            .map(|(map, l, twist)| {
                check_hamiltonian_extraction(map, *l, twist.as_ref())
                    .map_err(|e| e.to_string())
            })
            .collect();
        let (failures, notes) = count_failures(reports);
        (violations_line(3, failures, &notes), failures == 0)
    });

    // orbit enumeration, closed-form count, cardinalities, and the
    // label partition agree on every small twist
    report.run("sector-theory-exhaustive", "72 cases, 0 violations", || {
        let mut cases: Vec<(Permutation, usize)> = Vec::new();
        for f in Permutation::all(3) {
            for l in 2..=5 {
                cases.push((f.clone(), l));
            }
        }
        for f in Permutation::all(4) {
            for l in 2..=3 {
                cases.push((f.clone(), l));
            }
        }
        let total = cases.len();
        let reports: Vec<Result<crate::CheckReport, String>> = cases
            .par_iter()
            .map(|(f, l)| verify_sector_theory(f, *l).map_err(|e| e.to_string()))
            .collect();
        let (failures, notes) = count_failures(reports);
        (violations_line(total, failures, &notes), failures == 0)
    });

    // published sector counts at three letters and three sites
    report.run("published-sector-counts", "(10, 5, 3, 7)", || {
        let twisted = |f: &Permutation| count_sectors(f, 3).map(|c| c.to_string());
        let id_count = twisted(&Permutation::identity(3));
        let pair_count = twisted(&Permutation::parse("(0 1)", 3).expect("literal"));
        let cycle_count = twisted(&three_cycle);
        let family_count = MarkovModel::from_family(&counterexample_family(), 3)
            .map(|m| SectorDecomposition::from_model(&m).count().to_string());
        let line = format!(
            "({}, {}, {}, {})",
            id_count.as_deref().unwrap_or("err"),
            pair_count.as_deref().unwrap_or("err"),
            cycle_count.as_deref().unwrap_or("err"),
            family_count.as_deref().unwrap_or("err"),
        );
        (line.clone(), line == "(10, 5, 3, 7)")
    });

    // the family model's kernel dimension equals its sector count and
    // differs from every twisted count, so no twist reproduces it
    report.run("family-kernel-dimension", "7, not in {10, 5, 3}", || {
        match MarkovModel::from_family(&counterexample_family(), 3) {
            Ok(model) => {
                let dim = model.generator().to_matrix().kernel_dimension();
                let distinct = ![10usize, 5, 3].contains(&dim);
                let line = if distinct {
                    format!("{}, not in {{10, 5, 3}}", dim)
                } else {
                    format!("{}, collides with a twisted count", dim)
                };
                (line, dim == 7 && distinct)
            }
            Err(e) => (e.to_string(), false),
        }
    });

    // site-wise conjugation turns the set-theoretical model into the
    // twisted exclusion process
    report.run("conjugation-identity", "12 cases, 0 violations", || {
        let cases: Vec<(Permutation, usize)> = Permutation::all(3)
            .into_iter()
            .flat_map(|g| [(g.clone(), 2), (g, 3)])
            .collect();
        let total = cases.len();
        let reports: Vec<Result<crate::CheckReport, String>> = cases
            .par_iter()
            .map(|(g, l)| check_conjugation_identity(g, *l).map_err(|e| e.to_string()))
            .collect();
        let (failures, notes) = count_failures(reports);
        (violations_line(total, failures, &notes), failures == 0)
    });

    // quench from the four-cycle into its square: every branching entry
    // matches the two-species closed form and rows are stochastic
    report.run("branching-square-closed-form", "32 entries, 0 mismatches", || {
        branching_closed_form_case(4, 2, 3)
    });

    // quench from the six-cycle into its cube: three species of length two
    report.run("branching-power-closed-form", "192 entries, 0 mismatches", || {
        let (line2, ok2) = branching_closed_form_case(6, 3, 2);
        let (line3, ok3) = branching_closed_form_case(6, 3, 3);
        if ok2 && ok3 {
            let total = leading_count(&line2) + leading_count(&line3);
            (format!("{} entries, 0 mismatches", total), true)
        } else if !ok2 {
            (line2, false)
        } else {
            (line3, false)
        }
    });

    // uniform sector states are exact kernel vectors with zero currents
    report.run("stationary-states-exact", "12 cases, 0 violations", || {
        let cases: Vec<(Permutation, usize)> = Permutation::all(3)
            .into_iter()
            .flat_map(|f| [(f.clone(), 2), (f, 3)])
            .collect();
        let total = cases.len();
        let reports: Vec<Result<crate::CheckReport, String>> = cases
            .par_iter()
            .map(|(f, l)| {
                let model =
                    MarkovModel::twisted_ssep(3, *l, f).map_err(|e| e.to_string())?;
                let dec = SectorDecomposition::from_model(&model);
                let mut combined = crate::CheckReport::new("kernel and currents");
                for s in 0..dec.count() {
                    let v = stationary_state(dec.state_count(), dec.members(s));
                    combined.absorb(crate::sector::check_stationary(model.generator(), &v));
                    combined.absorb(check_currents_vanish(model.generator(), &v));
                }
                Ok(combined)
            })
            .collect();
        let (failures, notes) = count_failures(reports);
        (violations_line(total, failures, &notes), failures == 0)
    });

    // a point mass relaxes onto the uniform state of its sector, which is
    // exactly the branching mixture of the untwisted start
    report.run("relaxation-to-sector-uniform", "TV <= 1e-8 at t = 100", || {
        relaxation_case(&transposition)
    });

    // equal-cycle counts over the divisor lattice: strictly increasing,
    // full cycle at the bottom, untwisted at the top
    report.run(
        "equal-cycle-extremes",
        "(12, 30, 60, 105, 252, 1365) strictly increasing",
        || {
            let divisors = [1usize, 2, 3, 4, 6, 12];
            let counts: Result<Vec<BigUint>, _> = divisors
                .iter()
                .map(|&d| count_sectors_equal_cycles(12, d, 4))
                .collect();
            match counts {
                Ok(counts) => {
                    let increasing = counts.windows(2).all(|w| w[0] < w[1]);
                    let min_is_n = counts.first() == Some(&BigUint::from(12u32));
                    let max_is_ssep = ssep_sector_count(12, 4)
                        .map(|c| Some(&c) == counts.last())
                        .unwrap_or(false);
                    let shown: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
                    let line = format!(
                        "({}) {}",
                        shown.join(", "),
                        if increasing { "strictly increasing" } else { "not increasing" }
                    );
                    (line, increasing && min_is_n && max_is_ssep)
                }
                Err(e) => (e.to_string(), false),
            }
        },
    );

    // spot value for one equal-cycle count away from the extremes
    report.run("equal-cycle-spot-count", "8", || {
        match count_sectors_equal_cycles(4, 2, 3) {
            Ok(c) => (c.to_string(), c == BigUint::from(8u32)),
            Err(e) => (e.to_string(), false),
        }
    });

    report
}

fn leading_count(line: &str) -> usize {
    line.split_whitespace()
        .next()
        .and_then(|w| w.parse().ok())
        .unwrap_or(0)
}

/// Compares every branching entry of the quench (full N-cycle) -> (its
/// (N/d)-th power) against the closed form; `d` is the target cycle length.
fn branching_closed_form_case(n: usize, m: usize, l: usize) -> (String, bool) {
    if m == 0 || !n.is_multiple_of(m) {
        return (format!("{} is not a divisor of {}", m, n), false);
    }
    let f1 = Permutation::full_cycle(n);
    let f2 = f1.power(m as i64);
    let d = n / m;
    let (dec1, dec2, b) = match branching_with_decompositions(&f1, &f2, l) {
        Ok(parts) => parts,
        Err(e) => return (e.to_string(), false),
    };
    let labels1 = sector_labels(&f1, l, &dec1);
    let labels2 = sector_labels(&f2, l, &dec2);
    let mut entries = 0usize;
    let mut mismatches = 0usize;
    let mut first = String::new();
    for (i, l1) in labels1.iter().enumerate() {
        let mut row_sum = Rat::zero();
        for (j, l2) in labels2.iter().enumerate() {
            entries += 1;
            let closed = if m == 2 {
                closed_form_branching_fullcycle_square(
                    n,
                    l,
                    l1.charge,
                    l2.profile[0],
                    l2.profile[1],
                    l2.charge,
                )
            } else {
                closed_form_branching_power(n, d, l, l1.charge, &l2.profile, l2.charge)
            };
            let exact = b.probability(i, j);
            row_sum += exact;
            match closed {
                Ok(value) if value == *exact => {}
                Ok(value) => {
                    mismatches += 1;
                    if first.is_empty() {
                        first = format!(
                            "entry ({}, {}): closed form {} vs exact {}",
                            i,
                            j,
                            rat::display(&value),
                            rat::display(exact)
                        );
                    }
                }
                Err(e) => {
                    mismatches += 1;
                    if first.is_empty() {
                        first = e.to_string();
                    }
                }
            }
        }
        if row_sum != Rat::one() {
            mismatches += 1;
            if first.is_empty() {
                first = format!("row {} sums to {}", i, rat::display(&row_sum));
            }
        }
    }
    if mismatches == 0 {
        (format!("{} entries, 0 mismatches", entries), true)
    } else {
        (
            format!("{} entries, {} mismatches (first: {})", entries, mismatches, first),
            false,
        )
    }
}

/// The relaxation story on the smallest twisted chain: evolve a point mass
/// to t = 100 and compare with the exact sector projection, which itself is
/// the branching mixture of the untwisted start.
fn relaxation_case(twist: &Permutation) -> (String, bool) {
    let model = match MarkovModel::twisted_ssep(2, 2, twist) {
        Ok(m) => m,
        Err(e) => return (e.to_string(), false),
    };
    let dec = SectorDecomposition::from_model(&model);
    let dim = model.state_count();
    let start = encode_config(&[0, 0], 2);
    let mut point = vec![Rat::zero(); dim];
    point[start] = Rat::one();

    // exact projection = branching mixture from the untwisted singleton {00}
    let limit = long_time_limit(&dec, &point);
    let untwisted = match MarkovModel::twisted_ssep(2, 2, &Permutation::identity(2)) {
        Ok(m) => SectorDecomposition::from_model(&m),
        Err(e) => return (e.to_string(), false),
    };
    let b = match crate::quench::BranchingMatrix::from_decompositions(&untwisted, &dec) {
        Ok(b) => b,
        Err(e) => return (e.to_string(), false),
    };
    let source = untwisted.sector_of(start);
    let mut mixture = vec![Rat::zero(); dim];
    for (j, p) in b.row(source).iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        for (x, w) in stationary_state(dim, dec.members(j)).iter().enumerate() {
            mixture[x] += p * w;
        }
    }
    if mixture != limit {
        return ("projection differs from branching mixture".to_string(), false);
    }

    let floats: Vec<f64> = point.iter().map(rat::to_f64).collect();
    let evolved = match evolve(model.generator(), &floats, 100.0, 1e-12) {
        Ok(v) => v,
        Err(e) => return (e.to_string(), false),
    };
    let tv: f64 = evolved
        .iter()
        .zip(limit.iter().map(rat::to_f64))
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0;
    (
        format!("mixture exact, TV = {:.2e} at t = 100", tv),
        tv <= 1e-8,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    // the full suite also backs the acceptance tests; here only shape and
    // plumbing are exercised to keep unit runs fast
    #[test]
    fn report_accumulates_and_formats() {
        let mut report = ReproReport::default();
        report.run("always-passes", "42", || ("42".to_string(), true));
        report.run("always-fails", "0", || ("1".to_string(), false));
        assert!(!report.passed());
        assert_eq!(report.failures().count(), 1);
        let text = report.to_string();
        assert!(text.contains("[PASS] always-passes"), "{}", text);
        assert!(text.contains("[FAIL] always-fails"), "{}", text);
        assert!(text.contains("2 checks, 1 failed"), "{}", text);
    }

    #[test]
    fn branching_case_rejects_non_divisor_powers() {
        // the species bookkeeping only applies when the power divides the
        // alphabet size
        let (line, ok) = branching_closed_form_case(3, 2, 2);
        assert!(!ok, "{}", line);
        assert!(line.contains("not a divisor"), "{}", line);
    }

    #[test]
    fn relaxation_case_passes_on_the_reference_model() {
        let twist = Permutation::parse("(0 1)", 2).unwrap();
        let (line, ok) = relaxation_case(&twist);
        assert!(ok, "{}", line);
    }

    #[test]
    fn spot_counts_run_quickly() {
        let (line, ok) = branching_closed_form_case(4, 2, 3);
        assert!(ok, "{}", line);
        assert!(line.starts_with("32 entries"), "{}", line);
    }

    #[test]
    fn frozen_expectations_match_computed_lines() {
        // a passing check must print the frozen value verbatim, except for
        // measured quantities where the expectation states a bound
        let suite = run_repro_suite();
        assert!(suite.passed(), "{}", suite);
        for check in &suite.checks {
            if check.expected.contains("<=") {
                continue;
            }
            assert_eq!(
                check.computed, check.expected,
                "check {} passed but its frozen expectation drifted",
                check.name
            );
        }
    }
}
