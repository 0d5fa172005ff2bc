//! Time evolution under the master equation and stochastic sampling.
//!
//! Deterministic evolution uses uniformization: e^{tM} is expanded as a
//! Poisson mixture of powers of the stochastic matrix P = I + M/λ with
//! λ = (max exit rate) + 1. Every term is nonnegative, so probabilities stay
//! nonnegative exactly; truncation error is controlled by the Poisson tail
//! and the result is renormalized. Long-time limits are never obtained by
//! stepping: sectors are invariant, so the limit is the exact projection
//! that spreads each sector's mass uniformly.
//!
//! Trajectories come from kinetic Monte Carlo over the bond moves, driven by
//! ChaCha8 so runs are reproducible across platforms from (seed, stream).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::markov::{MarkovModel, RateMatrix};
use crate::rat::{self, Rat};
use crate::report::CheckReport;
use crate::sector::SectorDecomposition;
use num::Zero;

/// Largest λ·Δt handled in one Poisson series; longer spans are split so
/// e^{-λΔt} stays representable and series lengths stay short.
const MAX_SERIES_EXPONENT: f64 = 64.0;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("time must be finite and nonnegative, got {t}")]
    BadTime { t: f64 },
    #[error("tolerance must be a positive finite number, got {tol}")]
    BadTolerance { tol: f64 },
    #[error("vector has length {got}, the generator acts on {expected} states")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("configuration {config} is outside the {dim}-state space")]
    BadConfiguration { config: usize, dim: usize },
    #[error("no convergence after doubling the horizon {attempts} times")]
    NoConvergence { attempts: usize },
}

/// Sparse float view of a generator column: (target, rate) plus exit rate.
struct FloatColumns {
    dim: usize,
    moves: Vec<Vec<(usize, f64)>>,
    exit: Vec<f64>,
}

impl FloatColumns {
    fn new(gen: &RateMatrix) -> Self {
        let dim = gen.dim();
        let mut moves = Vec::with_capacity(dim);
        let mut exit = Vec::with_capacity(dim);
        for c in 0..dim {
            let col: Vec<(usize, f64)> = gen
                .moves_from(c)
                .iter()
                .map(|(r, w)| (*r, rat::to_f64(w)))
                .collect();
            exit.push(col.iter().map(|(_, w)| w).sum());
            moves.push(col);
        }
        FloatColumns { dim, moves, exit }
    }

    /// Applies P = I + M/λ.
    fn apply_uniformized(&self, lambda: f64, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for c in 0..self.dim {
            if v[c] == 0.0 {
                continue;
            }
            out[c] += (1.0 - self.exit[c] / lambda) * v[c];
            for &(r, w) in &self.moves[c] {
                out[r] += w / lambda * v[c];
            }
        }
        out
    }
}

fn poisson_step(cols: &FloatColumns, lambda: f64, dt: f64, tol: f64, p: Vec<f64>) -> Vec<f64> {
    let x = lambda * dt;
    if x == 0.0 {
        return p;
    }
    let mut term = p;
    let mut weight = (-x).exp();
    let mut covered = weight;
    let mut out: Vec<f64> = term.iter().map(|v| v * weight).collect();
    let mut k = 0usize;
    while 1.0 - covered > tol {
        k += 1;
        term = cols.apply_uniformized(lambda, &term);
        weight *= x / k as f64;
        covered += weight;
        for (o, t) in out.iter_mut().zip(&term) {
            *o += weight * t;
        }
        // x ≤ 64 makes the tail collapse well before this
        debug_assert!(k < 4096, "Poisson series failed to converge");
    }
    // renormalize away the truncated tail
    for o in out.iter_mut() {
        *o /= covered;
    }
    out
}

/// e^{tM}·p0 by uniformization, with total-variation error at most `tol`.
pub fn evolve(
    gen: &RateMatrix,
    p0: &[f64],
    t: f64,
    tol: f64,
) -> Result<Vec<f64>, DynamicsError> {
    if !t.is_finite() || t < 0.0 {
        return Err(DynamicsError::BadTime { t });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(DynamicsError::BadTolerance { tol });
    }
    if p0.len() != gen.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: gen.dim(),
            got: p0.len(),
        });
    }
    let cols = FloatColumns::new(gen);
    let lambda = rat::to_f64(&gen.max_exit_rate()) + 1.0;
    let chunks = ((lambda * t) / MAX_SERIES_EXPONENT).ceil().max(1.0) as usize;
    let dt = t / chunks as f64;
    let chunk_tol = tol / chunks as f64;
    let mut p = p0.to_vec();
    for _ in 0..chunks {
        p = poisson_step(&cols, lambda, dt, chunk_tol, p);
    }
    Ok(p)
}

/// Exact t → ∞ limit: each sector is invariant and relaxes to the uniform
/// state, so the limit redistributes every sector's mass uniformly.
pub fn long_time_limit(dec: &SectorDecomposition, p0: &[Rat]) -> Vec<Rat> {
    assert_eq!(p0.len(), dec.state_count());
    let mut out = vec![Rat::zero(); p0.len()];
    for s in 0..dec.count() {
        let members = dec.members(s);
        let mass: Rat = members.iter().map(|&x| p0[x].clone()).sum();
        let share = mass / rat::int(members.len() as i64);
        for &x in members {
            out[x] = share.clone();
        }
    }
    out
}

/// Float variant of [`long_time_limit`] for comparing against `evolve`.
pub fn long_time_limit_f64(dec: &SectorDecomposition, p0: &[f64]) -> Vec<f64> {
    assert_eq!(p0.len(), dec.state_count());
    let mut out = vec![0.0; p0.len()];
    for s in 0..dec.count() {
        let members = dec.members(s);
        let mass: f64 = members.iter().map(|&x| p0[x]).sum();
        let share = mass / members.len() as f64;
        for &x in members {
            out[x] = share;
        }
    }
    out
}

/// Evolves with a doubling horizon until two successive outputs agree in
/// sup norm within `tol`; returns the distribution and the horizon reached.
pub fn evolve_until_stationary(
    gen: &RateMatrix,
    p0: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, f64), DynamicsError> {
    const MAX_DOUBLINGS: usize = 48;
    let mut t = 1.0;
    let mut prev = evolve(gen, p0, t, tol)?;
    for _ in 0..MAX_DOUBLINGS {
        // p(2t) continues from p(t), so each pass costs one more unit span
        let next = evolve(gen, &prev, t, tol)?;
        t *= 2.0;
        let gap = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if gap < tol {
            return Ok((next, t));
        }
        prev = next;
    }
    Err(DynamicsError::NoConvergence {
        attempts: MAX_DOUBLINGS,
    })
}

/// Verifies that every microscopic current vanishes on a state: for each
/// pair of configurations, rate(x→y)·v[x] equals rate(y→x)·v[y] exactly.
pub fn check_currents_vanish(gen: &RateMatrix, v: &[Rat]) -> CheckReport {
    let mut report = CheckReport::new("microscopic currents vanish");
    for x in 0..gen.dim() {
        for (y, w) in gen.moves_from(x) {
            let forward = w * &v[x];
            let backward = gen.rate(x, *y) * &v[*y];
            report.record(forward == backward, || {
                format!(
                    "current on {} -> {}: {} vs {}",
                    x,
                    y,
                    rat::display(&forward),
                    rat::display(&backward)
                )
            });
        }
    }
    report
}

/// One jump of the embedded chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEvent {
    pub time: f64,
    pub bond: usize,
    pub from: usize,
    pub to: usize,
}

/// A sampled continuous-time path, reproducible from (seed, stream).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub stream: u64,
    pub start: usize,
    pub t_max: f64,
    pub events: Vec<TrajectoryEvent>,
}

impl Trajectory {
    /// Configuration occupied at time `t` (the path is right-continuous).
    pub fn state_at(&self, t: f64) -> usize {
        self.events
            .iter()
            .take_while(|e| e.time <= t)
            .last()
            .map_or(self.start, |e| e.to)
    }

    pub fn final_state(&self) -> usize {
        self.events.last().map_or(self.start, |e| e.to)
    }
}

/// Kinetic Monte Carlo realization of the chain up to `t_max`. Every active
/// bond fires at rate 1, so holding times are exponential with rate equal to
/// the number of active bonds and the firing bond is uniform among them.
/// The `stream` selects an independent substream of the same seed, which is
/// how trajectory batches are parallelized deterministically.
pub fn sample_trajectory(
    model: &MarkovModel,
    c0: usize,
    t_max: f64,
    seed: u64,
    stream: u64,
) -> Result<Trajectory, DynamicsError> {
    if !t_max.is_finite() || t_max < 0.0 {
        return Err(DynamicsError::BadTime { t: t_max });
    }
    let dim = model.state_count();
    if c0 >= dim {
        return Err(DynamicsError::BadConfiguration { config: c0, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut events = Vec::new();
    let mut state = c0;
    let mut now = 0.0;
    loop {
        let active = model.active_bonds(state);
        if active.is_empty() {
            break;
        }
        let rate = active.len() as f64;
        let wait = loop {
            // 1 - u is in (0, 1], and a zero-length wait would break the
            // strict ordering of event times
            let u: f64 = rng.gen();
            let w = -(1.0 - u).ln() / rate;
            if w > 0.0 {
                break w;
            }
        };
        now += wait;
        if now > t_max {
            break;
        }
        let (bond, target) = active[rng.gen_range(0..active.len())];
        events.push(TrajectoryEvent {
            time: now,
            bond,
            from: state,
            to: target,
        });
        state = target;
    }
    Ok(Trajectory {
        seed,
        stream,
        start: c0,
        t_max,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::encode_config;
    use crate::perm::Permutation;
    use crate::rat::int;
    use crate::sector::stationary_state;

    fn two_state_hopper() -> RateMatrix {
        RateMatrix::from_moves(2, vec![(0, 1, int(1)), (1, 0, int(1))])
    }

    fn twisted_pair_model() -> MarkovModel {
        let f = Permutation::parse("(0 1)", 2).unwrap();
        MarkovModel::twisted_ssep(2, 2, &f).unwrap()
    }

    #[test]
    fn evolve_at_time_zero_is_identity() {
        let gen = two_state_hopper();
        let p = evolve(&gen, &[0.25, 0.75], 0.0, 1e-12).unwrap();
        assert_eq!(p, vec![0.25, 0.75]);
    }

    #[test]
    fn evolve_matches_the_analytic_two_state_solution() {
        // M = [[-1, 1], [1, -1]]: p0(t) = 1/2 + (p0(0) - 1/2) e^{-2t}
        let gen = two_state_hopper();
        for &t in &[0.3, 1.7, 5.0] {
            let p = evolve(&gen, &[1.0, 0.0], t, 1e-14).unwrap();
            let expected = 0.5 + 0.5 * (-2.0 * t).exp();
            assert!((p[0] - expected).abs() < 1e-12, "t = {}: {} vs {}", t, p[0], expected);
            assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn evolve_long_horizon_uses_chunked_series() {
        // lambda * t = 3 * 300 well above one series span
        let gen = two_state_hopper();
        let p = evolve(&gen, &[1.0, 0.0], 300.0, 1e-12).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn evolve_rejects_bad_parameters() {
        let gen = two_state_hopper();
        assert!(matches!(
            evolve(&gen, &[1.0, 0.0], f64::NAN, 1e-9),
            Err(DynamicsError::BadTime { .. })
        ));
        assert!(matches!(
            evolve(&gen, &[1.0, 0.0], -1.0, 1e-9),
            Err(DynamicsError::BadTime { .. })
        ));
        assert!(matches!(
            evolve(&gen, &[1.0, 0.0], 1.0, 0.0),
            Err(DynamicsError::BadTolerance { .. })
        ));
        assert!(matches!(
            evolve(&gen, &[1.0], 1.0, 1e-9),
            Err(DynamicsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn stationary_states_are_fixed_points() {
        let model = twisted_pair_model();
        let dec = SectorDecomposition::from_model(&model);
        for s in 0..dec.count() {
            let exact = stationary_state(model.state_count(), dec.members(s));
            let p0: Vec<f64> = exact.iter().map(rat::to_f64).collect();
            let p = evolve(model.generator(), &p0, 7.5, 1e-12).unwrap();
            for (a, b) in p.iter().zip(&p0) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn point_mass_relaxes_to_uniform_on_its_sector() {
        let model = twisted_pair_model();
        let mut p0 = vec![0.0; 4];
        p0[encode_config(&[0, 0], 2)] = 1.0;
        let p = evolve(model.generator(), &p0, 50.0, 1e-12).unwrap();
        let expected = [0.5, 0.0, 0.0, 0.5];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-8, "{:?}", p);
        }
    }

    #[test]
    fn sector_masses_are_conserved() {
        let model = twisted_pair_model();
        let dec = SectorDecomposition::from_model(&model);
        let p0 = vec![0.4, 0.1, 0.2, 0.3];
        let p = evolve(model.generator(), &p0, 2.3, 1e-12).unwrap();
        for s in 0..dec.count() {
            let before: f64 = dec.members(s).iter().map(|&x| p0[x]).sum();
            let after: f64 = dec.members(s).iter().map(|&x| p[x]).sum();
            assert!((before - after).abs() < 1e-11);
        }
        assert!(p.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn evolve_approaches_the_exact_projection() {
        let model = twisted_pair_model();
        let dec = SectorDecomposition::from_model(&model);
        let p0 = vec![0.4, 0.1, 0.2, 0.3];
        let evolved = evolve(model.generator(), &p0, 100.0, 1e-12).unwrap();
        let limit = long_time_limit_f64(&dec, &p0);
        let tv: f64 = evolved
            .iter()
            .zip(&limit)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 1e-8, "total variation {}", tv);
    }

    #[test]
    fn exact_limit_spreads_sector_mass_uniformly() {
        let model = twisted_pair_model();
        let dec = SectorDecomposition::from_model(&model);
        let mut p0 = vec![Rat::zero(); 4];
        p0[0] = int(1);
        let limit = long_time_limit(&dec, &p0);
        assert_eq!(limit[0], rat::rat(1, 2));
        assert_eq!(limit[3], rat::rat(1, 2));
        assert!(limit[1].is_zero() && limit[2].is_zero());
    }

    #[test]
    fn doubling_heuristic_reaches_the_limit() {
        let model = twisted_pair_model();
        let p0 = vec![1.0, 0.0, 0.0, 0.0];
        let (p, horizon) = evolve_until_stationary(model.generator(), &p0, 1e-10).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-8);
        assert!(horizon >= 2.0);
    }

    #[test]
    fn currents_vanish_exactly_on_stationary_states() {
        let model = MarkovModel::twisted_ssep(3, 3, &Permutation::parse("(0 1 2)", 3).unwrap())
            .unwrap();
        let dec = SectorDecomposition::from_model(&model);
        for s in 0..dec.count() {
            let v = stationary_state(model.state_count(), dec.members(s));
            assert!(check_currents_vanish(model.generator(), &v).passed());
        }
        // a point mass on a non-frozen configuration carries current
        let mut bad = vec![Rat::zero(); model.state_count()];
        bad[encode_config(&[0, 1, 2], 3)] = int(1);
        assert!(!check_currents_vanish(model.generator(), &bad).passed());
    }

    #[test]
    fn trajectories_are_reproducible_and_stream_separated() {
        let model = twisted_pair_model();
        let a = sample_trajectory(&model, 0, 20.0, 7, 0).unwrap();
        let b = sample_trajectory(&model, 0, 20.0, 7, 0).unwrap();
        assert_eq!(a, b);
        let c = sample_trajectory(&model, 0, 20.0, 7, 1).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn trajectory_events_follow_the_generator() {
        let model = twisted_pair_model();
        let traj = sample_trajectory(&model, 0, 50.0, 11, 3).unwrap();
        assert!(!traj.events.is_empty());
        let mut last = 0.0;
        let mut state = traj.start;
        for e in &traj.events {
            assert!(e.time > last && e.time <= traj.t_max);
            assert_eq!(e.from, state);
            assert_eq!(model.apply_bond(e.bond, e.from), e.to);
            assert!(model.generator().rate(e.to, e.from) > Rat::zero());
            last = e.time;
            state = e.to;
        }
    }

    #[test]
    fn isolated_configurations_never_move() {
        // SSEP keeps 00 frozen
        let model = MarkovModel::twisted_ssep(2, 2, &Permutation::identity(2)).unwrap();
        let traj = sample_trajectory(&model, 0, 100.0, 5, 0).unwrap();
        assert!(traj.events.is_empty());
        assert_eq!(traj.state_at(99.0), 0);
    }

    #[test]
    fn trajectories_stay_inside_the_initial_sector() {
        let model = MarkovModel::twisted_ssep(3, 3, &Permutation::parse("(0 1)", 3).unwrap())
            .unwrap();
        let dec = SectorDecomposition::from_model(&model);
        let start = encode_config(&[0, 1, 2], 3);
        let home = dec.sector_of(start);
        for stream in 0..8 {
            let traj = sample_trajectory(&model, start, 30.0, 13, stream).unwrap();
            for e in &traj.events {
                assert_eq!(dec.sector_of(e.to), home);
            }
        }
    }

    #[test]
    fn empirical_occupation_matches_the_stationary_law() {
        // start at 00 under the (0 1)-twisted pair: sector {00, 11}, each
        // configuration carries weight 1/2 in the limit
        let model = twisted_pair_model();
        let trials = 2000;
        let mut hits = 0usize;
        for stream in 0..trials {
            let traj = sample_trajectory(&model, 0, 25.0, 42, stream).unwrap();
            if traj.final_state() == 0 {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        // three binomial standard deviations around 1/2
        let sigma = (0.25 / trials as f64).sqrt();
        assert!(
            (freq - 0.5).abs() < 3.0 * sigma,
            "frequency {} outside 0.5 ± {}",
            freq,
            3.0 * sigma
        );
    }

    #[test]
    fn state_at_walks_the_event_list() {
        let events = vec![
            TrajectoryEvent { time: 1.0, bond: 0, from: 0, to: 2 },
            TrajectoryEvent { time: 3.0, bond: 1, from: 2, to: 1 },
        ];
        let traj = Trajectory { seed: 0, stream: 0, start: 0, t_max: 5.0, events };
        assert_eq!(traj.state_at(0.5), 0);
        assert_eq!(traj.state_at(1.0), 2);
        assert_eq!(traj.state_at(2.9), 2);
        assert_eq!(traj.state_at(4.0), 1);
    }
}
