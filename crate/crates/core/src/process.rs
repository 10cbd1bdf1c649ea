//! The crystallization process: repeated random adjacent swaps of
//! non-short-chord endpoints until every bubble is empty.
//!
//! One step: pick an endpoint `i` of a non-short chord uniformly at
//! random, pick a neighbour `j = i +- 1` (forced at the boundary); if `j`
//! belongs to a short chord the proposal is rejected, otherwise the two
//! endpoints trade positions. Rejected proposals still consume a time
//! step; both the attempt count and the applied-move count are recorded.

use crate::census;
use crate::crystal;
use crate::diagram::{self, count_internal, Diagram};
use crate::error::{Error, Result};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Mutable state of one crystallization run.
#[derive(Debug, Clone)]
pub struct ProcessState {
    partner: Vec<usize>,
    n: usize,
    /// Sorted left endpoints of the current short chords.
    shorts: Vec<usize>,
    /// Chords with both endpoints inside one bubble; zero iff crystallized.
    internal: usize,
    pub step_count: u64,
    pub applied_count: u64,
    rng: ChaCha8Rng,
}

/// Outcome of a single step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveRecord {
    pub i: usize,
    pub j: usize,
    pub applied: bool,
    /// Short chords created by the swap (the process never destroys one:
    /// both moving chords are non-short and nothing else changes).
    pub shorts_created: usize,
}

impl ProcessState {
    pub fn new(diagram: Diagram, rng: ChaCha8Rng) -> Self {
        let partner = diagram.partner_slice().to_vec();
        let shorts = diagram.short_chords();
        let internal = count_internal(&partner, &shorts);
        ProcessState {
            partner,
            n: diagram.n(),
            shorts,
            internal,
            step_count: 0,
            applied_count: 0,
            rng,
        }
    }

    pub fn diagram(&self) -> Diagram {
        Diagram::from_partner(self.partner.clone()).expect("state holds a valid matching")
    }

    pub fn is_crystallized(&self) -> bool {
        self.internal == 0
    }

    pub fn short_chord_count(&self) -> usize {
        self.shorts.len()
    }

    fn is_short_endpoint(&self, v: usize) -> bool {
        self.partner[v].abs_diff(v) == 1
    }

    /// One proposal. Errors if the diagram is already crystallized.
    pub fn step(&mut self) -> Result<MoveRecord> {
        if self.internal == 0 {
            return Err(Error::AlreadyCrystallized);
        }
        let two_n = 2 * self.n;

        // Uniform endpoint of a non-short chord, by rejection from the
        // uniform vertex distribution. At least one internal chord
        // exists, so this terminates.
        let i = loop {
            let v = self.rng.gen_range(1..=two_n);
            if !self.is_short_endpoint(v) {
                break v;
            }
        };

        let j = if i == 1 {
            2
        } else if i == two_n {
            two_n - 1
        } else if self.rng.gen_range(0..2) == 0 {
            i - 1
        } else {
            i + 1
        };

        self.step_count += 1;
        if self.is_short_endpoint(j) {
            return Ok(MoveRecord {
                i,
                j,
                applied: false,
                shorts_created: 0,
            });
        }

        // i and j sit on distinct chords: j on i's own chord would make
        // that chord short.
        let a = self.partner[i];
        let b = self.partner[j];
        debug_assert!(a != j && b != i);
        self.partner[a] = j;
        self.partner[j] = a;
        self.partner[b] = i;
        self.partner[i] = b;
        self.applied_count += 1;

        let created = usize::from(a.abs_diff(j) == 1) + usize::from(b.abs_diff(i) == 1);
        if created > 0 {
            // Bubble boundaries moved; recount. This happens at most n
            // times per run since short chords are never destroyed.
            self.shorts = (1..two_n)
                .filter(|&v| self.partner[v] == v + 1)
                .collect();
            self.internal = count_internal(&self.partner, &self.shorts);
        }
        // Otherwise the short-chord set and every chord's bubble-internal
        // status are unchanged, so `internal` is still correct.

        #[cfg(debug_assertions)]
        {
            let d = self.diagram();
            debug_assert_eq!(self.shorts, d.short_chords());
            debug_assert_eq!(self.internal, d.internal_chords());
        }

        Ok(MoveRecord {
            i,
            j,
            applied: true,
            shorts_created: created,
        })
    }
}

/// Result of running the process to termination or to the step budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Crystallized {
        diagram: Diagram,
        /// Step attempts until the stopping condition held.
        stopping_time: u64,
        applied_moves: u64,
    },
    Timeout {
        diagram: Diagram,
        steps: u64,
    },
}

fn run_with_rng(d: Diagram, rng: ChaCha8Rng, max_steps: u64) -> RunOutcome {
    let mut state = ProcessState::new(d, rng);
    // Stopping is checked before each proposal.
    while !state.is_crystallized() {
        if state.step_count >= max_steps {
            return RunOutcome::Timeout {
                diagram: state.diagram(),
                steps: state.step_count,
            };
        }
        state.step().expect("not crystallized");
    }
    RunOutcome::Crystallized {
        diagram: state.diagram(),
        stopping_time: state.step_count,
        applied_moves: state.applied_count,
    }
}

/// Runs the process on `d` until crystallized, or until `max_steps`
/// attempts have been consumed. Deterministic per seed.
pub fn run_until_crystallized(d: Diagram, seed: u64, max_steps: u64) -> RunOutcome {
    run_with_rng(d, ChaCha8Rng::seed_from_u64(seed), max_steps)
}

/// Aggregated statistics over many independent crystallization runs.
#[derive(Debug, Clone, PartialEq)]
pub struct CrystallizationStats {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub max_steps: u64,
    pub timeouts: u64,
    /// Stopping time of each completed trial, in trial order (timeouts
    /// recorded as `max_steps` and counted separately).
    pub stopping_times: Vec<u64>,
    /// Histogram over the final short-chord count k = 0..=n (index k);
    /// only completed trials contribute.
    pub final_k: Vec<u64>,
    /// Reference distribution proportional to R_{n,k}, k = 1..=n, when
    /// n is within the scalable-count capacity.
    pub reference_k: Option<Vec<f64>>,
    /// Total-variation distance between the empirical final-k histogram
    /// and the reference. Reported only; no pass/fail attaches to it.
    pub tv_distance: Option<f64>,
}

impl CrystallizationStats {
    pub fn mean_stopping_time(&self) -> f64 {
        if self.stopping_times.is_empty() {
            return 0.0;
        }
        self.stopping_times.iter().sum::<u64>() as f64 / self.stopping_times.len() as f64
    }

    pub fn mean_final_k(&self) -> f64 {
        let total: u64 = self.final_k.iter().sum();
        if total == 0 {
            return 0.0;
        }
        self.final_k
            .iter()
            .enumerate()
            .map(|(k, &c)| k as f64 * c as f64)
            .sum::<f64>()
            / total as f64
    }
}

/// Capacity guard for computing the reference R_{n,k} row alongside the
/// simulation.
const REFERENCE_ROW_CAP: usize = 400;

/// Runs `trials` independent crystallization processes, each started from
/// a fresh uniform diagram. Trial t uses RNG stream t of the master seed,
/// so results are identical for any thread count.
pub fn experiment(n: usize, trials: u64, seed: u64, max_steps: u64) -> Result<CrystallizationStats> {
    if trials == 0 {
        return Err(Error::Domain("experiment requires trials >= 1".into()));
    }
    let per_trial: Vec<(u64, Option<usize>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let d = diagram::sample_uniform(n, &mut rng);
            match run_with_rng(d, rng, max_steps) {
                RunOutcome::Crystallized {
                    diagram,
                    stopping_time,
                    ..
                } => (stopping_time, Some(diagram.short_chords().len())),
                RunOutcome::Timeout { steps, .. } => (steps, None),
            }
        })
        .collect();

    let mut final_k = vec![0u64; n + 1];
    let mut stopping_times = Vec::with_capacity(per_trial.len());
    let mut timeouts = 0u64;
    for (time, k) in per_trial {
        stopping_times.push(time);
        match k {
            Some(k) => final_k[k] += 1,
            None => timeouts += 1,
        }
    }

    let (reference_k, tv_distance) = if n <= REFERENCE_ROW_CAP {
        let row = crystal::rnk_row_scalable(n)?;
        let total: f64 = row.iter().map(big_to_f64).sum();
        let reference: Vec<f64> = row.iter().map(|r| big_to_f64(r) / total).collect();
        let completed: u64 = final_k.iter().sum();
        let tv = if completed > 0 {
            0.5 * (1..=n)
                .map(|k| {
                    let emp = final_k[k] as f64 / completed as f64;
                    (emp - reference[k - 1]).abs()
                })
                .sum::<f64>()
            + 0.5 * (final_k[0] as f64 / completed as f64)
        } else {
            1.0
        };
        (Some(reference), Some(tv))
    } else {
        (None, None)
    };

    Ok(CrystallizationStats {
        n,
        trials,
        seed,
        max_steps,
        timeouts,
        stopping_times,
        final_k,
        reference_k,
        tv_distance,
    })
}

fn big_to_f64(x: &num_bigint::BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Exact reference check helper used by tests and the CLI: frequencies of
/// the final k across crystallized diagrams (brute force), for small n.
pub fn reference_distribution_bruteforce(n: usize) -> Result<Vec<f64>> {
    let t = census::count_rnk_bruteforce(n)?;
    let row: Vec<f64> = (1..=n).map(|k| big_to_f64(t.rnk(k))).collect();
    let total: f64 = row.iter().sum();
    Ok(row.into_iter().map(|x| x / total).collect())
}
