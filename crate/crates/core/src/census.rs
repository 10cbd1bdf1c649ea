//! Exact brute-force counting tables over all diagrams, and Monte Carlo
//! estimation where enumeration is infeasible.
//!
//! Every table is aggregated with a map-reduce over the enumeration
//! partitions (one per partner of vertex 1); per-worker accumulators are
//! merged by addition, so the result is independent of scheduling.

use crate::diagram::{self, double_factorial_odd, Diagram};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Which counting table a [`CountTable`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Bubbles of size q with b bridges: q in [1, 2n], b in [0, n-1].
    Nqb,
    /// Diagrams with exactly k short chords: k in [0, n].
    Short,
    /// Crystallized diagrams with k short chords: k in [1, n].
    Rnk,
    /// Bubbles of size q (including the size-0 convention) in
    /// crystallized diagrams with k short chords: k in [1, n], q in [0, 2n].
    Cnkq,
    /// Total bubbles of size q: q in [1, 2n].
    BubSize,
}

/// A dense table of exact nonnegative counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub kind: TableKind,
    pub n: usize,
    rows: usize,
    cols: usize,
    entries: Vec<BigUint>,
}

impl CountTable {
    fn from_u64(kind: TableKind, n: usize, rows: usize, cols: usize, raw: Vec<u64>) -> Self {
        debug_assert_eq!(raw.len(), rows * cols);
        CountTable {
            kind,
            n,
            rows,
            cols,
            entries: raw.into_iter().map(BigUint::from).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn at(&self, r: usize, c: usize) -> &BigUint {
        &self.entries[r * self.cols + c]
    }

    /// N_{q,b}(n): bubbles of size `q` with exactly `b` bridges.
    pub fn nqb(&self, q: usize, b: usize) -> &BigUint {
        assert_eq!(self.kind, TableKind::Nqb);
        self.at(q - 1, b)
    }

    /// Diagrams with exactly `k` short chords.
    pub fn short(&self, k: usize) -> &BigUint {
        assert_eq!(self.kind, TableKind::Short);
        self.at(0, k)
    }

    /// R_{n,k}: crystallized diagrams with `k` short chords.
    pub fn rnk(&self, k: usize) -> &BigUint {
        assert_eq!(self.kind, TableKind::Rnk);
        self.at(0, k - 1)
    }

    /// C_{n,k,q}: bubbles of size `q` (q = 0 allowed) across crystallized
    /// diagrams with `k` short chords.
    pub fn cnkq(&self, k: usize, q: usize) -> &BigUint {
        assert_eq!(self.kind, TableKind::Cnkq);
        self.at(k - 1, q)
    }

    /// Total bubbles of size `q` across all diagrams.
    pub fn bubble_size(&self, q: usize) -> &BigUint {
        assert_eq!(self.kind, TableKind::BubSize);
        self.at(q - 1, 0)
    }
}

/// Runs `fold` over every diagram in parallel and merges the per-worker
/// u64 accumulators by element-wise addition.
fn census<F>(n: usize, acc_len: usize, fold: F) -> Result<Vec<u64>>
where
    F: Fn(&Diagram, &mut [u64]) + Sync,
{
    let parts = diagram::enumeration_partitions(n)?;
    Ok(parts
        .into_par_iter()
        .map(|p| {
            let mut acc = vec![0u64; acc_len];
            p.for_each(|d| fold(d, &mut acc));
            acc
        })
        .reduce(
            || vec![0u64; acc_len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        ))
}

/// N_{q,b}(n) aggregated over all (2n-1)!! diagrams.
pub fn count_nqb(n: usize) -> Result<CountTable> {
    let cols = n.max(1);
    let raw = census(n, 2 * n * cols, |d, acc| {
        for b in d.bubbles().bubbles {
            acc[(b.size - 1) * cols + b.bridges] += 1;
        }
    })?;
    Ok(CountTable::from_u64(TableKind::Nqb, n, 2 * n, cols, raw))
}

/// Number of diagrams with exactly k short chords, k in [0, n].
pub fn count_short_distribution(n: usize) -> Result<CountTable> {
    let raw = census(n, n + 1, |d, acc| {
        acc[d.short_chords().len()] += 1;
    })?;
    Ok(CountTable::from_u64(TableKind::Short, n, 1, n + 1, raw))
}

/// R_{n,k} by direct filtering of the enumeration stream.
pub fn count_rnk_bruteforce(n: usize) -> Result<CountTable> {
    let raw = census(n, n, |d, acc| {
        if d.is_crystallized() {
            acc[d.short_chords().len() - 1] += 1;
        }
    })?;
    Ok(CountTable::from_u64(TableKind::Rnk, n, 1, n, raw))
}

/// C_{n,k,q} by direct enumeration over crystallized diagrams; bubbles of
/// size zero are counted from the empty gaps between short chords and at
/// the diagram ends.
pub fn count_cnkq_bruteforce(n: usize) -> Result<CountTable> {
    let cols = 2 * n + 1;
    let raw = census(n, n * cols, |d, acc| {
        if !d.is_crystallized() {
            return;
        }
        let dec = d.bubbles();
        let k = dec.short_chord_positions.len();
        let row = (k - 1) * cols;
        acc[row] += d.zero_gaps() as u64;
        for b in dec.bubbles {
            acc[row + b.size] += 1;
        }
    })?;
    Ok(CountTable::from_u64(TableKind::Cnkq, n, n, cols, raw))
}

/// Total number of bubbles of size q, q in [1, 2n] (the row sums of N_{q,b}).
pub fn bubble_size_totals(n: usize) -> Result<CountTable> {
    let raw = census(n, 2 * n, |d, acc| {
        for b in d.bubbles().bubbles {
            acc[b.size - 1] += 1;
        }
    })?;
    Ok(CountTable::from_u64(TableKind::BubSize, n, 2 * n, 1, raw))
}

/// Monte Carlo estimate of the bridge-count moments over the population
/// of bubbles of one size.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub n: usize,
    pub q: usize,
    /// Number of sampled diagrams.
    pub samples: u64,
    /// Number of bubbles of size q observed across the samples.
    pub population: u64,
    pub mean_bridges: f64,
    /// Unbiased sample variance over the bubble population.
    pub var_bridges: f64,
    /// Standard error of the mean: sample std dev / sqrt(population).
    pub standard_error: f64,
    /// Approximate standard error of the variance estimate.
    pub variance_standard_error: f64,
}

/// Exact integer accumulators for one bubble size; merged by addition so
/// results are independent of thread scheduling.
#[derive(Debug, Clone, Copy, Default)]
struct QAccum {
    count: u64,
    sum: u64,
    sum_sq: u128,
}

/// Per-size bridge statistics from one Monte Carlo sweep.
#[derive(Debug, Clone)]
pub struct McBridgeSweep {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    per_q: Vec<QAccum>,
}

/// Samples are split into fixed-size chunks; chunk c uses RNG stream c of
/// the master seed, so the sweep is deterministic for any thread count.
const MC_CHUNK: u64 = 4096;

/// One pass of uniform sampling collecting bridge counts for every bubble
/// size at once.
pub fn mc_bridge_sweep(n: usize, samples: u64, seed: u64) -> McBridgeSweep {
    let chunks = samples.div_ceil(MC_CHUNK);
    let per_q = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let lo = c * MC_CHUNK;
            let hi = ((c + 1) * MC_CHUNK).min(samples);
            let mut acc = vec![QAccum::default(); 2 * n + 1];
            for _ in lo..hi {
                let d = diagram::sample_uniform(n, &mut rng);
                for b in d.bubbles().bubbles {
                    let a = &mut acc[b.size];
                    a.count += 1;
                    a.sum += b.bridges as u64;
                    a.sum_sq += (b.bridges as u128) * (b.bridges as u128);
                }
            }
            acc
        })
        .reduce(
            || vec![QAccum::default(); 2 * n + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.count += y.count;
                    x.sum += y.sum;
                    x.sum_sq += y.sum_sq;
                }
                a
            },
        );
    McBridgeSweep {
        n,
        samples,
        seed,
        per_q,
    }
}

impl McBridgeSweep {
    /// Moments for bubbles of size `q`, or an empty-estimate error if no
    /// such bubble was observed.
    pub fn estimate(&self, q: usize) -> Result<McEstimate> {
        let a = self
            .per_q
            .get(q)
            .copied()
            .unwrap_or_default();
        if a.count == 0 {
            return Err(Error::EmptyEstimate {
                q,
                samples: self.samples,
            });
        }
        let m = a.count as f64;
        let mean = a.sum as f64 / m;
        let var = if a.count > 1 {
            (a.sum_sq as f64 - (a.sum as f64) * (a.sum as f64) / m) / (m - 1.0)
        } else {
            0.0
        };
        let se = (var / m).sqrt();
        let var_se = if a.count > 1 {
            var * (2.0 / (m - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(McEstimate {
            n: self.n,
            q,
            samples: self.samples,
            population: a.count,
            mean_bridges: mean,
            var_bridges: var,
            standard_error: se,
            variance_standard_error: var_se,
        })
    }

    /// Number of observed bubbles of size `q`.
    pub fn population(&self, q: usize) -> u64 {
        self.per_q.get(q).map_or(0, |a| a.count)
    }
}

/// Monte Carlo bridge moments for a single bubble size.
pub fn mc_bridge_stats(n: usize, q: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    mc_bridge_sweep(n, samples, seed).estimate(q)
}

/// Independent closed-form oracle for the short-chord distribution
/// (inclusion-exclusion over forced short chords):
/// T(n,k) = sum_j (-1)^(j-k) C(j,k) C(2n-j, j) (2n-2j-1)!!.
pub fn short_distribution_oracle(n: usize, k: usize) -> BigUint {
    let mut pos = BigUint::from(0u32);
    let mut neg = BigUint::from(0u32);
    for j in k..=n {
        let term = binom_u(j, k) * binom_u(2 * n - j, j) * BigUint::from(double_factorial_odd(n - j));
        if (j - k).is_multiple_of(2) {
            pos += term;
        } else {
            neg += term;
        }
    }
    pos - neg
}

fn binom_u(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut r = BigUint::from(1u32);
    for i in 0..k {
        r = r * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    

    fn u(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn nqb_n2_matches_printed_table() {
        let t = count_nqb(2).unwrap();
        let expect = [[0, 2], [0, 0], [0, 0], [1, 0]];
        for q in 1..=4 {
            for b in 0..2 {
                assert_eq!(t.nqb(q, b), &u(expect[q - 1][b]), "q={q} b={b}");
            }
        }
    }

    #[test]
    fn nqb_spot_checks_n4_n5() {
        let t4 = count_nqb(4).unwrap();
        assert_eq!(t4.nqb(3, 3), &u(12));
        assert_eq!(t4.nqb(8, 0), &u(36));
        let t5 = count_nqb(5).unwrap();
        assert_eq!(t5.nqb(3, 3), &u(144));
        assert_eq!(t5.nqb(10, 0), &u(329));
    }

    #[test]
    fn short_distribution_small() {
        let t = count_short_distribution(2).unwrap();
        assert_eq!(
            (0..=2).map(|k| t.short(k).clone()).collect::<Vec<_>>(),
            vec![u(1), u(1), u(1)]
        );
        assert_eq!(count_short_distribution(3).unwrap().short(0), &u(5));
        assert_eq!(count_short_distribution(5).unwrap().short(0), &u(329));
    }

    #[test]
    fn short_distribution_matches_inclusion_exclusion_oracle() {
        for n in 1..=7 {
            let t = count_short_distribution(n).unwrap();
            for k in 0..=n {
                assert_eq!(t.short(k), &short_distribution_oracle(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn short_distribution_mean_is_exactly_one() {
        for n in 1..=7 {
            let t = count_short_distribution(n).unwrap();
            let total: BigUint = (0..=n).map(|k| t.short(k).clone()).sum();
            let weighted: BigUint = (0..=n).map(|k| t.short(k) * u(k as u64)).sum();
            assert_eq!(total, u(double_factorial_odd(n)));
            assert_eq!(weighted, total, "mean short-chord count must be 1 at n={n}");
        }
    }

    #[test]
    fn rnk_bruteforce_matches_printed_rows() {
        let t5 = count_rnk_bruteforce(5).unwrap();
        assert_eq!(
            (1..=5).map(|k| t5.rnk(k).clone()).collect::<Vec<_>>(),
            [24u64, 62, 39, 10, 1].map(u).to_vec()
        );
        let t4 = count_rnk_bruteforce(4).unwrap();
        assert_eq!(t4.rnk(4), &u(1));
    }

    #[test]
    fn cnkq_bruteforce_small_values() {
        let t = count_cnkq_bruteforce(2).unwrap();
        assert_eq!(t.cnkq(1, 1), &u(2));
        assert_eq!(t.cnkq(2, 0), &u(3));
    }

    #[test]
    fn row_sums_equal_bubble_totals() {
        for n in 2..=6 {
            let nqb = count_nqb(n).unwrap();
            let totals = bubble_size_totals(n).unwrap();
            for q in 1..=2 * n {
                let row_sum: BigUint = (0..n).map(|b| nqb.nqb(q, b).clone()).sum();
                assert_eq!(&row_sum, totals.bubble_size(q), "n={n} q={q}");
            }
            let short = count_short_distribution(n).unwrap();
            assert_eq!(nqb.nqb(2 * n, 0), short.short(0));
        }
    }

    #[test]
    fn bubble_totals_printed_rows() {
        let t3 = bubble_size_totals(3).unwrap();
        assert_eq!(
            (1..=6).map(|q| t3.bubble_size(q).clone()).collect::<Vec<_>>(),
            [8u64, 4, 2, 2, 0, 5].map(u).to_vec()
        );
        let t2 = bubble_size_totals(2).unwrap();
        assert_eq!(
            (1..=4).map(|q| t2.bubble_size(q).clone()).collect::<Vec<_>>(),
            [2u64, 0, 0, 1].map(u).to_vec()
        );
        let t4 = bubble_size_totals(4).unwrap();
        assert_eq!(
            (1..=8).map(|q| t4.bubble_size(q).clone()).collect::<Vec<_>>(),
            [42u64, 30, 20, 15, 12, 10, 0, 36].map(u).to_vec()
        );
    }

    #[test]
    fn mc_matches_exact_weighted_mean_at_n5() {
        // Exact mean over bubbles of size 3 at n=5: (42*1 + 144*3)/186.
        let est = mc_bridge_stats(5, 3, 200_000, 11).unwrap();
        let exact = 474.0 / 186.0;
        assert!(
            (est.mean_bridges - exact).abs() < 5.0 * est.standard_error,
            "mc = {}, exact = {exact}, se = {}",
            est.mean_bridges,
            est.standard_error
        );
    }

    #[test]
    fn mc_size_one_bubbles_have_exactly_one_bridge() {
        let est = mc_bridge_stats(2, 1, 10_000, 3).unwrap();
        assert_eq!(est.mean_bridges, 1.0);
        assert_eq!(est.var_bridges, 0.0);
    }

    #[test]
    fn mc_empty_estimate_is_signalled() {
        // Bubbles of size 2n-1 never occur.
        assert!(matches!(
            mc_bridge_stats(3, 5, 20_000, 1),
            Err(Error::EmptyEstimate { .. })
        ));
    }

    #[test]
    fn mc_deterministic_per_seed() {
        let a = mc_bridge_sweep(6, 30_000, 99);
        let b = mc_bridge_sweep(6, 30_000, 99);
        for q in 0..=12 {
            assert_eq!(a.population(q), b.population(q));
        }
        let ea = a.estimate(4).unwrap();
        let eb = b.estimate(4).unwrap();
        assert_eq!(ea.mean_bridges.to_bits(), eb.mean_bridges.to_bits());
    }
}
