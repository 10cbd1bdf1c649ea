//! Linear chord diagrams and their structural classification.
//!
//! A diagram is a perfect matching on `2n` vertices laid out on a line,
//! positions numbered `1..=2n`. A *short chord* joins adjacent positions.
//! A *bubble* is a maximal non-empty run of positions containing no short
//! chord, bounded by short chords and/or the two ends of the line. A
//! *bridge* of a bubble is a chord with exactly one endpoint inside it.

use crate::error::{Error, Result};
use rand::Rng;

/// Hard cap on the number of chords accepted by the exhaustive
/// enumerator. (2n-1)!! grows too fast for exhaustive work beyond this;
/// n = 9 (34 459 425 diagrams) is still practical.
pub const ENUMERATION_CAP: usize = 12;

/// A linear chord diagram on `2n` vertices.
///
/// Stored as an involution: `partner(v)` is the vertex matched to `v`.
/// Positions are 1-based; index 0 of the backing array is unused.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    n: usize,
    partner: Vec<usize>,
}

/// One bubble of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bubble {
    /// Leftmost position of the bubble.
    pub start: usize,
    /// Number of vertices in the bubble.
    pub size: usize,
    /// Number of chords with exactly one endpoint inside the bubble.
    pub bridges: usize,
}

/// The bubbles of a diagram together with its short chords.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BubbleDecomposition {
    /// Bubbles in left-to-right order. Only non-empty runs appear here;
    /// zero-size gaps are counted by [`Diagram::zero_gaps`].
    pub bubbles: Vec<Bubble>,
    /// Left endpoints of the short chords, ascending.
    pub short_chord_positions: Vec<usize>,
}

impl Diagram {
    /// Builds a diagram from a 1-based partner array of length `2n + 1`
    /// (entry 0 is ignored).
    pub fn from_partner(partner: Vec<usize>) -> Result<Self> {
        if partner.len() < 3 || partner.len().is_multiple_of(2) {
            return Err(Error::InvalidDiagram(format!(
                "partner array must have odd length >= 3, got {}",
                partner.len()
            )));
        }
        let two_n = partner.len() - 1;
        for v in 1..=two_n {
            let p = partner[v];
            if p < 1 || p > two_n {
                return Err(Error::InvalidDiagram(format!(
                    "partner[{v}] = {p} out of range 1..={two_n}"
                )));
            }
            if p == v {
                return Err(Error::InvalidDiagram(format!("fixed point at {v}")));
            }
            if partner[p] != v {
                return Err(Error::InvalidDiagram(format!(
                    "not an involution: partner[{v}] = {p} but partner[{p}] = {}",
                    partner[p]
                )));
            }
        }
        Ok(Diagram {
            n: two_n / 2,
            partner,
        })
    }

    /// Builds a diagram from chord pairs covering `1..=2n` exactly once.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut partner = vec![0usize; 2 * n + 1];
        for &(u, v) in pairs {
            if u == 0 || v == 0 || u > 2 * n || v > 2 * n {
                return Err(Error::InvalidDiagram(format!("pair ({u},{v}) out of range")));
            }
            if partner[u] != 0 || partner[v] != 0 {
                return Err(Error::InvalidDiagram(format!("vertex reused in ({u},{v})")));
            }
            partner[u] = v;
            partner[v] = u;
        }
        Self::from_partner(partner)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        2 * self.n
    }

    /// The vertex matched to `v`.
    pub fn partner(&self, v: usize) -> usize {
        self.partner[v]
    }

    /// Raw partner array (1-based; index 0 unused).
    pub fn partner_slice(&self) -> &[usize] {
        &self.partner
    }

    fn is_short_endpoint(&self, v: usize) -> bool {
        self.partner[v].abs_diff(v) == 1
    }

    /// Left endpoints of all short chords, ascending.
    pub fn short_chords(&self) -> Vec<usize> {
        (1..self.num_vertices())
            .filter(|&v| self.partner[v] == v + 1)
            .collect()
    }

    /// Decomposes the diagram into bubbles.
    ///
    /// A chord joining two distinct bubbles counts as a bridge of both; a
    /// chord spanning over a bubble with both endpoints outside it is not
    /// a bridge of that bubble.
    pub fn bubbles(&self) -> BubbleDecomposition {
        let shorts = self.short_chords();
        let two_n = self.num_vertices();
        let mut bubbles = Vec::new();
        let mut v = 1;
        while v <= two_n {
            if self.is_short_endpoint(v) {
                v += 2; // skip the short chord (v, v+1)
                continue;
            }
            let start = v;
            while v <= two_n && !self.is_short_endpoint(v) {
                v += 1;
            }
            let end = v - 1;
            let bridges = (start..=end)
                .filter(|&u| {
                    let p = self.partner[u];
                    p < start || p > end
                })
                .count();
            bubbles.push(Bubble {
                start,
                size: end - start + 1,
                bridges,
            });
        }
        BubbleDecomposition {
            bubbles,
            short_chord_positions: shorts,
        }
    }

    /// True iff every bubble is empty, i.e. every chord is short or a bridge.
    pub fn is_crystallized(&self) -> bool {
        self.bubbles().bubbles.iter().all(|b| b.bridges == b.size)
    }

    /// Number of zero-size gaps: empty runs between consecutive short
    /// chords and at the two ends of the diagram.
    pub fn zero_gaps(&self) -> usize {
        let shorts = self.short_chords();
        if shorts.is_empty() {
            return 0;
        }
        let mut count = 0;
        if shorts[0] == 1 {
            count += 1;
        }
        for w in shorts.windows(2) {
            if w[1] == w[0] + 2 {
                count += 1;
            }
        }
        if shorts[shorts.len() - 1] + 1 == self.num_vertices() {
            count += 1;
        }
        count
    }

    /// Number of non-short chords with both endpoints in the same bubble.
    /// Zero iff the diagram is crystallized.
    pub fn internal_chords(&self) -> usize {
        let shorts = self.short_chords();
        count_internal(&self.partner, &shorts)
    }
}

/// Counts chords with both endpoints strictly inside one bubble, given
/// the sorted short-chord left endpoints.
pub(crate) fn count_internal(partner: &[usize], shorts: &[usize]) -> usize {
    let two_n = partner.len() - 1;
    let mut count = 0;
    for u in 1..=two_n {
        let v = partner[u];
        if v <= u || v == u + 1 {
            continue; // visit each chord once from its left endpoint; skip shorts
        }
        // Internal iff no short chord lies strictly between u and v.
        // Short chords never straddle a chord endpoint, so it suffices to
        // look for a left endpoint s with u < s and s + 1 < v.
        let lo = shorts.partition_point(|&s| s <= u);
        let separated = lo < shorts.len() && shorts[lo] + 1 < v;
        if !separated {
            count += 1;
        }
    }
    count
}

/// Double factorial (2n-1)!! as u64; (2*17-1)!! overflows, callers stay below.
pub fn double_factorial_odd(n: usize) -> u64 {
    (0..n).fold(1u64, |acc, i| acc * (2 * i + 1) as u64)
}

/// Uniform random diagram: repeatedly match the first unmatched vertex
/// to a uniformly chosen unmatched vertex.
pub fn sample_uniform<R: Rng>(n: usize, rng: &mut R) -> Diagram {
    let mut partner = vec![0usize; 2 * n + 1];
    let mut unmatched: Vec<usize> = (1..=2 * n).collect();
    while !unmatched.is_empty() {
        let first = unmatched[0];
        let idx = rng.gen_range(1..unmatched.len());
        let mate = unmatched[idx];
        partner[first] = mate;
        partner[mate] = first;
        unmatched.remove(idx);
        unmatched.remove(0);
    }
    Diagram { n, partner }
}

/// One slice of the enumeration stream: all diagrams in which vertex 1
/// is matched to `first_partner`.
#[derive(Debug, Clone, Copy)]
pub struct EnumPartition {
    n: usize,
    first_partner: usize,
}

impl EnumPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first_partner(&self) -> usize {
        self.first_partner
    }

    /// Visits every diagram of this partition in deterministic order.
    pub fn for_each<F: FnMut(&Diagram)>(&self, mut f: F) {
        let mut d = Diagram {
            n: self.n,
            partner: vec![0usize; 2 * self.n + 1],
        };
        d.partner[1] = self.first_partner;
        d.partner[self.first_partner] = 1;
        complete(&mut d, &mut f);
        d.partner[1] = 0;
        d.partner[self.first_partner] = 0;
    }
}

fn complete<F: FnMut(&Diagram)>(d: &mut Diagram, f: &mut F) {
    let two_n = 2 * d.n;
    let Some(v) = (1..=two_n).find(|&v| d.partner[v] == 0) else {
        f(d);
        return;
    };
    for u in (v + 1)..=two_n {
        if d.partner[u] == 0 {
            d.partner[v] = u;
            d.partner[u] = v;
            complete(d, f);
            d.partner[v] = 0;
            d.partner[u] = 0;
        }
    }
}

/// The `2n - 1` partitions of the enumeration stream, keyed by the
/// partner of vertex 1. Partitions are independently consumable.
pub fn enumeration_partitions(n: usize) -> Result<Vec<EnumPartition>> {
    if n == 0 || n > ENUMERATION_CAP {
        return Err(Error::Capacity {
            n,
            cap: ENUMERATION_CAP,
        });
    }
    Ok((2..=2 * n)
        .map(|first_partner| EnumPartition { n, first_partner })
        .collect())
}

/// Visits each of the (2n-1)!! diagrams exactly once, in deterministic
/// order: the lowest unmatched vertex is matched to each larger unmatched
/// vertex in ascending order, recursively.
pub fn enumerate_diagrams<F: FnMut(&Diagram)>(n: usize, mut f: F) -> Result<()> {
    for part in enumeration_partitions(n)? {
        part.for_each(&mut f);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d2(pairs: &[(usize, usize)]) -> Diagram {
        Diagram::from_pairs(pairs.len(), pairs).unwrap()
    }

    #[test]
    fn enumeration_totals_match_double_factorial() {
        for n in 1..=7 {
            let mut count = 0u64;
            enumerate_diagrams(n, |_| count += 1).unwrap();
            assert_eq!(count, double_factorial_odd(n), "n = {n}");
        }
    }

    #[test]
    fn enumeration_is_duplicate_free_at_n4() {
        let mut seen = std::collections::HashSet::new();
        enumerate_diagrams(4, |d| {
            assert!(seen.insert(d.partner_slice().to_vec()));
        })
        .unwrap();
        assert_eq!(seen.len(), 105);
    }

    #[test]
    fn capacity_error_beyond_cap() {
        assert!(matches!(
            enumerate_diagrams(ENUMERATION_CAP + 1, |_| ()),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(enumerate_diagrams(0, |_| ()), Err(Error::Capacity { .. })));
    }

    #[test]
    fn partitions_cover_the_stream() {
        let parts = enumeration_partitions(3).unwrap();
        assert_eq!(parts.len(), 5);
        let total: u64 = parts
            .iter()
            .map(|p| {
                let mut c = 0;
                p.for_each(|d| {
                    assert_eq!(d.partner(1), p.first_partner());
                    c += 1;
                });
                c
            })
            .sum();
        assert_eq!(total, 15);
    }

    #[test]
    fn short_chords_n2() {
        assert_eq!(d2(&[(1, 2), (3, 4)]).short_chords(), vec![1, 3]);
        assert_eq!(d2(&[(1, 3), (2, 4)]).short_chords(), Vec::<usize>::new());
        assert_eq!(d2(&[(1, 4), (2, 3)]).short_chords(), vec![2]);
    }

    #[test]
    fn bubbles_n2() {
        // {14|23}: two bubbles of size 1, each with one (common) bridge.
        let b = d2(&[(1, 4), (2, 3)]).bubbles();
        assert_eq!(b.bubbles.len(), 2);
        for bub in &b.bubbles {
            assert_eq!((bub.size, bub.bridges), (1, 1));
        }
        // {13|24}: a single bubble of size 4 with no bridges.
        let b = d2(&[(1, 3), (2, 4)]).bubbles();
        assert_eq!(b.bubbles.len(), 1);
        assert_eq!((b.bubbles[0].size, b.bubbles[0].bridges), (4, 0));
        // {12|34}: no bubbles.
        assert!(d2(&[(1, 2), (3, 4)]).bubbles().bubbles.is_empty());
    }

    #[test]
    fn crystallized_n2() {
        assert!(d2(&[(1, 2), (3, 4)]).is_crystallized());
        assert!(!d2(&[(1, 3), (2, 4)]).is_crystallized());
        assert!(d2(&[(1, 4), (2, 3)]).is_crystallized());
    }

    #[test]
    fn crystallized_six_chord_example() {
        // Short chords at 3-4 and 9-10; three bubbles of sizes 2, 4, 2,
        // every remaining vertex on a bridge.
        let d = d2(&[(3, 4), (9, 10), (1, 5), (2, 6), (7, 11), (8, 12)]);
        let dec = d.bubbles();
        let sizes: Vec<usize> = dec.bubbles.iter().map(|b| b.size).collect();
        assert_eq!(sizes, vec![2, 4, 2]);
        assert!(d.is_crystallized());
        assert_eq!(d.internal_chords(), 0);
    }

    #[test]
    fn zero_gap_counts() {
        assert_eq!(d2(&[(1, 2), (3, 4)]).zero_gaps(), 3);
        assert_eq!(d2(&[(1, 4), (2, 3)]).zero_gaps(), 0);
        assert_eq!(d2(&[(1, 2), (3, 4), (5, 6)]).zero_gaps(), 4);
    }

    #[test]
    fn structural_invariants_over_all_n5_diagrams() {
        enumerate_diagrams(5, |d| {
            let dec = d.bubbles();
            let size_sum: usize = dec.bubbles.iter().map(|b| b.size).sum();
            assert_eq!(size_sum + 2 * dec.short_chord_positions.len(), 10);
            for b in &dec.bubbles {
                assert!(b.bridges <= b.size);
                if b.size == 1 {
                    assert_eq!(b.bridges, 1);
                }
                assert_ne!(b.size, 9); // size 2n-1 is impossible
            }
            assert_eq!(
                d.is_crystallized(),
                dec.bubbles.iter().all(|b| b.bridges == b.size)
            );
            assert_eq!(d.is_crystallized(), d.internal_chords() == 0);
        })
        .unwrap();
    }

    #[test]
    fn sampler_produces_valid_uniform_diagrams() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(sample_uniform(1, &mut rng), d2(&[(1, 2)]));

        // n=2: each of the 3 diagrams with frequency 1/3 +- 5 sigma.
        let samples = 300_000u64;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..samples {
            let d = sample_uniform(2, &mut rng);
            Diagram::from_partner(d.partner_slice().to_vec()).unwrap();
            *counts.entry(d.partner_slice().to_vec()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 3);
        let p = 1.0 / 3.0;
        let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
        for (_, c) in counts {
            assert!((c as f64 - samples as f64 * p).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn sampler_short_chord_mean_is_one() {
        // Mean short-chord count is 1 for every n; check n=8 by sampling.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let samples = 100_000u64;
        let mut sum = 0u64;
        let mut sumsq = 0u64;
        for _ in 0..samples {
            let k = sample_uniform(8, &mut rng).short_chords().len() as u64;
            sum += k;
            sumsq += k * k;
        }
        let mean = sum as f64 / samples as f64;
        let var = sumsq as f64 / samples as f64 - mean * mean;
        let se = (var / samples as f64).sqrt();
        assert!((mean - 1.0).abs() < 5.0 * se, "mean = {mean}, se = {se}");
    }
}
