//! Scores for a final histogram and across-seed summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::ShotHistogram;

/// Normal quantile used for the two-sided 95% interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub p_opt: f64,
    pub expected_energy_gap: f64,
    pub sampling_rank: usize,
}

/// Empirical mass on the feasible optimal set.
pub fn optimal_state_probability(hist: &ShotHistogram, optimal: &[usize]) -> Result<f64> {
    if hist.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    Ok(optimal.iter().map(|&i| hist.frequency(i)).sum())
}

/// `sum_x p̂(x) C(x) - C*` where `cost` returns the QUBO value of a basis index.
pub fn expected_energy_gap(
    hist: &ShotHistogram,
    cost: impl Fn(usize) -> f64,
    c_star: f64,
) -> Result<f64> {
    if hist.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let shots = hist.shots() as f64;
    let mean: f64 = hist.iter().map(|(i, n)| n as f64 * cost(i)).sum::<f64>() / shots;
    Ok(mean - c_star)
}

/// Best competition rank among the optimal strings: one plus the number of
/// outcomes seen strictly more often. An optimum that was never sampled
/// ranks after every observed outcome.
pub fn sampling_rank(hist: &ShotHistogram, optimal: &[usize]) -> usize {
    let unseen = 1 + hist.distinct();
    optimal
        .iter()
        .map(|&x| {
            let n = hist.count(x);
            if n == 0 {
                unseen
            } else {
                1 + hist.iter().filter(|&(_, c)| c > n).count()
            }
        })
        .min()
        .unwrap_or(unseen)
}

pub fn run_metrics(
    hist: &ShotHistogram,
    optimal: &[usize],
    cost: impl Fn(usize) -> f64,
    c_star: f64,
) -> Result<RunMetrics> {
    Ok(RunMetrics {
        p_opt: optimal_state_probability(hist, optimal)?,
        expected_energy_gap: expected_energy_gap(hist, cost, c_star)?,
        sampling_rank: sampling_rank(hist, optimal),
    })
}

/// Mean, sample standard deviation and normal 95% interval over runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub mean: f64,
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub runs: usize,
}

pub fn aggregate(values: &[f64]) -> Result<AggregateStats> {
    let runs = values.len();
    if runs < 2 {
        return Err(Error::TooFewRuns { need: 2, got: runs });
    }
    let mean = values.iter().sum::<f64>() / runs as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
    let std = var.sqrt();
    let half = Z_95 * std / (runs as f64).sqrt();
    Ok(AggregateStats {
        mean,
        std,
        ci_low: mean - half,
        ci_high: mean + half,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bitstring;
    use proptest::prelude::*;

    fn idx(s: &str) -> usize {
        s.parse::<Bitstring>().unwrap().index()
    }

    fn hist(pairs: &[(&str, u64)]) -> ShotHistogram {
        ShotHistogram::from_bitstrings(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn probability_examples() {
        let opt = [idx("111010")];
        assert_eq!(
            optimal_state_probability(&hist(&[("111010", 40)]), &opt).unwrap(),
            1.0
        );
        let uniform = ShotHistogram::from_counts(6, (0..64).map(|i| (i, 10)));
        assert_eq!(
            optimal_state_probability(&uniform, &opt).unwrap(),
            1.0 / 64.0
        );
        let h = hist(&[("111010", 250), ("000000", 750)]);
        assert_eq!(optimal_state_probability(&h, &opt).unwrap(), 0.25);
        let empty = ShotHistogram::from_counts(6, std::iter::empty());
        assert_eq!(
            optimal_state_probability(&empty, &opt),
            Err(Error::EmptyHistogram)
        );
    }

    #[test]
    fn gap_examples() {
        let cost = |i: usize| if i == idx("111010") { 132.0 } else { 5662.8 };
        let gap = |h: &ShotHistogram| expected_energy_gap(h, cost, 132.0).unwrap();
        assert_eq!(gap(&hist(&[("111010", 9)])), 0.0);
        assert!((gap(&hist(&[("000000", 9)])) - 5530.8).abs() < 1e-9);
        assert!((gap(&hist(&[("000000", 5), ("111010", 5)])) - 2765.4).abs() < 1e-9);
    }

    #[test]
    fn rank_examples() {
        let opt = [idx("111010")];
        assert_eq!(
            sampling_rank(&hist(&[("111010", 9), ("000000", 2)]), &opt),
            1
        );
        assert_eq!(
            sampling_rank(&hist(&[("000001", 500), ("111010", 500)]), &opt),
            1
        );
        let h = hist(&[("000001", 600), ("000010", 300), ("111010", 100)]);
        assert_eq!(sampling_rank(&h, &opt), 3);
        assert_eq!(
            sampling_rank(&hist(&[("000001", 6), ("000010", 3)]), &opt),
            3
        );
    }

    #[test]
    fn rank_uses_best_optimum() {
        let h = hist(&[("000001", 600), ("000010", 300), ("111010", 100)]);
        assert_eq!(sampling_rank(&h, &[idx("111010"), idx("000010")]), 2);
    }

    #[test]
    fn aggregate_examples() {
        let s = aggregate(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.std, s.ci_low, s.ci_high), (1.0, 0.0, 1.0, 1.0));

        let s = aggregate(&[0.0, 1.0]).unwrap();
        let std = 0.5f64.sqrt();
        assert!((s.mean - 0.5).abs() < 1e-12);
        assert!((s.std - std).abs() < 1e-12);
        assert!((s.ci_low - (0.5 - 1.96 * std / 2f64.sqrt())).abs() < 1e-12);
        assert!((s.ci_high - (0.5 + 1.96 * std / 2f64.sqrt())).abs() < 1e-12);

        let s = aggregate(&[0.37; 30]).unwrap();
        assert!((s.ci_low - 0.37).abs() < 1e-12 && (s.ci_high - 0.37).abs() < 1e-12);
        assert_eq!(s.runs, 30);

        assert_eq!(
            aggregate(&[1.0]),
            Err(Error::TooFewRuns { need: 2, got: 1 })
        );
    }

    proptest! {
        #[test]
        fn complement_identity(counts in proptest::collection::vec(0u64..50, 8)) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let h = ShotHistogram::from_counts(3, counts.iter().copied().enumerate());
            let opt = [5usize];
            let outside: f64 = (0..8).filter(|i| *i != 5).map(|i| h.frequency(i)).sum();
            prop_assert!((optimal_state_probability(&h, &opt).unwrap() - (1.0 - outside)).abs() < 1e-12);
        }

        #[test]
        fn rank_scale_invariant(counts in proptest::collection::vec(0u64..50, 8), k in 1u64..20) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let h = ShotHistogram::from_counts(3, counts.iter().copied().enumerate());
            let scaled = ShotHistogram::from_counts(3, counts.iter().map(|c| c * k).enumerate());
            prop_assert_eq!(sampling_rank(&h, &[2]), sampling_rank(&scaled, &[2]));
        }

        #[test]
        fn gap_is_affine(a in proptest::collection::vec(1u64..50, 8), b in proptest::collection::vec(1u64..50, 8)) {
            let cost = |i: usize| (i as f64) * 13.5 - 4.0;
            let ha = ShotHistogram::from_counts(3, a.iter().copied().enumerate());
            let hb = ShotHistogram::from_counts(3, b.iter().copied().enumerate());
            // Equal-size halves: scale each histogram to a common shot total.
            let (na, nb) = (ha.shots(), hb.shots());
            let merged = ShotHistogram::from_counts(
                3,
                (0..8).map(|i| (i, a[i] * nb + b[i] * na)),
            );
            let ga = expected_energy_gap(&ha, cost, 1.0).unwrap();
            let gb = expected_energy_gap(&hb, cost, 1.0).unwrap();
            let gm = expected_energy_gap(&merged, cost, 1.0).unwrap();
            prop_assert!((gm - 0.5 * (ga + gb)).abs() < 1e-9);
        }
    }
}
