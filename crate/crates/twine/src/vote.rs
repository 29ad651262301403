//! Plurality voting over circuit variants, computed exactly from the
//! per-variant output distributions instead of by resampling shots.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::Error;

pub type Distribution = BTreeMap<String, f64>;

/// `min(⌈N_v/2⌉, max_multiplicity)`, at least 1.
pub fn choose_threshold(n_v: usize, max_multiplicity: usize) -> usize {
    n_v.div_ceil(2).min(max_multiplicity).max(1)
}

/// Largest number of variants in which any single state has support.
pub fn max_multiplicity(variants: &[Distribution]) -> usize {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for v in variants {
        for (x, &p) in v {
            if p > 0.0 {
                *seen.entry(x).or_default() += 1;
            }
        }
    }
    seen.into_values().max().unwrap_or(0)
}

/// How many acceptances a state seen in `j` variants is worth.
pub fn multiplicity(j: usize, t: usize) -> usize {
    j / (t + 1)
}

/// `Pr[count = j]` for independent Bernoulli(`ps[v]`) draws.
pub fn count_distribution(ps: &[f64]) -> Vec<f64> {
    let mut dp = vec![0.0; ps.len() + 1];
    dp[0] = 1.0;
    for (v, &p) in ps.iter().enumerate() {
        for j in (0..=v + 1).rev() {
            let stay = dp[j] * (1.0 - p);
            let step = if j > 0 { dp[j - 1] * p } else { 0.0 };
            dp[j] = stay + step;
        }
    }
    dp
}

#[derive(Clone, Debug, PartialEq)]
pub struct VotingConfig {
    pub threshold: usize,
    pub variants: Vec<Distribution>,
}

impl VotingConfig {
    /// Threshold picked by [`choose_threshold`].
    pub fn auto(variants: Vec<Distribution>) -> Self {
        let t = choose_threshold(variants.len(), max_multiplicity(&variants));
        VotingConfig {
            threshold: t,
            variants,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VotedOutcome {
    pub threshold: usize,
    pub variants: usize,
    /// Raw expected acceptance count per state.
    pub weights: BTreeMap<String, f64>,
    /// Weights normalized to sum to one.
    pub distribution: BTreeMap<String, f64>,
    /// `Σ_x Pr[x seen in more than t variants]`; a probability when
    /// `t ≥ N_v/2`, since then at most one state can pass.
    pub accepted_mass: f64,
    pub rejected_fraction: f64,
}

impl VotedOutcome {
    pub fn success(&self, target: &str) -> f64 {
        self.distribution.get(target).copied().unwrap_or(0.0)
    }
}

pub fn vote(config: &VotingConfig) -> Result<VotedOutcome, Error> {
    let n_v = config.variants.len();
    let t = config.threshold;
    if n_v == 0 {
        return Err(Error::InvalidInput("no variants".into()));
    }
    if t == 0 || t > n_v {
        return Err(Error::InvalidInput(format!(
            "threshold {t} outside 1..={n_v}"
        )));
    }
    for (v, d) in config.variants.iter().enumerate() {
        let total: f64 = d.values().sum();
        if (total - 1.0).abs() > 1e-9 || d.values().any(|&p| p < 0.0) {
            return Err(Error::InvalidInput(format!("variant {v} sums to {total}")));
        }
    }
    if n_v == 1 {
        let d = config.variants[0].clone();
        return Ok(VotedOutcome {
            threshold: t,
            variants: 1,
            weights: d.clone(),
            distribution: d,
            accepted_mass: 1.0,
            rejected_fraction: 0.0,
        });
    }
    let support: BTreeSet<&String> = config
        .variants
        .iter()
        .flat_map(|d| d.iter().filter(|(_, &p)| p > 0.0).map(|(x, _)| x))
        .collect();
    let scored: Vec<(String, f64, f64)> = support
        .into_par_iter()
        .map(|x| {
            let ps: Vec<f64> = config
                .variants
                .iter()
                .map(|d| d.get(x).copied().unwrap_or(0.0))
                .collect();
            let dist = count_distribution(&ps);
            let above = &dist[t + 1..];
            let weight = above
                .iter()
                .enumerate()
                .map(|(k, p)| multiplicity(t + 1 + k, t) as f64 * p)
                .sum();
            (x.clone(), weight, above.iter().sum())
        })
        .collect();
    let total: f64 = scored.iter().map(|s| s.1).sum();
    if total <= 0.0 {
        return Err(Error::EmptyOutcome);
    }
    let accepted_mass: f64 = scored.iter().map(|s| s.2).sum();
    let weights: BTreeMap<String, f64> = scored
        .iter()
        .filter(|s| s.1 > 0.0)
        .map(|s| (s.0.clone(), s.1))
        .collect();
    let distribution = weights
        .iter()
        .map(|(x, w)| (x.clone(), w / total))
        .collect();
    Ok(VotedOutcome {
        threshold: t,
        variants: n_v,
        weights,
        distribution,
        accepted_mass,
        rejected_fraction: (1.0 - accepted_mass).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(pairs: &[(&str, f64)]) -> Distribution {
        pairs.iter().map(|&(k, p)| (k.to_string(), p)).collect()
    }

    #[test]
    fn thresholds() {
        assert_eq!(choose_threshold(21, 21), 11);
        assert_eq!(choose_threshold(21, 7), 7);
        assert_eq!(choose_threshold(1, 1), 1);
        assert_eq!(choose_threshold(4, 0), 1);
    }

    #[test]
    fn binomial_tail() {
        let v = vec![dist(&[("a", 0.6), ("b", 0.4)]); 3];
        let out = vote(&VotingConfig {
            threshold: 2,
            variants: v,
        })
        .unwrap();
        assert!((out.weights["a"] - 0.216).abs() < 1e-15);
    }

    #[test]
    fn unanimous() {
        let v = vec![dist(&[("a", 1.0)]); 3];
        let out = vote(&VotingConfig {
            threshold: 1,
            variants: v,
        })
        .unwrap();
        assert_eq!(out.weights["a"], 1.0);
        assert_eq!(out.success("a"), 1.0);
    }

    #[test]
    fn single_variant_passes_through() {
        let d = dist(&[("0", 0.3), ("1", 0.7)]);
        let out = vote(&VotingConfig {
            threshold: 1,
            variants: vec![d.clone()],
        })
        .unwrap();
        assert_eq!(out.distribution, d);
    }

    #[test]
    fn nothing_accepted() {
        let v = vec![dist(&[("a", 1.0)]), dist(&[("b", 1.0)])];
        assert_eq!(
            vote(&VotingConfig {
                threshold: 1,
                variants: v
            }),
            Err(Error::EmptyOutcome)
        );
    }

    #[test]
    fn rejects_bad_configs() {
        let v = vec![dist(&[("a", 0.5)]); 2];
        assert!(vote(&VotingConfig {
            threshold: 1,
            variants: v
        })
        .is_err());
        let v = vec![dist(&[("a", 1.0)]); 2];
        assert!(vote(&VotingConfig {
            threshold: 3,
            variants: v
        })
        .is_err());
    }

    #[test]
    fn poisson_binomial_sums_to_one() {
        let d = count_distribution(&[0.1, 0.5, 0.9, 0.3]);
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((d[4] - 0.1 * 0.5 * 0.9 * 0.3).abs() < 1e-15);
    }
}
