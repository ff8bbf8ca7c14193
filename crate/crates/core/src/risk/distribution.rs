use crate::error::{Error, Result};

const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// A finite random variable, stored with outcomes sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    outcomes: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(outcomes: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if outcomes.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} outcomes but {} probabilities",
                outcomes.len(),
                probs.len()
            )));
        }
        if let Some(y) = outcomes.iter().find(|y| !y.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite outcome {y}")));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }

        let mut pairs: Vec<(f64, f64)> = outcomes.into_iter().zip(probs).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (outcomes, probs) = pairs.into_iter().unzip();
        Ok(Self { outcomes, probs })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (outcomes, probs) = pairs.into_iter().unzip();
        Self::new(outcomes, probs)
    }

    pub fn point_mass(y: f64) -> Result<Self> {
        Self::new(vec![y], vec![1.0])
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Number of outcomes that are `<= 0`.
    pub fn split_index(&self) -> usize {
        self.outcomes.partition_point(|&y| y <= 0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.outcomes.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(y, p)| y * p).sum()
    }
}

/// Empirical draws of a random variable. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    samples: Vec<f64>,
}

impl SampleBatch {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite sample {x}")));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.samples
    }
}

impl TryFrom<Vec<f64>> for SampleBatch {
    type Error = Error;

    fn try_from(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_outcomes_with_probabilities() {
        let d = DiscreteDistribution::new(vec![3.0, -1.0, 0.0, 2.0], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(d.outcomes(), &[-1.0, 0.0, 2.0, 3.0]);
        assert_eq!(d.probs(), &[0.2, 0.3, 0.4, 0.1]);
        assert_eq!(d.split_index(), 2);
    }

    #[test]
    fn rejects_invalid_probabilities() {
        assert!(DiscreteDistribution::new(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![1.0, 2.0], vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![1.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![], vec![]).is_err());
        assert!(DiscreteDistribution::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn accepts_rounding_in_probability_sum() {
        let d = DiscreteDistribution::new(vec![1.0, 2.0, 3.0], vec![0.1, 0.2, 0.7 + 1e-12]);
        assert!(d.is_ok());
    }

    #[test]
    fn empty_batch_is_rejected() {
        assert!(matches!(SampleBatch::new(vec![]), Err(Error::EmptyBatch)));
        assert_eq!(SampleBatch::new(vec![1.0, 1.0]).unwrap().count(), 2);
    }
}
