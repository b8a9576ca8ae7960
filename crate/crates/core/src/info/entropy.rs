use std::collections::BTreeMap;

use crate::error::{HmpError, Result};

/// A finite distribution over outcome tuples. Coordinates are addressed by
/// position, so one joint distribution serves every marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    arity: usize,
    probs: BTreeMap<Vec<u64>, f64>,
}

impl EmpiricalDistribution {
    /// Probabilities must be non-negative and sum to one within `1e-12`.
    pub fn new(probs: impl IntoIterator<Item = (Vec<u64>, f64)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        let mut arity = None;
        for (outcome, p) in probs {
            if p.is_nan() || p < 0.0 || p.is_infinite() {
                return Err(HmpError::invalid(format!("bad probability {p}")));
            }
            match arity {
                None => arity = Some(outcome.len()),
                Some(a) if a != outcome.len() => {
                    return Err(HmpError::invalid("outcome tuples differ in length"))
                }
                _ => {}
            }
            if p > 0.0 {
                *map.entry(outcome).or_insert(0.0) += p;
            }
        }
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(HmpError::invalid(format!("probabilities sum to {total}")));
        }
        Ok(EmpiricalDistribution {
            arity: arity.unwrap_or(0),
            probs: map,
        })
    }

    /// Normalize non-negative weights.
    pub fn from_weights(weights: impl IntoIterator<Item = (Vec<u64>, f64)>) -> Result<Self> {
        let items: Vec<_> = weights.into_iter().collect();
        let total: f64 = items.iter().map(|(_, w)| *w).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(HmpError::invalid("weights sum to zero"));
        }
        Self::new(items.into_iter().map(|(o, w)| (o, w / total)))
    }

    /// Plug-in estimate: relative frequencies of the samples.
    pub fn from_samples(samples: impl IntoIterator<Item = Vec<u64>>) -> Result<Self> {
        let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        let mut total = 0u64;
        for s in samples {
            *counts.entry(s).or_insert(0) += 1;
            total += 1;
        }
        if total == 0 {
            return Err(HmpError::invalid("no samples"));
        }
        Self::new(
            counts
                .into_iter()
                .map(|(o, c)| (o, c as f64 / total as f64)),
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn support(&self) -> impl Iterator<Item = (&Vec<u64>, f64)> {
        self.probs.iter().map(|(o, &p)| (o, p))
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    fn check_coords(&self, coords: &[usize]) -> Result<()> {
        match coords.iter().find(|&&c| c >= self.arity) {
            Some(c) => Err(HmpError::invalid(format!("coordinate {c} out of range"))),
            None => Ok(()),
        }
    }

    pub fn marginal(&self, coords: &[usize]) -> Result<Self> {
        self.check_coords(coords)?;
        let mut map: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
        for (o, &p) in &self.probs {
            *map.entry(coords.iter().map(|&c| o[c]).collect())
                .or_insert(0.0) += p;
        }
        Ok(EmpiricalDistribution {
            arity: coords.len(),
            probs: map,
        })
    }

    /// The distribution conditioned on `coords == values`, or `None` if that
    /// event has probability zero.
    pub fn condition(&self, coords: &[usize], values: &[u64]) -> Result<Option<Self>> {
        self.check_coords(coords)?;
        let hit = |o: &Vec<u64>| coords.iter().zip(values).all(|(&c, &v)| o[c] == v);
        let mass: f64 = self
            .probs
            .iter()
            .filter(|(o, _)| hit(o))
            .map(|(_, p)| p)
            .sum();
        if mass <= 0.0 {
            return Ok(None);
        }
        let probs = self
            .probs
            .iter()
            .filter(|(o, _)| hit(o))
            .map(|(o, p)| (o.clone(), p / mass))
            .collect();
        Ok(Some(EmpiricalDistribution {
            arity: self.arity,
            probs,
        }))
    }
}

fn h(probs: impl Iterator<Item = f64>) -> f64 {
    probs.filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

/// Shannon entropy in bits of the whole tuple.
pub fn entropy(dist: &EmpiricalDistribution) -> f64 {
    h(dist.probs.values().copied())
}

/// Entropy of the marginal on `coords`.
pub fn joint_entropy(dist: &EmpiricalDistribution, coords: &[usize]) -> Result<f64> {
    if coords.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy(&dist.marginal(coords)?))
}

/// `H(X | Y) = H(X, Y) - H(Y)`.
pub fn conditional_entropy(
    dist: &EmpiricalDistribution,
    x: &[usize],
    given: &[usize],
) -> Result<f64> {
    let both: Vec<usize> = x.iter().chain(given).copied().collect();
    Ok(joint_entropy(dist, &both)? - joint_entropy(dist, given)?)
}

/// `I(X; Y | Z) = H(X,Z) + H(Y,Z) - H(X,Y,Z) - H(Z)`; pass an empty `z` for
/// the unconditional quantity.
pub fn mutual_information(
    dist: &EmpiricalDistribution,
    x: &[usize],
    y: &[usize],
    z: &[usize],
) -> Result<f64> {
    let cat = |parts: &[&[usize]]| -> Vec<usize> {
        parts.iter().flat_map(|p| p.iter().copied()).collect()
    };
    Ok(
        joint_entropy(dist, &cat(&[x, z]))? + joint_entropy(dist, &cat(&[y, z]))?
            - joint_entropy(dist, &cat(&[x, y, z]))?
            - joint_entropy(dist, z)?,
    )
}
