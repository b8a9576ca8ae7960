use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::protocol::{OneWayProtocol, Prob};
use crate::bits::Bits;
use crate::error::{HmpError, Result};
use crate::families::MatchingFamily;
use crate::model::{relation_holds, HmpInstance};

/// A valid input: hidden string and the (1-based) matching it selects.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InputKey {
    pub c: Bits,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputDistribution {
    Uniform,
    /// Non-negative weights over valid inputs; normalized on use.
    Explicit(Vec<(InputKey, f64)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    #[serde(with = "crate::lp::q_serde")]
    pub worst_case_error: Prob,
    pub distributional_error: f64,
    pub distribution: String,
    #[serde(with = "crate::lp::q_serde::pairs")]
    pub per_input_errors: Vec<(InputKey, Prob)>,
}

impl ErrorReport {
    pub fn worst_case_f64(&self) -> f64 {
        self.worst_case_error.to_f64().unwrap_or(f64::NAN)
    }

    pub fn error_of(&self, key: &InputKey) -> Option<Prob> {
        self.per_input_errors
            .binary_search_by(|(k, _)| k.cmp(key))
            .ok()
            .map(|pos| self.per_input_errors[pos].1)
    }
}

/// Exact error of `p` on `instance`: the probability over the shared seed and
/// the decoder's distribution that the answer is wrong.
pub fn input_error(p: &OneWayProtocol, family: &MatchingFamily, instance: &HmpInstance) -> Prob {
    let per_seed = Prob::new(1, p.shared_seeds as i128);
    let mut success = Prob::zero();
    for seed in 0..p.shared_seeds {
        for (answer, weight) in p.answer_distribution(instance, seed) {
            if relation_holds(instance, family, &answer) {
                success += weight * per_seed;
            }
        }
    }
    Prob::one() - success
}

/// Exact per-input error over every valid input (every `c`, every matching
/// index `<= t`).
pub fn evaluate_protocol(
    p: &OneWayProtocol,
    family: &MatchingFamily,
    distribution: &InputDistribution,
) -> Result<ErrorReport> {
    p.validate()?;
    if p.n != family.n() {
        return Err(HmpError::invalid(format!(
            "protocol has n = {}, family has n = {}",
            p.n,
            family.n()
        )));
    }
    let indices = 1u128 << ((p.k - 1) * p.r);
    if (family.t() as u128) > indices {
        return Err(HmpError::invalid(format!(
            "{} matchings cannot be addressed with {} index bits",
            family.t(),
            (p.k - 1) * p.r
        )));
    }
    let mut per_input = Vec::with_capacity(family.t() << p.n);
    for c in Bits::all(p.n) {
        for index in 1..=family.t() {
            let inst = HmpInstance::for_matching(p.k, p.r, index, c.clone())?;
            per_input.push((
                InputKey {
                    c: c.clone(),
                    index,
                },
                input_error(p, family, &inst),
            ));
        }
    }
    per_input.sort_by(|a, b| a.0.cmp(&b.0));
    let worst = per_input
        .iter()
        .map(|(_, e)| *e)
        .max()
        .unwrap_or_else(Prob::zero);

    let (tag, distributional) = match distribution {
        InputDistribution::Uniform => {
            let total: Prob = per_input.iter().map(|(_, e)| *e).sum();
            let avg = total / Prob::from_integer(per_input.len() as i128);
            ("uniform".to_string(), avg.to_f64().unwrap_or(f64::NAN))
        }
        InputDistribution::Explicit(weights) => {
            let mut num = 0.0;
            let mut den = 0.0;
            for (key, w) in weights {
                if *w < 0.0 {
                    return Err(HmpError::invalid("negative input weight"));
                }
                let pos = per_input
                    .binary_search_by(|(k, _)| k.cmp(key))
                    .map_err(|_| HmpError::invalid(format!("{key:?} is not a valid input")))?;
                num += w * per_input[pos].1.to_f64().unwrap_or(f64::NAN);
                den += w;
            }
            if den <= 0.0 {
                return Err(HmpError::invalid("input weights sum to zero"));
            }
            ("explicit".to_string(), num / den)
        }
    };
    Ok(ErrorReport {
        worst_case_error: worst,
        distributional_error: distributional,
        distribution: tag,
        per_input_errors: per_input,
    })
}
