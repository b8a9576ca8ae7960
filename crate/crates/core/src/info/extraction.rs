use std::collections::BTreeSet;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::classical::{
    build_message_bundle, AnswerDistribution, MessageBundle, OneWayProtocol, Prob,
};
use crate::error::{HmpError, Result};
use crate::families::MatchingFamily;
use crate::graph::Edge;
use crate::model::Answer;

/// Output of the greedy extraction loop for one hidden string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionRecord {
    /// Chosen edges, each as `(min, max)`.
    pub a: Vec<Edge>,
    /// Predicted parities, one per edge of `a`.
    pub b: Bits,
    /// Endpoints of `a`.
    pub support: BTreeSet<usize>,
    pub s: usize,
    /// Length of the message bundle `W`.
    pub bundle_bits: usize,
    /// Matching queried at each step, aligned with `a`.
    pub queried: Vec<usize>,
    /// Matchings whose query produced no edge of that matching. They are
    /// dropped from further consideration and contribute nothing to `a`.
    pub discarded: Vec<usize>,
}

impl ExtractionRecord {
    /// Whether `b_j = c_u xor c_v` for each `(u, v) = a_j`.
    pub fn correctness(&self, c: &Bits) -> Vec<bool> {
        self.a
            .iter()
            .zip(self.b.iter())
            .map(|(&(u, v), e)| e == (c.get(u - 1) ^ c.get(v - 1)))
            .collect()
    }
}

/// `t^{1 - 1/(2k+1)} / (360 k)`: the guaranteed number of extraction steps.
pub fn bound_e_a(t: usize, k: usize) -> f64 {
    let k = k as f64;
    (t as f64).powf(1.0 - 1.0 / (2.0 * k + 1.0)) / (360.0 * k)
}

pub(crate) fn check_pair(p: &OneWayProtocol, family: &MatchingFamily) -> Result<()> {
    p.validate()?;
    if p.n != family.n() {
        return Err(HmpError::invalid(format!(
            "protocol is for n = {}, family for n = {}",
            p.n,
            family.n()
        )));
    }
    let addressable = 1u128 << ((p.k - 1) * p.r).min(127);
    if family.t() as u128 > addressable {
        return Err(HmpError::invalid(format!(
            "family has {} matchings but the index strings address only {addressable}",
            family.t()
        )));
    }
    if !p.has_deterministic_senders() {
        return Err(HmpError::invalid(
            "senders share randomness; derandomize them first",
        ));
    }
    Ok(())
}

/// Draw from a sub-stochastic distribution; `None` is the missing mass.
fn sample_answer<R: Rng>(dist: &AnswerDistribution, rng: &mut R) -> Option<Answer> {
    if let [(answer, p)] = dist.as_slice() {
        if *p == Prob::from_integer(1) {
            return Some(*answer);
        }
    }
    let u = Prob::new(rng.gen::<u64>() as i128, 1i128 << 64);
    let mut acc = Prob::zero();
    for (answer, p) in dist {
        acc += *p;
        if u < acc {
            return Some(*answer);
        }
    }
    None
}

/// Run the loop against an already built bundle.
pub fn extract_from_bundle<R: Rng>(
    p: &OneWayProtocol,
    family: &MatchingFamily,
    bundle: &MessageBundle,
    rng: &mut R,
) -> Result<ExtractionRecord> {
    let n = family.n();
    let mut in_support = vec![false; n + 1];
    let mut dropped = vec![false; family.t() + 1];
    let mut record = ExtractionRecord {
        a: Vec::new(),
        b: Bits::new(Vec::new()),
        support: BTreeSet::new(),
        s: 0,
        bundle_bits: bundle.total_bits,
        queried: Vec::new(),
        discarded: Vec::new(),
    };
    let mut b = Vec::new();
    loop {
        let eligible = (1..=family.t()).find(|&j| {
            !dropped[j]
                && family
                    .matching(j)
                    .iter()
                    .all(|&(u, v)| !(in_support[u] && in_support[v]))
        });
        let Some(j) = eligible else { break };
        let messages = bundle.messages_for_index(j)?;
        let answer = sample_answer(&p.decoder.answer(0, j, &messages), rng);
        match answer.filter(|a| family.matching(j).contains(&a.edge())) {
            Some(a) => {
                let (u, v) = a.edge();
                in_support[u] = true;
                in_support[v] = true;
                record.support.extend([u, v]);
                record.a.push((u, v));
                record.queried.push(j);
                b.push(a.e);
            }
            None => {
                dropped[j] = true;
                record.discarded.push(j);
            }
        }
    }
    record.b = Bits::new(b);
    record.s = record.a.len();
    Ok(record)
}

/// Greedy extraction: repeatedly take the lowest-index matching whose edges
/// each have at most one endpoint in the current support, answer it from the
/// message bundle of `c`, and record the edge and parity.
pub fn extract_ab<R: Rng>(
    p: &OneWayProtocol,
    family: &MatchingFamily,
    c: &Bits,
    rng: &mut R,
) -> Result<ExtractionRecord> {
    check_pair(p, family)?;
    let bundle = build_message_bundle(p, c)?;
    extract_from_bundle(p, family, &bundle, rng)
}
