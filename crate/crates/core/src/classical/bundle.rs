use serde::{Deserialize, Serialize};

use super::protocol::OneWayProtocol;
use crate::bits::Bits;
use crate::error::{HmpError, Result};
use crate::model::{encode_matching_index, special_inputs, HmpInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleEntry {
    /// The special input tuple; empty for two players.
    pub alphas: Vec<Bits>,
    /// Messages of senders `1..k`, in order.
    pub messages: Vec<Bits>,
}

/// Everything the senders ever send for one hidden string `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageBundle {
    pub k: usize,
    pub r: usize,
    pub entries: Vec<BundleEntry>,
    pub total_bits: usize,
}

impl MessageBundle {
    /// The bundle as one bit string.
    pub fn concat(&self) -> Bits {
        Bits::concat(self.entries.iter().flat_map(|e| e.messages.iter()))
    }

    /// Reconstruct the messages player `k` receives when the index strings
    /// encode matching `index`: sender `i` ignores `α_i`, and some special
    /// tuple agrees with the target everywhere else.
    pub fn messages_for_index(&self, index: usize) -> Result<Vec<Bits>> {
        if self.k == 2 {
            return Ok(self.entries[0].messages.clone());
        }
        let target = encode_matching_index(index, self.k, self.r)?;
        (0..self.k - 1)
            .map(|i| {
                self.entries
                    .iter()
                    .find(|e| {
                        e.alphas
                            .iter()
                            .zip(&target)
                            .enumerate()
                            .all(|(pos, (a, b))| pos == i || a == b)
                    })
                    .map(|e| e.messages[i].clone())
                    .ok_or_else(|| HmpError::invalid("bundle does not cover the requested view"))
            })
            .collect()
    }
}

/// Collect the sender messages on every special input for hidden string `c`.
pub fn build_message_bundle(p: &OneWayProtocol, c: &Bits) -> Result<MessageBundle> {
    p.validate()?;
    if !p.has_deterministic_senders() {
        return Err(HmpError::invalid(
            "senders share randomness; derandomize them before bundling",
        ));
    }
    if c.len() != p.n {
        return Err(HmpError::invalid(format!(
            "c has {} bits, expected {}",
            c.len(),
            p.n
        )));
    }
    let entries = if p.k == 2 {
        let inst = HmpInstance::new(p.n, 2, p.r, vec![Bits::zeros(p.r)], c.clone())?;
        vec![BundleEntry {
            alphas: Vec::new(),
            messages: p.messages_for(&inst, 0),
        }]
    } else {
        special_inputs(p.r, p.k)?
            .into_iter()
            .map(|alphas| {
                let inst = HmpInstance::new(p.n, p.k, p.r, alphas.clone(), c.clone())?;
                let messages = p.messages_for(&inst, 0);
                Ok(BundleEntry { alphas, messages })
            })
            .collect::<Result<Vec<_>>>()?
    };
    let total_bits = entries
        .iter()
        .flat_map(|e| &e.messages)
        .map(Bits::len)
        .sum();
    Ok(MessageBundle {
        k: p.k,
        r: p.r,
        entries,
        total_bits,
    })
}
