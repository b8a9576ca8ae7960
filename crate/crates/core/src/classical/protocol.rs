use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{HmpError, Result};
use crate::lp::Q;
use crate::model::{
    decode_matching_index, encode_matching_index, view_of, Answer, HmpInstance, PlayerView,
};

/// Exact probability.
pub type Prob = Q;

/// A distribution over answers. Total mass may be below one; the missing
/// mass means "no answer", which is always wrong.
pub type AnswerDistribution = Vec<(Answer, Prob)>;

/// Message table of one sender.
///
/// `messages[seed * views + view]` where `view = c · 2^{(k-2) r} + others`,
/// `c` and `others` (the visible index strings concatenated in position order)
/// read as big-endian integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenderTable {
    pub player: usize,
    pub bits: usize,
    pub messages: Vec<Bits>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecoderKey {
    /// Shared seed (public coin).
    pub seed: usize,
    /// Matching index decoded from the recipient's view.
    pub index: usize,
    pub messages: Vec<Bits>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderEntry {
    #[serde(flatten)]
    pub key: DecoderKey,
    #[serde(with = "crate::lp::q_serde::pairs")]
    pub answers: AnswerDistribution,
}

/// The recipient. Keys absent from a table produce no answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Decoder {
    /// Entries sorted by key.
    Table { entries: Vec<DecoderEntry> },
    /// Result of sender derandomization: messages are `seeds` concatenated
    /// slices; pick a seed uniformly and run `inner` on its slices.
    SeedSliced {
        inner: Box<Decoder>,
        seeds: usize,
        slice_bits: Vec<usize>,
    },
    /// Seed `i` of this decoder is seed `seeds[i]` of `inner`.
    Remapped {
        inner: Box<Decoder>,
        seeds: Vec<usize>,
    },
}

impl Decoder {
    pub fn table(entries: BTreeMap<DecoderKey, AnswerDistribution>) -> Self {
        Decoder::Table {
            entries: entries
                .into_iter()
                .map(|(key, answers)| DecoderEntry { key, answers })
                .collect(),
        }
    }

    pub fn answer(&self, seed: usize, index: usize, messages: &[Bits]) -> AnswerDistribution {
        match self {
            Decoder::Table { entries } => {
                let probe = DecoderKey {
                    seed,
                    index,
                    messages: messages.to_vec(),
                };
                entries
                    .binary_search_by(|e| e.key.cmp(&probe))
                    .map(|pos| entries[pos].answers.clone())
                    .unwrap_or_default()
            }
            Decoder::SeedSliced {
                inner,
                seeds,
                slice_bits,
            } => {
                assert_eq!(seed, 0, "derandomized decoder has a single shared seed");
                let weight = Prob::new(1, *seeds as i128);
                let mut merged: BTreeMap<Answer, Prob> = BTreeMap::new();
                for s in 0..*seeds {
                    let slices: Vec<Bits> = messages
                        .iter()
                        .zip(slice_bits)
                        .map(|(m, &len)| m.slice(s * len, len))
                        .collect();
                    for (a, p) in inner.answer(s, index, &slices) {
                        *merged.entry(a).or_insert_with(Prob::zero) += p * weight;
                    }
                }
                merged.into_iter().collect()
            }
            Decoder::Remapped { inner, seeds } => inner.answer(seeds[seed], index, messages),
        }
    }

    /// True when every distribution is a point mass or empty.
    pub fn is_deterministic(&self) -> bool {
        match self {
            Decoder::Table { entries } => entries.iter().all(|e| {
                e.answers.is_empty() || (e.answers.len() == 1 && e.answers[0].1 == Prob::one())
            }),
            Decoder::SeedSliced { inner, seeds, .. } => *seeds == 1 && inner.is_deterministic(),
            Decoder::Remapped { inner, .. } => inner.is_deterministic(),
        }
    }
}

/// A non-interactive one-way protocol: senders `1..k` each send a fixed-length
/// message to player `k`, who answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneWayProtocol {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    /// Size of the public-coin seed set shared by all players.
    pub shared_seeds: usize,
    pub senders: Vec<SenderTable>,
    pub decoder: Decoder,
}

impl OneWayProtocol {
    /// Number of distinct views of one sender.
    pub fn views_per_seed(&self) -> usize {
        (1usize << self.n) << ((self.k - 2) * self.r)
    }

    pub fn cost(&self) -> usize {
        self.senders.iter().map(|s| s.bits).sum()
    }

    pub fn has_deterministic_senders(&self) -> bool {
        self.shared_seeds == 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.r == 0 || self.n == 0 || self.shared_seeds == 0 {
            return Err(HmpError::invalid("degenerate protocol parameters"));
        }
        if self.senders.len() != self.k - 1 {
            return Err(HmpError::invalid(format!(
                "expected {} senders",
                self.k - 1
            )));
        }
        let expected = self.views_per_seed() * self.shared_seeds;
        for (i, s) in self.senders.iter().enumerate() {
            if s.player != i + 1 {
                return Err(HmpError::invalid("senders out of order"));
            }
            if s.messages.len() != expected {
                return Err(HmpError::invalid(format!(
                    "sender {} has {} messages, expected {expected}",
                    s.player,
                    s.messages.len()
                )));
            }
            if s.messages.iter().any(|m| m.len() != s.bits) {
                return Err(HmpError::invalid(format!(
                    "sender {} message exceeds or misses its {} bits",
                    s.player, s.bits
                )));
            }
        }
        Ok(())
    }

    pub fn view_index(&self, view: &PlayerView) -> usize {
        let c = view.c.as_ref().expect("senders see c").to_u64() as usize;
        let others = view.alphas_concat();
        (c << others.len()) | others.to_u64() as usize
    }

    /// Message of `player` (1-based sender) on `view` under shared seed `seed`.
    pub fn message(&self, player: usize, seed: usize, view: &PlayerView) -> &Bits {
        let idx = seed * self.views_per_seed() + self.view_index(view);
        &self.senders[player - 1].messages[idx]
    }

    pub fn messages_for(&self, instance: &HmpInstance, seed: usize) -> Vec<Bits> {
        (1..self.k)
            .map(|i| {
                let view = view_of(instance, i).expect("sender in range");
                self.message(i, seed, &view).clone()
            })
            .collect()
    }

    /// Answer distribution of the recipient on `instance` under shared seed `seed`.
    pub fn answer_distribution(&self, instance: &HmpInstance, seed: usize) -> AnswerDistribution {
        let messages = self.messages_for(instance, seed);
        let view = view_of(instance, self.k).expect("recipient in range");
        let index = recipient_index(&view);
        self.decoder.answer(seed, index, &messages)
    }

    /// Build a protocol from message and decoder functions.
    ///
    /// `sender(player, seed, view)` must return exactly `bits[player - 1]`
    /// bits. `decoder(seed, view, messages)` sees only the recipient's view.
    /// The decoder table is filled for every reachable key.
    pub fn from_fns<S, D>(
        n: usize,
        k: usize,
        r: usize,
        shared_seeds: usize,
        bits: &[usize],
        sender: S,
        decoder: D,
    ) -> Result<Self>
    where
        S: Fn(usize, usize, &PlayerView) -> Bits,
        D: Fn(usize, &PlayerView, &[Bits]) -> AnswerDistribution,
    {
        if k < 2 || bits.len() != k - 1 {
            return Err(HmpError::invalid("one message length per sender required"));
        }
        if n == 0 || n % 2 != 0 || r == 0 || shared_seeds == 0 {
            return Err(HmpError::invalid("degenerate protocol parameters"));
        }
        if n + (k - 1) * r > 24 {
            return Err(HmpError::Refused {
                reason: "protocol tables too large to tabulate".into(),
                log2_size: (n + (k - 1) * r) as f64,
            });
        }
        let other_bits = (k - 2) * r;
        let mut senders = Vec::with_capacity(k - 1);
        for player in 1..k {
            let mut messages = Vec::with_capacity(shared_seeds << (n + other_bits));
            for seed in 0..shared_seeds {
                for c in Bits::all(n) {
                    for others in Bits::all(other_bits) {
                        let visible_alphas = (1..k)
                            .filter(|&pos| pos != player)
                            .enumerate()
                            .map(|(slot, pos)| (pos, others.slice(slot * r, r)))
                            .collect();
                        let view = PlayerView {
                            player,
                            visible_alphas,
                            c: Some(c.clone()),
                        };
                        let m = sender(player, seed, &view);
                        if m.len() != bits[player - 1] {
                            return Err(HmpError::invalid(format!(
                                "sender {player} produced {} bits, declared {}",
                                m.len(),
                                bits[player - 1]
                            )));
                        }
                        messages.push(m);
                    }
                }
            }
            senders.push(SenderTable {
                player,
                bits: bits[player - 1],
                messages,
            });
        }
        let mut protocol = OneWayProtocol {
            n,
            k,
            r,
            shared_seeds,
            senders,
            decoder: Decoder::Table {
                entries: Vec::new(),
            },
        };

        let mut entries: BTreeMap<DecoderKey, AnswerDistribution> = BTreeMap::new();
        let indices = 1usize << ((k - 1) * r);
        for seed in 0..shared_seeds {
            for c in Bits::all(n) {
                for index in 1..=indices {
                    let inst =
                        HmpInstance::new(n, k, r, encode_matching_index(index, k, r)?, c.clone())?;
                    let messages = protocol.messages_for(&inst, seed);
                    let key = DecoderKey {
                        seed,
                        index,
                        messages,
                    };
                    if let std::collections::btree_map::Entry::Vacant(slot) = entries.entry(key) {
                        let view = view_of(&inst, k)?;
                        let answers = decoder(seed, &view, &slot.key().messages);
                        check_distribution(&answers)?;
                        slot.insert(answers);
                    }
                }
            }
        }
        protocol.decoder = Decoder::table(entries);
        Ok(protocol)
    }
}

pub(crate) fn recipient_index(view: &PlayerView) -> usize {
    let alphas: Vec<Bits> = view.visible_alphas.iter().map(|(_, a)| a.clone()).collect();
    decode_matching_index(&alphas).expect("recipient sees every index string")
}

fn check_distribution(d: &AnswerDistribution) -> Result<()> {
    let total: Prob = d.iter().map(|(_, p)| *p).sum();
    if d.iter().any(|(_, p)| *p < Prob::zero()) || total > Prob::one() {
        return Err(HmpError::invalid(
            "decoder returned an invalid distribution",
        ));
    }
    Ok(())
}
