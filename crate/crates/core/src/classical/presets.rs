//! Ready-made protocols used by tests and the command line.

use num_traits::One;

use super::protocol::{AnswerDistribution, OneWayProtocol, Prob};
use super::recipient_index;
use crate::bits::Bits;
use crate::error::{HmpError, Result};
use crate::families::MatchingFamily;
use crate::model::{required_index_bits, Answer, PlayerView};
use crate::seed;

fn layout(family: &MatchingFamily, k: usize) -> Result<usize> {
    if k < 2 {
        return Err(HmpError::invalid(format!(
            "need at least 2 players, got {k}"
        )));
    }
    Ok(required_index_bits(k, family.t()))
}

fn point(i1: usize, i2: usize, e: bool) -> AnswerDistribution {
    vec![(Answer { i1, i2, e }, Prob::one())]
}

fn first_edge(family: &MatchingFamily, view: &PlayerView) -> Option<(usize, (usize, usize))> {
    let j = recipient_index(view);
    (j <= family.t()).then(|| (j, family.matching(j)[0]))
}

/// Every sender sends `bits` zeros; the recipient answers the first edge of
/// the selected matching with parity 0.
pub fn constant_protocol(family: &MatchingFamily, k: usize, bits: usize) -> Result<OneWayProtocol> {
    let r = layout(family, k)?;
    OneWayProtocol::from_fns(
        family.n(),
        k,
        r,
        1,
        &vec![bits; k - 1],
        |_, _, _| Bits::zeros(bits),
        |_, view, _| {
            first_edge(family, view).map_or_else(Vec::new, |(_, (u, v))| point(u, v, false))
        },
    )
}

/// Sender 1 sends `c` in full, the others send nothing.
pub fn verbatim_protocol(family: &MatchingFamily, k: usize) -> Result<OneWayProtocol> {
    let r = layout(family, k)?;
    let n = family.n();
    let mut bits = vec![0; k - 1];
    bits[0] = n;
    OneWayProtocol::from_fns(
        n,
        k,
        r,
        1,
        &bits,
        |player, _, view| {
            if player == 1 {
                view.c.clone().expect("senders see c")
            } else {
                Bits::zeros(0)
            }
        },
        |_, view, messages| match first_edge(family, view) {
            Some((_, (u, v))) => point(u, v, messages[0].get(u - 1) ^ messages[0].get(v - 1)),
            None => Vec::new(),
        },
    )
}

/// Sender 1 sends, for every matching in order, the parity of its first
/// edge (`t` bits). Exact for every `k`.
pub fn edge_parity_protocol(family: &MatchingFamily, k: usize) -> Result<OneWayProtocol> {
    let r = layout(family, k)?;
    let mut bits = vec![0; k - 1];
    bits[0] = family.t();
    OneWayProtocol::from_fns(
        family.n(),
        k,
        r,
        1,
        &bits,
        |player, _, view| {
            if player != 1 {
                return Bits::zeros(0);
            }
            let c = view.c.as_ref().expect("senders see c");
            family
                .matchings()
                .iter()
                .map(|m| c.get(m[0].0 - 1) ^ c.get(m[0].1 - 1))
                .collect::<Vec<bool>>()
                .into()
        },
        |_, view, messages| match first_edge(family, view) {
            Some((j, (u, v))) => point(u, v, messages[0].get(j - 1)),
            None => Vec::new(),
        },
    )
}

/// No communication; the recipient names the first edge with a uniformly
/// random parity bit.
pub fn guess_protocol(family: &MatchingFamily, k: usize) -> Result<OneWayProtocol> {
    let r = layout(family, k)?;
    OneWayProtocol::from_fns(
        family.n(),
        k,
        r,
        1,
        &vec![0; k - 1],
        |_, _, _| Bits::zeros(0),
        |_, view, _| match first_edge(family, view) {
            Some((_, (u, v))) => vec![
                (
                    Answer {
                        i1: u,
                        i2: v,
                        e: false,
                    },
                    Prob::new(1, 2),
                ),
                (
                    Answer {
                        i1: u,
                        i2: v,
                        e: true,
                    },
                    Prob::new(1, 2),
                ),
            ],
            None => Vec::new(),
        },
    )
}

fn low_bits(value: u64, len: usize) -> Bits {
    let masked = if len >= 64 {
        value
    } else {
        value & ((1u64 << len) - 1)
    };
    Bits::from_u64(masked, len)
}

/// Deterministic protocol with pseudo-random sender tables (`bits` per
/// sender) and a pseudo-random deterministic decoder, all derived from `seed`.
pub fn random_protocol(
    family: &MatchingFamily,
    k: usize,
    bits: usize,
    seed: u64,
) -> Result<OneWayProtocol> {
    if bits > 64 {
        return Err(HmpError::invalid("at most 64 bits per random message"));
    }
    let r = layout(family, k)?;
    let sender_seed = seed::derive(seed, 0);
    let decoder_seed = seed::derive(seed, 1);
    OneWayProtocol::from_fns(
        family.n(),
        k,
        r,
        1,
        &vec![bits; k - 1],
        |player, _, view| {
            let c = view.c.as_ref().expect("senders see c").to_u64();
            let others = view.alphas_concat().to_u64();
            let label = seed::derive(seed::derive(player as u64, c), others);
            low_bits(seed::derive(sender_seed, label), bits)
        },
        |_, view, messages| {
            let j = recipient_index(view);
            if j > family.t() {
                return Vec::new();
            }
            let label = messages.iter().fold(j as u64, |acc, m| {
                seed::derive(acc, m.to_u64() ^ ((m.len() as u64) << 56))
            });
            let v = seed::derive(decoder_seed, label);
            let m = family.matching(j);
            let (a, b) = m[(v % m.len() as u64) as usize];
            point(a, b, (v >> 32) & 1 == 1)
        },
    )
}
