use rand::seq::index;
use rand::Rng;

use super::evaluate::{evaluate_protocol, ErrorReport, InputDistribution};
use super::protocol::{Decoder, OneWayProtocol, SenderTable};
use crate::bits::Bits;
use crate::error::Result;
use crate::families::MatchingFamily;

/// Remove the senders' shared randomness: each sender sends its messages for
/// every seed, concatenated in seed order, and the recipient picks one seed
/// uniformly with private coins and decodes that slice. Cost grows by the
/// factor `|S|`; per-input error is the seed-average of the original.
pub fn derandomize_senders(p: &OneWayProtocol) -> Result<OneWayProtocol> {
    p.validate()?;
    let seeds = p.shared_seeds;
    if seeds == 1 {
        return Ok(p.clone());
    }
    let views = p.views_per_seed();
    let senders = p
        .senders
        .iter()
        .map(|s| SenderTable {
            player: s.player,
            bits: s.bits * seeds,
            messages: (0..views)
                .map(|v| Bits::concat((0..seeds).map(|seed| &s.messages[seed * views + v])))
                .collect(),
        })
        .collect();
    Ok(OneWayProtocol {
        n: p.n,
        k: p.k,
        r: p.r,
        shared_seeds: 1,
        senders,
        decoder: Decoder::SeedSliced {
            inner: Box::new(p.decoder.clone()),
            seeds,
            slice_bits: p.senders.iter().map(|s| s.bits).collect(),
        },
    })
}

/// Keep `sample_count` shared seeds drawn without replacement and measure the
/// exact error of the reduced protocol. Nothing is promised about the result;
/// the caller compares it against its own target.
pub fn reduce_seed_set<R: Rng>(
    p: &OneWayProtocol,
    family: &MatchingFamily,
    sample_count: usize,
    rng: &mut R,
) -> Result<(OneWayProtocol, ErrorReport)> {
    p.validate()?;
    let reduced = if sample_count >= p.shared_seeds || sample_count == 0 {
        p.clone()
    } else {
        let mut chosen = index::sample(rng, p.shared_seeds, sample_count).into_vec();
        chosen.sort_unstable();
        let views = p.views_per_seed();
        let senders = p
            .senders
            .iter()
            .map(|s| SenderTable {
                player: s.player,
                bits: s.bits,
                messages: chosen
                    .iter()
                    .flat_map(|&seed| s.messages[seed * views..(seed + 1) * views].iter().cloned())
                    .collect(),
            })
            .collect();
        OneWayProtocol {
            n: p.n,
            k: p.k,
            r: p.r,
            shared_seeds: chosen.len(),
            senders,
            decoder: Decoder::Remapped {
                inner: Box::new(p.decoder.clone()),
                seeds: chosen,
            },
        }
    };
    let report = evaluate_protocol(&reduced, family, &InputDistribution::Uniform)?;
    Ok((reduced, report))
}
