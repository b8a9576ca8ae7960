//! Exhaustive search for the cheapest two-party one-way protocol.
//!
//! A deterministic sender is a map from `c` to an `L`-bit message, i.e. a
//! partition of `{0,1}^n` into at most `2^L` blocks; message labels are
//! irrelevant, so partitions are enumerated as restricted growth strings.
//! For a fixed partition the recipient's best answer distribution on
//! (block, matching) is the optimal strategy of a small zero-sum game
//! against the worst `c` in the block, solved exactly by linear programming.
//! The game only depends on which edge-parity patterns of the matching occur
//! in the block, so game values are cached per pattern set.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::protocol::{AnswerDistribution, Decoder, DecoderKey, OneWayProtocol, Prob, SenderTable};
use crate::bits::Bits;
use crate::error::{HmpError, Result};
use crate::families::MatchingFamily;
use crate::lp::{maximize, Q};
use crate::model::{required_index_bits, Answer};

const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Deterministic,
    /// Sender mappings drawn from this many shared (public) seeds.
    SharedSeeds(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_bits: usize,
    /// Search nodes (deterministic) or sender-tuples (shared seeds) per length.
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_bits: 8,
            max_nodes: 200_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthOutcome {
    pub bits: usize,
    pub feasible: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub cost: usize,
    pub epsilon: f64,
    pub mode: SearchMode,
    /// Exact worst-case error of the returned protocol.
    #[serde(with = "crate::lp::q_serde")]
    pub worst_case_error: Prob,
    pub per_length: Vec<LengthOutcome>,
    pub protocol: OneWayProtocol,
}

/// Edge-parity pattern of every `c` under every matching.
struct Patterns {
    n: usize,
    half: usize,
    /// `by_matching[j][c]`: bit `e` is the parity of edge `e` of matching `j + 1`.
    by_matching: Vec<Vec<u64>>,
    family: Vec<Vec<(usize, usize)>>,
}

impl Patterns {
    fn new(family: &MatchingFamily) -> Self {
        let n = family.n();
        let by_matching = family
            .matchings()
            .iter()
            .map(|m| {
                (0..1u64 << n)
                    .map(|c| {
                        let bit = |v: usize| (c >> (n - v)) & 1;
                        m.iter()
                            .enumerate()
                            .fold(0, |acc, (e, &(a, b))| acc | ((bit(a) ^ bit(b)) << e))
                    })
                    .collect()
            })
            .collect();
        Patterns {
            n,
            half: n / 2,
            by_matching,
            family: family.matchings().to_vec(),
        }
    }

    fn answer(&self, j: usize, a: usize) -> Answer {
        let (u, v) = self.family[j][a / 2];
        Answer {
            i1: u,
            i2: v,
            e: a % 2 == 1,
        }
    }
}

/// Best worst-case answer distribution for one set of parity patterns.
/// Answers are indexed `2 * edge + parity`.
fn solve_block(half: usize, mask: u64) -> (Prob, Vec<Prob>) {
    let answers = 2 * half;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for p in (0..64).filter(|p| mask >> p & 1 == 1) {
        let mut row: Vec<Q> = (0..answers)
            .map(|a| {
                if (p >> (a / 2)) & 1 == (a % 2) as u64 {
                    -Q::one()
                } else {
                    Q::zero()
                }
            })
            .collect();
        row.push(Q::one());
        rows.push(row);
        rhs.push(Q::zero());
    }
    let mut total: Vec<Q> = vec![Q::one(); answers];
    total.push(Q::zero());
    rows.push(total);
    rhs.push(Q::one());
    let mut objective = vec![Q::zero(); answers];
    objective.push(Q::one());
    let sol = maximize(&objective, &rows, &rhs).expect("success probability is bounded");
    let mut strategy: Vec<Prob> = sol.x[..answers].to_vec();
    top_up(&mut strategy);
    (Prob::one() - sol.value, strategy)
}

/// Extra mass never hurts a non-negative payoff; put any slack on the
/// heaviest answer so the distribution sums to one.
fn top_up(strategy: &mut [Prob]) {
    let sum: Prob = strategy.iter().copied().sum();
    if sum < Prob::one() {
        let best = (0..strategy.len())
            .max_by_key(|&i| strategy[i])
            .unwrap_or(0);
        strategy[best] += Prob::one() - sum;
    }
}

struct BlockCache {
    half: usize,
    epsilon: f64,
    solved: HashMap<u64, (Prob, Vec<Prob>)>,
}

impl BlockCache {
    fn get(&mut self, mask: u64) -> &(Prob, Vec<Prob>) {
        let half = self.half;
        self.solved
            .entry(mask)
            .or_insert_with(|| solve_block(half, mask))
    }

    fn valid(&mut self, mask: u64) -> bool {
        let eps = self.epsilon;
        self.get(mask).0.to_f64().unwrap_or(f64::INFINITY) <= eps + TOLERANCE
    }
}

/// Smallest message length admitting a protocol with worst-case error at
/// most `epsilon`.
pub fn bruteforce_min_cost(
    family: &MatchingFamily,
    k: usize,
    epsilon: f64,
    mode: SearchMode,
    limits: SearchLimits,
) -> Result<BruteForceResult> {
    if k != 2 {
        return Err(HmpError::invalid(format!(
            "exhaustive search is only defined for two players, got k = {k}"
        )));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(HmpError::invalid(format!(
            "epsilon {epsilon} outside [0, 1]"
        )));
    }
    let n = family.n();
    if n > 6 {
        return Err(HmpError::Refused {
            reason: format!("exhaustive search needs n <= 6, got n = {n}"),
            log2_size: (1u64 << n.min(62)) as f64,
        });
    }
    let patterns = Patterns::new(family);
    let mut cache = BlockCache {
        half: patterns.half,
        epsilon,
        solved: HashMap::new(),
    };
    let r = required_index_bits(2, family.t());
    let mut per_length = Vec::new();

    for bits in 0..=limits.max_bits.min(n) {
        let outcome = match mode {
            SearchMode::Deterministic => {
                let (nodes, found) =
                    search_partition(&patterns, &mut cache, bits, limits.max_nodes)?;
                (nodes, found.map(|a| vec![a]))
            }
            SearchMode::SharedSeeds(seeds) => {
                if seeds == 0 {
                    return Err(HmpError::invalid(
                        "shared-seed mode needs at least one seed",
                    ));
                }
                search_shared(&patterns, bits, seeds, epsilon, limits.max_nodes)?
            }
        };
        match outcome {
            (nodes, None) => per_length.push(LengthOutcome {
                bits,
                feasible: false,
                nodes,
            }),
            (nodes, Some(assignments)) => {
                per_length.push(LengthOutcome {
                    bits,
                    feasible: true,
                    nodes,
                });
                let (protocol, worst) =
                    build_protocol(&patterns, &mut cache, family, r, bits, &assignments)?;
                return Ok(BruteForceResult {
                    cost: bits,
                    epsilon,
                    mode,
                    worst_case_error: worst,
                    per_length,
                    protocol,
                });
            }
        }
    }
    Err(HmpError::Refused {
        reason: format!(
            "no protocol with at most {} bits reaches error {epsilon}",
            limits.max_bits
        ),
        log2_size: (limits.max_bits as f64) * (1u64 << n) as f64,
    })
}

struct PartitionSearch<'a> {
    patterns: &'a Patterns,
    cache: &'a mut BlockCache,
    max_blocks: usize,
    /// `masks[b][j]`: parity patterns of matching `j` present in block `b`.
    masks: Vec<Vec<u64>>,
    assignment: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
}

impl PartitionSearch<'_> {
    fn fits(&mut self, block: usize, c: usize) -> bool {
        let t = self.patterns.by_matching.len();
        (0..t).all(|j| {
            let m = self.masks[block][j] | 1 << self.patterns.by_matching[j][c];
            self.cache.valid(m)
        })
    }

    fn fits_new(&mut self, c: usize) -> bool {
        let t = self.patterns.by_matching.len();
        (0..t).all(|j| self.cache.valid(1 << self.patterns.by_matching[j][c]))
    }

    /// Every unplaced element still has somewhere to go.
    fn forward_ok(&mut self, next: usize) -> bool {
        let total = 1usize << self.patterns.n;
        let used = self.masks.len();
        for c in next..total {
            if used < self.max_blocks && self.fits_new(c) {
                continue;
            }
            if !(0..used).any(|b| self.fits(b, c)) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, c: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(HmpError::Refused {
                reason: format!("search exceeded {} nodes", self.max_nodes),
                log2_size: (1u64 << self.patterns.n) as f64 * (self.max_blocks as f64).log2(),
            });
        }
        let total = 1usize << self.patterns.n;
        if c == total {
            return Ok(true);
        }
        let t = self.patterns.by_matching.len();
        let used = self.masks.len();
        for b in 0..=used.min(self.max_blocks - 1) {
            let fresh = b == used;
            if fresh {
                if !self.fits_new(c) {
                    continue;
                }
                self.masks.push(vec![0; t]);
            } else if !self.fits(b, c) {
                continue;
            }
            let saved = self.masks[b].clone();
            for j in 0..t {
                self.masks[b][j] |= 1 << self.patterns.by_matching[j][c];
            }
            self.assignment[c] = b;
            if self.forward_ok(c + 1) && self.run(c + 1)? {
                return Ok(true);
            }
            self.masks[b] = saved;
            if fresh {
                self.masks.pop();
            }
        }
        Ok(false)
    }
}

fn search_partition(
    patterns: &Patterns,
    cache: &mut BlockCache,
    bits: usize,
    max_nodes: u64,
) -> Result<(u64, Option<Vec<usize>>)> {
    let total = 1usize << patterns.n;
    let mut search = PartitionSearch {
        patterns,
        cache,
        max_blocks: 1 << bits,
        masks: Vec::new(),
        assignment: vec![0; total],
        nodes: 0,
        max_nodes,
    };
    let found = search.run(0)?;
    Ok((search.nodes, found.then(|| search.assignment.clone())))
}

/// Restricted growth strings of length `len` with at most `max_blocks` blocks.
fn all_partitions(len: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    fn rec(
        prefix: &mut Vec<usize>,
        used: usize,
        len: usize,
        max_blocks: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=used.min(max_blocks - 1) {
            prefix.push(b);
            rec(prefix, used.max(b + 1), len, max_blocks, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(len), 0, len, max_blocks, &mut out);
    out
}

/// `Σ_{b <= max_blocks} S(len, b)` in floating point.
fn partition_count(len: usize, max_blocks: usize) -> f64 {
    let mut row = vec![0.0f64; max_blocks + 1];
    row[0] = 1.0;
    for _ in 0..len {
        for b in (1..=max_blocks).rev() {
            row[b] = b as f64 * row[b] + row[b - 1];
        }
        row[0] = 0.0;
    }
    row.iter().sum()
}

/// Binomial coefficient `C(a + s - 1, s)` in floating point: multisets of
/// size `s` from `a` items.
fn multiset_count(a: f64, s: usize) -> f64 {
    (0..s).fold(1.0, |acc, i| acc * (a + i as f64) / (i as f64 + 1.0))
}

fn search_shared(
    patterns: &Patterns,
    bits: usize,
    seeds: usize,
    epsilon: f64,
    max_nodes: u64,
) -> Result<(u64, Option<Vec<Vec<usize>>>)> {
    let total = 1usize << patterns.n;
    let max_blocks = 1usize << bits;
    let count = partition_count(total, max_blocks);
    let tuples = multiset_count(count, seeds);
    if tuples > max_nodes as f64 {
        return Err(HmpError::Refused {
            reason: format!(
                "{seeds}-seed search over {bits}-bit senders exceeds {max_nodes} tuples"
            ),
            log2_size: tuples.log2(),
        });
    }
    let parts = all_partitions(total, max_blocks);
    let mut idx = vec![0usize; seeds];
    let mut nodes = 0u64;
    loop {
        nodes += 1;
        let chosen: Vec<Vec<usize>> = idx.iter().map(|&i| parts[i].clone()).collect();
        let worst = (0..patterns.by_matching.len())
            .map(|j| joint_decoder(patterns, j, &chosen).0)
            .max()
            .unwrap_or_else(Prob::zero);
        if worst.to_f64().unwrap_or(f64::INFINITY) <= epsilon + TOLERANCE {
            return Ok((nodes, Some(chosen)));
        }
        // Next non-decreasing index tuple.
        let mut pos = seeds;
        loop {
            if pos == 0 {
                return Ok((nodes, None));
            }
            pos -= 1;
            if idx[pos] + 1 < parts.len() {
                idx[pos] += 1;
                for later in pos + 1..seeds {
                    idx[later] = idx[pos];
                }
                break;
            }
        }
    }
}

/// Jointly optimal decoder for matching `j` when seed `s` uses partition
/// `assignments[s]`. Returns the worst-case error and, per seed and block,
/// the answer weights.
fn joint_decoder(
    patterns: &Patterns,
    j: usize,
    assignments: &[Vec<usize>],
) -> (Prob, Vec<Vec<Vec<Prob>>>) {
    let seeds = assignments.len();
    let answers = 2 * patterns.half;
    let blocks: Vec<usize> = assignments
        .iter()
        .map(|a| a.iter().copied().max().map_or(0, |m| m + 1))
        .collect();
    let offsets: Vec<usize> = blocks
        .iter()
        .scan(0, |acc, &b| {
            let start = *acc;
            *acc += b * answers;
            Some(start)
        })
        .collect();
    let nvars = blocks.iter().sum::<usize>() * answers + 1;
    let v = nvars - 1;

    // One constraint per distinct (blocks across seeds, pattern) profile.
    let mut profiles: BTreeMap<(Vec<usize>, u64), ()> = BTreeMap::new();
    for c in 0..assignments[0].len() {
        let key: Vec<usize> = assignments.iter().map(|a| a[c]).collect();
        profiles.insert((key, patterns.by_matching[j][c]), ());
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (blocks_of_c, p) in profiles.keys() {
        let mut row = vec![Q::zero(); nvars];
        for (s, &b) in blocks_of_c.iter().enumerate() {
            for a in 0..answers {
                if (p >> (a / 2)) & 1 == (a % 2) as u64 {
                    row[offsets[s] + b * answers + a] = -Q::one();
                }
            }
        }
        row[v] = Q::from_integer(seeds as i128);
        rows.push(row);
        rhs.push(Q::zero());
    }
    for s in 0..seeds {
        for b in 0..blocks[s] {
            let mut row = vec![Q::zero(); nvars];
            for a in 0..answers {
                row[offsets[s] + b * answers + a] = Q::one();
            }
            rows.push(row);
            rhs.push(Q::one());
        }
    }
    let mut objective = vec![Q::zero(); nvars];
    objective[v] = Q::one();
    let sol = maximize(&objective, &rows, &rhs).expect("bounded");
    let strategies = (0..seeds)
        .map(|s| {
            (0..blocks[s])
                .map(|b| {
                    let start = offsets[s] + b * answers;
                    let mut w = sol.x[start..start + answers].to_vec();
                    top_up(&mut w);
                    w
                })
                .collect()
        })
        .collect();
    (Prob::one() - sol.value, strategies)
}

fn build_protocol(
    patterns: &Patterns,
    cache: &mut BlockCache,
    family: &MatchingFamily,
    r: usize,
    bits: usize,
    assignments: &[Vec<usize>],
) -> Result<(OneWayProtocol, Prob)> {
    let n = patterns.n;
    let seeds = assignments.len();
    let t = family.t();
    let messages: Vec<Bits> = assignments
        .iter()
        .flat_map(|a| a.iter().map(|&b| Bits::from_u64(b as u64, bits)))
        .collect();
    let sender = SenderTable {
        player: 1,
        bits,
        messages,
    };

    let mut entries: BTreeMap<DecoderKey, AnswerDistribution> = BTreeMap::new();
    let mut worst = Prob::zero();
    for j in 0..t {
        let strategies: Vec<Vec<Vec<Prob>>> = if seeds == 1 {
            let assignment = &assignments[0];
            let blocks = assignment.iter().copied().max().map_or(0, |m| m + 1);
            let mut per_block = Vec::with_capacity(blocks);
            for b in 0..blocks {
                let mask = (0..1usize << n)
                    .filter(|&c| assignment[c] == b)
                    .fold(0u64, |acc, c| acc | 1 << patterns.by_matching[j][c]);
                let (err, strategy) = cache.get(mask).clone();
                worst = worst.max(err);
                per_block.push(strategy);
            }
            vec![per_block]
        } else {
            let (err, s) = joint_decoder(patterns, j, assignments);
            worst = worst.max(err);
            s
        };
        for (seed, per_block) in strategies.into_iter().enumerate() {
            for (b, weights) in per_block.into_iter().enumerate() {
                let dist: AnswerDistribution = weights
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(a, w)| (patterns.answer(j, a), w))
                    .collect();
                let key = DecoderKey {
                    seed,
                    index: j + 1,
                    messages: vec![Bits::from_u64(b as u64, bits)],
                };
                entries.insert(key, dist);
            }
        }
    }
    let protocol = OneWayProtocol {
        n,
        k: 2,
        r,
        shared_seeds: seeds,
        senders: vec![sender],
        decoder: Decoder::table(entries),
    };
    protocol.validate()?;
    Ok((protocol, worst))
}
