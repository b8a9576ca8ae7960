use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::entropy::{entropy, mutual_information, EmpiricalDistribution};
use super::extraction::{bound_e_a, check_pair, extract_from_bundle, ExtractionRecord};
use crate::bits::Bits;
use crate::classical::{build_message_bundle, OneWayProtocol};
use crate::error::{HmpError, Result};
use crate::families::MatchingFamily;
use crate::graph::Edge;
use crate::model::is_separation_regime;
use crate::seed;

/// Largest `n` enumerated exactly.
pub const EXACT_MAX_N: usize = 12;

/// Slack on the information inequalities for floating-point error.
pub const E0_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum AccountingMode {
    /// Every `c` once, with probability `2^-n`.
    Exact,
    /// Plug-in estimates from uniformly drawn `c`.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountingReport {
    #[serde(flatten)]
    pub mode: AccountingMode,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// Number of `c` values evaluated.
    pub evaluated: usize,
    /// `|W|`.
    pub bundle_bits: usize,
    pub i_ab_c: f64,
    pub i_w_c: f64,
    pub h_w: f64,
    pub s_min: usize,
    pub s_max: usize,
    pub s_mean: f64,
    /// `Pr(B_j = C_u xor C_v)` for `(u, v) = A_j`, over the runs reaching step `j`.
    pub success_rates: Vec<f64>,
    /// `min_j success_rates[j] - 1/2`.
    pub margin: f64,
    /// Measured advantage: success at least `1/2 + epsilon/2` at every step.
    pub epsilon: f64,
    /// `epsilon^2 / 64`.
    pub xi: f64,
    /// `t^{1 - 1/(2k+1)} / 360k`.
    pub bound_e_a: f64,
    pub e_a_holds: bool,
    /// `I(AB;C) <= I(W;C) <= H(W) <= |W|` within `E0_TOLERANCE`.
    pub e0_holds: bool,
    pub regime: bool,
}

#[derive(Default)]
struct Interner<K: Ord> {
    ids: BTreeMap<K, u64>,
}

impl<K: Ord> Interner<K> {
    fn id(&mut self, key: K) -> u64 {
        let next = self.ids.len() as u64;
        *self.ids.entry(key).or_insert(next)
    }
}

/// Joint statistics over `(AB, W, C)` built from runs.
struct Tally {
    ab: Interner<(Vec<Edge>, Bits)>,
    w: Interner<Bits>,
    outcomes: Vec<Vec<u64>>,
    s: Vec<usize>,
    reached: Vec<usize>,
    correct: Vec<usize>,
    bundle_bits: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            ab: Interner::default(),
            w: Interner {
                ids: BTreeMap::new(),
            },
            outcomes: Vec::new(),
            s: Vec::new(),
            reached: Vec::new(),
            correct: Vec::new(),
            bundle_bits: 0,
        }
    }

    fn add(&mut self, c: &Bits, w: Bits, rec: ExtractionRecord) {
        let flags = rec.correctness(c);
        if self.reached.len() < flags.len() {
            self.reached.resize(flags.len(), 0);
            self.correct.resize(flags.len(), 0);
        }
        for (j, ok) in flags.into_iter().enumerate() {
            self.reached[j] += 1;
            self.correct[j] += ok as usize;
        }
        self.bundle_bits = rec.bundle_bits;
        self.s.push(rec.s);
        let ab = self.ab.id((rec.a, rec.b));
        let w = self.w.id(w);
        self.outcomes.push(vec![ab, w, c.to_u64()]);
    }

    fn report(
        self,
        mode: AccountingMode,
        p: &OneWayProtocol,
        family: &MatchingFamily,
    ) -> Result<AccountingReport> {
        let evaluated = self.outcomes.len();
        let joint = EmpiricalDistribution::from_samples(self.outcomes)?;
        let i_ab_c = mutual_information(&joint, &[0], &[2], &[])?;
        let i_w_c = mutual_information(&joint, &[1], &[2], &[])?;
        let h_w = entropy(&joint.marginal(&[1])?);
        let success_rates: Vec<f64> = self
            .correct
            .iter()
            .zip(&self.reached)
            .map(|(&ok, &all)| ok as f64 / all as f64)
            .collect();
        let min_success = success_rates.iter().copied().fold(f64::INFINITY, f64::min);
        let margin = if success_rates.is_empty() {
            0.0
        } else {
            min_success - 0.5
        };
        let epsilon = (2.0 * margin).max(0.0);
        let s_min = self.s.iter().copied().min().unwrap_or(0);
        let bound = bound_e_a(family.t(), p.k);
        let w_bits = self.bundle_bits as f64;
        Ok(AccountingReport {
            mode,
            n: p.n,
            k: p.k,
            t: family.t(),
            evaluated,
            bundle_bits: self.bundle_bits,
            i_ab_c,
            i_w_c,
            h_w,
            s_min,
            s_max: self.s.iter().copied().max().unwrap_or(0),
            s_mean: self.s.iter().sum::<usize>() as f64 / evaluated as f64,
            success_rates,
            margin,
            epsilon,
            xi: epsilon * epsilon / 64.0,
            bound_e_a: bound,
            e_a_holds: s_min as f64 >= bound,
            e0_holds: i_ab_c <= i_w_c + E0_TOLERANCE
                && i_w_c <= h_w + E0_TOLERANCE
                && h_w <= w_bits + E0_TOLERANCE,
            regime: is_separation_regime(p.k, family.t()),
        })
    }
}

/// Information accounting with `C` uniform on `{0,1}^n`: `I(AB;C)`, `I(W;C)`,
/// `H(W)`, per-step success rates and the step bound.
pub fn information_accounting(
    p: &OneWayProtocol,
    family: &MatchingFamily,
    mode: AccountingMode,
) -> Result<AccountingReport> {
    check_pair(p, family)?;
    let n = p.n;
    let mut tally = Tally::new();
    match mode {
        AccountingMode::Exact => {
            if n > EXACT_MAX_N {
                return Err(HmpError::Refused {
                    reason: format!(
                        "exact accounting enumerates 2^{n} strings; limit is n = {EXACT_MAX_N}"
                    ),
                    log2_size: n as f64,
                });
            }
            if !p.decoder.is_deterministic() {
                return Err(HmpError::invalid(
                    "exact accounting needs a deterministic decoder",
                ));
            }
            // The decoder never consults this generator.
            let mut unused = seed::rng(0);
            for c in Bits::all(n) {
                let bundle = build_message_bundle(p, &c)?;
                let rec = extract_from_bundle(p, family, &bundle, &mut unused)?;
                tally.add(&c, bundle.concat(), rec);
            }
        }
        AccountingMode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(HmpError::invalid(
                    "sampled accounting needs at least one sample",
                ));
            }
            if n > 64 {
                return Err(HmpError::invalid("sampled accounting supports n <= 64"));
            }
            let mut inputs = seed::stream(seed, 0);
            let mut decoder = seed::stream(seed, 1);
            for _ in 0..samples {
                let value = if n == 64 {
                    inputs.gen::<u64>()
                } else {
                    inputs.gen_range(0..1u64 << n)
                };
                let c = Bits::from_u64(value, n);
                let bundle = build_message_bundle(p, &c)?;
                let rec = extract_from_bundle(p, family, &bundle, &mut decoder)?;
                tally.add(&c, bundle.concat(), rec);
            }
        }
    }
    tally.report(mode, p, family)
}
