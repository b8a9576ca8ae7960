//! Exact simulation of the fingerprint SMP protocol.
//!
//! Player 1 sends `(1/√n) Σ (−1)^{c_i} |i⟩`, player `k` sends the index of
//! the selected matching, and the referee measures in the basis
//! `{(|i1⟩ ± |i2⟩)/√2 : (i1, i2) ∈ m}`. States are stored as sign vectors
//! with the implicit scale `1/√n`, so outcome probabilities are exact
//! rationals `((s_a + σ s_b)² / 2) / n`.

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{HmpError, Result};
use crate::families::MatchingFamily;
use crate::graph::Edge;
use crate::model::{ceil_log2, relation_holds, view_of, Answer, HmpInstance};

/// `(1/√n) Σ (−1)^{c_i} |i⟩`, stored as the sign pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FingerprintState {
    negative: Vec<bool>,
}

impl FingerprintState {
    pub fn n(&self) -> usize {
        self.negative.len()
    }

    /// Sign of the amplitude at 1-based position `i`.
    pub fn sign(&self, i: usize) -> i8 {
        if self.negative[i - 1] {
            -1
        } else {
            1
        }
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        let scale = 1.0 / (self.n() as f64).sqrt();
        (1..=self.n())
            .map(|i| self.sign(i) as f64 * scale)
            .collect()
    }

    /// Exact squared norm: `n` entries of squared magnitude `1/n`.
    pub fn norm_squared(&self) -> Ratio<u64> {
        Ratio::new(self.n() as u64, self.n() as u64)
    }
}

pub fn encode_fingerprint(c: &Bits) -> Result<FingerprintState> {
    if c.is_empty() {
        return Err(HmpError::invalid("cannot fingerprint an empty string"));
    }
    Ok(FingerprintState {
        negative: c.as_slice().to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementOutcome {
    pub edge: Edge,
    pub sign: Sign,
    pub probability: Ratio<u64>,
}

fn check_perfect(n: usize, m: &[Edge]) -> Result<()> {
    let mut seen = vec![false; n + 1];
    for &(u, v) in m {
        for w in [u, v] {
            if w == 0 || w > n || seen[w] {
                return Err(HmpError::invalid(format!(
                    "matching is not a perfect matching on 1..={n}"
                )));
            }
            seen[w] = true;
        }
    }
    if seen[1..].iter().any(|s| !s) {
        return Err(HmpError::invalid(format!(
            "matching does not cover 1..={n}"
        )));
    }
    Ok(())
}

/// Probability of every basis vector `(|i1⟩ + σ|i2⟩)/√2` of `m`, including
/// zero-probability ones, in edge order with `+` before `−`.
pub fn full_distribution(state: &FingerprintState, m: &[Edge]) -> Result<Vec<MeasurementOutcome>> {
    check_perfect(state.n(), m)?;
    let n = state.n() as u64;
    let mut out = Vec::with_capacity(2 * m.len());
    for &(a, b) in m {
        for sign in [Sign::Plus, Sign::Minus] {
            let amp = (state.sign(a) + sign.value() * state.sign(b)) as i64;
            // |<ψ|φ>|² = (s_a + σ s_b)² / (2n)
            let num = (amp * amp) as u64;
            out.push(MeasurementOutcome {
                edge: (a, b),
                sign,
                probability: Ratio::new(num, 2 * n),
            });
        }
    }
    Ok(out)
}

/// Outcomes with nonzero probability.
pub fn outcome_distribution(
    state: &FingerprintState,
    m: &[Edge],
) -> Result<Vec<MeasurementOutcome>> {
    Ok(full_distribution(state, m)?
        .into_iter()
        .filter(|o| *o.probability.numer() != 0)
        .collect())
}

/// Sample one outcome. Probabilities share the denominator `2n`, so the
/// draw is an exact integer draw.
pub fn measure_in_matching_basis<R: Rng>(
    state: &FingerprintState,
    m: &[Edge],
    rng: &mut R,
) -> Result<MeasurementOutcome> {
    let outcomes = full_distribution(state, m)?;
    let denom = 2 * state.n() as u64;
    let mut ticket = rng.gen_range(0..denom);
    for o in &outcomes {
        // Ratio reduces, so rescale to the common denominator.
        let weight = o.probability.numer() * (denom / o.probability.denom());
        if ticket < weight {
            return Ok(*o);
        }
        ticket -= weight;
    }
    unreachable!("outcome probabilities sum to 1")
}

/// Cost of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub qubits: usize,
    pub classical_bits: usize,
    pub total: usize,
}

impl CostReport {
    pub fn for_family(n: usize, t: usize) -> Self {
        let qubits = ceil_log2(n);
        let classical_bits = ceil_log2(t);
        CostReport {
            qubits,
            classical_bits,
            total: qubits + classical_bits,
        }
    }
}

/// A message sent to the referee.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmpMessage {
    Quantum {
        player: usize,
        state: FingerprintState,
        qubits: usize,
    },
    Classical {
        player: usize,
        bits: Bits,
    },
    Empty {
        player: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumRun {
    pub answer: Answer,
    pub cost: CostReport,
    pub messages: Vec<SmpMessage>,
}

/// Run the protocol once on `instance`.
pub fn run_quantum_smp<R: Rng>(
    instance: &HmpInstance,
    family: &MatchingFamily,
    rng: &mut R,
) -> Result<QuantumRun> {
    if instance.n() != family.n() {
        return Err(HmpError::invalid(format!(
            "instance has n = {}, family has n = {}",
            instance.n(),
            family.n()
        )));
    }
    let t = family.t();
    let j = instance.matching_index();
    if j > t {
        return Err(HmpError::RelationUndefined { index: j, t });
    }
    let k = instance.k();
    let cost = CostReport::for_family(family.n(), t);

    let first = view_of(instance, 1)?;
    let state = encode_fingerprint(first.c.as_ref().expect("player 1 sees c"))?;
    let last = view_of(instance, k)?;
    let index = crate::model::decode_matching_index(
        &last
            .visible_alphas
            .iter()
            .map(|(_, a)| a.clone())
            .collect::<Vec<_>>(),
    )?;
    let index_bits = Bits::from_u64((index - 1) as u64, cost.classical_bits);

    let mut messages = vec![SmpMessage::Quantum {
        player: 1,
        state,
        qubits: cost.qubits,
    }];
    messages.extend((2..k).map(|player| SmpMessage::Empty { player }));
    messages.push(SmpMessage::Classical {
        player: k,
        bits: index_bits.clone(),
    });

    // Referee.
    let SmpMessage::Quantum { state, .. } = &messages[0] else {
        unreachable!()
    };
    let referee_index = index_bits.to_u64() as usize + 1;
    let outcome = measure_in_matching_basis(state, family.matching(referee_index), rng)?;
    let (i1, i2) = outcome.edge;
    let answer = Answer::new(i1, i2, outcome.sign == Sign::Minus)?;
    debug_assert!(relation_holds(instance, family, &answer));
    Ok(QuantumRun {
        answer,
        cost,
        messages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cyclic_family, Construction};
    use crate::seed;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn fingerprint_examples() {
        let h = 1.0 / 2f64.sqrt();
        assert_eq!(
            encode_fingerprint(&b("00")).unwrap().amplitudes(),
            vec![h, h]
        );
        assert_eq!(
            encode_fingerprint(&b("01")).unwrap().amplitudes(),
            vec![h, -h]
        );
        assert_eq!(
            encode_fingerprint(&b("0110")).unwrap().amplitudes(),
            vec![0.5, -0.5, -0.5, 0.5]
        );
        assert!(encode_fingerprint(&Bits::zeros(0)).is_err());
    }

    /// Inner product of the state with (|a> + σ|b>)/√2, computed in floats.
    fn inner(c: &str, a: usize, bb: usize, sigma: f64) -> f64 {
        let amps = encode_fingerprint(&b(c)).unwrap().amplitudes();
        (amps[a - 1] + sigma * amps[bb - 1]) / 2f64.sqrt()
    }

    #[test]
    fn distribution_matches_inner_products() {
        let m = [(1, 2), (3, 4)];
        let state = encode_fingerprint(&b("0110")).unwrap();
        let full = full_distribution(&state, &m).unwrap();
        for o in &full {
            let sigma = o.sign.value() as f64;
            let p = inner("0110", o.edge.0, o.edge.1, sigma).powi(2);
            assert!(
                (p - *o.probability.numer() as f64 / *o.probability.denom() as f64).abs() < 1e-12
            );
        }
        let nz = outcome_distribution(&state, &m).unwrap();
        assert_eq!(nz.len(), 2);
        assert!(nz
            .iter()
            .all(|o| o.sign == Sign::Minus && o.probability == Ratio::new(1, 2)));

        let single =
            outcome_distribution(&encode_fingerprint(&b("00")).unwrap(), &[(1, 2)]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].sign, Sign::Plus);
        assert_eq!(single[0].probability, Ratio::new(1, 1));
    }

    #[test]
    fn all_short_strings_have_uniform_support() {
        for n in [2usize, 4, 6, 8] {
            let fam = cyclic_family(n).unwrap();
            for c in Bits::all(n) {
                let state = encode_fingerprint(&c).unwrap();
                for m in fam.matchings() {
                    let nz = outcome_distribution(&state, m).unwrap();
                    assert_eq!(nz.len(), n / 2);
                    let total: Ratio<u64> = full_distribution(&state, m)
                        .unwrap()
                        .iter()
                        .map(|o| o.probability)
                        .sum();
                    assert_eq!(total, Ratio::new(1, 1));
                    for o in nz {
                        assert_eq!(o.probability, Ratio::new(2, n as u64));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_imperfect_matching() {
        let state = encode_fingerprint(&b("0110")).unwrap();
        assert!(outcome_distribution(&state, &[(1, 2)]).is_err());
        assert!(outcome_distribution(&state, &[(1, 2), (2, 3)]).is_err());
    }

    #[test]
    fn run_examples() {
        let fam = MatchingFamily::new(
            4,
            vec![vec![(1, 2), (3, 4)]],
            None,
            Construction::ExplicitFile,
        )
        .unwrap();
        let inst = HmpInstance::new(4, 2, 1, vec![b("0")], b("0110")).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for s in 0..64 {
            let run = run_quantum_smp(&inst, &fam, &mut seed::rng(s)).unwrap();
            assert!(run.answer.e);
            seen.insert(run.answer.edge());
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![(1, 2), (3, 4)]);

        let fam2 = cyclic_family(2).unwrap();
        let inst = HmpInstance::new(2, 2, 1, vec![b("0")], b("01")).unwrap();
        let run = run_quantum_smp(&inst, &fam2, &mut seed::rng(0)).unwrap();
        assert_eq!(run.answer, Answer::new(1, 2, true).unwrap());
        assert_eq!(
            run.cost,
            CostReport {
                qubits: 1,
                classical_bits: 0,
                total: 1
            }
        );

        let fam16 = cyclic_family(16).unwrap();
        let inst = HmpInstance::for_matching(2, 3, 5, Bits::from_u64(0xBEEF, 16)).unwrap();
        assert_eq!(
            run_quantum_smp(&inst, &fam16, &mut seed::rng(0))
                .unwrap()
                .cost
                .qubits,
            4
        );
    }

    #[test]
    fn invalid_index_is_relation_undefined() {
        let fam = cyclic_family(2).unwrap();
        let inst = HmpInstance::new(2, 2, 1, vec![b("1")], b("01")).unwrap();
        assert_eq!(
            run_quantum_smp(&inst, &fam, &mut seed::rng(0)),
            Err(HmpError::RelationUndefined { index: 2, t: 1 })
        );
    }

    #[test]
    fn middle_players_send_nothing() {
        let fam = cyclic_family(8).unwrap();
        let inst = HmpInstance::for_matching(4, 1, 3, b("01101001")).unwrap();
        let run = run_quantum_smp(&inst, &fam, &mut seed::rng(1)).unwrap();
        assert_eq!(run.messages.len(), 4);
        assert!(matches!(run.messages[1], SmpMessage::Empty { player: 2 }));
        assert!(matches!(run.messages[2], SmpMessage::Empty { player: 3 }));
        assert!(relation_holds(&inst, &fam, &run.answer));
    }
}
