//! The HMP relation: instances, number-on-forehead views and answer checking.
//!
//! Players are numbered `1..=k`. Players `1..k` each see the hidden string
//! `c` and every index string except their own; player `k` sees all index
//! strings but not `c`. Vertices are 1-based.

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{HmpError, Result};
use crate::families::MatchingFamily;

/// One input to the problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HmpInstance {
    n: usize,
    k: usize,
    r: usize,
    alphas: Vec<Bits>,
    c: Bits,
}

impl HmpInstance {
    pub fn new(n: usize, k: usize, r: usize, alphas: Vec<Bits>, c: Bits) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(HmpError::invalid(format!(
                "n must be positive and even, got {n}"
            )));
        }
        if k < 2 {
            return Err(HmpError::invalid(format!(
                "need at least 2 players, got {k}"
            )));
        }
        if r == 0 {
            return Err(HmpError::invalid(
                "index strings must have at least one bit",
            ));
        }
        if alphas.len() != k - 1 {
            return Err(HmpError::invalid(format!(
                "expected {} index strings, got {}",
                k - 1,
                alphas.len()
            )));
        }
        if let Some(a) = alphas.iter().find(|a| a.len() != r) {
            return Err(HmpError::invalid(format!(
                "index string {a} does not have {r} bits"
            )));
        }
        if c.len() != n {
            return Err(HmpError::invalid(format!(
                "c has {} bits, expected {n}",
                c.len()
            )));
        }
        Ok(HmpInstance { n, k, r, alphas, c })
    }

    /// Instance selecting matching `index` (1-based) with hidden string `c`.
    pub fn for_matching(k: usize, r: usize, index: usize, c: Bits) -> Result<Self> {
        let alphas = encode_matching_index(index, k, r)?;
        HmpInstance::new(c.len(), k, r, alphas, c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn alphas(&self) -> &[Bits] {
        &self.alphas
    }

    pub fn c(&self) -> &Bits {
        &self.c
    }

    pub fn matching_index(&self) -> usize {
        decode_matching_index(&self.alphas).expect("validated at construction")
    }

    /// True when the decoded index names a matching of a family of size `t`.
    pub fn is_valid_for(&self, t: usize) -> bool {
        self.matching_index() <= t
    }
}

/// What one player sees. Hidden data is absent, not blanked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerView {
    pub player: usize,
    /// `(position, string)` pairs, positions 1-based, increasing.
    pub visible_alphas: Vec<(usize, Bits)>,
    pub c: Option<Bits>,
}

impl PlayerView {
    pub fn sees_c(&self) -> bool {
        self.c.is_some()
    }

    /// The visible index strings concatenated in position order.
    pub fn alphas_concat(&self) -> Bits {
        Bits::concat(self.visible_alphas.iter().map(|(_, a)| a))
    }
}

/// An answer `(i1, i2, e)` claiming `{i1, i2}` is an edge of the selected
/// matching and `e = c_{i1} xor c_{i2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Answer {
    pub i1: usize,
    pub i2: usize,
    #[serde(with = "bit_as_int")]
    pub e: bool,
}

impl Answer {
    pub fn new(i1: usize, i2: usize, e: bool) -> Result<Self> {
        if i1 == i2 {
            return Err(HmpError::invalid(format!(
                "answer endpoints coincide: {i1}"
            )));
        }
        Ok(Answer { i1, i2, e })
    }

    /// The edge as an ordered pair `(min, max)`.
    pub fn edge(&self) -> (usize, usize) {
        (self.i1.min(self.i2), self.i1.max(self.i2))
    }
}

pub(crate) mod bit_as_int {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*b as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(serde::de::Error::custom(format!(
                "expected 0 or 1, got {v}"
            ))),
        }
    }
}

/// Big-endian value of `α1∘…∘α_{k−1}`, plus one.
pub fn decode_matching_index(alphas: &[Bits]) -> Result<usize> {
    let first = alphas
        .first()
        .ok_or_else(|| HmpError::invalid("no index strings"))?;
    if alphas.iter().any(|a| a.len() != first.len()) {
        return Err(HmpError::invalid("index strings differ in length"));
    }
    let joined = Bits::concat(alphas);
    if joined.len() >= 63 {
        return Err(HmpError::invalid("index strings too long"));
    }
    Ok(joined.to_u64() as usize + 1)
}

/// Inverse of [`decode_matching_index`]: split `index - 1` into `k - 1`
/// strings of `r` bits.
pub fn encode_matching_index(index: usize, k: usize, r: usize) -> Result<Vec<Bits>> {
    if k < 2 || r == 0 {
        return Err(HmpError::invalid(format!("bad layout k={k}, r={r}")));
    }
    let total = (k - 1) * r;
    if total >= 63 || index == 0 || (index - 1) as u64 >= 1u64 << total {
        return Err(HmpError::invalid(format!(
            "index {index} not representable with {} index strings of {r} bits",
            k - 1
        )));
    }
    let joined = Bits::from_u64((index - 1) as u64, total);
    Ok((0..k - 1).map(|i| joined.slice(i * r, r)).collect())
}

/// Smallest `r >= 1` with `2^{(k-1) r} >= t`.
pub fn required_index_bits(k: usize, t: usize) -> usize {
    assert!(k >= 2);
    let needed = ceil_log2(t);
    needed.div_ceil(k - 1).max(1)
}

/// `⌈log₂ x⌉`, with `⌈log₂ 1⌉ = 0`. `x` must be positive.
pub fn ceil_log2(x: usize) -> usize {
    assert!(x > 0);
    (usize::BITS - (x - 1).leading_zeros()) as usize
}

/// The lower-bound parameter regime: `t` a power of two, `2 < k < log t` and
/// `log t` a multiple of `k - 1`.
pub fn is_separation_regime(k: usize, t: usize) -> bool {
    if !t.is_power_of_two() {
        return false;
    }
    let log_t = t.trailing_zeros() as usize;
    k > 2 && k < log_t && log_t % (k - 1) == 0
}

pub fn relation_holds(instance: &HmpInstance, family: &MatchingFamily, answer: &Answer) -> bool {
    if instance.n() != family.n() {
        return false;
    }
    let j = instance.matching_index();
    if j > family.t() || answer.i1 == answer.i2 {
        return false;
    }
    if !family.matching(j).contains(&answer.edge()) {
        return false;
    }
    let c = instance.c();
    answer.e == (c.get(answer.i1 - 1) ^ c.get(answer.i2 - 1))
}

pub fn view_of(instance: &HmpInstance, player: usize) -> Result<PlayerView> {
    let k = instance.k();
    if player == 0 || player > k {
        return Err(HmpError::invalid(format!("player {player} not in 1..={k}")));
    }
    let visible_alphas = instance
        .alphas()
        .iter()
        .enumerate()
        .map(|(i, a)| (i + 1, a.clone()))
        .filter(|(pos, _)| *pos != player)
        .collect();
    let c = (player < k).then(|| instance.c().clone());
    Ok(PlayerView {
        player,
        visible_alphas,
        c,
    })
}

/// The `2^{(k-2) r}` tuples `(α1, …, α_{k−2}, α1 ⊕ … ⊕ α_{k−2})`, ordered by
/// the numeric value of the free part.
pub fn special_inputs(r: usize, k: usize) -> Result<Vec<Vec<Bits>>> {
    if k < 3 {
        return Err(HmpError::invalid(format!(
            "special inputs need k >= 3, got {k}"
        )));
    }
    if r == 0 {
        return Err(HmpError::invalid("r must be positive"));
    }
    let free = (k - 2) * r;
    if free >= 32 {
        return Err(HmpError::invalid("special input set too large"));
    }
    Ok(Bits::all(free)
        .map(|joined| {
            let mut tuple: Vec<Bits> = (0..k - 2).map(|i| joined.slice(i * r, r)).collect();
            let parity = tuple.iter().fold(Bits::zeros(r), |acc, a| acc.xor(a));
            tuple.push(parity);
            tuple
        })
        .collect())
}
