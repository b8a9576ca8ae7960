//! Exact rational simplex for small linear programs of the form
//! `maximize cᵀx  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! The origin is feasible, so no phase one is needed. Bland's rule keeps
//! degenerate pivots from cycling.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Q = Ratio<i128>;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Q,
    pub x: Vec<Q>,
}

/// Returns `None` if the program is unbounded.
pub fn maximize(objective: &[Q], a: &[Vec<Q>], b: &[Q]) -> Option<LpSolution> {
    let nvars = objective.len();
    let nrows = a.len();
    assert_eq!(b.len(), nrows);
    assert!(
        b.iter().all(|v| !v.is_negative()),
        "right-hand side must be non-negative"
    );

    // Columns: nvars originals, nrows slacks, then the RHS.
    let width = nvars + nrows + 1;
    let mut tab: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), nvars);
            let mut r = row.clone();
            r.extend((0..nrows).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r.push(b[i]);
            r
        })
        .collect();
    // Reduced costs: z - cᵀx = 0.
    let mut z: Vec<Q> = objective.iter().map(|c| -c).collect();
    z.extend(std::iter::repeat_n(Q::zero(), nrows + 1));
    let mut basis: Vec<usize> = (nvars..nvars + nrows).collect();

    loop {
        let Some(enter) = (0..width - 1).find(|&j| z[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = row[width - 1] / row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (pivot_row, _) = leave?;
        let pivot = tab[pivot_row][enter];
        tab[pivot_row].iter_mut().for_each(|v| *v /= pivot);
        let prow = tab[pivot_row].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != pivot_row && !row[enter].is_zero() {
                let f = row[enter];
                row.iter_mut().zip(&prow).for_each(|(v, p)| *v -= f * p);
            }
        }
        let f = z[enter];
        z.iter_mut().zip(&prow).for_each(|(v, p)| *v -= f * p);
        basis[pivot_row] = enter;
    }

    let mut x = vec![Q::zero(); nvars];
    for (i, &var) in basis.iter().enumerate() {
        if var < nvars {
            x[var] = tab[i][width - 1];
        }
    }
    Some(LpSolution {
        value: z[width - 1],
        x,
    })
}

/// Serde helpers writing exact rationals as `"num/den"` strings, since JSON
/// numbers cannot carry 128-bit integers.
pub mod q_serde {
    use std::fmt;
    use std::str::FromStr;

    use serde::de::{self, Deserializer, Visitor};
    use serde::{Deserialize, Serialize, Serializer};

    use super::Q;

    #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    pub struct QStr(pub Q);

    impl Serialize for QStr {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            s.collect_str(&self.0)
        }
    }

    impl<'de> Deserialize<'de> for QStr {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            struct V;
            impl Visitor<'_> for V {
                type Value = QStr;
                fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                    f.write_str("a rational such as \"3/4\"")
                }
                fn visit_str<E: de::Error>(self, v: &str) -> Result<QStr, E> {
                    Q::from_str(v)
                        .map(QStr)
                        .map_err(|_| E::custom(format!("bad rational {v:?}")))
                }
            }
            d.deserialize_str(V)
        }
    }

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        QStr(*q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        QStr::deserialize(d).map(|q| q.0)
    }

    /// For `Vec<(T, Q)>`.
    pub mod pairs {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        use super::{QStr, Q};

        pub fn serialize<T: Serialize, S: Serializer>(
            v: &[(T, Q)],
            s: S,
        ) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|(t, q)| (t, QStr(*q))))
        }

        pub fn deserialize<'de, T: Deserialize<'de>, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<(T, Q)>, D::Error> {
            let raw: Vec<(T, QStr)> = Vec::deserialize(d)?;
            Ok(raw.into_iter().map(|(t, q)| (t, q.0)).collect())
        }
    }
}
