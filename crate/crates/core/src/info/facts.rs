use rand::Rng;
use serde::{Deserialize, Serialize};

use super::entropy::{conditional_entropy, entropy, mutual_information, EmpiricalDistribution};
use crate::error::{HmpError, Result};

/// Largest residuals seen while checking the identities, plus inequality
/// violations beyond the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactsReport {
    pub joints_checked: usize,
    /// `H(X|Y)` against the average of `H(X|Y=y)`.
    pub conditional_entropy_residual: f64,
    /// `I(X;Y|Z)` against the average of `I(X;Y|Z=z)`.
    pub conditional_mi_residual: f64,
    /// `I(X;Y,Z) = I(X;Y) + I(X;Z|Y)`.
    pub chain_rule_residual: f64,
    /// `I(X;Y) = I(Y;X)`.
    pub symmetry_residual: f64,
    /// Negative entropies or informations.
    pub negativity_violations: usize,
    pub superadditivity_checked: usize,
    /// Cases of `I(X;Y_1..Y_m) < sum_j I(X;Y_j)` for independent `Y_j`.
    pub superadditivity_violations: usize,
    pub tolerance: f64,
}

impl FactsReport {
    pub fn max_residual(&self) -> f64 {
        self.conditional_entropy_residual
            .max(self.conditional_mi_residual)
            .max(self.chain_rule_residual)
            .max(self.symmetry_residual)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() < self.tolerance
            && self.negativity_violations == 0
            && self.superadditivity_violations == 0
    }
}

pub const FACTS_TOLERANCE: f64 = 1e-9;

fn values_of(dist: &EmpiricalDistribution, coords: &[usize]) -> Vec<(Vec<u64>, f64)> {
    dist.marginal(coords)
        .expect("coordinates checked by caller")
        .support()
        .map(|(o, p)| (o.clone(), p))
        .collect()
}

/// `sum_y Pr(Y=y) H(X | Y=y)`.
pub fn averaged_conditional_entropy(
    dist: &EmpiricalDistribution,
    x: &[usize],
    y: &[usize],
) -> Result<f64> {
    let mut total = 0.0;
    for (value, p) in values_of(dist, y) {
        let cond = dist.condition(y, &value)?.expect("value in support");
        total += p * entropy(&cond.marginal(x)?);
    }
    Ok(total)
}

/// `sum_z Pr(Z=z) I(X;Y | Z=z)`.
pub fn averaged_conditional_mi(
    dist: &EmpiricalDistribution,
    x: &[usize],
    y: &[usize],
    z: &[usize],
) -> Result<f64> {
    let mut total = 0.0;
    for (value, p) in values_of(dist, z) {
        let cond = dist.condition(z, &value)?.expect("value in support");
        total += p * mutual_information(&cond, x, y, &[])?;
    }
    Ok(total)
}

struct Accumulator {
    report: FactsReport,
}

impl Accumulator {
    fn residual(slot: &mut f64, a: f64, b: f64) {
        *slot = slot.max((a - b).abs());
    }

    /// Identities on a joint of arity at least 2; the third coordinate, when
    /// present, plays `Z`.
    fn identities(&mut self, d: &EmpiricalDistribution) -> Result<()> {
        let r = &mut self.report;
        let z: &[usize] = if d.arity() >= 3 { &[2] } else { &[] };
        let (x, y) = (&[0usize][..], &[1usize][..]);

        Self::residual(
            &mut r.conditional_entropy_residual,
            conditional_entropy(d, x, y)?,
            averaged_conditional_entropy(d, x, y)?,
        );
        Self::residual(
            &mut r.conditional_mi_residual,
            mutual_information(d, x, y, z)?,
            averaged_conditional_mi(d, x, y, z)?,
        );
        let yz: Vec<usize> = y.iter().chain(z).copied().collect();
        Self::residual(
            &mut r.chain_rule_residual,
            mutual_information(d, x, &yz, &[])?,
            mutual_information(d, x, y, &[])? + mutual_information(d, x, z, y)?,
        );
        let ixy = mutual_information(d, x, y, &[])?;
        Self::residual(
            &mut r.symmetry_residual,
            ixy,
            mutual_information(d, y, x, &[])?,
        );

        let tol = r.tolerance;
        let quantities = [
            entropy(d),
            conditional_entropy(d, x, y)?,
            ixy,
            mutual_information(d, x, y, z)?,
        ];
        r.negativity_violations += quantities.iter().filter(|&&q| q < -tol).count();
        r.joints_checked += 1;
        Ok(())
    }

    /// Coordinate 0 is `X`, coordinates `1..` are independent by construction.
    fn superadditivity(&mut self, d: &EmpiricalDistribution) -> Result<()> {
        let (whole, parts) = superadditivity_terms(d)?;
        self.report.superadditivity_checked += 1;
        if whole < parts - self.report.tolerance {
            self.report.superadditivity_violations += 1;
        }
        Ok(())
    }
}

/// A random joint over three coordinates with at most `max_support` outcomes.
pub fn random_joint<R: Rng>(rng: &mut R, max_support: usize) -> EmpiricalDistribution {
    let alphabets: Vec<u64> = (0..3).map(|_| rng.gen_range(1..=4)).collect();
    let support = rng.gen_range(1..=max_support.max(1));
    let weights = (0..support).map(|_| {
        let outcome = alphabets.iter().map(|&a| rng.gen_range(0..a)).collect();
        (outcome, rng.gen_range(0.0..1.0f64) + 1e-3)
    });
    EmpiricalDistribution::from_weights(weights.collect::<Vec<_>>()).expect("positive weights")
}

/// `X` depends on independent `Y_1..Y_m` through a random channel. The
/// support is `|X| * prod |Y_j|`, kept at most `max_support`.
pub fn random_independent_joint<R: Rng>(rng: &mut R, max_support: usize) -> EmpiricalDistribution {
    let x_size: u64 = rng.gen_range(2..=3);
    let mut y_sizes: Vec<u64> = Vec::new();
    let mut size = x_size;
    while y_sizes.len() < 4 {
        let a = rng.gen_range(2..=3);
        if size * a > max_support as u64 {
            break;
        }
        size *= a;
        y_sizes.push(a);
    }
    if y_sizes.is_empty() {
        y_sizes.push(1);
    }
    let marginals: Vec<Vec<f64>> = y_sizes
        .iter()
        .map(|&a| normalized((0..a).map(|_| rng.gen_range(0.05..1.0)).collect()))
        .collect();
    let mut outcomes = vec![Vec::new()];
    for &a in &y_sizes {
        outcomes = outcomes
            .into_iter()
            .flat_map(|o: Vec<u64>| (0..a).map(move |v| [o.clone(), vec![v]].concat()))
            .collect();
    }
    let mut weights = Vec::new();
    for ys in outcomes {
        let py: f64 = ys
            .iter()
            .zip(&marginals)
            .map(|(&v, m)| m[v as usize])
            .product();
        let channel = normalized(
            (0..x_size)
                .map(|_| rng.gen_range(0.0..1.0f64).powi(3))
                .collect(),
        );
        for (xv, px) in channel.into_iter().enumerate() {
            let mut o = vec![xv as u64];
            o.extend(&ys);
            weights.push((o, py * px));
        }
    }
    EmpiricalDistribution::from_weights(weights).expect("positive weights")
}

fn normalized(v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    if total <= 0.0 {
        let len = v.len() as f64;
        return v.iter().map(|_| 1.0 / len).collect();
    }
    v.into_iter().map(|x| x / total).collect()
}

/// Check the identities on the supplied joints (arity 2 or more) and on
/// `trials` random joints of support at most 64. Superadditivity is checked
/// on `trials` product-constructed joints.
pub fn check_information_facts<R: Rng>(
    supplied: &[EmpiricalDistribution],
    trials: usize,
    rng: &mut R,
) -> Result<FactsReport> {
    let mut acc = Accumulator {
        report: FactsReport {
            joints_checked: 0,
            conditional_entropy_residual: 0.0,
            conditional_mi_residual: 0.0,
            chain_rule_residual: 0.0,
            symmetry_residual: 0.0,
            negativity_violations: 0,
            superadditivity_checked: 0,
            superadditivity_violations: 0,
            tolerance: FACTS_TOLERANCE,
        },
    };
    for d in supplied {
        if d.arity() < 2 {
            return Err(HmpError::invalid("joint needs at least two coordinates"));
        }
        acc.identities(d)?;
    }
    for _ in 0..trials {
        acc.identities(&random_joint(rng, 64))?;
        acc.superadditivity(&random_independent_joint(rng, 64))?;
    }
    Ok(acc.report)
}

/// Superadditivity on one joint whose coordinates `1..` the caller asserts
/// are independent. Returns `(I(X;Y_1..Y_m), sum_j I(X;Y_j))`.
pub fn superadditivity_terms(d: &EmpiricalDistribution) -> Result<(f64, f64)> {
    if d.arity() < 2 {
        return Err(HmpError::invalid("joint needs at least two coordinates"));
    }
    let ys: Vec<usize> = (1..d.arity()).collect();
    let whole = mutual_information(d, &[0], &ys, &[])?;
    let parts = ys
        .iter()
        .map(|&y| mutual_information(d, &[0], &[y], &[]))
        .sum::<Result<f64>>()?;
    Ok((whole, parts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub alpha: f64,
    pub beta: f64,
    pub mean: f64,
    /// Empirical `Pr(X >= alpha)`.
    pub tail: f64,
    /// `(E X - alpha) / (beta - alpha)`.
    pub lower_bound: f64,
    pub holds: bool,
}

/// Slack for floating-point rounding in the mean.
const MARKOV_SLACK: f64 = 1e-12;

/// `Pr(X >= alpha) >= (E X - alpha) / (beta - alpha)` on the empirical
/// measure of `samples`, all of which must lie in `[0, beta]`.
pub fn markov_bound_check(samples: &[f64], alpha: f64, beta: f64) -> Result<MarkovReport> {
    if samples.is_empty() {
        return Err(HmpError::invalid("no samples"));
    }
    if !(0.0 <= alpha && alpha < beta) {
        return Err(HmpError::invalid(format!(
            "need 0 <= alpha < beta, got {alpha}, {beta}"
        )));
    }
    if let Some(x) = samples.iter().find(|&&x| !(0.0..=beta).contains(&x)) {
        return Err(HmpError::invalid(format!("sample {x} outside [0, {beta}]")));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let tail = samples.iter().filter(|&&x| x >= alpha).count() as f64 / n;
    let lower_bound = (mean - alpha) / (beta - alpha);
    Ok(MarkovReport {
        alpha,
        beta,
        mean,
        tail,
        lower_bound,
        holds: tail >= lower_bound - MARKOV_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovSweep {
    pub checks: usize,
    pub violations: usize,
}

/// Randomized driver: `checks` instances with random sample sets (including
/// mass at the endpoints) and random thresholds.
pub fn markov_random_checks<R: Rng>(checks: usize, rng: &mut R) -> MarkovSweep {
    let mut violations = 0;
    for _ in 0..checks {
        let beta: f64 = rng.gen_range(0.1..10.0);
        let alpha = rng.gen_range(0.0..beta);
        let len = rng.gen_range(1..=40);
        let samples: Vec<f64> = (0..len)
            .map(|_| match rng.gen_range(0..4) {
                0 => beta,
                1 => alpha,
                2 => 0.0,
                _ => rng.gen_range(0.0..=beta),
            })
            .collect();
        let report = markov_bound_check(&samples, alpha, beta).expect("samples in range");
        if !report.holds {
            violations += 1;
        }
    }
    MarkovSweep { checks, violations }
}
