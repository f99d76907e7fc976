//! Closed-form lower bounds on the probability that a random monic integer
//! polynomial is irreducible over ℤ, parameterized by measured divisor
//! statistics and uniformity certificates.
//!
//! Bounds can be vacuous (nonpositive): the `2^d` factor makes small-H /
//! large-d configurations uninformative, and that is reported rather than
//! suppressed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("gcd condition unmet: gcd({{d}} ∪ I) must be 1")]
    GcdConditionUnmet,
}

/// Inputs echoed into a bound report; irrelevant fields stay `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_zero: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deg_p: Option<u64>,
}

/// A computed lower bound on P(irreducible).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: String,
    pub inputs: BoundInputs,
    pub lower_bound_irreducible: f64,
    /// Bound is nonpositive, hence uninformative.
    pub vacuous: bool,
    /// The quoted theorem only gives `1 - o(1)`; the numeric bound here is
    /// the best quantitative stand-in.
    #[serde(default)]
    pub asymptotic_only: bool,
}

impl BoundReport {
    fn finish(theorem: &str, inputs: BoundInputs, bound: f64) -> BoundReport {
        BoundReport {
            theorem: theorem.to_string(),
            inputs,
            lower_bound_irreducible: bound,
            vacuous: bound <= 0.0,
            asymptotic_only: false,
        }
    }

    /// The reducibility mass the theorem allows: `1 - lower_bound`.
    pub fn allowance(&self) -> f64 {
        1.0 - self.lower_bound_irreducible
    }
}

fn two_pow(d: usize) -> f64 {
    2f64.powi(d as i32)
}

/// `1 - p_zero - 2 C d 2^d L tau sum_i (1/k_i)`.
pub fn bound_strong(
    d: usize,
    c: f64,
    l: f64,
    tau_mean: f64,
    p_zero: f64,
    k_list: &[u64],
) -> BoundReport {
    let inv_sum: f64 = k_list.iter().map(|&k| 1.0 / k as f64).sum();
    let bound = 1.0 - p_zero - 2.0 * c * d as f64 * two_pow(d) * l * tau_mean * inv_sum;
    BoundReport::finish(
        "strong",
        BoundInputs {
            d,
            k_list: Some(k_list.to_vec()),
            c: Some(c),
            l: Some(l),
            m: Some(k_list.len()),
            tau_mean: Some(tau_mean),
            p_zero: Some(p_zero),
            ..Default::default()
        },
        bound,
    )
}

/// `1 - p_zero - 2 C d m 2^d L tau / H`.
pub fn bound_markov(
    d: usize,
    c: f64,
    l: f64,
    m: usize,
    tau_mean: f64,
    p_zero: f64,
    h: u64,
) -> BoundReport {
    let bound = 1.0 - p_zero - 2.0 * c * d as f64 * m as f64 * two_pow(d) * l * tau_mean / h as f64;
    BoundReport::finish(
        "markov",
        BoundInputs {
            d,
            h: Some(h),
            c: Some(c),
            l: Some(l),
            m: Some(m),
            tau_mean: Some(tau_mean),
            p_zero: Some(p_zero),
            ..Default::default()
        },
        bound,
    )
}

/// Constant coefficient on polynomial values: the divisor factor is the
/// measured tau mean (the polylog constant is non-explicit), and the zero
/// mass is `deg(P)/(2H+1)`.
pub fn bound_markov_poly(
    d: usize,
    c: f64,
    l: f64,
    m: usize,
    deg_p: u64,
    tau_mean: f64,
    h: u64,
) -> BoundReport {
    let bound = 1.0
        - deg_p as f64 / (2.0 * h as f64 + 1.0)
        - 2.0 * c * m as f64 * d as f64 * two_pow(d) * l * tau_mean / h as f64;
    let mut r = BoundReport::finish(
        "markov_case1",
        BoundInputs {
            d,
            h: Some(h),
            c: Some(c),
            l: Some(l),
            m: Some(m),
            tau_mean: Some(tau_mean),
            deg_p: Some(deg_p),
            ..Default::default()
        },
        bound,
    );
    r.inputs.p_zero = None;
    r
}

/// Constant coefficient supported on s-simple integers:
/// `1 - 2 C m d 2^d L s / H`.
pub fn bound_markov_simple(d: usize, c: f64, l: f64, m: usize, s: u64, h: u64) -> BoundReport {
    let bound = 1.0 - 2.0 * c * m as f64 * d as f64 * two_pow(d) * l * s as f64 / h as f64;
    BoundReport::finish(
        "markov_case2",
        BoundInputs {
            d,
            h: Some(h),
            c: Some(c),
            l: Some(l),
            m: Some(m),
            s: Some(s),
            ..Default::default()
        },
        bound,
    )
}

/// True when `gcd({d} ∪ indices) = 1`, the precondition for varying only
/// the listed coefficients.
pub fn varyone_gcd_ok(d: usize, indices: &[usize]) -> bool {
    fn gcd(a: usize, b: usize) -> usize {
        if a == 0 {
            b
        } else {
            gcd(b % a, a)
        }
    }
    indices.iter().fold(d, |g, &i| gcd(g, i)) == 1
}

/// `1 - p_zero - 2 d 2^d tau / H`, valid only under the gcd condition,
/// which the caller must have checked (pass the flag).
pub fn bound_varyone(
    d: usize,
    tau_mean: f64,
    p_zero: f64,
    h: u64,
    gcd_checked: bool,
) -> Result<BoundReport, BoundsError> {
    if !gcd_checked {
        return Err(BoundsError::GcdConditionUnmet);
    }
    let bound = 1.0 - p_zero - 2.0 * d as f64 * two_pow(d) * tau_mean / h as f64;
    Ok(BoundReport::finish(
        "varyone",
        BoundInputs {
            d,
            h: Some(h),
            tau_mean: Some(tau_mean),
            p_zero: Some(p_zero),
            ..Default::default()
        },
        bound,
    ))
}

/// Parameters for the three simplified-model bounds.
#[derive(Clone, Debug)]
pub enum SimpleCase {
    /// Sparse constant coefficient: `1 - deg(P)/(2H+1) - 2 d 2^d tau / H`
    /// with measured tau.
    Sparse { deg_p: u64, tau_mean: f64 },
    /// Binomial coefficients: the theorem is `1 - o(1)`; reports the
    /// markov bound under the supplied binomial certificate `C`.
    Binomial { c: f64, tau_mean: f64 },
    /// Dependent chain: `1 - deg(P)/(2H+1) - 2 d^2 (2L)^d tau / H`.
    Chain { deg_p: u64, l: f64, tau_mean: f64 },
}

pub fn bound_simple(case: &SimpleCase, d: usize, h: u64) -> BoundReport {
    match case {
        SimpleCase::Sparse { deg_p, tau_mean } => {
            let bound = 1.0
                - *deg_p as f64 / (2.0 * h as f64 + 1.0)
                - 2.0 * d as f64 * two_pow(d) * tau_mean / h as f64;
            BoundReport::finish(
                "simple1",
                BoundInputs {
                    d,
                    h: Some(h),
                    tau_mean: Some(*tau_mean),
                    deg_p: Some(*deg_p),
                    ..Default::default()
                },
                bound,
            )
        }
        SimpleCase::Binomial { c, tau_mean } => {
            let mut r = bound_markov(d, *c, 1.0, d - 1, *tau_mean, 0.0, h);
            r.theorem = "simple2".into();
            r.asymptotic_only = true;
            r
        }
        SimpleCase::Chain { deg_p, l, tau_mean } => {
            let bound = 1.0
                - *deg_p as f64 / (2.0 * h as f64 + 1.0)
                - 2.0 * (d * d) as f64 * (2.0 * l).powi(d as i32) * tau_mean / h as f64;
            BoundReport::finish(
                "simple3",
                BoundInputs {
                    d,
                    h: Some(h),
                    l: Some(*l),
                    tau_mean: Some(*tau_mean),
                    deg_p: Some(*deg_p),
                    ..Default::default()
                },
                bound,
            )
        }
    }
}
