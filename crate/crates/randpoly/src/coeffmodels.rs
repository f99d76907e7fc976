//! Coefficient-distribution models for random monic polynomials: arbitrary
//! integer sets, polynomial-value supports, binomial marginals, dependent
//! chains, and general polynomial push-forwards of independent variables,
//! plus (C,t)-uniformity certification.
//!
//! A model is described declaratively (and serialized as JSON); `compile`
//! turns it into exact discrete distributions and parsed polynomials.
//! Sampling is a pure function of `(model, seed, trial)`.

use crate::intpoly::{IntPoly, MonicIntPoly};
use crate::rng::TrialRng;
use crate::szlemma::SparseMultiPoly;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("a coefficient support set is empty")]
    ModelDegenerate,
    #[error("weights must pair with an explicit value list of the same length")]
    WeightMismatch,
    #[error("degree must be at least 1 (and match the per-coefficient data)")]
    BadDegree,
    #[error("chain step {step} is degenerate: no usable positive degree in its t-variable")]
    ChainDegenerate { step: usize },
    #[error("chain step {step} must have {expected} variables (a_0..a_{}, t_{})", expected - 1, step)]
    ChainArity { step: usize, expected: usize },
    #[error("push-forward component {component} must use at most {max} variables")]
    PushArity { component: usize, max: usize },
    #[error("binomial probability must satisfy 0 < p < 1")]
    BadProbability,
    #[error("polynomial parse error: {0}")]
    Parse(String),
}

/// Exact finite distribution on integers: masses are `num[i]/den` with
/// `sum(num) = den`. Sampling uses 64-bit fixed-point thresholds.
#[derive(Clone, Debug)]
pub struct DiscreteDist {
    support: Vec<BigInt>,
    mass_num: Vec<BigUint>,
    mass_den: BigUint,
    /// `thresholds[j] = floor(2^64 * cum_j / den)` for `j < k-1`.
    thresholds: Vec<u64>,
}

impl DiscreteDist {
    /// Weighted distribution; `support` entries must be distinct.
    pub fn weighted(support: Vec<BigInt>, weights: Vec<BigUint>) -> Result<Self, ModelError> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(ModelError::ModelDegenerate);
        }
        if weights.iter().any(Zero::is_zero) {
            return Err(ModelError::WeightMismatch);
        }
        let mass_den: BigUint = weights.iter().sum();
        let mut thresholds = Vec::with_capacity(support.len() - 1);
        let mut cum = BigUint::zero();
        for w in &weights[..weights.len() - 1] {
            cum += w;
            let scaled: BigUint = (cum.clone() << 64) / &mass_den;
            thresholds.push(scaled.to_u64().expect("cum < den"));
        }
        Ok(DiscreteDist {
            support,
            mass_num: weights,
            mass_den,
            thresholds,
        })
    }

    pub fn uniform(support: Vec<BigInt>) -> Result<Self, ModelError> {
        let n = support.len();
        Self::weighted(support, vec![BigUint::one(); n])
    }

    pub fn point_mass(v: BigInt) -> Self {
        Self::weighted(vec![v], vec![BigUint::one()]).expect("singleton support")
    }

    /// Push-forward of the uniform distribution on `n in [-h, h]` under `p`:
    /// mass of a value is its multiplicity over `2h+1`.
    pub fn poly_pushforward(p: &IntPoly, h: u64) -> Result<Self, ModelError> {
        let mut counts: std::collections::BTreeMap<BigInt, u64> = std::collections::BTreeMap::new();
        let h = h as i64;
        for n in -h..=h {
            *counts.entry(p.evaluate(&BigInt::from(n))).or_insert(0) += 1;
        }
        let (support, weights): (Vec<BigInt>, Vec<BigUint>) = counts
            .into_iter()
            .map(|(v, c)| (v, BigUint::from(c)))
            .unzip();
        Self::weighted(support, weights)
    }

    /// Binomial `B(h, p)` with rational `p = p_num / p_den`, support
    /// `{0..h}` (optionally recentered by `-floor(h*p)`).
    pub fn binomial(h: u64, p_num: u64, p_den: u64, centered: bool) -> Result<Self, ModelError> {
        if p_num == 0 || p_num >= p_den {
            return Err(ModelError::BadProbability);
        }
        let p = BigUint::from(p_num);
        let q = BigUint::from(p_den - p_num);
        let shift = if centered {
            BigInt::from((h as u128 * p_num as u128 / p_den as u128) as i128)
        } else {
            BigInt::zero()
        };
        // binom(h, i) * p^i * q^(h-i); denominator p_den^h is implicit.
        let mut weights = Vec::with_capacity(h as usize + 1);
        let mut support = Vec::with_capacity(h as usize + 1);
        let mut binom = BigUint::one();
        for i in 0..=h {
            let w = &binom * p.pow(i as u32) * q.pow((h - i) as u32);
            weights.push(w);
            support.push(BigInt::from(i) - &shift);
            if i < h {
                binom = binom * BigUint::from(h - i) / BigUint::from(i + 1);
            }
        }
        Self::weighted(support, weights)
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> &[BigInt] {
        &self.support
    }

    pub fn mass_num(&self, i: usize) -> &BigUint {
        &self.mass_num[i]
    }

    pub fn mass_den(&self) -> &BigUint {
        &self.mass_den
    }

    pub fn mass(&self, i: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.mass_num[i].clone()),
            BigInt::from(self.mass_den.clone()),
        )
    }

    pub fn max_mass(&self) -> BigRational {
        let max_num = self.mass_num.iter().max().expect("nonempty support");
        BigRational::new(
            BigInt::from(max_num.clone()),
            BigInt::from(self.mass_den.clone()),
        )
    }

    /// Probability of the value 0.
    pub fn p_zero(&self) -> BigRational {
        match self.support.binary_search(&BigInt::zero()) {
            Ok(i) => self.mass(i),
            Err(_) => {
                // Support may be unsorted for weighted construction; scan.
                self.support
                    .iter()
                    .position(Zero::is_zero)
                    .map(|i| self.mass(i))
                    .unwrap_or_else(BigRational::zero)
            }
        }
    }

    /// One draw; distribution error is below 2^-63 per point.
    pub fn sample(&self, rng: &mut TrialRng) -> BigInt {
        let r = rng.next_u64();
        let idx = self.thresholds.partition_point(|&t| t <= r);
        self.support[idx].clone()
    }
}

/// A (C,t)-uniformity certificate: any set of at most `t` points carries
/// mass at most `C |T| / k`.
#[derive(Clone, Debug)]
pub struct UniformityCert {
    pub c: BigRational,
    pub t: u64,
    /// Support size.
    pub k: u64,
    pub max_point_mass: BigRational,
}

impl UniformityCert {
    pub fn c_f64(&self) -> f64 {
        self.c.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Exact check of the defining inequality against the adversarial
    /// subsets: the j heaviest points for every j <= t.
    pub fn satisfied_on_heaviest(&self, dist: &DiscreteDist) -> bool {
        let mut masses: Vec<BigUint> = dist.mass_num.to_vec();
        masses.sort_unstable_by(|a, b| b.cmp(a));
        let k = BigInt::from(self.k);
        let mut cum = BigUint::zero();
        for (j, m) in masses.iter().take(self.t as usize).enumerate() {
            cum += m;
            let lhs = BigRational::new(
                BigInt::from(cum.clone()),
                BigInt::from(dist.mass_den.clone()),
            );
            let rhs = &self.c * BigRational::new(BigInt::from(j as u64 + 1), k.clone());
            if lhs > rhs {
                return false;
            }
        }
        true
    }
}

/// The sufficient certificate `C = max_point_mass * k`: a distribution on
/// `k` points with largest point mass `p` is `(pk, k)`-uniform.
pub fn certify_uniformity(dist: &DiscreteDist, t: u64) -> UniformityCert {
    let k = dist.len() as u64;
    let max_point_mass = dist.max_mass();
    UniformityCert {
        c: &max_point_mass * BigRational::from_integer(BigInt::from(k)),
        t,
        k,
        max_point_mass,
    }
}

/// Declarative description of an integer support set.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    /// Explicit list of values (deduplicated).
    Explicit { values: Vec<i64> },
    /// `{lo, lo+1, ..., hi}`.
    Interval { lo: i64, hi: i64 },
    /// `{start, start+step, ...}` of length `len`.
    Progression { start: i64, step: i64, len: u64 },
    /// `count` distinct values drawn from `[-h^3, h^3]` with a dedicated
    /// seed; deterministic.
    RandomSparse { h: u64, count: u64, seed: u64 },
    /// The set of distinct values `{P(n): -h <= n <= h}` of an integer
    /// polynomial given in constant-first CSV form.
    PolyValues { poly: String, h: u64 },
}

impl SetSpec {
    pub fn interval(h: i64) -> SetSpec {
        SetSpec::Interval { lo: -h, hi: h }
    }

    /// Materialize into a sorted, deduplicated value list.
    pub fn materialize(&self) -> Result<Vec<BigInt>, ModelError> {
        let mut out: Vec<BigInt> = match self {
            SetSpec::Explicit { values } => values.iter().map(|&v| BigInt::from(v)).collect(),
            SetSpec::Interval { lo, hi } => {
                if lo > hi {
                    return Err(ModelError::ModelDegenerate);
                }
                (*lo..=*hi).map(BigInt::from).collect()
            }
            SetSpec::Progression { start, step, len } => (0..*len)
                .map(|i| BigInt::from(*start) + BigInt::from(*step) * BigInt::from(i))
                .collect(),
            SetSpec::RandomSparse { h, count, seed } => {
                let bound = BigInt::from(*h).pow(3);
                let span = (&bound * 2u32 + 1u32)
                    .to_u64()
                    .ok_or(ModelError::ModelDegenerate)?;
                if *count == 0 || *count as u128 > span as u128 {
                    return Err(ModelError::ModelDegenerate);
                }
                let mut rng = TrialRng::substream(*seed, 0x5e75);
                let mut set = std::collections::BTreeSet::new();
                while (set.len() as u64) < *count {
                    let v = BigInt::from(rng.below(span)) - &bound;
                    set.insert(v);
                }
                set.into_iter().collect()
            }
            SetSpec::PolyValues { poly, h } => {
                let p = IntPoly::from_str(poly).map_err(|e| ModelError::Parse(e.to_string()))?;
                let h = *h as i64;
                let mut set = std::collections::BTreeSet::new();
                for n in -h..=h {
                    set.insert(p.evaluate(&BigInt::from(n)));
                }
                set.into_iter().collect()
            }
        };
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(ModelError::ModelDegenerate);
        }
        Ok(out)
    }

    pub fn to_dist(&self) -> Result<DiscreteDist, ModelError> {
        DiscreteDist::uniform(self.materialize()?)
    }
}

/// A distribution description: a set plus optional weights (weights only
/// pair with `Explicit`, in the listed order before deduplication).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DistSpec {
    pub set: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
}

impl DistSpec {
    pub fn uniform(set: SetSpec) -> DistSpec {
        DistSpec { set, weights: None }
    }

    pub fn to_dist(&self) -> Result<DiscreteDist, ModelError> {
        match &self.weights {
            None => self.set.to_dist(),
            Some(w) => {
                let SetSpec::Explicit { values } = &self.set else {
                    return Err(ModelError::WeightMismatch);
                };
                if values.len() != w.len() {
                    return Err(ModelError::WeightMismatch);
                }
                DiscreteDist::weighted(
                    values.iter().map(|&v| BigInt::from(v)).collect(),
                    w.iter().map(|&x| BigUint::from(x)).collect(),
                )
            }
        }
    }
}

/// Joint coefficient distribution of `(a_0, ..., a_{d-1})`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffModel {
    /// Independent coefficients, each uniform on its own set.
    UniformOnSets { sets: Vec<SetSpec> },
    /// All coefficients uniform on `[-h, h]`.
    Classical { degree: usize, h: i64 },
    /// `a_0` is the push-forward of uniform `n in [-h, h]` under `poly`
    /// (CSV coefficients); the remaining coefficients are uniform on
    /// `others`.
    PolyValueConstant {
        poly: String,
        h: u64,
        others: Vec<SetSpec>,
    },
    /// Independent `B(h, p)` coefficients, `p = p_num / p_den`.
    Binomial {
        degree: usize,
        h: u64,
        p_num: u64,
        p_den: u64,
        #[serde(default)]
        centered: bool,
    },
    /// `a_0` from the push-forward of `constant_poly` on `[-h, h]`; then
    /// `a_i = steps[i-1](a_0, ..., a_{i-1}, t_i)` with `t_i` uniform on
    /// `t_sets[i-1]`. Step polynomials are text-format multivariate
    /// polynomials in variables `x1..x_{i+1}` = `(a_0, ..., a_{i-1}, t_i)`.
    DependentChain {
        constant_poly: String,
        h: u64,
        steps: Vec<String>,
        t_sets: Vec<SetSpec>,
    },
    /// `(a_0, ..., a_{d-1}) = (t_0, F(t_0, ..., t_m))`: `components[j]`
    /// (text format, variables `x1..x_{m+1}` = `(t_0, ..., t_m)`) gives
    /// `a_{j+1}`.
    PushForward {
        constant: DistSpec,
        t_dists: Vec<DistSpec>,
        components: Vec<String>,
    },
}

/// A validated model with parsed polynomials and materialized
/// distributions, ready for sampling.
#[derive(Clone, Debug)]
pub struct CompiledModel {
    pub degree: usize,
    kind: CompiledKind,
}

#[derive(Clone, Debug)]
enum CompiledKind {
    Independent(Vec<DiscreteDist>),
    Chain {
        constant: DiscreteDist,
        steps: Vec<SparseMultiPoly>,
        t_dists: Vec<DiscreteDist>,
    },
    Push {
        constant: DiscreteDist,
        t_dists: Vec<DiscreteDist>,
        components: Vec<SparseMultiPoly>,
    },
}

impl CoeffModel {
    pub fn classical(degree: usize, h: i64) -> CoeffModel {
        CoeffModel::Classical { degree, h }
    }

    pub fn compile(&self) -> Result<CompiledModel, ModelError> {
        match self {
            CoeffModel::UniformOnSets { sets } => {
                if sets.is_empty() {
                    return Err(ModelError::BadDegree);
                }
                let dists: Result<Vec<_>, _> = sets.iter().map(SetSpec::to_dist).collect();
                Ok(CompiledModel {
                    degree: sets.len(),
                    kind: CompiledKind::Independent(dists?),
                })
            }
            CoeffModel::Classical { degree, h } => {
                if *degree == 0 {
                    return Err(ModelError::BadDegree);
                }
                let dist = SetSpec::interval(*h).to_dist()?;
                Ok(CompiledModel {
                    degree: *degree,
                    kind: CompiledKind::Independent(vec![dist; *degree]),
                })
            }
            CoeffModel::PolyValueConstant { poly, h, others } => {
                let p = IntPoly::from_str(poly).map_err(|e| ModelError::Parse(e.to_string()))?;
                let mut dists = vec![DiscreteDist::poly_pushforward(&p, *h)?];
                for s in others {
                    dists.push(s.to_dist()?);
                }
                Ok(CompiledModel {
                    degree: dists.len(),
                    kind: CompiledKind::Independent(dists),
                })
            }
            CoeffModel::Binomial {
                degree,
                h,
                p_num,
                p_den,
                centered,
            } => {
                if *degree == 0 {
                    return Err(ModelError::BadDegree);
                }
                let dist = DiscreteDist::binomial(*h, *p_num, *p_den, *centered)?;
                Ok(CompiledModel {
                    degree: *degree,
                    kind: CompiledKind::Independent(vec![dist; *degree]),
                })
            }
            CoeffModel::DependentChain {
                constant_poly,
                h,
                steps,
                t_sets,
            } => {
                if steps.len() != t_sets.len() || steps.is_empty() {
                    return Err(ModelError::BadDegree);
                }
                let p = IntPoly::from_str(constant_poly)
                    .map_err(|e| ModelError::Parse(e.to_string()))?;
                let constant = DiscreteDist::poly_pushforward(&p, *h)?;
                let mut parsed = Vec::with_capacity(steps.len());
                for (i, s) in steps.iter().enumerate() {
                    let q: SparseMultiPoly = s
                        .parse()
                        .map_err(|e: crate::szlemma::SzError| ModelError::Parse(e.to_string()))?;
                    // Step i (1-based) maps (a_0..a_{i-1}, t_i): i+1 variables.
                    let expected = i + 2;
                    if q.nvars() > expected {
                        return Err(ModelError::ChainArity {
                            step: i + 1,
                            expected,
                        });
                    }
                    let q = q.padded(expected);
                    check_chain_step(&q, i + 1)?;
                    parsed.push(q);
                }
                let t_dists: Result<Vec<_>, _> = t_sets.iter().map(SetSpec::to_dist).collect();
                Ok(CompiledModel {
                    degree: steps.len() + 1,
                    kind: CompiledKind::Chain {
                        constant,
                        steps: parsed,
                        t_dists: t_dists?,
                    },
                })
            }
            CoeffModel::PushForward {
                constant,
                t_dists,
                components,
            } => {
                if components.is_empty() {
                    return Err(ModelError::BadDegree);
                }
                let nvars = t_dists.len() + 1;
                let mut parsed = Vec::with_capacity(components.len());
                for (j, s) in components.iter().enumerate() {
                    let q: SparseMultiPoly = s
                        .parse()
                        .map_err(|e: crate::szlemma::SzError| ModelError::Parse(e.to_string()))?;
                    if q.nvars() > nvars {
                        return Err(ModelError::PushArity {
                            component: j + 1,
                            max: nvars,
                        });
                    }
                    parsed.push(q.padded(nvars));
                }
                let td: Result<Vec<_>, _> = t_dists.iter().map(DistSpec::to_dist).collect();
                Ok(CompiledModel {
                    degree: components.len() + 1,
                    kind: CompiledKind::Push {
                        constant: constant.to_dist()?,
                        t_dists: td?,
                        components: parsed,
                    },
                })
            }
        }
    }
}

/// Symbolic check that a chain step has usable positive degree in its
/// t-variable: some coefficient of `t^j`, `j >= 1`, must be nonzero, and at
/// least one such coefficient must either involve a variable other than
/// `a_0` or be a monomial `c * a_0^e` (nonvanishing for `a_0 != 0`).
fn check_chain_step(q: &SparseMultiPoly, step: usize) -> Result<(), ModelError> {
    let t_var = q.nvars() - 1;
    let deg_t = q.degree_in(t_var);
    if deg_t == 0 {
        return Err(ModelError::ChainDegenerate { step });
    }
    for j in 1..=deg_t {
        let cj = q.coefficient_of(t_var, j);
        if cj.is_zero() {
            continue;
        }
        if cj.involves_variable_other_than(0) || cj.is_monomial_in(0) {
            return Ok(());
        }
    }
    Err(ModelError::ChainDegenerate { step })
}

impl CompiledModel {
    /// One draw of `(a_0, ..., a_{d-1})`; deterministic in
    /// `(model, seed, trial)`.
    pub fn sample(&self, seed: u64, trial: u64) -> MonicIntPoly {
        let mut rng = TrialRng::substream(seed, trial);
        let coeffs = match &self.kind {
            CompiledKind::Independent(dists) => dists.iter().map(|d| d.sample(&mut rng)).collect(),
            CompiledKind::Chain {
                constant,
                steps,
                t_dists,
            } => {
                let mut coeffs: Vec<BigInt> = vec![constant.sample(&mut rng)];
                for (step, t_dist) in steps.iter().zip(t_dists) {
                    let t = t_dist.sample(&mut rng);
                    let mut point = coeffs.clone();
                    point.push(t);
                    coeffs.push(step.evaluate(&point));
                }
                coeffs
            }
            CompiledKind::Push {
                constant,
                t_dists,
                components,
            } => {
                let mut point: Vec<BigInt> = vec![constant.sample(&mut rng)];
                for d in t_dists {
                    point.push(d.sample(&mut rng));
                }
                let mut coeffs = vec![point[0].clone()];
                coeffs.extend(components.iter().map(|f| f.evaluate(&point)));
                coeffs
            }
        };
        MonicIntPoly::new(coeffs).expect("degree >= 1 enforced at compile time")
    }

    /// Marginal distribution of the constant coefficient `a_0`.
    pub fn constant_marginal(&self) -> &DiscreteDist {
        match &self.kind {
            CompiledKind::Independent(dists) => &dists[0],
            CompiledKind::Chain { constant, .. } => constant,
            CompiledKind::Push { constant, .. } => constant,
        }
    }

    /// Distributions of the genuinely random non-constant inputs
    /// (`a_1..a_{d-1}` themselves for independent kinds, the `t_i` for
    /// chains and push-forwards).
    pub fn random_input_dists(&self) -> Vec<&DiscreteDist> {
        match &self.kind {
            CompiledKind::Independent(dists) => dists.iter().skip(1).collect(),
            CompiledKind::Chain { t_dists, .. } => t_dists.iter().collect(),
            CompiledKind::Push { t_dists, .. } => t_dists.iter().collect(),
        }
    }

    /// Push-forward components when the model is a push-forward.
    pub fn push_components(&self) -> Option<&[SparseMultiPoly]> {
        match &self.kind {
            CompiledKind::Push { components, .. } => Some(components),
            _ => None,
        }
    }

    /// Whether the coefficients are independently distributed (no chain or
    /// push-forward coupling).
    pub fn is_independent(&self) -> bool {
        matches!(self.kind, CompiledKind::Independent(_))
    }

    /// Certified degree bound `L` of the map from independent inputs to
    /// coefficients: the identity for independent kinds, the maximum
    /// component degree for push-forwards, and the composed bound `L^d`
    /// for dependent chains.
    pub fn pushforward_degree(&self) -> u64 {
        match &self.kind {
            CompiledKind::Independent(_) => 1,
            CompiledKind::Push { components, .. } => components
                .iter()
                .map(|c| c.total_degree() as u64)
                .max()
                .unwrap_or(1)
                .max(1),
            CompiledKind::Chain { steps, .. } => {
                let l = steps
                    .iter()
                    .map(|s| s.total_degree() as u64)
                    .max()
                    .unwrap_or(1)
                    .max(1);
                let d = (steps.len() + 1) as u32;
                l.checked_pow(d).unwrap_or(u64::MAX)
            }
        }
    }
}
