//! The subset-product factorization criterion.
//!
//! For a monic degree-`d` polynomial with roots `α_1..α_d`, the criterion
//! value for `(k, b0)` is the product of `(b0 - α_{i_1}···α_{i_k})` over all
//! k-subsets. It vanishes exactly when some monic complex factor of degree
//! `k` has constant coefficient `(-1)^k b0` (a monic factor's constant
//! coefficient is the signed product of its roots), which is what connects
//! complex root geometry to factorization over ℤ. This module evaluates the
//! numerically at the roots (never expanding it symbolically), runs a
//! randomized not-identically-zero test over push-forward families, maps
//! root-magnitude strata for one varied coefficient, and demonstrates the
//! cyclic-window family where the criterion degenerates.

use crate::coeffmodels::CompiledModel;
use crate::intpoly::{self, MonicIntPoly, PolyError};
use crate::rng::TrialRng;
use crate::roots::{self, RootsError};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CriterionError {
    #[error("invalid criterion query: {0}")]
    InvalidQuery(String),
    #[error("polynomial constant coefficient does not match the query's a0")]
    ConstantMismatch,
    #[error("subset enumeration budget exceeded: {subsets} > 2^20")]
    SubsetBudgetExceeded { subsets: u128 },
    #[error("cyclic-window demo requires degree >= 12 and a0 != 0")]
    F6Precondition,
    #[error("model is not a push-forward")]
    NotPushForward,
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Parameters of the criterion: degree, factor degree `k`, constant
/// coefficient `a0`, candidate factor constant `b0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionQuery {
    pub degree: usize,
    pub k: usize,
    pub a0: BigInt,
    pub b0: BigInt,
}

impl CriterionQuery {
    pub fn new(degree: usize, k: usize, a0: BigInt, b0: BigInt) -> Result<Self, CriterionError> {
        if k == 0 || k >= degree {
            return Err(CriterionError::InvalidQuery(format!(
                "need 1 <= k < d, got k = {k}, d = {degree}"
            )));
        }
        if a0.is_zero() {
            return Err(CriterionError::InvalidQuery("a0 must be nonzero".into()));
        }
        if b0.is_zero() {
            return Err(CriterionError::InvalidQuery("b0 must be nonzero".into()));
        }
        Ok(CriterionQuery { degree, k, a0, b0 })
    }

    /// Whether `b0 | a0`, required when the query feeds a reducibility
    /// argument (relaxed for exploration).
    pub fn divisor_consistent(&self) -> bool {
        (&self.a0 % &self.b0).is_zero()
    }
}

const SUBSET_BUDGET: u128 = 1 << 20;

/// The evaluated criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionValue {
    /// Product over all subsets, as a complex number when representable in
    /// f64 range (it overflows for large `d`; `log_abs` always holds).
    pub value: [f64; 2],
    /// `sum over subsets of ln |b0 - product|`; `-inf` on an exact hit.
    pub log_abs: f64,
    /// `min over subsets of |b0 - product|`.
    pub min_gap: f64,
    /// Root indices attaining the minimum (first in lexicographic order).
    pub argmin_subset: Vec<usize>,
    /// `binom(d, k)`.
    pub subset_count: u64,
    /// Whether the value is zero at the requested relative tolerance. The
    /// exact product vanishes iff some subset gap vanishes, so the test is
    /// `min_gap < tol * (1 + |b0|)`: it stays meaningful when the other
    /// factors of the product are huge (large roots) or all sub-unit.
    pub is_zero: bool,
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Depth-first lexicographic enumeration of k-subsets with running
/// products.
fn for_each_subset<F: FnMut(&[usize], Complex64)>(
    roots: &[Complex64],
    k: usize,
    start: usize,
    idx: &mut Vec<usize>,
    prod: Complex64,
    visit: &mut F,
) {
    if idx.len() == k {
        visit(idx, prod);
        return;
    }
    let remaining = k - idx.len();
    for i in start..=(roots.len() - remaining) {
        idx.push(i);
        for_each_subset(roots, k, i + 1, idx, prod * roots[i], visit);
        idx.pop();
    }
}

/// Product accumulator that tracks magnitude in log space and keeps the
/// mantissa scaled, so huge subset counts cannot overflow silently.
#[derive(Clone, Copy)]
struct ScaledProduct {
    mantissa: Complex64,
    exp2: i64,
    log_abs: f64,
}

impl ScaledProduct {
    fn one() -> Self {
        ScaledProduct {
            mantissa: Complex64::new(1.0, 0.0),
            exp2: 0,
            log_abs: 0.0,
        }
    }

    fn mul(&mut self, z: Complex64) {
        self.log_abs += z.norm().ln();
        self.mantissa *= z;
        let n = self.mantissa.norm();
        if n == 0.0 {
            self.exp2 = 0;
            return;
        }
        if !(1e-120..=1e120).contains(&n) {
            let shift = n.log2().round() as i64;
            self.mantissa *= 2f64.powi(-shift as i32);
            self.exp2 += shift;
        }
    }

    fn to_complex(self) -> Complex64 {
        if self.exp2.abs() <= 1000 {
            return self.mantissa * 2f64.powi(self.exp2 as i32);
        }
        // Out of f64 range: saturate per component with the mantissa's
        // signs; `log_abs` carries the true magnitude.
        let mag = if self.exp2 > 0 { f64::INFINITY } else { 0.0 };
        let sat = |x: f64| if x == 0.0 { 0.0 } else { mag.copysign(x) };
        Complex64::new(sat(self.mantissa.re), sat(self.mantissa.im))
    }
}

/// Evaluate the criterion for `(d, k, a0, b0)` at the roots of `f`.
///
/// `tol` is the relative zero threshold on the minimum subset gap (see
/// [`CriterionValue::is_zero`]).
pub fn evaluate(
    f: &MonicIntPoly,
    q: &CriterionQuery,
    tol: f64,
) -> Result<CriterionValue, CriterionError> {
    if f.constant_coeff() != &q.a0 {
        return Err(CriterionError::ConstantMismatch);
    }
    if f.degree() != q.degree {
        return Err(CriterionError::InvalidQuery(format!(
            "polynomial degree {} != query degree {}",
            f.degree(),
            q.degree
        )));
    }
    let subsets = binomial_u128(q.degree as u64, q.k as u64);
    if q.degree > 20 || subsets > SUBSET_BUDGET {
        return Err(CriterionError::SubsetBudgetExceeded { subsets });
    }
    let rs = roots::find_roots(f, 1e-12)?;
    Ok(evaluate_at_roots(rs.roots(), q, tol))
}

/// Criterion evaluation against precomputed roots (the roots' provenance —
/// ordering, precision — does not affect the value because the product is
/// symmetric).
pub fn evaluate_at_roots(roots: &[Complex64], q: &CriterionQuery, tol: f64) -> CriterionValue {
    let b0 = Complex64::new(q.b0.to_f64().unwrap_or(f64::INFINITY), 0.0);
    let mut acc = ScaledProduct::one();
    let mut min_gap = f64::INFINITY;
    let mut argmin: Vec<usize> = Vec::new();
    let mut idx = Vec::with_capacity(q.k);
    for_each_subset(
        roots,
        q.k,
        0,
        &mut idx,
        Complex64::new(1.0, 0.0),
        &mut |subset, prod| {
            let term = b0 - prod;
            let gap = term.norm();
            if gap < min_gap {
                min_gap = gap;
                argmin = subset.to_vec();
            }
            acc.mul(term);
        },
    );
    let subset_count = binomial_u128(q.degree as u64, q.k as u64) as u64;
    let b0_abs = q.b0.to_f64().unwrap_or(f64::INFINITY).abs();
    let value = acc.to_complex();
    CriterionValue {
        value: [value.re, value.im],
        log_abs: acc.log_abs,
        min_gap,
        argmin_subset: argmin,
        subset_count,
        is_zero: min_gap < tol * (1.0 + b0_abs),
    }
}

/// True iff `f` admits a factorization `g * h` over ℂ with `deg g = k` and
/// `g(0) = b0` (both factors monic), within tolerance.
///
/// A monic factor with constant coefficient `b0` has root product
/// `(-1)^k b0`, so the criterion is evaluated at that sign-adjusted
/// target. An exact integer witness is attempted first: the minimizing
/// subset is rounded and confirmed by exact division, so integral factors
/// are reported with certainty. Otherwise the decision falls to the
/// relative threshold `min_gap < tol * (1 + |b0|)`.
pub fn has_complex_factorization(
    f: &MonicIntPoly,
    k: usize,
    b0: &BigInt,
    tol: f64,
) -> Result<bool, CriterionError> {
    let target = if k % 2 == 1 { -b0.clone() } else { b0.clone() };
    let q = CriterionQuery::new(f.degree(), k, f.constant_coeff().clone(), target)?;
    let rs = roots::find_roots(f, 1e-12)?;
    let cv = evaluate_at_roots(rs.roots(), &q, tol);

    // Integer-witness confirmation.
    let subset: Vec<Complex64> = cv.argmin_subset.iter().map(|&i| rs.roots()[i]).collect();
    let coeffs = intpoly::monic_from_roots(&subset);
    if coeffs
        .iter()
        .all(|c| (c.re - c.re.round()).hypot(c.im) <= 0.25 && c.re.round().abs() < 2f64.powi(100))
    {
        let g = MonicIntPoly::new(
            coeffs
                .iter()
                .map(|c| BigInt::from(c.re.round() as i128))
                .collect(),
        )?;
        if g.constant_coeff() == b0 && f.degree() > g.degree() && f.try_divide_exact(&g)?.is_some()
        {
            return Ok(true);
        }
    }

    let b0_abs = b0.to_f64().unwrap_or(f64::INFINITY).abs();
    Ok(cv.min_gap < tol * (1.0 + b0_abs))
}

/// Verdict of the randomized not-identically-zero test.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PitVerdict {
    /// A sample where the criterion is bounded away from zero.
    NotIdenticallyZero {
        witness_t: Vec<i64>,
        trial: u64,
        min_gap: f64,
    },
    /// Every sample vanished. This never asserts identical vanishing; the
    /// reported bound is the per-trial probability that a nonzero
    /// polynomial would have evaded detection.
    Inconclusive {
        trials: u64,
        per_trial_failure_bound: f64,
    },
}

/// Randomized identity test for `P_{d,k,a0,b0} ∘ F` over a push-forward
/// family with `a_0` frozen to the query's `a0`: evaluates at uniform
/// integer t-vectors from `[-box_half, box_half]^m`.
pub fn nondegeneracy_pit(
    model: &CompiledModel,
    q: &CriterionQuery,
    trials: u64,
    box_half: i64,
    seed: u64,
) -> Result<PitVerdict, CriterionError> {
    let components = model
        .push_components()
        .ok_or(CriterionError::NotPushForward)?;
    let m = components
        .first()
        .map(|c| c.nvars() - 1)
        .unwrap_or_default();
    let deg_f = components
        .iter()
        .map(|c| c.total_degree() as u64)
        .max()
        .unwrap_or(1)
        .max(1);
    let threshold = 1e-6;
    for trial in 0..trials {
        let mut rng = TrialRng::substream(seed, trial);
        let t: Vec<i64> = (0..m).map(|_| rng.int_in(-box_half, box_half)).collect();
        let mut point: Vec<BigInt> = vec![q.a0.clone()];
        point.extend(t.iter().map(|&v| BigInt::from(v)));
        let mut coeffs = vec![q.a0.clone()];
        coeffs.extend(components.iter().map(|c| c.evaluate(&point)));
        let f = MonicIntPoly::new(coeffs)?;
        let rs = roots::find_roots(&f, 1e-12)?;
        let cv = evaluate_at_roots(rs.roots(), q, 1e-9);
        let b0_abs = q.b0.to_f64().unwrap_or(f64::INFINITY).abs();
        if cv.min_gap > threshold * (1.0 + b0_abs) {
            return Ok(PitVerdict::NotIdenticallyZero {
                witness_t: t,
                trial,
                min_gap: cv.min_gap,
            });
        }
    }
    let deg_p = binomial_u128(q.degree as u64, q.k as u64) as f64;
    Ok(PitVerdict::Inconclusive {
        trials,
        per_trial_failure_bound: deg_p * deg_f as f64 * m as f64 / (2.0 * box_half as f64 + 1.0),
    })
}

/// The cyclic-window analogue of the identity test: the window product
/// always equals `a0^6`, so every trial vanishes and the verdict is
/// `Inconclusive` — the configuration where the criterion method breaks.
pub fn f6_pit(
    degree: usize,
    a0: &BigInt,
    trials: u64,
    box_half: i64,
    seed: u64,
    tol: f64,
) -> Result<PitVerdict, CriterionError> {
    if degree < 12 || a0.is_zero() {
        return Err(CriterionError::F6Precondition);
    }
    for trial in 0..trials {
        let mut rng = TrialRng::substream(seed, trial);
        let mut coeffs = vec![a0.clone()];
        for _ in 1..degree {
            coeffs.push(BigInt::from(rng.int_in(-box_half, box_half)));
        }
        let f = MonicIntPoly::new(coeffs)?;
        let report = f6_demo(&f, 1e-12)?;
        if report.relative_error > tol {
            let witness: Vec<i64> = f.coeffs()[1..]
                .iter()
                .map(|c| c.to_i64().unwrap_or(0))
                .collect();
            return Ok(PitVerdict::NotIdenticallyZero {
                witness_t: witness,
                trial,
                min_gap: report.relative_error,
            });
        }
    }
    Ok(PitVerdict::Inconclusive {
        trials,
        per_trial_failure_bound: 6.0 * degree as f64 / (2.0 * box_half as f64 + 1.0),
    })
}

/// Report of the cyclic-window product check.
#[derive(Clone, Debug, Serialize)]
pub struct F6Report {
    pub degree: usize,
    pub a0: String,
    /// `a0^6` as an exact integer.
    pub target: String,
    /// The d window products (re, im).
    pub window_products: Vec<[f64; 2]>,
    /// Product of all windows.
    pub total: [f64; 2],
    pub relative_error: f64,
}

/// Form the `d` cyclic windows of 6 consecutive roots (indices mod `d`),
/// multiply the window products, and compare with `a0^6`. Each root appears
/// in exactly 6 windows, so the total is `(prod of roots)^6 = a0^6`
/// regardless of root order.
pub fn f6_demo(f: &MonicIntPoly, tol: f64) -> Result<F6Report, CriterionError> {
    let d = f.degree();
    if d < 12 || f.constant_coeff().is_zero() {
        return Err(CriterionError::F6Precondition);
    }
    let rs = roots::find_roots(f, tol)?;
    let roots = rs.roots();
    let mut windows = Vec::with_capacity(d);
    let mut total = ScaledProduct::one();
    for i in 0..d {
        let mut w = Complex64::new(1.0, 0.0);
        for j in 0..6 {
            w *= roots[(i + j) % d];
        }
        windows.push([w.re, w.im]);
        total.mul(w);
    }
    let total = total.to_complex();
    let target = f.constant_coeff().pow(6);
    let target_f = target.to_f64().unwrap_or(f64::INFINITY);
    let relative_error = (total - Complex64::new(target_f, 0.0)).norm() / target_f.abs();
    Ok(F6Report {
        degree: d,
        a0: f.constant_coeff().to_string(),
        target: target.to_string(),
        window_products: windows,
        total: [total.re, total.im],
        relative_error,
    })
}

/// One rung of a strata scan.
#[derive(Clone, Debug, Serialize)]
pub struct StrataRung {
    /// Value assigned to the highest varied index at this rung.
    pub top_coeff: String,
    /// Root magnitudes, ascending.
    pub observed: Vec<f64>,
    pub strata: Vec<StratumRow>,
    /// `min over k < d, b0 | a0 (both signs), k-subsets of |prod - b0|`.
    pub min_divisor_gap: f64,
    /// Same minimum restricted to each k (index k-1).
    pub min_divisor_gap_by_k: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumRow {
    pub count: usize,
    pub predicted: f64,
    pub max_rel_deviation: f64,
}

/// A subset size split `(k_small, k_large)` whose product magnitude is
/// asymptotically pinned at `|a0|^{k_small/h}` — possible with `k < d` only
/// when `gcd(d, h) > 1`.
#[derive(Clone, Debug, Serialize)]
pub struct PersistentProduct {
    pub k_small: usize,
    pub k_large: usize,
    pub predicted_magnitude: f64,
    /// Per rung: `min over (k_small+k_large)-subsets of ||prod| - predicted|`.
    pub per_rung_gap: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrataReport {
    pub degree: usize,
    /// Varied coefficient indices, strictly decreasing.
    pub varied: Vec<usize>,
    /// Whether `gcd({d} ∪ varied) = 1` (the regime where subset products
    /// escape every fixed target).
    pub gcd_ok: bool,
    pub omega: u64,
    pub rungs: Vec<StrataRung>,
    pub persistent: Vec<PersistentProduct>,
}

/// Default geometric ladder `10^3, 10^4.5, 10^6, 10^7.5, 10^9`.
pub fn default_ladder() -> Vec<BigInt> {
    [1_000i64, 31_623, 1_000_000, 31_622_777, 1_000_000_000]
        .iter()
        .map(|&v| BigInt::from(v))
        .collect()
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if a == 0 {
        b
    } else {
        gcd_usize(b % a, a)
    }
}

/// Scan root-magnitude strata for a family where the coefficients at
/// `varied` indices climb a geometric ladder while the rest stay fixed.
///
/// `base` supplies the fixed coefficients `(a_0, ..., a_{d-1})`; entries at
/// varied indices are overwritten per rung: the highest index `i_1` takes
/// the rung value and each further index takes `omega` times the previous.
/// Also reports, per rung, how close any subset product comes to any
/// divisor of `a_0`, and the persistent product splits when the gcd
/// condition fails.
pub fn strata_magnitudes(
    base: &[BigInt],
    varied: &[usize],
    ladder: &[BigInt],
    omega: u64,
    tol: f64,
) -> Result<StrataReport, CriterionError> {
    let d = base.len();
    if !(2..=20).contains(&d) {
        return Err(CriterionError::InvalidQuery(
            "degree must be in [2, 20]".into(),
        ));
    }
    if varied.is_empty()
        || varied.windows(2).any(|w| w[0] <= w[1])
        || varied.iter().any(|&i| i == 0 || i >= d)
    {
        return Err(CriterionError::InvalidQuery(
            "varied indices must be strictly decreasing within [1, d-1]".into(),
        ));
    }
    if base[0].is_zero() {
        return Err(CriterionError::InvalidQuery("a0 must be nonzero".into()));
    }
    if ladder.is_empty() {
        return Err(CriterionError::InvalidQuery("ladder is empty".into()));
    }
    let gcd_ok = varied.iter().fold(d, |g, &i| gcd_usize(g, i)) == 1;
    let a0_abs = base[0].to_f64().unwrap_or(f64::INFINITY).abs();
    let divisors = divisor_targets(&base[0]);

    // Persistent splits exist only in the single-index analysis.
    let mut persistent: Vec<PersistentProduct> = if varied.len() == 1 {
        let h = varied[0];
        let mut out = Vec::new();
        for k_small in 0..=h {
            for k_large in 0..=(d - h) {
                let k = k_small + k_large;
                if k == 0 || k >= d {
                    continue;
                }
                if k_small * (d - h) == k_large * h {
                    out.push(PersistentProduct {
                        k_small,
                        k_large,
                        predicted_magnitude: a0_abs.powf(k_small as f64 / h as f64),
                        per_rung_gap: Vec::new(),
                    });
                }
            }
        }
        out
    } else {
        Vec::new()
    };

    let mut rungs = Vec::with_capacity(ladder.len());
    for rung in ladder {
        let mut coeffs = base.to_vec();
        let mut v = rung.clone();
        for &i in varied {
            coeffs[i] = v.clone();
            v *= BigInt::from(omega);
        }
        let f = MonicIntPoly::new(coeffs)?;
        let rs = roots::find_roots(&f, tol)?;
        let mut observed: Vec<f64> = rs.roots().iter().map(|r| r.norm()).collect();
        observed.sort_by(|a, b| a.partial_cmp(b).unwrap());

        // Predicted strata, smallest magnitude first.
        let mut strata: Vec<(usize, f64)> = Vec::new();
        let i1 = varied[0];
        let is = *varied.last().unwrap();
        let top = rung.to_f64().unwrap_or(f64::INFINITY);
        if varied.len() == 1 {
            let h = i1;
            strata.push((h, (a0_abs / top).powf(1.0 / h as f64)));
            strata.push((d - h, top.powf(1.0 / (d - h) as f64)));
        } else {
            let bottom_coeff = top * (omega as f64).powi(varied.len() as i32 - 1);
            strata.push((is, (a0_abs / bottom_coeff).powf(1.0 / is as f64)));
            for t in 1..varied.len() {
                let gap = varied[t - 1] - varied[t];
                strata.push((gap, (omega as f64).powf(1.0 / gap as f64)));
            }
            strata.push((d - i1, top.powf(1.0 / (d - i1) as f64)));
            strata.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        }

        let mut rows = Vec::new();
        let mut lo = 0usize;
        for (count, predicted) in strata {
            let slice = &observed[lo..lo + count];
            let max_rel_deviation = slice
                .iter()
                .map(|m| (m - predicted).abs() / predicted)
                .fold(0.0, f64::max);
            rows.push(StratumRow {
                count,
                predicted,
                max_rel_deviation,
            });
            lo += count;
        }

        // Subset-product gaps to integer divisor targets.
        let mut by_k = Vec::with_capacity(d - 1);
        let mut overall = f64::INFINITY;
        for k in 1..d {
            let mut min_k = f64::INFINITY;
            let mut idx = Vec::with_capacity(k);
            for_each_subset(
                rs.roots(),
                k,
                0,
                &mut idx,
                Complex64::new(1.0, 0.0),
                &mut |_subset, prod| {
                    for b0 in &divisors {
                        let gap = (prod - Complex64::new(*b0, 0.0)).norm();
                        min_k = min_k.min(gap);
                    }
                },
            );
            overall = overall.min(min_k);
            by_k.push(min_k);
        }

        for p in &mut persistent {
            let k = p.k_small + p.k_large;
            let mut best = f64::INFINITY;
            let mut idx = Vec::with_capacity(k);
            for_each_subset(
                rs.roots(),
                k,
                0,
                &mut idx,
                Complex64::new(1.0, 0.0),
                &mut |_subset, prod| {
                    best = best.min((prod.norm() - p.predicted_magnitude).abs());
                },
            );
            p.per_rung_gap.push(best);
        }

        rungs.push(StrataRung {
            top_coeff: rung.to_string(),
            observed,
            strata: rows,
            min_divisor_gap: overall,
            min_divisor_gap_by_k: by_k,
        });
    }

    Ok(StrataReport {
        degree: d,
        varied: varied.to_vec(),
        gcd_ok,
        omega,
        rungs,
        persistent,
    })
}

/// All divisors of `|a0|` with both signs, as f64 targets.
fn divisor_targets(a0: &BigInt) -> Vec<f64> {
    let m = a0.abs().to_biguint().expect("nonzero");
    let factors = crate::divisors::factorize(&m);
    let mut divs: Vec<BigInt> = vec![BigInt::from(1)];
    for (p, e) in factors {
        let p = BigInt::from(p);
        let mut next = Vec::new();
        for d in &divs {
            let mut power = BigInt::from(1);
            for _ in 0..=e {
                next.push(d * &power);
                power *= &p;
            }
        }
        divs = next;
    }
    let mut out: Vec<f64> = divs
        .iter()
        .flat_map(|d| {
            let v = d.to_f64().unwrap_or(f64::INFINITY);
            [v, -v]
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffmodels::{CoeffModel, DistSpec, SetSpec};

    fn poly(coeffs: &[i64]) -> MonicIntPoly {
        MonicIntPoly::from_i64(coeffs).unwrap()
    }

    fn q(d: usize, k: usize, a0: i64, b0: i64) -> CriterionQuery {
        CriterionQuery::new(d, k, BigInt::from(a0), BigInt::from(b0)).unwrap()
    }

    #[test]
    fn criterion_zero_when_root_product_matches() {
        // f = x^2 - 3x + 2 with roots {1, 2}: (b0 - 1)(b0 - 2).
        let f = poly(&[2, -3]);
        let cv = evaluate(&f, &q(2, 1, 2, 2), 1e-9).unwrap();
        assert!(cv.is_zero);
        assert!(cv.min_gap < 1e-9);
        assert_eq!(cv.subset_count, 2);

        let cv = evaluate(&f, &q(2, 1, 2, 3), 1e-9).unwrap();
        assert!(!cv.is_zero);
        assert!((cv.value[0] - 2.0).abs() < 1e-8);

        // x^2 + 1: (1 - i)(1 + i) = 2.
        let cv = evaluate(&poly(&[1, 0]), &q(2, 1, 1, 1), 1e-9).unwrap();
        assert!((cv.value[0] - 2.0).abs() < 1e-8);
        assert!(cv.value[1].abs() < 1e-8);
    }

    #[test]
    fn criterion_symmetric_under_root_permutation() {
        let f = poly(&[6, -5, -2]);
        let rs = roots::find_roots(&f, 1e-12).unwrap();
        let query = q(3, 2, 6, 3);
        let a = evaluate_at_roots(rs.roots(), &query, 1e-9);
        let mut shuffled = rs.roots().to_vec();
        shuffled.rotate_left(1);
        shuffled.swap(0, 1);
        let b = evaluate_at_roots(&shuffled, &query, 1e-9);
        let va = Complex64::new(a.value[0], a.value[1]);
        let vb = Complex64::new(b.value[0], b.value[1]);
        assert!((va - vb).norm() <= 1e-9 * va.norm().max(1.0));
    }

    #[test]
    fn complex_factorization_detects_linear_factor() {
        // f = (x-1)(x^2+x+3) = x^3 + 2x - 3; factor (x - 1) has b0 = -1.
        let f = poly(&[-1]).mul(&poly(&[3, 1]));
        assert_eq!(f, poly(&[-3, 2, 0]));
        assert!(has_complex_factorization(&f, 1, &BigInt::from(-1), 1e-6).unwrap());
        assert!(!has_complex_factorization(&poly(&[1, 0]), 1, &BigInt::from(1), 1e-6).unwrap());
    }

    #[test]
    fn constructed_products_always_detected() {
        let mut rng = TrialRng::substream(0xFAC, 0);
        for _ in 0..200 {
            let dg = 1 + rng.below(3) as usize;
            let dh = 1 + rng.below(3) as usize;
            let g_coeffs: Vec<i64> = (0..dg).map(|_| rng.int_in(-20, 20)).collect();
            let h_coeffs: Vec<i64> = (0..dh).map(|_| rng.int_in(-20, 20)).collect();
            let g = poly(&g_coeffs);
            let h = poly(&h_coeffs);
            let f = g.mul(&h);
            if f.constant_coeff().is_zero() {
                continue;
            }
            assert!(
                has_complex_factorization(&f, g.degree(), g.constant_coeff(), 1e-6).unwrap(),
                "missed factor g = {g} of f = {f}"
            );
        }
    }

    #[test]
    fn pit_finds_witness_for_classical_family() {
        let model = CoeffModel::PushForward {
            constant: DistSpec::uniform(SetSpec::Explicit { values: vec![2] }),
            t_dists: vec![DistSpec::uniform(SetSpec::interval(100))],
            components: vec!["x2".into()],
        };
        let compiled = model.compile().unwrap();
        let verdict = nondegeneracy_pit(&compiled, &q(2, 1, 2, 2), 64, 100, 7).unwrap();
        match verdict {
            PitVerdict::NotIdenticallyZero { .. } => {}
            PitVerdict::Inconclusive { .. } => panic!("expected a witness"),
        }
    }

    #[test]
    fn pit_with_non_divisor_b0_still_nonzero() {
        let model = CoeffModel::PushForward {
            constant: DistSpec::uniform(SetSpec::Explicit { values: vec![4] }),
            t_dists: vec![
                DistSpec::uniform(SetSpec::interval(50)),
                DistSpec::uniform(SetSpec::interval(50)),
            ],
            components: vec!["x2".into(), "x3".into()],
        };
        let compiled = model.compile().unwrap();
        // b0 = 3 does not divide a0 = 4.
        let query = CriterionQuery::new(3, 1, BigInt::from(4), BigInt::from(3)).unwrap();
        assert!(!query.divisor_consistent());
        let verdict = nondegeneracy_pit(&compiled, &query, 64, 50, 3).unwrap();
        assert!(matches!(verdict, PitVerdict::NotIdenticallyZero { .. }));
    }

    #[test]
    fn f6_window_product_equals_a0_sixth() {
        // x^12 - 1: a0 = -1, target 1.
        let mut coeffs = vec![0i64; 12];
        coeffs[0] = -1;
        let r = f6_demo(&poly(&coeffs), 1e-12).unwrap();
        assert_eq!(r.target, "1");
        assert!(r.relative_error < 1e-9, "err = {}", r.relative_error);

        // Odd degree: d = 13, a0 = 2, target 64.
        let mut coeffs = vec![0i64; 13];
        coeffs[0] = 2;
        coeffs[5] = 3;
        let r = f6_demo(&poly(&coeffs), 1e-12).unwrap();
        assert_eq!(r.target, "64");
        assert!(r.relative_error < 1e-9, "err = {}", r.relative_error);
    }

    #[test]
    fn f6_requires_degree_12() {
        let f = poly(&[1, 2, 3]);
        assert!(matches!(
            f6_demo(&f, 1e-12),
            Err(CriterionError::F6Precondition)
        ));
    }

    #[test]
    fn f6_pit_is_inconclusive() {
        let verdict = f6_pit(12, &BigInt::from(7), 20, 10, 11, 1e-6).unwrap();
        assert!(matches!(verdict, PitVerdict::Inconclusive { .. }));
    }

    #[test]
    fn strata_single_index_prediction() {
        // d = 5, h = 2, a_j = 1 (j != 2), a_0 = 2, ladder up to 1e9.
        let base: Vec<BigInt> = [2i64, 1, 0, 1, 1]
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        let report =
            strata_magnitudes(&base, &[2], &crate::criterion::default_ladder(), 100, 1e-12)
                .unwrap();
        assert!(report.gcd_ok);
        let last = report.rungs.last().unwrap();
        assert_eq!(last.strata[0].count, 2);
        assert_eq!(last.strata[1].count, 3);
        assert!(
            last.strata[0].max_rel_deviation < 0.05,
            "small stratum dev {}",
            last.strata[0].max_rel_deviation
        );
        assert!(
            last.strata[1].max_rel_deviation < 0.05,
            "large stratum dev {}",
            last.strata[1].max_rel_deviation
        );
        // Deviations shrink up the ladder.
        let first = &report.rungs[0];
        assert!(
            last.strata[0].max_rel_deviation < first.strata[0].max_rel_deviation
                && last.strata[1].max_rel_deviation < first.strata[1].max_rel_deviation
        );
        // Top rung: subset products are bounded away from every divisor of
        // a0. The limit of the minimum gap is 1 (attained by a vanishing
        // mixed product against b0 = 1) and it approaches from below, so
        // finite rungs sit slightly under it.
        assert!(last.min_divisor_gap > 0.9, "gap {}", last.min_divisor_gap);
        let gaps: Vec<f64> = report.rungs.iter().map(|r| r.min_divisor_gap).collect();
        assert!(gaps.windows(2).all(|w| w[0] <= w[1]), "gaps {gaps:?}");
        assert!(report.persistent.is_empty());
    }

    #[test]
    fn strata_gcd_degenerate_control_flags_persistent_product() {
        // d = 4, h = 2: gcd 2, so (k_small, k_large) = (1, 1) is pinned at
        // |a0|^(1/2).
        let base: Vec<BigInt> = [4i64, 1, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        let report =
            strata_magnitudes(&base, &[2], &crate::criterion::default_ladder(), 100, 1e-12)
                .unwrap();
        assert!(!report.gcd_ok);
        assert_eq!(report.persistent.len(), 1);
        let p = &report.persistent[0];
        assert_eq!((p.k_small, p.k_large), (1, 1));
        assert!((p.predicted_magnitude - 2.0).abs() < 1e-12);
        // The pinned product is close to |a0|^(1/2) on every rung.
        for (i, gap) in p.per_rung_gap.iter().enumerate() {
            assert!(*gap < 0.2, "rung {i}: gap {gap}");
        }
    }

    #[test]
    fn subset_budget_enforced() {
        let f = poly(&[1i64; 24]);
        let query = CriterionQuery::new(24, 12, BigInt::from(1), BigInt::from(1)).unwrap();
        assert!(matches!(
            evaluate(&f, &query, 1e-9),
            Err(CriterionError::SubsetBudgetExceeded { .. })
        ));
    }
}
