//! Monic integer polynomials with exact arithmetic, plus an exact
//! irreducibility test over ℤ.
//!
//! The irreducibility test combines numerical root clustering with exact
//! integer division: every candidate factor assembled from a subset of the
//! complex roots is confirmed or refuted by exact long division, so a
//! "reducible" answer always carries an exact witness. "Irreducible"
//! answers are certified through the precision-escalation policy of the
//! root finder: a subset is dismissed only when its coefficients are
//! provably far from integers at the achieved precision.

use crate::roots::{self, RootsError};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Wide accumulators for the brute-force oracle; heights are capped so i128
/// never overflows there.
type N = i128;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("divisor degree must be smaller than dividend degree")]
    DivisorTooLarge,
    #[error("malformed polynomial text: {0}")]
    Parse(String),
    #[error(
        "precision exhausted after {escalations} escalations; {unresolved} subsets uncertified"
    )]
    PrecisionExhausted { escalations: u32, unresolved: usize },
    #[error("oracle candidate budget exceeded ({0} candidates)")]
    OracleTooLarge(u128),
    #[error("oracle preconditions: degree <= 6 and coefficients within height bound")]
    OraclePrecondition,
    #[error(transparent)]
    Roots(#[from] RootsError),
}

/// Monic polynomial `x^d + a_{d-1} x^{d-1} + ... + a_1 x + a_0` over ℤ.
///
/// `coeffs[i]` stores `a_i`; the leading coefficient 1 is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicIntPoly {
    coeffs: Vec<BigInt>,
}

impl MonicIntPoly {
    /// Build from the low coefficients `(a_0, ..., a_{d-1})`.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::ZeroDegree);
        }
        Ok(MonicIntPoly { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `x + c0` ... convenience for linear factors.
    pub fn linear(c0: BigInt) -> Self {
        MonicIntPoly { coeffs: vec![c0] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Low coefficients `(a_0, ..., a_{d-1})`, leading 1 excluded.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn constant_coeff(&self) -> &BigInt {
        &self.coeffs[0]
    }

    /// Exact evaluation at an integer point.
    pub fn evaluate(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Largest coefficient magnitude (excluding the monic leading 1).
    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// `1 + max_i |a_i|`: every complex root lies strictly inside this radius.
    pub fn cauchy_bound(&self) -> f64 {
        1.0 + self
            .coeffs
            .iter()
            .map(|c| c.abs().to_f64().unwrap_or(f64::MAX))
            .fold(0.0, f64::max)
    }

    /// Full coefficient vector `(a_0, ..., a_{d-1}, 1)` as `f64`.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect();
        v.push(1.0);
        v
    }

    /// Exact product of two monic polynomials.
    pub fn mul(&self, other: &MonicIntPoly) -> MonicIntPoly {
        let (dp, dq) = (self.degree(), other.degree());
        let mut out = vec![BigInt::zero(); dp + dq];
        // Full coefficient vectors including the leading 1s.
        let get = |p: &MonicIntPoly, i: usize| -> BigInt {
            if i == p.degree() {
                BigInt::one()
            } else {
                p.coeffs[i].clone()
            }
        };
        for i in 0..=dp {
            for j in 0..=dq {
                if i + j < dp + dq {
                    let term = get(self, i) * get(other, j);
                    out[i + j] += term;
                }
            }
        }
        MonicIntPoly { coeffs: out }
    }

    /// Exact division `self / g` when the remainder vanishes.
    ///
    /// Since `g` is monic, long division stays in ℤ; a nonzero remainder
    /// yields `None`.
    pub fn try_divide_exact(&self, g: &MonicIntPoly) -> Result<Option<MonicIntPoly>, PolyError> {
        let (df, dg) = (self.degree(), g.degree());
        if dg >= df {
            return Err(PolyError::DivisorTooLarge);
        }
        let mut rem: Vec<BigInt> = self.coeffs.clone();
        rem.push(BigInt::one());
        let dq = df - dg;
        let mut quo = vec![BigInt::zero(); dq + 1];
        for k in (0..=dq).rev() {
            let lead = std::mem::replace(&mut rem[dg + k], BigInt::zero());
            if lead.is_zero() {
                continue;
            }
            for j in 0..dg {
                let term = &lead * &g.coeffs[j];
                rem[j + k] -= term;
            }
            quo[k] = lead;
        }
        if rem.iter().take(dg).any(|r| !r.is_zero()) {
            return Ok(None);
        }
        debug_assert!(quo[dq].is_one());
        quo.pop();
        Ok(Some(MonicIntPoly { coeffs: quo }))
    }
}

impl MonicIntPoly {
    /// Human-readable rendering like `x^3 - 2x + 5`.
    pub fn to_pretty(&self) -> String {
        let d = self.degree();
        let mut out = if d == 1 {
            "x".to_string()
        } else {
            format!("x^{d}")
        };
        for i in (0..d).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let sign = if c.sign() == num_bigint::Sign::Minus {
                " - "
            } else {
                " + "
            };
            let mag = c.abs();
            out.push_str(sign);
            match i {
                0 => out.push_str(&mag.to_string()),
                1 if mag.is_one() => out.push('x'),
                1 => out.push_str(&format!("{mag}x")),
                _ if mag.is_one() => out.push_str(&format!("x^{i}")),
                _ => out.push_str(&format!("{mag}x^{i}")),
            }
        }
        out
    }
}

impl fmt::Display for MonicIntPoly {
    /// Comma-separated low coefficients, monic implied: `"a0,a1,...,a_{d-1}"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MonicIntPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs: Result<Vec<BigInt>, _> = s
            .split(',')
            .map(|t| BigInt::from_str(t.trim()).map_err(|e| PolyError::Parse(e.to_string())))
            .collect();
        MonicIntPoly::new(coeffs?)
    }
}

/// A univariate integer polynomial with no monicity requirement; used for
/// polynomial-value coefficient supports and divisor sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    /// `coeffs[i]` is the coefficient of `x^i`; trailing zeros trimmed.
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn evaluate(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for IntPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs: Result<Vec<BigInt>, _> = s
            .split(',')
            .map(|t| BigInt::from_str(t.trim()).map_err(|e| PolyError::Parse(e.to_string())))
            .collect();
        Ok(IntPoly::new(coeffs?))
    }
}

/// Outcome of the exact irreducibility test.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    /// Either `[f]` (irreducible) or `[g, h]` with `f = g * h` exactly.
    pub factors: Vec<MonicIntPoly>,
    /// Degree of the first nontrivial factor found; `None` when irreducible.
    pub witness_k: Option<usize>,
}

impl Factorization {
    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn product(&self) -> MonicIntPoly {
        let mut it = self.factors.iter();
        let first = it.next().expect("factor list is nonempty").clone();
        it.fold(first, |acc, g| acc.mul(g))
    }
}

/// Escalation policy shared by the irreducibility test: the root residual
/// tolerance starts at 1e-12 relative and tightens by 1e-6 per escalation,
/// with at most 3 escalations.
const BASE_TOL: f64 = 1e-12;
const TOL_STEP: f64 = 1e-6;
const MAX_ESCALATIONS: u32 = 3;

/// Candidates whose coefficients all land within this distance of integers
/// are attempted by exact division.
const ROUNDING_GUARD: f64 = 0.25;

/// Exact irreducibility over ℤ.
///
/// Returns the answer along with a `Factorization`: a witness split when
/// reducible, the input itself when irreducible.
///
/// Algorithm: `a_0 = 0` short-circuits to the factor `x`; otherwise complex
/// roots are clustered into candidate factors. For each `k <= d/2` and each
/// `k`-subset of roots, the monic polynomial with that root set is formed;
/// if every coefficient is within [`ROUNDING_GUARD`] of an integer the
/// rounded candidate is checked by exact division. A subset is certified
/// non-integral when some coefficient is farther from every integer than
/// the escalated error allowance; otherwise precision escalates.
pub fn is_irreducible_exact(f: &MonicIntPoly) -> Result<(bool, Factorization), PolyError> {
    let d = f.degree();
    if d == 1 {
        return Ok((true, irreducible_witness(f)));
    }
    if f.constant_coeff().is_zero() {
        // x divides f; no root finding involved.
        let x = MonicIntPoly::linear(BigInt::zero());
        let h = f.try_divide_exact(&x)?.expect("x divides f when a_0 = 0");
        return Ok((
            false,
            Factorization {
                factors: vec![x, h],
                witness_k: Some(1),
            },
        ));
    }

    let mut tol = BASE_TOL;
    let mut escalation = 0u32;
    loop {
        let rs = roots::find_roots_at(f, tol, escalation)?;
        match try_split_from_roots(f, rs.roots(), rs.coefficient_error_bound())? {
            SubsetScan::Split(g, h, k) => {
                return Ok((
                    false,
                    Factorization {
                        factors: vec![g, h],
                        witness_k: Some(k),
                    },
                ));
            }
            SubsetScan::AllCertified => return Ok((true, irreducible_witness(f))),
            SubsetScan::Ambiguous(unresolved) => {
                if escalation >= MAX_ESCALATIONS {
                    return Err(PolyError::PrecisionExhausted {
                        escalations: escalation,
                        unresolved,
                    });
                }
                escalation += 1;
                tol *= TOL_STEP;
            }
        }
    }
}

fn irreducible_witness(f: &MonicIntPoly) -> Factorization {
    Factorization {
        factors: vec![f.clone()],
        witness_k: None,
    }
}

enum SubsetScan {
    Split(MonicIntPoly, MonicIntPoly, usize),
    AllCertified,
    /// Number of subsets that could be integral within the error allowance
    /// yet failed division or rounding.
    Ambiguous(usize),
}

/// Scan all k-subsets of the roots in lexicographic index order; the first
/// exact division wins.
fn try_split_from_roots(
    f: &MonicIntPoly,
    roots: &[num_complex::Complex64],
    coeff_err: f64,
) -> Result<SubsetScan, PolyError> {
    let d = f.degree();
    let mut ambiguous = 0usize;
    for k in 1..=d / 2 {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let subset: Vec<num_complex::Complex64> = idx.iter().map(|&i| roots[i]).collect();
            let coeffs = monic_from_roots(&subset);
            match classify_candidate(&coeffs, coeff_err) {
                Candidate::Integral(rounded) => {
                    let g = MonicIntPoly { coeffs: rounded };
                    if let Some(h) = f.try_divide_exact(&g)? {
                        return Ok(SubsetScan::Split(g, h, k));
                    }
                    // Division refuted the only possible rounding unless the
                    // numerical error allowance admits a different integer.
                    if coeff_err > ROUNDING_GUARD {
                        ambiguous += 1;
                    }
                }
                Candidate::CertifiedNonIntegral => {}
                Candidate::Ambiguous => ambiguous += 1,
            }
            if !next_combination(&mut idx, d) {
                break;
            }
        }
    }
    if ambiguous == 0 {
        Ok(SubsetScan::AllCertified)
    } else {
        Ok(SubsetScan::Ambiguous(ambiguous))
    }
}

enum Candidate {
    Integral(Vec<BigInt>),
    CertifiedNonIntegral,
    Ambiguous,
}

/// Decide whether a subset polynomial could be an integer factor.
///
/// `coeff_err` is the error allowance for each computed coefficient. A
/// coefficient farther than `max(ROUNDING_GUARD, coeff_err)` from every
/// integer certifies the subset; one within `ROUNDING_GUARD` is rounded
/// and attempted; anything between is ambiguous and forces escalation.
fn classify_candidate(coeffs: &[num_complex::Complex64], coeff_err: f64) -> Candidate {
    let mut rounded = Vec::with_capacity(coeffs.len());
    let mut attempt = true;
    for c in coeffs {
        let nearest = c.re.round();
        let dist = (c.re - nearest).hypot(c.im);
        if dist > ROUNDING_GUARD.max(coeff_err) {
            return Candidate::CertifiedNonIntegral;
        }
        if dist > ROUNDING_GUARD {
            attempt = false;
        }
        if !nearest.is_finite() || nearest.abs() >= 2f64.powi(100) {
            return Candidate::CertifiedNonIntegral;
        }
        rounded.push(BigInt::from(nearest as i128));
    }
    if attempt {
        Candidate::Integral(rounded)
    } else {
        Candidate::Ambiguous
    }
}

/// Low coefficients (constant first) of the monic polynomial with the given
/// roots, computed by incremental multiplication of linear factors.
pub(crate) fn monic_from_roots(roots: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
    use num_complex::Complex64;
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        c.push(Complex64::new(0.0, 0.0));
        for j in (0..c.len() - 1).rev() {
            let tail = c[j] * (-r);
            c[j + 1] += tail;
        }
    }
    // c holds highest-degree-first; return constant-first without the lead.
    c.reverse();
    c.pop();
    c
}

/// Advance `idx` to the next k-combination of `{0..n}`; false when done.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Brute-force irreducibility oracle for tests: enumerates all candidate
/// monic factors of degree `k <= d/2` whose constant coefficient divides
/// `a_0` and whose interior coefficients obey the Mignotte-style bound
/// `binom(k, k/2) * ceil(l2norm(f))`.
///
/// Only valid for `d <= 6` and heights within `height_bound`.
pub fn is_irreducible_oracle(f: &MonicIntPoly, height_bound: i64) -> Result<bool, PolyError> {
    const CANDIDATE_BUDGET: u128 = 1_000_000_000;
    let d = f.degree();
    if d > 6 {
        return Err(PolyError::OraclePrecondition);
    }
    let hb = BigInt::from(height_bound);
    if f.coeffs.iter().any(|c| c.abs() > hb) {
        return Err(PolyError::OraclePrecondition);
    }
    if d == 1 {
        return Ok(true);
    }
    let fc: Vec<N> = {
        let mut v: Vec<N> = f
            .coeffs
            .iter()
            .map(|c| c.to_i128().expect("height-bounded coefficient"))
            .collect();
        v.push(1);
        v
    };
    if fc[0] == 0 {
        return Ok(false);
    }

    let norm_sq: N = fc.iter().map(|c| c * c).sum();
    let l2_ceil = (norm_sq as f64).sqrt().ceil() as N;

    let divisors = signed_divisors(fc[0]);
    for k in 1..=d / 2 {
        let bound = binomial_i128(k as u64, (k / 2) as u64) * l2_ceil;
        // Candidate count: divisors * (2*bound+1)^(k-1).
        let interior = (2 * bound + 1) as u128;
        let mut count = divisors.len() as u128;
        for _ in 1..k {
            count = count.saturating_mul(interior);
        }
        if count > CANDIDATE_BUDGET {
            return Err(PolyError::OracleTooLarge(count));
        }
        let mut g = vec![0 as N; k + 1];
        g[k] = 1;
        for &c0 in &divisors {
            if c0.abs() > bound {
                continue;
            }
            g[0] = c0;
            if scan_interior(&fc, &mut g, 1, k, bound) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Recursive enumeration of interior coefficients g[1..k].
fn scan_interior(fc: &[N], g: &mut Vec<N>, pos: usize, k: usize, bound: N) -> bool {
    if pos == k {
        return divides_exact_i128(fc, g);
    }
    for c in -bound..=bound {
        g[pos] = c;
        if scan_interior(fc, g, pos + 1, k, bound) {
            return true;
        }
    }
    false
}

/// Synthetic division of `fc` (constant first, monic) by monic `g`;
/// true iff the remainder vanishes. Uses checked arithmetic: an overflow
/// means the candidate cannot divide (coefficients of f are small).
fn divides_exact_i128(fc: &[N], g: &[N]) -> bool {
    let df = fc.len() - 1;
    let dg = g.len() - 1;
    let mut rem: Vec<N> = fc.to_vec();
    for kk in (0..=df - dg).rev() {
        let lead = rem[dg + kk];
        rem[dg + kk] = 0;
        if lead == 0 {
            continue;
        }
        for j in 0..dg {
            let t = match lead.checked_mul(g[j]) {
                Some(t) => t,
                None => return false,
            };
            rem[j + kk] = match rem[j + kk].checked_sub(t) {
                Some(r) => r,
                None => return false,
            };
        }
    }
    rem.iter().take(dg).all(|&r| r == 0)
}

/// All divisors of `n` with both signs, |n| >= 1.
fn signed_divisors(n: N) -> Vec<N> {
    let m = n.unsigned_abs();
    let mut out = Vec::new();
    let mut i: u128 = 1;
    while i * i <= m {
        if m.is_multiple_of(i) {
            out.push(i as N);
            if i * i != m {
                out.push((m / i) as N);
            }
        }
        i += 1;
    }
    let mut all: Vec<N> = out.iter().flat_map(|&d| [d, -d]).collect();
    all.sort_unstable();
    all
}

fn binomial_i128(n: u64, k: u64) -> N {
    let k = k.min(n - k.min(n));
    let mut num: N = 1;
    for i in 0..k {
        num = num * (n - i) as N / (i + 1) as N;
    }
    num
}
