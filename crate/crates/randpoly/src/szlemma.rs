//! Sparse multivariate integer polynomials, the recursive leading-degree
//! decomposition, and exhaustive verification of the (C,t)-uniform
//! Schwartz–Zippel bound.
//!
//! Probabilities in this module are exact rationals: grids are enumerated
//! in full with exact integer evaluation, so a bound violation would be a
//! genuine counterexample rather than numerical noise. Grids are restricted
//! to integer points — a deliberate narrowing of the complex-grid setting —
//! which is what makes exact evaluation free.

use crate::coeffmodels::{DiscreteDist, UniformityCert};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SzError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("grid of {0} points exceeds the exhaustive budget of 10^7")]
    GridTooLarge(u128),
    #[error("certificate for variable {var} has t = {t} < leading degree {degree}")]
    CertInsufficient { var: usize, t: u64, degree: u32 },
    #[error("expected {expected} per-variable entries, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("malformed polynomial text: {0}")]
    Parse(String),
}

/// Multivariate integer polynomial stored as exponent-vector -> coefficient.
///
/// Zero coefficients are never stored; the zero polynomial has an empty
/// term map. Variable order is part of the value: `x1` is index 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl SparseMultiPoly {
    pub fn zero(nvars: usize) -> Self {
        SparseMultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The monomial `x_{i+1}` (0-based variable index).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exps, BigInt::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        assert_eq!(exps.len(), self.nvars, "exponent arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Degree in variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// True when some term involves a variable other than `i`.
    pub fn involves_variable_other_than(&self, i: usize) -> bool {
        self.terms
            .keys()
            .any(|e| e.iter().enumerate().any(|(j, &x)| j != i && x > 0))
    }

    /// True when the polynomial is a single monomial `c * x_i^e` (possibly
    /// `e = 0`).
    pub fn is_monomial_in(&self, i: usize) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .keys()
                .all(|e| e.iter().enumerate().all(|(j, &x)| j == i || x == 0))
    }

    pub fn add(&self, other: &SparseMultiPoly) -> SparseMultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &SparseMultiPoly) -> SparseMultiPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = SparseMultiPoly::zero(self.nvars);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    /// Exact evaluation at an integer point.
    pub fn evaluate(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.nvars, "point arity mismatch");
        let mut acc = BigInt::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    /// The same polynomial viewed in `nvars >= self.nvars()` variables.
    pub fn padded(&self, nvars: usize) -> SparseMultiPoly {
        assert!(nvars >= self.nvars, "cannot shrink variable count");
        if nvars == self.nvars {
            return self.clone();
        }
        let mut out = SparseMultiPoly::zero(nvars);
        for (e, c) in self.terms() {
            let mut exps = e.clone();
            exps.resize(nvars, 0);
            out.add_term(exps, c.clone());
        }
        out
    }

    /// Coefficient of `x_i^e` as a polynomial in the remaining variables
    /// (arity preserved; variable `i` no longer occurs).
    pub fn coefficient_of(&self, i: usize, e: u32) -> SparseMultiPoly {
        let mut out = SparseMultiPoly::zero(self.nvars);
        for (exps, c) in &self.terms {
            if exps[i] == e {
                let mut rest = exps.clone();
                rest[i] = 0;
                out.add_term(rest, c.clone());
            }
        }
        out
    }
}

impl fmt::Display for SparseMultiPoly {
    /// Sum-of-terms text: `c*x1^e1*...*xm^em`, terms in map order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || exps.iter().all(|&e| e == 0) {
                factors.push(mag.to_string());
            }
            for (i, &e) in exps.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("x{}", i + 1));
                } else if e > 1 {
                    factors.push(format!("x{}^{}", i + 1, e));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl FromStr for SparseMultiPoly {
    type Err = SzError;

    /// Parse `"3*x1^2*x2 - x2^3 + 7"`. The variable count is the largest
    /// index mentioned.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(SzError::Parse("empty input".into()));
        }
        // Split into signed terms.
        let mut terms: Vec<(i8, String)> = Vec::new();
        let mut cur = String::new();
        let mut sign: i8 = 1;
        for (i, ch) in compact.chars().enumerate() {
            match ch {
                '+' | '-'
                    if i > 0 && !matches!(compact.as_bytes()[i - 1], b'+' | b'-' | b'*' | b'^') =>
                {
                    terms.push((sign, std::mem::take(&mut cur)));
                    sign = if ch == '-' { -1 } else { 1 };
                }
                '-' if i == 0 => sign = -1,
                '+' if i == 0 => {}
                _ => cur.push(ch),
            }
        }
        terms.push((sign, cur));

        // First pass for arity.
        let mut nvars = 0usize;
        for (_, t) in &terms {
            for factor in t.split('*') {
                if let Some(rest) = factor.strip_prefix('x') {
                    let idx_part = rest.split('^').next().unwrap_or("");
                    let idx: usize = idx_part
                        .parse()
                        .map_err(|_| SzError::Parse(format!("bad variable in term '{t}'")))?;
                    nvars = nvars.max(idx);
                }
            }
        }
        let mut poly = SparseMultiPoly::zero(nvars.max(1));
        for (sgn, t) in &terms {
            if t.is_empty() {
                return Err(SzError::Parse("empty term".into()));
            }
            let mut coeff = BigInt::from(*sgn);
            let mut exps = vec![0u32; poly.nvars];
            for factor in t.split('*') {
                if let Some(rest) = factor.strip_prefix('x') {
                    let mut it = rest.split('^');
                    let idx: usize = it
                        .next()
                        .unwrap_or("")
                        .parse()
                        .map_err(|_| SzError::Parse(format!("bad variable in '{factor}'")))?;
                    if idx == 0 {
                        return Err(SzError::Parse("variables are 1-indexed".into()));
                    }
                    let e: u32 = match it.next() {
                        None => 1,
                        Some(e) => e
                            .parse()
                            .map_err(|_| SzError::Parse(format!("bad exponent in '{factor}'")))?,
                    };
                    exps[idx - 1] += e;
                } else {
                    let c = BigInt::from_str(factor)
                        .map_err(|_| SzError::Parse(format!("bad coefficient '{factor}'")))?;
                    coeff *= c;
                }
            }
            poly.add_term(exps, coeff);
        }
        Ok(poly)
    }
}

/// The recursive leading-degree data: `degrees[i]` is `d_{i+1}`, and
/// `leading_parts[i]` is `P_{i+1}` (the coefficient of `x_{i+1}^{d_{i+1}}`
/// inside `P_{i+2}`, with `P_{m+1} = P`).
#[derive(Clone, Debug)]
pub struct LeadingDecomposition {
    pub degrees: Vec<u32>,
    pub leading_parts: Vec<SparseMultiPoly>,
}

/// Recursive leading degrees `(d_1, ..., d_m)`: `d_m` is the degree of
/// `x_m` in `P`, and `d_{i-1}` is the degree of `x_{i-1}` in the leading
/// part `P_i`.
pub fn leading_degrees(p: &SparseMultiPoly) -> Result<LeadingDecomposition, SzError> {
    if p.is_zero() {
        return Err(SzError::ZeroPolynomial);
    }
    let m = p.nvars();
    let mut degrees = vec![0u32; m];
    let mut parts: Vec<SparseMultiPoly> = vec![SparseMultiPoly::zero(m); m];
    let mut current = p.clone();
    for i in (0..m).rev() {
        let d = current.degree_in(i);
        degrees[i] = d;
        current = current.coefficient_of(i, d);
        parts[i] = current.clone();
    }
    debug_assert!(!current.is_zero());
    Ok(LeadingDecomposition {
        degrees,
        leading_parts: parts,
    })
}

const GRID_BUDGET: u128 = 10_000_000;

/// Exact probability that `p` vanishes on the product grid, under the
/// product of the per-variable distributions (`dists[i].support()` is the
/// grid in variable `i+1`).
pub fn zero_fraction_on_grid(
    p: &SparseMultiPoly,
    dists: &[DiscreteDist],
) -> Result<BigRational, SzError> {
    if dists.len() != p.nvars() {
        return Err(SzError::ArityMismatch {
            expected: p.nvars(),
            got: dists.len(),
        });
    }
    let mut total: u128 = 1;
    for d in dists {
        total = total.saturating_mul(d.len() as u128);
        if total > GRID_BUDGET {
            return Err(SzError::GridTooLarge(total));
        }
    }

    // Fast path: i128 evaluation with per-variable power tables; falls back
    // to exact BigInt arithmetic on overflow.
    let m = p.nvars();
    let sizes: Vec<usize> = dists.iter().map(|d| d.len()).collect();
    let max_exp: Vec<u32> = (0..m).map(|i| p.degree_in(i)).collect();
    let tables: Option<Vec<Vec<Vec<i128>>>> = build_power_tables(dists, &max_exp);
    let coeffs_small: Option<Vec<(Vec<u32>, i128)>> = p
        .terms()
        .map(|(e, c)| c.to_i128().map(|c| (e.clone(), c)))
        .collect();

    let mut zero_mass_num = BigUint::zero();
    let mut idx = vec![0usize; m];
    let mut point: Vec<BigInt> = idx
        .iter()
        .enumerate()
        .map(|(i, &j)| dists[i].support()[j].clone())
        .collect();
    loop {
        let is_zero = match (&tables, &coeffs_small) {
            (Some(tb), Some(cs)) => match eval_i128(cs, tb, &idx) {
                Some(v) => v == 0,
                None => p.evaluate(&point).is_zero(),
            },
            _ => p.evaluate(&point).is_zero(),
        };
        if is_zero {
            let mut mass = BigUint::one();
            for (i, &j) in idx.iter().enumerate() {
                mass *= dists[i].mass_num(j);
            }
            zero_mass_num += mass;
        }
        // Mixed-radix increment.
        let mut carry = true;
        for i in 0..m {
            if !carry {
                break;
            }
            idx[i] += 1;
            if idx[i] == sizes[i] {
                idx[i] = 0;
                carry = true;
            } else {
                carry = false;
            }
            point[i] = dists[i].support()[idx[i]].clone();
        }
        if carry {
            break;
        }
    }

    let mut den = BigUint::one();
    for d in dists {
        den *= d.mass_den();
    }
    Ok(BigRational::new(
        BigInt::from(zero_mass_num),
        BigInt::from(den),
    ))
}

fn build_power_tables(dists: &[DiscreteDist], max_exp: &[u32]) -> Option<Vec<Vec<Vec<i128>>>> {
    let mut tables = Vec::with_capacity(dists.len());
    for (i, d) in dists.iter().enumerate() {
        let mut per_value = Vec::with_capacity(d.len());
        for v in d.support() {
            let v = v.to_i128()?;
            let mut powers = Vec::with_capacity(max_exp[i] as usize + 1);
            let mut acc: i128 = 1;
            powers.push(acc);
            for _ in 0..max_exp[i] {
                acc = acc.checked_mul(v)?;
                powers.push(acc);
            }
            per_value.push(powers);
        }
        tables.push(per_value);
    }
    Some(tables)
}

fn eval_i128(terms: &[(Vec<u32>, i128)], tables: &[Vec<Vec<i128>>], idx: &[usize]) -> Option<i128> {
    let mut acc: i128 = 0;
    for (exps, c) in terms {
        let mut t = *c;
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                t = t.checked_mul(tables[i][idx[i]][e as usize])?;
            }
        }
        acc = acc.checked_add(t)?;
    }
    Some(acc)
}

/// The Schwartz–Zippel bound in its three forms.
#[derive(Clone, Debug)]
pub struct SzBound {
    /// `sum_i C_i d_i / k_i` with the recursive leading degrees.
    pub per_leading_degree: BigRational,
    /// `C deg(P) / k` when every variable has the same support size.
    pub total_degree_common_k: Option<BigRational>,
    /// `sum_i C deg(P) / k_i`.
    pub per_total_degree: BigRational,
}

/// Compute the bound from per-variable uniformity certificates.
///
/// Requires `certs[i].t >= d_i`; the degrees could not otherwise be
/// serviced by the certificate.
pub fn sz_bound(p: &SparseMultiPoly, certs: &[UniformityCert]) -> Result<SzBound, SzError> {
    if certs.len() != p.nvars() {
        return Err(SzError::ArityMismatch {
            expected: p.nvars(),
            got: certs.len(),
        });
    }
    let decomp = leading_degrees(p)?;
    for (i, (&d, cert)) in decomp.degrees.iter().zip(certs).enumerate() {
        if cert.t < d as u64 {
            return Err(SzError::CertInsufficient {
                var: i + 1,
                t: cert.t,
                degree: d,
            });
        }
    }
    let deg = BigRational::from_integer(BigInt::from(p.total_degree()));
    let c_max = certs
        .iter()
        .map(|c| c.c.clone())
        .max()
        .unwrap_or_else(|| BigRational::from_integer(BigInt::one()));

    let mut per_leading = BigRational::zero();
    let mut per_total = BigRational::zero();
    let mut common_k = true;
    for (i, cert) in certs.iter().enumerate() {
        let k = BigRational::from_integer(BigInt::from(cert.k));
        let d_i = BigRational::from_integer(BigInt::from(decomp.degrees[i]));
        per_leading += &cert.c * d_i / k.clone();
        per_total += &cert.c * deg.clone() / k;
        common_k &= cert.k == certs[0].k;
    }
    let total_common = if common_k && !certs.is_empty() {
        Some(c_max * deg / BigRational::from_integer(BigInt::from(certs[0].k)))
    } else {
        None
    };
    Ok(SzBound {
        per_leading_degree: per_leading,
        total_degree_common_k: total_common,
        per_total_degree: per_total,
    })
}
