//! Complex root finding for monic integer polynomials (Aberth–Ehrlich
//! simultaneous iteration) and argument-principle root counting.
//!
//! The solver runs in `f64` by default and escalates to double-double
//! arithmetic when convergence fails or a caller requests tolerances below
//! what 53 bits can certify. Initial guesses sit on the Cauchy circle of
//! radius `1 + max|a_i|`, which encloses every root.

use crate::dd::{CDd, Dd};
use crate::intpoly::MonicIntPoly;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RootsError {
    #[error("root finder failed to converge after {levels} precision levels")]
    NonConvergence { levels: u32 },
    #[error("a root lies within 1e-6*radius of the integration contour")]
    ContourTooClose,
    #[error("contour integral {value} is not within 0.25 of an integer at {samples} samples")]
    IntegralAmbiguous { value: f64, samples: u32 },
}

/// Maximum precision escalations (level 0 is plain `f64`).
const MAX_LEVELS: u32 = 3;
const MAX_ITERATIONS: u32 = 500;

/// Complex scalar the Aberth iteration is generic over.
pub(crate) trait Cx:
    Copy
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const ZERO: Self;
    const ONE: Self;
    fn polar(r: f64, theta: f64) -> Self;
    fn abs_f64(self) -> f64;
    fn to_c64(self) -> Complex64;
}

impl Cx for Complex64 {
    const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
    const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

    fn polar(r: f64, theta: f64) -> Self {
        Complex64::from_polar(r, theta)
    }

    fn abs_f64(self) -> f64 {
        self.norm()
    }

    fn to_c64(self) -> Complex64 {
        self
    }
}

impl Cx for CDd {
    const ZERO: CDd = CDd {
        re: Dd { hi: 0.0, lo: 0.0 },
        im: Dd { hi: 0.0, lo: 0.0 },
    };
    const ONE: CDd = CDd {
        re: Dd { hi: 1.0, lo: 0.0 },
        im: Dd { hi: 0.0, lo: 0.0 },
    };

    fn polar(r: f64, theta: f64) -> Self {
        CDd::from_f64(r * theta.cos(), r * theta.sin())
    }

    fn abs_f64(self) -> f64 {
        let n = self.norm_sqr().to_f64();
        n.sqrt()
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Evaluate `p` and `p'` at `z`; `coeffs` is constant-first and includes the
/// leading coefficient.
fn horner_with_deriv<C: Cx>(coeffs: &[C], z: C) -> (C, C) {
    let mut p = C::ZERO;
    let mut dp = C::ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// One full Aberth–Ehrlich solve at a fixed precision.
///
/// Updates are applied Gauss-Seidel style; convergence is declared when the
/// largest *per-root relative* update drops below `tol`, after which two
/// polishing sweeps run to push the iterates to the roundoff floor.
fn aberth<C: Cx>(coeffs: &[C], radius: f64, tol: f64) -> (Vec<C>, bool) {
    let d = coeffs.len() - 1;
    let mut z: Vec<C> = (0..d)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.35) / d as f64 + 1e-4 * j as f64;
            C::polar(radius, theta)
        })
        .collect();
    let mut polish = 0u32;
    for _ in 0..MAX_ITERATIONS {
        let mut max_rel = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner_with_deriv(coeffs, z[i]);
            if p.abs_f64() == 0.0 {
                continue;
            }
            let newton = if dp.abs_f64() == 0.0 { p } else { p / dp };
            let mut s = C::ZERO;
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.abs_f64() > 0.0 {
                        s = s + C::ONE / diff;
                    }
                }
            }
            let denom = C::ONE - newton * s;
            let w = if denom.abs_f64() > 0.0 {
                newton / denom
            } else {
                newton
            };
            if !w.abs_f64().is_finite() {
                continue;
            }
            z[i] = z[i] - w;
            let rel = w.abs_f64() / z[i].abs_f64().max(1e-300);
            max_rel = max_rel.max(rel);
        }
        if max_rel < tol {
            polish += 1;
            if polish > 2 {
                return (z, true);
            }
        }
    }
    (z, false)
}

/// The roots of a monic integer polynomial together with accuracy
/// certificates.
#[derive(Clone, Debug)]
pub struct RootSet {
    roots: Vec<Complex64>,
    residual_bound: f64,
    precision_bits: u32,
    /// Newton-correction estimate of the worst per-root error.
    max_root_err: f64,
    degree: usize,
    max_root_abs: f64,
}

impl RootSet {
    /// The `d` roots, multiplicity included, in solver order.
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// Bound on `max_i |f(alpha_i)| / (1 + cauchy_bound(f)^d)`.
    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Estimated error of each root.
    pub fn max_root_err(&self) -> f64 {
        self.max_root_err
    }

    /// Error allowance for coefficients of any monic polynomial assembled
    /// from a subset of at most `d/2` of these roots: elementary symmetric
    /// sensitivity times the per-root error, plus the `f64` evaluation
    /// floor.
    pub fn coefficient_error_bound(&self) -> f64 {
        let k = (self.degree / 2).max(1) as i32;
        let b = self.max_root_abs.max(1.0);
        let amplify = k as f64 * 2f64.powi(k) * b.powi(k - 1);
        let eval_floor = 4.0 * f64::EPSILON * k as f64 * 2f64.powi(k) * b.powi(k);
        amplify * self.max_root_err + eval_floor
    }
}

/// Find all complex roots of `f`, escalating precision on non-convergence.
pub fn find_roots(f: &MonicIntPoly, tol: f64) -> Result<RootSet, RootsError> {
    find_roots_at(f, tol, 0)
}

/// As [`find_roots`], but starting at precision level `min_level`
/// (level >= 1 forces double-double arithmetic). Callers escalate through
/// this entry point so that tolerances below 1e-15 get the precision they
/// need.
pub(crate) fn find_roots_at(
    f: &MonicIntPoly,
    tol: f64,
    min_level: u32,
) -> Result<RootSet, RootsError> {
    // Zero roots are deflated exactly so relative convergence is meaningful.
    let zero_mult = f
        .coeffs()
        .iter()
        .position(|c| !c.is_zero())
        .unwrap_or(f.degree());
    let reduced: MonicIntPoly;
    let target = if zero_mult > 0 {
        if zero_mult == f.degree() {
            // f = x^d
            return Ok(build_root_set(
                f,
                vec![Complex64::zero(); f.degree()],
                53,
                0.0,
            ));
        }
        reduced = MonicIntPoly::new(f.coeffs()[zero_mult..].to_vec()).expect("positive degree");
        &reduced
    } else {
        f
    };

    // f64 mantissas cannot represent huge coefficients exactly; start at the
    // double-double level when any coefficient exceeds 2^52.
    let needs_dd = target.height() >= BigInt::from(1i64 << 52) || tol < 1e-15;
    let start = if needs_dd {
        min_level.max(1)
    } else {
        min_level
    };

    let radius = target.cauchy_bound();
    let mut level = start;
    loop {
        let result = if level == 0 {
            let coeffs: Vec<Complex64> = target
                .coeffs_f64()
                .iter()
                .map(|&c| Complex64::new(c, 0.0))
                .collect();
            let (roots, ok) = aberth(&coeffs, radius, tol.max(1e-15));
            ok.then(|| (roots.iter().map(|r| r.to_c64()).collect::<Vec<_>>(), 53u32))
        } else {
            let coeffs: Vec<CDd> = {
                let mut v: Vec<CDd> = target
                    .coeffs()
                    .iter()
                    .map(|c| CDd {
                        re: Dd::from_bigint(c),
                        im: Dd::ZERO,
                    })
                    .collect();
                v.push(CDd::ONE);
                v
            };
            let (roots, ok) = aberth(&coeffs, radius, tol.max(1e-30));
            ok.then(|| (roots.iter().map(|r| r.to_c64()).collect::<Vec<_>>(), 106u32))
        };
        if let Some((mut roots, bits)) = result {
            roots.extend(std::iter::repeat_n(Complex64::zero(), zero_mult));
            let max_err = estimate_errors(target, &roots[..target.degree()], bits);
            return Ok(build_root_set(f, roots, bits, max_err));
        }
        if level >= MAX_LEVELS {
            return Err(RootsError::NonConvergence { levels: level + 1 });
        }
        level += 1;
    }
}

/// Newton-correction error estimate evaluated at the highest available
/// precision for the stored (f64) roots.
fn estimate_errors(f: &MonicIntPoly, roots: &[Complex64], bits: u32) -> f64 {
    let mut max_err = 0.0f64;
    if bits > 53 {
        let coeffs: Vec<CDd> = {
            let mut v: Vec<CDd> = f
                .coeffs()
                .iter()
                .map(|c| CDd {
                    re: Dd::from_bigint(c),
                    im: Dd::ZERO,
                })
                .collect();
            v.push(CDd::ONE);
            v
        };
        for r in roots {
            let z = CDd::from_f64(r.re, r.im);
            let (p, dp) = horner_with_deriv(&coeffs, z);
            let err = p.abs_f64() / dp.abs_f64().max(1e-300);
            max_err = max_err.max(err);
        }
    } else {
        let coeffs: Vec<Complex64> = f
            .coeffs_f64()
            .iter()
            .map(|&c| Complex64::new(c, 0.0))
            .collect();
        for r in roots {
            let (p, dp) = horner_with_deriv(&coeffs, *r);
            let err = p.norm() / dp.norm().max(1e-300);
            max_err = max_err.max(err);
        }
    }
    max_err
}

fn build_root_set(f: &MonicIntPoly, roots: Vec<Complex64>, bits: u32, max_err: f64) -> RootSet {
    let coeffs: Vec<Complex64> = f
        .coeffs_f64()
        .iter()
        .map(|&c| Complex64::new(c, 0.0))
        .collect();
    let mut max_res = 0.0f64;
    let mut max_abs = 0.0f64;
    for r in &roots {
        let (p, _) = horner_with_deriv(&coeffs, *r);
        max_res = max_res.max(p.norm());
        max_abs = max_abs.max(r.norm());
    }
    let d = f.degree() as i32;
    let denom = {
        let c = f.cauchy_bound().powi(d);
        if c.is_finite() {
            1.0 + c
        } else {
            f64::MAX
        }
    };
    RootSet {
        residual_bound: max_res / denom,
        precision_bits: bits,
        max_root_err: max_err.max(f64::EPSILON * max_abs.max(1.0)),
        degree: f.degree(),
        max_root_abs: max_abs,
        roots,
    }
}

/// Count roots of `f` inside the disk `|z - center| < radius` by the
/// argument principle: `(1/2 pi i) \oint f'/f dz` integrated by the
/// trapezoid rule with `samples` contour points.
///
/// Fails with [`RootsError::ContourTooClose`] when a root sits within
/// `1e-6 * radius` of the circle, and with
/// [`RootsError::IntegralAmbiguous`] when the quadrature value is not
/// within 0.25 of an integer.
pub fn count_roots_in_disk(
    f: &MonicIntPoly,
    center: Complex64,
    radius: f64,
    samples: u32,
) -> Result<i64, RootsError> {
    let rs = find_roots(f, 1e-12)?;
    let min_gap = rs
        .roots()
        .iter()
        .map(|r| ((r - center).norm() - radius).abs())
        .fold(f64::INFINITY, f64::min);
    if min_gap <= 1e-6 * radius {
        return Err(RootsError::ContourTooClose);
    }
    let coeffs: Vec<Complex64> = f
        .coeffs_f64()
        .iter()
        .map(|&c| Complex64::new(c, 0.0))
        .collect();
    // Trapezoid rule on a periodic integrand: plain average over the circle.
    let mut acc = Complex64::zero();
    for j in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
        let offset = Complex64::from_polar(radius, theta);
        let z = center + offset;
        let (p, dp) = horner_with_deriv(&coeffs, z);
        acc += dp / p * offset;
    }
    let value = acc.re / samples as f64;
    let nearest = value.round();
    if (value - nearest).abs() > 0.25 {
        return Err(RootsError::IntegralAmbiguous { value, samples });
    }
    Ok(nearest as i64)
}

/// Doubling policy around [`count_roots_in_disk`]: start at 4096 samples and
/// double on ambiguity up to 2^20.
pub fn count_roots_in_disk_auto(
    f: &MonicIntPoly,
    center: Complex64,
    radius: f64,
) -> Result<i64, RootsError> {
    let mut samples = 4096u32;
    loop {
        match count_roots_in_disk(f, center, radius, samples) {
            Err(RootsError::IntegralAmbiguous { .. }) if samples < (1 << 20) => {
                samples *= 2;
            }
            other => return other,
        }
    }
}
