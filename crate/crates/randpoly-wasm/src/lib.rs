//! Browser demo bindings: three interactive views over the core crate,
//! each returning a JSON payload the static page renders on a canvas.
//!
//! Build with `wasm-pack build --target web` (see the workspace README);
//! the functions are plain Rust on non-wasm targets so the crate tests on
//! the host.

use num_bigint::BigInt;
use num_traits::Zero;
use randpoly::criterion;
use randpoly::intpoly::{self, MonicIntPoly};
use randpoly::rng::TrialRng;
use randpoly::roots;
use serde_json::json;
use std::str::FromStr;
use wasm_bindgen::prelude::wasm_bindgen;

fn err_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Parse `"a0,a1,...,a_{d-1}"`, find the roots, and run the exact
/// irreducibility test. JSON: degree, pretty form, roots, verdict,
/// witness factors, Cauchy radius.
#[wasm_bindgen]
pub fn analyze_poly(coeffs_csv: &str) -> String {
    let f = match MonicIntPoly::from_str(coeffs_csv.trim()) {
        Ok(f) => f,
        Err(e) => return err_json(e),
    };
    if f.degree() > 16 {
        return err_json("degree capped at 16 in the demo");
    }
    let rs = match roots::find_roots(&f, 1e-12) {
        Ok(rs) => rs,
        Err(e) => return err_json(e),
    };
    let verdict = intpoly::is_irreducible_exact(&f);
    let (irreducible, factors) = match &verdict {
        Ok((irr, fac)) => (
            Some(*irr),
            fac.factors
                .iter()
                .map(|g| json!({ "csv": g.to_string(), "pretty": g.to_pretty() }))
                .collect::<Vec<_>>(),
        ),
        Err(_) => (None, Vec::new()),
    };
    json!({
        "degree": f.degree(),
        "pretty": f.to_pretty(),
        "cauchy_radius": f.cauchy_bound(),
        "roots": rs.roots().iter().map(|r| [r.re, r.im]).collect::<Vec<_>>(),
        "residual_bound": rs.residual_bound(),
        "irreducible": irreducible,
        "factors": factors,
    })
    .to_string()
}

/// One rung of the root-magnitude strata picture: coefficient `a_h` set to
/// `round(10^log10_top)`, the rest fixed to 1 (constant `a0`). JSON: roots,
/// predicted stratum radii with counts and deviations, divisor-gap table.
#[wasm_bindgen]
pub fn strata_probe(degree: u32, h: u32, a0: i64, log10_top: f64) -> String {
    let d = degree as usize;
    let h = h as usize;
    if !(2..=12).contains(&d) || h == 0 || h >= d {
        return err_json("need 2 <= degree <= 12 and 1 <= h < degree");
    }
    if a0 == 0 {
        return err_json("a0 must be nonzero");
    }
    if !(0.0..=12.0).contains(&log10_top) {
        return err_json("log10 coefficient must be in [0, 12]");
    }
    let mut base = vec![BigInt::from(1); d];
    base[0] = BigInt::from(a0);
    let rung = BigInt::from(10f64.powf(log10_top).round() as i64);
    if rung.is_zero() {
        return err_json("coefficient rounds to zero");
    }
    match criterion::strata_magnitudes(&base, &[h], &[rung], 100, 1e-12) {
        Ok(report) => serde_json::to_string(&report).unwrap_or_else(err_json),
        Err(e) => err_json(e),
    }
}

/// Sample a random degree-`d` polynomial of the given height and compute
/// the cyclic-window products: each root lands in exactly 6 windows, so
/// the product of all window products reproduces `a0^6`.
#[wasm_bindgen]
pub fn f6_windows(degree: u32, height: i64, seed: u64) -> String {
    let d = degree as usize;
    if !(12..=16).contains(&d) {
        return err_json("degree must be within [12, 16]");
    }
    if !(1..=50).contains(&height) {
        return err_json("height must be within [1, 50]");
    }
    let mut rng = TrialRng::substream(seed, 0);
    let mut coeffs = Vec::with_capacity(d);
    let mut a0 = 0i64;
    while a0 == 0 {
        a0 = rng.int_in(-height, height);
    }
    coeffs.push(BigInt::from(a0));
    for _ in 1..d {
        coeffs.push(BigInt::from(rng.int_in(-height, height)));
    }
    let f = MonicIntPoly::new(coeffs).expect("degree >= 12");
    let rs = match roots::find_roots(&f, 1e-12) {
        Ok(rs) => rs,
        Err(e) => return err_json(e),
    };
    match criterion::f6_demo(&f, 1e-12) {
        Ok(report) => json!({
            "poly_csv": f.to_string(),
            "pretty": f.to_pretty(),
            "roots": rs.roots().iter().map(|r| [r.re, r.im]).collect::<Vec<_>>(),
            "report": report,
        })
        .to_string(),
        Err(e) => err_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_reports_roots_and_verdict() {
        let out = analyze_poly("2,-3");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["degree"], 2);
        assert_eq!(v["irreducible"], false);
        assert_eq!(v["roots"].as_array().unwrap().len(), 2);
        assert_eq!(v["factors"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn analyze_rejects_bad_input() {
        let v: serde_json::Value = serde_json::from_str(&analyze_poly("1,junk")).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn strata_probe_reports_two_strata() {
        let out = strata_probe(5, 2, 2, 9.0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rungs"][0]["strata"].as_array().unwrap().len(), 2);
        assert_eq!(v["gcd_ok"], true);
    }

    #[test]
    fn f6_windows_reproduces_target() {
        let out = f6_windows(12, 10, 5);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let err = v["report"]["relative_error"].as_f64().unwrap();
        assert!(err < 1e-6, "relative error {err}");
    }
}
