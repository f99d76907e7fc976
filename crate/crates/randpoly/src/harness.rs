//! Seeded Monte Carlo experiment driver: sample polynomials from a model,
//! test exact irreducibility, compare the empirical reducibility rate
//! against a theorem bound, and persist reports.
//!
//! Reproducibility is the core contract here: trial `i` draws from the
//! substream `(seed, i)`, aggregation is order-free counting, and reports
//! serialize identically regardless of worker count (wall time aside).

use crate::bounds::{self, BoundReport};
use crate::coeffmodels::{certify_uniformity, CoeffModel, CompiledModel, ModelError};
use crate::divisors::{divisor_stats, DivisorStats};
use crate::intpoly::{self, PolyError};
use crate::rng::TrialRng;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Bounds(#[from] bounds::BoundsError),
    #[error("{errors} precision failures out of {trials} trials (limit is 0.1%)")]
    TooManyErrors { errors: u64, trials: u64 },
    #[error("bound spec '{spec}' requires an independent-coefficients model")]
    BoundSpecMismatch { spec: &'static str },
    #[error("plot input is empty")]
    EmptySeries,
    #[error("config i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse: {0}")]
    Json(#[from] serde_json::Error),
}

/// Which theorem bound to compare the empirical rate against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum BoundSpec {
    /// General dependent-coefficient bound; `c`, `l`, `m` default to values
    /// derived from the model (exact uniformity certificates, certified
    /// push-forward degree).
    Markov {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        l: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
    },
    /// Only the listed coefficient indices vary; requires
    /// `gcd({d} ∪ indices) = 1`.
    VaryOne { indices: Vec<usize> },
    /// Per-variable support sizes enter as `sum 1/k_i`.
    Strong {},
}

impl Default for BoundSpec {
    fn default() -> Self {
        BoundSpec::Markov {
            c: None,
            l: None,
            m: None,
        }
    }
}

fn default_workers() -> usize {
    1
}

fn default_divisor_budget() -> u64 {
    100_000
}

/// A runnable experiment description (JSON-serializable).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub model: CoeffModel,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub bound: BoundSpec,
    /// Worker threads; `RANDPOLY_WORKERS` overrides. Execution detail: it
    /// never changes results and is not echoed into reports.
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Exact divisor statistics when the constant-coefficient support is
    /// at most this size; Monte Carlo with this many draws otherwise.
    #[serde(default = "default_divisor_budget")]
    pub divisor_budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

fn schema_version() -> u32 {
    1
}

/// The reproducible part of the config, echoed into reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub schema_version: u32,
    pub model: CoeffModel,
    pub trials: u64,
    pub seed: u64,
    pub bound: BoundSpec,
    pub divisor_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub reducible_count: u64,
    pub irreducible_count: u64,
    /// Trials where precision was exhausted (counted, never mislabeled).
    pub error_count: u64,
    pub empirical_reducible_rate: f64,
    pub wilson_ci_95: [f64; 2],
    pub divisor_stats: DivisorStatsEcho,
    pub bound: BoundReport,
    /// Reducibility mass the theorem allows: `1 - lower_bound`.
    pub allowance: f64,
    /// `ci_hi <= allowance`, or the bound is vacuous.
    pub satisfied: bool,
    pub wall_time_ms: u64,
}

/// Serializable mirror of [`DivisorStats`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorStatsEcho {
    pub tau_mean: f64,
    pub p_zero: f64,
    pub sample_count: u64,
    pub exact: bool,
}

impl From<&DivisorStats> for DivisorStatsEcho {
    fn from(s: &DivisorStats) -> Self {
        DivisorStatsEcho {
            tau_mean: s.tau_mean,
            p_zero: s.p_zero,
            sample_count: s.sample_count,
            exact: s.exact,
        }
    }
}

impl ExperimentReport {
    /// Canonical JSON with wall time zeroed; two runs of the same config
    /// must agree byte-for-byte on this.
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.wall_time_ms = 0;
        serde_json::to_string_pretty(&clone).expect("report serializes")
    }
}

/// 95% Wilson score interval; well-behaved at zero counts.
pub fn wilson_ci_95(successes: u64, n: u64) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let z = 1.959963984540054_f64;
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = p + z2 / (2.0 * n_f);
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    [
        ((center - half) / denom).max(0.0),
        ((center + half) / denom).min(1.0),
    ]
}

fn effective_workers(cfg_workers: usize) -> usize {
    std::env::var("RANDPOLY_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(cfg_workers)
        .max(1)
}

/// Run the experiment: sample, test exact irreducibility, tally, compare
/// against the configured theorem bound.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let start = Instant::now();
    let compiled = cfg.model.compile()?;
    let workers = effective_workers(cfg.workers);

    let (mut reducible, mut irreducible, mut errors) = (0u64, 0u64, 0u64);
    std::thread::scope(|scope| {
        let compiled = &compiled;
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let (mut red, mut irr, mut err) = (0u64, 0u64, 0u64);
                    let mut trial = w as u64;
                    while trial < cfg.trials {
                        let f = compiled.sample(cfg.seed, trial);
                        match intpoly::is_irreducible_exact(&f) {
                            Ok((true, _)) => irr += 1,
                            Ok((false, _)) => red += 1,
                            Err(_) => err += 1,
                        }
                        trial += workers as u64;
                    }
                    (red, irr, err)
                })
            })
            .collect();
        for h in handles {
            let (red, irr, err) = h.join().expect("worker panicked");
            reducible += red;
            irreducible += irr;
            errors += err;
        }
    });

    if errors * 1000 > cfg.trials {
        return Err(HarnessError::TooManyErrors {
            errors,
            trials: cfg.trials,
        });
    }

    let mut stats_rng = TrialRng::substream(cfg.seed ^ 0xD1715, 0);
    let stats = divisor_stats(
        compiled.constant_marginal(),
        cfg.divisor_budget,
        &mut stats_rng,
    );
    let bound = derive_bound(&compiled, &cfg.bound, &stats)?;
    let rate = reducible as f64 / cfg.trials as f64;
    let ci = wilson_ci_95(reducible, cfg.trials);
    let allowance = bound.allowance();
    let satisfied = bound.vacuous || ci[1] <= allowance;

    Ok(ExperimentReport {
        schema_version: cfg.schema_version,
        config: ConfigEcho {
            schema_version: cfg.schema_version,
            model: cfg.model.clone(),
            trials: cfg.trials,
            seed: cfg.seed,
            bound: cfg.bound.clone(),
            divisor_budget: cfg.divisor_budget,
        },
        reducible_count: reducible,
        irreducible_count: irreducible,
        error_count: errors,
        empirical_reducible_rate: rate,
        wilson_ci_95: ci,
        divisor_stats: (&stats).into(),
        bound,
        allowance,
        satisfied,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Instantiate the configured theorem bound with parameters measured from
/// the model: exact uniformity certificates for `C`, the certified
/// push-forward degree for `L`, support sizes for `H`/`k_i`, and the
/// supplied divisor statistics for `tau` and `p_zero`.
pub fn derive_bound(
    model: &CompiledModel,
    spec: &BoundSpec,
    stats: &DivisorStats,
) -> Result<BoundReport, HarnessError> {
    let d = model.degree;
    let inputs = model.random_input_dists();
    let derived_c = || {
        inputs
            .iter()
            .map(|dist| certify_uniformity(dist, dist.len() as u64).c_f64())
            .fold(1.0, f64::max)
    };
    match spec {
        BoundSpec::Markov { c, l, m } => {
            let h = inputs.iter().map(|d| d.len() as u64).min().unwrap_or(1);
            let c = c.unwrap_or_else(derived_c);
            let l = l.unwrap_or(model.pushforward_degree() as f64);
            let m = m.unwrap_or(inputs.len());
            Ok(bounds::bound_markov(
                d,
                c,
                l,
                m,
                stats.tau_mean,
                stats.p_zero,
                h,
            ))
        }
        BoundSpec::VaryOne { indices } => {
            if !model.is_independent() {
                return Err(HarnessError::BoundSpecMismatch { spec: "vary_one" });
            }
            if indices.iter().any(|&i| i == 0 || i >= d) {
                return Err(HarnessError::BoundSpecMismatch { spec: "vary_one" });
            }
            // inputs[i-1] is the distribution of a_i.
            let h = indices
                .iter()
                .map(|&i| inputs[i - 1].len() as u64)
                .min()
                .unwrap_or(1);
            Ok(bounds::bound_varyone(
                d,
                stats.tau_mean,
                stats.p_zero,
                h,
                bounds::varyone_gcd_ok(d, indices),
            )?)
        }
        BoundSpec::Strong {} => {
            let k_list: Vec<u64> = inputs.iter().map(|d| d.len() as u64).collect();
            Ok(bounds::bound_strong(
                d,
                derived_c(),
                model.pushforward_degree() as f64,
                stats.tau_mean,
                stats.p_zero,
                &k_list,
            ))
        }
    }
}

/// Model family for a rate-decay scan over growing support size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScanFamily {
    /// All coefficients uniform on `[-h, h]`.
    Classical { degree: usize },
    /// `a_0` push-forward of `poly` (CSV coefficients) on `[-h, h]`, other
    /// coefficients uniform on `[-h, h]`.
    PolyConstant { degree: usize, poly: String },
}

impl ScanFamily {
    pub fn model_at(&self, h: u64) -> CoeffModel {
        match self {
            ScanFamily::Classical { degree } => CoeffModel::Classical {
                degree: *degree,
                h: h as i64,
            },
            ScanFamily::PolyConstant { degree, poly } => CoeffModel::PolyValueConstant {
                poly: poly.clone(),
                h,
                others: vec![crate::coeffmodels::SetSpec::interval(h as i64); degree - 1],
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub family: ScanFamily,
    /// Ascending support sizes.
    pub h_values: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub bound: BoundSpec,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_divisor_budget")]
    pub divisor_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub h: u64,
    pub trials: u64,
    pub reducible: u64,
    pub rate: f64,
    pub rate_times_h: f64,
    pub bound_allowance: f64,
    pub bound_vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub config: ScanConfig,
    pub rows: Vec<ScanRow>,
}

/// Run one experiment per `h` and tabulate the `1/H` decay (`rate * H`
/// stability is displayed, not asserted).
pub fn rate_decay_scan(cfg: &ScanConfig) -> Result<ScanReport, HarnessError> {
    let mut rows = Vec::with_capacity(cfg.h_values.len());
    for &h in &cfg.h_values {
        let exp_cfg = ExperimentConfig {
            schema_version: cfg.schema_version,
            model: cfg.family.model_at(h),
            trials: cfg.trials,
            seed: cfg.seed,
            bound: cfg.bound.clone(),
            workers: cfg.workers,
            divisor_budget: cfg.divisor_budget,
            output_path: None,
        };
        let report = run_experiment(&exp_cfg)?;
        rows.push(ScanRow {
            h,
            trials: cfg.trials,
            reducible: report.reducible_count,
            rate: report.empirical_reducible_rate,
            rate_times_h: report.empirical_reducible_rate * h as f64,
            bound_allowance: report.allowance,
            bound_vacuous: report.bound.vacuous,
        });
    }
    Ok(ScanReport {
        schema_version: cfg.schema_version,
        config: cfg.clone(),
        rows,
    })
}

/// CSV export with the fixed column set.
pub fn scan_csv(report: &ScanReport) -> String {
    let mut out = String::from("H,trials,reducible,rate,rate_times_H,bound_allowance\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{:.6e},{:.6e},{:.6e}\n",
            r.h, r.trials, r.reducible, r.rate, r.rate_times_h, r.bound_allowance
        ));
    }
    out
}

/// One point of a rate plot.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotPoint {
    pub h: f64,
    pub rate: f64,
    pub allowance: Option<f64>,
}

impl From<&ScanRow> for PlotPoint {
    fn from(r: &ScanRow) -> Self {
        PlotPoint {
            h: r.h as f64,
            rate: r.rate,
            allowance: (!r.bound_vacuous).then_some(r.bound_allowance),
        }
    }
}

impl From<&ExperimentReport> for PlotPoint {
    fn from(r: &ExperimentReport) -> Self {
        PlotPoint {
            h: r.bound.inputs.h.unwrap_or(1) as f64,
            rate: r.empirical_reducible_rate,
            allowance: (!r.bound.vacuous).then_some(r.allowance),
        }
    }
}

/// Deterministic log-log SVG scatter of reducibility rate vs H, with the
/// theorem allowance overlaid where non-vacuous.
pub fn emit_plot(points: &[PlotPoint]) -> Result<String, HarnessError> {
    if points.is_empty() {
        return Err(HarnessError::EmptySeries);
    }
    let (w, h, ml, mb, mt, mr) = (640.0, 480.0, 70.0, 50.0, 20.0, 20.0);
    let min_rate = points
        .iter()
        .map(|p| p.rate)
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let floor = if min_rate.is_finite() {
        (min_rate / 10.0).max(1e-12)
    } else {
        1e-6
    };
    let ys: Vec<f64> = points
        .iter()
        .map(|p| p.rate.max(floor))
        .chain(points.iter().filter_map(|p| p.allowance))
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.h.max(1.0)).collect();
    let (x_lo, x_hi) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min).log10() - 0.1,
        xs.iter().cloned().fold(0.0, f64::max).log10() + 0.1,
    );
    let (y_lo, y_hi) = (
        ys.iter().cloned().fold(f64::INFINITY, f64::min).log10() - 0.2,
        ys.iter().cloned().fold(0.0, f64::max).log10().max(0.0) + 0.2,
    );
    let sx = |x: f64| ml + (x.max(1e-300).log10() - x_lo) / (x_hi - x_lo).max(1e-9) * (w - ml - mr);
    let sy =
        |y: f64| h - mb - (y.max(1e-300).log10() - y_lo) / (y_hi - y_lo).max(1e-9) * (h - mb - mt);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        h - mb,
        w - mr,
        h - mb
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        h - mb
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">H (log)</text>\n",
        (ml + w - mr) / 2.0,
        h - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">reducible rate (log)</text>\n",
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0
    ));
    // Allowance curve.
    let curve: Vec<String> = points
        .iter()
        .filter_map(|p| {
            p.allowance
                .map(|a| format!("{:.2},{:.2}", sx(p.h), sy(a.max(floor))))
        })
        .collect();
    if curve.len() >= 2 {
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-dasharray=\"6 3\"/>\n",
            curve.join(" ")
        ));
    }
    for p in points {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#2c3e50\"/>\n",
            sx(p.h),
            sy(p.rate.max(floor))
        ));
        if let Some(a) = p.allowance {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#c0392b\"/>\n",
                sx(p.h),
                sy(a.max(floor))
            ));
        }
        // Tick label per data point.
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            sx(p.h),
            h - mb + 16.0,
            p.h
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
