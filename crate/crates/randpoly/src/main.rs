//! Command-line front end: exact irreducibility testing, model sampling,
//! Monte Carlo experiments with theorem-bound comparison, Schwartz–Zippel
//! checks, strata scans, and the cyclic-window demo.

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use randpoly::coeffmodels::{CoeffModel, DistSpec, SetSpec};
use randpoly::criterion::{self, CriterionQuery};
use randpoly::harness::{self, ExperimentConfig, PlotPoint, ScanConfig};
use randpoly::intpoly::{self, MonicIntPoly};
use randpoly::rng::TrialRng;
use randpoly::szlemma::{self, SparseMultiPoly};
use randpoly::{bounds, coeffmodels};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "randpoly",
    about = "Irreducibility experiments on random monic integer polynomials",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact irreducibility test. Exit code: 0 irreducible, 1 reducible,
    /// 2 error.
    Test {
        /// Polynomial as "a0,a1,...,a_{d-1}" (monic implied).
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// Draw samples from a coefficient model.
    Sample {
        /// Model description JSON file.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: u64,
        /// First trial index.
        #[arg(long, default_value_t = 0)]
        start: u64,
    },
    /// Run an experiment config; the report JSON goes to the config's
    /// output_path or stdout.
    Run { config: PathBuf },
    /// Rate-decay scan over a list of support sizes.
    Scan {
        config: PathBuf,
        /// Write the scan table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write a log-log rate plot as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write the full scan report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate a theorem bound from explicit parameters.
    Bound(BoundArgs),
    /// Exhaustive Schwartz-Zippel check of a multivariate polynomial over
    /// an integer grid.
    SzCheck {
        /// File holding the polynomial in text form, e.g.
        /// "3*x1^2*x2 - x2^3 + 7".
        poly_file: PathBuf,
        /// Per-variable inclusive range "lo..hi"; repeat per variable (the
        /// last one fills any remaining variables).
        #[arg(long, default_value = "-5..5", allow_hyphen_values = true)]
        range: Vec<String>,
    },
    /// Root-magnitude strata scan for one or more varied coefficients.
    Strata {
        #[arg(long)]
        degree: usize,
        /// Varied coefficient index; repeat for a multi-index scan.
        #[arg(long = "index", required = true)]
        indices: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        a0: i64,
        /// Fixed value for the non-varied coefficients a_1..a_{d-1}.
        #[arg(long, default_value_t = 1)]
        fill: i64,
        /// Ladder of values for the top varied coefficient (comma list).
        #[arg(long)]
        ladder: Option<String>,
        #[arg(long, default_value_t = 100)]
        omega: u64,
    },
    /// Cyclic-window product demo: d windows of 6 consecutive roots
    /// multiply to a0^6.
    F6Demo {
        /// Explicit polynomial "a0,a1,..."; random polynomials are drawn
        /// when absent.
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        #[arg(long, default_value_t = 12)]
        degree: usize,
        #[arg(long, default_value_t = 10)]
        height: i64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized not-identically-zero test of the criterion over a
    /// push-forward family.
    Pit {
        #[arg(long)]
        degree: usize,
        /// Factor degree k (ignored with --f6).
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        a0: i64,
        /// Subset-product target b0 (ignored with --f6).
        #[arg(long, default_value_t = 1)]
        b0: i64,
        /// Push-forward model JSON; identity map when absent.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        trials: u64,
        /// Half-width of the integer sampling box.
        #[arg(long = "box", default_value_t = 100)]
        box_half: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the degenerate cyclic-window configuration instead.
        #[arg(long)]
        f6: bool,
    },
}

#[derive(Args)]
struct BoundArgs {
    /// One of: markov, varyone, strong, simple1, simple2, simple3.
    theorem: String,
    #[arg(long, short = 'd')]
    degree: usize,
    /// Uniformity constant; simple2 derives it from the binomial (h, p)
    /// when omitted.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    l: f64,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 0.0)]
    p_zero: f64,
    #[arg(long)]
    h: Option<u64>,
    /// Comma list of support sizes (strong).
    #[arg(long)]
    k_list: Option<String>,
    /// Comma list of varied indices (varyone gcd check).
    #[arg(long)]
    indices: Option<String>,
    /// deg(P) for the polynomial-values constant coefficient.
    #[arg(long, default_value_t = 1)]
    deg_p: u64,
    /// s for s-simple supports (markov case 2 when set).
    #[arg(long)]
    s: Option<u64>,
    /// Binomial success probability p = p_num / p_den (simple2).
    #[arg(long, default_value_t = 1)]
    p_num: u64,
    #[arg(long, default_value_t = 2)]
    p_den: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cmd {
        Command::Test { poly } => {
            let f = MonicIntPoly::from_str(&poly)?;
            let (irreducible, fac) = intpoly::is_irreducible_exact(&f)?;
            if irreducible {
                println!("irreducible: {}", f.to_pretty());
                Ok(ExitCode::SUCCESS)
            } else {
                println!(
                    "reducible: {} = ({}) ({})   [csv: {} | {}]",
                    f.to_pretty(),
                    fac.factors[0].to_pretty(),
                    fac.factors[1].to_pretty(),
                    fac.factors[0],
                    fac.factors[1]
                );
                Ok(ExitCode::from(1))
            }
        }
        Command::Sample {
            model,
            seed,
            count,
            start,
        } => {
            let text = std::fs::read_to_string(model)?;
            let model: CoeffModel = serde_json::from_str(&text)?;
            let compiled = model.compile()?;
            for trial in start..start + count {
                println!("{}", compiled.sample(seed, trial));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config } => {
            let text = std::fs::read_to_string(config)?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)?;
            let report = harness::run_experiment(&cfg)?;
            let json = serde_json::to_string_pretty(&report)?;
            match &cfg.output_path {
                Some(path) => {
                    std::fs::write(path, json)?;
                    eprintln!("report written to {path}");
                }
                None => println!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            config,
            csv,
            svg,
            json,
        } => {
            let text = std::fs::read_to_string(config)?;
            let cfg: ScanConfig = serde_json::from_str(&text)?;
            let report = harness::rate_decay_scan(&cfg)?;
            println!(
                "{:>8} {:>10} {:>10} {:>12} {:>12} {:>12}",
                "H", "trials", "reducible", "rate", "rate*H", "allowance"
            );
            for r in &report.rows {
                println!(
                    "{:>8} {:>10} {:>10} {:>12.6} {:>12.4} {:>12}",
                    r.h,
                    r.trials,
                    r.reducible,
                    r.rate,
                    r.rate_times_h,
                    if r.bound_vacuous {
                        "vacuous".to_string()
                    } else {
                        format!("{:.6}", r.bound_allowance)
                    }
                );
            }
            if let Some(path) = csv {
                std::fs::write(&path, harness::scan_csv(&report))?;
            }
            if let Some(path) = svg {
                let points: Vec<PlotPoint> = report.rows.iter().map(PlotPoint::from).collect();
                std::fs::write(&path, harness::emit_plot(&points)?)?;
            }
            if let Some(path) = json {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound(args) => {
            let report = eval_bound(&args)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::SzCheck { poly_file, range } => {
            let text = std::fs::read_to_string(poly_file)?;
            let poly = SparseMultiPoly::from_str(text.trim())?;
            let m = poly.nvars();
            let mut dists = Vec::with_capacity(m);
            for i in 0..m {
                let spec = range.get(i).or_else(|| range.last()).unwrap();
                let (lo, hi) = parse_range(spec)?;
                dists.push(SetSpec::Interval { lo, hi }.to_dist()?);
            }
            let decomp = szlemma::leading_degrees(&poly)?;
            let certs: Vec<_> = dists
                .iter()
                .map(|d| coeffmodels::certify_uniformity(d, d.len() as u64))
                .collect();
            let exact = szlemma::zero_fraction_on_grid(&poly, &dists)?;
            let bound = szlemma::sz_bound(&poly, &certs)?;
            println!("polynomial      : {poly}");
            println!("leading degrees : {:?}", decomp.degrees);
            println!("exact zero mass : {} = {:.6e}", exact, rational_f64(&exact));
            println!(
                "sz bound        : {} = {:.6e}",
                bound.per_leading_degree,
                rational_f64(&bound.per_leading_degree)
            );
            let ok = exact <= bound.per_leading_degree;
            println!("bound holds     : {ok}");
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Strata {
            degree,
            indices,
            a0,
            fill,
            ladder,
            omega,
        } => {
            let mut base = vec![BigInt::from(fill); degree];
            base[0] = BigInt::from(a0);
            let mut varied = indices;
            varied.sort_unstable_by(|a, b| b.cmp(a));
            varied.dedup();
            let ladder = match ladder {
                Some(s) => s
                    .split(',')
                    .map(|t| BigInt::from_str(t.trim()))
                    .collect::<Result<Vec<_>, _>>()?,
                None => criterion::default_ladder(),
            };
            let report = criterion::strata_magnitudes(&base, &varied, &ladder, omega, 1e-12)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::F6Demo {
            poly,
            degree,
            height,
            count,
            seed,
        } => {
            let mut reports = Vec::new();
            match poly {
                Some(text) => {
                    let f = MonicIntPoly::from_str(&text)?;
                    reports.push(criterion::f6_demo(&f, 1e-12)?);
                }
                None => {
                    for trial in 0..count {
                        let f = random_f6_instance(degree, height, seed, trial)?;
                        reports.push(criterion::f6_demo(&f, 1e-12)?);
                    }
                }
            }
            println!("{}", serde_json::to_string_pretty(&reports)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Pit {
            degree,
            k,
            a0,
            b0,
            model,
            trials,
            box_half,
            seed,
            f6,
        } => {
            let verdict = if f6 {
                criterion::f6_pit(degree, &BigInt::from(a0), trials, box_half, seed, 1e-6)?
            } else {
                let model = match model {
                    Some(path) => {
                        let text = std::fs::read_to_string(path)?;
                        serde_json::from_str::<CoeffModel>(&text)?
                    }
                    None => identity_pushforward(degree, a0, box_half),
                };
                let compiled = model.compile()?;
                let q = CriterionQuery::new(degree, k, BigInt::from(a0), BigInt::from(b0))?;
                criterion::nondegeneracy_pit(&compiled, &q, trials, box_half, seed)?
            };
            println!("{}", serde_json::to_string_pretty(&verdict)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Identity push-forward: `a_j = t_j` for `j = 1..d-1`.
fn identity_pushforward(degree: usize, a0: i64, box_half: i64) -> CoeffModel {
    CoeffModel::PushForward {
        constant: DistSpec::uniform(SetSpec::Explicit { values: vec![a0] }),
        t_dists: vec![DistSpec::uniform(SetSpec::interval(box_half)); degree - 1],
        components: (2..=degree).map(|j| format!("x{j}")).collect(),
    }
}

fn random_f6_instance(
    degree: usize,
    height: i64,
    seed: u64,
    trial: u64,
) -> Result<MonicIntPoly, Box<dyn std::error::Error>> {
    let mut rng = TrialRng::substream(seed, trial);
    let mut coeffs = Vec::with_capacity(degree);
    let mut a0 = 0i64;
    while a0 == 0 {
        a0 = rng.int_in(-height, height);
    }
    coeffs.push(BigInt::from(a0));
    for _ in 1..degree {
        coeffs.push(BigInt::from(rng.int_in(-height, height)));
    }
    Ok(MonicIntPoly::new(coeffs)?)
}

fn parse_range(s: &str) -> Result<(i64, i64), Box<dyn std::error::Error>> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("range '{s}' must be lo..hi"))?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}

fn rational_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn eval_bound(args: &BoundArgs) -> Result<bounds::BoundReport, Box<dyn std::error::Error>> {
    let h = args.h.unwrap_or(1000);
    let c = args.c.unwrap_or(1.0);
    let report = match args.theorem.as_str() {
        "markov" => match args.s {
            Some(s) => bounds::bound_markov_simple(args.degree, c, args.l, args.m, s, h),
            None => bounds::bound_markov(args.degree, c, args.l, args.m, args.tau, args.p_zero, h),
        },
        "varyone" => {
            let indices: Vec<usize> = match &args.indices {
                Some(list) => list
                    .split(',')
                    .map(|t| t.trim().parse())
                    .collect::<Result<_, _>>()?,
                None => vec![1],
            };
            bounds::bound_varyone(
                args.degree,
                args.tau,
                args.p_zero,
                h,
                bounds::varyone_gcd_ok(args.degree, &indices),
            )?
        }
        "strong" => {
            let k_list: Vec<u64> = match &args.k_list {
                Some(list) => list
                    .split(',')
                    .map(|t| t.trim().parse())
                    .collect::<Result<_, _>>()?,
                None => vec![h],
            };
            bounds::bound_strong(args.degree, c, args.l, args.tau, args.p_zero, &k_list)
        }
        "simple1" => bounds::bound_simple(
            &bounds::SimpleCase::Sparse {
                deg_p: args.deg_p,
                tau_mean: args.tau,
            },
            args.degree,
            h,
        ),
        "simple2" => {
            let c = match args.c {
                Some(c) => c,
                None => {
                    let dist =
                        coeffmodels::DiscreteDist::binomial(h, args.p_num, args.p_den, false)?;
                    coeffmodels::certify_uniformity(&dist, h).c_f64()
                }
            };
            bounds::bound_simple(
                &bounds::SimpleCase::Binomial {
                    c,
                    tau_mean: args.tau,
                },
                args.degree,
                h,
            )
        }
        "simple3" => bounds::bound_simple(
            &bounds::SimpleCase::Chain {
                deg_p: args.deg_p,
                l: args.l,
                tau_mean: args.tau,
            },
            args.degree,
            h,
        ),
        other => return Err(format!("unknown theorem '{other}'").into()),
    };
    Ok(report)
}
