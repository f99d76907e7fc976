//! Exact and Monte Carlo experimentation with irreducibility of random
//! monic integer polynomials of bounded degree.
//!
//! The crate is organized around a pipeline:
//!
//! * [`intpoly`] — exact arithmetic on monic integer polynomials and an
//!   exact irreducibility test over ℤ,
//! * [`roots`] — high-precision complex root finding and argument-principle
//!   root counting,
//! * [`divisors`] — divisor-function machinery (τ, s-simplicity, divisor
//!   statistics of coefficient distributions),
//! * [`coeffmodels`] — joint coefficient distributions (arbitrary sets,
//!   polynomial-value supports, binomial, dependent chains, polynomial
//!   push-forwards) with (C,t)-uniformity certificates,
//! * [`criterion`] — the subset-product factorization criterion, randomized
//!   non-degeneracy testing, root-magnitude strata, and the cyclic-window
//!   degeneracy demo,
//! * [`szlemma`] — sparse multivariate integer polynomials and exhaustive
//!   verification of the (C,t)-uniform Schwartz–Zippel bound,
//! * [`bounds`] — closed-form irreducibility probability bounds,
//! * [`harness`] — seeded experiment driver, reports, CSV/SVG emission.

pub mod bounds;
pub mod coeffmodels;
pub mod criterion;
pub mod dd;
pub mod divisors;
pub mod harness;
pub mod intpoly;
pub mod rng;
pub mod roots;
pub mod szlemma;

pub use intpoly::MonicIntPoly;
