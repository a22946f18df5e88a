//! Partial metric spaces and their fixed-point machinery.
//!
//! A partial metric is a symmetric distance that allows nonzero
//! self-distance `d(x,x)`, subject to the reflexive-triangular
//! inequality, the Matthews property and weak sufficiency. Every such
//! distance induces a genuine metric
//! `e(x,y) = 2 d(x,y) - d(x,x) - d(y,y)`, and contraction theorems for
//! self-maps transfer along `e`.
//!
//! The crate is organised around that pipeline:
//!
//! * [`space`] — finite and continuous partial metric spaces, axiom
//!   checking, the derived maps `b`, `c`, `e`, and a random generator
//!   that only emits valid spaces.
//! * [`gauge`] — comparison functions `phi` on the half-line, with
//!   numeric limsup/liminf estimators and normality classification.
//! * [`contraction`] — the comparison quantities `M1`, `M2`, `M3` and
//!   verification of the contractive condition
//!   `d(Tx,Ty) <= max(phi(M(x,y)), g(x,y))` for `g` in `{b, c}`.
//! * [`dynamics`] — Picard orbits, sequence diagnostics (d/e
//!   convergence, e-Cauchy, e-semi-Cauchy, violation-rank extraction),
//!   exact fixed-point structure on finite spaces, and solver
//!   certificates.
//! * [`search`] — seeded randomized trials that machine-check the
//!   hypotheses and then assert the theorems' conclusions.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std`
//! feature (default) is only needed by downstream IO.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod contraction;
pub mod dynamics;
pub mod gauge;
pub mod search;
pub mod space;

pub use contraction::{ContractionReport, GKind, MQuantities, SelfMap};
pub use dynamics::{Certificate, CertificateKind, FixedStructure, OrbitTrace, StopReason};
pub use gauge::{Gauge, GaugeClassReport, LimitEstimate};
pub use search::{SearchReport, TrialOutcome, TrialSpec};
pub use space::{AxiomReport, ContinuousSpace, FiniteSpace, IntervalSpace, PartialMetric};
