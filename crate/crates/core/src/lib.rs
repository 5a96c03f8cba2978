//! Numerical and exact tools for studying which real algebraic curves the
//! complex gamma function maps into real algebraic curves.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axis;
pub mod detector;
pub mod error;
pub mod factorial;
pub mod gamma;
pub mod irreducible;
pub mod poly;
pub mod puiseux;
pub mod trace;
pub mod upoly;

pub use axis::{ExtremumKind, ExtremumRecord, SpiralReport, SweepReport, TrendReport};
pub use detector::{
    BialgConfig, BialgReport, BialgVerdict, FitVerdict, GaussianPoly2, RankReport, TrivialClass, TrivialKind,
};
pub use error::{Error, Result};
pub use factorial::{
    FactorialClass, FactorialClassification, FactorialPoint, GrowthEstimate, RForcingReport, ValuationCertificate,
};
pub use gamma::ComplexValue;
pub use irreducible::Irreducibility;
pub use poly::RationalPoly2;
pub use puiseux::{BranchSet, Face, PuiseuxBranch};
pub use trace::{CurveSampleSet, Direction, Rect, StopReason, TraceOptions};
