//! Exact, finitely presented compact metric spaces.
//!
//! Every scalar in this crate is an exact [`Rational`]. Spaces are described
//! finitely (distance tables, rational intervals, finite and countable
//! products) so that every metric comparison is decidable, and compactness
//! claims can be emitted as finite ε-net certificates and checked
//! independently.
//!
//! Module map:
//!
//! - [`space`]: presentations, points, metric evaluation, axiom checks.
//! - [`gauge`]: bounded subadditive transforms `h ∘ d` of a metric.
//! - [`product`]: countable products under the weighted metric
//!   `D(x, y) = Σ lᵢ·dᵢ(xᵢ, yᵢ)/Mᵢ` with geometric weights.
//! - [`nets`]: ε-net synthesis, coverage verification, nested-ball
//!   cluster-point extraction.
//! - [`quotient`]: the binary-expansion map `f(x) = Σ 2⁻ⁱxᵢ` onto `[0, 1]`.
//! - [`notation`]: textual syntax for points.
//!
//! Scans over probe sets run on rayon when the `parallel` feature is enabled
//! (the default); see [`Exec`].

// Errors carry exact rational witnesses by design.
#![allow(clippy::result_large_err)]

pub mod exec;
pub mod gauge;
pub mod nets;
pub mod notation;
pub mod product;
pub mod quotient;
pub mod rational;
pub mod space;

pub use exec::Exec;
pub use gauge::Gauge;
pub use nets::{ClusterPoint, CoverageReport, NetCertificate};
pub use product::{BasicOpen, ComponentGenerator, CountableProduct, ProductPoint, WeightSequence};
pub use quotient::{BinarySeq, Dyadic};
pub use rational::Rational;
pub use space::{Axiom, AxiomReport, Point, Probes, Space, SpaceError, Violation};
