//! Exact workbench for rank-2 parabolic logarithmic connections on
//! hyperelliptic curves over the rationals.
//!
//! Everything is computed in exact rational arithmetic: function field
//! elements on `y^2 = f(x)`, Riemann-Roch spaces, Cech cohomology for a
//! two-chart cover, and the reconstruction of a logarithmic connection from
//! its apparent data.

pub mod cech;
pub mod connection;
pub mod parabolic;
pub mod reconstruct;
pub mod scenario;
pub mod transform;
pub mod curve;
pub mod rr;
pub mod divisor;
pub mod error;
pub mod ffe;
pub mod linalg;
pub mod poly;
pub mod ratfunc;
pub mod scalar;
pub mod series;

pub use cech::{class_is_zero, cup_pair, h0_pairing_map, h1_basis, residue_functional, serre_coords, split_cocycle, CechOneClass, Cover, LineBundleData, PivotPolicy};
pub use connection::{app_map, build_line_connection, bun_map, dlog, local_exponents, projectively_equal, validate_connection, ChartMatrix, ConnectionData, LineConnectionData, ValidationItem, ValidationReport};
pub use curve::CurveModel;
pub use divisor::{ClosedPoint, Divisor};
pub use error::{Error, Result};
pub use ffe::{canonical_divisor, pole_divisor, principal_divisor, residue, valuation, DifferentialForm, Ffe};
pub use linalg::{kernel, solve_linear, solve_linear_with_order, LinearSolution, Matrix};
pub use parabolic::{fuchs_check, moduli_dimensions, parabolic_degree, resonance_check, stability_margin, v0_membership, ExponentData, FlagIncidence, ModuliDimensions, ParabolicBundleData, Weights};
pub use poly::Poly;
pub use reconstruct::{invert_app_bun, reconstruct, sigma_test, ReconstructOptions, ReconstructionResult};
pub use scenario::{Sample, Sampler, Scenario, SkipCounters};
pub use transform::{elm_minus_exponents, elm_minus_local, elm_plus_exponents, twist_exponents, LocalModel};
pub use ratfunc::RatFunc;
pub use scalar::Scalar;
pub use rr::{h1_dim, rr_dim, rr_space_basis};
pub use series::Series;
