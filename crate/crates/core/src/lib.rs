//! Chebyshev centers and radii of finite point sets in finite-dimensional
//! l_p spaces (`1 < p < inf`), with duality-based optimality certificates,
//! comparison of the radius/diameter ratio against the exact Jung constant
//! of the space, and extraction of large simplices whose edges are all close
//! to the set's diameter.
//!
//! The crate is organized in four layers:
//!
//! - [`space`]: validated l_p exponents, vectors, point sets, norms, the
//!   duality map, and the dual pairing;
//! - [`chebyshev`]: the center solver, certificate extraction and
//!   verification, and the pairwise-spread identity `T = 2r`;
//! - [`extremal`]: Jung constants, radius-to-bound ratios and gaps, the
//!   coordinatewise inequalities behind them, and generators for the two
//!   canonical near-extremal families (standard basis sets and scaled
//!   Hadamard rows);
//! - [`simplex`]: the diagnostics (`T_j` values, heavy sets, neighborhood
//!   masses) and the greedy extraction of an `m`-simplex with near-diameter
//!   edges from a normalized near-extremal set.
//!
//! Everything is deterministic for a fixed configuration and seed: iteration
//! orders are fixed, and randomness only enters through explicitly seeded
//! generators.

pub mod chebyshev;
pub mod extremal;
pub mod simplex;
pub mod space;

pub use chebyshev::{
    chebyshev_center, extract_certificate, radius_at, t_identity, verify_certificate,
    CenterResult, Certificate, CertificateError, SolverConfig, SolverError, VerificationReport,
    ACTIVE_TOL_DEFAULT, WEIGHT_DROP_THRESHOLD,
};
pub use extremal::{
    chernykh_check, extremality_report, generate_basis_set, generate_hadamard_set, gulevich_gap,
    jung_constant, ExtremalError, ExtremalityReport, JungValue,
};
pub use simplex::{
    extract_simplex, feasibility_check, heavy_set, neighborhood, packing_lower_bound, t_values,
    ExtractError, ExtractionDiagnostics, ExtractionParams, FeasibilityCheck, HeavySet,
    SimplexResult,
};
pub use space::{dual_pairing, LpSpace, PointSet, SpaceError, Vector};
