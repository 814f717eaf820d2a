//! Pointwise terms: the regularized absorption and its limit, the
//! gradient-estimate majorant, and the nonlinearity pair `(f, F)`.

mod estimates;
mod nonlinearity;
mod singular;

pub use estimates::{
    check_scalar_estimates, estimate_constants, EstimateConstants, Violation, ViolationReport, EPS0,
    ESTIMATE_SLACK,
};
pub use nonlinearity::{HypothesisReport, NonlinearityModel, EXP_GUARD};
pub use singular::{SingularFamily, SingularParams, L_EPS_TOL};
