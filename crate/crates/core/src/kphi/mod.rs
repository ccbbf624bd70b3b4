//! The minimax invariant
//! `c_Φ(G, K, R) = min { max_{g∈K} ‖α(g)f − f‖_Φ : supp f ⊂ B_R, f(e) = 1 }`
//! bracketed from above by optimisation and from below by dual flow
//! certificates.

mod certificate;
mod objective;
mod optimize;
mod witness;

pub use certificate::{
    certify_lower, half_line_certificate, k4_constant, Certificate, CertificateFile, DualFunction, FunctionEntry,
};
pub use objective::{objective, objective_with, truncate_positive, Action, BallProblem};
pub use optimize::{
    lower_from_certificate, minimize_upper, minimize_upper_on, minimize_upper_series, sandwich, sandwich_on,
    Diagnostics, Method, MinimaxResult, OptimizerOptions, SandwichReport,
};
pub use witness::{build_f2_witness, build_f2_witness_with, AnalyticDualFamily, LetterSide};
