//! Lipschitz pullbacks: lower bounds for `c_Φ` move from a source group to
//! a target group along an injective Lipschitz table `ρ`.

mod embedding;

pub use embedding::{EmbeddingFile, EmbeddingMap};

use crate::error::{Error, Result};
use crate::groups::{FiniteFunction, GroupSpec};
use crate::kphi::{certify_lower, Action, Certificate};
use crate::norms::NormingFunction;
use serde::Serialize;

/// `M·|K|^M` for the target generating set `K`.
pub fn transfer_bound(rho: &EmbeddingMap, k_target: &GroupSpec, phi: &NormingFunction) -> Result<f64> {
    phi.validate()?;
    if !k_target.is_symmetric() {
        return Err(Error::Precondition(format!("target generating set of {k_target} must be symmetric")));
    }
    if k_target.family != rho.target().family {
        return Err(Error::InvalidInput("generating set from another family".into()));
    }
    let m = rho.lipschitz_m() as f64;
    let factor = m * (k_target.generators().len() as f64).powf(m);
    if rho.displacement_weight() as f64 > factor {
        return Err(Error::Invariant(format!(
            "displacement weight {} exceeds M|K|^M = {factor}",
            rho.displacement_weight()
        )));
    }
    Ok(factor)
}

/// Both sides of the chain inequality for one target function:
/// `max_p ‖α(g_p)(f∘ρ) − f∘ρ‖_Φ` and `factor · max_k ‖α(k)f − f‖_Φ`.
pub fn transfer_chain(rho: &EmbeddingMap, f: &FiniteFunction, phi: &NormingFunction) -> Result<(f64, f64)> {
    let factor = transfer_bound(rho, rho.target(), phi)?;
    let pulled = rho.pullback(f)?;
    let lhs = rho.source().generators().iter().map(|g| pulled.right_difference(g).norm(phi).hi).fold(0.0, f64::max);
    let rhs = rho.target().generators().iter().map(|k| f.right_difference(k).norm(phi).lo).fold(0.0, f64::max);
    Ok((lhs, factor * rhs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferReport {
    /// Lower bound for the target invariant.
    pub bound: f64,
    pub source_lower: f64,
    pub factor: f64,
    /// Target radii `R ≤ valid_radius` are covered.
    pub valid_radius: usize,
}

/// `(source lower bound) / (M|K|^M)`, valid for target functions supported
/// in `B_{valid_radius}` with `f(e) = 1`.
pub fn transfer_lower(
    cert: &Certificate,
    rho: &EmbeddingMap,
    k_target: &GroupSpec,
    phi: &NormingFunction,
) -> Result<TransferReport> {
    if cert.action() != Action::Right {
        return Err(Error::InvalidCertificate("transfer needs a right-action certificate".into()));
    }
    if cert.phi() != *phi {
        return Err(Error::InvalidCertificate(format!("certificate is for {} not {phi}", cert.phi())));
    }
    if cert.group().family != rho.source().family
        || cert.generators().iter().any(|g| !rho.source().generators().contains(g))
    {
        return Err(Error::InvalidCertificate("certificate generators are not source generators".into()));
    }
    if k_target != rho.target() {
        return Err(Error::InvalidInput("target generating set differs from the embedding's".into()));
    }
    let factor = transfer_bound(rho, k_target, phi)?;
    let reach = rho.domain_radius().min(cert.residual_radius().saturating_sub(1));
    let valid_radius = reach / rho.colipschitz();
    if valid_radius == 0 {
        return Err(Error::DomainExceeded(format!(
            "no target radius is covered: domain {}, residual {}, co-Lipschitz {}",
            rho.domain_radius(),
            cert.residual_radius(),
            rho.colipschitz()
        )));
    }
    let source_lower = certify_lower(cert, valid_radius * rho.colipschitz())?;
    Ok(TransferReport { bound: source_lower / factor, source_lower, factor, valid_radius })
}
