//! Fast path for radial base functions `f = phi(|x|)` with `phi` even.
//!
//! Then `f* = phi*(|.|)` and the projection onto `cl dom f*` acts on the
//! norm only, so the vector problem reduces to the scalar one on `|x|`.

use std::fmt;

use crate::catalog::norm_sq;
use crate::engine::{ProxCase, ProxResult, MU_FLOOR};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::numerics::{bisect_monotone, Bracket, SolverConfig};

/// The scalar profile `phi` of a radial function. Callers only pass
/// nonnegative arguments; `phi*` is even.
pub trait RadialProfile: fmt::Debug + Send + Sync {
    /// `phi(xi)`, used for the residual diagnostics.
    fn phi_eval(&self, xi: f64) -> ExtReal;
    fn phi_conj_eval(&self, xi: f64) -> ExtReal;
    fn phi_prox_conj(&self, tau: f64, xi: f64) -> f64;
    fn phi_project_dom_conj(&self, xi: f64) -> f64;
}

/// `phi(xi) = xi^2 / 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuadraticProfile;

impl RadialProfile for QuadraticProfile {
    fn phi_eval(&self, xi: f64) -> ExtReal {
        ExtReal::Finite(0.5 * xi * xi)
    }

    fn phi_conj_eval(&self, xi: f64) -> ExtReal {
        ExtReal::Finite(0.5 * xi * xi)
    }

    fn phi_prox_conj(&self, tau: f64, xi: f64) -> f64 {
        xi / (1.0 + tau)
    }

    fn phi_project_dom_conj(&self, xi: f64) -> f64 {
        xi
    }
}

pub fn prox_perspective_radial(
    profile: &dyn RadialProfile,
    gamma: f64,
    x: &[f64],
    eta: f64,
    cfg: &SolverConfig,
) -> Result<ProxResult> {
    cfg.validate()?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let norm = norm_sq(x).sqrt();
    let s = norm / gamma;
    let proj = profile.phi_project_dom_conj(s);
    let t = eta + profile.phi_conj_eval(proj).scale(gamma);
    // (1 - gamma r / |x|) x, never evaluated at x = 0
    let shrink = |r: f64| -> Vec<f64> {
        if norm == 0.0 {
            vec![0.0; x.len()]
        } else {
            let factor = 1.0 - gamma * r / norm;
            x.iter().map(|v| factor * v).collect()
        }
    };
    let finish = |p: Vec<f64>, mu: f64, case: ProxCase, bracket: Option<Bracket>, iterations: usize| {
        let (equality, feasibility) = residuals(profile, gamma, x, eta, &p, mu);
        ProxResult {
            p,
            mu,
            case,
            threshold: t,
            bracket,
            iterations,
            feasibility_residual: feasibility,
            equality_residual: if case == ProxCase::Interior { equality } else { 0.0 },
        }
    };

    if t <= ExtReal::ZERO {
        return Ok(finish(shrink(proj), 0.0, ProxCase::Boundary, None, 0));
    }
    if norm == 0.0 {
        // t = eta + gamma phi*(0) is the scale component itself
        let mu = t
            .finite()
            .ok_or_else(|| Error::Domain("phi*(0) must be finite".into()))?;
        return Ok(finish(shrink(0.0), mu, ProxCase::Interior, None, 0));
    }

    let g = |mu: f64| -> Result<f64> {
        let r = profile.phi_prox_conj(mu / gamma, s);
        Ok(match profile.phi_conj_eval(r) {
            ExtReal::Finite(v) => mu - eta - gamma * v,
            ExtReal::Infinity => f64::NEG_INFINITY,
        })
    };
    let (bracket, mut evals) = match t {
        ExtReal::Finite(tv) if tv <= MU_FLOOR => {
            let r = profile.phi_prox_conj(tv / gamma, s);
            return Ok(finish(shrink(r), tv, ProxCase::Interior, None, 0));
        }
        ExtReal::Finite(tv) => (Bracket::finite(MU_FLOOR, tv)?, 0),
        ExtReal::Infinity => {
            let start = eta.max(1.0);
            if g(start)? >= 0.0 {
                (Bracket::finite(MU_FLOOR, start)?, 1)
            } else {
                (Bracket::upper_unbounded(start)?, 1)
            }
        }
    };
    let root = bisect_monotone(g, bracket, cfg)?;
    evals += root.iterations;
    let r = profile.phi_prox_conj(root.value / gamma, s);
    Ok(finish(
        shrink(r),
        root.value,
        ProxCase::Interior,
        Some(root.bracket),
        evals,
    ))
}

fn residuals(profile: &dyn RadialProfile, gamma: f64, x: &[f64], eta: f64, p: &[f64], mu: f64) -> (f64, f64) {
    let dual: Vec<f64> = x.iter().zip(p).map(|(a, b)| (a - b) / gamma).collect();
    let feasibility = match profile.phi_conj_eval(norm_sq(&dual).sqrt()) + (eta - mu) / gamma {
        ExtReal::Finite(v) => v.max(0.0),
        ExtReal::Infinity => f64::INFINITY,
    };
    if mu <= 0.0 {
        return (0.0, feasibility);
    }
    let inner: f64 = p.iter().zip(&dual).map(|(a, b)| a * b).sum();
    let equality = match profile.phi_eval(norm_sq(p).sqrt() / mu).scale(mu) {
        ExtReal::Finite(v) => (v - inner - mu * (eta - mu) / gamma).abs(),
        ExtReal::Infinity => f64::INFINITY,
    };
    (equality, feasibility)
}
