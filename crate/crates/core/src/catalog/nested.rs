use rand::RngCore;

use super::{check_dim, check_tau, sample_exponential, BaseFunction, DOMAIN_TOL};
use crate::engine::{prox_perspective, ProxQuery};
use crate::error::Result;
use crate::ext_real::ExtReal;
use crate::numerics::SolverConfig;

/// The perspective `g~` of an inner function `g`, itself used as a base
/// function on `R^{n+1}` (last coordinate is the scale).
///
/// `g~` is positively homogeneous, so its conjugate is the indicator of
/// `C = {(u, s) : s + g*(u) <= 0}` and `prox_{tau f*} = P_C` for every `tau`.
/// `P_C` comes from the Moreau decomposition `P_C = Id - prox_{g~}`, which
/// re-enters the engine with the inner function.
#[derive(Debug)]
pub struct NestedPerspective {
    inner: Box<dyn BaseFunction>,
    cfg: SolverConfig,
}

impl NestedPerspective {
    pub fn new(inner: Box<dyn BaseFunction>) -> Self {
        Self::with_config(inner, SolverConfig::default())
    }

    pub fn with_config(inner: Box<dyn BaseFunction>, cfg: SolverConfig) -> Self {
        NestedPerspective { inner, cfg }
    }

    pub fn inner(&self) -> &dyn BaseFunction {
        self.inner.as_ref()
    }

    pub fn solver_config(&self) -> &SolverConfig {
        &self.cfg
    }

    fn split<'a>(&self, z: &'a [f64]) -> (&'a [f64], f64) {
        let n = self.inner.dim();
        (&z[..n], z[n])
    }
}

impl BaseFunction for NestedPerspective {
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }

    /// `g~(x, eta)`; scales within `DOMAIN_TOL` below zero count as zero.
    fn eval_primal(&self, z: &[f64]) -> ExtReal {
        let (x, eta) = self.split(z);
        if eta > 0.0 {
            let scaled: Vec<f64> = x.iter().map(|v| v / eta).collect();
            self.inner.eval_primal(&scaled).scale(eta)
        } else if eta >= -DOMAIN_TOL {
            self.inner.recession(x)
        } else {
            ExtReal::Infinity
        }
    }

    fn conj_eval(&self, w: &[f64]) -> ExtReal {
        let (u, s) = self.split(w);
        match s + self.inner.conj_eval(u) {
            ExtReal::Finite(v) if v <= DOMAIN_TOL * s.abs().max(1.0) => ExtReal::ZERO,
            _ => ExtReal::Infinity,
        }
    }

    fn prox_conj(&self, tau: f64, w: &[f64]) -> Result<Vec<f64>> {
        check_tau(tau)?;
        self.project_dom_conj(w)
    }

    fn project_dom_conj(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), w.len())?;
        let (x, eta) = self.split(w);
        let query = ProxQuery::new(self.inner.as_ref(), 1.0, x, eta)?;
        let r = prox_perspective(&query, &self.cfg)?;
        let mut out: Vec<f64> = x.iter().zip(&r.p).map(|(a, b)| a - b).collect();
        out.push(eta - r.mu);
        Ok(out)
    }

    /// Positively homogeneous, hence its own recession function.
    fn recession(&self, z: &[f64]) -> ExtReal {
        self.eval_primal(z)
    }

    fn sample_dom_conj(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut u = self.inner.sample_dom_conj(rng);
        let level = self.inner.conj_eval(&u).to_f64();
        u.push(-level - sample_exponential(rng));
        u
    }
}
