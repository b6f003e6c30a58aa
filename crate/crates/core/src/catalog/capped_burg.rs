use rand::{Rng, RngCore};

use super::{check_dim, check_tau, BaseFunction, DOMAIN_TOL};
use crate::error::Result;
use crate::ext_real::ExtReal;

/// Scalar function `f(xi) = -1 - ln(-xi)` for `xi < -1` and `xi` otherwise.
///
/// Its conjugate is the Burg entropy capped at 1: `f*(xi) = -ln xi` on
/// `]0, 1]` and `+inf` elsewhere. The conjugate domain is neither open nor
/// closed, and `f*` is `+inf` at the boundary point `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CappedBurg;

impl CappedBurg {
    /// `prox_{tau (-ln)}(y)`, the positive root of `p^2 - y p - tau`, in a
    /// form without cancellation for either sign of `y`.
    pub fn burg_prox(tau: f64, y: f64) -> f64 {
        let s = (y * y + 4.0 * tau).sqrt();
        if y >= 0.0 {
            0.5 * (y + s)
        } else {
            2.0 * tau / (s - y)
        }
    }
}

impl BaseFunction for CappedBurg {
    fn dim(&self) -> usize {
        1
    }

    fn eval_primal(&self, x: &[f64]) -> ExtReal {
        let xi = x[0];
        if xi < -1.0 {
            ExtReal::Finite(-1.0 - (-xi).ln())
        } else {
            ExtReal::Finite(xi)
        }
    }

    fn conj_eval(&self, u: &[f64]) -> ExtReal {
        let xi = u[0];
        if xi > 0.0 && xi <= 1.0 + DOMAIN_TOL {
            ExtReal::Finite(-xi.min(1.0).ln())
        } else {
            ExtReal::Infinity
        }
    }

    fn prox_conj(&self, tau: f64, u: &[f64]) -> Result<Vec<f64>> {
        check_tau(tau)?;
        check_dim(1, u.len())?;
        Ok(vec![CappedBurg::burg_prox(tau, u[0]).min(1.0)])
    }

    fn project_dom_conj(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_dim(1, u.len())?;
        Ok(vec![u[0].clamp(0.0, 1.0)])
    }

    fn recession(&self, x: &[f64]) -> ExtReal {
        ExtReal::Finite(x[0].max(0.0))
    }

    fn sample_dom_conj(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        // ]0, 1]
        vec![1.0 - rng.random::<f64>()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = CappedBurg;
        assert_eq!(f.conj_eval(&[1.0]), ExtReal::Finite(0.0));
        assert_eq!(f.conj_eval(&[0.0]), ExtReal::Infinity);
        assert_eq!(f.conj_eval(&[1.5]), ExtReal::Infinity);
        assert_eq!(f.prox_conj(1.0, &[0.0]).unwrap(), vec![1.0]);
        assert_eq!(f.project_dom_conj(&[-3.0]).unwrap(), vec![0.0]);
        assert_eq!(f.project_dom_conj(&[0.25]).unwrap(), vec![0.25]);
        assert_eq!(f.project_dom_conj(&[4.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn primal_is_continuous_at_the_kink() {
        let f = CappedBurg;
        let left = f.eval_primal(&[-1.0 - 1e-12]).to_f64();
        assert!((left + 1.0).abs() < 1e-11);
        assert_eq!(f.eval_primal(&[-1.0]), ExtReal::Finite(-1.0));
    }

    #[test]
    fn burg_prox_solves_its_quadratic() {
        for &(tau, y) in &[(1e-8, -20.0), (0.3, -2.0), (2.0, 0.0), (0.5, 7.0)] {
            let p = CappedBurg::burg_prox(tau, y);
            assert!(p > 0.0);
            assert!((p * p - y * p - tau).abs() <= 1e-14 * (p * p + tau).max(1e-300));
        }
    }
}
