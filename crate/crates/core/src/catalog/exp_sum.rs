use rand::RngCore;

use super::{check_dim, check_tau, entropy_term, sample_exponential, BaseFunction, DOMAIN_TOL};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::numerics::lambert_w0_exp;

/// `f(x) = sum_i exp(x_i - 1)`; its conjugate is the separable entropy
/// `sum_i u_i ln u_i` on the nonnegative orthant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpSum {
    n: usize,
}

impl ExpSum {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("exp_sum needs n >= 1".into()));
        }
        Ok(ExpSum { n })
    }

    /// Entrywise `prox_{tau xi ln xi}(y) = tau W0(e^{y/tau - 1} / tau)`.
    pub(crate) fn entropy_prox(tau: f64, y: f64) -> f64 {
        tau * lambert_w0_exp(y / tau - 1.0 - tau.ln())
    }
}

impl BaseFunction for ExpSum {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval_primal(&self, x: &[f64]) -> ExtReal {
        ExtReal::from_f64(x.iter().map(|v| (v - 1.0).exp()).sum()).unwrap_or(ExtReal::Infinity)
    }

    fn conj_eval(&self, u: &[f64]) -> ExtReal {
        u.iter().fold(ExtReal::ZERO, |acc, &v| acc + entropy_term(v))
    }

    fn prox_conj(&self, tau: f64, u: &[f64]) -> Result<Vec<f64>> {
        check_tau(tau)?;
        check_dim(self.n, u.len())?;
        Ok(u.iter().map(|&y| ExpSum::entropy_prox(tau, y)).collect())
    }

    fn project_dom_conj(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, u.len())?;
        Ok(u.iter().map(|v| v.max(0.0)).collect())
    }

    fn recession(&self, x: &[f64]) -> ExtReal {
        if x.iter().all(|&v| v <= DOMAIN_TOL) {
            ExtReal::ZERO
        } else {
            ExtReal::Infinity
        }
    }

    fn sample_dom_conj(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.n).map(|_| 2.0 * sample_exponential(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = ExpSum::new(2).unwrap();
        assert_eq!(f.conj_eval(&[1.0, 0.0]), ExtReal::Finite(0.0));
        assert_eq!(f.conj_eval(&[1.0, -0.5]), ExtReal::Infinity);
        assert_eq!(f.project_dom_conj(&[-2.0, 3.0]).unwrap(), vec![0.0, 3.0]);
        let f1 = ExpSum::new(1).unwrap();
        let p = f1.prox_conj(1.0, &[2.0]).unwrap();
        assert!((p[0] - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn prox_satisfies_first_order_condition() {
        // tau (ln p + 1) + p - y = 0
        for &(tau, y) in &[(0.1, 3.0), (1.0, -1.0), (10.0, 0.5), (1e-6, 2.0), (3.0, -40.0)] {
            let p = ExpSum::entropy_prox(tau, y);
            assert!(p > 0.0);
            let r = tau * (p.ln() + 1.0) + p - y;
            assert!(r.abs() <= 1e-12 * y.abs().max(1.0), "tau={tau} y={y} r={r}");
        }
    }
}
