use rand::{Rng, RngCore};

use super::{check_dim, check_tau, norm_sq, BaseFunction, DOMAIN_TOL};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;

/// `f(x) = |x|^2 / 2` on `R^n`; self-conjugate with full domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadratic {
    n: usize,
}

impl Quadratic {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadratic needs n >= 1".into()));
        }
        Ok(Quadratic { n })
    }
}

impl BaseFunction for Quadratic {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval_primal(&self, x: &[f64]) -> ExtReal {
        ExtReal::Finite(0.5 * norm_sq(x))
    }

    fn conj_eval(&self, u: &[f64]) -> ExtReal {
        ExtReal::Finite(0.5 * norm_sq(u))
    }

    fn prox_conj(&self, tau: f64, u: &[f64]) -> Result<Vec<f64>> {
        check_tau(tau)?;
        check_dim(self.n, u.len())?;
        Ok(u.iter().map(|v| v / (1.0 + tau)).collect())
    }

    fn project_dom_conj(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, u.len())?;
        Ok(u.to_vec())
    }

    fn recession(&self, x: &[f64]) -> ExtReal {
        if norm_sq(x).sqrt() <= DOMAIN_TOL {
            ExtReal::ZERO
        } else {
            ExtReal::Infinity
        }
    }

    fn sample_dom_conj(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.n).map(|_| rng.random_range(-5.0..5.0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let q = Quadratic::new(2).unwrap();
        assert_eq!(q.conj_eval(&[3.0, 4.0]), ExtReal::Finite(12.5));
        assert_eq!(q.prox_conj(1.0, &[2.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        let q1 = Quadratic::new(1).unwrap();
        assert_eq!(q1.project_dom_conj(&[-7.0]).unwrap(), vec![-7.0]);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(Quadratic::new(0).is_err());
        let q = Quadratic::new(2).unwrap();
        assert!(matches!(q.prox_conj(1.0, &[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(q.prox_conj(0.0, &[1.0, 1.0]).is_err());
    }
}
