use rand::RngCore;

use super::{check_dim, check_tau, entropy_term, sample_exponential, BaseFunction, DOMAIN_TOL};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::numerics::{lambert_w0_exp, newton_bisect, project_simplex, Bracket, SolverConfig};

/// `f(x) = ln sum_i exp(x_i)`; its conjugate is the negative Shannon entropy
/// restricted to the probability simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    n: usize,
    cfg: SolverConfig,
}

/// A solved `prox_{tau f*}` together with its simplex multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSolve {
    pub p: Vec<f64>,
    /// Multiplier of the sum constraint in the units of `y`: every
    /// coordinate satisfies `ln p_i + p_i / tau = (y_i - multiplier) / tau - 1`.
    pub multiplier: f64,
    pub iterations: usize,
}

impl LogSumExp {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_config(n, SolverConfig::default())
    }

    pub fn with_config(n: usize, cfg: SolverConfig) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("log_sum_exp needs n >= 2".into()));
        }
        cfg.validate()?;
        Ok(LogSumExp { n, cfg })
    }

    fn coordinates(tau: f64, y: &[f64], multiplier: f64) -> impl Iterator<Item = f64> + '_ {
        let shift = 1.0 + tau.ln();
        y.iter()
            .map(move |&yi| tau * lambert_w0_exp((yi - multiplier) / tau - shift))
    }

    /// `prox_{tau f*}(y)` via a safeguarded Newton search on the sum-constraint
    /// multiplier.
    ///
    /// Each coordinate is `tau W0(e^{(y_i - m)/tau - 1} / tau)`, strictly
    /// decreasing in `m`. At `m = max y - 1 - tau` the largest coordinate is
    /// exactly 1; at `m = max y - 1/n + tau (ln n - 1)` every coordinate is at
    /// most `1/n`. The upper end is pushed out by one bracket width so the
    /// sign test survives rounding when all `y_i` coincide.
    pub fn prox_conj_with_stats(&self, tau: f64, y: &[f64]) -> Result<MultiplierSolve> {
        check_tau(tau)?;
        check_dim(self.n, y.len())?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("log_sum_exp prox needs finite input".into()));
        }
        let n = self.n as f64;
        let ymax = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ymax - 1.0 - tau;
        let tight_hi = ymax - 1.0 / n + tau * (n.ln() - 1.0);
        let width = tight_hi - lo;
        let mut hi = tight_hi + width;
        let excess = |m: f64| Ok(1.0 - Self::coordinates(tau, y, m).sum::<f64>());
        // guard against a rounded sum still above 1 at the upper end
        let mut widenings = 0;
        while excess(hi)? < 0.0 {
            widenings += 1;
            if widenings > self.cfg.max_iter {
                return Err(Error::NoSignChange { expansions: widenings });
            }
            hi += width * self.cfg.bracket_expand.powi(widenings as i32);
        }
        // d p_i / d m = -p_i / (tau + p_i)
        let excess_slope = |m: f64| {
            let (mut sum, mut slope) = (0.0, 0.0);
            for pi in Self::coordinates(tau, y, m) {
                sum += pi;
                slope += pi / (tau + pi);
            }
            Ok((1.0 - sum, slope))
        };
        let root = newton_bisect(excess_slope, Bracket::finite(lo, hi)?, &self.cfg)?;
        let mut p: Vec<f64> = Self::coordinates(tau, y, root.value).collect();
        let total: f64 = p.iter().sum();
        for v in &mut p {
            *v /= total;
        }
        Ok(MultiplierSolve {
            p,
            multiplier: root.value,
            iterations: root.iterations + widenings,
        })
    }
}

impl BaseFunction for LogSumExp {
    fn dim(&self) -> usize {
        self.n
    }

    fn eval_primal(&self, x: &[f64]) -> ExtReal {
        let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = x.iter().map(|v| (v - m).exp()).sum();
        ExtReal::Finite(m + s.ln())
    }

    fn conj_eval(&self, u: &[f64]) -> ExtReal {
        let total: f64 = u.iter().sum();
        if (total - 1.0).abs() > DOMAIN_TOL * self.n as f64 {
            return ExtReal::Infinity;
        }
        u.iter().fold(ExtReal::ZERO, |acc, &v| acc + entropy_term(v))
    }

    fn prox_conj(&self, tau: f64, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.prox_conj_with_stats(tau, u)?.p)
    }

    fn project_dom_conj(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, u.len())?;
        project_simplex(u)
    }

    fn recession(&self, x: &[f64]) -> ExtReal {
        ExtReal::Finite(x.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    fn sample_dom_conj(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.n).map(|_| sample_exponential(rng)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn examples() {
        let f = LogSumExp::new(2).unwrap();
        let v = f.conj_eval(&[0.5, 0.5]).to_f64();
        assert!((v + LN_2).abs() <= 1e-15);
        assert_eq!(f.conj_eval(&[0.6, 0.6]), ExtReal::Infinity);
        for &c in &[-30.0, 0.0, 1.7, 250.0] {
            for &tau in &[1e-3, 1.0, 40.0] {
                let p = f.prox_conj(tau, &[c, c]).unwrap();
                assert!(
                    (p[0] - 0.5).abs() <= 1e-12 && (p[1] - 0.5).abs() <= 1e-12,
                    "c={c} tau={tau} {p:?}"
                );
            }
        }
    }

    #[test]
    fn primal_is_stable_for_large_inputs() {
        let f = LogSumExp::new(2).unwrap();
        let v = f.eval_primal(&[1000.0, 1000.0]).to_f64();
        assert!((v - 1000.0 - LN_2).abs() <= 1e-12);
    }

    #[test]
    fn prox_satisfies_stationarity_with_common_multiplier() {
        let f = LogSumExp::new(4).unwrap();
        let y = [0.3, -2.0, 1.4, 0.9];
        for &tau in &[1e-4, 0.1, 1.0, 25.0] {
            let s = f.prox_conj_with_stats(tau, &y).unwrap();
            assert!((s.p.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
            for (pi, yi) in s.p.iter().zip(&y) {
                assert!(*pi >= 0.0);
                if *pi < 1e-300 {
                    // underflowed coordinate, the true value is below f64 range
                    continue;
                }
                // tau (ln p_i + 1) + p_i - y_i = -multiplier for every i
                let lhs = tau * (pi.ln() + 1.0) + pi - yi;
                assert!(
                    (lhs + s.multiplier).abs() <= 1e-9,
                    "tau={tau}: {lhs} vs {}",
                    s.multiplier
                );
            }
        }
    }

    #[test]
    fn small_tau_approaches_projection() {
        let f = LogSumExp::new(3).unwrap();
        let y = [0.8, 0.5, -1.0];
        let p = f.prox_conj(1e-10, &y).unwrap();
        let proj = f.project_dom_conj(&y).unwrap();
        for (a, b) in p.iter().zip(&proj) {
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn needs_two_coordinates() {
        assert!(LogSumExp::new(1).is_err());
    }
}
