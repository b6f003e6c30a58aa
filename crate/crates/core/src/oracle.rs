//! Brute-force reference for `prox_{gamma f~}` and residual certificates.
//!
//! The oracle never touches the scalar equation solved by the engine. It
//! minimizes the prox objective
//! `F(y, nu) = gamma f~(y, nu) + |y - x|^2 / 2 + (nu - eta)^2 / 2`
//! over the scale `nu` on a grid, with the inner minimization over `y` done
//! exactly: for fixed `nu > 0` the minimizer is
//! `y(nu) = nu prox_{(gamma/nu) f}(x / nu) = x - gamma prox_{(nu/gamma) f*}(x / gamma)`
//! (Moreau decomposition), and `y(0) = x - gamma P_{cl dom f*}(x / gamma)`.
//! The reduced objective `nu -> F(y(nu), nu)` is 1-strongly convex; it is
//! scanned on a coarse grid, then a fine grid, then refined by golden section.

use rayon::prelude::*;

use crate::catalog::{dot, BaseFunction};
use crate::engine::{threshold, ProxQuery};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;

/// Search settings for [`brute_prox`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Upper end of the scale search; `None` picks `max(t, 0) + 5` for a
    /// finite threshold `t` and `10 max(1, |eta|)` otherwise. The range is
    /// doubled while the minimizer sits on its upper end.
    pub nu_max: Option<f64>,
    /// Step of the fine grid.
    pub nu_step: f64,
    /// Golden-section iterations after the fine grid.
    pub refine_iters: usize,
    /// Number of intervals of the coarse grid over `[0, nu_max]`.
    pub coarse_intervals: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            nu_max: None,
            nu_step: 1e-4,
            refine_iters: 60,
            coarse_intervals: 2000,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu_step > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "nu_step must be positive, got {}",
                self.nu_step
            )));
        }
        if let Some(m) = self.nu_max {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::InvalidArgument(format!("nu_max must be positive, got {m}")));
            }
        }
        if self.coarse_intervals == 0 {
            return Err(Error::InvalidArgument("coarse_intervals must be at least 1".into()));
        }
        Ok(())
    }
}

/// Output of [`brute_prox`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub p: Vec<f64>,
    pub mu: f64,
    /// Prox objective at `(p, mu)`.
    pub objective: f64,
    /// Smallest objective seen on any grid point.
    pub grid_min: f64,
    /// Number of objective evaluations.
    pub evaluations: usize,
}

/// `f~(x, eta)`: `eta f(x / eta)` for `eta > 0`, `rec f(x)` at `eta = 0`,
/// `+inf` for `eta < 0`.
pub fn perspective_eval(f: &dyn BaseFunction, x: &[f64], eta: f64) -> ExtReal {
    if eta > 0.0 {
        let scaled: Vec<f64> = x.iter().map(|v| v / eta).collect();
        f.eval_primal(&scaled).scale(eta)
    } else if eta == 0.0 {
        f.recession(x)
    } else {
        ExtReal::Infinity
    }
}

/// `gamma f~(p, mu) + |p - x|^2 / 2 + (mu - eta)^2 / 2`, `+inf` off the domain.
pub fn prox_objective(f: &dyn BaseFunction, gamma: f64, x: &[f64], eta: f64, p: &[f64], mu: f64) -> f64 {
    let dist: f64 = x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
    let value = perspective_eval(f, p, mu).scale(gamma) + 0.5 * dist + 0.5 * (mu - eta) * (mu - eta);
    value.to_f64()
}

/// Residuals of the characterization of `(p, mu) = prox_{gamma f~}(x, eta)`:
///
/// * equality: `|f~(p, mu) - <p, (x - p)/gamma> - mu (eta - mu)/gamma|`
/// * feasibility: `max(0, (eta - mu)/gamma + f*((x - p)/gamma))`
///
/// Both vanish exactly at the prox. Returned as `(equality, feasibility)`.
pub fn fenchel_young_residual(f: &dyn BaseFunction, gamma: f64, x: &[f64], eta: f64, p: &[f64], mu: f64) -> (f64, f64) {
    let dual: Vec<f64> = x.iter().zip(p).map(|(a, b)| (a - b) / gamma).collect();
    let feasibility = match f.conj_eval(&dual) + (eta - mu) / gamma {
        ExtReal::Finite(v) => v.max(0.0),
        ExtReal::Infinity => f64::INFINITY,
    };
    let equality = match perspective_eval(f, p, mu) {
        ExtReal::Finite(v) => (v - dot(p, &dual) - mu * (eta - mu) / gamma).abs(),
        ExtReal::Infinity => f64::INFINITY,
    };
    (equality, feasibility)
}

struct Reduced<'a> {
    f: &'a dyn BaseFunction,
    gamma: f64,
    x: &'a [f64],
    eta: f64,
    scaled: Vec<f64>,
}

impl Reduced<'_> {
    fn minimizer(&self, nu: f64) -> Result<Vec<f64>> {
        let u = if nu > 0.0 {
            self.f.prox_conj(nu / self.gamma, &self.scaled)?
        } else {
            self.f.project_dom_conj(&self.scaled)?
        };
        Ok(self.x.iter().zip(&u).map(|(xi, ui)| xi - self.gamma * ui).collect())
    }

    fn value(&self, nu: f64) -> Result<f64> {
        let y = self.minimizer(nu)?;
        Ok(prox_objective(self.f, self.gamma, self.x, self.eta, &y, nu))
    }

    /// Evaluates `lo + k h` for `k = 0..=count` and returns the best
    /// `(index, value)`, ties going to the smaller index.
    fn scan(&self, lo: f64, h: f64, count: usize) -> Result<(usize, f64)> {
        let values: Vec<f64> = (0..=count)
            .into_par_iter()
            .map(|k| self.value(lo + k as f64 * h))
            .collect::<Result<_>>()?;
        let mut best = (0, values[0]);
        for (k, &v) in values.iter().enumerate() {
            if v < best.1 {
                best = (k, v);
            }
        }
        Ok(best)
    }
}

/// Reference prox of the perspective by direct minimization over the scale.
pub fn brute_prox(f: &dyn BaseFunction, gamma: f64, x: &[f64], eta: f64, cfg: &OracleConfig) -> Result<OracleResult> {
    cfg.validate()?;
    let query = ProxQuery::new(f, gamma, x, eta)?;
    let red = Reduced {
        f,
        gamma,
        x,
        eta,
        scaled: x.iter().map(|v| v / gamma).collect(),
    };
    let mut nu_max = match cfg.nu_max {
        Some(m) => m,
        None => match threshold(&query)? {
            ExtReal::Finite(t) => t.max(0.0) + 5.0,
            ExtReal::Infinity => 10.0 * eta.abs().max(1.0),
        },
    };
    let mut evaluations = 0;

    let coarse_n = cfg.coarse_intervals;
    let (mut coarse_h, mut best) = (0.0, (0, f64::INFINITY));
    for _ in 0..40 {
        coarse_h = nu_max / coarse_n as f64;
        best = red.scan(0.0, coarse_h, coarse_n)?;
        evaluations += coarse_n + 1;
        if best.0 < coarse_n {
            break;
        }
        nu_max *= 2.0;
    }
    if !best.1.is_finite() {
        return Err(Error::Domain("prox objective is +inf on the whole scale grid".into()));
    }
    let coarse_best = best.0 as f64 * coarse_h;

    // fine grid over the two coarse cells around the coarse minimizer
    let (center, h, grid_min) = if coarse_h > cfg.nu_step {
        let lo = (coarse_best - coarse_h).max(0.0);
        let hi = coarse_best + coarse_h;
        let count = ((hi - lo) / cfg.nu_step).ceil() as usize;
        let h = (hi - lo) / count as f64;
        let (k, v) = red.scan(lo, h, count)?;
        evaluations += count + 1;
        (lo + k as f64 * h, h, v.min(best.1))
    } else {
        (coarse_best, coarse_h, best.1)
    };

    // golden section on [center - h, center + h]
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((center - h).max(0.0), center + h);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (red.value(c)?, red.value(d)?);
    evaluations += 2;
    for _ in 0..cfg.refine_iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = red.value(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = red.value(d)?;
        }
        evaluations += 1;
    }
    let mut candidates = [(center, grid_min), (c, fc), (d, fd), (a, red.value(a)?)];
    evaluations += 1;
    candidates.sort_by(|l, r| l.1.total_cmp(&r.1).then(l.0.total_cmp(&r.0)));
    let (mu, objective) = candidates[0];
    Ok(OracleResult {
        p: red.minimizer(mu)?,
        mu,
        objective,
        grid_min,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{CappedBurg, Quadratic};
    use crate::engine::prox_perspective;
    use crate::numerics::SolverConfig;

    #[test]
    fn perspective_examples() {
        let q = Quadratic::new(1).unwrap();
        assert_eq!(perspective_eval(&q, &[2.0], 1.0), ExtReal::Finite(2.0));
        assert_eq!(perspective_eval(&q, &[1.0], 0.0), ExtReal::Infinity);
        assert_eq!(perspective_eval(&q, &[1.0], -1.0), ExtReal::Infinity);
        assert_eq!(perspective_eval(&CappedBurg, &[1.0], 0.0), ExtReal::Finite(1.0));
        // -eta - eta ln(-xi/eta) for xi < -eta, equal to xi at xi = -eta
        let v = perspective_eval(&CappedBurg, &[-3.0], 1.5).to_f64();
        assert!((v - (-1.5 - 1.5 * 2f64.ln())).abs() <= 1e-15);
        assert_eq!(perspective_eval(&CappedBurg, &[-1.5], 1.5), ExtReal::Finite(-1.5));
    }

    #[test]
    fn brute_force_examples() {
        let q = Quadratic::new(1).unwrap();
        let cfg = OracleConfig::default();
        let r = brute_prox(&q, 1.0, &[0.0], -1.0, &cfg).unwrap();
        assert!(r.p[0].abs() <= 1e-9 && r.mu.abs() <= 1e-9, "{r:?}");
        let r = brute_prox(&q, 1.0, &[2.0], 0.0, &cfg).unwrap();
        assert!(
            (r.mu - 0.69562).abs() < 1e-4 && (r.p[0] - 0.82057).abs() < 1e-4,
            "{r:?}"
        );
        let r = brute_prox(&CappedBurg, 1.0, &[3.0], 1.0, &cfg).unwrap();
        assert!((r.mu - 1.0).abs() < 1e-6 && (r.p[0] - 2.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn residual_examples() {
        let q = Quadratic::new(1).unwrap();
        let e = prox_perspective(&ProxQuery::new(&q, 1.0, &[2.0], 0.0).unwrap(), &SolverConfig::default()).unwrap();
        let (eq, feas) = fenchel_young_residual(&q, 1.0, &[2.0], 0.0, &e.p, e.mu);
        assert!(eq <= 1e-9 && feas <= 1e-9);
        let (eq, _) = fenchel_young_residual(&q, 1.0, &[2.0], 0.0, &[e.p[0] + 0.1], e.mu);
        assert!(eq > 1e-3, "{eq}");
        let (eq, feas) = fenchel_young_residual(&CappedBurg, 1.0, &[3.0], 1.0, &[2.0], 1.0);
        assert_eq!((eq, feas), (0.0, 0.0));
    }

    #[test]
    fn objective_at_engine_output_is_minimal() {
        let q = Quadratic::new(2).unwrap();
        let x = [1.5, -2.0];
        let e = prox_perspective(&ProxQuery::new(&q, 0.5, &x, 0.3).unwrap(), &SolverConfig::default()).unwrap();
        let o = brute_prox(&q, 0.5, &x, 0.3, &OracleConfig::default()).unwrap();
        let fe = prox_objective(&q, 0.5, &x, 0.3, &e.p, e.mu);
        assert!(fe <= o.grid_min + 1e-9);
        assert!(fe <= o.objective + 1e-12);
    }
}
