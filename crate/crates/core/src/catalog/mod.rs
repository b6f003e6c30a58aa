//! The [`BaseFunction`] contract and the concrete functions it is implemented
//! for.
//!
//! A base function `f` is described through its Fenchel conjugate: the engine
//! only needs `f*`, `prox_{tau f*}` and the projection onto the closure of
//! `dom f*`. The primal value and the recession function are used by the
//! oracle and the residual checks.

mod capped_burg;
mod exp_sum;
mod log_sum_exp;
mod nested;
mod quadratic;

use std::fmt;

use rand::{Rng, RngCore};

pub use capped_burg::CappedBurg;
pub use exp_sum::ExpSum;
pub use log_sum_exp::{LogSumExp, MultiplierSolve};
pub use nested::NestedPerspective;
pub use quadratic::Quadratic;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::numerics::SolverConfig;

/// Slack accepted on domain boundaries (simplex sum, sign constraints, level
/// set of a nested conjugate) so that points produced by rounded arithmetic,
/// such as `(x - p) / gamma`, are not pushed to `+inf`.
pub const DOMAIN_TOL: f64 = 1e-9;

/// Default maximum number of function layers in a [`FunctionSpec`]; a nested
/// perspective of a plain function has depth 2.
pub const DEFAULT_MAX_DEPTH: usize = 2;

/// A proper lower-semicontinuous convex function on `R^n`, described through
/// its conjugate.
pub trait BaseFunction: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    /// `f(x)`.
    fn eval_primal(&self, x: &[f64]) -> ExtReal;

    /// `f*(u) = sup_x <x, u> - f(x)`.
    fn conj_eval(&self, u: &[f64]) -> ExtReal;

    /// `prox_{tau f*}(u)` for `tau > 0`.
    fn prox_conj(&self, tau: f64, u: &[f64]) -> Result<Vec<f64>>;

    /// Projection onto the closure of `dom f*`.
    fn project_dom_conj(&self, u: &[f64]) -> Result<Vec<f64>>;

    /// Recession function `rec f = sigma_{dom f*}`.
    ///
    /// The default samples `<x, P(K x)>` along the ray `K = 2^0 .. 2^30`; it
    /// is approximate and every catalog entry overrides it with a closed form.
    fn recession(&self, x: &[f64]) -> ExtReal {
        recession_by_rays(self, x).value
    }

    /// A random point of `dom f*`, used by the verification suites.
    fn sample_dom_conj(&self, rng: &mut dyn RngCore) -> Vec<f64>;
}

/// Result of [`recession_by_rays`]; `approximate` is always set, the flag
/// exists so diagnostics can report where a sampled value was used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecessionEstimate {
    pub value: ExtReal,
    pub approximate: bool,
}

/// Support function of `cl dom f*` at `x` estimated along a sampled ray.
/// Values still growing at the last sample are reported as `+inf`.
pub fn recession_by_rays<F: BaseFunction + ?Sized>(f: &F, x: &[f64]) -> RecessionEstimate {
    let support = |k: f64| -> Option<f64> {
        let scaled: Vec<f64> = x.iter().map(|v| k * v).collect();
        let proj = f.project_dom_conj(&scaled).ok()?;
        Some(dot(x, &proj))
    };
    let mut prev = f64::NEG_INFINITY;
    let mut last = f64::NEG_INFINITY;
    for e in 0..=30 {
        match support(f64::from(1u32 << e)) {
            Some(v) => {
                prev = last;
                last = last.max(v);
            }
            None => {
                return RecessionEstimate {
                    value: ExtReal::Infinity,
                    approximate: true,
                };
            }
        }
    }
    let growing = last - prev > DOMAIN_TOL * last.abs().max(1.0);
    let value = if growing {
        ExtReal::Infinity
    } else {
        ExtReal::Finite(last)
    };
    RecessionEstimate {
        value,
        approximate: true,
    }
}

/// Names a catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Quadratic { n: usize },
    CappedBurg,
    ExpSum { n: usize },
    LogSumExp { n: usize },
    NestedPerspective { inner: Box<FunctionSpec> },
}

impl FunctionSpec {
    /// Number of function layers; plain entries count as 1.
    pub fn depth(&self) -> usize {
        match self {
            FunctionSpec::NestedPerspective { inner } => 1 + inner.depth(),
            _ => 1,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FunctionSpec::Quadratic { n } | FunctionSpec::ExpSum { n } | FunctionSpec::LogSumExp { n } => *n,
            FunctionSpec::CappedBurg => 1,
            FunctionSpec::NestedPerspective { inner } => inner.dim() + 1,
        }
    }

    /// Builds the function with the default depth limit and solver settings.
    pub fn build(&self) -> Result<Box<dyn BaseFunction>> {
        self.build_with(DEFAULT_MAX_DEPTH, &SolverConfig::default())
    }

    /// `cfg` drives the inner solves of log-sum-exp and nested entries.
    pub fn build_with(&self, max_depth: usize, cfg: &SolverConfig) -> Result<Box<dyn BaseFunction>> {
        let depth = self.depth();
        if depth > max_depth {
            return Err(Error::NestingTooDeep { depth, max: max_depth });
        }
        Ok(match self {
            FunctionSpec::Quadratic { n } => Box::new(Quadratic::new(*n)?),
            FunctionSpec::CappedBurg => Box::new(CappedBurg),
            FunctionSpec::ExpSum { n } => Box::new(ExpSum::new(*n)?),
            FunctionSpec::LogSumExp { n } => Box::new(LogSumExp::with_config(*n, *cfg)?),
            FunctionSpec::NestedPerspective { inner } => {
                let inner = inner.build_with(max_depth, cfg)?;
                Box::new(NestedPerspective::with_config(inner, *cfg))
            }
        })
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Quadratic { n } => write!(f, "quadratic(n={n})"),
            FunctionSpec::CappedBurg => f.write_str("capped_burg"),
            FunctionSpec::ExpSum { n } => write!(f, "exp_sum(n={n})"),
            FunctionSpec::LogSumExp { n } => write!(f, "log_sum_exp(n={n})"),
            FunctionSpec::NestedPerspective { inner } => write!(f, "perspective({inner})"),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "prox parameter must be positive and finite, got {tau}"
        )))
    }
}

/// `xi ln xi` on `[0, inf)`, `+inf` below the tolerance band.
pub(crate) fn entropy_term(xi: f64) -> ExtReal {
    if xi > 0.0 {
        ExtReal::Finite(xi * xi.ln())
    } else if xi >= -DOMAIN_TOL {
        ExtReal::ZERO
    } else {
        ExtReal::Infinity
    }
}

/// Exponential draw with unit mean, for sampling unbounded domains.
pub(crate) fn sample_exponential(rng: &mut dyn RngCore) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_limit() {
        let q = FunctionSpec::Quadratic { n: 1 };
        let once = FunctionSpec::NestedPerspective {
            inner: Box::new(q.clone()),
        };
        let twice = FunctionSpec::NestedPerspective {
            inner: Box::new(once.clone()),
        };
        assert_eq!(once.depth(), 2);
        assert!(once.build().is_ok());
        assert_eq!(twice.build().unwrap_err(), Error::NestingTooDeep { depth: 3, max: 2 });
        assert!(twice.build_with(3, &SolverConfig::default()).is_ok());
        assert_eq!(twice.dim(), 3);
    }

    #[test]
    fn ray_sampled_recession_matches_closed_forms() {
        let cb = CappedBurg;
        assert_eq!(recession_by_rays(&cb, &[2.5]).value, ExtReal::Finite(2.5));
        assert_eq!(recession_by_rays(&cb, &[-1.0]).value, ExtReal::Finite(0.0));
        let q = Quadratic::new(2).unwrap();
        assert_eq!(recession_by_rays(&q, &[1.0, 0.0]).value, ExtReal::Infinity);
        assert_eq!(recession_by_rays(&q, &[0.0, 0.0]).value, ExtReal::Finite(0.0));
        let lse = LogSumExp::new(3).unwrap();
        let est = recession_by_rays(&lse, &[0.3, -2.0, 1.1]);
        assert!(est.approximate);
        assert!((est.value.to_f64() - 1.1).abs() < 1e-12);
        let es = ExpSum::new(2).unwrap();
        assert_eq!(recession_by_rays(&es, &[-1.0, -3.0]).value, ExtReal::Finite(0.0));
        assert_eq!(recession_by_rays(&es, &[-1.0, 0.5]).value, ExtReal::Infinity);
    }
}
