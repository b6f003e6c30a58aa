//! Proximity operator of the perspective `f~(x, eta) = eta f(x / eta)`.
//!
//! With `P` the projection onto `cl dom f*` and
//! `t = eta + gamma f*(P(x / gamma))`:
//!
//! * `t <= 0`: `prox_{gamma f~}(x, eta) = (x - gamma P(x / gamma), 0)`;
//! * `t > 0`: `prox_{gamma f~}(x, eta) = (x - gamma prox_{(mu/gamma) f*}(x / gamma), mu)`
//!   where `mu` is the unique root in `]0, t]` of
//!   `g(mu) = mu - eta - gamma f*(prox_{(mu/gamma) f*}(x / gamma))`.
//!
//! `g` is nondecreasing, `g(0+) < 0` and `g(t) >= 0`, so the root is found by
//! bisection.

use crate::catalog::{BaseFunction, CappedBurg, NestedPerspective};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::numerics::{bisect_monotone, newton_bisect, Bracket, SolverConfig};
use crate::oracle::fenchel_young_residual;

/// Lower end of every `mu` bracket, standing in for the open end `0+`.
pub const MU_FLOOR: f64 = 1e-300;

/// Arguments of one prox evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ProxQuery<'a> {
    pub f: &'a dyn BaseFunction,
    pub gamma: f64,
    pub x: &'a [f64],
    pub eta: f64,
}

impl<'a> ProxQuery<'a> {
    pub fn new(f: &'a dyn BaseFunction, gamma: f64, x: &'a [f64], eta: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        if x.len() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                got: x.len(),
            });
        }
        if !eta.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("query coordinates must be finite".into()));
        }
        Ok(ProxQuery { f, gamma, x, eta })
    }

    fn scaled(&self) -> Vec<f64> {
        self.x.iter().map(|v| v / self.gamma).collect()
    }

    /// `x - gamma * u`.
    fn primal_from_dual(&self, u: &[f64]) -> Vec<f64> {
        self.x.iter().zip(u).map(|(xi, ui)| xi - self.gamma * ui).collect()
    }
}

/// Which branch of the two-case formula produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxCase {
    /// `t <= 0`, scale component `mu = 0`.
    Boundary,
    /// `t > 0`, `mu` solves the scalar equation.
    Interior,
}

impl ProxCase {
    pub fn as_str(self) -> &'static str {
        match self {
            ProxCase::Boundary => "boundary",
            ProxCase::Interior => "interior",
        }
    }
}

/// `(p, mu) = prox_{gamma f~}(x, eta)` with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxResult {
    pub p: Vec<f64>,
    pub mu: f64,
    pub case: ProxCase,
    pub threshold: ExtReal,
    /// Finite bracket the `mu` search ran on; `None` on the boundary case.
    pub bracket: Option<Bracket>,
    pub iterations: usize,
    /// `max(0, (eta - mu)/gamma + f*((x - p)/gamma))`.
    pub feasibility_residual: f64,
    /// `|f~(p, mu) - <p, (x - p)/gamma> - mu (eta - mu)/gamma|`, interior case
    /// only; `0` on the boundary case.
    pub equality_residual: f64,
}

impl ProxResult {
    fn finish(
        q: &ProxQuery<'_>,
        p: Vec<f64>,
        mu: f64,
        case: ProxCase,
        threshold: ExtReal,
        bracket: Option<Bracket>,
        iterations: usize,
    ) -> ProxResult {
        let (equality, feasibility) = fenchel_young_residual(q.f, q.gamma, q.x, q.eta, &p, mu);
        ProxResult {
            p,
            mu,
            case,
            threshold,
            bracket,
            iterations,
            feasibility_residual: feasibility,
            equality_residual: if case == ProxCase::Interior { equality } else { 0.0 },
        }
    }
}

/// `t = eta + gamma f*(P_{cl dom f*}(x / gamma))`.
pub fn threshold(q: &ProxQuery<'_>) -> Result<ExtReal> {
    let proj = q.f.project_dom_conj(&q.scaled())?;
    Ok(q.eta + q.f.conj_eval(&proj).scale(q.gamma))
}

/// `prox_{gamma f~}(x, eta)` for an arbitrary base function.
pub fn prox_perspective(q: &ProxQuery<'_>, cfg: &SolverConfig) -> Result<ProxResult> {
    cfg.validate()?;
    let scaled = q.scaled();
    let proj = q.f.project_dom_conj(&scaled)?;
    let t = q.eta + q.f.conj_eval(&proj).scale(q.gamma);

    if t <= ExtReal::ZERO {
        let p = q.primal_from_dual(&proj);
        return Ok(ProxResult::finish(q, p, 0.0, ProxCase::Boundary, t, None, 0));
    }

    let g = |mu: f64| -> Result<f64> {
        let u = q.f.prox_conj(mu / q.gamma, &scaled)?;
        Ok(match q.f.conj_eval(&u) {
            ExtReal::Finite(v) => mu - q.eta - q.gamma * v,
            // only reachable through rounding; pushes the search upward
            ExtReal::Infinity => f64::NEG_INFINITY,
        })
    };

    let (bracket, mut evals) = match t {
        ExtReal::Finite(tv) if tv <= MU_FLOOR => {
            let u = q.f.prox_conj(tv / q.gamma, &scaled)?;
            let p = q.primal_from_dual(&u);
            return Ok(ProxResult::finish(q, p, tv, ProxCase::Interior, t, None, 0));
        }
        ExtReal::Finite(tv) => (Bracket::finite(MU_FLOOR, tv)?, 0),
        ExtReal::Infinity => {
            let start = q.eta.max(1.0);
            if g(start)? >= 0.0 {
                (Bracket::finite(MU_FLOOR, start)?, 1)
            } else {
                (Bracket::upper_unbounded(start)?, 1)
            }
        }
    };
    let root = bisect_monotone(g, bracket, cfg)?;
    evals += root.iterations;
    let mu = root.value;
    let u = q.f.prox_conj(mu / q.gamma, &scaled)?;
    let p = q.primal_from_dual(&u);
    Ok(ProxResult::finish(
        q,
        p,
        mu,
        ProxCase::Interior,
        t,
        Some(root.bracket),
        evals,
    ))
}

/// Three-branch closed form for the capped Burg base function, with `mu`
/// obtained from a safeguarded Newton iteration on
/// `mu = eta - gamma ln((xi + sqrt(xi^2 + 4 mu gamma)) / (2 gamma))`.
pub fn capped_burg_closed_form(gamma: f64, xi: f64, eta: f64, cfg: &SolverConfig) -> Result<ProxResult> {
    cfg.validate()?;
    let x = [xi];
    let q = ProxQuery::new(&CappedBurg, gamma, &x, eta)?;
    let clamped = (xi / gamma).clamp(0.0, 1.0);
    let threshold = if clamped > 0.0 {
        ExtReal::Finite(eta - gamma * clamped.ln())
    } else {
        ExtReal::Infinity
    };

    if eta <= 0.0 && xi >= gamma * (eta / gamma).exp() {
        let p = vec![(xi - gamma).max(0.0)];
        return Ok(ProxResult::finish(&q, p, 0.0, ProxCase::Boundary, threshold, None, 0));
    }
    if eta > 0.0 && xi >= gamma - eta {
        let p = vec![xi - gamma];
        return Ok(ProxResult::finish(&q, p, eta, ProxCase::Interior, threshold, None, 0));
    }

    // xi < min(gamma e^{eta/gamma}, gamma - eta); here xi < gamma.
    let dual = |mu: f64| -> (f64, f64) {
        let r = (xi * xi + 4.0 * mu * gamma).sqrt();
        let s = if xi >= 0.0 {
            (xi + r) / (2.0 * gamma)
        } else {
            2.0 * mu / (r - xi)
        };
        (s, r)
    };
    let h = |mu: f64| -> Result<(f64, f64)> {
        let (s, r) = dual(mu);
        Ok((mu - eta + gamma * s.ln(), 1.0 + gamma / (r * s)))
    };
    let bracket = match threshold {
        ExtReal::Finite(tv) => Bracket::finite(MU_FLOOR, tv)?,
        ExtReal::Infinity => Bracket::upper_unbounded(MU_FLOOR)?,
    };
    let root = newton_bisect(h, bracket, cfg)?;
    let mu = root.value;
    let r = (xi * xi + 4.0 * mu * gamma).sqrt();
    let p = if xi <= 0.0 {
        0.5 * (xi - r)
    } else {
        -2.0 * mu * gamma / (xi + r)
    };
    Ok(ProxResult::finish(
        &q,
        vec![p],
        mu,
        ProxCase::Interior,
        threshold,
        Some(root.bracket),
        root.iterations,
    ))
}

/// `prox_{gamma f~}((x, eta), delta)` for `f = g~` the perspective of the
/// inner function of `nested`.
///
/// The conjugate of `g~` is an indicator, so the scale component is
/// `max(0, delta)` and the leading block is `prox_{gamma g~}(x, eta)`.
/// `x` has the inner dimension; the returned `p` has one more coordinate.
pub fn nested_perspective_prox(
    nested: &NestedPerspective,
    gamma: f64,
    x: &[f64],
    eta: f64,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<ProxResult> {
    let inner_query = ProxQuery::new(nested.inner(), gamma, x, eta)?;
    let inner = prox_perspective(&inner_query, cfg)?;
    let mut z = x.to_vec();
    z.push(eta);
    let q = ProxQuery::new(nested, gamma, &z, delta)?;
    let mut p = inner.p;
    p.push(inner.mu);
    let mu = delta.max(0.0);
    let case = if delta > 0.0 {
        ProxCase::Interior
    } else {
        ProxCase::Boundary
    };
    Ok(ProxResult::finish(
        &q,
        p,
        mu,
        case,
        ExtReal::Finite(delta),
        None,
        inner.iterations,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ExpSum, FunctionSpec, LogSumExp, Quadratic};

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    /// Root of mu (1 + mu)^2 = 2 by bisection on the cubic itself.
    fn cubic_root() -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 2.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * (1.0 + mid) * (1.0 + mid) - 2.0 < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn threshold_examples() {
        let q1 = Quadratic::new(1).unwrap();
        let t = threshold(&ProxQuery::new(&q1, 1.0, &[0.0], -1.0).unwrap()).unwrap();
        assert_eq!(t, ExtReal::Finite(-1.0));
        let t = threshold(&ProxQuery::new(&CappedBurg, 1.0, &[-1.0], 0.0).unwrap()).unwrap();
        assert_eq!(t, ExtReal::Infinity);
        let t = threshold(&ProxQuery::new(&q1, 1.0, &[2.0], 0.0).unwrap()).unwrap();
        assert_eq!(t, ExtReal::Finite(2.0));
    }

    #[test]
    fn quadratic_branches() {
        let q1 = Quadratic::new(1).unwrap();
        let r = prox_perspective(&ProxQuery::new(&q1, 1.0, &[0.0], -1.0).unwrap(), &cfg()).unwrap();
        assert_eq!((r.p.clone(), r.mu, r.case), (vec![0.0], 0.0, ProxCase::Boundary));
        let r = prox_perspective(&ProxQuery::new(&q1, 1.0, &[0.0], 1.0).unwrap(), &cfg()).unwrap();
        assert_eq!((r.p.clone(), r.mu, r.case), (vec![0.0], 1.0, ProxCase::Interior));
    }

    #[test]
    fn quadratic_interior_solves_cubic() {
        let mu_ref = cubic_root();
        assert!((mu_ref - 0.69562).abs() < 1e-5);
        let q1 = Quadratic::new(1).unwrap();
        let r = prox_perspective(&ProxQuery::new(&q1, 1.0, &[2.0], 0.0).unwrap(), &cfg()).unwrap();
        assert!((r.mu - mu_ref).abs() <= 1e-12);
        // p = mu / (gamma + mu) x
        assert!((r.p[0] - 2.0 * mu_ref / (1.0 + mu_ref)).abs() <= 1e-12);
        assert!((r.p[0] - 0.820_490_975_397_083).abs() < 1e-12);
        assert!(r.feasibility_residual <= 1e-12 && r.equality_residual <= 1e-12);
        let Some(b) = r.bracket else {
            panic!("interior result without bracket")
        };
        assert_eq!(b.hi, ExtReal::Finite(2.0));
    }

    #[test]
    fn capped_burg_interior_with_infinite_threshold() {
        let r = prox_perspective(&ProxQuery::new(&CappedBurg, 1.0, &[-1.0], 1.0).unwrap(), &cfg()).unwrap();
        assert_eq!(r.threshold, ExtReal::Infinity);
        // mu = 1 - ln((-1 + sqrt(1 + 4 mu)) / 2) by fixed-point iteration
        let mut mu = 1.0_f64;
        for _ in 0..500 {
            mu = 1.0 - ((-1.0 + (1.0 + 4.0 * mu).sqrt()) / 2.0).ln();
        }
        assert!((r.mu - mu).abs() <= 1e-11, "{} vs {mu}", r.mu);
        assert!((r.mu - 1.2963).abs() < 1e-4);
        assert!((r.p[0] + 1.7435).abs() < 1e-4);
        let c = capped_burg_closed_form(1.0, -1.0, 1.0, &cfg()).unwrap();
        assert!((c.mu - r.mu).abs() <= 1e-12 && (c.p[0] - r.p[0]).abs() <= 1e-12);
    }

    #[test]
    fn capped_burg_closed_form_branches() {
        let r = capped_burg_closed_form(1.0, 3.0, -1.0, &cfg()).unwrap();
        assert_eq!((r.p.clone(), r.mu, r.case), (vec![2.0], 0.0, ProxCase::Boundary));
        let r = capped_burg_closed_form(1.0, 3.0, 1.0, &cfg()).unwrap();
        assert_eq!((r.p.clone(), r.mu, r.case), (vec![2.0], 1.0, ProxCase::Interior));
        // the generic engine lands on the same exact values
        let e = prox_perspective(&ProxQuery::new(&CappedBurg, 1.0, &[3.0], 1.0).unwrap(), &cfg()).unwrap();
        assert_eq!((e.p, e.mu), (vec![2.0], 1.0));
        let e = prox_perspective(&ProxQuery::new(&CappedBurg, 1.0, &[3.0], -1.0).unwrap(), &cfg()).unwrap();
        assert_eq!((e.p, e.mu), (vec![2.0], 0.0));
    }

    #[test]
    fn nested_examples() {
        let nested = NestedPerspective::new(Box::new(Quadratic::new(1).unwrap()));
        let r = nested_perspective_prox(&nested, 1.0, &[0.0], -1.0, -5.0, &cfg()).unwrap();
        assert_eq!((r.p.clone(), r.mu), (vec![0.0, 0.0], 0.0));
        let r = nested_perspective_prox(&nested, 1.0, &[0.0], -1.0, 7.0, &cfg()).unwrap();
        assert_eq!((r.p.clone(), r.mu), (vec![0.0, 0.0], 7.0));
        let r = nested_perspective_prox(&nested, 1.0, &[2.0], 0.0, -3.0, &cfg()).unwrap();
        let mu_ref = cubic_root();
        assert!((r.p[0] - 2.0 * mu_ref / (1.0 + mu_ref)).abs() <= 1e-12);
        assert!((r.p[1] - mu_ref).abs() <= 1e-12);
        assert_eq!(r.mu, 0.0);
    }

    #[test]
    fn nested_through_generic_engine() {
        let f = FunctionSpec::NestedPerspective {
            inner: Box::new(FunctionSpec::Quadratic { n: 1 }),
        }
        .build()
        .unwrap();
        let r = prox_perspective(&ProxQuery::new(f.as_ref(), 1.0, &[2.0, 0.0], 3.5).unwrap(), &cfg()).unwrap();
        assert_eq!(r.mu, 3.5);
        let mu_ref = cubic_root();
        assert!((r.p[1] - mu_ref).abs() <= 1e-11);
        assert!(r.feasibility_residual <= 1e-8);
    }

    #[test]
    fn entropy_entries_produce_certified_results() {
        let es = ExpSum::new(2).unwrap();
        let lse = LogSumExp::new(3).unwrap();
        let queries: Vec<(&dyn BaseFunction, Vec<f64>, f64)> = vec![
            (&es, vec![1.5, -0.3], 0.2),
            (&es, vec![-1.0, -2.0], -0.5),
            (&lse, vec![0.4, 2.0, -1.0], 1.0),
            (&lse, vec![0.4, 2.0, -1.0], -4.0),
        ];
        for (f, x, eta) in queries {
            let r = prox_perspective(&ProxQuery::new(f, 0.5, &x, eta).unwrap(), &cfg()).unwrap();
            assert!(r.feasibility_residual <= 1e-10, "{f:?} {r:?}");
            assert!(r.equality_residual <= 1e-9, "{f:?} {r:?}");
        }
    }

    #[test]
    fn invalid_queries() {
        let q1 = Quadratic::new(1).unwrap();
        assert!(ProxQuery::new(&q1, 0.0, &[1.0], 0.0).is_err());
        assert!(ProxQuery::new(&q1, 1.0, &[1.0, 2.0], 0.0).is_err());
        assert!(ProxQuery::new(&q1, 1.0, &[1.0], f64::NAN).is_err());
    }
}
