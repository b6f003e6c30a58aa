//! JSON Lines records.

use persprox::catalog::{NestedPerspective, Quadratic, DEFAULT_MAX_DEPTH};
use persprox::engine::{nested_perspective_prox, prox_perspective, ProxQuery, ProxResult};
use persprox::verify::CatalogEntry;
use persprox::{Error, ExtReal, Result, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRecord {
    pub function: String,
    #[serde(default)]
    pub n: Option<usize>,
    pub gamma: f64,
    pub x: Vec<f64>,
    pub eta: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default)]
    pub rel_tol: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Finite(f64),
    Infinite(String),
}

impl From<ExtReal> for Threshold {
    fn from(t: ExtReal) -> Self {
        match t {
            ExtReal::Finite(v) => Threshold::Finite(v),
            ExtReal::Infinity => Threshold::Infinite("inf".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub p: Vec<f64>,
    pub mu: f64,
    pub case: String,
    pub threshold: Threshold,
    pub iterations: usize,
    pub feasibility_residual: f64,
    pub equality_residual: f64,
    pub elapsed_us: u64,
}

impl ResultRecord {
    pub fn new(r: ProxResult, elapsed_us: u64) -> Self {
        ResultRecord {
            p: r.p,
            mu: r.mu,
            case: r.case.as_str().to_string(),
            threshold: r.threshold.into(),
            iterations: r.iterations,
            feasibility_residual: r.feasibility_residual,
            equality_residual: r.equality_residual,
            elapsed_us,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub line: usize,
    pub message: String,
}

impl QueryRecord {
    fn solver(&self, base: &SolverConfig) -> Result<SolverConfig> {
        let mut cfg = *base;
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Validates the record and computes its prox.
    pub fn evaluate(&self, base: &SolverConfig) -> Result<ProxResult> {
        let cfg = self.solver(base)?;
        let entry: CatalogEntry = self.function.parse()?;
        let n = self.n.unwrap_or(self.x.len());
        if n != self.x.len() {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.x.len(),
            });
        }
        match entry {
            CatalogEntry::NestedQuadratic => {
                let delta = self
                    .delta
                    .ok_or_else(|| Error::InvalidArgument("nested_quadratic needs `delta`".into()))?;
                if !delta.is_finite() {
                    return Err(Error::InvalidArgument("delta must be finite".into()));
                }
                let inner = Quadratic::new(n)?;
                let nested = NestedPerspective::with_config(Box::new(inner), cfg);
                nested_perspective_prox(&nested, self.gamma, &self.x, self.eta, delta, &cfg)
            }
            _ => {
                if self.delta.is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "`delta` is only valid for nested_quadratic, not {entry}"
                    )));
                }
                let f = entry.spec(n)?.build_with(DEFAULT_MAX_DEPTH, &cfg)?;
                let q = ProxQuery::new(f.as_ref(), self.gamma, &self.x, self.eta)?;
                prox_perspective(&q, &cfg)
            }
        }
    }
}
