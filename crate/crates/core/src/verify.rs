//! Randomized verification suites.
//!
//! Every suite draws its queries from a seeded ChaCha stream dedicated to the
//! (entry, suite) pair, so reports do not depend on thread scheduling.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{BaseFunction, FunctionSpec, DEFAULT_MAX_DEPTH};
use crate::engine::{prox_perspective, ProxCase, ProxQuery, ProxResult};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::numerics::SolverConfig;
use crate::oracle::{brute_prox, OracleConfig};

/// Bound on `|(p, mu) - oracle|`.
pub const ORACLE_TOL: f64 = 1e-3;
/// Bound on the feasibility residual and the relative `mu`-equation residual.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Slack in the firm nonexpansiveness inequality.
pub const FIRM_TOL: f64 = 1e-9;
/// Componentwise bound in the scaling identity.
pub const HOMOGENEITY_TOL: f64 = 1e-9;
/// Slack in the projection variational inequality.
pub const MOREAU_TOL: f64 = 1e-8;

/// Catalog entries exercised by the suites and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogEntry {
    Quadratic,
    CappedBurg,
    ExpSum,
    LogSumExp,
    NestedQuadratic,
}

impl CatalogEntry {
    pub const ALL: [CatalogEntry; 5] = [
        CatalogEntry::Quadratic,
        CatalogEntry::CappedBurg,
        CatalogEntry::ExpSum,
        CatalogEntry::LogSumExp,
        CatalogEntry::NestedQuadratic,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            CatalogEntry::Quadratic => "quadratic",
            CatalogEntry::CappedBurg => "capped_burg",
            CatalogEntry::ExpSum => "exp_sum",
            CatalogEntry::LogSumExp => "log_sum_exp",
            CatalogEntry::NestedQuadratic => "nested_quadratic",
        }
    }

    fn index(self) -> u64 {
        CatalogEntry::ALL.iter().position(|&e| e == self).unwrap_or(0) as u64
    }

    /// The function for a given ambient dimension `n` of the query `x`.
    ///
    /// For the nested entry `n` counts the trailing scale coordinate of the
    /// inner perspective as well.
    pub fn spec(self, n: usize) -> Result<FunctionSpec> {
        let spec = match self {
            CatalogEntry::Quadratic => FunctionSpec::Quadratic { n },
            CatalogEntry::CappedBurg => FunctionSpec::CappedBurg,
            CatalogEntry::ExpSum => FunctionSpec::ExpSum { n },
            CatalogEntry::LogSumExp => FunctionSpec::LogSumExp { n },
            CatalogEntry::NestedQuadratic => {
                if n < 2 {
                    return Err(Error::InvalidArgument("nested_quadratic needs n >= 2".into()));
                }
                FunctionSpec::NestedPerspective {
                    inner: Box::new(FunctionSpec::Quadratic { n: n - 1 }),
                }
            }
        };
        if spec.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: n,
            });
        }
        Ok(spec)
    }

    /// Dimensions drawn by the samplers.
    pub fn sample_dims(self) -> &'static [usize] {
        match self {
            CatalogEntry::Quadratic | CatalogEntry::ExpSum => &[1, 2, 3],
            CatalogEntry::CappedBurg => &[1],
            CatalogEntry::LogSumExp | CatalogEntry::NestedQuadratic => &[2, 3],
        }
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CatalogEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CatalogEntry::ALL
            .into_iter()
            .find(|e| e.tag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown function `{s}`")))
    }
}

/// Parses a comma-separated list of entry tags; `all` selects every entry.
pub fn parse_entries(list: &str) -> Result<Vec<CatalogEntry>> {
    if list.trim() == "all" {
        return Ok(CatalogEntry::ALL.to_vec());
    }
    let mut out = Vec::new();
    for item in list.split(',') {
        let entry: CatalogEntry = item.trim().parse()?;
        if !out.contains(&entry) {
            out.push(entry);
        }
    }
    Ok(out)
}

/// One randomly drawn prox query.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledQuery {
    pub entry: CatalogEntry,
    pub spec: FunctionSpec,
    pub gamma: f64,
    pub x: Vec<f64>,
    pub eta: f64,
}

const GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];

/// `x` uniform in `[-5, 5]^n`, `eta` uniform in `[-5, 5]`, `gamma` in
/// `{0.5, 1, 2}`.
pub fn sample_query(entry: CatalogEntry, rng: &mut dyn RngCore) -> SampledQuery {
    let dims = entry.sample_dims();
    let n = dims[rng.random_range(0..dims.len())];
    let spec = entry.spec(n).expect("sampled dimensions are valid");
    let gamma = GAMMAS[rng.random_range(0..GAMMAS.len())];
    let x = (0..n).map(|_| rng.random_range(-5.0..=5.0)).collect();
    let eta = rng.random_range(-5.0..=5.0);
    SampledQuery {
        entry,
        spec,
        gamma,
        x,
        eta,
    }
}

/// Seeded generator for one (entry, suite) pair.
pub fn suite_rng(seed: u64, entry: CatalogEntry, suite: Suite) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(entry.index() * 16 + suite.index());
    rng
}

/// `count` queries from the (entry, suite) stream.
pub fn sample_queries(entry: CatalogEntry, suite: Suite, seed: u64, count: usize) -> Vec<SampledQuery> {
    let mut rng = suite_rng(seed, entry, suite);
    (0..count).map(|_| sample_query(entry, &mut rng)).collect()
}

/// `count` queries from a stream reserved for timing runs.
pub fn bench_queries(entry: CatalogEntry, seed: u64, count: usize) -> Vec<SampledQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 << 32 | entry.index());
    (0..count).map(|_| sample_query(entry, &mut rng)).collect()
}

/// The verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    OracleAgreement,
    Residuals,
    FirmNonexpansive,
    Homogeneity,
    MoreauConsistency,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::OracleAgreement,
        Suite::Residuals,
        Suite::FirmNonexpansive,
        Suite::Homogeneity,
        Suite::MoreauConsistency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OracleAgreement => "oracle",
            Suite::Residuals => "residuals",
            Suite::FirmNonexpansive => "firm_nonexpansive",
            Suite::Homogeneity => "homogeneity",
            Suite::MoreauConsistency => "moreau",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Suite::OracleAgreement => ORACLE_TOL,
            Suite::Residuals => RESIDUAL_TOL,
            Suite::FirmNonexpansive => FIRM_TOL,
            Suite::Homogeneity => HOMOGENEITY_TOL,
            Suite::MoreauConsistency => MOREAU_TOL,
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Settings shared by all suites.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Queries (or pairs) per entry and suite.
    pub samples: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    pub oracle: OracleConfig,
    /// Queries checked by the Moreau suite, capped by `samples`.
    pub moreau_queries: usize,
    /// Points of `C` tested per Moreau query.
    pub moreau_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 200,
            seed: 7,
            solver: SolverConfig::default(),
            oracle: OracleConfig::default(),
            moreau_queries: 50,
            moreau_points: 100,
        }
    }
}

/// Outcome of one suite on one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub entry: CatalogEntry,
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    /// Largest value of the checked quantity; `+inf` if a query errored.
    pub max_metric: f64,
    pub tolerance: f64,
    /// Largest equality residual, reported by the residual suite only.
    pub max_equality_residual: Option<f64>,
    /// First error message, if any query failed to evaluate.
    pub first_error: Option<String>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<17} {:<18} {:>5} passed {:>5} failed  max {:.3e} (tol {:.0e})",
            self.entry.tag(),
            self.suite.name(),
            self.passed,
            self.failed,
            self.max_metric,
            self.tolerance
        )?;
        if let Some(eq) = self.max_equality_residual {
            write!(f, "  equality {eq:.3e}")?;
        }
        if let Some(msg) = &self.first_error {
            write!(f, "  error: {msg}")?;
        }
        Ok(())
    }
}

fn engine_prox(f: &dyn BaseFunction, gamma: f64, x: &[f64], eta: f64, cfg: &SolverConfig) -> Result<ProxResult> {
    let q = ProxQuery::new(f, gamma, x, eta)?;
    prox_perspective(&q, cfg)
}

fn build(spec: &FunctionSpec, cfg: &SolverConfig) -> Result<Box<dyn BaseFunction>> {
    spec.build_with(DEFAULT_MAX_DEPTH, cfg)
}

/// `|(p1, mu1) - (p2, mu2)|`.
fn joint_distance(p1: &[f64], mu1: f64, p2: &[f64], mu2: f64) -> f64 {
    let d: f64 = p1.iter().zip(p2).map(|(a, b)| (a - b) * (a - b)).sum();
    (d + (mu1 - mu2) * (mu1 - mu2)).sqrt()
}

/// Per-query metrics `(checked value, equality residual)`.
type Metric = Result<(f64, f64)>;

fn oracle_metric(q: &SampledQuery, cfg: &VerifyConfig) -> Metric {
    let f = build(&q.spec, &cfg.solver)?;
    let r = engine_prox(f.as_ref(), q.gamma, &q.x, q.eta, &cfg.solver)?;
    let o = brute_prox(f.as_ref(), q.gamma, &q.x, q.eta, &cfg.oracle)?;
    Ok((joint_distance(&r.p, r.mu, &o.p, o.mu), 0.0))
}

/// `max(feasibility, |mu - eta - gamma f*(prox_{(mu/gamma) f*}(x/gamma))| / max(1, mu))`.
fn residual_metric(q: &SampledQuery, cfg: &VerifyConfig) -> Metric {
    let f = build(&q.spec, &cfg.solver)?;
    let r = engine_prox(f.as_ref(), q.gamma, &q.x, q.eta, &cfg.solver)?;
    let mut metric = r.feasibility_residual;
    if r.case == ProxCase::Interior {
        let scaled: Vec<f64> = q.x.iter().map(|v| v / q.gamma).collect();
        let u = f.prox_conj(r.mu / q.gamma, &scaled)?;
        let eq = match f.conj_eval(&u) {
            ExtReal::Finite(v) => (r.mu - q.eta - q.gamma * v).abs() / r.mu.abs().max(1.0),
            ExtReal::Infinity => f64::INFINITY,
        };
        metric = metric.max(eq);
    }
    Ok((metric, r.equality_residual))
}

/// `|P1 - P2|^2 - <P1 - P2, z1 - z2>`.
fn firm_metric(a: &SampledQuery, b: &SampledQuery, cfg: &VerifyConfig) -> Metric {
    let f = build(&a.spec, &cfg.solver)?;
    let ra = engine_prox(f.as_ref(), a.gamma, &a.x, a.eta, &cfg.solver)?;
    let rb = engine_prox(f.as_ref(), a.gamma, &b.x, b.eta, &cfg.solver)?;
    let mut sq = (ra.mu - rb.mu).powi(2);
    let mut inner = (ra.mu - rb.mu) * (a.eta - b.eta);
    for i in 0..ra.p.len() {
        let dp = ra.p[i] - rb.p[i];
        sq += dp * dp;
        inner += dp * (a.x[i] - b.x[i]);
    }
    Ok((sq - inner, 0.0))
}

/// `max_i |prox_{gamma f~}(lambda z)_i - lambda prox_{(gamma/lambda) f~}(z)_i|`.
fn homogeneity_metric(q: &SampledQuery, lambda: f64, cfg: &VerifyConfig) -> Metric {
    let f = build(&q.spec, &cfg.solver)?;
    let zx: Vec<f64> = q.x.iter().map(|v| lambda * v).collect();
    let big = engine_prox(f.as_ref(), q.gamma, &zx, lambda * q.eta, &cfg.solver)?;
    let small = engine_prox(f.as_ref(), q.gamma / lambda, &q.x, q.eta, &cfg.solver)?;
    let mut worst = (big.mu - lambda * small.mu).abs();
    for (a, b) in big.p.iter().zip(&small.p) {
        worst = worst.max((a - lambda * b).abs());
    }
    Ok((worst, 0.0))
}

/// With `q = ((x - p)/gamma, (eta - mu)/gamma)`: the largest of the
/// feasibility of `q` in `C = {(u, s) : s + f*(u) <= 0}` and of
/// `<(p, mu)/gamma, c - q>` over sampled `c` in `C`.
fn moreau_metric(q: &SampledQuery, points: usize, seed: u64, cfg: &VerifyConfig) -> Metric {
    let f = build(&q.spec, &cfg.solver)?;
    let r = engine_prox(f.as_ref(), q.gamma, &q.x, q.eta, &cfg.solver)?;
    let qu: Vec<f64> = q.x.iter().zip(&r.p).map(|(x, p)| (x - p) / q.gamma).collect();
    let qs = (q.eta - r.mu) / q.gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = r.feasibility_residual;
    for _ in 0..points {
        let cu = f.sample_dom_conj(&mut rng);
        let depth = -(1.0 - rng.random::<f64>()).ln();
        let cs = match f.conj_eval(&cu) {
            ExtReal::Finite(v) => -v - depth,
            ExtReal::Infinity => return Err(Error::Domain("sampled point outside dom f*".into())),
        };
        let mut vi = r.mu / q.gamma * (cs - qs);
        for i in 0..qu.len() {
            vi += r.p[i] / q.gamma * (cu[i] - qu[i]);
        }
        worst = worst.max(vi);
    }
    Ok((worst, 0.0))
}

fn summarize(entry: CatalogEntry, suite: Suite, metrics: Vec<Metric>) -> SuiteReport {
    let tol = suite.tolerance();
    let (mut passed, mut failed) = (0, 0);
    let mut max_metric = f64::NEG_INFINITY;
    let mut max_eq = 0.0_f64;
    let mut first_error = None;
    for m in metrics {
        match m {
            Ok((v, eq)) => {
                max_eq = max_eq.max(eq);
                max_metric = max_metric.max(v);
                if v <= tol {
                    passed += 1;
                } else {
                    failed += 1;
                }
            }
            Err(e) => {
                failed += 1;
                max_metric = f64::INFINITY;
                first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    SuiteReport {
        entry,
        suite,
        passed,
        failed,
        max_metric,
        tolerance: tol,
        max_equality_residual: (suite == Suite::Residuals).then_some(max_eq),
        first_error,
    }
}

/// Runs one suite on one entry.
pub fn run_suite(entry: CatalogEntry, suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    cfg.solver.validate()?;
    cfg.oracle.validate()?;
    let mut rng = suite_rng(cfg.seed, entry, suite);
    let metrics: Vec<Metric> = match suite {
        Suite::OracleAgreement | Suite::Residuals => {
            let queries: Vec<SampledQuery> = (0..cfg.samples).map(|_| sample_query(entry, &mut rng)).collect();
            queries
                .par_iter()
                .map(|q| match suite {
                    Suite::OracleAgreement => oracle_metric(q, cfg),
                    _ => residual_metric(q, cfg),
                })
                .collect()
        }
        Suite::FirmNonexpansive => {
            let pairs: Vec<(SampledQuery, SampledQuery)> = (0..cfg.samples)
                .map(|_| {
                    let a = sample_query(entry, &mut rng);
                    let mut b = a.clone();
                    b.x = (0..a.x.len()).map(|_| rng.random_range(-5.0..=5.0)).collect();
                    b.eta = rng.random_range(-5.0..=5.0);
                    (a, b)
                })
                .collect();
            pairs.par_iter().map(|(a, b)| firm_metric(a, b, cfg)).collect()
        }
        Suite::Homogeneity => {
            let items: Vec<(SampledQuery, f64)> = (0..cfg.samples)
                .map(|_| {
                    let q = sample_query(entry, &mut rng);
                    let lambda = 10f64.powf(rng.random_range(-1.0..=1.0));
                    (q, lambda)
                })
                .collect();
            items.par_iter().map(|(q, l)| homogeneity_metric(q, *l, cfg)).collect()
        }
        Suite::MoreauConsistency => {
            let count = cfg.moreau_queries.min(cfg.samples);
            let items: Vec<(SampledQuery, u64)> = (0..count)
                .map(|_| (sample_query(entry, &mut rng), rng.next_u64()))
                .collect();
            items
                .par_iter()
                .map(|(q, s)| moreau_metric(q, cfg.moreau_points, *s, cfg))
                .collect()
        }
    };
    Ok(summarize(entry, suite, metrics))
}

/// Runs every suite on every listed entry, in entry-major order.
pub fn run_all(entries: &[CatalogEntry], cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    let mut out = Vec::with_capacity(entries.len() * Suite::ALL.len());
    for &entry in entries {
        for suite in Suite::ALL {
            out.push(run_suite(entry, suite, cfg)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for e in CatalogEntry::ALL {
            assert_eq!(e.tag().parse::<CatalogEntry>().unwrap(), e);
        }
        assert!("cubic".parse::<CatalogEntry>().is_err());
        assert_eq!(parse_entries("all").unwrap().len(), 5);
        assert_eq!(
            parse_entries("quadratic, exp_sum,quadratic").unwrap(),
            vec![CatalogEntry::Quadratic, CatalogEntry::ExpSum]
        );
        assert!(parse_entries("quadratic,,exp_sum").is_err());
    }

    #[test]
    fn sampler_respects_ranges() {
        for e in CatalogEntry::ALL {
            for q in sample_queries(e, Suite::Residuals, 3, 300) {
                assert!(e.sample_dims().contains(&q.x.len()));
                assert_eq!(q.spec.dim(), q.x.len());
                assert!(GAMMAS.contains(&q.gamma));
                assert!(q.x.iter().all(|v| (-5.0..=5.0).contains(v)));
                assert!((-5.0..=5.0).contains(&q.eta));
            }
        }
    }

    #[test]
    fn sampler_is_deterministic_and_streams_differ() {
        let a = sample_queries(CatalogEntry::ExpSum, Suite::OracleAgreement, 11, 20);
        let b = sample_queries(CatalogEntry::ExpSum, Suite::OracleAgreement, 11, 20);
        let c = sample_queries(CatalogEntry::ExpSum, Suite::Homogeneity, 11, 20);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn smoke_all_suites_quadratic() {
        let cfg = VerifyConfig {
            samples: 3,
            seed: 0,
            moreau_points: 10,
            ..VerifyConfig::default()
        };
        let reports = run_all(&[CatalogEntry::Quadratic], &cfg).unwrap();
        assert_eq!(reports.len(), Suite::ALL.len());
        for r in &reports {
            assert!(r.ok(), "{r}");
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let cfg = VerifyConfig {
            samples: 0,
            ..VerifyConfig::default()
        };
        assert!(run_suite(CatalogEntry::Quadratic, Suite::Residuals, &cfg).is_err());
    }
}
