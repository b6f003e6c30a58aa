use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use persprox::catalog::{BaseFunction, LogSumExp, DEFAULT_MAX_DEPTH};
use persprox::engine::{prox_perspective, ProxQuery};
use persprox::verify::{bench_queries, CatalogEntry, SampledQuery};
use persprox::{ExtReal, Result, SolverConfig};
use rand::RngCore;

use crate::{EXIT_OK, EXIT_PARTIAL, EXIT_USAGE};

/// Log-sum-exp that tallies the iterations of its multiplier solves.
#[derive(Debug)]
struct CountingLse {
    inner: LogSumExp,
    solves: AtomicUsize,
    iterations: AtomicUsize,
}

impl BaseFunction for CountingLse {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval_primal(&self, x: &[f64]) -> ExtReal {
        self.inner.eval_primal(x)
    }

    fn conj_eval(&self, u: &[f64]) -> ExtReal {
        self.inner.conj_eval(u)
    }

    fn prox_conj(&self, tau: f64, u: &[f64]) -> Result<Vec<f64>> {
        let s = self.inner.prox_conj_with_stats(tau, u)?;
        self.solves.fetch_add(1, Ordering::Relaxed);
        self.iterations.fetch_add(s.iterations, Ordering::Relaxed);
        Ok(s.p)
    }

    fn project_dom_conj(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.inner.project_dom_conj(u)
    }

    fn recession(&self, x: &[f64]) -> ExtReal {
        self.inner.recession(x)
    }

    fn sample_dom_conj(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.inner.sample_dom_conj(rng)
    }
}

struct Timing {
    micros: Vec<f64>,
    engine_iterations: usize,
    lse_solves: usize,
    lse_iterations: usize,
    errors: usize,
}

/// Times one prox; `None` if the engine failed.
fn time_one(
    f: &dyn BaseFunction,
    q: &SampledQuery,
    solver: &SolverConfig,
    micros: &mut Vec<f64>,
) -> Result<Option<usize>> {
    let query = ProxQuery::new(f, q.gamma, &q.x, q.eta)?;
    let start = Instant::now();
    let r = prox_perspective(&query, solver);
    micros.push(start.elapsed().as_secs_f64() * 1e6);
    Ok(r.ok().map(|r| r.iterations))
}

fn time_queries(queries: &[SampledQuery], solver: &SolverConfig) -> Result<Timing> {
    let mut t = Timing {
        micros: Vec::with_capacity(queries.len()),
        engine_iterations: 0,
        lse_solves: 0,
        lse_iterations: 0,
        errors: 0,
    };
    for q in queries {
        let r = if q.entry == CatalogEntry::LogSumExp {
            let f = CountingLse {
                inner: LogSumExp::with_config(q.x.len(), *solver)?,
                solves: AtomicUsize::new(0),
                iterations: AtomicUsize::new(0),
            };
            let r = time_one(&f, q, solver, &mut t.micros)?;
            t.lse_solves += f.solves.load(Ordering::Relaxed);
            t.lse_iterations += f.iterations.load(Ordering::Relaxed);
            r
        } else {
            let f = q.spec.build_with(DEFAULT_MAX_DEPTH, solver)?;
            time_one(f.as_ref(), q, solver, &mut t.micros)?
        };
        match r {
            Some(iters) => t.engine_iterations += iters,
            None => t.errors += 1,
        }
    }
    Ok(t)
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[idx]
}

pub fn run(solver: &SolverConfig, samples: usize, seed: u64, entries: &[CatalogEntry]) -> u8 {
    if let Err(e) = solver.validate() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    println!(
        "{:<17} {:>8} {:>12} {:>12} {:>12} {:>14}",
        "function", "queries", "median_us", "p99_us", "mean_iters", "lambda_iters"
    );
    let mut any_error = false;
    for &entry in entries {
        let queries = bench_queries(entry, seed, samples);
        let timing = match time_queries(&queries, solver) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {entry}: {e}");
                any_error = true;
                continue;
            }
        };
        let mut sorted = timing.micros.clone();
        sorted.sort_by(f64::total_cmp);
        let lambda = if entry == CatalogEntry::LogSumExp && timing.lse_solves > 0 {
            format!("{:.1}", timing.lse_iterations as f64 / timing.lse_solves as f64)
        } else {
            "-".to_string()
        };
        println!(
            "{:<17} {:>8} {:>12.2} {:>12.2} {:>12.1} {:>14}",
            entry.tag(),
            sorted.len(),
            percentile(&sorted, 0.5),
            percentile(&sorted, 0.99),
            timing.engine_iterations as f64 / sorted.len() as f64,
            lambda
        );
        if timing.errors > 0 {
            eprintln!("error: {entry}: {} queries failed", timing.errors);
            any_error = true;
        }
    }
    if any_error {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}
