use crate::error::{Error, Result};
use crate::ext_real::ExtReal;

/// Tolerances and iteration caps shared by every root finder in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Absolute tolerance on `|g(t)|`.
    pub abs_tol: f64,
    /// Bracket width tolerance, relative to `max(1, |t|)`.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Growth factor applied when searching for an upper bracket end.
    pub bracket_expand: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-14,
            max_iter: 200,
            bracket_expand: 2.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        // written so that NaN fields fail as well
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if !(self.bracket_expand > 1.0) || !self.bracket_expand.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bracket_expand must be a finite value above 1, got {}",
                self.bracket_expand
            )));
        }
        Ok(())
    }
}

/// Search interval `[lo, hi]`; `hi` may be `+inf` until expansion resolves it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: ExtReal,
}

impl Bracket {
    pub fn new(lo: f64, hi: ExtReal) -> Result<Self> {
        if !lo.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bracket lower end must be finite, got {lo}"
            )));
        }
        if let ExtReal::Finite(h) = hi {
            if !(lo < h) {
                return Err(Error::InvalidArgument(format!("empty bracket [{lo}, {h}]")));
            }
        }
        Ok(Bracket { lo, hi })
    }

    pub fn finite(lo: f64, hi: f64) -> Result<Self> {
        Bracket::new(lo, ExtReal::Finite(hi))
    }

    pub fn upper_unbounded(lo: f64) -> Result<Self> {
        Bracket::new(lo, ExtReal::Infinity)
    }
}

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    /// Function evaluations spent, expansion included.
    pub iterations: usize,
    /// The finite bracket the search actually ran on.
    pub bracket: Bracket,
}

fn checked(at: f64, v: f64) -> Result<f64> {
    if v.is_nan() {
        Err(Error::NonFinite { at })
    } else {
        Ok(v)
    }
}

/// Resolves an infinite upper end by geometric growth from `max(lo, 1)`.
/// Returns the finite bracket together with `g(hi)` and the evaluation count.
fn resolve_upper<G>(g: &mut G, bracket: Bracket, cfg: &SolverConfig) -> Result<(f64, f64, f64, usize)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let mut lo = bracket.lo;
    match bracket.hi {
        ExtReal::Finite(hi) => {
            let ghi = checked(hi, g(hi)?)?;
            if ghi < 0.0 {
                return Err(Error::NoSignChange { expansions: 0 });
            }
            Ok((lo, hi, ghi, 1))
        }
        ExtReal::Infinity => {
            let base = lo.max(1.0);
            let mut hi = base;
            for k in 1..=cfg.max_iter {
                hi *= cfg.bracket_expand;
                if !hi.is_finite() {
                    break;
                }
                let ghi = checked(hi, g(hi)?)?;
                if ghi >= 0.0 {
                    return Ok((lo, hi, ghi, k));
                }
                lo = hi;
            }
            Err(Error::NoSignChange {
                expansions: cfg.max_iter,
            })
        }
    }
}

/// Bisection for a continuous nondecreasing `g` with `g(lo) <= 0 <= g(hi)`.
///
/// `g(lo)` is never evaluated, so `lo` may sit where `g` is undefined or
/// numerically unreliable (e.g. `0+`). An infinite `hi` is replaced by
/// `max(lo, 1) * bracket_expand^k` for the first `k` with `g >= 0`.
///
/// Stops once `|g(t)| <= abs_tol` or the bracket is narrower than
/// `rel_tol * max(1, |t|)`; the evaluated point with the smallest `|g|` is
/// returned in the second case.
pub fn bisect_monotone<G>(mut g: G, bracket: Bracket, cfg: &SolverConfig) -> Result<Root>
where
    G: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi, ghi, mut evals) = resolve_upper(&mut g, bracket, cfg)?;
    let searched = Bracket {
        lo,
        hi: ExtReal::Finite(hi),
    };
    if ghi <= cfg.abs_tol {
        return Ok(Root {
            value: hi,
            iterations: evals,
            bracket: searched,
        });
    }
    let mut best = (hi, ghi.abs());
    for _ in 0..cfg.max_iter {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            return Ok(Root {
                value: best.0,
                iterations: evals,
                bracket: searched,
            });
        }
        let v = checked(mid, g(mid)?)?;
        evals += 1;
        if v.abs() < best.1 {
            best = (mid, v.abs());
        }
        if v.abs() <= cfg.abs_tol {
            return Ok(Root {
                value: mid,
                iterations: evals,
                bracket: searched,
            });
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= cfg.rel_tol * mid.abs().max(1.0) {
            return Ok(Root {
                value: best.0,
                iterations: evals,
                bracket: searched,
            });
        }
    }
    Err(Error::SolverFailure { max_iter: cfg.max_iter })
}

/// Safeguarded Newton iteration: `gd(t)` returns `(g(t), g'(t))`. Newton
/// steps that leave the current bracket, or come from a nonpositive slope,
/// fall back to bisection. Same bracket conventions as [`bisect_monotone`].
pub fn newton_bisect<G>(mut gd: G, bracket: Bracket, cfg: &SolverConfig) -> Result<Root>
where
    G: FnMut(f64) -> Result<(f64, f64)>,
{
    let mut value_only = |t: f64| gd(t).map(|(v, _)| v);
    let (mut lo, mut hi, ghi, mut evals) = resolve_upper(&mut value_only, bracket, cfg)?;
    let searched = Bracket {
        lo,
        hi: ExtReal::Finite(hi),
    };
    if ghi <= cfg.abs_tol {
        return Ok(Root {
            value: hi,
            iterations: evals,
            bracket: searched,
        });
    }
    let mut t = hi;
    let (mut v, mut d) = gd(t)?;
    evals += 1;
    for _ in 0..cfg.max_iter {
        let newton = t - v / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            lo + 0.5 * (hi - lo)
        };
        let step = (next - t).abs();
        t = next;
        let (nv, nd) = gd(t)?;
        evals += 1;
        v = checked(t, nv)?;
        d = nd;
        if v.abs() <= cfg.abs_tol || step <= cfg.rel_tol * t.abs().max(1.0) {
            return Ok(Root {
                value: t,
                iterations: evals,
                bracket: searched,
            });
        }
        if v < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= cfg.rel_tol * t.abs().max(1.0) {
            return Ok(Root {
                value: t,
                iterations: evals,
                bracket: searched,
            });
        }
    }
    Err(Error::SolverFailure { max_iter: cfg.max_iter })
}
