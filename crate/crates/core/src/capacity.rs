//! Capacity functional `T_a(K) = P(Y_a ∩ K ≠ ∅)`: the closed form for
//! connected sets, the time-Lipschitz constant, and Monte Carlo estimators.

use std::f64::consts::TAU;
use std::io;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DirectionalMeasure;
use crate::rng;
use crate::stit::{simulate, SimulationParams, Tessellation};
use crate::{CompactSet, Direction, Point, Polygon, GEOM_EPS};

/// Bernoulli Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub successes: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, n: u64, seed: u64) -> Self {
        assert!(n > 0 && successes <= n, "invalid Bernoulli counts {successes}/{n}");
        let mean = successes as f64 / n as f64;
        let stderr = (mean * (1.0 - mean) / n as f64).sqrt();
        Estimate {
            mean,
            stderr,
            n,
            successes,
            seed,
        }
    }

    /// The estimate of the complementary event from the same samples.
    pub fn complement(&self) -> Self {
        Estimate::from_counts(self.n - self.successes, self.n, self.seed)
    }

    /// Pools the counts of two independent estimates.
    pub fn merge(&self, other: &Estimate) -> Self {
        Estimate::from_counts(
            self.successes + other.successes,
            self.n + other.n,
            self.seed.min(other.seed),
        )
    }

    /// `|mean - target| <= k * stderr`.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }

    /// Standard error of the mean of `n` Bernoulli(`p`) draws.
    pub fn stderr_under(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    /// `|mean - p| <= k * stderr_under(p)`. Preferred over
    /// [`agrees_with`](Self::agrees_with) for a known target: the plug-in
    /// error collapses when a rare event gets few or no successes.
    pub fn agrees_with_probability(&self, p: f64, k: f64) -> bool {
        (self.mean - p).abs() <= k * self.stderr_under(p)
    }

    /// Two independent estimates agree within `k` combined standard errors.
    pub fn agrees_with_estimate(&self, other: &Estimate, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.stderr.hypot(other.stderr)
    }
}

/// `U_a(K) = exp(-a Λ([K]))` for connected `K`.
pub fn analytic_missing(k: &CompactSet, a: f64, measure: &DirectionalMeasure) -> Result<f64> {
    check_time(a)?;
    Ok((-a * measure.lambda_hit(k)?).exp())
}

fn check_time(a: f64) -> Result<()> {
    if a.is_finite() && a >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time {a} must be finite and >= 0")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum MissingSource {
    Analytic,
    MonteCarlo(Estimate),
}

/// `λ_{K,a} = Λ([conv K]) (1 + a Λ([conv K])) U_a(K)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LipschitzLambda {
    pub value: f64,
    pub lambda_hull: f64,
    pub missing: f64,
    pub source: MissingSource,
}

/// Sample budget for Monte Carlo fallbacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McBudget {
    pub n: u64,
    pub seed: u64,
}

/// Time-Lipschitz constant of the capacity functional. `U_a(K)` is exact for
/// connected `K`; otherwise it is estimated with `fallback`.
pub fn lipschitz_lambda(
    k: &CompactSet,
    a: f64,
    measure: &DirectionalMeasure,
    fallback: Option<McBudget>,
) -> Result<LipschitzLambda> {
    check_time(a)?;
    let lambda_hull = measure.lambda_hit_convex(&k.hull());
    let (missing, source) = if k.is_connected() {
        (analytic_missing(k, a, measure)?, MissingSource::Analytic)
    } else {
        let budget = fallback.ok_or(Error::Disconnected)?;
        let est = mc_missing(k, &query_window(k), a, measure, budget.n, budget.seed)?;
        (est.mean, MissingSource::MonteCarlo(est))
    };
    Ok(LipschitzLambda {
        value: lambda_hull * (1.0 + a * lambda_hull) * missing,
        lambda_hull,
        missing,
        source,
    })
}

/// Window used for Monte Carlo queries: `conv K` dilated by 10% of its diameter.
///
/// The dilation is polygonal (16 offsets per vertex), so it sits inside the
/// exact Minkowski dilation and keeps `K` interior.
pub fn query_window(k: &CompactSet) -> Polygon {
    let hull = k.hull();
    let d = hull.diameter();
    let margin = if d > 0.0 { 0.1 * d } else { 0.1 };
    let offsets: Vec<Point> = (0..16)
        .map(|j| Direction::from_angle(j as f64 * TAU / 16.0).as_point() * margin)
        .collect();
    let pts: Vec<Point> = hull
        .vertices()
        .iter()
        .flat_map(|&v| offsets.iter().map(move |&o| v + o))
        .collect();
    crate::geometry::convex_hull(&pts).expect("non-empty")
}

fn require_interior(k: &CompactSet, window: &Polygon) -> Result<()> {
    if !window.is_proper() {
        return Err(Error::NonPositiveArea);
    }
    if k.vertices().all(|v| window.boundary_offset(v) < -GEOM_EPS) {
        Ok(())
    } else {
        Err(Error::QueryNotInterior)
    }
}

/// Runs `n` independent simulations (replication `i` seeded by `derive(seed, i)`)
/// and counts the runs for which `event` holds.
pub fn count_replications<F>(
    window: &Polygon,
    a: f64,
    measure: &DirectionalMeasure,
    n: u64,
    seed: u64,
    event: F,
) -> Result<u64>
where
    F: Fn(&Tessellation) -> Result<bool> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let t = simulate(&SimulationParams::new(
                window.clone(),
                a,
                measure.clone(),
                rng::derive(seed, i),
            ))?;
            event(&t).map(u64::from)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))
}

/// Fraction of runs in `window` whose internal edges miss `k`.
pub fn mc_missing(
    k: &CompactSet,
    window: &Polygon,
    a: f64,
    measure: &DirectionalMeasure,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    check_time(a)?;
    require_interior(k, window)?;
    let missed = count_replications(window, a, measure, n, seed, |t| Ok(!t.hits_internal(k)?))?;
    Ok(Estimate::from_counts(missed, n, seed))
}

/// Missing fraction of `k` under `nest(simulate(a), extra)`. Replication `i`
/// uses `derive(seed, 2i)` for the outer run and `derive(seed, 2i + 1)` for
/// the nested copies.
pub fn mc_missing_nested(
    k: &CompactSet,
    window: &Polygon,
    a: f64,
    extra: f64,
    measure: &DirectionalMeasure,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    check_time(a)?;
    check_time(extra)?;
    require_interior(k, window)?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let missed = (0..n)
        .into_par_iter()
        .map(|i| {
            let outer = simulate(&SimulationParams::new(
                window.clone(),
                a,
                measure.clone(),
                rng::derive(seed, 2 * i),
            ))?;
            let nested = outer.nest(extra, measure, rng::derive(seed, 2 * i + 1))?;
            Ok::<_, Error>(u64::from(!nested.hits_internal(k)?))
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(Estimate::from_counts(missed, n, seed))
}

/// Fraction of runs missing both `a_set` and `b_set`.
pub fn mc_joint(
    a_set: &CompactSet,
    b_set: &CompactSet,
    window: &Polygon,
    a: f64,
    measure: &DirectionalMeasure,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    check_time(a)?;
    require_interior(a_set, window)?;
    require_interior(b_set, window)?;
    let missed = count_replications(window, a, measure, n, seed, |t| {
        Ok(!t.hits_internal(a_set)? && !t.hits_internal(b_set)?)
    })?;
    Ok(Estimate::from_counts(missed, n, seed))
}

/// Hitting estimates at several times from a single set of coupled runs:
/// each replication is simulated once to the largest time and queried at
/// every horizon.
pub fn mc_hitting_coupled(
    k: &CompactSet,
    window: &Polygon,
    times: &[f64],
    measure: &DirectionalMeasure,
    n: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    times.iter().try_for_each(|&t| check_time(t))?;
    require_interior(k, window)?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let counts = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = simulate(&SimulationParams::new(
                window.clone(),
                horizon,
                measure.clone(),
                rng::derive(seed, i),
            ))?;
            times
                .iter()
                .map(|&s| t.hits_internal_at(k, s).map(u64::from))
                .collect::<Result<Vec<u64>>>()
        })
        .try_reduce(
            || vec![0; times.len()],
            |x, y| Ok(x.iter().zip(&y).map(|(p, q)| p + q).collect()),
        )?;
    Ok(counts.into_iter().map(|c| Estimate::from_counts(c, n, seed)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementReport {
    pub a: f64,
    pub t: f64,
    pub hitting_at_a: Estimate,
    pub hitting_at_a_plus_t: Estimate,
    /// Fraction of runs missed at `a` and hit at `a + t`.
    pub increment: Estimate,
    pub lipschitz: LipschitzLambda,
    /// `t λ_{K,a}`.
    pub bound: f64,
    /// Runs hit at `a` but missed at `a + t`; zero under the coupling.
    pub coupling_violations: u64,
    /// `increment / t`, reported without any assertion.
    pub increment_rate: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Estimates `T_{a+t}(K) - T_a(K)` with coupled horizons and checks
/// `0 <= increment <= t λ_{K,a} + 3σ`.
pub fn capacity_increment_check(
    k: &CompactSet,
    a: f64,
    t: f64,
    measure: &DirectionalMeasure,
    n: u64,
    seed: u64,
) -> Result<IncrementReport> {
    check_time(a)?;
    check_time(t)?;
    let window = query_window(k);
    require_interior(k, &window)?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let (hit_a, hit_at, inc, bad) = (0..n)
        .into_par_iter()
        .map(|i| {
            let tess = simulate(&SimulationParams::new(
                window.clone(),
                a + t,
                measure.clone(),
                rng::derive(seed, i),
            ))?;
            let early = tess.hits_internal_at(k, a)?;
            let late = tess.hits_internal(k)?;
            Ok::<_, Error>((
                early as u64,
                late as u64,
                (!early && late) as u64,
                (early && !late) as u64,
            ))
        })
        .try_reduce(|| (0, 0, 0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1, x.2 + y.2, x.3 + y.3)))?;
    let lipschitz = lipschitz_lambda(k, a, measure, Some(McBudget { n, seed }))?;
    let increment = Estimate::from_counts(inc, n, seed);
    let bound = t * lipschitz.value;
    Ok(IncrementReport {
        a,
        t,
        hitting_at_a: Estimate::from_counts(hit_a, n, seed),
        hitting_at_a_plus_t: Estimate::from_counts(hit_at, n, seed),
        increment,
        lipschitz,
        bound,
        coupling_violations: bad,
        increment_rate: if t > 0.0 { increment.mean / t } else { 0.0 },
        lower_ok: bad == 0 && increment.mean >= 0.0,
        upper_ok: increment.mean <= bound + 3.0 * increment.stderr,
    })
}

/// One capacity query in CSV form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityRow {
    pub query_id: String,
    pub a: f64,
    pub n: u64,
    pub mean: f64,
    pub stderr: f64,
    pub analytic: Option<f64>,
    pub seed: u64,
}

impl CapacityRow {
    pub fn new(query_id: impl Into<String>, a: f64, est: &Estimate, analytic: Option<f64>) -> Self {
        CapacityRow {
            query_id: query_id.into(),
            a,
            n: est.n,
            mean: est.mean,
            stderr: est.stderr,
            analytic,
            seed: est.seed,
        }
    }
}

pub fn write_capacity_csv<W: io::Write>(rows: &[CapacityRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
