//! Joint missing probabilities of two distant sets.
//!
//! With `W = conv(A ∪ B)`, let `Γ` be the event that the first line to
//! split `W` arrives before time `a` and separates `A` from `B`. For
//! connected `A`, `B`,
//!
//! `P(miss A, miss B, Γ) = Λ([A|B]) e^{-a(Λ_A+Λ_B)} (1 - e^{-aD}) / D`,
//! `D = Λ([W]) - Λ_A - Λ_B`,
//!
//! and `P(Γᶜ) <= e^{-aΛ([W])}`. The sweep evaluates these quantities as `B`
//! is translated away from `A`.

use std::io;

use serde::Serialize;

use crate::capacity::{analytic_missing, lipschitz_lambda, mc_joint, query_window, Estimate, McBudget};
use crate::error::{Error, Result};
use crate::measure::DirectionalMeasure;
use crate::rng;
use crate::{CompactSet, Direction, Polygon};

/// Below this `|aD|` the integral `∫₀^a e^{-tD} dt` is evaluated by its series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Closed-form pieces of the joint missing probability on `Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaJoint {
    pub value: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub lambda_hull: f64,
    pub lambda_separating: f64,
    /// `Λ([W]) - Λ_A - Λ_B`.
    pub excess: f64,
    /// `value / (U_a(A) U_a(B)) - 1`.
    pub ratio_minus_one: f64,
}

/// `∫₀^a e^{-t d} dt`.
pub fn exp_integral(a: f64, d: f64) -> f64 {
    let x = a * d;
    if x.abs() < SERIES_THRESHOLD {
        a * (1.0 - x / 2.0 + x * x / 6.0)
    } else {
        -(-x).exp_m1() / d
    }
}

pub fn gamma_joint(a_set: &CompactSet, b_set: &CompactSet, a: f64, measure: &DirectionalMeasure) -> Result<GammaJoint> {
    if !(a_set.is_connected() && b_set.is_connected()) {
        return Err(Error::Disconnected);
    }
    let lambda_a = measure.lambda_hit(a_set)?;
    let lambda_b = measure.lambda_hit(b_set)?;
    let lambda_hull = measure.lambda_hit_convex(&a_set.union(b_set).hull());
    let lambda_separating = measure.lambda_separating(a_set, b_set);
    let excess = lambda_hull - lambda_a - lambda_b;
    let integral = exp_integral(a, excess);
    let value = lambda_separating * (-a * (lambda_a + lambda_b)).exp() * integral;
    let ratio_minus_one = if lambda_separating == 0.0 {
        -1.0
    } else if (a * excess).abs() < SERIES_THRESHOLD {
        lambda_separating * integral - 1.0
    } else {
        // Λsep·I - 1 rearranged to avoid cancellation when Λsep ≈ D
        let tail = (-a * excess).exp();
        (lambda_separating - excess) / excess * (1.0 - tail) - tail
    };
    Ok(GammaJoint {
        value,
        lambda_a,
        lambda_b,
        lambda_hull,
        lambda_separating,
        excess,
        ratio_minus_one,
    })
}

/// `P_a(F^A ∩ F^B ∩ Γ_{A,B})` for connected `A`, `B`.
pub fn gamma_joint_exact(a_set: &CompactSet, b_set: &CompactSet, a: f64, measure: &DirectionalMeasure) -> Result<f64> {
    Ok(gamma_joint(a_set, b_set, a, measure)?.value)
}

/// `e^{-a Λ([conv(A ∪ B)])}`, an upper bound on `P(Γᶜ)`.
pub fn gamma_complement_bound(a_set: &CompactSet, b_set: &CompactSet, a: f64, measure: &DirectionalMeasure) -> f64 {
    (-a * measure.lambda_hit_convex(&a_set.union(b_set).hull())).exp()
}

/// `χ(A,B,a) = λ_{A,a} + λ_{B,a} + Λ([conv A]) + Λ([conv B])`.
pub fn chi_bound(
    a_set: &CompactSet,
    b_set: &CompactSet,
    a: f64,
    measure: &DirectionalMeasure,
    fallback: Option<McBudget>,
) -> Result<f64> {
    let la = lipschitz_lambda(a_set, a, measure, fallback)?;
    let lb = lipschitz_lambda(b_set, a, measure, fallback)?;
    Ok(la.value + lb.value + la.lambda_hull + lb.lambda_hull)
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub a_set: CompactSet,
    pub b_set: CompactSet,
    pub direction: Direction,
    pub distances: Vec<f64>,
    pub time: f64,
    pub measure: DirectionalMeasure,
    pub mc_n: Option<u64>,
    pub seed: u64,
}

/// Drift lengths of the default sweep.
pub const DEFAULT_DISTANCES: [f64; 7] = [5.0, 10.0, 25.0, 50.0, 100.0, 200.0, 400.0];

impl SweepConfig {
    /// `A = B =` unit segment centred at the origin, perpendicular to the drift.
    pub fn default_segments(measure: DirectionalMeasure, direction: Direction, time: f64, seed: u64) -> Self {
        let half = direction.perp().as_point() * 0.5;
        let seg = CompactSet::from(Polygon::segment(-half, half));
        SweepConfig {
            a_set: seg.clone(),
            b_set: seg,
            direction,
            distances: DEFAULT_DISTANCES.to_vec(),
            time,
            measure,
            mc_n: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.measure.validate()?;
        if self.distances.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one distance".into()));
        }
        if self.distances.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::InvalidParameter("distances must be positive".into()));
        }
        if self.distances.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("distances must be strictly increasing".into()));
        }
        if !(self.time.is_finite() && self.time > 0.0) {
            return Err(Error::InvalidParameter(format!("time {} must be positive", self.time)));
        }
        if self.mc_n == Some(0) {
            return Err(Error::InvalidParameter("mc_n must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingRow {
    pub h_norm: f64,
    pub direction: Direction,
    pub zeta: f64,
    pub joint_mc: Option<Estimate>,
    pub joint_gamma_exact: f64,
    pub product_exact: f64,
    pub ratio_minus_one: f64,
    /// `1 / (h ζ(direction))`.
    pub asymptote: f64,
    pub gamma_complement_bound: f64,
    pub chi_bound: f64,
    pub lambda_separating: f64,
    pub lambda_hull: f64,
}

impl MixingRow {
    /// `|ratio - 1| h ζ`.
    pub fn scaled_deviation(&self) -> f64 {
        self.ratio_minus_one.abs() * self.h_norm * self.zeta
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SweepEntry {
    Row(MixingRow),
    /// `A` and the translated `B` intersect; nothing computed.
    Overlap {
        h_norm: f64,
    },
}

impl SweepEntry {
    pub fn row(&self) -> Option<&MixingRow> {
        match self {
            SweepEntry::Row(r) => Some(r),
            SweepEntry::Overlap { .. } => None,
        }
    }
}

pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepEntry>> {
    config.validate()?;
    let zeta = config.measure.zeta(config.direction);
    let a = config.time;
    let chi = chi_bound(&config.a_set, &config.b_set, a, &config.measure, None)?;
    let u_a = analytic_missing(&config.a_set, a, &config.measure)?;
    config
        .distances
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let b = config.b_set.translate(config.direction.as_point() * h);
            if config.a_set.intersects(&b) {
                return Ok(SweepEntry::Overlap { h_norm: h });
            }
            let g = gamma_joint(&config.a_set, &b, a, &config.measure)?;
            let product = u_a * analytic_missing(&b, a, &config.measure)?;
            let joint_mc = match config.mc_n {
                Some(n) => {
                    let window = query_window(&config.a_set.union(&b));
                    Some(mc_joint(
                        &config.a_set,
                        &b,
                        &window,
                        a,
                        &config.measure,
                        n,
                        rng::derive(config.seed, i as u64),
                    )?)
                }
                None => None,
            };
            Ok(SweepEntry::Row(MixingRow {
                h_norm: h,
                direction: config.direction,
                zeta,
                joint_mc,
                joint_gamma_exact: g.value,
                product_exact: product,
                ratio_minus_one: g.ratio_minus_one,
                asymptote: 1.0 / (h * zeta),
                gamma_complement_bound: (-a * g.lambda_hull).exp(),
                chi_bound: chi,
                lambda_separating: g.lambda_separating,
                lambda_hull: g.lambda_hull,
            }))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares fit of `log|r|` against `log h` over the points with `h`
/// at or above the median distance. Non-finite or zero `r` are skipped.
pub fn fit_decay_points(points: &[(f64, f64)]) -> Result<DecayFit> {
    let mut hs: Vec<f64> = points.iter().map(|p| p.0).collect();
    hs.sort_by(f64::total_cmp);
    if hs.is_empty() {
        return Err(Error::InvalidParameter("no rows to fit".into()));
    }
    let m = hs.len();
    let median = if m % 2 == 1 {
        hs[m / 2]
    } else {
        0.5 * (hs[m / 2 - 1] + hs[m / 2])
    };
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|(h, r)| *h >= median && r.is_finite() && *r != 0.0)
        .map(|(h, r)| (h.ln(), r.abs().ln()))
        .collect();
    if xy.len() < 2 {
        return Err(Error::InvalidParameter("need at least two usable rows to fit".into()));
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("fit needs distinct distances".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DecayFit {
        slope,
        intercept,
        residual,
        points: xy.len(),
    })
}

pub fn fit_decay_exponent(rows: &[MixingRow]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h_norm, r.ratio_minus_one)).collect();
    fit_decay_points(&pts)
}

#[derive(Serialize)]
struct SweepCsvRow {
    h_norm: f64,
    zeta: Option<f64>,
    product_exact: Option<f64>,
    joint_gamma_exact: Option<f64>,
    ratio_minus_one: Option<f64>,
    asymptote: Option<f64>,
    gamma_complement_bound: Option<f64>,
    joint_mc_mean: Option<f64>,
    joint_mc_stderr: Option<f64>,
    chi_bound: Option<f64>,
}

/// Sweep table; overlap rows carry only `h_norm`.
pub fn write_sweep_csv<W: io::Write>(entries: &[SweepEntry], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in entries {
        let row = match e {
            SweepEntry::Row(r) => SweepCsvRow {
                h_norm: r.h_norm,
                zeta: Some(r.zeta),
                product_exact: Some(r.product_exact),
                joint_gamma_exact: Some(r.joint_gamma_exact),
                ratio_minus_one: Some(r.ratio_minus_one),
                asymptote: Some(r.asymptote),
                gamma_complement_bound: Some(r.gamma_complement_bound),
                joint_mc_mean: r.joint_mc.map(|m| m.mean),
                joint_mc_stderr: r.joint_mc.map(|m| m.stderr),
                chi_bound: Some(r.chi_bound),
            },
            SweepEntry::Overlap { h_norm } => SweepCsvRow {
                h_norm: *h_norm,
                zeta: None,
                product_exact: None,
                joint_gamma_exact: None,
                ratio_minus_one: None,
                asymptote: None,
                gamma_complement_bound: None,
                joint_mc_mean: None,
                joint_mc_stderr: None,
                chi_bound: None,
            },
        };
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point;
    use std::f64::consts::TAU;

    fn iso() -> DirectionalMeasure {
        DirectionalMeasure::isotropic(TAU)
    }

    #[test]
    fn touching_hulls_have_no_separating_lines() {
        let a = CompactSet::from(Polygon::unit_square());
        let b = CompactSet::from(Polygon::unit_square().translate(Point::new(1.0, 0.0)));
        assert_eq!(gamma_joint_exact(&a, &b, 1.0, &iso()).unwrap(), 0.0);
    }

    #[test]
    fn point_pair_closed_form() {
        for l in [0.3, 1.0, 4.0] {
            let a = CompactSet::point(Point::origin());
            let b = CompactSet::point(Point::new(l, 0.0));
            let v = gamma_joint_exact(&a, &b, 1.0, &iso()).unwrap();
            assert!((v - (1.0 - (-2.0 * l).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        let a: f64 = 1.0;
        for d in [1e-13, 1e-9, 9.9e-7, 1.01e-6, 1e-4] {
            let exact = -(-a * d).exp_m1() / d;
            assert!((exp_integral(a, d) - exact).abs() < 1e-12, "{d}");
        }
        assert_eq!(exp_integral(2.0, 0.0), 2.0);
    }

    #[test]
    fn chi_square_instance() {
        let sq = CompactSet::from(Polygon::unit_square());
        let chi = chi_bound(&sq, &sq, 1.0, &iso(), None).unwrap();
        assert!((chi - 8.732624).abs() < 5e-6, "{chi}");
        assert!((chi - (8.0 + 40.0 * (-4.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn disconnected_inputs_are_rejected() {
        let k = CompactSet::new(vec![
            Polygon::unit_square(),
            Polygon::unit_square().translate(Point::new(3.0, 0.0)),
        ])
        .unwrap();
        let b = CompactSet::point(Point::new(10.0, 0.0));
        assert_eq!(gamma_joint_exact(&k, &b, 1.0, &iso()).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn fit_sanity() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&h| (h, 0.7)).collect();
        assert!(fit_decay_points(&pts).unwrap().slope.abs() < 1e-12);
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0, 160.0].iter().map(|&h| (h, 3.0 / h)).collect();
        let fit = fit_decay_points(&pts).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert_eq!(fit.points, 3);
        assert!(fit_decay_points(&[]).is_err());
    }

    #[test]
    fn overlapping_rows_are_flagged() {
        let mut cfg = SweepConfig::default_segments(iso(), Direction::e1(), 1.0, 0);
        cfg.b_set = CompactSet::from(Polygon::rectangle(-3.0, -0.5, 3.0, 0.5));
        cfg.distances = vec![1.0, 10.0];
        let out = sweep(&cfg).unwrap();
        assert!(matches!(out[0], SweepEntry::Overlap { .. }));
        assert!(out[1].row().is_some());
        let mut buf = Vec::new();
        write_sweep_csv(&out, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "h_norm,zeta,product_exact,joint_gamma_exact,ratio_minus_one,asymptote,gamma_complement_bound,joint_mc_mean,joint_mc_stderr,chi_bound"
        );
        assert_eq!(lines.next().unwrap(), "1.0,,,,,,,,,");
    }

    #[test]
    fn sweep_config_checks() {
        let mut cfg = SweepConfig::default_segments(iso(), Direction::e1(), 1.0, 0);
        cfg.distances = vec![5.0, 5.0];
        assert!(sweep(&cfg).is_err());
    }
}
