//! Built-in property suites. `fast` runs in seconds; `full` adds the
//! Monte Carlo checks at publication sample sizes and the rate asymptotics.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use serde::Serialize;
use stit_core::capacity::{
    analytic_missing, capacity_increment_check, mc_missing, mc_missing_nested, query_window, Estimate,
};
use stit_core::geometry::{convex_hull, Side};
use stit_core::mixing::{chi_bound, fit_decay_exponent, gamma_joint_exact, sweep, MixingRow, SweepConfig};
use stit_core::stit::simulate;
use stit_core::{
    rng, CompactSet, Direction, DirectionalMeasure, Hyperplane, Point, Polygon, SimulationParams, Tessellation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Fast,
    Full,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub passed: bool,
    pub failures: Vec<&'static str>,
    pub checks: Vec<Check>,
}

type CheckFn = fn() -> stit_core::Result<(bool, String)>;

fn iso() -> DirectionalMeasure {
    DirectionalMeasure::isotropic(TAU)
}

fn axis() -> DirectionalMeasure {
    DirectionalMeasure::axis(0.5)
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

fn measure_examples() -> stit_core::Result<(bool, String)> {
    let sq = CompactSet::from(Polygon::unit_square());
    let li = iso().lambda_hit(&sq)?;
    let la = axis().lambda_hit(&sq)?;
    let zd = axis().zeta(Direction::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)?);
    let (ki, ka) = (iso().kappa()?, axis().kappa()?);
    let ok = close(li, 4.0, 1e-9)
        && close(la, 1.0, 1e-12)
        && close(zd, FRAC_1_SQRT_2, 1e-12)
        && (2.0 - 1e-3..=2.0).contains(&ki)
        && (0.5 - 1e-3..=0.5).contains(&ka);
    Ok((
        ok,
        format!("Λ iso {li}, Λ axis {la}, ζ axis diag {zd:.6}, κ {ki:.6}/{ka:.6}"),
    ))
}

fn point_separation() -> stit_core::Result<(bool, String)> {
    use rand::Rng;
    let mut r = rng::stream(1, 1);
    let mut worst = 0.0f64;
    for m in [iso(), axis()] {
        for _ in 0..500 {
            let a = Point::new(r.random_range(-5.0..5.0), r.random_range(-5.0..5.0));
            let b = Point::new(r.random_range(-5.0..5.0), r.random_range(-5.0..5.0));
            let d = b - a;
            let expect = d.norm() * m.zeta(Direction::new(d.x, d.y)?);
            let got = m.lambda_separating(&CompactSet::point(a), &CompactSet::point(b));
            worst = worst.max((got - expect).abs() / expect);
        }
    }
    Ok((worst <= 1e-9, format!("max relative error {worst:.2e}")))
}

fn clip_partition() -> stit_core::Result<(bool, String)> {
    use rand::Rng;
    let mut r = rng::stream(1, 2);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let pts: Vec<Point> = (0..8)
            .map(|_| Point::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)))
            .collect();
        let p = convex_hull(&pts)?;
        let plane = Hyperplane::new(
            r.random_range(0.0..2.0),
            Direction::from_angle(r.random_range(0.0..TAU)),
        );
        let area = |s| p.clip(&plane, s).map_or(0.0, |q| q.area());
        worst = worst.max(((area(Side::Plus) + area(Side::Minus)) - p.area()).abs() / p.area());
    }
    Ok((worst <= 1e-9, format!("max relative area defect {worst:.2e}")))
}

fn simulation_structure() -> stit_core::Result<(bool, String)> {
    let w = Polygon::rectangle(0.0, 0.0, 10.0, 10.0);
    let tiny = simulate(&SimulationParams::new(w.clone(), 1e-12, iso(), 1))?;
    let a = simulate(&SimulationParams::new(w.clone(), 1.0, iso(), 2))?;
    let b = simulate(&SimulationParams::new(w, 1.0, iso(), 2))?;
    let json = serde_json::to_string(&a).expect("serializable");
    let back: Tessellation = serde_json::from_str(&json).expect("round trip");
    let ok = tiny.live_cells.len() == 1 && a.area_defect() <= 1e-6 && a == b && back == a;
    Ok((
        ok,
        format!("{} cells, area defect {:.1e}", a.live_cells.len(), a.area_defect()),
    ))
}

fn mc_check(k: &CompactSet, a: f64, n: u64, seed: u64) -> stit_core::Result<(bool, String)> {
    let est = mc_missing(k, &query_window(k), a, &iso(), n, seed)?;
    let exact = analytic_missing(k, a, &iso())?;
    Ok((est.agrees_with_probability(exact, 3.0), describe(&est, exact)))
}

fn describe(est: &Estimate, exact: f64) -> String {
    format!(
        "{:.6} vs {:.6} (z={:.2}, n={})",
        est.mean,
        exact,
        (est.mean - exact) / est.stderr_under(exact),
        est.n
    )
}

fn capacity_small() -> stit_core::Result<(bool, String)> {
    mc_check(&Polygon::unit_square().into(), 1.0, 2_000, 3)
}

fn increment_small() -> stit_core::Result<(bool, String)> {
    let rep = capacity_increment_check(&Polygon::unit_square().into(), 1.0, 0.1, &iso(), 2_000, 4)?;
    Ok((
        rep.lower_ok && rep.upper_ok,
        format!("{:.5} <= {:.5} + 3σ", rep.increment.mean, rep.bound),
    ))
}

fn mixing_closed_forms() -> stit_core::Result<(bool, String)> {
    let a = CompactSet::point(Point::origin());
    let b = CompactSet::point(Point::new(1.5, 0.0));
    let g = gamma_joint_exact(&a, &b, 1.0, &iso())?;
    let sq = CompactSet::from(Polygon::unit_square());
    let chi = chi_bound(&sq, &sq, 1.0, &iso(), None)?;
    let ok = close(g, 1.0 - (-3.0f64).exp(), 1e-12) && close(chi, 8.0 + 40.0 * (-4.0f64).exp(), 1e-12);
    Ok((ok, format!("point pair {g:.9}, χ(square, square) {chi:.6}")))
}

fn capacity_full() -> stit_core::Result<(bool, String)> {
    let shapes: [CompactSet; 3] = [
        Polygon::segment(Point::origin(), Point::new(1.0, 0.0)).into(),
        Polygon::unit_square().into(),
        Polygon::regular(64, Point::origin(), 1.0).into(),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, k) in shapes.iter().enumerate() {
        let (pass, d) = mc_check(k, 1.0, 10_000, rng::derive(5, i as u64))?;
        ok &= pass;
        parts.push(d);
    }
    Ok((ok, parts.join("; ")))
}

fn nesting_full() -> stit_core::Result<(bool, String)> {
    let k = CompactSet::from(Polygon::unit_square());
    let est = mc_missing_nested(&k, &query_window(&k), 0.5, 0.5, &iso(), 10_000, 6)?;
    let exact = analytic_missing(&k, 1.0, &iso())?;
    Ok((est.agrees_with_probability(exact, 3.0), describe(&est, exact)))
}

fn rows(cfg: &SweepConfig) -> stit_core::Result<Vec<MixingRow>> {
    Ok(sweep(cfg)?.into_iter().filter_map(|e| e.row().cloned()).collect())
}

fn rate_asymptote_full() -> stit_core::Result<(bool, String)> {
    let r = rows(&SweepConfig::default_segments(iso(), Direction::e1(), 1.0, 0))?;
    let scaled = r.last().map_or(f64::NAN, MixingRow::scaled_deviation);
    let fit = fit_decay_exponent(&r)?;
    let ok = close(scaled, 1.0, 0.05) && (-1.05..=-0.95).contains(&fit.slope);
    Ok((
        ok,
        format!("|r-1|hζ at h_max {scaled:.6}, fitted slope {:.4}", fit.slope),
    ))
}

const FAST: &[(&str, CheckFn)] = &[
    ("measure_examples", measure_examples),
    ("point_pair_separation", point_separation),
    ("clip_partition", clip_partition),
    ("simulation_structure", simulation_structure),
    ("capacity_monte_carlo", capacity_small),
    ("capacity_increment", increment_small),
    ("mixing_closed_forms", mixing_closed_forms),
];

const FULL: &[(&str, CheckFn)] = &[
    ("capacity_monte_carlo_full", capacity_full),
    ("nesting_stability", nesting_full),
    ("mixing_rate_asymptote", rate_asymptote_full),
];

pub fn run(suite: Suite) -> Report {
    let extra: &[(&str, CheckFn)] = if suite == Suite::Full { FULL } else { &[] };
    let checks: Vec<Check> = FAST
        .iter()
        .chain(extra)
        .map(|(name, f)| {
            log::info!("running {name}");
            match f() {
                Ok((pass, detail)) => Check { name, pass, detail },
                Err(e) => Check {
                    name,
                    pass: false,
                    detail: format!("error: {e}"),
                },
            }
        })
        .collect();
    let failures: Vec<&'static str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    Report {
        suite,
        passed: failures.is_empty(),
        failures,
        checks,
    }
}
