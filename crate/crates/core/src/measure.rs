//! The stationary line measure `Λ = λ⁺ ⊗ ν` and its closed-form quantities.
//!
//! `ν` is a finite measure on the unit circle made of point masses plus a
//! uniform component. A line is charted as `(r, u)` with `r >= 0` and unit
//! normal `u`, so `Λ` of a set of lines is the `ν`-integral of the
//! `r`-length of its section in each direction.
//!
//! Isotropic integrals are evaluated exactly: every integrand used here is,
//! between finitely many breakpoint angles, of the form `<w, u_θ>` for a
//! fixed vector `w`, and integrates in closed form.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CompactSet, Direction, Hyperplane, Point, Polygon};

/// Grid used by [`DirectionalMeasure::kappa`].
pub const KAPPA_GRID: usize = 8192;

const PARALLEL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub direction: Direction,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub struct DirectionalMeasure {
    atoms: Vec<Atom>,
    isotropic_mass: f64,
}

/// JSON form: `{"isotropic_mass": m, "atoms": [{"angle_radians": θ, "mass": w}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(default)]
    pub isotropic_mass: f64,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomSpec {
    pub angle_radians: f64,
    pub mass: f64,
}

impl TryFrom<MeasureSpec> for DirectionalMeasure {
    type Error = Error;
    fn try_from(spec: MeasureSpec) -> Result<Self> {
        let atoms = spec
            .atoms
            .iter()
            .map(|a| Atom {
                direction: Direction::from_angle(a.angle_radians),
                mass: a.mass,
            })
            .collect();
        DirectionalMeasure::new(atoms, spec.isotropic_mass)
    }
}

impl From<DirectionalMeasure> for MeasureSpec {
    fn from(m: DirectionalMeasure) -> Self {
        MeasureSpec {
            isotropic_mass: m.isotropic_mass,
            atoms: m
                .atoms
                .iter()
                .map(|a| AtomSpec {
                    angle_radians: a.direction.angle(),
                    mass: a.mass,
                })
                .collect(),
        }
    }
}

/// `Λ([K])` with its split over the components of `ν`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub lambda_hit: f64,
    pub atoms: Vec<f64>,
    pub isotropic: f64,
}

impl DirectionalMeasure {
    /// Checks positivity of the masses only; see [`validate`](Self::validate)
    /// for the spanning condition.
    pub fn new(atoms: Vec<Atom>, isotropic_mass: f64) -> Result<Self> {
        if !(isotropic_mass.is_finite() && isotropic_mass >= 0.0) {
            return Err(Error::DegenerateMeasure(format!(
                "isotropic mass {isotropic_mass} must be finite and >= 0"
            )));
        }
        if let Some(a) = atoms.iter().find(|a| !(a.mass.is_finite() && a.mass > 0.0)) {
            return Err(Error::DegenerateMeasure(format!(
                "atom mass {} must be finite and > 0",
                a.mass
            )));
        }
        Ok(DirectionalMeasure { atoms, isotropic_mass })
    }

    /// Uniform measure with total mass `mass`. With `mass = 2π`, `Λ([K])` is the perimeter of `K`.
    pub fn isotropic(mass: f64) -> Self {
        DirectionalMeasure::new(Vec::new(), mass).expect("non-negative isotropic mass")
    }

    /// Atoms of mass `mass_each` at `±e₁, ±e₂`.
    pub fn axis(mass_each: f64) -> Self {
        let atoms = [0.0, 0.5 * PI, PI, 1.5 * PI]
            .iter()
            .map(|&t| Atom {
                direction: axis_direction(t),
                mass: mass_each,
            })
            .collect();
        DirectionalMeasure::new(atoms, 0.0).expect("positive atom mass")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn isotropic_mass(&self) -> f64 {
        self.isotropic_mass
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `ν(S¹)`.
    pub fn total_mass(&self) -> f64 {
        self.isotropic_mass + self.atom_mass()
    }

    /// Positivity and the spanning condition: the support of `ν` must span the plane.
    pub fn validate(&self) -> Result<()> {
        if self.total_mass() <= 0.0 {
            return Err(Error::DegenerateMeasure("total mass must be positive".into()));
        }
        if self.isotropic_mass <= 0.0 {
            let spans = self.atoms.iter().enumerate().any(|(i, a)| {
                self.atoms[i + 1..]
                    .iter()
                    .any(|b| a.direction.as_point().cross(b.direction.as_point()).abs() > PARALLEL_TOL)
            });
            if !spans {
                return Err(Error::DegenerateMeasure(
                    "atom directions do not span the plane (all lines parallel)".into(),
                ));
            }
        }
        if !self.is_antipodally_balanced() {
            log::warn!("directional measure atoms are not antipodally balanced; lines on one side of the origin are under-weighted");
        }
        Ok(())
    }

    /// Whether every atom `(u, w)` is matched by an atom `(-u, w)`.
    pub fn is_antipodally_balanced(&self) -> bool {
        self.atoms.iter().all(|a| {
            let opposite = -a.direction;
            let matched: f64 = self
                .atoms
                .iter()
                .filter(|b| b.direction.as_point().distance(opposite.as_point()) <= PARALLEL_TOL)
                .map(|b| b.mass)
                .sum();
            (matched - a.mass).abs() <= 1e-12 * a.mass.max(1.0)
        })
    }

    /// `Λ([P])` for a convex polygon (no connectivity check needed).
    pub fn lambda_hit_convex(&self, poly: &Polygon) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * hit_length(poly, a.direction)).sum();
        atoms + self.isotropic_hit(poly)
    }

    // ∫₀^{2π} len(u_θ) dθ equals the perimeter of a convex body (Cauchy).
    fn isotropic_hit(&self, poly: &Polygon) -> f64 {
        if self.isotropic_mass == 0.0 {
            0.0
        } else {
            self.isotropic_mass / TAU * poly.perimeter()
        }
    }

    /// `Λ([K])` for a connected compact set, computed on its convex hull.
    pub fn lambda_hit(&self, k: &CompactSet) -> Result<f64> {
        Ok(self.lambda_hit_report(k)?.lambda_hit)
    }

    pub fn lambda_hit_report(&self, k: &CompactSet) -> Result<MeasureReport> {
        if !k.is_connected() {
            return Err(Error::Disconnected);
        }
        let hull = k.hull();
        let atoms: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| a.mass * hit_length(&hull, a.direction))
            .collect();
        let isotropic = self.isotropic_hit(&hull);
        Ok(MeasureReport {
            lambda_hit: atoms.iter().sum::<f64>() + isotropic,
            atoms,
            isotropic,
        })
    }

    /// `ζ(u) = Λ([0|u]) = ½ ∫ |<u,v>| ν(dv)`.
    pub fn zeta(&self, u: Direction) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|a| a.mass * u.dot(a.direction.as_point()).abs())
            .sum();
        // (1/2π)∫|cos θ|dθ = 2/π, halved
        0.5 * atoms + self.isotropic_mass / PI
    }

    /// Certified lower bound on `ζ` over the circle.
    ///
    /// Evaluates `ζ` on [`KAPPA_GRID`] directions and subtracts the Lipschitz
    /// slack of the atomic part (the isotropic part of `ζ` is constant).
    pub fn kappa(&self) -> Result<f64> {
        self.validate()?;
        let step = TAU / KAPPA_GRID as f64;
        let min = (0..KAPPA_GRID)
            .map(|j| self.zeta(Direction::from_angle(j as f64 * step)))
            .fold(f64::INFINITY, f64::min);
        Ok(min - 0.5 * self.atom_mass() * (0.5 * step))
    }

    /// `Λ([A|B])`, the measure of lines strictly separating `a` and `b`.
    pub fn lambda_separating(&self, a: &CompactSet, b: &CompactSet) -> f64 {
        let va: Vec<Point> = a.vertices().collect();
        let vb: Vec<Point> = b.vertices().collect();
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|at| at.mass * separating_gap(&va, &vb, at.direction).dot(at.direction.as_point()))
            .sum();
        if self.isotropic_mass == 0.0 {
            return atoms;
        }
        let mut all = va.clone();
        all.extend(vb.iter().copied());
        let integral = integrate_piecewise_sinusoid(breakpoints(&all), |u| separating_gap(&va, &vb, u));
        atoms + self.isotropic_mass / TAU * integral
    }

    /// Draws a line from `Λ([W] ∩ ·) / Λ([W])`.
    pub fn sample_hitting<R: Rng + ?Sized>(&self, window: &Polygon, rng: &mut R) -> Result<Hyperplane> {
        let total = self.lambda_hit_convex(window);
        if total.is_nan() || total <= 0.0 {
            return Err(Error::DegenerateWindow);
        }
        let mut x = rng.random::<f64>() * total;
        let mut last_positive = None;
        for atom in &self.atoms {
            let share = atom.mass * hit_length(window, atom.direction);
            if share > 0.0 {
                last_positive = Some(atom.direction);
                if x < share {
                    return Ok(uniform_on_interval(window, atom.direction, rng));
                }
                x -= share;
            }
        }
        if self.isotropic_hit(window) > 0.0 {
            // len(u) <= width(u) <= diameter
            let bound = window.diameter();
            loop {
                let u = Direction::from_angle(rng.random::<f64>() * TAU);
                if rng.random::<f64>() * bound < hit_length(window, u) {
                    return Ok(uniform_on_interval(window, u, rng));
                }
            }
        }
        let u = last_positive.ok_or(Error::DegenerateWindow)?;
        Ok(uniform_on_interval(window, u, rng))
    }
}

fn axis_direction(theta: f64) -> Direction {
    // exact axis vectors, avoiding cos(π/2) = 6e-17
    match (theta / (0.5 * PI)).round() as i64 {
        0 => Direction::e1(),
        1 => Direction::e2(),
        2 => -Direction::e1(),
        _ => -Direction::e2(),
    }
}

/// `r`-length of lines with normal `u` hitting a convex polygon.
pub fn hit_length(poly: &Polygon, u: Direction) -> f64 {
    let (lo, hi) = poly.projection(u);
    hi.max(0.0) - lo.max(0.0)
}

fn uniform_on_interval<R: Rng + ?Sized>(poly: &Polygon, u: Direction, rng: &mut R) -> Hyperplane {
    let (lo, hi) = poly.projection(u);
    let (a, b) = (lo.max(0.0), hi.max(0.0));
    Hyperplane::new(a + rng.random::<f64>() * (b - a), u)
}

fn positive_part(v: Point, u: Direction) -> Point {
    if u.dot(v) > 0.0 {
        v
    } else {
        Point::origin()
    }
}

fn extremes(pts: &[Point], u: Direction) -> (Point, Point) {
    let mut lo = pts[0];
    let mut hi = pts[0];
    for &p in &pts[1..] {
        if u.dot(p) < u.dot(lo) {
            lo = p;
        }
        if u.dot(p) > u.dot(hi) {
            hi = p;
        }
    }
    (lo, hi)
}

/// Vector `w` with `<w,u>` = `r`-length of lines with normal `u` strictly
/// separating the two vertex sets.
fn separating_gap(a: &[Point], b: &[Point], u: Direction) -> Point {
    let (a_lo, a_hi) = extremes(a, u);
    let (b_lo, b_hi) = extremes(b, u);
    if u.dot(a_hi) < u.dot(b_lo) {
        positive_part(b_lo, u) - positive_part(a_hi, u)
    } else if u.dot(b_hi) < u.dot(a_lo) {
        positive_part(a_lo, u) - positive_part(b_hi, u)
    } else {
        Point::origin()
    }
}

/// Angles at which the ordering of `{<v,u>} ∪ {0}` can change.
fn breakpoints(pts: &[Point]) -> Vec<f64> {
    let mut out = Vec::with_capacity(pts.len() * (pts.len() + 1));
    let mut push_normal_angles = |v: Point| {
        if v.norm() > 0.0 {
            let phi = v.y.atan2(v.x);
            out.push((phi + 0.5 * PI).rem_euclid(TAU));
            out.push((phi - 0.5 * PI).rem_euclid(TAU));
        }
    };
    for (i, &p) in pts.iter().enumerate() {
        push_normal_angles(p);
        for &q in &pts[i + 1..] {
            push_normal_angles(q - p);
        }
    }
    out
}

/// `∫₀^{2π} <w(θ), u_θ> dθ` where `w` is constant between consecutive breakpoints.
fn integrate_piecewise_sinusoid(mut breaks: Vec<f64>, form: impl Fn(Direction) -> Point) -> f64 {
    breaks.push(0.0);
    breaks.push(TAU);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (t0, t1) = (w[0], w[1]);
            let v = form(Direction::from_angle(0.5 * (t0 + t1)));
            v.x * (t1.sin() - t0.sin()) - v.y * (t1.cos() - t0.cos())
        })
        .sum()
}

/// Exact `∫₀^{2π} len_P(u_θ) dθ`, kept as an independent route to the
/// Cauchy perimeter identity used by [`DirectionalMeasure::lambda_hit`].
pub fn isotropic_hit_integral(poly: &Polygon) -> f64 {
    let pts = poly.vertices();
    integrate_piecewise_sinusoid(breakpoints(pts), |u| {
        let (lo, hi) = extremes(pts, u);
        positive_part(hi, u) - positive_part(lo, u)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis() -> DirectionalMeasure {
        DirectionalMeasure::axis(0.5)
    }

    fn iso() -> DirectionalMeasure {
        DirectionalMeasure::isotropic(TAU)
    }

    #[test]
    fn validation_gate() {
        let single = DirectionalMeasure::new(
            vec![Atom {
                direction: Direction::e1(),
                mass: 1.0,
            }],
            0.0,
        )
        .unwrap();
        let err = single.validate().unwrap_err();
        assert!(err.to_string().starts_with("degenerate directional measure"));
        assert!(single.kappa().is_err());
        let opposite = DirectionalMeasure::new(
            vec![
                Atom {
                    direction: Direction::e1(),
                    mass: 1.0,
                },
                Atom {
                    direction: -Direction::e1(),
                    mass: 1.0,
                },
            ],
            0.0,
        )
        .unwrap();
        assert!(opposite.validate().is_err());
        assert!(axis().validate().is_ok());
        assert!(iso().validate().is_ok());
        assert!(DirectionalMeasure::new(vec![], 0.0).unwrap().validate().is_err());
        assert!(DirectionalMeasure::new(
            vec![Atom {
                direction: Direction::e1(),
                mass: -1.0
            }],
            0.0
        )
        .is_err());
    }

    #[test]
    fn lambda_hit_examples() {
        let sq = CompactSet::from(Polygon::unit_square());
        assert!((iso().lambda_hit(&sq).unwrap() - 4.0).abs() < 1e-12);
        assert!((axis().lambda_hit(&sq).unwrap() - 1.0).abs() < 1e-15);
        let origin = CompactSet::point(Point::origin());
        assert_eq!(iso().lambda_hit(&origin).unwrap(), 0.0);
        assert_eq!(axis().lambda_hit(&origin).unwrap(), 0.0);
    }

    #[test]
    fn lambda_hit_rejects_disconnected_sets() {
        let k = CompactSet::new(vec![
            Polygon::unit_square(),
            Polygon::unit_square().translate(Point::new(3.0, 0.0)),
        ])
        .unwrap();
        assert_eq!(iso().lambda_hit(&k).unwrap_err(), Error::Disconnected);
    }

    #[test]
    fn report_breakdown_sums() {
        let m = DirectionalMeasure::new(axis().atoms().to_vec(), 1.0).unwrap();
        let r = m.lambda_hit_report(&Polygon::unit_square().into()).unwrap();
        assert!((r.lambda_hit - r.atoms.iter().sum::<f64>() - r.isotropic).abs() < 1e-15);
        assert_eq!(r.atoms.len(), 4);
    }

    #[test]
    fn zeta_examples() {
        assert!((iso().zeta(Direction::from_angle(0.3)) - 2.0).abs() < 1e-15);
        assert!((axis().zeta(Direction::e1()) - 0.5).abs() < 1e-15);
        let diag = Direction::new(1.0, 1.0).unwrap();
        assert!((axis().zeta(diag) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kappa_examples() {
        let k = iso().kappa().unwrap();
        assert!((2.0 - 1e-3..=2.0).contains(&k));
        let k = axis().kappa().unwrap();
        assert!((0.5 - 1e-3..=0.5).contains(&k));
    }

    #[test]
    fn separating_examples() {
        let l = 2.5;
        let a = CompactSet::point(Point::origin());
        let b = CompactSet::point(Point::new(l, 0.0));
        assert!((iso().lambda_separating(&a, &b) - 2.0 * l).abs() < 1e-12);
        assert!((axis().lambda_separating(&a, &b) - 0.5 * l).abs() < 1e-15);
        let sq = CompactSet::from(Polygon::unit_square());
        assert_eq!(iso().lambda_separating(&sq, &sq), 0.0);
    }

    #[test]
    fn exact_isotropic_integral_matches_perimeter() {
        for poly in [
            Polygon::unit_square(),
            Polygon::unit_square().translate(Point::new(-0.3, -0.8)),
            Polygon::segment(Point::new(1.0, 2.0), Point::new(-1.0, 0.5)),
            Polygon::regular(7, Point::new(4.0, -1.0), 2.0),
        ] {
            let exact = isotropic_hit_integral(&poly);
            assert!(
                (exact - poly.perimeter()).abs() < 1e-12 * poly.perimeter().max(1.0),
                "{exact}"
            );
        }
    }

    #[test]
    fn axis_samples_stay_on_the_support() {
        let mut rng = crate::rng::stream(5, 0);
        let w = Polygon::rectangle(-1.0, -1.0, 2.0, 3.0);
        let m = axis();
        for _ in 0..1000 {
            let g = m.sample_hitting(&w, &mut rng).unwrap();
            let u = g.normal();
            assert!(m.atoms().iter().any(|a| a.direction == u));
            assert!(crate::geometry::hits(&g, &CompactSet::from(w.clone())));
        }
    }

    #[test]
    fn sampling_needs_positive_measure() {
        let mut rng = crate::rng::stream(5, 0);
        let pt = Polygon::point(Point::new(1.0, 1.0));
        assert_eq!(
            iso().sample_hitting(&pt, &mut rng).unwrap_err(),
            Error::DegenerateWindow
        );
    }

    #[test]
    fn json_form() {
        let m: DirectionalMeasure =
            serde_json::from_str(r#"{"isotropic_mass": 1.5, "atoms": [{"angle_radians": 0.0, "mass": 2.0}]}"#).unwrap();
        assert_eq!(m.isotropic_mass(), 1.5);
        assert_eq!(m.atoms()[0].mass, 2.0);
        let back: DirectionalMeasure = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
