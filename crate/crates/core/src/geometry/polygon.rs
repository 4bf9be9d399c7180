use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::point::{Direction, HalfPlane, Hyperplane, Point, Side};
use super::GeometryError;
use crate::scalar::Scalar;

/// A compact convex polygon, possibly degenerate.
///
/// Vertices form a strictly convex counter-clockwise chain: no repeated
/// vertices and no collinear interior vertices (both within the scalar's
/// geometric tolerance). One vertex is a point, two vertices a segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon<T>", into = "RawPolygon<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ConvexPolygon<T: Scalar> {
    vertices: Vec<Point<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
struct RawPolygon<T: Scalar> {
    vertices: Vec<Point<T>>,
}

impl<T: Scalar> TryFrom<RawPolygon<T>> for ConvexPolygon<T> {
    type Error = GeometryError;
    fn try_from(raw: RawPolygon<T>) -> Result<Self, GeometryError> {
        convex_hull(&raw.vertices)
    }
}

impl<T: Scalar> From<ConvexPolygon<T>> for RawPolygon<T> {
    fn from(p: ConvexPolygon<T>) -> Self {
        RawPolygon { vertices: p.vertices }
    }
}

fn lex<T: Scalar>(a: &Point<T>, b: &Point<T>) -> Ordering {
    a.x.partial_cmp(&b.x)
        .unwrap_or(Ordering::Equal)
        .then(a.y.partial_cmp(&b.y).unwrap_or(Ordering::Equal))
}

/// Minimal convex polygon containing `points` (Andrew's monotone chain).
pub fn convex_hull<T: Scalar>(points: &[Point<T>]) -> Result<ConvexPolygon<T>, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyPointSet);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let eps = T::geom_eps();
    let mut pts = points.to_vec();
    pts.sort_by(lex);
    pts.dedup_by(|a, b| a.distance(*b) <= eps);
    if pts.len() < 3 {
        return Ok(ConvexPolygon {
            vertices: normalize_cycle(pts),
        });
    }

    // a is kept between o and b only if it lies strictly left of o->b
    let left_turn = |o: Point<T>, a: Point<T>, b: Point<T>| (a - o).cross(b - o) > eps * (b - o).norm();

    let mut lower: Vec<Point<T>> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && !left_turn(lower[lower.len() - 2], lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point<T>> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && !left_turn(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(ConvexPolygon {
        vertices: normalize_cycle(lower),
    })
}

/// Removes repeated and collinear vertices from a convex counter-clockwise cycle.
fn normalize_cycle<T: Scalar>(mut v: Vec<Point<T>>) -> Vec<Point<T>> {
    let eps = T::geom_eps();
    loop {
        let n = v.len();
        if n <= 1 {
            return v;
        }
        if let Some(i) = (0..n).find(|&i| v[i].distance(v[(i + 1) % n]) <= eps) {
            v.remove((i + 1) % n);
            continue;
        }
        if n == 2 {
            if lex(&v[1], &v[0]) == Ordering::Less {
                v.swap(0, 1);
            }
            return v;
        }
        let collinear = (0..n).find(|&i| {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            let base = next - prev;
            let len = base.norm();
            len <= eps || ((v[i] - prev).cross(base)).abs() <= eps * len
        });
        match collinear {
            Some(i) => {
                v.remove(i);
            }
            None => {
                // canonical start: lexicographically smallest vertex
                let start = (0..v.len()).min_by(|&a, &b| lex(&v[a], &v[b])).unwrap_or(0);
                v.rotate_left(start);
                return v;
            }
        }
    }
}

impl<T: Scalar> ConvexPolygon<T> {
    pub fn point(p: Point<T>) -> Self {
        ConvexPolygon { vertices: vec![p] }
    }

    pub fn segment(a: Point<T>, b: Point<T>) -> Self {
        convex_hull(&[a, b]).expect("non-empty")
    }

    /// Axis-aligned rectangle `[x0,x1] x [y0,y1]`.
    pub fn rectangle(x0: T, y0: T, x1: T, y1: T) -> Self {
        convex_hull(&[
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
        .expect("non-empty")
    }

    pub fn unit_square() -> Self {
        Self::rectangle(T::zero(), T::zero(), T::one(), T::one())
    }

    /// Regular `n`-gon with the given circumradius, first vertex on the +x axis.
    pub fn regular(n: usize, center: Point<T>, radius: T) -> Self {
        let n = n.max(1);
        let step = T::TAU() / T::lit(n as f64);
        let pts: Vec<_> = (0..n)
            .map(|k| center + Direction::from_angle(step * T::lit(k as f64)).as_point() * radius)
            .collect();
        convex_hull(&pts).expect("non-empty")
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True when the polygon has non-empty interior.
    pub fn is_proper(&self) -> bool {
        self.vertices.len() >= 3
    }

    fn edges(&self) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> T {
        if !self.is_proper() {
            return T::zero();
        }
        let twice = self.edges().fold(T::zero(), |acc, (a, b)| acc + a.cross(b));
        twice / T::lit(2.0)
    }

    /// Length of the boundary as a closed curve; a segment counts twice.
    pub fn perimeter(&self) -> T {
        if self.vertices.len() < 2 {
            return T::zero();
        }
        self.edges().fold(T::zero(), |acc, (a, b)| acc + a.distance(b))
    }

    pub fn diameter(&self) -> T {
        diameter_of(&self.vertices)
    }

    pub fn centroid(&self) -> Point<T> {
        let a = self.area();
        if a <= T::zero() {
            let n = T::lit(self.vertices.len() as f64);
            let s = self.vertices.iter().fold(Point::origin(), |acc, &p| acc + p);
            return s * (T::one() / n);
        }
        let (mut cx, mut cy) = (T::zero(), T::zero());
        for (p, q) in self.edges() {
            let c = p.cross(q);
            cx = cx + (p.x + q.x) * c;
            cy = cy + (p.y + q.y) * c;
        }
        let k = T::one() / (T::lit(6.0) * a);
        Point::new(cx * k, cy * k)
    }

    /// `h_P(u) = max <v,u>`.
    pub fn support(&self, u: Direction<T>) -> T {
        self.vertices.iter().map(|&v| u.dot(v)).fold(T::neg_infinity(), T::max)
    }

    /// `(min <v,u>, max <v,u>)` over the vertices.
    pub fn projection(&self, u: Direction<T>) -> (T, T) {
        self.vertices
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
                let d = u.dot(v);
                (lo.min(d), hi.max(d))
            })
    }

    /// Outward-facing half-planes bounding a proper polygon.
    pub fn edge_half_planes(&self) -> Vec<HalfPlane<T>> {
        self.edges()
            .map(|(a, b)| {
                let e = b - a;
                let n = Point::new(e.y, -e.x) * (T::one() / e.norm());
                HalfPlane {
                    normal: n,
                    offset: n.dot(a),
                }
            })
            .collect()
    }

    /// Does `p` lie in the polygon, up to distance `tol`?
    pub fn contains_point(&self, p: Point<T>, tol: T) -> bool {
        match self.vertices.len() {
            1 => self.vertices[0].distance(p) <= tol,
            2 => point_segment_distance(p, self.vertices[0], self.vertices[1]) <= tol,
            _ => self.edge_half_planes().iter().all(|h| h.signed_distance(p) <= tol),
        }
    }

    /// Signed distance of `p` to the boundary, negative in the interior.
    /// Only meaningful for proper polygons.
    pub fn boundary_offset(&self, p: Point<T>) -> T {
        self.edge_half_planes()
            .iter()
            .map(|h| h.signed_distance(p))
            .fold(T::neg_infinity(), T::max)
    }

    /// Intersection with a closed half-plane.
    ///
    /// Vertices within tolerance of the line are kept. A result lying
    /// entirely within tolerance of the line is reported as empty.
    pub fn clip_half_plane(&self, hp: &HalfPlane<T>) -> Option<Self> {
        let eps = T::geom_eps();
        let s: Vec<T> = self.vertices.iter().map(|&v| hp.signed_distance(v)).collect();
        if s.iter().all(|d| d.abs() <= eps) {
            return None;
        }
        if s.iter().all(|&d| d <= eps) {
            return Some(self.clone());
        }
        if s.iter().all(|&d| d > eps) {
            return None;
        }
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            let (si, sj) = (s[i], s[j]);
            let (vi, vj) = (self.vertices[i], self.vertices[j]);
            if si <= eps {
                out.push(vi);
            }
            if (si < -eps && sj > eps) || (si > eps && sj < -eps) {
                let t = si / (si - sj);
                out.push(vi + (vj - vi) * t);
            }
        }
        let out = normalize_cycle(out);
        if out.is_empty() || out.iter().all(|&v| hp.signed_distance(v).abs() <= eps) {
            return None;
        }
        Some(ConvexPolygon { vertices: out })
    }

    pub fn clip(&self, plane: &Hyperplane<T>, side: Side) -> Option<Self> {
        self.clip_half_plane(&plane.half_plane(side))
    }

    /// Intersection with a proper convex `region`.
    pub fn clip_to(&self, region: &ConvexPolygon<T>) -> Option<Self> {
        debug_assert!(region.is_proper());
        let mut current = self.clone();
        for hp in region.edge_half_planes() {
            current = current.clip_half_plane(&hp)?;
        }
        Some(current)
    }

    /// The segment `plane ∩ self`, if the line meets the polygon.
    pub fn chord(&self, plane: &Hyperplane<T>) -> Option<(Point<T>, Point<T>)> {
        let eps = T::geom_eps();
        let n = self.vertices.len();
        let s: Vec<T> = self.vertices.iter().map(|&v| plane.signed_distance(v)).collect();
        let mut on_line = Vec::with_capacity(4);
        for i in 0..n {
            let j = (i + 1) % n;
            if s[i].abs() <= eps {
                on_line.push(self.vertices[i]);
            }
            if (s[i] < -eps && s[j] > eps) || (s[i] > eps && s[j] < -eps) {
                let t = s[i] / (s[i] - s[j]);
                on_line.push(self.vertices[i] + (self.vertices[j] - self.vertices[i]) * t);
            }
        }
        let tangent = plane.normal().perp();
        let lo = on_line
            .iter()
            .copied()
            .min_by(|a, b| tangent.dot(*a).partial_cmp(&tangent.dot(*b)).unwrap_or(Ordering::Equal))?;
        let hi = on_line
            .iter()
            .copied()
            .max_by(|a, b| tangent.dot(*a).partial_cmp(&tangent.dot(*b)).unwrap_or(Ordering::Equal))?;
        Some((lo, hi))
    }

    /// Closed-set intersection test (separating axis theorem), touching counts.
    pub fn intersects(&self, other: &ConvexPolygon<T>) -> bool {
        let eps = T::geom_eps();
        if self.vertices.len() == 1 && other.vertices.len() == 1 {
            return self.vertices[0].distance(other.vertices[0]) <= eps;
        }
        let mut axes: Vec<Direction<T>> = Vec::new();
        for poly in [self, other] {
            match poly.vertices.len() {
                1 => {}
                2 => {
                    if let Ok(d) = Direction::new(
                        poly.vertices[1].x - poly.vertices[0].x,
                        poly.vertices[1].y - poly.vertices[0].y,
                    ) {
                        axes.push(d);
                        axes.push(d.perp());
                    }
                }
                _ => axes.extend(poly.edges().filter_map(|(a, b)| {
                    let e = b - a;
                    Direction::new(e.y, -e.x).ok()
                })),
            }
        }
        axes.iter().all(|&u| {
            let (a0, a1) = self.projection(u);
            let (b0, b1) = other.projection(u);
            a1 >= b0 - eps && b1 >= a0 - eps
        })
    }

    pub fn map(&self, f: impl Fn(Point<T>) -> Point<T>) -> Self {
        let pts: Vec<_> = self.vertices.iter().map(|&p| f(p)).collect();
        convex_hull(&pts).expect("non-empty")
    }

    pub fn translate(&self, t: Point<T>) -> Self {
        ConvexPolygon {
            vertices: self.vertices.iter().map(|&p| p + t).collect(),
        }
    }

    /// Scaling about the origin.
    pub fn scale(&self, s: T) -> Self {
        self.map(|p| p * s)
    }

    /// Rotation about the origin.
    pub fn rotate(&self, angle: T) -> Self {
        self.map(|p| p.rotate(angle))
    }
}

pub(crate) fn diameter_of<T: Scalar>(pts: &[Point<T>]) -> T {
    let mut d = T::zero();
    for (i, &p) in pts.iter().enumerate() {
        for &q in &pts[i + 1..] {
            d = d.max(p.distance(q));
        }
    }
    d
}

pub(crate) fn point_segment_distance<T: Scalar>(p: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= T::zero() {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    p.distance(a + ab * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point<f64>;

    fn p(x: f64, y: f64) -> P {
        Point::new(x, y)
    }

    #[test]
    fn hull_of_singleton_is_point() {
        let h = convex_hull(&[p(0.0, 0.0)]).unwrap();
        assert_eq!(h.vertices(), &[p(0.0, 0.0)]);
    }

    #[test]
    fn hull_drops_interior_point() {
        let h = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.2), p(1.0, 1.0), p(0.0, 1.0)]).unwrap();
        assert_eq!(h.vertices(), &[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]);
    }

    #[test]
    fn hull_of_collinear_points_is_segment() {
        let h = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]).unwrap();
        assert_eq!(h.vertices(), &[p(0.0, 0.0), p(2.0, 0.0)]);
    }

    #[test]
    fn hull_rejects_empty_input() {
        let err = convex_hull::<f64>(&[]).unwrap_err();
        assert_eq!(err.to_string(), "empty point set");
    }

    #[test]
    fn hull_removes_near_duplicates_and_collinear_vertices() {
        let h = convex_hull(&[
            p(0.0, 0.0),
            p(1e-12, 0.0),
            p(0.5, 1e-12),
            p(1.0, 0.0),
            p(1.0, 1.0),
            p(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn measures_of_square_segment_and_point() {
        let sq = ConvexPolygon::<f64>::unit_square();
        assert_eq!(sq.area(), 1.0);
        assert_eq!(sq.perimeter(), 4.0);
        assert!((sq.diameter() - 2f64.sqrt()).abs() < 1e-15);

        let seg = ConvexPolygon::segment(p(0.0, 0.0), p(3.0, 0.0));
        assert_eq!(seg.area(), 0.0);
        assert_eq!(seg.perimeter(), 6.0);
        assert_eq!(seg.diameter(), 3.0);

        let pt = ConvexPolygon::point(p(2.0, 2.0));
        assert_eq!((pt.area(), pt.perimeter(), pt.diameter()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn axis_cut_of_unit_square() {
        let sq = ConvexPolygon::<f64>::unit_square();
        let gamma = Hyperplane::new(0.5, Direction::e1());
        let left = sq.clip(&gamma, Side::Minus).unwrap();
        assert!((left.area() - 0.5).abs() < 1e-15);
        assert!(left.vertices().iter().all(|v| v.x <= 0.5 + 1e-15));
        let right = sq.clip(&gamma, Side::Plus).unwrap();
        assert!((right.area() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_hitting_clip() {
        let sq = ConvexPolygon::<f64>::unit_square();
        let gamma = Hyperplane::new(2.0, Direction::e1());
        assert_eq!(sq.clip(&gamma, Side::Minus).unwrap(), sq);
        assert!(sq.clip(&gamma, Side::Plus).is_none());
    }

    #[test]
    fn clip_along_an_edge_keeps_square_and_drops_the_sliver() {
        let sq = ConvexPolygon::<f64>::unit_square();
        let gamma = Hyperplane::new(1.0, Direction::e1());
        assert_eq!(sq.clip(&gamma, Side::Minus).unwrap(), sq);
        assert!(sq.clip(&gamma, Side::Plus).is_none());
    }

    #[test]
    fn chord_of_square() {
        let sq = ConvexPolygon::<f64>::unit_square();
        let (a, b) = sq.chord(&Hyperplane::new(0.25, Direction::e2())).unwrap();
        assert!((a.distance(b) - 1.0).abs() < 1e-15);
        assert!((a.y - 0.25).abs() < 1e-15 && (b.y - 0.25).abs() < 1e-15);
        assert!(sq.chord(&Hyperplane::new(3.0, Direction::e2())).is_none());
    }

    #[test]
    fn separating_axis_intersection() {
        let sq = ConvexPolygon::<f64>::unit_square();
        let far = sq.translate(p(2.0, 0.0));
        let touching = sq.translate(p(1.0, 1.0));
        assert!(!sq.intersects(&far));
        assert!(sq.intersects(&touching));

        let s1 = ConvexPolygon::segment(p(0.0, 0.0), p(1.0, 0.0));
        let s2 = ConvexPolygon::segment(p(2.0, 0.0), p(3.0, 0.0));
        let s3 = ConvexPolygon::segment(p(0.5, -1.0), p(0.5, 1.0));
        assert!(!s1.intersects(&s2));
        assert!(s1.intersects(&s3));
        assert!(!ConvexPolygon::point(p(1.5, 0.0)).intersects(&s1));
        assert!(ConvexPolygon::point(p(0.5, 0.0)).intersects(&s1));
        assert!(ConvexPolygon::point(p(0.5, 0.5)).intersects(&sq));
    }

    #[test]
    fn contains_and_boundary_offset() {
        let sq = ConvexPolygon::<f64>::unit_square();
        assert!(sq.contains_point(p(0.5, 0.5), 0.0));
        assert!(sq.contains_point(p(1.0, 0.5), 1e-12));
        assert!(!sq.contains_point(p(1.1, 0.5), 1e-9));
        assert!((sq.boundary_offset(p(0.5, 0.5)) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn f32_kernel_clips_too() {
        let sq = ConvexPolygon::<f32>::unit_square();
        let gamma = Hyperplane::new(0.25f32, Direction::e1());
        let left = sq.clip(&gamma, Side::Minus).unwrap();
        assert!((left.area() - 0.25).abs() < 1e-6);
    }
}
