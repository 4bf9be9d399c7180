use serde::{Deserialize, Serialize};

use super::point::{Direction, Hyperplane, Point};
use super::polygon::{convex_hull, diameter_of, ConvexPolygon};
use super::GeometryError;
use crate::scalar::Scalar;

/// A finite union of convex polygons, used as a query set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCompact<T>", into = "RawCompact<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct CompactSet<T: Scalar> {
    pieces: Vec<ConvexPolygon<T>>,
    connected: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
struct RawCompact<T: Scalar> {
    pieces: Vec<ConvexPolygon<T>>,
}

impl<T: Scalar> TryFrom<RawCompact<T>> for CompactSet<T> {
    type Error = GeometryError;
    fn try_from(raw: RawCompact<T>) -> Result<Self, GeometryError> {
        CompactSet::new(raw.pieces)
    }
}

impl<T: Scalar> From<CompactSet<T>> for RawCompact<T> {
    fn from(k: CompactSet<T>) -> Self {
        RawCompact { pieces: k.pieces }
    }
}

impl<T: Scalar> From<ConvexPolygon<T>> for CompactSet<T> {
    fn from(p: ConvexPolygon<T>) -> Self {
        CompactSet {
            pieces: vec![p],
            connected: true,
        }
    }
}

/// The `r`-range `[lo, hi] = [-h_K(-u), h_K(u)]` of lines with normal `u` meeting a convex body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HitInterval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> HitInterval<T> {
    /// The part of the interval inside the chart `r >= 0`.
    pub fn truncated(&self) -> (T, T) {
        (self.lo.max(T::zero()), self.hi.max(T::zero()))
    }

    /// Lebesgue length of the truncated interval.
    pub fn length(&self) -> T {
        let (a, b) = self.truncated();
        b - a
    }

    pub fn contains(&self, r: T, tol: T) -> bool {
        let (a, b) = self.truncated();
        r >= a - tol && r <= b + tol
    }
}

impl<T: Scalar> CompactSet<T> {
    pub fn new(pieces: Vec<ConvexPolygon<T>>) -> Result<Self, GeometryError> {
        if pieces.is_empty() || pieces.iter().any(|p| p.is_empty()) {
            return Err(GeometryError::EmptyCompactSet);
        }
        let connected = pieces_connected(&pieces);
        Ok(CompactSet { pieces, connected })
    }

    pub fn point(p: Point<T>) -> Self {
        ConvexPolygon::point(p).into()
    }

    pub fn pieces(&self) -> &[ConvexPolygon<T>] {
        &self.pieces
    }

    /// Whether the intersection graph of the pieces has one component.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point<T>> + '_ {
        self.pieces.iter().flat_map(|p| p.vertices().iter().copied())
    }

    pub fn hull(&self) -> ConvexPolygon<T> {
        let pts: Vec<_> = self.vertices().collect();
        convex_hull(&pts).expect("compact sets are non-empty")
    }

    pub fn support(&self, u: Direction<T>) -> T {
        self.pieces.iter().map(|p| p.support(u)).fold(T::neg_infinity(), T::max)
    }

    pub fn hit_interval(&self, u: Direction<T>) -> HitInterval<T> {
        HitInterval {
            lo: -self.support(-u),
            hi: self.support(u),
        }
    }

    pub fn diameter(&self) -> T {
        diameter_of(self.hull().vertices())
    }

    pub fn intersects(&self, other: &CompactSet<T>) -> bool {
        self.pieces.iter().any(|p| other.pieces.iter().any(|q| p.intersects(q)))
    }

    pub fn intersects_polygon(&self, poly: &ConvexPolygon<T>) -> bool {
        self.pieces.iter().any(|p| p.intersects(poly))
    }

    fn map_pieces(&self, f: impl Fn(&ConvexPolygon<T>) -> ConvexPolygon<T>) -> Self {
        CompactSet {
            pieces: self.pieces.iter().map(f).collect(),
            connected: self.connected,
        }
    }

    pub fn translate(&self, t: Point<T>) -> Self {
        self.map_pieces(|p| p.translate(t))
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_pieces(|p| p.scale(s))
    }

    pub fn rotate(&self, angle: T) -> Self {
        self.map_pieces(|p| p.rotate(angle))
    }

    pub fn union(&self, other: &CompactSet<T>) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        CompactSet::new(pieces).expect("non-empty")
    }
}

fn pieces_connected<T: Scalar>(pieces: &[ConvexPolygon<T>]) -> bool {
    let n = pieces.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if pieces[i].intersects(&pieces[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    (1..n).all(|i| find(&mut parent, i) == root)
}

/// Does the line meet `k`? Touching counts.
pub fn hits<T: Scalar>(plane: &Hyperplane<T>, k: &CompactSet<T>) -> bool {
    let eps = T::geom_eps();
    k.pieces().iter().any(|p| {
        let (lo, hi) = p.projection(plane.normal());
        lo - eps <= plane.r() && plane.r() <= hi + eps
    })
}

/// Does the line strictly separate `a` and `b`?
pub fn separates<T: Scalar>(plane: &Hyperplane<T>, a: &CompactSet<T>, b: &CompactSet<T>) -> bool {
    let eps = T::geom_eps();
    let side = |k: &CompactSet<T>| -> Option<bool> {
        let mut all_minus = true;
        let mut all_plus = true;
        for v in k.vertices() {
            let s = plane.signed_distance(v);
            all_minus &= s < -eps;
            all_plus &= s > eps;
        }
        match (all_minus, all_plus) {
            (true, _) => Some(false),
            (_, true) => Some(true),
            _ => None,
        }
    };
    match (side(a), side(b)) {
        (Some(sa), Some(sb)) => sa != sb,
        _ => false,
    }
}
