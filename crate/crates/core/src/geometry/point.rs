use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::scalar::Scalar;

/// A point (or free vector) of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> From<[T; 2]> for Point<T> {
    fn from([x, y]: [T; 2]) -> Self {
        Point { x, y }
    }
}

impl<T: Scalar> From<Point<T>> for [T; 2] {
    fn from(p: Point<T>) -> Self {
        [p.x, p.y]
    }
}

impl<T: Scalar> Point<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Counter-clockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Self {
        Point::new(-self.y, self.x)
    }

    /// Rotation about the origin by `angle` radians.
    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Scalar> Add for Point<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Point::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Neg for Point<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Point::new(-self.x, -self.y)
    }
}

/// A unit vector of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct Direction<T> {
    x: T,
    y: T,
}

impl<T: Scalar> Direction<T> {
    /// Normalizes `(x, y)`; fails on a (near-)zero or non-finite vector.
    pub fn new(x: T, y: T) -> Result<Self, GeometryError> {
        let n = x.hypot(y);
        if !n.is_finite() || n <= T::epsilon() {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Direction { x: x / n, y: y / n })
    }

    pub fn from_angle(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Direction { x: c, y: s }
    }

    pub fn e1() -> Self {
        Direction {
            x: T::one(),
            y: T::zero(),
        }
    }

    pub fn e2() -> Self {
        Direction {
            x: T::zero(),
            y: T::one(),
        }
    }

    #[inline]
    pub fn x(self) -> T {
        self.x
    }

    #[inline]
    pub fn y(self) -> T {
        self.y
    }

    #[inline]
    pub fn as_point(self) -> Point<T> {
        Point::new(self.x, self.y)
    }

    #[inline]
    pub fn dot(self, p: Point<T>) -> T {
        self.x * p.x + self.y * p.y
    }

    pub fn angle(self) -> T {
        self.y.atan2(self.x)
    }

    #[inline]
    pub fn perp(self) -> Self {
        Direction { x: -self.y, y: self.x }
    }

    pub fn rotate(self, angle: T) -> Self {
        let p = self.as_point().rotate(angle);
        Direction { x: p.x, y: p.y }
    }
}

impl<T: Scalar> Neg for Direction<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Direction { x: -self.x, y: -self.y }
    }
}

/// An affine line `{x : <x,u> = r}` with `r >= 0` and exterior normal `u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar + Serialize"))]
pub struct Hyperplane<T> {
    r: T,
    u: Direction<T>,
}

/// Which closed half-plane of a hyperplane to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `{x : <x,u> >= r}`, the side not containing the origin.
    Plus,
    /// `{x : <x,u> <= r}`.
    Minus,
}

impl<T: Scalar> Hyperplane<T> {
    /// Builds the line `<x,u> = offset`. A negative offset is folded into
    /// the `r >= 0` chart by flipping the normal.
    pub fn new(offset: T, u: Direction<T>) -> Self {
        if offset < T::zero() {
            Hyperplane { r: -offset, u: -u }
        } else {
            Hyperplane { r: offset, u }
        }
    }

    /// The line through `p` with normal `n` (orientation chosen so that r >= 0).
    pub fn through(p: Point<T>, n: Direction<T>) -> Self {
        Hyperplane::new(n.dot(p), n)
    }

    #[inline]
    pub fn r(&self) -> T {
        self.r
    }

    #[inline]
    pub fn normal(&self) -> Direction<T> {
        self.u
    }

    /// `<p,u> - r`; positive on the plus side.
    #[inline]
    pub fn signed_distance(&self, p: Point<T>) -> T {
        self.u.dot(p) - self.r
    }

    pub fn half_plane(&self, side: Side) -> HalfPlane<T> {
        match side {
            Side::Minus => HalfPlane {
                normal: self.u.as_point(),
                offset: self.r,
            },
            Side::Plus => HalfPlane {
                normal: -self.u.as_point(),
                offset: -self.r,
            },
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Hyperplane::new(self.r * s, self.u)
    }
}

/// The closed half-plane `{x : <x,normal> <= offset}` with unit `normal`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane<T> {
    pub normal: Point<T>,
    pub offset: T,
}

impl<T: Scalar> HalfPlane<T> {
    #[inline]
    pub fn signed_distance(&self, p: Point<T>) -> T {
        self.normal.dot(p) - self.offset
    }
}
