//! Vectors, frames, affine transforms, bounding volumes and PCA proxy fitting.
//!
//! World convention: `x` is lateral, `y` is up and `z` points to the front of
//! the object. All lengths are meters.

mod proxy;
mod transform;

pub use proxy::{fit_proxy, fit_proxy_with, OrientedBox, Proxy, ProxyFitConfig};
pub use transform::AffineTransform;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// An orthonormal local frame. The columns of `axes` are the frame's unit
/// axes expressed in world coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub origin: Vec3,
    pub axes: Mat3,
}

impl Frame {
    pub fn world() -> Self {
        Frame {
            origin: Vec3::zeros(),
            axes: Mat3::identity(),
        }
    }

    /// World-aligned frame located at `origin`.
    pub fn at(origin: Vec3) -> Self {
        Frame {
            origin,
            axes: Mat3::identity(),
        }
    }

    pub fn new(origin: Vec3, axes: [Vec3; 3]) -> Self {
        Frame {
            origin,
            axes: Mat3::from_columns(&axes),
        }
    }

    pub fn axis(&self, k: usize) -> Vec3 {
        self.axes.column(k).into_owned()
    }

    pub fn to_local(&self, p: &Vec3) -> Vec3 {
        self.axes.tr_mul(&(p - self.origin))
    }

    pub fn to_world(&self, local: &Vec3) -> Vec3 {
        self.origin + self.axes * local
    }

    /// Same axes, different origin.
    pub fn with_origin(&self, origin: Vec3) -> Self {
        Frame {
            origin,
            axes: self.axes,
        }
    }
}

/// A plane given by a point on it and a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub point: Vec3,
    pub normal: Vec3,
}

impl Plane {
    pub fn new(point: Vec3, normal: Vec3) -> Self {
        Plane {
            point,
            normal: normal.normalize(),
        }
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(&(p - self.point))
    }

    pub fn reflect_point(&self, p: &Vec3) -> Vec3 {
        p - self.normal * (2.0 * self.signed_distance(p))
    }

    pub fn reflect_vector(&self, v: &Vec3) -> Vec3 {
        v - self.normal * (2.0 * self.normal.dot(v))
    }

    /// Linear part of the reflection, `I - 2 n nᵀ`.
    pub fn householder(&self) -> Mat3 {
        Mat3::identity() - self.normal * self.normal.transpose() * 2.0
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn inflated(&self, margin: f64) -> Aabb {
        let m = Vec3::repeat(margin);
        Aabb {
            min: self.min - m,
            max: self.max + m,
        }
    }

    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= other.max[k] && other.min[k] <= self.max[k])
    }
}

/// Tight componentwise bounds of a point set.
pub fn aabb_of<'a, I>(points: I) -> Result<Aabb>
where
    I: IntoIterator<Item = &'a Vec3>,
{
    let mut iter = points.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::DegenerateInput("bounding box of an empty point set".into()))?;
    let mut bb = Aabb {
        min: *first,
        max: *first,
    };
    for p in iter {
        bb.min = bb.min.inf(p);
        bb.max = bb.max.sup(p);
    }
    Ok(bb)
}

/// Index of the column of `axes` most aligned (in absolute value) with `dir`.
/// Ties go to the lowest index.
pub(crate) fn most_aligned(axes: &[Vec3; 3], dir: &Vec3) -> usize {
    let mut best = 0;
    let mut best_dot = -1.0;
    for (k, a) in axes.iter().enumerate() {
        let d = a.dot(dir).abs();
        if d > best_dot + 1e-12 {
            best = k;
            best_dot = d;
        }
    }
    best
}

/// Two unit vectors completing `axis` to an orthonormal basis, chosen
/// deterministically from the world axis least aligned with `axis`.
pub(crate) fn perpendicular_basis(axis: &Vec3) -> (Vec3, Vec3) {
    let world = [Vec3::x(), Vec3::y(), Vec3::z()];
    let mut pick = 0;
    let mut least = f64::INFINITY;
    for (k, w) in world.iter().enumerate() {
        let d = w.dot(axis).abs();
        if d < least - 1e-12 {
            least = d;
            pick = k;
        }
    }
    let e1 = (world[pick] - axis * axis.dot(&world[pick])).normalize();
    let e2 = axis.cross(&e1);
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aabb_two_points() {
        let bb = aabb_of(&[Vec3::zeros(), Vec3::new(1.0, 2.0, 3.0)]).unwrap();
        assert_eq!(bb.min, Vec3::zeros());
        assert_eq!(bb.max, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn aabb_single_point() {
        let p = Vec3::new(0.3, -1.0, 7.5);
        let bb = aabb_of(&[p]).unwrap();
        assert_eq!(bb.min, p);
        assert_eq!(bb.max, p);
    }

    #[test]
    fn aabb_empty_is_error() {
        let empty: Vec<Vec3> = vec![];
        assert!(matches!(aabb_of(&empty), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn aabb_of_scaled_cube() {
        let center = Vec3::repeat(0.5);
        let t = AffineTransform::scaling(Frame::at(center), Vec3::new(1.5, 1.0, 1.0));
        let corners: Vec<Vec3> = (0..8)
            .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .map(|p| t.apply(&p))
            .collect();
        let e = aabb_of(&corners).unwrap().extent();
        assert!((e.x - 1.5).abs() < 1e-12);
        assert!((e.y - 1.0).abs() < 1e-12);
        assert!((e.z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_reflection_is_involution() {
        let plane = Plane::new(Vec3::new(0.2, 0.0, 0.0), Vec3::x());
        let p = Vec3::new(1.0, 2.0, 3.0);
        let r = plane.reflect_point(&p);
        assert!((r.x - (-0.6)).abs() < 1e-12);
        assert!((plane.reflect_point(&r) - p).norm() < 1e-12);
    }
}
