use nalgebra::{Rotation3, Unit};

use super::{Frame, Mat3, Plane, Vec3};

/// Affine map `p ↦ o + R·F·S·Fᵀ·(p − o) + t`.
///
/// `S` is a positive diagonal scale expressed in the orthonormal frame `F`
/// anchored at `o`; `R` is a proper rotation about `o`. Every orientation
/// preserving invertible affine map has this form (polar decomposition), so
/// the set is closed under composition, while a cylinder's "uniform scale on
/// the two non-principal axes" stays directly expressible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineTransform {
    pub rotation: Mat3,
    pub scale: Vec3,
    pub translation: Vec3,
    pub frame: Frame,
}

impl Default for AffineTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl AffineTransform {
    pub fn identity() -> Self {
        AffineTransform {
            rotation: Mat3::identity(),
            scale: Vec3::repeat(1.0),
            translation: Vec3::zeros(),
            frame: Frame::world(),
        }
    }

    pub fn translation(d: Vec3) -> Self {
        AffineTransform {
            translation: d,
            ..Self::identity()
        }
    }

    /// Per-axis scale in `frame`, about `frame.origin`.
    pub fn scaling(frame: Frame, scale: Vec3) -> Self {
        AffineTransform {
            rotation: Mat3::identity(),
            scale,
            translation: Vec3::zeros(),
            frame,
        }
    }

    /// Rotation by `angle` radians about the line through `pivot` along `axis`.
    pub fn rotation_about(pivot: Vec3, axis: Vec3, angle: f64) -> Self {
        let rot = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        AffineTransform {
            rotation: rot.into_inner(),
            scale: Vec3::repeat(1.0),
            translation: Vec3::zeros(),
            frame: Frame::at(pivot),
        }
    }

    /// Exact identity test; no tolerance.
    pub fn is_identity(&self) -> bool {
        self.rotation == Mat3::identity()
            && self.scale == Vec3::repeat(1.0)
            && self.translation == Vec3::zeros()
    }

    /// The linear part `R·F·S·Fᵀ`.
    pub fn linear(&self) -> Mat3 {
        let f = self.frame.axes;
        self.rotation * f * Mat3::from_diagonal(&self.scale) * f.transpose()
    }

    /// The constant part `c` such that `apply(p) = linear()·p + c`.
    pub fn offset(&self) -> Vec3 {
        let o = self.frame.origin;
        o - self.linear() * o + self.translation
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        if self.is_identity() {
            return *p;
        }
        let local = self.frame.to_local(p);
        let scaled = local.component_mul(&self.scale);
        self.frame.origin + self.rotation * (self.frame.axes * scaled) + self.translation
    }

    /// Applies only the linear part (for directions).
    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        if self.is_identity() {
            return *v;
        }
        self.linear() * v
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &AffineTransform) -> AffineTransform {
        if inner.is_identity() {
            return *self;
        }
        if self.is_identity() {
            return *inner;
        }
        let linear = self.linear() * inner.linear();
        let offset = self.linear() * inner.offset() + self.offset();
        Self::from_linear(linear, offset, inner.frame.origin)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AffineTransform) -> AffineTransform {
        next.compose(self)
    }

    /// Rebuilds the rotation/scale/frame form from `p ↦ linear·p + offset`,
    /// anchoring the frame at `origin`. `linear` must have positive determinant.
    pub fn from_linear(linear: Mat3, offset: Vec3, origin: Vec3) -> AffineTransform {
        let svd = linear.svd(true, true);
        let mut u = svd.u.expect("svd u");
        let mut v = svd.v_t.expect("svd v_t").transpose();
        let sigma = svd.singular_values;
        if v.determinant() < 0.0 {
            u.column_mut(2).neg_mut();
            v.column_mut(2).neg_mut();
        }
        let rotation = u * v.transpose();
        let frame = Frame { origin, axes: v };
        let mut t = AffineTransform {
            rotation,
            scale: sigma,
            translation: Vec3::zeros(),
            frame,
        };
        t.translation = offset - origin + t.linear() * origin;
        t
    }

    /// The transform conjugated by the reflection across `plane`: the map a
    /// mirror-image component must receive to stay the mirror image.
    pub fn mirrored(&self, plane: &Plane) -> AffineTransform {
        if self.is_identity() {
            return *self;
        }
        let h = plane.householder();
        let mut axes = h * self.frame.axes;
        // Flip one column back to keep the frame right-handed; F·S·Fᵀ only
        // depends on each axis up to sign.
        axes.column_mut(0).neg_mut();
        AffineTransform {
            rotation: h * self.rotation * h,
            scale: self.scale,
            translation: h * self.translation,
            frame: Frame {
                origin: plane.reflect_point(&self.frame.origin),
                axes,
            },
        }
    }

    /// Rotation orthonormal within `tol`, proper, and all scale factors positive.
    pub fn is_valid(&self, tol: f64) -> bool {
        let r = &self.rotation;
        let orth = (r.transpose() * r - Mat3::identity()).abs().max() <= tol;
        let frame_orth = (self.frame.axes.transpose() * self.frame.axes - Mat3::identity())
            .abs()
            .max()
            <= tol;
        orth && frame_orth && r.determinant() > 0.0 && self.scale.iter().all(|s| *s > 0.0)
    }
}
