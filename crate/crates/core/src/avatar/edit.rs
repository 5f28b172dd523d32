use serde::{Deserialize, Serialize};

use super::{skeleton, Attribute, Avatar, PoseName};
use crate::error::{Error, Result};
use crate::geometry::{Plane, Vec3};

/// Whether a sided bone edit also applies to its opposite-side partner.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditMode {
    #[default]
    Symmetric,
    Asymmetric,
}

/// Pinhole camera. Pixel (0, 0) is the top-left corner of the viewport and
/// pixel y grows downwards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub eye: [f64; 3],
    pub target: [f64; 3],
    pub up: [f64; 3],
    pub fov_y_deg: f64,
    pub width: f64,
    pub height: f64,
}

impl Default for Camera {
    /// Three-quarter front view of a seated avatar.
    fn default() -> Self {
        Camera {
            eye: [1.6, 1.2, 2.4],
            target: [0.0, 0.6, 0.0],
            up: [0.0, 1.0, 0.0],
            fov_y_deg: 45.0,
            width: 800.0,
            height: 600.0,
        }
    }
}

struct View {
    eye: Vec3,
    right: Vec3,
    up: Vec3,
    forward: Vec3,
    tan_half: f64,
    aspect: f64,
    width: f64,
    height: f64,
}

impl Camera {
    fn view(&self) -> Result<View> {
        let eye = Vec3::from(self.eye);
        let forward = Vec3::from(self.target) - eye;
        let right = forward.cross(&Vec3::from(self.up));
        let ok = forward.norm() > 1e-12
            && right.norm() > 1e-12 * forward.norm()
            && self.width > 0.0
            && self.height > 0.0
            && self.fov_y_deg > 0.0
            && self.fov_y_deg < 180.0;
        if !ok {
            return Err(Error::validation("camera", "degenerate view"));
        }
        let forward = forward.normalize();
        let right = right.normalize();
        Ok(View {
            eye,
            up: right.cross(&forward),
            right,
            forward,
            tan_half: (self.fov_y_deg.to_radians() * 0.5).tan(),
            aspect: self.width / self.height,
            width: self.width,
            height: self.height,
        })
    }
}

impl View {
    fn project(&self, p: &Vec3) -> Result<(f64, f64)> {
        let d = p - self.eye;
        let z = d.dot(&self.forward);
        if z <= 1e-9 {
            return Err(Error::validation("camera", "joint is behind the camera"));
        }
        let x = d.dot(&self.right) / (z * self.tan_half * self.aspect);
        let y = d.dot(&self.up) / (z * self.tan_half);
        Ok(((x + 1.0) * 0.5 * self.width, (1.0 - y) * 0.5 * self.height))
    }

    fn ray(&self, px: f64, py: f64) -> Vec3 {
        let x = 2.0 * px / self.width - 1.0;
        let y = 1.0 - 2.0 * py / self.height;
        (self.forward
            + self.right * (x * self.tan_half * self.aspect)
            + self.up * (y * self.tan_half))
            .normalize()
    }

    fn hit(&self, dir: &Vec3, plane: &Plane) -> Option<Vec3> {
        let denom = plane.normal.dot(dir);
        if denom.abs() < 1e-9 {
            return None;
        }
        let s = plane.normal.dot(&(plane.point - self.eye)) / denom;
        (s > 0.0).then(|| self.eye + dir * s)
    }
}

impl Avatar {
    /// Sets one attribute of the bones named by `bone` (a bone name such as
    /// `upper-leg.l` or a tag such as `upper-leg`). A length change slides the
    /// bone's descendants along its direction; the body is then shifted
    /// vertically so the feet stay on their support.
    pub fn set_attribute(
        &self,
        bone: &str,
        attribute: Attribute,
        value: f64,
        mode: EditMode,
    ) -> Result<Avatar> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::validation(
                "positive_attributes",
                format!("{bone} {attribute:?} must be > 0, got {value}"),
            ));
        }
        let sk = skeleton();
        let mut targets = sk.resolve(bone);
        if targets.is_empty() {
            return Err(Error::unknown("bone", bone));
        }
        if mode == EditMode::Symmetric {
            let mirrors: Vec<usize> = targets.iter().filter_map(|&b| sk.mirror_of(b)).collect();
            targets.extend(mirrors);
            targets.sort_unstable();
            targets.dedup();
        }
        let floor = |a: &Avatar| {
            sk.foot_joints
                .iter()
                .map(|&k| a.pose.joint_positions[k].y)
                .fold(f64::INFINITY, f64::min)
        };
        let before = floor(self);
        let mut out = self.clone();
        for b in targets {
            let info = &sk.bones[b];
            let attrs = out
                .attributes
                .get_mut(&info.name)
                .expect("every bone has attributes");
            match attribute {
                Attribute::Width => attrs.width = value,
                Attribute::Thickness => attrs.thickness = value,
                Attribute::Length => {
                    let old = attrs.length;
                    attrs.length = value;
                    let pos = &mut out.pose.joint_positions;
                    let dir = (pos[info.child] - pos[info.parent]) / old;
                    let delta = dir * (value - old);
                    for j in sk.subtree(info.child) {
                        pos[j] += delta;
                    }
                }
            }
        }
        if attribute == Attribute::Length {
            let lift = before - floor(&out);
            for p in &mut out.pose.joint_positions {
                p.y += lift;
            }
        }
        Ok(out)
    }

    /// Moves `joint` by a screen-space delta in pixels. The view ray through
    /// the displaced pixel is intersected with the joint's bone plane (the
    /// plane of its two incident bones, or of its bone and the camera up
    /// vector for a leaf); a degenerate plane falls back to the camera plane
    /// through the joint. The parent bone then rotates about its parent joint
    /// toward the hit point and the joint's subtree follows by translation, so
    /// child bones keep their directions. Dragging the root translates the
    /// whole body.
    pub fn drag_joint(&self, joint: &str, delta: (f64, f64), camera: &Camera) -> Result<Avatar> {
        let sk = skeleton();
        let j = sk
            .joint_index(joint)
            .ok_or_else(|| Error::unknown("joint", joint))?;
        if !(delta.0.is_finite() && delta.1.is_finite()) {
            return Err(Error::validation("screen_delta", "must be finite"));
        }
        if delta == (0.0, 0.0) {
            return Ok(self.clone());
        }
        let view = camera.view()?;
        let pos = &self.pose.joint_positions;
        let p = pos[j];
        let (px, py) = view.project(&p)?;
        let ray = view.ray(px + delta.0, py + delta.1);
        let camera_plane = Plane::new(p, view.forward);

        let mut out = self.clone();
        out.pose.name = PoseName::Custom;
        let Some(bone) = sk.parent_bone(j) else {
            let hit = view
                .hit(&ray, &camera_plane)
                .ok_or_else(|| Error::validation("screen_delta", "ray misses the drag plane"))?;
            let d = hit - p;
            for q in &mut out.pose.joint_positions {
                *q += d;
            }
            return Ok(out);
        };

        let parent = pos[sk.bones[bone].parent];
        let to_parent = parent - p;
        let mut normal = sk
            .child_bones(j)
            .map(|c| to_parent.cross(&(pos[sk.bones[c].child] - p)))
            .find(|n| n.norm() > 1e-9 * to_parent.norm().powi(2));
        if normal.is_none() && sk.child_bones(j).next().is_none() {
            normal = Some(to_parent.cross(&view.up)).filter(|n| n.norm() > 1e-9 * to_parent.norm());
        }
        let hit = normal
            .and_then(|n| view.hit(&ray, &Plane::new(p, n)))
            .or_else(|| view.hit(&ray, &camera_plane))
            .ok_or_else(|| Error::validation("screen_delta", "ray misses the drag plane"))?;

        let new_dir = hit - parent;
        if new_dir.norm() < 1e-12 {
            return Ok(self.clone());
        }
        let moved = parent + new_dir.normalize() * to_parent.norm();
        let d = moved - p;
        for k in sk.subtree(j) {
            out.pose.joint_positions[k] += d;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sitting() -> Avatar {
        Avatar::preset(PoseName::NormalSitting).unwrap()
    }

    #[test]
    fn doubling_lower_leg_raises_hips() {
        let a = sitting();
        let len = a.length("lower-leg.l");
        let b = a
            .set_attribute(
                "lower-leg",
                Attribute::Length,
                2.0 * len,
                EditMode::Symmetric,
            )
            .unwrap();
        b.validate().unwrap();
        assert!(b.measure().hip_height > a.measure().hip_height);
        assert!((b.measure().hip_height - a.measure().hip_height - len).abs() < 1e-9);
        assert_eq!(b.pose.joint_positions.len(), 20);
    }

    #[test]
    fn body_bone_width_sets_hip_width() {
        let b = sitting()
            .set_attribute("body-bone", Attribute::Width, 0.44, EditMode::Symmetric)
            .unwrap();
        assert_eq!(b.measure().hip_width, 0.44);
    }

    #[test]
    fn non_positive_values_are_rejected() {
        for v in [0.0, -0.1, f64::NAN] {
            assert!(sitting()
                .set_attribute("neck", Attribute::Length, v, EditMode::Symmetric)
                .is_err());
        }
        assert!(matches!(
            sitting().set_attribute("tail", Attribute::Length, 0.2, EditMode::Symmetric),
            Err(Error::Unknown { .. })
        ));
    }

    #[test]
    fn sided_edit_mirrors_unless_asymmetric() {
        let a = sitting();
        let sym = a
            .set_attribute("upper-arm.l", Attribute::Length, 0.33, EditMode::Symmetric)
            .unwrap();
        assert_eq!(sym.length("upper-arm.r"), 0.33);
        let asym = a
            .set_attribute("upper-arm.l", Attribute::Length, 0.33, EditMode::Asymmetric)
            .unwrap();
        assert_eq!(asym.length("upper-arm.r"), a.length("upper-arm.r"));
        asym.validate().unwrap();
    }

    #[test]
    fn zero_delta_is_identity() {
        let a = sitting();
        assert_eq!(
            a.drag_joint("knee_l", (0.0, 0.0), &Camera::default())
                .unwrap(),
            a
        );
    }

    #[test]
    fn dragging_root_translates_rigidly() {
        let a = sitting();
        let b = a
            .drag_joint("chest", (30.0, -12.0), &Camera::default())
            .unwrap();
        let d = b.joint("chest") - a.joint("chest");
        assert!(d.norm() > 1e-4);
        for (p, q) in a.pose.joint_positions.iter().zip(&b.pose.joint_positions) {
            assert!((q - p - d).norm() < 1e-12);
        }
    }

    #[test]
    fn dragging_knee_keeps_lengths_and_changes_angle() {
        let a = sitting();
        let cam = Camera {
            eye: [2.5, 0.6, 0.3],
            target: [0.0, 0.5, 0.3],
            ..Camera::default()
        };
        let b = a.drag_joint("knee_l", (-25.0, -40.0), &cam).unwrap();
        b.validate().unwrap();
        let angle = |x: &Avatar| {
            let k = x.joint("knee_l");
            (x.joint("hip_l") - k).angle(&(x.joint("ankle_l") - k))
        };
        assert!((angle(&a) - angle(&b)).abs().to_degrees() > 1.0);
        for bone in ["upper-leg.l", "lower-leg.l"] {
            let sk = skeleton();
            let bn = &sk.bones[sk.bone_index(bone).unwrap()];
            let len = (b.pose.joint_positions[bn.child] - b.pose.joint_positions[bn.parent]).norm();
            assert!((len - a.length(bone)).abs() < 1e-6);
        }
        assert_eq!(b.pose.name, PoseName::Custom);
    }

    #[test]
    fn many_drags_preserve_lengths() {
        let mut a = sitting();
        let cam = Camera::default();
        let joints = [
            "knee_l",
            "elbow_r",
            "wrist_l",
            "head_top",
            "toe_r",
            "ankle_l",
            "spine_mid",
            "neck",
        ];
        for (i, j) in joints.iter().cycle().take(64).enumerate() {
            let d = ((i as f64 * 1.7).sin() * 20.0, (i as f64 * 0.9).cos() * 15.0);
            a = a.drag_joint(j, d, &cam).unwrap();
        }
        a.validate().unwrap();
    }
}
