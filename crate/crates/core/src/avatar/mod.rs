//! Posable avatar: a 20-joint skeleton rooted at the chest, per-bone
//! ellipsoid attributes, preset poses from a shipped data table, attribute
//! edits, joint dragging and the body measurements used for constraints.
//!
//! The avatar faces +z with y up; its left side is +x. The floor is y = 0.

mod edit;
mod skeleton;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use edit::{Camera, EditMode};
pub use skeleton::{skeleton, Bone, Side, Skeleton};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Bone-length tolerance of the pose invariant.
pub const LENGTH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoneAttributes {
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
}

impl BoneAttributes {
    /// Ellipsoid semi-axes along (bone, width, thickness).
    pub fn semi_axes(&self) -> [f64; 3] {
        [self.length / 2.0, self.width / 2.0, self.thickness / 2.0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Length,
    Width,
    Thickness,
}

impl FromStr for Attribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(Attribute::Length),
            "width" => Ok(Attribute::Width),
            "thickness" => Ok(Attribute::Thickness),
            _ => Err(Error::unknown("attribute", s)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoseName {
    NormalSitting,
    BenchSitting,
    BeachLying,
    BarSitting,
    Custom,
}

impl PoseName {
    pub const PRESETS: [PoseName; 4] = [
        PoseName::NormalSitting,
        PoseName::BenchSitting,
        PoseName::BeachLying,
        PoseName::BarSitting,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PoseName::NormalSitting => "normal_sitting",
            PoseName::BenchSitting => "bench_sitting",
            PoseName::BeachLying => "beach_lying",
            PoseName::BarSitting => "bar_sitting",
            PoseName::Custom => "custom",
        }
    }
}

impl fmt::Display for PoseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PoseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PoseName::PRESETS
            .into_iter()
            .chain([PoseName::Custom])
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::unknown("pose", s))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pose {
    pub name: PoseName,
    /// Indexed like `skeleton().joints`.
    pub joint_positions: Vec<Vec3>,
    /// Number of people seated side by side; widens the seat constraint.
    pub occupants: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Avatar {
    /// Keyed by bone name (`upper-leg.l`, `neck`, ...).
    pub attributes: BTreeMap<String, BoneAttributes>,
    pub pose: Pose,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyMeasurements {
    pub hip_width: f64,
    pub hip_height: f64,
    pub upper_leg_length: f64,
    pub lower_arm_height: f64,
    /// Degrees.
    pub spine_leg_angle: f64,
    pub body_length: f64,
    pub support_span: f64,
    pub eye_height: f64,
    pub occupants: u32,
}

impl Default for Avatar {
    fn default() -> Self {
        Avatar::preset(PoseName::NormalSitting).expect("shipped preset")
    }
}

impl Avatar {
    /// Default adult dimensions in the named preset pose.
    pub fn preset(name: PoseName) -> Result<Avatar> {
        let attributes = skeleton().default_attributes();
        let pose = preset_pose_with(name, &attributes)?;
        Ok(Avatar { attributes, pose })
    }

    /// Same body, new preset pose.
    pub fn with_preset(&self, name: PoseName) -> Result<Avatar> {
        Ok(Avatar {
            attributes: self.attributes.clone(),
            pose: preset_pose_with(name, &self.attributes)?,
        })
    }

    pub fn joint(&self, name: &str) -> Vec3 {
        self.pose.joint_positions[skeleton().joint_index(name).expect("known joint")]
    }

    pub fn length(&self, bone: &str) -> f64 {
        self.attributes[bone].length
    }

    /// Rigid translation of the whole body.
    pub fn translated(&self, d: &Vec3) -> Avatar {
        let mut out = self.clone();
        for p in &mut out.pose.joint_positions {
            *p += d;
        }
        out
    }

    /// Uniform scaling of every attribute and of the pose about the floor
    /// origin.
    pub fn scaled(&self, s: f64) -> Result<Avatar> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::validation(
                "scale",
                format!("{s} is not a positive factor"),
            ));
        }
        let mut out = self.clone();
        for a in out.attributes.values_mut() {
            a.length *= s;
            a.width *= s;
            a.thickness *= s;
        }
        for p in &mut out.pose.joint_positions {
            *p *= s;
        }
        Ok(out)
    }

    /// Checks every structural invariant; the error names the first broken one.
    pub fn validate(&self) -> Result<()> {
        let sk = skeleton();
        if self.pose.joint_positions.len() != sk.joints.len() {
            return Err(Error::validation(
                "joint_count",
                format!(
                    "expected {} joints, got {}",
                    sk.joints.len(),
                    self.pose.joint_positions.len()
                ),
            ));
        }
        if let Some(p) = self
            .pose
            .joint_positions
            .iter()
            .position(|p| !p.iter().all(|v| v.is_finite()))
        {
            return Err(Error::validation(
                "joint_positions",
                format!("joint `{}` is not finite", sk.joints[p]),
            ));
        }
        if self.pose.occupants == 0 {
            return Err(Error::validation("occupants", "must be at least 1"));
        }
        for bone in &sk.bones {
            let Some(a) = self.attributes.get(&bone.name) else {
                return Err(Error::validation(
                    "attributes",
                    format!("missing bone `{}`", bone.name),
                ));
            };
            for (what, v) in [
                ("length", a.length),
                ("width", a.width),
                ("thickness", a.thickness),
            ] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::validation(
                        "positive_attributes",
                        format!("{} {what} must be > 0, got {v}", bone.name),
                    ));
                }
            }
            let actual = (self.pose.joint_positions[bone.child]
                - self.pose.joint_positions[bone.parent])
                .norm();
            if (actual - a.length).abs() > LENGTH_TOL {
                return Err(Error::validation(
                    "bone_length",
                    format!(
                        "{} spans {actual:.6} but its length is {}",
                        bone.name, a.length
                    ),
                ));
            }
        }
        if let Some(extra) = self.attributes.keys().find(|k| sk.bone_index(k).is_none()) {
            return Err(Error::unknown("bone", extra.clone()));
        }
        Ok(())
    }

    pub fn measure(&self) -> BodyMeasurements {
        let j = |n: &str| self.joint(n);
        let avg_len =
            |tag: &str| 0.5 * (self.length(&format!("{tag}.l")) + self.length(&format!("{tag}.r")));
        let hip = j("hip_center");
        let spine = j("chest") - hip;
        let angle = |side: &str| {
            let leg = j(&format!("knee_{side}")) - j(&format!("hip_{side}"));
            spine.angle(&leg).to_degrees()
        };
        let mid_y =
            |side: &str| 0.5 * (j(&format!("elbow_{side}")).y + j(&format!("wrist_{side}")).y);
        BodyMeasurements {
            hip_width: self.attributes["body-bone"].width,
            hip_height: hip.y,
            upper_leg_length: avg_len("upper-leg"),
            lower_arm_height: 0.5 * (mid_y("l") + mid_y("r")),
            spine_leg_angle: 0.5 * (angle("l") + angle("r")),
            body_length: self.length("upper-body") + self.length("body-bone"),
            support_span: self.length("body-bone")
                + self.length("upper-body")
                + self.length("neck")
                + self.length("head"),
            eye_height: j("head").y,
            occupants: self.pose.occupants,
        }
    }
}

/// Preset pose for the default adult body.
pub fn preset_pose(name: PoseName) -> Result<Pose> {
    preset_pose_with(name, &skeleton().default_attributes())
}

/// Forward kinematics of a preset's bone directions with the given lengths,
/// then placement: hip centre at x = z = 0, lowest foot joint at the preset's
/// support height.
pub fn preset_pose_with(
    name: PoseName,
    attributes: &BTreeMap<String, BoneAttributes>,
) -> Result<Pose> {
    let sk = skeleton();
    let key = match name {
        PoseName::Custom => {
            return Err(Error::validation(
                "pose",
                "custom poses carry explicit joint positions",
            ))
        }
        other => other.as_str(),
    };
    let preset = sk
        .presets
        .get(key)
        .ok_or_else(|| Error::unknown("pose", key))?;
    let mut pos = vec![Vec3::zeros(); sk.joints.len()];
    for (b, bone) in sk.bones.iter().enumerate() {
        let len = attributes
            .get(&bone.name)
            .ok_or_else(|| {
                Error::validation("attributes", format!("missing bone `{}`", bone.name))
            })?
            .length;
        pos[bone.child] = pos[bone.parent] + preset.directions[b] * len;
    }
    let hip = pos[sk.joint_index("hip_center").expect("hip")];
    let floor = sk
        .foot_joints
        .iter()
        .map(|&k| pos[k].y)
        .fold(f64::INFINITY, f64::min);
    let shift = Vec3::new(-hip.x, preset.support_height - floor, -hip.z);
    for p in &mut pos {
        *p += shift;
    }
    Ok(Pose {
        name,
        joint_positions: pos,
        occupants: preset.occupants,
    })
}

/// Serializable avatar: attributes per bone name and either a preset name or
/// explicit joint positions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AvatarDoc {
    #[serde(default)]
    pub attributes: BTreeMap<String, BoneAttributes>,
    pub pose: PoseDoc,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PoseDoc {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_positions: Option<BTreeMap<String, [f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occupants: Option<u32>,
}

impl AvatarDoc {
    pub fn from_avatar(a: &Avatar) -> Self {
        let sk = skeleton();
        AvatarDoc {
            attributes: a.attributes.clone(),
            pose: PoseDoc {
                name: Some(a.pose.name.as_str().to_string()),
                joint_positions: Some(
                    sk.joints
                        .iter()
                        .zip(&a.pose.joint_positions)
                        .map(|(n, p)| (n.clone(), [p.x, p.y, p.z]))
                        .collect(),
                ),
                occupants: Some(a.pose.occupants),
            },
        }
    }

    /// Builds and validates the avatar. Missing attributes take the default
    /// adult values; a missing pose name means `normal_sitting`.
    pub fn into_avatar(self) -> Result<Avatar> {
        let sk = skeleton();
        let mut attributes = sk.default_attributes();
        for (k, v) in self.attributes {
            if sk.bone_index(&k).is_none() {
                return Err(Error::unknown("bone", k));
            }
            attributes.insert(k, v);
        }
        let name: PoseName = self
            .pose
            .name
            .as_deref()
            .unwrap_or("normal_sitting")
            .parse()?;
        let avatar = match self.pose.joint_positions {
            Some(map) => {
                let mut pos = Vec::with_capacity(sk.joints.len());
                for j in &sk.joints {
                    let p = map.get(j).ok_or_else(|| {
                        Error::validation("joint_positions", format!("missing joint `{j}`"))
                    })?;
                    pos.push(Vec3::new(p[0], p[1], p[2]));
                }
                if let Some(extra) = map.keys().find(|k| sk.joint_index(k).is_none()) {
                    return Err(Error::unknown("joint", extra.clone()));
                }
                let occupants = self.pose.occupants.unwrap_or_else(|| {
                    sk.presets
                        .get(name.as_str())
                        .map(|p| p.occupants)
                        .unwrap_or(1)
                });
                Avatar {
                    attributes,
                    pose: Pose {
                        name,
                        joint_positions: pos,
                        occupants,
                    },
                }
            }
            None => {
                for (k, a) in &attributes {
                    if !(a.length.is_finite() && a.length > 0.0) {
                        return Err(Error::validation(
                            "positive_attributes",
                            format!("{k} length must be > 0, got {}", a.length),
                        ));
                    }
                }
                let mut pose = preset_pose_with(name, &attributes)?;
                if let Some(n) = self.pose.occupants {
                    pose.occupants = n;
                }
                Avatar { attributes, pose }
            }
        };
        avatar.validate()?;
        Ok(avatar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_the_roster() {
        let sk = skeleton();
        assert_eq!(sk.joints.len(), 20);
        assert_eq!(sk.bones.len(), 19);
        assert_eq!(sk.joints[sk.root], "chest");
    }

    #[test]
    fn presets_preserve_bone_lengths() {
        for name in PoseName::PRESETS {
            Avatar::preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn rest_pose_is_175_tall() {
        let attrs = skeleton().default_attributes();
        let sk = skeleton();
        let mut pos = vec![Vec3::zeros(); sk.joints.len()];
        let rest = &sk.presets["rest"];
        for (b, bone) in sk.bones.iter().enumerate() {
            pos[bone.child] = pos[bone.parent] + rest.directions[b] * attrs[&bone.name].length;
        }
        let floor = sk
            .foot_joints
            .iter()
            .map(|&k| pos[k].y)
            .fold(f64::INFINITY, f64::min);
        let top = pos[sk.joint_index("head_top").unwrap()].y;
        assert!((top - floor - 1.75).abs() < 1e-3, "{}", top - floor);
    }

    #[test]
    fn normal_sitting_angles() {
        let a = Avatar::preset(PoseName::NormalSitting).unwrap();
        let m = a.measure();
        assert!((m.spine_leg_angle - 95.0).abs() < 1e-3);
        let knee = a.joint("knee_l");
        let thigh = a.joint("hip_l") - knee;
        let shank = a.joint("ankle_l") - knee;
        assert!((thigh.angle(&shank).to_degrees() - 90.0).abs() <= 2.0);
        assert!((m.hip_width - 0.38).abs() < 1e-12);
    }

    #[test]
    fn beach_and_bar_measurements() {
        let beach = Avatar::preset(PoseName::BeachLying).unwrap().measure();
        assert!((130.0..=160.0).contains(&beach.spine_leg_angle));
        let bar = Avatar::preset(PoseName::BarSitting).unwrap().measure();
        assert!(bar.hip_height >= 0.65);
    }

    #[test]
    fn doc_round_trip() {
        let a = Avatar::preset(PoseName::BeachLying).unwrap();
        let back = AvatarDoc::from_avatar(&a).into_avatar().unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn zero_length_doc_is_rejected() {
        let mut doc = AvatarDoc::default();
        doc.attributes.insert(
            "lower-leg.l".into(),
            BoneAttributes {
                length: 0.0,
                width: 0.1,
                thickness: 0.1,
            },
        );
        assert!(matches!(doc.into_avatar(), Err(Error::Validation { .. })));
    }
}
