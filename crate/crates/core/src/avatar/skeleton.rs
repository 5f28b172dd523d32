use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use super::BoneAttributes;
use crate::geometry::Vec3;

const DATA: &str = include_str!("../../data/avatar.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Center,
    L,
    R,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bone {
    /// `tag` for centre bones, `tag.l` / `tag.r` for sided ones.
    pub name: String,
    pub tag: String,
    pub side: Side,
    pub parent: usize,
    pub child: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub support_height: f64,
    pub occupants: u32,
    /// Unit parent→child direction per bone.
    pub directions: Vec<Vec3>,
}

/// The fixed rig: joint names, bones in parent-first order, default
/// attributes and preset pose tables.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub joints: Vec<String>,
    pub root: usize,
    pub bones: Vec<Bone>,
    /// Ankles and toes; the lowest of them rests on the support.
    pub foot_joints: Vec<usize>,
    pub presets: BTreeMap<String, Preset>,
    defaults: BTreeMap<String, BoneAttributes>,
    /// `parent_bone[j]` is the bone ending at joint `j` (none for the root).
    parent_bone: Vec<Option<usize>>,
}

#[derive(Deserialize)]
struct RawBone {
    tag: String,
    side: Side,
    parent: String,
    child: String,
}

#[derive(Deserialize)]
struct RawPreset {
    support_height: f64,
    occupants: u32,
    directions: BTreeMap<String, [f64; 3]>,
}

#[derive(Deserialize)]
struct RawSkeleton {
    joints: Vec<String>,
    root: String,
    bones: Vec<RawBone>,
    attributes: BTreeMap<String, BoneAttributes>,
    poses: BTreeMap<String, RawPreset>,
}

pub fn skeleton() -> &'static Skeleton {
    static SKELETON: OnceLock<Skeleton> = OnceLock::new();
    SKELETON.get_or_init(|| Skeleton::parse(DATA).expect("shipped skeleton data is valid"))
}

impl Skeleton {
    fn parse(text: &str) -> Result<Skeleton, String> {
        let raw: RawSkeleton = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let index = |n: &str| {
            raw.joints
                .iter()
                .position(|j| j == n)
                .ok_or(format!("unknown joint {n}"))
        };
        let root = index(&raw.root)?;
        let mut parent_bone = vec![None; raw.joints.len()];
        let mut placed = vec![false; raw.joints.len()];
        placed[root] = true;
        let mut bones = Vec::with_capacity(raw.bones.len());
        for (b, rb) in raw.bones.iter().enumerate() {
            let (parent, child) = (index(&rb.parent)?, index(&rb.child)?);
            if !placed[parent] || placed[child] {
                return Err(format!("bone {b} breaks the parent-first tree order"));
            }
            placed[child] = true;
            parent_bone[child] = Some(b);
            let name = match rb.side {
                Side::Center => rb.tag.clone(),
                Side::L => format!("{}.l", rb.tag),
                Side::R => format!("{}.r", rb.tag),
            };
            bones.push(Bone {
                name,
                tag: rb.tag.clone(),
                side: rb.side,
                parent,
                child,
            });
        }
        if placed.iter().any(|p| !p) {
            return Err("skeleton is not connected".into());
        }
        let mut presets = BTreeMap::new();
        for (name, rp) in raw.poses {
            let directions = bones
                .iter()
                .map(|b| {
                    rp.directions
                        .get(&b.name)
                        .map(|d| Vec3::new(d[0], d[1], d[2]).normalize())
                        .ok_or(format!("pose {name} lacks bone {}", b.name))
                })
                .collect::<Result<Vec<_>, _>>()?;
            presets.insert(
                name,
                Preset {
                    support_height: rp.support_height,
                    occupants: rp.occupants,
                    directions,
                },
            );
        }
        let foot_joints = raw
            .joints
            .iter()
            .enumerate()
            .filter(|(_, n)| n.starts_with("ankle") || n.starts_with("toe"))
            .map(|(i, _)| i)
            .collect();
        Ok(Skeleton {
            joints: raw.joints,
            root,
            bones,
            foot_joints,
            presets,
            defaults: raw.attributes,
            parent_bone,
        })
    }

    pub fn joint_index(&self, name: &str) -> Option<usize> {
        self.joints.iter().position(|j| j == name)
    }

    pub fn bone_index(&self, name: &str) -> Option<usize> {
        self.bones.iter().position(|b| b.name == name)
    }

    pub fn parent_bone(&self, joint: usize) -> Option<usize> {
        self.parent_bone[joint]
    }

    /// Bones starting at `joint`.
    pub fn child_bones(&self, joint: usize) -> impl Iterator<Item = usize> + '_ {
        self.bones
            .iter()
            .enumerate()
            .filter(move |(_, b)| b.parent == joint)
            .map(|(i, _)| i)
    }

    /// `joint` and every joint below it.
    pub fn subtree(&self, joint: usize) -> Vec<usize> {
        let mut out = vec![joint];
        let mut k = 0;
        while k < out.len() {
            let j = out[k];
            out.extend(self.child_bones(j).map(|b| self.bones[b].child));
            k += 1;
        }
        out
    }

    /// Bones named by `key`: a bone name selects itself, a tag selects every
    /// side.
    pub fn resolve(&self, key: &str) -> Vec<usize> {
        if let Some(b) = self.bone_index(key) {
            return vec![b];
        }
        self.bones
            .iter()
            .enumerate()
            .filter(|(_, b)| b.tag == key)
            .map(|(i, _)| i)
            .collect()
    }

    /// The opposite-side bone of a sided bone.
    pub fn mirror_of(&self, bone: usize) -> Option<usize> {
        let b = &self.bones[bone];
        let other = match b.side {
            Side::Center => return None,
            Side::L => Side::R,
            Side::R => Side::L,
        };
        self.bones
            .iter()
            .position(|o| o.tag == b.tag && o.side == other)
    }

    pub fn default_attributes(&self) -> BTreeMap<String, BoneAttributes> {
        self.bones
            .iter()
            .map(|b| (b.name.clone(), self.defaults[&b.tag]))
            .collect()
    }
}
