use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{aabb_of, Aabb, AffineTransform, Vec3};
use crate::shape::{PartTag, Shape, EXTENT_REL_TOL};

/// Coarse part grouping used for energies: legs and base count as one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticPart {
    Seat,
    Back,
    Arm,
    Base,
    Other,
}

impl SemanticPart {
    pub fn as_str(&self) -> &'static str {
        match self {
            SemanticPart::Seat => "seat",
            SemanticPart::Back => "back",
            SemanticPart::Arm => "arm",
            SemanticPart::Base => "base",
            SemanticPart::Other => "other",
        }
    }
}

impl fmt::Display for SemanticPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn part_of(tag: PartTag) -> SemanticPart {
    match tag {
        PartTag::Seat => SemanticPart::Seat,
        PartTag::Back | PartTag::Headrest => SemanticPart::Back,
        PartTag::Arm => SemanticPart::Arm,
        PartTag::Leg | PartTag::Base => SemanticPart::Base,
        PartTag::Other => SemanticPart::Other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartBoxes {
    pub before: Aabb,
    pub after: Aabb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeformationRecord {
    pub parts: BTreeMap<SemanticPart, PartBoxes>,
    /// Final transform per component id.
    pub transforms: BTreeMap<String, AffineTransform>,
}

impl DeformationRecord {
    /// Part boxes of `before` and `after`, which must list the same
    /// components in the same order.
    pub fn new(before: &Shape, after: &Shape, transforms: &[AffineTransform]) -> Self {
        let mut groups: BTreeMap<SemanticPart, (Vec<&Vec3>, Vec<&Vec3>)> = BTreeMap::new();
        for (b, a) in before.components.iter().zip(&after.components) {
            let g = groups.entry(part_of(b.tag)).or_default();
            g.0.extend(&b.samples);
            g.1.extend(&a.samples);
        }
        let parts = groups
            .into_iter()
            .map(|(part, (b, a))| {
                let boxes = PartBoxes {
                    before: aabb_of(b).expect("components have samples"),
                    after: aabb_of(a).expect("components have samples"),
                };
                (part, boxes)
            })
            .collect();
        let transforms = before
            .components
            .iter()
            .zip(transforms)
            .map(|(c, t)| (c.id.clone(), *t))
            .collect();
        DeformationRecord { parts, transforms }
    }
}

/// Separation of one contact after deformation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactSeparation {
    pub comp_a: String,
    pub comp_b: String,
    /// `max_p |T_a(p) − T_b(p)|` over the contact points.
    pub pointwise: f64,
    /// Hausdorff distance between the two deformed point sets.
    pub hausdorff: f64,
}

/// Per contact edge of `original`, how far the two components' images of
/// the contact points drifted apart under `transforms`.
pub fn contact_separation(
    original: &Shape,
    transforms: &BTreeMap<String, AffineTransform>,
) -> Vec<ContactSeparation> {
    let identity = AffineTransform::identity();
    original
        .graph
        .contact_edges
        .iter()
        .map(|e| {
            let ta = transforms.get(&e.comp_a).unwrap_or(&identity);
            let tb = transforms.get(&e.comp_b).unwrap_or(&identity);
            let a: Vec<Vec3> = e.points.iter().map(|p| ta.apply(p)).collect();
            let b: Vec<Vec3> = e.points.iter().map(|p| tb.apply(p)).collect();
            let pointwise = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            ContactSeparation {
                comp_a: e.comp_a.clone(),
                comp_b: e.comp_b.clone(),
                pointwise,
                hausdorff: directed(&a, &b).max(directed(&b, &a)),
            }
        })
        .collect()
}

fn directed(from: &[Vec3], to: &[Vec3]) -> f64 {
    from.iter()
        .map(|p| {
            to.iter()
                .map(|q| (p - q).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// For each symmetry edge of `shape`, whether the (deformed) proxies still
/// mirror each other within the detection tolerance.
pub fn mirror_match(shape: &Shape) -> Vec<(String, String, bool)> {
    let g = &shape.graph;
    g.symmetry_edges
        .iter()
        .map(|e| {
            let ok = match (
                shape.component_index(&e.comp_a),
                shape.component_index(&e.comp_b),
            ) {
                (Some(a), Some(b)) => shape.components[a].proxy.mirrored(&e.plane).matches(
                    &shape.components[b].proxy,
                    g.symmetry_tolerance,
                    EXTENT_REL_TOL,
                ),
                _ => false,
            };
            (e.comp_a.clone(), e.comp_b.clone(), ok)
        })
        .collect()
}
