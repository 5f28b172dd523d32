use super::{Component, Shape, SymmetryEdge};
use crate::geometry::{Plane, Vec3};

/// Maximum relative half-extent mismatch for a mirror match.
pub const EXTENT_REL_TOL: f64 = 0.05;

/// The lateral mirror plane `x = centroid.x` of all samples. Shapes are
/// assumed pre-aligned (x lateral, y up, z front).
pub fn bilateral_plane(shape: &Shape) -> Plane {
    plane_of(&shape.components)
}

pub(crate) fn plane_of(components: &[Component]) -> Plane {
    let (sum, n) = components
        .iter()
        .flat_map(|c| c.samples.iter())
        .fold((Vec3::zeros(), 0usize), |(s, n), p| (s + p, n + 1));
    let cx = if n == 0 { 0.0 } else { sum.x / n as f64 };
    Plane::new(Vec3::new(cx, 0.0, 0.0), Vec3::x())
}

pub fn detect_symmetries(shape: &Shape, tolerance: f64) -> Vec<SymmetryEdge> {
    detect_symmetries_in(&shape.components, tolerance)
}

/// Same-tag component pairs (including a component with itself) whose
/// proxies coincide after reflection across the bilateral plane.
pub(crate) fn detect_symmetries_in(components: &[Component], tolerance: f64) -> Vec<SymmetryEdge> {
    let plane = plane_of(components);
    let mut out = Vec::new();
    for i in 0..components.len() {
        let mirrored = components[i].proxy.mirrored(&plane);
        for j in i..components.len() {
            if components[i].tag != components[j].tag {
                continue;
            }
            if mirrored.matches(&components[j].proxy, tolerance, EXTENT_REL_TOL) {
                out.push(SymmetryEdge {
                    comp_a: components[i].id.clone(),
                    comp_b: components[j].id.clone(),
                    plane,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{GraphConfig, PartTag};

    fn slab(x0: f64, x1: f64, tilt_samples: bool) -> Vec<Vec3> {
        let mut pts = Vec::new();
        for i in 0..=6 {
            for j in 0..=6 {
                let x = x0 + (x1 - x0) * i as f64 / 6.0;
                let y = j as f64 / 6.0;
                pts.push(Vec3::new(x, y, 0.0));
                pts.push(Vec3::new(x, y, 0.1));
            }
        }
        if tilt_samples {
            // Extra weight near x1 moves the centroid off the box center.
            for j in 0..40 {
                pts.push(Vec3::new(x1, j as f64 / 40.0, 0.05));
            }
        }
        pts
    }

    #[test]
    fn single_component_off_plane_has_no_symmetry() {
        let c = Component::new("solo", PartTag::Other, slab(0.0, 1.0, true)).unwrap();
        let shape = Shape::new("s", vec![c], None, &GraphConfig::default()).unwrap();
        assert!(detect_symmetries(&shape, 0.01).is_empty());
    }

    #[test]
    fn mirrored_pair_is_found() {
        let l = Component::new("l", PartTag::Arm, slab(-1.0, -0.8, false)).unwrap();
        let r = Component::new("r", PartTag::Arm, slab(0.8, 1.0, false)).unwrap();
        let shape = Shape::new("s", vec![l, r], None, &GraphConfig::default()).unwrap();
        let edges = detect_symmetries(&shape, 0.01);
        assert_eq!(edges.len(), 1);
        assert_eq!(
            (edges[0].comp_a.as_str(), edges[0].comp_b.as_str()),
            ("l", "r")
        );
    }

    #[test]
    fn different_tags_never_pair() {
        let l = Component::new("l", PartTag::Arm, slab(-1.0, -0.8, false)).unwrap();
        let r = Component::new("r", PartTag::Leg, slab(0.8, 1.0, false)).unwrap();
        let shape = Shape::new("s", vec![l, r], None, &GraphConfig::default()).unwrap();
        assert!(detect_symmetries(&shape, 0.01).is_empty());
    }
}
