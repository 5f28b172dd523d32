use std::collections::BTreeSet;

use ergofit_core::geometry::Vec3;
use ergofit_core::shape::generator::{generate_chair, generate_corpus, ChairParams, ChairStyle};
use ergofit_core::shape::{bilateral_plane, load_shape, save_shape, PartTag, Shape};

/// Unordered id pairs with some sample of one within ε of a sample of the
/// other, by exhaustive scan.
fn brute_force_pairs(shape: &Shape, eps: f64) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    let comps = &shape.components;
    for i in 0..comps.len() {
        for j in (i + 1)..comps.len() {
            let hit = comps[i]
                .samples
                .iter()
                .any(|p| comps[j].samples.iter().any(|q| (p - q).norm() <= eps));
            if hit {
                out.insert((comps[i].id.clone(), comps[j].id.clone()));
            }
        }
    }
    out
}

fn detected_pairs(shape: &Shape) -> BTreeSet<(String, String)> {
    shape
        .graph
        .contact_edges
        .iter()
        .map(|c| (c.comp_a.clone(), c.comp_b.clone()))
        .collect()
}

#[test]
fn contacts_match_brute_force_on_corpus() {
    for shape in generate_corpus(2, 100).unwrap() {
        assert_eq!(
            detected_pairs(&shape),
            brute_force_pairs(&shape, shape.graph.epsilon),
            "{}",
            shape.id
        );
    }
}

#[test]
fn contact_points_lie_near_both_components() {
    let shape = generate_chair(ChairStyle::Office, &ChairParams::default(), 4).unwrap();
    let eps = shape.graph.epsilon;
    for c in &shape.graph.contact_edges {
        assert!(!c.points.is_empty() && c.points.len() <= 16);
        let a = &shape.components[shape.component_index(&c.comp_a).unwrap()];
        let b = &shape.components[shape.component_index(&c.comp_b).unwrap()];
        for p in &c.points {
            let near = |s: &[Vec3]| {
                s.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            };
            // A region point is a sample of one side and within ε of the other.
            let (da, db) = (near(&a.samples), near(&b.samples));
            assert!(
                da.min(db) == 0.0 && da.max(db) <= eps,
                "{} {}",
                c.comp_a,
                c.comp_b
            );
        }
    }
}

#[test]
fn office_chair_legs_and_back_touch_seat() {
    let shape = generate_chair(ChairStyle::Office, &ChairParams::default(), 1).unwrap();
    let pairs = brute_force_pairs(&shape, shape.graph.epsilon);
    let touches_seat = |id: &str| {
        pairs
            .iter()
            .any(|(a, b)| (a == id && b == "seat") || (b == id && a == "seat"))
    };
    for id in ["leg_fl", "leg_fr", "leg_bl", "leg_br", "back"] {
        assert!(touches_seat(id), "{id}");
    }
    assert!(shape.graph.is_connected());
    assert_eq!(shape.graph.nodes.len(), 9);
}

/// Mirror oracle on raw samples: reflect a's samples and require every
/// reflected point to be near b's sample set, and vice versa.
fn samples_mirror(shape: &Shape, a: &str, b: &str, tol: f64) -> bool {
    let plane = bilateral_plane(shape);
    let ca = &shape.components[shape.component_index(a).unwrap()];
    let cb = &shape.components[shape.component_index(b).unwrap()];
    let near = |p: &Vec3, set: &[Vec3]| set.iter().any(|q| (p - q).norm() <= tol);
    ca.samples
        .iter()
        .all(|p| near(&plane.reflect_point(p), &cb.samples))
        && cb
            .samples
            .iter()
            .all(|p| near(&plane.reflect_point(p), &ca.samples))
}

#[test]
fn leg_and_arm_pairs_are_mirror_symmetric() {
    let shape = generate_chair(ChairStyle::Office, &ChairParams::default(), 2).unwrap();
    let edges: BTreeSet<(String, String)> = shape
        .graph
        .symmetry_edges
        .iter()
        .map(|e| (e.comp_a.clone(), e.comp_b.clone()))
        .collect();
    for (a, b) in [
        ("arm_l", "arm_r"),
        ("leg_bl", "leg_br"),
        ("leg_fl", "leg_fr"),
    ] {
        let key = if shape.component_index(a) < shape.component_index(b) {
            (a, b)
        } else {
            (b, a)
        };
        assert!(
            edges.contains(&(key.0.to_string(), key.1.to_string())),
            "{a}/{b} missing"
        );
        assert!(
            samples_mirror(&shape, a, b, 1e-9),
            "{a}/{b} samples not mirrored"
        );
    }
    // Every reported pair passes the sample oracle at contact scale.
    for e in &shape.graph.symmetry_edges {
        assert!(
            samples_mirror(&shape, &e.comp_a, &e.comp_b, shape.graph.epsilon),
            "{} {}",
            e.comp_a,
            e.comp_b
        );
    }
}

#[test]
fn save_load_round_trip_is_identity_on_corpus() {
    let dir = tempfile::tempdir().unwrap();
    for shape in generate_corpus(3, 40).unwrap() {
        let path = dir.path().join(format!("{}.json", shape.id));
        save_shape(&shape, &path).unwrap();
        let back = load_shape(&path).unwrap();
        assert_eq!(back, shape, "{}", shape.id);
    }
}

#[test]
fn style_proportions_hold() {
    for shape in generate_corpus(5, 9).unwrap() {
        let seat = shape.components_tagged(PartTag::Seat).next().unwrap().1;
        let top = seat.proxy.top_height();
        let width = seat.proxy.extent_toward(&Vec3::x());
        match shape.style_label.as_deref().unwrap() {
            "office" => assert!((0.42..=0.50).contains(&top)),
            "bench" => assert!(width >= 1.2),
            "bar" => assert!((0.70..=0.85).contains(&top)),
            "beach" => assert!(shape.has_tag(PartTag::Back)),
            other => panic!("unexpected label {other}"),
        }
    }
}
