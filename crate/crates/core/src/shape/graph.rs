use std::collections::{BTreeMap, BTreeSet};

use super::contacts::{detect_contacts_with, DEFAULT_K_MAX};
use super::symmetry::detect_symmetries_in;
use super::{Component, Contact, Shape, SymmetryEdge};
use crate::geometry::aabb_of;

/// Contact and symmetry detection settings. `None` tolerances resolve per
/// shape: ε is 1% of the bounding-box diagonal, the symmetry tolerance is ε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphConfig {
    pub epsilon: Option<f64>,
    pub epsilon_rel: f64,
    pub k_max: usize,
    pub symmetry_tolerance: Option<f64>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            epsilon: None,
            epsilon_rel: 0.01,
            k_max: DEFAULT_K_MAX,
            symmetry_tolerance: None,
        }
    }
}

impl GraphConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        GraphConfig {
            epsilon: Some(epsilon),
            ..Self::default()
        }
    }

    pub fn resolve_epsilon(&self, components: &[Component]) -> f64 {
        self.epsilon.unwrap_or_else(|| {
            let diag = aabb_of(components.iter().flat_map(|c| c.samples.iter()))
                .map(|b| b.diagonal())
                .unwrap_or(0.0);
            (self.epsilon_rel * diag).max(1e-9)
        })
    }
}

/// Spatial relation graph: components as nodes, contacts and mirror pairs as
/// edges.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelationGraph {
    pub nodes: Vec<String>,
    pub contact_edges: Vec<Contact>,
    pub symmetry_edges: Vec<SymmetryEdge>,
    /// Contact distance the graph was built with.
    pub epsilon: f64,
    /// Mirror-match tolerance the graph was built with.
    pub symmetry_tolerance: f64,
}

pub fn build_graph(shape: &Shape, epsilon: f64) -> RelationGraph {
    build_graph_with(shape, &GraphConfig::with_epsilon(epsilon))
}

pub fn build_graph_with(shape: &Shape, config: &GraphConfig) -> RelationGraph {
    let eps = config.resolve_epsilon(&shape.components);
    let sym_tol = config.symmetry_tolerance.unwrap_or(eps);
    let graph = RelationGraph {
        nodes: shape.components.iter().map(|c| c.id.clone()).collect(),
        contact_edges: detect_contacts_with(&shape.components, eps, config.k_max),
        symmetry_edges: detect_symmetries_in(&shape.components, sym_tol),
        epsilon: eps,
        symmetry_tolerance: sym_tol,
    };
    if !graph.is_connected() {
        log::warn!(
            "shape `{}`: contact graph has {} connected components",
            shape.id,
            graph.connected_components().len()
        );
    }
    graph
}

impl RelationGraph {
    /// Contact-graph adjacency, neighbours in id order.
    pub fn adjacency(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut adj: BTreeMap<&str, BTreeSet<&str>> = self
            .nodes
            .iter()
            .map(|n| (n.as_str(), BTreeSet::new()))
            .collect();
        for e in &self.contact_edges {
            adj.entry(&e.comp_a).or_default().insert(&e.comp_b);
            adj.entry(&e.comp_b).or_default().insert(&e.comp_a);
        }
        adj
    }

    pub fn contact_degree(&self, id: &str) -> usize {
        self.contact_edges
            .iter()
            .filter(|e| e.comp_a == id || e.comp_b == id)
            .count()
    }

    /// Indices of contact edges touching `id`.
    pub fn contacts_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.contact_edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.comp_a == id || e.comp_b == id)
            .map(|(i, _)| i)
    }

    /// The mirror partner of `id`, if it is paired with a different component.
    pub fn mirror_partner(&self, id: &str) -> Option<&SymmetryEdge> {
        self.symmetry_edges
            .iter()
            .find(|e| e.comp_a != e.comp_b && (e.comp_a == id || e.comp_b == id))
    }

    /// Connected components of the contact graph, each sorted, ordered by
    /// their smallest id.
    pub fn connected_components(&self) -> Vec<Vec<String>> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut out = Vec::new();
        for start in adj.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![*start];
            seen.insert(start);
            while let Some(n) = stack.pop() {
                comp.push(n.to_string());
                for m in &adj[n] {
                    if seen.insert(m) {
                        stack.push(m);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::shape::PartTag;

    fn block(origin: Vec3) -> Vec<Vec3> {
        let mut pts = Vec::new();
        for i in 0..=4 {
            for j in 0..=4 {
                for k in 0..=4 {
                    pts.push(origin + Vec3::new(i as f64, j as f64, k as f64) * 0.25);
                }
            }
        }
        pts
    }

    fn shape_of(origins: &[Vec3]) -> Shape {
        let comps = origins
            .iter()
            .enumerate()
            .map(|(i, o)| Component::new(format!("c{i}"), PartTag::Other, block(*o)).unwrap())
            .collect();
        Shape::new("t", comps, None, &GraphConfig::with_epsilon(0.01)).unwrap()
    }

    #[test]
    fn two_touching_cubes() {
        let s = shape_of(&[Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)]);
        assert_eq!(s.graph.nodes.len(), 2);
        assert_eq!(s.graph.contact_edges.len(), 1);
        assert!(s.graph.is_connected());
    }

    #[test]
    fn distant_components_are_disconnected() {
        let s = shape_of(&[
            Vec3::zeros(),
            Vec3::new(3.0, 0.0, 0.0),
            Vec3::new(0.0, 5.0, 0.0),
        ]);
        assert!(s.graph.contact_edges.is_empty());
        assert_eq!(s.graph.connected_components().len(), 3);
    }
}
