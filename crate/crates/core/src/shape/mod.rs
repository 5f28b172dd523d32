//! Part-based shape representation: tagged components with PCA proxies and
//! the spatial relation graph of contacts and symmetries.

mod contacts;
pub mod generator;
mod graph;
mod io;
mod symmetry;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use contacts::{detect_contacts, detect_contacts_with};
pub use graph::{build_graph, build_graph_with, GraphConfig, RelationGraph};
pub use io::{load_shape, load_shape_with, save_shape, shape_from_json, shape_to_json, ShapeDoc};
pub use symmetry::{bilateral_plane, detect_symmetries, EXTENT_REL_TOL};

use crate::error::{Error, Result};
use crate::geometry::{aabb_of, fit_proxy, Aabb, Plane, Proxy, Vec3};

/// Semantic component label; closed vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartTag {
    Seat,
    Back,
    Arm,
    Leg,
    Base,
    Headrest,
    Other,
}

impl PartTag {
    pub const ALL: [PartTag; 7] = [
        PartTag::Seat,
        PartTag::Back,
        PartTag::Arm,
        PartTag::Leg,
        PartTag::Base,
        PartTag::Headrest,
        PartTag::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PartTag::Seat => "seat",
            PartTag::Back => "back",
            PartTag::Arm => "arm",
            PartTag::Leg => "leg",
            PartTag::Base => "base",
            PartTag::Headrest => "headrest",
            PartTag::Other => "other",
        }
    }
}

impl fmt::Display for PartTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PartTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::unknown("tag", s))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub id: String,
    pub tag: PartTag,
    pub samples: Vec<Vec3>,
    pub faces: Option<Vec<[usize; 3]>>,
    pub proxy: Proxy,
}

impl Component {
    /// Builds a component and fits its proxy from the samples.
    pub fn new(id: impl Into<String>, tag: PartTag, samples: Vec<Vec3>) -> Result<Self> {
        let id = id.into();
        let proxy = fit_proxy(&samples)
            .map_err(|e| Error::validation(format!("component `{id}`"), e.to_string()))?;
        Ok(Component {
            id,
            tag,
            samples,
            faces: None,
            proxy,
        })
    }

    pub fn aabb(&self) -> Aabb {
        aabb_of(&self.samples).expect("component has samples")
    }
}

/// Shared near-coincident surface region between two components.
#[derive(Clone, Debug, PartialEq)]
pub struct Contact {
    pub comp_a: String,
    pub comp_b: String,
    /// At most `k_max` points of the region.
    pub points: Vec<Vec3>,
    /// Centroid of the full (un-subsampled) region.
    pub centroid: Vec3,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryEdge {
    pub comp_a: String,
    pub comp_b: String,
    pub plane: Plane,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    pub id: String,
    pub components: Vec<Component>,
    pub graph: RelationGraph,
    pub style_label: Option<String>,
}

impl Shape {
    /// Assembles a shape and builds its relation graph with `config`.
    pub fn new(
        id: impl Into<String>,
        components: Vec<Component>,
        style_label: Option<String>,
        config: &GraphConfig,
    ) -> Result<Self> {
        let mut shape = Shape {
            id: id.into(),
            components,
            graph: RelationGraph::default(),
            style_label,
        };
        shape.validate()?;
        shape.graph = build_graph_with(&shape, config);
        Ok(shape)
    }

    /// Checks id uniqueness, sample counts and graph references.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, c) in self.components.iter().enumerate() {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::parse(
                    format!("components[{i}].id"),
                    format!("duplicate component id `{}`", c.id),
                ));
            }
            if c.samples.len() < 4 {
                return Err(Error::parse(
                    format!("components[{i}].samples"),
                    format!(
                        "component `{}` has {} samples, need at least 4",
                        c.id,
                        c.samples.len()
                    ),
                ));
            }
        }
        for e in &self.graph.contact_edges {
            for id in [&e.comp_a, &e.comp_b] {
                if !seen.contains(id.as_str()) {
                    return Err(Error::unknown("component", id.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn components_tagged(&self, tag: PartTag) -> impl Iterator<Item = (usize, &Component)> {
        self.components
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.tag == tag)
    }

    pub fn has_tag(&self, tag: PartTag) -> bool {
        self.components.iter().any(|c| c.tag == tag)
    }

    pub fn all_samples(&self) -> impl Iterator<Item = &Vec3> {
        self.components.iter().flat_map(|c| c.samples.iter())
    }

    pub fn aabb(&self) -> Aabb {
        aabb_of(self.all_samples()).expect("shape has samples")
    }

    /// Bounding-box diagonal of all samples.
    pub fn diagonal(&self) -> f64 {
        self.aabb().diagonal()
    }

    /// Centroid of all samples.
    pub fn centroid(&self) -> Vec3 {
        let (sum, n) = self
            .all_samples()
            .fold((Vec3::zeros(), 0usize), |(s, n), p| (s + p, n + 1));
        sum / n as f64
    }
}
