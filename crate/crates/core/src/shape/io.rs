use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Component, GraphConfig, PartTag, Shape};
use crate::error::{Error, Result};
use crate::geometry::{fit_proxy, OrientedBox, Proxy, Vec3};

/// On-disk shape document. Floats are written in shortest round-trip form, so
/// a reload reproduces every coordinate bit for bit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShapeDoc {
    pub id: String,
    pub up_axis: String,
    pub lateral_axis: String,
    pub components: Vec<ComponentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub style_label: Option<String>,
    /// Contact distance the relation graph was built with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_tolerance: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub id: String,
    pub tag: String,
    pub samples: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<[usize; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proxy: Option<ProxyDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProxyDoc {
    Cuboid {
        center: [f64; 3],
        axes: [[f64; 3]; 3],
        half_extents: [f64; 3],
    },
    Cylinder {
        center: [f64; 3],
        axis: [f64; 3],
        radius: f64,
        half_length: f64,
    },
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn vec(a: &[f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

impl From<&Proxy> for ProxyDoc {
    fn from(p: &Proxy) -> Self {
        match p {
            Proxy::Cuboid(b) => ProxyDoc::Cuboid {
                center: arr(&b.center),
                axes: b.axes.map(|a| arr(&a)),
                half_extents: b.half_extents,
            },
            Proxy::Cylinder {
                center,
                axis,
                radius,
                half_length,
            } => ProxyDoc::Cylinder {
                center: arr(center),
                axis: arr(axis),
                radius: *radius,
                half_length: *half_length,
            },
        }
    }
}

impl From<&ProxyDoc> for Proxy {
    fn from(p: &ProxyDoc) -> Self {
        match p {
            ProxyDoc::Cuboid {
                center,
                axes,
                half_extents,
            } => Proxy::Cuboid(OrientedBox {
                center: vec(center),
                axes: axes.map(|a| vec(&a)),
                half_extents: *half_extents,
            }),
            ProxyDoc::Cylinder {
                center,
                axis,
                radius,
                half_length,
            } => Proxy::Cylinder {
                center: vec(center),
                axis: vec(axis),
                radius: *radius,
                half_length: *half_length,
            },
        }
    }
}

impl ShapeDoc {
    pub fn from_shape(shape: &Shape) -> Self {
        ShapeDoc {
            id: shape.id.clone(),
            up_axis: "y".into(),
            lateral_axis: "x".into(),
            components: shape
                .components
                .iter()
                .map(|c| ComponentDoc {
                    id: c.id.clone(),
                    tag: c.tag.as_str().into(),
                    samples: c.samples.iter().map(arr).collect(),
                    faces: c.faces.clone(),
                    proxy: Some((&c.proxy).into()),
                })
                .collect(),
            style_label: shape.style_label.clone(),
            epsilon: Some(shape.graph.epsilon),
            symmetry_tolerance: Some(shape.graph.symmetry_tolerance),
        }
    }

    /// Validates the document and builds the shape. Without a stored ε the
    /// graph is built with `config`.
    pub fn into_shape(self, config: &GraphConfig) -> Result<Shape> {
        if self.up_axis != "y" {
            return Err(Error::parse(
                "up_axis",
                format!("expected \"y\", got {:?}", self.up_axis),
            ));
        }
        if self.lateral_axis != "x" {
            return Err(Error::parse(
                "lateral_axis",
                format!("expected \"x\", got {:?}", self.lateral_axis),
            ));
        }
        let mut components = Vec::with_capacity(self.components.len());
        for (i, c) in self.components.into_iter().enumerate() {
            let tag: PartTag = c.tag.parse().map_err(|_| {
                Error::parse(
                    format!("components[{i}].tag"),
                    format!("unknown tag `{}`", c.tag),
                )
            })?;
            let samples: Vec<Vec3> = c.samples.iter().map(vec).collect();
            if samples.len() < 4 {
                return Err(Error::parse(
                    format!("components[{i}].samples"),
                    format!("component `{}` needs at least 4 samples", c.id),
                ));
            }
            if let Some(faces) = &c.faces {
                if let Some(bad) = faces.iter().flatten().find(|&&k| k >= samples.len()) {
                    return Err(Error::parse(
                        format!("components[{i}].faces"),
                        format!("vertex index {bad} out of range"),
                    ));
                }
            }
            let proxy = match &c.proxy {
                Some(p) => p.into(),
                None => fit_proxy(&samples)
                    .map_err(|e| Error::parse(format!("components[{i}].samples"), e.to_string()))?,
            };
            components.push(Component {
                id: c.id,
                tag,
                samples,
                faces: c.faces,
                proxy,
            });
        }
        let mut cfg = *config;
        if self.epsilon.is_some() {
            cfg.epsilon = self.epsilon;
        }
        if self.symmetry_tolerance.is_some() {
            cfg.symmetry_tolerance = self.symmetry_tolerance;
        }
        Shape::new(self.id, components, self.style_label, &cfg)
    }
}

pub fn shape_to_json(shape: &Shape) -> String {
    serde_json::to_string(&ShapeDoc::from_shape(shape)).expect("shape document serializes")
}

pub fn shape_from_json(text: &str) -> Result<Shape> {
    shape_from_json_with(text, &GraphConfig::default())
}

fn shape_from_json_with(text: &str, config: &GraphConfig) -> Result<Shape> {
    let doc: ShapeDoc = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        // serde names the offending field in its message; keep it whole.
        Error::parse(field_hint(&msg), msg)
    })?;
    doc.into_shape(config)
}

fn field_hint(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or("document").to_string()
}

pub fn load_shape(path: impl AsRef<Path>) -> Result<Shape> {
    load_shape_with(path, &GraphConfig::default())
}

pub fn load_shape_with(path: impl AsRef<Path>, config: &GraphConfig) -> Result<Shape> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    shape_from_json_with(&text, config)
}

pub fn save_shape(shape: &Shape, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, shape_to_json(shape)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
