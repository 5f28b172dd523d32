//! Report and table formats shared by the CLI and the service.

use std::path::Path;

use ergofit_core::analytics::{CostVector, Embedding2D, Evaluation, RankEntry};
use ergofit_core::avatar::{Avatar, AvatarDoc, PoseName};
use ergofit_core::ergo::{check_constraint, ConstraintGroup};
use ergofit_core::shape::{load_shape_with, GraphConfig, Shape};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::AppError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintLine {
    pub group: String,
    pub kind: String,
    pub tag: String,
    pub target: f64,
    pub band: (f64, f64),
    pub component: String,
    pub measured: f64,
    pub violation: f64,
    pub satisfied: bool,
    pub conflict: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartLine {
    pub part: String,
    pub delta_s: [f64; 3],
    pub delta_t: [f64; 3],
    pub e: f64,
}

/// Outcome of reshaping one shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformReport {
    pub shape_id: String,
    pub constraints: Vec<ConstraintLine>,
    pub parts: Vec<PartLine>,
    pub energy: f64,
    pub conflicts: usize,
}

impl DeformReport {
    pub fn new(eval: &Evaluation) -> Result<Self, AppError> {
        let shape = &eval.reshaped.shape;
        let mut constraints = Vec::new();
        for o in &eval.reshaped.outcomes {
            let c = &o.constraint;
            // Measured on the output geometry.
            let check = check_constraint(c, shape)?;
            constraints.push(ConstraintLine {
                group: c.kind.group().to_string(),
                kind: c.kind.to_string(),
                tag: c.target_tag.to_string(),
                target: c.target_value,
                band: c.band,
                component: check.component,
                measured: check.measured,
                violation: check.violation,
                satisfied: check.satisfied,
                conflict: o.conflict,
            });
        }
        Ok(DeformReport {
            shape_id: shape.id.clone(),
            conflicts: constraints.iter().filter(|c| c.conflict).count(),
            constraints,
            parts: eval
                .parts
                .iter()
                .map(|p| PartLine {
                    part: p.part.to_string(),
                    delta_s: p.delta_s,
                    delta_t: p.delta_t,
                    e: p.e,
                })
                .collect(),
            energy: eval.energy,
        })
    }
}

/// Constraint sets as one line per constraint.
pub fn dump_constraints(groups: &[ConstraintGroup]) -> String {
    let mut out = String::new();
    for g in groups {
        out += &format!("[{}]\n", g.name);
        for c in &g.constraints {
            out += &format!(
                "{} on {}: target {:.4}, band [{:.4}, {:.4}]\n",
                c.kind, c.target_tag, c.target_value, c.band.0, c.band.1
            );
        }
    }
    out
}

/// Hex SHA-256 of the avatar's canonical document.
pub fn avatar_hash(avatar: &Avatar) -> String {
    let doc =
        serde_json::to_vec(&AvatarDoc::from_avatar(avatar)).expect("avatar documents serialise");
    Sha256::digest(&doc)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Every `*.json` shape in `dir`, in file-name order.
pub fn load_collection(dir: &Path, graph: &GraphConfig) -> Result<Vec<Shape>, AppError> {
    let entries = std::fs::read_dir(dir).map_err(|e| AppError::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| AppError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(AppError::Usage(format!(
            "no shape files in {}",
            dir.display()
        )));
    }
    let shapes = paths
        .iter()
        .map(|p| load_shape_with(p, graph))
        .collect::<Result<Vec<_>, _>>()?;
    let mut ids: Vec<&str> = shapes.iter().map(|s| s.id.as_str()).collect();
    ids.sort();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(AppError::Usage(format!(
            "duplicate shape id `{}` in {}",
            w[0],
            dir.display()
        )));
    }
    Ok(shapes)
}

fn csv_err(e: csv::Error) -> AppError {
    AppError::Runtime(format!("csv: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, AppError> {
    let bytes = w
        .into_inner()
        .map_err(|e| AppError::Runtime(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

/// Energies print in shortest round-trip form; failures as `inf`.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "inf".into()
    }
}

pub fn ranking_csv(ranking: &[RankEntry]) -> Result<String, AppError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "shape_id", "energy"])
        .map_err(csv_err)?;
    for (i, e) in ranking.iter().enumerate() {
        w.write_record([(i + 1).to_string(), e.shape_id.clone(), num(e.energy)])
            .map_err(csv_err)?;
    }
    finish(w)
}

fn pose_header(first: &str, poses: &[PoseName]) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain(poses.iter().map(|p| p.to_string()))
        .collect()
}

pub fn classify_csv(
    vectors: &[CostVector],
    labels: &[(String, Option<PoseName>)],
) -> Result<String, AppError> {
    let poses = vectors.first().map(|v| v.poses.clone()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = pose_header("shape_id", &poses);
    header.push("label".into());
    w.write_record(&header).map_err(csv_err)?;
    for (v, (_, label)) in vectors.iter().zip(labels) {
        let mut row = vec![v.shape_id.clone()];
        row.extend(v.costs.iter().map(|c| num(*c)));
        row.push(label.map_or("none".to_string(), |p| p.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

pub fn embed_csv(vectors: &[CostVector], emb: &Embedding2D) -> Result<String, AppError> {
    let poses = vectors.first().map(|v| v.poses.clone()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = pose_header("shape_id", &poses);
    header.extend(["u", "v", "stress"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    for (v, c) in vectors.iter().zip(&emb.coords) {
        let mut row = vec![v.shape_id.clone()];
        row.extend(v.costs.iter().map(|c| num(*c)));
        row.extend([num(c[0]), num(c[1]), num(emb.stress)]);
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}
