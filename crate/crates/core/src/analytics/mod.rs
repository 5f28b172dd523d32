//! Deformation energies, per-pose cost vectors, ranking, distances,
//! embedding, pose classification and multi-category co-retrieval.

mod energy;
mod mds;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use energy::{part_energy, record_energies, shape_energy, PartEnergy};
pub use mds::{mds_embed, Embedding2D};

use crate::avatar::{Avatar, BodyMeasurements, PoseName};
use crate::ergo::{derive_constraints, top_height_constraints, ConstraintGroup, ErgoConfig};
use crate::error::{Error, Result};
use crate::geometry::{AffineTransform, Vec3};
use crate::reshaper::{propagate_with, ReshapeConfig, Reshaped};
use crate::shape::{PartTag, Shape};

/// Settings shared by every pipeline entry point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub ergo: ErgoConfig,
    pub reshape: ReshapeConfig,
}

/// One shape reshaped for one body.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub groups: Vec<ConstraintGroup>,
    pub reshaped: Reshaped,
    pub parts: Vec<PartEnergy>,
    pub energy: f64,
}

/// Reshapes `shape` toward `groups` and scores the result.
pub fn evaluate_groups(
    shape: &Shape,
    groups: Vec<ConstraintGroup>,
    cfg: &PipelineConfig,
) -> Result<Evaluation> {
    let reshaped = propagate_with(shape, &groups, &cfg.reshape)?;
    let parts = record_energies(&reshaped.record, shape.diagonal())?;
    let energy = shape_energy(&parts)?;
    Ok(Evaluation {
        groups,
        reshaped,
        parts,
        energy,
    })
}

/// Seat-based reshaping for a body with measurements `m`.
pub fn evaluate(shape: &Shape, m: &BodyMeasurements, cfg: &PipelineConfig) -> Result<Evaluation> {
    let groups = derive_constraints(m, shape, &cfg.ergo)?;
    evaluate_groups(shape, groups, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostVector {
    pub shape_id: String,
    pub poses: Vec<PoseName>,
    /// Shape energy per pose; `+inf` where reshaping failed.
    pub costs: Vec<f64>,
    pub failed: Vec<bool>,
}

impl CostVector {
    /// Index of the cheapest pose (first on ties).
    pub fn argmin(&self) -> Option<usize> {
        (0..self.costs.len())
            .min_by(|&a, &b| self.costs[a].total_cmp(&self.costs[b]).then(a.cmp(&b)))
    }

    pub fn min(&self) -> f64 {
        self.costs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Energy of `shape` under each preset pose of `avatar`'s body, every entry
/// reshaped from the original shape.
pub fn cost_vector(
    shape: &Shape,
    avatar: &Avatar,
    poses: &[PoseName],
    cfg: &PipelineConfig,
) -> Result<CostVector> {
    if poses.is_empty() {
        return Err(Error::Empty("poses"));
    }
    let measurements = poses
        .iter()
        .map(|&p| avatar.with_preset(p).map(|a| a.measure()))
        .collect::<Result<Vec<_>>>()?;
    let results: Vec<Result<f64>> = measurements
        .par_iter()
        .map(|m| evaluate(shape, m, cfg).map(|e| e.energy))
        .collect();
    let mut costs = Vec::with_capacity(poses.len());
    let mut failed = Vec::with_capacity(poses.len());
    for (r, p) in results.into_iter().zip(poses) {
        match r {
            Ok(e) => {
                costs.push(e);
                failed.push(false);
            }
            Err(err) => {
                log::warn!("shape `{}` under {p}: {err}", shape.id);
                costs.push(f64::INFINITY);
                failed.push(true);
            }
        }
    }
    Ok(CostVector {
        shape_id: shape.id.clone(),
        poses: poses.to_vec(),
        costs,
        failed,
    })
}

/// Cost vectors for a whole collection, in collection order.
pub fn cost_vectors(
    collection: &[Shape],
    avatar: &Avatar,
    poses: &[PoseName],
    cfg: &PipelineConfig,
) -> Result<Vec<CostVector>> {
    collection
        .par_iter()
        .map(|s| cost_vector(s, avatar, poses, cfg))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub shape_id: String,
    pub energy: f64,
}

fn sort_entries(entries: &mut [RankEntry]) {
    entries.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then_with(|| a.shape_id.cmp(&b.shape_id))
    });
}

/// Collection ordered by ascending energy for `avatar` in its current pose;
/// ties go by shape id and failed reshapes rank last.
pub fn rank(collection: &[Shape], avatar: &Avatar, cfg: &PipelineConfig) -> Vec<RankEntry> {
    let m = avatar.measure();
    rank_by(collection, cfg, |s| derive_constraints(&m, s, &cfg.ergo))
}

/// Ranking under an arbitrary per-shape constraint mapping.
pub fn rank_by<F>(collection: &[Shape], cfg: &PipelineConfig, groups: F) -> Vec<RankEntry>
where
    F: Fn(&Shape) -> Result<Vec<ConstraintGroup>> + Sync,
{
    let mut entries: Vec<RankEntry> = collection
        .par_iter()
        .map(|s| {
            let energy = groups(s)
                .and_then(|g| evaluate_groups(s, g, cfg))
                .map(|e| e.energy)
                .unwrap_or_else(|err| {
                    log::warn!("shape `{}`: {err}", s.id);
                    f64::INFINITY
                });
            RankEntry {
                shape_id: s.id.clone(),
                energy,
            }
        })
        .collect();
    sort_entries(&mut entries);
    entries
}

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Euclidean norm of the difference of full cost vectors.
    #[default]
    Euclidean,
    /// Difference of the minima, plus a unit penalty when the cheapest poses
    /// differ.
    MinComponent,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::MinComponent => "min-component",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "min-component" => Ok(Metric::MinComponent),
            _ => Err(Error::unknown("metric", s)),
        }
    }
}

/// Weight of a differing cheapest pose under [`Metric::MinComponent`].
pub const ARGMIN_PENALTY: f64 = 1.0;

pub fn pairwise_distance(a: &CostVector, b: &CostVector, metric: Metric) -> Result<f64> {
    if a.costs.len() != b.costs.len() {
        return Err(Error::LengthMismatch {
            expected: a.costs.len(),
            actual: b.costs.len(),
        });
    }
    Ok(match metric {
        Metric::Euclidean => a
            .costs
            .iter()
            .zip(&b.costs)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt(),
        Metric::MinComponent => {
            let penalty = if a.argmin() == b.argmin() {
                0.0
            } else {
                ARGMIN_PENALTY
            };
            ((a.min() - b.min()).powi(2) + penalty * penalty).sqrt()
        }
    })
}

/// Symmetric distance matrix. Failed (infinite) entries are replaced by
/// twice the largest finite cost so the matrix stays embeddable.
pub fn distance_matrix(vectors: &[CostVector], metric: Metric) -> Result<Vec<Vec<f64>>> {
    let cap = 2.0
        * vectors
            .iter()
            .flat_map(|v| v.costs.iter())
            .filter(|c| c.is_finite())
            .fold(2.0f64, |m, c| m.max(*c));
    let clean: Vec<CostVector> = vectors
        .iter()
        .map(|v| CostVector {
            costs: v
                .costs
                .iter()
                .map(|c| if c.is_finite() { *c } else { cap })
                .collect(),
            ..v.clone()
        })
        .collect();
    let n = clean.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let x = pairwise_distance(&clean[i], &clean[j], metric)?;
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    Ok(d)
}

/// How a shape is declared none-of-the-above.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierRule {
    Off,
    /// Minimum cost above `base + k · MAD` of the collection minima, where
    /// `base` is normally the zero-deformation energy.
    Mad {
        base: f64,
        k: f64,
    },
    Fixed {
        threshold: f64,
    },
}

impl Default for OutlierRule {
    fn default() -> Self {
        OutlierRule::Mad { base: 2.0, k: 3.0 }
    }
}

impl OutlierRule {
    pub fn threshold(&self, minima: &[f64]) -> f64 {
        match *self {
            OutlierRule::Off => f64::INFINITY,
            OutlierRule::Fixed { threshold } => threshold,
            OutlierRule::Mad { base, k } => {
                let finite: Vec<f64> = minima.iter().copied().filter(|m| m.is_finite()).collect();
                if finite.is_empty() {
                    return f64::INFINITY;
                }
                let med = median(&finite);
                let dev: Vec<f64> = finite.iter().map(|m| (m - med).abs()).collect();
                base + k * median(&dev)
            }
        }
    }
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    /// Per shape, in input order: the cheapest pose, or `None` for
    /// none-of-the-above.
    pub labels: Vec<(String, Option<PoseName>)>,
    /// Shape ids per label (`none` for outliers).
    pub clusters: BTreeMap<String, Vec<String>>,
    pub threshold: f64,
}

pub fn classify(vectors: &[CostVector], rule: OutlierRule) -> Classification {
    let minima: Vec<f64> = vectors.iter().map(|v| v.min()).collect();
    let threshold = rule.threshold(&minima);
    let mut clusters: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let labels = vectors
        .iter()
        .map(|v| {
            let label = v
                .argmin()
                .filter(|_| v.min() <= threshold && v.min().is_finite())
                .map(|i| v.poses[i]);
            let key = label.map_or("none", |p| p.as_str()).to_string();
            clusters.entry(key).or_default().push(v.shape_id.clone());
            (v.shape_id.clone(), label)
        })
        .collect();
    Classification {
        labels,
        clusters,
        threshold,
    }
}

/// Share of points whose nearest group centroid in the plane is their own
/// group's. Nearest-centroid regions are bounded by straight lines, so this
/// measures linear separability of the groups.
pub fn nearest_centroid_accuracy(emb: &Embedding2D, groups: &[String]) -> f64 {
    let mut sums: BTreeMap<&str, ([f64; 2], usize)> = BTreeMap::new();
    for (c, g) in emb.coords.iter().zip(groups) {
        let e = sums.entry(g).or_insert(([0.0; 2], 0));
        e.0[0] += c[0];
        e.0[1] += c[1];
        e.1 += 1;
    }
    let centroids: Vec<(&str, [f64; 2])> = sums
        .into_iter()
        .map(|(g, (s, n))| (g, [s[0] / n as f64, s[1] / n as f64]))
        .collect();
    let hits = emb
        .coords
        .iter()
        .zip(groups)
        .filter(|(c, g)| {
            let d = |m: &[f64; 2]| (c[0] - m[0]).powi(2) + (c[1] - m[1]).powi(2);
            centroids
                .iter()
                .min_by(|a, b| d(&a.1).total_cmp(&d(&b.1)))
                .is_some_and(|(best, _)| best == g)
        })
        .count();
    if groups.is_empty() {
        1.0
    } else {
        hits as f64 / groups.len() as f64
    }
}

/// Training accuracy of a multinomial logistic classifier fitted to the
/// planar points, a lower bound on the best linear partition of the groups.
/// Never below [`nearest_centroid_accuracy`], which is itself linear.
pub fn linear_separability(emb: &Embedding2D, groups: &[String]) -> f64 {
    let n = groups.len();
    if n == 0 {
        return 1.0;
    }
    let names: Vec<&String> = {
        let mut v: Vec<&String> = groups.iter().collect();
        v.sort();
        v.dedup();
        v
    };
    let k = names.len();
    let y: Vec<usize> = groups
        .iter()
        .map(|g| names.binary_search(&g).unwrap_or(0))
        .collect();
    // Standardised features plus bias.
    let mut mean = [0.0; 2];
    let mut sd = [0.0; 2];
    for a in 0..2 {
        mean[a] = emb.coords.iter().map(|c| c[a]).sum::<f64>() / n as f64;
        sd[a] = (emb
            .coords
            .iter()
            .map(|c| (c[a] - mean[a]).powi(2))
            .sum::<f64>()
            / n as f64)
            .sqrt()
            .max(1e-12);
    }
    let x: Vec<[f64; 3]> = emb
        .coords
        .iter()
        .map(|c| [(c[0] - mean[0]) / sd[0], (c[1] - mean[1]) / sd[1], 1.0])
        .collect();
    let mut w = vec![[0.0; 3]; k];
    let scores = |w: &[[f64; 3]], xi: &[f64; 3]| -> Vec<f64> {
        w.iter()
            .map(|wk| wk.iter().zip(xi).map(|(a, b)| a * b).sum())
            .collect()
    };
    let accuracy = |w: &[[f64; 3]]| {
        let hits = x
            .iter()
            .zip(&y)
            .filter(|(xi, yi)| {
                let s = scores(w, xi);
                (0..k).max_by(|&a, &b| s[a].total_cmp(&s[b]).then(b.cmp(&a))) == Some(**yi)
            })
            .count();
        hits as f64 / n as f64
    };
    let mut best = nearest_centroid_accuracy(emb, groups);
    for _ in 0..4000 {
        let mut grad = vec![[0.0; 3]; k];
        for (xi, &yi) in x.iter().zip(&y) {
            let s = scores(&w, xi);
            let top = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = s.iter().map(|v| (v - top).exp()).sum();
            for c in 0..k {
                let p = (s[c] - top).exp() / z - if c == yi { 1.0 } else { 0.0 };
                for f in 0..3 {
                    grad[c][f] += p * xi[f] / n as f64;
                }
            }
        }
        for c in 0..k {
            for f in 0..3 {
                w[c][f] -= 2.0 * (grad[c][f] + 1e-4 * w[c][f]);
            }
        }
    }
    best = best.max(accuracy(&w));
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Chair,
    Table,
    Monitor,
}

impl Category {
    pub const ORDER: [Category; 3] = [Category::Chair, Category::Table, Category::Monitor];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Chair => "chair",
            Category::Table => "table",
            Category::Monitor => "monitor",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ORDER
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::unknown("category", s))
    }
}

/// Best object of one category, reshaped and placed around the avatar.
#[derive(Clone, Debug)]
pub struct Retrieved {
    pub category: Category,
    pub ranking: Vec<RankEntry>,
    pub original: Shape,
    pub evaluation: Evaluation,
    /// Rigid placement applied to the reshaped shape.
    pub placement: Vec3,
    /// Reshaped shape moved into place.
    pub placed: Shape,
}

/// Picks, reshapes and places one object per category, in chair → table →
/// monitor order. Each object is reshaped on its own; the monitor's target
/// height is measured from the retrieved table's reshaped top.
pub fn coretrieve(
    avatar: &Avatar,
    collections: &[(Category, Vec<Shape>)],
    cfg: &PipelineConfig,
) -> Result<Vec<Retrieved>> {
    let m = avatar.measure();
    let hip = avatar.joint("hip_center");
    let wrists = 0.5 * (avatar.joint("wrist_l") + avatar.joint("wrist_r"));
    let mut ordered: Vec<&(Category, Vec<Shape>)> = collections.iter().collect();
    ordered.sort_by_key(|(c, _)| *c);
    let mut out: Vec<Retrieved> = Vec::new();
    let mut table_top: Option<(f64, Vec3)> = None;
    for (category, shapes) in ordered {
        if shapes.is_empty() {
            return Err(Error::Empty("category collection"));
        }
        let mapping = |s: &Shape| -> Result<Vec<ConstraintGroup>> {
            match category {
                Category::Chair => derive_constraints(&m, s, &cfg.ergo),
                Category::Table => Ok(top_height_constraints(
                    PartTag::Other,
                    m.lower_arm_height,
                    &cfg.ergo,
                )),
                Category::Monitor => {
                    let base = table_top.map_or(0.0, |t| t.0);
                    Ok(top_height_constraints(
                        PartTag::Other,
                        m.eye_height - base,
                        &cfg.ergo,
                    ))
                }
            }
        };
        let ranking = rank_by(shapes, cfg, mapping);
        let best = &ranking[0];
        let original = shapes
            .iter()
            .find(|s| s.id == best.shape_id)
            .expect("ranked shape exists")
            .clone();
        let evaluation = evaluate_groups(&original, mapping(&original)?, cfg)?;
        let deformed = &evaluation.reshaped.shape;
        let bb = deformed.aabb();
        let placement = match category {
            Category::Chair => {
                let seat = deformed
                    .components_tagged(PartTag::Seat)
                    .next()
                    .map(|(_, c)| c.proxy.center())
                    .unwrap_or_else(|| bb.center());
                Vec3::new(hip.x - seat.x, 0.0, hip.z - seat.z)
            }
            Category::Table => {
                // Near edge at the wrists, centred on the body.
                let c = bb.center();
                Vec3::new(hip.x - c.x, 0.0, wrists.z - bb.min.z)
            }
            Category::Monitor => {
                let (top, centre) =
                    table_top.unwrap_or((0.0, Vec3::new(hip.x, 0.0, wrists.z + 0.3)));
                let c = bb.center();
                Vec3::new(centre.x - c.x, top - bb.min.y, centre.z - c.z)
            }
        };
        let placed = translated(deformed, &placement);
        if *category == Category::Table {
            let top = placed
                .components_tagged(PartTag::Other)
                .map(|(_, c)| c.proxy.top_height())
                .fold(f64::NEG_INFINITY, f64::max);
            table_top = Some((top, placed.aabb().center()));
        }
        out.push(Retrieved {
            category: *category,
            ranking,
            original,
            evaluation,
            placement,
            placed,
        });
    }
    Ok(out)
}

fn translated(shape: &Shape, d: &Vec3) -> Shape {
    let t = AffineTransform::translation(*d);
    let mut out = shape.clone();
    for c in &mut out.components {
        for p in &mut c.samples {
            *p += d;
        }
        c.proxy = c.proxy.transformed(&t);
    }
    for e in &mut out.graph.contact_edges {
        for p in &mut e.points {
            *p += d;
        }
        e.centroid += d;
    }
    for e in &mut out.graph.symmetry_edges {
        e.plane.point += d;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::generator::{generate_chair, ChairParams, ChairStyle};

    fn cv(id: &str, costs: &[f64]) -> CostVector {
        CostVector {
            shape_id: id.into(),
            poses: PoseName::PRESETS[..costs.len()].to_vec(),
            costs: costs.to_vec(),
            failed: vec![false; costs.len()],
        }
    }

    #[test]
    fn euclidean_distance() {
        let d = pairwise_distance(
            &cv("a", &[2.0, 3.0]),
            &cv("b", &[3.0, 2.0]),
            Metric::Euclidean,
        )
        .unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            pairwise_distance(
                &cv("a", &[2.0, 3.0]),
                &cv("a", &[2.0, 3.0]),
                Metric::Euclidean
            )
            .unwrap(),
            0.0
        );
        assert!(
            pairwise_distance(&cv("a", &[2.0]), &cv("b", &[2.0, 3.0]), Metric::Euclidean).is_err()
        );
    }

    #[test]
    fn min_component_distance() {
        let d = pairwise_distance(
            &cv("a", &[2.0, 3.0]),
            &cv("b", &[3.0, 2.0]),
            Metric::MinComponent,
        )
        .unwrap();
        assert!((d - ARGMIN_PENALTY).abs() < 1e-15);
        let d = pairwise_distance(
            &cv("a", &[2.0, 3.0]),
            &cv("b", &[2.5, 3.0]),
            Metric::MinComponent,
        )
        .unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn classify_threshold_and_shift_invariance() {
        let vs = vec![
            cv("a", &[2.0, 3.0, 4.0]),
            cv("b", &[3.0, 2.2, 4.0]),
            cv("c", &[4.0, 3.0, 2.4]),
            cv("e", &[2.6, 3.0, 4.0]),
            cv("d", &[9.0, 9.5, 9.9]),
        ];
        // Minima median 2.4, MAD 0.2: threshold 2 + 0.6.
        let c = classify(&vs, OutlierRule::default());
        assert!((c.threshold - 2.6).abs() < 1e-12);
        assert_eq!(c.labels[0].1, Some(PoseName::NormalSitting));
        assert_eq!(c.labels[1].1, Some(PoseName::BenchSitting));
        assert_eq!(c.labels[2].1, Some(PoseName::BeachLying));
        assert_eq!(c.labels[3].1, Some(PoseName::NormalSitting));
        assert_eq!(c.labels[4].1, None);
        assert_eq!(c.clusters["none"], vec!["d".to_string()]);
        let shifted: Vec<CostVector> = vs
            .iter()
            .map(|v| CostVector {
                costs: v.costs.iter().map(|x| x + 5.0).collect(),
                ..v.clone()
            })
            .collect();
        let argmins = |vs: &[CostVector]| vs.iter().map(|v| v.argmin()).collect::<Vec<_>>();
        assert_eq!(argmins(&shifted), argmins(&vs));
        let off = |vs: &[CostVector]| classify(vs, OutlierRule::Off).labels;
        assert_eq!(off(&shifted), off(&vs));
        // The base is absolute: shifting everything past it rejects all.
        assert!(classify(&shifted, OutlierRule::default())
            .labels
            .iter()
            .all(|l| l.1.is_none()));
        let strict = classify(&vs, OutlierRule::Fixed { threshold: 1.9 });
        assert!(strict.labels.iter().all(|l| l.1.is_none()));
    }

    #[test]
    fn rank_of_identical_shapes_is_id_ordered() {
        let a = generate_chair(ChairStyle::Office, &ChairParams::default(), 1).unwrap();
        let mut b = a.clone();
        b.id = "another".into();
        let avatar = Avatar::preset(PoseName::NormalSitting).unwrap();
        let r = rank(&[a.clone(), b], &avatar, &PipelineConfig::default());
        assert_eq!(r[0].energy, r[1].energy);
        assert_eq!(r[0].shape_id, "another");
        let single = rank(&[a], &avatar, &PipelineConfig::default());
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn nearest_centroid_on_clean_groups() {
        let emb = Embedding2D {
            coords: vec![[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0]],
            stress: 0.0,
        };
        let g: Vec<String> = ["a", "a", "b", "b"].iter().map(|s| s.to_string()).collect();
        assert_eq!(nearest_centroid_accuracy(&emb, &g), 1.0);
    }
}
