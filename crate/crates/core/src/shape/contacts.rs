use std::collections::HashMap;

use super::{Component, Contact, Shape};
use crate::geometry::Vec3;

pub const DEFAULT_K_MAX: usize = 16;

type Cell = (i64, i64, i64);

/// Uniform hash grid over one component's samples with cell size ε, so a
/// radius-ε query only visits the 27 surrounding cells.
struct Grid<'a> {
    cell: f64,
    points: &'a [Vec3],
    buckets: HashMap<Cell, Vec<usize>>,
}

impl<'a> Grid<'a> {
    fn new(points: &'a [Vec3], cell: f64) -> Self {
        let mut buckets: HashMap<Cell, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(key(p, cell)).or_default().push(i);
        }
        Grid {
            cell,
            points,
            buckets,
        }
    }

    fn any_within(&self, p: &Vec3, eps: f64) -> bool {
        let (cx, cy, cz) = key(p, self.cell);
        let eps2 = eps * eps;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.buckets.get(&(cx + dx, cy + dy, cz + dz)) {
                        if ids
                            .iter()
                            .any(|&i| (self.points[i] - p).norm_squared() <= eps2)
                        {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

fn key(p: &Vec3, cell: f64) -> Cell {
    (
        (p.x / cell).floor() as i64,
        (p.y / cell).floor() as i64,
        (p.z / cell).floor() as i64,
    )
}

pub fn detect_contacts(shape: &Shape, epsilon: f64) -> Vec<Contact> {
    detect_contacts_with(&shape.components, epsilon, DEFAULT_K_MAX)
}

/// All pairwise contacts, once per unordered pair in component order.
///
/// A sample belongs to the contact region when some sample of the other
/// component lies within `epsilon` of it (inclusive). The region keeps at most
/// `k_max` evenly strided points, while the centroid is taken over all of it.
pub fn detect_contacts_with(components: &[Component], epsilon: f64, k_max: usize) -> Vec<Contact> {
    assert!(epsilon > 0.0, "contact epsilon must be positive");
    let k_max = k_max.max(1);
    let boxes: Vec<_> = components
        .iter()
        .map(|c| c.aabb().inflated(epsilon))
        .collect();
    let grids: Vec<Grid> = components
        .iter()
        .map(|c| Grid::new(&c.samples, epsilon))
        .collect();

    let mut out = Vec::new();
    for i in 0..components.len() {
        for j in (i + 1)..components.len() {
            if !boxes[i].overlaps(&boxes[j]) {
                continue;
            }
            let mut region: Vec<Vec3> = Vec::new();
            for (src, other) in [(i, j), (j, i)] {
                region.extend(
                    components[src]
                        .samples
                        .iter()
                        .filter(|p| boxes[other].contains(p) && grids[other].any_within(p, epsilon))
                        .copied(),
                );
            }
            if region.is_empty() {
                continue;
            }
            let centroid =
                region.iter().fold(Vec3::zeros(), |acc, p| acc + p) / region.len() as f64;
            out.push(Contact {
                comp_a: components[i].id.clone(),
                comp_b: components[j].id.clone(),
                points: subsample(&region, k_max),
                centroid,
            });
        }
    }
    out
}

fn subsample(points: &[Vec3], k: usize) -> Vec<Vec3> {
    if points.len() <= k {
        return points.to_vec();
    }
    (0..k).map(|i| points[i * points.len() / k]).collect()
}
