use std::f64::consts::PI;

use nalgebra::SymmetricEigen;

use super::{most_aligned, perpendicular_basis, AffineTransform, Frame, Mat3, Plane, Vec3};
use crate::error::{Error, Result};

/// A box with orthonormal `axes` and non-negative `half_extents`, sorted
/// descending.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedBox {
    pub center: Vec3,
    pub axes: [Vec3; 3],
    pub half_extents: [f64; 3],
}

/// Primitive abstraction of a component, used as the unit of deformation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Proxy {
    Cuboid(OrientedBox),
    Cylinder {
        center: Vec3,
        axis: Vec3,
        radius: f64,
        half_length: f64,
    },
}

/// Thresholds for [`fit_proxy_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProxyFitConfig {
    /// Maximum relative difference of the two minor eigenvalues for a cylinder.
    pub cylinder_minor_eigen_rel: f64,
    /// Maximum coefficient of variation of radial distance for a cylinder.
    pub cylinder_radial_cv: f64,
    /// Minimum relative gap between the major and middle eigenvalue for the
    /// major axis to count as a cylinder axis.
    pub cylinder_major_gap: f64,
    /// Eigenvalues closer than this (relative to the largest) are treated as
    /// one eigenspace and given a world-aligned basis.
    pub degenerate_eigen_rel: f64,
}

impl Default for ProxyFitConfig {
    fn default() -> Self {
        ProxyFitConfig {
            cylinder_minor_eigen_rel: 0.15,
            cylinder_radial_cv: 0.10,
            cylinder_major_gap: 0.15,
            degenerate_eigen_rel: 1e-6,
        }
    }
}

pub fn fit_proxy(points: &[Vec3]) -> Result<Proxy> {
    fit_proxy_with(points, &ProxyFitConfig::default())
}

/// PCA proxy: a cylinder when the cylindricality test passes, otherwise the
/// PCA-frame box spanned by the extremal projections.
pub fn fit_proxy_with(points: &[Vec3], cfg: &ProxyFitConfig) -> Result<Proxy> {
    if points.len() < 4 {
        return Err(Error::DegenerateInput(format!(
            "proxy fitting needs at least 4 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec3::zeros(), |acc, p| acc + p) / n;
    let spread = points.iter().map(|p| (p - mean).norm()).fold(0.0, f64::max);
    if spread <= 1e-12 * (1.0 + mean.norm()) {
        return Err(Error::DegenerateInput("all points coincide".into()));
    }

    let mut cov = Mat3::zeros();
    for p in points {
        let d = p - mean;
        cov += d * d.transpose();
    }
    cov /= n;

    let (values, axes) = principal_axes(&cov, cfg.degenerate_eigen_rel);

    if let Some(cyl) = cylinder_candidate(points, &mean, &values, &axes, cfg) {
        return Ok(cyl);
    }

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        let d = p - mean;
        for k in 0..3 {
            let s = axes[k].dot(&d);
            lo[k] = lo[k].min(s);
            hi[k] = hi[k].max(s);
        }
    }
    let mut center = mean;
    let mut half = [0.0; 3];
    for k in 0..3 {
        center += axes[k] * ((lo[k] + hi[k]) * 0.5);
        half[k] = (hi[k] - lo[k]) * 0.5;
    }
    Ok(Proxy::Cuboid(OrientedBox::new_sorted(center, axes, half)))
}

/// Eigenpairs of a symmetric 3×3 matrix sorted by descending eigenvalue, with
/// degenerate eigenspaces given a basis as close to the world axes as possible.
fn principal_axes(cov: &Mat3, degenerate_rel: f64) -> ([f64; 3], [Vec3; 3]) {
    let eig = SymmetricEigen::new(*cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.map(|i| eig.eigenvalues[i].max(0.0));
    let mut axes = order.map(|i| eig.eigenvectors.column(i).into_owned());

    let tol = degenerate_rel * values[0].max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && (values[start] - values[end]).abs() <= tol {
            end += 1;
        }
        if end - start > 1 {
            let basis: Vec<Vec3> = axes[start..end].to_vec();
            let snapped = world_aligned_basis(&basis);
            axes[start..end].copy_from_slice(&snapped);
        }
        start = end;
    }

    for a in axes.iter_mut() {
        let k = most_aligned(&[Vec3::x(), Vec3::y(), Vec3::z()], a);
        if a[k] < 0.0 {
            *a = -*a;
        }
    }
    (values, axes)
}

/// Orthonormal basis of span(`basis`) built greedily from the projections of
/// the world axes.
fn world_aligned_basis(basis: &[Vec3]) -> Vec<Vec3> {
    let world = [Vec3::x(), Vec3::y(), Vec3::z()];
    let mut out: Vec<Vec3> = Vec::with_capacity(basis.len());
    while out.len() < basis.len() {
        let mut best: Option<Vec3> = None;
        let mut best_norm = 0.0;
        for w in &world {
            let mut proj = basis
                .iter()
                .fold(Vec3::zeros(), |acc, b| acc + b * b.dot(w));
            for u in &out {
                proj -= u * u.dot(&proj);
            }
            let norm = proj.norm();
            if norm > best_norm + 1e-12 {
                best_norm = norm;
                best = Some(proj / norm);
            }
        }
        match best {
            Some(v) => out.push(v),
            None => {
                // Subspace orthogonal to all world-axis projections: keep PCA vectors.
                return basis.to_vec();
            }
        }
    }
    out
}

fn cylinder_candidate(
    points: &[Vec3],
    mean: &Vec3,
    values: &[f64; 3],
    axes: &[Vec3; 3],
    cfg: &ProxyFitConfig,
) -> Option<Proxy> {
    let (major, mid, minor) = (values[0], values[1], values[2]);
    if mid <= 0.0 || major <= 0.0 {
        return None;
    }
    if (mid - minor) / mid >= cfg.cylinder_minor_eigen_rel {
        return None;
    }
    if (major - mid) / major < cfg.cylinder_major_gap {
        return None;
    }
    let (line_point, axis) = refine_cylinder_axis(points, mean, &axes[0]);
    let mean = &line_point;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let radial: Vec<f64> = points
        .iter()
        .map(|p| {
            let d = p - mean;
            let s = axis.dot(&d);
            lo = lo.min(s);
            hi = hi.max(s);
            (d - axis * s).norm()
        })
        .collect();
    let n = radial.len() as f64;
    let mean_r = radial.iter().sum::<f64>() / n;
    if mean_r <= 0.0 {
        return None;
    }
    let var_r = radial.iter().map(|r| (r - mean_r).powi(2)).sum::<f64>() / n;
    if var_r.sqrt() >= cfg.cylinder_radial_cv * mean_r {
        return None;
    }
    let radius = radial.iter().cloned().fold(0.0, f64::max);
    let half_length = (hi - lo) * 0.5;
    if radius <= 0.0 || half_length <= 0.0 {
        return None;
    }
    Some(Proxy::Cylinder {
        center: mean + axis * ((lo + hi) * 0.5),
        axis,
        radius,
        half_length,
    })
}

/// Radial distances of `points` from the line through `c` along unit `axis`.
fn radial_residuals(points: &[Vec3], c: &Vec3, axis: &Vec3) -> Vec<f64> {
    let r: Vec<f64> = points
        .iter()
        .map(|p| {
            let d = p - c;
            (d - axis * axis.dot(&d)).norm()
        })
        .collect();
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    r.into_iter().map(|x| x - mean).collect()
}

/// Damped Gauss-Newton on the line (two tilt and two offset parameters)
/// minimizing the variance of radial distance. Starts from the PCA axis.
fn refine_cylinder_axis(points: &[Vec3], center: &Vec3, axis: &Vec3) -> (Vec3, Vec3) {
    let (e1, e2) = perpendicular_basis(axis);
    let line = |q: &[f64; 4]| -> (Vec3, Vec3) {
        let a = (axis + e1 * q[0] + e2 * q[1]).normalize();
        (center + e1 * q[2] + e2 * q[3], a)
    };
    let cost = |res: &[f64]| res.iter().map(|r| r * r).sum::<f64>();
    let mut q = [0.0; 4];
    let (c0, a0) = line(&q);
    let mut res = radial_residuals(points, &c0, &a0);
    let mut current = cost(&res);
    let mut damping = 1e-6;
    let h = 1e-7;
    for _ in 0..50 {
        let mut jac: Vec<[f64; 4]> = vec![[0.0; 4]; points.len()];
        for k in 0..4 {
            let mut qk = q;
            qk[k] += h;
            let (ck, ak) = line(&qk);
            let rk = radial_residuals(points, &ck, &ak);
            for (row, (r1, r0)) in jac.iter_mut().zip(rk.iter().zip(res.iter())) {
                row[k] = (r1 - r0) / h;
            }
        }
        let mut jtj = nalgebra::Matrix4::<f64>::zeros();
        let mut jtr = nalgebra::Vector4::<f64>::zeros();
        for (row, r) in jac.iter().zip(res.iter()) {
            let j = nalgebra::Vector4::from_row_slice(row);
            jtj += j * j.transpose();
            jtr += j * *r;
        }
        let mut improved = false;
        for _ in 0..8 {
            let mut lhs = jtj;
            for k in 0..4 {
                lhs[(k, k)] += damping * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = lhs.lu().solve(&(-jtr)) else {
                damping *= 10.0;
                continue;
            };
            let trial = [
                q[0] + step[0],
                q[1] + step[1],
                q[2] + step[2],
                q[3] + step[3],
            ];
            let (ct, at) = line(&trial);
            let rt = radial_residuals(points, &ct, &at);
            let ctrial = cost(&rt);
            if ctrial < current {
                let gain = current - ctrial;
                q = trial;
                res = rt;
                current = ctrial;
                damping = (damping * 0.3).max(1e-12);
                improved = gain > 1e-15 * (1.0 + current);
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let (c, a) = line(&q);
    // Keep the sign convention of the PCA axis.
    if a.dot(axis) < 0.0 {
        (c, -a)
    } else {
        (c, a)
    }
}

impl OrientedBox {
    /// Builds a box, ordering the axes by descending half extent (stable).
    pub fn new_sorted(center: Vec3, axes: [Vec3; 3], half_extents: [f64; 3]) -> Self {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| half_extents[b].total_cmp(&half_extents[a]));
        OrientedBox {
            center,
            axes: order.map(|i| axes[i]),
            half_extents: order.map(|i| half_extents[i]),
        }
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let mut out = [Vec3::zeros(); 8];
        for (i, c) in out.iter_mut().enumerate() {
            let mut p = self.center;
            for k in 0..3 {
                let sign = if (i >> k) & 1 == 1 { 1.0 } else { -1.0 };
                p += self.axes[k] * (sign * self.half_extents[k]);
            }
            *c = p;
        }
        out
    }
}

impl Proxy {
    pub fn center(&self) -> Vec3 {
        match self {
            Proxy::Cuboid(b) => b.center,
            Proxy::Cylinder { center, .. } => *center,
        }
    }

    pub fn is_cylinder(&self) -> bool {
        matches!(self, Proxy::Cylinder { .. })
    }

    /// Local frame at the proxy center. For a cylinder the first axis is the
    /// principal (length) axis.
    pub fn frame(&self) -> Frame {
        match self {
            Proxy::Cuboid(b) => Frame::new(b.center, b.axes),
            Proxy::Cylinder { center, axis, .. } => {
                let (e1, e2) = perpendicular_basis(axis);
                Frame::new(*center, [*axis, e1, e2])
            }
        }
    }

    /// Half extents along the axes of [`Proxy::frame`].
    pub fn half_extents(&self) -> [f64; 3] {
        match self {
            Proxy::Cuboid(b) => b.half_extents,
            Proxy::Cylinder {
                radius,
                half_length,
                ..
            } => [*half_length, *radius, *radius],
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Proxy::Cuboid(b) => 8.0 * b.half_extents.iter().product::<f64>(),
            Proxy::Cylinder {
                radius,
                half_length,
                ..
            } => PI * radius * radius * 2.0 * half_length,
        }
    }

    /// Support function: `max_{x ∈ proxy} dir·x` for a unit `dir`.
    pub fn support(&self, dir: &Vec3) -> f64 {
        match self {
            Proxy::Cuboid(b) => {
                b.center.dot(dir)
                    + (0..3)
                        .map(|k| b.half_extents[k] * b.axes[k].dot(dir).abs())
                        .sum::<f64>()
            }
            Proxy::Cylinder {
                center,
                axis,
                radius,
                half_length,
            } => {
                let c = axis.dot(dir);
                center.dot(dir) + half_length * c.abs() + radius * (1.0 - c * c).max(0.0).sqrt()
            }
        }
    }

    /// Height of the top face (highest point) in world `y`.
    pub fn top_height(&self) -> f64 {
        self.support(&Vec3::y())
    }

    /// Index of the frame axis most aligned with `dir`.
    pub fn axis_toward(&self, dir: &Vec3) -> usize {
        let f = self.frame();
        most_aligned(&[f.axis(0), f.axis(1), f.axis(2)], dir)
    }

    /// Full extent along the frame axis most aligned with `dir`.
    pub fn extent_toward(&self, dir: &Vec3) -> f64 {
        2.0 * self.half_extents()[self.axis_toward(dir)]
    }

    /// Image of the proxy under `t`. Exact when the linear part of `t` has no
    /// shear relative to the proxy axes; otherwise the image axes are
    /// re-orthonormalized.
    pub fn transformed(&self, t: &AffineTransform) -> Proxy {
        if t.is_identity() {
            return *self;
        }
        let lin = t.linear();
        match self {
            Proxy::Cuboid(b) => {
                let mut imgs: Vec<(Vec3, f64)> = (0..3)
                    .map(|k| {
                        let v = lin * b.axes[k];
                        let len = v.norm();
                        (v / len, b.half_extents[k] * len)
                    })
                    .collect();
                // Gram-Schmidt in extent order.
                for i in 1..3 {
                    let mut v = imgs[i].0;
                    for j in 0..i {
                        let u = imgs[j].0;
                        v -= u * u.dot(&v);
                    }
                    imgs[i].0 = v.normalize();
                }
                Proxy::Cuboid(OrientedBox::new_sorted(
                    t.apply(&b.center),
                    [imgs[0].0, imgs[1].0, imgs[2].0],
                    [imgs[0].1, imgs[1].1, imgs[2].1],
                ))
            }
            Proxy::Cylinder {
                center,
                axis,
                radius,
                half_length,
            } => {
                let (e1, e2) = perpendicular_basis(axis);
                let v = lin * axis;
                let len = v.norm();
                let r_scale = 0.5 * ((lin * e1).norm() + (lin * e2).norm());
                Proxy::Cylinder {
                    center: t.apply(center),
                    axis: v / len,
                    radius: radius * r_scale,
                    half_length: half_length * len,
                }
            }
        }
    }

    pub fn mirrored(&self, plane: &Plane) -> Proxy {
        match self {
            Proxy::Cuboid(b) => Proxy::Cuboid(OrientedBox {
                center: plane.reflect_point(&b.center),
                axes: b.axes.map(|a| plane.reflect_vector(&a)),
                half_extents: b.half_extents,
            }),
            Proxy::Cylinder {
                center,
                axis,
                radius,
                half_length,
            } => Proxy::Cylinder {
                center: plane.reflect_point(center),
                axis: plane.reflect_vector(axis),
                radius: *radius,
                half_length: *half_length,
            },
        }
    }

    /// Same variant, centers within `center_tol` and half extents within
    /// `extent_rel` relative.
    pub fn matches(&self, other: &Proxy, center_tol: f64, extent_rel: f64) -> bool {
        if self.is_cylinder() != other.is_cylinder() {
            return false;
        }
        if (self.center() - other.center()).norm() >= center_tol {
            return false;
        }
        let a = self.half_extents();
        let b = other.half_extents();
        (0..3).all(|k| {
            let scale = a[k].abs().max(b[k].abs());
            scale <= 1e-12 || (a[k] - b[k]).abs() <= extent_rel * scale
        })
    }
}
