use nalgebra::{DMatrix, DVector, Rotation3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineTransform, Frame, Mat3, Vec3};

/// Admissible family for the per-component transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformClass {
    Translation,
    TranslationScale,
    TranslationRotationScale,
}

/// A contact point and where it has to go. `weight` holds per world-axis
/// weights, so a floor anchor can pin only the height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactPair {
    pub source: Vec3,
    pub target: Vec3,
    pub weight: Vec3,
}

impl ContactPair {
    pub fn new(source: Vec3, target: Vec3) -> Self {
        ContactPair {
            source,
            target,
            weight: Vec3::repeat(1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Tikhonov weight pulling scales (and rotation) toward identity.
    pub lambda: f64,
    /// Component extent per frame axis. When given, an axis only gets a free
    /// scale if the data spans at least `identifiable_fraction` of it.
    pub extents: Option<[f64; 3]>,
    pub identifiable_fraction: f64,
    /// Cylinder: frame axes 1 and 2 share one scale.
    pub tie_radial: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            lambda: 1e-6,
            extents: None,
            identifiable_fraction: 0.5,
            tie_radial: false,
        }
    }
}

/// Weighted sum of squared residuals `Σ ||W^½ (T(a) − a')||²`.
pub fn residual(t: &AffineTransform, pairs: &[ContactPair]) -> f64 {
    pairs
        .iter()
        .map(|p| {
            let r = t.apply(&p.source) - p.target;
            r.component_mul(&r).dot(&p.weight)
        })
        .sum()
}

/// Scale parameter groups: each entry lists the frame axes sharing one
/// free scale.
fn scale_groups(pairs: &[ContactPair], frame: &Frame, opts: &FitOptions) -> Vec<Vec<usize>> {
    let groups: Vec<Vec<usize>> = if opts.tie_radial {
        vec![vec![0], vec![1, 2]]
    } else {
        vec![vec![0], vec![1], vec![2]]
    };
    let Some(ext) = opts.extents else {
        return groups;
    };
    let spread = |k: usize| {
        let f = frame.axis(k);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in pairs {
            // Information the pair carries along this axis.
            if p.weight.dot(&f.component_mul(&f)) > 0.5 {
                let s = f.dot(&(p.source - frame.origin));
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
        if hi >= lo {
            hi - lo
        } else {
            0.0
        }
    };
    groups
        .into_iter()
        .filter(|g| {
            g.iter()
                .any(|&k| ext[k] > 0.0 && spread(k) >= opts.identifiable_fraction * ext[k])
        })
        .collect()
}

/// Least-squares transform of `klass` taking every source toward its target,
/// with scale and rotation acting about `frame.origin` in `frame`'s axes.
/// Directions the data leave undetermined stay at identity.
pub fn fit_contact_transform(
    pairs: &[ContactPair],
    klass: TransformClass,
    frame: &Frame,
    opts: &FitOptions,
) -> Result<AffineTransform> {
    if pairs.is_empty() {
        return Err(Error::Empty("contact pairs"));
    }
    if pairs.iter().all(|p| p.source == p.target) {
        return Ok(AffineTransform::identity());
    }
    match klass {
        TransformClass::Translation => Ok(fit_translation(pairs)),
        TransformClass::TranslationScale => {
            let groups = scale_groups(pairs, frame, opts);
            Ok(solve_scale_translation(
                pairs,
                frame,
                &Mat3::identity(),
                &groups,
                opts.lambda,
            ))
        }
        TransformClass::TranslationRotationScale => {
            let groups = scale_groups(pairs, frame, opts);
            Ok(fit_rigid_scale(pairs, frame, &groups, opts.lambda))
        }
    }
}

fn fit_translation(pairs: &[ContactPair]) -> AffineTransform {
    let mut num = Vec3::zeros();
    let mut den = Vec3::zeros();
    for p in pairs {
        num += (p.target - p.source).component_mul(&p.weight);
        den += p.weight;
    }
    let t = Vec3::from_fn(|k, _| if den[k] > 0.0 { num[k] / den[k] } else { 0.0 });
    AffineTransform::translation(t)
}

/// With the rotation fixed at `rot`, the model is linear in the scale
/// offsets `δs` and translation `t`:
/// `T(a) = o + R F (I + δS) Fᵀ (a − o) + t`. Solved on the stacked weighted
/// system by SVD; the minimum-norm solution keeps unobservable parameters at
/// identity.
fn solve_scale_translation(
    pairs: &[ContactPair],
    frame: &Frame,
    rot: &Mat3,
    groups: &[Vec<usize>],
    lambda: f64,
) -> AffineTransform {
    let (a, c) = linear_system(pairs, frame, rot, groups, lambda);
    let x = solve_min_norm(&a, &(-c));
    assemble(frame, rot, groups, &x)
}

fn linear_system(
    pairs: &[ContactPair],
    frame: &Frame,
    rot: &Mat3,
    groups: &[Vec<usize>],
    lambda: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let np = groups.len() + 3;
    let rows = 3 * pairs.len() + groups.len();
    let mut a = DMatrix::zeros(rows, np);
    let mut c = DVector::zeros(rows);
    let o = frame.origin;
    let rf: Vec<Vec3> = (0..3).map(|k| rot * frame.axis(k)).collect();
    for (i, p) in pairs.iter().enumerate() {
        let d = p.source - o;
        let base = o + rot * d - p.target;
        for j in 0..3 {
            let w = p.weight[j].sqrt();
            let row = 3 * i + j;
            for (g, axes) in groups.iter().enumerate() {
                let v: f64 = axes.iter().map(|&k| frame.axis(k).dot(&d) * rf[k][j]).sum();
                a[(row, g)] = w * v;
            }
            a[(row, groups.len() + j)] = w;
            c[row] = w * base[j];
        }
    }
    let r = lambda.sqrt();
    for g in 0..groups.len() {
        a[(3 * pairs.len() + g, g)] = r;
    }
    (a, c)
}

fn solve_min_norm(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    // Column equilibration keeps the decomposition accurate when scale
    // columns (lever arms of a few cm) sit next to unit translation columns.
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let mut scaled = a.clone();
    for (k, n) in norms.iter().enumerate() {
        if *n > 0.0 {
            scaled.column_mut(k).unscale_mut(*n);
        }
    }
    let svd = scaled
        .try_svd(true, true, f64::EPSILON, 0)
        .expect("svd converges");
    let smax = svd.singular_values.max();
    let eps = smax * 1e-12 * (a.nrows().max(a.ncols()) as f64);
    let mut x = svd
        .solve(b, eps.max(f64::MIN_POSITIVE))
        .expect("svd with u and v");
    for (k, n) in norms.iter().enumerate() {
        if *n > 0.0 {
            x[k] /= n;
        }
    }
    x
}

fn assemble(frame: &Frame, rot: &Mat3, groups: &[Vec<usize>], x: &DVector<f64>) -> AffineTransform {
    let mut scale = Vec3::repeat(1.0);
    for (g, axes) in groups.iter().enumerate() {
        for &k in axes {
            scale[k] = 1.0 + x[g];
        }
    }
    let n = groups.len();
    AffineTransform {
        rotation: *rot,
        scale,
        translation: Vec3::new(x[n], x[n + 1], x[n + 2]),
        frame: *frame,
    }
}

/// Objective including the pull toward identity.
fn objective(
    t: &AffineTransform,
    pairs: &[ContactPair],
    groups: &[Vec<usize>],
    lambda: f64,
) -> f64 {
    let reg_s: f64 = groups.iter().map(|g| (t.scale[g[0]] - 1.0).powi(2)).sum();
    let omega = Rotation3::from_matrix_unchecked(t.rotation).scaled_axis();
    residual(t, pairs) + lambda * (reg_s + omega.norm_squared())
}

/// Weighted Kabsch rotation between the point sets, using the mean of each
/// pair's axis weights.
fn kabsch(pairs: &[ContactPair]) -> Mat3 {
    let w: Vec<f64> = pairs.iter().map(|p| p.weight.sum() / 3.0).collect();
    let wsum: f64 = w.iter().sum();
    if wsum <= 0.0 {
        return Mat3::identity();
    }
    let ca = pairs
        .iter()
        .zip(&w)
        .fold(Vec3::zeros(), |s, (p, w)| s + p.source * *w)
        / wsum;
    let cb = pairs
        .iter()
        .zip(&w)
        .fold(Vec3::zeros(), |s, (p, w)| s + p.target * *w)
        / wsum;
    let mut h = Mat3::zeros();
    for (p, w) in pairs.iter().zip(&w) {
        h += (p.source - ca) * (p.target - cb).transpose() * *w;
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
    let v = vt.transpose();
    let d = (v * u.transpose()).determinant().signum();
    v * Mat3::from_diagonal(&Vec3::new(1.0, 1.0, d)) * u.transpose()
}

/// Damped Gauss-Newton over rotation vector, scale offsets and translation,
/// started from identity and from the Kabsch rotation; the better optimum
/// wins.
fn fit_rigid_scale(
    pairs: &[ContactPair],
    frame: &Frame,
    groups: &[Vec<usize>],
    lambda: f64,
) -> AffineTransform {
    let starts = [Mat3::identity(), kabsch(pairs)];
    let mut best: Option<(f64, AffineTransform)> = None;
    for r0 in starts {
        let init = solve_scale_translation(pairs, frame, &r0, groups, lambda);
        let t = refine(init, pairs, frame, groups, lambda);
        let f = objective(&t, pairs, groups, lambda);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, t));
        }
    }
    best.expect("at least one start").1
}

fn params_to_transform(
    base: &AffineTransform,
    x: &DVector<f64>,
    groups: &[Vec<usize>],
) -> AffineTransform {
    let dr = Rotation3::new(Vec3::new(x[0], x[1], x[2]));
    let mut t = *base;
    t.rotation = dr.matrix() * base.rotation;
    for (g, axes) in groups.iter().enumerate() {
        for &k in axes {
            t.scale[k] = base.scale[k] + x[3 + g];
        }
    }
    let n = 3 + groups.len();
    t.translation = base.translation + Vec3::new(x[n], x[n + 1], x[n + 2]);
    t
}

/// Stacked residual vector whose squared norm is `objective`.
fn residual_vector(
    t: &AffineTransform,
    pairs: &[ContactPair],
    groups: &[Vec<usize>],
    lambda: f64,
) -> DVector<f64> {
    let mut r = DVector::zeros(3 * pairs.len() + groups.len() + 3);
    for (i, p) in pairs.iter().enumerate() {
        let d = t.apply(&p.source) - p.target;
        for j in 0..3 {
            r[3 * i + j] = p.weight[j].sqrt() * d[j];
        }
    }
    let l = lambda.sqrt();
    let base = 3 * pairs.len();
    for (g, axes) in groups.iter().enumerate() {
        r[base + g] = l * (t.scale[axes[0]] - 1.0);
    }
    let omega = Rotation3::from_matrix_unchecked(t.rotation).scaled_axis();
    for k in 0..3 {
        r[base + groups.len() + k] = l * omega[k];
    }
    r
}

fn refine(
    mut t: AffineTransform,
    pairs: &[ContactPair],
    _frame: &Frame,
    groups: &[Vec<usize>],
    lambda: f64,
) -> AffineTransform {
    let np = 6 + groups.len();
    let mut r = residual_vector(&t, pairs, groups, lambda);
    let mut cost = r.norm_squared();
    let mut mu = 1e-6;
    let h = 1e-7;
    for _ in 0..200 {
        let mut jac = DMatrix::zeros(r.len(), np);
        for k in 0..np {
            let mut dx = DVector::zeros(np);
            dx[k] = h;
            let rp = residual_vector(&params_to_transform(&t, &dx, groups), pairs, groups, lambda);
            dx[k] = -h;
            let rm = residual_vector(&params_to_transform(&t, &dx, groups), pairs, groups, lambda);
            jac.set_column(k, &((rp - rm) / (2.0 * h)));
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &r;
        let mut accepted = false;
        for _ in 0..12 {
            let mut lhs = jtj.clone();
            for k in 0..np {
                lhs[(k, k)] += mu * (1.0 + jtj[(k, k)]);
            }
            let Some(step) = lhs.lu().solve(&(-&jtr)) else {
                mu *= 10.0;
                continue;
            };
            let trial = params_to_transform(&t, &step, groups);
            let rt = residual_vector(&trial, pairs, groups, lambda);
            let ct = rt.norm_squared();
            if ct < cost {
                let gain = cost - ct;
                t = trial;
                r = rt;
                cost = ct;
                mu = (mu * 0.2).max(1e-15);
                accepted = gain > 1e-18 * (1.0 + cost);
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    t
}
