//! Contact-based reshaping: constraint transforms on directly targeted
//! components, least-squares fits of the others to their displaced contacts,
//! and greedy propagation through the contact graph.

mod fit;
mod record;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use fit::{fit_contact_transform, residual, ContactPair, FitOptions, TransformClass};
pub use record::{
    contact_separation, mirror_match, part_of, ContactSeparation, DeformationRecord, PartBoxes,
    SemanticPart,
};

use crate::ergo::{
    back_up, check_constraint, seat_forward, ConstraintCheck, ConstraintGroup, ConstraintKind,
    ErgonomicConstraint,
};
use crate::error::{Error, Result};
use crate::geometry::{AffineTransform, Proxy, Vec3};
use crate::shape::{Component, Contact, PartTag, Shape};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReshapeConfig {
    /// Pull toward identity in contact fits.
    pub lambda: f64,
    /// Fraction of a component's extent the contact data must span before
    /// that axis may scale.
    pub identifiable_fraction: f64,
    /// A constraint left with a larger violation is a conflict.
    pub conflict_tol: f64,
    /// Floor anchors per grounded component.
    pub max_anchor_points: usize,
}

impl Default for ReshapeConfig {
    fn default() -> Self {
        ReshapeConfig {
            lambda: 1e-6,
            identifiable_fraction: 0.5,
            conflict_tol: 1e-6,
            max_anchor_points: 16,
        }
    }
}

/// Working state of one propagation.
#[derive(Clone, Debug)]
pub struct DeformationState<'a> {
    pub original: &'a Shape,
    /// Current proxy per component.
    pub proxies: Vec<Proxy>,
    /// Accumulated transform per component, relative to the original.
    pub transforms: Vec<AffineTransform>,
    /// Φ: components treated in the current group.
    pub treated: BTreeSet<usize>,
    /// Constraints enforced so far, re-enforced on newly treated components.
    pub applied: Vec<ErgonomicConstraint>,
    index: BTreeMap<&'a str, usize>,
    config: ReshapeConfig,
    /// Tags carrying an angle constraint fit with rotation.
    rotating: BTreeSet<PartTag>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintOutcome {
    pub constraint: ErgonomicConstraint,
    pub check: ConstraintCheck,
    pub conflict: bool,
}

#[derive(Clone, Debug)]
pub struct Reshaped {
    pub shape: Shape,
    pub record: DeformationRecord,
    pub outcomes: Vec<ConstraintOutcome>,
}

impl Reshaped {
    pub fn conflicts(&self) -> impl Iterator<Item = &ConstraintOutcome> {
        self.outcomes.iter().filter(|o| o.conflict)
    }
}

impl<'a> DeformationState<'a> {
    pub fn new(shape: &'a Shape, config: &ReshapeConfig) -> Self {
        DeformationState {
            original: shape,
            proxies: shape.components.iter().map(|c| c.proxy).collect(),
            transforms: vec![AffineTransform::identity(); shape.components.len()],
            treated: BTreeSet::new(),
            applied: Vec::new(),
            index: shape
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| (c.id.as_str(), i))
                .collect(),
            config: config.clone(),
            rotating: BTreeSet::new(),
        }
    }

    fn component(&self, i: usize) -> &'a Component {
        &self.original.components[i]
    }

    fn idx(&self, id: &str) -> usize {
        self.index[id]
    }

    /// Composes `step` after component `i`'s current transform.
    pub fn apply_step(&mut self, i: usize, step: &AffineTransform) {
        if step.is_identity() {
            return;
        }
        self.transforms[i] = step.compose(&self.transforms[i]);
        self.proxies[i] = self.proxies[i].transformed(step);
    }

    /// Current image of original point `p` on component `i`.
    pub fn image(&self, i: usize, p: &Vec3) -> Vec3 {
        self.transforms[i].apply(p)
    }

    fn other_end(&self, e: &Contact, i: usize) -> usize {
        let a = self.idx(&e.comp_a);
        if a == i {
            self.idx(&e.comp_b)
        } else {
            a
        }
    }

    /// Θ: contact edges touching at least one treated component.
    pub fn deformed_contacts(&self) -> Vec<usize> {
        let g = &self.original.graph;
        (0..g.contact_edges.len())
            .filter(|&e| {
                let c = &g.contact_edges[e];
                self.treated.contains(&self.idx(&c.comp_a))
                    || self.treated.contains(&self.idx(&c.comp_b))
            })
            .collect()
    }

    /// Contact edges between `i` and treated components.
    fn treated_contacts(&self, i: usize) -> Vec<(&'a Contact, usize)> {
        let g = &self.original.graph;
        g.contacts_of(&self.component(i).id)
            .map(|e| &g.contact_edges[e])
            .map(|c| (c, self.other_end(c, i)))
            .filter(|(_, o)| *o != i && self.treated.contains(o))
            .collect()
    }

    /// Centroid of the current images of `i`'s contacts with treated
    /// components (midpoint of both sides' images).
    fn treated_anchor(&self, i: usize, only: Option<PartTag>) -> Option<Vec3> {
        let cs: Vec<Vec3> = self
            .treated_contacts(i)
            .into_iter()
            .filter(|(_, o)| only.is_none_or(|t| self.component(*o).tag == t))
            .map(|(c, o)| 0.5 * (self.image(i, &c.centroid) + self.image(o, &c.centroid)))
            .collect();
        (!cs.is_empty()).then(|| cs.iter().sum::<Vec3>() / cs.len() as f64)
    }

    /// Contact pairs driving component `i`: its contact points with treated
    /// components move to the treated side's image; grounded components add
    /// height-only floor anchors.
    fn contact_pairs(&self, i: usize) -> Vec<ContactPair> {
        let mut pairs = Vec::new();
        for (c, o) in self.treated_contacts(i) {
            for p in &c.points {
                pairs.push(ContactPair::new(self.image(i, p), self.image(o, p)));
            }
        }
        if pairs.is_empty() {
            return pairs;
        }
        let comp = self.component(i);
        let eps = self.original.graph.epsilon;
        let min_y = comp
            .samples
            .iter()
            .map(|p| p.y)
            .fold(f64::INFINITY, f64::min);
        if min_y <= eps {
            let bottom: Vec<&Vec3> = comp
                .samples
                .iter()
                .filter(|p| p.y <= min_y + 0.5 * eps)
                .collect();
            let k = self.config.max_anchor_points.max(1).min(bottom.len());
            for j in 0..k {
                let p = bottom[j * bottom.len() / k];
                let img = self.image(i, p);
                pairs.push(ContactPair {
                    source: img,
                    target: Vec3::new(img.x, p.y, img.z),
                    weight: Vec3::new(0.0, 1.0, 0.0),
                });
            }
        }
        pairs
    }

    /// Least-squares step taking component `i` onto its displaced contacts.
    pub fn fit_step(&self, i: usize) -> Result<AffineTransform> {
        let pairs = self.contact_pairs(i);
        if pairs.is_empty() {
            return Ok(AffineTransform::identity());
        }
        let proxy = &self.proxies[i];
        let h = proxy.half_extents();
        let klass = if self.rotating.contains(&self.component(i).tag) {
            TransformClass::TranslationRotationScale
        } else {
            TransformClass::TranslationScale
        };
        let opts = FitOptions {
            lambda: self.config.lambda,
            extents: Some([2.0 * h[0], 2.0 * h[1], 2.0 * h[2]]),
            identifiable_fraction: self.config.identifiable_fraction,
            tie_radial: proxy.is_cylinder(),
        };
        let t = fit_contact_transform(&pairs, klass, &proxy.frame(), &opts)?;
        if !t.is_valid(1e-6) || t.scale.iter().any(|s| !s.is_finite() || *s < 1e-3) {
            return Err(Error::DegenerateInput(format!(
                "contact fit for `{}` collapsed (scale {:?})",
                self.component(i).id,
                t.scale
            )));
        }
        Ok(t)
    }

    fn seat_proxy(&self) -> Option<&Proxy> {
        self.original
            .components_tagged(PartTag::Seat)
            .next()
            .map(|(i, _)| &self.proxies[i])
    }

    /// Transform bringing component `i` into `c`'s band. Heights and angles
    /// go to the target, widths and lengths to the nearest band end; a value
    /// already inside the band yields the identity.
    pub fn constraint_step(&self, c: &ErgonomicConstraint, i: usize) -> Result<AffineTransform> {
        use ConstraintKind::*;
        let proxy = self.proxies[i];
        let measured = crate::ergo::measure_component(c.kind, &proxy, self.seat_proxy())?;
        if c.violation(measured) == 0.0 {
            return Ok(AffineTransform::identity());
        }
        let nearest_end = if measured < c.band.0 {
            c.band.0
        } else {
            c.band.1
        };
        Ok(match c.kind {
            SeatHeight | ArmHeight | TopHeight => {
                self.height_step(i, &proxy, measured, c.target_value)
            }
            SeatWidth | SeatLength => {
                let dir = if c.kind == SeatWidth {
                    Vec3::x()
                } else {
                    Vec3::z()
                };
                let k = proxy.axis_toward(&dir);
                let s = nearest_end / measured;
                let mut scale = Vec3::repeat(1.0);
                scale[k] = s;
                if proxy.is_cylinder() && k > 0 {
                    scale[1] = s;
                    scale[2] = s;
                }
                AffineTransform::scaling(proxy.frame(), scale)
            }
            BackLength => {
                let (up, k) = back_up(&proxy);
                let anchor = self
                    .treated_anchor(i, Some(PartTag::Seat))
                    .unwrap_or_else(|| proxy.center() - up * proxy.half_extents()[k]);
                let mut scale = Vec3::repeat(1.0);
                scale[k] = nearest_end / measured;
                AffineTransform::scaling(proxy.frame().with_origin(anchor), scale)
            }
            BackAngle => self.angle_step(i, &proxy, c.target_value)?,
        })
    }

    /// Translation when nothing below holds the component; otherwise a
    /// vertical stretch about the supporting contacts.
    fn height_step(&self, i: usize, proxy: &Proxy, top: f64, target: f64) -> AffineTransform {
        let translate = AffineTransform::translation(Vec3::new(0.0, target - top, 0.0));
        let Some(anchor) = self.treated_anchor(i, None) else {
            return translate;
        };
        if anchor.y >= proxy.center().y || target <= anchor.y {
            return translate;
        }
        let k = proxy.axis_toward(&Vec3::y());
        let frame = proxy.frame().with_origin(anchor);
        let top_at = |s: f64| {
            let mut scale = Vec3::repeat(1.0);
            scale[k] = s;
            let t = AffineTransform::scaling(frame, scale);
            (proxy.transformed(&t).top_height(), t)
        };
        // The top is affine in s for an axis-aligned stretch; secant steps
        // also absorb the tilted case.
        let (mut s0, mut f0) = (1.0, top - target);
        let mut s1 = (target - anchor.y) / (top - anchor.y);
        let mut best = translate;
        for _ in 0..6 {
            if s1 <= 1e-3 {
                return translate;
            }
            let (h1, t1) = top_at(s1);
            let f1 = h1 - target;
            best = t1;
            if f1.abs() < 1e-12 || (f1 - f0).abs() < 1e-15 {
                break;
            }
            let s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
            (s0, f0, s1) = (s1, f1, s2);
        }
        best
    }

    /// Rotation of the back about the seat's lateral axis through the
    /// seat–back contact centroid, solved so the re-measured angle hits the
    /// target.
    fn angle_step(&self, i: usize, proxy: &Proxy, target_deg: f64) -> Result<AffineTransform> {
        let seat = *self
            .seat_proxy()
            .ok_or_else(|| Error::MissingComponent("seat".into()))?;
        let fwd = seat_forward(&seat);
        let f = seat.frame();
        let mut lateral = f.axis(seat.axis_toward(&Vec3::x()));
        if lateral.x < 0.0 {
            lateral = -lateral;
        }
        let pivot = self.seat_contact_centroid(i).unwrap_or_else(|| {
            let (up, k) = back_up(proxy);
            proxy.center() - up * proxy.half_extents()[k]
        });
        let angle_at = |phi: f64| {
            let t = AffineTransform::rotation_about(pivot, lateral, phi);
            let (up, _) = back_up(&proxy.transformed(&t));
            (up.dot(&fwd).clamp(-1.0, 1.0).acos().to_degrees(), t)
        };
        let (current, _) = angle_at(0.0);
        let mut phi = -(target_deg - current).to_radians();
        let h = 1e-6;
        for _ in 0..12 {
            let (a, _) = angle_at(phi);
            let err = a - target_deg;
            if err.abs() < 1e-10 {
                break;
            }
            let d = (angle_at(phi + h).0 - angle_at(phi - h).0) / (2.0 * h);
            if d.abs() < 1e-9 {
                break;
            }
            phi -= err / d;
        }
        Ok(angle_at(phi).1)
    }

    /// Midpoint image of the centroid of `i`'s contacts with seat components.
    fn seat_contact_centroid(&self, i: usize) -> Option<Vec3> {
        let g = &self.original.graph;
        let cs: Vec<Vec3> = g
            .contacts_of(&self.component(i).id)
            .map(|e| &g.contact_edges[e])
            .filter_map(|c| {
                let o = self.other_end(c, i);
                (self.component(o).tag == PartTag::Seat)
                    .then(|| 0.5 * (self.image(i, &c.centroid) + self.image(o, &c.centroid)))
            })
            .collect();
        (!cs.is_empty()).then(|| cs.iter().sum::<Vec3>() / cs.len() as f64)
    }

    /// Applies `c` to every component carrying its tag and records it.
    /// Returns the step given to each component.
    pub fn apply_constraint(
        &mut self,
        c: &ErgonomicConstraint,
    ) -> Result<Vec<(usize, AffineTransform)>> {
        let targets: Vec<usize> = self
            .original
            .components_tagged(c.target_tag)
            .map(|(i, _)| i)
            .collect();
        if targets.is_empty() {
            return Err(Error::MissingComponent(c.target_tag.as_str().into()));
        }
        let mut steps = Vec::with_capacity(targets.len());
        for i in targets {
            let step = self.constraint_step(c, i)?;
            self.apply_step(i, &step);
            self.treated.insert(i);
            steps.push((i, step));
        }
        self.applied.push(c.clone());
        Ok(steps)
    }

    /// P_m: the treated component with the most contacts that still has an
    /// untreated neighbour; ties go to the lowest id.
    fn pick_source(&self, adj: &[BTreeSet<usize>]) -> Option<usize> {
        let g = &self.original.graph;
        self.treated
            .iter()
            .copied()
            .filter(|&i| adj[i].iter().any(|n| !self.treated.contains(n)))
            .max_by(|&a, &b| {
                let (ca, cb) = (self.component(a), self.component(b));
                g.contact_degree(&ca.id)
                    .cmp(&g.contact_degree(&cb.id))
                    .then_with(|| cb.id.cmp(&ca.id))
            })
    }

    /// P_q: the untreated neighbour of `m` with the most deformed contacts.
    fn pick_target(&self, m: usize, adj: &[BTreeSet<usize>]) -> usize {
        let deformed = |q: usize| adj[q].iter().filter(|n| self.treated.contains(n)).count();
        adj[m]
            .iter()
            .copied()
            .filter(|n| !self.treated.contains(n))
            .max_by(|&a, &b| {
                deformed(a)
                    .cmp(&deformed(b))
                    .then_with(|| self.component(b).id.cmp(&self.component(a).id))
            })
            .expect("source has an untreated neighbour")
    }
}

/// Reshapes `shape` toward `groups` with default settings.
pub fn propagate(shape: &Shape, groups: &[ConstraintGroup]) -> Result<Reshaped> {
    propagate_with(shape, groups, &ReshapeConfig::default())
}

pub fn propagate_with(
    shape: &Shape,
    groups: &[ConstraintGroup],
    config: &ReshapeConfig,
) -> Result<Reshaped> {
    let mut state = DeformationState::new(shape, config);
    state.rotating = groups
        .iter()
        .flat_map(|g| &g.constraints)
        .filter(|c| c.kind.is_angle())
        .map(|c| c.target_tag)
        .collect();
    let n = shape.components.len();
    let mut adj = vec![BTreeSet::new(); n];
    for e in &shape.graph.contact_edges {
        let (a, b) = (state.idx(&e.comp_a), state.idx(&e.comp_b));
        if a != b {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    if !shape.graph.is_connected() {
        log::warn!(
            "shape `{}`: contact graph is disconnected; parts propagate independently",
            shape.id
        );
    }

    for group in groups {
        state.treated.clear();
        for c in &group.constraints {
            // Directly constrained components first follow what this group
            // already moved.
            for (i, _) in shape.components_tagged(c.target_tag) {
                if !state.treated.contains(&i) {
                    let follow = state.fit_step(i)?;
                    state.apply_step(i, &follow);
                }
            }
            state.apply_constraint(c)?;
        }
        while let Some(m) = state.pick_source(&adj) {
            let q = state.pick_target(m, &adj);
            let mut step = state.fit_step(q)?;
            state.apply_step(q, &step);
            let tag = state.component(q).tag;
            let binding: Vec<ErgonomicConstraint> = state
                .applied
                .iter()
                .filter(|c| c.target_tag == tag)
                .cloned()
                .collect();
            for c in &binding {
                let enforce = state.constraint_step(c, q)?;
                state.apply_step(q, &enforce);
                step = enforce.compose(&step);
            }
            state.treated.insert(q);
            if let Some(edge) = shape.graph.mirror_partner(&state.component(q).id) {
                let p = state.idx(if edge.comp_a == state.component(q).id {
                    &edge.comp_b
                } else {
                    &edge.comp_a
                });
                if !state.treated.contains(&p) {
                    state.apply_step(p, &step.mirrored(&edge.plane));
                    state.treated.insert(p);
                }
            }
        }
    }

    let out = deformed_shape(&state);
    let record = DeformationRecord::new(shape, &out, &state.transforms);
    let mut outcomes = Vec::new();
    for c in groups.iter().flat_map(|g| &g.constraints) {
        let check = check_constraint(c, &out)?;
        outcomes.push(ConstraintOutcome {
            constraint: c.clone(),
            conflict: check.violation > config.conflict_tol,
            check,
        });
    }
    Ok(Reshaped {
        shape: out,
        record,
        outcomes,
    })
}

/// Applies the accumulated transforms to samples, proxies and contact
/// points (contacts take the midpoint of both sides' images).
fn deformed_shape(state: &DeformationState<'_>) -> Shape {
    let src = state.original;
    let components = src
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let t = &state.transforms[i];
            Component {
                id: c.id.clone(),
                tag: c.tag,
                samples: c.samples.iter().map(|p| t.apply(p)).collect(),
                faces: c.faces.clone(),
                proxy: state.proxies[i],
            }
        })
        .collect();
    let mut graph = src.graph.clone();
    for e in &mut graph.contact_edges {
        let (a, b) = (state.idx(&e.comp_a), state.idx(&e.comp_b));
        let mid = |p: &Vec3| 0.5 * (state.image(a, p) + state.image(b, p));
        e.points = e.points.iter().map(mid).collect();
        e.centroid = mid(&e.centroid);
    }
    Shape {
        id: src.id.clone(),
        components,
        graph,
        style_label: src.style_label.clone(),
    }
}
