//! Body measurements to grouped geometric targets on tagged components, each
//! with an admissible sliding band.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::avatar::BodyMeasurements;
use crate::error::{Error, Result};
use crate::geometry::{most_aligned, Proxy, Vec3};
use crate::shape::{PartTag, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    SeatHeight,
    SeatWidth,
    SeatLength,
    ArmHeight,
    BackAngle,
    BackLength,
    /// Height of a work surface or screen top (co-retrieval only).
    TopHeight,
}

impl ConstraintKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstraintKind::SeatHeight => "seat_height",
            ConstraintKind::SeatWidth => "seat_width",
            ConstraintKind::SeatLength => "seat_length",
            ConstraintKind::ArmHeight => "arm_height",
            ConstraintKind::BackAngle => "back_angle",
            ConstraintKind::BackLength => "back_length",
            ConstraintKind::TopHeight => "top_height",
        }
    }

    pub fn group(&self) -> GroupName {
        match self {
            ConstraintKind::SeatHeight | ConstraintKind::ArmHeight | ConstraintKind::TopHeight => {
                GroupName::Heights
            }
            ConstraintKind::SeatWidth => GroupName::Widths,
            ConstraintKind::SeatLength | ConstraintKind::BackLength => GroupName::Lengths,
            ConstraintKind::BackAngle => GroupName::Angles,
        }
    }

    pub fn is_angle(&self) -> bool {
        *self == ConstraintKind::BackAngle
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupName {
    Heights,
    Widths,
    Lengths,
    Angles,
}

impl GroupName {
    pub fn as_str(&self) -> &'static str {
        match self {
            GroupName::Heights => "heights",
            GroupName::Widths => "widths",
            GroupName::Lengths => "lengths",
            GroupName::Angles => "angles",
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgonomicConstraint {
    pub kind: ConstraintKind,
    pub target_tag: PartTag,
    /// Meters, or degrees for angles.
    pub target_value: f64,
    pub band: (f64, f64),
}

impl ErgonomicConstraint {
    pub fn relative(kind: ConstraintKind, tag: PartTag, target: f64, rel: f64) -> Self {
        ErgonomicConstraint {
            kind,
            target_tag: tag,
            target_value: target,
            band: (target * (1.0 - rel), target * (1.0 + rel)),
        }
    }

    /// Distance from `measured` to the band; 0 inside.
    pub fn violation(&self, measured: f64) -> f64 {
        (self.band.0 - measured)
            .max(measured - self.band.1)
            .max(0.0)
    }

    /// Band contains the target, each end within 15% of it, total width at
    /// least 5% of it.
    pub fn is_well_formed(&self) -> bool {
        let (lo, hi, t) = (self.band.0, self.band.1, self.target_value);
        let slack = 1e-12 * t.abs();
        lo <= t
            && t <= hi
            && t - lo <= 0.15 * t + slack
            && hi - t <= 0.15 * t + slack
            && hi - lo >= 0.05 * t - slack
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintGroup {
    pub name: GroupName,
    pub constraints: Vec<ErgonomicConstraint>,
}

/// Band widths (relative half-widths unless noted) and group order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgoConfig {
    pub seat_height_rel: f64,
    /// Seat width band as multiples of the hip width, per occupant.
    pub seat_width_factors: (f64, f64),
    pub seat_length_rel: f64,
    pub arm_height_rel: f64,
    pub back_angle_rel: f64,
    pub back_length_rel: f64,
    pub top_height_rel: f64,
    pub group_order: [GroupName; 4],
}

impl Default for ErgoConfig {
    fn default() -> Self {
        ErgoConfig {
            seat_height_rel: 0.05,
            seat_width_factors: (1.1, 1.2),
            seat_length_rel: 0.10,
            arm_height_rel: 0.10,
            back_angle_rel: 0.05,
            back_length_rel: 0.15,
            top_height_rel: 0.05,
            group_order: [
                GroupName::Heights,
                GroupName::Widths,
                GroupName::Lengths,
                GroupName::Angles,
            ],
        }
    }
}

/// Orders constraints into the configured groups; inside a group the
/// constraints whose tag carries the most constraints overall come first.
pub fn group_constraints(
    all: Vec<ErgonomicConstraint>,
    config: &ErgoConfig,
) -> Vec<ConstraintGroup> {
    let mut per_tag: BTreeMap<PartTag, usize> = BTreeMap::new();
    for c in &all {
        *per_tag.entry(c.target_tag).or_default() += 1;
    }
    config
        .group_order
        .iter()
        .filter_map(|&name| {
            let mut cs: Vec<ErgonomicConstraint> = all
                .iter()
                .filter(|c| c.kind.group() == name)
                .cloned()
                .collect();
            cs.sort_by(|a, b| {
                per_tag[&b.target_tag]
                    .cmp(&per_tag[&a.target_tag])
                    .then(a.kind.cmp(&b.kind))
            });
            (!cs.is_empty()).then_some(ConstraintGroup {
                name,
                constraints: cs,
            })
        })
        .collect()
}

/// Seat-based constraints for `shape`. Only tags present in the shape get
/// constraints; a shape without a seat is unsupported.
pub fn derive_constraints(
    m: &BodyMeasurements,
    shape: &Shape,
    config: &ErgoConfig,
) -> Result<Vec<ConstraintGroup>> {
    use ConstraintKind::*;
    if !shape.has_tag(PartTag::Seat) {
        return Err(Error::UnsupportedShape {
            shape: shape.id.clone(),
            reason: "no component tagged `seat`".into(),
        });
    }
    let mut all = vec![ErgonomicConstraint::relative(
        SeatHeight,
        PartTag::Seat,
        m.hip_height,
        config.seat_height_rel,
    )];
    let n = m.occupants.max(1) as f64;
    let (f_lo, f_hi) = config.seat_width_factors;
    all.push(ErgonomicConstraint {
        kind: SeatWidth,
        target_tag: PartTag::Seat,
        target_value: n * m.hip_width * 0.5 * (f_lo + f_hi),
        band: (n * m.hip_width * f_lo, n * m.hip_width * f_hi),
    });
    all.push(ErgonomicConstraint::relative(
        SeatLength,
        PartTag::Seat,
        m.upper_leg_length,
        config.seat_length_rel,
    ));
    if shape.has_tag(PartTag::Arm) {
        all.push(ErgonomicConstraint::relative(
            ArmHeight,
            PartTag::Arm,
            m.lower_arm_height,
            config.arm_height_rel,
        ));
    }
    if shape.has_tag(PartTag::Back) {
        all.push(ErgonomicConstraint::relative(
            BackAngle,
            PartTag::Back,
            m.spine_leg_angle,
            config.back_angle_rel,
        ));
        all.push(ErgonomicConstraint::relative(
            BackLength,
            PartTag::Back,
            m.support_span,
            config.back_length_rel,
        ));
    }
    Ok(group_constraints(all, config))
}

/// A single top-height target on `tag` (tables, monitors).
pub fn top_height_constraints(
    tag: PartTag,
    target: f64,
    config: &ErgoConfig,
) -> Vec<ConstraintGroup> {
    group_constraints(
        vec![ErgonomicConstraint::relative(
            ConstraintKind::TopHeight,
            tag,
            target,
            config.top_height_rel,
        )],
        config,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub satisfied: bool,
    pub measured: f64,
    pub violation: f64,
    /// Component that produced `measured` (the worst one when a tag has
    /// several).
    pub component: String,
}

/// Seat forward direction: the seat proxy axis closest to +z.
pub fn seat_forward(seat: &Proxy) -> Vec3 {
    let f = seat.frame();
    let axes = [f.axis(0), f.axis(1), f.axis(2)];
    let a = axes[most_aligned(&axes, &Vec3::z())];
    if a.z < 0.0 {
        -a
    } else {
        a
    }
}

/// Back panel (up direction, index of the up axis in the proxy frame). The
/// panel normal is the thinnest axis and the lateral axis the remaining one
/// closest to x; up is their cross product, pointing upwards.
pub fn back_up(back: &Proxy) -> (Vec3, usize) {
    let f = back.frame();
    let h = back.half_extents();
    let axes = [f.axis(0), f.axis(1), f.axis(2)];
    let normal = (0..3)
        .min_by(|&a, &b| h[a].total_cmp(&h[b]).then(b.cmp(&a)))
        .expect("three axes");
    let rest: Vec<usize> = (0..3).filter(|&k| k != normal).collect();
    let lateral = if axes[rest[0]].x.abs() >= axes[rest[1]].x.abs() {
        rest[0]
    } else {
        rest[1]
    };
    let up_idx = 3 - normal - lateral;
    let mut up = axes[normal].cross(&axes[lateral]);
    if up.y < 0.0 {
        up = -up;
    }
    (up.normalize(), up_idx)
}

/// Realized value of `kind` on one component.
pub fn measure_component(kind: ConstraintKind, proxy: &Proxy, seat: Option<&Proxy>) -> Result<f64> {
    use ConstraintKind::*;
    Ok(match kind {
        SeatHeight | ArmHeight | TopHeight => proxy.top_height(),
        SeatWidth => proxy.extent_toward(&Vec3::x()),
        SeatLength => proxy.extent_toward(&Vec3::z()),
        BackAngle => {
            let seat = seat.ok_or_else(|| Error::MissingComponent("seat".into()))?;
            let (up, _) = back_up(proxy);
            up.dot(&seat_forward(seat))
                .clamp(-1.0, 1.0)
                .acos()
                .to_degrees()
        }
        BackLength => {
            let (_, k) = back_up(proxy);
            2.0 * proxy.half_extents()[k]
        }
    })
}

pub fn check_constraint(c: &ErgonomicConstraint, shape: &Shape) -> Result<ConstraintCheck> {
    let seat = shape
        .components_tagged(PartTag::Seat)
        .next()
        .map(|(_, s)| &s.proxy);
    let mut worst: Option<ConstraintCheck> = None;
    for (_, comp) in shape.components_tagged(c.target_tag) {
        let measured = measure_component(c.kind, &comp.proxy, seat)?;
        let violation = c.violation(measured);
        if worst.as_ref().is_none_or(|w| violation > w.violation) {
            worst = Some(ConstraintCheck {
                satisfied: violation == 0.0,
                measured,
                violation,
                component: comp.id.clone(),
            });
        }
    }
    worst.ok_or_else(|| Error::MissingComponent(c.target_tag.as_str().into()))
}
