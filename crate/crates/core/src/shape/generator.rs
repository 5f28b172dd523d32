//! Procedural furniture: four chair styles plus tables and monitors, built
//! from sampled boxes and cylinders in the shape's canonical frame (x lateral,
//! y up, z front, floor at y = 0).

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Component, GraphConfig, PartTag, Shape};
use crate::error::{Error, Result};
use crate::geometry::{perpendicular_basis, Vec3};

pub const DEFAULT_SPACING: f64 = 0.012;
const LEG_RADIUS: f64 = 0.015;
const BACK_THICKNESS: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChairStyle {
    Office,
    Bench,
    Beach,
    Bar,
}

impl ChairStyle {
    pub const ALL: [ChairStyle; 4] = [
        ChairStyle::Office,
        ChairStyle::Bench,
        ChairStyle::Beach,
        ChairStyle::Bar,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ChairStyle::Office => "office",
            ChairStyle::Bench => "bench",
            ChairStyle::Beach => "beach",
            ChairStyle::Bar => "bar",
        }
    }

    /// Range table for this style's parameters.
    pub fn ranges(&self) -> StyleRanges {
        match self {
            ChairStyle::Office => StyleRanges {
                seat_height: 0.42..=0.50,
                seat_width: 0.44..=0.52,
                seat_depth: 0.42..=0.50,
                back_length: 0.55..=0.70,
                back_recline_deg: 0.0..=12.0,
                arm_height: 0.14..=0.20,
                back_probability: 1.0,
            },
            ChairStyle::Bench => StyleRanges {
                seat_height: 0.42..=0.48,
                seat_width: 1.22..=1.45,
                seat_depth: 0.38..=0.46,
                back_length: 0.25..=0.35,
                back_recline_deg: 5.0..=15.0,
                arm_height: 0.0..=0.0,
                back_probability: 0.5,
            },
            ChairStyle::Beach => StyleRanges {
                seat_height: 0.22..=0.32,
                seat_width: 0.50..=0.60,
                seat_depth: 0.42..=0.50,
                back_length: 0.60..=0.75,
                back_recline_deg: 40.0..=70.0,
                arm_height: 0.0..=0.0,
                back_probability: 1.0,
            },
            ChairStyle::Bar => StyleRanges {
                seat_height: 0.70..=0.85,
                seat_width: 0.34..=0.42,
                seat_depth: 0.34..=0.42,
                back_length: 0.22..=0.32,
                back_recline_deg: 5.0..=12.0,
                arm_height: 0.0..=0.0,
                back_probability: 0.5,
            },
        }
    }

    fn salt(&self) -> u64 {
        match self {
            ChairStyle::Office => 0x0ff1ce,
            ChairStyle::Bench => 0xbe9c4,
            ChairStyle::Beach => 0xbea4c,
            ChairStyle::Bar => 0xba2,
        }
    }
}

impl fmt::Display for ChairStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChairStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChairStyle::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::unknown("style", s))
    }
}

/// Admissible parameter ranges of one style (meters, degrees). Arm ranges of
/// zero width mean the style has no arms.
#[derive(Clone, Debug, PartialEq)]
pub struct StyleRanges {
    pub seat_height: RangeInclusive<f64>,
    pub seat_width: RangeInclusive<f64>,
    pub seat_depth: RangeInclusive<f64>,
    pub back_length: RangeInclusive<f64>,
    pub back_recline_deg: RangeInclusive<f64>,
    /// Arm top above the seat top.
    pub arm_height: RangeInclusive<f64>,
    pub back_probability: f64,
}

/// Chair parameters; `None` fields are drawn from the style's range.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChairParams {
    pub seat_height: Option<f64>,
    pub seat_width: Option<f64>,
    pub seat_depth: Option<f64>,
    pub back_length: Option<f64>,
    pub back_recline_deg: Option<f64>,
    pub arm_height: Option<f64>,
    pub with_back: Option<bool>,
    /// Sample spacing on component surfaces.
    pub spacing: Option<f64>,
}

fn pick(
    rng: &mut ChaCha8Rng,
    name: &str,
    given: Option<f64>,
    range: &RangeInclusive<f64>,
) -> Result<f64> {
    // Always draw so that fixing one parameter leaves the others unchanged.
    let drawn = if range.start() < range.end() {
        rng.gen_range(range.clone())
    } else {
        *range.start()
    };
    match given {
        None => Ok(drawn),
        Some(v) if v.is_finite() && range.contains(&v) => Ok(v),
        Some(v) => Err(Error::validation(
            name,
            format!("{v} outside [{}, {}]", range.start(), range.end()),
        )),
    }
}

fn check_spacing(spacing: Option<f64>) -> Result<f64> {
    match spacing {
        None => Ok(DEFAULT_SPACING),
        Some(h) if h.is_finite() && (0.002..=0.05).contains(&h) => Ok(h),
        Some(h) => Err(Error::validation(
            "spacing",
            format!("{h} outside [0.002, 0.05]"),
        )),
    }
}

/// Grid samples over the six faces of a box; edges and corners included.
fn box_samples(center: Vec3, axes: [Vec3; 3], half: [f64; 3], h: f64) -> Vec<Vec3> {
    let mut pts = Vec::new();
    for normal in 0..3 {
        let (u, v) = ((normal + 1) % 3, (normal + 2) % 3);
        let nu = ((2.0 * half[u] / h).ceil() as usize).max(1);
        let nv = ((2.0 * half[v] / h).ceil() as usize).max(1);
        for side in [-1.0, 1.0] {
            let face = center + axes[normal] * (side * half[normal]);
            for i in 0..=nu {
                let a = -half[u] + 2.0 * half[u] * i as f64 / nu as f64;
                for j in 0..=nv {
                    let b = -half[v] + 2.0 * half[v] * j as f64 / nv as f64;
                    pts.push(face + axes[u] * a + axes[v] * b);
                }
            }
        }
    }
    pts
}

fn world_box(min: Vec3, max: Vec3, h: f64) -> Vec<Vec3> {
    let c = (min + max) * 0.5;
    let e = (max - min) * 0.5;
    box_samples(c, [Vec3::x(), Vec3::y(), Vec3::z()], [e.x, e.y, e.z], h)
}

/// Rings on the lateral surface of a cylinder; ring sizes are multiples of 4
/// with a point at angle 0.
fn cylinder_samples(base: Vec3, axis: Vec3, radius: f64, length: f64, h: f64) -> Vec<Vec3> {
    let (e1, e2) = perpendicular_basis(&axis);
    let per_ring =
        (((2.0 * std::f64::consts::PI * radius / h).ceil() as usize).div_ceil(4) * 4).max(8);
    let rings = ((length / h).ceil() as usize).max(2);
    let mut pts = Vec::with_capacity(per_ring * (rings + 1));
    for k in 0..=rings {
        let c = base + axis * (length * k as f64 / rings as f64);
        for i in 0..per_ring {
            let t = 2.0 * std::f64::consts::PI * i as f64 / per_ring as f64;
            pts.push(c + (e1 * t.cos() + e2 * t.sin()) * radius);
        }
    }
    pts
}

fn vertical_leg(x: f64, z: f64, top: f64, radius: f64, h: f64) -> Vec<Vec3> {
    cylinder_samples(Vec3::new(x, 0.0, z), Vec3::y(), radius, top, h)
}

/// Back panel hinged on the seat's rear top edge, leaning backwards by
/// `recline` radians from vertical.
fn back_panel(
    seat_top: f64,
    seat_rear_z: f64,
    width: f64,
    length: f64,
    recline: f64,
    h: f64,
) -> Vec<Vec3> {
    let up = Vec3::new(0.0, recline.cos(), -recline.sin());
    let normal = Vec3::new(0.0, recline.sin(), recline.cos());
    let hinge = Vec3::new(0.0, seat_top, seat_rear_z);
    let center = hinge + up * (length * 0.5) + normal * (BACK_THICKNESS * 0.5);
    box_samples(
        center,
        [Vec3::x(), up, normal],
        [width * 0.5, length * 0.5, BACK_THICKNESS * 0.5],
        h,
    )
}

struct Builder {
    parts: Vec<(String, PartTag, Vec<Vec3>)>,
}

impl Builder {
    fn new() -> Self {
        Builder { parts: Vec::new() }
    }

    fn add(&mut self, id: &str, tag: PartTag, samples: Vec<Vec3>) {
        self.parts.push((id.to_string(), tag, samples));
    }

    fn finish(self, id: String, label: Option<String>) -> Result<Shape> {
        let comps = self
            .parts
            .into_iter()
            .map(|(cid, tag, s)| Component::new(cid, tag, s))
            .collect::<Result<Vec<_>>>()?;
        Shape::new(id, comps, label, &GraphConfig::default())
    }
}

/// Deterministic chair of `style`: identical `(style, params, seed)` give
/// identical shapes.
pub fn generate_chair(style: ChairStyle, params: &ChairParams, seed: u64) -> Result<Shape> {
    let r = style.ranges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ style.salt());
    let h = check_spacing(params.spacing)?;
    let seat_h = pick(&mut rng, "seat_height", params.seat_height, &r.seat_height)?;
    let width = pick(&mut rng, "seat_width", params.seat_width, &r.seat_width)?;
    let depth = pick(&mut rng, "seat_depth", params.seat_depth, &r.seat_depth)?;
    let back_len = pick(&mut rng, "back_length", params.back_length, &r.back_length)?;
    let recline = pick(
        &mut rng,
        "back_recline_deg",
        params.back_recline_deg,
        &r.back_recline_deg,
    )?;
    let arm_h = pick(&mut rng, "arm_height", params.arm_height, &r.arm_height)?;
    let roll: f64 = rng.gen();
    let with_back = match params.with_back {
        Some(true) if r.back_probability == 0.0 => {
            return Err(Error::validation(
                "with_back",
                format!("{style} chairs have no back"),
            ))
        }
        Some(false) if r.back_probability == 1.0 => {
            return Err(Error::validation(
                "with_back",
                format!("{style} chairs always have a back"),
            ))
        }
        Some(b) => b,
        None => roll < r.back_probability,
    };
    let recline = recline.to_radians();

    let mut b = Builder::new();
    match style {
        ChairStyle::Office => {
            let t = 0.05;
            b.add(
                "seat",
                PartTag::Seat,
                world_box(
                    Vec3::new(-width / 2.0, seat_h - t, -depth / 2.0),
                    Vec3::new(width / 2.0, seat_h, depth / 2.0),
                    h,
                ),
            );
            b.add(
                "back",
                PartTag::Back,
                back_panel(seat_h, -depth / 2.0, 0.8 * width, back_len, recline, h),
            );
            let arm_len = 0.6 * depth;
            for (id, sx) in [("arm_l", -1.0), ("arm_r", 1.0)] {
                let xo = sx * (width / 2.0 - 0.015);
                b.add(
                    id,
                    PartTag::Arm,
                    world_box(
                        Vec3::new(xo - 0.015, seat_h, depth / 2.0 - arm_len),
                        Vec3::new(xo + 0.015, seat_h + arm_h, depth / 2.0),
                        h,
                    ),
                );
            }
            let (lx, lz) = (width / 2.0 - 0.04, depth / 2.0 - 0.04);
            for (id, sx, sz) in [
                ("leg_bl", -1.0, -1.0),
                ("leg_br", 1.0, -1.0),
                ("leg_fl", -1.0, 1.0),
                ("leg_fr", 1.0, 1.0),
            ] {
                b.add(
                    id,
                    PartTag::Leg,
                    vertical_leg(sx * lx, sz * lz, seat_h - t, LEG_RADIUS, h),
                );
            }
            b.add(
                "base",
                PartTag::Base,
                world_box(
                    Vec3::new(-lx + LEG_RADIUS, 0.14, lz - 0.015),
                    Vec3::new(lx - LEG_RADIUS, 0.16, lz + 0.015),
                    h,
                ),
            );
        }
        ChairStyle::Bench => {
            let t = 0.05;
            b.add(
                "seat",
                PartTag::Seat,
                world_box(
                    Vec3::new(-width / 2.0, seat_h - t, -depth / 2.0),
                    Vec3::new(width / 2.0, seat_h, depth / 2.0),
                    h,
                ),
            );
            if with_back {
                b.add(
                    "back",
                    PartTag::Back,
                    back_panel(seat_h, -depth / 2.0, 0.95 * width, back_len, recline, h),
                );
            }
            let lx = width / 2.0 - 0.10;
            let ld = 0.85 * depth / 2.0;
            for (id, sx) in [("leg_l", -1.0), ("leg_r", 1.0)] {
                b.add(
                    id,
                    PartTag::Leg,
                    world_box(
                        Vec3::new(sx * lx - 0.02, 0.0, -ld),
                        Vec3::new(sx * lx + 0.02, seat_h - t, ld),
                        h,
                    ),
                );
            }
            b.add(
                "base",
                PartTag::Base,
                world_box(
                    Vec3::new(-lx + 0.02, 0.11, -0.015),
                    Vec3::new(lx - 0.02, 0.13, 0.015),
                    h,
                ),
            );
        }
        ChairStyle::Beach => {
            let t = 0.04;
            b.add(
                "seat",
                PartTag::Seat,
                world_box(
                    Vec3::new(-width / 2.0, seat_h - t, -depth / 2.0),
                    Vec3::new(width / 2.0, seat_h, depth / 2.0),
                    h,
                ),
            );
            b.add(
                "back",
                PartTag::Back,
                back_panel(seat_h, -depth / 2.0, 0.9 * width, back_len, recline, h),
            );
            let (lx, lz) = (width / 2.0 - 0.05, depth / 2.0 - 0.05);
            for (id, sx, sz) in [
                ("leg_bl", -1.0, -1.0),
                ("leg_br", 1.0, -1.0),
                ("leg_fl", -1.0, 1.0),
                ("leg_fr", 1.0, 1.0),
            ] {
                b.add(
                    id,
                    PartTag::Leg,
                    vertical_leg(sx * lx, sz * lz, seat_h - t, 0.02, h),
                );
            }
        }
        ChairStyle::Bar => {
            let t = 0.05;
            b.add(
                "seat",
                PartTag::Seat,
                world_box(
                    Vec3::new(-width / 2.0, seat_h - t, -depth / 2.0),
                    Vec3::new(width / 2.0, seat_h, depth / 2.0),
                    h,
                ),
            );
            if with_back {
                b.add(
                    "back",
                    PartTag::Back,
                    back_panel(seat_h, -depth / 2.0, 0.30, back_len, recline, h),
                );
            }
            let (lx, lz) = (width / 2.0 - 0.04, depth / 2.0 - 0.04);
            for (id, sx, sz) in [
                ("leg_bl", -1.0, -1.0),
                ("leg_br", 1.0, -1.0),
                ("leg_fl", -1.0, 1.0),
                ("leg_fr", 1.0, 1.0),
            ] {
                b.add(
                    id,
                    PartTag::Leg,
                    vertical_leg(sx * lx, sz * lz, seat_h - t, LEG_RADIUS, h),
                );
            }
            for (id, sz) in [("base_b", -1.0), ("base_f", 1.0)] {
                b.add(
                    id,
                    PartTag::Base,
                    world_box(
                        Vec3::new(-lx + LEG_RADIUS, 0.29, sz * lz - 0.01),
                        Vec3::new(lx - LEG_RADIUS, 0.31, sz * lz + 0.01),
                        h,
                    ),
                );
            }
        }
    }
    b.finish(
        format!("{style}_{seed:04}"),
        Some(style.as_str().to_string()),
    )
}

/// `per_style` chairs of every style, seeds `seed..seed + per_style`, in
/// style order.
pub fn generate_corpus(per_style: usize, seed: u64) -> Result<Vec<Shape>> {
    let mut out = Vec::with_capacity(per_style * 4);
    for style in ChairStyle::ALL {
        for i in 0..per_style as u64 {
            out.push(generate_chair(style, &ChairParams::default(), seed + i)?);
        }
    }
    Ok(out)
}

/// Four-legged table; the top is tagged `other`.
pub fn generate_table(seed: u64) -> Result<Shape> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ab1e);
    let top_h: f64 = rng.gen_range(0.68..=0.78);
    let width: f64 = rng.gen_range(1.0..=1.4);
    let depth: f64 = rng.gen_range(0.6..=0.8);
    let t = 0.03;
    let h = 0.02;
    let mut b = Builder::new();
    b.add(
        "top",
        PartTag::Other,
        world_box(
            Vec3::new(-width / 2.0, top_h - t, -depth / 2.0),
            Vec3::new(width / 2.0, top_h, depth / 2.0),
            h,
        ),
    );
    let (lx, lz) = (width / 2.0 - 0.06, depth / 2.0 - 0.06);
    for (id, sx, sz) in [
        ("leg_bl", -1.0, -1.0),
        ("leg_br", 1.0, -1.0),
        ("leg_fl", -1.0, 1.0),
        ("leg_fr", 1.0, 1.0),
    ] {
        b.add(
            id,
            PartTag::Leg,
            vertical_leg(sx * lx, sz * lz, top_h - t, 0.025, h),
        );
    }
    b.finish(format!("table_{seed:04}"), Some("table".into()))
}

/// Monitor on a stand, foot at y = 0; the screen is tagged `other`.
pub fn generate_monitor(seed: u64) -> Result<Shape> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5c4ee);
    let screen_w: f64 = rng.gen_range(0.45..=0.62);
    let screen_h: f64 = rng.gen_range(0.28..=0.38);
    let lift: f64 = rng.gen_range(0.06..=0.14);
    let h = 0.006;
    let mut b = Builder::new();
    b.add(
        "foot",
        PartTag::Base,
        world_box(
            Vec3::new(-0.10, 0.0, -0.08),
            Vec3::new(0.10, 0.012, 0.08),
            h,
        ),
    );
    let neck_top = 0.012 + lift + 0.05;
    b.add(
        "neck",
        PartTag::Base,
        world_box(
            Vec3::new(-0.02, 0.012, -0.06),
            Vec3::new(0.02, neck_top, -0.04),
            h,
        ),
    );
    b.add(
        "screen",
        PartTag::Other,
        world_box(
            Vec3::new(-screen_w / 2.0, neck_top - 0.05, -0.04),
            Vec3::new(screen_w / 2.0, neck_top - 0.05 + screen_h, -0.02),
            h,
        ),
    );
    b.finish(format!("monitor_{seed:04}"), Some("monitor".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::shape_to_json;

    fn seat_top(s: &Shape) -> f64 {
        s.components_tagged(PartTag::Seat)
            .next()
            .unwrap()
            .1
            .proxy
            .top_height()
    }

    #[test]
    fn office_default_seat_height_in_range() {
        let s = generate_chair(ChairStyle::Office, &ChairParams::default(), 1).unwrap();
        let top = seat_top(&s);
        assert!((0.42..=0.50).contains(&top), "{top}");
        assert_eq!(s.style_label.as_deref(), Some("office"));
    }

    #[test]
    fn bar_default_seat_height_in_range() {
        let s = generate_chair(ChairStyle::Bar, &ChairParams::default(), 1).unwrap();
        let top = seat_top(&s);
        assert!((0.70..=0.85).contains(&top), "{top}");
    }

    #[test]
    fn generation_is_deterministic() {
        for style in ChairStyle::ALL {
            let a = generate_chair(style, &ChairParams::default(), 7).unwrap();
            let b = generate_chair(style, &ChairParams::default(), 7).unwrap();
            assert_eq!(shape_to_json(&a), shape_to_json(&b));
        }
    }

    #[test]
    fn out_of_range_params_are_rejected() {
        let p = ChairParams {
            seat_height: Some(0.9),
            ..Default::default()
        };
        assert!(matches!(
            generate_chair(ChairStyle::Office, &p, 1),
            Err(Error::Validation { ref name, .. }) if name == "seat_height"
        ));
    }

    #[test]
    fn every_generated_shape_is_connected() {
        for s in generate_corpus(3, 11).unwrap() {
            assert!(
                s.graph.is_connected(),
                "{} disconnected: {:?}",
                s.id,
                s.graph.connected_components()
            );
        }
        for seed in 0..3 {
            assert!(generate_table(seed).unwrap().graph.is_connected());
            assert!(generate_monitor(seed).unwrap().graph.is_connected());
        }
    }

    #[test]
    fn legs_are_cylinders_and_seats_are_boxes() {
        let s = generate_chair(ChairStyle::Office, &ChairParams::default(), 3).unwrap();
        for c in &s.components {
            match c.tag {
                PartTag::Leg => assert!(c.proxy.is_cylinder(), "{}", c.id),
                _ => assert!(!c.proxy.is_cylinder(), "{}", c.id),
            }
        }
    }
}
