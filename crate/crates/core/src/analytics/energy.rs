use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Aabb;
use crate::reshaper::{DeformationRecord, SemanticPart};

/// Deformation energy of one semantic part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartEnergy {
    pub part: SemanticPart,
    /// Relative extent change per axis.
    pub delta_s: [f64; 3],
    /// Box-center shift per axis over the undeformed shape diagonal.
    pub delta_t: [f64; 3],
    pub e: f64,
}

/// `e = Π_j (1 + |Δs_j|) + Π_j (1 + |Δt_j|)`; 2 for an untouched part.
pub fn part_energy(before: &Aabb, after: &Aabb, shape_diag: f64) -> Result<PartEnergy> {
    part_energy_of(SemanticPart::Other, before, after, shape_diag)
}

pub(crate) fn part_energy_of(
    part: SemanticPart,
    before: &Aabb,
    after: &Aabb,
    shape_diag: f64,
) -> Result<PartEnergy> {
    if !(shape_diag > 0.0 && shape_diag.is_finite()) {
        return Err(Error::validation(
            "shape_diag",
            format!("{shape_diag} is not positive"),
        ));
    }
    let (eb, ea) = (before.extent(), after.extent());
    let (cb, ca) = (before.center(), after.center());
    let mut delta_s = [0.0; 3];
    let mut delta_t = [0.0; 3];
    for j in 0..3 {
        if eb[j] > 0.0 {
            delta_s[j] = ea[j] / eb[j] - 1.0;
        } else {
            log::warn!("part `{part}` has zero extent on axis {j}; its scale change is ignored");
        }
        delta_t[j] = (ca[j] - cb[j]) / shape_diag;
    }
    let prod = |d: &[f64; 3]| d.iter().map(|x| 1.0 + x.abs()).product::<f64>();
    Ok(PartEnergy {
        part,
        e: prod(&delta_s) + prod(&delta_t),
        delta_s,
        delta_t,
    })
}

/// Mean part energy.
pub fn shape_energy(parts: &[PartEnergy]) -> Result<f64> {
    if parts.is_empty() {
        return Err(Error::Empty("part energies"));
    }
    Ok(parts.iter().map(|p| p.e).sum::<f64>() / parts.len() as f64)
}

/// Part energies of a deformation record, normalized by `shape_diag`.
pub fn record_energies(record: &DeformationRecord, shape_diag: f64) -> Result<Vec<PartEnergy>> {
    record
        .parts
        .iter()
        .map(|(part, b)| part_energy_of(*part, &b.before, &b.after, shape_diag))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn unit() -> Aabb {
        Aabb {
            min: Vec3::zeros(),
            max: Vec3::repeat(1.0),
        }
    }

    #[test]
    fn identical_boxes_cost_two() {
        let p = part_energy(&unit(), &unit(), 1.0).unwrap();
        assert_eq!(p.e, 2.0);
        assert_eq!(p.delta_s, [0.0; 3]);
    }

    #[test]
    fn direct_evaluations() {
        let after = Aabb {
            min: Vec3::new(-0.25, 0.0, 0.0),
            max: Vec3::new(1.25, 1.0, 1.0),
        };
        assert!((part_energy(&unit(), &after, 1.0).unwrap().e - 2.5).abs() < 1e-12);
        // Δs = (0.1, 0.2, 0), Δt = (0.05, 0, 0).
        let shifted = Aabb {
            min: Vec3::new(0.0, -0.1, 0.0),
            max: Vec3::new(1.1, 1.1, 1.0),
        };
        let p = part_energy(&unit(), &shifted, 1.0).unwrap();
        assert!((p.delta_s[0] - 0.1).abs() < 1e-12 && (p.delta_s[1] - 0.2).abs() < 1e-12);
        assert!((p.delta_t[0] - 0.05).abs() < 1e-12);
        assert!((p.e - 2.37).abs() < 1e-12, "{}", p.e);
    }

    #[test]
    fn mean_of_parts() {
        let mk = |e| PartEnergy {
            part: SemanticPart::Seat,
            delta_s: [0.0; 3],
            delta_t: [0.0; 3],
            e,
        };
        assert_eq!(shape_energy(&[mk(2.0), mk(2.0)]).unwrap(), 2.0);
        assert_eq!(shape_energy(&[mk(2.5), mk(3.5)]).unwrap(), 3.0);
        assert!(shape_energy(&[]).is_err());
    }

    #[test]
    fn zero_extent_axis_is_ignored() {
        let flat = Aabb {
            min: Vec3::zeros(),
            max: Vec3::new(1.0, 0.0, 1.0),
        };
        let p = part_energy(&flat, &flat, 1.0).unwrap();
        assert_eq!(p.e, 2.0);
    }

    #[test]
    fn energy_grows_with_scale_change() {
        let mut last = 2.0;
        for k in 1..6 {
            let after = Aabb {
                min: Vec3::new(-0.05 * k as f64, 0.0, 0.0),
                max: Vec3::new(1.0 + 0.05 * k as f64, 1.0, 1.0),
            };
            let e = part_energy(&unit(), &after, 1.0).unwrap().e;
            assert!(e > last);
            last = e;
        }
    }
}
