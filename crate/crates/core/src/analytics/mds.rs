use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planar coordinates per input row plus Kruskal stress-1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding2D {
    pub coords: Vec<[f64; 2]>,
    pub stress: f64,
}

impl Embedding2D {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coords[i], self.coords[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }
}

fn check_distances(d: &[Vec<f64>]) -> Result<()> {
    let n = d.len();
    let scale = d.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-9 * scale.max(1.0);
    for (i, row) in d.iter().enumerate() {
        if row.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: row.len(),
            });
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::validation(
                    format!("distances[{i}][{j}]"),
                    format!("{x} is not a finite non-negative distance"),
                ));
            }
            if (x - d[j][i]).abs() > tol {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
        if row[i].abs() > tol {
            return Err(Error::validation(
                format!("distances[{i}][{i}]"),
                "diagonal must be zero",
            ));
        }
    }
    Ok(())
}

/// Classical (Torgerson) scaling to the plane: double-centre the squared
/// distances and keep the two leading eigenpairs. Each axis is signed so its
/// largest-magnitude coordinate is positive.
pub fn mds_embed(d: &[Vec<f64>]) -> Result<Embedding2D> {
    check_distances(d)?;
    let n = d.len();
    if n == 0 {
        return Ok(Embedding2D {
            coords: Vec::new(),
            stress: 0.0,
        });
    }
    let d2 = DMatrix::from_fn(n, n, |i, j| (0.5 * (d[i][j] + d[j][i])).powi(2));
    let row_mean: Vec<f64> = (0..n).map(|i| d2.row(i).mean()).collect();
    let all_mean = d2.mean();
    let b = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (d2[(i, j)] - row_mean[i] - row_mean[j] + all_mean)
    });
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| {
        eig.eigenvalues[c]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&c))
    });
    let mut coords = vec![[0.0; 2]; n];
    for (axis, &k) in order.iter().take(2).enumerate() {
        let lambda = eig.eigenvalues[k].max(0.0);
        let v = eig.eigenvectors.column(k);
        let pivot = (0..n)
            .max_by(|&a, &c| v[a].abs().total_cmp(&v[c].abs()).then(c.cmp(&a)))
            .unwrap_or(0);
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            coords[i][axis] = sign * v[i] * lambda.sqrt();
        }
    }
    let mut emb = Embedding2D {
        coords,
        stress: 0.0,
    };
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            num += (d[i][j] - emb.distance(i, j)).powi(2);
            den += d[i][j].powi(2);
        }
    }
    emb.stress = if den > 0.0 { (num / den).sqrt() } else { 0.0 };
    Ok(emb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(points: &[[f64; 2]]) -> Vec<Vec<f64>> {
        points
            .iter()
            .map(|a| {
                points
                    .iter()
                    .map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn collinear_triple() {
        let d = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        let e = mds_embed(&d).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((e.distance(i, j) - d[i][j]).abs() < 1e-6);
            }
        }
        assert!(e.stress < 1e-9);
    }

    #[test]
    fn zero_matrix_collapses() {
        let e = mds_embed(&vec![vec![0.0; 4]; 4]).unwrap();
        assert!(e.coords.iter().all(|c| c[0] == 0.0 && c[1] == 0.0));
        assert_eq!(e.stress, 0.0);
    }

    #[test]
    fn planted_planar_points_are_recovered() {
        let pts = [[0.0, 0.0], [3.0, 1.0], [-1.0, 2.0], [2.5, -2.0], [0.5, 0.7]];
        let d = dist(&pts);
        let e = mds_embed(&d).unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                assert!((e.distance(i, j) - d[i][j]).abs() < 1e-6);
            }
        }
        assert!(e.stress < 1e-9);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let d = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(mds_embed(&d), Err(Error::NotSymmetric { .. })));
    }
}
