//! Distribution-shaping transforms: Yeo-Johnson Gaussianization and PCA.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid searched by [`fit_lambda`]: −2.0 to 2.0 in steps of 0.1.
fn lambda_grid() -> impl Iterator<Item = f64> {
    (-20..=20).map(|i| i as f64 / 10.0)
}

/// Yeo-Johnson power transform of a single value.
///
/// Strictly monotone in `x` for every λ, defined on all reals:
/// ((x+1)^λ − 1)/λ for x ≥ 0 (ln(x+1) at λ=0) and
/// −((1−x)^(2−λ) − 1)/(2−λ) for x < 0 (−ln(1−x) at λ=2).
pub fn yeo_johnson(x: f64, lambda: f64) -> f64 {
    if x >= 0.0 {
        if lambda.abs() < 1e-12 {
            (x + 1.0).ln()
        } else {
            ((x + 1.0).powf(lambda) - 1.0) / lambda
        }
    } else if (2.0 - lambda).abs() < 1e-12 {
        -(1.0 - x).ln()
    } else {
        -((1.0 - x).powf(2.0 - lambda) - 1.0) / (2.0 - lambda)
    }
}

/// Applies [`yeo_johnson`] elementwise.
pub fn yeo_johnson_vec(values: &[f64], lambda: f64) -> Vec<f64> {
    values.iter().map(|&x| yeo_johnson(x, lambda)).collect()
}

/// Grid-searches λ ∈ {−2.0, −1.9, …, 2.0} maximizing the Gaussian profile
/// log-likelihood of the transformed values (variance term plus the
/// transform's log-Jacobian). Ties keep the smallest λ.
pub fn fit_lambda(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("fit_lambda needs at least one value"));
    }
    let n = values.len() as f64;
    // The Jacobian term is λ-linear and independent of the transform output.
    let jacobian_base: f64 = values.iter().map(|&x| x.signum() * (x.abs() + 1.0).ln()).sum();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for lambda in lambda_grid() {
        let y = yeo_johnson_vec(values, lambda);
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let ll = -(n / 2.0) * var.max(1e-300).ln() + (lambda - 1.0) * jacobian_base;
        if ll > best.0 {
            best = (ll, lambda);
        }
    }
    Ok(best.1)
}

/// A fitted PCA projection: centering mean plus orthonormal axes stored as
/// rows, sorted by descending eigenvalue.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pca {
    pub mean: Vec<f64>,
    pub axes: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

/// Fits a `k`-component PCA to the rows of `matrix`.
///
/// Eigenpairs of the sample covariance (÷(n−1)) are found with cyclic
/// Jacobi rotations; each axis is sign-fixed so its largest-magnitude
/// coordinate is positive.
pub fn pca_fit(matrix: &[Vec<f64>], k: usize) -> Result<Pca> {
    let n = matrix.len();
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "pca_fit needs at least 2 rows, got {n}"
        )));
    }
    let d = matrix[0].len();
    if matrix.iter().any(|row| row.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: matrix.iter().map(Vec::len).find(|&l| l != d).unwrap_or(d),
        });
    }
    if k > d {
        return Err(Error::InvalidConfig(format!(
            "pca_fit: k={k} exceeds the column count {d}"
        )));
    }
    let mut mean = vec![0.0; d];
    for row in matrix {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = vec![vec![0.0; d]; d];
    for row in matrix {
        for i in 0..d {
            let ci = row[i] - mean[i];
            for j in i..d {
                cov[i][j] += ci * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= (n - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }
    if (0..d).map(|i| cov[i][i]).sum::<f64>() == 0.0 {
        return Err(Error::Degenerate(
            "pca_fit: all rows are identical (zero covariance)".into(),
        ));
    }

    let (eigenvalues, vectors) = jacobi_eigen(&mut cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));

    let mut axes = Vec::with_capacity(k);
    let mut sorted_values = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let mut axis: Vec<f64> = (0..d).map(|row| vectors[row][idx]).collect();
        let dominant = axis
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(1.0);
        if dominant < 0.0 {
            for x in &mut axis {
                *x = -*x;
            }
        }
        axes.push(axis);
        sorted_values.push(eigenvalues[idx]);
    }
    Ok(Pca {
        mean,
        axes,
        eigenvalues: sorted_values,
    })
}

/// Projects rows onto the fitted axes (centering first).
pub fn pca_transform(pca: &Pca, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = pca.mean.len();
    rows.iter()
        .map(|row| {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            Ok(pca
                .axes
                .iter()
                .map(|axis| {
                    axis.iter()
                        .zip(row.iter().zip(&pca.mean))
                        .map(|(a, (x, m))| a * (x - m))
                        .sum()
                })
                .collect())
        })
        .collect()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (destroyed in
/// place). Returns (eigenvalues, eigenvector matrix with vectors as
/// columns). Dimensions here are small (≤ ~64), so O(d³) sweeps are cheap.
fn jacobi_eigen(a: &mut [Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = a.len();
    let mut v = vec![vec![0.0; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|p| ((p + 1)..d).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..d {
                    let (aip, aiq) = (a[i][p], a[i][q]);
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..d {
                    let (api, aqi) = (a[p][i], a[q][i]);
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for row in v.iter_mut() {
                    let (vip, viq) = (row[p], row[q]);
                    row[p] = c * vip - s * viq;
                    row[q] = s * vip + c * viq;
                }
            }
        }
    }
    let values = (0..d).map(|i| a[i][i]).collect();
    (values, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const E: f64 = std::f64::consts::E;

    #[test]
    fn lambda_one_is_identity() {
        for x in [-3.5, -1.0, 0.0, 0.4, 2.0, 100.0] {
            assert!((yeo_johnson(x, 1.0) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_zero_is_log1p_for_positive() {
        assert!((yeo_johnson(E - 1.0, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_two_is_negative_log_for_negative() {
        assert!((yeo_johnson(-(E - 1.0), 2.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn strictly_monotone_for_every_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for lambda in lambda_grid() {
            let mut xs: Vec<f64> = (0..200).map(|_| rng.random_range(-50.0..50.0)).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let ys = yeo_johnson_vec(&xs, lambda);
            for w in ys.windows(2) {
                assert!(w[0] < w[1], "not monotone at λ={lambda}");
            }
        }
    }

    #[test]
    fn fit_lambda_gaussianizes_lognormal_data() {
        // With x = exp(g) − 1 and g ~ N(2, 0.4²) kept positive, ln(x+1) = g
        // is exactly Gaussian, so the grid search should land at λ = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let values: Vec<f64> = (0..4000)
            .map(|_| {
                let z: f64 = rng.random_range(1e-12..1.0);
                let u: f64 = rng.random_range(0.0..1.0);
                let normal = (-2.0 * z.ln()).sqrt() * (2.0 * std::f64::consts::PI * u).cos();
                (2.0 + 0.4 * normal).max(0.0).exp() - 1.0
            })
            .collect();
        let lambda = fit_lambda(&values).unwrap();
        assert!(
            lambda.abs() <= 0.2,
            "expected λ near 0 for log-normal data, got {lambda}"
        );
    }

    #[test]
    fn fit_lambda_identity_for_already_gaussian_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let values: Vec<f64> = (0..4000)
            .map(|_| {
                let z: f64 = rng.random_range(1e-12..1.0);
                let u: f64 = rng.random_range(0.0..1.0);
                (-2.0 * z.ln()).sqrt() * (2.0 * std::f64::consts::PI * u).cos()
            })
            .collect();
        let lambda = fit_lambda(&values).unwrap();
        assert!(
            (lambda - 1.0).abs() <= 0.2,
            "expected λ near 1 for gaussian data, got {lambda}"
        );
    }

    #[test]
    fn fit_lambda_rejects_empty_and_handles_constant() {
        assert!(fit_lambda(&[]).is_err());
        // Constant input has zero variance for every λ; the guard keeps the
        // likelihood finite and the grid minimum (-2.0) wins the tie.
        let lambda = fit_lambda(&[0.0; 5]).unwrap();
        assert_eq!(lambda, -2.0);
        assert!(yeo_johnson_vec(&[0.0; 5], lambda).iter().all(|&y| y == 0.0));
    }

    #[test]
    fn pca_recovers_line_direction() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let x = i as f64 / 4.0 - 2.0;
                vec![x, 2.0 * x]
            })
            .collect();
        let pca = pca_fit(&rows, 2).unwrap();
        let axis = &pca.axes[0];
        let norm = (axis[0] * axis[0] + axis[1] * axis[1]).sqrt();
        assert!((norm - 1.0).abs() < 1e-10);
        let expected = [1.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()];
        assert!((axis[0] - expected[0]).abs() < 1e-10);
        assert!((axis[1] - expected[1]).abs() < 1e-10);
        assert!(pca.eigenvalues[1].abs() < 1e-10, "second eigenvalue ~ 0");
    }

    #[test]
    fn full_rank_projection_preserves_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let pca = pca_fit(&rows, 4).unwrap();
        let projected = pca_transform(&pca, &rows).unwrap();
        for i in 0..rows.len() {
            for j in (i + 1)..rows.len() {
                let orig: f64 = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                let proj: f64 = projected[i]
                    .iter()
                    .zip(&projected[j])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                assert!(
                    (orig.sqrt() - proj.sqrt()).abs() < 1e-8,
                    "isometry violated"
                );
            }
        }
    }

    #[test]
    fn degenerate_and_oversized_k_are_errors() {
        let constant = vec![vec![1.0, 2.0]; 5];
        assert!(matches!(
            pca_fit(&constant, 1),
            Err(crate::Error::Degenerate(_))
        ));
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(pca_fit(&rows, 3).is_err());
        assert!(pca_fit(&rows[..1], 1).is_err());
    }

    #[test]
    fn axes_are_orthonormal_and_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..6).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        let pca = pca_fit(&rows, 6).unwrap();
        for i in 0..6 {
            for j in i..6 {
                let dot: f64 = pca.axes[i].iter().zip(&pca.axes[j]).map(|(a, b)| a * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-8, "axes {i},{j} dot {dot}");
            }
        }
        for w in pca.eigenvalues.windows(2) {
            assert!(w[0] >= w[1] - 1e-12, "eigenvalues not descending");
        }
        for axis in &pca.axes {
            let dominant = axis
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap();
            assert!(dominant > 0.0, "sign convention violated");
        }
    }
}
