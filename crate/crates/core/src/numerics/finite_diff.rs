use super::{NumericsError, Result};

/// Fornberg's recursion: weights `w[k][j]` such that
/// `f^(k)(x0) ≈ Σ_j w[k][j] f(nodes[j])` for `k = 0..=max_derivative`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_derivative: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let m = max_derivative;
    let mut c = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return c;
    }
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Precomputed stencils for one derivative order on a uniform grid.
///
/// Interior points use the centred `(order + 1)`-point stencil (order rounded
/// up to even); points near either end use the same number of nodes shifted
/// inward so every derivative keeps the requested accuracy order.
#[derive(Debug, Clone)]
pub struct FiniteDifference {
    derivative: usize,
    width: usize,
    /// For every grid index: first stencil node and its weights.
    stencils: Vec<(usize, Vec<f64>)>,
}

impl FiniteDifference {
    pub fn uniform(n: usize, h: f64, derivative: usize, accuracy_order: usize) -> Result<Self> {
        if h <= 0.0 || !h.is_finite() {
            return Err(NumericsError::InvalidInput("grid spacing must be positive".into()));
        }
        let order = accuracy_order.max(2) + accuracy_order.max(2) % 2;
        // Centred stencil for the k-th derivative at even order p has
        // 2 * floor((k + 1) / 2) - 1 + p points.
        let width = 2 * derivative.div_ceil(2) - 1 + order;
        let one_sided = derivative + order;
        if n < one_sided.max(width) {
            return Err(NumericsError::GridTooCoarse {
                required: one_sided.max(width),
                available: n,
            });
        }
        let half = width / 2;
        let mut stencils = Vec::with_capacity(n);
        let mut cache: std::collections::HashMap<(usize, usize), Vec<f64>> = Default::default();
        for i in 0..n {
            let (start, len) = if i >= half && i + half < n {
                (i - half, width)
            } else if i < half {
                (0, one_sided)
            } else {
                (n - one_sided, one_sided)
            };
            let offset = i - start;
            let w = cache
                .entry((offset, len))
                .or_insert_with(|| {
                    let nodes: Vec<f64> = (0..len).map(|j| (j as f64 - offset as f64) * h).collect();
                    fornberg_weights(0.0, &nodes, derivative).swap_remove(derivative)
                })
                .clone();
            stencils.push((start, w));
        }
        Ok(Self {
            derivative,
            width,
            stencils,
        })
    }

    pub fn derivative_order(&self) -> usize {
        self.derivative
    }

    pub fn interior_width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.stencils.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stencils.is_empty()
    }

    /// Derivative at grid index `i` of the samples produced by `at`.
    #[inline]
    pub fn apply_at<T, F>(&self, i: usize, at: F) -> T
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
        F: Fn(usize) -> T,
    {
        let (start, w) = &self.stencils[i];
        let mut acc = T::default();
        for (j, &wj) in w.iter().enumerate() {
            acc = acc + at(start + j) * wj;
        }
        acc
    }

    pub fn apply<T>(&self, values: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        assert_eq!(values.len(), self.len(), "sample count must match the grid");
        (0..values.len()).map(|i| self.apply_at(i, |j| values[j])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_centred_weights() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-14);
        }
        assert!((w[0][2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn first_derivative_converges_at_fourth_order() {
        let err = |n: usize| {
            let h = 2.0 / (n - 1) as f64;
            let xs: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * h).collect();
            let fd = FiniteDifference::uniform(n, h, 1, 4).unwrap();
            let d = fd.apply(&xs.iter().map(|x| x.sin()).collect::<Vec<_>>());
            d.iter()
                .zip(&xs)
                .map(|(d, x)| (d - x.cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(41), err(81));
        let slope = (e1 / e2).log2();
        assert!(slope > 3.7, "slope {slope}");
    }

    #[test]
    fn second_derivative_is_exact_on_quadratics() {
        let n = 12;
        let fd = FiniteDifference::uniform(n, 0.5, 2, 4).unwrap();
        let vals: Vec<f64> = (0..n).map(|i| (i as f64 * 0.5).powi(2)).collect();
        for d in fd.apply(&vals) {
            assert!((d - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(matches!(
            FiniteDifference::uniform(3, 0.1, 1, 4),
            Err(NumericsError::GridTooCoarse { .. })
        ));
    }
}
