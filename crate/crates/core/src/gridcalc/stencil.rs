//! Finite-difference and cumulative-quadrature weights on uniform axes.

/// Fornberg's recursion: weights of the `m`-th derivative at `z` from nodes `x`.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Row `i` of a banded operator: `out[i] = Σ_k weights[k] · f[start + k]`.
#[derive(Debug, Clone)]
pub struct StencilRow {
    pub start: usize,
    pub weights: Vec<f64>,
}

/// One banded row per grid point (or per interval, for quadrature tables).
#[derive(Debug, Clone)]
pub struct StencilTable {
    pub rows: Vec<StencilRow>,
}

impl StencilTable {
    /// Derivative of `order` with formal accuracy `accuracy` (even) on `n` points.
    ///
    /// Interior rows are centered with `accuracy + 1` nodes; rows too close to
    /// an end use `accuracy + order` nodes pushed against that end. The accuracy
    /// drops (in steps of two) when the axis is too short to hold the window.
    pub fn derivative(n: usize, h: f64, order: usize, accuracy: usize) -> Self {
        let mut acc = accuracy.max(2);
        while acc > 2 && acc + order > n {
            acc -= 2;
        }
        let half = acc / 2;
        let one_sided = (acc + order).min(n);
        let scale = h.powi(order as i32);
        let rows = (0..n)
            .map(|i| {
                let (start, len) = if i >= half && i + half < n {
                    (i - half, 2 * half + 1)
                } else {
                    let start = i.saturating_sub(one_sided / 2).min(n - one_sided);
                    (start, one_sided)
                };
                let nodes: Vec<f64> = (0..len).map(|k| (start + k) as f64 - i as f64).collect();
                let weights = fornberg_weights(0.0, &nodes, order)
                    .into_iter()
                    .map(|w| w / scale)
                    .collect();
                StencilRow { start, weights }
            })
            .collect();
        Self { rows }
    }

    /// Integral over each interval `[x_i, x_{i+1}]` of the degree-`(points−1)`
    /// interpolant through `points` nodes around it; `n − 1` rows.
    pub fn interval_quadrature(n: usize, h: f64, points: usize) -> Self {
        let p = points.min(n);
        let back = (p / 2).saturating_sub(1);
        let rows = (0..n - 1)
            .map(|i| {
                let start = i.saturating_sub(back).min(n - p);
                let nodes: Vec<f64> = (0..p).map(|k| (start + k) as f64 - i as f64).collect();
                let weights = (0..p).map(|a| h * lagrange_integral(&nodes, a)).collect();
                StencilRow { start, weights }
            })
            .collect();
        Self { rows }
    }
}

/// `∫_0^1 ℓ_a(t) dt` for the Lagrange basis polynomial of node `a`.
fn lagrange_integral(nodes: &[f64], a: usize) -> f64 {
    // Expand Π_{b≠a} (t − x_b)/(x_a − x_b) into monomial coefficients.
    let mut coeffs = vec![1.0];
    let mut denom = 1.0;
    for (b, &xb) in nodes.iter().enumerate() {
        if b == a {
            continue;
        }
        denom *= nodes[a] - xb;
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * xb;
        }
        coeffs = next;
    }
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c / (k + 1) as f64)
        .sum::<f64>()
        / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_central_weights() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 1);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn rows_sum_to_zero() {
        for order in 1..=2 {
            let t = StencilTable::derivative(30, 0.1, order, 8);
            for row in &t.rows {
                assert!(row.weights.iter().sum::<f64>().abs() < 1e-8);
            }
        }
    }

    #[test]
    fn quadrature_rows_integrate_polynomials() {
        let h = 0.25;
        let t = StencilTable::interval_quadrature(20, h, 8);
        for (i, row) in t.rows.iter().enumerate() {
            let f = |x: f64| x.powi(7) - 2.0 * x.powi(3);
            let got: f64 = row
                .weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * f((row.start + k) as f64 * h))
                .sum();
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let g = |x: f64| x.powi(8) / 8.0 - x.powi(4) / 2.0;
            assert!((got - (g(b) - g(a))).abs() < 1e-9, "interval {i}");
        }
    }

    #[test]
    fn short_axis_lowers_accuracy() {
        let t = StencilTable::derivative(5, 1.0, 2, 8);
        assert!(t.rows.iter().all(|r| r.start + r.weights.len() <= 5));
    }
}
