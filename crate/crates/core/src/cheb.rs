//! Chebyshev collocation on the real line through `x = L·atanh(z)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default mapping scale `L`.
pub const DEFAULT_SCALE: f64 = 10.0;

/// A mapped node: finite interior point or one of the two infinite ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl Node {
    pub fn is_finite(self) -> bool {
        matches!(self, Node::Finite(_))
    }

    /// IEEE value, with the ends as `±inf`.
    pub fn to_f64(self) -> f64 {
        match self {
            Node::NegInfinity => f64::NEG_INFINITY,
            Node::Finite(x) => x,
            Node::PosInfinity => f64::INFINITY,
        }
    }
}

/// Collocation grid with `n + 1` nodes ordered from `z = 1` (x = +∞) to
/// `z = −1` (x = −∞).
#[derive(Debug, Clone)]
pub struct ChebGrid {
    n: usize,
    scale: f64,
    z: Vec<f64>,
    x: Vec<Node>,
    d: Vec<f64>,
    d_scaled: Vec<f64>,
}

pub fn build_grid(n: usize, scale: f64) -> Result<ChebGrid> {
    if n < 2 {
        return Err(Error::Argument(format!(
            "grid degree must be at least 2, got {n}"
        )));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Argument(format!(
            "grid scale must be positive, got {scale}"
        )));
    }
    let m = n + 1;
    // sin form keeps z_j = −z_{N−j} bit-exact
    let z: Vec<f64> = (0..m)
        .map(|j| (std::f64::consts::PI * (n as f64 - 2.0 * j as f64) / (2.0 * n as f64)).sin())
        .collect();
    let x: Vec<Node> = z
        .iter()
        .enumerate()
        .map(|(j, &zj)| match j {
            0 => Node::PosInfinity,
            j if j == n => Node::NegInfinity,
            _ => Node::Finite(scale * zj.abs().atanh().copysign(zj)),
        })
        .collect();

    let c = |i: usize| if i == 0 || i == n { 2.0 } else { 1.0 };
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        let mut row_sum = 0.0;
        for j in 0..m {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let v = c(i) / c(j) * sign / (z[i] - z[j]);
                d[i * m + j] = v;
                row_sum += v;
            }
        }
        d[i * m + i] = -row_sum;
    }

    let mut d_scaled = vec![0.0; m * m];
    for (i, node) in x.iter().enumerate() {
        if let Node::Finite(xi) = *node {
            // dz/dx = sech²(x/L)/L = (1 − z²)/L
            let factor = (1.0 / (xi / scale).cosh()).powi(2) / scale;
            for j in 0..m {
                d_scaled[i * m + j] = factor * d[i * m + j];
            }
        }
    }
    Ok(ChebGrid {
        n,
        scale,
        z,
        x,
        d,
        d_scaled,
    })
}

impl ChebGrid {
    /// Polynomial degree `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes `N + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn nodes_z(&self) -> &[f64] {
        &self.z
    }

    pub fn nodes_x(&self) -> &[Node] {
        &self.x
    }

    /// Unscaled matrix `D_N` in row-major order.
    pub fn d_standard(&self) -> &[f64] {
        &self.d
    }

    /// `D̃_N = diag(sech²(x_i/L)/L)·D_N` in row-major order.
    pub fn d_scaled(&self) -> &[f64] {
        &self.d_scaled
    }

    pub fn d_scaled_at(&self, i: usize, j: usize) -> f64 {
        self.d_scaled[i * self.len() + j]
    }

    /// Apply `D̃_N` to nodal values.
    pub fn differentiate(&self, values: &[Complex64]) -> Vec<Complex64> {
        let m = self.len();
        assert_eq!(values.len(), m, "sample count must match the grid");
        self.d_scaled
            .chunks_exact(m)
            .map(|row| row.iter().zip(values).map(|(&a, &v)| v * a).sum())
            .collect()
    }

    /// Clenshaw–Curtis weights mapped to the line: `∫ f dx ≈ Σ w_j f(x_j)`.
    /// The end weights vanish since `dx/dz = L/(1 − z²)` is replaced by 0 there.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let n = self.n;
        let pi = std::f64::consts::PI;
        let mut w = vec![0.0; n + 1];
        for (j, wj) in w.iter_mut().enumerate().take(n).skip(1) {
            let theta = pi * j as f64 / n as f64;
            let mut v = 1.0;
            for k in 1..=n / 2 {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                v -= b * (2.0 * k as f64 * theta).cos() / (4.0 * (k * k) as f64 - 1.0);
            }
            let cc = 2.0 * v / n as f64;
            let zj = self.z[j];
            *wj = cc * self.scale / (1.0 - zj * zj);
        }
        w
    }
}

/// Samples `f(x_j)` for `j = 0..=N`. The infinite ends are passed as `±inf`,
/// so `f` must return its limit there.
pub fn sample_on_grid<F>(grid: &ChebGrid, f: F) -> Vec<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    grid.x.iter().map(|node| f(node.to_f64())).collect()
}
