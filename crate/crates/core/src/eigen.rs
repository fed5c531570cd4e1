//! Dense complex nonsymmetric eigensolver.
//!
//! Balancing by powers of two, Householder reduction to Hessenberg form,
//! then implicitly shifted single-shift QR with Wilkinson shifts on the
//! active window. Eigenvectors come from inverse iteration on the
//! Hessenberg matrix followed by the inverse similarity.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative residual below which an eigenpair is considered converged.
pub const VECTOR_TOLERANCE: f64 = 1e-8;

/// Dense square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Argument(
                "matrix rows must form a square array".into(),
            ));
        }
        Ok(Self {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        self.data
            .chunks_exact(self.n.max(1))
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let (src, dst) = (other.row(k), &mut out.data[i * n..(i + 1) * n]);
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .expect("nonempty range");
            if a[p * n + k] == ZERO {
                return ZERO;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f != ZERO {
                    for j in k..n {
                        let t = a[k * n + j];
                        a[i * n + j] -= f * t;
                    }
                }
            }
        }
        det
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Argument(
                "matrix dimension must be at least 1".into(),
            ));
        }
        if self
            .data
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::Argument("matrix has non-finite entries".into()));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Computed spectrum with optional unit eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSet {
    /// Sorted by imaginary part, then real part.
    pub values: Vec<Complex64>,
    pub vectors: Option<Vec<Vec<Complex64>>>,
    /// `‖Av − λv‖ / ‖A‖_F` per pair; empty without vectors.
    pub residuals: Vec<f64>,
    /// QR sweeps performed.
    pub iterations: usize,
}

impl EigenSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Eigenvector obtained for a requested eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
    /// Residual stayed above [`VECTOR_TOLERANCE`]: defective or clustered.
    pub ill_conditioned: bool,
}

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

fn sort_values(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
}

/// Balanced Hessenberg form `H = Qᴴ D⁻¹ A D Q`.
struct Hessenberg {
    h: ComplexMatrix,
    /// Householder vectors, reflector k acts on rows/cols k+1..n.
    reflectors: Vec<(usize, Vec<Complex64>, f64)>,
    scaling: Vec<f64>,
}

fn balance(a: &mut ComplexMatrix) -> Vec<f64> {
    let n = a.n;
    let mut d = vec![1.0; n];
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(a[(j, i)]);
                    r += cabs1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let mut rr = r;
            while cc < rr / radix {
                cc *= radix;
                rr /= radix;
                f *= radix;
            }
            while cc >= rr * radix {
                cc /= radix;
                rr *= radix;
                f /= radix;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
    d
}

fn hessenberg(a: &ComplexMatrix) -> Hessenberg {
    let mut h = a.clone();
    let scaling = balance(&mut h);
    let n = h.n;
    let mut reflectors = Vec::new();
    let mut w = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let phase = if x[0] == ZERO {
            ONE
        } else {
            x[0] / x[0].norm()
        };
        let beta = -phase * norm;
        let mut v = x;
        v[0] -= beta;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // left: H[k+1.., k..] -= tau v (vᴴ H)
        let w = &mut w[..n];
        w.iter_mut().for_each(|z| *z = ZERO);
        for (r, vi) in v.iter().enumerate() {
            let cv = vi.conj();
            let row = &h.data[(k + 1 + r) * n..(k + 2 + r) * n];
            for j in k..n {
                w[j] += cv * row[j];
            }
        }
        for (r, vi) in v.iter().enumerate() {
            let f = *vi * tau;
            let row = &mut h.data[(k + 1 + r) * n..(k + 2 + r) * n];
            for j in k..n {
                row[j] -= f * w[j];
            }
        }
        // right: H[.., k+1..] -= tau (H v) vᴴ
        for i in 0..n {
            let row = &mut h.data[i * n..(i + 1) * n];
            let s: Complex64 = row[k + 1..].iter().zip(&v).map(|(a, b)| a * b).sum();
            let f = s * tau;
            for (a, b) in row[k + 1..].iter_mut().zip(&v) {
                *a -= f * b.conj();
            }
        }
        h[(k + 1, k)] = beta;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
        reflectors.push((k, v, tau));
    }
    Hessenberg {
        h,
        reflectors,
        scaling,
    }
}

/// Rotation `G = [[c, s], [−s̄, c]]` with `G·(a, b)ᵗ = (r, 0)ᵗ`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, b.conj() / b.norm());
    }
    let r = a.norm().hypot(b.norm());
    let an = a.norm();
    (an / r, (a / an) * b.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let delta = (a - d) * 0.5;
    let bc = b * c;
    let root = (delta * delta + bc).sqrt();
    let den1 = delta + root;
    let den2 = delta - root;
    let den = if den1.norm() >= den2.norm() {
        den1
    } else {
        den2
    };
    if den == ZERO {
        d
    } else {
        d - bc / den
    }
}

/// Eigenvalues of an upper Hessenberg matrix; `h` is overwritten.
fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<(Vec<Complex64>, usize)> {
    let n = h.n;
    let nn = n;
    let eps = f64::EPSILON;
    let small = f64::MIN_POSITIVE * (n as f64) / eps;
    let budget = 30 * n.max(1);
    let mut sweeps = 0usize;
    let mut values = vec![ZERO; n];
    let mut hi = n as isize - 1;
    let mut since_deflation = 0usize;
    while hi >= 0 {
        let hiu = hi as usize;
        // locate the start of the active unreduced block
        let mut lo = hiu;
        while lo > 0 {
            let sub = cabs1(h.data[lo * nn + lo - 1]);
            let mut diag = cabs1(h.data[(lo - 1) * nn + lo - 1]) + cabs1(h.data[lo * nn + lo]);
            if diag == 0.0 {
                diag = (lo.saturating_sub(2)..(lo + 2).min(n))
                    .map(|j| cabs1(h.data[lo * nn + j]))
                    .sum();
            }
            if sub <= small || sub <= eps * diag {
                h.data[lo * nn + lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hiu {
            values[hiu] = h.data[hiu * nn + hiu];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if sweeps >= budget {
            return Err(Error::NoConvergence {
                sweeps,
                unconverged: hiu + 1,
            });
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(10) {
            // exceptional shift
            let s = 0.75 * h.data[hiu * nn + hiu - 1].re.abs();
            h.data[hiu * nn + hiu] + s
        } else {
            wilkinson_shift(
                h.data[(hiu - 1) * nn + hiu - 1],
                h.data[(hiu - 1) * nn + hiu],
                h.data[hiu * nn + hiu - 1],
                h.data[hiu * nn + hiu],
            )
        };

        let mut x = h.data[lo * nn + lo] - shift;
        let mut y = h.data[(lo + 1) * nn + lo];
        for k in lo..hiu {
            let (c, s) = givens(x, y);
            let sc = s.conj();
            // rows k, k+1 over columns first..=hi
            let first = if k > lo { k - 1 } else { lo };
            {
                let (top, bottom) = h.data.split_at_mut((k + 1) * nn);
                let rk = &mut top[k * nn + first..k * nn + hiu + 1];
                let rk1 = &mut bottom[first..hiu + 1];
                for (p, q) in rk.iter_mut().zip(rk1.iter_mut()) {
                    let (a, b) = (*p, *q);
                    *p = a * c + s * b;
                    *q = b * c - sc * a;
                }
            }
            if k > lo {
                h.data[(k + 1) * nn + k - 1] = ZERO;
            }
            // columns k, k+1 over rows lo..=min(k+2, hi)
            let last = (k + 2).min(hiu);
            for i in lo..=last {
                let base = i * nn + k;
                let (a, b) = (h.data[base], h.data[base + 1]);
                h.data[base] = a * c + b * sc;
                h.data[base + 1] = b * c - a * s;
            }
            if k + 1 < hiu {
                x = h.data[(k + 1) * nn + k];
                y = h.data[(k + 2) * nn + k];
            }
        }
    }
    Ok((values, sweeps))
}

/// All eigenvalues, sorted by `(Im λ, Re λ)`.
pub fn eigvals(matrix: &ComplexMatrix) -> Result<EigenSet> {
    matrix.check()?;
    let mut hess = hessenberg(matrix);
    let (mut values, iterations) = hessenberg_qr(&mut hess.h)?;
    sort_values(&mut values);
    Ok(EigenSet {
        values,
        vectors: None,
        residuals: Vec::new(),
        iterations,
    })
}

/// Eigenvalues together with unit eigenvectors and residuals.
pub fn eig(matrix: &ComplexMatrix) -> Result<EigenSet> {
    let mut set = eigvals(matrix)?;
    let pairs = eigvecs_for(matrix, &set.values)?;
    set.residuals = pairs.iter().map(|p| p.residual).collect();
    set.vectors = Some(pairs.into_iter().map(|p| p.vector).collect());
    Ok(set)
}

/// LU factors of a shifted Hessenberg matrix; pivoting swaps row k with k+1.
struct HessenbergLu {
    n: usize,
    u: Vec<Complex64>,
    mult: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl HessenbergLu {
    fn new(h: &ComplexMatrix, shift: Complex64, floor: f64) -> Self {
        let n = h.n;
        let mut u = h.data.clone();
        for i in 0..n {
            u[i * n + i] -= shift;
        }
        let mut mult = vec![ZERO; n];
        let mut swapped = vec![false; n];
        for k in 0..n.saturating_sub(1) {
            if cabs1(u[(k + 1) * n + k]) > cabs1(u[k * n + k]) {
                for j in k..n {
                    u.swap(k * n + j, (k + 1) * n + j);
                }
                swapped[k] = true;
            }
            if u[k * n + k] == ZERO {
                u[k * n + k] = Complex64::new(floor, 0.0);
            }
            let f = u[(k + 1) * n + k] / u[k * n + k];
            mult[k] = f;
            u[(k + 1) * n + k] = ZERO;
            if f != ZERO {
                for j in k + 1..n {
                    let t = u[k * n + j];
                    u[(k + 1) * n + j] -= f * t;
                }
            }
        }
        if u[n * n - 1] == ZERO {
            u[n * n - 1] = Complex64::new(floor, 0.0);
        }
        Self {
            n,
            u,
            mult,
            swapped,
        }
    }

    fn solve(&self, b: &mut [Complex64]) {
        let n = self.n;
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                b.swap(k, k + 1);
            }
            let t = b[k];
            b[k + 1] -= self.mult[k] * t;
        }
        for i in (0..n).rev() {
            let row = &self.u[i * n..(i + 1) * n];
            let s: Complex64 = row[i + 1..]
                .iter()
                .zip(&b[i + 1..])
                .map(|(a, x)| a * x)
                .sum();
            b[i] = (b[i] - s) / row[i];
        }
    }
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
}

/// Unit eigenvectors for the given eigenvalues by inverse iteration.
///
/// Each value should be an eigenvalue of `matrix` to about 1e−6. Pairs whose
/// residual stays above [`VECTOR_TOLERANCE`] are flagged, not rejected.
pub fn eigvecs_for(matrix: &ComplexMatrix, selected: &[Complex64]) -> Result<Vec<EigenPair>> {
    matrix.check()?;
    let n = matrix.n;
    let hess = hessenberg(matrix);
    let scale = matrix.frobenius_norm().max(f64::MIN_POSITIVE);
    let hnorm = hess.h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(selected.len());
    for &lambda in selected {
        // nudge off the exact eigenvalue so the factors stay finite
        let shift = lambda + Complex64::new(hnorm * f64::EPSILON, 0.0);
        let lu = HessenbergLu::new(&hess.h, shift, hnorm * f64::EPSILON);
        let mut y = vec![ONE; n];
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for _ in 0..3 {
            lu.solve(&mut y);
            normalize(&mut y);
            let v = back_transform(&hess, &y);
            let av = matrix.mul_vec(&v);
            let res = av
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lambda * b).norm_sqr())
                .sum::<f64>()
                .sqrt()
                / scale;
            if best.as_ref().is_none_or(|(r, _)| res < *r) {
                best = Some((res, v));
            }
            if res <= VECTOR_TOLERANCE * 1e-4 {
                break;
            }
        }
        let (residual, vector) = best.expect("at least one iteration");
        out.push(EigenPair {
            value: lambda,
            vector,
            residual,
            ill_conditioned: residual > VECTOR_TOLERANCE,
        });
    }
    Ok(out)
}

/// `v = D Q y`, normalized.
fn back_transform(hess: &Hessenberg, y: &[Complex64]) -> Vec<Complex64> {
    let mut v = y.to_vec();
    for (k, u, tau) in hess.reflectors.iter().rev() {
        let seg = &mut v[k + 1..];
        let s: Complex64 = u.iter().zip(seg.iter()).map(|(a, b)| a.conj() * b).sum();
        let f = s * *tau;
        for (x, a) in seg.iter_mut().zip(u) {
            *x -= f * a;
        }
    }
    for (x, d) in v.iter_mut().zip(&hess.scaling) {
        *x *= *d;
    }
    normalize(&mut v);
    v
}
