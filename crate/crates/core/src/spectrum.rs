//! Post-processing of computed spectra: continuous-band geometry, the
//! spurious-eigenvalue metric, isolated eigenvalues, small-p slope fits and
//! branch continuation in p.

use std::fmt;

use log::warn;
use num_complex::Complex64;

use crate::analytics::slopes;
use crate::cheb::ChebGrid;
use crate::eigen::{eigvals, EigenSet};
use crate::error::{Error, Result};
use crate::operator::{assemble, continuous_bands, Form};
use crate::par::{try_map_collect, Exec};
use crate::soliton::ModelKind;

/// Imaginary-part cutoff of the spurious-eigenvalue metric.
pub const METRIC_CUTOFF: f64 = 10.0;
/// Relative tolerance for placing an eigenvalue on an axis.
pub const CLASS_TOL: f64 = 1e-6;
/// Eigenvalues closer than this to the origin form the kernel cluster.
pub const ORIGIN_RADIUS: f64 = 1e-3;
/// Isolated eigenvalues are sought in `|λ| ≤ ISOLATION_WINDOW`.
pub const ISOLATION_WINDOW: f64 = 3.0;

/// Continuous spectrum: the half-lines `±i[a, ∞)` for the outer edge
/// `Λ₁(0)` and the inner edge `Λ₂(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBands {
    pub model: ModelKind,
    pub omega: f64,
    pub p: f64,
    edges: [f64; 2],
}

impl SpectralBands {
    pub(crate) fn new(model: ModelKind, omega: f64, p: f64, edges: [f64; 2]) -> Self {
        Self {
            model,
            omega,
            p,
            edges,
        }
    }

    /// `[outer, inner]` edge values `a` of the half-lines `±i[a, ∞)`.
    /// A negative inner edge means the two inner bands overlap at 0.
    pub fn edges(&self) -> [f64; 2] {
        self.edges
    }

    /// Signed imaginary edge values with outward direction (+1 up, −1 down).
    pub fn band_edges(&self) -> [(f64, i8); 4] {
        let [a1, a2] = self.edges;
        [(a1, 1), (-a1, -1), (a2, 1), (-a2, -1)]
    }

    pub fn gap_closed(&self) -> bool {
        self.edges[1] <= 0.0
    }

    /// Length of the spectral gap around the origin.
    pub fn gap_width(&self) -> f64 {
        2.0 * self.edges[0].min(self.edges[1]).max(0.0)
    }

    /// Default isolation margin: 5% of the origin-to-edge distance, at least 1e−3.
    pub fn default_margin(&self) -> f64 {
        (0.025 * self.gap_width()).max(1e-3)
    }

    /// Distance from `λ` to the union of the four half-lines.
    pub fn distance(&self, lambda: Complex64) -> f64 {
        let up = |a: f64| {
            if lambda.im >= a {
                lambda.re.abs()
            } else {
                (lambda - Complex64::new(0.0, a)).norm()
            }
        };
        let down = |a: f64| {
            if lambda.im <= -a {
                lambda.re.abs()
            } else {
                (lambda + Complex64::new(0.0, a)).norm()
            }
        };
        self.edges
            .iter()
            .map(|&a| up(a).min(down(a)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigensolve of the block-diagonalized operator at one `(ω, p)`.
pub fn compute_spectrum(model: ModelKind, omega: f64, p: f64, grid: &ChebGrid) -> Result<EigenSet> {
    let op = assemble(model, omega, p, grid, Form::BlockDiagonalized)?;
    eigvals(&op.matrix)
}

/// `max |Re λ|` over eigenvalues with `|Im λ| < im_cutoff`.
pub fn spurious_metric(values: &[Complex64], im_cutoff: f64) -> Result<f64> {
    values
        .iter()
        .filter(|z| z.im.abs() < im_cutoff)
        .map(|z| z.re.abs())
        .reduce(f64::max)
        .ok_or_else(|| Error::Argument(format!("no eigenvalues with |Im| < {im_cutoff}")))
}

/// Eigenvalues in `|λ| ≤ ISOLATION_WINDOW` farther than `margin` from
/// every band, sorted by `(Im, Re)`.
pub fn isolated_eigs(values: &[Complex64], bands: &SpectralBands, margin: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = values
        .iter()
        .copied()
        .filter(|z| z.norm() <= ISOLATION_WINDOW && bands.distance(*z) > margin)
        .collect();
    out.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    out
}

/// Intercepts of `λ/p ≈ Λ + c·p²` fitted on small-p eigenvalues.
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub lambda_r_hat: f64,
    pub lambda_i_hat: f64,
    /// `(p, real-axis eigenvalue, imaginary-axis eigenvalue)` per sample.
    pub samples: Vec<(f64, Complex64, Complex64)>,
}

pub fn slope_fit(
    model: ModelKind,
    omega: f64,
    p_samples: &[f64],
    grid: &ChebGrid,
    exec: Exec,
) -> Result<SlopeFit> {
    if p_samples.len() < 3 {
        return Err(Error::Argument(
            "slope fit needs at least three p values".into(),
        ));
    }
    if let Some(p) = p_samples.iter().find(|&&p| !(p > 0.0 && p <= 0.15)) {
        return Err(Error::Argument(format!(
            "slope-fit samples must lie in (0, 0.15], got {p}"
        )));
    }
    let (lr, li) = slopes(model, omega)?;
    let samples = try_map_collect(exec, p_samples, |&p| -> Result<_> {
        let set = compute_spectrum(model, omega, p, grid)?;
        let near = |target: Complex64, half_plane: fn(&Complex64) -> bool| {
            set.values
                .iter()
                .copied()
                .filter(half_plane)
                .filter(|z| (z - target).norm() <= 0.5 * target.norm())
                .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        };
        let real = near(Complex64::new(p * lr, 0.0), |z| z.re > 0.0).ok_or_else(|| {
            Error::BranchNotFound(format!(
                "no real-axis eigenvalue near {:.6} at p = {p}",
                p * lr
            ))
        })?;
        let imag = near(Complex64::new(0.0, p * li), |z| z.im > 0.0).ok_or_else(|| {
            Error::BranchNotFound(format!(
                "no imaginary-axis eigenvalue near {:.6}i at p = {p}",
                p * li
            ))
        })?;
        Ok((p, real, imag))
    })?;
    let xs: Vec<f64> = samples.iter().map(|s| s.0 * s.0).collect();
    let fit = |ys: Vec<f64>| intercept(&xs, &ys);
    Ok(SlopeFit {
        lambda_r_hat: fit(samples.iter().map(|s| s.1.re / s.0).collect()),
        lambda_i_hat: fit(samples.iter().map(|s| s.2.im / s.0).collect()),
        samples,
    })
}

/// Least-squares intercept of `y = a + b x`.
fn intercept(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return my;
    }
    my - sxy / sxx * mx
}

/// Position of a tracked eigenvalue in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointClass {
    RealPair,
    ImaginaryPair,
    ComplexQuartet,
    Absorbed,
    NearOrigin,
}

impl PointClass {
    pub fn classify(lambda: Complex64) -> Self {
        let tol = CLASS_TOL * (1.0 + lambda.norm());
        if lambda.norm() <= ORIGIN_RADIUS {
            PointClass::NearOrigin
        } else if lambda.im.abs() <= tol {
            PointClass::RealPair
        } else if lambda.re.abs() <= tol {
            PointClass::ImaginaryPair
        } else {
            PointClass::ComplexQuartet
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            PointClass::RealPair => "real_pair",
            PointClass::ImaginaryPair => "imaginary_pair",
            PointClass::ComplexQuartet => "complex_quartet",
            PointClass::Absorbed => "absorbed",
            PointClass::NearOrigin => "near_origin",
        }
    }
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub p: f64,
    pub lambda: Complex64,
    pub class: PointClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackedBranch {
    pub branch_id: usize,
    pub points: Vec<BranchPoint>,
}

impl TrackedBranch {
    pub fn last(&self) -> &BranchPoint {
        self.points
            .last()
            .expect("branches are created with one point")
    }

    fn active(&self) -> bool {
        self.last().class != PointClass::Absorbed
    }

    fn predicted(&self) -> Complex64 {
        match self.points.as_slice() {
            [.., a, b] if b.class != PointClass::Absorbed => b.lambda + (b.lambda - a.lambda),
            [.., b] => b.lambda,
            [] => unreachable!(),
        }
    }

    fn match_radius(&self, step: f64, fresh: f64) -> f64 {
        let jumps: Vec<f64> = self
            .points
            .windows(2)
            .rev()
            .take(2)
            .map(|w| (w[1].lambda - w[0].lambda).norm())
            .collect();
        match jumps.len() {
            0 => fresh,
            _ => {
                let median = jumps.iter().sum::<f64>() / jumps.len() as f64;
                (3.0 * median).max(0.05 * step).max(fresh * 0.25)
            }
        }
    }
}

/// Change of a branch's classification or lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchEvent {
    pub p: f64,
    pub branch_id: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Branch first seen (split from the origin or detached from a band).
    Emerged(PointClass),
    /// Classification changed between consecutive p values.
    Transition { from: PointClass, to: PointClass },
    /// No continuation found; absorbed by a band or merged.
    Lost,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::Emerged(c) => write!(f, "emerged as {c}"),
            EventKind::Transition { from, to } => write!(f, "{from} -> {to}"),
            EventKind::Lost => f.write_str("absorbed"),
        }
    }
}

/// Tracking output together with the per-p isolated sets.
#[derive(Debug, Clone)]
pub struct Tracking {
    pub model: ModelKind,
    pub omega: f64,
    pub branches: Vec<TrackedBranch>,
    pub events: Vec<BranchEvent>,
    /// Representative isolated eigenvalues per p (see [`representatives`]).
    pub isolated: Vec<(f64, Vec<Complex64>)>,
    pub gap_closed: Vec<(f64, bool)>,
}

impl Tracking {
    /// Largest `Re λ` among isolated eigenvalues at each p.
    pub fn growth_rates(&self) -> Vec<(f64, f64)> {
        self.isolated
            .iter()
            .map(|(p, zs)| (*p, zs.iter().map(|z| z.re).fold(0.0, f64::max)))
            .collect()
    }

    /// p values where some tracked point has the given class.
    pub fn p_with_class(&self, class: PointClass) -> Vec<f64> {
        let mut ps: Vec<f64> = self
            .branches
            .iter()
            .flat_map(|b| b.points.iter())
            .filter(|pt| pt.class == class)
            .map(|pt| pt.p)
            .collect();
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        ps
    }

    /// First p after the last unstable real pair, if the real pair
    /// disappears before the end of the sweep.
    pub fn instability_threshold(&self) -> Option<(f64, f64)> {
        let real = self.p_with_class(PointClass::RealPair);
        let last = *real.last()?;
        let next = self.isolated.iter().map(|(p, _)| *p).find(|&p| p > last)?;
        Some((last, next))
    }
}

/// One representative per symmetry orbit: the closed first quadrant for
/// MTM (reflections across both axes), the closed right half-plane for GN.
pub fn representatives(model: ModelKind, values: &[Complex64]) -> Vec<Complex64> {
    let tol = |z: &Complex64| CLASS_TOL * (1.0 + z.norm());
    values
        .iter()
        .copied()
        .filter(|z| z.re >= -tol(z))
        .filter(|z| model == ModelKind::GrossNeveu || z.im >= -tol(z))
        .collect()
}

/// Isolated eigenvalues at each p of an ascending grid, linked into
/// branches by nearest-neighbour continuation.
pub fn track_branches(
    model: ModelKind,
    omega: f64,
    p_grid: &[f64],
    grid: &ChebGrid,
    exec: Exec,
) -> Result<Tracking> {
    if p_grid.is_empty() {
        return Err(Error::Argument("empty p grid".into()));
    }
    if p_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("p grid must be strictly ascending".into()));
    }
    let spectra = try_map_collect(exec, p_grid, |&p| -> Result<_> {
        let bands = continuous_bands(model, omega, p)?;
        let set = compute_spectrum(model, omega, p, grid)?;
        let iso = isolated_eigs(&set.values, &bands, bands.default_margin());
        Ok((p, representatives(model, &iso), bands.gap_closed()))
    })?;
    let (lr, li) = slopes(model, omega)?;
    let slope = lr.max(li).max(1.0);
    Ok(link(model, omega, spectra, slope))
}

fn link(
    model: ModelKind,
    omega: f64,
    spectra: Vec<(f64, Vec<Complex64>, bool)>,
    slope: f64,
) -> Tracking {
    let mut branches: Vec<TrackedBranch> = Vec::new();
    let mut events = Vec::new();
    let mut prev_p: Option<f64> = None;
    for (p, candidates, _) in &spectra {
        let p = *p;
        let step = prev_p.map_or(p.max(1e-3), |q| p - q);
        let fresh = 3.0 * step * slope;
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (bi, b) in branches.iter().enumerate().filter(|(_, b)| b.active()) {
            let pred = b.predicted();
            let radius = b.match_radius(step, fresh);
            let within: Vec<(f64, usize)> = candidates
                .iter()
                .enumerate()
                .map(|(ci, z)| ((z - pred).norm(), ci))
                .filter(|(d, _)| *d <= radius)
                .collect();
            if within.len() > 1 {
                warn!(
                    "branch {} at p = {p}: {} candidates within radius {radius:.3e}",
                    b.branch_id,
                    within.len()
                );
            }
            pairs.extend(within.into_iter().map(|(d, ci)| (d, bi, ci)));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut branch_taken = vec![false; branches.len()];
        let mut cand_taken = vec![false; candidates.len()];
        for (_, bi, ci) in pairs {
            if branch_taken[bi] || cand_taken[ci] {
                continue;
            }
            branch_taken[bi] = true;
            cand_taken[ci] = true;
            let lambda = candidates[ci];
            let class = PointClass::classify(lambda);
            let b = &mut branches[bi];
            let from = b.last().class;
            if from != class {
                events.push(BranchEvent {
                    p,
                    branch_id: b.branch_id,
                    kind: EventKind::Transition { from, to: class },
                });
            }
            b.points.push(BranchPoint { p, lambda, class });
        }
        for (bi, b) in branches.iter_mut().enumerate() {
            if b.active() && !branch_taken[bi] && b.last().p < p {
                let last = b.last().lambda;
                b.points.push(BranchPoint {
                    p,
                    lambda: last,
                    class: PointClass::Absorbed,
                });
                events.push(BranchEvent {
                    p,
                    branch_id: b.branch_id,
                    kind: EventKind::Lost,
                });
            }
        }
        for (ci, &lambda) in candidates.iter().enumerate() {
            if cand_taken[ci] {
                continue;
            }
            let class = PointClass::classify(lambda);
            let branch_id = branches.len();
            branches.push(TrackedBranch {
                branch_id,
                points: vec![BranchPoint { p, lambda, class }],
            });
            events.push(BranchEvent {
                p,
                branch_id,
                kind: EventKind::Emerged(class),
            });
        }
        prev_p = Some(p);
    }
    Tracking {
        model,
        omega,
        branches,
        events,
        isolated: spectra.iter().map(|(p, c, _)| (*p, c.clone())).collect(),
        gap_closed: spectra.iter().map(|(p, _, g)| (*p, *g)).collect(),
    }
}
