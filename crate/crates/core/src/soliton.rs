//! Closed-form line solitons of the massive Thirring and massive
//! Gross–Neveu models.
//!
//! Both families share the numerator `√(1+ω) cosh(μx) − i √(1−ω) sinh(μx)`
//! with `μ = √(1−ω²)` and differ in prefactor and denominator:
//!
//! | model | prefactor | denominator          | ω range  |
//! |-------|-----------|----------------------|----------|
//! | MTM   | `√2 μ`    | `ω + cosh(2μx)`      | `(−1,1)` |
//! | GN    | `μ`       | `1 + ω cosh(2μx)`    | `(0,1)`  |
//!
//! Hyperbolic functions are never evaluated directly. Writing
//! `t = exp(−μ|x|)` and cancelling `exp(2μ|x|)/2` from numerator and
//! denominator leaves a rational function of `t ∈ (0, 1]`, which stays
//! finite for any `x`, including the mapped grid endpoints at ±∞.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which nonlinear Dirac system the line soliton belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// `W = |u|²|v|²`, stripe potentials.
    MassiveThirring,
    /// `W = ½(ūv + uv̄)²`, hexagonal potentials.
    GrossNeveu,
}

impl ModelKind {
    /// Open interval of frequencies for which the soliton exists.
    pub fn interval(self) -> (f64, f64) {
        match self {
            ModelKind::MassiveThirring => (-1.0, 1.0),
            ModelKind::GrossNeveu => (0.0, 1.0),
        }
    }

    pub fn admits(self, omega: f64) -> bool {
        let (lo, hi) = self.interval();
        omega.is_finite() && omega > lo && omega < hi
    }

    /// Short tag used on the command line and in CSV output.
    pub fn tag(self) -> &'static str {
        match self {
            ModelKind::MassiveThirring => "mtm",
            ModelKind::GrossNeveu => "gn",
        }
    }

    pub(crate) fn check(self, omega: f64) -> Result<()> {
        if self.admits(omega) {
            Ok(())
        } else {
            let (lo, hi) = self.interval();
            Err(Error::Domain {
                model: self,
                omega,
                lo,
                hi,
            })
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::MassiveThirring => f.write_str("massive Thirring"),
            ModelKind::GrossNeveu => f.write_str("massive Gross-Neveu"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mtm" | "thirring" | "massive-thirring" => Ok(ModelKind::MassiveThirring),
            "gn" | "gross-neveu" | "soler" => Ok(ModelKind::GrossNeveu),
            other => Err(Error::Argument(format!(
                "unknown model '{other}' (expected 'mtm' or 'gn')"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Exponential,
    /// MTM at ω = −1, where μ = 0 and the profile decays like 1/x.
    Algebraic,
}

/// A line-soliton profile `U_ω(x)` for one model and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonProfile {
    model: ModelKind,
    omega: f64,
    mu: f64,
    shape: Shape,
}

impl SolitonProfile {
    /// Profile at frequency `omega`, which must lie strictly inside the
    /// model's existence interval.
    pub fn new(model: ModelKind, omega: f64) -> Result<Self> {
        model.check(omega)?;
        Ok(Self {
            model,
            omega,
            mu: (1.0 - omega * omega).sqrt(),
            shape: Shape::Exponential,
        })
    }

    /// The algebraic MTM profile `2(1 − 2ix)/(1 + 4x²)` reached as ω → −1.
    pub fn mtm_algebraic_limit() -> Self {
        Self {
            model: ModelKind::MassiveThirring,
            omega: -1.0,
            mu: 0.0,
            shape: Shape::Algebraic,
        }
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Spatial decay rate μ = √(1−ω²).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `U_ω(x)`. Non-finite `x` (the mapped endpoints) gives exactly zero.
    pub fn eval(&self, x: f64) -> Complex64 {
        if !x.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        match self.shape {
            Shape::Algebraic => {
                let d = 1.0 + 4.0 * x * x;
                Complex64::new(2.0, -4.0 * x) / d
            }
            Shape::Exponential => {
                let (t, s) = self.decay_variable(x);
                let num = self.numerator(t, s);
                self.prefactor() * t * num / self.denominator(t)
            }
        }
    }

    /// `dU_ω/dx` from the analytically differentiated closed form.
    pub fn eval_derivative(&self, x: f64) -> Complex64 {
        if !x.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        match self.shape {
            Shape::Algebraic => {
                let d = 1.0 + 4.0 * x * x;
                let num = Complex64::new(0.0, -2.0) * d - Complex64::new(1.0, -2.0 * x) * (8.0 * x);
                2.0 * num / (d * d)
            }
            Shape::Exponential => {
                // U = c·f(t), f(t) = t·n(t)/d(t), dt/dx = −μ s t.
                let (t, s) = self.decay_variable(x);
                let (a, b) = self.amplitudes();
                let n = self.numerator(t, s);
                let dn = Complex64::new(2.0 * a * t, 2.0 * b * s * t);
                let d = self.denominator(t);
                let dd = self.denominator_derivative(t);
                let df = ((n + t * dn) * d - t * n * dd) / (d * d);
                self.prefactor() * df * (-self.mu * s * t)
            }
        }
    }

    /// `∂U_ω/∂ω` at fixed `x` from the closed form. Not defined for the
    /// algebraic limit, where it returns NaN.
    pub fn eval_omega_derivative(&self, x: f64) -> Complex64 {
        if !x.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        if self.shape == Shape::Algebraic {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        let w = self.omega;
        let (t, s) = self.decay_variable(x);
        let (a, b) = self.amplitudes();
        let dmu = -w / self.mu;
        let dt = -x.abs() * t * dmu;
        let n = self.numerator(t, s);
        let t2 = t * t;
        // explicit ω-dependence of the numerator plus its t-dependence
        let dn = Complex64::new(
            (1.0 + t2) / (2.0 * a) + 2.0 * a * t * dt,
            s * (1.0 - t2) / (2.0 * b) + 2.0 * b * s * t * dt,
        );
        let d = self.denominator(t);
        let dd = match self.model {
            ModelKind::MassiveThirring => 2.0 * t2,
            ModelKind::GrossNeveu => 1.0 + t2 * t2,
        } + self.denominator_derivative(t) * dt;
        let c = self.prefactor();
        let dc = c / self.mu * dmu;
        (dc * t * n + c * (dt * n + t * dn)) / d - c * t * n * dd / (d * d)
    }

    /// `|LHS − RHS|` of the stationary first-order ODE the profile solves:
    /// `iU' − ωU + Ū = |U|²U` (MTM) or `|U|²U + Ū³` (GN).
    pub fn ode_residual(&self, x: f64) -> f64 {
        let u = self.eval(x);
        let du = self.eval_derivative(x);
        let lhs = I * du - self.omega * u + u.conj();
        let rhs = match self.model {
            ModelKind::MassiveThirring => u.norm_sqr() * u,
            ModelKind::GrossNeveu => u.norm_sqr() * u + u.conj().powu(3),
        };
        (lhs - rhs).norm()
    }

    /// Peak amplitude `max_x |U_ω(x)|`, attained at x = 0.
    pub fn peak_amplitude(&self) -> f64 {
        self.eval(0.0).norm()
    }

    fn amplitudes(&self) -> (f64, f64) {
        ((1.0 + self.omega).sqrt(), (1.0 - self.omega).sqrt())
    }

    fn prefactor(&self) -> f64 {
        match self.model {
            ModelKind::MassiveThirring => SQRT_2 * self.mu,
            ModelKind::GrossNeveu => self.mu,
        }
    }

    fn decay_variable(&self, x: f64) -> (f64, f64) {
        let s = if x >= 0.0 { 1.0 } else { -1.0 };
        ((-self.mu * x.abs()).exp(), s)
    }

    fn numerator(&self, t: f64, s: f64) -> Complex64 {
        let (a, b) = self.amplitudes();
        let t2 = t * t;
        Complex64::new(a * (1.0 + t2), -b * s * (1.0 - t2))
    }

    fn denominator(&self, t: f64) -> f64 {
        let t2 = t * t;
        match self.model {
            ModelKind::MassiveThirring => 1.0 + 2.0 * self.omega * t2 + t2 * t2,
            ModelKind::GrossNeveu => self.omega * (1.0 + t2 * t2) + 2.0 * t2,
        }
    }

    fn denominator_derivative(&self, t: f64) -> f64 {
        let t3 = t * t * t;
        match self.model {
            ModelKind::MassiveThirring => 4.0 * self.omega * t + 4.0 * t3,
            ModelKind::GrossNeveu => 4.0 * self.omega * t3 + 4.0 * t,
        }
    }
}
