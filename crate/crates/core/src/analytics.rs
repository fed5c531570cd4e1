//! Perturbation theory around the quadruple zero eigenvalue.
//!
//! Closed-form norms of the soliton families, the leading-order eigenvalue
//! slopes `Λ_r`, `Λ_i`, the generalized kernel of the block-diagonalized
//! operator, the skew (`𝒮`) and coupling (`𝒫`) pairings between kernel
//! vectors, and the Gross–Neveu correction coefficients `α`, `β`.
//!
//! Inner products conjugate the first slot: `⟨f, g⟩ = ∫ Σ_k conj(f_k) g_k dx`.
//! Every pairing is evaluated by adaptive quadrature on a symmetric window
//! `[−X, X]` with `exp(−μX) < 1e−16`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_symmetric, QuadConfig};
use crate::soliton::{ModelKind, SolitonProfile};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Step of the ω-difference check on `∂_ω U_ω`.
pub const OMEGA_STEP: f64 = 1e-5;

/// GN frequencies for which [`asymptotic_prediction`] fills `α`, `β`.
pub const CORRECTION_WINDOW_GN: (f64, f64) = (0.05, 0.95);

/// Four-component vector of complex samples at a single `x`.
pub type Vec4 = [Complex64; 4];

/// Closed-form integrals of the MTM soliton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtmNorms {
    /// `∫|U|² dx = 4 arctan √((1−ω)/(1+ω))`
    pub norm_sq_u: f64,
    /// `∫|U'|² dx`
    pub norm_sq_du: f64,
    /// `∫(ω|U|² + (i/2)(ŪU' − UŪ')) dx = 2√(1−ω²)`
    pub momentum_like: f64,
    /// `d/dω ∫|U|² dx = −2/√(1−ω²)`
    pub d_norm_sq_u: f64,
}

pub fn mtm_norms(omega: f64) -> Result<MtmNorms> {
    ModelKind::MassiveThirring.check(omega)?;
    let mu = (1.0 - omega * omega).sqrt();
    let arc = ((1.0 - omega) / (1.0 + omega)).sqrt().atan();
    Ok(MtmNorms {
        norm_sq_u: 4.0 * arc,
        norm_sq_du: -4.0 * omega * mu + 4.0 * (1.0 + omega * omega) * arc,
        momentum_like: 2.0 * mu,
        d_norm_sq_u: -2.0 / mu,
    })
}

/// Closed-form integrals of the GN soliton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnNorms {
    /// `∫|U|² dx = √(1−ω²)/ω`
    pub norm_sq_u: f64,
    /// `d/dω ∫|U|² dx = −1/(ω²√(1−ω²))`
    pub d_norm_sq_u: f64,
    /// `I(ω) = (1−ω²) ∫₀^∞ dz/(1 + ω cosh z)²`
    pub i_omega: f64,
}

pub fn gn_norms(omega: f64) -> Result<GnNorms> {
    ModelKind::GrossNeveu.check(omega)?;
    let mu = (1.0 - omega * omega).sqrt();
    Ok(GnNorms {
        norm_sq_u: mu / omega,
        d_norm_sq_u: -1.0 / (omega * omega * mu),
        i_omega: atanh_ratio_minus_one(mu),
    })
}

/// `atanh(μ)/μ − 1`, which equals `I(ω)` since `log((1−μ)/ω) = −atanh μ`.
/// A series avoids cancellation as μ → 0.
fn atanh_ratio_minus_one(mu: f64) -> f64 {
    if mu < 1e-2 {
        let m2 = mu * mu;
        (1..8)
            .rev()
            .fold(0.0, |acc, k| m2 * (1.0 / (2 * k + 1) as f64 + acc))
    } else {
        mu.atanh() / mu - 1.0
    }
}

/// Leading-order slopes `λ ≈ ±pΛ_r` (real pair) and `λ ≈ ±ipΛ_i`
/// (imaginary pair), from closed forms only.
pub fn slopes(model: ModelKind, omega: f64) -> Result<(f64, f64)> {
    match model {
        ModelKind::MassiveThirring => {
            let n = mtm_norms(omega)?;
            let root_mu = (1.0 - omega * omega).sqrt().sqrt();
            // Λ_r² = ∫|U'|² / √(1−ω²) and Λ_i² = −2∫|U|² / (d/dω ∫|U|²)
            Ok((n.norm_sq_du.sqrt() / root_mu, root_mu * n.norm_sq_u.sqrt()))
        }
        ModelKind::GrossNeveu => {
            let n = gn_norms(omega)?;
            let mu = (1.0 - omega * omega).sqrt();
            Ok((mu, (n.i_omega / (1.0 + n.i_omega)).sqrt()))
        }
    }
}

/// Asymptotic eigenvalue prediction for small transverse wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPrediction {
    pub model: ModelKind,
    pub omega: f64,
    pub lambda_r: f64,
    pub lambda_i: f64,
    /// Admixture of `V_t` in the gauge-branch eigenvector (GN only).
    pub alpha: Option<Complex64>,
    /// Admixture of `V_g` in the translation-branch eigenvector (GN only).
    pub beta: Option<Complex64>,
}

pub fn asymptotic_prediction(model: ModelKind, omega: f64) -> Result<AsymptoticPrediction> {
    let (lambda_r, lambda_i) = slopes(model, omega)?;
    let (alpha, beta) = match model {
        ModelKind::GrossNeveu
            if (CORRECTION_WINDOW_GN.0..=CORRECTION_WINDOW_GN.1).contains(&omega) =>
        {
            let c = compute_corrections(omega)?;
            (Some(c.alpha), Some(c.beta))
        }
        _ => (None, None),
    };
    Ok(AsymptoticPrediction {
        model,
        omega,
        lambda_r,
        lambda_i,
        alpha,
        beta,
    })
}

/// Labels of the (generalized) kernel vectors of the block-diagonalized
/// operator at `p = 0`, plus the GN auxiliary solutions of `ℋV = −𝒫V_{t,g}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelVector {
    /// `(U', Ū', 0, 0)`, translation.
    Vt,
    /// `i(0, 0, U, −Ū)`, gauge rotation.
    Vg,
    /// `iωx(0, 0, U, −Ū) − ½(0, 0, U, Ū)`
    VtTilde,
    /// `∂_ω(U, Ū, 0, 0)`
    VgTilde,
    /// `−½(0, 0, Ū, −U)`, GN only.
    VtCheck,
    /// `−(1/2ω)(Ū, −U, 0, 0)`, GN only.
    VgCheck,
}

impl KernelVector {
    pub fn symbol(self) -> &'static str {
        match self {
            KernelVector::Vt => "V_t",
            KernelVector::Vg => "V_g",
            KernelVector::VtTilde => "~V_t",
            KernelVector::VgTilde => "~V_g",
            KernelVector::VtCheck => "^V_t",
            KernelVector::VgCheck => "^V_g",
        }
    }

    pub const BASE: [KernelVector; 4] = [
        KernelVector::Vt,
        KernelVector::Vg,
        KernelVector::VtTilde,
        KernelVector::VgTilde,
    ];

    pub const ALL: [KernelVector; 6] = [
        KernelVector::Vt,
        KernelVector::Vg,
        KernelVector::VtTilde,
        KernelVector::VgTilde,
        KernelVector::VtCheck,
        KernelVector::VgCheck,
    ];
}

/// Constant 4×4 weight in a pairing `⟨a, M b⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weight {
    /// Identity `ℐ`.
    Identity,
    /// `𝒮 = [[0, σ₃], [σ₃, 0]]`.
    Skew,
    /// `𝒫 = i[[0, σ₁], [−σ₁, 0]]` (the GN transverse coupling without p).
    Coupling,
}

impl Weight {
    pub fn apply(self, v: Vec4) -> Vec4 {
        match self {
            Weight::Identity => v,
            Weight::Skew => [v[2], -v[3], v[0], -v[1]],
            Weight::Coupling => [I * v[3], I * v[2], -I * v[1], -I * v[0]],
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Weight::Identity => "I",
            Weight::Skew => "S",
            Weight::Coupling => "P",
        }
    }
}

/// Kernel vectors of the block-diagonalized operator at one frequency.
#[derive(Debug, Clone, Copy)]
pub struct KernelVectors {
    profile: SolitonProfile,
}

impl KernelVectors {
    pub fn new(model: ModelKind, omega: f64) -> Result<Self> {
        Ok(Self {
            profile: SolitonProfile::new(model, omega)?,
        })
    }

    pub fn profile(&self) -> &SolitonProfile {
        &self.profile
    }

    pub fn model(&self) -> ModelKind {
        self.profile.model()
    }

    /// `∂_ω U_ω(x)` from the closed form.
    pub fn d_omega(&self, x: f64) -> Complex64 {
        self.profile.eval_omega_derivative(x)
    }

    /// Richardson-combined central difference of `U_ω(x)` in ω with steps
    /// [`OMEGA_STEP`] and twice that; a check on [`Self::d_omega`].
    pub fn d_omega_difference(&self, x: f64) -> Result<Complex64> {
        let (model, omega, h) = (self.model(), self.profile.omega(), OMEGA_STEP);
        let at = |dw: f64| SolitonProfile::new(model, omega + dw).map(|p| p.eval(x));
        let d1 = (at(h)? - at(-h)?) / (2.0 * h);
        let d2 = (at(2.0 * h)? - at(-2.0 * h)?) / (4.0 * h);
        Ok((4.0 * d1 - d2) / 3.0)
    }

    /// Value of a kernel vector at `x`. The auxiliary vectors exist only for
    /// GN; requesting them for MTM is an argument error.
    pub fn eval(&self, which: KernelVector, x: f64) -> Result<Vec4> {
        let omega = self.profile.omega();
        let u = self.profile.eval(x);
        let ub = u.conj();
        Ok(match which {
            KernelVector::Vt => {
                let du = self.profile.eval_derivative(x);
                [du, du.conj(), ZERO, ZERO]
            }
            KernelVector::Vg => [ZERO, ZERO, I * u, -I * ub],
            KernelVector::VtTilde => {
                let c = I * omega * x;
                [ZERO, ZERO, c * u - 0.5 * u, -c * ub - 0.5 * ub]
            }
            KernelVector::VgTilde => {
                let d = self.d_omega(x);
                [d, d.conj(), ZERO, ZERO]
            }
            KernelVector::VtCheck | KernelVector::VgCheck
                if self.model() == ModelKind::MassiveThirring =>
            {
                return Err(Error::Argument(format!(
                    "{} is defined only for the Gross-Neveu model",
                    which.symbol()
                )))
            }
            KernelVector::VtCheck => [ZERO, ZERO, -0.5 * ub, 0.5 * u],
            KernelVector::VgCheck => {
                let c = -1.0 / (2.0 * omega);
                [c * ub, -c * u, ZERO, ZERO]
            }
        })
    }

    /// `⟨a, M b⟩_{L²}` by adaptive quadrature.
    pub fn pairing(&self, a: KernelVector, weight: Weight, b: KernelVector) -> Result<Complex64> {
        // validate once so the integrand can unwrap
        self.eval(a, 0.0)?;
        self.eval(b, 0.0)?;
        let half_width = 37.0 / self.profile.mu();
        integrate_symmetric(
            |x| {
                let va = self.eval(a, x).expect("validated above");
                let vb = weight.apply(self.eval(b, x).expect("validated above"));
                va.iter()
                    .zip(&vb)
                    .map(|(p, q)| p.conj() * q)
                    .sum::<Complex64>()
            },
            half_width,
            QuadConfig::default(),
        )
    }

    /// 2×2 block `[⟨a_j, M b_k⟩]` over pairs of vectors.
    pub fn block(
        &self,
        rows: [KernelVector; 2],
        weight: Weight,
        cols: [KernelVector; 2],
    ) -> Result<[[Complex64; 2]; 2]> {
        let mut m = [[ZERO; 2]; 2];
        for (j, &a) in rows.iter().enumerate() {
            for (k, &b) in cols.iter().enumerate() {
                m[j][k] = self.pairing(a, weight, b)?;
            }
        }
        Ok(m)
    }
}

/// One labelled pairing `⟨left, weight · right⟩`.
#[derive(Debug, Clone)]
pub struct ProjectionEntry {
    pub left: KernelVector,
    pub weight: Weight,
    pub right: KernelVector,
    pub value: Complex64,
    /// The entry vanishes identically (by parity or exact cancellation).
    pub vanishes: bool,
}

impl ProjectionEntry {
    pub fn label(&self) -> String {
        format!(
            "<{}, {} {}>",
            self.left.symbol(),
            self.weight.symbol(),
            self.right.symbol()
        )
    }
}

/// Entries of the projection matrices that do not vanish.
fn nonvanishing(model: ModelKind, weight: Weight, a: KernelVector, b: KernelVector) -> bool {
    use KernelVector::*;
    let pair = |x, y| (a == x && b == y) || (a == y && b == x);
    match (model, weight) {
        (_, Weight::Skew) => pair(Vt, VtTilde) || pair(Vg, VgTilde) || pair(VgTilde, VtCheck),
        (_, Weight::Identity) => a == b,
        (ModelKind::GrossNeveu, Weight::Coupling) => {
            pair(VtTilde, VgTilde)
                || pair(Vt, VtCheck)
                || pair(Vg, VgCheck)
                || pair(VtCheck, VgCheck)
        }
        (ModelKind::MassiveThirring, Weight::Coupling) => false,
    }
}

/// Every pairing between kernel vectors used by the perturbation theory:
/// `𝒮` and `ℐ` over `[V_t, V_g, Ṽ_t, Ṽ_g]` for MTM; `𝒮` and `𝒫` over the
/// six vectors including `V̌_t`, `V̌_g` for GN.
pub fn projection_matrix_elements(model: ModelKind, omega: f64) -> Result<Vec<ProjectionEntry>> {
    let kv = KernelVectors::new(model, omega)?;
    let (vectors, weights): (&[KernelVector], [Weight; 2]) = match model {
        ModelKind::MassiveThirring => (&KernelVector::BASE, [Weight::Skew, Weight::Identity]),
        ModelKind::GrossNeveu => (&KernelVector::ALL, [Weight::Skew, Weight::Coupling]),
    };
    let mut out = Vec::new();
    for weight in weights {
        for &a in vectors {
            for &b in vectors {
                out.push(ProjectionEntry {
                    left: a,
                    weight,
                    right: b,
                    value: kv.pairing(a, weight, b)?,
                    vanishes: !nonvanishing(model, weight, a, b),
                });
            }
        }
    }
    Ok(out)
}

/// Residuals of the scalar solvability conditions that fix `Λ_r²` and
/// `−Λ_i²`, with every coefficient computed by quadrature and `Λ` taken
/// from the closed forms. Returned as `(translation, gauge)` residuals
/// relative to the size of the terms involved.
pub fn solvability_residuals(model: ModelKind, omega: f64) -> Result<(f64, f64)> {
    use KernelVector::*;
    let kv = KernelVectors::new(model, omega)?;
    let (lr, li) = slopes(model, omega)?;
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / a.norm().max(b.norm());
    match model {
        ModelKind::MassiveThirring => {
            // iΛ²⟨W, 𝒮Ṽ⟩ = ⟨W, V⟩
            let t = rel(
                I * lr * lr * kv.pairing(Vt, Weight::Skew, VtTilde)?,
                kv.pairing(Vt, Weight::Identity, Vt)?,
            );
            let g = rel(
                -I * li * li * kv.pairing(Vg, Weight::Skew, VgTilde)?,
                kv.pairing(Vg, Weight::Identity, Vg)?,
            );
            Ok((t, g))
        }
        ModelKind::GrossNeveu => {
            // iΛ²⟨W, 𝒮Ṽ⟩ = ⟨W, 𝒫V̌⟩
            let t = rel(
                -I * li * li * kv.pairing(Vt, Weight::Skew, VtTilde)?,
                kv.pairing(Vt, Weight::Coupling, VtCheck)?,
            );
            let g = rel(
                I * lr * lr * kv.pairing(Vg, Weight::Skew, VgTilde)?,
                kv.pairing(Vg, Weight::Coupling, VgCheck)?,
            );
            Ok((t, g))
        }
    }
}

/// GN second-order data: the admixture coefficients and the diagonal of
/// the third-order solvability matrix, whose vanishing means `Λ₂ = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Corrections {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub alpha_denominator: Complex64,
    pub beta_denominator: Complex64,
    /// Diagonal entries of the right-hand side of the third-order
    /// solvability matrix, evaluated with all pairings from quadrature.
    pub lambda2_diagonal: [Complex64; 2],
    /// Off-diagonal entries after substituting `α` and `β` (should vanish).
    pub off_diagonal_residual: [Complex64; 2],
}

type M2 = [[Complex64; 2]; 2];

fn mat_mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[ZERO; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            c[j][k] = a[j][0] * b[0][k] + a[j][1] * b[1][k];
        }
    }
    c
}

pub fn compute_corrections(omega: f64) -> Result<Corrections> {
    use KernelVector::*;
    let kv = KernelVectors::new(ModelKind::GrossNeveu, omega)?;
    let (lr, li) = slopes(ModelKind::GrossNeveu, omega)?;
    let (lr2, li2) = (lr * lr, li * li);
    let p = |a, w, b| kv.pairing(a, w, b);
    let s = Weight::Skew;
    let c = Weight::Coupling;

    let alpha_denominator = I * p(VtTilde, s, Vt)? * (lr2 + li2);
    let beta_denominator = -I * p(VgTilde, s, Vg)? * (li2 + lr2);
    for (name, d) in [("alpha", alpha_denominator), ("beta", beta_denominator)] {
        if d.norm() <= 1e-12 {
            return Err(Error::Consistency(format!(
                "{name} denominator vanishes at omega = {omega}"
            )));
        }
    }
    let alpha = (lr2 * (p(VtTilde, c, VgTilde)? + I * p(VtCheck, s, VgTilde)?)
        - p(VtCheck, c, VgCheck)?)
        / alpha_denominator;
    let beta = (li2 * (I * p(VgTilde, s, VtCheck)? - p(VgTilde, c, VtTilde)?)
        - p(VgCheck, c, VtCheck)?)
        / beta_denominator;

    // Full third-order solvability right-hand side, column k belonging to
    // the branch seeded by kernel vector k (V_t: Λ₁² = −Λ_i², V_g: Λ₁² = Λ_r²).
    let phi0 = [Vt, Vg];
    let phi1 = [VtTilde, VgTilde];
    let phi2 = [VtCheck, VgCheck];
    let k = [[ZERO, alpha], [beta, ZERO]];
    let s10 = mat_mul(&kv.block(phi1, s, phi0)?, &k);
    let s12 = kv.block(phi1, s, phi2)?;
    let s21 = kv.block(phi2, s, phi1)?;
    let p11 = kv.block(phi1, c, phi1)?;
    let p22 = kv.block(phi2, c, phi2)?;
    let p20 = mat_mul(&kv.block(phi2, c, phi0)?, &k);
    let lam2 = [-li2, lr2];
    let mut rhs = [[ZERO; 2]; 2];
    for j in 0..2 {
        for col in 0..2 {
            rhs[j][col] = lam2[col]
                * (I * s10[j][col] + I * s12[j][col] - I * s21[j][col] - p11[j][col])
                + p22[j][col]
                + p20[j][col];
        }
    }
    Ok(Corrections {
        alpha,
        beta,
        alpha_denominator,
        beta_denominator,
        lambda2_diagonal: [rhs[0][0], rhs[1][1]],
        off_diagonal_residual: [rhs[0][1], rhs[1][0]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn mtm_norms_at_zero() {
        let n = mtm_norms(0.0).unwrap();
        assert_relative_eq!(n.norm_sq_u, PI, max_relative = 1e-15);
        assert_relative_eq!(n.norm_sq_du, PI, max_relative = 1e-15);
        assert_relative_eq!(n.momentum_like, 2.0, max_relative = 1e-15);
    }

    #[test]
    fn gn_norm_at_two_thirds() {
        let n = gn_norms(2.0 / 3.0).unwrap();
        assert_relative_eq!(n.norm_sq_u, 5f64.sqrt() / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn i_omega_vanishes_at_nls_limit() {
        let vals: Vec<f64> = [0.9, 0.99, 0.9999, 1.0 - 1e-10]
            .iter()
            .map(|&w| gn_norms(w).unwrap().i_omega)
            .collect();
        assert!(vals.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0));
        assert!(vals[3] < 1e-9);
        // series and closed branch agree at the switch-over
        let mu = 1e-2;
        let series = atanh_ratio_minus_one(mu * (1.0 - 1e-12));
        assert_relative_eq!(series, mu.atanh() / mu - 1.0, max_relative = 1e-9);
    }

    #[test]
    fn slopes_at_reference_points() {
        let (lr, li) = slopes(ModelKind::MassiveThirring, 0.0).unwrap();
        assert_relative_eq!(lr, PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(li, PI.sqrt(), max_relative = 1e-14);
        let (lr, li) = slopes(ModelKind::GrossNeveu, 2.0 / 3.0).unwrap();
        assert_relative_eq!(lr, 5f64.sqrt() / 3.0, max_relative = 1e-14);
        assert_relative_eq!(li, 0.474_915, max_relative = 1e-5);
    }

    #[test]
    fn auxiliary_vectors_only_for_gn() {
        let kv = KernelVectors::new(ModelKind::MassiveThirring, 0.2).unwrap();
        assert!(kv.eval(KernelVector::VtCheck, 0.0).is_err());
        assert!(kv
            .pairing(KernelVector::Vt, Weight::Skew, KernelVector::VgCheck)
            .is_err());
    }

    #[test]
    fn weights_square_to_identity_or_minus() {
        let v = [
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.1),
            Complex64::new(0.3, -4.0),
            Complex64::new(2.0, 0.0),
        ];
        assert_eq!(Weight::Skew.apply(Weight::Skew.apply(v)), v);
        // 𝒫² = I as well: i²·(−σ₁σ₁) blocks
        assert_eq!(Weight::Coupling.apply(Weight::Coupling.apply(v)), v);
    }

    #[test]
    fn difference_check_needs_room_inside_interval() {
        let kv = KernelVectors::new(ModelKind::GrossNeveu, 1e-6).unwrap();
        assert!(kv.d_omega_difference(0.0).is_err());
        let kv = KernelVectors::new(ModelKind::GrossNeveu, 0.4).unwrap();
        assert!((kv.d_omega_difference(0.8).unwrap() - kv.d_omega(0.8)).norm() < 1e-8);
    }
}
