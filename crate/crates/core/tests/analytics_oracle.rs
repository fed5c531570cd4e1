use approx::assert_relative_eq;
use num_complex::Complex64;

use dirac_stability::analytics::{
    compute_corrections, gn_norms, mtm_norms, projection_matrix_elements, slopes,
    solvability_residuals, KernelVector, KernelVectors, Weight,
};
use dirac_stability::quadrature::{integrate, integrate_symmetric, QuadConfig};
use dirac_stability::soliton::{ModelKind, SolitonProfile};

const MTM_OMEGAS: [f64; 8] = [-0.9, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9];
const GN_OMEGAS: [f64; 8] = [0.1, 0.2, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 0.9, 0.95];

fn line_integral<F: Fn(f64) -> f64>(mu: f64, f: F) -> f64 {
    integrate_symmetric(f, 38.0 / mu, QuadConfig::default()).unwrap()
}

fn quad_norm_sq(model: ModelKind, omega: f64) -> f64 {
    let u = SolitonProfile::new(model, omega).unwrap();
    line_integral(u.mu(), |x| u.eval(x).norm_sqr())
}

/// `∫ 2 Re(Ū ∂_ω U) dx` by quadrature.
fn quad_norm_sq_derivative(model: ModelKind, omega: f64) -> f64 {
    let u = SolitonProfile::new(model, omega).unwrap();
    line_integral(u.mu(), |x| {
        2.0 * (u.eval(x).conj() * u.eval_omega_derivative(x)).re
    })
}

pub fn i_omega_by_quadrature(omega: f64) -> f64 {
    let r = integrate(
        |z: f64| 1.0 / (1.0 + omega * z.cosh()).powi(2),
        0.0,
        40.0,
        QuadConfig::default(),
    )
    .unwrap();
    (1.0 - omega * omega) * r.value
}

#[test]
fn mtm_closed_forms_match_quadrature() {
    for &w in &MTM_OMEGAS {
        let n = mtm_norms(w).unwrap();
        let u = SolitonProfile::new(ModelKind::MassiveThirring, w).unwrap();
        let du = line_integral(u.mu(), |x| u.eval_derivative(x).norm_sqr());
        let mom = line_integral(u.mu(), |x| {
            let (v, dv) = (u.eval(x), u.eval_derivative(x));
            let cross = Complex64::new(0.0, 0.5) * (v.conj() * dv - v * dv.conj());
            w * v.norm_sqr() + cross.re
        });
        assert_relative_eq!(
            n.norm_sq_u,
            quad_norm_sq(ModelKind::MassiveThirring, w),
            max_relative = 1e-9
        );
        assert_relative_eq!(n.norm_sq_du, du, max_relative = 1e-9);
        assert_relative_eq!(n.momentum_like, mom, max_relative = 1e-9);
        assert_relative_eq!(
            n.d_norm_sq_u,
            quad_norm_sq_derivative(ModelKind::MassiveThirring, w),
            max_relative = 1e-9
        );
    }
}

#[test]
fn gn_closed_forms_match_quadrature() {
    for &w in &GN_OMEGAS {
        let n = gn_norms(w).unwrap();
        assert_relative_eq!(
            n.norm_sq_u,
            quad_norm_sq(ModelKind::GrossNeveu, w),
            max_relative = 1e-9
        );
        assert_relative_eq!(
            n.d_norm_sq_u,
            quad_norm_sq_derivative(ModelKind::GrossNeveu, w),
            max_relative = 1e-9
        );
        assert_relative_eq!(n.i_omega, i_omega_by_quadrature(w), max_relative = 1e-9);
    }
}

#[test]
fn i_omega_reference_values() {
    assert_relative_eq!(
        gn_norms(2.0 / 3.0).unwrap().i_omega,
        0.291_227,
        max_relative = 2e-6
    );
    assert_relative_eq!(
        gn_norms(1.0 / 3.0).unwrap().i_omega,
        0.869_676,
        max_relative = 2e-6
    );
    assert_relative_eq!(
        gn_norms(0.5).unwrap().i_omega,
        0.520_692,
        max_relative = 2e-6
    );
}

#[test]
fn slopes_are_positive_inside_intervals() {
    for k in 1..40 {
        let w = -1.0 + k as f64 / 20.0;
        let (r, i) = slopes(ModelKind::MassiveThirring, w).unwrap();
        assert!(r > 0.0 && i > 0.0, "MTM {w}");
        let w = k as f64 / 40.0;
        let (r, i) = slopes(ModelKind::GrossNeveu, w).unwrap();
        assert!(r > 0.0 && i > 0.0, "GN {w}");
    }
}

#[test]
fn vanishing_projections() {
    for (model, w) in [
        (ModelKind::MassiveThirring, 0.5),
        (ModelKind::MassiveThirring, -0.3),
        (ModelKind::GrossNeveu, 0.5),
        (ModelKind::GrossNeveu, 2.0 / 3.0),
    ] {
        let table = projection_matrix_elements(model, w).unwrap();
        for e in &table {
            if e.vanishes {
                assert!(
                    e.value.norm() <= 1e-9,
                    "{model} {w}: {} = {}",
                    e.label(),
                    e.value
                );
            } else {
                assert!(
                    e.value.norm() > 1e-3,
                    "{model} {w}: {} = {}",
                    e.label(),
                    e.value
                );
            }
        }
    }
}

#[test]
fn nonvanishing_projection_values() {
    let kv = KernelVectors::new(ModelKind::MassiveThirring, 0.5).unwrap();
    let mu = 0.75f64.sqrt();
    let g = kv
        .pairing(KernelVector::Vg, Weight::Skew, KernelVector::VgTilde)
        .unwrap();
    // −i d/dω ∫|U|² = 2i/√(1−ω²)
    assert!((g - Complex64::new(0.0, 2.0 / mu)).norm() < 1e-9);
    let t = kv
        .pairing(KernelVector::Vt, Weight::Skew, KernelVector::VtTilde)
        .unwrap();
    assert!((t - Complex64::new(0.0, -2.0 * mu)).norm() < 1e-9);

    let kv = KernelVectors::new(ModelKind::GrossNeveu, 0.5).unwrap();
    let a3 = kv
        .pairing(KernelVector::VgTilde, Weight::Skew, KernelVector::VtCheck)
        .unwrap();
    assert!((a3 - Complex64::new(1.0 / (2.0 * 0.5 * mu), 0.0)).norm() < 1e-9);
    let a4 = kv
        .pairing(KernelVector::Vt, Weight::Coupling, KernelVector::VtTilde)
        .unwrap();
    assert!(a4.norm() < 1e-9);
}

#[test]
fn solvability_conditions_hold_with_quadrature_coefficients() {
    for (model, w) in [
        (ModelKind::MassiveThirring, -0.5),
        (ModelKind::MassiveThirring, 0.0),
        (ModelKind::MassiveThirring, 0.7),
        (ModelKind::GrossNeveu, 1.0 / 3.0),
        (ModelKind::GrossNeveu, 2.0 / 3.0),
        (ModelKind::GrossNeveu, 0.9),
    ] {
        let (t, g) = solvability_residuals(model, w).unwrap();
        assert!(t <= 1e-9 && g <= 1e-9, "{model} {w}: {t:e} {g:e}");
    }
}

#[test]
fn corrections_and_vanishing_second_order() {
    for w in [0.1, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.9] {
        let c = compute_corrections(w).unwrap();
        assert!(c.alpha_denominator.norm() > 1e-6 && c.beta_denominator.norm() > 1e-6);
        assert!(c.alpha.norm().is_finite() && c.beta.norm().is_finite());
        for d in c.lambda2_diagonal {
            assert!(d.norm() <= 1e-8, "omega {w}: diagonal {d}");
        }
        for o in c.off_diagonal_residual {
            assert!(o.norm() <= 1e-10, "omega {w}: off-diagonal {o}");
        }
    }
    let c = compute_corrections(2.0 / 3.0).unwrap();
    assert!(
        (c.beta - Complex64::new(0.0, -0.471_423)).norm() < 1e-5,
        "{}",
        c.beta
    );
}
