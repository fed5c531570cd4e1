//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dirac_stability::analytics::{gn_norms, mtm_norms, slopes};
use dirac_stability::cheb::{build_grid, ChebGrid, DEFAULT_SCALE};
use dirac_stability::eigen::{eig, eigvals, ComplexMatrix};
use dirac_stability::operator::{
    assemble_with, continuous_bands, symmetry_residual, AssemblyOptions, Form,
};
use dirac_stability::par::Exec;
use dirac_stability::quadrature::{integrate, integrate_symmetric, QuadConfig};
use dirac_stability::soliton::{ModelKind, SolitonProfile};
use dirac_stability::spectrum::{
    compute_spectrum, slope_fit, spurious_metric, track_branches, PointClass, METRIC_CUTOFF,
};

type C = Complex64;
type Outcome = Result<String, String>;

const MTM: ModelKind = ModelKind::MassiveThirring;
const GN: ModelKind = ModelKind::GrossNeveu;

fn grid(n: usize) -> ChebGrid {
    build_grid(n, DEFAULT_SCALE).expect("valid grid")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// Spectra at p = 0 shared by the table and kernel criteria.
struct TableSpectra {
    n100: Vec<(ModelKind, f64, Vec<C>)>,
    n300: Vec<(ModelKind, f64, Vec<C>)>,
}

const TABLE_MTM: [(f64, f64, f64); 3] = [
    (-0.5, 1.96e-1, 1.36e-4),
    (0.0, 2.57e-1, 2.18e-4),
    (0.5, 1.16e-1, 7.02e-5),
];
const TABLE_GN: [(f64, f64, f64); 2] =
    [(1.0 / 3.0, 6.48e-2, 1.72e-2), (2.0 / 3.0, 2.03e-3, 1.68e-3)];

fn table_spectra() -> Result<TableSpectra, String> {
    let points: Vec<(ModelKind, f64)> = TABLE_MTM
        .iter()
        .map(|r| (MTM, r.0))
        .chain(TABLE_GN.iter().map(|r| (GN, r.0)))
        .collect();
    let solve = |n: usize| -> Result<Vec<(ModelKind, f64, Vec<C>)>, String> {
        let g = grid(n);
        dirac_stability::par::try_map_collect(Exec::Parallel, &points, |&(m, w)| {
            compute_spectrum(m, w, 0.0, &g).map(|s| (m, w, s.values))
        })
        .map_err(err)
    };
    Ok(TableSpectra {
        n100: solve(100)?,
        n300: solve(300)?,
    })
}

fn c1_closed_forms() -> Outcome {
    let start = Instant::now();
    let line =
        |mu: f64, f: &dyn Fn(f64) -> f64| integrate_symmetric(f, 38.0 / mu, QuadConfig::default());
    let mut worst: f64 = 0.0;
    for w in [-0.9, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9] {
        let n = mtm_norms(w).map_err(err)?;
        let u = SolitonProfile::new(MTM, w).map_err(err)?;
        let mu = u.mu();
        let nu = line(mu, &|x| u.eval(x).norm_sqr()).map_err(err)?;
        let ndu = line(mu, &|x| u.eval_derivative(x).norm_sqr()).map_err(err)?;
        let mom = line(mu, &|x| {
            let (v, dv) = (u.eval(x), u.eval_derivative(x));
            w * v.norm_sqr() - (v.conj() * dv).im
        })
        .map_err(err)?;
        let dn = line(mu, &|x| {
            2.0 * (u.eval(x).conj() * u.eval_omega_derivative(x)).re
        })
        .map_err(err)?;
        for (a, b) in [
            (n.norm_sq_u, nu),
            (n.norm_sq_du, ndu),
            (n.momentum_like, mom),
            (n.d_norm_sq_u, dn),
        ] {
            worst = worst.max(rel(a, b));
        }
    }
    for w in [0.1, 0.2, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.75, 0.9, 0.95] {
        let n = gn_norms(w).map_err(err)?;
        let u = SolitonProfile::new(GN, w).map_err(err)?;
        let mu = u.mu();
        let nu = line(mu, &|x| u.eval(x).norm_sqr()).map_err(err)?;
        let dn = line(mu, &|x| {
            2.0 * (u.eval(x).conj() * u.eval_omega_derivative(x)).re
        })
        .map_err(err)?;
        let i = integrate(
            |z: f64| 1.0 / (1.0 + w * z.cosh()).powi(2),
            0.0,
            40.0,
            QuadConfig::default(),
        )
        .map_err(err)?
        .value
            * (1.0 - w * w);
        for (a, b) in [(n.norm_sq_u, nu), (n.d_norm_sq_u, dn), (n.i_omega, i)] {
            worst = worst.max(rel(a, b));
        }
    }
    let t = start.elapsed();
    check(
        worst <= 1e-9 && within(t, 1.0),
        format!("max rel err {worst:.2e}, {t:.2?}"),
    )
}

fn c2_soliton_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (model, omegas) in [
        (MTM, [-0.8, -0.4, 0.0, 0.4, 0.8]),
        (GN, [0.1, 0.3, 0.5, 0.7, 0.9]),
    ] {
        for w in omegas {
            let u = SolitonProfile::new(model, w).map_err(err)?;
            for k in 0..50 {
                let x = -15.0 + 30.0 * k as f64 / 49.0 + 1e-3;
                worst = worst.max(u.ode_residual(x));
            }
        }
    }
    let t = start.elapsed();
    check(
        worst <= 1e-10 && within(t, 1.0),
        format!("max residual {worst:.2e}, {t:.2?}"),
    )
}

fn slope_criterion(model: ModelKind, omegas: &[f64], tol: f64, limit_s: f64) -> Outcome {
    let g = grid(200);
    let ps = [0.02, 0.04, 0.06, 0.08, 0.10];
    let mut parts = Vec::new();
    let mut ok = true;
    for &w in omegas {
        let start = Instant::now();
        let fit = slope_fit(model, w, &ps, &g, Exec::Parallel).map_err(err)?;
        let t = start.elapsed();
        let (lr, li) = slopes(model, w).map_err(err)?;
        let (er, ei) = (rel(fit.lambda_r_hat, lr), rel(fit.lambda_i_hat, li));
        ok &= er <= tol && ei <= tol && within(t, limit_s);
        parts.push(format!("ω={w:.3}: Λr {er:.1e}, Λi {ei:.1e} ({t:.1?})"));
    }
    check(ok, parts.join("; "))
}

fn table_criterion(spectra: &TableSpectra, model: ModelKind, rows: &[(f64, f64, f64)]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for &(w, ref100, ref300) in rows {
        for (set, reference, n) in [(&spectra.n100, ref100, 100), (&spectra.n300, ref300, 300)] {
            let values = &set
                .iter()
                .find(|(m, om, _)| *m == model && *om == w)
                .expect("spectrum computed")
                .2;
            let metric = spurious_metric(values, METRIC_CUTOFF).map_err(err)?;
            ok &= metric <= 10.0 * reference;
            parts.push(format!(
                "ω={w:.3} N={n}: {metric:.2e} (table {reference:.2e})"
            ));
        }
    }
    check(ok, parts.join("; "))
}

fn c7_kernel(spectra: &TableSpectra) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (model, w, values) in &spectra.n300 {
        let inner = continuous_bands(*model, *w, 0.0).map_err(err)?.edges()[1];
        let in_gap = |z: &&C| z.im.abs() < inner;
        let kernel = values
            .iter()
            .filter(in_gap)
            .filter(|z| z.norm() <= 1e-4)
            .count();
        let next = values
            .iter()
            .filter(in_gap)
            .map(|z| z.norm())
            .filter(|&r| r > 1e-4)
            .fold(f64::INFINITY, f64::min);
        ok &= kernel == 4 && next >= 1e-3;
        parts.push(format!(
            "{} ω={w:.3}: {kernel} in kernel, next |λ|={next:.2e}",
            model.tag()
        ));
    }
    check(ok, parts.join("; "))
}

fn c8_symmetry() -> Outcome {
    let g = grid(100);
    let cases: Vec<(ModelKind, f64, f64)> = [
        (-0.5, 0.1),
        (-0.2, 0.5),
        (0.0, 0.36),
        (0.3, 0.8),
        (0.5, 1.2),
        (0.8, 0.05),
    ]
    .iter()
    .map(|&(w, p)| (MTM, w, p))
    .chain(
        [
            (0.2, 0.1),
            (1.0 / 3.0, 0.4),
            (0.5, 0.7),
            (2.0 / 3.0, 0.05),
            (2.0 / 3.0, 1.2),
            (0.9, 0.3),
        ]
        .iter()
        .map(|&(w, p)| (GN, w, p)),
    )
    .collect();
    let residuals = dirac_stability::par::try_map_collect(Exec::Parallel, &cases, |&(m, w, p)| {
        let s = compute_spectrum(m, w, p, &g)?;
        symmetry_residual(&s.values, m)
    })
    .map_err(err)?;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    check(
        worst <= 1e-8,
        format!("{} cases, max residual {worst:.2e}", cases.len()),
    )
}

/// Constant-coefficient symbol at `k = 0`: the operator applied to constant
/// fields, read off at an interior node.
fn symbol_at_zero(model: ModelKind, w: f64, p: f64) -> Result<ComplexMatrix, String> {
    let g = grid(2);
    let op = assemble_with(
        model,
        w,
        p,
        &g,
        Form::BlockDiagonalized,
        AssemblyOptions {
            zero_potential: true,
        },
    )
    .map_err(err)?;
    let m = g.len();
    Ok(ComplexMatrix::from_fn(4, |r, c| {
        (0..m).map(|j| op.matrix[(r * m + 1, c * m + j)]).sum()
    }))
}

fn c9_continuous_spectrum() -> Outcome {
    let g = grid(100);
    let mut worst_band: f64 = 0.0;
    let mut worst_edge: f64 = 0.0;
    for (model, w, p) in [
        (MTM, 0.2, 0.4),
        (MTM, -0.6, 1.3),
        (GN, 0.6, 0.7),
        (GN, 0.25, 0.0),
    ] {
        let op = assemble_with(
            model,
            w,
            p,
            &g,
            Form::BlockDiagonalized,
            AssemblyOptions {
                zero_potential: true,
            },
        )
        .map_err(err)?;
        let bands = continuous_bands(model, w, p).map_err(err)?;
        for z in eigvals(&op.matrix).map_err(err)?.values {
            worst_band = worst_band.max(bands.distance(z) / z.norm().max(1.0));
        }
        let mut symbol: Vec<f64> = eigvals(&symbol_at_zero(model, w, p)?)
            .map_err(err)?
            .values
            .iter()
            .map(|z| z.im)
            .collect();
        let mut edges: Vec<f64> = bands.band_edges().iter().map(|e| e.0).collect();
        symbol.sort_by(f64::total_cmp);
        edges.sort_by(f64::total_cmp);
        for (a, b) in symbol.iter().zip(&edges) {
            worst_edge = worst_edge.max((a - b).abs());
        }
    }
    check(
        worst_band <= 1e-8 && worst_edge <= 1e-14,
        format!("band distance {worst_band:.2e} (relative to max(1,|λ|)), k=0 edge mismatch {worst_edge:.1e}"),
    )
}

fn c10_events() -> Outcome {
    let g = grid(120);
    let ps: Vec<f64> = (30..=40).map(|k| k as f64 / 100.0).collect();
    let mtm = track_branches(MTM, 0.0, &ps, &g, Exec::Parallel).map_err(err)?;
    let quartet = mtm.p_with_class(PointClass::ComplexQuartet);
    let has = |p: f64| quartet.iter().any(|q| (q - p).abs() < 1e-9);
    let window = has(0.36) && !has(0.30);
    let closes = |p: f64| continuous_bands(MTM, 0.0, p).map(|b| b.gap_closed());
    let closure = closes(1.0).map_err(err)? && !closes(0.99).map_err(err)?;

    let ps: Vec<f64> = (1..=24).map(|k| k as f64 * 0.05).collect();
    let gn = track_branches(GN, 2.0 / 3.0, &ps, &g, Exec::Parallel).map_err(err)?;
    let threshold = gn.instability_threshold();
    let real = gn.p_with_class(PointClass::RealPair);
    let real_at_one = real.iter().any(|p| (p - 1.0).abs() < 1e-9);
    let finite = matches!(threshold, Some((_, next)) if next <= 1.0 + 1e-9);
    let first = quartet.first().copied().unwrap_or(f64::NAN);
    let last = quartet.last().copied().unwrap_or(f64::NAN);
    check(
        window && closure && finite && !real_at_one,
        format!(
            "MTM ω=0 quartet on [{first:.2}, {last:.2}] of [0.30, 0.40], gap closes at p=1: {closure}; \
             GN ω=2/3 threshold {threshold:?}, real pair at p=1: {real_at_one}"
        ),
    )
}

/// Unitary factor of a modified Gram–Schmidt QR.
fn unitary(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut cols: Vec<Vec<C>> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)]).collect())
        .collect();
    for j in 0..n {
        for k in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj: C = done[k]
                .iter()
                .zip(&rest[0])
                .map(|(q, v)| q.conj() * v)
                .sum();
            rest[0]
                .iter_mut()
                .zip(&done[k])
                .for_each(|(v, q)| *v -= proj * q);
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

fn c11_eigensolver() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut random = |n: usize| {
        ComplexMatrix::from_fn(n, |_, _| {
            C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    };
    let matched = |a: &[C], b: &[C]| {
        let mut pool = b.to_vec();
        a.iter().fold(0.0f64, |acc, z| {
            let (k, d) = pool
                .iter()
                .enumerate()
                .map(|(k, w)| (k, (w - z).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("equal lengths");
            pool.swap_remove(k);
            acc.max(d)
        })
    };
    let (mut trace, mut det, mut sim, mut scale, mut resid): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    for n in [1, 2, 3, 5, 8, 13, 21, 32, 48, 64] {
        let a = random(n);
        let set = eig(&a).map_err(err)?;
        let sum: C = set.values.iter().sum();
        let prod: C = set.values.iter().product();
        trace = trace.max((sum - a.trace()).norm() / a.frobenius_norm());
        det = det.max((prod - a.determinant()).norm() / a.determinant().norm());
        resid = set.residuals.iter().copied().fold(resid, f64::max);
        let c = C::new(-1.7, 0.6);
        let scaled: Vec<C> = set.values.iter().map(|z| c * z).collect();
        scale = scale.max(matched(&scaled, &eigvals(&a.scaled(c)).map_err(err)?.values) / c.norm());
        if n <= 32 {
            let q = unitary(&random(n));
            let b = q.adjoint().matmul(&a).matmul(&q);
            sim = sim.max(matched(&set.values, &eigvals(&b).map_err(err)?.values));
        }
    }
    let t = start.elapsed();
    check(
        trace <= 1e-9 && det <= 1e-9 && sim <= 1e-8 && scale <= 1e-9 && resid <= 1e-10 && within(t, 10.0),
        format!("trace {trace:.1e}, det {det:.1e}, similarity {sim:.1e}, scaling {scale:.1e}, residual {resid:.1e}, {t:.2?}"),
    )
}

fn main() {
    let total = Instant::now();
    let mut results: Vec<(u8, &str, Outcome)> = Vec::new();
    let mut run = |id: u8, name: &'static str, f: &dyn Fn() -> Outcome| {
        let outcome = f();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {id:>2} {tag} {name}: {detail}");
        results.push((id, name, outcome));
    };
    run(1, "closed forms vs quadrature", &c1_closed_forms);
    run(2, "soliton ODE residual", &c2_soliton_exactness);
    run(3, "MTM asymptotic slopes", &|| {
        slope_criterion(MTM, &[-0.5, 0.0, 0.5], 0.01, 120.0)
    });
    run(4, "GN asymptotic slopes", &|| {
        slope_criterion(GN, &[1.0 / 3.0, 2.0 / 3.0], 0.015, 180.0)
    });
    let start = Instant::now();
    let spectra = table_spectra();
    let solve_time = start.elapsed();
    match &spectra {
        Ok(s) => {
            run(5, "MTM spurious-eigenvalue table", &|| {
                table_criterion(s, MTM, &TABLE_MTM).and_then(|d| {
                    check(
                        within(solve_time, 300.0),
                        format!("{d}; table solves {solve_time:.1?}"),
                    )
                })
            });
            run(6, "GN spurious-eigenvalue table", &|| {
                table_criterion(s, GN, &TABLE_GN)
            });
            run(7, "kernel multiplicity", &|| c7_kernel(s));
        }
        Err(e) => {
            for (id, name) in [
                (5, "MTM spurious-eigenvalue table"),
                (6, "GN spurious-eigenvalue table"),
                (7, "kernel multiplicity"),
            ] {
                run(id, name, &|| Err(e.clone()));
            }
        }
    }
    run(8, "eigenvalue reflection symmetry", &c8_symmetry);
    run(9, "continuous spectrum", &c9_continuous_spectrum);
    run(10, "sweep events", &c10_events);
    run(11, "eigensolver properties", &c11_eigensolver);

    let failed: Vec<u8> = results
        .iter()
        .filter(|r| r.2.is_err())
        .map(|r| r.0)
        .collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.1?}",
        results.len() - failed.len(),
        results.len(),
        total.elapsed()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
