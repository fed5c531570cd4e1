use serde::Serialize;

use dirac_stability::analytics::asymptotic_prediction;
use dirac_stability::spectrum::{PointClass, METRIC_CUTOFF};
use dirac_stability::{
    assemble, build_grid, continuous_bands, eigvals, isolated_eigs, par, spurious_metric,
    track_branches, Error as CoreError, Exec, Form, ModelKind, SolitonProfile, Tracking,
};

use crate::cli::Format;
use crate::config::{parse_range, parse_usize_list, Echo, Settings};
use crate::error::{CliError, CliResult};
use crate::output::Sink;

fn default_name(command: &str, format: Format) -> String {
    match format {
        Format::Csv => format!("{command}.csv"),
        Format::Json => format!("{command}.json"),
    }
}

#[derive(Serialize)]
struct SolitonRow {
    x: f64,
    re_u: f64,
    im_u: f64,
    abs_u: f64,
}

pub fn soliton(s: &Settings) -> CliResult<()> {
    let model = s.model()?;
    let omega = s.single_omega()?;
    let profile = if model == ModelKind::MassiveThirring && omega == -1.0 && s.allow_limit {
        SolitonProfile::mtm_algebraic_limit()
    } else {
        SolitonProfile::new(model, omega)?
    };
    let points = s.points.unwrap_or(801);
    if points < 2 {
        return Err(CoreError::Argument(format!("need at least 2 points, got {points}")).into());
    }
    let x_max = match s.x_max {
        Some(x) if x.is_finite() && x > 0.0 => x,
        Some(x) => {
            return Err(CoreError::Argument(format!("x_max must be positive, got {x}")).into())
        }
        None if profile.mu() > 0.0 => (20.0 / profile.mu()).min(200.0),
        None => 200.0,
    };
    let last = (points - 1) as f64;
    let rows: Vec<SolitonRow> = (0..points)
        .map(|k| {
            // integer numerator keeps the midpoint at exactly 0
            let x = x_max * (2.0 * k as f64 - last) / last;
            let u = profile.eval(x);
            // + 0.0 folds −0 into +0
            SolitonRow {
                x,
                re_u: u.re + 0.0,
                im_u: u.im + 0.0,
                abs_u: u.norm(),
            }
        })
        .collect();
    let echo = Echo::new("soliton")
        .with("model", model.tag())
        .with("omega", omega)
        .with("points", points)
        .with("x_max", x_max)
        .with("allow_limit", s.allow_limit);
    let sink = Sink::open(
        s.destination(&default_name("soliton", s.format()))
            .as_deref(),
    )?;
    match s.format() {
        Format::Csv => sink.csv(&echo, &[], &rows),
        Format::Json => sink.json(&echo, &serde_json::json!({ "samples": rows })),
    }
}

#[derive(Serialize)]
struct AsymptoticsRow {
    omega: f64,
    lambda_r: f64,
    lambda_i: f64,
    alpha_re: Option<f64>,
    alpha_im: Option<f64>,
    beta_re: Option<f64>,
    beta_im: Option<f64>,
}

pub fn asymptotics(s: &Settings, exec: Exec) -> CliResult<()> {
    let model = s.model()?;
    let omegas = match (s.omegas()?, &s.omega_range) {
        (Some(list), _) => list,
        (None, Some(range)) => parse_range(range)?,
        (None, None) => parse_range(match model {
            ModelKind::MassiveThirring => "-0.95:0.95:0.05",
            ModelKind::GrossNeveu => "0.05:0.95:0.05",
        })?,
    };
    let rows = par::try_map_collect(exec, &omegas, |&w| {
        asymptotic_prediction(model, w).map(|a| AsymptoticsRow {
            omega: w,
            lambda_r: a.lambda_r,
            lambda_i: a.lambda_i,
            alpha_re: a.alpha.map(|z| z.re),
            alpha_im: a.alpha.map(|z| z.im),
            beta_re: a.beta.map(|z| z.re),
            beta_im: a.beta.map(|z| z.im),
        })
    })?;
    let echo = Echo::new("asymptotics")
        .with("model", model.tag())
        .with("omega", &omegas);
    let sink = Sink::open(
        s.destination(&default_name("asymptotics", s.format()))
            .as_deref(),
    )?;
    match s.format() {
        Format::Csv => sink.csv(&echo, &[], &rows),
        Format::Json => sink.json(&echo, &serde_json::json!({ "rows": rows })),
    }
}

#[derive(Serialize)]
struct EigenRow {
    re_lambda: f64,
    im_lambda: f64,
    band_distance: f64,
    isolated: bool,
}

pub fn spectrum(s: &Settings) -> CliResult<()> {
    let model = s.model()?;
    let omega = s.single_omega()?;
    let p = s.p()?;
    let (n, scale) = (s.n_for(model), s.scale());
    let grid = build_grid(n, scale)?;
    let op = assemble(model, omega, p, &grid, Form::BlockDiagonalized)?;
    if let Some(path) = &s.matrix_out {
        let mut sink = Sink::open(Some(path))?;
        op.write_csv(&mut sink)?;
        sink.finish()?;
    }
    let set = eigvals(&op.matrix)?;
    let bands = continuous_bands(model, omega, p)?;
    let margin = bands.default_margin();
    let isolated = isolated_eigs(&set.values, &bands, margin);
    let rows: Vec<EigenRow> = set
        .values
        .iter()
        .map(|z| EigenRow {
            re_lambda: z.re,
            im_lambda: z.im,
            band_distance: bands.distance(*z),
            isolated: isolated.contains(z),
        })
        .collect();
    let [outer, inner] = bands.edges();
    let echo = Echo::new("spectrum")
        .with("model", model.tag())
        .with("omega", omega)
        .with("p", p)
        .with("n", n)
        .with("scale", scale);
    let sink = Sink::open(
        s.destination(&default_name("spectrum", s.format()))
            .as_deref(),
    )?;
    match s.format() {
        Format::Csv => {
            let note = format!(
                "bands outer={outer} inner={inner} gap_closed={} margin={margin} isolated={}",
                bands.gap_closed(),
                isolated.len()
            );
            sink.csv(&echo, &[note], &rows)
        }
        Format::Json => sink.json(
            &echo,
            &serde_json::json!({
                "bands": {
                    "outer_edge": outer,
                    "inner_edge": inner,
                    "gap_closed": bands.gap_closed(),
                    "margin": margin,
                },
                "isolated": isolated.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                "eigenvalues": rows,
            }),
        ),
    }
}

/// Step 0.01 near the origin, 0.05 beyond.
const DEFAULT_P_RANGE: &str = "0.01:0.2:0.01,0.25:1.5:0.05";

#[derive(Serialize)]
struct BranchRow {
    model: &'static str,
    omega: f64,
    p: f64,
    branch_id: usize,
    re_lambda: f64,
    im_lambda: f64,
    class: &'static str,
}

#[derive(Serialize)]
struct EventRecord {
    p: f64,
    branch_id: usize,
    event: String,
}

#[derive(Serialize)]
struct SweepSummary {
    omega: f64,
    /// Last p with a real pair and the next p without one.
    instability_threshold: Option<[f64; 2]>,
    real_pair_at_final_p: bool,
    max_growth_rate: [f64; 2],
    first_gap_closed_p: Option<f64>,
    events: Vec<EventRecord>,
}

fn summarize(t: &Tracking, p_final: f64) -> SweepSummary {
    let real = t.p_with_class(PointClass::RealPair);
    let growth = t
        .growth_rates()
        .into_iter()
        .fold([f64::NAN, 0.0], |best, (p, g)| {
            if g > best[1] || best[0].is_nan() {
                [p, g]
            } else {
                best
            }
        });
    SweepSummary {
        omega: t.omega,
        instability_threshold: t.instability_threshold().map(|(a, b)| [a, b]),
        real_pair_at_final_p: real.last() == Some(&p_final),
        max_growth_rate: growth,
        first_gap_closed_p: t.gap_closed.iter().find(|g| g.1).map(|g| g.0),
        events: t
            .events
            .iter()
            .map(|e| EventRecord {
                p: e.p,
                branch_id: e.branch_id,
                event: e.kind.to_string(),
            })
            .collect(),
    }
}

pub fn sweep(s: &Settings, exec: Exec) -> CliResult<()> {
    let model = s.model()?;
    let omegas = s
        .omegas()?
        .ok_or_else(|| CliError::Config("--omega is required".into()))?;
    let ps = parse_range(s.p_range.as_deref().unwrap_or(DEFAULT_P_RANGE))?;
    let (n, scale) = (s.n_for(model), s.scale());
    let grid = build_grid(n, scale)?;
    let p_final = *ps.last().expect("nonempty range");

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &omega in &omegas {
        let t = track_branches(model, omega, &ps, &grid, exec)?;
        let mut these: Vec<BranchRow> = t
            .branches
            .iter()
            .flat_map(|b| {
                b.points.iter().map(move |pt| BranchRow {
                    model: model.tag(),
                    omega,
                    p: pt.p,
                    branch_id: b.branch_id,
                    re_lambda: pt.lambda.re,
                    im_lambda: pt.lambda.im,
                    class: pt.class.tag(),
                })
            })
            .collect();
        these.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.branch_id.cmp(&b.branch_id)));
        rows.extend(these);
        summaries.push(summarize(&t, p_final));
    }

    let echo = Echo::new("sweep")
        .with("model", model.tag())
        .with("omega", &omegas)
        .with("p_range", s.p_range.as_deref().unwrap_or(DEFAULT_P_RANGE))
        .with("n", n)
        .with("scale", scale);
    let summary = serde_json::json!({ "model": model.tag(), "sweeps": summaries });
    let sink = Sink::open(s.destination(&default_name("sweep", s.format())).as_deref())?;
    match s.format() {
        Format::Json => sink.json(&echo, &summary),
        Format::Csv => {
            let companion = sink.path().map(|p| p.with_extension("summary.json"));
            sink.csv(&echo, &[], &rows)?;
            if let Some(path) = companion {
                Sink::open(Some(&path))?.json(&echo, &summary)?;
            }
            Ok(())
        }
    }
}

/// Reference metrics `(model, ω, N, value)` for `max |Re λ|` over `|Im λ| < 10` at p = 0.
const REFERENCE: [(ModelKind, f64, usize, f64); 15] = [
    (ModelKind::MassiveThirring, -0.5, 100, 1.96e-1),
    (ModelKind::MassiveThirring, 0.0, 100, 2.57e-1),
    (ModelKind::MassiveThirring, 0.5, 100, 1.16e-1),
    (ModelKind::MassiveThirring, -0.5, 300, 1.36e-4),
    (ModelKind::MassiveThirring, 0.0, 300, 2.18e-4),
    (ModelKind::MassiveThirring, 0.5, 300, 7.02e-5),
    (ModelKind::MassiveThirring, -0.5, 500, 2.22e-7),
    (ModelKind::MassiveThirring, 0.0, 500, 8.77e-5),
    (ModelKind::MassiveThirring, 0.5, 500, 6.56e-8),
    (ModelKind::GrossNeveu, 1.0 / 3.0, 100, 6.48e-2),
    (ModelKind::GrossNeveu, 2.0 / 3.0, 100, 2.03e-3),
    (ModelKind::GrossNeveu, 1.0 / 3.0, 300, 1.72e-2),
    (ModelKind::GrossNeveu, 2.0 / 3.0, 300, 1.68e-3),
    (ModelKind::GrossNeveu, 1.0 / 3.0, 500, 1.38e-2),
    (ModelKind::GrossNeveu, 2.0 / 3.0, 500, 1.20e-3),
];

/// Allowed factor above the reference value (one order of magnitude).
const CEILING_FACTOR: f64 = 10.0;

#[derive(Serialize)]
struct ValidationRow {
    model: &'static str,
    omega: f64,
    n: usize,
    metric: f64,
    reference: f64,
    ceiling: f64,
    ratio: f64,
    pass: bool,
}

pub fn validate(s: &Settings, exec: Exec) -> CliResult<()> {
    let models = s.models_or_both()?;
    let ns = parse_usize_list(s.ns.as_deref().unwrap_or("100,300"))?;
    let scale = s.scale();
    let cases: Vec<(ModelKind, f64, usize, f64)> = REFERENCE
        .iter()
        .copied()
        .filter(|c| models.contains(&c.0) && ns.contains(&c.2))
        .collect();
    if cases.is_empty() {
        return Err(CliError::Config(format!(
            "no reference values for N in {ns:?}; available: 100, 300, 500"
        )));
    }
    let rows = par::try_map_collect(exec, &cases, |&(model, omega, n, reference)| {
        let grid = build_grid(n, scale)?;
        let op = assemble(model, omega, 0.0, &grid, Form::BlockDiagonalized)?;
        let metric = spurious_metric(&eigvals(&op.matrix)?.values, METRIC_CUTOFF)?;
        let ceiling = CEILING_FACTOR * reference;
        Ok::<_, CoreError>(ValidationRow {
            model: model.tag(),
            omega,
            n,
            metric,
            reference,
            ceiling,
            ratio: metric / reference,
            pass: metric <= ceiling,
        })
    })?;
    for r in &rows {
        log::info!(
            "{} omega={:.4} N={}: {:.3e} vs reference {:.3e} ({})",
            r.model,
            r.omega,
            r.n,
            r.metric,
            r.reference,
            if r.pass { "ok" } else { "above ceiling" }
        );
    }
    let echo = Echo::new("validate")
        .with("models", models.iter().map(|m| m.tag()).collect::<Vec<_>>())
        .with("ns", &ns)
        .with("scale", scale);
    let sink = Sink::open(
        s.destination(&default_name("validate", s.format()))
            .as_deref(),
    )?;
    match s.format() {
        Format::Csv => sink.csv(&echo, &[], &rows)?,
        Format::Json => sink.json(&echo, &serde_json::json!({ "rows": rows }))?,
    }
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            format!(
                "{} omega={:.4} N={} metric {:.3e} > {:.3e}",
                r.model, r.omega, r.n, r.metric, r.ceiling
            )
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join("; ")))
    }
}
